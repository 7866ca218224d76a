//! Simplified producer-side state recursions.
//!
//! Producers carry three slow-moving states: a trust level per buyer, a
//! single risk attitude, and a cash position. Each tick the engine condenses
//! what happened into eight bounded factor signals and the states move by a
//! small weighted step, clamped into `[0, 1]`. Buyer choice scores trust,
//! risk appetite, and price into a single ranking.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::TopWeights;

#[derive(Debug, Error, PartialEq)]
pub enum ProxyError {
    #[error("invalid bounds: lower {lo} exceeds upper {hi}")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error("proxy parameters invalid: {0}")]
    InvalidParams(String),
    #[error("population mean of an empty list")]
    EmptyPopulation,
    #[error("negative monetary input: {0}")]
    NegativeAmount(f64),
    #[error("repayment {repayment} exceeds outstanding loan {outstanding}")]
    RepaymentExceedsLoan { repayment: f64, outstanding: f64 },
    #[error("no buyers to choose from")]
    NoBuyers,
}

/// Calibration of the producer-state recursions.
///
/// The initial-state bounds and the per-factor weights are calibration
/// values, not measured quantities; all of them are exposed in the scenario
/// configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProxyParams {
    /// Initial trust is drawn uniformly from this band.
    pub trust_init_lo: f64,
    pub trust_init_hi: f64,
    /// Initial risk attitude band.
    pub risk_init_lo: f64,
    pub risk_init_hi: f64,
    /// Initial off-farm and non-farm cash band (Php).
    pub income_lo: f64,
    pub income_hi: f64,
    /// Per-factor update weights. Factors 1-2 move trust, 3-8 move risk.
    pub step_weights: [f64; 8],
    /// Scales every weighted factor sum; one unit of signal moves a state by
    /// `step_size * weight` per tick.
    pub step_size: f64,
}

impl Default for ProxyParams {
    fn default() -> Self {
        Self {
            trust_init_lo: 0.2,
            trust_init_hi: 0.4,
            risk_init_lo: 0.2,
            risk_init_hi: 0.4,
            income_lo: 0.0,
            income_hi: 2000.0,
            // Access to credit dominates the price comparison in the trust
            // update; risk factors enter with unit weight.
            step_weights: [2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            step_size: 0.01,
        }
    }
}

impl ProxyParams {
    pub fn validate(&self) -> Result<(), ProxyError> {
        let band = |lo: f64, hi: f64| -> Result<(), ProxyError> {
            if lo > hi {
                return Err(ProxyError::InvalidBounds { lo, hi });
            }
            Ok(())
        };
        band(self.trust_init_lo, self.trust_init_hi)?;
        band(self.risk_init_lo, self.risk_init_hi)?;
        band(self.income_lo, self.income_hi)?;
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.trust_init_lo)
            || !unit(self.trust_init_hi)
            || !unit(self.risk_init_lo)
            || !unit(self.risk_init_hi)
        {
            return Err(ProxyError::InvalidParams(
                "trust/risk bounds must lie in [0,1]".into(),
            ));
        }
        if self.income_lo < 0.0 {
            return Err(ProxyError::InvalidParams("income bounds must be >= 0".into()));
        }
        if self.step_weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(ProxyError::InvalidParams(
                "step weights must be finite and >= 0".into(),
            ));
        }
        if self.step_size < 0.0 || !self.step_size.is_finite() {
            return Err(ProxyError::InvalidParams("step size must be >= 0".into()));
        }
        Ok(())
    }
}

/// A producer's trust toward one buyer, kept in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustLevel(f64);

impl TrustLevel {
    pub fn new(t: f64) -> Self {
        Self(t.clamp(0.0, 1.0))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// A producer's willingness to chase higher-paying but less reliable
/// buyers, kept in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskAttitude(f64);

impl RiskAttitude {
    pub fn new(r: f64) -> Self {
        Self(r.clamp(0.0, 1.0))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Per-tick directional effects, each clamped into `[-1, +1]`.
///
/// Trust factors:
/// - `loan_willingness`: did the buyer grant (+) or refuse (-) credit this tick
/// - `price_comparison`: how this buyer's price compares to the best alternative
///
/// Risk factors:
/// - `trust_feedback`: high trust in the cooperative damps risk appetite
/// - `price_fluctuation`: magnitude of recent market price moves
/// - `funds_sufficiency`: cash position after repayment vs. next input need
/// - `default_exposure`: outstanding debt relative to monthly need
/// - `price_gap`: market premium over the cooperative
/// - `demand_feedback`: harvest that found no modeled buyer discourages
///   risk-taking (0 when everything sold, -1 when everything sank)
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FactorSignals {
    pub loan_willingness: f64,
    pub price_comparison: f64,
    pub trust_feedback: f64,
    pub price_fluctuation: f64,
    pub funds_sufficiency: f64,
    pub default_exposure: f64,
    pub price_gap: f64,
    pub demand_feedback: f64,
}

impl FactorSignals {
    /// Clamp every component into the admissible band.
    pub fn clamped(self) -> Self {
        Self {
            loan_willingness: clamp_signal(self.loan_willingness),
            price_comparison: clamp_signal(self.price_comparison),
            trust_feedback: clamp_signal(self.trust_feedback),
            price_fluctuation: clamp_signal(self.price_fluctuation),
            funds_sufficiency: clamp_signal(self.funds_sufficiency),
            default_exposure: clamp_signal(self.default_exposure),
            price_gap: clamp_signal(self.price_gap),
            demand_feedback: clamp_signal(self.demand_feedback),
        }
    }
}

/// Draw an initial trust level uniformly from the configured band.
pub fn init_trust<R: Rng>(rng: &mut R, p: &ProxyParams) -> Result<TrustLevel, ProxyError> {
    Ok(TrustLevel::new(draw_uniform(
        rng,
        p.trust_init_lo,
        p.trust_init_hi,
    )?))
}

/// Draw an initial risk attitude uniformly from the configured band.
pub fn init_risk<R: Rng>(rng: &mut R, p: &ProxyParams) -> Result<RiskAttitude, ProxyError> {
    Ok(RiskAttitude::new(draw_uniform(
        rng,
        p.risk_init_lo,
        p.risk_init_hi,
    )?))
}

/// Uniform draw tolerating a degenerate (point) interval.
pub fn draw_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Result<f64, ProxyError> {
    if lo > hi {
        return Err(ProxyError::InvalidBounds { lo, hi });
    }
    if lo == hi {
        return Ok(lo);
    }
    Ok(rng.gen_range(lo..hi))
}

#[inline]
fn clamp_signal(v: f64) -> f64 {
    if v.is_finite() {
        v.clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

/// Trust moves by the weighted loan-willingness and price-comparison
/// signals, scaled by the step size and clamped.
pub fn update_trust(t: TrustLevel, sig: &FactorSignals, p: &ProxyParams) -> TrustLevel {
    let delta = p.step_weights[0] * clamp_signal(sig.loan_willingness)
        + p.step_weights[1] * clamp_signal(sig.price_comparison);
    TrustLevel::new(t.value() + p.step_size * delta)
}

/// Risk attitude moves by the six weighted risk factors, scaled and clamped.
pub fn update_risk(r: RiskAttitude, sig: &FactorSignals, p: &ProxyParams) -> RiskAttitude {
    let delta = p.step_weights[2] * clamp_signal(sig.trust_feedback)
        + p.step_weights[3] * clamp_signal(sig.price_fluctuation)
        + p.step_weights[4] * clamp_signal(sig.funds_sufficiency)
        + p.step_weights[5] * clamp_signal(sig.default_exposure)
        + p.step_weights[6] * clamp_signal(sig.price_gap)
        + p.step_weights[7] * clamp_signal(sig.demand_feedback);
    RiskAttitude::new(r.value() + p.step_size * delta)
}

/// Arithmetic mean of the population's state values.
pub fn population_mean(values: &[f64]) -> Result<f64, ProxyError> {
    if values.is_empty() {
        return Err(ProxyError::EmptyPopulation);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// A producer's cash position, tree stock, and outstanding debt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundsState {
    pub cash: f64,
    pub trees: u32,
    pub outstanding_loan: f64,
}

impl FundsState {
    pub fn new(cash: f64, trees: u32) -> Self {
        Self {
            cash,
            trees,
            outstanding_loan: 0.0,
        }
    }
}

/// One tick of producer cash bookkeeping: revenue in, production spend and
/// repayment out, fresh credit in. The caller sizes the repayment so cash
/// never goes negative.
pub fn update_funds(
    f: &FundsState,
    sold_kg: f64,
    unit_price: f64,
    production_cost: f64,
    repayment: f64,
    new_loan: f64,
) -> Result<FundsState, ProxyError> {
    for v in [sold_kg, unit_price, production_cost, repayment, new_loan] {
        if v < 0.0 || !v.is_finite() {
            return Err(ProxyError::NegativeAmount(v));
        }
    }
    if repayment > f.outstanding_loan + 1e-9 {
        return Err(ProxyError::RepaymentExceedsLoan {
            repayment,
            outstanding: f.outstanding_loan,
        });
    }
    Ok(FundsState {
        cash: f.cash + sold_kg * unit_price - production_cost - repayment + new_loan,
        trees: f.trees,
        outstanding_loan: (f.outstanding_loan - repayment + new_loan).max(0.0),
    })
}

/// Score every buyer and return the index of the best one.
///
/// The score blends the producer's trust toward the buyer, a risk term, and
/// the buyer's price normalized by the best price on offer. Risk appetite
/// pulls toward non-cooperative buyers: the cooperative is scored by
/// `1 - risk`, everyone else by `risk`. Ties go to the lowest index.
pub fn choose_buyer(
    trust_by_buyer: &[f64],
    risk: f64,
    prices: &[f64],
    is_cooperative: &[bool],
    mix: &TopWeights,
) -> Result<usize, ProxyError> {
    if trust_by_buyer.is_empty()
        || trust_by_buyer.len() != prices.len()
        || trust_by_buyer.len() != is_cooperative.len()
    {
        return Err(ProxyError::NoBuyers);
    }
    let max_price = prices.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max_price > 0.0) {
        return Err(ProxyError::NoBuyers);
    }
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for (idx, ((&trust, &price), &coop)) in trust_by_buyer
        .iter()
        .zip(prices.iter())
        .zip(is_cooperative.iter())
        .enumerate()
    {
        let risk_term = if coop { 1.0 - risk } else { risk };
        let score = mix.trust() * trust + mix.risk() * risk_term + mix.cost() * price / max_price;
        if score > best_score {
            best_score = score;
            best = idx;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    #[test]
    fn init_trust_degenerate_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ProxyParams {
            trust_init_lo: 0.3,
            trust_init_hi: 0.3,
            ..ProxyParams::default()
        };
        assert_eq!(init_trust(&mut rng, &p).unwrap().value(), 0.3);
    }

    #[test]
    fn init_trust_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = ProxyParams {
            trust_init_lo: 0.2,
            trust_init_hi: 0.4,
            ..ProxyParams::default()
        };
        for _ in 0..1000 {
            let t = init_trust(&mut rng, &p).unwrap().value();
            assert!((0.2..=0.4).contains(&t));
        }
    }

    #[test]
    fn init_trust_mean_matches_uniform_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ProxyParams {
            trust_init_lo: 0.0,
            trust_init_hi: 1.0,
            ..ProxyParams::default()
        };
        let n = 10_000;
        let mean = (0..n)
            .map(|_| init_trust(&mut rng, &p).unwrap().value())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "empirical mean {mean}");
    }

    #[test]
    fn update_trust_examples() {
        let mut p = ProxyParams::default();
        p.step_weights = [1.0; 8];
        let t = TrustLevel::new(0.3);
        assert_eq!(update_trust(t, &FactorSignals::default(), &p).value(), 0.3);

        let sig = FactorSignals {
            loan_willingness: 1.0,
            price_comparison: 1.0,
            ..Default::default()
        };
        let t2 = update_trust(t, &sig, &p);
        assert!((t2.value() - 0.32).abs() < TOL);

        let nearly_full = TrustLevel::new(0.999);
        assert_eq!(update_trust(nearly_full, &sig, &p).value(), 1.0);
    }

    #[test]
    fn update_risk_examples() {
        let mut p = ProxyParams::default();
        p.step_weights = [1.0; 8];
        let r = RiskAttitude::new(0.5);
        assert_eq!(update_risk(r, &FactorSignals::default(), &p).value(), 0.5);

        let all_up = FactorSignals {
            trust_feedback: 1.0,
            price_fluctuation: 1.0,
            funds_sufficiency: 1.0,
            default_exposure: 1.0,
            price_gap: 1.0,
            demand_feedback: 1.0,
            ..Default::default()
        };
        assert!((update_risk(r, &all_up, &p).value() - 0.56).abs() < TOL);

        let all_down = FactorSignals {
            trust_feedback: -1.0,
            price_fluctuation: -1.0,
            funds_sufficiency: -1.0,
            default_exposure: -1.0,
            price_gap: -1.0,
            demand_feedback: -1.0,
            ..Default::default()
        };
        assert_eq!(update_risk(RiskAttitude::new(0.02), &all_down, &p).value(), 0.0);
    }

    #[test]
    fn population_mean_examples() {
        assert_eq!(population_mean(&[0.5]).unwrap(), 0.5);
        assert!((population_mean(&[0.2, 0.4]).unwrap() - 0.3).abs() < TOL);
        let same = vec![0.73; 200];
        assert!((population_mean(&same).unwrap() - 0.73).abs() < TOL);
        assert_eq!(population_mean(&[]), Err(ProxyError::EmptyPopulation));
    }

    #[test]
    fn update_funds_spreadsheet_example() {
        // Two hectares: 1386 trees yield 66.99 kg GCB per month; inputs cost
        // 1386 * (25.40 + 11.44) / 12 = 4255.02 Php, financed by a loan.
        let f = FundsState::new(0.0, 1386);
        let after = update_funds(&f, 66.99, 250.0, 4255.02, 0.0, 4255.02).unwrap();
        assert!((after.cash - 16_747.5).abs() < 1e-9, "cash {}", after.cash);
        assert!((after.outstanding_loan - 4255.02).abs() < TOL);
    }

    #[test]
    fn update_funds_identity_and_payoff() {
        let f = FundsState {
            cash: 100.0,
            trees: 693,
            outstanding_loan: 40.0,
        };
        let same = update_funds(&f, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(same, f);

        let paid = update_funds(&f, 0.0, 0.0, 0.0, 40.0, 0.0).unwrap();
        assert_eq!(paid.outstanding_loan, 0.0);
        assert!((paid.cash - 60.0).abs() < TOL);
    }

    #[test]
    fn update_funds_rejects_bad_inputs() {
        let f = FundsState::new(10.0, 693);
        assert!(matches!(
            update_funds(&f, -1.0, 0.0, 0.0, 0.0, 0.0),
            Err(ProxyError::NegativeAmount(_))
        ));
        assert!(matches!(
            update_funds(&f, 0.0, 0.0, 0.0, 5.0, 0.0),
            Err(ProxyError::RepaymentExceedsLoan { .. })
        ));
    }

    #[test]
    fn choose_buyer_price_priority_picks_higher_price() {
        let mix = TopWeights::cost_only();
        // Buyer 0 is the cooperative at a lower price, buyer 1 the market.
        let idx = choose_buyer(&[0.9, 0.1], 0.0, &[150.0, 275.0], &[true, false], &mix).unwrap();
        assert_eq!(idx, 1);
    }

    #[test]
    fn choose_buyer_trust_priority_picks_trusted_cooperative() {
        let mix = TopWeights::new(1.0, 0.0, 0.0).unwrap();
        let idx = choose_buyer(&[0.8, 0.3], 1.0, &[150.0, 275.0], &[true, false], &mix).unwrap();
        assert_eq!(idx, 0);
    }

    #[test]
    fn choose_buyer_breaks_ties_by_lowest_index() {
        let mix = TopWeights::equal_thirds();
        let idx = choose_buyer(&[0.5, 0.5], 0.5, &[200.0, 200.0], &[false, false], &mix).unwrap();
        assert_eq!(idx, 0);
        assert_eq!(
            choose_buyer(&[], 0.5, &[], &[], &mix),
            Err(ProxyError::NoBuyers)
        );
    }

    #[test]
    fn choose_buyer_invariant_under_price_rescaling() {
        let mix = TopWeights::equal_thirds();
        let trust = [0.4, 0.7, 0.2];
        let coop = [true, false, false];
        let prices = [120.0, 260.0, 190.0];
        let scaled: Vec<f64> = prices.iter().map(|p| p * 37.5).collect();
        let a = choose_buyer(&trust, 0.6, &prices, &coop, &mix).unwrap();
        let b = choose_buyer(&trust, 0.6, &scaled, &coop, &mix).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn params_validation_catches_bad_bounds() {
        let mut p = ProxyParams::default();
        p.trust_init_lo = 0.5;
        p.trust_init_hi = 0.2;
        assert!(matches!(p.validate(), Err(ProxyError::InvalidBounds { .. })));

        let mut p = ProxyParams::default();
        p.step_weights[3] = -0.1;
        assert!(p.validate().is_err());

        assert!(ProxyParams::default().validate().is_ok());
    }
}
