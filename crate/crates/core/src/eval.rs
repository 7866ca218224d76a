//! Trust, risk, and transaction-cost evaluation.
//!
//! One agent scores another on three metrics — trust (beta-reputation mean
//! plus cooperative membership), risk (beta variance plus payment
//! volatility), and transaction cost (a prospect-theory value of the trade
//! relative to a reference amount) — and combines them into a single
//! evaluation in `[0, 1]` that is compared against an acceptance threshold.
//!
//! Evidence counts start at (1, 1), the trust-inclined prior, and only ever
//! grow; the pairwise counters describe one directed relationship while the
//! global counters describe everything the rest of the system has seen of an
//! agent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that a weight triple sums to 1.
/// Loose enough to admit thirds written as `0.3333333333333333`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("evidence counts must be >= 1, got alpha={alpha}, beta={beta}")]
    InvalidEvidence { alpha: f64, beta: f64 },
    #[error("{context}: weights must lie in [0,1] and sum to 1, got ({a}, {b}, {c})")]
    InvalidWeights {
        context: &'static str,
        a: f64,
        b: f64,
        c: f64,
    },
    #[error("cost parameters invalid: sensitivities must lie in [0,1], loss aversion >= 0")]
    InvalidCostParams,
    #[error("threshold must lie in [0,1], got {0}")]
    InvalidThreshold(f64),
    #[error("payment scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("reference amount must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("agent {0:?} is not registered in the evidence ledger")]
    UnknownAgent(AgentId),
}

/// Identifier shared by every agent that can appear in the evidence ledger.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct AgentId(pub u32);

/// Outcome of a single interaction, as judged by the observing agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    Negative,
}

/// Positive/negative interaction counts backing the beta-reputation metrics.
///
/// Counts are real-valued so that future decay schemes remain possible, but
/// every built-in update adds exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    alpha: f64,
    beta: f64,
}

impl Evidence {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, EvalError> {
        if !(alpha >= 1.0) || !(beta >= 1.0) {
            return Err(EvalError::InvalidEvidence { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// The trust-inclined starting point: one positive, one negative.
    pub fn prior() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Positive => self.alpha += 1.0,
            Outcome::Negative => self.beta += 1.0,
        }
    }
}

impl Default for Evidence {
    fn default() -> Self {
        Self::prior()
    }
}

fn check_weights(
    context: &'static str,
    a: f64,
    b: f64,
    c: f64,
) -> Result<(), EvalError> {
    let unit = |w: f64| (0.0..=1.0).contains(&w);
    if unit(a) && unit(b) && unit(c) && ((a + b + c) - 1.0).abs() <= WEIGHT_SUM_TOLERANCE {
        Ok(())
    } else {
        Err(EvalError::InvalidWeights { context, a, b, c })
    }
}

/// Top-level weights on the trust, risk, and cost metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTopWeights", into = "RawTopWeights")]
pub struct TopWeights {
    trust: f64,
    risk: f64,
    cost: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopWeights {
    trust: f64,
    risk: f64,
    cost: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrustWeights {
    membership: f64,
    interaction: f64,
    reputation: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRiskWeights {
    interaction: f64,
    reputation: f64,
    payment: f64,
}

impl TopWeights {
    pub fn new(trust: f64, risk: f64, cost: f64) -> Result<Self, EvalError> {
        check_weights("top weights", trust, risk, cost)?;
        Ok(Self { trust, risk, cost })
    }

    pub fn equal_thirds() -> Self {
        let t = 1.0 / 3.0;
        Self {
            trust: t,
            risk: t,
            cost: t,
        }
    }

    /// Pure-price priority, the default producer attitude.
    pub fn cost_only() -> Self {
        Self {
            trust: 0.0,
            risk: 0.0,
            cost: 1.0,
        }
    }

    pub fn trust(&self) -> f64 {
        self.trust
    }

    pub fn risk(&self) -> f64 {
        self.risk
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }
}

impl TryFrom<RawTopWeights> for TopWeights {
    type Error = EvalError;
    fn try_from(r: RawTopWeights) -> Result<Self, Self::Error> {
        Self::new(r.trust, r.risk, r.cost)
    }
}

impl From<TopWeights> for RawTopWeights {
    fn from(w: TopWeights) -> Self {
        RawTopWeights {
            trust: w.trust,
            risk: w.risk,
            cost: w.cost,
        }
    }
}

/// Weights inside the trust metric: membership, interaction trust,
/// reputation trust.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrustWeights", into = "RawTrustWeights")]
pub struct TrustWeights {
    membership: f64,
    interaction: f64,
    reputation: f64,
}

impl TrustWeights {
    pub fn new(membership: f64, interaction: f64, reputation: f64) -> Result<Self, EvalError> {
        check_weights("trust weights", membership, interaction, reputation)?;
        Ok(Self {
            membership,
            interaction,
            reputation,
        })
    }

    pub fn equal_thirds() -> Self {
        let t = 1.0 / 3.0;
        Self {
            membership: t,
            interaction: t,
            reputation: t,
        }
    }
}

impl TryFrom<RawTrustWeights> for TrustWeights {
    type Error = EvalError;
    fn try_from(r: RawTrustWeights) -> Result<Self, Self::Error> {
        Self::new(r.membership, r.interaction, r.reputation)
    }
}

impl From<TrustWeights> for RawTrustWeights {
    fn from(w: TrustWeights) -> Self {
        RawTrustWeights {
            membership: w.membership,
            interaction: w.interaction,
            reputation: w.reputation,
        }
    }
}

/// Weights inside the risk metric: interaction risk, reputation risk,
/// payment volatility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRiskWeights", into = "RawRiskWeights")]
pub struct RiskWeights {
    interaction: f64,
    reputation: f64,
    payment: f64,
}

impl RiskWeights {
    pub fn new(interaction: f64, reputation: f64, payment: f64) -> Result<Self, EvalError> {
        check_weights("risk weights", interaction, reputation, payment)?;
        Ok(Self {
            interaction,
            reputation,
            payment,
        })
    }

    pub fn equal_thirds() -> Self {
        let t = 1.0 / 3.0;
        Self {
            interaction: t,
            reputation: t,
            payment: t,
        }
    }
}

impl TryFrom<RawRiskWeights> for RiskWeights {
    type Error = EvalError;
    fn try_from(r: RawRiskWeights) -> Result<Self, Self::Error> {
        Self::new(r.interaction, r.reputation, r.payment)
    }
}

impl From<RiskWeights> for RawRiskWeights {
    fn from(w: RiskWeights) -> Self {
        RawRiskWeights {
            interaction: w.interaction,
            reputation: w.reputation,
            payment: w.payment,
        }
    }
}

/// Prospect-theory cost parameters: diminishing-sensitivity exponents for
/// gains and losses plus the loss-aversion multiplier. The exponents do not
/// need to sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParams {
    pub gain_sensitivity: f64,
    pub loss_sensitivity: f64,
    pub loss_aversion: f64,
}

impl CostParams {
    pub fn new(
        gain_sensitivity: f64,
        loss_sensitivity: f64,
        loss_aversion: f64,
    ) -> Result<Self, EvalError> {
        let unit = |w: f64| (0.0..=1.0).contains(&w);
        if unit(gain_sensitivity) && unit(loss_sensitivity) && loss_aversion >= 0.0 {
            Ok(Self {
                gain_sensitivity,
                loss_sensitivity,
                loss_aversion,
            })
        } else {
            Err(EvalError::InvalidCostParams)
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        Self::new(self.gain_sensitivity, self.loss_sensitivity, self.loss_aversion).map(|_| ())
    }
}

impl Default for CostParams {
    /// Moderate sensitivity to both sides; losses weigh twice as much as
    /// gains of the same size.
    fn default() -> Self {
        Self {
            gain_sensitivity: 0.5,
            loss_sensitivity: 0.5,
            loss_aversion: 2.0,
        }
    }
}

/// Ordered list of monetary returns observed from a counterparty (Php).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PaymentHistory {
    returns: Vec<f64>,
}

impl PaymentHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_returns(returns: Vec<f64>) -> Self {
        Self { returns }
    }

    pub fn push(&mut self, amount: f64) {
        self.returns.push(amount);
    }

    pub fn count(&self) -> usize {
        self.returns.len()
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }
}

/// Minimum combined evaluation required for a transaction to go ahead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(t: f64) -> Result<Self, EvalError> {
        if (0.0..=1.0).contains(&t) {
            Ok(Self(t))
        } else {
            Err(EvalError::InvalidThreshold(t))
        }
    }

    pub fn lenient() -> Self {
        Self(0.0)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Threshold {
    type Error = EvalError;
    fn try_from(t: f64) -> Result<Self, Self::Error> {
        Self::new(t)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

/// Beta-reputation mean of the pairwise evidence: alpha / (alpha + beta).
pub fn interaction_trust(e: &Evidence) -> f64 {
    e.alpha / (e.alpha + e.beta)
}

/// Same form as [`interaction_trust`], applied to an agent's global evidence.
pub fn reputation_trust(e: &Evidence) -> f64 {
    e.alpha / (e.alpha + e.beta)
}

/// Weighted trust metric: membership indicator, interaction trust, and
/// reputation trust.
pub fn trust_metric(
    is_coop_member: bool,
    interaction: f64,
    reputation: f64,
    w: &TrustWeights,
) -> f64 {
    let membership = if is_coop_member { 1.0 } else { 0.0 };
    w.membership * membership + w.interaction * interaction + w.reputation * reputation
}

/// Variance of the beta distribution with the pairwise evidence as
/// parameters. Always in `(0, 0.25]` for valid evidence.
pub fn interaction_risk(e: &Evidence) -> f64 {
    let s = e.alpha + e.beta;
    (e.alpha * e.beta) / (s * s * (s + 1.0))
}

/// Same closed form as [`interaction_risk`] on global evidence.
pub fn reputation_risk(e: &Evidence) -> f64 {
    interaction_risk(e)
}

/// Sample standard deviation (N-1 denominator) of the observed returns.
///
/// With fewer than two observations there is no reference point for
/// comparison, so the volatility starts at 1.
pub fn payment_volatility(h: &PaymentHistory) -> f64 {
    let n = h.returns.len();
    if n <= 1 {
        return 1.0;
    }
    let mean = h.returns.iter().sum::<f64>() / n as f64;
    let ss = h
        .returns
        .iter()
        .map(|r| {
            let d = r - mean;
            d * d
        })
        .sum::<f64>();
    (ss / (n as f64 - 1.0)).sqrt()
}

/// Weighted risk metric. The raw monetary volatility is normalized into
/// `[0, 1]` by `payment_scale` (the reference transaction amount of the
/// relationship) and capped at 1 so the combined metric stays bounded.
pub fn risk_metric(
    interaction: f64,
    reputation: f64,
    payment_vol: f64,
    w: &RiskWeights,
    payment_scale: f64,
) -> Result<f64, EvalError> {
    if payment_scale <= 0.0 {
        return Err(EvalError::NonPositiveScale(payment_scale));
    }
    let payment = (payment_vol / payment_scale).min(1.0);
    Ok(w.interaction * interaction + w.reputation * reputation + w.payment * payment)
}

/// Prospect-theory value of ending up with `amount` against `reference`.
///
/// Let `x = amount / reference - 1`. Ending exactly at the reference is
/// worth 0 and doubling it (or better) is worth 1. Losses use the
/// magnitude form `1 - theta * (-x)^loss_sensitivity`, clamped into `[0, 1]`.
pub fn cost_evaluation(amount: f64, reference: f64, c: &CostParams) -> Result<f64, EvalError> {
    if reference <= 0.0 {
        return Err(EvalError::NonPositiveReference(reference));
    }
    let x = amount / reference - 1.0;
    let value = if x >= 0.0 {
        x.powf(c.gain_sensitivity)
    } else {
        1.0 - c.loss_aversion * (-x).powf(c.loss_sensitivity)
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Combined evaluation: trust and cost count for, risk counts against.
pub fn combined_evaluation(trust: f64, risk: f64, cost: f64, w: &TopWeights) -> f64 {
    w.trust * trust + w.risk * (1.0 - risk) + w.cost * cost
}

/// A transaction goes ahead when the evaluation meets the threshold.
pub fn accepts(evaluation: f64, threshold: Threshold) -> bool {
    evaluation >= threshold.value()
}

/// Pairwise and global interaction counts for every registered agent.
///
/// `record` moves exactly two counters: the observer's pairwise count for the
/// subject and the subject's global count.
///
/// Agent ids double as storage indices: the ledger keeps a dense
/// `capacity x capacity` matrix of pairwise counts, sized to the largest
/// registered id. Simulation worlds hand out contiguous ids from 0, which
/// keeps every query a plain array read on the per-tick hot path.
#[derive(Debug, Clone, Default)]
pub struct EvidenceLedger {
    capacity: usize,
    registered: Vec<bool>,
    /// Row-major: `pairwise[observer * capacity + subject]`.
    pairwise: Vec<Evidence>,
    global: Vec<Evidence>,
}

impl EvidenceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    fn grow_to(&mut self, min_capacity: usize) {
        let new_cap = min_capacity.next_power_of_two().max(8);
        let mut pairwise = vec![Evidence::prior(); new_cap * new_cap];
        for obs in 0..self.capacity {
            let old_row = obs * self.capacity;
            let new_row = obs * new_cap;
            pairwise[new_row..new_row + self.capacity]
                .copy_from_slice(&self.pairwise[old_row..old_row + self.capacity]);
        }
        self.pairwise = pairwise;
        self.registered.resize(new_cap, false);
        self.global.resize(new_cap, Evidence::prior());
        self.capacity = new_cap;
    }

    pub fn register(&mut self, agent: AgentId) {
        let idx = agent.0 as usize;
        if idx >= self.capacity {
            self.grow_to(idx + 1);
        }
        self.registered[idx] = true;
    }

    pub fn is_registered(&self, agent: AgentId) -> bool {
        let idx = agent.0 as usize;
        idx < self.capacity && self.registered[idx]
    }

    pub fn record(
        &mut self,
        observer: AgentId,
        subject: AgentId,
        outcome: Outcome,
    ) -> Result<(), EvalError> {
        if !self.is_registered(observer) {
            return Err(EvalError::UnknownAgent(observer));
        }
        if !self.is_registered(subject) {
            return Err(EvalError::UnknownAgent(subject));
        }
        let (obs, sub) = (observer.0 as usize, subject.0 as usize);
        self.global[sub].record(outcome);
        self.pairwise[obs * self.capacity + sub].record(outcome);
        Ok(())
    }

    /// Evidence the observer holds about the subject; the (1, 1) prior if
    /// the two have never interacted.
    pub fn pairwise(&self, observer: AgentId, subject: AgentId) -> Evidence {
        let (obs, sub) = (observer.0 as usize, subject.0 as usize);
        if obs < self.capacity && sub < self.capacity {
            self.pairwise[obs * self.capacity + sub]
        } else {
            Evidence::prior()
        }
    }

    /// Everything the whole system has seen of the subject.
    pub fn global(&self, subject: AgentId) -> Evidence {
        let sub = subject.0 as usize;
        if sub < self.capacity {
            self.global[sub]
        } else {
            Evidence::prior()
        }
    }

    /// Counts recorded beyond the (1, 1) priors. Every `record` call adds
    /// exactly 2: one pairwise, one global.
    pub fn recorded_interactions(&self) -> f64 {
        let pair: f64 = self.pairwise.iter().map(|e| e.alpha + e.beta - 2.0).sum();
        let global: f64 = self.global.iter().map(|e| e.alpha + e.beta - 2.0).sum();
        pair + global
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn ev(a: f64, b: f64) -> Evidence {
        Evidence::new(a, b).unwrap()
    }

    #[test]
    fn evidence_rejects_counts_below_one() {
        assert!(Evidence::new(0.5, 1.0).is_err());
        assert!(Evidence::new(1.0, 0.0).is_err());
        assert!(Evidence::new(f64::NAN, 1.0).is_err());
        assert!(Evidence::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn interaction_trust_examples() {
        assert!((interaction_trust(&ev(1.0, 1.0)) - 0.5).abs() < TOL);
        assert!((interaction_trust(&ev(3.0, 1.0)) - 0.75).abs() < TOL);
        assert!((interaction_trust(&ev(1.0, 4.0)) - 0.2).abs() < TOL);
    }

    #[test]
    fn reputation_trust_examples() {
        assert!((reputation_trust(&ev(1.0, 1.0)) - 0.5).abs() < TOL);
        assert!((reputation_trust(&ev(9.0, 1.0)) - 0.9).abs() < TOL);
        assert!((reputation_trust(&ev(2.0, 8.0)) - 0.2).abs() < TOL);
    }

    #[test]
    fn trust_metric_examples() {
        let w = TrustWeights::equal_thirds();
        assert!((trust_metric(true, 0.5, 0.5, &w) - 2.0 / 3.0).abs() < TOL);
        assert!((trust_metric(false, 0.5, 0.5, &w) - 1.0 / 3.0).abs() < TOL);
        let w = TrustWeights::new(0.0, 1.0, 0.0).unwrap();
        assert!((trust_metric(false, 0.9, 0.123, &w) - 0.9).abs() < TOL);
    }

    #[test]
    fn interaction_risk_examples() {
        // Beta(1,1) has variance 1/12.
        assert!((interaction_risk(&ev(1.0, 1.0)) - 1.0 / 12.0).abs() < TOL);
        assert!((interaction_risk(&ev(3.0, 1.0)) - 0.0375).abs() < TOL);
        // Frozen from the closed form evaluated independently:
        // 100*100 / (200^2 * 201) = 0.0012437810945273632
        assert!((interaction_risk(&ev(100.0, 100.0)) - 0.0012437810945273632).abs() < TOL);
    }

    #[test]
    fn risk_shrinks_as_evidence_accumulates() {
        let mut prev = interaction_risk(&ev(3.0, 1.0));
        let mut a = 3.0;
        let mut b = 1.0;
        for _ in 0..20 {
            a *= 2.0;
            b *= 2.0;
            let next = interaction_risk(&ev(a, b));
            assert!(next < prev, "risk must fall on doubled evidence");
            prev = next;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn payment_volatility_examples() {
        assert!((payment_volatility(&PaymentHistory::new()) - 1.0).abs() < TOL);
        let one = PaymentHistory::from_returns(vec![120.0]);
        assert!((payment_volatility(&one) - 1.0).abs() < TOL);
        let flat = PaymentHistory::from_returns(vec![10.0, 10.0, 10.0]);
        assert!(payment_volatility(&flat).abs() < TOL);
        // Sample variance of [1,2,3] is ((-1)^2 + 0 + 1^2) / 2 = 1.
        let ramp = PaymentHistory::from_returns(vec![1.0, 2.0, 3.0]);
        assert!((payment_volatility(&ramp) - 1.0).abs() < TOL);
    }

    #[test]
    fn risk_metric_examples() {
        let w = RiskWeights::equal_thirds();
        assert!(risk_metric(0.0, 0.0, 0.0, &w, 100.0).unwrap().abs() < TOL);
        let v = risk_metric(1.0 / 12.0, 1.0 / 12.0, 250.0, &w, 250.0).unwrap();
        assert!((v - (1.0 / 12.0 + 1.0 / 12.0 + 1.0) / 3.0).abs() < TOL);
        let w = RiskWeights::new(0.0, 0.0, 1.0).unwrap();
        let v = risk_metric(0.2, 0.2, 50.0, &w, 100.0).unwrap();
        assert!((v - 0.5).abs() < TOL);
        assert_eq!(
            risk_metric(0.0, 0.0, 0.0, &w, 0.0),
            Err(EvalError::NonPositiveScale(0.0))
        );
    }

    #[test]
    fn cost_evaluation_anchors() {
        let c = CostParams::default();
        // Doubling the reference is worth exactly 1, the reference itself 0.
        assert_eq!(cost_evaluation(200.0, 100.0, &c).unwrap(), 1.0);
        assert_eq!(cost_evaluation(100.0, 100.0, &c).unwrap(), 0.0);
        assert_eq!(cost_evaluation(350.0, 100.0, &c).unwrap(), 1.0);
        // Loss branch: 1 - 2 * 0.25^0.5 = 0 exactly.
        assert_eq!(cost_evaluation(75.0, 100.0, &c).unwrap(), 0.0);
        // Frozen from the adopted form: 1 - 2 * 0.1^0.5 = 0.3675444679663241
        let v = cost_evaluation(90.0, 100.0, &c).unwrap();
        assert!((v - 0.3675444679663241).abs() < TOL);
        assert!(cost_evaluation(50.0, 0.0, &c).is_err());
        assert!(cost_evaluation(50.0, -1.0, &c).is_err());
    }

    #[test]
    fn cost_evaluation_stays_in_unit_interval() {
        let c = CostParams::default();
        for i in 0..2000 {
            let amount = i as f64 * 3.7;
            let v = cost_evaluation(amount, 500.0, &c).unwrap();
            assert!((0.0..=1.0).contains(&v), "amount={amount} gave {v}");
        }
    }

    #[test]
    fn combined_evaluation_examples() {
        let w = TopWeights::equal_thirds();
        assert!((combined_evaluation(0.6, 0.2, 0.4, &w) - 0.6).abs() < TOL);
        assert!((combined_evaluation(1.0, 0.0, 1.0, &w) - 1.0).abs() < TOL);
        let w = TopWeights::new(1.0, 0.0, 0.0).unwrap();
        assert!((combined_evaluation(0.9, 0.7, 0.1, &w) - 0.9).abs() < TOL);
    }

    #[test]
    fn accepts_uses_greater_or_equal() {
        assert!(accepts(0.5, Threshold::new(0.5).unwrap()));
        assert!(!accepts(0.99, Threshold::new(1.0).unwrap()));
        assert!(accepts(0.0, Threshold::new(0.0).unwrap()));
        assert!(accepts(1.0, Threshold::new(1.0).unwrap()));
    }

    #[test]
    fn weight_validation() {
        assert!(TopWeights::new(0.5, 0.5, 0.0).is_ok());
        assert!(TopWeights::new(0.5, 0.6, -0.1).is_err());
        assert!(TopWeights::new(0.4, 0.4, 0.4).is_err());
        let t = 1.0 / 3.0;
        assert!(TopWeights::new(t, t, t).is_ok());
        assert!(Threshold::new(1.1).is_err());
        assert!(CostParams::new(0.5, 1.5, 2.0).is_err());
        assert!(CostParams::new(0.5, 0.5, -0.1).is_err());
    }

    #[test]
    fn ledger_moves_exactly_two_counters() {
        let mut ledger = EvidenceLedger::new();
        let lender = AgentId(10);
        let farmer = AgentId(3);
        ledger.register(lender);
        ledger.register(farmer);

        let before = ledger.recorded_interactions();
        assert_eq!(before, 0.0);
        // Farmer repays a loan: the lender's pairwise view of the farmer and
        // the farmer's global record both gain a positive count.
        ledger.record(lender, farmer, Outcome::Positive).unwrap();
        assert_eq!(ledger.recorded_interactions(), before + 2.0);
        assert_eq!(ledger.pairwise(lender, farmer).alpha(), 2.0);
        assert_eq!(ledger.global(farmer).alpha(), 2.0);
        // The observer's own global record is untouched.
        assert_eq!(ledger.global(lender).alpha(), 1.0);

        // A cooperative notes a member contributing nothing this tick.
        ledger.record(lender, farmer, Outcome::Negative).unwrap();
        assert_eq!(ledger.pairwise(lender, farmer).beta(), 2.0);
        assert_eq!(ledger.global(farmer).beta(), 2.0);
    }

    #[test]
    fn ledger_rejects_unknown_agents() {
        let mut ledger = EvidenceLedger::new();
        ledger.register(AgentId(1));
        assert_eq!(
            ledger.record(AgentId(1), AgentId(2), Outcome::Positive),
            Err(EvalError::UnknownAgent(AgentId(2)))
        );
        assert_eq!(
            ledger.record(AgentId(9), AgentId(1), Outcome::Positive),
            Err(EvalError::UnknownAgent(AgentId(9)))
        );
    }
}
