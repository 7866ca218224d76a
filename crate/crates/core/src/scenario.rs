//! Scenario catalog, sweep enumeration, and the configuration schema.
//!
//! Five built-in cases cover the progression from a single cooperative buyer
//! to market competition, supply-demand pricing, demand-split variations,
//! and producer weight-priority variations. Sweeps enumerate the demand
//! grid, the weight grid, and the full role-by-weight-by-threshold cross.
//!
//! Configurations serialize as TOML. Unknown keys are rejected so a typo in
//! a config file fails loudly instead of silently running the defaults.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{BuyerKind, PriceMode};
use crate::eval::{CostParams, RiskWeights, Threshold, TopWeights, TrustWeights};
use crate::proxy::ProxyParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Invalid(String),
    #[error("unknown case label '{0}' (expected case1..case5)")]
    UnknownCase(String),
    #[error("demand sweep requires exactly two buyers, got {0}")]
    WrongBuyerCount(usize),
    #[error("failed to parse config: {0}")]
    Parse(#[from] toml::de::Error),
}

/// Which decision machinery drives producer choices and loan grants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionModel {
    /// Full trust/risk/cost evaluation against evidence and thresholds.
    Full,
    /// The simplified producer-side recursions.
    Proxy,
}

/// Agent role whose evaluation parameters a scenario may override.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Producer,
    Cooperative,
    Market,
    LoanProvider,
}

impl Role {
    pub const ALL: [Role; 4] = [
        Role::Producer,
        Role::Cooperative,
        Role::Market,
        Role::LoanProvider,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Role::Producer => "producer",
            Role::Cooperative => "cooperative",
            Role::Market => "market",
            Role::LoanProvider => "loan_provider",
        }
    }
}

/// The full weight and threshold set for the evaluation machinery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationParams {
    pub top: TopWeights,
    pub trust: TrustWeights,
    pub risk: RiskWeights,
    pub cost: CostParams,
    pub threshold: Threshold,
}

impl Default for EvaluationParams {
    /// Equal priorities inside each metric, moderate gain/loss sensitivity,
    /// twice-weighted losses, and a neutral acceptance threshold.
    fn default() -> Self {
        Self {
            top: TopWeights::equal_thirds(),
            trust: TrustWeights::equal_thirds(),
            risk: RiskWeights::equal_thirds(),
            cost: CostParams::default(),
            threshold: Threshold::new(0.5).unwrap(),
        }
    }
}

/// One buyer in the roster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuyerSpec {
    pub label: String,
    pub kind: BuyerKind,
    pub price_mode: PriceMode,
    /// Php per kg of green coffee beans, `[min, max]`.
    pub gcb_price_range: (f64, f64),
    /// Php per kg of fresh cherries; buyers without a band do not take
    /// unprocessed cherries.
    #[serde(default)]
    pub fresh_price_range: Option<(f64, f64)>,
    /// Explicit demand in tons of GCB per year. When absent the demand is
    /// derived from the scenario's demand split and headroom.
    #[serde(default)]
    pub annual_demand_tons: Option<f64>,
}

/// Repayment pacing and delinquency rules.
///
/// Risk-averse producers hold precautionary cash and amortize slowly;
/// risk-seeking producers clear debt quickly. An installment is capped
/// three ways: by a pace fraction of the outstanding balance, by the
/// willingness-scaled cash surplus above the precautionary buffer, and by
/// cash itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepaymentPolicy {
    /// Fraction of the outstanding balance paid per tick at zero risk
    /// appetite.
    pub pace_base: f64,
    /// Additional pace per unit of risk appetite.
    pub pace_slope: f64,
    /// Willingness to part with surplus cash at zero risk appetite; scales
    /// linearly to 1.
    pub base_willingness: f64,
    /// Cash buffer held back before repaying, in multiples of one tick's
    /// outflow, scaled by (1 - risk).
    pub precaution_factor: f64,
    /// Borrowing stops once outstanding debt exceeds this many times the
    /// per-tick input need.
    pub debt_cap_needs: f64,
    /// Ticks without a payment before an open loan counts as defaulted.
    pub delinquency_window: u64,
    /// Ticks after a default during which the proxy-model lender refuses.
    pub lockout_ticks: u64,
}

impl Default for RepaymentPolicy {
    fn default() -> Self {
        Self {
            pace_base: 0.2,
            pace_slope: 0.8,
            base_willingness: 0.35,
            precaution_factor: 0.5,
            debt_cap_needs: 1.5,
            delinquency_window: 12,
            lockout_ticks: 12,
        }
    }
}

/// Everything needed to run one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub case_label: String,
    pub description: String,
    pub decision_model: DecisionModel,
    pub buyers: Vec<BuyerSpec>,
    /// Percentage of total demand assigned to each buyer, same order as
    /// `buyers`; must sum to 100.
    pub demand_split: Vec<f64>,
    /// Total buyer demand as a multiple of the expected production. Above 1
    /// the splits describe a demand pool larger than the harvest, so caps
    /// bind only for small splits.
    pub demand_headroom: f64,
    pub producer_count: u32,
    pub member_fraction: f64,
    /// Hectares per farm, drawn uniformly from this band.
    pub farm_area_range: (f64, f64),
    /// Fraction of the harvest a producer can dry and process per tick.
    pub processing_capacity: f64,
    /// Yield multiplier applied when inputs go unfunded.
    pub yield_penalty: f64,
    /// Php per tree and year of non-farm household spending; the drain that
    /// keeps working capital scarce. Calibration value.
    pub household_expense_per_tree_year: f64,
    /// Residue not taken by any modeled buyer sells at this fraction of the
    /// lowest posted minimum price for the product.
    pub sink_discount: f64,
    /// Producer-side priorities over trust, risk, and cost when choosing a
    /// buyer.
    pub weight_mix: TopWeights,
    /// Producer-side acceptance threshold in the full model.
    pub threshold: Threshold,
    /// Evaluation parameters for the loan provider (and the base for role
    /// overrides).
    pub eval_params: EvaluationParams,
    /// Per-role parameter overrides used by the full sweep.
    pub role_overrides: BTreeMap<Role, EvaluationParams>,
    pub repayment: RepaymentPolicy,
    pub proxy_params: ProxyParams,
    /// Ticks per simulated year: 12 for monthly ticks, 1 for yearly.
    pub ticks_per_year: u32,
    pub horizon: u32,
    pub replications: u32,
    pub base_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            case_label: "default".into(),
            description: String::new(),
            decision_model: DecisionModel::Proxy,
            buyers: two_buyer_roster(PriceMode::SupplyDemand),
            demand_split: vec![70.0, 30.0],
            demand_headroom: 2.4,
            producer_count: 200,
            member_fraction: 0.68,
            farm_area_range: (1.0, 3.0),
            processing_capacity: 0.7,
            yield_penalty: 0.5,
            household_expense_per_tree_year: 66.0,
            sink_discount: 0.8,
            weight_mix: TopWeights::cost_only(),
            threshold: Threshold::lenient(),
            eval_params: EvaluationParams::default(),
            role_overrides: BTreeMap::new(),
            repayment: RepaymentPolicy::default(),
            proxy_params: ProxyParams::default(),
            ticks_per_year: 12,
            horizon: 1000,
            replications: 250,
            base_seed: 42,
        }
    }
}

/// The cooperative buys both products at farmgate prices; the market buys
/// green beans only, at specialty prices.
fn two_buyer_roster(price_mode: PriceMode) -> Vec<BuyerSpec> {
    vec![
        BuyerSpec {
            label: "cooperative".into(),
            kind: BuyerKind::Cooperative,
            price_mode,
            gcb_price_range: (102.61, 211.11),
            fresh_price_range: Some((35.0, 40.0)),
            annual_demand_tons: None,
        },
        BuyerSpec {
            label: "market".into(),
            kind: BuyerKind::Market,
            price_mode,
            gcb_price_range: (250.0, 300.0),
            fresh_price_range: None,
            annual_demand_tons: None,
        },
    ]
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.buyers.is_empty() {
            return fail("at least one buyer is required".into());
        }
        if self.demand_split.len() != self.buyers.len() {
            return fail(format!(
                "demand_split has {} entries for {} buyers",
                self.demand_split.len(),
                self.buyers.len()
            ));
        }
        let split_sum: f64 = self.demand_split.iter().sum();
        if (split_sum - 100.0).abs() > 1e-6 || self.demand_split.iter().any(|s| *s < 0.0) {
            return fail(format!("demand_split must be >= 0 and sum to 100, got {split_sum}"));
        }
        if self.producer_count == 0 {
            return fail("producer_count must be >= 1".into());
        }
        if self.replications == 0 {
            return fail("replications must be >= 1".into());
        }
        if self.ticks_per_year == 0 {
            return fail("ticks_per_year must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.member_fraction) {
            return fail(format!("member_fraction {} outside [0,1]", self.member_fraction));
        }
        let (alo, ahi) = self.farm_area_range;
        if !(1.0..=3.0).contains(&alo) || !(1.0..=3.0).contains(&ahi) || alo > ahi {
            return fail(format!("farm_area_range ({alo}, {ahi}) outside the 1-3 ha band"));
        }
        for (name, v) in [
            ("processing_capacity", self.processing_capacity),
            ("yield_penalty", self.yield_penalty),
            ("sink_discount", self.sink_discount),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} {v} outside [0,1]"));
            }
        }
        if self.demand_headroom <= 0.0 {
            return fail(format!("demand_headroom {} must be > 0", self.demand_headroom));
        }
        if self.household_expense_per_tree_year < 0.0 {
            return fail("household expense must be >= 0".into());
        }
        for buyer in &self.buyers {
            let (lo, hi) = buyer.gcb_price_range;
            if !(lo > 0.0) || lo > hi {
                return fail(format!("buyer '{}' has invalid GCB price band", buyer.label));
            }
            if let Some((flo, fhi)) = buyer.fresh_price_range {
                if !(flo > 0.0) || flo > fhi {
                    return fail(format!("buyer '{}' has invalid fresh price band", buyer.label));
                }
            }
            if let Some(tons) = buyer.annual_demand_tons {
                if tons < 0.0 {
                    return fail(format!("buyer '{}' has negative demand", buyer.label));
                }
            }
        }
        let rp = &self.repayment;
        if !(0.0..=1.0).contains(&rp.base_willingness)
            || !(0.0..=1.0).contains(&rp.pace_base)
            || rp.pace_slope < 0.0
            || rp.precaution_factor < 0.0
            || rp.debt_cap_needs < 0.0
        {
            return fail("repayment policy outside admissible ranges".into());
        }
        self.proxy_params
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    /// Expected total production per tick in GCB-equivalent kg, from which
    /// split-based demand caps are derived.
    pub fn expected_monthly_gcb_potential(&self) -> f64 {
        let mean_area = 0.5 * (self.farm_area_range.0 + self.farm_area_range.1);
        self.producer_count as f64
            * crate::agents::TREES_PER_HECTARE
            * mean_area
            * crate::agents::GCB_KG_PER_TREE_YEAR
            / self.ticks_per_year as f64
    }

    /// Monthly demand cap for buyer `idx` in GCB-equivalent kg.
    pub fn monthly_demand_for(&self, idx: usize) -> f64 {
        let buyer = &self.buyers[idx];
        match buyer.annual_demand_tons {
            Some(tons) => tons * 1000.0 / self.ticks_per_year as f64,
            None => {
                self.demand_headroom
                    * self.demand_split[idx]
                    / 100.0
                    * self.expected_monthly_gcb_potential()
            }
        }
    }

    /// Parse a TOML configuration. Unknown keys are errors.
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = toml::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario config serializes")
    }
}

/// The five built-in cases.
pub fn builtin_cases() -> Vec<ScenarioConfig> {
    let base = ScenarioConfig::default();

    let mut case1 = base.clone();
    case1.case_label = "case1".into();
    case1.description = "single cooperative buyer, every producer a member, random prices".into();
    case1.buyers = vec![BuyerSpec {
        label: "cooperative".into(),
        kind: BuyerKind::Cooperative,
        price_mode: PriceMode::Random,
        gcb_price_range: (102.61, 211.11),
        fresh_price_range: Some((35.0, 40.0)),
        annual_demand_tons: None,
    }];
    case1.demand_split = vec![100.0];
    case1.member_fraction = 1.0;

    let mut case2 = base.clone();
    case2.case_label = "case2".into();
    case2.description = "market competition introduced, both buyers price at random".into();
    case2.buyers = two_buyer_roster(PriceMode::Random);

    let mut case3 = base.clone();
    case3.case_label = "case3".into();
    case3.description =
        "supply-demand pricing, 70/30 cooperative/market demand, price-only priorities".into();

    let mut case4 = case3.clone();
    case4.case_label = "case4".into();
    case4.description = "base for the demand-split grid (see `sweep --kind demand`)".into();

    let mut case5 = case3.clone();
    case5.case_label = "case5".into();
    case5.description = "base for the weight-priority grid (see `sweep --kind weight`)".into();

    vec![case1, case2, case3, case4, case5]
}

/// Look up a built-in case by its label.
pub fn case_by_label(label: &str) -> Result<ScenarioConfig, ConfigError> {
    builtin_cases()
        .into_iter()
        .find(|c| c.case_label == label)
        .ok_or_else(|| ConfigError::UnknownCase(label.to_string()))
}

/// The eight demand splits of the demand grid. The default 70/30 split is
/// omitted because it is already covered by the base case.
pub const DEMAND_SPLITS: [(f64, f64); 8] = [
    (10.0, 90.0),
    (20.0, 80.0),
    (30.0, 70.0),
    (40.0, 60.0),
    (50.0, 50.0),
    (60.0, 40.0),
    (80.0, 20.0),
    (90.0, 10.0),
];

/// Enumerate the eight demand-split scenarios over a two-buyer base.
pub fn demand_sweep(base: &ScenarioConfig) -> Result<Vec<ScenarioConfig>, ConfigError> {
    if base.buyers.len() != 2 {
        return Err(ConfigError::WrongBuyerCount(base.buyers.len()));
    }
    Ok(DEMAND_SPLITS
        .iter()
        .map(|&(coop, market)| {
            let mut cfg = base.clone();
            cfg.case_label = format!("{}_demand_{:02.0}_{:02.0}", base.case_label, coop, market);
            cfg.description = format!(
                "cooperative demands {coop:.0}%, market demands {market:.0}%"
            );
            cfg.demand_split = vec![coop, market];
            cfg
        })
        .collect())
}

/// The seven producer weight mixes over (trust, risk, cost).
pub fn weight_mixes() -> [(&'static str, TopWeights); 7] {
    let t = 1.0 / 3.0;
    [
        ("equal", TopWeights::new(t, t, t).unwrap()),
        ("trust100", TopWeights::new(1.0, 0.0, 0.0).unwrap()),
        ("risk100", TopWeights::new(0.0, 1.0, 0.0).unwrap()),
        ("cost100", TopWeights::new(0.0, 0.0, 1.0).unwrap()),
        ("trust_cost", TopWeights::new(0.5, 0.0, 0.5).unwrap()),
        ("trust_risk", TopWeights::new(0.5, 0.5, 0.0).unwrap()),
        ("risk_cost", TopWeights::new(0.0, 0.5, 0.5).unwrap()),
    ]
}

/// Enumerate the seven weight-priority scenarios.
pub fn weight_sweep(base: &ScenarioConfig) -> Vec<ScenarioConfig> {
    weight_mixes()
        .iter()
        .map(|(name, mix)| {
            let mut cfg = base.clone();
            cfg.case_label = format!("{}_weights_{}", base.case_label, name);
            cfg.description = format!(
                "producer priorities {:.2}/{:.2}/{:.2} over trust/risk/cost",
                mix.trust(),
                mix.risk(),
                mix.cost()
            );
            cfg.weight_mix = *mix;
            cfg
        })
        .collect()
}

/// Threshold attitudes explored on top of each role's default.
pub const THRESHOLD_SCENARIOS: [(&str, Option<f64>); 4] = [
    ("tdefault", None),
    ("strict", Some(1.0)),
    ("neutral", Some(0.5)),
    ("lenient", Some(0.0)),
];

/// The full parameter cross: for every evaluating role, every weight mix and
/// threshold attitude, plus the default configuration once. With four roles,
/// seven mixes, and four threshold settings this enumerates 113 combinations.
pub fn full_sweep(defaults: &ScenarioConfig) -> Vec<ScenarioConfig> {
    let mut out = Vec::with_capacity(1 + Role::ALL.len() * 7 * THRESHOLD_SCENARIOS.len());
    let mut default_cfg = defaults.clone();
    default_cfg.case_label = format!("{}_default", defaults.case_label);
    default_cfg.description = "default parameters and initial conditions".into();
    out.push(default_cfg);

    for role in Role::ALL {
        for (mix_name, mix) in weight_mixes() {
            for (thr_name, thr) in THRESHOLD_SCENARIOS {
                let mut cfg = defaults.clone();
                cfg.case_label = format!(
                    "{}_{}_{}_{}",
                    defaults.case_label,
                    role.name(),
                    mix_name,
                    thr_name
                );
                cfg.description = format!(
                    "{} weights {}, threshold {}",
                    role.name(),
                    mix_name,
                    thr_name
                );
                match role {
                    Role::Producer => {
                        cfg.weight_mix = mix;
                        if let Some(t) = thr {
                            cfg.threshold = Threshold::new(t).unwrap();
                        }
                    }
                    _ => {
                        let mut params = defaults.eval_params.clone();
                        params.top = mix;
                        if let Some(t) = thr {
                            params.threshold = Threshold::new(t).unwrap();
                        }
                        cfg.role_overrides.insert(role, params);
                    }
                }
                out.push(cfg);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::WEIGHT_SUM_TOLERANCE;

    #[test]
    fn five_cases_with_documented_shapes() {
        let cases = builtin_cases();
        assert_eq!(cases.len(), 5);
        for case in &cases {
            case.validate().expect("builtin case validates");
        }
        assert_eq!(cases[0].buyers.len(), 1);
        assert_eq!(cases[0].member_fraction, 1.0);
        // Price-only priorities are the stated default for case 3.
        assert_eq!(cases[2].weight_mix, TopWeights::cost_only());
        assert_eq!(cases[2].buyers[0].price_mode, PriceMode::SupplyDemand);
        assert_eq!(cases[1].buyers[0].price_mode, PriceMode::Random);
    }

    #[test]
    fn case_lookup() {
        assert!(case_by_label("case4").is_ok());
        assert!(matches!(
            case_by_label("case9"),
            Err(ConfigError::UnknownCase(_))
        ));
    }

    #[test]
    fn demand_sweep_grid() {
        let base = case_by_label("case4").unwrap();
        let sweep = demand_sweep(&base).unwrap();
        assert_eq!(sweep.len(), 8);
        let splits: Vec<(f64, f64)> = sweep
            .iter()
            .map(|c| (c.demand_split[0], c.demand_split[1]))
            .collect();
        assert!(splits.contains(&(90.0, 10.0)));
        assert!(!splits.contains(&(70.0, 30.0)));
        for cfg in &sweep {
            assert!((cfg.demand_split.iter().sum::<f64>() - 100.0).abs() < 1e-9);
            cfg.validate().unwrap();
        }

        let single = case_by_label("case1").unwrap();
        assert!(matches!(
            demand_sweep(&single),
            Err(ConfigError::WrongBuyerCount(1))
        ));
    }

    #[test]
    fn weight_sweep_grid() {
        let base = case_by_label("case5").unwrap();
        let sweep = weight_sweep(&base);
        assert_eq!(sweep.len(), 7);
        assert!(sweep
            .iter()
            .any(|c| c.weight_mix == TopWeights::new(1.0, 0.0, 0.0).unwrap()));
        for cfg in &sweep {
            let w = cfg.weight_mix;
            assert!((w.trust() + w.risk() + w.cost() - 1.0).abs() <= WEIGHT_SUM_TOLERANCE);
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn full_sweep_cross() {
        let base = case_by_label("case3").unwrap();
        let sweep = full_sweep(&base);
        // 4 roles x 7 mixes x 4 thresholds, plus the default once.
        assert_eq!(sweep.len(), 113);
        assert_eq!(
            sweep
                .iter()
                .filter(|c| c.case_label.ends_with("_default"))
                .count(),
            1
        );
        // Deterministic enumeration.
        let again = full_sweep(&base);
        let labels: Vec<_> = sweep.iter().map(|c| &c.case_label).collect();
        let labels2: Vec<_> = again.iter().map(|c| &c.case_label).collect();
        assert_eq!(labels, labels2);

        // Every producer-role combo of 7 mixes x 3 explicit thresholds shows up.
        let mut produced = 0;
        for (mix_name, _) in weight_mixes() {
            for thr_name in ["strict", "neutral", "lenient"] {
                let expect = format!("case3_producer_{mix_name}_{thr_name}");
                assert!(labels.contains(&&expect), "missing {expect}");
                produced += 1;
            }
        }
        assert_eq!(produced, 21);
        for cfg in &sweep {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn toml_round_trip_is_semantically_identical() {
        let case = case_by_label("case3").unwrap();
        let text = case.to_toml_string();
        let parsed = ScenarioConfig::from_toml_str(&text).unwrap();
        assert_eq!(parsed, case);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = ScenarioConfig::default().to_toml_string();
        text.push_str("\nnot_a_real_key = 3\n");
        assert!(ScenarioConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn validation_failures() {
        let mut cfg = ScenarioConfig::default();
        cfg.demand_split = vec![70.0, 40.0];
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::default();
        cfg.buyers.clear();
        cfg.demand_split.clear();
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::default();
        cfg.farm_area_range = (0.5, 2.0);
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::default();
        cfg.member_fraction = 1.2;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn split_demand_caps_follow_headroom() {
        let cfg = case_by_label("case3").unwrap();
        let potential = cfg.expected_monthly_gcb_potential();
        // 200 producers x 1386 trees x 0.58 kg / 12 months
        assert!((potential - 13_398.0).abs() < 1e-9);
        assert!((cfg.monthly_demand_for(0) - 2.4 * 0.7 * potential).abs() < 1e-9);
        assert!((cfg.monthly_demand_for(1) - 2.4 * 0.3 * potential).abs() < 1e-9);

        let mut explicit = cfg.clone();
        explicit.buyers[1].annual_demand_tons = Some(10.0);
        assert!((explicit.monthly_demand_for(1) - 10_000.0 / 12.0).abs() < 1e-9);
    }
}
