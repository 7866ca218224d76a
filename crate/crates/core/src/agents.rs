//! Agent state and per-role behavior rules.
//!
//! Producers farm a fixed tree stock, fund inputs with cash or credit,
//! process part of the harvest into green coffee beans, and sell. Buyers
//! (a cooperative and markets) post prices inside fixed bands and absorb
//! deliveries up to a monthly demand cap. The loan provider keeps a book of
//! zero-interest open-maturity loans. A passive nursery absorbs input
//! spending and an implicit low-price sink absorbs whatever no modeled buyer
//! takes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::AgentId;
use crate::proxy::{FundsState, RiskAttitude, TrustLevel};
use crate::eval::PaymentHistory;

/// Trees planted per hectare.
pub const TREES_PER_HECTARE: f64 = 693.0;
/// Fresh cherry yield per tree and year (kg).
pub const FRESH_KG_PER_TREE_YEAR: f64 = 3.24;
/// Green coffee bean yield per tree and year (kg).
pub const GCB_KG_PER_TREE_YEAR: f64 = 0.58;
/// Conversion from fresh cherries to green coffee beans (kg GCB per kg fresh).
pub const GCB_PER_FRESH_KG: f64 = GCB_KG_PER_TREE_YEAR / FRESH_KG_PER_TREE_YEAR;
/// Production cost per tree and year (Php).
pub const PROD_COST_PER_TREE_YEAR: f64 = 25.40;
/// Post-harvest cost per tree and year (Php).
pub const POST_HARVEST_COST_PER_TREE_YEAR: f64 = 11.44;

#[derive(Debug, Error, PartialEq)]
pub enum AgentError {
    #[error("farm area {0} outside the 1-3 hectare band")]
    InvalidFarmArea(f64),
    #[error("processing fraction {0} outside [0,1]")]
    InvalidFraction(f64),
    #[error("offered quantity must be >= 0, got {0}")]
    NegativeOffer(f64),
    #[error("loan principal must be positive, got {0}")]
    NonPositivePrincipal(f64),
    #[error("repayment {0} exceeds remaining balance {1}")]
    Overpayment(f64, f64),
}

/// What a buyer pays for and accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Product {
    Gcb,
    FreshCherries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuyerKind {
    Cooperative,
    Market,
}

/// How a buyer moves its price between ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceMode {
    /// Fresh uniform draw inside the band every tick.
    Random,
    /// Price creeps up while demand goes unmet and decays when it is fully
    /// met, clamped to the band.
    SupplyDemand,
}

/// Per-tick price rise when none of the demand was met.
pub const PRICE_RISE_RATE: f64 = 0.05;
/// Per-tick price decay once demand is fully met.
pub const PRICE_DECAY_RATE: f64 = 0.01;

/// Smallholder producer: identity, farm, psychology, and books.
#[derive(Debug, Clone)]
pub struct ProducerAgent {
    pub id: AgentId,
    pub farm_area: f64,
    pub is_member: bool,
    pub funds: FundsState,
    /// Trust level toward each buyer, indexed like the world's buyer roster.
    pub trust_by_buyer: Vec<TrustLevel>,
    pub risk: RiskAttitude,
    /// Payments received from each buyer, same indexing.
    pub payment_history: Vec<PaymentHistory>,
    /// Fraction of the harvest the producer can dry and process per tick.
    pub processing_capacity: f64,
}

impl ProducerAgent {
    /// Tree stock, fixed at construction as `round(693 * farm_area)`.
    pub fn trees(&self) -> u32 {
        self.funds.trees
    }
}

pub fn trees_for_area(farm_area: f64) -> u32 {
    (TREES_PER_HECTARE * farm_area).round() as u32
}

/// Monthly input spend required to keep the farm fully productive.
pub fn compute_input_need(trees: u32, ticks_per_year: u32) -> f64 {
    trees as f64 * (PROD_COST_PER_TREE_YEAR + POST_HARVEST_COST_PER_TREE_YEAR)
        / ticks_per_year as f64
}

/// Harvest for one tick, in kg of fresh cherries. Unfunded farms yield a
/// penalized fraction of the full harvest.
pub fn produce(trees: u32, inputs_funded: bool, yield_penalty: f64, ticks_per_year: u32) -> f64 {
    let full = trees as f64 * FRESH_KG_PER_TREE_YEAR / ticks_per_year as f64;
    if inputs_funded {
        full
    } else {
        full * yield_penalty
    }
}

/// Split a harvest into processed green beans and remaining fresh cherries.
/// Returns `(gcb_kg, remaining_fresh_kg)`.
pub fn process_to_gcb(fresh_kg: f64, fraction: f64) -> Result<(f64, f64), AgentError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(AgentError::InvalidFraction(fraction));
    }
    let gcb = fresh_kg * fraction * GCB_PER_FRESH_KG;
    let remaining = fresh_kg * (1.0 - fraction);
    Ok((gcb, remaining))
}

/// A buyer: cooperative or market, with a price band per product and a
/// monthly demand cap measured in GCB-equivalent kilograms.
#[derive(Debug, Clone)]
pub struct BuyerAgent {
    pub id: AgentId,
    pub kind: BuyerKind,
    pub label: String,
    pub price_mode: PriceMode,
    pub gcb_price_range: (f64, f64),
    pub gcb_price: f64,
    /// Some buyers do not take unprocessed cherries at all.
    pub fresh_price_range: Option<(f64, f64)>,
    pub fresh_price: f64,
    /// Demand cap per tick, GCB-equivalent kg.
    pub monthly_demand: f64,
    pub received_this_tick: f64,
    pub funds: f64,
}

impl BuyerAgent {
    pub fn is_cooperative(&self) -> bool {
        self.kind == BuyerKind::Cooperative
    }

    pub fn accepts(&self, product: Product) -> bool {
        match product {
            Product::Gcb => true,
            Product::FreshCherries => self.fresh_price_range.is_some(),
        }
    }

    pub fn price(&self, product: Product) -> f64 {
        match product {
            Product::Gcb => self.gcb_price,
            Product::FreshCherries => self.fresh_price,
        }
    }

    pub fn remaining_demand(&self) -> f64 {
        (self.monthly_demand - self.received_this_tick).max(0.0)
    }

    /// Fraction of this tick's demand that was actually delivered.
    pub fn demand_met_fraction(&self) -> f64 {
        if self.monthly_demand <= 0.0 {
            return 1.0;
        }
        (self.received_this_tick / self.monthly_demand).min(1.0)
    }

    /// Take delivery up to the remaining cap. Returns the accepted
    /// GCB-equivalent quantity; the caller settles payment and evidence.
    pub fn accept_delivery(&mut self, offered_gcb_eq: f64) -> Result<f64, AgentError> {
        if offered_gcb_eq < 0.0 {
            return Err(AgentError::NegativeOffer(offered_gcb_eq));
        }
        let accepted = offered_gcb_eq.min(self.remaining_demand());
        self.received_this_tick += accepted;
        Ok(accepted)
    }

    /// Advance the posted prices one tick.
    pub fn update_price<R: rand::Rng>(&mut self, mode_rng: &mut R) {
        match self.price_mode {
            PriceMode::Random => {
                self.gcb_price = uniform_in(mode_rng, self.gcb_price_range);
                if let Some(range) = self.fresh_price_range {
                    self.fresh_price = uniform_in(mode_rng, range);
                }
            }
            PriceMode::SupplyDemand => {
                let met = self.demand_met_fraction();
                let factor = price_adjustment_factor(met);
                let (lo, hi) = self.gcb_price_range;
                self.gcb_price = (self.gcb_price * factor).clamp(lo, hi);
                if let Some((flo, fhi)) = self.fresh_price_range {
                    self.fresh_price = (self.fresh_price * factor).clamp(flo, fhi);
                }
            }
        }
    }
}

/// Multiplicative price step for a given demand-met fraction.
pub fn price_adjustment_factor(demand_met_fraction: f64) -> f64 {
    let met = demand_met_fraction.clamp(0.0, 1.0);
    let fully_met = if met >= 1.0 { 1.0 } else { 0.0 };
    1.0 + PRICE_RISE_RATE * (1.0 - met) - PRICE_DECAY_RATE * fully_met
}

fn uniform_in<R: rand::Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo >= hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// One zero-interest loan. Repaid never exceeds the principal.
#[derive(Debug, Clone, PartialEq)]
pub struct LoanRecord {
    pub producer: AgentId,
    pub principal: f64,
    pub issued_tick: u64,
    pub repaid: f64,
    pub last_payment_tick: u64,
    /// Set once the record has gone the delinquency window without a payment.
    pub defaulted: bool,
}

impl LoanRecord {
    pub fn new(producer: AgentId, principal: f64, issued_tick: u64) -> Result<Self, AgentError> {
        if principal <= 0.0 {
            return Err(AgentError::NonPositivePrincipal(principal));
        }
        Ok(Self {
            producer,
            principal,
            issued_tick,
            repaid: 0.0,
            last_payment_tick: issued_tick,
            defaulted: false,
        })
    }

    pub fn balance(&self) -> f64 {
        self.principal - self.repaid
    }

    pub fn is_open(&self) -> bool {
        self.balance() > 1e-9
    }

    pub fn pay(&mut self, amount: f64, tick: u64) -> Result<(), AgentError> {
        if amount > self.balance() + 1e-9 {
            return Err(AgentError::Overpayment(amount, self.balance()));
        }
        self.repaid = (self.repaid + amount).min(self.principal);
        self.last_payment_tick = tick;
        Ok(())
    }
}

/// The loan provider's book plus its delinquency rules.
///
/// Closed records stay archived in `records`; per-producer indices of open
/// records (addressed by the producer's dense agent id) keep every per-tick
/// query O(that producer's open loans) instead of O(everything ever issued).
#[derive(Debug, Clone, Default)]
pub struct LoanBook {
    pub records: Vec<LoanRecord>,
    open_by_producer: Vec<Vec<usize>>,
    open_total: usize,
}

impl LoanBook {
    pub fn new() -> Self {
        Self::default()
    }

    fn open_slot(&mut self, producer: AgentId) -> &mut Vec<usize> {
        let idx = producer.0 as usize;
        if idx >= self.open_by_producer.len() {
            self.open_by_producer.resize_with(idx + 1, Vec::new);
        }
        &mut self.open_by_producer[idx]
    }

    pub fn open_count(&self) -> usize {
        self.open_total
    }

    pub fn outstanding_of(&self, producer: AgentId) -> f64 {
        match self.open_by_producer.get(producer.0 as usize) {
            Some(open) => open.iter().map(|&i| self.records[i].balance()).sum(),
            None => 0.0,
        }
    }

    pub fn issue(
        &mut self,
        producer: AgentId,
        principal: f64,
        tick: u64,
    ) -> Result<(), AgentError> {
        let record = LoanRecord::new(producer, principal, tick)?;
        let idx = self.records.len();
        self.records.push(record);
        self.open_slot(producer).push(idx);
        self.open_total += 1;
        Ok(())
    }

    /// Apply a repayment oldest-record-first. Returns the number of records
    /// fully closed by this payment.
    pub fn repay(
        &mut self,
        producer: AgentId,
        mut amount: f64,
        tick: u64,
    ) -> Result<usize, AgentError> {
        let Some(open) = self.open_by_producer.get_mut(producer.0 as usize) else {
            return Ok(0);
        };
        let mut closed = 0;
        for &idx in open.iter() {
            if amount <= 0.0 {
                break;
            }
            let record = &mut self.records[idx];
            let installment = amount.min(record.balance());
            record.pay(installment, tick)?;
            amount -= installment;
            if !record.is_open() {
                closed += 1;
            }
        }
        if closed > 0 {
            let records = &self.records;
            open.retain(|&i| records[i].is_open());
            self.open_total -= closed;
        }
        Ok(closed)
    }

    /// Mark open records that crossed the delinquency window without a
    /// payment. Returns the producers that defaulted this tick.
    pub fn mark_defaults(&mut self, tick: u64, window: u64) -> Vec<AgentId> {
        let mut defaulters = Vec::new();
        for open in &self.open_by_producer {
            for &idx in open {
                let record = &mut self.records[idx];
                if !record.defaulted && tick.saturating_sub(record.last_payment_tick) > window {
                    record.defaulted = true;
                    defaulters.push(record.producer);
                }
            }
        }
        defaulters
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    #[test]
    fn input_need_examples() {
        assert!((compute_input_need(693, 12) - 2127.51).abs() < TOL);
        assert!((compute_input_need(2079, 12) - 6382.53).abs() < TOL);
        assert_eq!(compute_input_need(0, 12), 0.0);
    }

    #[test]
    fn produce_examples() {
        assert!((produce(693, true, 0.5, 12) - 187.11).abs() < TOL);
        assert!((produce(693, false, 0.5, 12) - 93.555).abs() < TOL);
        assert!((produce(1386, true, 0.5, 12) - 374.22).abs() < TOL);
    }

    #[test]
    fn process_examples() {
        let (gcb, rest) = process_to_gcb(187.11, 1.0).unwrap();
        assert!((gcb - 187.11 * GCB_PER_FRESH_KG).abs() < TOL);
        assert!((gcb - 33.495).abs() < 1e-3);
        assert_eq!(rest, 0.0);

        let (gcb, rest) = process_to_gcb(100.0, 0.0).unwrap();
        assert_eq!(gcb, 0.0);
        assert_eq!(rest, 100.0);

        let (gcb, rest) = process_to_gcb(0.0, 0.7).unwrap();
        assert_eq!((gcb, rest), (0.0, 0.0));

        assert!(process_to_gcb(10.0, 1.5).is_err());
    }

    #[test]
    fn trees_scale_with_area() {
        assert_eq!(trees_for_area(1.0), 693);
        assert_eq!(trees_for_area(2.0), 1386);
        assert_eq!(trees_for_area(3.0), 2079);
        assert_eq!(trees_for_area(1.5), 1040); // 1039.5 rounds half up
    }

    fn test_buyer(demand: f64) -> BuyerAgent {
        BuyerAgent {
            id: AgentId(200),
            kind: BuyerKind::Market,
            label: "market".into(),
            price_mode: PriceMode::SupplyDemand,
            gcb_price_range: (250.0, 300.0),
            gcb_price: 275.0,
            fresh_price_range: None,
            fresh_price: 0.0,
            monthly_demand: demand,
            received_this_tick: 0.0,
            funds: 0.0,
        }
    }

    #[test]
    fn delivery_respects_demand_cap() {
        let mut buyer = test_buyer(333.33);
        assert_eq!(buyer.accept_delivery(100.0).unwrap(), 100.0);
        // 500 offered against 233.33 remaining: the residue goes elsewhere.
        let accepted = buyer.accept_delivery(500.0).unwrap();
        assert!((accepted - 233.33).abs() < TOL);
        assert!((buyer.received_this_tick - buyer.monthly_demand).abs() < TOL);
        assert_eq!(buyer.accept_delivery(0.0).unwrap(), 0.0);
        assert!(buyer.accept_delivery(-1.0).is_err());
    }

    #[test]
    fn random_price_stays_in_band() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut buyer = test_buyer(100.0);
        buyer.price_mode = PriceMode::Random;
        for _ in 0..500 {
            buyer.update_price(&mut rng);
            assert!((250.0..=300.0).contains(&buyer.gcb_price));
        }
    }

    #[test]
    fn supply_demand_price_moves() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);

        // Nothing delivered: price rises five percent, capped at the band.
        let mut starving = test_buyer(100.0);
        starving.gcb_price = 260.0;
        starving.update_price(&mut rng);
        assert!((starving.gcb_price - 273.0).abs() < TOL);

        // Fully met demand decays the price toward the band minimum.
        let mut sated = test_buyer(100.0);
        sated.gcb_price = 251.0;
        for _ in 0..200 {
            sated.received_this_tick = sated.monthly_demand;
            sated.update_price(&mut rng);
        }
        assert!((sated.gcb_price - 250.0).abs() < TOL);
    }

    #[test]
    fn loan_book_tracks_balances_and_defaults() {
        let mut book = LoanBook::new();
        let p = AgentId(1);
        book.issue(p, 1000.0, 0).unwrap();
        book.issue(p, 500.0, 1).unwrap();
        assert_eq!(book.open_count(), 2);
        assert!((book.outstanding_of(p) - 1500.0).abs() < TOL);

        // Oldest record first: 1100 closes the first and nibbles the second.
        let closed = book.repay(p, 1100.0, 2).unwrap();
        assert_eq!(closed, 1);
        assert!((book.outstanding_of(p) - 400.0).abs() < TOL);

        // No payment for longer than the window: one default event, once.
        let defaulters = book.mark_defaults(15, 12);
        assert_eq!(defaulters, vec![p]);
        assert!(book.mark_defaults(16, 12).is_empty());

        // The open index always agrees with a brute-force scan.
        assert_eq!(
            book.open_count(),
            book.records.iter().filter(|r| r.is_open()).count()
        );
        book.repay(p, 400.0, 17).unwrap();
        assert_eq!(book.open_count(), 0);
        assert_eq!(
            book.open_count(),
            book.records.iter().filter(|r| r.is_open()).count()
        );
        assert_eq!(book.outstanding_of(p), 0.0);
    }

    #[test]
    fn fully_repaid_loan_matches_principal_exactly() {
        let mut record = LoanRecord::new(AgentId(7), 4255.02, 0).unwrap();
        let mut total = 0.0;
        for tick in 1..=9 {
            let installment = (record.principal / 9.0).min(record.balance());
            record.pay(installment, tick).unwrap();
            total += installment;
        }
        assert!(!record.is_open());
        assert!((total - record.principal).abs() < 1e-9);
        assert!(record.pay(1.0, 10).is_err());
        assert!(LoanRecord::new(AgentId(7), 0.0, 0).is_err());
    }
}
