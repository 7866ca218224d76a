//! The discrete-time world and its tick loop.
//!
//! Each tick runs a fixed phase order: loan requests and grants, production,
//! processing, buyer choice, sale allocation and payment, loan repayment,
//! state and evidence updates, buyer price updates, and finally one row of
//! the monitored series.
//!
//! # Determinism
//!
//! A run is a pure function of `(config, seed)`. One ChaCha generator drives
//! every stochastic draw in a documented fixed order: at initialization, per
//! producer in roster order, farm area, starting cash, risk attitude, then
//! one trust draw per buyer; afterwards one price draw per buyer in roster
//! order (plus a fresh-price draw where the buyer takes cherries). Per tick,
//! buyers in random price mode redraw in roster order, then the sales order
//! is shuffled once. Changing any draw order changes run output; keep it
//! stable when refactoring.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::agents::{
    compute_input_need, produce, process_to_gcb, trees_for_area, AgentError, BuyerAgent,
    BuyerKind, LoanBook, ProducerAgent, Product, GCB_PER_FRESH_KG,
};
use crate::eval::{
    accepts, combined_evaluation, cost_evaluation, interaction_trust, interaction_risk,
    payment_volatility, reputation_risk, reputation_trust, risk_metric, trust_metric, AgentId,
    EvalError, EvidenceLedger, Outcome, PaymentHistory,
};
use crate::proxy::{
    choose_buyer, draw_uniform, init_risk, init_trust, population_mean, update_funds,
    update_risk, update_trust, FactorSignals, FundsState, ProxyError,
};
use crate::scenario::{ConfigError, DecisionModel, EvaluationParams, Role, ScenarioConfig};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("world already reached its horizon")]
    Finished,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Proxy(#[from] ProxyError),
    #[error(transparent)]
    Agent(#[from] AgentError),
}

/// Scale factor turning relative price moves into the fluctuation signal.
const PRICE_FLUCTUATION_GAIN: f64 = 2.0;

/// Per-tick monetary and mass flow totals, kept for conservation checks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TickFlows {
    /// GCB-equivalent kg offered to modeled buyers.
    pub offered_gcb_eq: f64,
    /// GCB-equivalent kg accepted by modeled buyers.
    pub accepted_gcb_eq: f64,
    /// GCB-equivalent kg absorbed by the fallback sink.
    pub sink_gcb_eq: f64,
    /// Php paid by buyers to producers.
    pub buyer_payments: f64,
    /// Php paid by the fallback sink.
    pub sink_payments: f64,
    /// Php of fresh credit issued.
    pub loans_granted: f64,
    /// Php repaid to the loan provider.
    pub repayments: f64,
    /// Php spent on inputs (to the passive nursery).
    pub input_spend: f64,
    /// Php of household consumption.
    pub household_spend: f64,
    /// Net change of all producer cash this tick.
    pub producer_cash_delta: f64,
    /// Largest overshoot of any buyer's monthly cap (should never exceed 0).
    pub max_cap_excess: f64,
}

/// One row per completed tick for every monitored series, plus the flow
/// diagnostics used by the conservation checks.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesFrame {
    pub series_names: Vec<String>,
    /// `rows[tick][series]`.
    pub rows: Vec<Vec<f64>>,
    pub flows: Vec<TickFlows>,
}

impl TimeSeriesFrame {
    pub fn tick_count(&self) -> usize {
        self.rows.len()
    }

    pub fn series_index(&self, name: &str) -> Option<usize> {
        self.series_names.iter().position(|n| n == name)
    }

    /// Full column for a named series; empty when the series does not exist.
    pub fn column(&self, name: &str) -> Vec<f64> {
        match self.series_index(name) {
            Some(idx) => self.rows.iter().map(|r| r[idx]).collect(),
            None => Vec::new(),
        }
    }
}

struct LenderState {
    id: AgentId,
    /// Roster index of the cooperative acting as lender, if any.
    coop_index: Option<usize>,
    book: LoanBook,
    /// Repayments received from each producer.
    repayment_history: Vec<PaymentHistory>,
    /// Lifetime principal issued / repaid per producer, for the cost metric.
    issued_total: Vec<f64>,
    repaid_total: Vec<f64>,
}

/// The mutable simulation state for one run.
pub struct World {
    config: ScenarioConfig,
    tick: u64,
    rng: ChaCha8Rng,
    producers: Vec<ProducerAgent>,
    buyers: Vec<BuyerAgent>,
    lender: LenderState,
    ledger: EvidenceLedger,
    frame: TimeSeriesFrame,
    /// Tick of each producer's most recent default event.
    last_default: Vec<Option<u64>>,
    /// GCB price posted by each buyer on the previous tick.
    prev_gcb_price: Vec<f64>,
    /// Value of deliveries each buyer has received from each producer.
    delivery_history: Vec<Vec<PaymentHistory>>,
}

impl World {
    pub fn new(config: ScenarioConfig, seed: u64) -> Result<Self, EngineError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let producer_count = config.producer_count as usize;
        let buyer_count = config.buyers.len();
        let member_count = (config.member_fraction * producer_count as f64).round() as usize;

        let mut ledger = EvidenceLedger::new();
        let mut producers = Vec::with_capacity(producer_count);
        for i in 0..producer_count {
            let id = AgentId(i as u32);
            ledger.register(id);
            let farm_area = draw_uniform(&mut rng, config.farm_area_range.0, config.farm_area_range.1)?;
            let cash = draw_uniform(&mut rng, config.proxy_params.income_lo, config.proxy_params.income_hi)?;
            let risk = init_risk(&mut rng, &config.proxy_params)?;
            let mut trust_by_buyer = Vec::with_capacity(buyer_count);
            for _ in 0..buyer_count {
                trust_by_buyer.push(init_trust(&mut rng, &config.proxy_params)?);
            }
            let trees = trees_for_area(farm_area);
            producers.push(ProducerAgent {
                id,
                farm_area,
                is_member: i < member_count,
                funds: FundsState::new(cash, trees),
                trust_by_buyer,
                risk,
                payment_history: vec![PaymentHistory::new(); buyer_count],
                processing_capacity: config.processing_capacity,
            });
        }

        let mut buyers = Vec::with_capacity(buyer_count);
        for (b, spec) in config.buyers.iter().enumerate() {
            let id = AgentId((producer_count + b) as u32);
            ledger.register(id);
            let gcb_price = draw_uniform(&mut rng, spec.gcb_price_range.0, spec.gcb_price_range.1)?;
            let fresh_price = match spec.fresh_price_range {
                Some((lo, hi)) => draw_uniform(&mut rng, lo, hi)?,
                None => 0.0,
            };
            buyers.push(BuyerAgent {
                id,
                kind: spec.kind,
                label: spec.label.clone(),
                price_mode: spec.price_mode,
                gcb_price_range: spec.gcb_price_range,
                gcb_price,
                fresh_price_range: spec.fresh_price_range,
                fresh_price,
                monthly_demand: config.monthly_demand_for(b),
                received_this_tick: 0.0,
                funds: 0.0,
            });
        }

        // The first cooperative doubles as the loan provider; without one a
        // dedicated provider gets its own identity.
        let coop_index = buyers.iter().position(|b| b.is_cooperative());
        let lender_id = match coop_index {
            Some(idx) => buyers[idx].id,
            None => {
                let id = AgentId((producer_count + buyer_count) as u32);
                ledger.register(id);
                id
            }
        };
        let lender = LenderState {
            id: lender_id,
            coop_index,
            book: LoanBook::new(),
            repayment_history: vec![PaymentHistory::new(); producer_count],
            issued_total: vec![0.0; producer_count],
            repaid_total: vec![0.0; producer_count],
        };

        let prev_gcb_price = buyers.iter().map(|b| b.gcb_price).collect();
        let series_names = series_names(&config);
        let delivery_history = vec![vec![PaymentHistory::new(); producer_count]; buyer_count];

        Ok(Self {
            config,
            tick: 0,
            rng,
            producers,
            buyers,
            lender,
            ledger,
            frame: TimeSeriesFrame {
                series_names,
                rows: Vec::new(),
                flows: Vec::new(),
            },
            last_default: vec![None; producer_count],
            prev_gcb_price,
            delivery_history,
        })
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn frame(&self) -> &TimeSeriesFrame {
        &self.frame
    }

    pub fn into_frame(self) -> TimeSeriesFrame {
        self.frame
    }

    pub fn loan_count(&self) -> usize {
        self.lender.book.open_count()
    }

    fn lender_params(&self) -> EvaluationParams {
        self.config
            .role_overrides
            .get(&Role::LoanProvider)
            .cloned()
            .unwrap_or_else(|| self.config.eval_params.clone())
    }

    fn buyer_gate_params(&self, kind: BuyerKind) -> Option<EvaluationParams> {
        let role = match kind {
            BuyerKind::Cooperative => Role::Cooperative,
            BuyerKind::Market => Role::Market,
        };
        self.config.role_overrides.get(&role).cloned()
    }

    /// Advance the world by one tick.
    pub fn step(&mut self) -> Result<(), EngineError> {
        if self.tick >= self.config.horizon as u64 {
            return Err(EngineError::Finished);
        }
        let tick = self.tick;
        // Cheap copies of the per-tick knobs; cloning the whole config here
        // would copy the buyer roster strings every tick.
        let ticks_per_year = self.config.ticks_per_year;
        let decision_model = self.config.decision_model;
        let yield_penalty = self.config.yield_penalty;
        let weight_mix = self.config.weight_mix;
        let repayment_policy = self.config.repayment.clone();
        let proxy_params = self.config.proxy_params.clone();
        let household_rate = self.config.household_expense_per_tree_year;
        let producer_count = self.producers.len();
        let buyer_count = self.buyers.len();
        let cash_before: f64 = self.producers.iter().map(|p| p.funds.cash).sum();
        let mut flows = TickFlows::default();
        let lender_params = self.lender_params();

        for buyer in &mut self.buyers {
            buyer.received_this_tick = 0.0;
        }

        // Phase 1: input needs, loan requests, input funding.
        let mut need = vec![0.0; producer_count];
        let mut funded = vec![false; producer_count];
        let mut loan_signal = vec![0.0; producer_count];
        for i in 0..producer_count {
            need[i] = compute_input_need(self.producers[i].trees(), ticks_per_year);
            let cash = self.producers[i].funds.cash;
            if cash < need[i] {
                let outstanding = self.lender.book.outstanding_of(self.producers[i].id);
                if outstanding <= repayment_policy.debt_cap_needs * need[i] {
                    let amount = need[i] - cash;
                    let granted = match decision_model {
                        DecisionModel::Proxy => match self.last_default[i] {
                            Some(t) => tick.saturating_sub(t) > repayment_policy.lockout_ticks,
                            None => true,
                        },
                        DecisionModel::Full => self.lender_grants_full(i, amount, &lender_params)?,
                    };
                    if granted {
                        self.lender.book.issue(self.producers[i].id, amount, tick)?;
                        self.lender.issued_total[i] += amount;
                        let funds = update_funds(&self.producers[i].funds, 0.0, 0.0, 0.0, 0.0, amount)?;
                        self.producers[i].funds = funds;
                        flows.loans_granted += amount;
                        loan_signal[i] = 1.0;
                        self.ledger
                            .record(self.producers[i].id, self.lender.id, Outcome::Positive)?;
                    } else {
                        loan_signal[i] = -1.0;
                        self.ledger
                            .record(self.producers[i].id, self.lender.id, Outcome::Negative)?;
                    }
                }
            }
            funded[i] = self.producers[i].funds.cash >= need[i];
            if funded[i] && need[i] > 0.0 {
                let funds =
                    update_funds(&self.producers[i].funds, 0.0, 0.0, need[i], 0.0, 0.0)?;
                self.producers[i].funds = funds;
                flows.input_spend += need[i];
            }
        }

        // Phases 2-3: production and processing.
        let mut gcb_lot = vec![0.0; producer_count];
        let mut fresh_lot = vec![0.0; producer_count];
        for i in 0..producer_count {
            let fresh = produce(
                self.producers[i].trees(),
                funded[i],
                yield_penalty,
                ticks_per_year,
            );
            let (gcb, rest) = process_to_gcb(fresh, self.producers[i].processing_capacity)?;
            gcb_lot[i] = gcb;
            fresh_lot[i] = rest;
        }

        // Phases 4-5: buyer choice, allocation, payment.
        let mut order: Vec<usize> = (0..producer_count).collect();
        order.shuffle(&mut self.rng);
        let mut sold_to = vec![0.0; buyer_count];
        let mut sink_share_of = vec![0.0; producer_count];
        let mut offered_of = vec![0.0; producer_count];
        let coop_index = self.lender.coop_index;
        // Scratch buffers reused across every lot this tick.
        let mut candidates: Vec<usize> = Vec::with_capacity(buyer_count);
        let mut cand_trust: Vec<f64> = Vec::with_capacity(buyer_count);
        let mut cand_prices: Vec<f64> = Vec::with_capacity(buyer_count);
        let mut cand_coop: Vec<bool> = Vec::with_capacity(buyer_count);
        for &i in &order {
            let mut delivered_to_coop = false;
            for (product, qty) in [
                (Product::Gcb, gcb_lot[i]),
                (Product::FreshCherries, fresh_lot[i]),
            ] {
                if qty <= 0.0 {
                    continue;
                }
                let qty_gcb_eq = match product {
                    Product::Gcb => qty,
                    Product::FreshCherries => qty * GCB_PER_FRESH_KG,
                };
                flows.offered_gcb_eq += qty_gcb_eq;
                offered_of[i] += qty_gcb_eq;

                candidates.clear();
                candidates.extend((0..buyer_count).filter(|&b| self.buyers[b].accepts(product)));
                let chosen = if candidates.is_empty() {
                    None
                } else {
                    match decision_model {
                        DecisionModel::Proxy => {
                            cand_trust.clear();
                            cand_prices.clear();
                            cand_coop.clear();
                            for &b in &candidates {
                                cand_trust.push(self.producers[i].trust_by_buyer[b].value());
                                cand_prices.push(self.buyers[b].price(product));
                                cand_coop.push(self.buyers[b].is_cooperative());
                            }
                            let idx = choose_buyer(
                                &cand_trust,
                                self.producers[i].risk.value(),
                                &cand_prices,
                                &cand_coop,
                                &weight_mix,
                            )?;
                            Some(candidates[idx])
                        }
                        DecisionModel::Full => {
                            self.choose_buyer_full(i, &candidates, product, qty)?
                        }
                    }
                };

                let mut accepted_gcb_eq = 0.0;
                if let Some(b) = chosen {
                    // In the full model a strict buyer may turn the delivery away.
                    let gate_open = match decision_model {
                        DecisionModel::Proxy => true,
                        DecisionModel::Full => self.buyer_accepts_supplier(b, i, product, qty)?,
                    };
                    if gate_open {
                        accepted_gcb_eq = self.buyers[b].accept_delivery(qty_gcb_eq)?;
                        if accepted_gcb_eq > 0.0 {
                            let accepted_kg = match product {
                                Product::Gcb => accepted_gcb_eq,
                                Product::FreshCherries => accepted_gcb_eq / GCB_PER_FRESH_KG,
                            };
                            let price = self.buyers[b].price(product);
                            let payment = accepted_kg * price;
                            self.buyers[b].funds -= payment;
                            let funds = update_funds(
                                &self.producers[i].funds,
                                accepted_kg,
                                price,
                                0.0,
                                0.0,
                                0.0,
                            )?;
                            self.producers[i].funds = funds;
                            flows.buyer_payments += payment;
                            sold_to[b] += accepted_gcb_eq;
                            self.producers[i].payment_history[b].push(payment);
                            self.delivery_history[b][i].push(payment);
                            // Payment is positive evidence toward the buyer;
                            // received produce is positive evidence toward
                            // the producer.
                            let buyer_id = self.buyers[b].id;
                            self.ledger
                                .record(self.producers[i].id, buyer_id, Outcome::Positive)?;
                            self.ledger
                                .record(buyer_id, self.producers[i].id, Outcome::Positive)?;
                            if Some(b) == coop_index {
                                delivered_to_coop = true;
                            }
                        }
                    }
                }
                flows.accepted_gcb_eq += accepted_gcb_eq;
                let residue_gcb_eq = qty_gcb_eq - accepted_gcb_eq;
                if residue_gcb_eq > 0.0 {
                    flows.sink_gcb_eq += residue_gcb_eq;
                    sink_share_of[i] += residue_gcb_eq;
                    let residue_kg = match product {
                        Product::Gcb => residue_gcb_eq,
                        Product::FreshCherries => residue_gcb_eq / GCB_PER_FRESH_KG,
                    };
                    let sink_price = self.sink_price(product);
                    let payment = residue_kg * sink_price;
                    let funds = update_funds(
                        &self.producers[i].funds,
                        residue_kg,
                        sink_price,
                        0.0,
                        0.0,
                        0.0,
                    )?;
                    self.producers[i].funds = funds;
                    flows.sink_payments += payment;
                }
            }
            // A member contributing nothing this tick is negative evidence
            // for the cooperative.
            if let Some(c) = coop_index {
                if self.producers[i].is_member && !delivered_to_coop {
                    let coop_id = self.buyers[c].id;
                    self.ledger
                        .record(coop_id, self.producers[i].id, Outcome::Negative)?;
                }
            }
        }

        // Phase 6: repayment, paced by risk appetite, then delinquency scan.
        let mut outstanding_after = vec![0.0; producer_count];
        for i in 0..producer_count {
            let id = self.producers[i].id;
            let outstanding = self.lender.book.outstanding_of(id);
            if outstanding > 0.0 {
                let risk = self.producers[i].risk.value();
                let household =
                    self.producers[i].trees() as f64 * household_rate / ticks_per_year as f64;
                let precaution =
                    (1.0 - risk) * repayment_policy.precaution_factor * (need[i] + household);
                let willingness = repayment_policy.base_willingness
                    + (1.0 - repayment_policy.base_willingness) * risk;
                let pace =
                    (repayment_policy.pace_base + repayment_policy.pace_slope * risk).min(1.0);
                let cash = self.producers[i].funds.cash;
                let desired = (willingness * (cash - precaution).max(0.0))
                    .min(pace * outstanding);
                let repayment = desired.min(outstanding).min(cash);
                if repayment > 0.0 {
                    let closed = self.lender.book.repay(id, repayment, tick)?;
                    self.lender.repaid_total[i] += repayment;
                    self.lender.repayment_history[i].push(repayment);
                    let funds =
                        update_funds(&self.producers[i].funds, 0.0, 0.0, 0.0, repayment, 0.0)?;
                    self.producers[i].funds = funds;
                    flows.repayments += repayment;
                    for _ in 0..closed {
                        self.ledger.record(self.lender.id, id, Outcome::Positive)?;
                    }
                }
            }
            outstanding_after[i] = self.lender.book.outstanding_of(id);
            self.producers[i].funds.outstanding_loan = outstanding_after[i];
        }
        for defaulter in self
            .lender
            .book
            .mark_defaults(tick, repayment_policy.delinquency_window)
        {
            let idx = defaulter.0 as usize;
            self.last_default[idx] = Some(tick);
            self.ledger.record(self.lender.id, defaulter, Outcome::Negative)?;
        }

        // Phase 7: household spending, factor signals, trust and risk moves.
        let price_moves: Vec<f64> = self
            .buyers
            .iter()
            .zip(self.prev_gcb_price.iter())
            .map(|(b, prev)| if *prev > 0.0 { (b.gcb_price - prev).abs() / prev } else { 0.0 })
            .collect();
        let fluctuation = if price_moves.is_empty() {
            0.0
        } else {
            let mean_move = price_moves.iter().sum::<f64>() / price_moves.len() as f64;
            (mean_move * PRICE_FLUCTUATION_GAIN).min(1.0)
        };
        let coop_gcb_price = coop_index.map(|c| self.buyers[c].gcb_price);
        let best_market_gcb = self
            .buyers
            .iter()
            .filter(|b| !b.is_cooperative())
            .map(|b| b.gcb_price)
            .fold(f64::NEG_INFINITY, f64::max);
        let market_premium = match (coop_gcb_price, best_market_gcb.is_finite()) {
            (Some(coop), true) if coop > 0.0 => ((best_market_gcb - coop) / coop).clamp(-1.0, 1.0),
            _ => 0.0,
        };

        for i in 0..producer_count {
            let household =
                self.producers[i].trees() as f64 * household_rate / ticks_per_year as f64;
            let spend = household.min(self.producers[i].funds.cash);
            self.producers[i].funds.cash -= spend;
            flows.household_spend += spend;

            let trust_anchor = match coop_index {
                Some(c) => self.producers[i].trust_by_buyer[c].value(),
                None => {
                    let vals: Vec<f64> = self.producers[i]
                        .trust_by_buyer
                        .iter()
                        .map(|t| t.value())
                        .collect();
                    population_mean(&vals).unwrap_or(0.5)
                }
            };
            let cash = self.producers[i].funds.cash;
            let sufficiency = if need[i] > 0.0 {
                ((cash - need[i]) / need[i]).clamp(-1.0, 1.0)
            } else {
                1.0
            };
            let exposure = if need[i] > 0.0 {
                -(outstanding_after[i] / need[i]).min(1.0)
            } else {
                0.0
            };
            let fulfilment = if offered_of[i] > 0.0 {
                -2.0 * (sink_share_of[i] / offered_of[i])
            } else {
                0.0
            };

            for b in 0..buyer_count {
                let willingness = if self.buyers[b].id == self.lender.id {
                    loan_signal[i]
                } else {
                    0.0
                };
                let own = self.buyers[b].gcb_price;
                let best_other = self
                    .buyers
                    .iter()
                    .enumerate()
                    .filter(|(other, _)| *other != b)
                    .map(|(_, buyer)| buyer.gcb_price)
                    .fold(f64::NEG_INFINITY, f64::max);
                let comparison = if best_other.is_finite() && best_other > 0.0 {
                    ((own - best_other) / best_other).clamp(-1.0, 1.0)
                } else {
                    0.0
                };
                let signals = FactorSignals {
                    loan_willingness: willingness,
                    price_comparison: comparison,
                    ..Default::default()
                };
                self.producers[i].trust_by_buyer[b] =
                    update_trust(self.producers[i].trust_by_buyer[b], &signals, &proxy_params);
            }

            let risk_signals = FactorSignals {
                trust_feedback: (0.5 - trust_anchor) * 2.0,
                price_fluctuation: fluctuation,
                funds_sufficiency: sufficiency,
                default_exposure: exposure,
                price_gap: market_premium,
                demand_feedback: fulfilment,
                ..Default::default()
            };
            self.producers[i].risk =
                update_risk(self.producers[i].risk, &risk_signals, &proxy_params);
        }

        // Phase 9 first half: capture this tick's series before prices move.
        let produced_total: f64 = flows.offered_gcb_eq;
        let mut row = Vec::with_capacity(self.frame.series_names.len());
        for b in 0..buyer_count {
            let mean = self
                .producers
                .iter()
                .map(|p| p.trust_by_buyer[b].value())
                .sum::<f64>()
                / producer_count as f64;
            row.push(mean);
        }
        let all_trust: f64 = self
            .producers
            .iter()
            .flat_map(|p| p.trust_by_buyer.iter().map(|t| t.value()))
            .sum::<f64>()
            / (producer_count * buyer_count) as f64;
        row.push(all_trust);
        let buyer_trust_means: Vec<f64> = (0..buyer_count)
            .map(|b| {
                self.producers
                    .iter()
                    .map(|p| interaction_trust(&self.ledger.pairwise(self.buyers[b].id, p.id)))
                    .sum::<f64>()
                    / producer_count as f64
            })
            .collect();
        row.push(buyer_trust_means.iter().sum::<f64>() / buyer_count as f64);
        row.push(self.lender.book.open_count() as f64);
        for b in 0..buyer_count {
            let mean = self
                .producers
                .iter()
                .map(|p| interaction_trust(&self.ledger.pairwise(p.id, self.buyers[b].id)))
                .sum::<f64>()
                / producer_count as f64;
            row.push(mean);
        }
        let risk_values: Vec<f64> = self.producers.iter().map(|p| p.risk.value()).collect();
        row.push(population_mean(&risk_values)?);
        for b in 0..buyer_count {
            let share = if produced_total > 0.0 {
                100.0 * sold_to[b] / produced_total
            } else {
                0.0
            };
            row.push(share);
        }
        row.extend(buyer_trust_means.iter());
        for b in 0..buyer_count {
            row.push(self.buyers[b].gcb_price);
            if self.buyers[b].fresh_price_range.is_some() {
                row.push(self.buyers[b].fresh_price);
            }
        }

        // Cap excess diagnostic before the counters reset next tick.
        flows.max_cap_excess = self
            .buyers
            .iter()
            .map(|b| b.received_this_tick - b.monthly_demand)
            .fold(f64::NEG_INFINITY, f64::max);

        // Phase 8: prices move for the next tick.
        self.prev_gcb_price = self.buyers.iter().map(|b| b.gcb_price).collect();
        for buyer in &mut self.buyers {
            buyer.update_price(&mut self.rng);
        }

        let cash_after: f64 = self.producers.iter().map(|p| p.funds.cash).sum();
        flows.producer_cash_delta = cash_after - cash_before;
        self.frame.rows.push(row);
        self.frame.flows.push(flows);
        self.tick += 1;
        Ok(())
    }

    fn sink_price(&self, product: Product) -> f64 {
        let min_price = self
            .buyers
            .iter()
            .filter(|b| b.accepts(product))
            .map(|b| match product {
                Product::Gcb => b.gcb_price_range.0,
                Product::FreshCherries => b.fresh_price_range.map(|(lo, _)| lo).unwrap_or(0.0),
            })
            .fold(f64::INFINITY, f64::min);
        if min_price.is_finite() {
            self.config.sink_discount * min_price
        } else {
            0.0
        }
    }

    /// Full-model loan decision: the lender scores the producer on trust,
    /// risk, and expected repayment value and grants at its threshold.
    fn lender_grants_full(
        &self,
        producer_idx: usize,
        amount: f64,
        params: &EvaluationParams,
    ) -> Result<bool, EngineError> {
        let p = &self.producers[producer_idx];
        let pairwise = self.ledger.pairwise(self.lender.id, p.id);
        let global = self.ledger.global(p.id);
        let trust = trust_metric(
            p.is_member,
            interaction_trust(&pairwise),
            reputation_trust(&global),
            &params.trust,
        );
        let vol = payment_volatility(&self.lender.repayment_history[producer_idx]);
        let risk = risk_metric(
            interaction_risk(&pairwise),
            reputation_risk(&global),
            vol,
            &params.risk,
            amount.max(1.0),
        )?;
        // Expected end position: the requested amount scaled by how much of
        // past principal actually came back. A clean record breaks even.
        let repaid_fraction = if self.lender.issued_total[producer_idx] > 0.0 {
            self.lender.repaid_total[producer_idx] / self.lender.issued_total[producer_idx]
        } else {
            1.0
        };
        let cost = cost_evaluation(amount * repaid_fraction, amount, &params.cost)?;
        let evaluation = combined_evaluation(trust, risk, cost, &params.top);
        Ok(accepts(evaluation, params.threshold))
    }

    /// Full-model buyer choice: score every candidate, keep those at or
    /// above the producer's threshold, take the best. `None` means the lot
    /// goes to the fallback sink.
    fn choose_buyer_full(
        &self,
        producer_idx: usize,
        candidates: &[usize],
        product: Product,
        qty: f64,
    ) -> Result<Option<usize>, EngineError> {
        let p = &self.producers[producer_idx];
        let params = &self.config.eval_params;
        let revenues: Vec<f64> = candidates
            .iter()
            .map(|&b| qty * self.buyers[b].price(product))
            .collect();
        let reference = revenues.iter().sum::<f64>() / revenues.len() as f64;
        if !(reference > 0.0) {
            return Ok(None);
        }
        let mut best: Option<(usize, f64)> = None;
        for (slot, &b) in candidates.iter().enumerate() {
            let buyer = &self.buyers[b];
            let pairwise = self.ledger.pairwise(p.id, buyer.id);
            let global = self.ledger.global(buyer.id);
            let trust = trust_metric(
                buyer.is_cooperative(),
                interaction_trust(&pairwise),
                reputation_trust(&global),
                &params.trust,
            );
            let vol = payment_volatility(&p.payment_history[b]);
            let risk = risk_metric(
                interaction_risk(&pairwise),
                reputation_risk(&global),
                vol,
                &params.risk,
                reference,
            )?;
            let cost = cost_evaluation(revenues[slot], reference, &params.cost)?;
            let evaluation = combined_evaluation(trust, risk, cost, &self.config.weight_mix);
            if accepts(evaluation, self.config.threshold)
                && best.map_or(true, |(_, e)| evaluation > e)
            {
                best = Some((b, evaluation));
            }
        }
        Ok(best.map(|(b, _)| b))
    }

    /// Full-model supplier gate: a buyer with overridden role parameters may
    /// refuse a delivery from a producer scoring below its threshold.
    fn buyer_accepts_supplier(
        &self,
        buyer_idx: usize,
        producer_idx: usize,
        product: Product,
        qty: f64,
    ) -> Result<bool, EngineError> {
        let Some(params) = self.buyer_gate_params(self.buyers[buyer_idx].kind) else {
            return Ok(true);
        };
        let buyer = &self.buyers[buyer_idx];
        let p = &self.producers[producer_idx];
        let pairwise = self.ledger.pairwise(buyer.id, p.id);
        let global = self.ledger.global(p.id);
        let trust = trust_metric(
            p.is_member,
            interaction_trust(&pairwise),
            reputation_trust(&global),
            &params.trust,
        );
        let history = &self.delivery_history[buyer_idx][producer_idx];
        let vol = payment_volatility(history);
        let offered_value = qty * buyer.price(product);
        let typical = if history.count() > 0 {
            history.returns().iter().sum::<f64>() / history.count() as f64
        } else {
            offered_value
        };
        let scale = typical.max(1.0);
        let risk = risk_metric(
            interaction_risk(&pairwise),
            reputation_risk(&global),
            vol,
            &params.risk,
            scale,
        )?;
        let cost = cost_evaluation(offered_value, scale, &params.cost)?;
        let evaluation = combined_evaluation(trust, risk, cost, &params.top);
        Ok(accepts(evaluation, params.threshold))
    }
}

/// Stable series naming for a configuration's buyer roster.
pub fn series_names(config: &ScenarioConfig) -> Vec<String> {
    let mut names = Vec::new();
    for spec in &config.buyers {
        names.push(format!("producer_trust_{}", spec.label));
    }
    names.push("producer_trust_mean".into());
    names.push("buyer_trust_mean".into());
    names.push("loan_count".into());
    for spec in &config.buyers {
        names.push(format!("evidence_trust_{}", spec.label));
    }
    names.push("risk_attitude".into());
    for spec in &config.buyers {
        names.push(format!("share_{}", spec.label));
    }
    for spec in &config.buyers {
        names.push(format!("buyer_trust_{}", spec.label));
    }
    for spec in &config.buyers {
        names.push(format!("price_gcb_{}", spec.label));
        if spec.fresh_price_range.is_some() {
            names.push(format!("price_fresh_{}", spec.label));
        }
    }
    names
}

/// Run a scenario from tick 0 to its horizon. Fully deterministic in
/// `(config, seed)`.
pub fn run(config: &ScenarioConfig, seed: u64) -> Result<TimeSeriesFrame, EngineError> {
    let mut world = World::new(config.clone(), seed)?;
    for _ in 0..config.horizon {
        world.step()?;
    }
    Ok(world.into_frame())
}
