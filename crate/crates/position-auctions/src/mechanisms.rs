//! The three mechanisms under study.
//!
//! - [`run_iterated_spa`]: slots are sold one at a time in a chosen order;
//!   each sale is a second-price auction on the rate-weighted scores
//!   `α_{i,j}·b_i` of the bidders still present, and the winner leaves.
//! - [`run_vcg`] / [`vcg_result`]: the Vickrey–Clarke–Groves mechanism —
//!   welfare-maximizing assignment, each winner paying the externality her
//!   presence imposes on the others (full re-optimization on removal).
//! - [`run_expressive_auction`]: bidders submit a per-impression bid for
//!   every slot; the seller picks the sale order (and tie resolutions) that
//!   maximize revenue, and a slot with fewer than two nonzero remaining bids
//!   goes unsold.
//!
//! Prices are stored per impression throughout; that convention survives
//! zero click-through-rates, which the per-click view does not.

use crate::assignment;
use crate::model::{Instance, Outcome};
use crate::rational::Q;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors from mechanism execution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MechanismError {
    /// Bid vector length differs from the bidder count.
    #[error("{got} bids for {expected} bidders")]
    BidCountMismatch { expected: usize, got: usize },
    /// A negative bid.
    #[error("bidder {bidder} bids a negative amount")]
    NegativeBid { bidder: usize },
    /// A sale order that is not a permutation of the slots.
    #[error("order of sale is not a permutation of the {slots} slots")]
    InvalidOrder { slots: usize },
    /// A priority list that is not a permutation of the bidders.
    #[error("tie-break priority is not a permutation of the {bidders} bidders")]
    InvalidPriority { bidders: usize },
    /// The click-ratio tie rule outside its two-slot domain.
    #[error("the click-ratio tie rule is defined only for two slots; this instance has {slots}")]
    ClickRatioNeedsTwoSlots { slots: usize },
    /// The revenue-maximizing tie rule outside the expressive auction.
    #[error("the revenue-max tie rule applies only to the expressive auction")]
    RevenueMaxNotApplicable,
    /// Expressive bid matrix with the wrong shape.
    #[error("expressive bid row for bidder {bidder} has {got} entries, expected {expected}")]
    ExpressiveBidShape {
        bidder: usize,
        expected: usize,
        got: usize,
    },
    /// Expressive bid matrix with the wrong number of rows.
    #[error("{got} expressive bid rows for {expected} bidders")]
    ExpressiveRowCount { expected: usize, got: usize },
    /// A negative expressive bid.
    #[error("bidder {bidder} bids a negative amount for slot {slot}")]
    NegativeExpressiveBid { bidder: usize, slot: usize },
    /// Too many bidders for the exhaustive order search.
    #[error("expressive auction supports at most {max} bidders, got {got}")]
    ExpressiveCapacity { max: usize, got: usize },
}

/// One per-click bid per bidder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BidProfile(pub Vec<Q>);

impl BidProfile {
    /// The truthful profile `b_i = v_i`.
    pub fn truthful(instance: &Instance) -> Self {
        BidProfile(instance.values().to_vec())
    }

    /// Bid of bidder `i`.
    pub fn bid(&self, i: usize) -> &Q {
        &self.0[i]
    }

    pub(crate) fn validate(&self, instance: &Instance) -> Result<(), MechanismError> {
        if self.0.len() != instance.n() {
            return Err(MechanismError::BidCountMismatch {
                expected: instance.n(),
                got: self.0.len(),
            });
        }
        for (i, b) in self.0.iter().enumerate() {
            if b.is_negative() {
                return Err(MechanismError::NegativeBid { bidder: i + 1 });
            }
        }
        Ok(())
    }
}

/// The order in which slots are auctioned (0-based internally; 1-based in
/// display and JSON). `best_to_worst` is the identity order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderOfSale(pub Vec<usize>);

impl OrderOfSale {
    /// The default order: slot 1 first, slot m last.
    pub fn best_to_worst(m: usize) -> Self {
        OrderOfSale((0..m).collect())
    }

    pub(crate) fn validate(&self, m: usize) -> Result<(), MechanismError> {
        let mut seen = vec![false; m];
        if self.0.len() != m {
            return Err(MechanismError::InvalidOrder { slots: m });
        }
        for &j in &self.0 {
            if j >= m || seen[j] {
                return Err(MechanismError::InvalidOrder { slots: m });
            }
            seen[j] = true;
        }
        Ok(())
    }
}

impl fmt::Display for OrderOfSale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        write!(f, ")")
    }
}

impl Serialize for OrderOfSale {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let one_based: Vec<usize> = self.0.iter().map(|j| j + 1).collect();
        one_based.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrderOfSale {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let one_based = Vec::<usize>::deserialize(d)?;
        let mut zero_based = Vec::with_capacity(one_based.len());
        for j in one_based {
            if j == 0 {
                return Err(serde::de::Error::custom(
                    "sale orders are 1-based; 0 is not a slot",
                ));
            }
            zero_based.push(j - 1);
        }
        Ok(OrderOfSale(zero_based))
    }
}

/// How exact score ties are resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TieBreakRule {
    /// A fixed bidder permutation; among tied bidders, the one appearing
    /// earliest wins.
    PriorityOrder(Vec<usize>),
    /// Two-slot instances only: the tied bidder with the larger rate ratio
    /// `α_{i,1}/α_{i,2}` wins (compared exactly by cross-multiplication, so
    /// zero rates are handled); residual ties fall back to a priority order.
    HighestClickRatio {
        /// Fallback permutation for bidders with equal ratios.
        residual_priority: Vec<usize>,
    },
    /// Expressive auction only: ties join the exhaustive revenue-maximizing
    /// search over sale orders.
    RevenueMax,
}

impl TieBreakRule {
    /// Priority order `1, 2, …, n`.
    pub fn natural_priority(n: usize) -> Self {
        TieBreakRule::PriorityOrder((0..n).collect())
    }

    /// Click-ratio rule with natural residual priority.
    pub fn click_ratio(n: usize) -> Self {
        TieBreakRule::HighestClickRatio {
            residual_priority: (0..n).collect(),
        }
    }

    pub(crate) fn validate(&self, instance: &Instance) -> Result<(), MechanismError> {
        let check_perm = |perm: &[usize]| {
            let n = instance.n();
            let mut seen = vec![false; n];
            if perm.len() != n {
                return Err(MechanismError::InvalidPriority { bidders: n });
            }
            for &i in perm {
                if i >= n || seen[i] {
                    return Err(MechanismError::InvalidPriority { bidders: n });
                }
                seen[i] = true;
            }
            Ok(())
        };
        match self {
            TieBreakRule::PriorityOrder(perm) => check_perm(perm),
            TieBreakRule::HighestClickRatio { residual_priority } => {
                if instance.m() != 2 {
                    return Err(MechanismError::ClickRatioNeedsTwoSlots {
                        slots: instance.m(),
                    });
                }
                check_perm(residual_priority)
            }
            TieBreakRule::RevenueMax => Err(MechanismError::RevenueMaxNotApplicable),
        }
    }

    /// Pick the winner among score-tied bidders.
    pub(crate) fn select(&self, instance: &Instance, tied: &[usize]) -> usize {
        debug_assert!(!tied.is_empty());
        match self {
            TieBreakRule::PriorityOrder(perm) => *perm
                .iter()
                .find(|i| tied.contains(i))
                .expect("priority covers all bidders"),
            TieBreakRule::HighestClickRatio { residual_priority } => {
                let mut best: Vec<usize> = vec![tied[0]];
                for &i in &tied[1..] {
                    match click_ratio_cmp(instance, i, best[0]) {
                        Ordering::Greater => best = vec![i],
                        Ordering::Equal => best.push(i),
                        Ordering::Less => {}
                    }
                }
                *residual_priority
                    .iter()
                    .find(|i| best.contains(i))
                    .expect("priority covers all bidders")
            }
            TieBreakRule::RevenueMax => unreachable!("rejected by validation"),
        }
    }
}

/// Compare rate ratios `α_{i,1}/α_{i,2}` vs `α_{k,1}/α_{k,2}` by
/// cross-multiplication (total even with zero denominators; `0/0` compares
/// equal to everything comparable).
pub fn click_ratio_cmp(instance: &Instance, i: usize, k: usize) -> Ordering {
    let lhs = instance.ctr(i, 0) * instance.ctr(k, 1);
    let rhs = instance.ctr(k, 0) * instance.ctr(i, 1);
    lhs.cmp(&rhs)
}

impl fmt::Display for TieBreakRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieBreakRule::PriorityOrder(perm) => {
                write!(f, "priority:")?;
                for (k, i) in perm.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", i + 1)?;
                }
                Ok(())
            }
            TieBreakRule::HighestClickRatio { residual_priority } => {
                write!(f, "click-ratio")?;
                if !residual_priority.iter().enumerate().all(|(k, &i)| k == i) {
                    write!(f, ":")?;
                    for (k, i) in residual_priority.iter().enumerate() {
                        if k > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", i + 1)?;
                    }
                }
                Ok(())
            }
            TieBreakRule::RevenueMax => write!(f, "revenue-max"),
        }
    }
}

/// Parse error for [`TieBreakRule`] text forms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a tie rule (expected `priority:1,3,2`, `click-ratio`, or `revenue-max`)")]
pub struct ParseTieBreakError(String);

impl FromStr for TieBreakRule {
    type Err = ParseTieBreakError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_perm = |list: &str| -> Result<Vec<usize>, ParseTieBreakError> {
            list.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .ok()
                        .filter(|&i| i >= 1)
                        .map(|i| i - 1)
                        .ok_or_else(|| ParseTieBreakError(s.to_string()))
                })
                .collect()
        };
        if let Some(list) = s.strip_prefix("priority:") {
            return Ok(TieBreakRule::PriorityOrder(parse_perm(list)?));
        }
        if s == "click-ratio" {
            // Residual priority is filled in against the instance at use.
            return Ok(TieBreakRule::HighestClickRatio {
                residual_priority: Vec::new(),
            });
        }
        if let Some(list) = s.strip_prefix("click-ratio:") {
            return Ok(TieBreakRule::HighestClickRatio {
                residual_priority: parse_perm(list)?,
            });
        }
        if s == "revenue-max" {
            return Ok(TieBreakRule::RevenueMax);
        }
        Err(ParseTieBreakError(s.to_string()))
    }
}

impl Serialize for TieBreakRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TieBreakRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One per-impression bid per bidder per slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpressiveBidProfile(pub Vec<Vec<Q>>);

impl ExpressiveBidProfile {
    pub(crate) fn validate(&self, instance: &Instance) -> Result<(), MechanismError> {
        if self.0.len() != instance.n() {
            return Err(MechanismError::ExpressiveRowCount {
                expected: instance.n(),
                got: self.0.len(),
            });
        }
        for (i, row) in self.0.iter().enumerate() {
            if row.len() != instance.m() {
                return Err(MechanismError::ExpressiveBidShape {
                    bidder: i + 1,
                    expected: instance.m(),
                    got: row.len(),
                });
            }
            for (j, b) in row.iter().enumerate() {
                if b.is_negative() {
                    return Err(MechanismError::NegativeExpressiveBid {
                        bidder: i + 1,
                        slot: j + 1,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Sell the slots one at a time in the given order.
///
/// For each slot `j` in order, the remaining bidder with the highest score
/// `α_{i,j}·b_i` wins (ties resolved by `tie`), pays the second-highest
/// remaining score per impression (0 if no competitor remains), and leaves.
pub fn run_iterated_spa(
    instance: &Instance,
    bids: &BidProfile,
    order: &OrderOfSale,
    tie: &TieBreakRule,
) -> Result<Outcome, MechanismError> {
    bids.validate(instance)?;
    order.validate(instance.m())?;
    tie.validate(instance)?;
    let n = instance.n();
    let m = instance.m();
    let mut remaining: Vec<bool> = vec![true; n];
    let mut winners: Vec<Option<usize>> = vec![None; m];
    let mut prices: Vec<Q> = vec![Q::zero(); m];
    for &j in &order.0 {
        let scores: Vec<(usize, Q)> = (0..n)
            .filter(|&i| remaining[i])
            .map(|i| (i, instance.ctr(i, j) * bids.bid(i)))
            .collect();
        let top = scores
            .iter()
            .map(|(_, s)| s)
            .max()
            .expect("at least one bidder remains while slots remain")
            .clone();
        let tied: Vec<usize> = scores
            .iter()
            .filter(|(_, s)| *s == top)
            .map(|(i, _)| *i)
            .collect();
        let winner = tie.select(instance, &tied);
        let price = scores
            .iter()
            .filter(|(i, _)| *i != winner)
            .map(|(_, s)| s)
            .max()
            .cloned()
            .unwrap_or_else(Q::zero);
        winners[j] = Some(winner);
        prices[j] = price;
        remaining[winner] = false;
    }
    Ok(finish_outcome(instance, winners, prices))
}

fn finish_outcome(instance: &Instance, winners: Vec<Option<usize>>, prices: Vec<Q>) -> Outcome {
    let mut utilities = vec![Q::zero(); instance.n()];
    for (j, w) in winners.iter().enumerate() {
        if let Some(i) = *w {
            utilities[i] = instance.weight(i, j) - prices[j].clone();
        }
    }
    Outcome {
        winners,
        prices,
        utilities,
    }
}

/// Welfare of the bidders other than column `skip` when slots are matched
/// optimally against the given weights, allowing slots to stay empty.
fn others_optimum(weights: &[Vec<Q>], skip: usize) -> Q {
    let m = weights.len();
    let n = weights.first().map_or(0, Vec::len);
    let mut reduced: Vec<Vec<Q>> = Vec::with_capacity(m);
    for row in weights {
        let mut r: Vec<Q> = (0..n).filter(|&i| i != skip).map(|i| row[i].clone()).collect();
        // Virtual zero-weight columns let slots go unfilled when bidders run short.
        while r.len() < m {
            r.push(Q::zero());
        }
        reduced.push(r);
    }
    let (_, total) = assignment::max_weight_assignment(&reduced);
    total
}

/// The VCG mechanism on reported bids: welfare-maximizing assignment under
/// the scores `α_{i,j}·b_i` (ties broken toward the lexicographically
/// smallest winner sequence), each winner paying the externality her
/// presence imposes — (others' optimum without her) − (others' welfare in
/// the chosen allocation) — per impression.
pub fn run_vcg(instance: &Instance, bids: &BidProfile) -> Result<Outcome, MechanismError> {
    bids.validate(instance)?;
    let n = instance.n();
    let m = instance.m();
    let weights: Vec<Vec<Q>> = (0..m)
        .map(|j| (0..n).map(|i| instance.ctr(i, j) * bids.bid(i)).collect())
        .collect();
    let (maximizers, best) = assignment::all_max_weight_assignments(&weights);
    let chosen = maximizers
        .first()
        .expect("assignment always has a maximizer")
        .clone();
    let mut winners: Vec<Option<usize>> = vec![None; m];
    let mut prices: Vec<Q> = vec![Q::zero(); m];
    for (j, &i) in chosen.iter().enumerate() {
        let others_in_chosen = &best - &weights[j][i];
        prices[j] = others_optimum(&weights, i) - others_in_chosen;
        winners[j] = Some(i);
    }
    Ok(finish_outcome(instance, winners, prices))
}

/// The VCG result: [`run_vcg`] under truthful bids.
pub fn vcg_result(instance: &Instance) -> Outcome {
    run_vcg(instance, &BidProfile::truthful(instance))
        .expect("truthful bids are always valid")
}

/// Largest bidder count the expressive auction's exhaustive search accepts.
pub const EXPRESSIVE_MAX_BIDDERS: usize = 8;

#[derive(Clone, PartialEq, Eq)]
struct ExpressiveBest {
    revenue: Q,
    order: Vec<usize>,
    winners: Vec<Option<usize>>,
    prices: Vec<Q>,
}

impl ExpressiveBest {
    /// True if `self` beats `other`: more revenue, then lexicographically
    /// earlier sale order, then lexicographically earlier winner vector.
    fn beats(&self, other: &ExpressiveBest) -> bool {
        match self.revenue.cmp(&other.revenue) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match self.order.cmp(&other.order) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => self.winners < other.winners,
            },
        }
    }
}

/// Whether a slot can be sold when fewer than two remaining bidders name a
/// nonzero price for it.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum UnsoldRule {
    /// A slot with fewer than two nonzero remaining bids stays unsold.
    RequireTwoNonzeroBids,
    /// Sell to the highest remaining bid regardless (diagnostic only; shows
    /// why the two-nonzero-bids rule is load-bearing).
    #[allow(dead_code)]
    SellToHighestAlways,
}

/// The expressive auction: per-impression bids `b_{i,j}`, with the sale
/// order and tie resolutions chosen by exhaustive look-ahead to maximize
/// revenue (ties: lexicographically smallest order, then winner vector).
/// Returns the outcome together with the chosen order.
pub fn run_expressive_auction_with_order(
    instance: &Instance,
    bids: &ExpressiveBidProfile,
) -> Result<(Outcome, OrderOfSale), MechanismError> {
    run_expressive_with_rule(instance, bids, UnsoldRule::RequireTwoNonzeroBids)
}

/// [`run_expressive_auction_with_order`] without the order echo.
pub fn run_expressive_auction(
    instance: &Instance,
    bids: &ExpressiveBidProfile,
) -> Result<Outcome, MechanismError> {
    run_expressive_auction_with_order(instance, bids).map(|(o, _)| o)
}

pub(crate) fn run_expressive_with_rule(
    instance: &Instance,
    bids: &ExpressiveBidProfile,
    rule: UnsoldRule,
) -> Result<(Outcome, OrderOfSale), MechanismError> {
    bids.validate(instance)?;
    if instance.n() > EXPRESSIVE_MAX_BIDDERS {
        return Err(MechanismError::ExpressiveCapacity {
            max: EXPRESSIVE_MAX_BIDDERS,
            got: instance.n(),
        });
    }
    let mut memo: HashMap<(u16, u16), ExpressiveBest> = HashMap::new();
    let full_bidders: u16 = (1u16 << instance.n()) - 1;
    let full_slots: u16 = (1u16 << instance.m()) - 1;
    let best = expressive_search(instance, bids, rule, full_bidders, full_slots, &mut memo);
    let outcome = finish_outcome(instance, best.winners.clone(), best.prices.clone());
    Ok((outcome, OrderOfSale(best.order.clone())))
}

fn expressive_search(
    instance: &Instance,
    bids: &ExpressiveBidProfile,
    rule: UnsoldRule,
    bidders: u16,
    slots: u16,
    memo: &mut HashMap<(u16, u16), ExpressiveBest>,
) -> ExpressiveBest {
    if slots == 0 {
        return ExpressiveBest {
            revenue: Q::zero(),
            order: Vec::new(),
            winners: vec![None; instance.m()],
            prices: vec![Q::zero(); instance.m()],
        };
    }
    if let Some(hit) = memo.get(&(bidders, slots)) {
        return hit.clone();
    }
    let mut best: Option<ExpressiveBest> = None;
    for j in 0..instance.m() {
        if slots & (1 << j) == 0 {
            continue;
        }
        let remaining: Vec<usize> = (0..instance.n())
            .filter(|&i| bidders & (1 << i) != 0)
            .collect();
        let slot_bids: Vec<(usize, &Q)> = remaining.iter().map(|&i| (i, &bids.0[i][j])).collect();
        let nonzero = slot_bids.iter().filter(|(_, b)| !b.is_zero()).count();
        let sellable = match rule {
            UnsoldRule::RequireTwoNonzeroBids => nonzero >= 2,
            UnsoldRule::SellToHighestAlways => !remaining.is_empty(),
        };
        // Candidate moves: either the slot goes unsold, or each score-tied
        // top bidder in turn wins it at the second-highest remaining bid.
        let mut moves: Vec<(Option<usize>, Q)> = Vec::new();
        if sellable {
            let mut sorted: Vec<Q> = slot_bids.iter().map(|(_, b)| (*b).clone()).collect();
            sorted.sort_by(|a, b| b.cmp(a));
            let top = sorted[0].clone();
            let price = sorted.get(1).cloned().unwrap_or_else(Q::zero);
            for (i, b) in &slot_bids {
                if **b == top {
                    moves.push((Some(*i), price.clone()));
                }
            }
        } else {
            moves.push((None, Q::zero()));
        }
        for (winner, price) in moves {
            let next_bidders = match winner {
                Some(i) => bidders & !(1 << i),
                None => bidders,
            };
            let sub = expressive_search(instance, bids, rule, next_bidders, slots & !(1 << j), memo);
            let mut order = Vec::with_capacity(sub.order.len() + 1);
            order.push(j);
            order.extend_from_slice(&sub.order);
            let mut winners = sub.winners.clone();
            winners[j] = winner;
            let mut prices = sub.prices.clone();
            prices[j] = price.clone();
            let candidate = ExpressiveBest {
                revenue: price + sub.revenue,
                order,
                winners,
                prices,
            };
            if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                best = Some(candidate);
            }
        }
    }
    let best = best.expect("at least one slot move exists");
    memo.insert((bidders, slots), best.clone());
    best
}
