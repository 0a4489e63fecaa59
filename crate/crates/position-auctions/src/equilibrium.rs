//! Best responses, equilibrium verification and feasibility, the
//! efficient-equilibrium constructor with its two condition systems, the price
//! of anarchy, and an exhaustive grid oracle.
//!
//! Everything here treats the sequential second-price mechanism
//! ([`crate::mechanisms::run_iterated_spa`]) as the game form: a strategy is a
//! single sealed bid, outcomes are allocations plus per-impression prices, and
//! equilibrium always means pure-strategy Nash under unilateral bid changes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeError, LatticeGrid, MAX_LATTICE_PROFILES};
use crate::linear::{Constraint, Disjunction, Expr, System};
use crate::mechanisms::{run_iterated_spa, BidProfile, MechanismError, OrderOfSale, TieBreakRule};
use crate::model::{
    efficient_allocations, validate_allocation, welfare, Allocation, Instance, ModelError,
};
use crate::rational::{q, Q};

/// Linear inequality systems over bid variables, re-exported here because the
/// feasibility analysis both builds and returns them.
pub use crate::linear::System as ConstraintSystem;

/// Errors from the equilibrium analyses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquilibriumError {
    /// The analysis is only defined for two-slot instances.
    #[error("this analysis needs exactly 2 slots, got {got}")]
    WrongSlotCount { got: usize },
    /// The condition systems compare the winners against a third bidder.
    #[error("this analysis needs at least 3 bidders, got {got}")]
    NeedsThreeBidders { got: usize },
    /// A bidder index outside the instance.
    #[error("bidder {bidder} out of range; the instance has {bidders} bidders")]
    UnknownBidder { bidder: usize, bidders: usize },
    /// The instance has several welfare-maximal allocations and no explicit
    /// winner labeling was supplied.
    #[error("the efficient allocation is not unique; pass an explicit winner labeling")]
    NonUniqueEfficient { allocations: Vec<Allocation> },
    /// An explicit labeling that is not welfare-maximal.
    #[error("allocation {allocation} is not welfare-maximal")]
    NotEfficient { allocation: Allocation },
    /// The constructed bids would divide by a zero click-through rate.
    #[error(
        "the construction divides by bidder {bidder}'s rate in slot {slot}, which is zero; \
         build the instance with strict_positive_ctr"
    )]
    ZeroCtrDivision { bidder: usize, slot: usize },
    /// The grid scan would visit more profiles than the configured cap.
    #[error("grid scan too large: {profiles} profiles exceed the cap of {cap}")]
    LatticeTooLarge { profiles: u128, cap: u128 },
    /// Instance data too fine for the integer-rescaled grid scan.
    #[error("grid scan requires rescaled scores to fit 128-bit integers; the instance data are too fine")]
    LatticeOverflow,
    /// A zero grid resolution.
    #[error("grid resolution must be positive")]
    ZeroGrid,
    /// No allocation in the candidate set is attainable in equilibrium, so the
    /// worst-equilibrium welfare is undefined.
    #[error("no pure-strategy equilibrium exists without overbidding; the price of anarchy is undefined")]
    NoPureEquilibrium,
    /// An attainable allocation has zero welfare while the optimum is positive.
    #[error("an attainable allocation has zero welfare while the optimum is positive; the welfare ratio is unbounded")]
    UnboundedRatio,
    /// Invalid instance/allocation input.
    #[error(transparent)]
    Model(#[from] ModelError),
    /// Invalid bids, order of sale, or tie-break rule.
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

impl From<LatticeError> for EquilibriumError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::TooManyProfiles { profiles } => EquilibriumError::LatticeTooLarge {
                profiles,
                cap: MAX_LATTICE_PROFILES,
            },
            LatticeError::ScaleOverflow => EquilibriumError::LatticeOverflow,
            LatticeError::ZeroGrid => EquilibriumError::ZeroGrid,
        }
    }
}

/// Serialize a 0-based bidder index as 1-based.
pub(crate) mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(i: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*i as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let v = u64::deserialize(d)?;
        if v == 0 {
            return Err(serde::de::Error::custom("indices are 1-based; 0 is invalid"));
        }
        Ok(v as usize - 1)
    }
}

/// Serialize an optional 0-based slot index as 1-based or null.
pub(crate) mod one_based_slot {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(i: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
        match i {
            Some(i) => s.serialize_some(&(*i as u64 + 1)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
        let v = Option::<u64>::deserialize(d)?;
        match v {
            Some(0) => Err(serde::de::Error::custom("indices are 1-based; 0 is invalid")),
            Some(i) => Ok(Some(i as usize - 1)),
            None => Ok(None),
        }
    }
}

/// One outcome a single bidder can steer the auction into by changing only
/// their own bid, with the smallest bid found that realizes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseOption {
    /// Slot obtained (`null` when the bidder wins nothing).
    #[serde(with = "one_based_slot")]
    pub slot: Option<usize>,
    /// The smallest examined bid realizing this (slot, price) pair.
    pub bid: Q,
    /// Per-impression price paid in that slot (0 when winning nothing).
    pub price: Q,
    /// The bidder's utility under this outcome.
    pub utility: Q,
}

/// Exact best-response analysis for one bidder against fixed opponent bids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestResponseReport {
    /// The deviating bidder (1-based in JSON).
    #[serde(with = "one_based")]
    pub bidder: usize,
    /// Every attainable (slot, price) outcome, sorted by bid.
    pub attainable: Vec<ResponseOption>,
    /// The maximum utility over all own bids.
    pub best_utility: Q,
    /// The smallest examined bid attaining `best_utility`.
    pub witness_bid: Q,
}

/// Computes the exact best response of `bidder` to the other bids.
///
/// The bidder's outcome is piecewise constant in their own bid: it can only
/// change where their score crosses another bidder's score in some slot. The
/// finite candidate set therefore consists of every such crossing point
/// `ctr(j, k) · b_j / ctr(bidder, k)`, zero, the bidder's value, the midpoints
/// between consecutive candidates, and one point above the maximum (only
/// meaningful when overbidding is allowed; otherwise bids are capped at the
/// value). Each candidate is simulated exactly.
pub fn best_response(
    instance: &Instance,
    bids: &BidProfile,
    bidder: usize,
    order: &OrderOfSale,
    tie: &TieBreakRule,
    allow_overbid: bool,
) -> Result<BestResponseReport, EquilibriumError> {
    if bidder >= instance.n() {
        return Err(EquilibriumError::UnknownBidder {
            bidder: bidder + 1,
            bidders: instance.n(),
        });
    }
    // Simulate once up front so invalid bids/order/tie surface immediately.
    run_iterated_spa(instance, bids, order, tie)?;

    let value = instance.value(bidder).clone();
    let cap = (!allow_overbid).then(|| value.clone());
    let mut points: BTreeSet<Q> = BTreeSet::new();
    points.insert(Q::zero());
    points.insert(value.clone());
    for j in 0..instance.n() {
        if j == bidder {
            continue;
        }
        for k in 0..instance.m() {
            let own = instance.ctr(bidder, k);
            if own.is_zero() {
                continue;
            }
            let crossing = &(instance.ctr(j, k) * bids.bid(j)) / own;
            if cap.as_ref().is_none_or(|c| &crossing <= c) {
                points.insert(crossing);
            }
        }
    }
    let sorted: Vec<Q> = points.into_iter().collect();
    let mut candidates: Vec<Q> = Vec::with_capacity(2 * sorted.len() + 1);
    for (idx, p) in sorted.iter().enumerate() {
        candidates.push(p.clone());
        if let Some(next) = sorted.get(idx + 1) {
            candidates.push(&(p + next) * &q(1, 2));
        }
    }
    if allow_overbid {
        let last = candidates.last().expect("candidate set is never empty");
        candidates.push(last + &Q::one());
    }

    // Candidates ascend, so the first bid seen for each (slot, price) outcome
    // is the smallest one.
    let mut seen: BTreeMap<(Option<usize>, Q), ResponseOption> = BTreeMap::new();
    let mut work = bids.clone();
    for c in candidates {
        work.0[bidder] = c.clone();
        let outcome = run_iterated_spa(instance, &work, order, tie)?;
        let slot = outcome.winners.iter().position(|w| *w == Some(bidder));
        let price = slot.map_or_else(Q::zero, |j| outcome.prices[j].clone());
        let utility = outcome.utilities[bidder].clone();
        seen.entry((slot, price.clone())).or_insert(ResponseOption {
            slot,
            bid: c,
            price,
            utility,
        });
    }
    let mut attainable: Vec<ResponseOption> = seen.into_values().collect();
    attainable.sort_by(|a, b| a.bid.cmp(&b.bid));
    let best_utility = attainable
        .iter()
        .map(|o| o.utility.clone())
        .max()
        .expect("at least one candidate");
    let witness_bid = attainable
        .iter()
        .find(|o| o.utility == best_utility)
        .expect("some option attains the maximum")
        .bid
        .clone();
    Ok(BestResponseReport {
        bidder,
        attainable,
        best_utility,
        witness_bid,
    })
}

/// A strictly improving unilateral bid change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    /// The bidder who gains (1-based in JSON).
    #[serde(with = "one_based")]
    pub bidder: usize,
    /// A bid realizing the gain.
    pub bid: Q,
    /// The strict utility improvement.
    pub utility_gain: Q,
}

/// Result of an exact equilibrium check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumCheck {
    /// True iff no bidder has a strictly improving unilateral deviation.
    pub is_equilibrium: bool,
    /// A witness deviation when one exists.
    pub deviation: Option<Deviation>,
}

/// Checks whether `bids` form a pure-strategy equilibrium of the sequential
/// second-price auction: no bidder may gain strictly by changing only their
/// own bid (kept at or below value unless `allow_overbid`).
pub fn is_equilibrium(
    instance: &Instance,
    bids: &BidProfile,
    order: &OrderOfSale,
    tie: &TieBreakRule,
    allow_overbid: bool,
) -> Result<EquilibriumCheck, EquilibriumError> {
    let outcome = run_iterated_spa(instance, bids, order, tie)?;
    for i in 0..instance.n() {
        let report = best_response(instance, bids, i, order, tie, allow_overbid)?;
        if report.best_utility > outcome.utilities[i] {
            let utility_gain = &report.best_utility - &outcome.utilities[i];
            return Ok(EquilibriumCheck {
                is_equilibrium: false,
                deviation: Some(Deviation {
                    bidder: i,
                    bid: report.witness_bid,
                    utility_gain,
                }),
            });
        }
    }
    Ok(EquilibriumCheck {
        is_equilibrium: true,
        deviation: None,
    })
}

/// Which of the two alternative condition systems is satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemLabel {
    /// The system in which the slot-2 winner's bid sets the slot-1 price.
    A,
    /// The system in which some third bidder sets the slot-1 price; it may
    /// additionally require a specific tie-break.
    B,
}

impl fmt::Display for SystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemLabel::A => write!(f, "A"),
            SystemLabel::B => write!(f, "B"),
        }
    }
}

/// Exact evaluation of the fourteen inequalities under which truthful bidding
/// by the slot-1 winner makes a two-slot efficient allocation an equilibrium.
///
/// System A covers profiles where the slot-2 winner's bid is the slot-1
/// runner-up score; system B covers profiles where a third bidder's bid is.
/// `required_tiebreak` is set when system B holds with a tied slot-1 score,
/// in which case the tie must resolve toward the third bidder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// The bidder labeled as slot-1 winner (1-based in JSON).
    #[serde(with = "one_based")]
    pub slot1_winner: usize,
    /// The bidder labeled as slot-2 winner (1-based in JSON).
    #[serde(with = "one_based")]
    pub slot2_winner: usize,
    #[serde(rename = "A0")]
    pub a0: bool,
    #[serde(rename = "A1")]
    pub a1: bool,
    #[serde(rename = "A2")]
    pub a2: bool,
    #[serde(rename = "A3")]
    pub a3: bool,
    #[serde(rename = "A4")]
    pub a4: bool,
    #[serde(rename = "A5")]
    pub a5: bool,
    #[serde(rename = "A6")]
    pub a6: bool,
    #[serde(rename = "B0")]
    pub b0: bool,
    #[serde(rename = "B1")]
    pub b1: bool,
    #[serde(rename = "B2")]
    pub b2: bool,
    #[serde(rename = "B3")]
    pub b3: bool,
    #[serde(rename = "B4")]
    pub b4: bool,
    #[serde(rename = "B5")]
    pub b5: bool,
    #[serde(rename = "B6")]
    pub b6: bool,
    /// The fully satisfied system, preferring A when both hold.
    pub satisfied_system: Option<SystemLabel>,
    /// Present when system B holds only under a specific slot-1 tie-break.
    pub required_tiebreak: Option<String>,
}

impl ConditionReport {
    /// The A conditions as an array `[A0, …, A6]`.
    pub fn a(&self) -> [bool; 7] {
        [
            self.a0, self.a1, self.a2, self.a3, self.a4, self.a5, self.a6,
        ]
    }

    /// The B conditions as an array `[B0, …, B6]`.
    pub fn b(&self) -> [bool; 7] {
        [
            self.b0, self.b1, self.b2, self.b3, self.b4, self.b5, self.b6,
        ]
    }
}

/// Evaluates the equilibrium condition systems at `bids`, labeling the winners
/// by the lexicographically smallest welfare-maximal allocation.
///
/// Requires two slots and at least three bidders.
pub fn check_efficient_eq_conditions(
    instance: &Instance,
    bids: &BidProfile,
) -> Result<ConditionReport, EquilibriumError> {
    check_shape_for_conditions(instance)?;
    let alloc = efficient_allocations(instance).allocations[0].clone();
    conditions_for(instance, bids, &alloc)
}

/// Like [`check_efficient_eq_conditions`] with an explicit winner labeling,
/// which must itself be welfare-maximal.
pub fn check_efficient_eq_conditions_with_winners(
    instance: &Instance,
    bids: &BidProfile,
    allocation: &Allocation,
) -> Result<ConditionReport, EquilibriumError> {
    check_shape_for_conditions(instance)?;
    require_efficient(instance, allocation)?;
    conditions_for(instance, bids, allocation)
}

fn check_shape_for_conditions(instance: &Instance) -> Result<(), EquilibriumError> {
    if instance.m() != 2 {
        return Err(EquilibriumError::WrongSlotCount { got: instance.m() });
    }
    if instance.n() < 3 {
        return Err(EquilibriumError::NeedsThreeBidders { got: instance.n() });
    }
    Ok(())
}

/// Errors unless `allocation` is welfare-maximal.
fn require_efficient(instance: &Instance, allocation: &Allocation) -> Result<(), EquilibriumError> {
    let w = welfare(instance, allocation)?;
    if w != efficient_allocations(instance).max_welfare {
        return Err(EquilibriumError::NotEfficient {
            allocation: allocation.clone(),
        });
    }
    Ok(())
}

fn conditions_for(
    instance: &Instance,
    bids: &BidProfile,
    alloc: &Allocation,
) -> Result<ConditionReport, EquilibriumError> {
    bids.validate(instance)?;
    let l1 = alloc.0[0];
    let l2 = alloc.0[1];
    let others: Vec<usize> = (0..instance.n()).filter(|i| *i != l1 && *i != l2).collect();

    let a11 = instance.ctr(l1, 0);
    let a12 = instance.ctr(l1, 1);
    let a21 = instance.ctr(l2, 0);
    let a22 = instance.ctr(l2, 1);
    let v1 = instance.value(l1);
    let v2 = instance.value(l2);
    let b2 = bids.bid(l2);

    // Highest competing slot-1 bid score, slot-2 bid score, and slot-2 value
    // score among the non-winners.
    let score1 = |i: usize| instance.ctr(i, 0) * bids.bid(i);
    let score2 = |i: usize| instance.ctr(i, 1) * bids.bid(i);
    let max1 = others.iter().map(|&i| score1(i)).max().expect("n >= 3");
    let max2 = others.iter().map(|&i| score2(i)).max().expect("n >= 3");
    let max2v = others
        .iter()
        .map(|&i| instance.weight(i, 1))
        .max()
        .expect("n >= 3");

    let s21 = a21 * b2; // slot-1 score of the slot-2 winner
    let s22 = a22 * b2; // slot-2 score of the slot-2 winner
    let top1 = a11 * v1; // slot-1 score of a truthful slot-1 winner

    let a0 = s21 >= max1;
    let a1 = s21 < top1;
    let a2 = s22 > max2;
    let a3 = max2 >= &s21 - &(&(a11 - a12) * v1);
    let a4 = s22 >= max2v;
    let a5 = max2 <= &top1 - &(&(a21 - a22) * v2);
    let a6 = max2 <= a22 * v2;

    let b0 = max1 >= s21;
    let b1 = max1 < top1;
    let b3 = max1 <= &s22 + &(&(a11 - a12) * v1);

    let all_a = a0 && a1 && a2 && a3 && a4 && a5 && a6;
    let all_b = b0 && b1 && a2 && b3 && a4 && a5 && a6;
    let satisfied_system = if all_a {
        Some(SystemLabel::A)
    } else if all_b {
        Some(SystemLabel::B)
    } else {
        None
    };
    let required_tiebreak = if all_b && s21 == max1 {
        let rival = others
            .iter()
            .copied()
            .find(|&i| score1(i) == max1)
            .expect("some competitor attains the maximum");
        Some(format!(
            "if bidder {} drops out of the slot-1 tie at score {}, slot 1 must go to bidder {}",
            l1 + 1,
            max1,
            rival + 1
        ))
    } else {
        None
    };

    Ok(ConditionReport {
        slot1_winner: l1,
        slot2_winner: l2,
        a0,
        a1,
        a2,
        a3,
        a4,
        a5,
        a6,
        b0,
        b1,
        b2: a2,
        b3,
        b4: a4,
        b5: a5,
        b6: a6,
        satisfied_system,
        required_tiebreak,
    })
}

/// Which construction produced an efficient equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstructionCase {
    /// Two bidders only: the winner bids their value, the other bids zero.
    TwoBidders,
    /// The slot-2 winner's click ratio weakly dominates the third bidder's;
    /// any fixed priority works, and the winners are prioritized.
    A,
    /// The third bidder's click ratio strictly dominates; ties must resolve
    /// by highest click ratio.
    B,
}

/// An efficient-equilibrium construction: bids, the tie-break rule they rely
/// on, and the allocation they realize.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfficientEqConstruction {
    pub bids: BidProfile,
    pub tie: TieBreakRule,
    pub allocation: Allocation,
    pub case: ConstructionCase,
}

/// Constructs bids without overbidding that make the unique efficient
/// allocation of a two-slot instance an equilibrium, together with a tie-break
/// rule under which they work.
///
/// Errors with [`EquilibriumError::NonUniqueEfficient`] when several
/// allocations are welfare-maximal; use
/// [`construct_efficient_eq_with_winners`] to fix a labeling in that case.
pub fn construct_efficient_eq(
    instance: &Instance,
) -> Result<EfficientEqConstruction, EquilibriumError> {
    if instance.m() != 2 {
        return Err(EquilibriumError::WrongSlotCount { got: instance.m() });
    }
    let eff = efficient_allocations(instance);
    if !eff.unique {
        return Err(EquilibriumError::NonUniqueEfficient {
            allocations: eff.allocations,
        });
    }
    construct_for(instance, eff.allocations.into_iter().next().expect("nonempty"))
}

/// Like [`construct_efficient_eq`] with an explicit welfare-maximal winner
/// labeling (slot-1 winner first).
pub fn construct_efficient_eq_with_winners(
    instance: &Instance,
    allocation: &Allocation,
) -> Result<EfficientEqConstruction, EquilibriumError> {
    if instance.m() != 2 {
        return Err(EquilibriumError::WrongSlotCount { got: instance.m() });
    }
    require_efficient(instance, allocation)?;
    construct_for(instance, allocation.clone())
}

fn construct_for(
    instance: &Instance,
    alloc: Allocation,
) -> Result<EfficientEqConstruction, EquilibriumError> {
    let n = instance.n();
    let l1 = alloc.0[0];
    let l2 = alloc.0[1];
    let mut bids = vec![Q::zero(); n];
    bids[l1] = instance.value(l1).clone();

    if n == 2 {
        // With no third bidder the slot-2 price is zero and (value, 0) is
        // already an equilibrium: the loser cannot profitably take slot 1 at
        // the winner's truthful score, by efficiency of the allocation.
        return Ok(EfficientEqConstruction {
            bids: BidProfile(bids),
            tie: TieBreakRule::PriorityOrder(vec![l1, l2]),
            allocation: alloc,
            case: ConstructionCase::TwoBidders,
        });
    }

    // The strongest remaining competitor for slot 2 by value score.
    let l3 = argmax_weight(instance, 1, &[l1, l2]).expect("n >= 3");
    let a21 = instance.ctr(l2, 0);
    let a22 = instance.ctr(l2, 1);
    let a31 = instance.ctr(l3, 0);
    let a32 = instance.ctr(l3, 1);
    let v2 = instance.value(l2);
    let v3 = instance.value(l3);

    // Compare click ratios by cross-multiplication: a21/a22 >= a31/a32.
    if &(a21 * a32) >= &(a31 * a22) {
        if a21.is_zero() {
            return Err(EquilibriumError::ZeroCtrDivision {
                bidder: l2 + 1,
                slot: 1,
            });
        }
        // The slot-2 winner bids high enough that undercutting them never
        // pays for the slot-1 winner; the third bidder bids their value.
        bids[l2] = &(&(a32 * v3) + &(&(a21 - a22) * v2)) / a21;
        bids[l3] = v3.clone();
        let mut priority = vec![l1, l2, l3];
        let rest: Vec<usize> = (0..n).filter(|i| !priority.contains(i)).collect();
        priority.extend(rest);
        Ok(EfficientEqConstruction {
            bids: BidProfile(bids),
            tie: TieBreakRule::PriorityOrder(priority),
            allocation: alloc,
            case: ConstructionCase::A,
        })
    } else {
        // Here a31 > 0 and a22 > 0 follow from the strict ratio comparison.
        bids[l2] = &(a32 * v3) / a22;
        bids[l3] = &(&(a21 * v3) / a22) * &(&a32.clone() / a31);
        Ok(EfficientEqConstruction {
            bids: BidProfile(bids),
            tie: TieBreakRule::HighestClickRatio {
                residual_priority: (0..n).collect(),
            },
            allocation: alloc,
            case: ConstructionCase::B,
        })
    }
}

/// Smallest bidder outside `exclude` maximizing `ctr(i, slot) · value(i)`.
fn argmax_weight(instance: &Instance, slot: usize, exclude: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, Q)> = None;
    for i in 0..instance.n() {
        if exclude.contains(&i) {
            continue;
        }
        let w = instance.weight(i, slot);
        if best.as_ref().is_none_or(|(_, bw)| &w > bw) {
            best = Some((i, w));
        }
    }
    best.map(|(i, _)| i)
}

/// A feasibility witness: bids plus the tie-break rule under which they make
/// the target allocation an equilibrium.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityWitness {
    pub bids: BidProfile,
    pub tie: TieBreakRule,
}

/// Result of the allocation-feasibility decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// True iff some bids and supported tie-break rule make the allocation an
    /// equilibrium outcome.
    pub feasible: bool,
    /// An exact witness when feasible.
    pub witness: Option<FeasibilityWitness>,
}

/// Decides whether a two-slot allocation `(x, y)` is attainable as an
/// equilibrium outcome for some bids (capped at values unless
/// `allow_overbid`) and some supported tie-break rule.
///
/// The decision enumerates which bidder sets each slot price, assembles the
/// equilibrium conditions of every case as a linear system with strict and
/// weak inequalities over the bids, and solves each system exactly by
/// Fourier–Motzkin elimination. Any witness found is re-simulated and
/// confirmed with [`is_equilibrium`] before being returned.
pub fn equilibrium_feasible(
    instance: &Instance,
    alloc: &Allocation,
    allow_overbid: bool,
) -> Result<FeasibilityReport, EquilibriumError> {
    if instance.m() != 2 {
        return Err(EquilibriumError::WrongSlotCount { got: instance.m() });
    }
    validate_allocation(instance, alloc)?;
    let x = alloc.0[0];
    let y = alloc.0[1];
    let others: Vec<usize> = (0..instance.n()).filter(|i| *i != x && *i != y).collect();

    // Branch over the slot-1 runner-up (y or any other bidder) and, when a
    // third party exists, over the slot-2 price setter.
    let mut runner_ups = vec![y];
    runner_ups.extend(others.iter().copied());
    for z1 in runner_ups {
        let setters: Vec<Option<usize>> = if others.is_empty() {
            vec![None]
        } else {
            others.iter().copied().map(Some).collect()
        };
        for z2 in setters {
            if let Some(witness) = feasibility_branch(instance, alloc, x, y, z1, z2, allow_overbid)? {
                return Ok(FeasibilityReport {
                    feasible: true,
                    witness: Some(witness),
                });
            }
        }
    }
    Ok(FeasibilityReport {
        feasible: false,
        witness: None,
    })
}

/// Tries one price-setter case: `z1` is the slot-1 runner-up (possibly `y`)
/// and `z2`, when present, sets the slot-2 price. Returns a verified witness
/// on success.
#[allow(clippy::too_many_arguments)]
fn feasibility_branch(
    instance: &Instance,
    alloc: &Allocation,
    x: usize,
    y: usize,
    z1: usize,
    z2: Option<usize>,
    allow_overbid: bool,
) -> Result<Option<FeasibilityWitness>, EquilibriumError> {
    let n = instance.n();
    let others: Vec<usize> = (0..n).filter(|i| *i != x && *i != y).collect();
    let a = |i: usize, j: usize| instance.ctr(i, j).clone();
    let v = |i: usize| instance.value(i).clone();
    let s = |i: usize| Expr::term(n, i, a(i, 0)); // slot-1 score
    let t = |i: usize| Expr::term(n, i, a(i, 1)); // slot-2 score
    let lit = |c: Q| Expr::lit(n, c);

    let mut sys = System::new(n);
    // Bid bounds.
    for i in 0..n {
        sys.push(Expr::var(n, i).ge(&lit(Q::zero())));
        if !allow_overbid {
            sys.push(Expr::var(n, i).le(&lit(v(i))));
        }
    }
    // x tops slot 1 (ties resolve toward x under the constructed priority).
    for i in 0..n {
        if i != x {
            sys.push(s(x).ge(&s(i)));
        }
    }
    // z1 is the runner-up: no one else (except x) scores above z1 on slot 1.
    for i in 0..n {
        if i != x && i != z1 {
            sys.push(s(z1).ge(&s(i)));
        }
    }
    // y tops slot 2 among the remaining bidders. When the runner-up is a
    // third party it sits above y in the constructed priority, so y must beat
    // it strictly; everyone else is below y.
    if z1 != y {
        sys.push(t(y).gt(&t(z1)));
    }
    for &u in &others {
        if u != z1 {
            sys.push(t(y).ge(&t(u)));
        }
    }
    // The slot-2 price: z2's score, or zero with no third party.
    let p2 = match z2 {
        Some(z) => {
            for &u in &others {
                if u != z {
                    sys.push(t(z).ge(&t(u)));
                }
            }
            t(z)
        }
        None => Expr::zero(n),
    };
    // Individual rationality of the winners at the realized prices.
    sys.push(s(z1).le(&lit(a(x, 0) * v(x))));
    sys.push(p2.le(&lit(a(y, 1) * v(y))));
    // Losers cannot profitably take slot 1 at x's score.
    for &u in &others {
        sys.push(s(x).ge(&lit(a(u, 0) * v(u))));
    }

    let mut disjunctions: Vec<Disjunction> = Vec::new();
    // x must not gain by conceding slot 1 and taking slot 2. `threat` is the
    // slot-2 price x would face after the runner-up takes slot 1.
    let threat = if z1 == y { p2.clone() } else { t(y) };
    {
        let profit_block = threat
            .plus(&lit(&(&a(x, 0) - &a(x, 1)) * &v(x)))
            .ge(&s(z1));
        let unreachable = threat.scaled(&a(x, 0)).ge(&s(z1).scaled(&a(x, 1)));
        disjunctions.push(Disjunction {
            cases: vec![vec![profit_block], vec![unreachable]],
        });
    }
    // y must not gain by outbidding x for slot 1 (paying x's score).
    {
        let mut cases: Vec<Vec<Constraint>> = Vec::new();
        cases.push(vec![s(x)
            .minus(&lit(&(&a(y, 0) - &a(y, 1)) * &v(y)))
            .ge(&p2)]);
        if !allow_overbid {
            cases.push(vec![s(x).ge(&lit(a(y, 0) * v(y)))]);
        }
        if allow_overbid && a(y, 0).is_zero() {
            // y can never outscore x on slot 1; nothing to block.
        } else {
            disjunctions.push(Disjunction { cases });
        }
    }
    // No loser may gain by taking slot 2 from y. The runner-up would win a
    // slot-2 tie against y (it sits above y in the constructed priority), so
    // its unreachability condition is strict.
    for &u in &others {
        let profit_block = t(y).ge(&lit(a(u, 1) * v(u)));
        let unreachable = if u == z1 {
            t(y).scaled(&a(u, 0)).gt(&s(x).scaled(&a(u, 1)))
        } else {
            t(y).scaled(&a(u, 0)).ge(&s(x).scaled(&a(u, 1)))
        };
        disjunctions.push(Disjunction {
            cases: vec![vec![profit_block], vec![unreachable]],
        });
    }

    let Some(solution) = crate::linear::solve_with_disjunctions(&sys, &disjunctions) else {
        return Ok(None);
    };

    // Constructed priority: x first, then the runner-up, then y, then the rest.
    let mut priority = vec![x];
    if z1 != y {
        priority.push(z1);
    }
    priority.push(y);
    priority.extend(others.iter().copied().filter(|&u| u != z1));
    let tie = TieBreakRule::PriorityOrder(priority);
    let bids = BidProfile(solution);
    let order = OrderOfSale::best_to_worst(2);

    // Confirm the witness end to end before reporting feasibility.
    let outcome = run_iterated_spa(instance, &bids, &order, &tie)?;
    let realized = outcome.winners == alloc.0.iter().map(|&w| Some(w)).collect::<Vec<_>>();
    let confirmed = realized
        && is_equilibrium(instance, &bids, &order, &tie, allow_overbid)?.is_equilibrium;
    if !confirmed {
        debug_assert!(
            false,
            "feasibility witness failed re-verification for allocation {alloc} \
             (runner-up {z1}, price setter {z2:?})"
        );
        return Ok(None);
    }
    Ok(Some(FeasibilityWitness { bids, tie }))
}

/// One inefficient allocation that could be an equilibrium outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoACandidate {
    pub allocation: Allocation,
    pub welfare: Q,
    /// Whether the allocation is attainable in equilibrium without
    /// overbidding.
    pub attainable: bool,
    pub witness: Option<FeasibilityWitness>,
}

/// Exact price of anarchy of a two-slot instance over pure equilibria without
/// overbidding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoAReport {
    pub efficient_allocation: Allocation,
    pub efficient_welfare: Q,
    pub efficient_attainable: bool,
    /// The only two allocations that can be inefficient equilibrium outcomes:
    /// the strongest slot-1 rival above the slot-1 winner demoted to slot 2,
    /// and the slot-2 winner promoted above the strongest slot-2 rival.
    pub candidates: Vec<PoACandidate>,
    /// Worst-case ratio of optimal welfare to attainable equilibrium welfare.
    pub poa: Q,
}

/// Computes the exact price of anarchy of a two-slot instance.
///
/// Only three allocations can be pure equilibrium outcomes without
/// overbidding: the efficient one and the two candidates described on
/// [`PoAReport`]. Every candidate is tested with [`equilibrium_feasible`] and
/// the worst welfare ratio over the attainable ones is returned.
pub fn price_of_anarchy(instance: &Instance) -> Result<PoAReport, EquilibriumError> {
    if instance.m() != 2 {
        return Err(EquilibriumError::WrongSlotCount { got: instance.m() });
    }
    let eff = efficient_allocations(instance);
    let alloc = eff.allocations[0].clone();
    let l1 = alloc.0[0];
    let l2 = alloc.0[1];
    let w_eff = eff.max_welfare.clone();

    let j = argmax_weight(instance, 0, &[l1]).expect("m <= n gives n >= 2");
    let k = argmax_weight(instance, 1, &[l2]).expect("m <= n gives n >= 2");
    let candidate_allocs = [Allocation(vec![j, l1]), Allocation(vec![l2, k])];

    let eff_report = equilibrium_feasible(instance, &alloc, false)?;
    let mut ratios: Vec<Q> = Vec::new();
    if eff_report.feasible {
        ratios.push(Q::one());
    }
    let mut candidates = Vec::new();
    for cand in candidate_allocs {
        let report = equilibrium_feasible(instance, &cand, false)?;
        let w = welfare(instance, &cand)?;
        if report.feasible {
            if w.is_zero() {
                if w_eff.is_zero() {
                    ratios.push(Q::one());
                } else {
                    return Err(EquilibriumError::UnboundedRatio);
                }
            } else {
                ratios.push(&w_eff / &w);
            }
        }
        candidates.push(PoACandidate {
            allocation: cand,
            welfare: w,
            attainable: report.feasible,
            witness: report.witness,
        });
    }
    let Some(poa) = ratios.into_iter().max() else {
        return Err(EquilibriumError::NoPureEquilibrium);
    };
    Ok(PoAReport {
        efficient_allocation: alloc,
        efficient_welfare: w_eff,
        efficient_attainable: eff_report.feasible,
        candidates,
        poa,
    })
}

/// Exhaustively lists the exact equilibria among grid bid profiles, where
/// every bid is a multiple of `v_max / grid` (truncated at each bidder's
/// value unless `allow_overbid`).
///
/// Each profile is first screened by the integer fast path for immunity to
/// on-grid deviations, then confirmed against exact real-valued best
/// responses; every returned profile passes [`is_equilibrium`]. An empty
/// result certifies that no grid profile is an exact equilibrium. Off-grid
/// profiles are out of scope, so an empty result never proves that no
/// equilibrium exists at all.
pub fn brute_force_equilibria(
    instance: &Instance,
    grid: u32,
    order: &OrderOfSale,
    tie: &TieBreakRule,
    allow_overbid: bool,
) -> Result<Vec<BidProfile>, EquilibriumError> {
    let mut confirmed = Vec::new();
    for bids in grid_immune_profiles(instance, grid, order, tie, allow_overbid)? {
        if is_equilibrium(instance, &bids, order, tie, allow_overbid)?.is_equilibrium {
            confirmed.push(bids);
        }
    }
    Ok(confirmed)
}

/// Lists the grid profiles that are immune to on-grid deviations only — the
/// raw lattice notion, a superset of [`brute_force_equilibria`].
///
/// A profitable deviation can sit strictly between grid points, so a profile
/// listed here need not be an exact equilibrium; the gap between this list
/// and [`brute_force_equilibria`] is exactly the set of such artifacts.
/// Exposed for oracle-consistency diagnostics.
pub fn grid_immune_profiles(
    instance: &Instance,
    grid: u32,
    order: &OrderOfSale,
    tie: &TieBreakRule,
    allow_overbid: bool,
) -> Result<Vec<BidProfile>, EquilibriumError> {
    order.validate(instance.m())?;
    tie.validate(instance)?;
    let lattice = LatticeGrid::new(instance, grid, order, tie, allow_overbid)?;
    let mut found = Vec::new();
    lattice.scan(|bids| {
        found.push(bids);
        true
    })?;
    Ok(found)
}

/// Scans the bid grid for a profile that passes the exact
/// (continuous-deviation) equilibrium check, returning the first one found.
///
/// Grid immunity is necessary but not sufficient for exact equilibrium — a
/// profitable deviation can sit strictly between grid points — so this first
/// filters profiles through the fast integer grid scan and then refutes each
/// survivor with [`is_equilibrium`]. A `None` therefore certifies that no
/// grid profile is an exact equilibrium (off-grid profiles are out of scope).
pub fn exact_equilibrium_on_grid(
    instance: &Instance,
    grid: u32,
    order: &OrderOfSale,
    tie: &TieBreakRule,
    allow_overbid: bool,
) -> Result<Option<BidProfile>, EquilibriumError> {
    order.validate(instance.m())?;
    tie.validate(instance)?;
    let lattice = LatticeGrid::new(instance, grid, order, tie, allow_overbid)?;
    let mut confirmed: Option<BidProfile> = None;
    let mut failure: Option<EquilibriumError> = None;
    lattice.scan(|bids| match is_equilibrium(instance, &bids, order, tie, allow_overbid) {
        Ok(check) if check.is_equilibrium => {
            confirmed = Some(bids);
            false
        }
        Ok(_) => true,
        Err(e) => {
            failure = Some(e);
            false
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(confirmed),
    }
}

/// Early-exit variant of [`brute_force_equilibria`]: returns the first grid
/// equilibrium found, or `None` after a complete scan.
pub fn lattice_equilibrium_exists(
    instance: &Instance,
    grid: u32,
    order: &OrderOfSale,
    tie: &TieBreakRule,
    allow_overbid: bool,
) -> Result<Option<BidProfile>, EquilibriumError> {
    order.validate(instance.m())?;
    tie.validate(instance)?;
    let lattice = LatticeGrid::new(instance, grid, order, tie, allow_overbid)?;
    let mut found = None;
    lattice.scan(|bids| {
        found = Some(bids);
        false
    })?;
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;
    use crate::showcase::{poa_family, table1};

    fn order2() -> OrderOfSale {
        OrderOfSale::best_to_worst(2)
    }

    fn favor_third() -> TieBreakRule {
        TieBreakRule::PriorityOrder(vec![2, 0, 1])
    }

    fn favor_second() -> TieBreakRule {
        TieBreakRule::PriorityOrder(vec![1, 2, 0])
    }

    fn showcase_bids() -> BidProfile {
        BidProfile(vec![qi(1), q(2, 5), qi(1)])
    }

    #[test]
    fn best_response_keeps_slot_one_when_ties_favor_the_third_bidder() {
        let inst = table1();
        let report = best_response(&inst, &showcase_bids(), 0, &order2(), &favor_third(), false)
            .unwrap();
        assert_eq!(report.best_utility, q(3, 5));
        // Keeping slot 1 at price 2/5 is among the attainable outcomes.
        assert!(report
            .attainable
            .iter()
            .any(|o| o.slot == Some(0) && o.price == q(2, 5) && o.utility == q(3, 5)));
        // Conceding the top slot wins nothing: the third bidder takes slot 1
        // and the second keeps slot 2, so underbidding is never profitable.
        assert!(report
            .attainable
            .iter()
            .any(|o| o.slot.is_none() && o.utility.is_zero()));
    }

    #[test]
    fn best_response_finds_the_demotion_deviation_when_ties_favor_the_second_bidder() {
        let inst = table1();
        let report = best_response(&inst, &showcase_bids(), 0, &order2(), &favor_second(), false)
            .unwrap();
        // Bidding inside (1/5, 2/5) yields slot 2 at price 1/5: utility 4/5.
        assert_eq!(report.best_utility, q(4, 5));
        assert!(report
            .attainable
            .iter()
            .any(|o| o.slot == Some(1) && o.price == q(1, 5) && o.utility == q(4, 5)));
        assert_eq!(report.witness_bid, q(3, 10));
    }

    #[test]
    fn lone_bidder_always_earns_the_top_slot_weight() {
        let inst = Instance::new(vec![qi(3)], vec![vec![q(1, 2)]]).unwrap();
        let report = best_response(
            &inst,
            &BidProfile(vec![qi(2)]),
            0,
            &OrderOfSale::best_to_worst(1),
            &TieBreakRule::natural_priority(1),
            false,
        )
        .unwrap();
        assert_eq!(report.best_utility, q(3, 2));
        assert!(report.attainable.iter().all(|o| o.price.is_zero()));
    }

    #[test]
    fn equilibrium_verdict_depends_on_the_tie_break() {
        let inst = table1();
        let good = is_equilibrium(&inst, &showcase_bids(), &order2(), &favor_third(), false)
            .unwrap();
        assert!(good.is_equilibrium);
        assert!(good.deviation.is_none());

        let bad = is_equilibrium(&inst, &showcase_bids(), &order2(), &favor_second(), false)
            .unwrap();
        assert!(!bad.is_equilibrium);
        let dev = bad.deviation.unwrap();
        assert_eq!(dev.bidder, 0);
        assert_eq!(dev.utility_gain, q(1, 5));
    }

    #[test]
    fn two_bidder_construction_is_truthful_top_bid_and_zero() {
        let inst = Instance::new(
            vec![qi(2), qi(1)],
            vec![vec![qi(1), q(1, 2)], vec![qi(1), q(1, 2)]],
        )
        .unwrap();
        let built = construct_efficient_eq(&inst).unwrap();
        assert_eq!(built.case, ConstructionCase::TwoBidders);
        assert_eq!(built.bids, BidProfile(vec![qi(2), Q::zero()]));
        assert_eq!(built.allocation, Allocation(vec![0, 1]));
        let check = is_equilibrium(&inst, &built.bids, &order2(), &built.tie, false).unwrap();
        assert!(check.is_equilibrium);
    }

    #[test]
    fn showcase_instance_requires_an_explicit_labeling_and_rebuilds_its_bids() {
        let inst = table1();
        let err = construct_efficient_eq(&inst).unwrap_err();
        assert!(matches!(err, EquilibriumError::NonUniqueEfficient { ref allocations }
            if allocations.len() == 2));

        let built =
            construct_efficient_eq_with_winners(&inst, &Allocation(vec![0, 1])).unwrap();
        assert_eq!(built.case, ConstructionCase::B);
        assert_eq!(built.bids, showcase_bids());
        assert!(matches!(built.tie, TieBreakRule::HighestClickRatio { .. }));
        let check = is_equilibrium(&inst, &built.bids, &order2(), &built.tie, false).unwrap();
        assert!(check.is_equilibrium);
        let outcome = run_iterated_spa(&inst, &built.bids, &order2(), &built.tie).unwrap();
        assert_eq!(outcome.winners, vec![Some(0), Some(1)]);
    }

    #[test]
    fn proportional_rates_build_through_the_priority_case() {
        let inst = Instance::new(
            vec![qi(3), qi(2), qi(1)],
            vec![
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(1, 2)],
            ],
        )
        .unwrap();
        let built = construct_efficient_eq(&inst).unwrap();
        assert_eq!(built.case, ConstructionCase::A);
        assert_eq!(built.bids, BidProfile(vec![qi(3), q(3, 2), qi(1)]));
        assert_eq!(built.tie, TieBreakRule::PriorityOrder(vec![0, 1, 2]));
        let check = is_equilibrium(&inst, &built.bids, &order2(), &built.tie, false).unwrap();
        assert!(check.is_equilibrium);
        let outcome = run_iterated_spa(&inst, &built.bids, &order2(), &built.tie).unwrap();
        assert_eq!(outcome.winners, vec![Some(0), Some(1)]);
    }

    #[test]
    fn construction_rejects_a_zero_rate_divisor() {
        // The slot-2 winner has an all-zero row, so the priority-case bid
        // formula would divide by zero.
        let inst = Instance::new(
            vec![qi(3), qi(2), qi(1)],
            vec![
                vec![qi(1), qi(1)],
                vec![qi(0), qi(0)],
                vec![qi(0), qi(0)],
            ],
        )
        .unwrap();
        // (1, 2) is the unique maximizer up to ties among zero rows; fix it.
        let err = construct_efficient_eq_with_winners(&inst, &Allocation(vec![0, 1]))
            .unwrap_err();
        assert_eq!(
            err,
            EquilibriumError::ZeroCtrDivision {
                bidder: 2,
                slot: 1
            }
        );
    }

    #[test]
    fn condition_systems_on_the_showcase_bids_hold_through_system_b() {
        let inst = table1();
        let report = check_efficient_eq_conditions(&inst, &showcase_bids()).unwrap();
        assert_eq!((report.slot1_winner, report.slot2_winner), (0, 1));
        assert_eq!(report.b(), [true; 7]);
        // The slot-2 winner's bid cannot cover the price gap, so system A
        // fails exactly at its third condition.
        assert_eq!(
            report.a(),
            [true, true, true, false, true, true, true]
        );
        assert_eq!(report.satisfied_system, Some(SystemLabel::B));
        let note = report.required_tiebreak.unwrap();
        assert!(note.contains("bidder 3"), "unexpected note: {note}");
    }

    #[test]
    fn all_zero_bids_fail_the_strict_conditions() {
        let inst = table1();
        let report =
            check_efficient_eq_conditions(&inst, &BidProfile(vec![Q::zero(); 3])).unwrap();
        assert!(report.a1);
        assert!(!report.a2);
        assert!(!report.b2);
        assert_eq!(report.satisfied_system, None);
        assert!(report.required_tiebreak.is_none());
    }

    #[test]
    fn condition_check_rejects_wrong_shapes() {
        let one_slot = Instance::new(
            vec![qi(1), qi(1), qi(1)],
            vec![vec![qi(1)], vec![qi(1)], vec![qi(1)]],
        )
        .unwrap();
        assert!(matches!(
            check_efficient_eq_conditions(&one_slot, &BidProfile(vec![Q::zero(); 3])),
            Err(EquilibriumError::WrongSlotCount { got: 1 })
        ));
        let two_bidders = Instance::new(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), qi(1)], vec![qi(1), qi(1)]],
        )
        .unwrap();
        assert!(matches!(
            check_efficient_eq_conditions(&two_bidders, &BidProfile(vec![Q::zero(); 2])),
            Err(EquilibriumError::NeedsThreeBidders { got: 2 })
        ));
    }

    #[test]
    fn both_orderings_of_the_near_tied_family_are_attainable() {
        let inst = poa_family(&q(1, 10)).unwrap();
        // The inverted allocation is an equilibrium outcome…
        let inverted = equilibrium_feasible(&inst, &Allocation(vec![1, 0]), false).unwrap();
        assert!(inverted.feasible);
        let witness = inverted.witness.unwrap();
        let check =
            is_equilibrium(&inst, &witness.bids, &order2(), &witness.tie, false).unwrap();
        assert!(check.is_equilibrium);
        // …and so are the exact bids (0, 1) under a priority favoring the
        // second bidder.
        let tie = TieBreakRule::PriorityOrder(vec![1, 0]);
        let direct = is_equilibrium(
            &inst,
            &BidProfile(vec![Q::zero(), qi(1)]),
            &order2(),
            &tie,
            false,
        )
        .unwrap();
        assert!(direct.is_equilibrium);

        // The efficient allocation is attainable too, e.g. with bids (1, 1/10).
        let efficient = equilibrium_feasible(&inst, &Allocation(vec![0, 1]), false).unwrap();
        assert!(efficient.feasible);
        let tie = TieBreakRule::PriorityOrder(vec![0, 1]);
        let direct = is_equilibrium(
            &inst,
            &BidProfile(vec![qi(1), q(1, 10)]),
            &order2(),
            &tie,
            false,
        )
        .unwrap();
        assert!(direct.is_equilibrium);
    }

    #[test]
    fn slot_two_underdog_with_a_stronger_bystander_is_infeasible() {
        // Slot 2 goes to a bidder whose slot-2 weight 1/2 is strictly below
        // the unallocated bidder's 1; that bidder blocks every supporting bid
        // profile.
        let inst = Instance::new(
            vec![qi(2), qi(1), qi(2)],
            vec![
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(1, 2)],
            ],
        )
        .unwrap();
        let report = equilibrium_feasible(&inst, &Allocation(vec![0, 1]), false).unwrap();
        assert!(!report.feasible);
        assert!(report.witness.is_none());
    }

    #[test]
    fn near_tied_family_reaches_the_published_anarchy_ratio() {
        let inst = poa_family(&q(1, 10)).unwrap();
        let report = price_of_anarchy(&inst).unwrap();
        assert_eq!(report.efficient_welfare, q(9, 5));
        assert!(report.efficient_attainable);
        assert_eq!(report.poa, q(18, 11));
        // Both candidate rows are the inverted allocation here and attainable.
        for cand in &report.candidates {
            assert_eq!(cand.allocation, Allocation(vec![1, 0]));
            assert!(cand.attainable);
            assert_eq!(cand.welfare, q(11, 10));
        }
    }

    #[test]
    fn interchangeable_bidders_have_no_anarchy_gap() {
        let inst = Instance::new(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), qi(1)], vec![qi(1), qi(1)]],
        )
        .unwrap();
        let report = price_of_anarchy(&inst).unwrap();
        assert_eq!(report.poa, Q::one());
    }

    #[test]
    fn grid_scan_separates_the_tie_rules_that_support_equilibria() {
        let inst = table1();
        // Ranking the steep-dropoff bidder (index 2) below both rivals kills
        // every pure equilibrium. The grid scan alone still reports immunity
        // artifacts — their profitable deviations sit strictly between grid
        // points — but the exact checker refutes every one of them.
        for last in [vec![0, 1, 2], vec![1, 0, 2]] {
            let tie = TieBreakRule::PriorityOrder(last);
            let immune = grid_immune_profiles(&inst, 20, &order2(), &tie, false).unwrap();
            assert!(!immune.is_empty());
            assert!(brute_force_equilibria(&inst, 20, &order2(), &tie, false)
                .unwrap()
                .is_empty());
            assert!(exact_equilibrium_on_grid(&inst, 20, &order2(), &tie, false)
                .unwrap()
                .is_none());
        }
        // Any rule favoring that bidder in the pivotal slot-1 tie supports
        // equilibria: the showcase bids are on the grid (resolution divisible
        // by 5), survive the scan, and pass the exact check.
        let some = brute_force_equilibria(&inst, 10, &order2(), &favor_third(), false).unwrap();
        assert!(some.contains(&showcase_bids()));
        assert!(lattice_equilibrium_exists(&inst, 10, &order2(), &favor_third(), false)
            .unwrap()
            .is_some());
        assert_eq!(
            exact_equilibrium_on_grid(&inst, 20, &order2(), &favor_third(), false).unwrap(),
            Some(BidProfile(vec![q(4, 5), q(2, 5), qi(1)])),
        );
        // Ranking the second bidder above the third is not by itself fatal:
        // under priority (2,3,1) the mirrored profile — middle bidder
        // promoted to slot 1 — is a full equilibrium, because conceding
        // slot 1 hands it to the steep-dropoff bidder and leaves no cheap
        // slot behind.
        let mirrored = BidProfile(vec![q(2, 5), q(4, 5), qi(1)]);
        let check =
            is_equilibrium(&inst, &mirrored, &order2(), &favor_second(), false).unwrap();
        assert!(check.is_equilibrium);
    }

    #[test]
    fn every_grid_bid_is_an_equilibrium_for_a_lone_bidder() {
        let inst = Instance::new(vec![qi(1)], vec![vec![qi(1)]]).unwrap();
        let all = brute_force_equilibria(
            &inst,
            4,
            &OrderOfSale::best_to_worst(1),
            &TieBreakRule::natural_priority(1),
            false,
        )
        .unwrap();
        assert_eq!(all.len(), 5);
    }

    #[test]
    fn reports_serialize_with_one_based_indices_and_named_conditions() {
        let inst = table1();
        let report = check_efficient_eq_conditions(&inst, &showcase_bids()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"A0\":true"));
        assert!(json.contains("\"slot1_winner\":1"));
        let back: ConditionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        let br = best_response(&inst, &showcase_bids(), 0, &order2(), &favor_third(), false)
            .unwrap();
        let json = serde_json::to_string(&br).unwrap();
        assert!(json.contains("\"bidder\":1"));
        let back: BestResponseReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, br);

        let poa = price_of_anarchy(&poa_family(&q(1, 10)).unwrap()).unwrap();
        let json = serde_json::to_string(&poa).unwrap();
        assert!(json.contains("\"poa\":\"18/11\""));
        let back: PoAReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, poa);
    }
}
