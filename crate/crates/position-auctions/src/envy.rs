//! Globally envy-free outcomes of position auctions.
//!
//! An outcome — an allocation of slots plus one price per slot — is *globally
//! envy-free* when no agent strictly prefers another position at its realized
//! price, the empty position included. This module checks that property
//! exactly, and for two-slot instances builds and characterizes sequential
//! second-price equilibria whose outcomes are envy-free:
//!
//! - [`is_globally_envy_free`] checks any outcome and reports the first
//!   envious agent found;
//! - [`gef_necessary_condition`] evaluates the click-gap comparison that any
//!   envy-free efficient equilibrium of a three-bidder instance must satisfy,
//!   and [`construct_gef_eq`] turns the condition into explicit equilibrium
//!   bids whenever it holds;
//! - [`check_gef_characterization`] tests the full bid-level condition
//!   systems for envy-freeness of the realized outcome, and
//!   [`gef_systems_feasible`] searches the relaxed systems for satisfying
//!   bids by exact Fourier–Motzkin elimination;
//! - [`gef2_sufficient`] checks a simpler sufficient condition on click-rate
//!   ratios alone;
//! - [`vcg_supported`] decides whether bids below value can reproduce the
//!   Vickrey–Clarke–Groves outcome under a given order of sale, and
//!   [`generate_bad_values`] builds valuations for which no order works;
//!
//! All arithmetic is exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{
    construct_efficient_eq_with_winners, one_based, one_based_slot, EfficientEqConstruction,
    EquilibriumError, FeasibilityWitness,
};
use crate::linear::{Constraint, Disjunction, Expr, System};
use crate::mechanisms::{
    run_iterated_spa, vcg_result, BidProfile, MechanismError, OrderOfSale, TieBreakRule,
};
use crate::model::{
    efficient_allocations, validate_allocation, Allocation, Instance, ModelError, Outcome,
};
use crate::rational::{qi, Q};

/// Errors from the envy analyses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvyError {
    /// The analysis is only defined for two-slot instances.
    #[error("this analysis needs exactly 2 slots, got {got}")]
    WrongSlotCount { got: usize },
    /// The analysis is only defined for a fixed bidder count.
    #[error("this analysis needs exactly {need} bidders, got {got}")]
    WrongBidderCount { need: usize, got: usize },
    /// Too few bidders for the slots under analysis.
    #[error("this analysis needs at least {need} bidders, got {got}")]
    TooFewBidders { need: usize, got: usize },
    /// The instance has several welfare-maximal allocations, so the winner
    /// labeling the analysis relies on is ambiguous.
    #[error("the efficient allocation is not unique")]
    NonUniqueEfficient { allocations: Vec<Allocation> },
    /// A price vector of the wrong length.
    #[error("{got} prices for {need} slots")]
    WrongPriceCount { need: usize, got: usize },
    /// A negative slot price.
    #[error("negative price for slot {slot}")]
    NegativePrice { slot: usize },
    /// Click-through-rate input of the wrong shape.
    #[error("the generator needs a 3x2 click-through-rate matrix, got {rows} rows ({cols} columns)")]
    BadCtrShape { rows: usize, cols: usize },
    /// A click-through-rate row that is not positive and strictly decreasing.
    #[error("click-through-rate row {row} must be positive and strictly decreasing")]
    BadCtrRow { row: usize },
    /// Click ratios not ordered as the generator requires.
    #[error(
        "rows must be ordered by click ratio with the last strictly largest; \
         got ratios {r1}, {r2}, {r3}"
    )]
    RatioOrderViolated { r1: Q, r2: Q, r3: Q },
    /// The generator scales everything by the third value, which must be
    /// positive.
    #[error("the third bidder's value must be positive")]
    NonPositiveV3,
    /// The constructed bids would divide by a zero click-through rate.
    #[error("the construction divides by bidder {bidder}'s rate in slot {slot}, which is zero")]
    ZeroCtrDivision { bidder: usize, slot: usize },
    /// Invalid instance or allocation input.
    #[error(transparent)]
    Model(#[from] ModelError),
    /// Invalid bids, order of sale, or tie-break rule.
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    /// An error from a delegated equilibrium analysis.
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

/// One envious agent and the position they would rather hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvyPair {
    /// The envious agent (1-based in JSON).
    #[serde(with = "one_based")]
    pub agent: usize,
    /// The position they strictly prefer; `null` is the empty position.
    #[serde(with = "one_based_slot")]
    pub envied_slot: Option<usize>,
}

/// Result of a global envy-freeness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GefReport {
    /// True iff no agent strictly prefers another position at its price.
    pub envy_free: bool,
    /// The first violation found, scanning agents then positions in order.
    pub violating_pair: Option<EnvyPair>,
    /// For two-slot, three-bidder instances with a unique efficient
    /// allocation: whether the click-gap condition necessary for envy-free
    /// efficient equilibria holds. `null` whenever that condition is not
    /// defined for the instance.
    pub necessary_condition_holds: Option<bool>,
}

/// Checks whether the outcome given by `alloc` and per-slot `prices` is
/// globally envy-free: every agent weakly prefers their own position (the
/// empty position for non-winners, at price zero) to every other position at
/// its price.
pub fn is_globally_envy_free(
    instance: &Instance,
    alloc: &Allocation,
    prices: &[Q],
) -> Result<GefReport, EnvyError> {
    validate_allocation(instance, alloc)?;
    let n = instance.n();
    let m = instance.m();
    if prices.len() != m {
        return Err(EnvyError::WrongPriceCount {
            need: m,
            got: prices.len(),
        });
    }
    for (j, p) in prices.iter().enumerate() {
        if *p < Q::zero() {
            return Err(EnvyError::NegativePrice { slot: j + 1 });
        }
    }

    let mut assigned: Vec<Option<usize>> = vec![None; n];
    for (j, &i) in alloc.0.iter().enumerate() {
        assigned[i] = Some(j);
    }
    let utility = |i: usize, position: Option<usize>| -> Q {
        match position {
            Some(j) => &instance.weight(i, j) - &prices[j],
            None => Q::zero(),
        }
    };

    let mut violating_pair = None;
    'agents: for i in 0..n {
        let own = utility(i, assigned[i]);
        for position in (0..m).map(Some).chain([None]) {
            if position == assigned[i] {
                continue;
            }
            if utility(i, position) > own {
                violating_pair = Some(EnvyPair {
                    agent: i,
                    envied_slot: position,
                });
                break 'agents;
            }
        }
    }

    let necessary_condition_holds =
        if m == 2 && n == 3 && efficient_allocations(instance).unique {
            Some(gef_necessary_condition(instance)?)
        } else {
            None
        };
    Ok(GefReport {
        envy_free: violating_pair.is_none(),
        violating_pair,
        necessary_condition_holds,
    })
}

/// The unique efficient allocation of a two-slot, three-bidder instance,
/// returned with its winner labels and the left-out bidder.
fn efficient_labels_3(instance: &Instance) -> Result<(Allocation, usize, usize, usize), EnvyError> {
    if instance.m() != 2 {
        return Err(EnvyError::WrongSlotCount { got: instance.m() });
    }
    if instance.n() != 3 {
        return Err(EnvyError::WrongBidderCount {
            need: 3,
            got: instance.n(),
        });
    }
    let eff = efficient_allocations(instance);
    if !eff.unique {
        return Err(EnvyError::NonUniqueEfficient {
            allocations: eff.allocations,
        });
    }
    let alloc = eff.allocations.into_iter().next().expect("nonempty");
    let l1 = alloc.0[0];
    let l2 = alloc.0[1];
    let l3 = (0..3).find(|i| *i != l1 && *i != l2).expect("three bidders");
    Ok((alloc, l1, l2, l3))
}

/// Evaluates the condition that every envy-free efficient equilibrium of a
/// two-slot, three-bidder instance must satisfy: the left-out bidder's value
/// for moving up from slot 2 to slot 1 is at most the slot-1 winner's.
///
/// Concretely, with winners `1` and `2` of the unique efficient allocation
/// and left-out bidder `3`, the condition reads
/// `(α_{3,1} − α_{3,2})·v_3 ≤ (α_{1,1} − α_{1,2})·v_1`.
pub fn gef_necessary_condition(instance: &Instance) -> Result<bool, EnvyError> {
    let (_, l1, _, l3) = efficient_labels_3(instance)?;
    let climb = |i: usize| &(instance.ctr(i, 0) - instance.ctr(i, 1)) * instance.value(i);
    Ok(climb(l3) <= climb(l1))
}

/// Which bid pins down the slot-2 winner's bid in a constructed envy-free
/// equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GefCase {
    /// The slot-2 winner bids so that winning slot 1 at their own score would
    /// leave them exactly as well off as staying in slot 2.
    Indifference,
    /// The slot-2 winner's slot-1 score exactly matches the left-out
    /// bidder's.
    ScoreMatch,
    /// Everyone bids their value.
    Truthful,
}

/// A constructed envy-free efficient equilibrium.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GefEquilibrium {
    pub bids: BidProfile,
    pub tie: TieBreakRule,
    pub allocation: Allocation,
    pub case: GefCase,
}

/// Result of the envy-free equilibrium construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GefConstruction {
    /// Bids realizing the efficient allocation in an equilibrium whose
    /// outcome is globally envy-free at Vickrey–Clarke–Groves prices.
    Feasible(GefEquilibrium),
    /// The necessary condition fails: `condition_lhs > condition_rhs`, and no
    /// envy-free efficient equilibrium exists without overbidding.
    Infeasible { condition_lhs: Q, condition_rhs: Q },
}

/// Builds, for a two-slot, three-bidder instance with a unique efficient
/// allocation, bids without overbidding whose sequential second-price outcome
/// is efficient, globally envy-free, an equilibrium under the highest
/// click-ratio tie-break rule, and priced exactly as under
/// Vickrey–Clarke–Groves — whenever the necessary click-gap condition holds.
/// When it fails, the returned [`GefConstruction::Infeasible`] carries both
/// sides of the violated comparison.
pub fn construct_gef_eq(instance: &Instance) -> Result<GefConstruction, EnvyError> {
    let (alloc, l1, l2, l3) = efficient_labels_3(instance)?;
    let a = |i: usize, j: usize| instance.ctr(i, j).clone();
    let v = |i: usize| instance.value(i).clone();
    let climb = |i: usize| &(&a(i, 0) - &a(i, 1)) * &v(i);

    let condition_lhs = climb(l3);
    let condition_rhs = climb(l1);
    if condition_lhs > condition_rhs {
        return Ok(GefConstruction::Infeasible {
            condition_lhs,
            condition_rhs,
        });
    }

    let mut bids = vec![Q::zero(); 3];
    bids[l1] = v(l1);
    bids[l3] = v(l3);
    let divide_by = |c: Q| {
        if c.is_zero() {
            Err(EnvyError::ZeroCtrDivision {
                bidder: l2 + 1,
                slot: 1,
            })
        } else {
            Ok(c)
        }
    };
    let case = if condition_lhs <= climb(l2) {
        let numer = &(&a(l3, 1) * &v(l3)) + &climb(l2);
        bids[l2] = numer / &divide_by(a(l2, 0))?;
        GefCase::Indifference
    } else {
        let reserve_score = &a(l3, 0) * &v(l3);
        if reserve_score <= &a(l2, 0) * &v(l2) {
            bids[l2] = reserve_score / &divide_by(a(l2, 0))?;
            GefCase::ScoreMatch
        } else {
            bids[l2] = v(l2);
            GefCase::Truthful
        }
    };
    Ok(GefConstruction::Feasible(GefEquilibrium {
        bids: BidProfile(bids),
        tie: TieBreakRule::click_ratio(3),
        allocation: alloc,
        case,
    }))
}

/// The four bid-derived labels the envy-freeness characterization compares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GefLabeling {
    /// Highest slot-1 score (1-based in JSON).
    #[serde(with = "one_based")]
    pub slot1_leader: usize,
    /// Highest slot-2 score among the rest.
    #[serde(with = "one_based")]
    pub slot2_leader: usize,
    /// Highest slot-2 score among the remaining pool; ties prefer a bidder
    /// whose bid equals their value.
    #[serde(with = "one_based")]
    pub reserve_slot2: usize,
    /// Highest slot-1 score among the remaining pool.
    #[serde(with = "one_based")]
    pub reserve_slot1: usize,
    /// Set when several bidders tie for the slot-2 reserve.
    pub note: Option<String>,
}

/// Verdict of the efficient-labeling condition systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeVerdict {
    /// The premise and one full system hold as written: the realized outcome
    /// is efficient and globally envy-free.
    Holds,
    /// The premise holds but both systems fail even with their strict
    /// comparisons relaxed to weak ones: the outcome is not envy-free.
    Fails,
    /// Only boundary cases of the strict comparisons separate the systems
    /// from holding, or the premise fails; nothing is implied.
    Indeterminate,
}

/// The two condition systems stated for the winners of the unique efficient
/// allocation of a three-bidder instance, evaluated at given bids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfficientSystems {
    /// Slot-1 winner of the unique efficient allocation (1-based in JSON).
    #[serde(with = "one_based")]
    pub slot1_winner: usize,
    /// Slot-2 winner of the unique efficient allocation.
    #[serde(with = "one_based")]
    pub slot2_winner: usize,
    /// Whether the slot-1 winner's score tops both other scores.
    pub premise: bool,
    /// The system in which the slot-2 winner's score tops the left-out
    /// bidder's.
    #[serde(rename = "D")]
    pub d: [bool; 8],
    /// The system in which the left-out bidder's score is on top.
    #[serde(rename = "E")]
    pub e: [bool; 9],
    pub verdict: DeVerdict,
}

/// Bid-level characterization of global envy-freeness of the realized
/// sequential second-price outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GefConstraintReport {
    pub labeling: GefLabeling,
    /// The system in which the slot-2 leader's bid sets the slot-1 price.
    #[serde(rename = "A")]
    pub a: [bool; 7],
    /// The system in which the slot-2 reserve bidder sets both prices.
    #[serde(rename = "B")]
    pub b: [bool; 7],
    /// The system in which the slot-1 reserve bidder sets the slot-1 price.
    #[serde(rename = "C")]
    pub c: [bool; 7],
    /// True iff one of the three systems holds in full, i.e. iff the realized
    /// outcome is globally envy-free (for bids at or below value).
    pub gef: bool,
    /// The allocation the labels induce.
    pub allocation: Allocation,
    /// The slot prices the labels induce.
    pub prices: Vec<Q>,
    /// The efficient-labeling systems; present only for three-bidder
    /// instances with a unique efficient allocation.
    pub efficient_systems: Option<EfficientSystems>,
}

/// Smallest-index maximizer of `score` over `candidates`.
fn argmax_by(candidates: &[usize], score: impl Fn(usize) -> Q) -> Option<(usize, Q)> {
    let mut best: Option<(usize, Q)> = None;
    for &i in candidates {
        let s = score(i);
        if best.as_ref().is_none_or(|(_, bs)| s > *bs) {
            best = Some((i, s));
        }
    }
    best
}

/// Evaluates the three condition systems characterizing global envy-freeness
/// of the outcome the bids induce in a two-slot sequential second-price
/// auction whose ties favor the labeled bidders. For bids at or below value,
/// the outcome is envy-free iff one system holds in full; the report lists
/// every comparison for audit.
pub fn check_gef_characterization(
    instance: &Instance,
    bids: &BidProfile,
) -> Result<GefConstraintReport, EnvyError> {
    if instance.m() != 2 {
        return Err(EnvyError::WrongSlotCount { got: instance.m() });
    }
    let n = instance.n();
    if n < 3 {
        return Err(EnvyError::TooFewBidders { need: 3, got: n });
    }
    bids.validate(instance)?;
    let score = |i: usize, j: usize| instance.ctr(i, j) * bids.bid(i);

    let everyone: Vec<usize> = (0..n).collect();
    let (l1, _) = argmax_by(&everyone, |i| score(i, 0)).expect("nonempty");
    let rest: Vec<usize> = (0..n).filter(|&i| i != l1).collect();
    let (l2, _) = argmax_by(&rest, |i| score(i, 1)).expect("nonempty");
    let pool: Vec<usize> = (0..n).filter(|&i| i != l1 && i != l2).collect();

    let (_, top) = argmax_by(&pool, |i| score(i, 1)).expect("nonempty");
    let tied: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|&i| score(i, 1) == top)
        .collect();
    let value_bidder = tied.iter().copied().find(|&i| bids.bid(i) == instance.value(i));
    let l3 = value_bidder.unwrap_or(tied[0]);
    let note = if tied.len() > 1 {
        Some(match value_bidder {
            Some(_) => {
                "several bidders tie for the slot-2 reserve; picked one bidding their value"
                    .to_string()
            }
            None => "several bidders tie for the slot-2 reserve and none bids their value; \
                     the characterization may not apply to this labeling"
                .to_string(),
        })
    } else {
        None
    };
    let (l4, _) = argmax_by(&pool, |i| score(i, 0)).expect("nonempty");

    let s2 = score(l2, 0);
    let s3 = score(l3, 1);
    let s3top = score(l3, 0);
    let s4 = score(l4, 0);
    let gap1 = &(instance.ctr(l1, 0) - instance.ctr(l1, 1)) * instance.value(l1);
    let gap2 = &(instance.ctr(l2, 0) - instance.ctr(l2, 1)) * instance.value(l2);
    let gap3b = &(instance.ctr(l3, 0) - instance.ctr(l3, 1)) * bids.bid(l3);
    let cap1 = instance.weight(l1, 0);
    let cap2 = instance.weight(l2, 1);
    let m1v = pool
        .iter()
        .map(|&i| instance.weight(i, 0))
        .max()
        .expect("nonempty");
    let m2v = pool
        .iter()
        .map(|&i| instance.weight(i, 1))
        .max()
        .expect("nonempty");

    let a = [
        s2 >= s4,
        s2 <= &s3 + &gap1,
        s2 <= cap1,
        s2 >= &s3 + &gap2,
        s3 <= cap2,
        s2 >= m1v,
        s3 >= m2v,
    ];
    let b = [
        s2 <= s3top && s3top == s4,
        gap3b <= gap1,
        s3top <= cap1,
        gap3b >= gap2,
        s3 <= cap2,
        s3top >= m1v,
        s3 >= m2v,
    ];
    let c = [
        s2 <= s4 && s3top < s4,
        s4 <= &s3 + &gap1,
        s4 <= cap1,
        s4 >= &s3 + &gap2,
        s3 <= cap2,
        s4 >= m1v,
        s3 >= m2v,
    ];
    let gef = a.iter().all(|h| *h) || b.iter().all(|h| *h) || c.iter().all(|h| *h);

    let p1 = s2.clone().max(s4.clone());
    let allocation = Allocation(vec![l1, l2]);
    let prices = vec![p1, s3.clone()];
    let efficient_systems = efficient_systems(instance, bids);

    Ok(GefConstraintReport {
        labeling: GefLabeling {
            slot1_leader: l1,
            slot2_leader: l2,
            reserve_slot2: l3,
            reserve_slot1: l4,
            note,
        },
        a,
        b,
        c,
        gef,
        allocation,
        prices,
        efficient_systems,
    })
}

/// Evaluates the condition systems stated for the efficient winner labeling,
/// when that labeling is defined (three bidders, unique efficient
/// allocation).
fn efficient_systems(instance: &Instance, bids: &BidProfile) -> Option<EfficientSystems> {
    if instance.n() != 3 {
        return None;
    }
    let eff = efficient_allocations(instance);
    if !eff.unique {
        return None;
    }
    let alloc = &eff.allocations[0];
    let e1 = alloc.0[0];
    let e2 = alloc.0[1];
    let e3 = (0..3).find(|i| *i != e1 && *i != e2).expect("three bidders");

    let score = |i: usize, j: usize| instance.ctr(i, j) * bids.bid(i);
    let s2_1 = score(e2, 0);
    let s2_2 = score(e2, 1);
    let s3_1 = score(e3, 0);
    let s3_2 = score(e3, 1);
    let gap1 = &(instance.ctr(e1, 0) - instance.ctr(e1, 1)) * instance.value(e1);
    let gap2 = &(instance.ctr(e2, 0) - instance.ctr(e2, 1)) * instance.value(e2);
    let gap3b = &(instance.ctr(e3, 0) - instance.ctr(e3, 1)) * bids.bid(e3);
    let cap1 = instance.weight(e1, 0);
    let cap2 = instance.weight(e2, 1);
    let premise = score(e1, 0) >= s2_1 && score(e1, 0) >= s3_1;

    let d = [
        s2_1 >= s3_1,
        s2_1 <= &s3_2 + &gap1,
        s2_1 < cap1,
        s2_1 >= &s3_2 + &gap2,
        s3_2 <= cap2,
        bids.bid(e3) >= instance.value(e3),
        s2_2 > s3_2,
        s3_2 <= &cap1 - &gap2,
    ];
    let d_weak = d[0] && d[1] && s2_1 <= cap1 && d[3] && d[4] && d[5] && s2_2 >= s3_2 && d[7];
    let e = [
        s2_1 <= s3_1,
        gap3b <= gap1,
        gap3b >= gap2,
        s3_2 <= cap2,
        bids.bid(e3) >= instance.value(e3),
        s3_1 < cap1,
        s2_2 > s3_2,
        s3_1 <= &s2_2 + &gap1,
        s3_2 <= &cap1 - &gap2,
    ];
    let e_weak =
        e[0] && e[1] && e[2] && e[3] && e[4] && s3_1 <= cap1 && s2_2 >= s3_2 && e[7] && e[8];

    let verdict = if premise && (d.iter().all(|h| *h) || e.iter().all(|h| *h)) {
        DeVerdict::Holds
    } else if premise && !d_weak && !e_weak {
        DeVerdict::Fails
    } else {
        DeVerdict::Indeterminate
    };
    Some(EfficientSystems {
        slot1_winner: e1,
        slot2_winner: e2,
        premise,
        d,
        e,
        verdict,
    })
}

/// Satisfying bids for the relaxed efficient-labeling systems, when they
/// exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GefSystemsFeasibility {
    /// Bids at or below value satisfying the premise and the relaxed first
    /// system.
    pub d_weak: Option<BidProfile>,
    /// Likewise for the relaxed second system.
    pub e_weak: Option<BidProfile>,
}

/// Searches exhaustively — by exact Fourier–Motzkin elimination over the
/// three bids, boxed between zero and the values — for bids satisfying the
/// premise and either relaxed condition system of the efficient labeling.
/// When both searches come back empty, no globally envy-free efficient
/// equilibrium without overbidding exists for the instance.
pub fn gef_systems_feasible(instance: &Instance) -> Result<GefSystemsFeasibility, EnvyError> {
    let (_, e1, e2, e3) = efficient_labels_3(instance)?;
    let n = 3;
    let a = |i: usize, j: usize| instance.ctr(i, j).clone();
    let v = |i: usize| instance.value(i).clone();
    let lit = |c: Q| Expr::lit(n, c);
    let var = |i: usize| Expr::var(n, i);
    let sc = |i: usize, j: usize| Expr::term(n, i, a(i, j));
    let gap1 = &(&a(e1, 0) - &a(e1, 1)) * &v(e1);
    let gap2 = &(&a(e2, 0) - &a(e2, 1)) * &v(e2);
    let cap1 = &a(e1, 0) * &v(e1);
    let cap2 = &a(e2, 1) * &v(e2);

    let mut base = System::new(n);
    for i in 0..n {
        base.push(var(i).ge(&lit(Q::zero())));
        base.push(var(i).le(&lit(v(i))));
    }
    base.push(sc(e1, 0).ge(&sc(e2, 0)));
    base.push(sc(e1, 0).ge(&sc(e3, 0)));

    let d_rows = [
        sc(e2, 0).ge(&sc(e3, 0)),
        sc(e2, 0).le(&sc(e3, 1).plus(&lit(gap1.clone()))),
        sc(e2, 0).le(&lit(cap1.clone())),
        sc(e2, 0).ge(&sc(e3, 1).plus(&lit(gap2.clone()))),
        sc(e3, 1).le(&lit(cap2.clone())),
        var(e3).ge(&lit(v(e3))),
        sc(e2, 1).ge(&sc(e3, 1)),
        sc(e3, 1).le(&lit(&cap1 - &gap2)),
    ];
    let e_rows = [
        sc(e2, 0).le(&sc(e3, 0)),
        Expr::term(n, e3, &a(e3, 0) - &a(e3, 1)).le(&lit(gap1.clone())),
        Expr::term(n, e3, &a(e3, 0) - &a(e3, 1)).ge(&lit(gap2.clone())),
        sc(e3, 1).le(&lit(cap2)),
        var(e3).ge(&lit(v(e3))),
        sc(e3, 0).le(&lit(cap1.clone())),
        sc(e2, 1).ge(&sc(e3, 1)),
        sc(e3, 0).le(&sc(e2, 1).plus(&lit(gap1))),
        sc(e3, 1).le(&lit(&cap1 - &gap2)),
    ];
    Ok(GefSystemsFeasibility {
        d_weak: base.and(&d_rows).solve().map(BidProfile),
        e_weak: base.and(&e_rows).solve().map(BidProfile),
    })
}

/// Result of the click-ratio sufficient condition for envy-free efficient
/// equilibria.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gef2Report {
    /// True iff the slot-2 winner's click ratio weakly dominates every
    /// left-out bidder's.
    pub condition_holds: bool,
    /// A verified efficient-equilibrium construction whenever the condition
    /// holds; its outcome is globally envy-free.
    pub construction: Option<EfficientEqConstruction>,
}

/// Checks the ratio condition `α_{2,1}/α_{2,2} ≥ α_{i,1}/α_{i,2}` (in
/// cross-multiplied form) for every bidder `i` outside a welfare-maximal pair
/// of winners `1, 2`, and builds an efficient equilibrium with a globally
/// envy-free outcome when it holds. The winners are labeled by the
/// lexicographically smallest welfare-maximal allocation, so the check is
/// defined even when several allocations tie.
pub fn gef2_sufficient(instance: &Instance) -> Result<Gef2Report, EnvyError> {
    if instance.m() != 2 {
        return Err(EnvyError::WrongSlotCount { got: instance.m() });
    }
    let eff = efficient_allocations(instance);
    let Some(alloc) = eff.allocations.first().cloned() else {
        return Err(EnvyError::TooFewBidders {
            need: 2,
            got: instance.n(),
        });
    };
    let l1 = alloc.0[0];
    let l2 = alloc.0[1];
    let condition_holds = (0..instance.n()).filter(|&i| i != l1 && i != l2).all(|i| {
        instance.ctr(l2, 0) * instance.ctr(i, 1) >= instance.ctr(i, 0) * instance.ctr(l2, 1)
    });
    let construction = if condition_holds {
        Some(construct_efficient_eq_with_winners(instance, &alloc)?)
    } else {
        None
    };
    Ok(Gef2Report {
        condition_holds,
        construction,
    })
}

/// Result of the Vickrey–Clarke–Groves support decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcgSupportReport {
    /// True iff some bids reproduce the target outcome under the given order
    /// of sale.
    pub feasible: bool,
    /// Verified bids and tie-break rule when feasible.
    pub witness: Option<FeasibilityWitness>,
    /// The Vickrey–Clarke–Groves outcome the bids must reproduce.
    pub target: Outcome,
}

/// Decides whether bids (at or below value unless `allow_overbid`) exist
/// whose sequential second-price outcome under the given order of sale equals
/// the Vickrey–Clarke–Groves outcome — same winners, same prices.
///
/// Each sale step contributes the winner's score dominance over the remaining
/// pool plus a disjunction over which remaining bidder's score pins the
/// realized price; the combined system is solved exactly by Fourier–Motzkin
/// elimination and any solution is re-simulated before being reported.
pub fn vcg_supported(
    instance: &Instance,
    order: &OrderOfSale,
    allow_overbid: bool,
) -> Result<VcgSupportReport, EnvyError> {
    order.validate(instance.m())?;
    let n = instance.n();
    let m = instance.m();
    if n < m {
        return Err(EnvyError::TooFewBidders { need: m, got: n });
    }
    let eff = efficient_allocations(instance);
    if !eff.unique {
        return Err(EnvyError::NonUniqueEfficient {
            allocations: eff.allocations,
        });
    }
    let target = vcg_result(instance);
    let alloc = target
        .allocation()
        .expect("a unique efficient allocation assigns every slot");

    let a = |i: usize, j: usize| instance.ctr(i, j).clone();
    let v = |i: usize| instance.value(i).clone();
    let lit = |c: Q| Expr::lit(n, c);
    let sc = |i: usize, j: usize| Expr::term(n, i, a(i, j));

    let mut sys = System::new(n);
    for i in 0..n {
        sys.push(Expr::var(n, i).ge(&lit(Q::zero())));
        if !allow_overbid {
            sys.push(Expr::var(n, i).le(&lit(v(i))));
        }
    }
    let mut disjunctions: Vec<Disjunction> = Vec::new();
    let mut pool: Vec<usize> = (0..n).collect();
    for &slot in &order.0 {
        let w = alloc.0[slot];
        let price = target.prices[slot].clone();
        for &u in &pool {
            if u != w {
                sys.push(sc(w, slot).ge(&sc(u, slot)));
            }
        }
        let competitors: Vec<usize> = pool.iter().copied().filter(|&u| u != w).collect();
        if competitors.is_empty() {
            if !price.is_zero() {
                // A slot with no competitor left sells at price zero; a
                // positive target price is unreachable.
                return Ok(VcgSupportReport {
                    feasible: false,
                    witness: None,
                    target,
                });
            }
        } else {
            let cases: Vec<Vec<Constraint>> = competitors
                .iter()
                .map(|&z| {
                    let mut rows: Vec<Constraint> =
                        sc(z, slot).eq(&lit(price.clone())).into_iter().collect();
                    for &u in &competitors {
                        if u != z {
                            rows.push(sc(u, slot).le(&lit(price.clone())));
                        }
                    }
                    rows
                })
                .collect();
            disjunctions.push(Disjunction { cases });
        }
        pool.retain(|&u| u != w);
    }

    let Some(solution) = crate::linear::solve_with_disjunctions(&sys, &disjunctions) else {
        return Ok(VcgSupportReport {
            feasible: false,
            witness: None,
            target,
        });
    };

    // Ties resolve toward the scheduled winners: winners in sale order, then
    // the left-out bidders.
    let mut priority: Vec<usize> = order.0.iter().map(|&slot| alloc.0[slot]).collect();
    let rest: Vec<usize> = (0..n).filter(|i| !priority.contains(i)).collect();
    priority.extend(rest);
    let tie = TieBreakRule::PriorityOrder(priority);
    let bids = BidProfile(solution);

    let outcome = run_iterated_spa(instance, &bids, order, &tie)?;
    if outcome.winners != target.winners || outcome.prices != target.prices {
        debug_assert!(
            false,
            "support witness failed re-simulation under order {:?}",
            order.0
        );
        return Ok(VcgSupportReport {
            feasible: false,
            witness: None,
            target,
        });
    }
    Ok(VcgSupportReport {
        feasible: true,
        witness: Some(FeasibilityWitness { bids, tie }),
        target,
    })
}

/// The derived quantities behind a generated hard instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadValueParams {
    /// The fixed third value the construction scales with.
    pub v3: Q,
    /// Click-ratio slack between the first two rows.
    pub epsilon: Q,
    /// Click-ratio gap between the last two rows (must be positive).
    pub delta: Q,
    /// Upper margin available for shading the first value.
    pub lambda1: Q,
    /// Upper margin available for raising the second value.
    pub lambda2: Q,
    /// The realized shading of the first value.
    pub gamma1: Q,
    /// The realized raise of the second value.
    pub gamma2: Q,
}

/// A generated instance on which no order of sale supports the
/// Vickrey–Clarke–Groves outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadValueOutput {
    pub instance: Instance,
    pub values: Vec<Q>,
    pub params: BadValueParams,
}

/// Builds, for any two-slot, three-bidder click-through-rate matrix with
/// positive strictly decreasing rows ordered by click ratio (the last ratio
/// strictly largest), valuations under which the bidders with the two lowest
/// ratios form the unique efficient pair and yet no bids at or below value
/// reproduce the Vickrey–Clarke–Groves outcome — under either order of sale.
///
/// The first value is shaded by `γ1` below the point where the click-gap
/// condition would start to hold, the second raised by `γ2` above the
/// left-out bidder's slot-2 score; the margins start at half their available
/// range and are halved (the first alone while the cross comparison fails,
/// then both together) until three refinement comparisons hold, which the
/// positive ratio gap guarantees after finitely many steps.
pub fn generate_bad_values(ctr: &[Vec<Q>], v3: &Q) -> Result<BadValueOutput, EnvyError> {
    if ctr.len() != 3 {
        return Err(EnvyError::BadCtrShape {
            rows: ctr.len(),
            cols: ctr.first().map_or(0, Vec::len),
        });
    }
    for (i, row) in ctr.iter().enumerate() {
        if row.len() != 2 {
            return Err(EnvyError::BadCtrShape {
                rows: 3,
                cols: row.len(),
            });
        }
        if !(row[1] > Q::zero() && row[0] > row[1]) {
            return Err(EnvyError::BadCtrRow { row: i + 1 });
        }
    }
    if !(*v3 > Q::zero()) {
        return Err(EnvyError::NonPositiveV3);
    }
    let ratio = |i: usize| &ctr[i][0] / &ctr[i][1];
    let (r1, r2, r3) = (ratio(0), ratio(1), ratio(2));
    if !(r1 <= r2 && r2 < r3) {
        return Err(EnvyError::RatioOrderViolated { r1, r2, r3 });
    }

    let epsilon = &r2 - &r1;
    let delta = &r3 - &r2;
    let g1 = &ctr[0][0] - &ctr[0][1];
    let g2 = &ctr[1][0] - &ctr[1][1];
    let g3 = &ctr[2][0] - &ctr[2][1];
    let lambda1 = &(&(&g3 / &g1) - &(&ctr[2][0] / &ctr[0][0])) * v3;
    let lambda2 = &(&(&g3 / &g2) - &(&ctr[2][1] / &ctr[1][1])) * v3;
    debug_assert!(lambda1 > Q::zero() && lambda2 > Q::zero());

    let two = qi(2);
    let mut gamma1 = &lambda1 / &two;
    let mut gamma2 = &lambda2 / &two;
    let mut rounds = 0;
    loop {
        let r1_lhs = &(&(&g1 * &gamma1) + &(&g2 * &gamma2)) / &(&ctr[2][1] * v3);
        let r1_ok = r1_lhs < delta;
        let r2_ok = gamma2 > &(&g1 / &ctr[1][1]) * &gamma1;
        let r3_lhs = &(&g1 / &(&ctr[0][0] * v3))
            * &(&(&(&ctr[0][0] / &ctr[2][1]) * &gamma1) + &(&(&g2 / &ctr[2][1]) * &gamma2));
        let r3_rhs = &delta + &(&(&ctr[0][1] / &ctr[0][0]) * &epsilon);
        let r3_ok = r3_lhs < r3_rhs;
        if r1_ok && r2_ok && r3_ok {
            break;
        }
        gamma1 = &gamma1 / &two;
        if r2_ok {
            gamma2 = &gamma2 / &two;
        }
        rounds += 1;
        // Halving the first margin alone makes the cross comparison hold;
        // halving both preserves it and drives the other two left-hand sides
        // to zero against fixed positive bounds.
        assert!(rounds < 4096, "margin refinement must terminate");
    }

    let v1 = &(&(&g3 / &g1) * v3) - &gamma1;
    let v2 = &(&(&ctr[2][1] / &ctr[1][1]) * v3) + &gamma2;
    let values = vec![v1, v2, v3.clone()];
    let instance = Instance::new(values.clone(), ctr.to_vec())?;
    Ok(BadValueOutput {
        instance,
        values,
        params: BadValueParams {
            v3: v3.clone(),
            epsilon,
            delta,
            lambda1,
            lambda2,
            gamma1,
            gamma2,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{is_equilibrium, ConstructionCase};
    use crate::rational::q;
    use crate::showcase::{gef_example, table1, table3};

    fn separable() -> Instance {
        Instance::new(
            vec![qi(3), qi(2), qi(1)],
            vec![
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(1, 2)],
            ],
        )
        .expect("valid instance")
    }

    fn score_match_instance() -> Instance {
        Instance::new(
            vec![qi(4), qi(2), qi(1)],
            vec![
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(9, 10)],
                vec![qi(1), q(1, 5)],
            ],
        )
        .expect("valid instance")
    }

    fn truthful_instance() -> Instance {
        Instance::new(
            vec![qi(10), qi(1), q(3, 2)],
            vec![
                vec![qi(1), q(1, 4)],
                vec![qi(1), q(9, 10)],
                vec![qi(1), q(1, 2)],
            ],
        )
        .expect("valid instance")
    }

    #[test]
    fn zero_prices_between_identical_bidders_create_envy() {
        let instance = Instance::new(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), q(1, 2)], vec![qi(1), q(1, 2)]],
        )
        .expect("valid instance");
        let report =
            is_globally_envy_free(&instance, &Allocation(vec![0, 1]), &[Q::zero(), Q::zero()])
                .expect("well-formed outcome");
        assert!(!report.envy_free);
        assert_eq!(
            report.violating_pair,
            Some(EnvyPair {
                agent: 1,
                envied_slot: Some(0),
            })
        );
        assert_eq!(report.necessary_condition_holds, None);
    }

    #[test]
    fn vcg_outcome_of_the_four_bidder_showcase_is_envy_free() {
        let instance = table3();
        let outcome = vcg_result(&instance);
        assert_eq!(outcome.prices, vec![qi(7), qi(5), qi(1)]);
        let alloc = outcome.allocation().expect("all slots assigned");
        assert_eq!(alloc, Allocation(vec![0, 1, 2]));
        let report =
            is_globally_envy_free(&instance, &alloc, &outcome.prices).expect("well-formed");
        assert!(report.envy_free);
        assert_eq!(report.violating_pair, None);
        assert_eq!(report.necessary_condition_holds, None);
    }

    #[test]
    fn necessary_condition_separates_the_running_examples() {
        assert!(!gef_necessary_condition(&gef_example()).expect("defined"));
        assert!(gef_necessary_condition(&separable()).expect("defined"));
        assert!(matches!(
            gef_necessary_condition(&table1()),
            Err(EnvyError::NonUniqueEfficient { .. })
        ));
    }

    fn assert_constructed_equilibrium(instance: &Instance, case: GefCase, bids: &[Q]) {
        let GefConstruction::Feasible(eq) = construct_gef_eq(instance).expect("applies") else {
            panic!("expected a feasible construction");
        };
        assert_eq!(eq.case, case);
        assert_eq!(eq.bids.0, bids);
        assert_eq!(eq.allocation, Allocation(vec![0, 1]));
        let order = OrderOfSale::best_to_worst(2);
        let outcome = run_iterated_spa(instance, &eq.bids, &order, &eq.tie).expect("simulates");
        assert_eq!(outcome.allocation(), Some(eq.allocation.clone()));
        assert_eq!(outcome.prices, vcg_result(instance).prices);
        let report = is_globally_envy_free(instance, &eq.allocation, &outcome.prices)
            .expect("well-formed");
        assert!(report.envy_free);
        assert_eq!(report.necessary_condition_holds, Some(true));
        let check =
            is_equilibrium(instance, &eq.bids, &order, &eq.tie, false).expect("checkable");
        assert!(check.is_equilibrium, "deviation: {:?}", check.deviation);
    }

    #[test]
    fn construction_covers_the_three_bid_regimes() {
        assert_constructed_equilibrium(
            &separable(),
            GefCase::Indifference,
            &[qi(3), q(3, 2), qi(1)],
        );
        assert_constructed_equilibrium(
            &score_match_instance(),
            GefCase::ScoreMatch,
            &[qi(4), qi(1), qi(1)],
        );
        assert_constructed_equilibrium(
            &truthful_instance(),
            GefCase::Truthful,
            &[qi(10), qi(1), q(3, 2)],
        );
    }

    #[test]
    fn motivating_example_has_no_envy_free_efficient_equilibrium() {
        let instance = gef_example();
        match construct_gef_eq(&instance).expect("defined") {
            GefConstruction::Infeasible {
                condition_lhs,
                condition_rhs,
            } => {
                assert_eq!(condition_lhs, q(1, 2));
                assert_eq!(condition_rhs, q(2, 5));
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
        let systems = gef_systems_feasible(&instance).expect("defined");
        assert_eq!(systems.d_weak, None);
        assert_eq!(systems.e_weak, None);
    }

    #[test]
    fn relaxed_systems_have_solutions_when_the_condition_holds() {
        let systems = gef_systems_feasible(&separable()).expect("defined");
        let bids = systems.d_weak.expect("first system feasible");
        let report = check_gef_characterization(&separable(), &bids).expect("checkable");
        let eff = report.efficient_systems.expect("defined");
        assert_ne!(eff.verdict, DeVerdict::Fails);
    }

    #[test]
    fn characterization_accepts_the_constructed_bids() {
        let instance = separable();
        let bids = BidProfile(vec![qi(3), q(3, 2), qi(1)]);
        let report = check_gef_characterization(&instance, &bids).expect("checkable");
        assert_eq!(report.labeling.slot1_leader, 0);
        assert_eq!(report.labeling.slot2_leader, 1);
        assert_eq!(report.labeling.reserve_slot2, 2);
        assert_eq!(report.labeling.reserve_slot1, 2);
        assert_eq!(report.labeling.note, None);
        assert!(report.a.iter().all(|h| *h));
        assert!(report.gef);
        assert_eq!(report.allocation, Allocation(vec![0, 1]));
        assert_eq!(report.prices, vec![q(3, 2), q(1, 2)]);
        let eff = report.efficient_systems.expect("defined");
        assert!(eff.premise);
        assert!(eff.d.iter().all(|h| *h));
        assert_eq!(eff.verdict, DeVerdict::Holds);

        let shaded = BidProfile(vec![qi(3), q(3, 2), q(1, 2)]);
        let report = check_gef_characterization(&instance, &shaded).expect("checkable");
        assert!(!report.gef);
    }

    #[test]
    fn truthful_regime_is_classified_by_the_second_system() {
        let instance = truthful_instance();
        let bids = BidProfile::truthful(&instance);
        let report = check_gef_characterization(&instance, &bids).expect("checkable");
        assert!(report.gef);
        assert!(report.b.iter().all(|h| *h));
        let eff = report.efficient_systems.expect("defined");
        assert!(eff.premise);
        assert!(!eff.d[0]);
        assert!(eff.e.iter().all(|h| *h));
        assert_eq!(eff.verdict, DeVerdict::Holds);
    }

    #[test]
    fn reserve_label_prefers_bidders_at_their_value() {
        let instance = Instance::new(
            vec![qi(5), qi(3), qi(2), qi(1)],
            vec![vec![qi(1), q(1, 2)]; 4],
        )
        .expect("valid instance");
        let bids = BidProfile(vec![qi(5), qi(2), qi(1), qi(1)]);
        let report = check_gef_characterization(&instance, &bids).expect("checkable");
        assert_eq!(report.labeling.slot1_leader, 0);
        assert_eq!(report.labeling.slot2_leader, 1);
        assert_eq!(report.labeling.reserve_slot2, 3);
        assert_eq!(report.labeling.reserve_slot1, 2);
        assert!(report.labeling.note.is_some());
    }

    #[test]
    fn ratio_dominance_gives_the_simpler_sufficient_condition() {
        let report = gef2_sufficient(&table1()).expect("defined");
        assert!(!report.condition_holds);
        assert!(report.construction.is_none());

        let instance = separable();
        let report = gef2_sufficient(&instance).expect("defined");
        assert!(report.condition_holds);
        let construction = report.construction.expect("condition implies a construction");
        assert_eq!(construction.case, ConstructionCase::A);
        let check = is_equilibrium(
            &instance,
            &construction.bids,
            &OrderOfSale::best_to_worst(2),
            &construction.tie,
            false,
        )
        .expect("checkable");
        assert!(check.is_equilibrium);
    }

    #[test]
    fn vcg_support_depends_on_the_order_of_sale() {
        let instance = table3();
        let in_order =
            vcg_supported(&instance, &OrderOfSale::best_to_worst(3), false).expect("defined");
        assert!(!in_order.feasible);
        assert_eq!(in_order.target.prices, vec![qi(7), qi(5), qi(1)]);

        let order = OrderOfSale(vec![0, 2, 1]);
        let reordered = vcg_supported(&instance, &order, false).expect("defined");
        assert!(reordered.feasible);
        let witness = reordered.witness.expect("feasible reports carry a witness");
        let outcome =
            run_iterated_spa(&instance, &witness.bids, &order, &witness.tie).expect("simulates");
        assert_eq!(outcome.winners, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(outcome.prices, vec![qi(7), qi(5), qi(1)]);

        // The textbook witness for that order reproduces the same outcome.
        let bids = BidProfile(vec![qi(10), qi(7), qi(7), qi(5)]);
        let outcome =
            run_iterated_spa(&instance, &bids, &order, &TieBreakRule::natural_priority(4))
                .expect("simulates");
        assert_eq!(outcome.winners, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(outcome.prices, vec![qi(7), qi(5), qi(1)]);
    }

    #[test]
    fn in_order_support_works_for_identical_click_ratios() {
        let report =
            vcg_supported(&separable(), &OrderOfSale::best_to_worst(2), false).expect("defined");
        assert!(report.feasible);
        assert_eq!(report.target.prices, vec![q(3, 2), q(1, 2)]);
    }

    #[test]
    fn single_low_ratio_bidder_still_supports_vcg_in_order() {
        let instance = Instance::new(
            vec![qi(3), qi(2), qi(1)],
            vec![
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(1, 2)],
                vec![qi(1), q(2, 3)],
            ],
        )
        .expect("valid instance");
        let vcg = vcg_result(&instance);
        assert_eq!(vcg.prices, vec![q(5, 3), q(2, 3)]);
        let report =
            vcg_supported(&instance, &OrderOfSale::best_to_worst(2), false).expect("defined");
        assert!(report.feasible);

        // Sorted by click ratio the same rows fail the generator's strict
        // gap requirement: the largest ratio is not unique.
        let sorted = vec![
            vec![qi(1), q(2, 3)],
            vec![qi(1), q(1, 2)],
            vec![qi(1), q(1, 2)],
        ];
        assert!(matches!(
            generate_bad_values(&sorted, &qi(1)),
            Err(EnvyError::RatioOrderViolated { .. })
        ));
    }

    #[test]
    fn generated_values_defeat_vcg_support_in_both_orders() {
        let ctr = vec![
            vec![qi(1), q(1, 2)],
            vec![qi(1), q(1, 2)],
            vec![qi(1), q(1, 4)],
        ];
        let out = generate_bad_values(&ctr, &qi(1)).expect("qualifying rates");
        assert_eq!(out.params.epsilon, Q::zero());
        assert_eq!(out.params.delta, qi(2));
        assert_eq!(out.params.lambda1, q(1, 2));
        assert_eq!(out.params.lambda2, qi(1));
        assert_eq!(out.params.gamma1, q(1, 4));
        assert_eq!(out.params.gamma2, q(1, 2));
        assert_eq!(out.values, vec![q(5, 4), qi(1), qi(1)]);

        let eff = efficient_allocations(&out.instance);
        assert!(eff.unique);
        assert_eq!(eff.allocations[0], Allocation(vec![0, 1]));
        assert!(!gef_necessary_condition(&out.instance).expect("defined"));
        // The necessary condition fails by exactly the shading margin scaled
        // with the first bidder's click gap.
        let climb = |i: usize| &(&ctr[i][0] - &ctr[i][1]) * &out.values[i];
        let g1 = &ctr[0][0] - &ctr[0][1];
        assert_eq!(&climb(2) - &climb(0), &g1 * &out.params.gamma1);

        let forward = vcg_supported(&out.instance, &OrderOfSale::best_to_worst(2), false)
            .expect("defined");
        assert!(!forward.feasible);
        assert_eq!(forward.target.prices, vec![qi(1), q(3, 8)]);
        let reverse =
            vcg_supported(&out.instance, &OrderOfSale(vec![1, 0]), false).expect("defined");
        assert!(!reverse.feasible);
    }

    #[test]
    fn input_validation_rejects_malformed_requests() {
        let instance = separable();
        assert!(matches!(
            is_globally_envy_free(&instance, &Allocation(vec![0, 1]), &[qi(1)]),
            Err(EnvyError::WrongPriceCount { need: 2, got: 1 })
        ));
        assert!(matches!(
            is_globally_envy_free(&instance, &Allocation(vec![0, 1]), &[qi(-1), qi(0)]),
            Err(EnvyError::NegativePrice { slot: 1 })
        ));

        let wide = Instance::new(
            vec![qi(2), qi(1), qi(1)],
            vec![vec![qi(1), q(1, 2), q(1, 4)]; 3],
        )
        .expect("valid instance");
        assert!(matches!(
            gef_necessary_condition(&wide),
            Err(EnvyError::WrongSlotCount { got: 3 })
        ));

        let short = vec![vec![qi(1), q(1, 2)]; 2];
        assert!(matches!(
            generate_bad_values(&short, &qi(1)),
            Err(EnvyError::BadCtrShape { rows: 2, .. })
        ));
        let flat = vec![
            vec![qi(1), qi(1)],
            vec![qi(1), q(1, 2)],
            vec![qi(1), q(1, 4)],
        ];
        assert!(matches!(
            generate_bad_values(&flat, &qi(1)),
            Err(EnvyError::BadCtrRow { row: 1 })
        ));
        let ctr = vec![
            vec![qi(1), q(1, 2)],
            vec![qi(1), q(1, 2)],
            vec![qi(1), q(1, 4)],
        ];
        assert!(matches!(
            generate_bad_values(&ctr, &Q::zero()),
            Err(EnvyError::NonPositiveV3)
        ));
    }
}
