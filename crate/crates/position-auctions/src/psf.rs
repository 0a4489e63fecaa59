//! Price-support forests: from a VCG outcome to per-slot bids that an
//! order-optimizing second-price sale cannot improve on.
//!
//! After padding an instance with virtual zero-rate slots until it is
//! square, every bidder wins exactly one slot and can be identified with
//! it. Whenever a slot's VCG price is positive, some other winner is
//! exactly indifferent between keeping its own slot and taking that one at
//! that price; recording each such indifference as a directed edge yields a
//! graph in which every node is reachable from a zero-price node. A
//! spanning forest of that graph names, for every positively priced slot,
//! one indifferent winner that *supports* the price, and selling slots
//! children-first keeps each supporter in the auction until the slot it
//! supports has been sold.
//!
//! Publishing each winner's own per-impression value on its own slot plus
//! the supported price along each forest edge then makes the expressive
//! auction — which picks its own revenue-maximizing sale order — charge
//! exactly the VCG prices, with nobody bidding above value anywhere.
//! Zero-price slots attract only their winner's own bid, so under the rule
//! that a slot with fewer than two nonzero bids stays unsold they go unsold
//! at price zero, which matches their VCG price; every positively priced
//! slot is sold to its VCG winner. No deviation lets any bidder win any
//! slot below that slot's VCG price or collect more than its VCG utility.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::mechanisms::{
    run_expressive_with_rule, vcg_result, ExpressiveBidProfile, MechanismError, OrderOfSale,
    UnsoldRule,
};
use crate::model::{efficient_allocations, Allocation, Instance, ModelError, Outcome};
use crate::rational::{qi, Q};

/// Everything that can go wrong while building or checking price support.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsfError {
    /// The operation needs one slot per bidder; pad the instance first.
    #[error("instance must be square (one slot per bidder): {bidders} bidders, {slots} slots")]
    NotSquare { bidders: usize, slots: usize },
    /// The supplied outcome is not the VCG result of the instance.
    #[error("outcome disagrees with the VCG result of this instance")]
    OutcomeMismatch,
    /// The welfare maximum is attained by allocations that differ in some
    /// slot's realized weight, so "bidder i holds slot i" is ambiguous.
    #[error(
        "welfare-maximizing assignment is ambiguous between materially \
         different allocations ({count} maximizers)"
    )]
    NonUniqueVcg { count: usize },
    /// The price vector does not have one entry per node.
    #[error("price vector has {got} entries for {need} nodes")]
    WrongPriceCount { need: usize, got: usize },
    /// A supported price is negative (1-based slot).
    #[error("slot {slot} has a negative price")]
    NegativePrice { slot: usize },
    /// The forest's parent map does not have one entry per node.
    #[error("forest parent map has {got} entries for {need} nodes")]
    WrongParentCount { need: usize, got: usize },
    /// A parent index points outside the node set (all 1-based).
    #[error("node {node} names parent {parent}, but there are only {nodes} nodes")]
    ParentOutOfRange {
        node: usize,
        parent: usize,
        nodes: usize,
    },
    /// Following parents from the named node never reaches a root.
    #[error("parent map is cyclic through node {node}")]
    CyclicParentMap { node: usize },
    /// The root list disagrees with the set of parentless nodes.
    #[error("root list disagrees with the parent map")]
    RootListMismatch,
    /// A root would have to support a positive price (1-based node).
    #[error("node {node} is a root but its slot has a positive price")]
    RootWithPositivePrice { node: usize },
    /// A zero-price slot needs no supporter yet has a parent (1-based node).
    #[error("node {node} has a parent but its slot already has price zero")]
    SupportedFreeSlot { node: usize },
    /// A claimed support edge breaks the supporter's exact indifference
    /// (both 1-based).
    #[error("forest edge ({parent}, {child}) breaks the supporter's indifference")]
    NotAnIndifferenceEdge { parent: usize, child: usize },
    /// A bidder index outside the instance.
    #[error("bidder index {got} out of range for {bidders} bidders")]
    BidderOutOfRange { got: usize, bidders: usize },
    /// Invalid instance data surfaced while rebuilding one.
    #[error(transparent)]
    Model(#[from] ModelError),
    /// Invalid bids or capacity overruns surfaced by the auctions.
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

mod one_based_nodes {
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(nodes: &[usize], s: S) -> Result<S::Ok, S::Error> {
        let shifted: Vec<usize> = nodes.iter().map(|&i| i + 1).collect();
        shifted.serialize(s)
    }
}

mod one_based_parents {
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(parent: &[Option<usize>], s: S) -> Result<S::Ok, S::Error> {
        let shifted: Vec<Option<usize>> = parent.iter().map(|p| p.map(|i| i + 1)).collect();
        shifted.serialize(s)
    }
}

mod one_based_edges {
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(edges: &[(usize, usize)], s: S) -> Result<S::Ok, S::Error> {
        let shifted: Vec<[usize; 2]> = edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect();
        shifted.serialize(s)
    }
}

/// Exact-indifference structure of a square VCG outcome.
///
/// Node `k` stands for slot `k` and for the bidder the VCG assignment put
/// there (`assigned_bidder[k]` keeps the original index, so the relabeling
/// is reversible). A directed edge `(i, j)` records that node `i`'s bidder
/// is exactly as happy taking slot `j` at its price as keeping its own
/// slot: `α_{i,i}v_i − p_i = α_{i,j}v_i − p_j` after relabeling. Because
/// VCG prices leave no envy, a missing edge always means strict preference
/// for the own slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndifferenceGraph {
    /// Number of nodes (= bidders = slots).
    pub nodes: usize,
    /// Directed indifference edges, sorted; 0-based internally, 1-based in
    /// JSON.
    #[serde(with = "one_based_edges")]
    pub edges: Vec<(usize, usize)>,
    /// Original index of the bidder holding each slot (1-based in JSON).
    #[serde(with = "one_based_nodes")]
    pub assigned_bidder: Vec<usize>,
}

impl IndifferenceGraph {
    /// Whether the exact-indifference edge `(i, j)` is present (0-based).
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }
}

/// A spanning forest of the indifference graph, edges pointing away from
/// the roots.
///
/// `parent[j] = Some(i)` means the indifference edge `(i, j)` is in the
/// forest: node `i`'s bidder supports slot `j`'s price. Roots are exactly
/// the zero-price nodes — free slots need no support. Serialized as a
/// 1-based parent array with `null` at the roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PriceSupportForest {
    /// Supporter of each node, `None` at roots (1-based or null in JSON).
    #[serde(with = "one_based_parents")]
    pub parent: Vec<Option<usize>>,
    /// All roots, ascending (1-based in JSON).
    #[serde(with = "one_based_nodes")]
    pub roots: Vec<usize>,
}

impl PriceSupportForest {
    /// Distance of every node from its root, rejecting out-of-range
    /// parents and cycles.
    fn try_depths(&self) -> Result<Vec<usize>, PsfError> {
        let n = self.parent.len();
        let mut depth: Vec<Option<usize>> = vec![None; n];
        for start in 0..n {
            if depth[start].is_some() {
                continue;
            }
            let mut chain = vec![start];
            loop {
                let cur = *chain.last().expect("chain starts nonempty");
                if depth[cur].is_some() {
                    break;
                }
                match self.parent[cur] {
                    None => break,
                    Some(p) => {
                        if p >= n {
                            return Err(PsfError::ParentOutOfRange {
                                node: cur + 1,
                                parent: p + 1,
                                nodes: n,
                            });
                        }
                        if chain.contains(&p) {
                            return Err(PsfError::CyclicParentMap { node: p + 1 });
                        }
                        chain.push(p);
                    }
                }
            }
            let mut d = {
                let top = *chain.last().expect("chain stays nonempty");
                depth[top].unwrap_or(0)
            };
            for &node in chain.iter().rev() {
                match depth[node] {
                    Some(known) => d = known + 1,
                    None => {
                        depth[node] = Some(d);
                        d += 1;
                    }
                }
            }
        }
        Ok(depth
            .into_iter()
            .map(|d| d.expect("every node got a depth"))
            .collect())
    }

    /// Check this forest against the graph and prices it claims to
    /// support: right shape, acyclic, roots exactly the zero-price nodes,
    /// and every forest edge an indifference edge.
    pub fn validate(&self, graph: &IndifferenceGraph, prices: &[Q]) -> Result<(), PsfError> {
        let n = self.parent.len();
        if graph.nodes != n {
            return Err(PsfError::WrongParentCount {
                need: graph.nodes,
                got: n,
            });
        }
        check_prices(n, prices)?;
        self.try_depths()?;
        let parentless: Vec<usize> = (0..n).filter(|&j| self.parent[j].is_none()).collect();
        if self.roots != parentless {
            return Err(PsfError::RootListMismatch);
        }
        for j in 0..n {
            match self.parent[j] {
                None => {
                    if !prices[j].is_zero() {
                        return Err(PsfError::RootWithPositivePrice { node: j + 1 });
                    }
                }
                Some(i) => {
                    if prices[j].is_zero() {
                        return Err(PsfError::SupportedFreeSlot { node: j + 1 });
                    }
                    if !graph.has_edge(i, j) {
                        return Err(PsfError::NotAnIndifferenceEdge {
                            parent: i + 1,
                            child: j + 1,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_prices(n: usize, prices: &[Q]) -> Result<(), PsfError> {
    if prices.len() != n {
        return Err(PsfError::WrongPriceCount {
            need: n,
            got: prices.len(),
        });
    }
    for (j, p) in prices.iter().enumerate() {
        if p.is_negative() {
            return Err(PsfError::NegativePrice { slot: j + 1 });
        }
    }
    Ok(())
}

/// Append virtual zero-rate slots until the instance is square.
///
/// The extra slots click for nobody, so welfare, the assignment of real
/// slots, and all real VCG prices are unchanged, and every virtual slot's
/// VCG price is zero; an already-square instance comes back as is.
pub fn pad_to_square(instance: &Instance) -> Instance {
    let n = instance.n();
    if instance.m() == n {
        return instance.clone();
    }
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row = instance.ctr_row(i).to_vec();
            row.resize(n, Q::zero());
            row
        })
        .collect();
    Instance::new(instance.values().to_vec(), rows)
        .expect("zero-padding a valid instance preserves validity")
}

/// Build the exact-indifference graph of a square instance's VCG outcome.
///
/// `vcg` must be [`vcg_result`] of `instance` — anything else is rejected,
/// so the edges genuinely describe envy-free minimum prices. Welfare ties
/// are tolerated only when every maximizer places the same bidder in every
/// slot whose realized weight is positive (so maximizers differ only in how
/// zero-weight bidders permute over zero-weight slots, as the losers of a
/// zero-padded instance do); the assignment actually used is then the
/// lexicographically smallest one, which is the one `vcg` carries. Any
/// other tie is reported as [`PsfError::NonUniqueVcg`]: when two maximizers
/// disagree about who holds a slot that carries weight, "bidder `i` holds
/// slot `i`" is ambiguous, and the revenue-maximizing sale order is free to
/// realize the other assignment, so no bid matrix can pin down the outcome.
pub fn build_indifference_graph(
    instance: &Instance,
    vcg: &Outcome,
) -> Result<IndifferenceGraph, PsfError> {
    let n = instance.n();
    if instance.m() != n {
        return Err(PsfError::NotSquare {
            bidders: n,
            slots: instance.m(),
        });
    }
    let recomputed = vcg_result(instance);
    if recomputed.winners != vcg.winners || recomputed.prices != vcg.prices {
        return Err(PsfError::OutcomeMismatch);
    }
    let eff = efficient_allocations(instance);
    if !eff.unique {
        let canonical = eff.allocations[0].winners();
        let materially_different = |alloc: &Allocation| {
            alloc.winners().iter().enumerate().any(|(j, &i)| {
                i != canonical[j]
                    && !(instance.weight(i, j).is_zero()
                        && instance.weight(canonical[j], j).is_zero())
            })
        };
        if eff.allocations[1..].iter().any(materially_different) {
            return Err(PsfError::NonUniqueVcg {
                count: eff.allocations.len(),
            });
        }
    }
    let assigned_bidder: Vec<usize> = vcg
        .winners
        .iter()
        .map(|w| w.expect("square VCG outcomes sell every slot"))
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        let own = &instance.weight(assigned_bidder[i], i) - &vcg.prices[i];
        debug_assert!(!own.is_negative(), "VCG is individually rational");
        for j in 0..n {
            if j == i {
                continue;
            }
            let other = &instance.weight(assigned_bidder[i], j) - &vcg.prices[j];
            debug_assert!(own >= other, "VCG prices are envy-free");
            if own == other {
                edges.push((i, j));
            }
        }
    }
    Ok(IndifferenceGraph {
        nodes: n,
        edges,
        assigned_bidder,
    })
}

/// Extract a price support forest from the indifference graph.
///
/// Zero-price nodes become the roots; every other node is adopted by its
/// lowest-index indifferent supporter at minimal distance from the roots
/// (a breadth-first spanning forest, levels processed in ascending node
/// order).
///
/// # Panics
///
/// Panics if some node cannot be reached from any zero-price node. For
/// true VCG prices this cannot happen — a stranded, positively priced slot
/// would admit a price cut that keeps everyone envy-free, contradicting
/// price minimality — so hitting the panic means the graph or prices were
/// not built from a genuine VCG outcome.
pub fn build_psf(graph: &IndifferenceGraph, prices: &[Q]) -> Result<PriceSupportForest, PsfError> {
    let n = graph.nodes;
    check_prices(n, prices)?;
    let roots: Vec<usize> = (0..n).filter(|&j| prices[j].is_zero()).collect();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    for &r in &roots {
        seen[r] = true;
    }
    let mut level = roots.clone();
    while !level.is_empty() {
        let mut next = Vec::new();
        for &i in &level {
            for &(a, b) in &graph.edges {
                if a == i && !seen[b] {
                    seen[b] = true;
                    parent[b] = Some(i);
                    next.push(b);
                }
            }
        }
        next.sort_unstable();
        level = next;
    }
    if let Some(stranded) = (0..n).find(|&j| !seen[j]) {
        panic!(
            "support invariant violated: node {} (price {}) is unreachable from every \
             zero-price node; the prices cannot be the VCG prices of this graph's instance",
            stranded + 1,
            prices[stranded],
        );
    }
    Ok(PriceSupportForest { parent, roots })
}

/// The price-supporting order of sale: children before parents.
///
/// Selling a slot only after everything it supports has been sold keeps
/// each supporter in the auction while its bid is still needed. The order
/// is the reverse breadth-first traversal of the forest — deepest nodes
/// first, ties by ascending index — so an all-roots forest yields the
/// identity order.
///
/// # Panics
///
/// Panics if the parent map is cyclic or points outside the node set;
/// [`build_psf`] never produces such a forest.
pub fn pso_from_psf(forest: &PriceSupportForest) -> OrderOfSale {
    let depth = forest
        .try_depths()
        .expect("price support forests are acyclic");
    let mut order: Vec<usize> = (0..depth.len()).collect();
    order.sort_by(|&a, &b| depth[b].cmp(&depth[a]).then(a.cmp(&b)));
    OrderOfSale(order)
}

/// The per-slot bid profile that supports the VCG outcome.
///
/// Every winner bids its full per-impression value on its own slot
/// (`b_{i,i} = α_{i,i}·v_i`), each supporter bids the supported slot's
/// price along its forest edge (`b_{i,j} = p_j`), and every other bid is
/// zero. Indifference plus individual rationality give `p_j ≤ α_{i,j}·v_i`
/// on every forest edge, so nobody ever bids above value. Running the
/// expressive auction on these bids sells every positively priced slot to
/// its VCG winner at its VCG price and leaves zero-price slots unsold at
/// price zero (they attract only one nonzero bid).
///
/// The forest and outcome are revalidated against the instance, so a
/// hand-altered forest or a non-VCG outcome is rejected rather than
/// silently producing unsupported bids.
pub fn expressive_equilibrium_bids(
    instance: &Instance,
    forest: &PriceSupportForest,
    vcg: &Outcome,
) -> Result<ExpressiveBidProfile, PsfError> {
    let n = instance.n();
    if instance.m() != n {
        return Err(PsfError::NotSquare {
            bidders: n,
            slots: instance.m(),
        });
    }
    let recomputed = vcg_result(instance);
    if recomputed.winners != vcg.winners || recomputed.prices != vcg.prices {
        return Err(PsfError::OutcomeMismatch);
    }
    if forest.parent.len() != n {
        return Err(PsfError::WrongParentCount {
            need: n,
            got: forest.parent.len(),
        });
    }
    forest.try_depths()?;
    let parentless: Vec<usize> = (0..n).filter(|&j| forest.parent[j].is_none()).collect();
    if forest.roots != parentless {
        return Err(PsfError::RootListMismatch);
    }
    let assigned_bidder: Vec<usize> = vcg
        .winners
        .iter()
        .map(|w| w.expect("square VCG outcomes sell every slot"))
        .collect();
    let mut rows = vec![vec![Q::zero(); n]; n];
    for (k, &bidder) in assigned_bidder.iter().enumerate() {
        rows[bidder][k] = instance.weight(bidder, k);
    }
    for j in 0..n {
        match forest.parent[j] {
            None => {
                if !vcg.prices[j].is_zero() {
                    return Err(PsfError::RootWithPositivePrice { node: j + 1 });
                }
            }
            Some(i) => {
                if vcg.prices[j].is_zero() {
                    return Err(PsfError::SupportedFreeSlot { node: j + 1 });
                }
                let supporter = assigned_bidder[i];
                let keep = &instance.weight(supporter, i) - &vcg.prices[i];
                let take = &instance.weight(supporter, j) - &vcg.prices[j];
                if keep != take {
                    return Err(PsfError::NotAnIndifferenceEdge {
                        parent: i + 1,
                        child: j + 1,
                    });
                }
                rows[supporter][j] = vcg.prices[j].clone();
            }
        }
    }
    for (i, row) in rows.iter().enumerate() {
        for (j, bid) in row.iter().enumerate() {
            debug_assert!(
                *bid <= instance.weight(i, j),
                "support bids never exceed value"
            );
        }
    }
    Ok(ExpressiveBidProfile(rows))
}

/// Whether an expressive outcome realizes a VCG outcome under the unsold
/// convention.
///
/// Prices must match exactly; every sold slot must go to its VCG winner;
/// and a slot may stay unsold only where the VCG price is zero (the VCG
/// winner of such a slot pays nothing, and a slot with a single nonzero
/// bid cannot be sold at all).
pub fn reproduces_vcg(candidate: &Outcome, target: &Outcome) -> bool {
    candidate.prices == target.prices
        && candidate.winners.len() == target.winners.len()
        && candidate
            .winners
            .iter()
            .zip(&target.winners)
            .zip(&target.prices)
            .all(|((sold, vcg), price)| sold == vcg || (sold.is_none() && price.is_zero()))
}

/// Exhaustively confirm that one bidder cannot gain by deviating.
///
/// The outcome of the expressive auction, as a function of one bidder's
/// bid vector, only changes where some coordinate crosses another
/// remaining bid, so it suffices to try a finite grid per slot: zero,
/// every competing bid level, the midpoints between consecutive levels,
/// one point above them all, and the bidder's own per-impression value.
/// Each grid value is tried both as a single-coordinate change to the
/// bidder's equilibrium row and as a lone bid on that slot with the rest
/// of the row zeroed.
///
/// Returns `true` when, across every such deviation, the bidder never wins
/// any slot below that slot's VCG price and never collects more than its
/// VCG utility. The second-price rule that a slot with fewer than two
/// nonzero bids stays unsold is load-bearing here: without it a deviator
/// could pick up an unsupported slot for free.
pub fn verify_no_profitable_deviation(
    instance: &Instance,
    bids: &ExpressiveBidProfile,
    bidder: usize,
) -> Result<bool, PsfError> {
    verify_no_profitable_deviation_with_rule(
        instance,
        bids,
        bidder,
        UnsoldRule::RequireTwoNonzeroBids,
    )
}

/// [`verify_no_profitable_deviation`] with the unsold rule chosen by the
/// caller; `SellToHighestAlways` is the diagnostic mode that shows why the
/// two-nonzero-bids rule matters.
pub(crate) fn verify_no_profitable_deviation_with_rule(
    instance: &Instance,
    bids: &ExpressiveBidProfile,
    bidder: usize,
    rule: UnsoldRule,
) -> Result<bool, PsfError> {
    let n = instance.n();
    let m = instance.m();
    if bidder >= n {
        return Err(PsfError::BidderOutOfRange {
            got: bidder,
            bidders: n,
        });
    }
    bids.validate(instance)?;
    let target = vcg_result(instance);
    let mut deviations: BTreeSet<Vec<Q>> = BTreeSet::new();
    for j in 0..m {
        let mut levels: BTreeSet<Q> = BTreeSet::new();
        levels.insert(Q::zero());
        for i in (0..n).filter(|&i| i != bidder) {
            levels.insert(bids.0[i][j].clone());
        }
        let sorted: Vec<Q> = levels.into_iter().collect();
        let mut grid: BTreeSet<Q> = sorted.iter().cloned().collect();
        for pair in sorted.windows(2) {
            grid.insert((&pair[0] + &pair[1]) / &qi(2));
        }
        grid.insert(sorted.last().expect("levels contain zero") + &Q::one());
        grid.insert(instance.weight(bidder, j));
        for x in grid {
            let mut tweaked = bids.0[bidder].clone();
            tweaked[j] = x.clone();
            deviations.insert(tweaked);
            let mut solo = vec![Q::zero(); m];
            solo[j] = x;
            deviations.insert(solo);
        }
    }
    deviations.remove(&bids.0[bidder]);
    for row in deviations {
        let mut profile = bids.clone();
        profile.0[bidder] = row;
        let (outcome, _) = run_expressive_with_rule(instance, &profile, rule)?;
        for (slot, winner) in outcome.winners.iter().enumerate() {
            if *winner == Some(bidder) && outcome.prices[slot] < target.prices[slot] {
                return Ok(false);
            }
        }
        if outcome.utilities[bidder] > target.utilities[bidder] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::run_expressive_auction_with_order;
    use crate::rational::q;
    use crate::showcase::table3;

    fn padded_showcase() -> (Instance, Outcome) {
        let padded = pad_to_square(&table3());
        let vcg = vcg_result(&padded);
        (padded, vcg)
    }

    fn showcase_pipeline() -> (Instance, Outcome, IndifferenceGraph, PriceSupportForest) {
        let (padded, vcg) = padded_showcase();
        let graph = build_indifference_graph(&padded, &vcg).expect("showcase VCG is unique");
        let forest = build_psf(&graph, &vcg.prices).expect("prices are well-formed");
        (padded, vcg, graph, forest)
    }

    #[test]
    fn padding_appends_zero_rate_slots_and_keeps_square_instances() {
        let padded = pad_to_square(&table3());
        assert_eq!((padded.n(), padded.m()), (4, 4));
        for i in 0..4 {
            assert_eq!(padded.ctr(i, 3), &qi(0));
            assert_eq!(padded.ctr_row(i)[..3], table3().ctr_row(i)[..]);
        }
        assert_eq!(pad_to_square(&padded), padded);

        let vcg = vcg_result(&padded);
        assert_eq!(vcg.winners, vec![Some(0), Some(1), Some(2), Some(3)]);
        assert_eq!(vcg.prices, vec![qi(7), qi(5), qi(1), qi(0)]);
    }

    #[test]
    fn indifference_edges_of_the_showcase_form_a_path() {
        let (padded, vcg) = padded_showcase();
        let graph = build_indifference_graph(&padded, &vcg).unwrap();
        assert_eq!(graph.nodes, 4);
        assert_eq!(graph.assigned_bidder, vec![0, 1, 2, 3]);
        assert_eq!(graph.edges, vec![(0, 2), (1, 0), (3, 1)]);
        assert!(graph.has_edge(3, 1));
        assert!(!graph.has_edge(1, 3));
    }

    #[test]
    fn forest_roots_at_the_free_slot_and_chains_the_support() {
        let (_, vcg, graph, forest) = showcase_pipeline();
        assert_eq!(forest.parent, vec![Some(1), Some(3), Some(0), None]);
        assert_eq!(forest.roots, vec![3]);
        forest.validate(&graph, &vcg.prices).unwrap();
    }

    #[test]
    fn sale_order_sells_children_before_parents() {
        let (_, _, _, forest) = showcase_pipeline();
        assert_eq!(pso_from_psf(&forest), OrderOfSale(vec![2, 0, 1, 3]));

        let all_roots = PriceSupportForest {
            parent: vec![None; 3],
            roots: vec![0, 1, 2],
        };
        assert_eq!(pso_from_psf(&all_roots), OrderOfSale(vec![0, 1, 2]));

        let star = PriceSupportForest {
            parent: vec![Some(2), Some(2), None],
            roots: vec![2],
        };
        assert_eq!(pso_from_psf(&star), OrderOfSale(vec![0, 1, 2]));
    }

    #[test]
    fn equilibrium_bids_reproduce_the_vcg_outcome() {
        let (padded, vcg, _, forest) = showcase_pipeline();
        let bids = expressive_equilibrium_bids(&padded, &forest, &vcg).unwrap();
        let z = qi(0);
        assert_eq!(
            bids.0,
            vec![
                vec![qi(10), z.clone(), qi(1), z.clone()],
                vec![qi(7), qi(6), z.clone(), z.clone()],
                vec![z.clone(), z.clone(), qi(4), z.clone()],
                vec![z.clone(), qi(5), z.clone(), z],
            ]
        );
        for i in 0..4 {
            for j in 0..4 {
                assert!(bids.0[i][j] <= padded.weight(i, j), "overbid at ({i},{j})");
            }
        }
        let (outcome, order) = run_expressive_auction_with_order(&padded, &bids).unwrap();
        assert_eq!(order, OrderOfSale(vec![2, 0, 1, 3]));
        assert_eq!(outcome.winners, vec![Some(0), Some(1), Some(2), None]);
        assert_eq!(outcome.prices, vec![qi(7), qi(5), qi(1), qi(0)]);
        assert_eq!(outcome.revenue(), qi(13));
        assert!(reproduces_vcg(&outcome, &vcg));
    }

    #[test]
    fn identical_bidders_at_a_weighted_slot_are_rejected_as_ambiguous() {
        // Two interchangeable bidders tie for a slot that carries weight, so
        // the sale order is free to realize either assignment; the graph
        // refuses rather than promise a reproduction it cannot pin down.
        let inst = Instance::new(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), qi(1)], vec![qi(1), qi(1)]],
        )
        .unwrap();
        let vcg = vcg_result(&inst);
        assert_eq!(vcg.prices, vec![qi(0), qi(0)]);
        assert_eq!(
            build_indifference_graph(&inst, &vcg),
            Err(PsfError::NonUniqueVcg { count: 2 })
        );
    }

    #[test]
    fn winner_swaps_at_weighted_slots_are_rejected_even_with_equal_weights() {
        // Both maximizers realize the identical weight profile (8/3, 8/3),
        // yet disagree about who holds the first slot. Under the constructed
        // bids the revenue-maximizing sale order then realizes the wrong
        // assignment (selling to the canonical winner would strand the other
        // slot below two nonzero bids), so the gate must reject this tie.
        let inst = Instance::new(
            vec![qi(4), qi(1), q(4, 3), q(7, 4)],
            vec![
                vec![q(2, 3), q(1, 4), qi(0), qi(0)],
                vec![q(8, 3), q(1, 4), qi(0), qi(0)],
                vec![q(5, 2), qi(2), qi(0), qi(0)],
                vec![q(3, 2), q(1, 3), qi(0), qi(0)],
            ],
        )
        .unwrap();
        let vcg = vcg_result(&inst);
        // Two choices for the contested slot times the two loser
        // permutations over the weightless slots.
        assert_eq!(
            build_indifference_graph(&inst, &vcg),
            Err(PsfError::NonUniqueVcg { count: 4 })
        );
    }

    #[test]
    fn support_holds_prices_even_when_a_free_slot_goes_unsold() {
        let inst = Instance::new(
            vec![qi(3), qi(2)],
            vec![vec![qi(1), q(1, 2)], vec![qi(1), q(1, 2)]],
        )
        .unwrap();
        let vcg = vcg_result(&inst);
        assert_eq!(vcg.prices, vec![qi(1), qi(0)]);
        let graph = build_indifference_graph(&inst, &vcg).unwrap();
        assert_eq!(graph.edges, vec![(1, 0)]);
        let forest = build_psf(&graph, &vcg.prices).unwrap();
        assert_eq!(forest.parent, vec![Some(1), None]);
        assert_eq!(pso_from_psf(&forest), OrderOfSale(vec![0, 1]));
        let bids = expressive_equilibrium_bids(&inst, &forest, &vcg).unwrap();
        assert_eq!(bids.0, vec![vec![qi(3), qi(0)], vec![qi(1), qi(1)]]);
        let (outcome, _) = run_expressive_auction_with_order(&inst, &bids).unwrap();
        // The second slot is real but free: with only its winner bidding on
        // it, it stays unsold at price zero, which is exactly its VCG price.
        assert_eq!(outcome.winners, vec![Some(0), None]);
        assert_eq!(outcome.prices, vec![qi(1), qi(0)]);
        assert!(reproduces_vcg(&outcome, &vcg));
        for bidder in 0..2 {
            assert!(verify_no_profitable_deviation(&inst, &bids, bidder).unwrap());
        }
    }

    #[test]
    fn relabeling_tracks_the_assignment_order() {
        let inst = Instance::new(
            vec![qi(2), qi(3)],
            vec![vec![qi(1), q(1, 2)], vec![qi(1), q(1, 2)]],
        )
        .unwrap();
        let vcg = vcg_result(&inst);
        assert_eq!(vcg.winners, vec![Some(1), Some(0)]);
        let graph = build_indifference_graph(&inst, &vcg).unwrap();
        assert_eq!(graph.assigned_bidder, vec![1, 0]);
        assert_eq!(graph.edges, vec![(1, 0)]);
        let forest = build_psf(&graph, &vcg.prices).unwrap();
        assert_eq!(forest.parent, vec![Some(1), None]);
        let bids = expressive_equilibrium_bids(&inst, &forest, &vcg).unwrap();
        assert_eq!(bids.0, vec![vec![qi(1), qi(1)], vec![qi(3), qi(0)]]);
        let (outcome, _) = run_expressive_auction_with_order(&inst, &bids).unwrap();
        assert!(reproduces_vcg(&outcome, &vcg));
        for bidder in 0..2 {
            assert!(verify_no_profitable_deviation(&inst, &bids, bidder).unwrap());
        }
    }

    #[test]
    fn single_bidder_support_is_trivially_stable() {
        let inst = Instance::new(vec![qi(5)], vec![vec![qi(1)]]).unwrap();
        let vcg = vcg_result(&inst);
        assert_eq!(vcg.prices, vec![qi(0)]);
        let graph = build_indifference_graph(&inst, &vcg).unwrap();
        assert!(graph.edges.is_empty());
        let forest = build_psf(&graph, &vcg.prices).unwrap();
        assert_eq!(forest.parent, vec![None]);
        assert_eq!(forest.roots, vec![0]);
        assert_eq!(pso_from_psf(&forest), OrderOfSale(vec![0]));
        let bids = expressive_equilibrium_bids(&inst, &forest, &vcg).unwrap();
        assert_eq!(bids.0, vec![vec![qi(5)]]);
        let (outcome, _) = run_expressive_auction_with_order(&inst, &bids).unwrap();
        assert_eq!(outcome.winners, vec![None]);
        assert!(reproduces_vcg(&outcome, &vcg));
        assert!(verify_no_profitable_deviation(&inst, &bids, 0).unwrap());
    }

    #[test]
    fn deviations_never_beat_the_vcg_payoff() {
        let (padded, vcg, _, forest) = showcase_pipeline();
        let bids = expressive_equilibrium_bids(&padded, &forest, &vcg).unwrap();
        for bidder in 0..4 {
            assert!(verify_no_profitable_deviation(&padded, &bids, bidder).unwrap());
        }
    }

    #[test]
    fn disabling_the_unsold_rule_exposes_free_slots() {
        let (padded, vcg, _, forest) = showcase_pipeline();
        let mut bids = expressive_equilibrium_bids(&padded, &forest, &vcg).unwrap();
        // Remove both nonzero bids on the first slot — its winner's own bid
        // and its supporter's price bid. The slot now has no nonzero
        // competitor from bidder 3's point of view.
        bids.0[0][0] = qi(0);
        bids.0[1][0] = qi(0);
        assert!(verify_no_profitable_deviation_with_rule(
            &padded,
            &bids,
            2,
            UnsoldRule::RequireTwoNonzeroBids
        )
        .unwrap());
        assert!(!verify_no_profitable_deviation_with_rule(
            &padded,
            &bids,
            2,
            UnsoldRule::SellToHighestAlways
        )
        .unwrap());
    }

    #[test]
    #[should_panic(expected = "unreachable from every zero-price node")]
    fn reachability_failure_is_a_bug_detector() {
        let graph = IndifferenceGraph {
            nodes: 2,
            edges: vec![],
            assigned_bidder: vec![0, 1],
        };
        let _ = build_psf(&graph, &[qi(0), qi(1)]);
    }

    #[test]
    fn forest_serializes_as_a_one_based_parent_array() {
        let (_, _, graph, forest) = showcase_pipeline();
        assert_eq!(
            serde_json::to_string(&forest).unwrap(),
            r#"{"parent":[2,4,1,null],"roots":[4]}"#
        );
        assert_eq!(
            serde_json::to_string(&graph).unwrap(),
            r#"{"nodes":4,"edges":[[1,3],[2,1],[4,2]],"assigned_bidder":[1,2,3,4]}"#
        );
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let raw = table3();
        let vcg = vcg_result(&raw);
        assert_eq!(
            build_indifference_graph(&raw, &vcg),
            Err(PsfError::NotSquare {
                bidders: 4,
                slots: 3
            })
        );

        let (padded, mut wrong) = padded_showcase();
        wrong.prices[0] = qi(6);
        assert_eq!(
            build_indifference_graph(&padded, &wrong),
            Err(PsfError::OutcomeMismatch)
        );

        // A genuine welfare tie: both assignments reach welfare 2 but realize
        // different weights per slot, so the relabeling would be ambiguous.
        let tied = Instance::new(
            vec![qi(1), qi(2)],
            vec![vec![qi(1), q(1, 2)], vec![q(3, 4), q(1, 2)]],
        )
        .unwrap();
        let outcome = vcg_result(&tied);
        assert_eq!(
            build_indifference_graph(&tied, &outcome),
            Err(PsfError::NonUniqueVcg { count: 2 })
        );

        let (padded, vcg) = padded_showcase();
        let graph = build_indifference_graph(&padded, &vcg).unwrap();
        assert_eq!(
            build_psf(&graph, &vcg.prices[..3]),
            Err(PsfError::WrongPriceCount { need: 4, got: 3 })
        );

        let forest = build_psf(&graph, &vcg.prices).unwrap();
        let mut rerooted = forest.clone();
        rerooted.parent[0] = None;
        rerooted.roots = vec![0, 3];
        assert_eq!(
            expressive_equilibrium_bids(&padded, &rerooted, &vcg),
            Err(PsfError::RootWithPositivePrice { node: 1 })
        );

        let mut rewired = forest.clone();
        rewired.parent[2] = Some(1);
        assert_eq!(
            expressive_equilibrium_bids(&padded, &rewired, &vcg),
            Err(PsfError::NotAnIndifferenceEdge {
                parent: 2,
                child: 3
            })
        );

        let ones = Instance::new(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), qi(1)], vec![qi(1), qi(1)]],
        )
        .unwrap();
        let ones_vcg = vcg_result(&ones);
        let overgrown = PriceSupportForest {
            parent: vec![None, Some(0)],
            roots: vec![0],
        };
        assert_eq!(
            expressive_equilibrium_bids(&ones, &overgrown, &ones_vcg),
            Err(PsfError::SupportedFreeSlot { node: 2 })
        );
        let cyclic = PriceSupportForest {
            parent: vec![Some(1), Some(0)],
            roots: vec![],
        };
        assert_eq!(
            expressive_equilibrium_bids(&ones, &cyclic, &ones_vcg),
            Err(PsfError::CyclicParentMap { node: 1 })
        );

        let bids = expressive_equilibrium_bids(&padded, &forest, &vcg).unwrap();
        assert_eq!(
            verify_no_profitable_deviation(&padded, &bids, 9),
            Err(PsfError::BidderOutOfRange {
                got: 9,
                bidders: 4
            })
        );
    }
}
