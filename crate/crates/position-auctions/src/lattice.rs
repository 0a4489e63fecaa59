//! Exhaustive scanning of bid profiles on a uniform grid.
//!
//! This is internal infrastructure for [`crate::equilibrium::brute_force_equilibria`].
//! All grid bids are multiples of `v_max / grid`, so every score and utility can be
//! rescaled to an integer once per scan; the inner loop then runs entirely on `i128`
//! comparisons instead of big-rational arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::mechanisms::{BidProfile, OrderOfSale, TieBreakRule};
use crate::model::Instance;
use crate::rational::Q;

/// Hard ceiling on the number of grid profiles a single scan may visit.
pub(crate) const MAX_LATTICE_PROFILES: u128 = 4_000_000;

/// Errors raised while preparing or running a grid scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LatticeError {
    /// The number of grid profiles exceeds [`MAX_LATTICE_PROFILES`].
    TooManyProfiles { profiles: u128 },
    /// Rescaled scores do not fit the integer fast path.
    ScaleOverflow,
    /// The grid resolution must be at least 1.
    ZeroGrid,
}

/// A grid of bid profiles together with integer-rescaled score tables.
pub(crate) struct LatticeGrid<'a> {
    instance: &'a Instance,
    order: &'a OrderOfSale,
    tie: &'a TieBreakRule,
    /// Grid step as an exact rational (`v_max / grid`).
    step: Q,
    /// Largest admissible grid index per bidder.
    caps: Vec<usize>,
    /// `score[i][j][t]` = rescaled score of bidder `i` on slot `j` bidding `t * step`.
    score: Vec<Vec<Vec<i128>>>,
    /// `weight[i][j]` = rescaled `ctr(i, j) * value(i)` (same scale as `score`).
    weight: Vec<Vec<i128>>,
}

/// Returns the least common multiple of the denominators of all instance data
/// and the grid step, i.e. a scale factor that clears every fraction in sight.
fn common_denominator(instance: &Instance, step: &Q) -> BigInt {
    let mut acc = BigInt::one();
    let mut fold = |q: &Q| acc = acc.lcm(q.denom());
    for i in 0..instance.n() {
        fold(instance.value(i));
        for j in 0..instance.m() {
            fold(instance.ctr(i, j));
        }
    }
    fold(step);
    acc
}

fn to_i128_checked(x: &BigInt) -> Result<i128, LatticeError> {
    x.to_i128().ok_or(LatticeError::ScaleOverflow)
}

/// Multiplies with both overflow checking and a headroom bound, so later
/// additive combinations of two table entries can never overflow.
fn mul_bounded(a: i128, b: i128) -> Result<i128, LatticeError> {
    let r = a.checked_mul(b).ok_or(LatticeError::ScaleOverflow)?;
    if r.abs() > i128::MAX / 4 {
        return Err(LatticeError::ScaleOverflow);
    }
    Ok(r)
}

impl<'a> LatticeGrid<'a> {
    /// Builds the grid and integer tables.
    ///
    /// Grid bids are `t * v_max / grid` for `t = 0..=grid`; when `allow_overbid`
    /// is false each bidder's indices are truncated at their own value.
    pub(crate) fn new(
        instance: &'a Instance,
        grid: u32,
        order: &'a OrderOfSale,
        tie: &'a TieBreakRule,
        allow_overbid: bool,
    ) -> Result<Self, LatticeError> {
        if grid == 0 {
            return Err(LatticeError::ZeroGrid);
        }
        let n = instance.n();
        let m = instance.m();
        let vmax = instance
            .values()
            .iter()
            .cloned()
            .fold(Q::zero(), |a, b| a.max(b));
        let step = vmax / &Q::from_int(i64::from(grid));

        // Per-bidder cap: the largest t with t * step <= value(i).
        let caps: Vec<usize> = (0..n)
            .map(|i| {
                if allow_overbid || step.is_zero() {
                    if step.is_zero() {
                        0
                    } else {
                        grid as usize
                    }
                } else {
                    // floor(value / step), never above the grid size.
                    let ratio = instance.value(i).clone() / &step;
                    let t = ratio.numer().div_floor(ratio.denom());
                    t.to_usize().map_or(grid as usize, |t| t.min(grid as usize))
                }
            })
            .collect();

        let scale = common_denominator(instance, &step);
        // Integer bid ladder: t * step * scale.
        let step_int = to_i128_checked(&(step.numer() * &scale / step.denom()))?;
        let mut score = vec![vec![Vec::new(); m]; n];
        let mut weight = vec![vec![0i128; m]; n];
        for i in 0..n {
            let v_int = {
                let v = instance.value(i);
                to_i128_checked(&(v.numer() * &scale / v.denom()))?
            };
            for j in 0..m {
                let a = instance.ctr(i, j);
                let a_int = to_i128_checked(&(a.numer() * &scale / a.denom()))?;
                weight[i][j] = mul_bounded(a_int, v_int)?;
                let mut col = Vec::with_capacity(caps[i] + 1);
                for t in 0..=caps[i] {
                    let bid_int = mul_bounded(step_int, t as i128)?;
                    col.push(mul_bounded(a_int, bid_int)?);
                }
                score[i][j] = col;
            }
        }

        Ok(Self {
            instance,
            order,
            tie,
            step,
            caps,
            score,
            weight,
        })
    }

    /// Number of profiles the exhaustive scan will visit.
    pub(crate) fn profile_count(&self) -> u128 {
        self.caps
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(*c as u128 + 1))
    }

    /// Converts a vector of grid indices to exact bids.
    fn bids_of(&self, ts: &[usize]) -> BidProfile {
        BidProfile(
            ts.iter()
                .map(|&t| &self.step * &Q::from_int(t as i64))
                .collect(),
        )
    }

    /// Runs the sequential auction on integer scores and returns the utility
    /// (in rescaled units) that `target` obtains under grid profile `ts`.
    fn utility_of(&self, ts: &[usize], target: usize) -> i128 {
        let n = self.instance.n();
        let mut remaining: Vec<bool> = vec![true; n];
        for &j in &self.order.0 {
            // Highest rescaled score among remaining bidders, then the tie set.
            let mut best: Option<i128> = None;
            for i in 0..n {
                if !remaining[i] {
                    continue;
                }
                let s = self.score[i][j][ts[i]];
                if best.is_none_or(|b| s > b) {
                    best = Some(s);
                }
            }
            let Some(best) = best else { break };
            let tied: Vec<usize> = (0..n)
                .filter(|&i| remaining[i] && self.score[i][j][ts[i]] == best)
                .collect();
            let winner = if tied.len() == 1 {
                tied[0]
            } else {
                self.tie.select(self.instance, &tied)
            };
            // Price per impression is the second-highest remaining score.
            let price = (0..n)
                .filter(|&i| remaining[i] && i != winner)
                .map(|i| self.score[i][j][ts[i]])
                .max()
                .unwrap_or(0);
            remaining[winner] = false;
            if winner == target {
                return self.weight[target][j] - price;
            }
        }
        0
    }

    /// True when no bidder can strictly improve by moving to another grid index.
    fn is_grid_equilibrium(&self, ts: &mut Vec<usize>) -> bool {
        let n = self.instance.n();
        for i in 0..n {
            let current = self.utility_of(ts, i);
            let original = ts[i];
            for t in 0..=self.caps[i] {
                if t == original {
                    continue;
                }
                ts[i] = t;
                let dev = self.utility_of(ts, i);
                ts[i] = original;
                if dev > current {
                    return false;
                }
            }
        }
        true
    }

    /// Visits every grid profile (odometer order) and reports each profile at
    /// which no bidder has a strictly improving grid deviation. The visitor
    /// returns `false` to stop the scan early.
    pub(crate) fn scan(
        &self,
        mut on_found: impl FnMut(BidProfile) -> bool,
    ) -> Result<(), LatticeError> {
        if self.profile_count() > MAX_LATTICE_PROFILES {
            return Err(LatticeError::TooManyProfiles {
                profiles: self.profile_count(),
            });
        }
        let n = self.instance.n();
        let mut ts = vec![0usize; n];
        loop {
            if self.is_grid_equilibrium(&mut ts) && !on_found(self.bids_of(&ts)) {
                return Ok(());
            }
            // Advance the odometer; the scan is done once it wraps around.
            let mut pos = 0;
            loop {
                if pos == n {
                    return Ok(());
                }
                if ts[pos] < self.caps[pos] {
                    ts[pos] += 1;
                    break;
                }
                ts[pos] = 0;
                pos += 1;
            }
        }
    }
}
