//! Auction instance model: valuations, click-through-rate matrices,
//! allocations, welfare, efficient allocations, and multiplicative
//! separability.
//!
//! An [`Instance`] has `n` bidders and `m ≤ n` slots. Bidder `i` values a
//! click at `v_i ≥ 0` and, when shown in slot `j`, is clicked with
//! probability `α_{i,j}`; each bidder's click-through-rates weakly decrease
//! down the slots. The rate matrix is *arbitrary*: it need not factor into a
//! slot effect times an ad effect, and [`separable_decomposition`] detects
//! exactly when it does.
//!
//! Indices are 0-based in code and 1-based in every serialized report and
//! error message.

use crate::assignment;
use crate::rational::Q;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Validation and usage errors for instances and allocations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    /// `values` and `ctr` disagree on the number of bidders.
    #[error("{values} values but {ctr_rows} click-through-rate rows")]
    BidderCountMismatch { values: usize, ctr_rows: usize },
    /// A click-through-rate row has the wrong number of slots.
    #[error("click-through-rate row for bidder {bidder} has {got} entries, expected {expected}")]
    RaggedCtrRow {
        bidder: usize,
        expected: usize,
        got: usize,
    },
    /// More slots than bidders.
    #[error("{slots} slots exceed {bidders} bidders; every slot must be fillable")]
    TooManySlots { slots: usize, bidders: usize },
    /// A negative valuation.
    #[error("bidder {bidder} has a negative value")]
    NegativeValue { bidder: usize },
    /// A negative click-through-rate.
    #[error("bidder {bidder} has a negative click-through-rate in slot {slot}")]
    NegativeCtr { bidder: usize, slot: usize },
    /// A row that increases down the slots.
    #[error(
        "bidder {bidder}'s click-through-rate increases from slot {slot} to slot {next}; \
         rows must weakly decrease"
    )]
    IncreasingCtrRow {
        bidder: usize,
        slot: usize,
        next: usize,
    },
    /// A zero rate under the strict-positivity flag.
    #[error("strict positivity requested but bidder {bidder} has a zero rate in slot {slot}")]
    ZeroCtrUnderStrictFlag { bidder: usize, slot: usize },
    /// An allocation whose length differs from the slot count.
    #[error("allocation names {got} winners for {expected} slots")]
    AllocationLengthMismatch { expected: usize, got: usize },
    /// An allocation naming a bidder that does not exist.
    #[error("allocation names bidder {bidder} but the instance has only {bidders} bidders")]
    WinnerOutOfRange { bidder: usize, bidders: usize },
    /// An allocation giving one bidder two slots.
    #[error("allocation assigns bidder {bidder} more than one slot")]
    DuplicateWinner { bidder: usize },
    /// Separability is undecidable in this encoding when a rate is zero.
    #[error(
        "bidder {bidder} has a zero click-through-rate in slot {slot}; \
         separability detection requires strictly positive rates"
    )]
    NotDecomposableWithZeros { bidder: usize, slot: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    values: Vec<Q>,
    ctr: Vec<Vec<Q>>,
    #[serde(default, skip_serializing_if = "is_false")]
    strict_positive_ctr: bool,
}

fn is_false(b: &bool) -> bool {
    !b
}

/// A position-auction instance: per-bidder click values and an arbitrary
/// (possibly non-separable) click-through-rate matrix.
///
/// Invariants enforced at construction and deserialization: at most as many
/// slots as bidders, nonnegative values and rates, weakly decreasing rows,
/// and — when `strict_positive_ctr` is set — strictly positive rates.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    values: Vec<Q>,
    ctr: Vec<Vec<Q>>,
    strict_positive_ctr: bool,
}

impl TryFrom<RawInstance> for Instance {
    type Error = ModelError;
    fn try_from(raw: RawInstance) -> Result<Self, ModelError> {
        Instance::with_flag(raw.values, raw.ctr, raw.strict_positive_ctr)
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> RawInstance {
        RawInstance {
            values: inst.values,
            ctr: inst.ctr,
            strict_positive_ctr: inst.strict_positive_ctr,
        }
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("values", &self.values)
            .field("ctr", &self.ctr)
            .field("strict_positive_ctr", &self.strict_positive_ctr)
            .finish()
    }
}

impl Instance {
    /// Build an instance allowing zero click-through-rates.
    pub fn new(values: Vec<Q>, ctr: Vec<Vec<Q>>) -> Result<Self, ModelError> {
        Self::with_flag(values, ctr, false)
    }

    /// Build an instance that additionally requires every rate to be
    /// strictly positive.
    pub fn new_strict(values: Vec<Q>, ctr: Vec<Vec<Q>>) -> Result<Self, ModelError> {
        Self::with_flag(values, ctr, true)
    }

    fn with_flag(values: Vec<Q>, ctr: Vec<Vec<Q>>, strict: bool) -> Result<Self, ModelError> {
        let n = values.len();
        if ctr.len() != n {
            return Err(ModelError::BidderCountMismatch {
                values: n,
                ctr_rows: ctr.len(),
            });
        }
        let m = ctr.first().map_or(0, Vec::len);
        for (i, row) in ctr.iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::RaggedCtrRow {
                    bidder: i + 1,
                    expected: m,
                    got: row.len(),
                });
            }
        }
        if m > n {
            return Err(ModelError::TooManySlots {
                slots: m,
                bidders: n,
            });
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_negative() {
                return Err(ModelError::NegativeValue { bidder: i + 1 });
            }
        }
        for (i, row) in ctr.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.is_negative() {
                    return Err(ModelError::NegativeCtr {
                        bidder: i + 1,
                        slot: j + 1,
                    });
                }
                if strict && a.is_zero() {
                    return Err(ModelError::ZeroCtrUnderStrictFlag {
                        bidder: i + 1,
                        slot: j + 1,
                    });
                }
            }
            for j in 0..m.saturating_sub(1) {
                if row[j] < row[j + 1] {
                    return Err(ModelError::IncreasingCtrRow {
                        bidder: i + 1,
                        slot: j + 1,
                        next: j + 2,
                    });
                }
            }
        }
        Ok(Instance {
            values,
            ctr,
            strict_positive_ctr: strict,
        })
    }

    /// Number of bidders.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Number of slots.
    pub fn m(&self) -> usize {
        self.ctr.first().map_or(0, Vec::len)
    }

    /// Bidder `i`'s value per click (0-based).
    pub fn value(&self, i: usize) -> &Q {
        &self.values[i]
    }

    /// All values.
    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// Click-through-rate of bidder `i` in slot `j` (0-based).
    pub fn ctr(&self, i: usize, j: usize) -> &Q {
        &self.ctr[i][j]
    }

    /// Bidder `i`'s full rate row.
    pub fn ctr_row(&self, i: usize) -> &[Q] {
        &self.ctr[i]
    }

    /// Whether strict positivity of every rate was required and verified.
    pub fn strict_positive_ctr(&self) -> bool {
        self.strict_positive_ctr
    }

    /// Expected welfare contribution `α_{i,j} · v_i` of bidder `i` in slot `j`.
    pub fn weight(&self, i: usize, j: usize) -> Q {
        &self.ctr[i][j] * &self.values[i]
    }

    /// Parse an instance from its JSON encoding
    /// (`{"values": ["1","1","2"], "ctr": [["1","1"],["1","1"],["2/5","1/5"]]}`).
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Canonical compact JSON encoding; parsing it back yields an equal
    /// instance.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }
}

/// An assignment of every slot to a distinct bidder; entry `j` is the 0-based
/// winner of slot `j`. Serializes with 1-based bidder indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Allocation(pub Vec<usize>);

impl Allocation {
    /// Winner of each slot, 0-based.
    pub fn winners(&self) -> &[usize] {
        &self.0
    }

    /// Number of slots covered.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True for the zero-slot allocation.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The slot bidder `i` wins, if any (0-based on both sides).
    pub fn slot_of(&self, i: usize) -> Option<usize> {
        self.0.iter().position(|&w| w == i)
    }
}

impl fmt::Display for Allocation {
    /// 1-based, e.g. `(1,2,3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, w) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", w + 1)?;
        }
        write!(f, ")")
    }
}

impl Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let one_based: Vec<usize> = self.0.iter().map(|w| w + 1).collect();
        one_based.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let one_based = Vec::<usize>::deserialize(d)?;
        let mut zero_based = Vec::with_capacity(one_based.len());
        for w in one_based {
            if w == 0 {
                return Err(serde::de::Error::custom(
                    "allocation winners are 1-based; 0 is not a bidder",
                ));
            }
            zero_based.push(w - 1);
        }
        Ok(Allocation(zero_based))
    }
}

/// Check that an allocation is usable with an instance: right length,
/// in-range winners, no bidder in two slots.
pub fn validate_allocation(instance: &Instance, alloc: &Allocation) -> Result<(), ModelError> {
    if alloc.len() != instance.m() {
        return Err(ModelError::AllocationLengthMismatch {
            expected: instance.m(),
            got: alloc.len(),
        });
    }
    let mut seen = vec![false; instance.n()];
    for &w in alloc.winners() {
        if w >= instance.n() {
            return Err(ModelError::WinnerOutOfRange {
                bidder: w + 1,
                bidders: instance.n(),
            });
        }
        if seen[w] {
            return Err(ModelError::DuplicateWinner { bidder: w + 1 });
        }
        seen[w] = true;
    }
    Ok(())
}

/// Expected welfare `Σ_j α_{winner(j),j} · v_{winner(j)}` of an allocation.
pub fn welfare(instance: &Instance, alloc: &Allocation) -> Result<Q, ModelError> {
    validate_allocation(instance, alloc)?;
    Ok(alloc
        .winners()
        .iter()
        .enumerate()
        .map(|(j, &i)| instance.weight(i, j))
        .sum())
}

/// All welfare-maximizing allocations of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EfficientAllocations {
    /// Every maximizer, in lexicographic order of the winner sequence.
    pub allocations: Vec<Allocation>,
    /// True iff exactly one allocation attains the maximum.
    pub unique: bool,
    /// The maximum welfare.
    pub max_welfare: Q,
}

/// Compute every welfare-maximizing allocation and whether it is unique.
///
/// The maximum is found by an exact optimal-assignment solve on the
/// `m × n` matrix `α_{i,j} · v_i`; ties are enumerated by branch-and-bound
/// with an exact completion bound.
pub fn efficient_allocations(instance: &Instance) -> EfficientAllocations {
    let weights: Vec<Vec<Q>> = (0..instance.m())
        .map(|j| (0..instance.n()).map(|i| instance.weight(i, j)).collect())
        .collect();
    let (raw, max_welfare) = assignment::all_max_weight_assignments(&weights);
    let allocations: Vec<Allocation> = raw.into_iter().map(Allocation).collect();
    let unique = allocations.len() == 1;
    EfficientAllocations {
        allocations,
        unique,
        max_welfare,
    }
}

/// A multiplicative factorization `α_{i,j} = μ_j · β_i` of a rate matrix,
/// normalized so that `μ_1 = 1` (hence `β_i = α_{i,1}`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparabilityDecomposition {
    /// Slot effects `μ_j`, weakly decreasing with `μ_1 = 1`.
    pub slot_effects: Vec<Q>,
    /// Ad effects `β_i`.
    pub ad_effects: Vec<Q>,
}

/// Detect whether the rate matrix factors as `α_{i,j} = μ_j · β_i`.
///
/// Returns the `μ_1 = 1`-normalized decomposition when the rows are all
/// proportional, `None` when they are not, and an error when any rate is
/// zero (ratios are then undefined; such matrices are out of scope here).
pub fn separable_decomposition(
    instance: &Instance,
) -> Result<Option<SeparabilityDecomposition>, ModelError> {
    let (n, m) = (instance.n(), instance.m());
    for i in 0..n {
        for j in 0..m {
            if instance.ctr(i, j).is_zero() {
                return Err(ModelError::NotDecomposableWithZeros {
                    bidder: i + 1,
                    slot: j + 1,
                });
            }
        }
    }
    if n == 0 || m == 0 {
        return Ok(Some(SeparabilityDecomposition {
            slot_effects: vec![Q::one(); m],
            ad_effects: vec![Q::one(); n],
        }));
    }
    // μ_j is forced by row 1 under the normalization; all other rows must
    // then be proportional to row 1.
    let slot_effects: Vec<Q> = (0..m)
        .map(|j| instance.ctr(0, j) / instance.ctr(0, 0))
        .collect();
    let ad_effects: Vec<Q> = (0..n).map(|i| instance.ctr(i, 0).clone()).collect();
    for i in 0..n {
        for j in 0..m {
            if &slot_effects[j] * &ad_effects[i] != *instance.ctr(i, j) {
                return Ok(None);
            }
        }
    }
    Ok(Some(SeparabilityDecomposition {
        slot_effects,
        ad_effects,
    }))
}

/// The realized result of running a mechanism: who won which slot, the
/// per-impression price of each slot, and every bidder's utility.
///
/// `winners[j]` is `None` when slot `j` went unsold (possible in the
/// expressive auction); sold slots hold the 0-based winner. A winner's
/// utility is `α_{i,j} · v_i − p_j`; everyone else's is 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// Winner of each slot (0-based internally; 1-based or null in JSON).
    #[serde(with = "one_based_winners")]
    pub winners: Vec<Option<usize>>,
    /// Per-impression price of each slot.
    pub prices: Vec<Q>,
    /// Utility of every bidder under the instance the mechanism ran on.
    pub utilities: Vec<Q>,
}

impl Outcome {
    /// Sum of the per-impression prices.
    pub fn revenue(&self) -> Q {
        self.prices.iter().sum()
    }

    /// The total allocation, if every slot was sold.
    pub fn allocation(&self) -> Option<Allocation> {
        self.winners
            .iter()
            .map(|w| w.as_ref().copied())
            .collect::<Option<Vec<usize>>>()
            .map(Allocation)
    }

    /// Expected welfare of the realized (possibly partial) allocation.
    pub fn welfare(&self, instance: &Instance) -> Q {
        self.winners
            .iter()
            .enumerate()
            .filter_map(|(j, w)| w.map(|i| instance.weight(i, j)))
            .sum()
    }
}

mod one_based_winners {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(winners: &[Option<usize>], s: S) -> Result<S::Ok, S::Error> {
        let one_based: Vec<Option<usize>> = winners.iter().map(|w| w.map(|i| i + 1)).collect();
        one_based.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<usize>>, D::Error> {
        let one_based = Vec::<Option<usize>>::deserialize(d)?;
        one_based
            .into_iter()
            .map(|w| match w {
                Some(0) => Err(serde::de::Error::custom(
                    "slot winners are 1-based; 0 is not a bidder",
                )),
                Some(i) => Ok(Some(i - 1)),
                None => Ok(None),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn inst(values: Vec<Q>, ctr: Vec<Vec<Q>>) -> Instance {
        Instance::new(values, ctr).unwrap()
    }

    fn three_bidders_two_slots() -> Instance {
        // Two unit-rate bidders and one whose rates fall off steeply.
        inst(
            vec![qi(1), qi(1), qi(2)],
            vec![
                vec![qi(1), qi(1)],
                vec![qi(1), qi(1)],
                vec![q(2, 5), q(1, 5)],
            ],
        )
    }

    fn four_bidders_three_slots() -> Instance {
        inst(
            vec![qi(10), qi(8), qi(8), qi(5)],
            vec![
                vec![qi(1), q(2, 5), q(2, 5)],
                vec![qi(1), q(3, 4), q(1, 7)],
                vec![qi(1), q(1, 2), q(1, 2)],
                vec![qi(1), qi(1), qi(0)],
            ],
        )
    }

    #[test]
    fn validation_rejects_each_malformed_shape() {
        let e = Instance::new(vec![qi(1)], vec![]).unwrap_err();
        assert!(matches!(e, ModelError::BidderCountMismatch { .. }));

        let e = Instance::new(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), qi(1)], vec![qi(1)]],
        )
        .unwrap_err();
        assert!(matches!(e, ModelError::RaggedCtrRow { bidder: 2, .. }));

        let e = Instance::new(vec![qi(1)], vec![vec![qi(1), qi(1)]]).unwrap_err();
        assert!(matches!(
            e,
            ModelError::TooManySlots {
                slots: 2,
                bidders: 1
            }
        ));

        let e = Instance::new(vec![qi(-1), qi(1)], vec![vec![qi(1)], vec![qi(1)]]).unwrap_err();
        assert!(matches!(e, ModelError::NegativeValue { bidder: 1 }));

        let e = Instance::new(vec![qi(1), qi(1)], vec![vec![qi(1)], vec![qi(-1)]]).unwrap_err();
        assert!(matches!(e, ModelError::NegativeCtr { bidder: 2, slot: 1 }));

        let e = Instance::new(
            vec![qi(1), qi(1)],
            vec![vec![q(1, 2), qi(1)], vec![qi(1), qi(1)]],
        )
        .unwrap_err();
        assert!(matches!(
            e,
            ModelError::IncreasingCtrRow {
                bidder: 1,
                slot: 1,
                next: 2
            }
        ));

        let e = Instance::new_strict(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), qi(0)], vec![qi(1), qi(1)]],
        )
        .unwrap_err();
        assert!(matches!(
            e,
            ModelError::ZeroCtrUnderStrictFlag { bidder: 1, slot: 2 }
        ));

        // Zeros are fine without the strict flag.
        assert!(Instance::new(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), qi(0)], vec![qi(1), qi(1)]]
        )
        .is_ok());
    }

    #[test]
    fn json_schema_parses_exactly_and_round_trips() {
        let json = r#"{"values": ["1","1","2"], "ctr": [["1","1"],["1","1"],["2/5","1/5"]]}"#;
        let parsed = Instance::from_json_str(json).unwrap();
        assert_eq!(parsed, three_bidders_two_slots());
        assert_eq!(*parsed.ctr(2, 0), q(2, 5));

        let canonical = parsed.to_canonical_json();
        let reparsed = Instance::from_json_str(&canonical).unwrap();
        assert_eq!(reparsed, parsed);

        // Decimal strings parse exactly; raw floats are refused.
        let decimal = r#"{"values": ["1","1","2"], "ctr": [["1","1"],["1","1"],["0.4","0.2"]]}"#;
        assert_eq!(Instance::from_json_str(decimal).unwrap(), parsed);
        let float = r#"{"values": [1.0, 1.0], "ctr": [["1"],["1"]]}"#;
        let err = Instance::from_json_str(float).unwrap_err().to_string();
        assert!(err.contains("encode it as a string"), "got: {err}");

        // Unknown fields are rejected rather than silently dropped.
        let unknown = r#"{"values": ["1"], "ctr": [["1"]], "bids": ["1"]}"#;
        assert!(Instance::from_json_str(unknown).is_err());

        // An invalid matrix fails at deserialization, not first use.
        let increasing = r#"{"values": ["1"], "ctr": [["1/2","1"]]}"#;
        assert!(Instance::from_json_str(increasing).is_err());
    }

    #[test]
    fn welfare_sums_rate_weighted_values() {
        let inst3 = four_bidders_three_slots();
        assert_eq!(welfare(&inst3, &Allocation(vec![0, 1, 2])).unwrap(), qi(20));

        let inst1 = three_bidders_two_slots();
        assert_eq!(welfare(&inst1, &Allocation(vec![0, 1])).unwrap(), qi(2));

        let empty = inst(vec![qi(3)], vec![vec![]]);
        assert_eq!(welfare(&empty, &Allocation(vec![])).unwrap(), qi(0));
    }

    #[test]
    fn welfare_rejects_invalid_allocations() {
        let inst1 = three_bidders_two_slots();
        assert!(matches!(
            welfare(&inst1, &Allocation(vec![0])),
            Err(ModelError::AllocationLengthMismatch { .. })
        ));
        assert!(matches!(
            welfare(&inst1, &Allocation(vec![0, 3])),
            Err(ModelError::WinnerOutOfRange { bidder: 4, .. })
        ));
        assert!(matches!(
            welfare(&inst1, &Allocation(vec![1, 1])),
            Err(ModelError::DuplicateWinner { bidder: 2 })
        ));
    }

    #[test]
    fn efficient_allocations_reports_all_ties_or_uniqueness() {
        // Symmetric unit-rate bidders: both orders are efficient.
        let eff = efficient_allocations(&three_bidders_two_slots());
        assert_eq!(
            eff.allocations,
            vec![Allocation(vec![0, 1]), Allocation(vec![1, 0])]
        );
        assert!(!eff.unique);
        assert_eq!(eff.max_welfare, qi(2));

        let eff = efficient_allocations(&four_bidders_three_slots());
        assert_eq!(eff.allocations, vec![Allocation(vec![0, 1, 2])]);
        assert!(eff.unique);
        assert_eq!(eff.max_welfare, qi(20));

        let eff = efficient_allocations(&inst(vec![qi(5)], vec![vec![q(1, 2)]]));
        assert_eq!(eff.allocations, vec![Allocation(vec![0])]);
        assert!(eff.unique);
        assert_eq!(eff.max_welfare, q(5, 2));
    }

    #[test]
    fn separability_detection_matches_row_proportionality() {
        // Rows (1, 1/2) and (3/5, 3/10) are proportional.
        let sep = separable_decomposition(&inst(
            vec![qi(1), qi(1)],
            vec![vec![qi(1), q(1, 2)], vec![q(3, 5), q(3, 10)]],
        ))
        .unwrap()
        .unwrap();
        assert_eq!(sep.slot_effects, vec![qi(1), q(1, 2)]);
        assert_eq!(sep.ad_effects, vec![qi(1), q(3, 5)]);

        // Rate ratios 1 vs 2 differ: not separable.
        let strict = Instance::new_strict(
            vec![qi(1), qi(1), qi(2)],
            vec![
                vec![qi(1), qi(1)],
                vec![qi(1), qi(1)],
                vec![q(2, 5), q(1, 5)],
            ],
        )
        .unwrap();
        assert_eq!(separable_decomposition(&strict).unwrap(), None);

        // One row is always separable.
        let sep = separable_decomposition(&inst(
            vec![qi(3), qi(0)],
            vec![vec![qi(1), q(1, 2)], vec![q(2, 3), q(1, 3)]],
        ))
        .unwrap()
        .unwrap();
        assert_eq!(sep.slot_effects, vec![qi(1), q(1, 2)]);
        assert_eq!(sep.ad_effects, vec![qi(1), q(2, 3)]);

        let single = separable_decomposition(&inst(vec![qi(3)], vec![vec![qi(1)]]))
            .unwrap()
            .unwrap();
        assert_eq!(single.slot_effects, vec![qi(1)]);
        assert_eq!(single.ad_effects, vec![qi(1)]);

        // Zero rates make ratios undefined.
        let has_zero = inst(vec![qi(1), qi(1)], vec![vec![qi(1), qi(0)], vec![qi(1), qi(1)]]);
        assert!(matches!(
            separable_decomposition(&has_zero),
            Err(ModelError::NotDecomposableWithZeros { bidder: 1, slot: 2 })
        ));
    }

    #[test]
    fn decomposition_reproduces_the_matrix_when_present() {
        let instance = inst(
            vec![qi(2), qi(1), qi(4)],
            vec![
                vec![q(4, 5), q(2, 5), q(1, 5)],
                vec![q(1, 2), q(1, 4), q(1, 8)],
                vec![qi(1), q(1, 2), q(1, 4)],
            ],
        );
        let sep = separable_decomposition(&instance).unwrap().unwrap();
        assert_eq!(sep.slot_effects[0], qi(1));
        for i in 0..instance.n() {
            for j in 0..instance.m() {
                assert_eq!(
                    &sep.slot_effects[j] * &sep.ad_effects[i],
                    *instance.ctr(i, j)
                );
            }
        }
    }

    #[test]
    fn allocations_display_and_serialize_one_based() {
        let alloc = Allocation(vec![0, 2, 1]);
        assert_eq!(alloc.to_string(), "(1,3,2)");
        assert_eq!(serde_json::to_string(&alloc).unwrap(), "[1,3,2]");
        let back: Allocation = serde_json::from_str("[1,3,2]").unwrap();
        assert_eq!(back, alloc);
        assert!(serde_json::from_str::<Allocation>("[0,1]").is_err());
        assert_eq!(alloc.slot_of(2), Some(1));
        assert_eq!(alloc.slot_of(3), None);
    }

    #[test]
    fn outcomes_expose_revenue_welfare_and_total_allocations() {
        let instance = three_bidders_two_slots();
        let outcome = Outcome {
            winners: vec![Some(2), None],
            prices: vec![q(2, 5), qi(0)],
            utilities: vec![qi(0), qi(0), q(2, 5)],
        };
        assert_eq!(outcome.revenue(), q(2, 5));
        assert_eq!(outcome.welfare(&instance), q(4, 5));
        assert_eq!(outcome.allocation(), None);

        let json = serde_json::to_string(&outcome).unwrap();
        assert!(json.contains("[3,null]"), "got: {json}");
        let back: Outcome = serde_json::from_str(&json).unwrap();
        assert_eq!(back, outcome);

        let total = Outcome {
            winners: vec![Some(0), Some(1)],
            prices: vec![qi(0), qi(0)],
            utilities: vec![qi(1), qi(1), qi(0)],
        };
        assert_eq!(total.allocation(), Some(Allocation(vec![0, 1])));
    }
}
