//! Bundled showcase instances.
//!
//! Each constructor returns a small instance exercising one phenomenon that
//! cannot occur under separable click-through-rates. The `position-auctions
//! reproduce` subcommand runs the full analysis for each; tests and examples
//! reuse them as fixtures.

use crate::model::{Instance, ModelError};
use crate::rational::{q, qi, Q};

/// Three bidders, two slots; equilibrium existence hinges on tie-breaking.
///
/// Bidders 1 and 2 click identically in both slots; bidder 3's rates fall
/// off steeply (2/5 then 1/5) but her value is twice theirs, so all three
/// tie on slot-1 score under truthful-ish bids. A pure equilibrium exists
/// only under tie rules that favor bidder 3 in the slot-1 contest.
pub fn table1() -> Instance {
    Instance::new(
        vec![qi(1), qi(1), qi(2)],
        vec![
            vec![qi(1), qi(1)],
            vec![qi(1), qi(1)],
            vec![q(2, 5), q(1, 5)],
        ],
    )
    .expect("showcase instance is valid")
}

/// The four-bidder, three-slot rate matrix for which *no* fixed bidder
/// priority can guarantee equilibrium existence across all value profiles.
///
/// Bidders 1–2 never get clicked in slot 3; bidders 3–4 click at half rate
/// in slots 2 and 3. For every one of the 24 priority orders some value
/// vector admits no pure equilibrium.
pub fn table2_ctr() -> Vec<Vec<Q>> {
    vec![
        vec![qi(1), qi(1), qi(0)],
        vec![qi(1), qi(1), qi(0)],
        vec![qi(1), q(1, 2), q(1, 2)],
        vec![qi(1), q(1, 2), q(1, 2)],
    ]
}

/// [`table2_ctr`] paired with a caller-chosen value vector.
pub fn table2_instance(values: [Q; 4]) -> Result<Instance, ModelError> {
    Instance::new(values.to_vec(), table2_ctr())
}

/// Four bidders, three slots where the iterated auction can reproduce the
/// VCG prices only by selling slots *out of order*.
///
/// Selling best-to-worst cannot support the VCG result; selling in the order
/// (1,3,2) can, e.g. with bids (10,7,7,5).
pub fn table3() -> Instance {
    Instance::new(
        vec![qi(10), qi(8), qi(8), qi(5)],
        vec![
            vec![qi(1), q(2, 5), q(2, 5)],
            vec![qi(1), q(3, 4), q(1, 7)],
            vec![qi(1), q(1, 2), q(1, 2)],
            vec![qi(1), qi(1), qi(0)],
        ],
    )
    .expect("showcase instance is valid")
}

/// Three bidders, two slots with a unique efficient allocation but *no*
/// globally-envy-free efficient equilibrium.
///
/// The necessary condition for one — the slot-2 winner's rate ratio weakly
/// exceeding the excluded bidder's — fails here: 1/2·(4/5) = 2/5 < 1/2.
pub fn gef_example() -> Instance {
    Instance::new_strict(
        vec![qi(1), qi(1), qi(1)],
        vec![
            vec![q(9, 10), q(1, 2)],
            vec![q(1, 2), q(2, 5)],
            vec![q(3, 5), q(1, 10)],
        ],
    )
    .expect("showcase instance is valid")
}

/// Two bidders, two slots, parameterized by `δ ∈ (0, 1/2]`, whose
/// equilibrium welfare gap approaches a factor of 2 as `δ → 0`.
///
/// Rates are `(1−δ, δ)` and `(1, 1−δ)` with unit values; the worst
/// equilibrium inverts the efficient order, giving a welfare ratio of
/// `(2−2δ)/(1+δ)` for small `δ`.
pub fn poa_family(delta: &Q) -> Result<Instance, ModelError> {
    let one = Q::one();
    Instance::new(
        vec![qi(1), qi(1)],
        vec![
            vec![&one - delta, delta.clone()],
            vec![one.clone(), &one - delta],
        ],
    )
}
