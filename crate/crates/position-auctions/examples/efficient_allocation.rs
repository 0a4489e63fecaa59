// Finding welfare-maximizing assignments, exactly.
//
// Builds a three-bidder, two-slot instance whose click-through rates are
// not separable into bidder and slot effects, enumerates every efficient
// assignment with exact rational arithmetic, and contrasts it with a
// separable instance where the usual "sort by value" intuition works.

use position_auctions::model::{efficient_allocations, separable_decomposition, welfare, Allocation};
use position_auctions::rational::{q, qi};
use position_auctions::Instance;

pub fn run() {
    // Bidder 3 is a "steep dropoff" bidder: strong in slot 1, weak in
    // slot 2, in a way no per-bidder scale factor can express.
    let inst = Instance::new(
        vec![qi(1), qi(1), qi(2)],
        vec![
            vec![qi(1), qi(1)],
            vec![qi(1), qi(1)],
            vec![q(2, 5), q(1, 5)],
        ],
    )
    .expect("rows are weakly decreasing and positive");

    println!("values: {:?}", inst.values());
    for i in 0..inst.n() {
        println!("bidder {} click rates: {:?}", i + 1, inst.ctr_row(i));
    }

    match separable_decomposition(&inst).expect("well-formed instance") {
        Some(dec) => println!("separable: ad effects {:?}, slot effects {:?}", dec.ad_effects, dec.slot_effects),
        None => println!("not separable: no product of bidder and slot effects matches"),
    }

    let eff = efficient_allocations(&inst);
    println!("maximum welfare: {}", eff.max_welfare);
    for alloc in &eff.allocations {
        println!(
            "efficient assignment {:?} (1-based bidders per slot), welfare {}",
            alloc.winners().iter().map(|i| i + 1).collect::<Vec<_>>(),
            welfare(&inst, alloc).expect("allocation fits the instance"),
        );
    }
    println!("unique: {}", eff.unique);

    // Any assignment can be priced out directly.
    let swapped = Allocation(vec![2, 0]);
    println!(
        "welfare of the swapped assignment (3,1): {}",
        welfare(&inst, &swapped).expect("allocation fits the instance"),
    );

    // A separable instance for contrast: every row is a multiple of (1, 1/2).
    let separable = Instance::new(
        vec![qi(6), qi(5), qi(4)],
        vec![
            vec![qi(1), q(1, 2)],
            vec![q(4, 5), q(2, 5)],
            vec![q(1, 2), q(1, 4)],
        ],
    )
    .expect("rows are weakly decreasing and positive");
    let dec = separable_decomposition(&separable)
        .expect("well-formed instance")
        .expect("rows share a common shape");
    println!(
        "separable contrast: ad effects {:?}, slot effects {:?}",
        dec.ad_effects, dec.slot_effects
    );
}

fn main() {
    run();
}
