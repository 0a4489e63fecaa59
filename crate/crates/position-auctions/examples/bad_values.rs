// Manufacturing instances where no sale order supports VCG.
//
// For a two-slot click-rate matrix whose rows are ordered by
// top-to-bottom ratio steepness, this picks bidder values so that the
// sequential sale cannot reproduce the VCG outcome under either sale
// order. The recipe is constructive: the returned parameters show which
// inequalities pin the values down.

use position_auctions::envy::{generate_bad_values, vcg_supported};
use position_auctions::mechanisms::OrderOfSale;
use position_auctions::model::efficient_allocations;
use position_auctions::rational::{q, qi};

pub fn run() {
    // Rows sorted by increasing ratio of slot-1 to slot-2 click rate:
    // the third row is the steepest.
    let ctr = vec![
        vec![qi(1), q(1, 2)],
        vec![qi(1), q(2, 5)],
        vec![qi(1), q(1, 4)],
    ];
    let v3 = qi(2);
    let out = generate_bad_values(&ctr, &v3).expect("rows qualify");
    println!("chosen values: {:?}", out.instance.values());
    println!(
        "construction margins: shading {} of {}, raise {} of {} (ratio gap {})",
        out.params.gamma1, out.params.lambda1, out.params.gamma2, out.params.lambda2,
        out.params.delta,
    );

    let eff = efficient_allocations(&out.instance);
    println!(
        "unique efficient assignment: {:?} (unique: {})",
        eff.allocations[0].winners().iter().map(|i| i + 1).collect::<Vec<_>>(),
        eff.unique,
    );

    for (label, order) in [
        ("best-to-worst", OrderOfSale::best_to_worst(2)),
        ("worst-first", OrderOfSale(vec![1, 0])),
    ] {
        let support = vcg_supported(&out.instance, &order, false).expect("shapes match");
        println!("VCG supported selling {label}: {}", support.feasible);
    }
}

fn main() {
    run();
}
