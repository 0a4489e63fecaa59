// Constructing and verifying efficient equilibria.
//
// Builds bids that make the welfare-maximizing assignment a pure-strategy
// equilibrium of the sequential sale, verifies them with the exact
// equilibrium check, inspects one bidder's full best-response landscape,
// and decides feasibility for an inefficient target allocation.

use position_auctions::equilibrium::{
    best_response, construct_efficient_eq, equilibrium_feasible, is_equilibrium,
};
use position_auctions::mechanisms::{run_iterated_spa, OrderOfSale};
use position_auctions::model::{efficient_allocations, Allocation};
use position_auctions::rational::{q, qi};
use position_auctions::Instance;

pub fn run() {
    let inst = Instance::new(
        vec![qi(8), qi(5), qi(3), qi(2)],
        vec![
            vec![qi(1), q(1, 2)],
            vec![q(3, 4), q(1, 2)],
            vec![q(2, 3), q(1, 3)],
            vec![q(1, 2), q(1, 6)],
        ],
    )
    .expect("valid instance");
    let order = OrderOfSale::best_to_worst(2);

    let eff = efficient_allocations(&inst);
    println!(
        "efficient assignment: {:?}, welfare {}",
        eff.allocations[0].winners().iter().map(|i| i + 1).collect::<Vec<_>>(),
        eff.max_welfare,
    );

    let built = construct_efficient_eq(&inst).expect("unique efficient assignment");
    println!(
        "constructed bids {:?} with tie rule {} (case {:?})",
        built.bids.0, built.tie, built.case,
    );

    let check = is_equilibrium(&inst, &built.bids, &order, &built.tie, false)
        .expect("bids fit the instance");
    println!("exact equilibrium: {}", check.is_equilibrium);
    let out = run_iterated_spa(&inst, &built.bids, &order, &built.tie).expect("bids fit");
    println!(
        "simulated winners {:?}, prices {:?}, welfare {}",
        out.winners.iter().map(|w| w.map(|i| i + 1)).collect::<Vec<_>>(),
        out.prices,
        out.welfare(&inst),
    );

    // The exact best response of bidder 2 against the constructed bids:
    // every attainable (slot, price) pair as its own bid sweeps the line.
    let response = best_response(&inst, &built.bids, 1, &order, &built.tie, false)
        .expect("bidder index in range");
    println!("bidder 2 best response: utility {} at bid {}", response.best_utility, response.witness_bid);
    for opt in &response.attainable {
        println!(
            "  bid {} -> slot {:?} at price {}, utility {}",
            opt.bid,
            opt.slot.map(|j| j + 1),
            opt.price,
            opt.utility,
        );
    }

    // Can the swapped (inefficient) assignment also be an equilibrium
    // outcome? The decision is exact, by eliminating bid variables from
    // the equilibrium constraints.
    let target = Allocation(vec![1, 0]);
    let report = equilibrium_feasible(&inst, &target, false).expect("two-slot instance");
    println!("assignment (2,1) attainable in equilibrium: {}", report.feasible);
    if let Some(w) = &report.witness {
        let sim = run_iterated_spa(&inst, &w.bids, &order, &w.tie).expect("bids fit");
        println!(
            "  witness bids {:?} under {} simulate to {:?}",
            w.bids.0,
            w.tie,
            sim.winners.iter().map(|x| x.map(|i| i + 1)).collect::<Vec<_>>(),
        );
    }
}

fn main() {
    run();
}
