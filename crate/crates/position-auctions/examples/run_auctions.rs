// Simulating the two auction formats.
//
// Runs the sequential second-price sale slot by slot — showing how the
// order of sale and the tie-break rule change who wins — and compares the
// result with the one-shot Vickrey-Clarke-Groves outcome on the same
// instance.

use position_auctions::mechanisms::{
    run_iterated_spa, run_vcg, vcg_result, BidProfile, OrderOfSale, TieBreakRule,
};
use position_auctions::rational::{q, qi};
use position_auctions::Instance;

pub fn run() {
    let inst = Instance::new(
        vec![qi(1), qi(1), qi(2)],
        vec![
            vec![qi(1), qi(1)],
            vec![qi(1), qi(1)],
            vec![q(2, 5), q(1, 5)],
        ],
    )
    .expect("valid instance");
    let bids = BidProfile(vec![qi(1), q(2, 5), qi(1)]);

    // Selling best slot first: bidder-3 ties bidder-1 on slot 1 at score
    // 2/5; the tie-break rule decides the whole cascade.
    for (label, tie) in [
        ("natural priority (1,2,3)", TieBreakRule::natural_priority(3)),
        ("priority (3,1,2)", TieBreakRule::PriorityOrder(vec![2, 0, 1])),
        (
            "highest click ratio",
            TieBreakRule::HighestClickRatio {
                residual_priority: vec![0, 1, 2],
            },
        ),
    ] {
        let out = run_iterated_spa(&inst, &bids, &OrderOfSale::best_to_worst(2), &tie)
            .expect("bids fit the instance");
        println!("tie rule {label}:");
        for j in 0..inst.m() {
            println!(
                "  slot {} -> bidder {} at per-impression price {}",
                j + 1,
                out.winners[j].expect("every slot sells") + 1,
                out.prices[j],
            );
        }
        println!("  revenue {}", out.revenue());
    }

    // Selling the worse slot first changes the cascade again.
    let reversed = run_iterated_spa(
        &inst,
        &bids,
        &OrderOfSale(vec![1, 0]),
        &TieBreakRule::natural_priority(3),
    )
    .expect("bids fit the instance");
    println!(
        "worst-first order: winners {:?}, prices {:?}",
        reversed
            .winners
            .iter()
            .map(|w| w.map(|i| i + 1))
            .collect::<Vec<_>>(),
        reversed.prices,
    );

    // The one-shot VCG outcome under the same bids, and under truthful bids.
    let vcg_at_bids = run_vcg(&inst, &bids).expect("bids fit the instance");
    println!(
        "VCG at these bids: winners {:?}, prices {:?}",
        vcg_at_bids
            .winners
            .iter()
            .map(|w| w.map(|i| i + 1))
            .collect::<Vec<_>>(),
        vcg_at_bids.prices,
    );
    let vcg = vcg_result(&inst);
    println!(
        "VCG truthful: winners {:?}, prices {:?}, revenue {}",
        vcg.winners
            .iter()
            .map(|w| w.map(|i| i + 1))
            .collect::<Vec<_>>(),
        vcg.prices,
        vcg.revenue(),
    );
}

fn main() {
    run();
}
