// Reproducing VCG with per-slot bids and a revenue-maximizing sale order.
//
// The full pipeline: pad the instance square, take the VCG outcome, build
// the graph of exact bidder indifferences at those prices, grow the
// price-support forest, read off the sale order and a per-slot bid matrix
// — then run the expressive sequential auction and watch it return the
// VCG winners and prices with no profitable deviation for anyone.

use position_auctions::mechanisms::{run_expressive_auction_with_order, vcg_result};
use position_auctions::psf::{
    build_indifference_graph, build_psf, expressive_equilibrium_bids, pad_to_square,
    pso_from_psf, reproduces_vcg, verify_no_profitable_deviation,
};
use position_auctions::showcase::table3;

pub fn run() {
    let inst = table3();
    let padded = pad_to_square(&inst);
    println!(
        "padded {} bidders x {} real slots to a {}x{} square",
        inst.n(),
        inst.m(),
        padded.n(),
        padded.m(),
    );

    let vcg = vcg_result(&padded);
    println!(
        "VCG: winners {:?}, prices {:?}",
        vcg.winners.iter().map(|w| w.map(|i| i + 1)).collect::<Vec<_>>(),
        vcg.prices,
    );

    let graph = build_indifference_graph(&padded, &vcg).expect("unique assignment");
    println!("indifference edges (assigned slot -> envied slot, 1-based):");
    for (u, w) in &graph.edges {
        println!("  {} -> {}", u + 1, w + 1);
    }

    let forest = build_psf(&graph, &vcg.prices).expect("every node priced by a path");
    println!(
        "forest parents {:?}, roots {:?}",
        forest.parent.iter().map(|p| p.map(|i| i + 1)).collect::<Vec<_>>(),
        forest.roots.iter().map(|r| r + 1).collect::<Vec<_>>(),
    );

    let order = pso_from_psf(&forest);
    println!(
        "sale order (deepest first): {:?}",
        order.0.iter().map(|j| j + 1).collect::<Vec<_>>(),
    );

    let bids = expressive_equilibrium_bids(&padded, &forest, &vcg).expect("shapes match");
    println!("per-slot bid matrix:");
    for (i, row) in bids.0.iter().enumerate() {
        println!("  bidder {}: {:?}", i + 1, row);
    }

    let (outcome, used_order) =
        run_expressive_auction_with_order(&padded, &bids).expect("small instance");
    println!(
        "auction picked order {:?}: winners {:?}, prices {:?}",
        used_order.0.iter().map(|j| j + 1).collect::<Vec<_>>(),
        outcome.winners.iter().map(|w| w.map(|i| i + 1)).collect::<Vec<_>>(),
        outcome.prices,
    );
    println!("reproduces VCG: {}", reproduces_vcg(&outcome, &vcg));

    for bidder in 0..padded.n() {
        let stable = verify_no_profitable_deviation(&padded, &bids, bidder)
            .expect("shapes match");
        println!("bidder {} has no profitable deviation: {stable}", bidder + 1);
    }
}

fn main() {
    run();
}
