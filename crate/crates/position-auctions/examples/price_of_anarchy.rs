// The exact price of anarchy of a two-slot sale.
//
// Only three assignments can be pure-equilibrium outcomes without
// overbidding: the efficient one and two specific swaps. This example
// prints the full candidate analysis for one instance, then evaluates a
// one-parameter family whose price of anarchy approaches the worst-case
// bound of 2 as the parameter shrinks.

use position_auctions::equilibrium::price_of_anarchy;
use position_auctions::rational::{q, qi, Q};
use position_auctions::showcase::poa_family;
use position_auctions::Instance;

pub fn run() {
    let inst = Instance::new(
        vec![qi(9), qi(7), qi(4)],
        vec![
            vec![qi(1), q(2, 3)],
            vec![q(5, 6), q(1, 2)],
            vec![q(3, 4), q(1, 4)],
        ],
    )
    .expect("valid instance");

    let report = price_of_anarchy(&inst).expect("two-slot instance");
    println!(
        "efficient assignment {:?} with welfare {}, attainable in equilibrium: {}",
        report.efficient_allocation.winners().iter().map(|i| i + 1).collect::<Vec<_>>(),
        report.efficient_welfare,
        report.efficient_attainable,
    );
    for c in &report.candidates {
        println!(
            "candidate {:?}: welfare {}, attainable {}",
            c.allocation.winners().iter().map(|i| i + 1).collect::<Vec<_>>(),
            c.welfare,
            c.attainable,
        );
    }
    println!("price of anarchy: {}", report.poa);

    // The family: two flat bidders and one steep bidder whose slot-2 rate
    // is a free parameter. As it shrinks, the worst equilibrium keeps
    // nearly half the welfare on the table.
    println!("family sweep (for small d the ratio is exactly (2 - 2d) / (1 + d)):");
    for delta in [q(1, 10), q(1, 100), q(1, 1000)] {
        let family = poa_family(&delta).expect("parameter in range");
        let poa = price_of_anarchy(&family).expect("two-slot instance").poa;
        let two = qi(2);
        let closed_form = &(&two - &(&two * &delta)) / &(&Q::one() + &delta);
        println!("  d = {delta}: price of anarchy {poa} (closed form {closed_form})");
        assert_eq!(poa, closed_form);
    }

    // At the top of the parameter range the inverted assignment stops being
    // the binding equilibrium and the closed form no longer applies.
    let edge = q(1, 2);
    let poa_edge = price_of_anarchy(&poa_family(&edge).expect("parameter in range"))
        .expect("two-slot instance")
        .poa;
    println!("  d = {edge} (edge of the range): price of anarchy {poa_edge}");
}

fn main() {
    run();
}
