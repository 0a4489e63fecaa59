// Globally envy-free equilibria and when they cannot exist.
//
// An outcome is globally envy-free when no bidder — winner or loser —
// would rather hold a different position at its posted price. For
// three-bidder, two-slot instances a click-gap comparison decides whether
// an efficient equilibrium can be envy-free; this example constructs one
// when the comparison allows it and exhibits the obstruction when not.

use position_auctions::envy::{
    construct_gef_eq, gef_necessary_condition, gef_systems_feasible, is_globally_envy_free,
    GefConstruction,
};
use position_auctions::mechanisms::{run_iterated_spa, vcg_result, OrderOfSale};
use position_auctions::rational::{q, qi};
use position_auctions::showcase::gef_example;
use position_auctions::Instance;

pub fn run() {
    let order = OrderOfSale::best_to_worst(2);

    // A friendly instance: the climb condition holds.
    let inst = Instance::new(
        vec![qi(3), qi(2), qi(1)],
        vec![
            vec![qi(1), q(1, 2)],
            vec![qi(1), q(1, 2)],
            vec![qi(1), q(1, 2)],
        ],
    )
    .expect("valid instance");
    println!("condition holds: {}", gef_necessary_condition(&inst).expect("3x2 instance"));
    match construct_gef_eq(&inst).expect("3x2 instance") {
        GefConstruction::Feasible(eq) => {
            println!("constructed bids {:?} with tie rule {} (case {:?})", eq.bids.0, eq.tie, eq.case);
            let out = run_iterated_spa(&inst, &eq.bids, &order, &eq.tie).expect("bids fit");
            let alloc = out.allocation().expect("every slot sells");
            let report = is_globally_envy_free(&inst, &alloc, &out.prices).expect("shapes match");
            println!(
                "simulated winners {:?}, prices {:?}, envy-free: {}",
                out.winners.iter().map(|w| w.map(|i| i + 1)).collect::<Vec<_>>(),
                out.prices,
                report.envy_free,
            );
            let vcg = vcg_result(&inst);
            println!(
                "prices equal the one-shot VCG prices {:?}: {}",
                vcg.prices,
                out.prices == vcg.prices,
            );
        }
        GefConstruction::Infeasible { .. } => unreachable!("condition holds"),
    }

    // The obstruction: bidder 3's gain from climbing to slot 1 exceeds
    // bidder 1's, so some bidder always envies.
    let blocked = gef_example();
    println!();
    println!("blocked instance condition: {}", gef_necessary_condition(&blocked).expect("3x2"));
    match construct_gef_eq(&blocked).expect("3x2 instance") {
        GefConstruction::Feasible(_) => unreachable!("condition fails"),
        GefConstruction::Infeasible { condition_lhs, condition_rhs } => println!(
            "infeasible: the left-out bidder's climb gain {condition_lhs} exceeds the winner's {condition_rhs}",
        ),
    }
    // Even relaxing every strict inequality in the two exhaustive
    // constraint systems leaves them empty: the failure is structural.
    let systems = gef_systems_feasible(&blocked).expect("3x2 instance");
    println!(
        "relaxed constraint systems solvable: {}",
        systems.d_weak.is_some() || systems.e_weak.is_some(),
    );
}

fn main() {
    run();
}
