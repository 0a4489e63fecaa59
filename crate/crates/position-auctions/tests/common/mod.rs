//! Shared deterministic generators for the integration suites.

use position_auctions::model::efficient_allocations;
use position_auctions::rational::{q, Q};
use position_auctions::Instance;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random positive rational with a small numerator and denominator.
pub fn rand_pos_q(rng: &mut ChaCha8Rng, num_max: i64, dens: &[i64]) -> Q {
    let num = rng.gen_range(1..=num_max);
    let den = dens[rng.gen_range(0..dens.len())];
    q(num, den)
}

/// A random valid instance: positive values, positive non-increasing
/// click-through-rate rows.
pub fn rand_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    loop {
        let values: Vec<Q> = (0..n).map(|_| rand_pos_q(rng, 8, &[1, 2, 3, 4])).collect();
        let ctr: Vec<Vec<Q>> = (0..n)
            .map(|_| {
                let mut row: Vec<Q> =
                    (0..m).map(|_| rand_pos_q(rng, 12, &[2, 3, 4, 6])).collect();
                row.sort_by(|a, b| b.cmp(a));
                row
            })
            .collect();
        if let Ok(inst) = Instance::new(values, ctr) {
            return inst;
        }
    }
}

/// A random two-slot instance whose efficient allocation is unique.
pub fn rand_unique_efficient(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    loop {
        let inst = rand_instance(rng, n, m);
        if efficient_allocations(&inst).unique {
            return inst;
        }
    }
}

/// A random 3x2 click-through-rate matrix meeting the bad-value generator's
/// preconditions: positive strictly decreasing rows, sorted so the
/// slot-1-to-slot-2 ratios satisfy `r1 <= r2 < r3`.
pub fn rand_qualifying_ctr(rng: &mut ChaCha8Rng) -> Vec<Vec<Q>> {
    loop {
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for _ in 0..3 {
            let a = rand_pos_q(rng, 12, &[2, 3, 4]);
            let b = rand_pos_q(rng, 12, &[2, 3, 4]);
            let (hi, lo) = if a > b { (a, b) } else { (b, a) };
            if hi == lo {
                rows.clear();
                break;
            }
            rows.push(vec![hi, lo]);
        }
        if rows.len() != 3 {
            continue;
        }
        rows.sort_by(|x, y| {
            let rx = &x[0] / &x[1];
            let ry = &y[0] / &y[1];
            rx.cmp(&ry)
        });
        let r2 = &rows[1][0] / &rows[1][1];
        let r3 = &rows[2][0] / &rows[2][1];
        if r2 < r3 {
            return rows;
        }
    }
}
