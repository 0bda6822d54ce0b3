//! Small random instances for oracle cross-checks. Kept in the library so
//! integration and acceptance tests share one corpus definition.

use crate::instance::{Instance, Item};
use crate::rng::Rng;

/// Oracle-scale instance: up to 10 items, weights up to 30, availabilities
/// up to 4, capacity up to 200.
pub fn random_small_instance(rng: &mut Rng) -> Instance {
    let n = rng.uniform(1, 10) as usize;
    let items: Vec<Item> = (0..n)
        .map(|_| Item::new(rng.uniform(1, 50), rng.uniform(1, 30), rng.uniform(1, 4)))
        .collect();
    let total: u64 = items.iter().map(|i| i.weight * i.availability).sum();
    let capacity = rng.uniform(1, total.max(2)).min(200);
    Instance::new(items, capacity)
}

/// Instance with planted duplicates and doubled (2p, 2w) pairs, exercising
/// aggregation and multiplicity reduction.
pub fn random_planted_instance(rng: &mut Rng) -> Instance {
    let base: Vec<Item> = (0..rng.uniform(1, 5))
        .map(|_| Item::new(rng.uniform(1, 20), rng.uniform(1, 12), rng.uniform(1, 3)))
        .collect();
    let mut items = base.clone();
    for b in &base {
        if rng.uniform(0, 1) == 1 {
            items.push(Item::new(2 * b.profit, 2 * b.weight, rng.uniform(1, 2)));
        }
        if rng.uniform(0, 2) == 2 {
            items.push(Item::new(b.profit, b.weight, rng.uniform(1, 2)));
        }
    }
    let total: u64 = items.iter().map(|i| i.weight * i.availability).sum();
    let capacity = rng.uniform(1, total.max(2)).min(200);
    Instance::new(items, capacity)
}

/// Mid-scale instance for the table-DP comparison: up to 60 items, capacity
/// up to 2000, mixed correlation structures.
pub fn random_midscale_instance(rng: &mut Rng) -> Instance {
    let n = rng.uniform(2, 60) as usize;
    let style = rng.uniform(0, 3);
    let items: Vec<Item> = (0..n)
        .map(|_| {
            let w = rng.uniform(1, 100);
            let p = match style {
                0 => rng.uniform(1, 120),
                1 => w + 10,
                2 => w,
                _ => 3 * w.div_ceil(3),
            };
            Item::new(p, w, rng.uniform(1, 4))
        })
        .collect();
    let total: u64 = items.iter().map(|i| i.weight * i.availability).sum();
    let capacity = rng.uniform(1, total.max(2)).min(2000);
    Instance::new(items, capacity)
}
