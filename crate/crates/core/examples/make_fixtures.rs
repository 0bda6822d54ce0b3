//! One-shot fixture builder: writes Jooken-format sample files with
//! capacities small enough for the table DP to certify, plus a manifest of
//! their optima.

use record_core::instance::{write_instance, Format, Instance, Item};
use record_core::oracle::textbook_dp_value;
use record_core::rng::Rng;
use std::fmt::Write as _;

fn jooken_like(n: usize, capacity: u64, groups: u64, seed: u64) -> Instance {
    let mut rng = Rng::new(seed);
    let mut items = Vec::with_capacity(n);
    // Groups of near-equal items whose efficiencies hover around one, the
    // shape that forces many near-equivalent partial solutions.
    for i in 0..n {
        let g = 1 + (i as u64 % groups);
        let base = capacity / (1 << g.min(12)).max(2);
        let w = base.max(2) + rng.uniform(0, base / 50 + 4);
        let p = w + rng.uniform(1, w / 100 + 5);
        items.push(Item::new(p, w, 1));
    }
    Instance::new(items, capacity)
}

fn main() {
    let dir = std::path::Path::new("fixtures/jooken");
    std::fs::create_dir_all(dir).unwrap();
    let specs = [
        ("sample_n40_w10000_g3.jooken", 40usize, 10_000u64, 3u64, 101u64),
        ("sample_n60_w50000_g4.jooken", 60, 50_000, 4, 202),
        ("sample_n80_w200000_g5.jooken", 80, 200_000, 5, 303),
        ("sample_n100_w1000000_g6.jooken", 100, 1_000_000, 6, 404),
        ("sample_n120_w1000000_g4.jooken", 120, 1_000_000, 4, 505),
        ("sample_n24_w4000_g2.jooken", 24, 4_000, 2, 606),
    ];
    let mut manifest = String::from("file,n,capacity,optimum\n");
    for (name, n, w, g, seed) in specs {
        let inst = jooken_like(n, w, g, seed);
        let optimum = textbook_dp_value(&inst).unwrap();
        std::fs::write(dir.join(name), write_instance(&inst, Format::Jooken)).unwrap();
        writeln!(manifest, "{name},{n},{w},{optimum}").unwrap();
        println!("{name}: optimum {optimum}");
    }
    std::fs::write(dir.join("manifest.csv"), manifest).unwrap();
}
