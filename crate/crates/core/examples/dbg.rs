use record_core::instance::{write_instance, Format};
use record_core::oracle::{brute_force, textbook_dp};
use record_core::rng::Rng;
use record_core::solver::{solve, Features, SolverConfig};
use record_core::testgen::*;
use record_core::evaluate_solution;

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_default();
    let count: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(20000);
    let mut rng = Rng::new(0xabba);
    let mut fails = 0;
    for trial in 0..count {
        let inst = match mode.as_str() {
            "planted" => random_planted_instance(&mut rng),
            "mid" => random_midscale_instance(&mut rng),
            _ => random_small_instance(&mut rng),
        };
        let expect = if mode == "mid" {
            textbook_dp(&inst).unwrap().optimum
        } else {
            brute_force(&inst).unwrap().optimum
        };
        let mut cfg = SolverConfig { seed: trial, ..Default::default() };
        if mode == "ablate" {
            // Random toggle subset per trial.
            let mut f = Features::all();
            let bits = rng.next_u64();
            for (i, name) in record_core::FEATURE_NAMES.iter().enumerate() {
                if bits >> i & 1 == 0 {
                    f.set(name, false);
                }
            }
            cfg.features = f;
        }
        match solve(&inst, &cfg) {
            Ok(res) => {
                let ev = evaluate_solution(&inst, &res.solution.multiplicities).unwrap();
                if res.optimum != expect || !res.proven || !ev.feasible || ev.value != res.optimum {
                    println!("MISMATCH trial {trial} expect {expect} got {} proven {}", res.optimum, res.proven);
                    println!("{}", write_instance(&inst, Format::Canonical));
                    fails += 1;
                    if fails > 3 { return; }
                }
            }
            Err(e) => {
                println!("ERROR trial {trial}: {e}");
                println!("{}", write_instance(&inst, Format::Canonical));
                fails += 1;
                if fails > 3 { return; }
            }
        }
    }
    println!("{mode}: {count} trials, {fails} failures");
}
