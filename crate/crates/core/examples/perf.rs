use record_core::generator::{generate, ClassId, GeneratorSpec};
use record_core::solver::{solve, SolverConfig};
use std::time::Instant;

fn run(class: ClassId, n: usize, r: u64, count: u64) {
    let mut times = Vec::new();
    for h in 1..=count {
        let spec = GeneratorSpec { class, n, range: r, h: (h - 1) % 100 + 1, total: 100, seed: h, bounded: false };
        let inst = generate(&spec).unwrap();
        let cfg = SolverConfig { seed: h, ..Default::default() };
        let t = Instant::now();
        let res = solve(&inst, &cfg).unwrap();
        let el = t.elapsed().as_secs_f64() * 1000.0;
        times.push(el);
        assert!(res.proven, "unproven on h={h}");
    }
    times.sort_by(f64::total_cmp);
    println!(
        "{:yields$} n={n} R={r}: median {:.3} ms, max {:.3} ms",
        class.name(),
        times[times.len() / 2],
        times[times.len() - 1],
        yields = 28
    );
}

fn main() {
    run(ClassId::StronglyCorrelated, 1000, 10_000, 100);
    run(ClassId::SubsetSum, 100, 1000, 100);
    run(ClassId::Uncorrelated, 1000, 10_000, 50);
    run(ClassId::WeaklyCorrelated, 1000, 10_000, 50);
    run(ClassId::ProfitCeiling, 200, 1000, 50);
    run(ClassId::Circle, 200, 1000, 50);
    run(ClassId::StronglyCorrelatedSpan, 200, 1000, 50);
    run(ClassId::MultipleStronglyCorrelated, 200, 1000, 50);
    run(ClassId::InverseStronglyCorrelated, 500, 10_000, 50);
    run(ClassId::AlmostStronglyCorrelated, 500, 10_000, 50);
    run(ClassId::SimilarWeights, 500, 100_000, 50);
}
