use record_core::instance::{parse_instance, Format};
use record_core::solver::{solve, SolverConfig};
use std::time::Instant;

fn main() {
    let manifest = std::fs::read_to_string("fixtures/jooken/manifest.csv").unwrap();
    for line in manifest.lines().skip(1) {
        let mut parts = line.split(',');
        let file = parts.next().unwrap();
        let _n: usize = parts.next().unwrap().parse().unwrap();
        let _w: u64 = parts.next().unwrap().parse().unwrap();
        let expect: u64 = parts.next().unwrap().parse().unwrap();
        let text = std::fs::read_to_string(format!("fixtures/jooken/{file}")).unwrap();
        let inst = parse_instance(&text, Format::Jooken).unwrap();
        let t = Instant::now();
        let res = solve(&inst, &SolverConfig::default()).unwrap();
        println!("{file}: got {} expect {expect} proven {} in {:.1?}", res.optimum, res.proven, t.elapsed());
        assert_eq!(res.optimum, expect);
    }
    println!("fixtures ok");
}
