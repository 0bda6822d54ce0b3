//! Reference solvers used for correctness testing: exhaustive enumeration
//! and the classical table-based dynamic program. Both are guarded so a
//! mis-sized call fails loudly instead of running forever.

use crate::error::{Error, Result};
use crate::instance::{evaluate_solution, Instance, Solution};

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub optimum: u64,
    pub witness: Solution,
}

const BRUTE_GUARD: u128 = 100_000_000;
const DP_CELL_GUARD: u128 = 1_000_000_000;
// Full parent table for witness recovery; one byte per cell.
const DP_WITNESS_GUARD: u128 = 400_000_000;

/// Maximize over every feasible multiplicity vector.
///
/// Guard: the raw search space `prod (d_i + 1)` must stay within 1e8; the
/// actual search additionally prunes on weight overflow.
pub fn brute_force(inst: &Instance) -> Result<OracleResult> {
    let mut space: u128 = 1;
    for item in &inst.items {
        space = space.saturating_mul(item.availability as u128 + 1);
        if space > BRUTE_GUARD {
            return Err(Error::OracleGuard(format!(
                "brute force search space exceeds {BRUTE_GUARD}"
            )));
        }
    }
    let n = inst.len();
    let mut best_value: u64 = 0;
    let mut best = vec![0u64; n];
    let mut current = vec![0u64; n];

    fn recurse(
        inst: &Instance,
        i: usize,
        value: u64,
        weight: u64,
        current: &mut Vec<u64>,
        best_value: &mut u64,
        best: &mut Vec<u64>,
    ) {
        if i == inst.len() {
            if value > *best_value {
                *best_value = value;
                best.clone_from(current);
            }
            return;
        }
        let item = inst.items[i];
        let fit = (inst.capacity - weight) / item.weight;
        let max_k = item.availability.min(fit);
        for k in 0..=max_k {
            current[i] = k;
            recurse(
                inst,
                i + 1,
                value + k * item.profit,
                weight + k * item.weight,
                current,
                best_value,
                best,
            );
        }
        current[i] = 0;
    }

    recurse(inst, 0, 0, 0, &mut current, &mut best_value, &mut best);
    let ev = evaluate_solution(inst, &best)?;
    debug_assert!(ev.feasible && ev.value == best_value);
    Ok(OracleResult {
        optimum: best_value,
        witness: Solution { multiplicities: best, value: ev.value, weight: ev.weight },
    })
}

/// Classical `dp(i, w)` over items and weights, with witness recovery via a
/// per-cell multiplicity table.
pub fn textbook_dp(inst: &Instance) -> Result<OracleResult> {
    let n = inst.len();
    let w = inst.capacity as u128;
    let cells = (n as u128) * (w + 1);
    if cells > DP_CELL_GUARD {
        return Err(Error::OracleGuard(format!("dp table of {cells} cells exceeds {DP_CELL_GUARD}")));
    }
    if cells > DP_WITNESS_GUARD || inst.items.iter().any(|it| it.availability > u8::MAX as u64) {
        return Err(Error::OracleGuard("dp witness table too large; use textbook_dp_value".into()));
    }
    let width = inst.capacity as usize + 1;
    let mut row = vec![0u64; width];
    let mut choice = vec![0u8; n * width];
    for (i, item) in inst.items.iter().enumerate() {
        let mut next = row.clone();
        let iw = item.weight as usize;
        for cap in 0..width {
            let max_k = item.availability.min((cap / iw.max(1)) as u64);
            let mut best = next[cap];
            let mut best_k = 0u8;
            for k in 1..=max_k {
                let used = k as usize * iw;
                if used > cap {
                    break;
                }
                let v = row[cap - used] + k * item.profit;
                if v > best {
                    best = v;
                    best_k = k as u8;
                }
            }
            next[cap] = best;
            choice[i * width + cap] = best_k;
        }
        row = next;
    }
    let optimum = row[width - 1];
    // Walk the choice table backward to rebuild one witness.
    let mut multiplicities = vec![0u64; n];
    let mut cap = width - 1;
    for i in (0..n).rev() {
        let k = choice[i * width + cap] as u64;
        multiplicities[i] = k;
        cap -= k as usize * inst.items[i].weight as usize;
    }
    let ev = evaluate_solution(inst, &multiplicities)?;
    if !ev.feasible || ev.value != optimum {
        return Err(Error::Internal("dp witness does not match dp value".into()));
    }
    Ok(OracleResult {
        optimum,
        witness: Solution { multiplicities, value: ev.value, weight: ev.weight },
    })
}

/// Value-only textbook DP with a two-row table; used for large fixtures
/// where the witness table would not fit.
pub fn textbook_dp_value(inst: &Instance) -> Result<u64> {
    let n = inst.len();
    let w = inst.capacity as u128;
    if (n as u128) * (w + 1) > DP_CELL_GUARD {
        return Err(Error::OracleGuard("dp table exceeds cell guard".into()));
    }
    let width = inst.capacity as usize + 1;
    let mut row = vec![0u64; width];
    let mut next = vec![0u64; width];
    for item in &inst.items {
        let iw = item.weight as usize;
        for cap in 0..width {
            let max_k = item.availability.min((cap / iw.max(1)) as u64);
            let mut best = row[cap];
            for k in 1..=max_k {
                let used = k as usize * iw;
                if used > cap {
                    break;
                }
                let v = row[cap - used] + k * item.profit;
                if v > best {
                    best = v;
                }
            }
            next[cap] = best;
        }
        std::mem::swap(&mut row, &mut next);
    }
    Ok(row[width - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, Format, Item};
    use crate::rng::Rng;

    fn e1() -> Instance {
        parse_instance("3 10\n10 5 1\n6 4 2\n3 3 1", Format::Canonical).unwrap()
    }

    #[test]
    fn brute_force_e1() {
        let r = brute_force(&e1()).unwrap();
        assert_eq!(r.optimum, 16);
        assert_eq!(r.witness.multiplicities, vec![1, 1, 0]);
    }

    #[test]
    fn brute_force_small_cases() {
        let inst = Instance::new(vec![Item::new(7, 5, 1)], 4);
        assert_eq!(brute_force(&inst).unwrap().optimum, 0);
        let inst = Instance::new(vec![Item::new(7, 5, 3)], 11);
        assert_eq!(brute_force(&inst).unwrap().optimum, 14);
    }

    #[test]
    fn brute_force_guard() {
        let items = vec![Item::new(1, 1, u64::MAX); 3];
        assert!(brute_force(&Instance::new(items, 10)).is_err());
    }

    #[test]
    fn dp_matches_brute_force_on_e1() {
        assert_eq!(textbook_dp(&e1()).unwrap().optimum, 16);
    }

    #[test]
    fn dp_degenerate_cases() {
        let inst = Instance::new(vec![Item::new(5, 3, 2)], 0);
        assert_eq!(textbook_dp(&inst).unwrap().optimum, 0);
        let inst = Instance::new(vec![Item::new(5, 30, 2), Item::new(2, 11, 1)], 10);
        assert_eq!(textbook_dp(&inst).unwrap().optimum, 0);
    }

    use crate::testgen::random_small_instance;

    #[test]
    fn dp_agrees_with_brute_force_randomized() {
        let mut rng = Rng::new(0xface);
        for _ in 0..2000 {
            let inst = random_small_instance(&mut rng);
            let bf = brute_force(&inst).unwrap();
            let dp = textbook_dp(&inst).unwrap();
            assert_eq!(bf.optimum, dp.optimum, "{inst:?}");
            assert_eq!(textbook_dp_value(&inst).unwrap(), dp.optimum);
        }
    }
}
