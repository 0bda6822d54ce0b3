//! Instance rewrites and cross-item fixing.
//!
//! Aggregation merges identical items; multiplicity reduction replaces an
//! item whose profit and weight are exactly double another's by extra copies
//! of the smaller one. Both are recorded in a replayable log so solutions of
//! the rewritten instance convert back exactly. Dominance fixing removes
//! whole items once an empty extension proves they cannot create new states.

use crate::bounds::Ledger;
use crate::prep::{cmp_items, ItemId, WorkItem};
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rewrite {
    /// `absorbed` had the same profit and weight as `kept`; availabilities
    /// were summed.
    Aggregate { kept: ItemId, absorbed: ItemId, d_kept_before: u64 },
    /// `removed` was exactly double `kept`; each removed copy became two
    /// copies of `kept`.
    Halve { kept: ItemId, removed: ItemId, d_kept_before: u64 },
}

#[derive(Debug, Clone, Default)]
pub struct ReductionLog {
    pub rewrites: Vec<Rewrite>,
}

impl ReductionLog {
    pub fn is_empty(&self) -> bool {
        self.rewrites.is_empty()
    }
}

/// Merge consecutive identical items of a sorted id run. Absorbed ids are
/// removed from `ids`; availability and residual counts accumulate on the
/// kept item.
pub fn aggregate_identical(
    items: &mut [WorkItem],
    ledger: &mut Ledger,
    ids: &mut Vec<ItemId>,
    log: &mut ReductionLog,
) {
    let mut out: Vec<ItemId> = Vec::with_capacity(ids.len());
    for &id in ids.iter() {
        match out.last() {
            Some(&kept)
                if items[kept as usize].profit == items[id as usize].profit
                    && items[kept as usize].weight == items[id as usize].weight =>
            {
                log.rewrites.push(Rewrite::Aggregate {
                    kept,
                    absorbed: id,
                    d_kept_before: items[kept as usize].avail,
                });
                items[kept as usize].avail += items[id as usize].avail;
                items[id as usize].avail = 0;
                ledger.absorb(kept, id, 1);
            }
            _ => out.push(id),
        }
    }
    *ids = out;
}

/// Two-pointer scan replacing doubled items by extra copies of their half
/// multiplier. Returns the number of pointer advances (for the linear-time
/// assertion). `ids` must be sorted and aggregated.
pub fn multiplicity_reduce(
    items: &mut [WorkItem],
    ledger: &mut Ledger,
    ids: &mut Vec<ItemId>,
    log: &mut ReductionLog,
) -> u64 {
    let len = ids.len();
    let mut removed = vec![false; len];
    let mut advances = 0u64;
    let mut i = 0usize;
    for ip in 0..len {
        if i <= ip {
            i = ip + 1;
        }
        let cur = items[ids[ip] as usize];
        while i < len {
            let cand = items[ids[i] as usize];
            let artificial = WorkItem {
                profit: 2 * cand.profit,
                weight: 2 * cand.weight,
                avail: 1,
            };
            if cmp_items(&artificial, &cur) == Ordering::Less {
                i += 1;
                advances += 1;
            } else {
                break;
            }
        }
        if i < len {
            let cand_id = ids[i];
            let cand = items[cand_id as usize];
            if cur.profit == 2 * cand.profit && cur.weight == 2 * cand.weight {
                log.rewrites.push(Rewrite::Halve {
                    kept: cand_id,
                    removed: ids[ip],
                    d_kept_before: cand.avail,
                });
                items[cand_id as usize].avail += 2 * items[ids[ip] as usize].avail;
                items[ids[ip] as usize].avail = 0;
                ledger.absorb(cand_id, ids[ip], 2);
                removed[ip] = true;
            }
        }
        advances += 1;
    }
    let mut idx = 0;
    ids.retain(|_| {
        let keep = !removed[idx];
        idx += 1;
        keep
    });
    advances
}

/// Cap right-item availabilities by what the capacity alone admits.
pub fn cap_availability(
    items: &mut [WorkItem],
    ledger: &mut Ledger,
    ids: &[ItemId],
    capacity: u64,
) {
    for &id in ids {
        let cap = capacity / items[id as usize].weight;
        if items[id as usize].avail > cap {
            items[id as usize].avail = cap;
        }
        if ledger.u(id) > cap {
            ledger.reduce_to(items, id, cap);
        }
    }
}

/// Replay the log backward, converting a solution of the rewritten instance
/// into one for the original items. Value and weight are preserved exactly.
pub fn reverse_map(multiplicities: &mut [u64], log: &ReductionLog) {
    for rewrite in log.rewrites.iter().rev() {
        match *rewrite {
            Rewrite::Halve { kept, removed, d_kept_before } => {
                let x = multiplicities[kept as usize];
                let over = x.saturating_sub(d_kept_before);
                let x_removed = over.div_ceil(2);
                multiplicities[removed as usize] += x_removed;
                multiplicities[kept as usize] = x - 2 * x_removed;
            }
            Rewrite::Aggregate { kept, absorbed, d_kept_before } => {
                let x = multiplicities[kept as usize];
                let keep = x.min(d_kept_before);
                multiplicities[absorbed as usize] += x - keep;
                multiplicities[kept as usize] = keep;
            }
        }
    }
}

/// Multi-copy domination shape for right items: copies of the cheaper item
/// reproduce the candidate's weight at no profit loss.
pub fn shape_dominated_right(p_i: u64, w_i: u64, p_cand: u64, w_cand: u64) -> bool {
    w_cand >= w_i && p_cand as u128 <= p_i as u128 * (w_cand / w_i) as u128
}

/// Domination shape for left items: lighter and at least as profitable
/// means removing the candidate never beats removing the probe item.
pub fn shape_dominated_left(p_i: u64, w_i: u64, p_cand: u64, w_cand: u64) -> bool {
    w_cand <= w_i && p_cand >= p_i
}

/// After an empty first extension of a right item, fix every unprocessed
/// dominated right item. Returns the fixed ids.
pub fn fix_dominated_right(
    items: &[WorkItem],
    ledger: &mut Ledger,
    order: &[ItemId],
    range: std::ops::Range<usize>,
    p_i: u64,
    w_i: u64,
) -> Vec<ItemId> {
    let mut fixed = Vec::new();
    for pos in range {
        let id = order[pos];
        if ledger.u(id) == 0 {
            continue;
        }
        let it = &items[id as usize];
        if shape_dominated_right(p_i, w_i, it.profit, it.weight) {
            ledger.reduce_to(items, id, 0);
            fixed.push(id);
        }
    }
    fixed
}

/// Mirror of `fix_dominated_right` for removals of left items.
pub fn fix_dominated_left(
    items: &[WorkItem],
    ledger: &mut Ledger,
    order: &[ItemId],
    range: std::ops::Range<usize>,
    p_i: u64,
    w_i: u64,
) -> Vec<ItemId> {
    let mut fixed = Vec::new();
    for pos in range {
        let id = order[pos];
        if ledger.u(id) == 0 {
            continue;
        }
        let it = &items[id as usize];
        if shape_dominated_left(p_i, w_i, it.profit, it.weight) {
            ledger.reduce_to(items, id, 0);
            fixed.push(id);
        }
    }
    fixed
}

/// Weight-window test from the minimum-weight extendable witness: a shaped
/// candidate can only generate a state if its first copy, rebated by the
/// probe item's copies, still fits under `w_max`.
pub fn weight_filter_allows(s_w: u64, w_i: u64, w_cand: u64, w_max: u64) -> bool {
    let rebate = (w_cand / w_i - 1) as u128 * w_i as u128;
    s_w as u128 + w_cand as u128 - rebate <= w_max as u128
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(p: u64, wt: u64, d: u64) -> WorkItem {
        WorkItem { profit: p, weight: wt, avail: d }
    }

    fn setup(items: Vec<WorkItem>) -> (Vec<WorkItem>, Ledger, Vec<ItemId>) {
        let is_left = vec![false; items.len()];
        let ledger = Ledger::new(&items, is_left);
        let ids = (0..items.len() as u32).collect();
        (items, ledger, ids)
    }

    fn snapshot(items: &[WorkItem], ids: &[ItemId]) -> Vec<(u64, u64, u64)> {
        ids.iter().map(|&id| {
            let it = &items[id as usize];
            (it.profit, it.weight, it.avail)
        }).collect()
    }

    #[test]
    fn aggregates_identical_neighbors() {
        let (mut items, mut ledger, mut ids) = setup(vec![w(6, 4, 2), w(6, 4, 1)]);
        let mut log = ReductionLog::default();
        aggregate_identical(&mut items, &mut ledger, &mut ids, &mut log);
        assert_eq!(snapshot(&items, &ids), vec![(6, 4, 3)]);
        assert_eq!(ledger.u(0), 3);
        assert_eq!(log.rewrites, vec![Rewrite::Aggregate { kept: 0, absorbed: 1, d_kept_before: 2 }]);
    }

    #[test]
    fn aggregation_identity_without_duplicates() {
        let (mut items, mut ledger, mut ids) = setup(vec![w(6, 4, 1), w(3, 2, 1)]);
        let mut log = ReductionLog::default();
        aggregate_identical(&mut items, &mut ledger, &mut ids, &mut log);
        assert_eq!(snapshot(&items, &ids), vec![(6, 4, 1), (3, 2, 1)]);
        assert!(log.is_empty());
    }

    #[test]
    fn aggregation_after_tie_sorting() {
        // (6,4) and (3,2) tie in efficiency; larger weight sorts first.
        let items = vec![w(6, 4, 1), w(3, 2, 1), w(6, 4, 1)];
        let mut ids: Vec<ItemId> = vec![0, 1, 2];
        ids.sort_by(|&a, &b| cmp_items(&items[a as usize], &items[b as usize]));
        let (mut items, mut ledger, _) = setup(items);
        let mut log = ReductionLog::default();
        aggregate_identical(&mut items, &mut ledger, &mut ids, &mut log);
        assert_eq!(snapshot(&items, &ids), vec![(6, 4, 2), (3, 2, 1)]);
    }

    #[test]
    fn halves_doubled_items() {
        let (mut items, mut ledger, mut ids) = setup(vec![w(20, 10, 2), w(10, 5, 1)]);
        let mut log = ReductionLog::default();
        let adv = multiplicity_reduce(&mut items, &mut ledger, &mut ids, &mut log);
        assert_eq!(snapshot(&items, &ids), vec![(10, 5, 5)]);
        assert_eq!(ledger.u(1), 5);
        assert!(adv <= 2 * 2);
        assert_eq!(log.rewrites, vec![Rewrite::Halve { kept: 1, removed: 0, d_kept_before: 1 }]);
    }

    #[test]
    fn profit_mismatch_left_alone() {
        let (mut items, mut ledger, mut ids) = setup(vec![w(20, 10, 1), w(11, 5, 1)]);
        let mut log = ReductionLog::default();
        multiplicity_reduce(&mut items, &mut ledger, &mut ids, &mut log);
        assert_eq!(snapshot(&items, &ids), vec![(20, 10, 1), (11, 5, 1)]);
        assert!(log.is_empty());
    }

    #[test]
    fn chain_collapses() {
        let (mut items, mut ledger, mut ids) =
            setup(vec![w(40, 20, 1), w(20, 10, 1), w(10, 5, 1)]);
        let mut log = ReductionLog::default();
        loop {
            let before = ids.len();
            multiplicity_reduce(&mut items, &mut ledger, &mut ids, &mut log);
            if ids.len() == before {
                break;
            }
        }
        assert_eq!(snapshot(&items, &ids), vec![(10, 5, 7)]);
    }

    #[test]
    fn pointer_advances_stay_linear() {
        let n = 200u64;
        let items: Vec<WorkItem> = (0..n).map(|i| w(1000 - i, 500 - i, 1)).collect();
        let (mut items, mut ledger, mut ids) = setup(items);
        let mut log = ReductionLog::default();
        let adv = multiplicity_reduce(&mut items, &mut ledger, &mut ids, &mut log);
        assert!(adv <= 2 * n, "{adv} advances on {n} items");
    }

    #[test]
    fn caps_right_availability() {
        let (mut items, mut ledger, ids) = setup(vec![w(10, 5, 7), w(3, 12, 4)]);
        cap_availability(&mut items, &mut ledger, &ids, 10);
        assert_eq!(items[0].avail, 2);
        assert_eq!(ledger.u(0), 2);
        // Heavier than the capacity: unusable.
        assert_eq!(items[1].avail, 0);
        assert_eq!(ledger.u(1), 0);

        let (mut items, mut ledger, ids) = setup(vec![w(10, 5, 2)]);
        cap_availability(&mut items, &mut ledger, &ids, 10);
        assert_eq!(items[0].avail, 2);
        assert_eq!(ledger.u(0), 2);
    }

    #[test]
    fn reverse_map_examples() {
        let log = ReductionLog {
            rewrites: vec![Rewrite::Halve { kept: 1, removed: 0, d_kept_before: 1 }],
        };
        let mut x = vec![0, 5];
        reverse_map(&mut x, &log);
        assert_eq!(x, vec![2, 1]);

        let mut x = vec![0, 1];
        reverse_map(&mut x, &log);
        assert_eq!(x, vec![0, 1]);

        let mut x = vec![0, 0];
        reverse_map(&mut x, &log);
        assert_eq!(x, vec![0, 0]);
    }

    #[test]
    fn reverse_map_aggregate_split() {
        let log = ReductionLog {
            rewrites: vec![Rewrite::Aggregate { kept: 0, absorbed: 2, d_kept_before: 2 }],
        };
        let mut x = vec![3, 7, 0];
        reverse_map(&mut x, &log);
        assert_eq!(x, vec![2, 7, 1]);
    }

    #[test]
    fn reverse_map_preserves_value_and_weight_randomized() {
        use crate::rng::Rng;
        let mut rng = Rng::new(0x7e57);
        for _ in 0..500 {
            // Random base items plus planted doubles and duplicates.
            let base: Vec<WorkItem> = (0..rng.uniform(1, 5))
                .map(|_| w(rng.uniform(1, 20), rng.uniform(1, 15), rng.uniform(1, 3)))
                .collect();
            let mut items = base.clone();
            for b in &base {
                if rng.uniform(0, 1) == 1 {
                    items.push(w(2 * b.profit, 2 * b.weight, rng.uniform(1, 2)));
                }
                if rng.uniform(0, 2) == 2 {
                    items.push(w(b.profit, b.weight, rng.uniform(1, 2)));
                }
            }
            let mut ids: Vec<ItemId> = (0..items.len() as u32).collect();
            ids.sort_by(|&a, &b| cmp_items(&items[a as usize], &items[b as usize]));
            let originals = items.clone();
            let is_left = vec![false; items.len()];
            let mut ledger = Ledger::new(&items, is_left);
            let mut log = ReductionLog::default();
            aggregate_identical(&mut items, &mut ledger, &mut ids, &mut log);
            loop {
                let before = ids.len();
                multiplicity_reduce(&mut items, &mut ledger, &mut ids, &mut log);
                if ids.len() == before {
                    break;
                }
            }
            // Random reduced solution within the rewritten availabilities.
            let mut x = vec![0u64; items.len()];
            for &id in &ids {
                x[id as usize] = rng.uniform(0, items[id as usize].avail);
            }
            let reduced_value: u128 =
                ids.iter().map(|&id| x[id as usize] as u128 * items[id as usize].profit as u128).sum();
            let reduced_weight: u128 =
                ids.iter().map(|&id| x[id as usize] as u128 * items[id as usize].weight as u128).sum();
            reverse_map(&mut x, &log);
            let mut value = 0u128;
            let mut weight = 0u128;
            for (idx, orig) in originals.iter().enumerate() {
                assert!(x[idx] <= orig.avail, "availability violated");
                value += x[idx] as u128 * orig.profit as u128;
                weight += x[idx] as u128 * orig.weight as u128;
            }
            assert_eq!(value, reduced_value);
            assert_eq!(weight, reduced_weight);
        }
    }

    #[test]
    fn right_domination_shape() {
        assert!(shape_dominated_right(6, 4, 5, 9)); // 5 <= 6*floor(9/4)=12
        assert!(!shape_dominated_right(6, 4, 13, 9)); // 13 > 12
        assert!(!shape_dominated_right(6, 4, 5, 3)); // lighter than the probe
    }

    #[test]
    fn left_domination_shape() {
        assert!(shape_dominated_left(10, 5, 12, 4));
        assert!(!shape_dominated_left(10, 5, 9, 4));
        assert!(!shape_dominated_left(10, 5, 12, 6));
    }

    #[test]
    fn weight_filter_examples() {
        // 9 + 9 - (2-1)*4 = 14 > 12: cannot generate.
        assert!(!weight_filter_allows(9, 4, 9, 12));
        assert!(weight_filter_allows(9, 4, 9, 14));
    }

    #[test]
    fn fixing_scans_respect_range_and_ledger() {
        let items = vec![w(6, 4, 1), w(5, 9, 2), w(13, 9, 1), w(12, 8, 3)];
        let is_left = vec![false; 4];
        let mut ledger = Ledger::new(&items, is_left);
        let order: Vec<ItemId> = vec![0, 1, 2, 3];
        let fixed = fix_dominated_right(&items, &mut ledger, &order, 1..4, 6, 4);
        // (5,9) and (12,8) are shaped; (13,9) is not.
        assert_eq!(fixed, vec![1, 3]);
        assert_eq!(ledger.u(1), 0);
        assert_eq!(ledger.u(2), 1);
        assert_eq!(ledger.u(3), 0);
    }
}
