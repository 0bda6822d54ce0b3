//! Break-item discovery and lazy construction of the enumeration order.
//!
//! Items are kept in an arena and permuted only through an order vector.
//! Quickselect with random pivots and Hoare partitioning locates the break
//! item in expected linear time, leaving a stack of unsorted intervals per
//! side that are refined on demand. Intervals shorter than ten elements are
//! finished with insertion sort.

use crate::instance::Instance;
use crate::rng::Rng;
use std::cmp::Ordering;

pub type ItemId = u32;

/// Working copy of an item. Availability is mutated only by the one-shot
/// aggregation/multiplicity rewrite; everything else treats it as read-only.
#[derive(Debug, Clone, Copy)]
pub struct WorkItem {
    pub profit: u64,
    pub weight: u64,
    pub avail: u64,
}

/// Orders by non-increasing efficiency; ties broken by larger weight first.
/// Exact: efficiencies are compared by cross multiplication in 128 bits.
pub fn cmp_items(a: &WorkItem, b: &WorkItem) -> Ordering {
    let lhs = a.profit as u128 * b.weight as u128;
    let rhs = b.profit as u128 * a.weight as u128;
    match lhs.cmp(&rhs) {
        Ordering::Equal => b.weight.cmp(&a.weight),
        ord => ord.reverse(), // higher efficiency sorts first
    }
}

/// Receives each scanned item once; returns true when the item is fully
/// fixed and must be skipped by the enumeration order.
pub trait FixProbe {
    fn try_fix(&mut self, id: ItemId) -> bool;
}

/// Probe that never fixes; used by tests and by the full-fit fast path.
pub struct NoFix;

impl FixProbe for NoFix {
    fn try_fix(&mut self, _id: ItemId) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BreakInfo {
    /// Position of the break item in efficiency order (0-based); `n` when
    /// every copy fits.
    pub b_pos: usize,
    pub p_hat: u64,
    pub w_hat: u64,
    /// Set when all items fit or the break solution fills W exactly; either
    /// way the break solution is optimal.
    pub full_fit: bool,
}

const INSERTION_CUTOFF: usize = 10;

#[derive(Debug)]
pub struct Sorter {
    pub order: Vec<ItemId>,
    b_pos: usize,
    /// Unsorted left intervals; top holds the highest positions.
    left_stack: Vec<(usize, usize)>,
    /// Unsorted right intervals; top holds the lowest positions.
    right_stack: Vec<(usize, usize)>,
    /// Positions in `[left_sorted_from, b_pos)` are final.
    left_sorted_from: usize,
    /// Positions in `[b_pos, right_sorted_to)` are final.
    right_sorted_to: usize,
    pub cmp_calls: u64,
}

impl Sorter {
    pub fn new(n: usize) -> Self {
        Sorter {
            order: (0..n as u32).collect(),
            b_pos: 0,
            left_stack: Vec::new(),
            right_stack: Vec::new(),
            left_sorted_from: 0,
            right_sorted_to: 0,
            cmp_calls: 0,
        }
    }

    pub fn b_pos(&self) -> usize {
        self.b_pos
    }

    fn cmp(&mut self, items: &[WorkItem], a: ItemId, b: ItemId) -> Ordering {
        self.cmp_calls += 1;
        cmp_items(&items[a as usize], &items[b as usize])
    }

    fn insertion_sort(&mut self, items: &[WorkItem], lo: usize, hi: usize) {
        for i in lo + 1..=hi {
            let mut j = i;
            while j > lo {
                let (a, b) = (self.order[j - 1], self.order[j]);
                if self.cmp(items, a, b) == Ordering::Greater {
                    self.order.swap(j - 1, j);
                    j -= 1;
                } else {
                    break;
                }
            }
        }
    }

    /// Hoare two-way partition of `order[lo..=hi]` around a random pivot.
    /// Returns `j` such that `order[lo..=j] <= order[j+1..=hi]` under the
    /// comparator, with `lo <= j < hi`.
    fn partition(&mut self, items: &[WorkItem], lo: usize, hi: usize, rng: &mut Rng) -> usize {
        // Moving the pivot to the front keeps the split strictly below `hi`
        // even when the pivot is the unique maximum.
        self.order.swap(lo, lo + rng.index(hi - lo + 1));
        let pivot = self.order[lo];
        let mut i = lo as isize - 1;
        let mut j = hi as isize + 1;
        loop {
            loop {
                i += 1;
                if self.cmp(items, self.order[i as usize], pivot) != Ordering::Less {
                    break;
                }
            }
            loop {
                j -= 1;
                if self.cmp(items, self.order[j as usize], pivot) != Ordering::Greater {
                    break;
                }
            }
            if i >= j {
                return j as usize;
            }
            self.order.swap(i as usize, j as usize);
        }
    }

    /// Locate the break item, build the break solution, and leave both sides
    /// as relatively sorted interval stacks.
    pub fn find_break(&mut self, items: &[WorkItem], capacity: u64, rng: &mut Rng) -> BreakInfo {
        let n = items.len();
        debug_assert!(n > 0);
        let weight_of = |id: ItemId| {
            let it = &items[id as usize];
            it.weight * it.avail
        };
        let profit_of = |id: ItemId| {
            let it = &items[id as usize];
            it.profit * it.avail
        };
        let total: u64 = self.order.iter().map(|&id| weight_of(id)).sum();
        if total <= capacity {
            self.b_pos = n;
            self.left_sorted_from = n;
            self.right_sorted_to = n;
            return BreakInfo {
                b_pos: n,
                p_hat: self.order.iter().map(|&id| profit_of(id)).sum(),
                w_hat: total,
                full_fit: true,
            };
        }

        let mut lo = 0usize;
        let mut hi = n - 1;
        let mut ws = 0u64;
        let mut ps = 0u64;
        loop {
            if hi - lo + 1 < INSERTION_CUTOFF {
                self.insertion_sort(items, lo, hi);
                let mut b_pos = lo;
                while b_pos <= hi {
                    let w = weight_of(self.order[b_pos]);
                    if ws + w > capacity {
                        break;
                    }
                    ws += w;
                    ps += profit_of(self.order[b_pos]);
                    b_pos += 1;
                }
                debug_assert!(b_pos <= hi, "break item must lie in the final window");
                self.b_pos = b_pos;
                self.left_sorted_from = lo;
                self.right_sorted_to = hi + 1;
                return BreakInfo { b_pos, p_hat: ps, w_hat: ws, full_fit: ws == capacity };
            }
            let j = self.partition(items, lo, hi, rng);
            let part_w: u64 = (lo..=j).map(|q| weight_of(self.order[q])).sum();
            if ws + part_w <= capacity {
                ws += part_w;
                ps += (lo..=j).map(|q| profit_of(self.order[q])).sum::<u64>();
                if lo <= j {
                    self.left_stack.push((lo, j));
                }
                lo = j + 1;
            } else {
                self.right_stack.push((j + 1, hi));
                hi = j;
            }
        }
    }

    /// Sort `order[lo..=hi]` just enough to finalize its tail position,
    /// pushing the unprocessed heads back on the left stack.
    fn lazy_sort_tail(&mut self, items: &[WorkItem], lo: usize, hi: usize, rng: &mut Rng) {
        let (mut l, hi) = (lo, hi);
        loop {
            if hi - l + 1 < INSERTION_CUTOFF {
                self.insertion_sort(items, l, hi);
                self.left_sorted_from = l;
                return;
            }
            let j = self.partition(items, l, hi, rng);
            self.left_stack.push((l, j));
            l = j + 1;
        }
    }

    /// Mirror of `lazy_sort_tail`: finalize the head position of
    /// `order[lo..=hi]`, pushing unprocessed tails on the right stack.
    fn lazy_sort_head(&mut self, items: &[WorkItem], lo: usize, hi: usize, rng: &mut Rng) {
        let (lo, mut r) = (lo, hi);
        loop {
            if r - lo + 1 < INSERTION_CUTOFF {
                self.insertion_sort(items, lo, r);
                self.right_sorted_to = r + 1;
                return;
            }
            let j = self.partition(items, lo, r, rng);
            self.right_stack.push((j + 1, r));
            r = j;
        }
    }

    /// Next unfixed left item strictly below position `l_cursor`, applying
    /// the fixing probe to everything scanned on the way.
    pub fn next_left(
        &mut self,
        items: &[WorkItem],
        l_cursor: usize,
        probe: &mut dyn FixProbe,
        rng: &mut Rng,
    ) -> Option<usize> {
        let mut c = l_cursor;
        loop {
            if c == 0 {
                return None;
            }
            let pos = c - 1;
            if pos >= self.left_sorted_from {
                if probe.try_fix(self.order[pos]) {
                    c = pos;
                    continue;
                }
                return Some(pos);
            }
            let (lo, hi) = *self.left_stack.last().expect("unsorted left position without interval");
            debug_assert_eq!(hi, pos);
            self.left_stack.pop();
            // Probe the whole interval; fixed items move to the tail where
            // the cursor will skip them.
            let mut i = lo;
            let mut j = hi;
            loop {
                while i <= j && !probe.try_fix(self.order[i]) {
                    i += 1;
                }
                while i < j && probe.try_fix(self.order[j]) {
                    j -= 1;
                }
                if i >= j {
                    break;
                }
                self.order.swap(i, j);
            }
            if i == lo {
                // Everything fixed; treat the whole interval as consumed.
                self.left_sorted_from = lo;
                c = lo;
                continue;
            }
            let last_unfixed = i - 1;
            self.lazy_sort_tail(items, lo, last_unfixed, rng);
            return Some(last_unfixed);
        }
    }

    /// Next unfixed right item at or beyond position `r_cursor`.
    pub fn next_right(
        &mut self,
        items: &[WorkItem],
        r_cursor: usize,
        probe: &mut dyn FixProbe,
        rng: &mut Rng,
    ) -> Option<usize> {
        let n = self.order.len();
        let mut pos = r_cursor;
        loop {
            if pos >= n {
                return None;
            }
            if pos < self.right_sorted_to {
                if probe.try_fix(self.order[pos]) {
                    pos += 1;
                    continue;
                }
                return Some(pos);
            }
            let (lo, hi) = *self.right_stack.last().expect("unsorted right position without interval");
            debug_assert_eq!(lo, pos);
            self.right_stack.pop();
            // Fixed items move to the head where the cursor skips them.
            let mut i = lo;
            let mut j = hi;
            loop {
                while i <= j && probe.try_fix(self.order[i]) {
                    i += 1;
                }
                while i < j && !probe.try_fix(self.order[j]) {
                    j -= 1;
                }
                if i >= j {
                    break;
                }
                self.order.swap(i, j);
            }
            if i > hi {
                self.right_sorted_to = hi + 1;
                pos = hi + 1;
                continue;
            }
            let first_unfixed = i;
            self.lazy_sort_head(items, first_unfixed, hi, rng);
            return Some(first_unfixed);
        }
    }

    /// Fully sort both unprocessed regions; afterwards no unsorted interval
    /// remains. Triggered once, before item aggregation.
    pub fn full_sort_remaining(&mut self, items: &[WorkItem], l_cursor: usize, r_cursor: usize) {
        self.left_stack.clear();
        self.right_stack.clear();
        self.order[..l_cursor].sort_unstable_by(|&a, &b| cmp_items(&items[a as usize], &items[b as usize]));
        self.order[r_cursor..].sort_unstable_by(|&a, &b| cmp_items(&items[a as usize], &items[b as usize]));
        self.left_sorted_from = 0;
        self.right_sorted_to = self.order.len();
    }

    /// Sorted-and-final position ranges, used by the dominance scans.
    pub fn left_sorted_range(&self, l_cursor: usize) -> std::ops::Range<usize> {
        self.left_sorted_from..l_cursor
    }

    pub fn right_sorted_range(&self, r_cursor: usize) -> std::ops::Range<usize> {
        r_cursor..self.right_sorted_to
    }

    /// Rebuild after the one-shot item rewrite: `order` was compacted by the
    /// caller, positions shifted, both regions already fully sorted.
    pub fn reset_after_rewrite(&mut self, new_b_pos: usize) {
        self.b_pos = new_b_pos;
        self.left_stack.clear();
        self.right_stack.clear();
        self.left_sorted_from = 0;
        self.right_sorted_to = self.order.len();
    }
}

/// Build the solver's working arena from an instance (identity order).
pub fn arena_from_instance(inst: &Instance) -> Vec<WorkItem> {
    inst.items
        .iter()
        .map(|it| WorkItem { profit: it.profit, weight: it.weight, avail: it.availability })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, Format};

    fn e1_items() -> Vec<WorkItem> {
        let inst = parse_instance("3 10\n10 5 1\n6 4 2\n3 3 1", Format::Canonical).unwrap();
        arena_from_instance(&inst)
    }

    #[test]
    fn break_on_e1() {
        let items = e1_items();
        let mut sorter = Sorter::new(3);
        let info = sorter.find_break(&items, 10, &mut Rng::new(1));
        assert_eq!(info, BreakInfo { b_pos: 1, p_hat: 10, w_hat: 5, full_fit: false });
    }

    #[test]
    fn full_fit_when_everything_fits() {
        let items = vec![
            WorkItem { profit: 3, weight: 1, avail: 1 },
            WorkItem { profit: 2, weight: 1, avail: 1 },
        ];
        let mut sorter = Sorter::new(2);
        let info = sorter.find_break(&items, 2, &mut Rng::new(1));
        assert!(info.full_fit);
        assert_eq!((info.p_hat, info.w_hat), (5, 2));
    }

    #[test]
    fn first_item_overflowing_gives_empty_break_solution() {
        let items = vec![WorkItem { profit: 2, weight: 2, avail: 5 }];
        let mut sorter = Sorter::new(1);
        let info = sorter.find_break(&items, 7, &mut Rng::new(1));
        assert_eq!(info, BreakInfo { b_pos: 0, p_hat: 0, w_hat: 0, full_fit: false });
    }

    #[test]
    fn exact_fill_flags_full_fit() {
        let items = vec![
            WorkItem { profit: 9, weight: 4, avail: 1 },
            WorkItem { profit: 5, weight: 9, avail: 1 },
        ];
        let mut sorter = Sorter::new(2);
        let info = sorter.find_break(&items, 4, &mut Rng::new(3));
        assert!(info.full_fit);
        assert_eq!((info.b_pos, info.p_hat, info.w_hat), (1, 9, 4));
    }

    #[test]
    fn next_left_and_right_on_e1() {
        let items = e1_items();
        let mut sorter = Sorter::new(3);
        let mut rng = Rng::new(1);
        sorter.find_break(&items, 10, &mut rng);
        // Core starts empty at the break position.
        assert_eq!(sorter.next_left(&items, 1, &mut NoFix, &mut rng), Some(0));
        assert_eq!(sorter.next_left(&items, 0, &mut NoFix, &mut rng), None);
        assert_eq!(sorter.next_right(&items, 1, &mut NoFix, &mut rng), Some(1));
        assert_eq!(sorter.next_right(&items, 2, &mut NoFix, &mut rng), Some(2));
        assert_eq!(sorter.next_right(&items, 3, &mut NoFix, &mut rng), None);
    }

    struct FixAll;
    impl FixProbe for FixAll {
        fn try_fix(&mut self, _id: ItemId) -> bool {
            true
        }
    }

    #[test]
    fn probe_fixing_everything_exhausts_the_side() {
        let items: Vec<WorkItem> = (0..40)
            .map(|i| WorkItem { profit: 100 - i, weight: 1 + (i % 7), avail: 1 })
            .collect();
        let mut sorter = Sorter::new(40);
        let mut rng = Rng::new(9);
        let info = sorter.find_break(&items, 40, &mut rng);
        assert!(info.b_pos > 0);
        assert_eq!(sorter.next_left(&items, info.b_pos, &mut FixAll, &mut rng), None);
    }

    fn sorted_ids(items: &[WorkItem]) -> Vec<ItemId> {
        let mut ids: Vec<ItemId> = (0..items.len() as u32).collect();
        ids.sort_by(|&a, &b| cmp_items(&items[a as usize], &items[b as usize]));
        ids
    }

    #[test]
    fn lazy_right_matches_full_sort() {
        let mut rng = Rng::new(0xbeef);
        for trial in 0..50 {
            let n = 30 + (trial % 5) as usize;
            let items: Vec<WorkItem> = (0..n)
                .map(|_| WorkItem {
                    profit: rng.uniform(1, 60),
                    weight: rng.uniform(1, 40),
                    avail: rng.uniform(1, 3),
                })
                .collect();
            let total: u64 = items.iter().map(|i| i.weight * i.avail).sum();
            let cap = total / 3 + 1;
            let mut sorter = Sorter::new(n);
            let info = sorter.find_break(&items, cap, &mut rng);
            let reference = sorted_ids(&items);

            // Walk both sides to exhaustion; the discovered sequence must
            // follow the reference order exactly.
            let key = |id: ItemId| {
                let it = &items[id as usize];
                (it.profit, it.weight)
            };
            let mut pos = info.b_pos;
            let mut right_seq = Vec::new();
            while let Some(p) = sorter.next_right(&items, pos, &mut NoFix, &mut rng) {
                right_seq.push(key(sorter.order[p]));
                pos = p + 1;
            }
            let expect_right: Vec<_> = reference[info.b_pos..].iter().map(|&id| key(id)).collect();
            assert_eq!(right_seq, expect_right);

            let mut cur = info.b_pos;
            let mut left_seq = Vec::new();
            while let Some(p) = sorter.next_left(&items, cur, &mut NoFix, &mut rng) {
                left_seq.push(key(sorter.order[p]));
                cur = p;
            }
            let mut expect_left: Vec<_> = reference[..info.b_pos].iter().map(|&id| key(id)).collect();
            expect_left.reverse();
            assert_eq!(left_seq, expect_left);
        }
    }

    #[test]
    fn break_independent_of_pivot_seed() {
        let mut rng = Rng::new(0xc0ffee);
        let items: Vec<WorkItem> = (0..200)
            .map(|_| WorkItem {
                profit: rng.uniform(1, 1000),
                weight: rng.uniform(1, 1000),
                avail: rng.uniform(1, 4),
            })
            .collect();
        let total: u64 = items.iter().map(|i| i.weight * i.avail).sum();
        let cap = total / 2;
        let mut first = None;
        for seed in 0..50 {
            let mut sorter = Sorter::new(items.len());
            let info = sorter.find_break(&items, cap, &mut Rng::new(seed));
            match first {
                None => first = Some(info),
                Some(f) => assert_eq!(f, info),
            }
        }
    }

    #[test]
    fn full_sort_remaining_orders_everything() {
        let mut rng = Rng::new(5);
        let items: Vec<WorkItem> = (0..120)
            .map(|_| WorkItem {
                profit: rng.uniform(1, 99),
                weight: rng.uniform(1, 99),
                avail: 1,
            })
            .collect();
        let total: u64 = items.iter().map(|i| i.weight).sum();
        let mut sorter = Sorter::new(items.len());
        let info = sorter.find_break(&items, total / 2, &mut rng);
        sorter.full_sort_remaining(&items, info.b_pos, info.b_pos);
        // Idempotent on the already sorted arrangement.
        let snapshot = sorter.order.clone();
        sorter.full_sort_remaining(&items, info.b_pos, info.b_pos);
        assert_eq!(snapshot, sorter.order);
        for w in sorter.order.windows(2) {
            assert_ne!(
                cmp_items(&items[w[0] as usize], &items[w[1] as usize]),
                Ordering::Greater
            );
        }
    }

    #[test]
    fn interleaved_walk_is_a_good_permutation() {
        // Drive the cursors the way the solver does: strict alternation on
        // unfixed items while both sides last. The visited sequence must
        // keep left efficiencies non-increasing toward lower positions and
        // right efficiencies non-increasing toward higher ones.
        let mut rng = Rng::new(0x900d);
        for _ in 0..200 {
            let n = 40 + rng.index(40);
            let items: Vec<WorkItem> = (0..n)
                .map(|_| WorkItem {
                    profit: rng.uniform(1, 80),
                    weight: rng.uniform(1, 60),
                    avail: rng.uniform(1, 3),
                })
                .collect();
            let total: u64 = items.iter().map(|i| i.weight * i.avail).sum();
            let mut sorter = Sorter::new(n);
            let info = sorter.find_break(&items, total / 2, &mut rng);
            if info.full_fit {
                continue;
            }
            let (mut l, mut r) = (info.b_pos, info.b_pos);
            let mut prefer_left = true;
            let mut visits = Vec::new();
            loop {
                let sides = if prefer_left { [true, false] } else { [false, true] };
                let mut picked = None;
                for left in sides {
                    let pos = if left {
                        sorter.next_left(&items, l, &mut NoFix, &mut rng)
                    } else {
                        sorter.next_right(&items, r, &mut NoFix, &mut rng)
                    };
                    if let Some(pos) = pos {
                        picked = Some((pos, left));
                        break;
                    }
                }
                let Some((pos, left)) = picked else { break };
                if left {
                    l = pos;
                } else {
                    r = pos + 1;
                }
                visits.push((sorter.order[pos], left));
                prefer_left = !left;
            }
            assert_eq!(visits.len(), n, "every item is visited exactly once");
            // Strict alternation while both sides are nonempty.
            let mut lefts_left = info.b_pos;
            let mut rights_left = n - info.b_pos;
            let mut last: Option<bool> = None;
            for &(_, left) in &visits {
                if lefts_left > 0 && rights_left > 0 {
                    if let Some(prev) = last {
                        assert_ne!(prev, left, "sides must alternate while both live");
                    }
                }
                if left {
                    lefts_left -= 1;
                } else {
                    rights_left -= 1;
                }
                last = Some(left);
            }
            // Each side's own subsequence follows the comparator.
            let mut prev_left: Option<ItemId> = None;
            let mut prev_right: Option<ItemId> = None;
            for &(id, left) in &visits {
                let prev = if left { &mut prev_left } else { &mut prev_right };
                if let Some(p) = *prev {
                    let ord = cmp_items(&items[p as usize], &items[id as usize]);
                    if left {
                        // Walking outward from the break: efficiency rises.
                        assert_ne!(ord, Ordering::Less, "left side must not gain efficiency order");
                    } else {
                        assert_ne!(ord, Ordering::Greater, "right side must not lose order");
                    }
                }
                *prev = Some(id);
            }
        }
    }

    #[test]
    fn comparator_work_stays_near_linear() {
        let mut rng = Rng::new(0xabcd);
        let n = 4000usize;
        let items: Vec<WorkItem> = (0..n)
            .map(|_| WorkItem {
                profit: rng.uniform(1, 1_000_000),
                weight: rng.uniform(1, 1_000_000),
                avail: 1,
            })
            .collect();
        let total: u64 = items.iter().map(|i| i.weight).sum();
        let mut sorter = Sorter::new(n);
        let info = sorter.find_break(&items, total / 2, &mut rng);
        // Consume k items on each side.
        let k = 64usize;
        let mut pos = info.b_pos;
        for _ in 0..k {
            pos = sorter.next_right(&items, pos, &mut NoFix, &mut rng).unwrap() + 1;
        }
        let mut cur = info.b_pos;
        for _ in 0..k {
            cur = sorter.next_left(&items, cur, &mut NoFix, &mut rng).unwrap();
        }
        let k = 2 * k as u64;
        let bound = 64 * (n as u64 + k * k.ilog2() as u64);
        assert!(
            sorter.cmp_calls <= bound,
            "comparator calls {} exceed {bound}",
            sorter.cmp_calls
        );
    }
}
