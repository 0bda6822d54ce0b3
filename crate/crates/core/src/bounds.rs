//! Upper bounds and the fixing ledger: LP relaxation value, weak upper
//! bound with its constant-time availability reduction, the state-based LP
//! bound, and the two divisibility-based capacity bounds.
//!
//! Every bound is an exact rational over 128-bit intermediates; floats never
//! appear here.

use crate::prep::{ItemId, WorkItem};
use crate::ratio::{div_floor, Ratio};

/// Break solution data plus the current capacity, everything the closed-form
/// bounds need.
#[derive(Debug, Clone, Copy)]
pub struct BreakData {
    pub p_hat: u64,
    pub w_hat: u64,
    pub p_b: u64,
    pub w_b: u64,
    pub capacity: u64,
}

/// LP relaxation value of the full instance.
pub fn lp_value(bd: &BreakData) -> Ratio {
    let num = bd.p_hat as i128 * bd.w_b as i128
        + (bd.capacity as i128 - bd.w_hat as i128) * bd.p_b as i128;
    Ratio::new(num, bd.w_b as i128)
}

/// Weak upper bound after forcing `e` copies of the item added (right) or
/// removed (left), linearized at the break item's efficiency.
pub fn weak_bound(bd: &BreakData, item: &WorkItem, is_left: bool, e: u64) -> Ratio {
    let sign: i128 = if is_left { -1 } else { 1 };
    let p_bar = sign * item.profit as i128;
    let w_bar = sign * item.weight as i128;
    let e = e as i128;
    let num = (bd.p_hat as i128 + e * p_bar) * bd.w_b as i128
        + (bd.capacity as i128 - bd.w_hat as i128 - e * w_bar) * bd.p_b as i128;
    Ratio::new(num, bd.w_b as i128)
}

/// Closed form for the largest `e` with `WB(i, e) >= z + 1`, clamped to
/// `[0, d]`. Items with the break efficiency keep their full availability.
pub fn tight_availability(bd: &BreakData, item: &WorkItem, is_left: bool, d: u64, z: u64) -> u64 {
    let num = (z as i128 + 1 - bd.p_hat as i128) * bd.w_b as i128
        - (bd.capacity as i128 - bd.w_hat as i128) * bd.p_b as i128;
    let cross = item.profit as i128 * bd.w_b as i128 - item.weight as i128 * bd.p_b as i128;
    let delta = if is_left { -cross } else { cross };
    debug_assert!(delta <= 0, "side disagrees with efficiency order");
    if delta == 0 {
        return d;
    }
    if num >= 0 {
        // Even the unmodified relaxation sits below z + 1.
        return 0;
    }
    let e = div_floor(num, delta);
    debug_assert!(e >= 0);
    (e as u128).min(d as u128) as u64
}

/// Reference implementation of the availability reduction: walk `e` upward
/// until the weak bound drops below `z + 1`. Used to cross-validate the
/// closed form.
pub fn tight_availability_search(
    bd: &BreakData,
    item: &WorkItem,
    is_left: bool,
    d: u64,
    z: u64,
) -> u64 {
    let mut e = 0;
    while e < d && weak_bound(bd, item, is_left, e + 1).ge_int(z as i128 + 1) {
        e += 1;
    }
    // e = 0 must additionally satisfy WB(i, 0) >= z + 1 to count.
    if e == 0 && weak_bound(bd, item, is_left, 0).lt_int(z as i128 + 1) {
        return 0;
    }
    e
}

/// State-based LP bound; `None` means minus infinity (state is unrecoverable).
/// `nr`/`nl` are the (profit, weight) of the next unfixed right/left item;
/// the right sentinel is `(0, 1)`, a missing left item is `None`.
pub fn state_bound(
    s_p: u64,
    s_w: u64,
    capacity: u64,
    nr: (u64, u64),
    nl: Option<(u64, u64)>,
) -> Option<Ratio> {
    if s_w <= capacity {
        let num = s_p as i128 * nr.1 as i128 + (capacity - s_w) as i128 * nr.0 as i128;
        Some(Ratio::new(num, nr.1 as i128))
    } else {
        nl.map(|(p, w)| {
            let num = s_p as i128 * w as i128 - (s_w - capacity) as i128 * p as i128;
            Ratio::new(num, w as i128)
        })
    }
}

/// Tracks per-item residual copy counts and the two completion filters
/// derived from them: the maximum useful state weight and the minimum state
/// profit.
#[derive(Debug, Clone)]
pub struct Ledger {
    u: Vec<u64>,
    is_left: Vec<bool>,
    stage: Vec<Stage>,
    /// Σ u·w over left items not yet consumed by the DP.
    removable_w: u64,
    /// Σ u·p over right items not yet consumed by the DP.
    addable_p: u64,
    pub items_fixed: u64,
    version: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Pending,
    Current,
    Done,
}

impl Ledger {
    pub fn new(items: &[WorkItem], is_left: Vec<bool>) -> Self {
        debug_assert_eq!(items.len(), is_left.len());
        let u: Vec<u64> = items.iter().map(|it| it.avail).collect();
        let mut removable_w = 0u64;
        let mut addable_p = 0u64;
        for (idx, item) in items.iter().enumerate() {
            if is_left[idx] {
                removable_w += item.avail * item.weight;
            } else {
                addable_p += item.avail * item.profit;
            }
        }
        Ledger {
            u,
            is_left,
            stage: vec![Stage::Pending; items.len()],
            removable_w,
            addable_p,
            items_fixed: 0,
            version: 0,
        }
    }

    pub fn u(&self, id: ItemId) -> u64 {
        self.u[id as usize]
    }

    /// Bumped by every fix or absorb; cheap change detection.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn is_left(&self, id: ItemId) -> bool {
        self.is_left[id as usize]
    }

    pub fn is_done(&self, id: ItemId) -> bool {
        self.stage[id as usize] == Stage::Done
    }

    /// Maximum weight a state can carry and still reach feasibility by
    /// removing remaining left copies.
    pub fn w_max(&self, capacity: u64) -> u64 {
        capacity + self.removable_w
    }

    /// Σ u·p over right items the DP has not yet consumed.
    pub fn p_right(&self) -> u64 {
        self.addable_p
    }

    /// Tighten the unfixed availability of an item that is not being
    /// processed right now. No-op unless `new_u` is an actual reduction.
    pub fn reduce_to(&mut self, items: &[WorkItem], id: ItemId, new_u: u64) {
        let idx = id as usize;
        let old = self.u[idx];
        if new_u >= old {
            return;
        }
        debug_assert!(self.stage[idx] != Stage::Current, "cannot refix the current item");
        let delta = old - new_u;
        self.u[idx] = new_u;
        self.version += 1;
        if new_u == 0 {
            self.items_fixed += 1;
        }
        if self.stage[idx] == Stage::Pending {
            let item = &items[idx];
            if self.is_left[idx] {
                self.removable_w -= delta * item.weight;
            } else {
                self.addable_p -= delta * item.profit;
            }
        }
    }

    /// Fold `absorbed` into `kept`, `factor` copies of kept per absorbed
    /// copy. Both must be pending and on the same side. The completion sums
    /// are conserved because profit and weight scale inversely with the
    /// factor.
    pub fn absorb(&mut self, kept: ItemId, absorbed: ItemId, factor: u64) {
        debug_assert_eq!(self.stage[kept as usize], Stage::Pending);
        debug_assert_eq!(self.stage[absorbed as usize], Stage::Pending);
        debug_assert_eq!(self.is_left[kept as usize], self.is_left[absorbed as usize]);
        self.u[kept as usize] += factor * self.u[absorbed as usize];
        self.u[absorbed as usize] = 0;
        self.stage[absorbed as usize] = Stage::Done;
        self.version += 1;
    }

    pub fn begin_item(&mut self, id: ItemId) {
        debug_assert_eq!(self.stage[id as usize], Stage::Pending);
        self.stage[id as usize] = Stage::Current;
    }

    /// Account for `m` copies of the current item entering the DP (applied
    /// or skipped); called before the corresponding merge.
    pub fn consume(&mut self, items: &[WorkItem], id: ItemId, m: u64) {
        let idx = id as usize;
        debug_assert_eq!(self.stage[idx], Stage::Current);
        let item = &items[idx];
        if self.is_left[idx] {
            self.removable_w -= m * item.weight;
        } else {
            self.addable_p -= m * item.profit;
        }
    }

    pub fn finish_item(&mut self, id: ItemId) {
        debug_assert_eq!(self.stage[id as usize], Stage::Current);
        self.stage[id as usize] = Stage::Done;
    }

    /// Weight of copies pinned inside every improving solution, over left
    /// items.
    fn fixed_in(&self, items: &[WorkItem]) -> (u64, u64) {
        let mut p = 0u64;
        let mut w = 0u64;
        for (idx, item) in items.iter().enumerate() {
            if self.is_left[idx] {
                let pinned = item.avail - self.u[idx];
                p += pinned * item.profit;
                w += pinned * item.weight;
            }
        }
        (p, w)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Capacity tightening from the gcd of residual item weights. Returns the
/// new capacity; never larger than the current one.
pub fn trivial_divisibility(items: &[WorkItem], ledger: &Ledger, capacity: u64) -> u64 {
    let (_, fixed_w) = ledger.fixed_in(items);
    if fixed_w >= capacity {
        return capacity;
    }
    let residual_cap = capacity - fixed_w;
    let mut g = 0u64;
    for (idx, item) in items.iter().enumerate() {
        if ledger.u[idx] > 0 {
            g = gcd(g, item.weight);
            if g == 1 {
                return capacity;
            }
        }
    }
    if g == 0 {
        // No residual items at all; improving solutions hold exactly the
        // pinned copies.
        return fixed_w.min(capacity);
    }
    (fixed_w + (residual_cap / g) * g).min(capacity)
}

/// Availability-decrement relaxation: items whose single unfixed copy is in
/// every improving solution get that copy pinned (`u = 0`). Returns the
/// fixed item ids; empty when the pairwise precondition fails.
pub fn enhanced_divisibility(
    items: &[WorkItem],
    ledger: &mut Ledger,
    bd: &BreakData,
    z: u64,
) -> Vec<ItemId> {
    let mut unit_left: Vec<ItemId> = Vec::new();
    for idx in 0..items.len() {
        if ledger.is_left[idx] && ledger.u[idx] == 1 {
            unit_left.push(idx as ItemId);
        }
    }
    if unit_left.is_empty() {
        return Vec::new();
    }
    let z1 = z as i128 + 1;
    for &id in &unit_left {
        let item = &items[id as usize];
        if weak_bound(bd, item, true, 1).lt_int(z1) || weak_bound(bd, item, true, 2).ge_int(z1) {
            return Vec::new();
        }
    }
    // Shared residual set: unfixed copies outside the unit-availability
    // left items. One gcd and one best-efficiency scan serve every
    // candidate.
    let mut g = 0u64;
    let mut best_eff: Option<(u64, u64)> = None;
    for (idx, item) in items.iter().enumerate() {
        if ledger.u[idx] > 0 && !(ledger.is_left[idx] && ledger.u[idx] == 1) {
            g = gcd(g, item.weight);
            let better = match best_eff {
                None => true,
                Some((bp, bw)) => {
                    item.profit as u128 * bw as u128 > bp as u128 * item.weight as u128
                }
            };
            if better {
                best_eff = Some((item.profit, item.weight));
            }
        }
    }
    let (base_p, base_w) = ledger.fixed_in(items);
    let unit_p: u64 = unit_left.iter().map(|&id| items[id as usize].profit).sum();
    let unit_w: u64 = unit_left.iter().map(|&id| items[id as usize].weight).sum();

    let mut fixed = Vec::new();
    for &id in &unit_left {
        let item = &items[id as usize];
        let fixed_p = base_p + unit_p - item.profit;
        let fixed_w = base_w + unit_w - item.weight;
        let residual = bd.capacity.saturating_sub(fixed_w);
        let rounded = match g {
            0 => 0,
            g => (residual / g) * g,
        };
        let ub = match best_eff {
            Some((pg, wg)) => Ratio::new(
                fixed_p as i128 * wg as i128 + rounded as i128 * pg as i128,
                wg as i128,
            ),
            None => Ratio::from_int(fixed_p as i128),
        };
        if ub.lt_int(z1) {
            fixed.push(id);
        }
    }
    for &id in &fixed {
        ledger.reduce_to(items, id, 0);
    }
    fixed
}
