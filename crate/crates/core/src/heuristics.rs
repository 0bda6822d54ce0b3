//! Primal heuristics: pairing a state with items outside the core, pair and
//! subset variants, block-sampled pairing, and greedy completion of a fresh
//! incumbent. Every candidate value is validated before the incumbent moves.

use crate::bounds::Ledger;
use crate::prep::{ItemId, WorkItem};
use crate::states::StateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairHit {
    pub value: u64,
    pub state_idx: usize,
}

/// Best state (max weight, hence max profit) whose weight shifted by `dw`
/// stays within the capacity; returns the improved value if it beats `z`.
pub fn pairing_with_offset(
    set: &StateSet,
    dp: i128,
    dw: i128,
    capacity: u64,
    z: u64,
) -> Option<PairHit> {
    let limit = capacity as i128 - dw;
    if limit < 0 {
        return None;
    }
    let limit = limit.min(u64::MAX as i128) as u64;
    let idx = set.heaviest_within(limit)?;
    let value = set.profit(idx) as i128 + dp;
    if value > z as i128 && value >= 0 {
        Some(PairHit { value: value as u64, state_idx: idx })
    } else {
        None
    }
}

/// Pair one copy of an item with the best compatible state. Left items are
/// removed (weight credit), right items added.
pub fn pairing(
    set: &StateSet,
    item: &WorkItem,
    is_left: bool,
    capacity: u64,
    z: u64,
) -> Option<PairHit> {
    let (dp, dw) = if is_left {
        (-(item.profit as i128), -(item.weight as i128))
    } else {
        (item.profit as i128, item.weight as i128)
    };
    pairing_with_offset(set, dp, dw, capacity, z)
}

/// Largest subset size `k` with `alpha * k * 2^k <= set_len`.
pub fn ssph_subset_size(alpha: u64, set_len: usize) -> u32 {
    let mut k = 0u32;
    while k < 30 {
        let next = k + 1;
        let cost = alpha as u128 * next as u128 * (1u128 << next);
        if cost > set_len as u128 {
            break;
        }
        k = next;
    }
    k
}

/// Block sizes for the sampled pairing pass: one sample per block of
/// `gamma_side` items, sides shorter than the cutoff are skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingPlan {
    pub gamma_left: usize,
    pub gamma_right: usize,
}

pub const SAMPLING_MIN_BLOCK: usize = 3;

pub fn sampling_plan(set_len: usize, n: usize, left_count: usize, right_count: usize) -> SamplingPlan {
    let beta = set_len.div_ceil(50).max(1);
    let gamma = n / beta;
    SamplingPlan {
        gamma_left: left_count.min(gamma),
        gamma_right: right_count.min(gamma),
    }
}

/// Greedily add copies of items in order from `start` while they fit.
/// `budget` is the free capacity; `pinned` reports copies the solution
/// already holds so they are not added twice.
pub fn greedy_fill(
    items: &[WorkItem],
    ledger: &Ledger,
    order: &[ItemId],
    start: usize,
    mut budget: u64,
    pinned: &dyn Fn(ItemId) -> u64,
) -> Vec<(ItemId, u64)> {
    let mut adds = Vec::new();
    for &id in order.iter().skip(start) {
        let avail = ledger.u(id).min(items[id as usize].avail).saturating_sub(pinned(id));
        if avail == 0 {
            continue;
        }
        let fit = (budget / items[id as usize].weight).min(avail);
        if fit > 0 {
            budget -= fit * items[id as usize].weight;
            adds.push((id, fit));
        }
    }
    adds
}
