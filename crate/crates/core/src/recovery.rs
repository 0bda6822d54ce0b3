//! Low-memory solution reconstruction.
//!
//! States carry only a 64-bit mask over the change vector, so an incumbent
//! is saved as the state plus a copy of the vector and the core interval.
//! Decoding pins the masked bucket applications; when they do not explain
//! the whole state, the remainder is recovered by solving a much smaller
//! residual instance with a known target value.

use crate::error::{Error, Result};
use crate::instance::{Instance, Item};
use crate::prep::{ItemId, WorkItem};
use crate::states::ChangeVector;

/// Saved incumbent: the state, the change vector at capture time, the core
/// interval (widened to cover heuristic items), and any synthetic entries
/// from heuristics.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub profit: u64,
    pub weight: u64,
    pub mask: u64,
    pub entries: [(ItemId, u64); 64],
    /// Core positions `[core_l, core_r)` at capture.
    pub core_l: usize,
    pub core_r: usize,
    /// Heuristic deltas: (item, copies, removes-left-copies).
    pub extras: Vec<(ItemId, u64, bool)>,
}

/// Deep copy of state, change vector, and core.
pub fn capture(
    state: (u64, u64, u64),
    chv: &ChangeVector,
    core_l: usize,
    core_r: usize,
    extras: Vec<(ItemId, u64, bool)>,
) -> Snapshot {
    let (profit, weight, mask) = state;
    Snapshot { profit, weight, mask, entries: *chv.entries(), core_l, core_r, extras }
}

#[derive(Debug)]
pub enum Decode {
    /// Multiplicities (by item id, current instance space) fully recovered.
    Done(Vec<u64>),
    /// Masked entries pin part of the solution; the rest needs a solve.
    Residual {
        /// Pinned assignment outside the residual; residual results add in.
        base: Vec<u64>,
        instance: Instance,
        /// Ids aligned with `instance.items`.
        ids: Vec<ItemId>,
        /// Exact value the residual solve must reach.
        target: u64,
    },
}

/// Decode a snapshot against the current arena and order.
pub fn decode(
    items: &[WorkItem],
    order: &[ItemId],
    is_left: &dyn Fn(ItemId) -> bool,
    snap: &Snapshot,
) -> Result<Decode> {
    let n = items.len();
    let mut removed = vec![0u64; n];
    let mut included = vec![0u64; n];
    for k in 0..64 {
        if snap.mask & (1u64 << k) != 0 {
            let (id, m) = snap.entries[k];
            if id == u32::MAX {
                return Err(Error::Internal("mask bit references an unused slot".into()));
            }
            if is_left(id) {
                removed[id as usize] += m;
            } else {
                included[id as usize] += m;
            }
        }
    }
    for &(id, m, removes) in &snap.extras {
        if removes {
            removed[id as usize] += m;
        } else {
            included[id as usize] += m;
        }
    }

    // Optimistic pass: left items keep every copy minus pinned removals,
    // right items hold exactly the pinned inclusions. Exact when the mask
    // and extras explain the state's whole history.
    let mut x = vec![0u64; n];
    for &id in order.iter() {
        let idx = id as usize;
        if is_left(id) {
            let avail = items[idx].avail;
            if removed[idx] > avail {
                return Err(Error::Internal("masked removals exceed availability".into()));
            }
            x[idx] = avail - removed[idx];
        } else {
            x[idx] = included[idx];
        }
    }
    let value: u128 = x.iter().zip(items).map(|(&k, it)| k as u128 * it.profit as u128).sum();
    let weight: u128 = x.iter().zip(items).map(|(&k, it)| k as u128 * it.weight as u128).sum();
    if value == snap.profit as u128 && weight == snap.weight as u128 {
        return Ok(Decode::Done(x));
    }

    // Pin only what is certain: everything left of the core plus masked
    // right inclusions. Left-core inclusion levels go back to the residual.
    let mut base = vec![0u64; n];
    let mut p_pref: u128 = 0;
    let mut w_pref: u128 = 0;
    let mut residual_items = Vec::new();
    let mut ids = Vec::new();
    for (pos, &id) in order.iter().enumerate() {
        let idx = id as usize;
        let it = &items[idx];
        if pos < snap.core_l {
            // Certain: all copies minus pinned removals.
            let kept = it.avail - removed[idx];
            base[idx] = kept;
            p_pref += kept as u128 * it.profit as u128;
            w_pref += kept as u128 * it.weight as u128;
        } else if pos < snap.core_r {
            if is_left(id) {
                let avail = it.avail.checked_sub(removed[idx]).ok_or_else(|| {
                    Error::Internal("masked removals exceed availability".into())
                })?;
                if avail > 0 {
                    residual_items.push(Item::new(it.profit, it.weight, avail));
                    ids.push(id);
                }
            } else {
                base[idx] = included[idx];
                p_pref += included[idx] as u128 * it.profit as u128;
                w_pref += included[idx] as u128 * it.weight as u128;
                let spare = it.avail.saturating_sub(included[idx]);
                if spare > 0 {
                    residual_items.push(Item::new(it.profit, it.weight, spare));
                    ids.push(id);
                }
            }
        } else {
            // Beyond the core only pinned additions count.
            base[idx] = included[idx];
            p_pref += included[idx] as u128 * it.profit as u128;
            w_pref += included[idx] as u128 * it.weight as u128;
        }
    }
    if p_pref > snap.profit as u128 || w_pref > snap.weight as u128 {
        return Err(Error::Internal("pinned prefix exceeds the incumbent state".into()));
    }
    let target = (snap.profit as u128 - p_pref) as u64;
    let capacity = (snap.weight as u128 - w_pref) as u64;
    if target == 0 {
        // The prefix already carries the full value; leaving the residual
        // items out keeps the weight within bounds.
        return Ok(Decode::Done(base));
    }
    if residual_items.is_empty() {
        return Err(Error::Internal("recovery target unreachable: no residual items".into()));
    }
    Ok(Decode::Residual { base, instance: Instance::new(residual_items, capacity), ids, target })
}
