//! Deterministic instance generators for the thirteen benchmark classes.
//!
//! Profits and weights follow the classic class laws; the capacity of the
//! h-th instance in a series of H is `floor(h / (H + 1) * sum(w_j))`. The
//! bounded variant draws availabilities uniformly from [1, 20] and avoids
//! duplicate items except in the span classes, where duplicates are needed
//! to reach the requested size.

use crate::error::{Error, Result};
use crate::instance::{Instance, Item};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassId {
    Uncorrelated,
    WeaklyCorrelated,
    StronglyCorrelated,
    InverseStronglyCorrelated,
    AlmostStronglyCorrelated,
    SubsetSum,
    SimilarWeights,
    UncorrelatedSpan,
    WeaklyCorrelatedSpan,
    StronglyCorrelatedSpan,
    MultipleStronglyCorrelated,
    ProfitCeiling,
    Circle,
}

impl ClassId {
    pub const ALL: [ClassId; 13] = [
        ClassId::Uncorrelated,
        ClassId::WeaklyCorrelated,
        ClassId::StronglyCorrelated,
        ClassId::InverseStronglyCorrelated,
        ClassId::AlmostStronglyCorrelated,
        ClassId::SubsetSum,
        ClassId::SimilarWeights,
        ClassId::UncorrelatedSpan,
        ClassId::WeaklyCorrelatedSpan,
        ClassId::StronglyCorrelatedSpan,
        ClassId::MultipleStronglyCorrelated,
        ClassId::ProfitCeiling,
        ClassId::Circle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClassId::Uncorrelated => "uncorrelated",
            ClassId::WeaklyCorrelated => "weakly-correlated",
            ClassId::StronglyCorrelated => "strongly-correlated",
            ClassId::InverseStronglyCorrelated => "inverse-strongly-correlated",
            ClassId::AlmostStronglyCorrelated => "almost-strongly-correlated",
            ClassId::SubsetSum => "subset-sum",
            ClassId::SimilarWeights => "similar-weights",
            ClassId::UncorrelatedSpan => "uncorrelated-span",
            ClassId::WeaklyCorrelatedSpan => "weakly-correlated-span",
            ClassId::StronglyCorrelatedSpan => "strongly-correlated-span",
            ClassId::MultipleStronglyCorrelated => "multiple-strongly-correlated",
            ClassId::ProfitCeiling => "profit-ceiling",
            ClassId::Circle => "circle",
        }
    }

    pub fn from_name(name: &str) -> Option<ClassId> {
        ClassId::ALL.iter().copied().find(|c| c.name() == name)
    }

    pub fn is_span(&self) -> bool {
        matches!(
            self,
            ClassId::UncorrelatedSpan | ClassId::WeaklyCorrelatedSpan | ClassId::StronglyCorrelatedSpan
        )
    }

    /// Legal range parameters. The first six classes use 1e3..1e7,
    /// similar-weights 1e5..1e8, and the engineered classes are defined for
    /// small coefficients upward.
    fn range_ok(&self, r: u64) -> bool {
        match self {
            ClassId::SimilarWeights => (1_000..=100_000_000).contains(&r),
            _ => (10..=100_000_000).contains(&r),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorSpec {
    pub class: ClassId,
    pub n: usize,
    pub range: u64,
    /// Capacity fraction index, 1-based.
    pub h: u64,
    /// Number of instances in the series.
    pub total: u64,
    pub seed: u64,
    pub bounded: bool,
}

const SPAN_SET: usize = 2;
const SPAN_MULTIPLIER: u64 = 10;
const MAX_AVAILABILITY: u64 = 20;
const DEDUP_RETRIES: usize = 1000;

fn base_pair(class: ClassId, r: u64, rng: &mut Rng) -> (u64, u64) {
    match class {
        ClassId::Uncorrelated | ClassId::UncorrelatedSpan => {
            (rng.uniform(1, r), rng.uniform(1, r))
        }
        ClassId::WeaklyCorrelated | ClassId::WeaklyCorrelatedSpan => {
            let w = rng.uniform(1, r);
            let lo = w.saturating_sub(r / 10).max(1);
            let hi = w + r / 10;
            (rng.uniform(lo, hi), w)
        }
        ClassId::StronglyCorrelated | ClassId::StronglyCorrelatedSpan => {
            let w = rng.uniform(1, r);
            (w + r / 10, w)
        }
        ClassId::InverseStronglyCorrelated => {
            let p = rng.uniform(1, r);
            (p, p + r / 10)
        }
        ClassId::AlmostStronglyCorrelated => {
            let w = rng.uniform(1, r);
            let center = w + r / 10;
            let lo = center.saturating_sub(r / 500).max(1);
            let hi = center + r / 500;
            (rng.uniform(lo, hi), w)
        }
        ClassId::SubsetSum => {
            let w = rng.uniform(1, r);
            (w, w)
        }
        ClassId::SimilarWeights => {
            let w = rng.uniform(r, r + (r / 1000).max(1));
            (rng.uniform(1, (r / 100).max(1)), w)
        }
        ClassId::MultipleStronglyCorrelated => {
            let w = rng.uniform(1, r);
            let bonus = if w % 6 == 0 { 3 * r / 10 } else { 2 * r / 10 };
            (w + bonus.max(1), w)
        }
        ClassId::ProfitCeiling => {
            let w = rng.uniform(1, r);
            (3 * w.div_ceil(3), w)
        }
        ClassId::Circle => {
            let w = rng.uniform(1, r);
            let x = 4 * (r as u128) * (r as u128) - ((2 * r - w) as u128).pow(2);
            let p = (2 * isqrt(x) / 3).max(1);
            (p as u64, w)
        }
    }
}

fn isqrt(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut x = 1u128 << (v.ilog2() / 2 + 1);
    loop {
        let y = (x + v / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Generate an instance; a pure function of the spec.
pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    if spec.n == 0 {
        return Err(Error::InvalidSpec("n must be positive".into()));
    }
    if spec.h < 1 || spec.h > spec.total {
        return Err(Error::InvalidSpec(format!("need 1 <= h <= H, got h={} H={}", spec.h, spec.total)));
    }
    if !spec.class.range_ok(spec.range) {
        return Err(Error::InvalidSpec(format!(
            "range {} out of bounds for class {}",
            spec.range,
            spec.class.name()
        )));
    }
    // Item draws depend on everything except `h`, so the h-th instance of a
    // series differs from its siblings only in capacity.
    let mut rng = Rng::new(spec.seed).fork((spec.n as u64).rotate_left(17) ^ spec.range);
    let pairs = if spec.class.is_span() {
        // A small spanner set, scaled down, replicated with random multipliers.
        let mut span = Vec::with_capacity(SPAN_SET);
        for _ in 0..SPAN_SET {
            let (p, w) = base_pair(spec.class, spec.range, &mut rng);
            span.push(((p / (SPAN_MULTIPLIER + 1)).max(1), (w / (SPAN_MULTIPLIER + 1)).max(1)));
        }
        (0..spec.n)
            .map(|_| {
                let (p, w) = span[rng.index(SPAN_SET)];
                let a = rng.uniform(1, SPAN_MULTIPLIER);
                (p * a, w * a)
            })
            .collect::<Vec<_>>()
    } else if spec.bounded {
        // Resample duplicates up to a retry cap; a duplicate that survives
        // the cap is kept as-is.
        let mut seen = std::collections::HashSet::with_capacity(spec.n * 2);
        let mut out = Vec::with_capacity(spec.n);
        for _ in 0..spec.n {
            let mut pair = base_pair(spec.class, spec.range, &mut rng);
            for _ in 0..DEDUP_RETRIES {
                if seen.insert(pair) {
                    break;
                }
                pair = base_pair(spec.class, spec.range, &mut rng);
            }
            out.push(pair);
        }
        out
    } else {
        (0..spec.n).map(|_| base_pair(spec.class, spec.range, &mut rng)).collect()
    };

    let items: Vec<Item> = pairs
        .into_iter()
        .map(|(p, w)| Item {
            profit: p,
            weight: w,
            availability: if spec.bounded { rng.uniform(1, MAX_AVAILABILITY) } else { 1 },
        })
        .collect();

    let weight_sum: u128 = items.iter().map(|i| i.weight as u128).sum();
    let capacity = (spec.h as u128 * weight_sum) / (spec.total as u128 + 1);
    if capacity == 0 {
        return Err(Error::InvalidSpec("capacity rounds to zero; raise h or n".into()));
    }
    Ok(Instance { items, capacity: capacity as u64 })
}
