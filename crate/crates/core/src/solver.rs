//! Full solver orchestration: break solution and initial incumbents, the
//! state DP over the lazily built enumeration order, fixing and bounding
//! events driven by counters and thresholds, surrogate candidates, the
//! one-shot rewrite event, and final mask-based solution recovery.

use std::time::{Duration, Instant};

use crate::bounds::{
    enhanced_divisibility, lp_value, tight_availability, trivial_divisibility, weak_bound,
    BreakData, Ledger,
};
use crate::error::{Error, Result};
use crate::heuristics::{
    greedy_fill, pairing, pairing_with_offset, sampling_plan, ssph_subset_size, PairHit,
    SAMPLING_MIN_BLOCK,
};
use crate::instance::{evaluate_solution, Instance, Solution};
use crate::prep::{arena_from_instance, FixProbe, ItemId, Sorter, WorkItem};
use crate::recovery::{capture, decode, Decode, Snapshot};
use crate::reduce::{
    aggregate_identical, cap_availability, fix_dominated_left, fix_dominated_right,
    multiplicity_reduce, shape_dominated_right, weight_filter_allows, ReductionLog,
};
use crate::rng::Rng;
use crate::states::{binary_decompose, ChangeVector, ExpansionGuard, GuardDecision, MergeFilter, StateSet};
use crate::surrogate::{
    cardinality_bounds, cardinality_pair_candidates, find_mu_int, make_candidate,
    special_case_offset, Candidate, CardForm,
};

/// Independent feature toggles; all enabled by default. Multiplicity
/// reduction rides on item aggregation and is forced off with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Features {
    pub completion_filters: bool,
    pub guarded_extension: bool,
    pub divisibility_bounds: bool,
    pub skip_subsequent_iterations: bool,
    pub multiplicity_reduction: bool,
    pub item_aggregation: bool,
    pub dominance_fixing: bool,
    pub tph: bool,
    pub ssph: bool,
    pub sph: bool,
    pub gch: bool,
}

pub const FEATURE_NAMES: [&str; 11] = [
    "completion-filters",
    "guarded-extension",
    "divisibility-bounds",
    "skip-subsequent-iterations",
    "multiplicity-reduction",
    "item-aggregation",
    "dominance-fixing",
    "tph",
    "ssph",
    "sph",
    "gch",
];

impl Features {
    pub fn all() -> Self {
        Features {
            completion_filters: true,
            guarded_extension: true,
            divisibility_bounds: true,
            skip_subsequent_iterations: true,
            multiplicity_reduction: true,
            item_aggregation: true,
            dominance_fixing: true,
            tph: true,
            ssph: true,
            sph: true,
            gch: true,
        }
    }

    pub fn set(&mut self, name: &str, on: bool) -> bool {
        match name {
            "completion-filters" => self.completion_filters = on,
            "guarded-extension" => self.guarded_extension = on,
            "divisibility-bounds" => self.divisibility_bounds = on,
            "skip-subsequent-iterations" => self.skip_subsequent_iterations = on,
            "multiplicity-reduction" => self.multiplicity_reduction = on,
            "item-aggregation" => self.item_aggregation = on,
            "dominance-fixing" => self.dominance_fixing = on,
            "tph" => self.tph = on,
            "ssph" => self.ssph = on,
            "sph" => self.sph = on,
            "gch" => self.gch = on,
            _ => return false,
        }
        true
    }

    fn normalized(mut self) -> Self {
        if !self.item_aggregation {
            self.multiplicity_reduction = false;
        }
        self
    }
}

impl Default for Features {
    fn default() -> Self {
        Features::all()
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub seed: u64,
    pub features: Features,
    pub time_limit: Option<Duration>,
    /// Threshold overrides; defaults derive from the item count.
    pub t_lsr: Option<u64>,
    pub t_hp: Option<u64>,
    pub t_div: Option<u64>,
    pub p_sr: Option<u64>,
    /// Surrogate candidate budget: this many generated states per state in
    /// the frontier at spawn time.
    pub candidate_budget_factor: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            features: Features::all(),
            time_limit: None,
            t_lsr: None,
            t_hp: None,
            t_div: None,
            p_sr: None,
            candidate_budget_factor: 10,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub states_enumerated: u64,
    pub items_fixed: u64,
    pub heuristic_hits: u64,
    pub bound_calls: u64,
    pub recursion_depth: u32,
    pub peak_states: usize,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub optimum: u64,
    pub solution: Solution,
    pub proven: bool,
    /// Tightest known upper bound; equals the optimum when proven.
    pub upper_bound: u64,
    pub stats: SolveStats,
    pub elapsed: Duration,
}

/// Solve an instance exactly.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult> {
    let call = Call {
        surrogate: true,
        deadline: cfg.time_limit.map(|d| Instant::now() + d),
        node_budget: None,
        early_target: None,
        depth: 0,
    };
    solve_call(inst, cfg, call)
}

/// Solver variant with surrogate relaxation and multiplicity reduction
/// disabled; used for surrogate candidate instances.
pub fn solve_no_surrogate(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult> {
    let mut cfg = cfg.clone();
    cfg.features.multiplicity_reduction = false;
    let call = Call {
        surrogate: false,
        deadline: cfg.time_limit.map(|d| Instant::now() + d),
        node_budget: None,
        early_target: None,
        depth: 0,
    };
    solve_call(inst, &cfg, call)
}

/// Solve a reduced instance, stopping as soon as a solution of value at
/// least `target` is certified. Used by solution recovery, where the target
/// is known to be attainable; the result's optimum may exceed the target if
/// a better solution appears first.
pub fn solve_reduced(inst: &Instance, cfg: &SolverConfig, target: u64) -> Result<SolveResult> {
    let call = Call {
        surrogate: true,
        deadline: cfg.time_limit.map(|d| Instant::now() + d),
        node_budget: None,
        early_target: Some(target),
        depth: 0,
    };
    solve_call(inst, cfg, call)
}

#[derive(Debug, Clone, Copy)]
struct Call {
    surrogate: bool,
    deadline: Option<Instant>,
    node_budget: Option<u64>,
    early_target: Option<u64>,
    depth: u32,
}

const MAX_COEFF_SUM: u128 = 1 << 62;
const GUARD_INITIAL: u64 = 10;
const FORCED_EXPANSION_SKIPS: u64 = 40;
const TRIVIAL_DIV_STATES: usize = 1000;
const SSPH_ALPHA: u64 = 20;

fn validate(inst: &Instance) -> Result<()> {
    if inst.is_empty() {
        return Err(Error::InvalidInstance("no items".into()));
    }
    for (i, it) in inst.items.iter().enumerate() {
        if it.profit == 0 || it.weight == 0 || it.availability == 0 {
            return Err(Error::InvalidInstance(format!("item {i} has a zero field")));
        }
    }
    if inst.total_weight() > MAX_COEFF_SUM || inst.total_profit() > MAX_COEFF_SUM {
        return Err(Error::InvalidInstance("total profit or weight exceeds 2^62".into()));
    }
    Ok(())
}

fn solve_call(inst: &Instance, cfg: &SolverConfig, call: Call) -> Result<SolveResult> {
    let started = Instant::now();
    validate(inst)?;
    if call.depth as usize > inst.len() + 64 {
        return Err(Error::Internal("recovery recursion exceeded its depth bound".into()));
    }
    let mut driver = Driver::new(inst, cfg, call)?;
    let proven = driver.run()?;
    driver.finalize(proven, started)
}

#[derive(Debug, Clone)]
enum Incumbent {
    /// Multiplicities in original instance space.
    Materialized(Vec<u64>),
    Snapshot(Snapshot),
}

struct PairBounds {
    /// Floor of the min-cardinality side bound.
    min_side: u64,
    /// Floor of the max-cardinality side bound.
    max_side: u64,
}

struct Driver<'a> {
    inst: &'a Instance,
    cfg: &'a SolverConfig,
    feats: Features,
    call: Call,
    items: Vec<WorkItem>,
    sorter: Sorter,
    ledger: Ledger,
    bd: BreakData,
    w_hat_static: u64,
    b_pos: usize,
    set: StateSet,
    chv: ChangeVector,
    rng: Rng,
    z: u64,
    incumbent: Incumbent,
    ub: u64,
    log: ReductionLog,
    l: usize,
    r: usize,
    prefer_left: bool,
    c_lsr: u64,
    c_hp: u64,
    c_div: u64,
    t_lsr: u64,
    t_hp: u64,
    t_div: u64,
    p_sr: u64,
    flag_lsr: bool,
    flag_amr: bool,
    guard: [ExpansionGuard; 2],
    pair: Option<PairBounds>,
    candidates: Vec<Candidate>,
    sub_seed: u64,
    ledger_version_at_div: u64,
    capacity_at_div: u64,
    stats: SolveStats,
    full_fit: bool,
}

struct WeakProbe<'a> {
    items: &'a [WorkItem],
    ledger: &'a mut Ledger,
    bd: BreakData,
    z: u64,
    calls: &'a mut u64,
}

impl FixProbe for WeakProbe<'_> {
    fn try_fix(&mut self, id: ItemId) -> bool {
        if self.ledger.u(id) == 0 {
            return true;
        }
        *self.calls += 1;
        let item = &self.items[id as usize];
        let left = self.ledger.is_left(id);
        if weak_bound(&self.bd, item, left, 1).lt_int(self.z as i128 + 1) {
            self.ledger.reduce_to(self.items, id, 0);
            true
        } else {
            false
        }
    }
}

fn peek_side(
    sorter: &mut Sorter,
    items: &[WorkItem],
    ledger: &mut Ledger,
    bd: BreakData,
    z: u64,
    rng: &mut Rng,
    calls: &mut u64,
    left: bool,
    l: usize,
    r: usize,
) -> Option<usize> {
    let mut probe = WeakProbe { items, ledger, bd, z, calls };
    if left {
        sorter.next_left(items, l, &mut probe, rng)
    } else {
        sorter.next_right(items, r, &mut probe, rng)
    }
}

impl<'a> Driver<'a> {
    fn new(inst: &'a Instance, cfg: &'a SolverConfig, call: Call) -> Result<Self> {
        let n = inst.len();
        let feats = cfg.features.normalized();
        let items = arena_from_instance(inst);
        let mut sorter = Sorter::new(n);
        let mut rng = Rng::new(cfg.seed ^ (call.depth as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let info = sorter.find_break(&items, inst.capacity, &mut rng);
        let full_fit = info.full_fit;
        let b_pos = info.b_pos;
        let mut is_left = vec![false; n];
        for pos in 0..b_pos.min(n) {
            is_left[sorter.order[pos] as usize] = true;
        }
        let ledger = Ledger::new(&items, is_left);
        let (p_b, w_b) = if b_pos < n {
            let it = &items[sorter.order[b_pos] as usize];
            (it.profit, it.weight)
        } else {
            (0, 1)
        };
        let bd = BreakData {
            p_hat: info.p_hat,
            w_hat: info.w_hat,
            p_b,
            w_b,
            capacity: inst.capacity,
        };
        let nlog = (n as u64).max(2).ilog2() as u64;
        let t_lsr = cfg.t_lsr.unwrap_or(10 * n as u64);
        let t_hp = cfg.t_hp.unwrap_or(10 * n as u64);
        let t_div = cfg.t_div.unwrap_or((5 * n as u64 * nlog).max(1));
        let p_sr = cfg.p_sr.unwrap_or((50 * n as u64).max(10_000));
        Ok(Driver {
            inst,
            cfg,
            feats,
            call,
            items,
            sorter,
            ledger,
            bd,
            w_hat_static: info.w_hat,
            b_pos,
            set: StateSet::init(info.p_hat, info.w_hat),
            chv: ChangeVector::new(),
            rng,
            z: 0,
            incumbent: Incumbent::Materialized(vec![0; n]),
            ub: u64::MAX,
            log: ReductionLog::default(),
            l: b_pos,
            r: b_pos,
            prefer_left: true,
            c_lsr: 0,
            c_hp: 0,
            c_div: 0,
            t_lsr,
            t_hp,
            t_div,
            p_sr,
            flag_lsr: true,
            flag_amr: true,
            guard: [ExpansionGuard::new(GUARD_INITIAL); 2],
            pair: None,
            candidates: Vec::new(),
            sub_seed: 1,
            ledger_version_at_div: u64::MAX,
            capacity_at_div: u64::MAX,
            stats: SolveStats::default(),
            full_fit,
        })
    }

    fn item(&self, id: ItemId) -> WorkItem {
        self.items[id as usize]
    }

    fn out_of_time(&self) -> bool {
        self.call.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn out_of_budget(&self) -> bool {
        self.call.node_budget.is_some_and(|b| self.stats.states_enumerated > b)
    }

    fn target_reached(&self) -> bool {
        self.call.early_target.is_some_and(|t| self.z >= t)
    }

    // ----- incumbents -------------------------------------------------

    fn set_materialized(&mut self, x: Vec<u64>, value: u64) {
        debug_assert!(value > self.z || self.z == 0);
        self.z = self.z.max(value);
        self.incumbent = Incumbent::Materialized(x);
    }

    fn capture_state(&mut self, state: (u64, u64, u64)) {
        self.z = state.0;
        self.incumbent = Incumbent::Snapshot(capture(state, &self.chv, self.l, self.r, Vec::new()));
    }

    fn capture_heuristic(&mut self, hit: PairHit, weight: u64, extras: Vec<(ItemId, u64, bool)>) {
        let mask = self.set.mask(hit.state_idx);
        let snap = capture((hit.value, weight, mask), &self.chv, self.l, self.r, extras);
        self.z = hit.value;
        self.incumbent = Incumbent::Snapshot(snap);
        self.stats.heuristic_hits += 1;
    }

    /// Validate and apply a pairing-style candidate: `extras` holds signed
    /// item deltas against state `hit.state_idx`.
    fn try_pair_incumbent(&mut self, hit: PairHit, extras: Vec<(ItemId, u64, bool)>) -> bool {
        if hit.value <= self.z {
            return false;
        }
        // Exact re-evaluation of the delta arithmetic (the feasibility gate
        // for non-materializable candidates).
        let mut value = self.set.profit(hit.state_idx) as i128;
        let mut weight = self.set.weight(hit.state_idx) as i128;
        for &(id, m, removes) in &extras {
            if m > self.ledger.u(id) {
                return false;
            }
            let it = self.item(id);
            let sign = if removes { -1 } else { 1 };
            value += sign * (m * it.profit) as i128;
            weight += sign * (m * it.weight) as i128;
        }
        if value != hit.value as i128 || weight < 0 || weight > self.bd.capacity as i128 {
            return false;
        }
        self.capture_heuristic(hit, weight as u64, extras);
        true
    }

    // ----- initial heuristics ------------------------------------------

    fn initial_incumbent(&mut self) -> Result<()> {
        let n = self.items.len();
        let order = &self.sorter.order;
        let mut x = vec![0u64; n];
        for pos in 0..self.b_pos {
            let id = order[pos] as usize;
            x[id] = self.items[id].avail;
        }
        let b_id = order[self.b_pos] as usize;
        let b = self.items[b_id];
        let mut e_b = ((self.bd.capacity - self.bd.w_hat) / b.weight).min(b.avail);
        x[b_id] = e_b;
        let mut w_rem = self.bd.capacity - self.bd.w_hat - e_b * b.weight;
        let z0 = self.bd.p_hat + e_b * b.profit;

        // Rule variants, each O(n): fill with one right item, swap the least
        // efficient included item for a right item, or free room for one more
        // copy of the break item.
        #[derive(Clone, Copy)]
        enum Fix {
            None,
            Add { pos: usize, copies: u64 },
            Swap { pos: usize, copies: u64 },
            Insert { pos: usize, copies: u64 },
        }
        let mut best = (z0, Fix::None);
        for pos in self.b_pos + 1..n {
            let it = self.items[order[pos] as usize];
            let e = (w_rem / it.weight).min(it.avail);
            if e > 0 && z0 + e * it.profit > best.0 {
                best = (z0 + e * it.profit, Fix::Add { pos, copies: e });
            }
        }
        // Least efficient included item: the break item if used, otherwise
        // the last left item when its position is already sorted.
        let swap_out = if e_b >= 1 {
            Some(self.b_pos)
        } else if self.b_pos > 0 && self.b_pos - 1 >= self.sorter.left_sorted_range(self.l).start {
            Some(self.b_pos - 1)
        } else {
            None
        };
        if let Some(t_pos) = swap_out {
            let t = self.items[order[t_pos] as usize];
            let freed = w_rem + t.weight;
            for pos in self.b_pos + 1..n {
                let it = self.items[order[pos] as usize];
                let e = (freed / it.weight).min(it.avail);
                if e > 0 {
                    let val = z0 - t.profit + e * it.profit;
                    if val > best.0 {
                        best = (val, Fix::Swap { pos, copies: e });
                    }
                }
            }
        }
        if e_b + 1 <= b.avail {
            let deficit = b.weight - w_rem;
            for pos in 0..self.b_pos {
                let it = self.items[order[pos] as usize];
                let e = deficit.div_ceil(it.weight);
                if e <= it.avail {
                    let val = z0 + b.profit - e * it.profit;
                    if val > best.0 {
                        best = (val, Fix::Insert { pos, copies: e });
                    }
                }
            }
        }
        match best.1 {
            Fix::None => {}
            Fix::Add { pos, copies } => x[order[pos] as usize] += copies,
            Fix::Swap { pos, copies } => {
                let t_pos = swap_out.unwrap();
                x[order[t_pos] as usize] -= 1;
                if t_pos == self.b_pos {
                    e_b -= 1;
                }
                x[order[pos] as usize] += copies;
            }
            Fix::Insert { pos, copies } => {
                x[order[pos] as usize] -= copies;
                x[b_id] += 1;
                e_b += 1;
            }
        }
        let _ = e_b;
        let _ = &mut w_rem;
        let ev = evaluate_solution(self.inst, &x)?;
        if !ev.feasible {
            return Err(Error::Internal("initial heuristic built an infeasible solution".into()));
        }
        self.set_materialized(x, ev.value);
        self.greedy_complete()?;
        Ok(())
    }

    // ----- greedy completion --------------------------------------------

    fn greedy_complete(&mut self) -> Result<()> {
        if !self.feats.gch {
            return Ok(());
        }
        match self.incumbent.clone() {
            Incumbent::Materialized(mut x) => {
                let ev = evaluate_solution(self.inst, &x)?;
                let budget = self.bd.capacity.saturating_sub(ev.weight);
                if budget == 0 {
                    return Ok(());
                }
                let mut rightmost = None;
                for (pos, &id) in self.sorter.order.iter().enumerate() {
                    if x[id as usize] > 0 {
                        rightmost = Some(pos);
                    }
                }
                let start = rightmost.map_or(0, |p| p + 1);
                let mut left = budget;
                let mut changed = false;
                for &id in self.sorter.order.iter().skip(start) {
                    let orig = self.inst.items[id as usize].availability;
                    let spare = orig - x[id as usize].min(orig);
                    let w = self.inst.items[id as usize].weight;
                    let fit = (left / w).min(spare);
                    if fit > 0 {
                        x[id as usize] += fit;
                        left -= fit * w;
                        changed = true;
                    }
                }
                if changed {
                    let ev = evaluate_solution(self.inst, &x)?;
                    if ev.feasible && ev.value > self.z {
                        self.stats.heuristic_hits += 1;
                        self.set_materialized(x, ev.value);
                    }
                }
            }
            Incumbent::Snapshot(mut snap) => {
                let budget = self.bd.capacity.saturating_sub(snap.weight);
                if budget == 0 {
                    return Ok(());
                }
                let extras = snap.extras.clone();
                let pinned = move |id: ItemId| {
                    extras
                        .iter()
                        .filter(|&&(eid, _, removes)| eid == id && !removes)
                        .map(|&(_, m, _)| m)
                        .sum()
                };
                let adds =
                    greedy_fill(&self.items, &self.ledger, &self.sorter.order, self.r, budget, &pinned);
                if adds.is_empty() {
                    return Ok(());
                }
                for &(id, m) in &adds {
                    snap.profit += m * self.item(id).profit;
                    snap.weight += m * self.item(id).weight;
                    snap.extras.push((id, m, false));
                }
                if snap.profit > self.z {
                    self.z = snap.profit;
                    self.stats.heuristic_hits += 1;
                    self.incumbent = Incumbent::Snapshot(snap);
                }
            }
        }
        Ok(())
    }

    // ----- main loop ----------------------------------------------------

    /// Returns true when optimality was proven.
    fn run(&mut self) -> Result<bool> {
        if self.full_fit {
            let mut x = vec![0u64; self.items.len()];
            for pos in 0..self.b_pos {
                let id = self.sorter.order[pos] as usize;
                x[id] = self.items[id].avail;
            }
            let ev = evaluate_solution(self.inst, &x)?;
            debug_assert!(ev.feasible);
            self.set_materialized(x, ev.value);
            self.ub = self.z;
            return Ok(true);
        }
        self.initial_incumbent()?;
        self.ub = lp_value(&self.bd).floor().max(self.z as i128) as u64;
        loop {
            if self.z >= self.ub || self.target_reached() {
                return Ok(self.z >= self.ub);
            }
            if self.set.is_empty() {
                self.ub = self.z;
                return Ok(true);
            }
            if self.out_of_time() || self.out_of_budget() {
                return Ok(false);
            }
            let sides = if self.prefer_left { [true, false] } else { [false, true] };
            let mut picked = None;
            for left in sides {
                if let Some(pos) = self.peek(left) {
                    picked = Some((pos, left));
                    break;
                }
            }
            let Some((pos, left)) = picked else {
                // Both sides exhausted: the states already cover everything.
                self.ub = self.z;
                return Ok(true);
            };
            self.prefer_left = !left;
            let (first_empty, last_generated) = self.process_item(pos, left)?;
            self.after_item_hooks(pos, left, first_empty, last_generated)?;
        }
    }

    fn peek(&mut self, left: bool) -> Option<usize> {
        peek_side(
            &mut self.sorter,
            &self.items,
            &mut self.ledger,
            self.bd,
            self.z,
            &mut self.rng,
            &mut self.stats.bound_calls,
            left,
            self.l,
            self.r,
        )
    }

    fn peek_pw(&mut self, left: bool) -> Option<(u64, u64)> {
        self.peek(left).map(|pos| {
            let it = self.item(self.sorter.order[pos]);
            (it.profit, it.weight)
        })
    }

    fn merge_filter(&mut self, cur: WorkItem, left: bool, last_bucket: bool) -> MergeFilter {
        self.stats.bound_calls += 1;
        let nl = if left && !last_bucket {
            Some((cur.profit, cur.weight))
        } else {
            self.peek_pw(true)
        };
        let nr = if !left && !last_bucket {
            (cur.profit, cur.weight)
        } else {
            self.peek_pw(false).unwrap_or((0, 1))
        };
        let (w_max, p_right) = if self.feats.completion_filters {
            (self.ledger.w_max(self.bd.capacity), self.ledger.p_right())
        } else {
            // Fall back to the plain recurrence window.
            (self.bd.capacity + self.w_hat_static, u64::MAX / 2)
        };
        MergeFilter { w_max, capacity: self.bd.capacity, z: self.z, p_right, nr, nl }
    }

    /// Outcome of an item evaluation needed by the fixing hooks.
    fn process_item(&mut self, pos: usize, left: bool) -> Result<(bool, u64)> {
        let id = self.sorter.order[pos];
        if left {
            self.l = pos;
        } else {
            self.r = pos + 1;
        }
        let item = self.item(id);
        self.stats.bound_calls += 1;
        let tight = tight_availability(&self.bd, &item, left, self.ledger.u(id), self.z);
        self.ledger.reduce_to(&self.items, id, tight);
        let u = self.ledger.u(id);
        debug_assert!(u >= 1, "peek returned a fixable item");
        self.ledger.begin_item(id);
        let buckets = binary_decompose(u);
        let side = left as usize;
        let mut first_empty = false;
        let mut last_generated = 0u64;
        let mut consumed = 0u64;
        let mut improved = false;
        for (k, &m) in buckets.iter().enumerate() {
            let last_bucket = k + 1 == buckets.len();
            self.ledger.consume(&self.items, id, m);
            consumed += m;
            let filter = self.merge_filter(item, left, last_bucket);
            if self.feats.guarded_extension
                && self.guard[side].decide(FORCED_EXPANSION_SKIPS) == GuardDecision::Check
            {
                if self.set.can_extend(m * item.profit, m * item.weight, left, &filter) {
                    self.guard[side].on_check_hit();
                } else {
                    self.guard[side].on_skip();
                    if k == 0 {
                        first_empty = true;
                    }
                    last_generated = 0;
                    if self.feats.skip_subsequent_iterations {
                        break;
                    }
                    continue;
                }
            }
            let slot = self.chv.push(id, m);
            let out = self.set.extend(m * item.profit, m * item.weight, left, slot, &filter);
            self.stats.states_enumerated += out.generated;
            last_generated = out.generated;
            self.guard[side].on_expanded(out.generated);
            if out.generated == 0 {
                if k == 0 {
                    first_empty = true;
                }
                if self.feats.skip_subsequent_iterations {
                    break;
                }
            } else if let Some(st) = out.incumbent {
                if st.0 > self.z {
                    self.capture_state(st);
                    improved = true;
                }
            }
        }
        if consumed < u {
            // Skipped buckets count as processed for the completion filters.
            self.ledger.consume(&self.items, id, u - consumed);
        }
        self.ledger.finish_item(id);
        self.stats.peak_states = self.stats.peak_states.max(self.set.peak);
        let s_len = self.set.len() as u64;
        self.c_lsr += s_len;
        self.c_hp += s_len;
        self.c_div += s_len;
        if improved {
            self.greedy_complete()?;
        }
        Ok((first_empty, last_generated))
    }

    /// Lines after the bucket loop: dominance fixing, sampled pairing, the
    /// surrogate relaxations, heavy primal heuristics, and divisibility.
    fn after_item_hooks(
        &mut self,
        pos: usize,
        left: bool,
        first_empty: bool,
        last_generated: u64,
    ) -> Result<()> {
        self.dominance_hooks(pos, left, first_empty, last_generated);
        self.sampling_pairing()?;
        if self.call.surrogate && self.flag_lsr
            && (self.c_lsr >= self.t_lsr || self.set.len() as u64 > self.p_sr)
        {
            self.flag_lsr = false;
            self.linear_surrogate();
        }
        if self.call.surrogate && self.set.len() as u64 > self.p_sr && !self.candidates.is_empty()
        {
            self.integer_surrogate()?;
        }
        if self.c_hp >= self.t_hp {
            self.heavy_primal()?;
            self.c_hp = 0;
            self.t_hp *= 2;
        }
        if self.feats.divisibility_bounds && self.set.len() > TRIVIAL_DIV_STATES {
            // Re-run only when a fix or capacity change altered the residual
            // set since the last call.
            if self.ledger.version() != self.ledger_version_at_div
                || self.bd.capacity != self.capacity_at_div
            {
                self.run_trivial_divisibility();
                self.ledger_version_at_div = self.ledger.version();
                self.capacity_at_div = self.bd.capacity;
            }
        }
        if self.c_div >= self.t_div {
            self.divisibility_event()?;
            self.c_div = 0;
            self.t_div *= 2;
        }
        Ok(())
    }

    // ----- fixing and bounding events ------------------------------------

    fn dominance_hooks(&mut self, pos: usize, left: bool, first_empty: bool, last_generated: u64) {
        if !self.feats.dominance_fixing || self.set.len() < self.sorter.order.len() {
            return;
        }
        let id = self.sorter.order[pos];
        let item = self.item(id);
        if left {
            if first_empty {
                let range = self.sorter.left_sorted_range(self.l);
                let fixed = fix_dominated_left(
                    &self.items,
                    &mut self.ledger,
                    &self.sorter.order,
                    range,
                    item.profit,
                    item.weight,
                );
                let _ = fixed;
            }
            return;
        }
        if first_empty {
            let range = self.sorter.right_sorted_range(self.r);
            let fixed = fix_dominated_right(
                &self.items,
                &mut self.ledger,
                &self.sorter.order,
                range,
                item.profit,
                item.weight,
            );
            let _ = fixed;
        } else if last_generated > 0 {
            // Shape-matching candidates justify the O(|S|) witness scan only
            // in pairs.
            let range = self.sorter.right_sorted_range(self.r);
            let mut shaped = Vec::new();
            for p in range {
                let cid = self.sorter.order[p];
                if self.ledger.u(cid) == 0 {
                    continue;
                }
                let cit = self.item(cid);
                if shape_dominated_right(item.profit, item.weight, cit.profit, cit.weight) {
                    shaped.push(cid);
                }
            }
            if shaped.len() < 2 {
                return;
            }
            let filter = self.merge_filter(item, false, true);
            let Some((_, s_w)) = self.set.probe_extension(item.profit, item.weight, false, &filter)
            else {
                return;
            };
            let w_max = filter.w_max;
            for cid in shaped {
                let cit = self.item(cid);
                if !weight_filter_allows(s_w, item.weight, cit.weight, w_max) {
                    self.ledger.reduce_to(&self.items, cid, 0);
                }
            }
        }
    }

    fn sampling_pairing(&mut self) -> Result<()> {
        if !self.feats.sph || self.set.is_empty() {
            return Ok(());
        }
        let n = self.sorter.order.len();
        let plan = sampling_plan(self.set.len(), n, self.l, n - self.r);
        let mut picks: Vec<(usize, bool)> = Vec::new();
        if plan.gamma_left >= SAMPLING_MIN_BLOCK {
            let mut t = 0;
            while t < self.l {
                let len = plan.gamma_left.min(self.l - t);
                picks.push((t + self.rng.index(len), true));
                t += plan.gamma_left;
            }
        }
        if plan.gamma_right >= SAMPLING_MIN_BLOCK {
            let mut t = self.r;
            while t < n {
                let len = plan.gamma_right.min(n - t);
                picks.push((t + self.rng.index(len), false));
                t += plan.gamma_right;
            }
        }
        for (pos, is_left) in picks {
            let id = self.sorter.order[pos];
            if self.ledger.u(id) == 0 {
                continue;
            }
            let it = self.item(id);
            if let Some(hit) = pairing(&self.set, &it, is_left, self.bd.capacity, self.z) {
                if self.try_pair_incumbent(hit, vec![(id, 1, is_left)]) {
                    self.greedy_complete()?;
                }
            }
        }
        Ok(())
    }

    fn heavy_primal(&mut self) -> Result<()> {
        let n = self.sorter.order.len();
        let outside: Vec<(usize, bool)> = (0..self.l)
            .map(|p| (p, true))
            .chain((self.r..n).map(|p| (p, false)))
            .collect();
        // Plain pairing over every unfixed item outside the core.
        for &(pos, is_left) in &outside {
            let id = self.sorter.order[pos];
            if self.ledger.u(id) == 0 {
                continue;
            }
            let it = self.item(id);
            if let Some(hit) = pairing(&self.set, &it, is_left, self.bd.capacity, self.z) {
                if self.try_pair_incumbent(hit, vec![(id, 1, is_left)]) {
                    self.greedy_complete()?;
                }
            }
        }
        let set_len = self.set.len() as u64;
        if set_len >= 2 {
            let lefts: Vec<usize> = (0..self.l)
                .filter(|&p| self.ledger.u(self.sorter.order[p]) > 0)
                .collect();
            let rights: Vec<usize> = (self.r..n)
                .filter(|&p| self.ledger.u(self.sorter.order[p]) > 0)
                .collect();
            let pair_count = lefts.len() as u64 * rights.len() as u64;
            if self.feats.tph
                && pair_count > 0
                && pair_count * set_len.max(2).ilog2() as u64 * 1 < set_len
            {
                for &lp in &lefts {
                    for &rp in &rights {
                        let li = self.item(self.sorter.order[lp]);
                        let ri = self.item(self.sorter.order[rp]);
                        let dp = ri.profit as i128 - li.profit as i128;
                        let dw = ri.weight as i128 - li.weight as i128;
                        if let Some(hit) =
                            pairing_with_offset(&self.set, dp, dw, self.bd.capacity, self.z)
                        {
                            let extras = vec![
                                (self.sorter.order[lp], 1, true),
                                (self.sorter.order[rp], 1, false),
                            ];
                            if self.try_pair_incumbent(hit, extras) {
                                self.greedy_complete()?;
                            }
                        }
                    }
                }
            }
            if self.feats.ssph && self.set.len() >= n * n {
                self.subset_pairing()?;
            }
        }
        Ok(())
    }

    fn subset_pairing(&mut self) -> Result<()> {
        let n = self.sorter.order.len();
        let k = ssph_subset_size(SSPH_ALPHA, self.set.len());
        if k < 2 {
            return Ok(());
        }
        let mut pool: Vec<(ItemId, bool)> = (0..self.l)
            .map(|p| (self.sorter.order[p], true))
            .chain((self.r..n).map(|p| (self.sorter.order[p], false)))
            .filter(|&(id, _)| self.ledger.u(id) > 0)
            .collect();
        let k = (k as usize).min(pool.len());
        if k < 2 {
            return Ok(());
        }
        // Partial Fisher-Yates draw of k members.
        for i in 0..k {
            let j = i + self.rng.index(pool.len() - i);
            pool.swap(i, j);
        }
        let chosen = &pool[..k];
        for mask in 1u32..(1 << k) {
            if mask.count_ones() < 2 {
                continue;
            }
            let mut dp = 0i128;
            let mut dw = 0i128;
            let mut extras = Vec::new();
            for (bit, &(id, is_left)) in chosen.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    let it = self.item(id);
                    let sign = if is_left { -1 } else { 1 };
                    dp += sign * it.profit as i128;
                    dw += sign * it.weight as i128;
                    extras.push((id, 1, is_left));
                }
            }
            if let Some(hit) = pairing_with_offset(&self.set, dp, dw, self.bd.capacity, self.z) {
                if self.try_pair_incumbent(hit, extras) {
                    self.greedy_complete()?;
                }
            }
        }
        Ok(())
    }

    fn linear_surrogate(&mut self) {
        let cb = cardinality_bounds(self.inst, self.z);
        if cb.proves_optimal() {
            self.ub = self.z;
            return;
        }
        let reqs = cardinality_pair_candidates(&cb, self.z);
        if reqs.is_empty() {
            return;
        }
        // Sides omitted from the requests are vacuous: no improving
        // solution can have a copy count in their range.
        let mut min_side = 0u64;
        let mut max_side = 0u64;
        for (form, card) in reqs {
            let out = special_case_offset(self.inst, card, form)
                .unwrap_or_else(|| find_mu_int(self.inst, card, form));
            let fl = out.ub_sf.floor().max(0) as u64;
            match form {
                CardForm::Min => min_side = fl,
                CardForm::Max => max_side = fl,
            }
            if out.ub_sf.ge_int(self.z as i128 + 1) && !out.suppress_candidate {
                self.candidates.push(make_candidate(self.inst, out.mu, card, form));
            }
        }
        self.pair = Some(PairBounds { min_side, max_side });
        self.refresh_pair_bound();
    }

    fn refresh_pair_bound(&mut self) {
        if let Some(pair) = &self.pair {
            let combined = pair.min_side.max(pair.max_side);
            self.ub = self.ub.min(combined.max(self.z));
        }
    }

    fn integer_surrogate(&mut self) -> Result<()> {
        let budget = self.cfg.candidate_budget_factor * self.set.len().max(1) as u64;
        let pending = std::mem::take(&mut self.candidates);
        for cand in pending {
            let value = self.solve_candidate(&cand, budget)?;
            let Some((total, witness)) = value else { continue };
            if let Some(pair) = &mut self.pair {
                match cand.form {
                    CardForm::Min => pair.min_side = pair.min_side.min(total),
                    CardForm::Max => pair.max_side = pair.max_side.min(total),
                }
            }
            // Surrogate solutions feasible for the true capacity improve z.
            if let Some(x) = witness {
                let ev = evaluate_solution(self.inst, &x)?;
                if ev.feasible && ev.value > self.z {
                    self.set_materialized(x, ev.value);
                    self.stats.heuristic_hits += 1;
                    self.greedy_complete()?;
                }
            }
        }
        self.refresh_pair_bound();
        Ok(())
    }

    /// Solve one surrogate candidate under a node budget. Returns the side
    /// bound and, when feasible, the original-space witness.
    #[allow(clippy::type_complexity)]
    fn solve_candidate(
        &mut self,
        cand: &Candidate,
        budget: u64,
    ) -> Result<Option<(u64, Option<Vec<u64>>)>> {
        if cand.instance.is_empty() || cand.instance.capacity == 0 {
            // Everything folded or nothing fits: the base alone is exact.
            let total = cand.base_profit;
            let mut x = vec![0u64; self.inst.len()];
            for &idx in &cand.folded {
                x[idx] = self.inst.items[idx].availability;
            }
            return Ok(Some((total, Some(x))));
        }
        self.sub_seed += 1;
        let sub_cfg = SolverConfig {
            seed: self.cfg.seed.wrapping_add(self.sub_seed.wrapping_mul(0x9e3779b97f4a7c15)),
            features: {
                let mut f = self.feats;
                f.multiplicity_reduction = false;
                f
            },
            time_limit: None,
            t_lsr: None,
            t_hp: None,
            t_div: None,
            p_sr: None,
            candidate_budget_factor: self.cfg.candidate_budget_factor,
        };
        let call = Call {
            surrogate: false,
            deadline: self.call.deadline,
            node_budget: Some(budget),
            early_target: None,
            depth: self.call.depth + 1,
        };
        let res = solve_call(&cand.instance, &sub_cfg, call)?;
        self.stats.states_enumerated += res.stats.states_enumerated;
        self.stats.bound_calls += res.stats.bound_calls;
        if !res.proven {
            // Abandoned candidates contribute nothing.
            return Ok(None);
        }
        let total = cand.base_profit + res.optimum;
        let mut x = vec![0u64; self.inst.len()];
        for &idx in &cand.folded {
            x[idx] = self.inst.items[idx].availability;
        }
        for (i, &orig) in cand.kept.iter().enumerate() {
            x[orig] = res.solution.multiplicities[i];
        }
        Ok(Some((total, Some(x))))
    }

    fn divisibility_event(&mut self) -> Result<()> {
        if self.feats.divisibility_bounds {
            self.run_trivial_divisibility();
            enhanced_divisibility(&self.items, &mut self.ledger, &self.bd, self.z);
        }
        if self.flag_amr {
            self.flag_amr = false;
            if self.feats.item_aggregation {
                self.rewrite_event()?;
            }
        }
        Ok(())
    }

    fn run_trivial_divisibility(&mut self) {
        let tightened = trivial_divisibility(&self.items, &self.ledger, self.bd.capacity);
        if tightened < self.bd.capacity {
            self.bd.capacity = tightened;
            let lp = lp_value(&self.bd).floor().max(self.z as i128) as u64;
            self.ub = self.ub.min(lp);
        }
    }

    fn rewrite_event(&mut self) -> Result<()> {
        self.sorter.full_sort_remaining(&self.items, self.l, self.r);
        let mut left_ids: Vec<ItemId> = self.sorter.order[..self.l].to_vec();
        let mut right_ids: Vec<ItemId> = self.sorter.order[self.r..].to_vec();
        let before_left = left_ids.len();
        aggregate_identical(&mut self.items, &mut self.ledger, &mut left_ids, &mut self.log);
        aggregate_identical(&mut self.items, &mut self.ledger, &mut right_ids, &mut self.log);
        if self.feats.multiplicity_reduction {
            loop {
                let before = left_ids.len() + right_ids.len();
                multiplicity_reduce(&mut self.items, &mut self.ledger, &mut left_ids, &mut self.log);
                multiplicity_reduce(&mut self.items, &mut self.ledger, &mut right_ids, &mut self.log);
                if left_ids.len() + right_ids.len() == before {
                    break;
                }
            }
        }
        cap_availability(&mut self.items, &mut self.ledger, &right_ids, self.bd.capacity);
        let dead_left = (before_left - left_ids.len()) as usize;
        // Rebuild the order; processed positions shift down by the items
        // removed from the left range.
        let mut order = Vec::with_capacity(left_ids.len() + (self.r - self.l) + right_ids.len());
        order.extend_from_slice(&left_ids);
        order.extend_from_slice(&self.sorter.order[self.l..self.r]);
        order.extend_from_slice(&right_ids);
        self.sorter.order = order;
        let new_l = self.l - dead_left;
        let new_r = self.r - dead_left;
        self.b_pos -= dead_left;
        self.l = new_l;
        self.r = new_r;
        self.sorter.reset_after_rewrite(self.b_pos);
        // Remap the live snapshot: core bounds shift with the left range,
        // extras follow their absorbing item.
        if let Incumbent::Snapshot(snap) = &mut self.incumbent {
            snap.core_l -= dead_left.min(snap.core_l);
            snap.core_r -= dead_left.min(snap.core_r);
            for rewrite in &self.log.rewrites {
                let (kept, gone, factor) = match *rewrite {
                    crate::reduce::Rewrite::Aggregate { kept, absorbed, .. } => (kept, absorbed, 1),
                    crate::reduce::Rewrite::Halve { kept, removed, .. } => (kept, removed, 2),
                };
                for extra in &mut snap.extras {
                    if extra.0 == gone {
                        extra.0 = kept;
                        extra.1 *= factor;
                    }
                }
            }
        }
        Ok(())
    }

    // ----- finalization ---------------------------------------------------

    fn finalize(mut self, proven: bool, started: Instant) -> Result<SolveResult> {
        let x = self.recover_solution()?;
        let ev = evaluate_solution(self.inst, &x)?;
        if !ev.feasible {
            return Err(Error::Internal("recovered solution is infeasible".into()));
        }
        if ev.value < self.z {
            return Err(Error::Internal(format!(
                "recovered value {} below incumbent {}",
                ev.value, self.z
            )));
        }
        if proven && ev.value != self.z {
            return Err(Error::Internal("proven optimum does not match its witness".into()));
        }
        self.stats.items_fixed = self.ledger.items_fixed;
        self.stats.peak_states = self.stats.peak_states.max(self.set.peak);
        Ok(SolveResult {
            optimum: ev.value,
            solution: Solution { multiplicities: x, value: ev.value, weight: ev.weight },
            proven,
            upper_bound: if proven { self.z } else { self.ub },
            stats: self.stats,
            elapsed: started.elapsed(),
        })
    }

    fn recover_solution(&mut self) -> Result<Vec<u64>> {
        let incumbent = self.incumbent.clone();
        match incumbent {
            Incumbent::Materialized(x) => Ok(x),
            Incumbent::Snapshot(snap) => {
                let ledger = &self.ledger;
                let is_left = |id: ItemId| ledger.is_left(id);
                let mut x = match decode(&self.items, &self.sorter.order, &is_left, &snap)? {
                    Decode::Done(x) => x,
                    Decode::Residual { mut base, instance, ids, target } => {
                        self.sub_seed += 1;
                        let sub_cfg = SolverConfig {
                            seed: self
                                .cfg
                                .seed
                                .wrapping_add(self.sub_seed.wrapping_mul(0x517cc1b727220a95)),
                            features: self.feats,
                            time_limit: None,
                            t_lsr: None,
                            t_hp: None,
                            t_div: None,
                            p_sr: None,
                            candidate_budget_factor: self.cfg.candidate_budget_factor,
                        };
                        let call = Call {
                            surrogate: self.call.surrogate,
                            deadline: None,
                            node_budget: None,
                            early_target: Some(target),
                            depth: self.call.depth + 1,
                        };
                        let res = solve_call(&instance, &sub_cfg, call)?;
                        self.stats.states_enumerated += res.stats.states_enumerated;
                        self.stats.bound_calls += res.stats.bound_calls;
                        self.stats.recursion_depth =
                            self.stats.recursion_depth.max(1 + res.stats.recursion_depth);
                        if res.optimum < target {
                            return Err(Error::Internal(
                                "residual recovery missed its target value".into(),
                            ));
                        }
                        for (i, &id) in ids.iter().enumerate() {
                            base[id as usize] += res.solution.multiplicities[i];
                        }
                        base
                    }
                };
                crate::reduce::reverse_map(&mut x, &self.log);
                Ok(x)
            }
        }
    }
}
