//! Problem data types and the two supported file formats.
//!
//! Canonical format: line 1 is `n W`, followed by `n` lines `p w [d]` where
//! the availability `d` defaults to 1. Jooken format: line 1 is `n`, then
//! `n` lines `index p w`, and the capacity on the final line. Both are ASCII
//! decimal, single-space separated, LF line endings.

use crate::error::{Error, Result};

/// One item type: profit, weight, and number of available copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Item {
    pub profit: u64,
    pub weight: u64,
    pub availability: u64,
}

impl Item {
    pub fn new(profit: u64, weight: u64, availability: u64) -> Self {
        debug_assert!(profit >= 1 && weight >= 1 && availability >= 1);
        Item { profit, weight, availability }
    }
}

/// A bounded knapsack instance.
///
/// The capacity is non-negative; parsers reject zero, but internal reduced
/// instances (solution recovery) may legitimately carry `capacity == 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub items: Vec<Item>,
    pub capacity: u64,
}

impl Instance {
    pub fn new(items: Vec<Item>, capacity: u64) -> Self {
        Instance { items, capacity }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Total weight over all copies; u128 so huge availabilities cannot wrap.
    pub fn total_weight(&self) -> u128 {
        self.items
            .iter()
            .map(|it| it.weight as u128 * it.availability as u128)
            .sum()
    }

    pub fn total_profit(&self) -> u128 {
        self.items
            .iter()
            .map(|it| it.profit as u128 * it.availability as u128)
            .sum()
    }
}

/// Item multiplicities together with their value and weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub multiplicities: Vec<u64>,
    pub value: u64,
    pub weight: u64,
}

impl Solution {
    pub fn empty(n: usize) -> Self {
        Solution { multiplicities: vec![0; n], value: 0, weight: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub value: u64,
    pub weight: u64,
    pub feasible: bool,
}

/// Compute value, weight and feasibility of a multiplicity vector.
pub fn evaluate_solution(inst: &Instance, multiplicities: &[u64]) -> Result<Evaluation> {
    if multiplicities.len() != inst.len() {
        return Err(Error::SolutionLength { expected: inst.len(), got: multiplicities.len() });
    }
    let mut value: u128 = 0;
    let mut weight: u128 = 0;
    let mut within_availability = true;
    for (item, &x) in inst.items.iter().zip(multiplicities) {
        if x > item.availability {
            within_availability = false;
        }
        value += item.profit as u128 * x as u128;
        weight += item.weight as u128 * x as u128;
    }
    let feasible = within_availability && weight <= inst.capacity as u128;
    Ok(Evaluation {
        value: u64::try_from(value).map_err(|_| Error::InvalidInstance("value overflow".into()))?,
        weight: u64::try_from(weight)
            .map_err(|_| Error::InvalidInstance("weight overflow".into()))?,
        feasible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Canonical,
    Jooken,
}

fn parse_u64(tok: &str, line: usize, what: &str) -> Result<u64> {
    let v: u64 = tok
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("invalid {what} `{tok}`") })?;
    Ok(v)
}

fn parse_positive(tok: &str, line: usize, what: &str) -> Result<u64> {
    let v = parse_u64(tok, line, what)?;
    if v == 0 {
        return Err(Error::Parse { line, msg: format!("{what} must be positive") });
    }
    Ok(v)
}

/// Parse an instance from text in the given format.
pub fn parse_instance(text: &str, format: Format) -> Result<Instance> {
    match format {
        Format::Canonical => parse_canonical(text),
        Format::Jooken => parse_jooken(text),
    }
}

/// Guess the format: Jooken headers contain a single integer, canonical two.
pub fn sniff_format(text: &str) -> Format {
    match text.lines().next().map(|l| l.split_whitespace().count()) {
        Some(1) => Format::Jooken,
        _ => Format::Canonical,
    }
}

fn parse_canonical(text: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
    let mut toks = header.split_whitespace();
    let n = parse_positive(
        toks.next().ok_or_else(|| Error::Parse { line: 1, msg: "missing item count".into() })?,
        1,
        "item count",
    )? as usize;
    let capacity = parse_positive(
        toks.next().ok_or_else(|| Error::Parse { line: 1, msg: "missing capacity".into() })?,
        1,
        "capacity",
    )?;
    if toks.next().is_some() {
        return Err(Error::Parse { line: 1, msg: "trailing tokens in header".into() });
    }
    let mut items = Vec::with_capacity(n);
    for (idx, raw) in lines {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        if items.len() == n {
            return Err(Error::Parse { line: line_no, msg: "more item lines than declared".into() });
        }
        let mut toks = raw.split_whitespace();
        let profit = parse_positive(
            toks.next().ok_or_else(|| Error::Parse { line: line_no, msg: "missing profit".into() })?,
            line_no,
            "profit",
        )?;
        let weight = parse_positive(
            toks.next().ok_or_else(|| Error::Parse { line: line_no, msg: "missing weight".into() })?,
            line_no,
            "weight",
        )?;
        let availability = match toks.next() {
            Some(tok) => parse_positive(tok, line_no, "availability")?,
            None => 1,
        };
        if toks.next().is_some() {
            return Err(Error::Parse { line: line_no, msg: "trailing tokens".into() });
        }
        items.push(Item { profit, weight, availability });
    }
    if items.len() != n {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("expected {n} items, found {}", items.len()),
        });
    }
    Ok(Instance { items, capacity })
}

fn parse_jooken(text: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
    let n = parse_positive(header.trim(), 1, "item count")? as usize;
    let mut items = Vec::with_capacity(n);
    let mut capacity = None;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        if items.len() < n {
            let mut toks = raw.split_whitespace();
            let _index = parse_u64(
                toks.next().ok_or_else(|| Error::Parse { line: line_no, msg: "missing index".into() })?,
                line_no,
                "index",
            )?;
            let profit = parse_positive(
                toks.next().ok_or_else(|| Error::Parse { line: line_no, msg: "missing profit".into() })?,
                line_no,
                "profit",
            )?;
            let weight = parse_positive(
                toks.next().ok_or_else(|| Error::Parse { line: line_no, msg: "missing weight".into() })?,
                line_no,
                "weight",
            )?;
            items.push(Item { profit, weight, availability: 1 });
        } else if capacity.is_none() {
            capacity = Some(parse_positive(raw.trim(), line_no, "capacity")?);
        } else {
            return Err(Error::Parse { line: line_no, msg: "trailing content".into() });
        }
    }
    let capacity = capacity.ok_or_else(|| Error::Parse {
        line: text.lines().count(),
        msg: "missing capacity line".into(),
    })?;
    if items.len() != n {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("expected {n} items, found {}", items.len()),
        });
    }
    Ok(Instance { items, capacity })
}

/// Serialize an instance; round-trips bit-exactly with `parse_instance`.
pub fn write_instance(inst: &Instance, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Canonical => {
            out.push_str(&format!("{} {}\n", inst.len(), inst.capacity));
            for item in &inst.items {
                if item.availability == 1 {
                    out.push_str(&format!("{} {}\n", item.profit, item.weight));
                } else {
                    out.push_str(&format!("{} {} {}\n", item.profit, item.weight, item.availability));
                }
            }
        }
        Format::Jooken => {
            out.push_str(&format!("{}\n", inst.len()));
            for (i, item) in inst.items.iter().enumerate() {
                out.push_str(&format!("{} {} {}\n", i + 1, item.profit, item.weight));
            }
            out.push_str(&format!("{}\n", inst.capacity));
        }
    }
    out
}
