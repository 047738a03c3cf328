//! Schedule builders and bookkeeping-vector semantics for the tree,
//! hedge, and single-layer circuit families.
//!
//! Every copy carries an integer label: the real part counts imaginary-time
//! steps (in units of eps), the imaginary part counts real-time steps (in
//! units of eps for V gates, √eps for W). A gate may only act on two copies
//! whose labels are equal; it then moves them one step apart. The potential
//! S(c) = Σ (Re c_k)² grows by exactly 2 per gate, which certifies the gate
//! count M = S(c_final)/2 as optimal.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::numerics::NumericsConfig;

/// Per-copy bookkeeping label (units of eps; see module docs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label {
    pub re: i32,
    pub im: i32,
}

impl Label {
    pub const ZERO: Label = Label { re: 0, im: 0 };
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.re, self.im)
    }
}

/// One schedule step: a two-copy gate or a real-time padding evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Gate { kind: GateKind, i: usize, j: usize },
    Pad { copy: usize, steps: u32 },
}

/// Circuit family a schedule was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleFamily {
    Tree,
    Hedge,
    SingleLayer,
    Custom,
}

impl fmt::Display for ScheduleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScheduleFamily::Tree => "tree",
            ScheduleFamily::Hedge => "hedge",
            ScheduleFamily::SingleLayer => "single_layer",
            ScheduleFamily::Custom => "custom",
        };
        write!(f, "{s}")
    }
}

impl FromStr for ScheduleFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(ScheduleFamily::Tree),
            "hedge" => Ok(ScheduleFamily::Hedge),
            "single_layer" => Ok(ScheduleFamily::SingleLayer),
            "custom" => Ok(ScheduleFamily::Custom),
            other => Err(Error::Config(format!("unknown schedule family '{other}'"))),
        }
    }
}

/// Ordered gate/padding sequence on a multi-copy register.
///
/// `layer_bounds` holds the step index where each layer starts; an empty
/// list marks an unlayered (custom) schedule. The direction `sign` applies
/// to every gate: +1 makes the first copy approximate e^{-βH} (cooling).
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub family: ScheduleFamily,
    pub n: u32,
    pub m_copies: usize,
    pub sign: i8,
    pub steps: Vec<Step>,
    pub layer_bounds: Vec<usize>,
}

impl Schedule {
    /// Wraps an explicit step list as an unlayered custom schedule.
    pub fn custom(m_copies: usize, steps: Vec<Step>) -> Self {
        Schedule {
            family: ScheduleFamily::Custom,
            n: 0,
            m_copies,
            sign: 1,
            steps,
            layer_bounds: Vec::new(),
        }
    }

    pub fn gate_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Gate { .. }))
            .count()
    }

    pub fn pad_step_total(&self) -> u64 {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Pad { steps, .. } => *steps as u64,
                _ => 0,
            })
            .sum()
    }

    /// Step ranges of the layers; a single whole-schedule range when the
    /// schedule is unlayered.
    pub fn layer_ranges(&self) -> Vec<std::ops::Range<usize>> {
        if self.layer_bounds.is_empty() {
            return vec![0..self.steps.len()];
        }
        let mut out = Vec::with_capacity(self.layer_bounds.len());
        for (k, &start) in self.layer_bounds.iter().enumerate() {
            let end = self
                .layer_bounds
                .get(k + 1)
                .copied()
                .unwrap_or(self.steps.len());
            out.push(start..end);
        }
        out
    }

    pub fn uses_kind(&self, kind: GateKind) -> bool {
        self.steps
            .iter()
            .any(|s| matches!(s, Step::Gate { kind: k, .. } if *k == kind))
    }

    /// Line-oriented text form: header `family n m_copies sign`, then one
    /// line per step (`g <kind> <i> <j>` or `p <copy> <steps>`, 1-based).
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let sign = if self.sign >= 0 { "+1" } else { "-1" };
        out.push_str(&format!(
            "{} {} {} {}\n",
            self.family, self.n, self.m_copies, sign
        ));
        for step in &self.steps {
            match step {
                Step::Gate { kind, i, j } => {
                    out.push_str(&format!("g {} {} {}\n", kind, i + 1, j + 1));
                }
                Step::Pad { copy, steps } => {
                    out.push_str(&format!("p {} {}\n", copy + 1, steps));
                }
            }
        }
        out
    }

    /// Parses the text form back; layer boundaries are reconstructed from
    /// the family's canonical layer structure.
    pub fn parse(text: &str) -> Result<Schedule> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty schedule text".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Config(format!(
                "schedule header needs 'family n m_copies sign', got '{header}'"
            )));
        }
        let family: ScheduleFamily = fields[0].parse()?;
        let n: u32 = fields[1]
            .parse()
            .map_err(|_| Error::Config(format!("bad n '{}'", fields[1])))?;
        let m_copies: usize = fields[2]
            .parse()
            .map_err(|_| Error::Config(format!("bad m_copies '{}'", fields[2])))?;
        let sign: i8 = match fields[3] {
            "+1" | "1" => 1,
            "-1" => -1,
            other => return Err(Error::Config(format!("bad sign '{other}'"))),
        };

        let mut steps = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["g", kind, i, j] => {
                    let kind: GateKind = kind.parse()?;
                    let i: usize = i
                        .parse()
                        .map_err(|_| Error::Config(format!("bad copy index '{i}'")))?;
                    let j: usize = j
                        .parse()
                        .map_err(|_| Error::Config(format!("bad copy index '{j}'")))?;
                    if i == 0 || j == 0 || i > m_copies || j > m_copies {
                        return Err(Error::Config(format!(
                            "copy index out of range in '{line}'"
                        )));
                    }
                    steps.push(Step::Gate {
                        kind,
                        i: i - 1,
                        j: j - 1,
                    });
                }
                ["p", copy, count] => {
                    let copy: usize = copy
                        .parse()
                        .map_err(|_| Error::Config(format!("bad copy index '{copy}'")))?;
                    let count: u32 = count
                        .parse()
                        .map_err(|_| Error::Config(format!("bad pad count '{count}'")))?;
                    if copy == 0 || copy > m_copies || count == 0 {
                        return Err(Error::Config(format!("bad padding step '{line}'")));
                    }
                    steps.push(Step::Pad {
                        copy: copy - 1,
                        steps: count,
                    });
                }
                _ => return Err(Error::Config(format!("unparseable schedule line '{line}'"))),
            }
        }

        let layer_bounds = match canonical_layer_gate_counts(family, n) {
            None => Vec::new(),
            Some(counts) => reconstruct_layer_bounds(&steps, &counts)?,
        };
        Ok(Schedule {
            family,
            n,
            m_copies,
            sign,
            steps,
            layer_bounds,
        })
    }
}

/// Gates per layer in the canonical construction of each family.
fn canonical_layer_gate_counts(family: ScheduleFamily, n: u32) -> Option<Vec<usize>> {
    match family {
        ScheduleFamily::Tree => Some((1..=n).map(|l| 1usize << (n - l)).collect()),
        ScheduleFamily::Hedge => {
            let mut counts = Vec::new();
            for i in 1..=n {
                for k in hedge_block_layer_indices(i) {
                    counts.push((i - k + 1) as usize);
                }
            }
            Some(counts)
        }
        ScheduleFamily::SingleLayer => Some(vec![n as usize]),
        ScheduleFamily::Custom => None,
    }
}

/// Upper indices of the palindromic layer sequence inside block i:
/// i, i-1, ..., 1, ..., i-1, i.
fn hedge_block_layer_indices(i: u32) -> Vec<u32> {
    let mut ks: Vec<u32> = (1..=i).rev().collect();
    ks.extend(2..=i);
    ks
}

fn reconstruct_layer_bounds(steps: &[Step], counts: &[usize]) -> Result<Vec<usize>> {
    let mut bounds = Vec::with_capacity(counts.len());
    let mut idx = 0usize;
    for &quota in counts {
        bounds.push(idx);
        let mut seen = 0usize;
        while idx < steps.len() && seen < quota {
            if matches!(steps[idx], Step::Gate { .. }) {
                seen += 1;
            }
            idx += 1;
        }
        if seen < quota {
            return Err(Error::Config(
                "schedule text is truncated relative to its family layout".into(),
            ));
        }
        // Padding emitted at the end of a layer belongs to that layer.
        while idx < steps.len() && matches!(steps[idx], Step::Pad { .. }) {
            idx += 1;
        }
    }
    if idx != steps.len() {
        return Err(Error::Config(
            "schedule text has extra steps beyond its family layout".into(),
        ));
    }
    Ok(bounds)
}

/// Tree circuit: n layers on 2^n copies, 2^n - 1 gates, copy 1 touched
/// once per layer. Layer l pairs copy 2^l·i+1 with copy 2^l·i+1+2^{l-1}
/// (1-based labels).
pub fn build_tree(n: u32, cfg: &NumericsConfig) -> Result<Schedule> {
    if n == 0 || n > cfg.schedule_depth_cap {
        return Err(Error::CapExceeded(format!(
            "tree depth {} outside 1..={}",
            n, cfg.schedule_depth_cap
        )));
    }
    let m = 1usize << n;
    let mut steps = Vec::with_capacity(m - 1);
    let mut layer_bounds = Vec::with_capacity(n as usize);
    for l in 1..=n {
        layer_bounds.push(steps.len());
        let stride = 1usize << l;
        let offset = 1usize << (l - 1);
        for i in 0..(1usize << (n - l)) {
            steps.push(Step::Gate {
                kind: GateKind::U,
                i: stride * i,
                j: stride * i + offset,
            });
        }
    }
    Ok(Schedule {
        family: ScheduleFamily::Tree,
        n,
        m_copies: m,
        sign: 1,
        steps,
        layer_bounds,
    })
}

/// Hedge circuit: blocks B_1..B_n on 2n copies, block B_i holding i²
/// gates in the palindromic layer sequence L^i_i ... L^1_i ... L^i_i,
/// with layer L^k_p pairing consecutive entries of
/// v = (k, ..., p, 2n-p+1, ..., 2n-k+1).
pub fn build_hedge(n: u32, cfg: &NumericsConfig) -> Result<Schedule> {
    if n == 0 || n > cfg.schedule_depth_cap {
        return Err(Error::CapExceeded(format!(
            "hedge depth {} outside 1..={}",
            n, cfg.schedule_depth_cap
        )));
    }
    let two_n = 2 * n;
    let mut steps = Vec::new();
    let mut layer_bounds = Vec::new();
    for i in 1..=n {
        for k in hedge_block_layer_indices(i) {
            layer_bounds.push(steps.len());
            let p = i;
            let mut v: Vec<u32> = (k..=p).collect();
            v.extend((two_n - p + 1)..=(two_n - k + 1));
            for pair in v.chunks_exact(2) {
                steps.push(Step::Gate {
                    kind: GateKind::U,
                    i: (pair[0] - 1) as usize,
                    j: (pair[1] - 1) as usize,
                });
            }
        }
    }
    Ok(Schedule {
        family: ScheduleFamily::Hedge,
        n,
        m_copies: two_n as usize,
        sign: 1,
        steps,
        layer_bounds,
    })
}

/// Single layer of n disjoint gates on 2n copies: (1,2), (3,4), ...
pub fn build_single_layer(n: u32) -> Result<Schedule> {
    if n == 0 {
        return Err(Error::Contract("single layer needs n >= 1".into()));
    }
    let steps: Vec<Step> = (0..n as usize)
        .map(|t| Step::Gate {
            kind: GateKind::U,
            i: 2 * t,
            j: 2 * t + 1,
        })
        .collect();
    Ok(Schedule {
        family: ScheduleFamily::SingleLayer,
        n,
        m_copies: 2 * n as usize,
        sign: 1,
        steps,
        layer_bounds: vec![0],
    })
}

/// Classical label vector replayed alongside a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Bookkeeping {
    labels: Vec<Label>,
}

impl Bookkeeping {
    pub fn new(m_copies: usize) -> Self {
        Bookkeeping {
            labels: vec![Label::ZERO; m_copies],
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Potential S(c) = Σ (Re c_k)².
    pub fn potential(&self) -> u64 {
        self.labels
            .iter()
            .map(|l| (l.re as i64 * l.re as i64) as u64)
            .sum()
    }

    /// Applies one step, enforcing the equal-label gate precondition.
    ///
    /// Gate rules: every kind moves the pair one step apart in imaginary
    /// time (re_i += 1, re_j -= 1). V additionally advances both copies by
    /// one real-time unit; W advances only copy j (by one √eps unit).
    pub fn apply(&mut self, step: &Step) -> Result<()> {
        match *step {
            Step::Gate { kind, i, j } => {
                if i >= j || j >= self.labels.len() {
                    return Err(Error::Validation(format!(
                        "gate pair ({i}, {j}) out of range for {} copies",
                        self.labels.len()
                    )));
                }
                if self.labels[i] != self.labels[j] {
                    return Err(Error::Validation(format!(
                        "gate on copies ({i}, {j}) with unequal labels {} vs {}",
                        self.labels[i], self.labels[j]
                    )));
                }
                self.labels[i].re += 1;
                self.labels[j].re -= 1;
                match kind {
                    GateKind::U => {}
                    GateKind::V => {
                        self.labels[i].im += 1;
                        self.labels[j].im += 1;
                    }
                    GateKind::W => {
                        self.labels[j].im += 1;
                    }
                }
            }
            Step::Pad { copy, steps } => {
                if copy >= self.labels.len() {
                    return Err(Error::Validation(format!(
                        "padding copy {copy} out of range"
                    )));
                }
                if steps == 0 {
                    return Err(Error::Validation("padding of zero steps".into()));
                }
                self.labels[copy].im += steps as i32;
            }
        }
        Ok(())
    }
}

/// Certificate issued by [`validate`] for a well-formed schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub gate_count: usize,
    pub final_labels: Vec<Label>,
    pub final_potential: u64,
    /// True iff gate_count == S(c_final)/2, the optimal count for the
    /// reached label vector.
    pub optimal_gate_count: bool,
    /// Net imaginary-time steps accumulated on copy 1.
    pub first_copy_steps: i32,
}

/// Violation record for a malformed schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub step_index: usize,
    pub reason: String,
}

/// Outcome of replaying a schedule's bookkeeping rules.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationOutcome {
    Valid(Certificate),
    Invalid(Violation),
}

impl ValidationOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            ValidationOutcome::Valid(c) => Some(c),
            ValidationOutcome::Invalid(_) => None,
        }
    }
}

/// Replays a schedule, checking the equal-label precondition at each gate
/// and the exact +2 potential increment, and certifying gate-count
/// optimality for the final label vector.
pub fn validate(schedule: &Schedule) -> ValidationOutcome {
    let mut book = Bookkeeping::new(schedule.m_copies);
    let mut gate_count = 0usize;
    for (idx, step) in schedule.steps.iter().enumerate() {
        let before = book.potential();
        if let Err(e) = book.apply(step) {
            return ValidationOutcome::Invalid(Violation {
                step_index: idx,
                reason: e.to_string(),
            });
        }
        if let Step::Gate { .. } = step {
            gate_count += 1;
            let increment = book.potential() as i64 - before as i64;
            if increment != 2 {
                return ValidationOutcome::Invalid(Violation {
                    step_index: idx,
                    reason: format!("potential increment {increment} != 2"),
                });
            }
        }
    }
    let final_potential = book.potential();
    ValidationOutcome::Valid(Certificate {
        gate_count,
        final_labels: book.labels().to_vec(),
        final_potential,
        optimal_gate_count: final_potential % 2 == 0
            && gate_count as u64 == final_potential / 2,
        first_copy_steps: book.labels()[0].re,
    })
}

/// Per-gate pre-application labels, by replay.
pub fn gate_pre_labels(schedule: &Schedule) -> Result<Vec<(Label, Label)>> {
    let mut book = Bookkeeping::new(schedule.m_copies);
    let mut out = Vec::with_capacity(schedule.gate_count());
    for step in &schedule.steps {
        if let Step::Gate { i, j, .. } = *step {
            out.push((book.labels()[i], book.labels()[j]));
        }
        book.apply(step)?;
    }
    Ok(out)
}

/// Rewrites a layered U-schedule as a V-schedule.
///
/// Each gate becomes a V gate, and within every layer each copy not acted
/// on by a gate receives one step of real-time padding, so all copies'
/// real-time labels agree at every layer boundary. If a gate's pair ever
/// disagrees in the real-time label, the copy with the smaller label is
/// padded up before the gate.
pub fn to_v_schedule(schedule: &Schedule) -> Result<Schedule> {
    if schedule.layer_bounds.is_empty() {
        return Err(Error::Contract(
            "V conversion needs a layered schedule".into(),
        ));
    }
    if schedule.uses_kind(GateKind::W) {
        return Err(Error::Contract(
            "V conversion is defined for U-gate schedules".into(),
        ));
    }
    let mut book = Bookkeeping::new(schedule.m_copies);
    let mut steps = Vec::new();
    let mut layer_bounds = Vec::with_capacity(schedule.layer_bounds.len());
    for range in schedule.layer_ranges() {
        layer_bounds.push(steps.len());
        let mut touched = vec![false; schedule.m_copies];
        for step in &schedule.steps[range] {
            match *step {
                Step::Gate { i, j, .. } => {
                    let (li, lj) = (book.labels()[i], book.labels()[j]);
                    if li.im != lj.im {
                        // Evolve the copy with the smaller real-time label.
                        let (copy, diff) = if li.im < lj.im {
                            (i, (lj.im - li.im) as u32)
                        } else {
                            (j, (li.im - lj.im) as u32)
                        };
                        let pad = Step::Pad { copy, steps: diff };
                        book.apply(&pad)?;
                        steps.push(pad);
                    }
                    let gate = Step::Gate {
                        kind: GateKind::V,
                        i,
                        j,
                    };
                    book.apply(&gate)?;
                    steps.push(gate);
                    touched[i] = true;
                    touched[j] = true;
                }
                Step::Pad { .. } => {
                    return Err(Error::Contract(
                        "U-schedule with existing padding cannot be converted".into(),
                    ));
                }
            }
        }
        for (copy, was_touched) in touched.iter().enumerate() {
            if !was_touched {
                let pad = Step::Pad { copy, steps: 1 };
                book.apply(&pad)?;
                steps.push(pad);
            }
        }
    }
    Ok(Schedule {
        family: schedule.family,
        n: schedule.n,
        m_copies: schedule.m_copies,
        sign: schedule.sign,
        steps,
        layer_bounds,
    })
}
