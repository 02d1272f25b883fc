//! Counter-machine reachability as an integer inequality system.
//!
//! A machine run is encoded as a directed path between two distinguished
//! atoms: edge unknowns draw the path, per-node unknowns assign one
//! instruction to each inner node, and per-edge carrier unknowns count
//! each counter in unary. The constraint families force any nonnegative
//! integer solution to contain such a path (plus possibly disjoint
//! cycles, which are harmless), so a run exists from the source to the
//! target configuration exactly when the system is solvable. The module
//! generates the constraints over a concrete atom set, builds solutions
//! from runs, and checks candidate solutions; it never attempts to
//! decide solvability, which is undecidable.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::numerics::{int, Int};

/// Start node of every encoded path.
pub const IOTA: u64 = 1;
/// End node of every encoded path.
pub const ZETA: u64 = 2;

/// Effect of one instruction on one counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterOp {
    Add(i64),
    Zero,
}

/// A machine: every instruction gives one operation per counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterMachine {
    pub dim: usize,
    pub instructions: Vec<Vec<CounterOp>>,
}

impl CounterMachine {
    pub fn new(dim: usize, instructions: Vec<Vec<CounterOp>>) -> Self {
        assert!(dim > 0, "a machine needs at least one counter");
        for (i, instr) in instructions.iter().enumerate() {
            assert_eq!(
                instr.len(),
                dim,
                "instruction {} must cover all {dim} counters",
                i + 1
            );
        }
        CounterMachine { dim, instructions }
    }

    /// Instructions updating counter `k` (0-based), with their increments.
    fn updates(&self, k: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.instructions
            .iter()
            .enumerate()
            .filter_map(move |(i, instr)| match instr[k] {
                CounterOp::Add(v) => Some((i, v)),
                CounterOp::Zero => None,
            })
    }

    /// Instructions zero-testing counter `k` (0-based).
    fn zero_tests(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.instructions
            .iter()
            .enumerate()
            .filter_map(move |(i, instr)| match instr[k] {
                CounterOp::Zero => Some(i),
                CounterOp::Add(_) => None,
            })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for instr in &self.instructions {
            let tokens: Vec<String> = instr
                .iter()
                .map(|op| match op {
                    CounterOp::Add(v) => v.to_string(),
                    CounterOp::Zero => "Z".to_string(),
                })
                .collect();
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CmParseError {
    pub line: usize,
    pub message: String,
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T, CmParseError> {
    Err(CmParseError {
        line,
        message: message.into(),
    })
}

/// Lines of a machine, run, or assignment file that carry content:
/// blank lines and `#` comments are skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses the machine format: a `dim d` line, then one line per
/// instruction holding `d` tokens, each an integer or `Z`.
pub fn parse_machine(text: &str) -> Result<CounterMachine, CmParseError> {
    let mut lines = content_lines(text);
    let (line, header) = match lines.next() {
        Some(l) => l,
        None => return parse_err(1, "missing `dim` line"),
    };
    let header_tokens: Vec<&str> = header.split_whitespace().collect();
    let dim = match header_tokens.as_slice() {
        ["dim", d] => match d.parse::<usize>() {
            Ok(d) if d > 0 => d,
            _ => return parse_err(line, "`dim` needs a positive integer"),
        },
        _ => return parse_err(line, "expected `dim <d>` on the first line"),
    };
    let mut instructions = Vec::new();
    for (line, l) in lines {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if tokens.len() != dim {
            return parse_err(
                line,
                format!("instruction has {} tokens, expected {dim}", tokens.len()),
            );
        }
        let mut ops = Vec::new();
        for t in tokens {
            if t == "Z" {
                ops.push(CounterOp::Zero);
            } else {
                match t.parse::<i64>() {
                    Ok(v) => ops.push(CounterOp::Add(v)),
                    Err(_) => {
                        return parse_err(line, format!("`{t}` is neither an integer nor `Z`"))
                    }
                }
            }
        }
        instructions.push(ops);
    }
    Ok(CounterMachine::new(dim, instructions))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("run has {configs} configurations and {steps} steps; expected one more configuration than steps")]
    LengthMismatch { configs: usize, steps: usize },
    #[error("step {step}: no instruction {instr}")]
    NoSuchInstruction { step: usize, instr: usize },
    #[error("step {step}: counter {counter} fails its zero test (value {value})")]
    FailedZeroTest {
        step: usize,
        counter: usize,
        value: u64,
    },
    #[error("step {step}: counter {counter} would become negative")]
    NegativeCounter { step: usize, counter: usize },
    #[error("step {step}: counter {counter} does not change by the instruction's increment")]
    WrongUpdate { step: usize, counter: usize },
    #[error("configuration has {got} counters, expected {expected}")]
    WrongWidth { got: usize, expected: usize },
}

/// A run: configurations interleaved with the instruction applied at each
/// step (0-based instruction indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub configs: Vec<Vec<u64>>,
    pub steps: Vec<usize>,
}

impl Run {
    /// Plays `steps` from `start`, validating every update and zero test.
    pub fn from_steps(
        m: &CounterMachine,
        start: Vec<u64>,
        steps: &[usize],
    ) -> Result<Run, RunError> {
        if start.len() != m.dim {
            return Err(RunError::WrongWidth {
                got: start.len(),
                expected: m.dim,
            });
        }
        let mut configs = vec![start];
        for (s, &instr) in steps.iter().enumerate() {
            let step = s + 1;
            if instr >= m.instructions.len() {
                return Err(RunError::NoSuchInstruction { step, instr });
            }
            let current = configs.last().unwrap().clone();
            let mut next = current.clone();
            for (k, op) in m.instructions[instr].iter().enumerate() {
                match op {
                    CounterOp::Zero => {
                        if current[k] != 0 {
                            return Err(RunError::FailedZeroTest {
                                step,
                                counter: k + 1,
                                value: current[k],
                            });
                        }
                    }
                    CounterOp::Add(v) => {
                        let moved = current[k] as i64 + v;
                        if moved < 0 {
                            return Err(RunError::NegativeCounter {
                                step,
                                counter: k + 1,
                            });
                        }
                        next[k] = moved as u64;
                    }
                }
            }
            configs.push(next);
        }
        Ok(Run {
            configs,
            steps: steps.to_vec(),
        })
    }

    /// Checks an explicitly given run against the machine's step relation.
    pub fn validate(&self, m: &CounterMachine) -> Result<(), RunError> {
        if self.configs.len() != self.steps.len() + 1 {
            return Err(RunError::LengthMismatch {
                configs: self.configs.len(),
                steps: self.steps.len(),
            });
        }
        let replayed = Run::from_steps(m, self.configs[0].clone(), &self.steps)?;
        for (step, (mine, correct)) in self
            .configs
            .iter()
            .zip(&replayed.configs)
            .enumerate()
            .skip(1)
        {
            if mine.len() != m.dim {
                return Err(RunError::WrongWidth {
                    got: mine.len(),
                    expected: m.dim,
                });
            }
            for k in 0..m.dim {
                if mine[k] != correct[k] {
                    return Err(RunError::WrongUpdate {
                        step,
                        counter: k + 1,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses the run format: one `config <ints>` line with the start
/// configuration, then `step <index>` lines (1-based instruction indices).
pub fn parse_run(text: &str) -> Result<(Vec<u64>, Vec<usize>), CmParseError> {
    let mut start = None;
    let mut steps = Vec::new();
    for (line, l) in content_lines(text) {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        match tokens.as_slice() {
            ["config", rest @ ..] => {
                if start.is_some() {
                    return parse_err(line, "more than one `config` line");
                }
                let mut values = Vec::new();
                for t in rest {
                    match t.parse::<u64>() {
                        Ok(v) => values.push(v),
                        Err(_) => {
                            return parse_err(line, format!("`{t}` is not a nonnegative integer"))
                        }
                    }
                }
                start = Some(values);
            }
            ["step", idx] => match idx.parse::<usize>() {
                Ok(v) if v > 0 => steps.push(v - 1),
                _ => return parse_err(line, "`step` needs a positive instruction index"),
            },
            _ => return parse_err(line, "expected a `config` or `step` line"),
        }
    }
    match start {
        Some(start) => Ok((start, steps)),
        None => parse_err(1, "missing `config` line"),
    }
}

/// One unknown of the encoded system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmVar {
    /// Edge unknown between two distinct atoms.
    E { from: u64, to: u64 },
    /// Instruction assignment at an atom (0-based instruction index).
    T { instr: usize, atom: u64 },
    /// Unary counter carrier: edge endpoints, carrier atom, 0-based counter.
    C {
        from: u64,
        to: u64,
        carrier: u64,
        counter: usize,
    },
}

impl fmt::Display for CmVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmVar::E { from, to } => write!(f, "e({from},{to})"),
            CmVar::T { instr, atom } => write!(f, "t({},{atom})", instr + 1),
            CmVar::C {
                from,
                to,
                carrier,
                counter,
            } => write!(f, "c({from},{to},{carrier},{})", counter + 1),
        }
    }
}

/// Constraint family, in generation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    EdgeCapacity,
    DegreeBalance,
    DegreeBound,
    EndpointDegree,
    InstructionAssignment,
    CounterCapacity,
    ZeroTestCapacity,
    FlowBalance,
    SourceBoundary,
    TargetBoundary,
    Nonnegative,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::EdgeCapacity => "edge capacity",
            Family::DegreeBalance => "degree balance",
            Family::DegreeBound => "degree bound",
            Family::EndpointDegree => "endpoint degree",
            Family::InstructionAssignment => "instruction assignment",
            Family::CounterCapacity => "counter capacity",
            Family::ZeroTestCapacity => "zero-test capacity",
            Family::FlowBalance => "flow balance",
            Family::SourceBoundary => "source boundary",
            Family::TargetBoundary => "target boundary",
            Family::Nonnegative => "nonnegative",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmRel {
    Leq,
    Eq,
    Geq,
}

impl fmt::Display for CmRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            match self {
                CmRel::Leq => "<=",
                CmRel::Eq => "=",
                CmRel::Geq => ">=",
            }
        )
    }
}

/// A sparse integer constraint over the encoded unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmConstraint {
    pub family: Family,
    pub terms: Vec<(CmVar, Int)>,
    pub rel: CmRel,
    pub rhs: Int,
}

impl CmConstraint {
    pub fn holds(&self, assignment: &BTreeMap<CmVar, Int>) -> bool {
        let mut lhs = Int::zero();
        for (var, coeff) in &self.terms {
            if let Some(v) = assignment.get(var) {
                lhs += coeff * v;
            }
        }
        match self.rel {
            CmRel::Leq => lhs <= self.rhs,
            CmRel::Eq => lhs == self.rhs,
            CmRel::Geq => lhs >= self.rhs,
        }
    }
}

impl fmt::Display for CmConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lhs = String::new();
        for (var, coeff) in &self.terms {
            let negative = coeff < &Int::zero();
            let magnitude = if negative {
                -coeff.clone()
            } else {
                coeff.clone()
            };
            if lhs.is_empty() {
                if negative {
                    lhs.push('-');
                }
            } else {
                lhs.push_str(if negative { " - " } else { " + " });
            }
            if magnitude != int(1) {
                lhs.push_str(&format!("{magnitude}·"));
            }
            lhs.push_str(&var.to_string());
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        write!(f, "{lhs} {} {}", self.rel, self.rhs)
    }
}

/// The reachability system over a concrete atom set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CMInstance {
    pub machine: CounterMachine,
    pub source: Vec<u64>,
    pub target: Vec<u64>,
    pub atom_count: u64,
    pub constraints: Vec<CmConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CmError {
    #[error("the encoding needs at least 3 atoms, got {atoms}")]
    TooFewAtoms { atoms: u64 },
    #[error("the run needs at least {needed} atoms but the system has {available}")]
    InsufficientAtoms { needed: u64, available: u64 },
    #[error("run does not start at the encoded source configuration")]
    WrongSource,
    #[error("run does not end at the encoded target configuration")]
    WrongTarget,
    #[error(transparent)]
    InvalidRun(#[from] RunError),
}

fn all_variables(m: &CounterMachine, n: u64) -> Vec<CmVar> {
    let mut vars = Vec::new();
    for from in 1..=n {
        for to in (1..=n).filter(|&to| to != from) {
            vars.push(CmVar::E { from, to });
        }
    }
    for instr in 0..m.instructions.len() {
        for atom in 1..=n {
            vars.push(CmVar::T { instr, atom });
        }
    }
    for from in 1..=n {
        for to in (1..=n).filter(|&to| to != from) {
            for carrier in (1..=n).filter(|&c| c != from && c != to) {
                for counter in 0..m.dim {
                    vars.push(CmVar::C {
                        from,
                        to,
                        carrier,
                        counter,
                    });
                }
            }
        }
    }
    vars
}

impl CMInstance {
    /// Every unknown of the instance, in `e`, `t`, `c` order.
    pub fn variables(&self) -> Vec<CmVar> {
        all_variables(&self.machine, self.atom_count)
    }
}

/// In-degree terms of `atom`, each with coefficient `sign`.
fn in_degree(n: u64, atom: u64, sign: i64) -> Vec<(CmVar, Int)> {
    (1..=n)
        .filter(|&b| b != atom)
        .map(|b| (CmVar::E { from: b, to: atom }, int(sign)))
        .collect()
}

/// Out-degree terms of `atom`, each with coefficient `sign`.
fn out_degree(n: u64, atom: u64, sign: i64) -> Vec<(CmVar, Int)> {
    (1..=n)
        .filter(|&b| b != atom)
        .map(|b| (CmVar::E { from: atom, to: b }, int(sign)))
        .collect()
}

/// Carrier terms of all counter-`k` unknowns on edges leaving `atom`.
fn carriers_out(n: u64, atom: u64, k: usize, sign: i64) -> Vec<(CmVar, Int)> {
    let mut terms = Vec::new();
    for to in (1..=n).filter(|&b| b != atom) {
        for carrier in (1..=n).filter(|&c| c != atom && c != to) {
            terms.push((
                CmVar::C {
                    from: atom,
                    to,
                    carrier,
                    counter: k,
                },
                int(sign),
            ));
        }
    }
    terms
}

/// Carrier terms of all counter-`k` unknowns on edges entering `atom`.
fn carriers_in(n: u64, atom: u64, k: usize, sign: i64) -> Vec<(CmVar, Int)> {
    let mut terms = Vec::new();
    for from in (1..=n).filter(|&b| b != atom) {
        for carrier in (1..=n).filter(|&c| c != atom && c != from) {
            terms.push((
                CmVar::C {
                    from,
                    to: atom,
                    carrier,
                    counter: k,
                },
                int(sign),
            ));
        }
    }
    terms
}

/// Builds the full reachability system for `m` from `source` to `target`
/// over the atoms `{1..n}`.
pub fn encode(
    m: &CounterMachine,
    source: &[u64],
    target: &[u64],
    n: u64,
) -> Result<CMInstance, CmError> {
    if n < 3 {
        return Err(CmError::TooFewAtoms { atoms: n });
    }
    assert_eq!(source.len(), m.dim, "source configuration width mismatch");
    assert_eq!(target.len(), m.dim, "target configuration width mismatch");

    let mut cs = Vec::new();
    let push = |cs: &mut Vec<CmConstraint>, family, terms, rel, rhs: i64| {
        cs.push(CmConstraint {
            family,
            terms,
            rel,
            rhs: int(rhs),
        });
    };
    let inner = || (1..=n).filter(|&a| a != IOTA && a != ZETA);

    for from in 1..=n {
        for to in (1..=n).filter(|&to| to != from) {
            push(
                &mut cs,
                Family::EdgeCapacity,
                vec![(CmVar::E { from, to }, int(1))],
                CmRel::Leq,
                1,
            );
        }
    }
    for a in inner() {
        let mut terms = in_degree(n, a, 1);
        terms.extend(out_degree(n, a, -1));
        push(&mut cs, Family::DegreeBalance, terms, CmRel::Eq, 0);
    }
    for a in inner() {
        push(
            &mut cs,
            Family::DegreeBound,
            out_degree(n, a, 1),
            CmRel::Leq,
            1,
        );
    }
    push(
        &mut cs,
        Family::EndpointDegree,
        in_degree(n, IOTA, 1),
        CmRel::Eq,
        0,
    );
    push(
        &mut cs,
        Family::EndpointDegree,
        out_degree(n, IOTA, 1),
        CmRel::Eq,
        1,
    );
    push(
        &mut cs,
        Family::EndpointDegree,
        in_degree(n, ZETA, 1),
        CmRel::Eq,
        1,
    );
    push(
        &mut cs,
        Family::EndpointDegree,
        out_degree(n, ZETA, 1),
        CmRel::Eq,
        0,
    );
    for a in inner() {
        let mut terms: Vec<(CmVar, Int)> = (0..m.instructions.len())
            .map(|instr| (CmVar::T { instr, atom: a }, int(1)))
            .collect();
        terms.extend(out_degree(n, a, -1));
        push(&mut cs, Family::InstructionAssignment, terms, CmRel::Eq, 0);
    }
    for from in 1..=n {
        for to in (1..=n).filter(|&b| b != from) {
            for carrier in (1..=n).filter(|&c| c != from && c != to) {
                for k in 0..m.dim {
                    let carried = CmVar::C {
                        from,
                        to,
                        carrier,
                        counter: k,
                    };
                    push(
                        &mut cs,
                        Family::CounterCapacity,
                        vec![(carried, int(1)), (CmVar::E { from, to }, int(-1))],
                        CmRel::Leq,
                        0,
                    );
                    // A carrier and a zero test of its counter at the
                    // edge's tail exclude each other. The bound is against
                    // the constant 1, not the edge unknown: a tail
                    // assigned a zero-testing instruction has plenty of
                    // non-edges, and those must stay satisfiable.
                    let zero_terms: Vec<(CmVar, Int)> = m
                        .zero_tests(k)
                        .map(|instr| (CmVar::T { instr, atom: from }, int(1)))
                        .collect();
                    if !zero_terms.is_empty() {
                        let mut terms = vec![(carried, int(1))];
                        terms.extend(zero_terms);
                        push(&mut cs, Family::ZeroTestCapacity, terms, CmRel::Leq, 1);
                    }
                }
            }
        }
    }
    for a in inner() {
        for k in 0..m.dim {
            let mut terms = carriers_in(n, a, k, 1);
            for (instr, v) in m.updates(k) {
                terms.push((CmVar::T { instr, atom: a }, int(v)));
            }
            terms.extend(carriers_out(n, a, k, -1));
            push(&mut cs, Family::FlowBalance, terms, CmRel::Eq, 0);
        }
    }
    for k in 0..m.dim {
        push(
            &mut cs,
            Family::SourceBoundary,
            carriers_out(n, IOTA, k, 1),
            CmRel::Eq,
            source[k] as i64,
        );
    }
    for k in 0..m.dim {
        push(
            &mut cs,
            Family::TargetBoundary,
            carriers_in(n, ZETA, k, 1),
            CmRel::Eq,
            target[k] as i64,
        );
    }
    for var in all_variables(m, n) {
        push(
            &mut cs,
            Family::Nonnegative,
            vec![(var, int(1))],
            CmRel::Geq,
            0,
        );
    }
    Ok(CMInstance {
        machine: m.clone(),
        source: source.to_vec(),
        target: target.to_vec(),
        atom_count: n,
        constraints: cs,
    })
}

/// Builds the path solution of a valid run: edge and instruction unknowns
/// along the path are 1, and each edge's counter values are spread in
/// unary over fresh carrier atoms beyond the path.
pub fn run_to_witness(r: &Run, inst: &CMInstance) -> Result<BTreeMap<CmVar, Int>, CmError> {
    r.validate(&inst.machine)?;
    if r.configs.first() != Some(&inst.source) {
        return Err(CmError::WrongSource);
    }
    if r.configs.last() != Some(&inst.target) {
        return Err(CmError::WrongTarget);
    }
    let len = r.steps.len() as u64;
    let tallest = r
        .configs
        .iter()
        .flat_map(|c| c.iter().copied())
        .max()
        .unwrap_or(0);
    let needed = len + 2 + tallest;
    if needed > inst.atom_count {
        return Err(CmError::InsufficientAtoms {
            needed,
            available: inst.atom_count,
        });
    }

    // Path nodes: IOTA, then one fresh inner atom per step, then ZETA.
    let node = |j: u64| -> u64 {
        if j == 0 {
            IOTA
        } else if j == len + 1 {
            ZETA
        } else {
            j + 2
        }
    };
    let mut witness = BTreeMap::new();
    for (j, config) in r.configs.iter().enumerate() {
        let from = node(j as u64);
        let to = node(j as u64 + 1);
        witness.insert(CmVar::E { from, to }, int(1));
        for (k, &value) in config.iter().enumerate() {
            for offset in 0..value {
                witness.insert(
                    CmVar::C {
                        from,
                        to,
                        carrier: len + 3 + offset,
                        counter: k,
                    },
                    int(1),
                );
            }
        }
    }
    for (s, &instr) in r.steps.iter().enumerate() {
        witness.insert(
            CmVar::T {
                instr,
                atom: node(s as u64 + 1),
            },
            int(1),
        );
    }
    Ok(witness)
}

/// Indices of the constraints the assignment violates; absent variables
/// count as zero.
pub fn check_witness(inst: &CMInstance, assignment: &BTreeMap<CmVar, Int>) -> Vec<usize> {
    inst.constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.holds(assignment))
        .map(|(i, _)| i)
        .collect()
}

/// Parses the assignment format: one nonzero variable per line, as
/// `e <from> <to> <value>`, `t <instr> <atom> <value>`, or
/// `c <from> <to> <carrier> <counter> <value>` (1-based instruction and
/// counter indices).
pub fn parse_assignment(text: &str) -> Result<BTreeMap<CmVar, Int>, CmParseError> {
    let mut out = BTreeMap::new();
    for (line, l) in content_lines(text) {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        let number = |t: &str| -> Result<u64, CmParseError> {
            t.parse::<u64>().map_err(|_| CmParseError {
                line,
                message: format!("`{t}` is not a nonnegative integer"),
            })
        };
        let value = |t: &str| -> Result<Int, CmParseError> {
            t.parse::<Int>().map_err(|_| CmParseError {
                line,
                message: format!("`{t}` is not an integer"),
            })
        };
        let var = match (tokens.first().copied(), tokens.len()) {
            (Some("e"), 4) => CmVar::E {
                from: number(tokens[1])?,
                to: number(tokens[2])?,
            },
            (Some("t"), 4) => {
                let instr = number(tokens[1])?;
                if instr == 0 {
                    return parse_err(line, "instruction indices are 1-based");
                }
                CmVar::T {
                    instr: instr as usize - 1,
                    atom: number(tokens[2])?,
                }
            }
            (Some("c"), 6) => {
                let counter = number(tokens[4])?;
                if counter == 0 {
                    return parse_err(line, "counter indices are 1-based");
                }
                CmVar::C {
                    from: number(tokens[1])?,
                    to: number(tokens[2])?,
                    carrier: number(tokens[3])?,
                    counter: counter as usize - 1,
                }
            }
            _ => return parse_err(line, "expected `e a b v`, `t i a v`, or `c a b g k v`"),
        };
        if out.insert(var, value(tokens[tokens.len() - 1])?).is_some() {
            return parse_err(line, format!("duplicate assignment for {var}"));
        }
    }
    Ok(out)
}

/// Renders an assignment in the format `parse_assignment` reads,
/// skipping zero entries.
pub fn assignment_to_text(assignment: &BTreeMap<CmVar, Int>) -> String {
    let mut out = String::new();
    for (var, v) in assignment {
        if v.is_zero() {
            continue;
        }
        match var {
            CmVar::E { from, to } => out.push_str(&format!("e {from} {to} {v}\n")),
            CmVar::T { instr, atom } => out.push_str(&format!("t {} {atom} {v}\n", instr + 1)),
            CmVar::C {
                from,
                to,
                carrier,
                counter,
            } => out.push_str(&format!("c {from} {to} {carrier} {} {v}\n", counter + 1)),
        }
    }
    out
}
