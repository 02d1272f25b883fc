//! Orbit-finite systems in equivariant normal form and their textual
//! format.
//!
//! A system has finitely many row orbits (constraint families) and column
//! orbits (unknown families). A row orbit of dimension `p` stands for one
//! constraint per non-repeating `p`-tuple of atoms, and likewise for
//! columns. A coefficient is addressed by a triple (row orbit, column
//! orbit, partial injection): the injection records which positions of the
//! row tuple coincide with which positions of the column tuple, and that
//! equality pattern determines the coefficient at every concrete pair of
//! tuples.
//!
//! The text format is line oriented with `#` comments and 1-based indices:
//!
//! ```text
//! rows: 1 0            # row orbit dimensions
//! cols: 1 2            # column orbit dimensions
//! sense 1 eq           # optional, default geq
//! sign 2 nonneg        # optional, default free
//! coef 1 2 2 -2        # row 1, col 2, injection "2" (position 1 -> 2)
//! coef 2 1 - 1         # "-" is the only injection from a 0-tuple
//! target 2 1           # optional, default 0
//! objective 2 3        # optional, default 0
//! ```
//!
//! An injection is written as a comma list of length `p` over `{0..m}`;
//! entry `k` gives the image of row position `k`, `0` meaning undefined.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::numerics::Int;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct InjectionError(String);

/// A partial injection from positions `1..=source_arity` to positions
/// `1..=target_arity`, stored as the 1-based image of each source position
/// with `0` for undefined.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialInjection {
    source_arity: usize,
    target_arity: usize,
    map: Vec<usize>,
}

impl PartialInjection {
    pub fn new(
        source_arity: usize,
        target_arity: usize,
        map: Vec<usize>,
    ) -> Result<Self, InjectionError> {
        if map.len() != source_arity {
            return Err(InjectionError(format!(
                "injection has {} entries but the source tuple has arity {}",
                map.len(),
                source_arity
            )));
        }
        let mut seen = vec![false; target_arity];
        for &v in &map {
            if v > target_arity {
                return Err(InjectionError(format!(
                    "injection entry {v} exceeds target arity {target_arity}"
                )));
            }
            if v > 0 {
                if seen[v - 1] {
                    return Err(InjectionError(format!(
                        "injection maps two positions to {v}"
                    )));
                }
                seen[v - 1] = true;
            }
        }
        Ok(PartialInjection {
            source_arity,
            target_arity,
            map,
        })
    }

    /// The nowhere-defined injection.
    pub fn empty(source_arity: usize, target_arity: usize) -> Self {
        PartialInjection {
            source_arity,
            target_arity,
            map: vec![0; source_arity],
        }
    }

    /// The identity on `1..=arity`.
    pub fn identity(arity: usize) -> Self {
        PartialInjection {
            source_arity: arity,
            target_arity: arity,
            map: (1..=arity).collect(),
        }
    }

    /// Builder from 1-based (source, target) pairs, for tests and fixtures.
    pub fn from_pairs(
        source_arity: usize,
        target_arity: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, InjectionError> {
        let mut map = vec![0; source_arity];
        for &(s, t) in pairs {
            if s == 0 || s > source_arity {
                return Err(InjectionError(format!(
                    "source position {s} out of range 1..={source_arity}"
                )));
            }
            map[s - 1] = t;
        }
        PartialInjection::new(source_arity, target_arity, map)
    }

    pub fn source_arity(&self) -> usize {
        self.source_arity
    }

    pub fn target_arity(&self) -> usize {
        self.target_arity
    }

    /// 1-based image of 1-based source position, `None` when undefined.
    pub fn image(&self, source_pos: usize) -> Option<usize> {
        match self.map[source_pos - 1] {
            0 => None,
            v => Some(v),
        }
    }

    pub fn defined_count(&self) -> usize {
        self.map.iter().filter(|&&v| v > 0).count()
    }

    /// Bitmask of 0-based source positions where the injection is defined.
    pub fn domain_mask(&self) -> u32 {
        let mut mask = 0;
        for (k, &v) in self.map.iter().enumerate() {
            if v > 0 {
                mask |= 1 << k;
            }
        }
        mask
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.is_empty() {
            return write!(f, "-");
        }
        for (k, v) in self.map.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Geq,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSign {
    Free,
    Nonneg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowOrbit {
    pub dim: usize,
    pub sense: Sense,
    pub target: Int,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColOrbit {
    pub dim: usize,
    pub sign: VarSign,
    pub objective: Int,
}

/// An orbit-finite system of linear constraints in equivariant normal form.
///
/// Coefficients are sparse: absent keys mean zero. Keys are ordered, so all
/// iteration (and the printed form) is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrbitSystem {
    pub rows: Vec<RowOrbit>,
    pub cols: Vec<ColOrbit>,
    coeffs: BTreeMap<(usize, usize, PartialInjection), Int>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl OrbitSystem {
    pub fn new(row_dims: &[usize], col_dims: &[usize]) -> Self {
        OrbitSystem {
            rows: row_dims
                .iter()
                .map(|&dim| RowOrbit {
                    dim,
                    sense: Sense::Geq,
                    target: Int::zero(),
                })
                .collect(),
            cols: col_dims
                .iter()
                .map(|&dim| ColOrbit {
                    dim,
                    sign: VarSign::Free,
                    objective: Int::zero(),
                })
                .collect(),
            coeffs: BTreeMap::new(),
        }
    }

    /// Sets a coefficient (0-based orbit indices). Setting zero removes the
    /// entry; arities must match the orbit dimensions.
    pub fn set_coeff(&mut self, row: usize, col: usize, inj: PartialInjection, value: Int) {
        assert!(row < self.rows.len(), "row orbit {row} out of range");
        assert!(col < self.cols.len(), "column orbit {col} out of range");
        assert_eq!(
            inj.source_arity(),
            self.rows[row].dim,
            "injection source arity must equal the row orbit dimension"
        );
        assert_eq!(
            inj.target_arity(),
            self.cols[col].dim,
            "injection target arity must equal the column orbit dimension"
        );
        if value.is_zero() {
            self.coeffs.remove(&(row, col, inj));
        } else {
            self.coeffs.insert((row, col, inj), value);
        }
    }

    /// Coefficient lookup; absent keys are zero.
    pub fn coeff(&self, row: usize, col: usize, inj: &PartialInjection) -> Int {
        self.coeffs
            .get(&(row, col, inj.clone()))
            .cloned()
            .unwrap_or_else(Int::zero)
    }

    /// All stored (nonzero) coefficients in deterministic order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&(usize, usize, PartialInjection), &Int)> {
        self.coeffs.iter()
    }

    /// Stored coefficients of one (row orbit, column orbit) pair.
    pub fn coeffs_of(
        &self,
        row: usize,
        col: usize,
    ) -> impl Iterator<Item = (&PartialInjection, &Int)> {
        self.coeffs
            .range((row, col, PartialInjection::empty(0, 0))..)
            .take_while(move |((r, c, _), _)| *r == row && *c == col)
            .map(|((_, _, inj), v)| (inj, v))
    }

    /// Largest orbit dimension in the system; 0 for a fully finite system.
    pub fn atom_dimension(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.dim)
            .chain(self.cols.iter().map(|c| c.dim))
            .max()
            .unwrap_or(0)
    }

    pub fn is_canonical(&self) -> bool {
        self.rows.iter().all(|r| r.sense == Sense::Geq)
            && self.cols.iter().all(|c| c.sign == VarSign::Free)
    }

    /// Structural checks for hand-built systems; parsing performs the same
    /// checks. Empty result means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for ((row, col, inj), value) in &self.coeffs {
            let loc = format!("coefficient ({}, {}, {inj})", row + 1, col + 1);
            if *row >= self.rows.len() {
                out.push(Violation(format!("{loc}: row orbit index out of range")));
                continue;
            }
            if *col >= self.cols.len() {
                out.push(Violation(format!("{loc}: column orbit index out of range")));
                continue;
            }
            if inj.source_arity() != self.rows[*row].dim {
                out.push(Violation(format!(
                    "{loc}: injection source arity {} differs from row dimension {}",
                    inj.source_arity(),
                    self.rows[*row].dim
                )));
            }
            if inj.target_arity() != self.cols[*col].dim {
                out.push(Violation(format!(
                    "{loc}: injection target arity {} differs from column dimension {}",
                    inj.target_arity(),
                    self.cols[*col].dim
                )));
            }
            if value.is_zero() {
                out.push(Violation(format!("{loc}: stored coefficient is zero")));
            }
        }
        out
    }

    /// Rewrites the system into the canonical all-`>=`, all-free shape:
    /// every row keeps its place with sense `>=`; each equality row gains a
    /// negated copy (appended in row order); each nonnegative column gains
    /// a `x >= 0` row of its own dimension (appended after those, in column
    /// order). Idempotent on canonical systems.
    pub fn canonicalize(&self) -> OrbitSystem {
        let mut out = self.clone();
        for r in out.rows.iter_mut() {
            r.sense = Sense::Geq;
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.sense != Sense::Eq {
                continue;
            }
            let neg_index = out.rows.len();
            out.rows.push(RowOrbit {
                dim: row.dim,
                sense: Sense::Geq,
                target: -&row.target,
            });
            let entries: Vec<_> = self
                .coeffs_of_row(i)
                .map(|((_, col, inj), v)| (*col, inj.clone(), -v))
                .collect();
            for (col, inj, v) in entries {
                out.coeffs.insert((neg_index, col, inj), v);
            }
        }
        for (j, col) in self.cols.iter().enumerate() {
            if col.sign != VarSign::Nonneg {
                continue;
            }
            let row_index = out.rows.len();
            out.rows.push(RowOrbit {
                dim: col.dim,
                sense: Sense::Geq,
                target: Int::zero(),
            });
            out.coeffs.insert(
                (row_index, j, PartialInjection::identity(col.dim)),
                Int::from(1),
            );
        }
        for c in out.cols.iter_mut() {
            c.sign = VarSign::Free;
        }
        out
    }

    fn coeffs_of_row(
        &self,
        row: usize,
    ) -> impl Iterator<Item = (&(usize, usize, PartialInjection), &Int)> {
        self.coeffs
            .range((row, 0, PartialInjection::empty(0, 0))..)
            .take_while(move |((r, _, _), _)| *r == row)
    }

    /// Renders the system in the textual format; `parse_system` reads it
    /// back to an equal value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("rows:");
        for r in &self.rows {
            out.push_str(&format!(" {}", r.dim));
        }
        out.push('\n');
        out.push_str("cols:");
        for c in &self.cols {
            out.push_str(&format!(" {}", c.dim));
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            if r.sense == Sense::Eq {
                out.push_str(&format!("sense {} eq\n", i + 1));
            }
        }
        for (j, c) in self.cols.iter().enumerate() {
            if c.sign == VarSign::Nonneg {
                out.push_str(&format!("sign {} nonneg\n", j + 1));
            }
        }
        for ((row, col, inj), v) in &self.coeffs {
            out.push_str(&format!("coef {} {} {inj} {v}\n", row + 1, col + 1));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if !r.target.is_zero() {
                out.push_str(&format!("target {} {}\n", i + 1, r.target));
            }
        }
        for (j, c) in self.cols.iter().enumerate() {
            if !c.objective.is_zero() {
                out.push_str(&format!("objective {} {}\n", j + 1, c.objective));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    out
}

/// Parses the textual system format; see the module docs for the grammar.
pub fn parse_system(text: &str) -> Result<OrbitSystem, ParseError> {
    let mut rows: Option<Vec<usize>> = None;
    let mut cols: Option<Vec<usize>> = None;
    let mut sys: Option<OrbitSystem> = None;
    let mut seen_sense = Vec::new();
    let mut seen_sign = Vec::new();
    let mut seen_target = Vec::new();
    let mut seen_objective = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_number = lineno + 1;
        let err = |column: usize, message: String| ParseError {
            line: line_number,
            column,
            message,
        };
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        let head = &tokens[0];
        let parse_dims = |tokens: &[Token]| -> Result<Vec<usize>, ParseError> {
            tokens
                .iter()
                .map(|t| {
                    t.text.parse::<usize>().map_err(|_| {
                        err(
                            t.column,
                            format!("expected a dimension, found `{}`", t.text),
                        )
                    })
                })
                .collect()
        };
        match head.text {
            "rows:" => {
                if rows.is_some() {
                    return Err(err(head.column, "duplicate rows: line".into()));
                }
                rows = Some(parse_dims(&tokens[1..])?);
            }
            "cols:" => {
                if cols.is_some() {
                    return Err(err(head.column, "duplicate cols: line".into()));
                }
                cols = Some(parse_dims(&tokens[1..])?);
            }
            "sense" | "sign" | "coef" | "target" | "objective" => {
                let sys = match (&mut sys, &rows, &cols) {
                    (Some(s), _, _) => s,
                    (none, Some(r), Some(c)) => {
                        *none = Some(OrbitSystem::new(r, c));
                        none.as_mut().unwrap()
                    }
                    _ => {
                        return Err(err(
                            head.column,
                            "rows: and cols: must be declared first".into(),
                        ))
                    }
                };
                let arg = |k: usize| -> Result<&Token, ParseError> {
                    tokens.get(k).ok_or_else(|| {
                        err(
                            content.len() + 1,
                            format!("`{}` line is missing its argument {k}", head.text),
                        )
                    })
                };
                let index = |t: &Token, upper: usize, what: &str| -> Result<usize, ParseError> {
                    let v: usize = t.text.parse().map_err(|_| {
                        err(
                            t.column,
                            format!("expected a {what} index, found `{}`", t.text),
                        )
                    })?;
                    if v == 0 || v > upper {
                        return Err(err(
                            t.column,
                            format!("{what} index {v} out of range 1..={upper}"),
                        ));
                    }
                    Ok(v - 1)
                };
                let int_value = |t: &Token| -> Result<Int, ParseError> {
                    t.text.parse::<Int>().map_err(|_| {
                        err(t.column, format!("expected an integer, found `{}`", t.text))
                    })
                };
                match head.text {
                    "sense" => {
                        let i = index(arg(1)?, sys.rows.len(), "row orbit")?;
                        let t = arg(2)?;
                        let sense = match t.text {
                            "eq" => Sense::Eq,
                            "geq" => Sense::Geq,
                            other => {
                                return Err(err(
                                    t.column,
                                    format!("expected `eq` or `geq`, found `{other}`"),
                                ))
                            }
                        };
                        if seen_sense.contains(&i) {
                            return Err(err(
                                head.column,
                                format!("duplicate sense for row {}", i + 1),
                            ));
                        }
                        seen_sense.push(i);
                        sys.rows[i].sense = sense;
                    }
                    "sign" => {
                        let j = index(arg(1)?, sys.cols.len(), "column orbit")?;
                        let t = arg(2)?;
                        let sign = match t.text {
                            "nonneg" => VarSign::Nonneg,
                            "free" => VarSign::Free,
                            other => {
                                return Err(err(
                                    t.column,
                                    format!("expected `nonneg` or `free`, found `{other}`"),
                                ))
                            }
                        };
                        if seen_sign.contains(&j) {
                            return Err(err(
                                head.column,
                                format!("duplicate sign for column {}", j + 1),
                            ));
                        }
                        seen_sign.push(j);
                        sys.cols[j].sign = sign;
                    }
                    "coef" => {
                        let i = index(arg(1)?, sys.rows.len(), "row orbit")?;
                        let j = index(arg(2)?, sys.cols.len(), "column orbit")?;
                        let inj_tok = arg(3)?;
                        let p = sys.rows[i].dim;
                        let m = sys.cols[j].dim;
                        let inj = if inj_tok.text == "-" {
                            if p != 0 {
                                return Err(err(
                                    inj_tok.column,
                                    format!("`-` denotes the empty injection, but row {} has dimension {p}", i + 1),
                                ));
                            }
                            PartialInjection::empty(0, m)
                        } else {
                            let entries: Result<Vec<usize>, ParseError> = inj_tok
                                .text
                                .split(',')
                                .map(|s| {
                                    s.parse::<usize>().map_err(|_| {
                                        err(
                                            inj_tok.column,
                                            format!("injection entry `{s}` is not a number"),
                                        )
                                    })
                                })
                                .collect();
                            PartialInjection::new(p, m, entries?)
                                .map_err(|e| err(inj_tok.column, e.to_string()))?
                        };
                        let v_tok = arg(4)?;
                        let v = int_value(v_tok)?;
                        if v.is_zero() {
                            return Err(err(v_tok.column, "coefficients must be nonzero".into()));
                        }
                        if sys.coeffs.contains_key(&(i, j, inj.clone())) {
                            return Err(err(
                                head.column,
                                format!("duplicate coefficient for ({}, {}, {inj})", i + 1, j + 1),
                            ));
                        }
                        sys.coeffs.insert((i, j, inj), v);
                    }
                    "target" => {
                        let i = index(arg(1)?, sys.rows.len(), "row orbit")?;
                        if seen_target.contains(&i) {
                            return Err(err(
                                head.column,
                                format!("duplicate target for row {}", i + 1),
                            ));
                        }
                        seen_target.push(i);
                        sys.rows[i].target = int_value(arg(2)?)?;
                    }
                    "objective" => {
                        let j = index(arg(1)?, sys.cols.len(), "column orbit")?;
                        if seen_objective.contains(&j) {
                            return Err(err(
                                head.column,
                                format!("duplicate objective for column {}", j + 1),
                            ));
                        }
                        seen_objective.push(j);
                        sys.cols[j].objective = int_value(arg(2)?)?;
                    }
                    _ => unreachable!(),
                }
            }
            other => {
                return Err(err(head.column, format!("unknown directive `{other}`")));
            }
        }
    }

    match (sys, rows, cols) {
        (Some(s), _, _) => Ok(s),
        (None, Some(r), Some(c)) => Ok(OrbitSystem::new(&r, &c)),
        (None, None, _) => Err(ParseError {
            line: text.lines().count().max(1),
            column: 1,
            message: "missing rows: line".into(),
        }),
        (None, Some(_), None) => Err(ParseError {
            line: text.lines().count().max(1),
            column: 1,
            message: "missing cols: line".into(),
        }),
    }
}
