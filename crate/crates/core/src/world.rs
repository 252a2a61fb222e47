//! The ground distribution: ground atoms, weighted ground formulas, worlds,
//! and partial evidence.
//!
//! Ground atoms carry a canonical total order — predicate declaration order,
//! then argument tuples lexicographically by domain position — and their
//! index in that order is the `AtomId` used everywhere downstream. A world
//! is a total 0/1 assignment over that index; its unnormalized log weight is
//! the sum of the weights of the satisfied ground formulas.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fol::{Expr, MlnModel, PredId};

pub type AtomId = u32;

/// A total assignment to all ground atoms, indexed by `AtomId`.
pub type World = Vec<bool>;

/// A predicate applied to domain constants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: PredId,
    pub args: Vec<u16>,
}

/// One weighted ground formula.
#[derive(Clone, Debug)]
pub struct Factor {
    pub weight: f64,
    pub formula: Expr<AtomId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundError {
    /// The ground atom or ground formula count exceeds what this build is
    /// willing to materialize.
    ModelTooLarge { atoms: u64, factors: u64 },
}

impl fmt::Display for GroundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundError::ModelTooLarge { atoms, factors } => write!(
                f,
                "grounding is too large to materialize ({atoms} atoms, {factors} ground formulas)"
            ),
        }
    }
}

impl core::error::Error for GroundError {}

const MAX_GROUND_ATOMS: u64 = 1 << 26;
const MAX_GROUND_FACTORS: u64 = 1 << 26;

/// A fully grounded model: the source first-order model plus the indexed
/// ground factors. Immutable after construction and safe to share.
#[derive(Clone, Debug)]
pub struct GroundModel {
    pub model: MlnModel,
    /// `offsets[p]` is the id of predicate `p`'s first ground atom.
    offsets: Vec<u32>,
    atom_count: u32,
    pub factors: Vec<Factor>,
}

impl GroundModel {
    /// Grounds every formula with every assignment of constants to its
    /// logical variables, in lexicographic order of (variable order in the
    /// formula, domain order).
    pub fn ground(model: MlnModel) -> Result<GroundModel, GroundError> {
        let k = model.domain_size() as u64;
        let mut offsets = Vec::with_capacity(model.predicates.len());
        let mut atom_count: u64 = 0;
        let mut factor_count: u64 = 0;
        for p in &model.predicates {
            offsets.push(atom_count as u32);
            let per_pred = k
                .checked_pow(p.arity as u32)
                .filter(|&n| atom_count + n <= MAX_GROUND_ATOMS)
                .ok_or(GroundError::ModelTooLarge { atoms: u64::MAX, factors: 0 })?;
            atom_count += per_pred;
        }
        for wf in &model.formulas {
            let per_formula = k
                .checked_pow(wf.vars.len() as u32)
                .filter(|&n| factor_count + n <= MAX_GROUND_FACTORS)
                .ok_or(GroundError::ModelTooLarge {
                    atoms: atom_count,
                    factors: u64::MAX,
                })?;
            factor_count += per_formula;
        }

        let id_of = |pred: PredId, args: &[u16]| -> AtomId {
            let mut enc = 0u32;
            for &a in args {
                enc = enc * k as u32 + a as u32;
            }
            offsets[pred as usize] + enc
        };
        let mut factors = Vec::with_capacity(factor_count as usize);
        let k = k as u16;
        for wf in &model.formulas {
            let v = wf.vars.len();
            let mut assign = alloc::vec![0u16; v];
            loop {
                let formula = wf.formula.map_leaves(&mut |atom| {
                    let args: Vec<u16> = atom.args.iter().map(|&var| assign[var as usize]).collect();
                    id_of(atom.pred, &args)
                });
                factors.push(Factor { weight: wf.weight, formula });
                // odometer: last variable varies fastest
                let mut pos = v;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    assign[pos] += 1;
                    if assign[pos] < k {
                        break;
                    }
                    assign[pos] = 0;
                }
                if assign.iter().all(|&a| a == 0) {
                    break;
                }
            }
        }
        debug_assert_eq!(factors.len() as u64, factor_count);
        Ok(GroundModel {
            offsets,
            atom_count: atom_count as u32,
            factors,
            model,
        })
    }

    pub fn atom_count(&self) -> u32 {
        self.atom_count
    }

    pub fn domain_size(&self) -> u16 {
        self.model.domain_size() as u16
    }

    /// Canonical index of a ground atom.
    pub fn atom_id(&self, pred: PredId, args: &[u16]) -> AtomId {
        let k = self.model.domain_size() as u32;
        let mut enc = 0u32;
        for &a in args {
            enc = enc * k + a as u32;
        }
        self.offsets[pred as usize] + enc
    }

    /// Inverse of [`GroundModel::atom_id`].
    pub fn atom(&self, id: AtomId) -> GroundAtom {
        let pred = match self.offsets.binary_search(&id) {
            Ok(mut p) => {
                // several zero-atom predicates can share an offset; take the last
                while p + 1 < self.offsets.len() && self.offsets[p + 1] == id {
                    p += 1;
                }
                p
            }
            Err(ins) => ins - 1,
        };
        let arity = self.model.predicates[pred].arity as usize;
        let k = self.model.domain_size() as u32;
        let mut rest = id - self.offsets[pred];
        let mut args = alloc::vec![0u16; arity];
        for slot in (0..arity).rev() {
            args[slot] = (rest % k) as u16;
            rest /= k;
        }
        GroundAtom { pred: pred as PredId, args }
    }

    pub fn atom_name(&self, id: AtomId) -> String {
        let a = self.atom(id);
        let mut s = self.model.predicates[a.pred as usize].name.clone();
        s.push('(');
        for (i, &c) in a.args.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&self.model.constants[c as usize]);
        }
        s.push(')');
        s
    }

    /// Parses `Pred(C1,C2)` against this model's predicates and constants.
    pub fn parse_atom(&self, text: &str) -> Result<AtomId, AtomParseError> {
        let text = text.trim();
        let open = text.find('(').ok_or_else(|| AtomParseError::Syntax(text.to_owned()))?;
        if !text.ends_with(')') {
            return Err(AtomParseError::Syntax(text.to_owned()));
        }
        let name = text[..open].trim();
        let pred = self
            .model
            .pred_id(name)
            .ok_or_else(|| AtomParseError::UnknownPredicate(name.to_owned()))?;
        let inner = &text[open + 1..text.len() - 1];
        let mut args: Vec<u16> = Vec::new();
        for piece in inner.split(',') {
            let cname = piece.trim();
            let c = self
                .model
                .constant_id(cname)
                .ok_or_else(|| AtomParseError::UnknownConstant(cname.to_owned()))?;
            args.push(c);
        }
        let arity = self.model.predicates[pred as usize].arity as usize;
        if args.len() != arity {
            return Err(AtomParseError::WrongArity {
                name: name.to_owned(),
                expected: arity as u8,
                found: args.len() as u8,
            });
        }
        Ok(self.atom_id(pred, &args))
    }

    /// Unnormalized log weight of a total world: the sum of weights of
    /// satisfied ground formulas. Pure; safe to call concurrently.
    pub fn log_weight(&self, world: &[bool]) -> f64 {
        debug_assert!(world.len() >= self.atom_count as usize);
        self.log_weight_with(|id| world[id as usize])
    }

    /// Same as [`GroundModel::log_weight`] with atom values supplied by a
    /// closure (used by the oracle's integer-coded world sweep).
    pub fn log_weight_with(&self, f: impl Fn(AtomId) -> bool) -> f64 {
        let mut total = 0.0;
        for factor in &self.factors {
            if factor.formula.eval_with(&mut |id| f(*id)) {
                total += factor.weight;
            }
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomParseError {
    Syntax(String),
    UnknownPredicate(String),
    UnknownConstant(String),
    WrongArity { name: String, expected: u8, found: u8 },
}

impl fmt::Display for AtomParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomParseError::Syntax(s) => write!(f, "malformed ground atom `{s}`"),
            AtomParseError::UnknownPredicate(s) => write!(f, "unknown predicate `{s}`"),
            AtomParseError::UnknownConstant(s) => write!(f, "unknown constant `{s}`"),
            AtomParseError::WrongArity { name, expected, found } => {
                write!(f, "predicate `{name}` takes {expected} arguments, got {found}")
            }
        }
    }
}

impl core::error::Error for AtomParseError {}

/// A partial 0/1 assignment over ground atoms. Each atom is assigned at
/// most once; conflicting assignments are rejected at construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence {
    assign: BTreeMap<AtomId, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvidenceConflict {
    pub atom: AtomId,
}

impl fmt::Display for EvidenceConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atom {} assigned two different values", self.atom)
    }
}

impl core::error::Error for EvidenceConflict {}

impl Evidence {
    pub fn new() -> Evidence {
        Evidence::default()
    }

    /// Assigns an atom. Re-assigning the same value is a no-op; assigning
    /// the opposite value is a conflict.
    pub fn set(&mut self, atom: AtomId, value: bool) -> Result<(), EvidenceConflict> {
        match self.assign.get(&atom) {
            Some(&v) if v != value => Err(EvidenceConflict { atom }),
            Some(_) => Ok(()),
            None => {
                self.assign.insert(atom, value);
                Ok(())
            }
        }
    }

    pub fn get(&self, atom: AtomId) -> Option<bool> {
        self.assign.get(&atom).copied()
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, bool)> + '_ {
        self.assign.iter().map(|(&a, &v)| (a, v))
    }

    /// True iff the world matches this evidence on every assigned atom.
    pub fn compatible(&self, world: &[bool]) -> bool {
        self.iter().all(|(a, v)| world[a as usize] == v)
    }

    /// The union of two evidence sets; errors if they conflict on an atom.
    pub fn union(&self, other: &Evidence) -> Result<Evidence, EvidenceConflict> {
        let mut out = self.clone();
        for (a, v) in other.iter() {
            out.set(a, v)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvidenceError {
    Atom { line: usize, err: AtomParseError },
    Syntax { line: usize, text: String },
    BadValue { line: usize, text: String },
    Duplicate { line: usize, atom: String },
}

impl fmt::Display for EvidenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvidenceError::Atom { line, err } => write!(f, "line {line}: {err}"),
            EvidenceError::Syntax { line, text } => {
                write!(f, "line {line}: expected `Atom = 0|1`, got `{text}`")
            }
            EvidenceError::BadValue { line, text } => {
                write!(f, "line {line}: evidence value must be 0 or 1, got `{text}`")
            }
            EvidenceError::Duplicate { line, atom } => {
                write!(f, "line {line}: atom `{atom}` assigned twice")
            }
        }
    }
}

impl core::error::Error for EvidenceError {}

/// Parses an evidence file: one `GroundAtom = 0|1` per line, `#` comments.
pub fn parse_evidence(text: &str, gm: &GroundModel) -> Result<Evidence, EvidenceError> {
    let mut out = Evidence::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let eq = line.find('=').ok_or_else(|| EvidenceError::Syntax {
            line: line_no,
            text: line.trim().to_owned(),
        })?;
        let atom_text = line[..eq].trim();
        let value_text = line[eq + 1..].trim();
        let value = match value_text {
            "0" => false,
            "1" => true,
            other => {
                return Err(EvidenceError::BadValue {
                    line: line_no,
                    text: other.to_owned(),
                })
            }
        };
        let atom = gm
            .parse_atom(atom_text)
            .map_err(|err| EvidenceError::Atom { line: line_no, err })?;
        if out.get(atom).is_some() {
            return Err(EvidenceError::Duplicate {
                line: line_no,
                atom: atom_text.to_owned(),
            });
        }
        out.set(atom, value).expect("duplicates caught above");
    }
    Ok(out)
}

/// Exponent-count helper: parses and grounds a model source in one step.
/// Mostly a convenience for tests and the front end.
pub fn ground_text(src: &str) -> GroundModel {
    GroundModel::ground(MlnModel::parse(src).expect("model parses")).expect("model grounds")
}
