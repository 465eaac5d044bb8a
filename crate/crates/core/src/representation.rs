//! Maps from algebra elements to concrete relations, the atom-base
//! construction `s ↦ {(a, b) : b ≤ a ; s}`, and a signature-parameterized
//! faithfulness checker.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{AtomSet, AtomStructure};
use crate::axioms::{check_ra_axioms, AxiomGroup};
use crate::relation::{FiniteBase, ProperStructure, Relation, RelationError};
use crate::signature::{Signature, Symbol};
use crate::term::Env;
use crate::AlgebraError;

/// Algebras with at most this many elements store an image for every element.
pub const FULL_TABLE_LIMIT: usize = 4096;

/// Default number of violations [`check_representation`] reports.
pub const DEFAULT_VIOLATION_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentationError {
    #[error("algebra fails axiom group {} ({})", .0.number(), .0.label())]
    AxiomsFailed(AxiomGroup),
    #[error("assignment has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("symbol `{0}` cannot be checked on an atoms-only map")]
    NotDerivable(Symbol),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Assignment {
    /// Indexed by element bitmask.
    Full(Vec<Relation>),
    /// Indexed by atom; elements map to the union of their atoms' images.
    Atomic(Vec<Relation>),
}

/// An assignment of relations over a common finite base to the elements of an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateMap {
    algebra: AtomStructure,
    base: FiniteBase,
    assignment: Assignment,
}

impl CandidateMap {
    /// A map given on every element, indexed by bitmask.
    pub fn from_table(
        algebra: AtomStructure,
        base: FiniteBase,
        images: Vec<Relation>,
    ) -> Result<Self, RepresentationError> {
        if images.len() != algebra.element_count() {
            return Err(RepresentationError::WrongLength {
                expected: algebra.element_count(),
                got: images.len(),
            });
        }
        if let Some(r) = images.iter().find(|r| r.base() != base) {
            return Err(RelationError::MixedBases(base.size(), r.base().size()).into());
        }
        Ok(CandidateMap {
            algebra,
            base,
            assignment: Assignment::Full(images),
        })
    }

    pub fn from_fn(
        algebra: AtomStructure,
        base: FiniteBase,
        f: impl Fn(AtomSet) -> Relation,
    ) -> Result<Self, RepresentationError> {
        let images = algebra.elements().map(f).collect();
        Self::from_table(algebra, base, images)
    }

    /// The additive extension of per-atom images; `0` maps to the empty relation.
    pub fn additive(
        algebra: AtomStructure,
        base: FiniteBase,
        atoms: Vec<Relation>,
    ) -> Result<Self, RepresentationError> {
        if atoms.len() != algebra.atom_count() {
            return Err(RepresentationError::WrongLength {
                expected: algebra.atom_count(),
                got: atoms.len(),
            });
        }
        if let Some(r) = atoms.iter().find(|r| r.base() != base) {
            return Err(RelationError::MixedBases(base.size(), r.base().size()).into());
        }
        if algebra.element_count() > FULL_TABLE_LIMIT {
            return Ok(CandidateMap {
                algebra,
                base,
                assignment: Assignment::Atomic(atoms),
            });
        }
        let images = algebra
            .elements()
            .map(|x| union_of(base, &atoms, x))
            .collect();
        Ok(CandidateMap {
            algebra,
            base,
            assignment: Assignment::Full(images),
        })
    }

    pub fn algebra(&self) -> &AtomStructure {
        &self.algebra
    }

    pub fn base(&self) -> FiniteBase {
        self.base
    }

    /// Whether only atom images are stored.
    pub fn is_atomic(&self) -> bool {
        matches!(self.assignment, Assignment::Atomic(_))
    }

    pub fn image(&self, x: AtomSet) -> Relation {
        match &self.assignment {
            Assignment::Full(images) => images[x.bits() as usize],
            Assignment::Atomic(atoms) => union_of(self.base, atoms, x),
        }
    }

    /// The same map over a larger base; new points occur in no pair.
    pub fn pad(&self, base: FiniteBase) -> Result<Self, RepresentationError> {
        let assignment = match &self.assignment {
            Assignment::Full(v) => {
                Assignment::Full(v.iter().map(|r| r.pad(base)).collect::<Result<_, _>>()?)
            }
            Assignment::Atomic(v) => {
                Assignment::Atomic(v.iter().map(|r| r.pad(base)).collect::<Result<_, _>>()?)
            }
        };
        Ok(CandidateMap {
            algebra: self.algebra.clone(),
            base,
            assignment,
        })
    }
}

fn union_of(base: FiniteBase, atoms: &[Relation], x: AtomSet) -> Relation {
    x.iter().fold(Relation::empty(base), |acc, a| {
        acc.union_unchecked(&atoms[a])
    })
}

/// The atom-base construction. The base is the atom set; the image of `s`
/// is `{(a, b) : b ≤ a ; s}`.
///
/// Refuses algebras failing any axiom group, since preservation of the
/// operations depends on associativity, the identity law and the Peircean law.
pub fn theta_construction(alg: &AtomStructure) -> Result<CandidateMap, RepresentationError> {
    let report = check_ra_axioms(alg)?;
    if let Some(failed) = report.first_failure() {
        return Err(RepresentationError::AxiomsFailed(failed.group));
    }
    let n = alg.atom_count();
    let base = FiniteBase::new(n)?;
    let atoms = (0..n)
        .map(|c| {
            let mut r = Relation::empty(base);
            for a in 0..n {
                for b in alg.atom_compose(a, c).iter() {
                    r.insert(a, b).expect("atom indices are base points");
                }
            }
            r
        })
        .collect();
    CandidateMap::additive(alg.clone(), base, atoms)
}

/// Exports named images as a proper structure.
pub fn image_of(
    m: &CandidateMap,
    names: &Env<AtomSet>,
) -> Result<ProperStructure, RepresentationError> {
    let mut out = ProperStructure::new(m.base());
    for (name, &x) in names {
        if !m.algebra().contains(x) {
            return Err(AlgebraError::ElementOutOfRange.into());
        }
        out.insert(name.clone(), m.image(x))?;
    }
    Ok(out)
}

/// A concrete failure of a candidate map to be a representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    /// Two distinct elements share an image.
    Injectivity { left: AtomSet, right: AtomSet },
    /// The image of `symbol(operands)` disagrees with the proper operation
    /// applied to the operands' images at `pair`. `expected` is membership in
    /// the image of the abstract result, `actual` membership in the proper
    /// evaluation.
    Preservation {
        symbol: Symbol,
        operands: Vec<AtomSet>,
        result: AtomSet,
        pair: (usize, usize),
        expected: bool,
        actual: bool,
    },
    /// `left ≤ right` and `image(left) ⊆ image(right)` disagree. When the
    /// inclusion fails, `pair` lies in `image(left) − image(right)`.
    OrderReflection {
        left: AtomSet,
        right: AtomSet,
        leq: bool,
        pair: Option<(usize, usize)>,
    },
}

impl Violation {
    /// Recomputes the instance against `m`; true if the discrepancy reproduces.
    pub fn reverify(&self, m: &CandidateMap) -> bool {
        let alg = m.algebra();
        match self {
            Violation::Injectivity { left, right } => {
                left != right && m.image(*left) == m.image(*right)
            }
            Violation::Preservation {
                symbol,
                operands,
                result,
                pair,
                expected,
                actual,
            } => {
                let Some(abstract_result) = apply_abstract(alg, *symbol, operands) else {
                    return false;
                };
                let Some(proper) = apply_proper(m, *symbol, operands) else {
                    return false;
                };
                abstract_result == *result
                    && m.image(*result).contains(pair.0, pair.1) == *expected
                    && proper.contains(pair.0, pair.1) == *actual
                    && expected != actual
            }
            Violation::OrderReflection {
                left,
                right,
                leq,
                pair,
            } => {
                let included = m.image(*left).subset_unchecked(&m.image(*right));
                let pair_ok = match pair {
                    Some((x, y)) => {
                        m.image(*left).contains(*x, *y) && !m.image(*right).contains(*x, *y)
                    }
                    None => included,
                };
                alg.leq(*left, *right) == *leq && *leq != included && pair_ok
            }
        }
    }

    /// One-line human-readable rendering.
    pub fn describe(&self, alg: &AtomStructure) -> String {
        let el = |x: &AtomSet| alg.format_element(*x);
        match self {
            Violation::Injectivity { left, right } => {
                format!(
                    "injectivity: [{}] and [{}] have the same image",
                    el(left),
                    el(right)
                )
            }
            Violation::Preservation {
                symbol,
                operands,
                result,
                pair,
                expected,
                actual,
            } => {
                let ops: Vec<_> = operands.iter().map(|x| format!("[{}]", el(x))).collect();
                let applied = match operands.len() {
                    0 => symbol.token().to_string(),
                    1 if *symbol == Symbol::Conv => format!("{}~", ops[0]),
                    1 => format!("-{}", ops[0]),
                    _ => format!("{} {} {}", ops[0], symbol, ops[1]),
                };
                format!(
                    "preservation of `{}`: {} = [{}]; ({},{}) {} the image but {} the proper evaluation",
                    symbol,
                    applied,
                    el(result),
                    pair.0,
                    pair.1,
                    if *expected { "in" } else { "not in" },
                    if *actual { "in" } else { "not in" },
                )
            }
            Violation::OrderReflection {
                left,
                right,
                leq,
                pair,
            } => {
                let rel = if *leq { "<=" } else { "not <=" };
                let inc = if *leq {
                    "image not included"
                } else {
                    "image included"
                };
                let at = pair
                    .map(|(x, y)| format!(" at ({x},{y})"))
                    .unwrap_or_default();
                format!(
                    "order-reflection: [{}] {} [{}] but {}{}",
                    el(left),
                    rel,
                    el(right),
                    inc,
                    at
                )
            }
        }
    }

    /// Stable `key=value` rendering.
    pub fn porcelain(&self, alg: &AtomStructure) -> String {
        let el = |x: &AtomSet| alg.format_element(*x).replace(' ', "");
        match self {
            Violation::Injectivity { left, right } => {
                format!(
                    "violation kind=injectivity left={} right={}",
                    el(left),
                    el(right)
                )
            }
            Violation::Preservation {
                symbol,
                operands,
                result,
                pair,
                expected,
                actual,
            } => {
                let ops: Vec<_> = operands.iter().map(el).collect();
                format!(
                    "violation kind=preservation symbol={} operands={} result={} pair={},{} expected={} actual={}",
                    symbol,
                    ops.join("|"),
                    el(result),
                    pair.0,
                    pair.1,
                    expected,
                    actual
                )
            }
            Violation::OrderReflection {
                left,
                right,
                leq,
                pair,
            } => format!(
                "violation kind=order-reflection left={} right={} leq={} pair={}",
                el(left),
                el(right),
                leq,
                pair.map(|(x, y)| format!("{x},{y}"))
                    .unwrap_or_else(|| "-".into())
            ),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub(crate) fn apply_abstract(
    alg: &AtomStructure,
    symbol: Symbol,
    operands: &[AtomSet],
) -> Option<AtomSet> {
    Some(match (symbol, operands) {
        (Symbol::Zero, []) => alg.zero(),
        (Symbol::One, []) => alg.one(),
        (Symbol::Ident, []) => alg.identity_element(),
        (Symbol::Neg, [x]) => alg.negate(*x),
        (Symbol::Conv, [x]) => alg.converse_of(*x),
        (Symbol::Join, [x, y]) => alg.join(*x, *y),
        (Symbol::Meet, [x, y]) => alg.meet(*x, *y),
        (Symbol::Comp, [x, y]) => alg.compose(*x, *y),
        _ => return None,
    })
}

fn apply_proper(m: &CandidateMap, symbol: Symbol, operands: &[AtomSet]) -> Option<Relation> {
    let base = m.base();
    let img: Vec<Relation> = operands.iter().map(|&x| m.image(x)).collect();
    Some(match (symbol, img.as_slice()) {
        (Symbol::Zero, []) => Relation::empty(base),
        (Symbol::One, []) => Relation::full(base),
        (Symbol::Ident, []) => Relation::identity(base),
        (Symbol::Neg, [r]) => r.complement(),
        (Symbol::Conv, [r]) => r.converse(),
        (Symbol::Join, [r, s]) => r.union_unchecked(s),
        (Symbol::Meet, [r, s]) => r.intersection_unchecked(s),
        (Symbol::Comp, [r, s]) => r.compose_unchecked(s),
        _ => return None,
    })
}

/// Options for [`check_representation_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Require distinct elements to have distinct images.
    pub require_injectivity: bool,
    /// Maximum number of violations returned.
    pub cap: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            require_injectivity: true,
            cap: DEFAULT_VIOLATION_CAP,
        }
    }
}

/// Checks that `m` is a representation for signature `sig`: injective, and
/// preserving every symbol in `sig` (order-reflecting when `≤` is in `sig`).
/// Returns the violations found, least first; an empty list means pass.
pub fn check_representation(
    m: &CandidateMap,
    sig: Signature,
) -> Result<Vec<Violation>, RepresentationError> {
    check_representation_with(m, sig, CheckOptions::default())
}

struct Collector {
    cap: usize,
    found: Vec<Violation>,
}

impl Collector {
    fn full(&self) -> bool {
        self.found.len() >= self.cap
    }

    fn push(&mut self, v: Violation) {
        if !self.full() {
            self.found.push(v);
        }
    }
}

pub fn check_representation_with(
    m: &CandidateMap,
    sig: Signature,
    opts: CheckOptions,
) -> Result<Vec<Violation>, RepresentationError> {
    let mut out = Collector {
        cap: opts.cap,
        found: Vec::new(),
    };
    if opts.cap == 0 {
        return Ok(out.found);
    }
    if m.is_atomic() {
        check_atomic(m, sig, opts, &mut out)?;
        return Ok(out.found);
    }
    let alg = m.algebra();
    let elements: Vec<AtomSet> = alg.elements().collect();

    if opts.require_injectivity {
        let mut groups: HashMap<Relation, Vec<AtomSet>> = HashMap::new();
        for &x in &elements {
            groups.entry(m.image(x)).or_default().push(x);
        }
        'outer: for &s in &elements {
            for &t in groups[&m.image(s)].iter().filter(|&&t| t > s) {
                out.push(Violation::Injectivity { left: s, right: t });
                if out.full() {
                    break 'outer;
                }
            }
        }
    }

    for symbol in sig.symbols() {
        if out.full() {
            break;
        }
        match symbol.arity() {
            _ if symbol == Symbol::Leq => {
                'leq: for &s in &elements {
                    for &t in &elements {
                        let (is, it) = (m.image(s), m.image(t));
                        let leq = alg.leq(s, t);
                        if leq != is.subset_unchecked(&it) {
                            let pair = is.pairs().find(|&(x, y)| !it.contains(x, y));
                            out.push(Violation::OrderReflection {
                                left: s,
                                right: t,
                                leq,
                                pair,
                            });
                            if out.full() {
                                break 'leq;
                            }
                        }
                    }
                }
            }
            0 => check_instance(m, symbol, vec![], &mut out),
            1 => {
                for &x in &elements {
                    check_instance(m, symbol, vec![x], &mut out);
                    if out.full() {
                        break;
                    }
                }
            }
            _ => {
                'bin: for &x in &elements {
                    for &y in &elements {
                        check_instance(m, symbol, vec![x, y], &mut out);
                        if out.full() {
                            break 'bin;
                        }
                    }
                }
            }
        }
    }
    Ok(out.found)
}

fn check_instance(m: &CandidateMap, symbol: Symbol, operands: Vec<AtomSet>, out: &mut Collector) {
    let result = apply_abstract(m.algebra(), symbol, &operands).expect("arity matches");
    let proper = apply_proper(m, symbol, &operands).expect("arity matches");
    let image = m.image(result);
    if let Some(pair) = image.first_difference(&proper) {
        out.push(Violation::Preservation {
            symbol,
            operands,
            result,
            pair,
            expected: image.contains(pair.0, pair.1),
            actual: proper.contains(pair.0, pair.1),
        });
    }
}

/// Atoms-only maps are additive by construction, so `+` and `0` hold and
/// `;`, converse and the remaining constants reduce to atoms. Injectivity and
/// order reflection hold iff every atom has a pair no other atom covers.
fn check_atomic(
    m: &CandidateMap,
    sig: Signature,
    opts: CheckOptions,
    out: &mut Collector,
) -> Result<(), RepresentationError> {
    for s in [Symbol::Neg, Symbol::Meet] {
        if sig.contains(s) {
            return Err(RepresentationError::NotDerivable(s));
        }
    }
    let alg = m.algebra();
    let n = alg.atom_count();
    let atoms: Vec<AtomSet> = (0..n).map(AtomSet::singleton).collect();
    let one = alg.one();
    if opts.require_injectivity || sig.contains(Symbol::Leq) {
        for &atom in &atoms {
            let others = alg.negate(atom);
            if m.image(atom).subset_unchecked(&m.image(others)) {
                if opts.require_injectivity {
                    out.push(Violation::Injectivity {
                        left: others,
                        right: one,
                    });
                }
                if sig.contains(Symbol::Leq) {
                    out.push(Violation::OrderReflection {
                        left: one,
                        right: others,
                        leq: false,
                        pair: None,
                    });
                }
            }
        }
    }
    for symbol in sig.symbols() {
        match symbol {
            Symbol::Zero | Symbol::One | Symbol::Ident => check_instance(m, symbol, vec![], out),
            Symbol::Conv => atoms
                .iter()
                .for_each(|&x| check_instance(m, symbol, vec![x], out)),
            Symbol::Comp => {
                for &x in &atoms {
                    for &y in &atoms {
                        check_instance(m, symbol, vec![x, y], out);
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}
