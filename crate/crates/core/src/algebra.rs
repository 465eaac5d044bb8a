//! Finite relation algebras presented by their atom structures.
//!
//! Every element of a finite Boolean algebra is the join of the atoms below it,
//! so an element is stored as an [`AtomSet`] bitmask over the atom ordering.
//! Composition is kept atomwise in a table and lifted additively; converse is
//! lifted pointwise through the converse permutation.

use std::collections::HashSet;
use std::fmt;
use std::ops::{BitAnd, BitOr};

use thiserror::Error;

/// Maximum number of atoms an [`AtomStructure`] may carry (65536 elements).
pub const MAX_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("an algebra needs at least one atom")]
    NoAtoms,
    #[error("too many atoms: {count} (limit {MAX_ATOMS})")]
    TooManyAtoms { count: usize },
    #[error("duplicate atom name `{0}`")]
    DuplicateAtom(String),
    #[error("invalid atom name `{0}`")]
    InvalidAtomName(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("converse map has {got} entries for {expected} atoms")]
    ConverseLength { expected: usize, got: usize },
    #[error("converse not involutive at atom `{0}`")]
    ConverseNotInvolutive(String),
    #[error("identity set is empty")]
    EmptyIdentity,
    #[error("identity set not closed under converse at atom `{0}`")]
    IdentityNotClosed(String),
    #[error("composition table not total: row for `{row}` has {got} entries, expected {expected}")]
    TableNotTotal {
        row: String,
        expected: usize,
        got: usize,
    },
    #[error("composition table has {got} rows, expected {expected}")]
    TableRows { expected: usize, got: usize },
    #[error("composition entry `{left} ; {right}` mentions atoms outside the algebra")]
    TableEntryOutOfRange { left: String, right: String },
    #[error("composition entry `{left} ; {right}` given twice")]
    DuplicateEntry { left: String, right: String },
    #[error("element outside the algebra's atom range")]
    ElementOutOfRange,
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("algebra with {atoms} atoms is too large for exhaustive check (cap {cap})")]
    TooLargeForCheck { atoms: usize, cap: usize },
}

/// A set of atoms, i.e. an element of a finite atomic Boolean algebra.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSet(u32);

impl AtomSet {
    pub const EMPTY: AtomSet = AtomSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        AtomSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn singleton(atom: usize) -> Self {
        AtomSet(1 << atom)
    }

    /// The set of the first `n` atoms.
    pub const fn full(n: usize) -> Self {
        AtomSet(((1u64 << n) - 1) as u32)
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn contains(self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }

    pub const fn is_subset(self, other: AtomSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn insert(&mut self, atom: usize) {
        self.0 |= 1 << atom;
    }

    /// Atom indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl BitOr for AtomSet {
    type Output = AtomSet;
    fn bitor(self, rhs: AtomSet) -> AtomSet {
        AtomSet(self.0 | rhs.0)
    }
}

impl BitAnd for AtomSet {
    type Output = AtomSet;
    fn bitand(self, rhs: AtomSet) -> AtomSet {
        AtomSet(self.0 & rhs.0)
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for AtomSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = AtomSet::EMPTY;
        for a in iter {
            set.insert(a);
        }
        set
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The generating data of a finite relation algebra: atoms, their converses,
/// the identity atoms and the atomwise composition table.
///
/// Construction validates shape only. Whether the generated algebra actually
/// satisfies the relation algebra axioms is the job of
/// [`check_ra_axioms`](crate::axioms::check_ra_axioms).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomStructure {
    name: String,
    atoms: Vec<String>,
    converse: Vec<usize>,
    identity: AtomSet,
    /// Row-major, `table[a * n + b] = a ; b`.
    table: Vec<AtomSet>,
}

impl AtomStructure {
    /// Validates and packages an atom structure.
    ///
    /// `table[a][b]` is the set of atoms below `a ; b`.
    pub fn new(
        name: impl Into<String>,
        atoms: Vec<String>,
        converse: Vec<usize>,
        identity: AtomSet,
        table: Vec<Vec<AtomSet>>,
    ) -> Result<Self, AlgebraError> {
        let n = atoms.len();
        if n == 0 {
            return Err(AlgebraError::NoAtoms);
        }
        if n > MAX_ATOMS {
            return Err(AlgebraError::TooManyAtoms { count: n });
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !is_identifier(a) {
                return Err(AlgebraError::InvalidAtomName(a.clone()));
            }
            if !seen.insert(a.as_str()) {
                return Err(AlgebraError::DuplicateAtom(a.clone()));
            }
        }
        if converse.len() != n {
            return Err(AlgebraError::ConverseLength {
                expected: n,
                got: converse.len(),
            });
        }
        for (a, &c) in converse.iter().enumerate() {
            if c >= n || converse[c] != a {
                return Err(AlgebraError::ConverseNotInvolutive(atoms[a].clone()));
            }
        }
        let all = AtomSet::full(n);
        if identity.is_empty() {
            return Err(AlgebraError::EmptyIdentity);
        }
        if !identity.is_subset(all) {
            return Err(AlgebraError::ElementOutOfRange);
        }
        for a in identity.iter() {
            if !identity.contains(converse[a]) {
                return Err(AlgebraError::IdentityNotClosed(atoms[a].clone()));
            }
        }
        if table.len() != n {
            return Err(AlgebraError::TableRows {
                expected: n,
                got: table.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(AlgebraError::TableNotTotal {
                    row: atoms[a].clone(),
                    expected: n,
                    got: row.len(),
                });
            }
            for (b, &entry) in row.iter().enumerate() {
                if !entry.is_subset(all) {
                    return Err(AlgebraError::TableEntryOutOfRange {
                        left: atoms[a].clone(),
                        right: atoms[b].clone(),
                    });
                }
                flat.push(entry);
            }
        }
        Ok(AtomStructure {
            name: name.into(),
            atoms,
            converse,
            identity,
            table: flat,
        })
    }

    pub fn builder(name: impl Into<String>) -> AtomStructureBuilder {
        AtomStructureBuilder::new(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_name(&self, atom: usize) -> &str {
        &self.atoms[atom]
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn converse_atom(&self, atom: usize) -> usize {
        self.converse[atom]
    }

    pub fn identity_atoms(&self) -> AtomSet {
        self.identity
    }

    /// Atoms below `a ; b` for atoms `a`, `b`.
    pub fn atom_compose(&self, a: usize, b: usize) -> AtomSet {
        self.table[a * self.atoms.len() + b]
    }

    /// Number of elements, `2^atoms`.
    pub fn element_count(&self) -> usize {
        1 << self.atoms.len()
    }

    /// All elements in increasing bitmask order.
    pub fn elements(&self) -> impl Iterator<Item = AtomSet> {
        (0..self.element_count() as u32).map(AtomSet::from_bits)
    }

    pub fn zero(&self) -> AtomSet {
        AtomSet::EMPTY
    }

    pub fn one(&self) -> AtomSet {
        AtomSet::full(self.atoms.len())
    }

    pub fn identity_element(&self) -> AtomSet {
        self.identity
    }

    pub fn contains(&self, x: AtomSet) -> bool {
        x.is_subset(self.one())
    }

    pub fn join(&self, x: AtomSet, y: AtomSet) -> AtomSet {
        x | y
    }

    pub fn meet(&self, x: AtomSet, y: AtomSet) -> AtomSet {
        x & y
    }

    pub fn negate(&self, x: AtomSet) -> AtomSet {
        AtomSet::from_bits(!x.bits() & self.one().bits())
    }

    pub fn leq(&self, x: AtomSet, y: AtomSet) -> bool {
        x.is_subset(y)
    }

    /// Additive lifting of the atom table.
    pub fn compose(&self, x: AtomSet, y: AtomSet) -> AtomSet {
        let n = self.atoms.len();
        let mut out = AtomSet::EMPTY;
        for a in x.iter() {
            let row = &self.table[a * n..(a + 1) * n];
            for b in y.iter() {
                out = out | row[b];
            }
        }
        out
    }

    pub fn converse_of(&self, x: AtomSet) -> AtomSet {
        x.iter().map(|a| self.converse[a]).collect()
    }

    /// `1' · (x ; x⌣)`.
    pub fn domain(&self, x: AtomSet) -> AtomSet {
        self.meet(self.identity, self.compose(x, self.converse_of(x)))
    }

    pub fn is_atom(&self, x: AtomSet) -> bool {
        x.len() == 1
    }

    /// Singleton sub-elements of `x`, in atom order.
    pub fn atoms_below(&self, x: AtomSet) -> Vec<AtomSet> {
        x.iter().map(AtomSet::singleton).collect()
    }

    /// Wraps a raw atom set as a checked element of this algebra.
    pub fn element(&self, x: AtomSet) -> Result<Element<'_>, AlgebraError> {
        if !self.contains(x) {
            return Err(AlgebraError::ElementOutOfRange);
        }
        Ok(Element {
            algebra: self,
            atoms: x,
        })
    }

    /// Element from atom names.
    pub fn element_of<'s>(
        &self,
        names: impl IntoIterator<Item = &'s str>,
    ) -> Result<AtomSet, AlgebraError> {
        names
            .into_iter()
            .map(|n| {
                self.atom_index(n)
                    .ok_or_else(|| AlgebraError::UnknownAtom(n.to_string()))
            })
            .collect()
    }

    /// Renders an element as `0`, `1`, or a `+`-sum of atom names.
    pub fn format_element(&self, x: AtomSet) -> String {
        if x.is_empty() {
            "0".to_string()
        } else if x == self.one() {
            "1".to_string()
        } else {
            x.iter()
                .map(|a| self.atoms[a].as_str())
                .collect::<Vec<_>>()
                .join(" + ")
        }
    }

    /// Parses `0`, `1`, or a `+`-sum of atom names.
    pub fn parse_element(&self, text: &str) -> Result<AtomSet, AlgebraError> {
        let text = text.trim();
        match text {
            "0" => Ok(AtomSet::EMPTY),
            "1" => Ok(self.one()),
            _ => text
                .split('+')
                .map(|part| {
                    let part = part.trim();
                    self.atom_index(part)
                        .ok_or_else(|| AlgebraError::UnknownAtom(part.to_string()))
                })
                .collect(),
        }
    }
}

/// Name-based construction of an [`AtomStructure`]. Omitted composition
/// entries are empty; omitted converse entries are fixed points.
#[derive(Debug, Clone)]
pub struct AtomStructureBuilder {
    name: String,
    atoms: Vec<String>,
    converse_pairs: Vec<(String, String)>,
    identity: Vec<String>,
    entries: Vec<(String, String, Vec<String>)>,
}

impl AtomStructureBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        AtomStructureBuilder {
            name: name.into(),
            atoms: Vec::new(),
            converse_pairs: Vec::new(),
            identity: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn atoms<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.atoms.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn identity<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.identity.extend(names.into_iter().map(Into::into));
        self
    }

    /// Declares `a` and `b` mutual converses.
    pub fn converse(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.converse_pairs.push((a.into(), b.into()));
        self
    }

    pub fn comp<S: Into<String>>(
        mut self,
        a: impl Into<String>,
        b: impl Into<String>,
        result: impl IntoIterator<Item = S>,
    ) -> Self {
        self.entries.push((
            a.into(),
            b.into(),
            result.into_iter().map(Into::into).collect(),
        ));
        self
    }

    pub fn build(self) -> Result<AtomStructure, AlgebraError> {
        let n = self.atoms.len();
        let index = |name: &str| {
            self.atoms
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| AlgebraError::UnknownAtom(name.to_string()))
        };
        let mut converse: Vec<Option<usize>> = vec![None; n];
        for (a, b) in &self.converse_pairs {
            let (i, j) = (index(a)?, index(b)?);
            for (x, y) in [(i, j), (j, i)] {
                match converse[x] {
                    Some(prev) if prev != y => {
                        return Err(AlgebraError::ConverseNotInvolutive(self.atoms[x].clone()))
                    }
                    _ => converse[x] = Some(y),
                }
            }
        }
        let converse: Vec<usize> = converse
            .iter()
            .enumerate()
            .map(|(i, c)| c.unwrap_or(i))
            .collect();
        let identity = self
            .identity
            .iter()
            .map(|s| index(s))
            .collect::<Result<AtomSet, _>>()?;
        let mut table = vec![vec![AtomSet::EMPTY; n]; n];
        let mut given = vec![vec![false; n]; n];
        for (a, b, result) in &self.entries {
            let (i, j) = (index(a)?, index(b)?);
            if given[i][j] {
                return Err(AlgebraError::DuplicateEntry {
                    left: a.clone(),
                    right: b.clone(),
                });
            }
            given[i][j] = true;
            table[i][j] = result
                .iter()
                .map(|s| index(s))
                .collect::<Result<AtomSet, _>>()?;
        }
        AtomStructure::new(self.name, self.atoms, converse, identity, table)
    }
}

/// An element bound to its owning algebra. Operations refuse operands from
/// a different algebra.
#[derive(Debug, Clone, Copy)]
pub struct Element<'a> {
    algebra: &'a AtomStructure,
    atoms: AtomSet,
}

impl<'a> Element<'a> {
    pub fn algebra(&self) -> &'a AtomStructure {
        self.algebra
    }

    pub fn atoms(&self) -> AtomSet {
        self.atoms
    }

    fn same_algebra(&self, other: &Element<'_>) -> Result<(), AlgebraError> {
        if std::ptr::eq(self.algebra, other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(AlgebraError::MixedAlgebras)
        }
    }

    fn with(&self, atoms: AtomSet) -> Element<'a> {
        Element {
            algebra: self.algebra,
            atoms,
        }
    }

    pub fn join(&self, other: &Element<'_>) -> Result<Element<'a>, AlgebraError> {
        self.same_algebra(other)?;
        Ok(self.with(self.algebra.join(self.atoms, other.atoms)))
    }

    pub fn meet(&self, other: &Element<'_>) -> Result<Element<'a>, AlgebraError> {
        self.same_algebra(other)?;
        Ok(self.with(self.algebra.meet(self.atoms, other.atoms)))
    }

    pub fn compose(&self, other: &Element<'_>) -> Result<Element<'a>, AlgebraError> {
        self.same_algebra(other)?;
        Ok(self.with(self.algebra.compose(self.atoms, other.atoms)))
    }

    pub fn leq(&self, other: &Element<'_>) -> Result<bool, AlgebraError> {
        self.same_algebra(other)?;
        Ok(self.algebra.leq(self.atoms, other.atoms))
    }

    pub fn negate(&self) -> Element<'a> {
        self.with(self.algebra.negate(self.atoms))
    }

    pub fn converse(&self) -> Element<'a> {
        self.with(self.algebra.converse_of(self.atoms))
    }

    pub fn domain(&self) -> Element<'a> {
        self.with(self.algebra.domain(self.atoms))
    }

    pub fn is_atom(&self) -> bool {
        self.algebra.is_atom(self.atoms)
    }

    pub fn atoms_below(&self) -> Vec<Element<'a>> {
        self.algebra
            .atoms_below(self.atoms)
            .into_iter()
            .map(|a| self.with(a))
            .collect()
    }
}

impl PartialEq for Element<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other).is_ok() && self.atoms == other.atoms
    }
}

impl Eq for Element<'_> {}

impl fmt::Display for Element<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.algebra.format_element(self.atoms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn set(alg: &AtomStructure, names: &[&str]) -> AtomSet {
        alg.element_of(names.iter().copied()).unwrap()
    }

    #[test]
    fn one_atom_algebra_builds() {
        let alg = AtomStructure::builder("trivial")
            .atoms(["e"])
            .identity(["e"])
            .comp("e", "e", ["e"])
            .build()
            .unwrap();
        assert_eq!(alg.element_count(), 2);
        assert!(alg.is_atom(alg.one()));
    }

    #[test]
    fn rejects_non_involutive_converse() {
        let atoms = vec!["e".to_string(), "l".to_string(), "g".to_string()];
        let table = vec![vec![AtomSet::EMPTY; 3]; 3];
        // l->g, g->l, e->l
        let err = AtomStructure::new("bad", atoms, vec![1, 2, 1], AtomSet::singleton(0), table)
            .unwrap_err();
        assert_eq!(err, AlgebraError::ConverseNotInvolutive("e".into()));
        assert!(err.to_string().contains("converse not involutive"));
    }

    #[test]
    fn rejects_duplicates_and_partial_tables() {
        let err = AtomStructure::builder("dup")
            .atoms(["a", "a"])
            .identity(["a"])
            .build();
        assert_eq!(err.unwrap_err(), AlgebraError::DuplicateAtom("a".into()));

        let atoms = vec!["e".to_string(), "f".to_string()];
        let table = vec![vec![AtomSet::EMPTY; 2], vec![AtomSet::EMPTY]];
        let err =
            AtomStructure::new("t", atoms, vec![0, 1], AtomSet::singleton(0), table).unwrap_err();
        assert!(matches!(err, AlgebraError::TableNotTotal { ref row, .. } if row == "f"));

        let err = AtomStructure::builder("none").build().unwrap_err();
        assert_eq!(err, AlgebraError::NoAtoms);
    }

    #[test]
    fn boolean_operations_on_point_algebra() {
        let pa = zoo::point_algebra();
        let (e, l, g) = (set(&pa, &["e"]), set(&pa, &["l"]), set(&pa, &["g"]));
        assert_eq!(pa.join(e, l), set(&pa, &["e", "l"]));
        assert_eq!(pa.negate(pa.join(e, l)), g);
        assert_eq!(pa.meet(pa.one(), e), e);
        assert!(pa.leq(e, pa.join(e, l)));
        assert!(!pa.leq(l, e));
    }

    #[test]
    fn composition_on_point_algebra() {
        let pa = zoo::point_algebra();
        let le = set(&pa, &["e", "l"]);
        let gt = set(&pa, &["g"]);
        assert_eq!(pa.compose(le, gt), pa.one());
        assert_eq!(pa.compose(gt, gt), gt);
        assert_eq!(pa.compose(le, le), le);
        assert_eq!(pa.compose(pa.zero(), pa.one()), pa.zero());
    }

    #[test]
    fn converse_identity_and_atoms() {
        let pa = zoo::point_algebra();
        let (e, l, g) = (set(&pa, &["e"]), set(&pa, &["l"]), set(&pa, &["g"]));
        assert_eq!(pa.converse_of(l), g);
        assert_eq!(pa.converse_of(pa.identity_element()), pa.identity_element());
        let le = pa.join(e, l);
        assert_eq!(pa.converse_of(pa.converse_of(le)), le);
        assert_eq!(pa.identity_element(), e);
        assert_eq!(pa.atoms_below(pa.join(l, g)), vec![l, g]);
        assert!(!pa.is_atom(pa.one()));
        assert!(!pa.is_atom(pa.zero()));
    }

    #[test]
    fn domain_of_elements() {
        let pa = zoo::point_algebra();
        assert_eq!(pa.domain(set(&pa, &["l"])), set(&pa, &["e"]));
        assert_eq!(pa.domain(pa.zero()), pa.zero());

        let z2 = zoo::group_complex_algebra(&zoo::GroupTable::cyclic(2)).unwrap();
        assert_eq!(z2.domain(AtomSet::singleton(1)), AtomSet::singleton(0));
    }

    #[test]
    fn checked_elements_refuse_mixed_algebras() {
        let pa = zoo::point_algebra();
        let z2 = zoo::group_complex_algebra(&zoo::GroupTable::cyclic(2)).unwrap();
        let x = pa.element(pa.one()).unwrap();
        let y = z2.element(z2.one()).unwrap();
        assert_eq!(x.join(&y).unwrap_err(), AlgebraError::MixedAlgebras);
        assert_eq!(x.compose(&y).unwrap_err(), AlgebraError::MixedAlgebras);
        assert_ne!(x, y);

        let pa2 = zoo::point_algebra();
        let z = pa2.element(pa2.identity_element()).unwrap();
        assert_eq!(x.meet(&z).unwrap().atoms(), pa.identity_element());
        assert_eq!(z.negate().to_string(), "l + g");
        assert!(pa.element(AtomSet::from_bits(8)).is_err());
    }

    #[test]
    fn element_text_round_trip() {
        let pa = zoo::point_algebra();
        for x in pa.elements() {
            assert_eq!(pa.parse_element(&pa.format_element(x)).unwrap(), x);
        }
        assert!(pa.parse_element("e + q").is_err());
    }
}
