//! Concrete binary relations over a finite base, stored as bit matrices.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Largest supported base size; one `u32` row per point.
pub const MAX_BASE: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("empty base not admitted")]
    EmptyBase,
    #[error("base size {0} exceeds the limit of {MAX_BASE}")]
    BaseTooLarge(usize),
    #[error("relations over different bases ({0} and {1})")]
    MixedBases(usize, usize),
    #[error("pair ({0},{1}) outside a base of size {2}")]
    PairOutOfBase(usize, usize, usize),
    #[error("no relation named `{0}`")]
    Unbound(String),
}

/// The points `0..n` of a nonempty finite base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteBase(usize);

impl FiniteBase {
    pub fn new(n: usize) -> Result<Self, RelationError> {
        match n {
            0 => Err(RelationError::EmptyBase),
            n if n > MAX_BASE => Err(RelationError::BaseTooLarge(n)),
            n => Ok(FiniteBase(n)),
        }
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn points(self) -> std::ops::Range<usize> {
        0..self.0
    }

    /// All pairs in lexicographic order.
    pub fn pairs(self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.0;
        (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
    }

    fn row_mask(self) -> u32 {
        if self.0 == 32 {
            u32::MAX
        } else {
            (1u32 << self.0) - 1
        }
    }
}

/// A binary relation over a [`FiniteBase`]. Row `x` holds the successors of `x`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    base: FiniteBase,
    rows: [u32; MAX_BASE],
}

impl Relation {
    pub fn empty(base: FiniteBase) -> Self {
        Relation {
            base,
            rows: [0; MAX_BASE],
        }
    }

    pub fn full(base: FiniteBase) -> Self {
        let mut r = Self::empty(base);
        for x in base.points() {
            r.rows[x] = base.row_mask();
        }
        r
    }

    pub fn identity(base: FiniteBase) -> Self {
        let mut r = Self::empty(base);
        for x in base.points() {
            r.rows[x] = 1 << x;
        }
        r
    }

    pub fn from_pairs(
        base: FiniteBase,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, RelationError> {
        let mut r = Self::empty(base);
        for (x, y) in pairs {
            r.insert(x, y)?;
        }
        Ok(r)
    }

    /// Decodes a relation whose pair `(x, y)` is bit `x * n + y` of `code`.
    /// Requires `n * n <= 128`.
    pub fn from_code(base: FiniteBase, code: u128) -> Self {
        let n = base.size();
        debug_assert!(n * n <= 128);
        let mut r = Self::empty(base);
        for x in 0..n {
            r.rows[x] = ((code >> (x * n)) as u32) & base.row_mask();
        }
        r
    }

    /// Inverse of [`Relation::from_code`].
    pub fn code(&self) -> u128 {
        let n = self.base.size();
        debug_assert!(n * n <= 128);
        self.base
            .points()
            .fold(0u128, |acc, x| acc | (self.rows[x] as u128) << (x * n))
    }

    pub fn base(&self) -> FiniteBase {
        self.base
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.base.size() && y < self.base.size() && self.rows[x] >> y & 1 == 1
    }

    pub fn insert(&mut self, x: usize, y: usize) -> Result<(), RelationError> {
        let n = self.base.size();
        if x >= n || y >= n {
            return Err(RelationError::PairOutOfBase(x, y, n));
        }
        self.rows[x] |= 1 << y;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.base.pairs().filter(|&(x, y)| self.contains(x, y))
    }

    pub fn first_pair(&self) -> Option<(usize, usize)> {
        self.pairs().next()
    }

    /// Least pair on which `self` and `other` disagree.
    pub fn first_difference(&self, other: &Relation) -> Option<(usize, usize)> {
        self.base
            .pairs()
            .find(|&(x, y)| self.contains(x, y) != other.contains(x, y))
    }

    /// Successors of `x`, as a bitmask over points.
    pub fn row(&self, x: usize) -> u32 {
        self.rows[x]
    }

    fn check_base(&self, other: &Relation) -> Result<(), RelationError> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(RelationError::MixedBases(
                self.base.size(),
                other.base.size(),
            ))
        }
    }

    pub fn compose(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.check_base(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub fn union(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.check_base(other)?;
        Ok(self.zip(other, |a, b| a | b))
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.check_base(other)?;
        Ok(self.zip(other, |a, b| a & b))
    }

    pub fn is_subset(&self, other: &Relation) -> Result<bool, RelationError> {
        self.check_base(other)?;
        Ok(self.subset_unchecked(other))
    }

    /// Complement relative to `base × base`.
    pub fn complement(&self) -> Relation {
        let mut r = *self;
        let mask = self.base.row_mask();
        for x in self.base.points() {
            r.rows[x] = !r.rows[x] & mask;
        }
        r
    }

    pub fn converse(&self) -> Relation {
        let mut r = Self::empty(self.base);
        for (x, y) in self.pairs() {
            r.rows[y] |= 1 << x;
        }
        r
    }

    pub(crate) fn compose_unchecked(&self, other: &Relation) -> Relation {
        let mut r = Self::empty(self.base);
        for x in self.base.points() {
            let mut row = self.rows[x];
            let mut acc = 0;
            while row != 0 {
                let y = row.trailing_zeros() as usize;
                row &= row - 1;
                acc |= other.rows[y];
            }
            r.rows[x] = acc;
        }
        r
    }

    pub(crate) fn union_unchecked(&self, other: &Relation) -> Relation {
        self.zip(other, |a, b| a | b)
    }

    pub(crate) fn intersection_unchecked(&self, other: &Relation) -> Relation {
        self.zip(other, |a, b| a & b)
    }

    pub(crate) fn subset_unchecked(&self, other: &Relation) -> bool {
        self.base
            .points()
            .all(|x| self.rows[x] & !other.rows[x] == 0)
    }

    fn zip(&self, other: &Relation, f: impl Fn(u32, u32) -> u32) -> Relation {
        let mut r = Self::empty(self.base);
        for x in self.base.points() {
            r.rows[x] = f(self.rows[x], other.rows[x]);
        }
        r
    }

    /// Embeds into a larger base; new points occur in no pair.
    pub fn pad(&self, base: FiniteBase) -> Result<Relation, RelationError> {
        if base.size() < self.base.size() {
            return Err(RelationError::MixedBases(self.base.size(), base.size()));
        }
        Ok(Relation {
            base,
            rows: self.rows,
        })
    }

    /// Whether the relation is the graph of a permutation of the base.
    pub fn is_permutation(&self) -> bool {
        let mut cols = 0u32;
        for x in self.base.points() {
            if self.rows[x].count_ones() != 1 {
                return false;
            }
            cols |= self.rows[x];
        }
        cols == self.base.row_mask()
    }
}

/// Which Boolean operation [`rel_boolean`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BooleanOp {
    Union,
    Intersection,
    Complement,
}

/// Union, intersection, or complement. The second operand is ignored for
/// complement and required otherwise.
pub fn rel_boolean(
    op: BooleanOp,
    r: &Relation,
    s: Option<&Relation>,
) -> Result<Relation, RelationError> {
    match (op, s) {
        (BooleanOp::Complement, _) => Ok(r.complement()),
        (BooleanOp::Union, Some(s)) => r.union(s),
        (BooleanOp::Intersection, Some(s)) => r.intersection(s),
        (_, None) => Err(RelationError::Unbound("second operand".into())),
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation[{}]{{{}}}", self.base.size(), self)
    }
}

/// Space separated `(x,y)` pairs in lexicographic order.
impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (x, y) in self.pairs() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "({x},{y})")?;
        }
        Ok(())
    }
}

/// Parses a list of `(x,y)` pairs. Whitespace between and inside pairs is allowed.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or_else(|| "unclosed pair".to_string())?;
        let (x, y) = body[..close]
            .split_once(',')
            .ok_or_else(|| format!("expected `x,y` in `({})`", &body[..close]))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid point `{}`", s.trim()))
        };
        out.push((parse(x)?, parse(y)?));
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}

/// A finite base with named concrete relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperStructure {
    base: FiniteBase,
    relations: BTreeMap<String, Relation>,
}

impl ProperStructure {
    pub fn new(base: FiniteBase) -> Self {
        ProperStructure {
            base,
            relations: BTreeMap::new(),
        }
    }

    pub fn base(&self) -> FiniteBase {
        self.base
    }

    pub fn insert(&mut self, name: impl Into<String>, r: Relation) -> Result<(), RelationError> {
        if r.base() != self.base {
            return Err(RelationError::MixedBases(self.base.size(), r.base().size()));
        }
        self.relations.insert(name.into(), r);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base(n: usize) -> FiniteBase {
        FiniteBase::new(n).unwrap()
    }

    fn lt(n: usize) -> Relation {
        let b = base(n);
        Relation::from_pairs(b, b.pairs().filter(|(x, y)| x < y)).unwrap()
    }

    #[test]
    fn less_than_composed_with_greater_than() {
        // Oracle: (x,z) is in < ; > iff some y exceeds both x and z.
        let b = base(3);
        let lt = lt(3);
        let got = lt.compose(&lt.converse()).unwrap();
        let oracle: Vec<_> = b
            .pairs()
            .filter(|&(x, z)| b.points().any(|y| y > x && y > z))
            .collect();
        assert_eq!(oracle, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(got.pairs().collect::<Vec<_>>(), oracle);
    }

    #[test]
    fn less_than_squared_on_three_points() {
        assert_eq!(
            lt(3).compose(&lt(3)).unwrap().pairs().collect::<Vec<_>>(),
            vec![(0, 2)]
        );
    }

    #[test]
    fn trivial_relation_identities() {
        let b = base(3);
        let r = Relation::from_pairs(b, [(0, 1), (2, 2)]).unwrap();
        assert!(r.compose(&Relation::empty(b)).unwrap().is_empty());
        assert_eq!(Relation::identity(b).compose(&r).unwrap(), r);
        assert_eq!(
            Relation::from_pairs(b, [(0, 1)]).unwrap().converse(),
            Relation::from_pairs(b, [(1, 0)]).unwrap()
        );
        assert_eq!(
            Relation::identity(base(2)).pairs().collect::<Vec<_>>(),
            vec![(0, 0), (1, 1)]
        );
        assert!(Relation::full(b).complement().is_empty());
        assert_eq!(
            rel_boolean(BooleanOp::Complement, &Relation::empty(b), None).unwrap(),
            Relation::full(b)
        );
    }

    #[test]
    fn errors() {
        assert_eq!(
            FiniteBase::new(0).unwrap_err().to_string(),
            "empty base not admitted"
        );
        assert!(FiniteBase::new(33).is_err());
        let r = Relation::empty(base(2));
        let s = Relation::empty(base(3));
        assert_eq!(r.compose(&s).unwrap_err(), RelationError::MixedBases(2, 3));
        assert!(r.union(&s).is_err());
        assert!(rel_boolean(BooleanOp::Union, &r, None).is_err());
        assert!(Relation::from_pairs(base(2), [(0, 2)]).is_err());
    }

    #[test]
    fn pair_list_syntax() {
        let b = base(3);
        let r = Relation::from_pairs(b, [(0, 1), (2, 0)]).unwrap();
        assert_eq!(r.to_string(), "(0,1) (2,0)");
        assert_eq!(parse_pairs("( 0 , 1 )(2,0)").unwrap(), vec![(0, 1), (2, 0)]);
        assert!(parse_pairs("(0 1)").is_err());
        assert!(parse_pairs("0,1").is_err());
        assert_eq!(parse_pairs("  ").unwrap(), vec![]);
    }

    #[test]
    fn permutations() {
        let b = base(3);
        assert!(Relation::identity(b).is_permutation());
        assert!(Relation::from_pairs(b, [(0, 1), (1, 2), (2, 0)])
            .unwrap()
            .is_permutation());
        assert!(!Relation::from_pairs(b, [(0, 1), (1, 1), (2, 0)])
            .unwrap()
            .is_permutation());
    }

    fn relation(max_n: usize) -> impl Strategy<Value = Relation> {
        (1..=max_n).prop_flat_map(|n| {
            any::<u64>().prop_map(move |bits| Relation::from_code(base(n), bits as u128))
        })
    }

    fn triple() -> impl Strategy<Value = (Relation, Relation, Relation)> {
        (1..=6usize).prop_flat_map(|n| {
            let r = any::<u64>().prop_map(move |c| Relation::from_code(base(n), c as u128));
            (r.clone(), r.clone(), r)
        })
    }

    proptest! {
        #[test]
        fn compose_is_associative((r, s, t) in triple()) {
            let left = r.compose(&s).unwrap().compose(&t).unwrap();
            let right = r.compose(&s.compose(&t).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn converse_is_involutive_and_reverses_composition((r, s, _t) in triple()) {
            prop_assert_eq!(r.converse().converse(), r);
            prop_assert_eq!(
                r.compose(&s).unwrap().converse(),
                s.converse().compose(&r.converse()).unwrap()
            );
        }

        #[test]
        fn de_morgan((r, s, _t) in triple()) {
            prop_assert_eq!(
                r.union(&s).unwrap().complement(),
                r.complement().intersection(&s.complement()).unwrap()
            );
            prop_assert_eq!(
                r.intersection(&s).unwrap().complement(),
                r.complement().union(&s.complement()).unwrap()
            );
        }

        #[test]
        fn code_round_trips(r in relation(6)) {
            prop_assert_eq!(Relation::from_code(r.base(), r.code()), r);
        }

        #[test]
        fn compose_matches_witness_definition((r, s, _t) in triple()) {
            let b = r.base();
            let c = r.compose(&s).unwrap();
            for (x, z) in b.pairs() {
                let witness = b.points().any(|y| r.contains(x, y) && s.contains(y, z));
                prop_assert_eq!(c.contains(x, z), witness);
            }
        }
    }
}
