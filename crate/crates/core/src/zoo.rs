//! Built-in algebras: the Point Algebra, the one-atom algebra and complex
//! algebras of finite groups.

use thiserror::Error;

use crate::algebra::{AtomSet, AtomStructure};

/// The Point Algebra over the rationals. Atoms `e` (=), `l` (<) and `g` (>).
pub fn point_algebra() -> AtomStructure {
    AtomStructure::builder("point")
        .atoms(["e", "l", "g"])
        .identity(["e"])
        .converse("l", "g")
        .comp("e", "e", ["e"])
        .comp("e", "l", ["l"])
        .comp("e", "g", ["g"])
        .comp("l", "e", ["l"])
        .comp("l", "l", ["l"])
        .comp("l", "g", ["e", "l", "g"])
        .comp("g", "e", ["g"])
        .comp("g", "l", ["e", "l", "g"])
        .comp("g", "g", ["g"])
        .build()
        .expect("point algebra is well formed")
}

/// The two-element relation algebra with a single identity atom.
pub fn one_atom() -> AtomStructure {
    AtomStructure::builder("trivial")
        .atoms(["e"])
        .identity(["e"])
        .comp("e", "e", ["e"])
        .build()
        .expect("one-atom algebra is well formed")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group must have at least one element")]
    Empty,
    #[error("operation table is not {0}x{0}")]
    Shape(usize),
    #[error("not a Latin square at row {row}, column {col}")]
    LatinSquare { row: usize, col: usize },
    #[error("associativity fails at ({0}, {1}, {2})")]
    Associativity(usize, usize, usize),
    #[error("identity law fails at {0}")]
    Identity(usize),
    #[error("inverse law fails at {0}")]
    Inverse(usize),
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    pub fn new(
        table: Vec<Vec<usize>>,
        identity: usize,
        inverse: Vec<usize>,
    ) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if table.iter().any(|row| row.len() != n) || inverse.len() != n || identity >= n {
            return Err(GroupError::Shape(n));
        }
        #[allow(clippy::needless_range_loop)] // row and column are both indices here
        for row in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for col in 0..n {
                let (r, c) = (table[row][col], table[col][row]);
                if r >= n || c >= n || seen_row[r] || seen_col[c] {
                    return Err(GroupError::LatinSquare { row, col });
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::Associativity(a, b, c));
                    }
                }
            }
        }
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return Err(GroupError::Identity(a));
            }
            let inv = inverse[a];
            if inv >= n || table[a][inv] != identity || table[inv][a] != identity {
                return Err(GroupError::Inverse(a));
            }
        }
        Ok(GroupTable {
            order: n,
            table,
            identity,
            inverse,
        })
    }

    /// The cyclic group of order `n` (addition mod `n`).
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        let inverse = (0..n).map(|a| (n - a) % n).collect();
        GroupTable::new(table, 0, inverse).expect("cyclic group of positive order")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }
}

/// Complex algebra of a group: atoms are group elements, `a ; b = {ab}`,
/// converse is inversion and the identity atom is the group identity.
///
/// The identity atom is named `e`; the others `g1`, `g2`, ... by index.
pub fn group_complex_algebra(group: &GroupTable) -> Result<AtomStructure, crate::AlgebraError> {
    let n = group.order();
    let names = (0..n)
        .map(|i| {
            if i == group.identity() {
                "e".to_string()
            } else {
                format!("g{i}")
            }
        })
        .collect();
    let table = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| AtomSet::singleton(group.multiply(a, b)))
                .collect()
        })
        .collect();
    AtomStructure::new(
        format!("z{n}"),
        names,
        (0..n).map(|a| group.inverse(a)).collect(),
        AtomSet::singleton(group.identity()),
        table,
    )
}

/// Looks up a built-in algebra by name: `point`, `trivial`, or `zN` for the
/// cyclic group of order `N` (1 to 16).
pub fn by_name(name: &str) -> Option<AtomStructure> {
    match name {
        "point" => Some(point_algebra()),
        "trivial" => Some(one_atom()),
        _ => {
            let n: usize = name.strip_prefix('z')?.parse().ok()?;
            if (1..=crate::MAX_ATOMS).contains(&n) {
                group_complex_algebra(&GroupTable::cyclic(n)).ok()
            } else {
                None
            }
        }
    }
}

/// All completions of the Point Algebra table that fill the four entries
/// `l;l`, `l;g`, `g;l`, `g;g` (the `e` rows and columns are fixed by `e`
/// being the identity) with any of the 8 elements, pass every axiom group and
/// satisfy `1 = ≤;>`, `>;> = >`, `≤;≤ = ≤` and `> = -≤` for `≤ = e + l`, `> = g`.
pub fn point_algebra_completions() -> Vec<AtomStructure> {
    let (e, l, g) = (0, 1, 2);
    let atoms: Vec<String> = ["e", "l", "g"].map(String::from).to_vec();
    let mut out = Vec::new();
    for code in 0u32..8 * 8 * 8 * 8 {
        let entry = |k: u32| AtomSet::from_bits((code >> (3 * k)) & 7);
        let mut table = vec![vec![AtomSet::EMPTY; 3]; 3];
        for x in [e, l, g] {
            table[e][x] = AtomSet::singleton(x);
            table[x][e] = AtomSet::singleton(x);
        }
        table[l][l] = entry(0);
        table[l][g] = entry(1);
        table[g][l] = entry(2);
        table[g][g] = entry(3);
        let alg = AtomStructure::new(
            "point",
            atoms.clone(),
            vec![e, g, l],
            AtomSet::singleton(e),
            table,
        )
        .expect("well formed");
        let le = AtomSet::from_iter([e, l]);
        let gt = AtomSet::singleton(g);
        let quoted = alg.compose(le, gt) == alg.one()
            && alg.compose(gt, gt) == gt
            && alg.compose(le, le) == le
            && alg.negate(le) == gt;
        if quoted
            && crate::check_ra_axioms(&alg)
                .map(|r| r.passed())
                .unwrap_or(false)
        {
            out.push(alg);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check_ra_axioms;

    #[test]
    fn zoo_algebras_pass_all_axioms() {
        for alg in [point_algebra(), one_atom()]
            .into_iter()
            .chain((1..=5).map(|n| group_complex_algebra(&GroupTable::cyclic(n)).unwrap()))
        {
            let report = check_ra_axioms(&alg).unwrap();
            assert!(report.passed(), "{}: {report}", alg.name());
        }
    }

    #[test]
    fn point_algebra_has_eight_elements() {
        assert_eq!(point_algebra().element_count(), 8);
    }

    #[test]
    fn trivial_group_is_one_atom() {
        let z1 = group_complex_algebra(&GroupTable::cyclic(1)).unwrap();
        assert_eq!(z1.atom_count(), 1);
        assert_eq!(z1.atom_compose(0, 0), AtomSet::singleton(0));
        assert_eq!(z1.identity_atoms(), AtomSet::singleton(0));
    }

    #[test]
    fn invalid_groups_are_rejected() {
        // Not a Latin square.
        let err = GroupTable::new(vec![vec![0, 0], vec![0, 1]], 0, vec![0, 1]).unwrap_err();
        assert!(matches!(err, GroupError::LatinSquare { .. }));
        // Wrong inverse.
        let table = GroupTable::cyclic(3).table.clone();
        let err = GroupTable::new(table, 0, vec![0, 1, 2]).unwrap_err();
        assert_eq!(err, GroupError::Inverse(1));
        // Wrong identity.
        let table = GroupTable::cyclic(2).table.clone();
        assert_eq!(
            GroupTable::new(table, 1, vec![0, 1]).unwrap_err(),
            GroupError::Identity(0)
        );
        assert_eq!(
            GroupTable::new(vec![], 0, vec![]).unwrap_err(),
            GroupError::Empty
        );
    }

    #[test]
    fn non_associative_latin_square_is_rejected() {
        // A loop of order 5 that is not a group.
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = GroupTable::new(table, 0, vec![0, 1, 2, 3, 4]).unwrap_err();
        assert!(matches!(err, GroupError::Associativity(..)));
    }

    #[test]
    fn quoted_point_identities() {
        let pa = point_algebra();
        let le = pa.parse_element("e + l").unwrap();
        let gt = pa.parse_element("g").unwrap();
        assert_eq!(pa.compose(le, gt), pa.one());
        assert_eq!(pa.compose(gt, gt), gt);
        assert_eq!(pa.compose(le, le), le);
        assert_eq!(pa.negate(le), gt);
    }

    #[test]
    fn point_table_is_the_unique_completion() {
        assert_eq!(point_algebra_completions(), vec![point_algebra()]);
    }

    #[test]
    fn theta_on_cyclic_groups_is_cayley() {
        use crate::relation::Relation;
        use crate::representation::theta_construction;
        for n in 1..=6 {
            let group = GroupTable::cyclic(n);
            let alg = group_complex_algebra(&group).unwrap();
            let theta = theta_construction(&alg).unwrap();
            for a in 0..n {
                let img = theta.image(AtomSet::singleton(a));
                assert!(img.is_permutation());
                let cayley =
                    Relation::from_pairs(theta.base(), (0..n).map(|x| (x, group.multiply(x, a))))
                        .unwrap();
                assert_eq!(img, cayley);
            }
        }
        let z2 = theta_construction(&by_name("z2").unwrap()).unwrap();
        let swap = Relation::from_pairs(z2.base(), [(0, 1), (1, 0)]).unwrap();
        assert_eq!(z2.image(AtomSet::singleton(1)), swap);
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(by_name("point"), Some(point_algebra()));
        assert_eq!(by_name("z3").unwrap().atom_count(), 3);
        assert!(by_name("z0").is_none());
        assert!(by_name("monk").is_none());
    }
}
