//! Exhaustive checking of the relation algebra axioms on a finite atom structure.

use std::fmt;

use crate::algebra::{AlgebraError, AtomSet, AtomStructure, MAX_ATOMS};

/// Element triples are enumerated exhaustively up to this many elements;
/// beyond it, triple laws are checked on atoms, which is exact because
/// composition is lifted additively from the atom table.
pub const TRIPLE_ELEMENT_LIMIT: usize = 64;

/// The five axiom groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomGroup {
    /// `{0, 1, -, +, ·}` is a Boolean algebra.
    Boolean,
    /// `;` and converse are additive over `+`.
    Additivity,
    /// `-(x⌣) = (-x)⌣` and `x;1 = 1 or (-x);1 = 1`.
    ComplementUnit,
    /// Converse laws, together with associativity and the identity law.
    ConverseMonoid,
    /// `x · (y;z) = 0  iff  y · (x;z⌣) = 0`.
    Peircean,
}

impl AxiomGroup {
    pub const ALL: [AxiomGroup; 5] = [
        AxiomGroup::Boolean,
        AxiomGroup::Additivity,
        AxiomGroup::ComplementUnit,
        AxiomGroup::ConverseMonoid,
        AxiomGroup::Peircean,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn label(self) -> &'static str {
        match self {
            AxiomGroup::Boolean => "boolean",
            AxiomGroup::Additivity => "additivity",
            AxiomGroup::ComplementUnit => "complement-unit",
            AxiomGroup::ConverseMonoid => "converse-monoid",
            AxiomGroup::Peircean => "peircean",
        }
    }
}

/// An individual law; each belongs to exactly one [`AxiomGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Law {
    /// `x + -x = 1` and `x · -x = 0`.
    Complement,
    /// `x · (y + z) = x·y + x·z`.
    Distributive,
    /// `-(x + y) = -x · -y`.
    DeMorgan,
    /// `(x + y);z = x;z + y;z`.
    ComposeAdditiveLeft,
    /// `x;(y + z) = x;y + x;z`.
    ComposeAdditiveRight,
    /// `(x + y)⌣ = x⌣ + y⌣`.
    ConverseAdditive,
    /// `-(x⌣) = (-x)⌣`.
    ConverseComplement,
    /// `x;1 = 1` or `(-x);1 = 1`.
    UnitCover,
    /// `(x;y)⌣ = y⌣;x⌣`.
    ConverseOfComposition,
    /// `x⌣⌣ = x`.
    ConverseInvolution,
    /// `1'⌣ = 1'`.
    IdentitySelfConverse,
    /// `(x;y);z = x;(y;z)`.
    Associativity,
    /// `1';x = x = x;1'`.
    IdentityLaw,
    /// `x · (y;z) = 0  iff  y · (x;z⌣) = 0`.
    Peircean,
}

impl Law {
    pub fn group(self) -> AxiomGroup {
        use Law::*;
        match self {
            Complement | Distributive | DeMorgan => AxiomGroup::Boolean,
            ComposeAdditiveLeft | ComposeAdditiveRight | ConverseAdditive => AxiomGroup::Additivity,
            ConverseComplement | UnitCover => AxiomGroup::ComplementUnit,
            ConverseOfComposition
            | ConverseInvolution
            | IdentitySelfConverse
            | Associativity
            | IdentityLaw => AxiomGroup::ConverseMonoid,
            Peircean => AxiomGroup::Peircean,
        }
    }

    pub fn arity(self) -> usize {
        use Law::*;
        match self {
            IdentitySelfConverse => 0,
            Complement | ConverseComplement | UnitCover | ConverseInvolution | IdentityLaw => 1,
            DeMorgan | ConverseAdditive | ConverseOfComposition => 2,
            _ => 3,
        }
    }

    pub fn label(self) -> &'static str {
        use Law::*;
        match self {
            Complement => "x + -x = 1, x . -x = 0",
            Distributive => "x . (y + z) = x . y + x . z",
            DeMorgan => "-(x + y) = -x . -y",
            ComposeAdditiveLeft => "(x + y) ; z = x ; z + y ; z",
            ComposeAdditiveRight => "x ; (y + z) = x ; y + x ; z",
            ConverseAdditive => "(x + y)~ = x~ + y~",
            ConverseComplement => "-(x~) = (-x)~",
            UnitCover => "x ; 1 = 1 or (-x) ; 1 = 1",
            ConverseOfComposition => "(x ; y)~ = y~ ; x~",
            ConverseInvolution => "x~~ = x",
            IdentitySelfConverse => "1'~ = 1'",
            Associativity => "(x ; y) ; z = x ; (y ; z)",
            IdentityLaw => "1' ; x = x = x ; 1'",
            Peircean => "x . (y ; z) = 0 iff y . (x ; z~) = 0",
        }
    }

    /// Whether the law holds on the given operands (unused operands ignored).
    pub fn holds(self, alg: &AtomStructure, [x, y, z]: [AtomSet; 3]) -> bool {
        use Law::*;
        match self {
            Complement => {
                alg.join(x, alg.negate(x)) == alg.one() && alg.meet(x, alg.negate(x)) == alg.zero()
            }
            Distributive => alg.meet(x, alg.join(y, z)) == alg.join(alg.meet(x, y), alg.meet(x, z)),
            DeMorgan => alg.negate(alg.join(x, y)) == alg.meet(alg.negate(x), alg.negate(y)),
            ComposeAdditiveLeft => {
                alg.compose(alg.join(x, y), z) == alg.join(alg.compose(x, z), alg.compose(y, z))
            }
            ComposeAdditiveRight => {
                alg.compose(x, alg.join(y, z)) == alg.join(alg.compose(x, y), alg.compose(x, z))
            }
            ConverseAdditive => {
                alg.converse_of(alg.join(x, y)) == alg.join(alg.converse_of(x), alg.converse_of(y))
            }
            ConverseComplement => alg.negate(alg.converse_of(x)) == alg.converse_of(alg.negate(x)),
            UnitCover => {
                alg.compose(x, alg.one()) == alg.one()
                    || alg.compose(alg.negate(x), alg.one()) == alg.one()
            }
            ConverseOfComposition => {
                alg.converse_of(alg.compose(x, y))
                    == alg.compose(alg.converse_of(y), alg.converse_of(x))
            }
            ConverseInvolution => alg.converse_of(alg.converse_of(x)) == x,
            IdentitySelfConverse => {
                alg.converse_of(alg.identity_element()) == alg.identity_element()
            }
            Associativity => alg.compose(alg.compose(x, y), z) == alg.compose(x, alg.compose(y, z)),
            IdentityLaw => {
                let id = alg.identity_element();
                alg.compose(id, x) == x && alg.compose(x, id) == x
            }
            Peircean => {
                alg.meet(x, alg.compose(y, z)).is_empty()
                    == alg.meet(y, alg.compose(x, alg.converse_of(z))).is_empty()
            }
        }
    }
}

/// Which operands a law was quantified over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckScope {
    /// Every element of the algebra.
    Elements,
    /// Atoms only; exact for laws preserved by the additive lifting.
    Atoms,
}

/// A failed law together with its lexicographically least witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomFailure {
    pub law: Law,
    pub witness: [AtomSet; 3],
}

impl AxiomFailure {
    /// Re-evaluates the law on the witness; true when the violation reproduces.
    pub fn reverify(&self, alg: &AtomStructure) -> bool {
        !self.law.holds(alg, self.witness)
    }

    pub fn describe(&self, alg: &AtomStructure) -> String {
        let names = ["x", "y", "z"];
        let operands: Vec<String> = (0..self.law.arity())
            .map(|i| format!("{}={}", names[i], alg.format_element(self.witness[i])))
            .collect();
        if operands.is_empty() {
            format!("{} fails", self.law.label())
        } else {
            format!("{} fails at {}", self.law.label(), operands.join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupVerdict {
    pub group: AxiomGroup,
    /// Scope used for the group's triple laws.
    pub scope: CheckScope,
    pub failure: Option<AxiomFailure>,
}

impl GroupVerdict {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub groups: Vec<GroupVerdict>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.groups.iter().all(GroupVerdict::passed)
    }

    pub fn first_failure(&self) -> Option<&GroupVerdict> {
        self.groups.iter().find(|g| !g.passed())
    }

    pub fn verdict(&self, group: AxiomGroup) -> &GroupVerdict {
        &self.groups[group as usize]
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.groups {
            let scope = match g.scope {
                CheckScope::Elements => "elements",
                CheckScope::Atoms => "atoms+additivity",
            };
            let verdict = if g.passed() { "pass" } else { "FAIL" };
            writeln!(
                f,
                "group {} {}: {} ({})",
                g.group.number(),
                g.group.label(),
                verdict,
                scope
            )?;
        }
        Ok(())
    }
}

pub fn check_ra_axioms(alg: &AtomStructure) -> Result<AxiomReport, AlgebraError> {
    check_ra_axioms_with_cap(alg, MAX_ATOMS)
}

/// Checks the five axiom groups, refusing algebras with more than `atom_cap` atoms.
pub fn check_ra_axioms_with_cap(
    alg: &AtomStructure,
    atom_cap: usize,
) -> Result<AxiomReport, AlgebraError> {
    if alg.atom_count() > atom_cap {
        return Err(AlgebraError::TooLargeForCheck {
            atoms: alg.atom_count(),
            cap: atom_cap,
        });
    }
    let all: Vec<AtomSet> = alg.elements().collect();
    let atoms: Vec<AtomSet> = (0..alg.atom_count()).map(AtomSet::singleton).collect();
    let (triples, scope): (&[AtomSet], _) = if all.len() <= TRIPLE_ELEMENT_LIMIT {
        (&all, CheckScope::Elements)
    } else {
        (&atoms, CheckScope::Atoms)
    };

    let laws_of = |group: AxiomGroup| -> Vec<Law> {
        use Law::*;
        match group {
            AxiomGroup::Boolean => vec![Complement, DeMorgan, Distributive],
            AxiomGroup::Additivity => {
                vec![ConverseAdditive, ComposeAdditiveLeft, ComposeAdditiveRight]
            }
            AxiomGroup::ComplementUnit => vec![ConverseComplement, UnitCover],
            AxiomGroup::ConverseMonoid => vec![
                IdentitySelfConverse,
                ConverseInvolution,
                IdentityLaw,
                ConverseOfComposition,
                Associativity,
            ],
            AxiomGroup::Peircean => vec![Peircean],
        }
    };

    let groups = AxiomGroup::ALL
        .iter()
        .map(|&group| {
            let failure = laws_of(group).into_iter().find_map(|law| {
                // Unary laws are cheap enough to run on every element.
                let domain = if law.arity() <= 1 { &all[..] } else { triples };
                first_failure(alg, law, domain)
            });
            GroupVerdict {
                group,
                scope,
                failure,
            }
        })
        .collect();
    Ok(AxiomReport { groups })
}

fn first_failure(alg: &AtomStructure, law: Law, domain: &[AtomSet]) -> Option<AxiomFailure> {
    let zero = AtomSet::EMPTY;
    let fail = |witness| (!law.holds(alg, witness)).then_some(AxiomFailure { law, witness });
    match law.arity() {
        0 => fail([zero; 3]),
        1 => domain.iter().find_map(|&x| fail([x, zero, zero])),
        2 => domain
            .iter()
            .find_map(|&x| domain.iter().find_map(|&y| fail([x, y, zero]))),
        _ => domain.iter().find_map(|&x| {
            domain
                .iter()
                .find_map(|&y| domain.iter().find_map(|&z| fail([x, y, z])))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn mutate(alg: &AtomStructure, a: usize, b: usize, value: AtomSet) -> AtomStructure {
        let n = alg.atom_count();
        let table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if (i, j) == (a, b) {
                            value
                        } else {
                            alg.atom_compose(i, j)
                        }
                    })
                    .collect()
            })
            .collect();
        AtomStructure::new(
            "mutant",
            alg.atom_names().to_vec(),
            (0..n).map(|i| alg.converse_atom(i)).collect(),
            alg.identity_atoms(),
            table,
        )
        .unwrap()
    }

    #[test]
    fn point_algebra_passes_every_group() {
        let report = check_ra_axioms(&zoo::point_algebra()).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report
            .groups
            .iter()
            .all(|g| g.scope == CheckScope::Elements));
    }

    #[test]
    fn one_atom_algebra_passes() {
        assert!(check_ra_axioms(&zoo::one_atom()).unwrap().passed());
    }

    #[test]
    fn mutated_gg_entry_fails_with_reverifiable_witness() {
        let pa = zoo::point_algebra();
        let (l, g) = (pa.atom_index("l").unwrap(), pa.atom_index("g").unwrap());
        let bad = mutate(&pa, g, g, AtomSet::singleton(l));
        let report = check_ra_axioms(&bad).unwrap();
        assert!(!report.passed());
        for verdict in report.groups.iter().filter(|v| !v.passed()) {
            assert!(verdict.failure.unwrap().reverify(&bad));
        }
        let failed: Vec<_> = report
            .groups
            .iter()
            .filter(|v| !v.passed())
            .map(|v| v.group)
            .collect();
        assert!(
            failed.contains(&AxiomGroup::Peircean) || failed.contains(&AxiomGroup::ConverseMonoid)
        );
    }

    #[test]
    fn every_single_entry_mutation_of_point_table_fails() {
        let pa = zoo::point_algebra();
        let mut count = 0;
        for a in 0..3 {
            for b in 0..3 {
                for bits in 0..8u32 {
                    let v = AtomSet::from_bits(bits);
                    if v == pa.atom_compose(a, b) {
                        continue;
                    }
                    let report = check_ra_axioms(&mutate(&pa, a, b, v)).unwrap();
                    let failure = report
                        .first_failure()
                        .expect("mutation passed")
                        .failure
                        .unwrap();
                    assert!(failure.reverify(&mutate(&pa, a, b, v)));
                    count += 1;
                }
            }
        }
        assert_eq!(count, 63);
    }

    #[test]
    fn witnesses_are_lexicographically_least() {
        // Breaking the identity law at e;e: least failing x is {e}.
        let pa = zoo::point_algebra();
        let bad = mutate(&pa, 0, 0, AtomSet::from_bits(0b011));
        let verdict = check_ra_axioms(&bad)
            .unwrap()
            .verdict(AxiomGroup::ConverseMonoid)
            .clone();
        let failure = verdict.failure.unwrap();
        for law in [Law::IdentitySelfConverse, Law::ConverseInvolution] {
            assert_ne!(failure.law, law);
        }
        if failure.law == Law::IdentityLaw {
            assert_eq!(failure.witness[0], AtomSet::from_bits(1));
        }
    }

    #[test]
    fn atom_scope_for_large_algebras() {
        let z8 = zoo::group_complex_algebra(&zoo::GroupTable::cyclic(8)).unwrap();
        let report = check_ra_axioms(&z8).unwrap();
        assert!(report.passed());
        assert!(report.groups.iter().all(|g| g.scope == CheckScope::Atoms));
    }

    #[test]
    fn cap_is_enforced() {
        let z3 = zoo::group_complex_algebra(&zoo::GroupTable::cyclic(3)).unwrap();
        let err = check_ra_axioms_with_cap(&z3, 2).unwrap_err();
        assert!(err.to_string().contains("too large for exhaustive check"));
    }
}
