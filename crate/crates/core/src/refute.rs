//! Constructive refutation of finite candidate maps for the Point Algebra
//! that claim to preserve complement and composition.
//!
//! The procedure follows the pumping argument: locate a pair in the image of
//! `1`, pump it along `1 = 1;1` until a point repeats, close the cycle into a
//! reflexive point, then grow a chain `x0 < x1 < ...` through `1 = ≤;>`.
//! A finite base cannot hold the chain, so some step must demand a witness the
//! map does not supply; that step is returned as a [`Violation`].
//!
//! All existential choices take the least point or pair, so traces are deterministic.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{AtomSet, AtomStructure};
use crate::representation::{apply_abstract, CandidateMap, Violation};
use crate::signature::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefuteError {
    #[error("algebra `{0}` does not satisfy the point-algebra identities")]
    NotPointAlgebra(String),
    #[error("point {0} is not reflexive in the image of 1")]
    NotReflexive(usize),
    #[error("point {0} outside the base")]
    PointOutOfBase(usize),
    #[error("pumping exhausted without a verdict (map is inconsistent with pigeonhole)")]
    Exhausted,
}

/// The elements of a Point Algebra the argument works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointRoles {
    pub zero: AtomSet,
    pub one: AtomSet,
    /// `≤`
    pub le: AtomSet,
    /// `>`, the complement of `≤`.
    pub gt: AtomSet,
}

impl PointRoles {
    /// Finds `≤` as `1' + a` for the least non-identity atom `a` satisfying
    /// `1 = ≤;>`, `1 = >;≤`, `>;> = >`, `≤;≤ = ≤`, `0 = 1;0` and `1 = 1;1`.
    pub fn find(alg: &AtomStructure) -> Result<Self, RefuteError> {
        let id = alg.identity_element();
        let (zero, one) = (alg.zero(), alg.one());
        let base_ok = alg.compose(one, zero) == zero && alg.compose(one, one) == one;
        (0..alg.atom_count())
            .filter(|&a| base_ok && !id.contains(a))
            .map(|a| {
                let le = id | AtomSet::singleton(a);
                PointRoles {
                    zero,
                    one,
                    le,
                    gt: alg.negate(le),
                }
            })
            .find(|r| {
                !r.gt.is_empty()
                    && alg.compose(r.le, r.gt) == one
                    && alg.compose(r.gt, r.le) == one
                    && alg.compose(r.gt, r.gt) == r.gt
                    && alg.compose(r.le, r.le) == r.le
            })
            .ok_or_else(|| RefuteError::NotPointAlgebra(alg.name().to_string()))
    }
}

/// A membership claim about the candidate map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fact {
    pub pair: (usize, usize),
    pub element: AtomSet,
    pub holds: bool,
}

impl Fact {
    pub fn reverify(&self, m: &CandidateMap) -> bool {
        m.image(self.element).contains(self.pair.0, self.pair.1) == self.holds
    }
}

/// Result of one stage: its product, or the violation that stopped it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step<T> {
    Found(T),
    Refuted(Violation),
}

impl<T> Step<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Step::Found(t) => Some(t),
            Step::Refuted(_) => None,
        }
    }

    pub fn violation(self) -> Option<Violation> {
        match self {
            Step::Found(_) => None,
            Step::Refuted(v) => Some(v),
        }
    }
}

/// Everything the refutation established, in order. Facts are listed once,
/// at their first use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PumpTrace {
    pub unit_pair: Option<(usize, usize)>,
    /// `y, x1, x2, ...` as pumped; the path closes at the unit pair's second point.
    pub path: Vec<usize>,
    /// Positions `i < j` in `path` holding the same point.
    pub repeat: Option<(usize, usize)>,
    pub reflexive_point: Option<usize>,
    pub chain: Vec<usize>,
    pub facts: Vec<Fact>,
    pub violation: Violation,
}

impl PumpTrace {
    /// True when every fact and the final violation re-evaluate against `m`.
    pub fn reverify(&self, m: &CandidateMap) -> bool {
        self.facts.iter().all(|f| f.reverify(m)) && self.violation.reverify(m)
    }

    /// Number of θ(1)-edges in the pumped path, including the closing edge.
    pub fn path_edges(&self) -> usize {
        self.path.len()
    }

    /// Numbered lines, one finding per line.
    pub fn render(&self, alg: &AtomStructure) -> Vec<String> {
        let mut lines = Vec::new();
        if let Some((x, y)) = self.unit_pair {
            lines.push(format!("unit pair ({x},{y}) in map(1)"));
        }
        for f in &self.facts {
            lines.push(format!(
                "fact ({},{}) {} map({})",
                f.pair.0,
                f.pair.1,
                if f.holds { "in" } else { "not in" },
                alg.format_element(f.element)
            ));
        }
        if !self.path.is_empty() {
            let pts: Vec<_> = self.path.iter().map(usize::to_string).collect();
            lines.push(format!("path {}", pts.join(" -> ")));
        }
        if let Some((i, j)) = self.repeat {
            lines.push(format!(
                "repeat at positions {i} and {j}: point {}",
                self.path[i]
            ));
        }
        if let Some(x) = self.reflexive_point {
            lines.push(format!("reflexive point {x}"));
        }
        if !self.chain.is_empty() {
            let pts: Vec<_> = self.chain.iter().map(usize::to_string).collect();
            lines.push(format!("chain {}", pts.join(" < ")));
        }
        lines.push(format!("violation {}", self.violation.describe(alg)));
        lines
            .iter()
            .enumerate()
            .map(|(i, l)| format!("{}. {l}", i + 1))
            .collect()
    }

    /// `key=value` lines.
    pub fn porcelain(&self, alg: &AtomStructure) -> Vec<String> {
        let mut lines = Vec::new();
        if let Some((x, y)) = self.unit_pair {
            lines.push(format!("unit-pair pair={x},{y}"));
        }
        for f in &self.facts {
            lines.push(format!(
                "fact pair={},{} element={} holds={}",
                f.pair.0,
                f.pair.1,
                alg.format_element(f.element).replace(' ', ""),
                f.holds
            ));
        }
        let join = |v: &[usize]| {
            let mut s = String::new();
            for (i, p) in v.iter().enumerate() {
                let _ = write!(s, "{}{p}", if i > 0 { "," } else { "" });
            }
            s
        };
        lines.push(format!("path points={}", join(&self.path)));
        if let Some(x) = self.reflexive_point {
            lines.push(format!("reflexive-point point={x}"));
        }
        lines.push(format!("chain points={}", join(&self.chain)));
        lines.push(self.violation.porcelain(alg));
        lines
    }
}

struct Pump<'m> {
    m: &'m CandidateMap,
    roles: PointRoles,
    facts: Vec<Fact>,
    unit_pair: Option<(usize, usize)>,
    path: Vec<usize>,
    repeat: Option<(usize, usize)>,
    reflexive_point: Option<usize>,
    chain: Vec<usize>,
}

impl<'m> Pump<'m> {
    fn new(m: &'m CandidateMap) -> Result<Self, RefuteError> {
        Ok(Pump {
            m,
            roles: PointRoles::find(m.algebra())?,
            facts: Vec::new(),
            unit_pair: None,
            path: Vec::new(),
            repeat: None,
            reflexive_point: None,
            chain: Vec::new(),
        })
    }

    fn has(&self, element: AtomSet, x: usize, y: usize) -> bool {
        self.m.image(element).contains(x, y)
    }

    fn fact(&mut self, element: AtomSet, x: usize, y: usize) {
        let fact = Fact {
            pair: (x, y),
            element,
            holds: self.has(element, x, y),
        };
        if !self.facts.contains(&fact) {
            self.facts.push(fact);
        }
    }

    fn violation(&self, symbol: Symbol, operands: Vec<AtomSet>, pair: (usize, usize)) -> Violation {
        let result = apply_abstract(self.m.algebra(), symbol, &operands).expect("arity");
        let imgs: Vec<_> = operands.iter().map(|&x| self.m.image(x)).collect();
        let proper = match symbol {
            Symbol::Neg => imgs[0].complement(),
            Symbol::Comp => imgs[0].compose(&imgs[1]).expect("shared base"),
            _ => unreachable!("refuter only cites - and ;"),
        };
        let v = Violation::Preservation {
            symbol,
            operands,
            result,
            pair,
            expected: self.m.image(result).contains(pair.0, pair.1),
            actual: proper.contains(pair.0, pair.1),
        };
        debug_assert!(
            v.reverify(self.m),
            "refuter produced a non-violation: {v:?}"
        );
        v
    }

    fn unit_pair(&mut self) -> Step<(usize, usize)> {
        let PointRoles { zero, one, .. } = self.roles;
        if let Some(p) = self.m.image(one).first_pair() {
            self.fact(one, p.0, p.1);
            self.unit_pair = Some(p);
            return Step::Found(p);
        }
        // The image of 1 is empty: either 0 = -1 is not its complement, or 0
        // holds a pair that 0 = 1;0 cannot reach.
        match self.m.image(zero).first_pair() {
            None => Step::Refuted(self.violation(Symbol::Neg, vec![one], (0, 0))),
            Some((x, z)) => {
                self.fact(zero, x, z);
                Step::Refuted(self.violation(Symbol::Comp, vec![one, zero], (x, z)))
            }
        }
    }

    fn reflexive_point(&mut self) -> Step<usize> {
        let (y, z) = match self.unit_pair() {
            Step::Found(p) => p,
            Step::Refuted(v) => return Step::Refuted(v),
        };
        let one = self.roles.one;
        let n = self.m.base().size();
        self.path.push(y);
        let mut cur = y;
        for step in 1..=n + 1 {
            let next = self
                .m
                .base()
                .points()
                .find(|&w| self.has(one, cur, w) && self.has(one, w, z));
            let Some(w) = next else {
                return Step::Refuted(self.violation(Symbol::Comp, vec![one, one], (cur, z)));
            };
            self.fact(one, cur, w);
            self.fact(one, w, z);
            self.path.push(w);
            if let Some(i) = (1..step).find(|&i| self.path[i] == w) {
                self.repeat = Some((i, step));
                return self.close_cycle(i, step);
            }
            cur = w;
        }
        Step::Refuted(self.violation(Symbol::Comp, vec![one, one], (cur, z)))
    }

    /// The path between positions `i` and `j` lies in the image of 1; since
    /// `1 = 1;1`, so does `(path[i], path[t])` for each `t` up to `j`.
    fn close_cycle(&mut self, i: usize, j: usize) -> Step<usize> {
        let one = self.roles.one;
        let x = self.path[i];
        for t in i + 2..=j {
            let (mid, to) = (self.path[t - 1], self.path[t]);
            if !self.has(one, x, to) {
                // (x, mid) and (mid, to) are both in the image of 1.
                return Step::Refuted(self.violation(Symbol::Comp, vec![one, one], (x, to)));
            }
            self.fact(one, x, to);
            let _ = mid;
        }
        self.reflexive_point = Some(x);
        Step::Found(x)
    }

    fn chain(&mut self, x0: usize, k: usize) -> Result<Step<Vec<usize>>, RefuteError> {
        let PointRoles { one, le, gt, .. } = self.roles;
        if x0 >= self.m.base().size() {
            return Err(RefuteError::PointOutOfBase(x0));
        }
        if !self.has(one, x0, x0) {
            return Err(RefuteError::NotReflexive(x0));
        }
        self.chain = vec![x0];
        for n in 0..k {
            let top = self.chain[n];
            if n > 0 {
                // (top, x0) in >, (x0, top) in ≤, and > ; ≤ = 1.
                if !self.has(one, top, top) {
                    return Ok(Step::Refuted(self.violation(
                        Symbol::Comp,
                        vec![gt, le],
                        (top, top),
                    )));
                }
                self.fact(one, top, top);
            }
            let next = self
                .m
                .base()
                .points()
                .find(|&y| self.has(le, top, y) && self.has(gt, y, top));
            let Some(y) = next else {
                return Ok(Step::Refuted(self.violation(
                    Symbol::Comp,
                    vec![le, gt],
                    (top, top),
                )));
            };
            self.fact(le, top, y);
            self.fact(gt, y, top);
            if self.chain.contains(&y) {
                // (y, top) is in both ≤ and > although > = -≤.
                return Ok(Step::Refuted(self.violation(
                    Symbol::Neg,
                    vec![le],
                    (y, top),
                )));
            }
            for i in 0..n {
                let xi = self.chain[i];
                if !self.has(le, xi, y) {
                    return Ok(Step::Refuted(self.violation(
                        Symbol::Comp,
                        vec![le, le],
                        (xi, y),
                    )));
                }
                self.fact(le, xi, y);
                if !self.has(gt, y, xi) {
                    return Ok(Step::Refuted(self.violation(
                        Symbol::Comp,
                        vec![gt, gt],
                        (y, xi),
                    )));
                }
                self.fact(gt, y, xi);
            }
            self.chain.push(y);
        }
        Ok(Step::Found(self.chain.clone()))
    }
}

/// A pair in the image of `1`, or the violation showing there can be none.
pub fn find_unit_pair(m: &CandidateMap) -> Result<Step<(usize, usize)>, RefuteError> {
    Ok(Pump::new(m)?.unit_pair())
}

/// A point `x` with `(x, x)` in the image of `1`, or the violation met while pumping.
pub fn find_reflexive_point(m: &CandidateMap) -> Result<Step<usize>, RefuteError> {
    Ok(Pump::new(m)?.reflexive_point())
}

/// Grows `x0, ..., xk` with `(xi, xj)` in the image of `≤` and `(xj, xi)` in
/// the image of `>` for `i < j`, all distinct, or returns the first violation.
pub fn build_increasing_chain(
    m: &CandidateMap,
    x0: usize,
    k: usize,
) -> Result<Step<Vec<usize>>, RefuteError> {
    Pump::new(m)?.chain(x0, k)
}

/// Runs the whole argument with a chain target of `|X|` steps, which needs
/// `|X| + 1` distinct points. Always ends in a violation of `-` or `;`.
pub fn refute_finite_candidate(m: &CandidateMap) -> Result<PumpTrace, RefuteError> {
    let mut pump = Pump::new(m)?;
    let violation = match pump.reflexive_point() {
        Step::Refuted(v) => v,
        Step::Found(x) => match pump.chain(x, m.base().size())? {
            Step::Refuted(v) => v,
            Step::Found(_) => return Err(RefuteError::Exhausted),
        },
    };
    Ok(PumpTrace {
        unit_pair: pump.unit_pair,
        path: pump.path,
        repeat: pump.repeat,
        reflexive_point: pump.reflexive_point,
        chain: pump.chain,
        facts: pump.facts,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{FiniteBase, Relation};
    use crate::representation::theta_construction;
    use crate::zoo;

    /// Each Point Algebra element mapped to its usual relation on `0..n`.
    pub(crate) fn natural_order(n: usize) -> CandidateMap {
        let pa = zoo::point_algebra();
        let b = FiniteBase::new(n).unwrap();
        let (e, l, g) = (0, 1, 2);
        CandidateMap::from_fn(pa, b, |x| {
            Relation::from_pairs(
                b,
                b.pairs().filter(|&(p, q)| {
                    (x.contains(e) && p == q)
                        || (x.contains(l) && p < q)
                        || (x.contains(g) && p > q)
                }),
            )
            .unwrap()
        })
        .unwrap()
    }

    fn with_one_and_zero(n: usize, one: Relation, zero: Relation) -> CandidateMap {
        let pa = zoo::point_algebra();
        let b = FiniteBase::new(n).unwrap();
        let base = natural_order(n);
        CandidateMap::from_fn(pa.clone(), b, |x| {
            if x == pa.one() {
                one
            } else if x.is_empty() {
                zero
            } else {
                base.image(x)
            }
        })
        .unwrap()
    }

    fn comp_violation_operands(v: &Violation) -> Option<(Symbol, Vec<AtomSet>)> {
        match v {
            Violation::Preservation {
                symbol, operands, ..
            } => Some((*symbol, operands.clone())),
            _ => None,
        }
    }

    #[test]
    fn roles_on_point_algebra() {
        let pa = zoo::point_algebra();
        let r = PointRoles::find(&pa).unwrap();
        assert_eq!(r.le, pa.parse_element("e + l").unwrap());
        assert_eq!(r.gt, pa.parse_element("g").unwrap());
        let z3 = zoo::group_complex_algebra(&zoo::GroupTable::cyclic(3)).unwrap();
        assert!(matches!(
            PointRoles::find(&z3),
            Err(RefuteError::NotPointAlgebra(_))
        ));
    }

    #[test]
    fn unit_pair_examples() {
        assert_eq!(
            find_unit_pair(&natural_order(3)).unwrap(),
            Step::Found((0, 0))
        );

        let b = FiniteBase::new(2).unwrap();
        let pa = zoo::point_algebra();
        let m = with_one_and_zero(2, Relation::empty(b), Relation::full(b));
        let v = find_unit_pair(&m).unwrap().violation().unwrap();
        assert_eq!(
            comp_violation_operands(&v),
            Some((Symbol::Comp, vec![pa.one(), pa.zero()]))
        );
        assert!(v.reverify(&m));

        let m = with_one_and_zero(2, Relation::empty(b), Relation::empty(b));
        let v = find_unit_pair(&m).unwrap().violation().unwrap();
        assert_eq!(
            comp_violation_operands(&v),
            Some((Symbol::Neg, vec![pa.one()]))
        );
        assert!(v.reverify(&m));
    }

    #[test]
    fn reflexive_point_examples() {
        assert_eq!(
            find_reflexive_point(&natural_order(3)).unwrap(),
            Step::Found(0)
        );

        let pa = zoo::point_algebra();
        let b = FiniteBase::new(2).unwrap();
        let single = Relation::from_pairs(b, [(0, 1)]).unwrap();
        let m = with_one_and_zero(2, single, single.complement());
        let v = find_reflexive_point(&m).unwrap().violation().unwrap();
        assert_eq!(
            comp_violation_operands(&v),
            Some((Symbol::Comp, vec![pa.one(), pa.one()]))
        );
        assert!(v.reverify(&m));

        let swap = Relation::from_pairs(b, [(0, 1), (1, 0)]).unwrap();
        let m = with_one_and_zero(2, swap, swap.complement());
        let v = find_reflexive_point(&m).unwrap().violation().unwrap();
        assert_eq!(
            comp_violation_operands(&v),
            Some((Symbol::Comp, vec![pa.one(), pa.one()]))
        );
        assert!(v.reverify(&m));
    }

    #[test]
    fn chain_examples() {
        let m = natural_order(3);
        let pa = m.algebra().clone();
        let le = pa.parse_element("e + l").unwrap();
        let gt = pa.parse_element("g").unwrap();
        let v = build_increasing_chain(&m, 0, 3)
            .unwrap()
            .violation()
            .unwrap();
        assert_eq!(
            v,
            Violation::Preservation {
                symbol: Symbol::Comp,
                operands: vec![le, gt],
                result: pa.one(),
                pair: (2, 2),
                expected: true,
                actual: false,
            }
        );
        assert_eq!(
            build_increasing_chain(&m, 0, 2).unwrap(),
            Step::Found(vec![0, 1, 2])
        );
        assert_eq!(
            build_increasing_chain(&m, 1, 0).unwrap(),
            Step::Found(vec![1])
        );
    }

    #[test]
    fn chain_requires_reflexive_start() {
        let b = FiniteBase::new(2).unwrap();
        let single = Relation::from_pairs(b, [(0, 1)]).unwrap();
        let m = with_one_and_zero(2, single, single.complement());
        assert_eq!(
            build_increasing_chain(&m, 0, 1).unwrap_err(),
            RefuteError::NotReflexive(0)
        );
        assert_eq!(
            build_increasing_chain(&m, 5, 1).unwrap_err(),
            RefuteError::PointOutOfBase(5)
        );
    }

    #[test]
    fn natural_order_refuted_at_top_of_chain() {
        for n in 1..=6 {
            let m = natural_order(n);
            let trace = refute_finite_candidate(&m).unwrap();
            assert!(trace.reverify(&m));
            assert_eq!(trace.chain, (0..n).collect::<Vec<_>>());
            assert!(matches!(
                trace.violation,
                Violation::Preservation { symbol: Symbol::Comp, pair, .. } if pair == (n - 1, n - 1)
            ));
        }
    }

    #[test]
    fn everything_full_is_refuted_by_complement() {
        let pa = zoo::point_algebra();
        let b = FiniteBase::new(3).unwrap();
        let m = CandidateMap::from_fn(pa, b, |_| Relation::full(b)).unwrap();
        let trace = refute_finite_candidate(&m).unwrap();
        assert!(matches!(
            trace.violation,
            Violation::Preservation {
                symbol: Symbol::Neg,
                ..
            }
        ));
        assert!(trace.reverify(&m));
    }

    #[test]
    fn theta_is_refuted_through_complement() {
        let theta = theta_construction(&zoo::point_algebra()).unwrap();
        let trace = refute_finite_candidate(&theta).unwrap();
        assert!(trace.reverify(&theta));
        assert!(matches!(
            trace.violation,
            Violation::Preservation {
                symbol: Symbol::Neg,
                pair: (1, 1),
                ..
            }
        ));
    }

    #[test]
    fn rendering_is_numbered() {
        let m = natural_order(2);
        let trace = refute_finite_candidate(&m).unwrap();
        let lines = trace.render(m.algebra());
        assert!(lines[0].starts_with("1. unit pair"));
        assert!(lines.last().unwrap().contains("violation"));
        for (i, l) in lines.iter().enumerate() {
            assert!(l.starts_with(&format!("{}. ", i + 1)));
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(300))]

        /// Any map at all is refuted, every fact holds, and the pumped path
        /// stays within `|X| + 2` edges.
        #[test]
        fn every_map_is_refuted(n in 1usize..=6, codes in proptest::collection::vec(proptest::prelude::any::<u64>(), 8)) {
            let pa = zoo::point_algebra();
            let b = FiniteBase::new(n).unwrap();
            let mask = (1u64 << (n * n)) - 1;
            let m = CandidateMap::from_fn(pa, b, |x| Relation::from_code(b, (codes[x.bits() as usize] & mask) as u128)).unwrap();
            let trace = refute_finite_candidate(&m).unwrap();
            proptest::prop_assert!(trace.reverify(&m));
            proptest::prop_assert!(trace.path_edges() <= n + 2);
        }
    }
}
