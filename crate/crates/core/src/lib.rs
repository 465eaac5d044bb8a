//! Finite relation algebras given by atom structures, concrete relations over
//! finite bases, candidate representations and their checking, bounded
//! representation search, and a constructive refuter for finite
//! representations of the Point Algebra with complement and composition.

pub mod algebra;
pub mod axioms;
pub mod io;
pub mod refute;
pub mod relation;
pub mod representation;
pub mod search;
pub mod signature;
pub mod term;
pub mod zoo;

pub use algebra::{AlgebraError, AtomSet, AtomStructure, AtomStructureBuilder, Element, MAX_ATOMS};
pub use axioms::{check_ra_axioms, check_ra_axioms_with_cap, AxiomGroup, AxiomReport, Law};
pub use io::{IoError, LoadedRepresentation};
pub use refute::{refute_finite_candidate, PumpTrace, RefuteError};
pub use relation::{FiniteBase, ProperStructure, Relation, RelationError};
pub use representation::{
    check_representation, check_representation_with, theta_construction, CandidateMap,
    CheckOptions, RepresentationError, Violation,
};
pub use search::{
    frp_scan, search_representation, SearchConfig, SearchError, SearchOutcome, Verdict,
};
pub use signature::{Signature, Symbol};
pub use term::{eval_abstract, eval_proper, parse_term, Env, Term, TermError};
