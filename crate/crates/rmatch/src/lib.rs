//! Restricted graph matchings: computation, classification and verification.
//!
//! A matching `M` of a graph `G` is a set of pairwise disjoint edges.  Beyond
//! ordinary matchings, this crate works with three restricted kinds, each
//! defined through the subgraph `G(M)` induced by the matched vertices:
//!
//! * **induced** — `G(M)` is 1-regular (no two matched edges are joined by an
//!   edge of `G`),
//! * **acyclic** — `G(M)` is a forest,
//! * **uniquely restricted** — `M` is the only perfect matching of `G(M)`.
//!
//! Every induced matching is acyclic, every acyclic matching is uniquely
//! restricted, and every matching of one kind stays that kind when edges are
//! removed (all three kinds are hereditary).  The associated maximum sizes
//! therefore form a chain
//! `nu(G) >= nu_ur(G) >= nu_ac(G) >= nu_s(G)`.
//!
//! The crate provides:
//!
//! * [`graph`] — a small immutable graph type with DIMACS-style text I/O,
//! * [`matching`] — classifiers for the four matching kinds, including two
//!   independent deciders for unique restriction,
//! * [`solve`] — exact branch-and-bound solvers for all four matching numbers,
//! * [`sat`] — CNF formulas, brute-force (exact-)satisfiability oracles,
//!   shape validators, instance generators and an exact-satisfiability
//!   normalizer,
//! * [`reduce`] — two CNF-to-graph constructions that tie satisfiability to
//!   equality of matching numbers, plus witness conversions in both
//!   directions,
//! * [`verify`] — a harness that replays the constructions' counting and
//!   equivalence claims on exhaustive and randomized instance corpora.

#![forbid(unsafe_code)]

pub mod graph;
pub mod matching;
pub mod reduce;
pub mod sat;
pub mod solve;
pub mod verify;

pub use graph::{Bipartition, Graph, GraphBuilder, GraphError, InducedSubgraph, VertexSet};
pub use matching::{
    classify, count_perfect_matchings, find_alternating_cycle, is_acyclic_matching,
    is_induced_matching, is_uniquely_restricted, is_uniquely_restricted_by_pm_count,
    AlternatingCycle, Classification, Matching, MatchingError, MatchingKind,
};
pub use reduce::{
    assignment_to_matching_t1, assignment_to_matching_t2, build_t1, build_t2,
    matching_to_assignment_t1, matching_to_assignment_t2, ReduceError, ReductionGraph, VertexRole,
};
pub use sat::{
    brute_force_sat, brute_force_xsat, normalize_xsat, random_t1_instance, random_x3sat_instance,
    validate_t1_shape, validate_t2_shape, Assignment, CnfFormula, GadgetBlock, Lit,
    NormalizeOutcome, NormalizeProvenance, NormalizeStrictness, SatError, ShapeReport,
    ShapeViolation, ORACLE_VARIABLE_LIMIT,
};
pub use solve::{
    equality_holds, max_matching_number, max_matching_number_with_limit, SolveError, SolveResult,
    DEFAULT_VERTEX_LIMIT, MAX_VERTEX_LIMIT,
};
pub use verify::{
    enumerate_source_form_instances, enumerate_t1_instances, enumerate_t2_instances,
    exactly_unsatisfiable_t2_example, run_corpus, unsatisfiable_t1_example, verify_lemma1,
    verify_lemma4, verify_theorem1, verify_theorem2, CheckKind, CheckResult, CorpusReport,
    CorpusSource, CorpusSpec, VerificationReport, VerifyError, DEFAULT_RANDOM_COUNT,
    DEFAULT_T1_EXHAUSTIVE, DEFAULT_T2_EXHAUSTIVE,
};
