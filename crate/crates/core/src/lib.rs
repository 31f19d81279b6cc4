//! Ensemble learning-based test generation.
//!
//! The pipeline: programs written in a small integer language ([`lang`]) are
//! probed with inputs drawn from declarative specifications ([`specgen`]).
//! Each iteration trains an ensemble ([`learners`]) on the suite so far and
//! keeps the candidate its members disagree on most ([`diversity`], [`engine`]).
//! Suites are graded by how many AST mutants they kill ([`mutation`]), and
//! [`experiment`] compares every ensemble combination against random testing.

pub mod corpus;
pub mod diversity;
pub mod engine;
pub mod experiment;
pub mod lang;
pub mod learners;
pub mod mutation;
pub mod rng;
pub mod specgen;
pub mod suite;
