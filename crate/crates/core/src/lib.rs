//! Exact combinatorics for general-position sets in Kneser graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinatorics`]: k-subsets as bitmasks, binomials, colex ranking, families
//!   and the family file format.
//! * [`kneser`]: the Kneser graph `Kn(n,k)`: adjacency, BFS distances, the
//!   closed-form distance of the odd graph and the diameter-3 threshold.
//! * [`geodesy`]: general-position checks and exact `gp(G)` solvers for any
//!   connected graph.
//! * [`families`]: intersecting-family predicates, extremal constructions and
//!   cross-intersecting family systems.
//! * [`bollobas`]: exact-rational set-pair inequalities and the permutation
//!   double-counting oracle.
//! * [`theorems`]: desk-scale verification claims that emit JSON reports.

pub mod bollobas;
pub mod combinatorics;
pub mod error;
pub mod families;
pub mod geodesy;
pub mod kneser;
pub mod rng;
pub mod theorems;

pub use bollobas::{Rational, SetPairSystem};
pub use combinatorics::{binomial, choose, Family, FamilySystem, KSet, ProfileVector};
pub use error::{Error, Result};
pub use geodesy::{GpVerdict, GpWitness, SimpleGraph};
pub use kneser::{DistanceMatrix, KneserParams};
pub use theorems::{Status, VerificationReport};
