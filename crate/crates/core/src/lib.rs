//! Hankel operators with anti-analytic symbols on weighted Bergman spaces
//! of simply connected domains, sharp norm bounds and torsional rigidity.
//!
//! Functions on the disk are truncated power series ([`PowerSeries`]);
//! domains are given by a univalent map `F: 𝔻 → Ω` ([`ConformalDomain`]).

pub mod bounds;
pub mod cli;
pub mod dirichlet;
pub mod domains;
pub mod eigen;
pub mod error;
pub mod hankel;
pub mod series;
pub mod spaces;
pub mod verify;

pub use bounds::{full_report, BoundReport};
pub use domains::{ConformalDomain, Symbol};
pub use error::{Error, Result};
pub use series::PowerSeries;
pub use spaces::{MonomialNorms, WeightParam};
