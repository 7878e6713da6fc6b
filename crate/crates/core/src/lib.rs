//! Monotonicity patterns and limits of ratio sequences `f/g` read off the
//! ratio of differences `Δf/Δg`.

pub mod error;
pub mod fuzz;
pub mod generator;
pub mod io;
pub mod limits;
pub mod logops;
pub mod patterns;
pub mod report;
pub mod seqcore;
pub mod tankex;

pub use error::{Error, Result, SignViolationKind};
pub use generator::{Generator, SequenceGenerator};
pub use patterns::{classify, verify_theorem, Pattern, PatternReport, Shape, TheoremVerification};
pub use report::IdentityReport;
pub use seqcore::{delta, ratio, rho, ComparisonPolicy, IntInterval, Mode, Scalar, Seq};
