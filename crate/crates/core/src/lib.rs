//! Shift register synthesis over skew polynomial rings `K[x; theta]`.
//!
//! Solves the multi-sequence generalised linear skew-feedback shift register
//! synthesis problem (MgLSSR): given `s_i`, `g_i` and weights `gamma`, find a
//! monic `lambda` of least degree and `omega_i` with
//! `lambda s_i = omega_i (mod g_i)` and
//! `deg lambda + gamma_0 > deg omega_i + gamma_i`.
//!
//! Two engines are provided: row reduction of a weighted module basis to weak
//! Popov form ([`solve_ms`]) and a demand-driven variant that only tracks the
//! first column ([`solve_dd`]). Every field operation is counted.

pub mod error;
pub mod ffield;
pub mod gabidulin;
pub mod gen;
pub mod io;
pub mod mglssr;
pub mod oracle;
pub mod skewmat;
pub mod skewpoly;

pub use error::{Error, Result};
pub use ffield::{Fe, Field, FieldParams, OpCounts};
pub use gabidulin::{DecodeOutcome, GabidulinCode};
pub use gen::Shape;
pub use io::{FieldDesc, InstanceFile, SolutionFile};
pub use mglssr::{solve_dd, solve_ms, verify_solution, Engine, ShiftRegisterProblem, SolveStats, SrSolution};
pub use oracle::{oracle_min_degree, oracle_min_degree_linear, OracleOutcome};
pub use skewmat::{SkewMatrix, SkewVector, TransformLog, TransformStep};
pub use skewpoly::{SkewPoly, SkewRing};

/// Solves with the chosen engine.
pub fn solve(problem: &ShiftRegisterProblem, engine: Engine) -> Result<SrSolution> {
    match engine {
        Engine::Ms => solve_ms(problem),
        Engine::Dd => solve_dd(problem),
    }
}
