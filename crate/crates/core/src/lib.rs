//! Renormalization of the inverse-square potential `g/r²` in the
//! medium-weak coupling window `-1/4 ≤ g ≤ 3/4`.
//!
//! The singular core is replaced inside a cutoff `R` by either a square well
//! or a δ shell whose strength `λ(R)` follows the renormalization-group flow
//! fixed by a self-adjoint-extension boundary condition `(c, r0)`. The crate
//! solves the resulting bound-state problem three ways: exactly through the
//! matching conditions, through the cutoff-free closed form, and by direct
//! Numerov integration of the radial equation.
//!
//! ```
//! use invsq::{closed_form_k, solve_bound_state_exact, Coupling, Cutoff, Extension, Scheme};
//!
//! let coupling = Coupling::from_g(0.0)?; // ν = 1/2: no long-range force at all
//! let ext = Extension::new(1.0, 1.0)?;
//! let closed = closed_form_k(&coupling, &ext)?.expect("c > 0 binds");
//! assert_eq!(closed.k, 1.0);
//!
//! let cutoff = Cutoff::from_ratio(1e-5, &ext)?;
//! let exact = solve_bound_state_exact(Scheme::DeltaShell, &coupling, &ext, &cutoff)?.unwrap();
//! assert!((exact.k - 1.0).abs() < 1e-4);
//! # Ok::<(), invsq::Error>(())
//! ```
//!
//! Units are `ħ = 2m = 1`, so `E = -k²`.

pub mod error;
pub mod flow;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod roots;
pub mod specfun;
pub mod spectrum;
pub mod wavefunction;

pub use error::{Error, Result};
pub use flow::{flow_delta_shell, flow_point, flow_rhs_square_well, flow_square_well, flow_trajectory, FlowPoint};
pub use model::{coupling_from_g, potential_value, Coupling, Cutoff, Extension, Scheme};
pub use oracle::{integrate_radial, shoot_bound_state, GridSpec, RadialSolution};
pub use specfun::Order;
pub use spectrum::{
    closed_form_k, convergence_study, lowenergy_lambda, residual_delta_shell, residual_square_well,
    solve_bound_state_exact, BoundState, Method,
};
pub use wavefunction::{PiecewiseWave, WaveKind};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/couplings.md")]
    mod couplings {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/bound-states.md")]
    mod bound_states {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/wavefunctions.md")]
    mod wavefunctions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
}
