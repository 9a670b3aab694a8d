//! Periodic pseudo-spectral solver for the three-parameter b-family
//!
//! ```text
//! u_t − u_txx + (b+c)uᵖu_x = b uᵖ⁻¹u_x u_xx + c uᵖu_xxx,   x ∈ [0,1) periodic,
//! ```
//!
//! with diagnostics that audit conserved quantities, sign preservation of
//! the momentum `m = u − u_xx`, slope and Sobolev-type bounds, the flow
//! identity along characteristics, and the unique-continuation identities.
//!
//! Module map:
//! - [`spectral`]: grid, Fourier differentiation, `Λ² = 1 − ∂x²` and two routes to `Λ⁻²`.
//! - [`equation`]: parameters and the right-hand sides of both formulations.
//! - [`integrator`]: RK4 stepping with a breakdown guard.
//! - [`characteristics`]: flow `γ_t = c uᵖ(t,γ)` and its Jacobian, integrated against stored frames.
//! - [`diagnostics`]: invariant reports, drift tables and the theorem checks.
//! - [`initdata`]: initial conditions in the classes the checks need.
//! - [`suites`]: the named verification bundles.

pub mod characteristics;
pub mod diagnostics;
pub mod equation;
pub mod initdata;
pub mod integrator;
pub mod spectral;
pub mod suites;
pub mod tolerances;

pub use equation::{Equation, Parameters, State};
pub use spectral::{Field, Grid, Spectral};
