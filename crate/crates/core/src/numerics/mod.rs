//! Numerical primitives: special functions, quadrature, root finding,
//! an explicit ODE pair and a tridiagonal solver.

pub mod ode;
pub mod quad;
pub mod roots;
pub mod special;
pub mod tridiag;

/// Formats a float with 17 significant digits, the precision used in every output file.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
