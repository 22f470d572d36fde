use crate::error::{Error, Result};

/// Solves a tridiagonal system by the Thomas algorithm.
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (so `lower[0]` is unused),
/// `upper[i]` multiplies `x[i+1]` (so `upper[n-1]` is unused).
pub fn solve(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n || out.len() != n {
        return Err(Error::InvalidParameter(
            "tridiagonal dimensions disagree".into(),
        ));
    }
    if n == 0 {
        return Ok(());
    }
    let mut c_prime = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::Solver("zero pivot in tridiagonal solve".into()));
    }
    c_prime[0] = upper[0] / pivot;
    out[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c_prime[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Solver(format!(
                "zero pivot in tridiagonal solve at row {i}"
            )));
        }
        c_prime[i] = upper[i] / pivot;
        out[i] = (rhs[i] - lower[i] * out[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        out[i] -= c_prime[i] * out[i + 1];
    }
    Ok(())
}
