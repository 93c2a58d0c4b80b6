use nalgebra::{DMatrix, SymmetricEigen};

/// Hankel matrix `(h(j + k + offset))_{j,k=0}^{order-1}`.
pub fn hankel<F: Fn(usize) -> f64>(order: usize, offset: usize, entry: F) -> DMatrix<f64> {
    DMatrix::from_fn(order, order, |j, k| entry(j + k + offset))
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = 0.5 * (m + m.transpose());
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Smallest eigenvalue; `+∞` for an empty matrix (vacuously positive definite).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

/// Determinant as the product of symmetric eigenvalues.
pub fn sym_det(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).iter().product()
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// PD threshold `τ = 1e-10 · max(1, ‖A‖_∞)`.
pub fn pd_threshold(m: &DMatrix<f64>) -> f64 {
    1e-10 * inf_norm(m).max(1.0)
}
