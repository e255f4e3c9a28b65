use nalgebra::DMatrix;

/// Orthonormal basis (as columns) of the span of the given columns, by
/// modified Gram–Schmidt with one reorthogonalisation pass. Columns whose
/// remainder falls below `rel_tol` times their original norm are dropped.
pub fn orthonormalize(columns: &[Vec<f64>], rel_tol: f64) -> DMatrix<f64> {
    let dim = columns.first().map_or(0, Vec::len);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for col in columns {
        let norm0 = norm(col);
        if norm0 == 0.0 {
            continue;
        }
        let mut v: Vec<f64> = col.iter().map(|x| x / norm0).collect();
        for _ in 0..2 {
            for b in &basis {
                let d = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let r = norm(&v);
        if r > rel_tol {
            v.iter_mut().for_each(|x| *x /= r);
            basis.push(v);
        }
    }
    DMatrix::from_fn(dim, basis.len(), |i, k| basis[k][i])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Sines of the principal angles between the column spans of two matrices
/// with orthonormal columns and equal rank, in decreasing order.
///
/// Computed from the singular values of `(I − UUᵀ)V` rather than through
/// `acos` of the cosines, which keeps tiny angles accurate.
pub fn principal_sines(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Vec<f64> {
    assert_eq!(u.nrows(), v.nrows(), "subspaces of different ambient spaces");
    let residual = v - u * (u.transpose() * v);
    let mut s: Vec<f64> = residual
        .svd(false, false)
        .singular_values
        .iter()
        .map(|x| x.min(1.0))
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Principal angles in radians, largest first.
pub fn principal_angles(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Vec<f64> {
    principal_sines(u, v).into_iter().map(f64::asin).collect()
}

/// Distance between two subspaces of the same dimension: the largest
/// principal angle. Subspaces of different dimension are at distance `π/2`.
pub fn subspace_distance(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    if u.ncols() != v.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    principal_angles(u, v).first().copied().unwrap_or(0.0)
}
