//! Small dense solvers for the surrogate estimators: weighted least
//! squares, equality-constrained weighted least squares, and lasso via
//! cyclic coordinate descent. Designs here are tiny (tens of rows, at most
//! 30 columns), so everything uses normal equations and direct
//! factorizations rather than a linear-algebra dependency.

use crate::game::CoalitionMask;
use thiserror::Error;

/// Default coordinate-descent stopping tolerance (max coefficient change
/// per sweep, standardized scale).
pub const LASSO_DEFAULT_TOL: f64 = 1e-8;
/// Default coordinate-descent sweep limit.
pub const LASSO_DEFAULT_MAX_ITER: u32 = 10_000;
/// Normal-equation condition numbers above this trigger a logged warning.
pub const CONDITION_WARN_ABOVE: f64 = 1e10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressError {
    #[error("singular design; dependent columns {columns:?}")]
    Singular { columns: Vec<usize> },
    #[error("invalid design: {0}")]
    Invalid(String),
}

/// A regression design over coalition-membership indicators: `m` rows of
/// `n` binary entries, one target and one positive weight per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    m: usize,
    n: usize,
    x: Vec<f64>, // row-major m x n
    y: Vec<f64>,
    w: Vec<f64>,
}

impl DesignMatrix {
    /// Build a design from explicit rows. Weights default to 1.
    pub fn new(
        rows: Vec<Vec<f64>>,
        targets: Vec<f64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self, RegressError> {
        let m = rows.len();
        if m == 0 {
            return Err(RegressError::Invalid("design has no rows".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(RegressError::Invalid("design has no columns".into()));
        }
        if targets.len() != m {
            return Err(RegressError::Invalid(format!(
                "{} targets for {} rows",
                targets.len(),
                m
            )));
        }
        let w = weights.unwrap_or_else(|| vec![1.0; m]);
        if w.len() != m {
            return Err(RegressError::Invalid(format!(
                "{} weights for {} rows",
                w.len(),
                m
            )));
        }
        let mut x = Vec::with_capacity(m * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(RegressError::Invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if v != 0.0 && v != 1.0 {
                    return Err(RegressError::Invalid(format!(
                        "row {i} holds non-indicator entry {v}"
                    )));
                }
                x.push(v);
            }
        }
        for (i, &t) in targets.iter().enumerate() {
            if !t.is_finite() {
                return Err(RegressError::Invalid(format!("target {i} is {t}")));
            }
        }
        for (i, &wi) in w.iter().enumerate() {
            if !(wi.is_finite() && wi > 0.0) {
                return Err(RegressError::Invalid(format!("weight {i} is {wi}")));
            }
        }
        Ok(Self { m, n, x, y: targets, w })
    }

    /// Build indicator rows from coalition masks.
    pub fn from_coalitions(
        masks: &[CoalitionMask],
        targets: Vec<f64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self, RegressError> {
        let rows = masks
            .iter()
            .map(|mask| {
                (0..mask.n())
                    .map(|j| if mask.contains(j) { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        Self::new(rows, targets, weights)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.n + j]
    }

    pub fn targets(&self) -> &[f64] {
        &self.y
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// Weighted least-squares solution.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsFit {
    pub coefficients: Vec<f64>,
    /// Zero when the intercept was suppressed.
    pub intercept: f64,
    /// Condition number of the normal equations (eigenvalue ratio).
    pub condition: f64,
}

/// Solve `min_beta sum_i w_i (y_i - [b0] - x_i . beta)^2` by normal
/// equations and Cholesky. Rank deficiency is reported with the set of
/// dependent design columns; ill conditioning past
/// [`CONDITION_WARN_ABOVE`] is logged.
pub fn solve_wls(design: &DesignMatrix, fit_intercept: bool) -> Result<WlsFit, RegressError> {
    let p = design.n + usize::from(fit_intercept);
    // Augmented column layout: intercept first (if any), then design columns,
    // so a constant design column is the one flagged as dependent.
    let col = |i: usize, j: usize| -> f64 {
        if fit_intercept {
            if j == 0 {
                1.0
            } else {
                design.entry(i, j - 1)
            }
        } else {
            design.entry(i, j)
        }
    };
    let mut a = vec![0.0; p * p];
    let mut b = vec![0.0; p];
    for i in 0..design.m {
        let wi = design.w[i];
        for j in 0..p {
            let xij = col(i, j);
            if xij == 0.0 {
                continue;
            }
            b[j] += wi * xij * design.y[i];
            for k in j..p {
                a[j * p + k] += wi * xij * col(i, k);
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            a[j * p + k] = a[k * p + j];
        }
    }

    let sol = cholesky_solve(&a, &b, p).map_err(|cols| RegressError::Singular {
        columns: cols
            .into_iter()
            .map(|c| if fit_intercept { c - 1 } else { c })
            .collect(),
    })?;

    let condition = condition_number(&a, p);
    if condition > CONDITION_WARN_ABOVE {
        log::warn!(
            "normal equations ill-conditioned (condition {condition:.3e} > {CONDITION_WARN_ABOVE:.0e}); \
             coefficients may be unstable"
        );
    }

    let (intercept, coefficients) = if fit_intercept {
        (sol[0], sol[1..].to_vec())
    } else {
        (0.0, sol)
    };
    Ok(WlsFit { coefficients, intercept, condition })
}

/// Solve weighted least squares subject to `sum_j beta_j = total`, by
/// substituting the last coefficient out of the problem. No intercept: the
/// caller is expected to have shifted targets to the model's baseline.
pub fn solve_constrained_wls(
    design: &DesignMatrix,
    total: f64,
) -> Result<Vec<f64>, RegressError> {
    constrained_impl(design, total)
}

/// Like [`solve_constrained_wls`] but never fails: when the system is
/// rank-deficient it returns the solution of minimum Euclidean norm (over
/// the full coefficient vector) among the constrained least-squares
/// optima.
pub fn solve_constrained_wls_min_norm(design: &DesignMatrix, total: f64) -> Vec<f64> {
    if let Ok(beta) = constrained_impl(design, total) {
        return beta;
    }
    let n = design.n;
    let nf = n as f64;
    // Parametrize beta = (total/n) 1 + P z with P = I - 11^T/n, which walks
    // the constraint's tangent space symmetrically; the pseudo-inverse
    // solution for z then has minimum norm, and because z lies in range(P)
    // and stays orthogonal to the constant offset, beta does too.
    let mut c = vec![0.0; n * n];
    let mut cv = vec![0.0; n];
    for i in 0..design.m {
        let wi = design.w[i];
        let row_sum: f64 = (0..n).map(|j| design.entry(i, j)).sum();
        let yi = design.y[i] - total / nf * row_sum;
        for j in 0..n {
            let xj = design.entry(i, j);
            if xj == 0.0 {
                continue;
            }
            cv[j] += wi * xj * yi;
            for k in 0..n {
                c[j * n + k] += wi * xj * design.entry(i, k);
            }
        }
    }
    let project = |v: &[f64]| -> Vec<f64> {
        let mean = v.iter().sum::<f64>() / nf;
        v.iter().map(|x| x - mean).collect()
    };
    // A = P C P, rhs = P cv.
    let mut pc = vec![0.0; n * n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| c[i * n + j]).collect();
        let pcol = project(&col);
        for i in 0..n {
            pc[i * n + j] = pcol[i];
        }
    }
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| pc[i * n + j]).collect();
        let prow = project(&row);
        for j in 0..n {
            a[i * n + j] = prow[j];
        }
    }
    let rhs = project(&cv);
    let z = solve_symmetric_min_norm(&a, &rhs, n);
    (0..n).map(|j| total / nf + z[j]).collect()
}

fn constrained_impl(design: &DesignMatrix, total: f64) -> Result<Vec<f64>, RegressError> {
    let n = design.n;
    if !total.is_finite() {
        return Err(RegressError::Invalid(format!("constraint total is {total}")));
    }
    if n == 1 {
        // The constraint pins the only coefficient.
        return Ok(vec![total]);
    }
    let p = n - 1;
    let last = n - 1;
    let mut a = vec![0.0; p * p];
    let mut b = vec![0.0; p];
    for i in 0..design.m {
        let wi = design.w[i];
        let xlast = design.entry(i, last);
        let yi = design.y[i] - total * xlast;
        for j in 0..p {
            let xj = design.entry(i, j) - xlast;
            if xj == 0.0 {
                continue;
            }
            b[j] += wi * xj * yi;
            for k in j..p {
                a[j * p + k] += wi * xj * (design.entry(i, k) - xlast);
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            a[j * p + k] = a[k * p + j];
        }
    }
    let head = cholesky_solve(&a, &b, p)
        .map_err(|columns| RegressError::Singular { columns })?;
    let mut beta = head;
    let sum: f64 = beta.iter().sum();
    beta.push(total - sum);
    Ok(beta)
}

/// Lasso solution from cyclic coordinate descent.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// False when the sweep limit was reached before the coefficient
    /// updates fell under the tolerance.
    pub converged: bool,
    pub sweeps: u32,
}

/// Minimize `(1/2m) sum_i w_i (y_i - b0 - x_i . beta)^2 + lambda * |beta|_1`
/// with the penalty applied on standardized columns. Columns are centered
/// and scaled internally; returned coefficients are on the original scale.
/// Zero-variance columns are dropped (coefficient stays zero).
pub fn solve_lasso(
    design: &DesignMatrix,
    lambda: f64,
    max_iter: u32,
    tol: f64,
) -> Result<LassoFit, RegressError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(RegressError::Invalid(format!("lambda is {lambda}")));
    }
    if max_iter == 0 || !(tol.is_finite() && tol > 0.0) {
        return Err(RegressError::Invalid(
            "max_iter must be positive and tol a positive finite number".into(),
        ));
    }
    let (m, n) = (design.m, design.n);
    let mf = m as f64;

    // Standardize columns; remember which ones carry any variance.
    let mut mean = vec![0.0; n];
    let mut scale = vec![1.0; n];
    let mut active = vec![true; n];
    let mut xs = vec![0.0; m * n]; // column-major
    for j in 0..n {
        let mu = (0..m).map(|i| design.entry(i, j)).sum::<f64>() / mf;
        let var = (0..m).map(|i| (design.entry(i, j) - mu).powi(2)).sum::<f64>() / mf;
        mean[j] = mu;
        if var < 1e-24 {
            active[j] = false; // constant column: coefficient pinned at zero
            continue;
        }
        scale[j] = var.sqrt();
        for i in 0..m {
            xs[j * m + i] = (design.entry(i, j) - mu) / scale[j];
        }
    }
    let wsum: f64 = design.w.iter().sum();
    let z: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| design.w[i] * xs[j * m + i].powi(2)).sum::<f64>() / mf)
        .collect();

    let mut beta = vec![0.0; n];
    let mut intercept = design.w.iter().zip(&design.y).map(|(w, y)| w * y).sum::<f64>() / wsum;
    let mut resid: Vec<f64> = design.y.iter().map(|y| y - intercept).collect();

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_iter {
        sweeps += 1;
        let mut delta: f64 = 0.0;
        for j in 0..n {
            if !active[j] || z[j] <= 0.0 {
                continue;
            }
            let xj = &xs[j * m..(j + 1) * m];
            let mut rho = 0.0;
            for i in 0..m {
                rho += design.w[i] * xj[i] * resid[i];
            }
            rho = rho / mf + z[j] * beta[j];
            let new = soft_threshold(rho, lambda) / z[j];
            if new != beta[j] {
                let diff = beta[j] - new;
                for i in 0..m {
                    resid[i] += xj[i] * diff;
                }
                delta = delta.max((new - beta[j]).abs());
                beta[j] = new;
            }
        }
        // Unpenalized intercept refresh.
        let adj = design.w.iter().zip(&resid).map(|(w, r)| w * r).sum::<f64>() / wsum;
        if adj != 0.0 {
            intercept += adj;
            for r in &mut resid {
                *r -= adj;
            }
            delta = delta.max(adj.abs());
        }
        if delta < tol {
            converged = true;
            break;
        }
    }

    // Back to the original column scale.
    let coefficients: Vec<f64> = (0..n)
        .map(|j| if active[j] { beta[j] / scale[j] } else { 0.0 })
        .collect();
    let intercept_orig = intercept
        - (0..n)
            .filter(|&j| active[j])
            .map(|j| beta[j] * mean[j] / scale[j])
            .sum::<f64>();
    Ok(LassoFit { coefficients, intercept: intercept_orig, converged, sweeps })
}

fn soft_threshold(rho: f64, lambda: f64) -> f64 {
    if rho > lambda {
        rho - lambda
    } else if rho < -lambda {
        rho + lambda
    } else {
        0.0
    }
}

/// Cholesky solve of a symmetric system, detecting dependent columns. On
/// deficiency the error carries the offending column indices.
fn cholesky_solve(a: &[f64], b: &[f64], p: usize) -> Result<Vec<f64>, Vec<usize>> {
    let mut l = vec![0.0; p * p];
    let mut dependent = Vec::new();
    let max_diag = (0..p).map(|j| a[j * p + j]).fold(0.0f64, f64::max);
    let tol = 1e-12 * max_diag.max(1e-300);
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= l[j * p + k] * l[j * p + k];
        }
        if d <= tol {
            dependent.push(j);
            continue;
        }
        let dj = d.sqrt();
        l[j * p + j] = dj;
        for i in j + 1..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            l[i * p + j] = s / dj;
        }
    }
    if !dependent.is_empty() {
        return Err(dependent);
    }
    // Forward then back substitution.
    let mut z = vec![0.0; p];
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * p + k] * z[k];
        }
        z[i] = s / l[i * p + i];
    }
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = z[i];
        for k in i + 1..p {
            s -= l[k * p + i] * x[k];
        }
        x[i] = s / l[i * p + i];
    }
    Ok(x)
}

/// Condition number of a symmetric PSD matrix via Jacobi eigenvalues.
fn condition_number(a: &[f64], p: usize) -> f64 {
    let (eigvals, _) = jacobi_eigen(a, p);
    let max = eigvals.iter().copied().fold(f64::MIN, f64::max);
    let min = eigvals.iter().copied().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Minimum-norm solution of a (possibly singular) symmetric system via the
/// Jacobi eigendecomposition pseudo-inverse.
fn solve_symmetric_min_norm(a: &[f64], b: &[f64], p: usize) -> Vec<f64> {
    let (eigvals, vecs) = jacobi_eigen(a, p);
    let lmax = eigvals.iter().copied().fold(0.0f64, f64::max);
    let cut = 1e-12 * lmax.max(1e-300);
    let mut x = vec![0.0; p];
    for k in 0..p {
        if eigvals[k] <= cut {
            continue;
        }
        let mut proj = 0.0;
        for i in 0..p {
            proj += vecs[i * p + k] * b[i];
        }
        let coef = proj / eigvals[k];
        for i in 0..p {
            x[i] += coef * vecs[i * p + k];
        }
    }
    x
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues and the eigenvector matrix (columns are eigenvectors).
fn jacobi_eigen(a_in: &[f64], p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a_in.to_vec();
    let mut v = vec![0.0; p * p];
    for i in 0..p {
        v[i * p + i] = 1.0;
    }
    let norm: f64 = a_in.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..p {
            for j in i + 1..p {
                off += a[i * p + j] * a[i * p + j];
            }
        }
        if off.sqrt() < 1e-15 * norm {
            break;
        }
        for i in 0..p {
            for j in i + 1..p {
                let apq = a[i * p + j];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[j * p + j] - a[i * p + i]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let aik = a[i * p + k];
                    let ajk = a[j * p + k];
                    a[i * p + k] = c * aik - s * ajk;
                    a[j * p + k] = s * aik + c * ajk;
                }
                for k in 0..p {
                    let aki = a[k * p + i];
                    let akj = a[k * p + j];
                    a[k * p + i] = c * aki - s * akj;
                    a[k * p + j] = s * aki + c * akj;
                }
                for k in 0..p {
                    let vki = v[k * p + i];
                    let vkj = v[k * p + j];
                    v[k * p + i] = c * vki - s * vkj;
                    v[k * p + j] = s * vki + c * vkj;
                }
            }
        }
    }
    let eigvals = (0..p).map(|i| a[i * p + i]).collect();
    (eigvals, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_design(seed: u64, m: usize, n: usize, weighted: bool) -> DesignMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| f64::from(u8::from(rng.gen_bool(0.5)))).collect())
            .collect();
        let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let w = weighted.then(|| (0..m).map(|_| rng.gen_range(0.2..3.0)).collect());
        DesignMatrix::new(rows, y, w).unwrap()
    }

    #[test]
    fn identity_design_recovers_targets_without_intercept() {
        let d = DesignMatrix::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![3.0, 5.0],
            None,
        )
        .unwrap();
        let fit = solve_wls(&d, false).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1], 5.0, epsilon = 1e-12);
        assert_eq!(fit.intercept, 0.0);
    }

    #[test]
    fn weighted_residuals_are_orthogonal_to_design() {
        let d = random_design(7, 40, 6, true);
        let fit = solve_wls(&d, true).unwrap();
        for j in 0..d.cols() {
            let mut dot = 0.0;
            let mut scale = 0.0;
            for i in 0..d.rows() {
                let pred = fit.intercept
                    + (0..d.cols()).map(|k| d.entry(i, k) * fit.coefficients[k]).sum::<f64>();
                dot += d.weights()[i] * d.entry(i, j) * (d.targets()[i] - pred);
                scale += d.weights()[i] * d.entry(i, j) * d.targets()[i].abs();
            }
            assert!(dot.abs() <= 1e-8 * scale.max(1.0), "column {j}: {dot}");
        }
    }

    #[test]
    fn duplicated_column_reported_as_singular() {
        // Column 2 duplicates column 0.
        let rows: Vec<Vec<f64>> = vec![
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ];
        let d = DesignMatrix::new(rows, vec![1.0, 2.0, 3.0, 0.5], None).unwrap();
        match solve_wls(&d, false) {
            Err(RegressError::Singular { columns }) => assert_eq!(columns, vec![2]),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn near_collinear_design_reports_huge_condition() {
        // Indicator entries cannot make two columns nearly parallel, but
        // row weights spanning eleven orders of magnitude (as extreme
        // size-weighting does) push the weighted normal equations right
        // past the warning threshold while staying positive definite.
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let d = DesignMatrix::new(
            rows,
            vec![0.4, 0.1, 0.5],
            Some(vec![1.0, 1e-11, 1e-11]),
        )
        .unwrap();
        let fit = solve_wls(&d, false).unwrap();
        assert!(fit.condition > CONDITION_WARN_ABOVE, "condition {}", fit.condition);
        assert!(fit.coefficients.iter().all(|c| c.is_finite()));
    }

    #[test]
    fn constrained_symmetric_design_splits_total_evenly() {
        let d = DesignMatrix::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![0.3, 0.3],
            None,
        )
        .unwrap();
        let beta = solve_constrained_wls(&d, 1.0).unwrap();
        assert_abs_diff_eq!(beta[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(beta[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn inactive_constraint_matches_unconstrained_solution() {
        let d = random_design(11, 50, 5, true);
        let free = solve_wls(&d, false).unwrap();
        let total: f64 = free.coefficients.iter().sum();
        let tied = solve_constrained_wls(&d, total).unwrap();
        for (a, b) in free.coefficients.iter().zip(&tied) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn single_column_constraint_pins_coefficient() {
        let d = DesignMatrix::new(vec![vec![1.0], vec![0.0]], vec![9.0, 0.0], None).unwrap();
        let beta = solve_constrained_wls(&d, 2.5).unwrap();
        assert_eq!(beta, vec![2.5]);
    }

    #[test]
    fn min_norm_splits_duplicate_columns_evenly() {
        // Columns 1 and 2 identical: ordinary solve fails, min-norm must
        // spread their shared effect equally (any imbalance has larger norm).
        let rows = vec![
            vec![1.0, 1.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![1.0, 1.0, 1.0],
        ];
        let y = vec![3.0, 2.0, 1.0, 0.0, 3.0];
        let d = DesignMatrix::new(rows, y, None).unwrap();
        assert!(solve_constrained_wls(&d, 3.0).is_err());
        let beta = solve_constrained_wls_min_norm(&d, 3.0);
        assert_abs_diff_eq!(beta.iter().sum::<f64>(), 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(beta[1], beta[2], epsilon = 1e-9);
    }

    /// Standardize a column the same way solve_lasso does; the lasso tests
    /// compute their expected values through this independent route.
    fn standardized(col: &[f64]) -> (Vec<f64>, f64) {
        let m = col.len() as f64;
        let mu = col.iter().sum::<f64>() / m;
        let sd = (col.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / m).sqrt();
        (col.iter().map(|v| (v - mu) / sd).collect(), sd)
    }

    #[test]
    fn univariate_lasso_matches_closed_form() {
        let x = vec![0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        let y = vec![0.1, 2.3, 1.9, -0.2, 2.6, 0.3, -0.1, 2.2];
        let m = x.len() as f64;
        let (xs, sd) = standardized(&x);
        let ybar = y.iter().sum::<f64>() / m;
        let rho: f64 = xs.iter().zip(&y).map(|(a, b)| a * (b - ybar)).sum::<f64>() / m;
        // Unit standardized variance: soft threshold is the whole story.
        for lambda in [0.0, 0.2, 0.5, 2.0 * rho.abs()] {
            let expect = rho.signum() * (rho.abs() - lambda).max(0.0) / sd;
            let d = DesignMatrix::new(x.iter().map(|&v| vec![v]).collect(), y.clone(), None)
                .unwrap();
            let fit = solve_lasso(&d, lambda, LASSO_DEFAULT_MAX_ITER, 1e-12).unwrap();
            assert!(fit.converged);
            assert_abs_diff_eq!(fit.coefficients[0], expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn lambda_at_shutoff_zeroes_every_coefficient() {
        let d = random_design(21, 30, 4, false);
        let m = d.rows() as f64;
        let ybar = d.targets().iter().sum::<f64>() / m;
        let lambda_max = (0..d.cols())
            .map(|j| {
                let col: Vec<f64> = (0..d.rows()).map(|i| d.entry(i, j)).collect();
                let (xs, _) = standardized(&col);
                (xs.iter()
                    .zip(d.targets())
                    .map(|(a, b)| a * (b - ybar))
                    .sum::<f64>()
                    / m)
                    .abs()
            })
            .fold(0.0f64, f64::max);
        let fit = solve_lasso(&d, lambda_max * 1.0000001, 1000, 1e-10).unwrap();
        assert!(fit.coefficients.iter().all(|&c| c == 0.0), "{:?}", fit.coefficients);
        assert_abs_diff_eq!(fit.intercept, ybar, epsilon = 1e-9);
    }

    #[test]
    fn zero_penalty_reproduces_least_squares() {
        let d = random_design(33, 60, 8, false);
        let wls = solve_wls(&d, true).unwrap();
        let lasso = solve_lasso(&d, 0.0, LASSO_DEFAULT_MAX_ITER, 1e-12).unwrap();
        for (a, b) in wls.coefficients.iter().zip(&lasso.coefficients) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(wls.intercept, lasso.intercept, epsilon = 1e-6);
    }

    #[test]
    fn constant_column_is_dropped_not_fatal() {
        let rows = vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 0.0]];
        let d = DesignMatrix::new(rows, vec![2.0, 1.0, 2.2, 0.8], None).unwrap();
        let fit = solve_lasso(&d, 0.01, 1000, 1e-10).unwrap();
        assert_eq!(fit.coefficients[0], 0.0);
        assert!(fit.coefficients[1].abs() > 0.1);
    }

    /// Objective the lasso minimizes, evaluated on the original scale fit
    /// but with the penalty taken on standardized coefficients.
    fn lasso_objective(d: &DesignMatrix, fit: &LassoFit, lambda: f64) -> f64 {
        let m = d.rows() as f64;
        let mut quad = 0.0;
        for i in 0..d.rows() {
            let pred = fit.intercept
                + (0..d.cols()).map(|j| d.entry(i, j) * fit.coefficients[j]).sum::<f64>();
            quad += d.weights()[i] * (d.targets()[i] - pred).powi(2);
        }
        let mut pen = 0.0;
        for j in 0..d.cols() {
            let col: Vec<f64> = (0..d.rows()).map(|i| d.entry(i, j)).collect();
            let (_, sd) = standardized(&col);
            if sd > 0.0 {
                pen += (fit.coefficients[j] * sd).abs();
            }
        }
        quad / (2.0 * m) + lambda * pen
    }

    #[test]
    fn objective_never_increases_with_more_sweeps() {
        let d = random_design(55, 40, 6, true);
        let lambda = 0.05;
        let mut prev = f64::INFINITY;
        for sweeps in 1..=10 {
            let fit = solve_lasso(&d, lambda, sweeps, 1e-16).unwrap();
            let obj = lasso_objective(&d, &fit, lambda);
            assert!(obj <= prev + 1e-12, "sweep {sweeps}: {obj} > {prev}");
            prev = obj;
        }
    }

    #[test]
    fn sweep_limit_reports_non_convergence() {
        let d = random_design(77, 50, 8, false);
        let fit = solve_lasso(&d, 1e-6, 1, 1e-14).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.sweeps, 1);
    }

    #[test]
    fn rejects_non_indicator_entries_and_bad_weights() {
        assert!(DesignMatrix::new(vec![vec![0.5]], vec![1.0], None).is_err());
        assert!(DesignMatrix::new(vec![vec![1.0]], vec![1.0], Some(vec![0.0])).is_err());
        assert!(DesignMatrix::new(vec![vec![1.0]], vec![f64::NAN], None).is_err());
        assert!(solve_lasso(
            &DesignMatrix::new(vec![vec![1.0], vec![0.0]], vec![1.0, 0.0], None).unwrap(),
            -0.1,
            10,
            1e-8,
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn constraint_residual_is_tiny(seed in 0u64..500, total in -5.0f64..5.0) {
            let d = random_design(seed, 25, 5, true);
            if let Ok(beta) = solve_constrained_wls(&d, total) {
                let sum: f64 = beta.iter().sum();
                prop_assert!((sum - total).abs() <= 1e-12 * total.abs().max(1.0));
            }
        }

        #[test]
        fn lasso_kkt_conditions_hold(seed in 0u64..200, lam_frac in 0.05f64..0.9) {
            let d = random_design(seed.wrapping_add(1000), 40, 6, false);
            let m = d.rows() as f64;
            let ybar = d.targets().iter().sum::<f64>() / m;
            let cols: Vec<(Vec<f64>, f64)> = (0..d.cols())
                .map(|j| standardized(&(0..d.rows()).map(|i| d.entry(i, j)).collect::<Vec<_>>()))
                .collect();
            let lambda_max = cols
                .iter()
                .map(|(xs, _)| {
                    (xs.iter().zip(d.targets()).map(|(a, b)| a * (b - ybar)).sum::<f64>() / m).abs()
                })
                .fold(0.0f64, f64::max);
            let lambda = lam_frac * lambda_max;
            let fit = solve_lasso(&d, lambda, LASSO_DEFAULT_MAX_ITER, 1e-10).unwrap();
            prop_assume!(fit.converged);
            // Residuals from the returned fit, gradients on standardized scale.
            let resid: Vec<f64> = (0..d.rows())
                .map(|i| {
                    d.targets()[i]
                        - fit.intercept
                        - (0..d.cols()).map(|j| d.entry(i, j) * fit.coefficients[j]).sum::<f64>()
                })
                .collect();
            for j in 0..d.cols() {
                let (xs, sd) = &cols[j];
                let grad = -xs.iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / m;
                let beta_std = fit.coefficients[j] * sd;
                if beta_std == 0.0 {
                    prop_assert!(grad.abs() <= lambda * (1.0 + 1e-6) + 1e-9,
                        "zero coef {j}: |{grad}| > {lambda}");
                } else {
                    prop_assert!((grad + beta_std.signum() * lambda).abs() <= 1e-6,
                        "active coef {j}: grad {grad}, lambda {lambda}");
                }
            }
        }
    }
}
