//! Small dense linear-algebra kernels: symmetric eigenvalues and a Cholesky
//! solve.  Nothing here is generic; the inputs are the dense real symmetric
//! matrices produced elsewhere in the crate (Jacobi matrices of orthogonal
//! polynomials, spin Hamiltonians, prepotential Hessians).
//!
//! Eigenvalues are computed the classical way: Householder reduction to
//! tridiagonal form followed by the implicit-shift QL iteration, eigenvalues
//! only.  Accuracy is O(machine eps * ||A||), which is what the spectrum
//! matching tolerances assume.

use crate::error::{FiError, Result};

/// Maximum QL sweeps per eigenvalue; symmetric input converges in a handful.
const MAX_QL_SWEEPS: usize = 50;

/// Dense symmetric matrix in row-major storage.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|`; must be ~0 for the solvers.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.at(i, j) - self.at(j, i)).abs());
            }
        }
        worst
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix with diagonal `d` and
/// subdiagonal `e` (`e.len() == d.len() - 1`), ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if offdiag.len() + 1 != n {
        return Err(FiError::domain(format!(
            "tridiagonal shape mismatch: {} diagonal vs {} off-diagonal entries",
            n,
            offdiag.len()
        )));
    }
    let mut d = diag.to_vec();
    // Work array with the subdiagonal shifted down one slot, NR style.
    let mut e = vec![0.0f64; n];
    e[..(n - 1)].copy_from_slice(offdiag);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a single small subdiagonal element to split the matrix.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(FiError::non_convergence(format!(
                    "QL iteration exceeded {MAX_QL_SWEEPS} sweeps at index {l}"
                )));
            }
            // Implicit shift from the 2x2 block at l.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Deflate: the rotation chain collapsed early.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(d)
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// eigenvalues-only variant (no transform accumulation).  Returns `(d, e)`.
fn householder_tridiagonalize(a: &mut SymMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.n;
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0f64;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a.at(i, k).abs()).sum();
            if scale == 0.0 {
                e[i] = a.at(i, l);
            } else {
                for k in 0..=l {
                    *a.at_mut(i, k) /= scale;
                    h += a.at(i, k) * a.at(i, k);
                }
                let f = a.at(i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                *a.at_mut(i, l) = f - g;
                let mut f_acc = 0.0f64;
                for j in 0..=l {
                    let mut g_acc = 0.0f64;
                    for k in 0..=j {
                        g_acc += a.at(j, k) * a.at(i, k);
                    }
                    for k in (j + 1)..=l {
                        g_acc += a.at(k, j) * a.at(i, k);
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a.at(i, j);
                }
                let hh = f_acc / (2.0 * h);
                for j in 0..=l {
                    let f = a.at(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        *a.at_mut(j, k) -= f * e[k] + g * a.at(i, k);
                    }
                }
            }
        } else {
            e[i] = a.at(i, l);
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a.at(i, i);
    }
    e[0] = 0.0;
    // Shift the subdiagonal into the leading n-1 slots.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e.truncate(n.saturating_sub(1));
    (d, e)
}

/// Eigenvalues of a dense symmetric matrix, ascending.  Consumes the matrix
/// (the reduction works in place on the lower triangle).
pub fn symmetric_eigenvalues(mut a: SymMatrix) -> Result<Vec<f64>> {
    let n = a.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.data.len() != n * n {
        return Err(FiError::domain("matrix storage does not match dimension"));
    }
    if n == 1 {
        return Ok(vec![a.at(0, 0)]);
    }
    let (d, e) = householder_tridiagonalize(&mut a);
    tridiagonal_eigenvalues(&d, &e)
}

/// Solves `A x = b` for symmetric positive definite `A` via Cholesky.
/// Fails with `Domain` if a pivot is not strictly positive.
pub fn cholesky_solve(a: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n;
    if b.len() != n {
        return Err(FiError::domain("right-hand side length mismatch"));
    }
    // Lower-triangular factor, row major.
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.at(i, j);
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(FiError::domain(format!(
                        "matrix is not positive definite (pivot {sum:.3e} at {i})"
                    )));
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    // Forward then backward substitution.
    let mut y = vec![0.0f64; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    Ok(x)
}
