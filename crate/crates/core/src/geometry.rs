//! Chain geometry: sites, couplings, and the potential/prepotential pair.
//!
//! The N sites of the chain are `xi_i = (1/2) log zeta_i`, where `zeta_1 <
//! ... < zeta_N` are the zeros of the generalized Laguerre polynomial
//! `L_N^{alpha}` with `alpha = beta - 2N + 1`; they exist (all positive and
//! simple) exactly when `beta > 2(N-1)`.  The exchange couplings are
//!
//! ```text
//! h_ij = zeta_i zeta_j / (zeta_i - zeta_j)^2 = (1/4) sinh^-2(xi_i - xi_j).
//! ```
//!
//! Zeros are computed by the Golub-Welsch route (eigenvalues of the symmetric
//! Jacobi matrix of the recurrence) and then polished with Newton steps on the
//! polynomial itself.
//!
//! The same sites arise as the unique critical point of the scalar potential
//!
//! ```text
//! U(x) = beta^2 sum_i (e^{-2 x_i} - 1)^2 + sum_{i != j} sinh^-2(x_i - x_j),
//! ```
//!
//! which factorizes through the prepotential `W` as `U = |grad W|^2 + U0`
//! with `U0 = (2/3) N (N-1) (3 beta - 2N + 1)`.  `W` is strictly concave on
//! the ordered domain, so a damped Newton ascent converges to the sites from
//! any reasonable start.  `U` and `W` are written in a frame where the Morse
//! well sits at the origin; the chain Hamiltonian only sees site differences
//! and is invariant under the reflection `x_i -> c - x_{N+1-i}`, and with
//! `c = (1/2) log beta` that reflection maps the critical point of `W` onto
//! `xi_i = (1/2) log zeta_i`, the convention used everywhere in this crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{FiError, Result};
use crate::linalg::{cholesky_solve, symmetric_eigenvalues, tridiagonal_eigenvalues, SymMatrix};
use crate::rational::Rational;

const NEWTON_POLISH_MAX: usize = 50;
const ASCENT_MAX_ITER: usize = 200;
const ARMIJO_SLOPE: f64 = 1e-4;

fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Chain size and inverse-length parameter.  `beta` is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    n: usize,
    beta: Rational,
}

impl LatticeSpec {
    pub fn new(n: usize, beta: Rational) -> Result<Self> {
        if n == 0 {
            return Err(FiError::domain("chain size N must be at least 1"));
        }
        if beta <= Rational::zero() {
            return Err(FiError::domain("beta must be positive"));
        }
        Ok(LatticeSpec { n, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta.to_f64().expect("beta fits in f64")
    }

    /// Laguerre parameter `alpha = beta - 2N + 1`.
    pub fn alpha(&self) -> Rational {
        &self.beta - rat(2 * self.n as i64 - 1)
    }

    /// Sites exist iff `beta > 2(N-1)`, i.e. `alpha > -1`.
    pub fn supports_sites(&self) -> bool {
        self.beta > rat(2 * (self.n as i64 - 1))
    }

    pub fn require_sites(&self) -> Result<()> {
        if self.supports_sites() {
            Ok(())
        } else {
            Err(FiError::domain(format!(
                "no site configuration (no critical point of the potential): beta = {} <= 2(N-1) = {}",
                self.beta,
                2 * (self.n - 1)
            )))
        }
    }
}

/// Sites, Laguerre zeros and couplings for one chain.
#[derive(Debug, Clone)]
pub struct ChainGeometry {
    spec: LatticeSpec,
    zeta: Vec<f64>,
    xi: Vec<f64>,
    /// Row-major N x N coupling matrix `h_ij`, zero on the diagonal.
    h: Vec<f64>,
}

impl ChainGeometry {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.spec.n + j]
    }

    /// `sum_{i != j} h_ij` (both orders counted).
    pub fn coupling_sum(&self) -> f64 {
        self.h.iter().sum()
    }

    /// `sum_{i != j} h_ij^2` (both orders counted).
    pub fn coupling_square_sum(&self) -> f64 {
        self.h.iter().map(|v| v * v).sum()
    }
}

/// Value and derivative of `L_n^{alpha}` at `x > 0` by the three-term
/// recurrence; the derivative uses `x L' = n L_n - (n + alpha) L_{n-1}`.
pub fn laguerre_eval(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0f64; // L_0
    let mut curr = 1.0 + alpha - x; // L_1
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * curr - (kf + alpha) * prev) / (kf + 1.0);
        prev = curr;
        curr = next;
    }
    let deriv = (n as f64 * curr - (n as f64 + alpha) * prev) / x;
    (curr, deriv)
}

/// Zeros of `L_N^{alpha}` for the given spec, ascending.  Golub-Welsch
/// eigenvalues of the Jacobi matrix, polished by Newton iteration.
pub fn laguerre_zeros(spec: &LatticeSpec) -> Result<Vec<f64>> {
    spec.require_sites()?;
    let n = spec.n;
    let alpha = spec.alpha().to_f64().expect("alpha fits in f64");
    // Jacobi matrix of the monic recurrence: diagonal 2k+1+alpha,
    // off-diagonal sqrt(k (k + alpha)).
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0 + alpha).collect();
    let off: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect();
    let mut zeros = tridiagonal_eigenvalues(&diag, &off)?;
    for z in zeros.iter_mut() {
        for _ in 0..NEWTON_POLISH_MAX {
            let (p, dp) = laguerre_eval(n, alpha, *z);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            *z -= step;
            if step.abs() <= 4.0 * f64::EPSILON * z.abs() {
                break;
            }
        }
    }
    for i in 0..n {
        if !(zeros[i] > 0.0) || (i + 1 < n && !(zeros[i] < zeros[i + 1])) {
            return Err(FiError::verification(
                "polished Laguerre zeros are not positive, distinct and ordered",
            ));
        }
    }
    Ok(zeros)
}

/// Residual of the algebraic system satisfied by the Laguerre zeros:
/// `r_i = sum_{j != i} 2 zeta_i / (zeta_i - zeta_j) - zeta_i + beta - 2(N-1)`.
pub fn gradient_residual(zeta: &[f64], beta: f64) -> Vec<f64> {
    let n = zeta.len();
    (0..n)
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                if j != i {
                    s += 2.0 * zeta[i] / (zeta[i] - zeta[j]);
                }
            }
            s - zeta[i] + beta - 2.0 * (n as f64 - 1.0)
        })
        .collect()
}

/// Builds sites and couplings.  `h_ij = zeta_i zeta_j / (zeta_i - zeta_j)^2`.
pub fn build_geometry(spec: &LatticeSpec) -> Result<ChainGeometry> {
    let zeta = laguerre_zeros(spec)?;
    let n = spec.n;
    let xi: Vec<f64> = zeta.iter().map(|z| 0.5 * z.ln()).collect();
    let mut h = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = zeta[i] - zeta[j];
                h[i * n + j] = zeta[i] * zeta[j] / (d * d);
            }
        }
    }
    Ok(ChainGeometry { spec: spec.clone(), zeta, xi, h })
}

/// Potential, prepotential and its gradient at one configuration.
#[derive(Debug, Clone)]
pub struct PotentialData {
    pub u: f64,
    pub w: f64,
    pub grad_w: Vec<f64>,
}

/// Additive constant in `U = |grad W|^2 + U0`.
pub fn u0(spec: &LatticeSpec) -> Rational {
    let n = rat(spec.n as i64);
    let two_thirds = Rational::new(BigInt::from(2), BigInt::from(3));
    two_thirds * &n * (&n - Rational::one()) * (rat(3) * &spec.beta - rat(2) * &n + Rational::one())
}

fn require_ordered(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(FiError::domain(format!(
            "configuration has {} coordinates, expected {}",
            x.len(),
            n
        )));
    }
    for i in 1..x.len() {
        if !(x[i] > x[i - 1]) {
            return Err(FiError::domain(
                "coordinates must be strictly increasing (coincident sites are outside the domain)",
            ));
        }
    }
    Ok(())
}

/// Evaluates `U`, `W` and `grad W` at a strictly increasing configuration.
pub fn potential_and_prepotential(spec: &LatticeSpec, x: &[f64]) -> Result<PotentialData> {
    require_ordered(x, spec.n)?;
    let n = spec.n;
    let beta = spec.beta_f64();
    let mut u = 0.0f64;
    let mut w = 0.0f64;
    let mut grad = vec![n as f64 - beta - 1.0; n];
    for i in 0..n {
        let em = (-2.0 * x[i]).exp();
        u += beta * beta * (em - 1.0) * (em - 1.0);
        w += (n as f64 - beta - 1.0) * x[i] - 0.5 * beta * em;
        grad[i] += beta * em;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = x[i] - x[j];
            let sh = d.sinh();
            u += 2.0 / (sh * sh);
            w += sh.abs().ln();
            let ct = d.cosh() / sh;
            grad[i] += ct;
            grad[j] -= ct;
        }
    }
    Ok(PotentialData { u, w, grad_w: grad })
}

/// Closed-form Hessian of `W`: diagonal
/// `-(2 beta e^{-2 x_i} + sum_{j != i} sinh^-2(x_i - x_j))`, off-diagonal
/// `sinh^-2(x_i - x_k)`.  Negative definite on the ordered domain.
pub fn prepotential_hessian(spec: &LatticeSpec, x: &[f64]) -> Result<SymMatrix> {
    require_ordered(x, spec.n)?;
    let n = spec.n;
    let beta = spec.beta_f64();
    let mut hess = SymMatrix::zeros(n);
    for i in 0..n {
        *hess.at_mut(i, i) = -2.0 * beta * (-2.0 * x[i]).exp();
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let sh = (x[i] - x[j]).sinh();
                let inv = 1.0 / (sh * sh);
                *hess.at_mut(i, j) = inv;
                *hess.at_mut(i, i) -= inv;
            }
        }
    }
    Ok(hess)
}

/// Central finite-difference Hessian of `W` with step `1e-5 (1 + |x_i|)`,
/// used as an independent check of concavity.
pub fn prepotential_hessian_fd(spec: &LatticeSpec, x: &[f64]) -> Result<SymMatrix> {
    require_ordered(x, spec.n)?;
    let n = spec.n;
    let mut hess = SymMatrix::zeros(n);
    for k in 0..n {
        let step = 1e-5 * (1.0 + x[k].abs());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += step;
        xm[k] -= step;
        let gp = potential_and_prepotential(spec, &xp)?.grad_w;
        let gm = potential_and_prepotential(spec, &xm)?.grad_w;
        for i in 0..n {
            *hess.at_mut(i, k) = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    // Symmetrize away the O(step^2) asymmetry.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (hess.at(i, j) + hess.at(j, i));
            *hess.at_mut(i, j) = avg;
            *hess.at_mut(j, i) = avg;
        }
    }
    Ok(hess)
}

/// Reflection `x_i -> (1/2) log beta - x_{N+1-i}` between the Morse frame of
/// `W` and the site convention `xi_i = (1/2) log zeta_i`.  An involution.
fn reflect_frame(x: &[f64], beta: f64) -> Vec<f64> {
    let c = 0.5 * beta.ln();
    x.iter().rev().map(|v| c - v).collect()
}

fn w_or_neg_inf(spec: &LatticeSpec, x: &[f64]) -> f64 {
    match potential_and_prepotential(spec, x) {
        Ok(data) => data.w,
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Maximizes `W` (equivalently minimizes `U`) by damped Newton ascent and
/// returns the critical configuration in the site convention, where it equals
/// `xi` from [`build_geometry`] (checked to 1e-8; the maximum is unique
/// because `W` is strictly concave).  The start is sorted into the ordered
/// domain first; a disordered start is just a relabeling of the same
/// configuration because `W` is symmetric under coordinate exchange.
pub fn minimize_potential(spec: &LatticeSpec, start: &[f64]) -> Result<Vec<f64>> {
    spec.require_sites()?;
    if start.len() != spec.n {
        return Err(FiError::domain(format!(
            "start has {} coordinates, expected {}",
            start.len(),
            spec.n
        )));
    }
    let beta = spec.beta_f64();
    let mut sorted = start.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("start coordinates are finite"));
    // Work in the Morse frame of W.
    let mut y = reflect_frame(&sorted, beta);
    require_ordered(&y, spec.n)?;
    let tol = 1e-12 * (1.0 + beta);
    let mut converged = false;
    for _ in 0..ASCENT_MAX_ITER {
        let data = potential_and_prepotential(spec, &y)?;
        let grad_norm = data.grad_w.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_norm <= tol {
            converged = true;
            break;
        }
        let hess = prepotential_hessian(spec, &y)?;
        // Newton direction d solves (-H) d = grad W; -H is positive definite.
        let mut neg_h = hess;
        for v in neg_h.data.iter_mut() {
            *v = -*v;
        }
        let dir = cholesky_solve(&neg_h, &data.grad_w)?;
        let step_norm = dir.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if step_norm <= 1e-6 * scale {
            // Endgame: W improvements drop below floating-point noise, so a
            // line search can no longer resolve them.  Inside this basin the
            // undamped Newton step contracts the error quadratically and its
            // size bounds the distance to the critical point.
            for (yi, di) in y.iter_mut().zip(dir.iter()) {
                *yi += di;
            }
            if step_norm <= 1e-10 * scale {
                converged = true;
                break;
            }
            continue;
        }
        let slope: f64 = data.grad_w.iter().zip(dir.iter()).map(|(g, d)| g * d).sum();
        let mut t = 1.0f64;
        let mut stepped = false;
        while t >= 1e-12 {
            let trial: Vec<f64> = y.iter().zip(dir.iter()).map(|(yi, di)| yi + t * di).collect();
            if w_or_neg_inf(spec, &trial) >= data.w + ARMIJO_SLOPE * t * slope {
                y = trial;
                stepped = true;
                break;
            }
            t *= 0.5;
        }
        if !stepped {
            return Err(FiError::non_convergence(
                "line search stalled while ascending the prepotential",
            ));
        }
    }
    if !converged {
        return Err(FiError::non_convergence(format!(
            "prepotential ascent did not reach gradient tolerance in {ASCENT_MAX_ITER} iterations \
             (diverging configuration)"
        )));
    }
    let sites = reflect_frame(&y, beta);
    let xi = build_geometry(spec)?.xi().to_vec();
    let worst = sites
        .iter()
        .zip(xi.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if worst > 1e-8 {
        return Err(FiError::verification(format!(
            "potential minimizer deviates from the Laguerre sites by {worst:.3e}"
        )));
    }
    Ok(sites)
}

/// One evaluated sum rule.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub max_rel_err: f64,
}

fn closed_form_sums(spec: &LatticeSpec) -> [(&'static str, Rational); 7] {
    let n = rat(spec.n as i64);
    let b = spec.beta.clone();
    let one = Rational::one();
    let s1 = &n * (&b - &n + &one);
    let s2 = &n * &b * (&b - &n + &one);
    let s3 = &n
        * (&n * &n * &n - rat(2) * &n * &n * (&b + &one) + &n * (rat(3) * &b + &one)
            + &b * (&b * &b - &one));
    let s4 = &n
        * (&n - &b - &one)
        * (&n * &n * (rat(3) * &b - rat(2))
            - &n * (&b + &one) * (rat(3) * &b - rat(2))
            - &b * (&b - &one) * (&b - rat(2)));
    let r2 = &n / rat(12) * (&n - &one) * (rat(3) * &b - rat(4) * &n + rat(8));
    let r4 = &n / rat(720)
        * (&n - &one)
        * (rat(16) * &n * &n * &n + &n * &n * (rat(6) - rat(25) * &b)
            + &n * (rat(10) * &b * &b - rat(35) * &b - rat(454))
            + rat(25) * &b * &b
            + rat(350) * &b
            + rat(576));
    let hsum = &n / rat(12) * (&n - &one) * (rat(3) * &b - rat(4) * &n + rat(2));
    [
        ("sum zeta", s1),
        ("sum zeta^2", s2),
        ("sum zeta^3", s3),
        ("sum zeta^4", s4),
        ("weighted ratio power 2", r2),
        ("weighted ratio power 4", r4),
        ("coupling sum", hsum),
    ]
}

/// Evaluates the seven coupling sum rules against their closed forms.
pub fn coupling_identities(geom: &ChainGeometry) -> IdentityReport {
    let n = geom.n();
    let zeta = geom.zeta();
    let mut lhs = [0.0f64; 7];
    for i in 0..n {
        lhs[0] += zeta[i];
        lhs[1] += zeta[i] * zeta[i];
        lhs[2] += zeta[i] * zeta[i] * zeta[i];
        lhs[3] += zeta[i] * zeta[i] * zeta[i] * zeta[i];
        for j in 0..n {
            if i != j {
                let d = zeta[i] - zeta[j];
                let r = zeta[i] / d;
                let r2 = r * r;
                lhs[4] += r2;
                lhs[5] += r2 * r2;
            }
        }
    }
    lhs[6] = geom.coupling_sum();
    let forms = closed_form_sums(geom.spec());
    let mut checks = Vec::with_capacity(7);
    let mut max_rel = 0.0f64;
    for (slot, (name, exact)) in lhs.iter().zip(forms.into_iter()) {
        let rhs = exact.to_f64().expect("sum rule value fits in f64");
        let abs_err = (slot - rhs).abs();
        let rel_err = abs_err / rhs.abs().max(1.0);
        max_rel = max_rel.max(rel_err);
        checks.push(IdentityCheck { name, lhs: *slot, rhs, abs_err, rel_err });
    }
    IdentityReport { checks, max_rel_err: max_rel }
}

/// Finite-difference concavity check: all eigenvalues of the FD Hessian must
/// be below `-1e-12 * scale` with `scale` the largest matrix entry.
pub fn concavity_check(spec: &LatticeSpec, x: &[f64]) -> Result<bool> {
    let hess = prepotential_hessian_fd(spec, x)?;
    let scale = hess.max_abs().max(1.0);
    let eigs = symmetric_eigenvalues(hess)?;
    Ok(eigs.iter().all(|&lambda| lambda < -1e-12 * scale))
}
