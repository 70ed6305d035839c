//! Brute-force optimizers over pure maximally entangled and pure product
//! states, Haar sampling, and the generalized Chebyshev sum check.
//!
//! These are the independent reference for every closed-form bound in
//! [`crate::witness`]. Results are statistical, not certified: each restart
//! is a local search, and `spread` reports how much the restarts disagree.

use nalgebra::linalg::{SymmetricEigen, QR};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix, CVector, Side, STATE_TOL, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 32,
            max_iters: 500,
            step_tol: 1e-10,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 || self.step_tol.is_nan() || self.step_tol <= 0.0 {
            return Err(Error::Invalid(
                "restarts, max_iters and step_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Location of an extremum.
#[derive(Debug, Clone, PartialEq)]
pub enum Extremizer {
    /// Maximally entangled state `(1 (x) U)|Phi> / sqrt(d)`.
    Unitary(CMatrix),
    /// Product state `|a> (x) |b>`.
    Product { a: CVector, b: CVector },
}

impl Extremizer {
    pub fn state_vector(&self) -> CVector {
        match self {
            Extremizer::Unitary(u) => me_state(u),
            Extremizer::Product { a, b } => linalg::kron_vec(a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best_value: f64,
    pub worst_value: f64,
    pub argmax: Extremizer,
    pub argmin: Extremizer,
    /// max - min over the per-restart maxima.
    pub spread: f64,
    /// Largest final stationarity residual of the two returned extremizers.
    pub residual: f64,
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(d, &mut rng)
}

fn random_unitary_with(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re * s, im * s)
    });
    let qr = QR::new(g);
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_fn(d, d, |i, j| {
        if i != j {
            return ZERO;
        }
        let rii = r[(i, i)];
        if rii.norm() == 0.0 {
            cr(1.0)
        } else {
            rii / rii.norm()
        }
    });
    q * phases
}

/// Haar-random unit vector in `C^dim`.
pub fn random_vector(dim: usize, seed: u64) -> CVector {
    random_unitary(dim, seed).column(0).into_owned()
}

/// `(1 (x) U)|Phi> / sqrt(d)`.
pub fn me_state(u: &CMatrix) -> CVector {
    let d = u.nrows();
    linalg::operator_to_state(u, Side::Right).expect("square unitary") / cr((d as f64).sqrt())
}

fn check_observable(l: &CMatrix) -> Result<usize> {
    if !l.is_square() {
        return Err(Error::Dimension("observable must be square".into()));
    }
    let d = linalg::local_dim(l.nrows())?;
    linalg::check_hermitian(l, STATE_TOL)?;
    Ok(d)
}

/// Value `<psi|L|psi>` at `psi = (1 (x) U)|Phi>/sqrt(d)` and its Riemannian
/// gradient `G` for the curve `U exp(i t H)`: `d/dt f = tr(H G)`.
fn me_value_and_gradient(l: &CMatrix, u: &CMatrix) -> (f64, CMatrix) {
    let d = u.nrows();
    let psi = me_state(u);
    let lpsi = l * &psi;
    let value = psi.dotc(&lpsi).re;
    let x = linalg::state_to_operator(&lpsi).expect("d^2 vector");
    let k = x.adjoint() * u / cr((d as f64).sqrt());
    let grad = (&k - k.adjoint()) * c(0.0, 1.0);
    (value, grad)
}

fn me_value(l: &CMatrix, u: &CMatrix) -> f64 {
    linalg::expectation(l, &me_state(u))
}

struct LocalRun {
    value: f64,
    point: CMatrix,
    grad_norm: f64,
}

/// Orthonormal basis of `d x d` Hermitian matrices under the Frobenius product.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(j, j)] = cr(1.0);
        out.push(m);
        for k in j + 1..d {
            let mut re = CMatrix::zeros(d, d);
            re[(j, k)] = cr(s);
            re[(k, j)] = cr(s);
            out.push(re);
            let mut im = CMatrix::zeros(d, d);
            im[(j, k)] = c(0.0, -s);
            im[(k, j)] = c(0.0, s);
            out.push(im);
        }
    }
    out
}

/// Second derivatives of `f(U exp(i H))` at `H = 0` in the given basis.
fn me_hessian(l: &CMatrix, u: &CMatrix, basis: &[CMatrix]) -> DMatrix<f64> {
    let d = u.nrows();
    let psi = me_state(u);
    let x = linalg::state_to_operator(&(l * &psi)).expect("d^2 vector");
    let k = x.adjoint() * u / cr((d as f64).sqrt());
    let w: Vec<CVector> = basis
        .iter()
        .map(|h| linalg::operator_to_state(&(u * h), Side::Right).expect("square"))
        .collect();
    let lw: Vec<CVector> = w.iter().map(|v| l * v).collect();
    let n = basis.len();
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let anti = &basis[a] * &basis[b] + &basis[b] * &basis[a];
            let v = 2.0 / d as f64 * w[a].dotc(&lw[b]).re - (&k * anti).trace().re;
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    hess
}

/// Ascent of `sign * f` on the unitary group. Directions come from the
/// Newton model with curvature magnitudes `|lambda|` (so every direction
/// ascends), falling back to the gradient; steps are found by backtracking.
fn me_local_search(l: &CMatrix, start: CMatrix, sign: f64, cfg: &OptimizerConfig) -> LocalRun {
    let d = start.nrows();
    let basis = hermitian_basis(d);
    let mut u = start;
    let (mut value, mut grad) = me_value_and_gradient(l, &u);
    let mut step = 0.1;
    for _ in 0..cfg.max_iters {
        if grad.norm() < cfg.step_tol {
            break;
        }
        let g = DVector::from_iterator(basis.len(), basis.iter().map(|h| (h * &grad).trace().re));
        let eig = SymmetricEigen::new(me_hessian(l, &u, &basis));
        let floor = 1e-8 * eig.eigenvalues.amax().max(1e-300);
        let mut newton = DVector::<f64>::zeros(basis.len());
        for (k, lam) in eig.eigenvalues.iter().enumerate() {
            let q = eig.eigenvectors.column(k);
            newton += q * (sign * q.dot(&g) / lam.abs().max(floor));
        }
        let newton_dir = basis
            .iter()
            .zip(newton.iter())
            .fold(CMatrix::zeros(d, d), |acc, (h, &t)| acc + h * cr(t));
        let slope = sign * newton.dot(&g);

        let mut moved = false;
        let mut eps = 1.0;
        while eps > 1e-10 && slope > 0.0 {
            let trial = &u * linalg::expi_hermitian(&newton_dir, eps);
            let v = me_value(l, &trial);
            if sign * (v - value) >= 1e-4 * eps * slope {
                u = trial;
                moved = true;
                break;
            }
            eps *= 0.5;
        }
        if !moved {
            let g2 = grad.norm_squared();
            let mut eps = step;
            while eps > 1e-14 {
                let trial = &u * linalg::expi_hermitian(&grad, sign * eps);
                let v = me_value(l, &trial);
                if sign * (v - value) > 1e-4 * eps * g2 {
                    u = trial;
                    moved = true;
                    break;
                }
                eps *= 0.5;
            }
            step = (2.0 * eps).min(10.0);
        }
        if !moved {
            break;
        }
        let next = me_value_and_gradient(l, &u);
        value = next.0;
        grad = next.1;
    }
    LocalRun {
        value,
        grad_norm: grad.norm(),
        point: u,
    }
}

/// Max and min of `<psi|L|psi>` over pure maximally entangled states.
pub fn optimize_me(l: &CMatrix, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    let d = check_observable(l)?;
    let runs: Vec<(LocalRun, LocalRun)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let start = random_unitary(d, cfg.seed.wrapping_add(i as u64));
            let hi = me_local_search(l, start.clone(), 1.0, cfg);
            let lo = me_local_search(l, start, -1.0, cfg);
            (hi, lo)
        })
        .collect();
    let best = runs
        .iter()
        .map(|r| &r.0)
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    let worst = runs
        .iter()
        .map(|r| &r.1)
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one restart");
    let maxima = runs.iter().map(|r| r.0.value);
    let spread = maxima.clone().fold(f64::NEG_INFINITY, f64::max) - maxima.fold(f64::INFINITY, f64::min);
    // Residual of the Lagrange condition relates to the gradient by sqrt(d)/2.
    let scale = (d as f64).sqrt() / 2.0;
    Ok(OptResult {
        best_value: best.value,
        worst_value: worst.value,
        argmax: Extremizer::Unitary(best.point.clone()),
        argmin: Extremizer::Unitary(worst.point.clone()),
        spread,
        residual: scale * best.grad_norm.max(worst.grad_norm),
    })
}

/// `L_b = tr_B[L (1 (x) |b><b|)]`, an operator on the first factor.
pub fn reduce_second(l: &CMatrix, b: &CVector) -> CMatrix {
    let d = b.len();
    CMatrix::from_fn(d, d, |i, k| {
        let mut acc = ZERO;
        for j in 0..d {
            for m in 0..d {
                acc += b[j].conj() * l[(i * d + j, k * d + m)] * b[m];
            }
        }
        acc
    })
}

/// `L_a = tr_A[L (|a><a| (x) 1)]`, an operator on the second factor.
pub fn reduce_first(l: &CMatrix, a: &CVector) -> CMatrix {
    let d = a.len();
    CMatrix::from_fn(d, d, |j, m| {
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += a[i].conj() * l[(i * d + j, k * d + m)] * a[k];
            }
        }
        acc
    })
}

/// Largest residual of the coupled equations `L_b a = g a`, `L_a b = g b`.
pub fn separability_residual(l: &CMatrix, a: &CVector, b: &CVector, g: f64) -> f64 {
    let ra = reduce_second(l, b) * a - a * cr(g);
    let rb = reduce_first(l, a) * b - b * cr(g);
    ra.norm().max(rb.norm())
}

fn extremal_eigvec(m: &CMatrix, sign: f64) -> (f64, CVector) {
    let (vals, vecs) = linalg::eigh(m);
    let k = if sign > 0.0 { vals.len() - 1 } else { 0 };
    let mut v = vecs.column(k).into_owned();
    linalg::fix_phase(&mut v);
    (vals[k], v)
}

struct SepRun {
    value: f64,
    a: CVector,
    b: CVector,
    residual: f64,
}

fn sep_local_search(l: &CMatrix, b0: CVector, sign: f64, cfg: &OptimizerConfig) -> SepRun {
    let mut b = b0;
    let (_, mut a) = extremal_eigvec(&reduce_second(l, &b), sign);
    let mut value = linalg::expectation(l, &linalg::kron_vec(&a, &b));
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iters {
        let (g, nb) = extremal_eigvec(&reduce_first(l, &a), sign);
        b = nb;
        let (_, na) = extremal_eigvec(&reduce_second(l, &b), sign);
        a = na;
        value = linalg::expectation(l, &linalg::kron_vec(&a, &b));
        residual = separability_residual(l, &a, &b, value);
        if residual < cfg.step_tol || ((g - value).abs() < f64::EPSILON && residual < 1e-8) {
            break;
        }
    }
    SepRun { value, a, b, residual }
}

/// Max and min of `<a,b|L|a,b>` over product states, by alternating
/// extremal-eigenvector iteration on the separability eigenvalue equations.
pub fn optimize_sep(l: &CMatrix, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    let d = check_observable(l)?;
    let runs: Vec<(SepRun, SepRun)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let b0 = random_vector(d, cfg.seed.wrapping_add(i as u64));
            let hi = sep_local_search(l, b0.clone(), 1.0, cfg);
            let lo = sep_local_search(l, b0, -1.0, cfg);
            (hi, lo)
        })
        .collect();
    let best = runs
        .iter()
        .map(|r| &r.0)
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    let worst = runs
        .iter()
        .map(|r| &r.1)
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one restart");
    let maxima = runs.iter().map(|r| r.0.value);
    let spread = maxima.clone().fold(f64::NEG_INFINITY, f64::max) - maxima.fold(f64::INFINITY, f64::min);
    Ok(OptResult {
        best_value: best.value,
        worst_value: worst.value,
        argmax: Extremizer::Product { a: best.a.clone(), b: best.b.clone() },
        argmin: Extremizer::Product { a: worst.a.clone(), b: worst.b.clone() },
        spread,
        residual: best.residual.max(worst.residual),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevCheck {
    /// `sum_ij |<i|U|j>|^2 a_i b_j`
    pub lhs: f64,
    /// `sum_i a_i b_i`
    pub rhs: f64,
    /// `sum_i a_i b_{d-1-i}`
    pub lower: f64,
    /// `lhs <= rhs` up to 1e-12.
    pub holds: bool,
    /// `lower <= lhs` up to 1e-12.
    pub lower_holds: bool,
}

/// Generalized Chebyshev sum inequality for the doubly stochastic matrix
/// `G_ij = |<i|U|j>|^2` and two ascending sequences.
pub fn chebyshev_check(a: &[f64], b: &[f64], u: &CMatrix) -> Result<ChebyshevCheck> {
    let d = a.len();
    if b.len() != d || u.nrows() != d || u.ncols() != d {
        return Err(Error::Dimension("sequence and unitary sizes disagree".into()));
    }
    for (name, s) in [("a", a), ("b", b)] {
        if s.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invalid(format!("sequence {name} is not ascending")));
        }
    }
    let deviation = linalg::unitarity_deviation(u);
    if deviation > STATE_TOL {
        return Err(Error::NotUnitary { index: 0, deviation });
    }
    let mut lhs = 0.0;
    for i in 0..d {
        for j in 0..d {
            lhs += u[(i, j)].norm_sqr() * a[i] * b[j];
        }
    }
    let rhs: f64 = (0..d).map(|i| a[i] * b[i]).sum();
    let lower: f64 = (0..d).map(|i| a[i] * b[d - 1 - i]).sum();
    Ok(ChebyshevCheck {
        lhs,
        rhs,
        lower,
        holds: lhs <= rhs + 1e-12,
        lower_holds: lower <= lhs + 1e-12,
    })
}
