//! Schmidt and complementary Schmidt decompositions, the norm geometry of
//! Schmidt vectors, and the Fourier basis of maximally entangled states.
//!
//! The complementary decomposition expands a pure state over `d` orthonormal
//! maximally entangled states. Its coefficients `tau` are a phase-adjusted
//! discrete Fourier transform of the Schmidt coefficients `sigma`:
//!
//! ```text
//! tau_k = e^{i theta_k} d^{-1/2} sum_n e^{2 pi i k n / d} sigma_n >= 0
//! ```

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix, CVector, ZERO};
use crate::state::PureState;

/// `tau_k` at or below this has its phase pinned to zero.
pub const PHASE_CUTOFF: f64 = 1e-12;

/// Tolerance of the vertex classification in [`geometry_profile`].
pub const CLASSIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtData {
    /// Descending, non-negative, unit 2-norm.
    pub sigma: Vec<f64>,
    /// Columns are `|e_n>`.
    pub basis_a: CMatrix,
    /// Columns are `|f_n>`.
    pub basis_b: CMatrix,
}

impl SchmidtData {
    pub fn reconstruct(&self) -> CVector {
        let d = self.sigma.len();
        let mut out = CVector::zeros(d * d);
        for (n, &s) in self.sigma.iter().enumerate() {
            let e = self.basis_a.column(n).into_owned();
            let f = self.basis_b.column(n).into_owned();
            out += linalg::kron_vec(&e, &f) * cr(s);
        }
        out
    }
}

fn lexicographic(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// `|psi> = sum_n sigma_n |e_n> (x) |f_n>`.
///
/// Each pair is rotated so the largest-magnitude entry of `|e_n>` is real and
/// positive. Equal coefficients are ordered lexicographically by `|e_n>`.
pub fn schmidt_decompose(psi: &PureState) -> Result<SchmidtData> {
    let d = psi.d();
    // Psi = U S V^dagger  =>  |psi> = sum_k s_k |u_k> (x) |conj(v_k)>
    let coeff = linalg::coefficient_matrix(psi.amplitudes())?;
    let (u, s, v) = linalg::svd(&coeff)?;
    let mut pairs: Vec<(f64, CVector, CVector)> = (0..d)
        .map(|k| {
            let mut e = u.column(k).into_owned();
            let mut f = v.column(k).map(|z| z.conj());
            let phase = linalg::fix_phase(&mut e);
            f *= phase.conj();
            (s[k], e, f)
        })
        .collect();
    pairs.sort_by(|x, y| {
        if (x.0 - y.0).abs() <= 1e-12 {
            lexicographic(&x.1, &y.1)
        } else {
            y.0.total_cmp(&x.0)
        }
    });
    let sigma = pairs.iter().map(|p| p.0).collect();
    let basis_a = CMatrix::from_fn(d, d, |i, k| pairs[k].1[i]);
    let basis_b = CMatrix::from_fn(d, d, |i, k| pairs[k].2[i]);
    Ok(SchmidtData { sigma, basis_a, basis_b })
}

/// Unitary DFT `y_m = d^{-1/2} sum_n e^{2 pi i m n / d} x_n`.
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let d = x.len();
    let norm = (d as f64).sqrt();
    (0..d)
        .map(|m| {
            x.iter()
                .enumerate()
                .map(|(n, &xn)| xn * Complex64::from_polar(1.0, 2.0 * PI * ((m * n) % d) as f64 / d as f64))
                .sum::<Complex64>()
                / norm
        })
        .collect()
}

/// Inverse of [`dft`].
pub fn idft(y: &[Complex64]) -> Vec<Complex64> {
    let d = y.len();
    let norm = (d as f64).sqrt();
    (0..d)
        .map(|n| {
            y.iter()
                .enumerate()
                .map(|(m, &ym)| ym * Complex64::from_polar(1.0, -2.0 * PI * ((m * n) % d) as f64 / d as f64))
                .sum::<Complex64>()
                / norm
        })
        .collect()
}

/// Generalized DFT: returns `(tau, theta)` with `tau_k = |DFT(sigma)_k|` and
/// `theta_k = -arg DFT(sigma)_k`, pinned to zero where `tau_k <= 1e-12`.
pub fn gdft(sigma: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(s) = sigma.iter().find(|s| s.is_nan() || **s < 0.0) {
        return Err(Error::Invalid(format!("Schmidt coefficient {s} is negative")));
    }
    let x: Vec<Complex64> = sigma.iter().map(|&s| cr(s)).collect();
    let y = dft(&x);
    let tau: Vec<f64> = y.iter().map(|z| z.norm()).collect();
    let theta = y
        .iter()
        .zip(&tau)
        .map(|(z, &t)| if t <= PHASE_CUTOFF { 0.0 } else { 0.0 - z.arg() })
        .collect();
    Ok((tau, theta))
}

/// `sigma_n = sum_k d^{-1/2} e^{i phi_{k,n}} tau_k` with
/// `phi_{k,n} = -2 pi k n / d - theta_k`.
pub fn inverse_gdft(tau: &[f64], theta: &[f64]) -> Result<Vec<Complex64>> {
    if tau.len() != theta.len() {
        return Err(Error::Dimension("tau and theta lengths differ".into()));
    }
    let d = tau.len();
    Ok((0..d)
        .map(|n| {
            (0..d)
                .map(|k| Complex64::from_polar(tau[k], me_phase(k, n, theta[k], d)))
                .sum::<Complex64>()
                / (d as f64).sqrt()
        })
        .collect())
}

/// `phi_{k,n} = -(2 pi / d) k n - theta_k`.
fn me_phase(k: usize, n: usize, theta_k: f64, d: usize) -> f64 {
    -2.0 * PI * ((k * n) % d) as f64 / d as f64 - theta_k
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplementarySchmidtData {
    pub tau: Vec<f64>,
    pub theta: Vec<f64>,
    /// Schmidt coefficients of the same state, for reference.
    pub sigma: Vec<f64>,
    /// `|F_{k,0}> = d^{-1/2} sum_n e^{i phi_{k,n}} |n, n>` in the Schmidt frame.
    pub me_states: Vec<CVector>,
    pub basis_a: CMatrix,
    pub basis_b: CMatrix,
}

impl ComplementarySchmidtData {
    /// `sum_k tau_k |F_{k,0}>` in the Schmidt-rotated frame.
    pub fn reconstruct_rotated(&self) -> CVector {
        let n = self.me_states.first().map_or(0, |v| v.len());
        self.me_states
            .iter()
            .zip(&self.tau)
            .fold(CVector::zeros(n), |acc, (v, &t)| acc + v * cr(t))
    }

    /// The reconstruction mapped back through the local Schmidt bases.
    pub fn reconstruct(&self) -> CVector {
        linalg::kron(&self.basis_a, &self.basis_b) * self.reconstruct_rotated()
    }

    /// `sum_n sigma_n |n, n>`.
    pub fn rotated_state(&self) -> CVector {
        let d = self.sigma.len();
        CVector::from_fn(d * d, |k, _| if k / d == k % d { cr(self.sigma[k / d]) } else { ZERO })
    }
}

/// Complementary decomposition built directly from a Schmidt vector, with
/// identity local bases.
pub fn complementary_from_sigma(sigma: &[f64]) -> Result<ComplementarySchmidtData> {
    let d = sigma.len();
    let (tau, theta) = gdft(sigma)?;
    let me_states = (0..d)
        .map(|k| {
            let diag: Vec<Complex64> = (0..d)
                .map(|n| Complex64::from_polar(1.0, me_phase(k, n, theta[k], d)))
                .collect();
            let u = CMatrix::from_diagonal(&CVector::from_vec(diag));
            crate::oracle::me_state(&u)
        })
        .collect();
    Ok(ComplementarySchmidtData {
        tau,
        theta,
        sigma: sigma.to_vec(),
        me_states,
        basis_a: linalg::identity(d),
        basis_b: linalg::identity(d),
    })
}

pub fn complementary_decompose(psi: &PureState) -> Result<ComplementarySchmidtData> {
    let s = schmidt_decompose(psi)?;
    let mut data = complementary_from_sigma(&s.sigma)?;
    data.basis_a = s.basis_a;
    data.basis_b = s.basis_b;
    Ok(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryClass {
    SeparablePure,
    MaximallyEntangled,
    Intermediate,
}

impl GeometryClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GeometryClass::SeparablePure => "separable-pure",
            GeometryClass::MaximallyEntangled => "maximally-entangled",
            GeometryClass::Intermediate => "intermediate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryProfile {
    pub norm1: f64,
    pub norm2: f64,
    pub norm_inf: f64,
    pub classification: GeometryClass,
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Octahedron vertex (`||sigma||_1 = 1`), cube vertex
/// (`sqrt(d) ||sigma||_inf = 1`) or neither, for a unit Schmidt vector.
pub fn geometry_profile(sigma: &[f64]) -> Result<GeometryProfile> {
    if sigma.is_empty() {
        return Err(Error::Dimension("empty Schmidt vector".into()));
    }
    let (n1, n2, ni) = (norm1(sigma), norm2(sigma), norm_inf(sigma));
    if (n2 - 1.0).abs() > linalg::STATE_TOL {
        return Err(Error::NotNormalized {
            norm: n2,
            deviation: (n2 - 1.0).abs(),
            tol: linalg::STATE_TOL,
        });
    }
    let d = sigma.len() as f64;
    let classification = if (n1 - 1.0).abs() <= CLASSIFY_TOL {
        GeometryClass::SeparablePure
    } else if (d.sqrt() * ni - 1.0).abs() <= CLASSIFY_TOL {
        GeometryClass::MaximallyEntangled
    } else {
        GeometryClass::Intermediate
    };
    Ok(GeometryProfile {
        norm1: n1,
        norm2: n2,
        norm_inf: ni,
        classification,
    })
}

/// Clock matrix `sum_q omega^q |q><q|`.
pub fn clock(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 2.0 * PI * i as f64 / d as f64)
        } else {
            ZERO
        }
    })
}

/// Shift matrix `sum_q |q+1 mod d><q|`.
pub fn shift(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { cr(1.0) } else { ZERO })
}

/// `|F_{m,n}> = d^{-1/2} sum_q omega^{q m} |q, q + n mod d>`, indexed `m * d + n`.
pub fn fourier_me_basis(d: usize) -> Vec<CVector> {
    let norm = (d as f64).sqrt();
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let mut v = CVector::zeros(d * d);
            for q in 0..d {
                v[q * d + (q + n) % d] =
                    Complex64::from_polar(1.0 / norm, 2.0 * PI * ((q * m) % d) as f64 / d as f64);
            }
            out.push(v);
        }
    }
    out
}
