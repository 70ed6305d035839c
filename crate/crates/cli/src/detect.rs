//! Structure tests that pick a closed form for an observable when one applies.

use chanwit::linalg::{self, cr, CMatrix, STATE_TOL};
use chanwit::witness::{self, WitnessBounds};
use chanwit::{OptimizerConfig, PureState};
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Relative cut for numerical rank in the rank-one and product tests.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableClass {
    RankOne,
    Product,
    FlipType,
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detected {
    pub class: ObservableClass,
    pub bounds: WitnessBounds,
    /// Disagreement between optimizer restarts, for numerical bounds.
    pub spread: Option<f64>,
}

/// Order: flip-type when factors are supplied, then rank one, then product,
/// then the numerical fallback.
pub fn detect(l: &CMatrix, flip: Option<(&CMatrix, &CMatrix)>, cfg: &OptimizerConfig) -> CliResult<Detected> {
    if !l.is_square() {
        return Err(CliError::Input("observable must be square".into()));
    }
    let d = linalg::local_dim(l.nrows())?;
    linalg::check_hermitian(l, STATE_TOL)?;
    let l = (l + l.adjoint()) * cr(0.5);

    if let Some((a, b)) = flip {
        let expected = witness::flip_type_observable(a, b)?;
        let dev = linalg::max_abs_diff(&expected, &l);
        if dev > 1e-8 * l.norm().max(1.0) {
            return Err(CliError::Input(format!(
                "observable differs from (A (x) B) F (A (x) B)^dagger by {dev:.3e}"
            )));
        }
        return Ok(Detected {
            class: ObservableClass::FlipType,
            bounds: witness::bounds_flip(a, b)?,
            spread: None,
        });
    }
    if let Some(bounds) = rank_one(&l, cfg)? {
        return Ok(Detected { class: ObservableClass::RankOne, bounds, spread: None });
    }
    if let Some(bounds) = product(&l, d)? {
        return Ok(Detected { class: ObservableClass::Product, bounds, spread: None });
    }
    let (bounds, spread) = witness::bounds_numerical(&l, cfg)?;
    Ok(Detected {
        class: ObservableClass::General,
        bounds,
        spread: Some(spread),
    })
}

fn rank_one(l: &CMatrix, cfg: &OptimizerConfig) -> CliResult<Option<WitnessBounds>> {
    let (vals, vecs) = linalg::eigh(l);
    let (k, &top) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("non-empty spectrum");
    if top == 0.0 || vals.iter().enumerate().any(|(i, v)| i != k && v.abs() > RANK_TOL * top.abs()) {
        return Ok(None);
    }
    let psi = PureState::normalized(vecs.column(k).into_owned())?;
    Ok(Some(witness::bounds_rank_one(&psi, cfg)?.scaled(top)))
}

#[derive(Clone, Copy, PartialEq)]
enum Sign {
    Positive,
    Negative,
    Indefinite,
}

fn definiteness(m: &CMatrix) -> Sign {
    let vals = linalg::eigvalsh(m);
    let tol = RANK_TOL * vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if vals[0] >= -tol {
        Sign::Positive
    } else if vals[vals.len() - 1] <= tol {
        Sign::Negative
    } else {
        Sign::Indefinite
    }
}

/// Clips eigenvalues of the wrong sign left by round-off.
fn clip_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = linalg::eigh(m);
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    &vecs * linalg::from_real_diagonal(&clipped) * vecs.adjoint()
}

fn product(l: &CMatrix, d: usize) -> CliResult<Option<WitnessBounds>> {
    let r = linalg::realign(l, d)?;
    let (u, s, v) = linalg::svd(&r)?;
    if s[0] == 0.0 || s.get(1).is_some_and(|&s1| s1 > RANK_TOL * s[0]) {
        return Ok(None);
    }
    // R = vec(A) vec(B)^T with unit-norm factors and scale s_0.
    let mut a = CMatrix::from_fn(d, d, |i, k| u[(i * d + k, 0)]);
    let mut b = CMatrix::from_fn(d, d, |j, m| v[(j * d + m, 0)].conj());
    // A and B are Hermitian up to a common phase; tr(A^2) exposes it.
    let beta = (&a * &a).trace().arg() / 2.0;
    let rot = chanwit::linalg::c(beta.cos(), beta.sin());
    a /= rot;
    b *= rot;
    let herm = |m: &CMatrix| linalg::hermiticity_deviation(m) <= 1e-8;
    if !herm(&a) || !herm(&b) {
        return Ok(None);
    }
    let a = (&a + a.adjoint()) * cr(0.5);
    let b = (&b + b.adjoint()) * cr(0.5);
    let (a, b, factor) = match (definiteness(&a), definiteness(&b)) {
        (Sign::Positive, Sign::Positive) => (a, b, s[0]),
        (Sign::Negative, Sign::Negative) => (-a, -b, s[0]),
        (Sign::Positive, Sign::Negative) => (a, -b, -s[0]),
        (Sign::Negative, Sign::Positive) => (-a, b, -s[0]),
        _ => return Ok(None),
    };
    let bounds = witness::bounds_product(&clip_psd(&a), &clip_psd(&b))?;
    Ok(Some(bounds.scaled(factor)))
}
