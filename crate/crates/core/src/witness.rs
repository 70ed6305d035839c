//! Witness bounds for separable states and mixtures of maximally entangled
//! (ME) states, and the verdicts they imply.
//!
//! For an observable `L` the six bounds are the extremes of `<L>` over all
//! states (`g`), separable states (`gS`) and ME mixtures (`gME`). An
//! expectation value above `gME_max` or below `gME_min` rules out an ME
//! mixture, hence a random-unitary channel. Leaving the `gS` interval
//! certifies entanglement, hence a non-projective channel. Staying inside an
//! interval proves nothing: some ME mixtures are separable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix, STATE_TOL};
use crate::oracle::{self, OptimizerConfig};
use crate::schmidt::{self, norm1, norm_inf};
use crate::state::{DensityOperator, PureState};

/// Strict-inequality margin on every verdict threshold.
pub const VERDICT_EPS: f64 = 1e-9;

/// A partial-trace deviation above this excludes a random-unitary description.
pub const UNITALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsMethod {
    ClosedFormProduct,
    ClosedFormFlip,
    ClosedFormRankOne,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessBounds {
    pub g_max: f64,
    pub g_min: f64,
    pub gs_max: f64,
    pub gs_min: f64,
    pub gme_max: f64,
    pub gme_min: f64,
    pub method: BoundsMethod,
    /// Fields obtained from the optimizer rather than a closed form.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub numerical_fields: Vec<String>,
}

impl WitnessBounds {
    /// Bounds of `factor * L` given the bounds of `L`.
    pub fn scaled(&self, factor: f64) -> Self {
        let pick = |hi: f64, lo: f64| {
            if factor >= 0.0 {
                (factor * hi, factor * lo)
            } else {
                (factor * lo, factor * hi)
            }
        };
        let (g_max, g_min) = pick(self.g_max, self.g_min);
        let (gs_max, gs_min) = pick(self.gs_max, self.gs_min);
        let (gme_max, gme_min) = pick(self.gme_max, self.gme_min);
        let numerical_fields = if factor >= 0.0 {
            self.numerical_fields.clone()
        } else {
            self.numerical_fields
                .iter()
                .map(|f| match f.as_str() {
                    "gme_min" => "gme_max".to_string(),
                    "gme_max" => "gme_min".to_string(),
                    "gs_min" => "gs_max".to_string(),
                    "gs_max" => "gs_min".to_string(),
                    "g_min" => "g_max".to_string(),
                    "g_max" => "g_min".to_string(),
                    other => other.to_string(),
                })
                .collect()
        };
        Self {
            g_max,
            g_min,
            gs_max,
            gs_min,
            gme_max,
            gme_min,
            method: self.method,
            numerical_fields,
        }
    }

    /// `g_min <= gME_min <= gME_max <= g_max` and the same for `gS`, with slack `tol`.
    pub fn is_ordered(&self, tol: f64) -> bool {
        let chain = |lo: f64, hi: f64| {
            self.g_min <= lo + tol && lo <= hi + tol && hi <= self.g_max + tol
        };
        chain(self.gme_min, self.gme_max) && chain(self.gs_min, self.gs_max)
    }
}

fn square_of_size(m: &CMatrix, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension(format!(
            "{what} is {}x{}, expected {d}x{d}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn psd_spectrum(m: &CMatrix, what: &str) -> Result<Vec<f64>> {
    linalg::check_hermitian(m, STATE_TOL).map_err(|e| match e {
        Error::NotHermitian { deviation, tol } => Error::NotHermitian { deviation, tol },
        other => Error::Invalid(format!("{what}: {other}")),
    })?;
    let vals = linalg::eigvalsh(m);
    if vals[0] < -STATE_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: vals[0],
            tol: STATE_TOL,
        });
    }
    Ok(vals)
}

/// Closed-form bounds for `L = A (x) B` with `A`, `B` Hermitian PSD.
pub fn bounds_product(a: &CMatrix, b: &CMatrix) -> Result<WitnessBounds> {
    if !a.is_square() {
        return Err(Error::Dimension("A must be square".into()));
    }
    let d = a.nrows();
    square_of_size(b, d, "B")?;
    let la = psd_spectrum(a, "A")?;
    let lb = psd_spectrum(b, "B")?;
    let df = d as f64;
    let gme_max = (0..d).map(|n| la[n] * lb[n]).sum::<f64>() / df;
    let gme_min = (0..d).map(|n| la[n] * lb[d - 1 - n]).sum::<f64>() / df;
    let gs_max = la[d - 1] * lb[d - 1];
    let gs_min = la[0] * lb[0];
    Ok(WitnessBounds {
        g_max: gs_max,
        g_min: gs_min,
        gs_max,
        gs_min,
        gme_max,
        gme_min,
        method: BoundsMethod::ClosedFormProduct,
        numerical_fields: Vec::new(),
    })
}

/// Max-elementwise deviations `(|tr_B rho - I/d|, |tr_A rho - I/d|)`.
///
/// Both vanish for every ME mixture.
pub fn unitality_test(rho: &DensityOperator) -> (f64, f64) {
    let d = rho.d();
    let target = linalg::identity(d) / cr(d as f64);
    let dev = |s| {
        let r = linalg::partial_trace(rho.matrix(), d, s).expect("validated dimensions");
        linalg::max_abs_diff(&r, &target)
    };
    (dev(linalg::Subsystem::B), dev(linalg::Subsystem::A))
}

/// `(A (x) B) F (A (x) B)^dagger` with `F` the swap.
pub fn flip_type_observable(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("A must be square".into()));
    }
    square_of_size(b, a.nrows(), "B")?;
    let ab = linalg::kron(a, b);
    Ok(&ab * linalg::flip(a.nrows()) * ab.adjoint())
}

/// Closed-form bounds for `L = (A (x) B) F (A (x) B)^dagger`, in terms of the
/// singular values `S_0 >= ... >= S_{d-1}` of `B A^dagger`.
///
/// The ME minimum pairs consecutive singular values:
/// `-(2/d) sum_n S_{2n} S_{2n+1}`, plus `S_{d-1}^2 / d` for odd `d`.
pub fn bounds_flip(a: &CMatrix, b: &CMatrix) -> Result<WitnessBounds> {
    if !a.is_square() {
        return Err(Error::Dimension("A must be square".into()));
    }
    let d = a.nrows();
    square_of_size(b, d, "B")?;
    if d < 2 {
        return Err(Error::Dimension(
            "flip-type bounds need d >= 2 (no skew-symmetric unitary exists for d = 1)".into(),
        ));
    }
    let s = linalg::singular_values(&(b * a.adjoint()));
    let df = d as f64;
    let pairs: f64 = (0..d / 2).map(|n| s[2 * n] * s[2 * n + 1]).sum();
    let gme_min = if d.is_multiple_of(2) {
        -2.0 * pairs / df
    } else {
        -(2.0 * pairs - s[d - 1] * s[d - 1]) / df
    };
    Ok(WitnessBounds {
        g_max: s[0] * s[0],
        g_min: -s[0] * s[1],
        gs_max: s[0] * s[0],
        gs_min: 0.0,
        gme_max: s.iter().map(|x| x * x).sum::<f64>() / df,
        gme_min,
        method: BoundsMethod::ClosedFormFlip,
        numerical_fields: Vec::new(),
    })
}

/// Bounds for `L = |psi><psi|`: `gME_max = ||sigma||_1^2 / d`,
/// `gS_max = ||sigma||_inf^2`. `gME_min` has no closed form here and comes
/// from [`oracle::optimize_me`].
pub fn bounds_rank_one(psi: &PureState, cfg: &OptimizerConfig) -> Result<WitnessBounds> {
    let s = schmidt::schmidt_decompose(psi)?;
    let d = psi.d() as f64;
    let gme_max = norm1(&s.sigma).powi(2) / d;
    let numeric = oracle::optimize_me(&psi.projector(), cfg)?;
    Ok(WitnessBounds {
        g_max: 1.0,
        g_min: 0.0,
        gs_max: norm_inf(&s.sigma).powi(2),
        gs_min: 0.0,
        gme_max,
        gme_min: numeric.worst_value.clamp(0.0, gme_max),
        method: BoundsMethod::ClosedFormRankOne,
        numerical_fields: vec!["gme_min".to_string()],
    })
}

/// Bounds of a general Hermitian `L` from its spectrum and both optimizers.
pub fn bounds_numerical(l: &CMatrix, cfg: &OptimizerConfig) -> Result<(WitnessBounds, f64)> {
    let me = oracle::optimize_me(l, cfg)?;
    let sep = oracle::optimize_sep(l, cfg)?;
    let vals = linalg::eigvalsh(l);
    let bounds = WitnessBounds {
        g_max: vals[vals.len() - 1],
        g_min: vals[0],
        gs_max: sep.best_value,
        gs_min: sep.worst_value,
        gme_max: me.best_value,
        gme_min: me.worst_value,
        method: BoundsMethod::Numerical,
        numerical_fields: ["gs_max", "gs_min", "gme_max", "gme_min"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    Ok((bounds, me.spread.max(sep.spread)))
}

/// Smallest white-noise weight `p*` above which
/// `(1 - p) I / d^2 + p |psi><psi|` is detected as neither separable nor an
/// ME mixture by `L = |psi><psi|`.
pub fn white_noise_threshold(psi: &PureState) -> Result<f64> {
    let s = schmidt::schmidt_decompose(psi)?;
    let d = psi.d() as f64;
    let bound = (norm1(&s.sigma).powi(2) / d).max(norm_inf(&s.sigma).powi(2));
    if d == 1.0 {
        return Ok(1.0);
    }
    Ok((d * d * bound - 1.0) / (d * d - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityCertificate {
    /// Lagrange operator, restricted to Hermitian matrices.
    pub gamma: CMatrix,
    /// `|| L|psi> - d (1 (x) Gamma)|psi> ||_2`
    pub residual: f64,
    /// `Re tr(Gamma)`, equal to `<psi|L|psi>`.
    pub value: f64,
}

/// Least-squares Hermitian `Gamma` in `L|psi> = d (1 (x) Gamma)|psi>`.
///
/// A vanishing residual certifies that `psi` is a stationary point of
/// `<L>` over pure ME states.
pub fn stationarity_certificate(l: &CMatrix, psi_me: &PureState) -> Result<StationarityCertificate> {
    let d = psi_me.d();
    if l.nrows() != d * d || l.ncols() != d * d {
        return Err(Error::Dimension("observable and state dimensions differ".into()));
    }
    linalg::check_hermitian(l, STATE_TOL)?;
    let sigma = schmidt::schmidt_decompose(psi_me)?.sigma;
    let flatness = ((d as f64).sqrt() * norm_inf(&sigma) - 1.0).abs();
    if flatness > schmidt::CLASSIFY_TOL {
        return Err(Error::NotMaximallyEntangled(format!(
            "sqrt(d) * ||sigma||_inf - 1 = {flatness:.3e}"
        )));
    }
    let sd = (d as f64).sqrt();
    let psi = psi_me.amplitudes();
    let u = linalg::state_to_operator(psi)? * cr(sd);
    let lpsi = l * psi;
    let x = linalg::state_to_operator(&lpsi)?;
    let y = &x * u.adjoint();
    let gamma = (&y + y.adjoint()) * cr(0.5 / sd);
    let fitted = linalg::kron(&linalg::identity(d), &gamma) * psi * cr(d as f64);
    Ok(StationarityCertificate {
        residual: (lpsi - fitted).norm(),
        value: gamma.trace().re,
        gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictFlag {
    /// Not a mixture of ME states: rules out a random-unitary channel.
    NotMeMixture,
    /// Entangled: rules out a random-projective channel.
    Entangled,
}

/// Signed distances beyond each threshold; positive means violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub above_gme_max: f64,
    pub below_gme_min: f64,
    pub above_gs_max: f64,
    pub below_gs_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub expectation: f64,
    pub flags: Vec<VerdictFlag>,
    pub margins: Margins,
}

impl Verdict {
    pub fn has(&self, flag: VerdictFlag) -> bool {
        self.flags.contains(&flag)
    }
}

pub fn verdict(l: &CMatrix, rho: &DensityOperator, bounds: &WitnessBounds) -> Result<Verdict> {
    verdict_with_tolerance(l, rho, bounds, VERDICT_EPS)
}

pub fn verdict_with_tolerance(
    l: &CMatrix,
    rho: &DensityOperator,
    bounds: &WitnessBounds,
    eps: f64,
) -> Result<Verdict> {
    let n = rho.dims().total();
    if l.nrows() != n || l.ncols() != n {
        return Err(Error::Dimension(format!(
            "observable is {}x{}, state is {n}x{n}",
            l.nrows(),
            l.ncols()
        )));
    }
    linalg::check_hermitian(l, STATE_TOL)?;
    let x = linalg::expectation_mixed(l, rho.matrix());
    let margins = Margins {
        above_gme_max: x - bounds.gme_max,
        below_gme_min: bounds.gme_min - x,
        above_gs_max: x - bounds.gs_max,
        below_gs_min: bounds.gs_min - x,
    };
    let mut flags = Vec::new();
    if margins.above_gme_max > eps || margins.below_gme_min > eps {
        flags.push(VerdictFlag::NotMeMixture);
    }
    if margins.above_gs_max > eps || margins.below_gs_min > eps {
        flags.push(VerdictFlag::Entangled);
    }
    Ok(Verdict {
        expectation: x,
        flags,
        margins,
    })
}
