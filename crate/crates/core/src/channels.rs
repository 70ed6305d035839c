//! Kraus-form channels and the Choi-Jamiolkowski isomorphism.
//!
//! Channels are completely positive but not necessarily trace preserving.
//! The Choi state is always stored trace-normalized; the trace of
//! `(1 (x) E)(|Phi><Phi|)` before normalization is kept in
//! [`ChoiState::raw_trace`] so either normalization convention can be
//! recovered (`1/d` for random-unitary channels, `1` for random-projective ones).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix, CVector, Side, STATE_TOL};
use crate::state::{BipartiteDims, DensityOperator};

/// Eigenvalues of the rescaled Choi matrix at or below this are dropped when
/// extracting Kraus operators.
pub const KRAUS_EIGEN_CUTOFF: f64 = 1e-12;

/// Second-to-first singular value ratio at or below which an operator counts as rank one.
pub const RANK_ONE_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelTag {
    General,
    /// Random unitary: probabilities times unitary conjugations.
    Ru,
    /// Random projective: probabilities times rank-one Kraus operators.
    Rp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausTerm {
    pub weight: f64,
    pub op: CMatrix,
}

/// `E(rho) = sum_j w_j K_j rho K_j^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dims: BipartiteDims,
    terms: Vec<KrausTerm>,
    tag: ChannelTag,
}

fn check_probabilities(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < 0.0 || !w.is_finite()) {
        return Err(Error::Probabilities(format!("weight {w} is negative or not finite")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > STATE_TOL {
        return Err(Error::Probabilities(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(())
}

fn rank_one_ratio(op: &CMatrix) -> f64 {
    let s = linalg::singular_values(op);
    match (s.first(), s.get(1)) {
        (Some(0.0), _) => f64::INFINITY,
        (Some(&s0), Some(&s1)) => s1 / s0,
        _ => 0.0,
    }
}

impl KrausChannel {
    pub fn new(d: usize, terms: Vec<KrausTerm>, tag: ChannelTag) -> Result<Self> {
        let dims = BipartiteDims::new(d)?;
        for (index, t) in terms.iter().enumerate() {
            if t.op.nrows() != d || t.op.ncols() != d {
                return Err(Error::Dimension(format!(
                    "Kraus operator {index} is {}x{}, expected {d}x{d}",
                    t.op.nrows(),
                    t.op.ncols()
                )));
            }
            if !linalg::is_finite(&t.op) || !t.weight.is_finite() {
                return Err(Error::NonFinite);
            }
            if t.weight < 0.0 {
                return Err(Error::Probabilities(format!(
                    "weight {} of term {index} is negative",
                    t.weight
                )));
            }
        }
        match tag {
            ChannelTag::General => {}
            ChannelTag::Ru => {
                check_probabilities(&terms.iter().map(|t| t.weight).collect::<Vec<_>>())?;
                for (index, t) in terms.iter().enumerate() {
                    let deviation = linalg::unitarity_deviation(&t.op);
                    if deviation > STATE_TOL {
                        return Err(Error::NotUnitary { index, deviation });
                    }
                }
            }
            ChannelTag::Rp => {
                check_probabilities(&terms.iter().map(|t| t.weight).collect::<Vec<_>>())?;
                for (index, t) in terms.iter().enumerate() {
                    let ratio = rank_one_ratio(&t.op);
                    if ratio > RANK_ONE_RATIO {
                        return Err(Error::NotRankOne { index, ratio });
                    }
                }
            }
        }
        Ok(Self { dims, terms, tag })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(d, vec![KrausTerm { weight: 1.0, op: linalg::identity(d) }], ChannelTag::Ru)
            .expect("identity is a valid RU channel")
    }

    /// `E(rho) = tr(rho) I / d`, realized with the Kraus set `{|i><j| / sqrt(d)}`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let mut terms = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut op = CMatrix::zeros(d, d);
                op[(i, j)] = cr(1.0);
                terms.push(KrausTerm { weight: 1.0 / d as f64, op });
            }
        }
        Self::new(d, terms, ChannelTag::General).expect("valid Kraus set")
    }

    pub fn d(&self) -> usize {
        self.dims.local()
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn terms(&self) -> &[KrausTerm] {
        &self.terms
    }

    pub fn tag(&self) -> ChannelTag {
        self.tag
    }

    /// Unnormalized action `sum_j w_j K_j rho K_j^dagger` on any `d x d` matrix.
    pub fn act(&self, rho: &CMatrix) -> Result<CMatrix> {
        let d = self.d();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::Dimension(format!(
                "input is {}x{}, channel acts on {d}x{d}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(self
            .terms
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, t| acc + (&t.op * rho * t.op.adjoint()) * cr(t.weight)))
    }
}

/// Applies the channel; with `normalize` the output is divided by its trace.
pub fn apply_channel(ch: &KrausChannel, rho: &CMatrix, normalize: bool) -> Result<CMatrix> {
    let out = ch.act(rho)?;
    if !normalize {
        return Ok(out);
    }
    let tr = linalg::trace_re(&out);
    if tr.abs() <= f64::EPSILON {
        return Err(Error::ZeroTrace);
    }
    Ok(out / cr(tr))
}

/// Trace-normalized Choi state plus the trace it had before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    pub state: DensityOperator,
    pub raw_trace: f64,
}

impl ChoiState {
    pub fn new(state: DensityOperator, raw_trace: f64) -> Result<Self> {
        if raw_trace.is_nan() || raw_trace <= 0.0 || !raw_trace.is_finite() {
            return Err(Error::Invalid(format!("raw trace {raw_trace} must be positive")));
        }
        Ok(Self { state, raw_trace })
    }

    pub fn d(&self) -> usize {
        self.state.d()
    }

    /// `(1 (x) E)(|Phi><Phi|)` before normalization.
    pub fn raw_matrix(&self) -> CMatrix {
        self.state.matrix() * cr(self.raw_trace)
    }
}

/// `(1 (x) E)(|Phi><Phi|)` normalized to unit trace.
pub fn choi_of_channel(ch: &KrausChannel) -> Result<ChoiState> {
    let n = ch.dims().total();
    let mut raw = CMatrix::zeros(n, n);
    for t in ch.terms() {
        if t.weight == 0.0 {
            continue;
        }
        let v: CVector = linalg::operator_to_state(&t.op, Side::Right)?;
        raw += linalg::outer(&v, &v) * cr(t.weight);
    }
    let raw_trace = linalg::trace_re(&raw);
    if raw_trace.is_nan() || raw_trace <= 0.0 {
        return Err(Error::Invalid("channel is identically zero".into()));
    }
    let mut m = raw / cr(raw_trace);
    // Remove round-off anti-Hermitian parts before validation.
    m = (&m + m.adjoint()) * cr(0.5);
    ChoiState::new(DensityOperator::new(ch.dims(), m)?, raw_trace)
}

/// Kraus form from the spectral decomposition of the rescaled Choi matrix.
///
/// Each eigenpair `(lambda, v)` with `lambda > 1e-12` becomes the term
/// `(lambda, state_to_operator(v))`.
pub fn kraus_of_choi(choi: &ChoiState) -> Result<KrausChannel> {
    let raw = choi.raw_matrix();
    let (vals, vecs) = linalg::eigh(&raw);
    let mut terms = Vec::new();
    for (k, &lambda) in vals.iter().enumerate().rev() {
        if lambda <= KRAUS_EIGEN_CUTOFF {
            continue;
        }
        let v = vecs.column(k).into_owned();
        terms.push(KrausTerm {
            weight: lambda,
            op: linalg::state_to_operator(&v)?,
        });
    }
    KrausChannel::new(choi.d(), terms, ChannelTag::General)
}

/// Largest deviation between the unnormalized actions of two channels on
/// the `d^2` matrix units `|i><j|`.
pub fn action_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.d() != b.d() {
        return Err(Error::Dimension("channels act on different dimensions".into()));
    }
    let d = a.d();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut unit = CMatrix::zeros(d, d);
            unit[(i, j)] = cr(1.0);
            worst = worst.max(linalg::max_abs_diff(&a.act(&unit)?, &b.act(&unit)?));
        }
    }
    Ok(worst)
}

pub fn make_ru(probs: &[f64], unitaries: Vec<CMatrix>) -> Result<KrausChannel> {
    if probs.len() != unitaries.len() {
        return Err(Error::Invalid(format!(
            "{} probabilities for {} unitaries",
            probs.len(),
            unitaries.len()
        )));
    }
    let d = unitaries
        .first()
        .map(|u| u.nrows())
        .ok_or_else(|| Error::Invalid("empty channel".into()))?;
    let terms = probs
        .iter()
        .zip(unitaries)
        .map(|(&weight, op)| KrausTerm { weight, op })
        .collect();
    KrausChannel::new(d, terms, ChannelTag::Ru)
}

/// `K_j = |phi_j><psi_j|` for unit vectors `phi_j`, `psi_j`.
pub fn make_rp(probs: &[f64], pairs: &[(CVector, CVector)]) -> Result<KrausChannel> {
    if probs.len() != pairs.len() {
        return Err(Error::Invalid(format!(
            "{} probabilities for {} vector pairs",
            probs.len(),
            pairs.len()
        )));
    }
    let d = pairs
        .first()
        .map(|p| p.0.len())
        .ok_or_else(|| Error::Invalid("empty channel".into()))?;
    let mut terms = Vec::with_capacity(pairs.len());
    for (index, ((phi, psi), &weight)) in pairs.iter().zip(probs).enumerate() {
        for v in [phi, psi] {
            if v.len() != d {
                return Err(Error::Dimension(format!("vector pair {index} has wrong length")));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > STATE_TOL {
                return Err(Error::NotNormalized {
                    norm,
                    deviation: (norm - 1.0).abs(),
                    tol: STATE_TOL,
                });
            }
        }
        terms.push(KrausTerm { weight, op: linalg::outer(phi, psi) });
    }
    KrausChannel::new(d, terms, ChannelTag::Rp)
}
