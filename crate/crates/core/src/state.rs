//! Validated bipartite states on `C^d (x) C^d`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, STATE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteDims {
    d: usize,
}

impl BipartiteDims {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("local dimension must be positive".into()));
        }
        Ok(Self { d })
    }

    /// Infers `d` from a total dimension `d^2`.
    pub fn from_total(total: usize) -> Result<Self> {
        Self::new(linalg::local_dim(total)?)
    }

    pub fn local(&self) -> usize {
        self.d
    }

    pub fn total(&self) -> usize {
        self.d * self.d
    }
}

fn display_round(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(9 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: BipartiteDims,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(dims: BipartiteDims, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::Dimension(format!(
                "state vector has length {}, expected {}",
                amplitudes.len(),
                dims.total()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        let deviation = (norm - 1.0).abs();
        if deviation > STATE_TOL {
            return Err(Error::NotNormalized {
                norm: display_round(norm),
                deviation,
                tol: STATE_TOL,
            });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Infers the local dimension from the vector length.
    pub fn from_vector(amplitudes: CVector) -> Result<Self> {
        let dims = BipartiteDims::from_total(amplitudes.len())?;
        Self::new(dims, amplitudes)
    }

    /// Normalizes `v` first. Fails only on a zero or non-square-length vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Invalid("cannot normalize a zero vector".into()));
        }
        Self::from_vector(v / linalg::cr(n))
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn d(&self) -> usize {
        self.dims.local()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> CMatrix {
        linalg::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            dims: self.dims,
            matrix: self.projector(),
        }
    }
}

/// A density operator satisfying Hermiticity, positivity and unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: BipartiteDims,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(dims: BipartiteDims, matrix: CMatrix) -> Result<Self> {
        let n = dims.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension(format!(
                "density matrix is {}x{}, expected {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        linalg::check_hermitian(&matrix, STATE_TOL)?;
        let trace = linalg::trace_re(&matrix);
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::BadTrace {
                trace: display_round(trace),
                tol: STATE_TOL,
            });
        }
        let min_eigenvalue = linalg::min_eigenvalue(&matrix);
        if min_eigenvalue < -STATE_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue,
                tol: STATE_TOL,
            });
        }
        Ok(Self { dims, matrix })
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        Self::new(BipartiteDims::from_total(matrix.nrows())?, matrix)
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let n = dims.total();
        Self {
            dims,
            matrix: linalg::identity(n) / linalg::cr(n as f64),
        }
    }

    /// `(1 - p) I / d^2 + p |psi><psi|`.
    pub fn with_white_noise(psi: &PureState, p: f64) -> Result<Self> {
        let mixed = Self::maximally_mixed(psi.dims());
        let m = mixed.matrix * linalg::cr(1.0 - p) + psi.projector() * linalg::cr(p);
        Self::new(psi.dims(), m)
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn d(&self) -> usize {
        self.dims.local()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Smallest eigenvalue of the partial transpose; negative means NPT.
    pub fn ppt_min_eigenvalue(&self) -> f64 {
        let pt = linalg::partial_transpose(&self.matrix, self.d(), linalg::Subsystem::B)
            .expect("dimensions validated at construction");
        linalg::min_eigenvalue(&pt)
    }
}
