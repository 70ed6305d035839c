//! Dense complex linear algebra on bipartite `d x d` spaces.
//!
//! Basis ordering is `|i, j> -> i * d + j` with the first factor (A) as the
//! most significant index. The unnormalized maximally entangled vector is
//! `|Phi> = sum_n |n, n>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Absolute tolerance for Hermiticity, positivity and trace checks.
pub const STATE_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Which side of `|Phi>` an operator is placed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(M^T (x) 1)|Phi>`
    Left,
    /// `(1 (x) M)|Phi>`
    Right,
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    let n = diag.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { cr(diag[i]) } else { ZERO })
}

/// Builds a matrix from row-major real entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| cr(entries[i * cols + j]))
}

pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = ONE;
    v
}

/// `|x> (x) |y>` for vectors.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    CVector::from_fn(a.len() * b.len(), |k, _| a[k / b.len()] * b[k % b.len()])
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Max elementwise absolute difference; the equality measure used throughout.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch in max_abs_diff_vec");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn check_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let deviation = hermiticity_deviation(m);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    Ok(())
}

/// Local dimension `d` of a `d^2`-dimensional bipartite space.
pub fn local_dim(total: usize) -> Result<usize> {
    let d = (total as f64).sqrt().round() as usize;
    if d == 0 || d * d != total {
        return Err(Error::Dimension(format!(
            "{total} is not a perfect square"
        )));
    }
    Ok(d)
}

fn check_bipartite(op: &CMatrix, d: usize) -> Result<()> {
    if op.nrows() != d * d || op.ncols() != d * d {
        return Err(Error::Dimension(format!(
            "expected {n}x{n} operator for d = {d}, got {}x{}",
            op.nrows(),
            op.ncols(),
            n = d * d
        )));
    }
    Ok(())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn partial_trace(op: &CMatrix, d: usize, traced: Subsystem) -> Result<CMatrix> {
    check_bipartite(op, d)?;
    let out = match traced {
        // (tr_A X)_{j,l} = sum_i X_{(i,j),(i,l)}
        Subsystem::A => CMatrix::from_fn(d, d, |j, l| {
            (0..d).map(|i| op[(i * d + j, i * d + l)]).sum()
        }),
        // (tr_B X)_{i,k} = sum_j X_{(i,j),(k,j)}
        Subsystem::B => CMatrix::from_fn(d, d, |i, k| {
            (0..d).map(|j| op[(i * d + j, k * d + j)]).sum()
        }),
    };
    Ok(out)
}

pub fn partial_transpose(op: &CMatrix, d: usize, transposed: Subsystem) -> Result<CMatrix> {
    check_bipartite(op, d)?;
    let n = d * d;
    let out = CMatrix::from_fn(n, n, |r, col| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (col / d, col % d);
        match transposed {
            Subsystem::A => op[(k * d + j, i * d + l)],
            Subsystem::B => op[(i * d + l, k * d + j)],
        }
    });
    Ok(out)
}

/// Unnormalized `|Phi> = sum_n |n, n>`.
pub fn phi(d: usize) -> CVector {
    CVector::from_fn(d * d, |k, _| if k / d == k % d { ONE } else { ZERO })
}

/// `(1 (x) M)|Phi>` for `Side::Right`, `(M^T (x) 1)|Phi>` for `Side::Left`.
///
/// Both sides give the same vector: the amplitude of `|m, n>` is `M_{n,m}`.
pub fn operator_to_state(m: &CMatrix, side: Side) -> Result<CVector> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "operator must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let d = m.nrows();
    let v = match side {
        Side::Right => CVector::from_fn(d * d, |k, _| m[(k % d, k / d)]),
        Side::Left => {
            let mt = m.transpose();
            CVector::from_fn(d * d, |k, _| mt[(k / d, k % d)])
        }
    };
    Ok(v)
}

/// Inverse of [`operator_to_state`] with `Side::Right`.
pub fn state_to_operator(psi: &CVector) -> Result<CMatrix> {
    let d = local_dim(psi.len())?;
    Ok(CMatrix::from_fn(d, d, |n, m| psi[m * d + n]))
}

/// Coefficient matrix `Psi_{m,n} = <m, n|psi>` (rows index the first factor).
pub fn coefficient_matrix(psi: &CVector) -> Result<CMatrix> {
    let d = local_dim(psi.len())?;
    Ok(CMatrix::from_fn(d, d, |m, n| psi[m * d + n]))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
///
/// Column `k` of the returned matrix is the eigenvector of eigenvalue `k`.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    // Symmetrize to keep round-off asymmetry out of the solver.
    let h = (m + m.adjoint()) * cr(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigvalsh(m).first().copied().unwrap_or(0.0)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Thin SVD `m = U diag(s) V^dagger` with `s` decreasing.
///
/// `U` comes from the Hermitian eigenproblem of `m m^dagger` and the rows of
/// `U^dagger m` give `s_k v_k^dagger`, so `U diag(s) V^dagger` reproduces `m`
/// to rounding even when singular values nearly coincide.
pub fn svd(m: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let (r, cc) = m.shape();
    let k = r.min(cc);
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let (_, vecs) = eigh(&(m * m.adjoint()));
    let u = CMatrix::from_fn(r, k, |i, j| vecs[(i, r - 1 - j)]);
    let b = u.adjoint() * m;
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let mut s = Vec::with_capacity(k);
    let mut v = CMatrix::zeros(cc, k);
    for j in 0..k {
        let row: CVector = b.row(j).adjoint();
        let norm = row.norm();
        let mut w = row.clone();
        for p in 0..j {
            let vp = v.column(p).into_owned();
            w -= &vp * vp.dotc(&w);
        }
        let w = if norm > 1e-14 * scale && w.norm() > 0.5 * norm {
            w
        } else {
            complete_orthonormal(&v, j).ok_or_else(|| Error::Numerical("SVD basis completion failed".into()))?
        };
        let wn = w.norm();
        v.set_column(j, &(w / cr(wn)));
        s.push(norm);
    }
    // Eigenvalue order of m m^dagger can differ from row-norm order by rounding.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let u = CMatrix::from_fn(r, k, |i, j| u[(i, order[j])]);
    let v = CMatrix::from_fn(cc, k, |i, j| v[(i, order[j])]);
    let s = order.iter().map(|&i| s[i]).collect();
    Ok((u, s, v))
}

/// A unit vector orthogonal to the first `filled` columns of `basis`.
fn complete_orthonormal(basis: &CMatrix, filled: usize) -> Option<CVector> {
    let n = basis.nrows();
    (0..n)
        .map(|i| {
            let mut w = basis_vector(n, i);
            for _ in 0..2 {
                for p in 0..filled {
                    let vp = basis.column(p).into_owned();
                    w -= &vp * vp.dotc(&w);
                }
            }
            w
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .filter(|w| w.norm() > 1e-6)
}

/// `exp(i * t * H)` for Hermitian `H`.
pub fn expi_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = eigh(h);
    let phases = CMatrix::from_fn(vals.len(), vals.len(), |i, j| {
        if i == j {
            Complex64::from_polar(1.0, t * vals[i])
        } else {
            ZERO
        }
    });
    &vecs * phases * vecs.adjoint()
}

/// Rotates `v` by a global phase so its largest-magnitude component is real
/// and positive. Returns the applied phase factor.
pub fn fix_phase(v: &mut CVector) -> Complex64 {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (k, z) in v.iter().enumerate() {
        // Ties resolve to the first index.
        if z.norm() > best_mag + 1e-12 {
            best = k;
            best_mag = z.norm();
        }
    }
    if best_mag <= 0.0 {
        return ONE;
    }
    let phase = v[best].conj() / v[best].norm();
    *v *= phase;
    phase
}

/// `<psi|L|psi>` real part.
pub fn expectation(l: &CMatrix, psi: &CVector) -> f64 {
    psi.dotc(&(l * psi)).re
}

/// `Re tr(rho L)`.
pub fn expectation_mixed(l: &CMatrix, rho: &CMatrix) -> f64 {
    (rho * l).trace().re
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Swap operator `F|x, y> = |y, x>`.
pub fn flip(d: usize) -> CMatrix {
    let n = d * d;
    CMatrix::from_fn(n, n, |r, col| {
        let (x, y) = (col / d, col % d);
        if r == y * d + x {
            ONE
        } else {
            ZERO
        }
    })
}

/// Realignment `R[(i,k),(j,l)] = L[(i,j),(k,l)]`; `L = A (x) B` iff
/// `R = vec(A) vec(B)^T` with row-major `vec`.
pub fn realign(op: &CMatrix, d: usize) -> Result<CMatrix> {
    check_bipartite(op, d)?;
    let n = d * d;
    Ok(CMatrix::from_fn(n, n, |r, col| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (col / d, col % d);
        op[(i * d + j, k * d + l)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> CMatrix {
        from_real_diagonal(v)
    }

    fn ket(d: usize, i: usize, j: usize) -> CVector {
        basis_vector(d * d, i * d + j)
    }

    #[test]
    fn kron_identity_gives_block_diagonal() {
        let b = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let k = kron(&identity(2), &b);
        assert_eq!(k.view((0, 0), (2, 2)), b);
        assert_eq!(k.view((2, 2), (2, 2)), b);
        assert!(k.view((0, 2), (2, 2)).iter().all(|z| *z == ZERO));
        assert!(k.view((2, 0), (2, 2)).iter().all(|z| *z == ZERO));
    }

    #[test]
    fn kron_of_z_with_z() {
        let z = diag(&[1.0, -1.0]);
        assert_eq!(kron(&z, &z), diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_of_scalars() {
        let a = CMatrix::from_element(1, 1, cr(2.0));
        let b = CMatrix::from_element(1, 1, cr(3.0));
        assert_eq!(kron(&a, &b)[(0, 0)], cr(6.0));
    }

    #[test]
    fn partial_trace_of_phi_projector_is_maximally_mixed() {
        for d in 1..5 {
            let p = phi(d);
            let rho = outer(&p, &p) / cr(d as f64);
            for s in [Subsystem::A, Subsystem::B] {
                let r = partial_trace(&rho, d, s).unwrap();
                assert!(max_abs_diff(&r, &(identity(d) / cr(d as f64))) < 1e-15);
            }
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let ra = CMatrix::from_fn(3, 3, |i, j| c((i + j) as f64, i as f64 - j as f64));
        let rb = CMatrix::from_fn(3, 3, |i, j| c(1.0 + (i * j) as f64, 0.5));
        let p = kron(&ra, &rb);
        let got = partial_trace(&p, 3, Subsystem::B).unwrap();
        assert!(max_abs_diff(&got, &(&ra * rb.trace())) < 1e-12);
        let got = partial_trace(&p, 3, Subsystem::A).unwrap();
        assert!(max_abs_diff(&got, &(&rb * ra.trace())) < 1e-12);
    }

    #[test]
    fn partial_trace_basis_case() {
        let v = ket(2, 0, 1);
        let got = partial_trace(&outer(&v, &v), 2, Subsystem::A).unwrap();
        assert_eq!(got, diag(&[0.0, 1.0]));
    }

    #[test]
    fn partial_trace_rejects_wrong_size() {
        let m = identity(5);
        assert!(matches!(
            partial_trace(&m, 2, Subsystem::A),
            Err(Error::Dimension(_))
        ));
        assert!(partial_transpose(&m, 2, Subsystem::B).is_err());
    }

    #[test]
    fn partial_transpose_of_phi_is_flip() {
        for d in 1..5 {
            let p = phi(d);
            let pt = partial_transpose(&outer(&p, &p), d, Subsystem::B).unwrap();
            assert_eq!(pt, flip(d));
            let pt = partial_transpose(&outer(&p, &p), d, Subsystem::A).unwrap();
            assert_eq!(pt, flip(d));
        }
    }

    #[test]
    fn partial_transpose_of_product() {
        let a = CMatrix::from_fn(2, 2, |i, j| c(i as f64, j as f64 + 1.0));
        let b = CMatrix::from_fn(2, 2, |i, j| c(2.0 * i as f64 - j as f64, 1.0));
        let pt = partial_transpose(&kron(&a, &b), 2, Subsystem::B).unwrap();
        assert_eq!(pt, kron(&a, &b.transpose()));
        let pt = partial_transpose(&kron(&a, &b), 2, Subsystem::A).unwrap();
        assert_eq!(pt, kron(&a.transpose(), &b));
    }

    #[test]
    fn operator_to_state_examples() {
        let v = operator_to_state(&identity(2), Side::Right).unwrap();
        assert_eq!(v, CVector::from_vec(vec![ONE, ZERO, ZERO, ONE]));

        let mut m = CMatrix::zeros(2, 2);
        m[(1, 0)] = ONE; // |1><0|
        let v = operator_to_state(&m, Side::Right).unwrap();
        assert_eq!(v, ket(2, 0, 1));
        assert_eq!(operator_to_state(&m, Side::Left).unwrap(), v);

        let v = operator_to_state(&diag(&[0.3, 0.7]), Side::Left).unwrap();
        assert_eq!(v, CVector::from_vec(vec![cr(0.3), ZERO, ZERO, cr(0.7)]));
    }

    #[test]
    fn operator_to_state_matches_tensor_action_on_phi() {
        let d = 3;
        let m = CMatrix::from_fn(d, d, |i, j| c(i as f64 - 0.3 * j as f64, (i * j) as f64));
        let right = kron(&identity(d), &m) * phi(d);
        let left = kron(&m.transpose(), &identity(d)) * phi(d);
        assert_eq!(operator_to_state(&m, Side::Right).unwrap(), right);
        assert_eq!(operator_to_state(&m, Side::Left).unwrap(), left);
    }

    #[test]
    fn state_to_operator_examples() {
        let v = CVector::from_vec(vec![ONE, ZERO, ZERO, ONE]);
        assert_eq!(state_to_operator(&v).unwrap(), identity(2));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = v * cr(s);
        assert!(max_abs_diff(&state_to_operator(&bell).unwrap(), &(identity(2) * cr(s))) < 1e-16);
        let mut expected = CMatrix::zeros(2, 2);
        expected[(1, 0)] = ONE;
        assert_eq!(state_to_operator(&ket(2, 0, 1)).unwrap(), expected);
    }

    #[test]
    fn state_to_operator_rejects_non_square_length() {
        let v = CVector::zeros(5);
        assert!(matches!(state_to_operator(&v), Err(Error::Dimension(_))));
    }

    #[test]
    fn eigh_sorts_ascending() {
        let (vals, vecs) = eigh(&diag(&[3.0, -1.0, 2.0]));
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_reconstructs() {
        let m = CMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, (i as f64) - (j as f64)));
        let (u, s, v) = svd(&m).unwrap();
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let sd = from_real_diagonal(&s);
        assert!(max_abs_diff(&(&u * sd * v.adjoint()), &m) < 1e-12);
    }

    #[test]
    fn expi_hermitian_is_unitary() {
        let h = CMatrix::from_fn(3, 3, |i, j| c((i + j) as f64, i as f64 - j as f64));
        let u = expi_hermitian(&h, 0.7);
        assert!(unitarity_deviation(&u) < 1e-13);
    }

    #[test]
    fn realign_detects_product_structure() {
        let a = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let b = CMatrix::from_fn(2, 2, |i, j| c(1.0, (i + j) as f64));
        let r = realign(&kron(&a, &b), 2).unwrap();
        let s = singular_values(&r);
        assert!(s[1] < 1e-12 * s[0]);
    }

    #[test]
    fn fix_phase_makes_largest_component_positive() {
        let mut v = CVector::from_vec(vec![c(0.1, 0.0), c(0.0, -0.9)]);
        fix_phase(&mut v);
        assert!((v[1] - cr(0.9)).norm() < 1e-15);
    }
}
