//! Dense complex matrices of dimension 2 and 4.
//!
//! Everything in this crate lives in the two-qubit Hilbert space, so the
//! matrices are stored inline (`[C64; 16]`) and are `Copy`. The basis order
//! is `|00>, |01>, |10>, |11>` with qubit 0 as the left tensor factor.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

/// Tolerance for algebraic identities (Kraus completeness, normalization).
pub const ALGEBRAIC_TOLERANCE: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Matrix dimension. Only single-qubit and two-qubit operators exist here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Four,
}

impl Dim {
    pub const fn size(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Four => 4,
        }
    }

    pub fn from_size(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dim::Two),
            4 => Ok(Dim::Four),
            _ => Err(invalid(format!("matrix dimension must be 2 or 4, got {n}"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: Dim,
    entries: [C64; 16],
}

impl ComplexMatrix {
    pub fn zeros(dim: Dim) -> Self {
        Self {
            dim,
            entries: [C64::new(0.0, 0.0); 16],
        }
    }

    pub fn identity(dim: Dim) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim.size() {
            m[(i, i)] = re(1.0);
        }
        m
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be 4 or 16.
    pub fn from_entries(entries: &[C64]) -> Result<Self> {
        let dim = match entries.len() {
            4 => Dim::Two,
            16 => Dim::Four,
            n => {
                return Err(invalid(format!(
                    "expected 4 or 16 entries for a square matrix, got {n}"
                )))
            }
        };
        let mut m = Self::zeros(dim);
        m.entries[..entries.len()].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let dim = Dim::from_size(n)?;
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, z) in row.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        Ok(m)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| re(x)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn diagonal(diag: &[C64]) -> Result<Self> {
        let dim = Dim::from_size(diag.len())?;
        let mut m = Self::zeros(dim);
        for (i, z) in diag.iter().enumerate() {
            m[(i, i)] = *z;
        }
        Ok(m)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.dim.size()
    }

    /// Row-major entries, `size()^2` of them.
    pub fn entries(&self) -> &[C64] {
        let n = self.size();
        &self.entries[..n * n]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.size();
        let mut out = Self::zeros(self.dim);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.size()).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        out.entries.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// `u * self * u^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        *u * *self * u.adjoint()
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tolerance
    }

    /// `(self + self^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(re(0.5))
    }

    /// Lifts a single-qubit operator onto the two-qubit space acting on `target`.
    pub fn embed(op: &ComplexMatrix, target: usize) -> Result<Self> {
        let id = Self::identity(Dim::Two);
        match target {
            0 => tensor(op, &id),
            1 => tensor(&id, op),
            t => Err(invalid(format!("qubit index must be 0 or 1, got {t}"))),
        }
    }

    fn to_nalgebra4(&self) -> Matrix4<C64> {
        debug_assert_eq!(self.dim, Dim::Four);
        Matrix4::from_fn(|i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        let n = self.size();
        assert!(i < n && j < n, "index ({i}, {j}) out of range for {n}x{n}");
        &self.entries[i * n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        let n = self.size();
        assert!(i < n && j < n, "index ({i}, {j}) out of range for {n}x{n}");
        &mut self.entries[i * n + j]
    }
}

/// Panics on dimension mismatch; all internal products are between operators
/// of the same space.
impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.size();
        let mut out = ComplexMatrix::zeros(self.dim);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        let mut out = self;
        out.entries
            .iter_mut()
            .zip(rhs.entries.iter())
            .for_each(|(a, b)| *a += b);
        out
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        self + rhs.scale(re(-1.0))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.size();
        writeln!(f, "ComplexMatrix {n}x{n} [")?;
        for i in 0..n {
            write!(f, "  ")?;
            for j in 0..n {
                let z = self[(i, j)];
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b` of two single-qubit operators, `a` acting on qubit 0.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != Dim::Two || b.dim != Dim::Two {
        return Err(invalid("tensor expects two 2x2 operands"));
    }
    let mut out = ComplexMatrix::zeros(Dim::Four);
    for i0 in 0..2 {
        for j0 in 0..2 {
            for i1 in 0..2 {
                for j1 in 0..2 {
                    out[(2 * i0 + i1, 2 * j0 + j1)] = a[(i0, j0)] * b[(i1, j1)];
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of the three density-matrix checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    pub hermitian: bool,
    /// `|Tr(rho) - 1|`.
    pub trace_dev: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eig: f64,
}

impl ValidationReport {
    pub fn is_valid(&self, tolerance: f64) -> bool {
        self.hermitian && self.trace_dev <= tolerance && self.min_eig >= -tolerance
    }
}

/// Reports Hermiticity, trace deviation and the smallest eigenvalue of a 4x4 matrix.
pub fn validate_density(m: &ComplexMatrix, tolerance: f64) -> Result<ValidationReport> {
    if m.dim != Dim::Four {
        return Err(invalid("density validation expects a 4x4 matrix"));
    }
    let hermitian = m.is_hermitian(tolerance);
    let trace_dev = (m.trace() - re(1.0)).norm();
    let min_eig = m
        .hermitian_part()
        .to_nalgebra4()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(ValidationReport {
        hermitian,
        trace_dev,
        min_eig,
    })
}

/// A validated two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    tolerance: f64,
}

impl DensityMatrix {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(mat, Self::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(mat: ComplexMatrix, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(invalid("tolerance must be finite and non-negative"));
        }
        let report = validate_density(&mat, tolerance)?;
        if !report.is_valid(tolerance) {
            return Err(Error::NotAState(format!(
                "hermitian={}, trace deviation {:.3e}, min eigenvalue {:.3e}",
                report.hermitian, report.trace_dev, report.min_eig
            )));
        }
        Ok(Self { mat, tolerance })
    }

    /// Projector onto a normalized pure state.
    pub fn from_pure(amps: &[C64; 4]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > ALGEBRAIC_TOLERANCE {
            return Err(Error::NotAState(format!(
                "state vector has squared norm {norm}"
            )));
        }
        let mut m = ComplexMatrix::zeros(Dim::Four);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = amps[i] * amps[j].conj();
            }
        }
        Self::new(m)
    }

    /// `|k><k|` for a computational basis index `k` in `0..4`.
    pub fn basis(k: usize) -> Result<Self> {
        if k >= 4 {
            return Err(invalid(format!("basis index {k} out of range")));
        }
        let mut amps = [re(0.0); 4];
        amps[k] = re(1.0);
        Self::from_pure(&amps)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            mat: ComplexMatrix::identity(Dim::Four).scale(re(0.25)),
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn report(&self) -> ValidationReport {
        validate_density(&self.mat, self.tolerance).expect("density matrices are 4x4")
    }

    /// Convex combination `sum w_i rho_i`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| !(w.is_finite() && *w >= 0.0))
            || (total - 1.0).abs() > ALGEBRAIC_TOLERANCE
        {
            return Err(invalid(format!(
                "mixture weights must be non-negative and sum to 1 (sum = {total})"
            )));
        }
        let mat = parts
            .iter()
            .fold(ComplexMatrix::zeros(Dim::Four), |acc, (w, rho)| {
                acc + rho.mat.scale(re(*w))
            });
        Self::new(mat)
    }

    /// Unitary evolution `u rho u^dagger`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != Dim::Four {
            return Err(invalid("two-qubit evolution needs a 4x4 unitary"));
        }
        Self::with_tolerance(self.mat.conjugate_by(u), self.tolerance)
    }
}

/// Checks `sum K^dagger K = I` for a single-qubit Kraus set.
pub fn check_completeness(ks: &[ComplexMatrix]) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::ChannelInvalid("empty Kraus set".into()));
    }
    if ks.iter().any(|k| k.dim() != Dim::Two) {
        return Err(Error::ChannelInvalid(
            "Kraus operators must be single-qubit (2x2)".into(),
        ));
    }
    let sum = ks
        .iter()
        .fold(ComplexMatrix::zeros(Dim::Two), |acc, k| acc + k.adjoint() * *k);
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(Dim::Two));
    if dev > ALGEBRAIC_TOLERANCE {
        return Err(Error::ChannelInvalid(format!(
            "Kraus set is not complete: |sum K^dagger K - I|_max = {dev:.3e}"
        )));
    }
    Ok(())
}

/// Applies `rho -> sum_i K_i rho K_i^dagger` with each `K_i` acting on `target`.
pub fn apply_kraus(
    rho: &DensityMatrix,
    ks: &[ComplexMatrix],
    target: usize,
) -> Result<DensityMatrix> {
    check_completeness(ks)?;
    let mut out = ComplexMatrix::zeros(Dim::Four);
    for k in ks {
        let full = ComplexMatrix::embed(k, target)?;
        out = out + rho.mat.conjugate_by(&full);
    }
    DensityMatrix::with_tolerance(out, rho.tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]).unwrap()
    }

    #[test]
    fn tensor_identity() {
        let i2 = ComplexMatrix::identity(Dim::Two);
        let i4 = tensor(&i2, &i2).unwrap();
        assert_eq!(i4.max_abs_diff(&ComplexMatrix::identity(Dim::Four)), 0.0);
    }

    #[test]
    fn tensor_basis_order_puts_qubit0_left() {
        let zi = tensor(&pauli_z(), &ComplexMatrix::identity(Dim::Two)).unwrap();
        let expected =
            ComplexMatrix::diagonal(&[re(1.0), re(1.0), re(-1.0), re(-1.0)]).unwrap();
        assert_eq!(zi.max_abs_diff(&expected), 0.0);
    }

    #[test]
    fn tensor_xx_maps_11_to_00() {
        let xx = tensor(&pauli_x(), &pauli_x()).unwrap();
        // column 3 of XX is the image of |11>
        for i in 0..4 {
            let expected = if i == 0 { re(1.0) } else { re(0.0) };
            assert_eq!(xx[(i, 3)], expected);
        }
    }

    #[test]
    fn tensor_rejects_4x4_operand() {
        let i4 = ComplexMatrix::identity(Dim::Four);
        let i2 = ComplexMatrix::identity(Dim::Two);
        assert!(matches!(tensor(&i4, &i2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn from_entries_rejects_bad_length() {
        assert!(ComplexMatrix::from_entries(&[re(1.0); 9]).is_err());
    }

    #[test]
    fn validate_maximally_mixed() {
        let r = validate_density(DensityMatrix::maximally_mixed().matrix(), 1e-9).unwrap();
        assert!(r.hermitian);
        assert!(r.trace_dev.abs() < 1e-15);
        assert!((r.min_eig - 0.25).abs() < 1e-12);
    }

    #[test]
    fn validate_pure_projector() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::from_pure(&[re(h), re(0.0), re(0.0), c(0.0, h)]).unwrap();
        let r = rho.report();
        assert!(r.hermitian);
        assert!(r.trace_dev < 1e-15);
        assert!(r.min_eig.abs() < 1e-12);
    }

    #[test]
    fn validate_reports_trace_excess() {
        let m = ComplexMatrix::identity(Dim::Four).scale(re(1.5 / 4.0));
        let r = validate_density(&m, 1e-9).unwrap();
        assert!((r.trace_dev - 0.5).abs() < 1e-15);
        assert!(!r.is_valid(1e-9));
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotAState(_))));
    }

    #[test]
    fn validate_flags_non_hermitian() {
        let mut m = DensityMatrix::maximally_mixed().matrix().to_owned();
        m[(0, 1)] = re(0.1);
        assert!(!validate_density(&m, 1e-9).unwrap().hermitian);
    }

    #[test]
    fn validate_rejects_2x2() {
        assert!(validate_density(&ComplexMatrix::identity(Dim::Two), 1e-9).is_err());
    }

    #[test]
    fn kraus_identity_channel() {
        let rho = DensityMatrix::basis(2).unwrap();
        let out = apply_kraus(&rho, &[ComplexMatrix::identity(Dim::Two)], 0).unwrap();
        assert_eq!(out.matrix().max_abs_diff(rho.matrix()), 0.0);
    }

    #[test]
    fn kraus_full_amplitude_damping_on_qubit0() {
        let a0 = ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        let a1 = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let rho = DensityMatrix::basis(2).unwrap(); // |10>
        let out = apply_kraus(&rho, &[a0, a1], 0).unwrap();
        let expected = DensityMatrix::basis(0).unwrap();
        assert!(out.matrix().max_abs_diff(expected.matrix()) < 1e-15);
    }

    #[test]
    fn kraus_dephasing_scales_coherence() {
        // single-qubit coherence on qubit 0: (|0>+|1>)/sqrt2 ⊗ |0>
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::from_pure(&[re(h), re(0.0), re(h), re(0.0)]).unwrap();
        let p = 0.3_f64;
        let e0 = ComplexMatrix::identity(Dim::Two).scale(re((1.0 - p).sqrt()));
        let e1 = ComplexMatrix::from_real_rows(&[[p.sqrt(), 0.0], [0.0, 0.0]]).unwrap();
        let e2 = ComplexMatrix::from_real_rows(&[[0.0, 0.0], [0.0, p.sqrt()]]).unwrap();
        let out = apply_kraus(&rho, &[e0, e1, e2], 0).unwrap();
        assert!((out.entry(0, 2) - re(0.5 * (1.0 - p))).norm() < 1e-15);
        assert!((out.entry(0, 0) - re(0.5)).norm() < 1e-15);
    }

    #[test]
    fn kraus_rejects_incomplete_set() {
        let rho = DensityMatrix::maximally_mixed();
        let half = ComplexMatrix::identity(Dim::Two).scale(re(0.5));
        assert!(matches!(
            apply_kraus(&rho, &[half], 0),
            Err(Error::ChannelInvalid(_))
        ));
    }

    #[test]
    fn kraus_rejects_bad_target() {
        let rho = DensityMatrix::maximally_mixed();
        let id = ComplexMatrix::identity(Dim::Two);
        assert!(matches!(
            apply_kraus(&rho, &[id], 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mixture_requires_unit_weights() {
        let a = DensityMatrix::basis(0).unwrap();
        let b = DensityMatrix::basis(3).unwrap();
        assert!(DensityMatrix::mixture(&[(0.5, &a), (0.4, &b)]).is_err());
        let m = DensityMatrix::mixture(&[(0.5, &a), (0.5, &b)]).unwrap();
        assert!((m.entry(3, 3) - re(0.5)).norm() < 1e-15);
    }
}
