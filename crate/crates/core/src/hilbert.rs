//! Dense operators on the truncated qubit ⊗ oscillator Hilbert space.
//!
//! The qubit always occupies the first tensor slot and the oscillator the
//! second, so the composite basis index is `q * n_max + n`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Number of oscillator basis states kept, `|0⟩ … |n_max − 1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::CutoffTooSmall(n_max));
        }
        Ok(Self(n_max))
    }

    pub fn n_max(self) -> usize {
        self.0
    }
}

/// Which factor of the bipartite space to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Qubit,
    Oscillator,
}

/// Tensor structure carried alongside the matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Unstructured,
    /// First factor (qubit slot) of dimension `qubit`, second (oscillator) of dimension `mode`.
    Bipartite { qubit: usize, mode: usize },
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<C64>,
    layout: Layout,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
            layout: Layout::Unstructured,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self {
            dim,
            data,
            layout: Layout::Unstructured,
        })
    }

    pub fn from_real_rows(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn outer(psi: &[C64]) -> Self {
        let dim = psi.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Attaches a bipartite structure; the dimensions must multiply to `dim`.
    pub fn with_layout(mut self, layout: Layout) -> Result<Self> {
        if let Layout::Bipartite { qubit, mode } = layout {
            if qubit * mode != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: qubit * mode,
                });
            }
        }
        self.layout = layout;
        Ok(self)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out.layout = self.layout;
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
            layout: self.layout,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out.layout = if self.layout == rhs.layout {
            self.layout
        } else {
            Layout::Unstructured
        };
        out
    }

    /// `A·B − B·A`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise deviation `|M_ij − conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn ensure_density(&self) -> Result<()> {
        self.ensure_hermitian()
            .map_err(|e| Error::NotDensityMatrix(e.to_string()))?;
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotDensityMatrix(format!("trace = {tr}")));
        }
        let lowest = crate::eigen::eigenvalues(self)?
            .first()
            .copied()
            .unwrap_or(0.0);
        if lowest < -PSD_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(())
    }

    /// Kronecker product `self ⊗ rhs`; the result records the two factor dimensions.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        let n = da * db;
        let mut out = Self::zeros(n);
        for i in 0..da {
            for j in 0..da {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out.data[(i * db + k) * n + j * db + l] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out.layout = Layout::Bipartite { qubit: da, mode: db };
        out
    }

    /// Reduced operator on `keep`, tracing out the other factor.
    pub fn partial_trace(&self, keep: Subsystem) -> Result<Self> {
        let Layout::Bipartite { qubit, mode } = self.layout else {
            return Err(Error::Unstructured);
        };
        let n = self.dim;
        let out = match keep {
            Subsystem::Qubit => {
                let mut out = Self::zeros(qubit);
                for a in 0..qubit {
                    for b in 0..qubit {
                        out[(a, b)] = (0..mode)
                            .map(|k| self.data[(a * mode + k) * n + b * mode + k])
                            .sum();
                    }
                }
                out
            }
            Subsystem::Oscillator => {
                let mut out = Self::zeros(mode);
                for k in 0..mode {
                    for l in 0..mode {
                        out[(k, l)] = (0..qubit)
                            .map(|a| self.data[(a * mode + k) * n + a * mode + l])
                            .sum();
                    }
                }
                out
            }
        };
        Ok(out)
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        let mut out = u.matmul(self).matmul(&u.adjoint());
        out.layout = self.layout;
        out
    }
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for OperatorMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

fn zip_with(a: &OperatorMatrix, b: &OperatorMatrix, f: impl Fn(C64, C64) -> C64) -> OperatorMatrix {
    assert_eq!(a.dim, b.dim, "elementwise dimension mismatch");
    OperatorMatrix {
        dim: a.dim,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
        layout: if a.layout == b.layout {
            a.layout
        } else {
            Layout::Unstructured
        },
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: Self) -> OperatorMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: Self) -> OperatorMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: Self) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

/// Truncated bosonic annihilation operator, `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(cutoff: FockCutoff) -> OperatorMatrix {
    let n = cutoff.n_max();
    let mut a = OperatorMatrix::zeros(n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(cutoff: FockCutoff) -> OperatorMatrix {
    annihilation(cutoff).adjoint()
}

/// `a†a`, built directly as `diag(0, 1, …, n_max − 1)`.
pub fn number(cutoff: FockCutoff) -> OperatorMatrix {
    let diag: Vec<f64> = (0..cutoff.n_max()).map(|k| k as f64).collect();
    OperatorMatrix::from_diagonal(&diag)
}

/// Position-like quadrature `a + a†`.
pub fn quadrature(cutoff: FockCutoff) -> OperatorMatrix {
    let n = cutoff.n_max();
    let mut x = OperatorMatrix::zeros(n);
    for k in 1..n {
        let s = C64::new((k as f64).sqrt(), 0.0);
        x[(k - 1, k)] = s;
        x[(k, k - 1)] = s;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Z,
}

pub fn pauli(axis: PauliAxis) -> OperatorMatrix {
    match axis {
        PauliAxis::X => OperatorMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]),
        PauliAxis::Z => OperatorMatrix::from_real_rows(2, &[1.0, 0.0, 0.0, -1.0]),
    }
    .expect("2x2 literal")
}

pub fn tensor(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a.tensor(b)
}

pub fn partial_trace(rho: &OperatorMatrix, keep: Subsystem) -> Result<OperatorMatrix> {
    rho.partial_trace(keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cut(n: usize) -> FockCutoff {
        FockCutoff::new(n).unwrap()
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn cutoff_rejects_below_two() {
        assert_eq!(FockCutoff::new(1), Err(Error::CutoffTooSmall(1)));
        assert_eq!(FockCutoff::new(0), Err(Error::CutoffTooSmall(0)));
        assert!(FockCutoff::new(2).is_ok());
    }

    #[test]
    fn ladder_entries() {
        let a = annihilation(cut(3));
        for i in 0..3 {
            for j in 0..3 {
                let expected = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 2) => 2f64.sqrt(),
                    _ => 0.0,
                };
                assert_eq!(a[(i, j)], re(expected));
            }
        }
    }

    #[test]
    fn truncated_nilpotency() {
        let a = annihilation(cut(2));
        assert_eq!(a.matmul(&a).max_abs(), 0.0);
    }

    #[test]
    fn number_operator_diagonal() {
        let c = cut(8);
        let n = creation(c).matmul(&annihilation(c));
        for i in 0..8 {
            for j in 0..8 {
                let expected = if i == j { i as f64 } else { 0.0 };
                assert!((n[(i, j)] - re(expected)).norm() < 1e-14);
            }
        }
        assert!((&n - &number(c)).max_abs() < 1e-14);
        assert!(n.is_hermitian());
    }

    #[test]
    fn paulis() {
        let x = pauli(PauliAxis::X);
        let z = pauli(PauliAxis::Z);
        assert_eq!(x.as_slice(), &[re(0.0), re(1.0), re(1.0), re(0.0)]);
        assert_eq!(z.as_slice(), &[re(1.0), re(0.0), re(0.0), re(-1.0)]);
        assert_eq!(x.matmul(&x), OperatorMatrix::identity(2));
    }

    #[test]
    fn tensor_identities() {
        let i6 = OperatorMatrix::identity(2).tensor(&OperatorMatrix::identity(3));
        assert_eq!(i6.as_slice(), OperatorMatrix::identity(6).as_slice());
        assert_eq!(i6.layout(), Layout::Bipartite { qubit: 2, mode: 3 });

        let zi = pauli(PauliAxis::Z).tensor(&OperatorMatrix::identity(2));
        let expected = OperatorMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(zi.as_slice(), expected.as_slice());
    }

    #[test]
    fn tensor_matches_index_formula() {
        let x = pauli(PauliAxis::X);
        let a = annihilation(cut(3));
        let t = x.tensor(&a);
        assert_eq!(t.dim(), 6);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(t[(i * 3 + k, j * 3 + l)], x[(i, j)] * a[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_maximally_mixed() {
        let rho = OperatorMatrix::identity(4)
            .scale_real(0.25)
            .with_layout(Layout::Bipartite { qubit: 2, mode: 2 })
            .unwrap();
        let r = rho.partial_trace(Subsystem::Qubit).unwrap();
        assert_eq!(r.as_slice(), OperatorMatrix::identity(2).scale_real(0.5).as_slice());
    }

    #[test]
    fn partial_trace_of_product() {
        let mut ra = OperatorMatrix::zeros(2);
        ra[(0, 0)] = re(0.7);
        ra[(1, 1)] = re(0.3);
        ra[(0, 1)] = C64::new(0.1, 0.2);
        ra[(1, 0)] = C64::new(0.1, -0.2);
        let rb = OperatorMatrix::from_diagonal(&[0.5, 0.25, 0.25]);
        let rho = ra.tensor(&rb);
        let back = rho.partial_trace(Subsystem::Qubit).unwrap();
        assert!((&back - &ra).max_abs() < 1e-12);
        let back_b = rho.partial_trace(Subsystem::Oscillator).unwrap();
        assert!((&back_b - &rb).max_abs() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_unstructured() {
        let rho = OperatorMatrix::identity(4).scale_real(0.25);
        assert_eq!(rho.partial_trace(Subsystem::Qubit), Err(Error::Unstructured));
    }

    #[test]
    fn density_checks() {
        let good = OperatorMatrix::from_diagonal(&[0.5, 0.5]);
        assert!(good.ensure_density().is_ok());
        let bad_trace = OperatorMatrix::from_diagonal(&[0.5, 0.6]);
        assert!(bad_trace.ensure_density().is_err());
        let negative = OperatorMatrix::from_diagonal(&[1.2, -0.2]);
        assert!(negative.ensure_density().is_err());
        let mut skew = OperatorMatrix::from_diagonal(&[0.5, 0.5]);
        skew[(0, 1)] = re(0.1);
        assert!(matches!(
            skew.ensure_density(),
            Err(Error::NotDensityMatrix(_))
        ));
    }
}
