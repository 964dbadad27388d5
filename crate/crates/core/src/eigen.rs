//! Dense Hermitian eigensolver.
//!
//! Householder reduction to tridiagonal form followed by implicit-shift QL
//! iterations. Complex input is reduced with Hermitian reflectors and the
//! resulting complex sub-diagonal is made real by a diagonal phase similarity,
//! so both paths share the real tridiagonal QL stage. Inputs whose imaginary
//! parts are all zero take a real-arithmetic path.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::hilbert::{OperatorMatrix, C64};

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-10;

trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    fn abs2(self) -> f64;
    fn re(self) -> f64;
    fn mul_re(self, s: f64) -> Self;
    fn to_c64(self) -> C64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn conj(self) -> Self {
        self
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn mul_re(self, s: f64) -> Self {
        self * s
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn re(self) -> f64 {
        self.re
    }
    fn mul_re(self, s: f64) -> Self {
        self * s
    }
    fn to_c64(self) -> C64 {
        self
    }
}

/// Unit-modulus phase of `x` (1 for x = 0).
fn phase<S: Scalar>(x: S) -> S {
    let r = x.abs2().sqrt();
    if r == 0.0 {
        S::one()
    } else {
        x.mul_re(1.0 / r)
    }
}

struct Tridiagonal<S> {
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Rows are the columns of the accumulated transform `Q·D`.
    basis: Option<Vec<Vec<S>>>,
}

/// Reduces the Hermitian row-major matrix `a` (destroyed) to a real
/// symmetric tridiagonal matrix `T` with `A = (QD) T (QD)†`.
fn tridiagonalize<S: Scalar>(a: &mut [S], n: usize, want_basis: bool) -> Tridiagonal<S> {
    let mut q: Option<Vec<S>> = want_basis.then(|| {
        let mut q = vec![S::zero(); n * n];
        for i in 0..n {
            q[i * n + i] = S::one();
        }
        q
    });
    let mut sub = vec![S::zero(); n.saturating_sub(1)];
    let mut u = vec![S::zero(); n];
    let mut p = vec![S::zero(); n];

    for k in 0..n.saturating_sub(1) {
        let lo = k + 1;
        let x0 = a[lo * n + k];
        let tail2: f64 = (lo + 1..n).map(|i| a[i * n + k].abs2()).sum();
        if tail2 == 0.0 {
            sub[k] = x0;
            continue;
        }
        let xnorm = (x0.abs2() + tail2).sqrt();
        let ph = phase(x0);
        // P x = gamma e1 with P = I - beta u u†, u = x - gamma e1.
        let gamma = -ph.mul_re(xnorm);
        for i in lo..n {
            u[i] = a[i * n + k];
        }
        u[lo] = x0 - gamma;
        let h: f64 = (lo..n).map(|i| u[i].abs2()).sum();
        let beta = 2.0 / h;

        for i in lo..n {
            let row = &a[i * n..(i + 1) * n];
            let mut acc = S::zero();
            for j in lo..n {
                acc += row[j] * u[j];
            }
            p[i] = acc.mul_re(beta);
        }
        let mut up = S::zero();
        for i in lo..n {
            up += u[i].conj() * p[i];
        }
        let kk = up.re() / h;
        for i in lo..n {
            p[i] -= u[i].mul_re(kk);
        }
        for i in lo..n {
            let (ui, pi) = (u[i], p[i]);
            let row = &mut a[i * n..(i + 1) * n];
            for j in lo..n {
                row[j] -= pi * u[j].conj() + ui * p[j].conj();
            }
        }
        sub[k] = gamma;

        if let Some(q) = q.as_mut() {
            for r in 0..n {
                let row = &mut q[r * n..(r + 1) * n];
                let mut s = S::zero();
                for j in lo..n {
                    s += row[j] * u[j];
                }
                let s = s.mul_re(beta);
                for j in lo..n {
                    row[j] -= s * u[j].conj();
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re()).collect();

    // Diagonal phase similarity making the sub-diagonal real and nonnegative.
    let mut phases = vec![S::one(); n];
    let mut off = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let t = sub[i];
        off[i] = t.abs2().sqrt();
        phases[i + 1] = phases[i] * phase(t);
    }

    let basis = q.map(|q| {
        (0..n)
            .map(|j| (0..n).map(|r| q[r * n + j] * phases[j]).collect())
            .collect()
    });
    Tridiagonal { diag, off, basis }
}

fn rotate_rows<S: Scalar>(basis: &mut [Vec<S>], i: usize, s: f64, c: f64) {
    let (head, tail) = basis.split_at_mut(i + 1);
    let lower = &mut head[i];
    let upper = &mut tail[0];
    for (zi, zi1) in lower.iter_mut().zip(upper.iter_mut()) {
        let f = *zi1;
        *zi1 = zi.mul_re(s) + f.mul_re(c);
        *zi = zi.mul_re(c) - f.mul_re(s);
    }
}

/// Implicit-shift QL on the symmetric tridiagonal (`diag`, `off`); `off[i]`
/// couples `i` and `i + 1`. Rotations are applied to `basis` rows.
fn tridiagonal_ql<S: Scalar>(
    diag: &mut [f64],
    off: &mut [f64],
    mut basis: Option<&mut Vec<Vec<S>>>,
) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations,
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = basis.as_deref_mut() {
                    rotate_rows(z, i, s, c);
                }
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenpairs of a Hermitian matrix, ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// `vectors[k]` is the normalized eigenvector for `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

fn solve<S: Scalar>(mut a: Vec<S>, n: usize, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<Vec<C64>>>)> {
    let Tridiagonal {
        mut diag,
        mut off,
        mut basis,
    } = tridiagonalize(&mut a, n, want_vectors);
    tridiagonal_ql(&mut diag, &mut off, basis.as_mut())?;
    let vectors = basis.map(|b| {
        b.into_iter()
            .map(|row| row.into_iter().map(Scalar::to_c64).collect())
            .collect()
    });
    Ok((diag, vectors))
}

fn dispatch(m: &OperatorMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<Vec<C64>>>)> {
    let n = m.dim();
    if m.is_real() {
        solve(m.as_slice().iter().map(|z| z.re).collect(), n, want_vectors)
    } else {
        solve(m.as_slice().to_vec(), n, want_vectors)
    }
}

/// Eigenvalues only, ascending. The input is assumed Hermitian.
pub fn eigenvalues(m: &OperatorMatrix) -> Result<Vec<f64>> {
    let (mut values, _) = dispatch(m, false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Full decomposition, ascending. Within degenerate clusters the vectors are
/// re-orthogonalized by Gram–Schmidt in index order, and every vector's
/// largest component is rotated to be real and positive.
pub fn eigh(m: &OperatorMatrix) -> Result<Eigh> {
    let (values, vectors) = dispatch(m, true)?;
    let vectors = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors: Vec<Vec<C64>> = order.iter().map(|&i| vectors[i].clone()).collect();

    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] < DEGENERACY_GAP {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut vectors[start..end]);
        }
        start = end;
    }
    for v in &mut vectors {
        fix_phase(v);
    }
    Ok(Eigh { values, vectors })
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn gram_schmidt(block: &mut [Vec<C64>]) {
    for k in 0..block.len() {
        let (done, rest) = block.split_at_mut(k);
        let v = &mut rest[0];
        for u in done.iter() {
            let proj = dot(u, v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = dot(v, v).re.sqrt();
        for vi in v.iter_mut() {
            *vi /= norm;
        }
    }
}

fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        // require a clear margin so near-ties keep the lowest index
        let nrm = z.norm_sqr();
        if nrm > best_norm * (1.0 + 1e-12) {
            best = i;
            best_norm = nrm;
        }
    }
    let ph = phase(v[best]).conj();
    for z in v.iter_mut() {
        *z *= ph;
    }
}
