//! Small dense Hermitian matrices: determinant, spectrum, positivity.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute eigenvalue tolerance used by the positivity tests.
pub const PSD_TOL: f64 = 1e-12;

/// An `n × n` complex Hermitian matrix stored row-major.
///
/// Construction symmetrizes the input, so `entries[j][k] == conj(entries[k][j])`
/// holds exactly and the diagonal is real.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    n: usize,
    a: Vec<Complex64>,
}

impl HermitianForm {
    /// Builds a form from row-major entries, replacing `A` by `(A + A*)/2`.
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Hermitian form must have dimension ≥ 1"));
        }
        if entries.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries for a {n}×{n} form, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("Hermitian form entries must be finite"));
        }
        Ok(Self::symmetrized(n, entries))
    }

    fn symmetrized(n: usize, mut a: Vec<Complex64>) -> Self {
        for j in 0..n {
            a[j * n + j] = Complex64::new(a[j * n + j].re, 0.0);
            for k in (j + 1)..n {
                let m = (a[j * n + k] + a[k * n + j].conj()) * 0.5;
                a[j * n + k] = m;
                a[k * n + j] = m.conj();
            }
        }
        HermitianForm { n, a }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut a = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                a.push(f(j, k));
            }
        }
        Self::symmetrized(n, a)
    }

    pub fn zeros(n: usize) -> Self {
        HermitianForm {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        Self::from_fn(n, |j, k| Complex64::new(if j == k { s } else { 0.0 }, 0.0))
    }

    pub fn diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), |j, k| {
            Complex64::new(if j == k { d[j] } else { 0.0 }, 0.0)
        })
    }

    /// The rank-one form `w w*`.
    pub fn outer(w: &[Complex64]) -> Self {
        Self::from_fn(w.len(), |j, k| w[j] * w[k].conj())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.a[j * self.n + k]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.a
    }

    pub fn add(&self, other: &HermitianForm) -> HermitianForm {
        assert_eq!(self.n, other.n, "dimension mismatch in Hermitian add");
        HermitianForm {
            n: self.n,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> HermitianForm {
        HermitianForm {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    /// `w* A w`, real because `A` is Hermitian.
    pub fn quad(&self, w: &[Complex64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for j in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..n {
                row += self.a[j * n + k] * w[k];
            }
            s += (w[j].conj() * row).re;
        }
        s
    }

    /// `tr(A B)` for two Hermitian forms (always real).
    pub fn trace_product(&self, other: &HermitianForm) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                s += (self.a[j * n + k] * other.a[k * n + j]).re;
            }
        }
        s
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|j| self.a[j * self.n + j].re).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        match n {
            1 => return self.a[0].re,
            2 => return (self.a[0] * self.a[3] - self.a[1] * self.a[2]).re,
            _ => {}
        }
        let mut m = self.a.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| m[i * n + c].norm().total_cmp(&m[j * n + c].norm()))
                .unwrap_or(c);
            if m[p * n + c].norm() == 0.0 {
                return 0.0;
            }
            if p != c {
                for k in 0..n {
                    m.swap(p * n + k, c * n + k);
                }
                det = -det;
            }
            let piv = m[c * n + c];
            det *= piv;
            for r in (c + 1)..n {
                let f = m[r * n + c] / piv;
                for k in c..n {
                    let v = m[c * n + k];
                    m[r * n + k] -= f * v;
                }
            }
        }
        det.re
    }

    fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.a)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.a[0].re];
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_matrix())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenpairs in ascending eigenvalue order; each eigenvector has unit norm.
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<Complex64>>) {
        let se = SymmetricEigen::new(self.to_matrix());
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
        let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vecs = order
            .iter()
            .map(|&i| se.eigenvectors.column(i).iter().copied().collect())
            .collect();
        (vals, vecs)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// `det(Q)` if `Q` is positive semidefinite, otherwise `0`.
pub fn det_plus(q: &HermitianForm) -> f64 {
    if q.min_eigenvalue() >= -PSD_TOL {
        q.det().max(0.0)
    } else {
        0.0
    }
}

/// Outcome of [`is_semipositive`].
#[derive(Clone, Debug)]
pub struct Semipositivity {
    pub semipositive: bool,
    pub min_eigenvalue: f64,
    /// For a negative verdict: a semipositive `H` with `det(Q + H) < 0`.
    pub witness: Option<HermitianForm>,
}

/// Positivity test with a certificate for the negative case.
///
/// The witness keeps half of the most negative eigenvalue in its eigendirection and
/// lifts every other eigenvalue to at least `1`:
///
/// ```text
/// H = (|λ_min|/2) v_min v_min* + Σ_{i≠min} max(0, 1 − λ_i) v_i v_i*
/// det(Q + H) = (λ_min/2) · Π_{i≠min} max(λ_i, 1) < 0
/// ```
pub fn is_semipositive(q: &HermitianForm) -> Semipositivity {
    let (vals, vecs) = q.eigen();
    let min = vals[0];
    if min >= -PSD_TOL {
        return Semipositivity {
            semipositive: true,
            min_eigenvalue: min,
            witness: None,
        };
    }
    let n = q.dim();
    let mut h = HermitianForm::outer(&vecs[0]).scale(-min / 2.0);
    for i in 1..n {
        let lift = (1.0 - vals[i]).max(0.0);
        if lift > 0.0 {
            h = h.add(&HermitianForm::outer(&vecs[i]).scale(lift));
        }
    }
    Semipositivity {
        semipositive: false,
        min_eigenvalue: min,
        witness: Some(h),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_symmetrizes() {
        let h = HermitianForm::new(2, vec![c(1.0, 0.3), c(1.0, 2.0), c(3.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        assert_eq!(h.get(0, 0), c(1.0, 0.0));
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        assert_eq!(h.get(0, 1), c(2.0, 1.0));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(HermitianForm::new(2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(HermitianForm::new(0, vec![]).is_err());
        assert!(HermitianForm::new(1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn det_plus_examples() {
        assert_eq!(det_plus(&HermitianForm::diag(&[1.0, -1.0])), 0.0);
        assert_eq!(det_plus(&HermitianForm::identity(2)), 1.0);
        assert_eq!(det_plus(&HermitianForm::diag(&[4.0, 1.0])), 4.0);
    }

    #[test]
    fn det_three_by_three_matches_eigen_product() {
        let h = HermitianForm::new(
            3,
            vec![
                c(3.0, 0.0),
                c(0.5, 0.2),
                c(0.1, -0.4),
                c(0.5, -0.2),
                c(2.0, 0.0),
                c(0.3, 0.3),
                c(0.1, 0.4),
                c(0.3, -0.3),
                c(1.5, 0.0),
            ],
        )
        .unwrap();
        let prod: f64 = h.eigenvalues().iter().product();
        assert!((h.det() - prod).abs() < 1e-12);
    }

    #[test]
    fn semipositive_examples() {
        let q = HermitianForm::diag(&[1.0, -1.0]);
        let s = is_semipositive(&q);
        assert!(!s.semipositive);
        let w = s.witness.unwrap();
        assert!((w.get(0, 0).re - 0.0).abs() < 1e-15);
        assert!((w.get(1, 1).re - 0.5).abs() < 1e-15);
        assert!(q.add(&w).det() < 0.0);

        assert!(is_semipositive(&HermitianForm::identity(3)).semipositive);
        assert!(is_semipositive(&HermitianForm::zeros(2)).semipositive);
    }

    #[test]
    fn eigenvalues_sorted() {
        let h = HermitianForm::diag(&[3.0, -1.0, 2.0]);
        assert_eq!(h.eigenvalues(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn quad_and_trace_product_agree_on_rank_one() {
        let w = [c(1.0, 1.0), c(0.0, -1.0)];
        let q = HermitianForm::new(2, vec![c(2.0, 0.0), c(0.3, 0.7), c(0.3, -0.7), c(1.0, 0.0)])
            .unwrap();
        let t = HermitianForm::outer(&w).trace_product(&q);
        assert!((t - q.quad(&w)).abs() < 1e-14);
    }
}
