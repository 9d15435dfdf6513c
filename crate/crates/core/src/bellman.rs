//! Finite families `𝓗` of positive Hermitian forms with `det H = n^{-n}` and the
//! minimum `min_{H ∈ 𝓗} tr(HQ)`, which bounds `det(Q)^{1/n}` from above.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::DirectionSet;
use crate::hermitian::HermitianForm;

/// Minimal Hadamard ratio `|det W|² / Π|w_i|²` of an admissible frame.
const FRAME_HADAMARD_MIN: f64 = 0.5;

/// `n` stencil directions spanning `ℂⁿ`, with the scale that normalizes the
/// determinant of `Σ λ_i w_i w_i*` for `Π λ_i = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub dirs: Vec<usize>,
    pub scale: f64,
}

/// Index of one member: a frame and a weight pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MemberRef {
    pub frame: usize,
    pub pattern: usize,
}

/// The family `{ s_f Σ_i λ_i w_{f_i} w_{f_i}* }` over admissible frames `f` and
/// weight patterns `λ` with `Π λ_i = 1`.
///
/// Every member is a nonnegative combination of `w w*` over the direction set, so
/// `tr(H · Hess u)` is a nonnegative combination of directional Levi forms.
#[derive(Clone, Debug)]
pub struct BellmanFamily {
    n: usize,
    refinement: usize,
    directions: DirectionSet,
    dir_complex: Vec<Vec<Complex64>>,
    frames: Vec<Frame>,
    patterns: Vec<Vec<f64>>,
    max_weight_sum: f64,
}

fn weight_patterns(n: usize, k: usize) -> Vec<Vec<f64>> {
    let k = k as i32;
    match n {
        1 => vec![vec![1.0]],
        2 => (-2 * k..=2 * k)
            .map(|j| {
                let e = 0.25 * j as f64;
                vec![2f64.powf(e), 2f64.powf(-e)]
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            for j1 in -k..=k {
                for j2 in -k..=k {
                    let mean = (j1 + j2) as f64 / 3.0;
                    out.push(vec![
                        2f64.powf(j1 as f64 - mean),
                        2f64.powf(j2 as f64 - mean),
                        2f64.powf(-mean),
                    ]);
                }
            }
            out
        }
    }
}

fn frame_det(cols: &[&Vec<Complex64>]) -> Complex64 {
    let c = |i: usize, j: usize| cols[j][i];
    match cols.len() {
        1 => c(0, 0),
        2 => c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0),
        _ => {
            c(0, 0) * (c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1))
                - c(0, 1) * (c(1, 0) * c(2, 2) - c(1, 2) * c(2, 0))
                + c(0, 2) * (c(1, 0) * c(2, 1) - c(1, 1) * c(2, 0))
        }
    }
}

/// Builds the family at refinement `K` from the direction set of the same level.
pub fn build_bellman_family(n: usize, k: usize) -> Result<BellmanFamily> {
    let directions = DirectionSet::new(n, k)?;
    let dir_complex: Vec<Vec<Complex64>> = directions
        .directions()
        .iter()
        .map(|d| d.as_complex())
        .collect();
    let norms: Vec<f64> = directions
        .directions()
        .iter()
        .map(|d| d.norm2() as f64)
        .collect();
    let target = (n as f64).powi(-(n as i32));
    let m = dir_complex.len();

    let mut frames = Vec::new();
    let mut push = |idx: Vec<usize>| {
        let cols: Vec<&Vec<Complex64>> = idx.iter().map(|&i| &dir_complex[i]).collect();
        let d2 = frame_det(&cols).norm_sqr();
        let ratio = d2 / idx.iter().map(|&i| norms[i]).product::<f64>();
        if ratio >= FRAME_HADAMARD_MIN - 1e-12 {
            frames.push(Frame {
                scale: (target / d2).powf(1.0 / n as f64),
                dirs: idx,
            });
        }
    };
    match n {
        1 => push(vec![0]),
        2 => {
            for i in 0..m {
                for j in (i + 1)..m {
                    push(vec![i, j]);
                }
            }
        }
        _ => {
            for i in 0..m {
                for j in (i + 1)..m {
                    for l in (j + 1)..m {
                        push(vec![i, j, l]);
                    }
                }
            }
        }
    }
    let patterns = weight_patterns(n, k);
    let max_weight_sum = frames
        .iter()
        .flat_map(|f| patterns.iter().map(move |p| f.scale * p.iter().sum::<f64>()))
        .fold(0.0, f64::max);
    Ok(BellmanFamily {
        n,
        refinement: k,
        directions,
        dir_complex,
        frames,
        patterns,
        max_weight_sum,
    })
}

impl BellmanFamily {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn refinement(&self) -> usize {
        self.refinement
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn patterns(&self) -> &[Vec<f64>] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.frames.len() * self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest `Σ λ_i` over members: the center weight of the scheme is `−Σλ_i/h²`.
    pub fn max_weight_sum(&self) -> f64 {
        self.max_weight_sum
    }

    pub fn member_ref(&self, i: usize) -> MemberRef {
        MemberRef {
            frame: i / self.patterns.len(),
            pattern: i % self.patterns.len(),
        }
    }

    /// `(direction index, weight)` pairs of a member.
    pub fn member_terms(&self, m: MemberRef) -> impl Iterator<Item = (usize, f64)> + '_ {
        let f = &self.frames[m.frame];
        let p = &self.patterns[m.pattern];
        f.dirs.iter().zip(p).map(move |(&d, &l)| (d, f.scale * l))
    }

    pub fn member_form(&self, m: MemberRef) -> HermitianForm {
        self.member_terms(m)
            .fold(HermitianForm::zeros(self.n), |acc, (d, l)| {
                acc.add(&HermitianForm::outer(&self.dir_complex[d]).scale(l))
            })
    }

    pub fn member(&self, i: usize) -> HermitianForm {
        self.member_form(self.member_ref(i))
    }

    pub fn members(&self) -> impl Iterator<Item = HermitianForm> + '_ {
        (0..self.len()).map(|i| self.member(i))
    }

    /// `min_m Σ_i λ_i a[d_i]` given one value per direction, with its minimizer.
    pub fn minimize(&self, a: &[f64]) -> (f64, MemberRef) {
        let mut best = f64::INFINITY;
        let mut arg = MemberRef { frame: 0, pattern: 0 };
        for (fi, f) in self.frames.iter().enumerate() {
            for (pi, p) in self.patterns.iter().enumerate() {
                let v = f.scale * f.dirs.iter().zip(p).map(|(&d, &l)| l * a[d]).sum::<f64>();
                if v < best {
                    best = v;
                    arg = MemberRef {
                        frame: fi,
                        pattern: pi,
                    };
                }
            }
        }
        (best, arg)
    }

    /// `w_d* Q w_d` for every direction.
    pub fn directional_values(&self, q: &HermitianForm) -> Vec<f64> {
        self.dir_complex.iter().map(|w| q.quad(w)).collect()
    }
}

/// `min_{H ∈ fam} tr(HQ)`.
pub fn bellman_value(q: &HermitianForm, fam: &BellmanFamily) -> Result<f64> {
    if fam.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if q.dim() != fam.dim() {
        return Err(Error::invalid("form and family dimensions differ"));
    }
    Ok(fam.minimize(&fam.directional_values(q)).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_family_is_unit() {
        for k in 1..=3 {
            let f = build_bellman_family(1, k).unwrap();
            assert_eq!(f.len(), 1);
            assert_eq!(f.member(0), HermitianForm::identity(1));
            let q = HermitianForm::diag(&[3.5]);
            assert_eq!(bellman_value(&q, &f).unwrap(), 3.5);
        }
    }

    #[test]
    fn members_are_normalized() {
        for (n, k) in [(2, 1), (2, 2), (2, 3), (3, 1)] {
            let f = build_bellman_family(n, k).unwrap();
            let target = (n as f64).powi(-(n as i32));
            for h in f.members() {
                assert!((h.det() - target).abs() <= 1e-12, "det {}", h.det());
                assert!(h.min_eigenvalue() > 0.0);
            }
        }
    }

    #[test]
    fn contains_scaled_identity() {
        for (n, k) in [(2, 1), (2, 3), (3, 1), (3, 2)] {
            let f = build_bellman_family(n, k).unwrap();
            let id = HermitianForm::scaled_identity(n, 1.0 / n as f64);
            assert!(f
                .members()
                .any(|h| h.add(&id.scale(-1.0)).max_abs_entry() < 1e-15));
        }
    }

    #[test]
    fn identity_value_is_one() {
        let f = build_bellman_family(2, 1).unwrap();
        let v = bellman_value(&HermitianForm::identity(2), &f).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn family_grows_with_refinement() {
        let sizes: Vec<usize> = (1..=3)
            .map(|k| build_bellman_family(2, k).unwrap().len())
            .collect();
        assert!(sizes[0] < sizes[1] && sizes[1] < sizes[2]);
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(
            build_bellman_family(4, 1),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn minimize_matches_member_forms() {
        let f = build_bellman_family(2, 2).unwrap();
        let q = HermitianForm::new(
            2,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(0.4, -0.3),
                Complex64::new(0.4, 0.3),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let (v, m) = f.minimize(&f.directional_values(&q));
        assert!((f.member_form(m).trace_product(&q) - v).abs() < 1e-13);
        let brute = f
            .members()
            .map(|h| h.trace_product(&q))
            .fold(f64::INFINITY, f64::min);
        assert!((brute - v).abs() < 1e-13);
    }
}
