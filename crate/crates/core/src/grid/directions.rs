//! Gaussian-integer stencil directions in `ℂⁿ`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex grid direction with Gaussian-integer entries, stored as `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction {
    w: Vec<(i32, i32)>,
}

impl Direction {
    pub fn new(w: Vec<(i32, i32)>) -> Self {
        Direction { w }
    }

    pub fn components(&self) -> &[(i32, i32)] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn as_complex(&self) -> Vec<Complex64> {
        self.w
            .iter()
            .map(|&(a, b)| Complex64::new(a as f64, b as f64))
            .collect()
    }

    /// `|w|²`.
    pub fn norm2(&self) -> i32 {
        self.w.iter().map(|&(a, b)| a * a + b * b).sum()
    }

    /// The real grid offset of `w` in the interleaved `(x1, y1, x2, y2, …)` layout.
    pub fn real_offset(&self) -> Vec<i32> {
        self.w.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// The real grid offset of `i·w`.
    pub fn rotated_offset(&self) -> Vec<i32> {
        self.w.iter().flat_map(|&(a, b)| [-b, a]).collect()
    }

    /// Offsets of `w̄` and `i·w̄`. Their second differences give the Levi form
    /// `w* u_{zz̄} w = Σ u_{z_j z̄_k} w̄_j w_k` as `¼(D²_{w̄} + D²_{iw̄}) u`.
    pub fn levi_offsets(&self) -> [Vec<i32>; 2] {
        [
            self.w.iter().flat_map(|&(a, b)| [a, -b]).collect(),
            self.w.iter().flat_map(|&(a, b)| [b, a]).collect(),
        ]
    }

    /// Largest per-axis step of either arm.
    pub fn reach(&self) -> i32 {
        self.w
            .iter()
            .map(|&(a, b)| a.abs().max(b.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Exact key of the projective class `w w* / |w|²`: every entry divided by the
    /// first non-zero one, as a reduced Gaussian rational.
    fn projective_key(&self) -> Vec<(i64, i64, i64)> {
        let (pa, pb) = *self
            .w
            .iter()
            .find(|&&(a, b)| a != 0 || b != 0)
            .expect("zero direction");
        let (pa, pb) = (pa as i64, pb as i64);
        let den = pa * pa + pb * pb;
        self.w
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a as i64, b as i64);
                // (a + ib)(pa − i pb)
                let re = a * pa + b * pb;
                let im = b * pa - a * pb;
                let g = gcd(gcd(re.abs(), im.abs()), den);
                (re / g, im / g, den / g)
            })
            .collect()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// The stencil direction set at a refinement level.
///
/// ```text
/// K = 1   entries in {0, ±1, ±i}, at most two non-zero (axes and diagonals)
/// K = 2   entries in {0, ±1, ±i}, any support
/// K ≥ 3   entries a + ib with |a|, |b| ≤ K − 1 (n ≤ 2) or K − 2 (n = 3)
/// ```
///
/// Directions are unique up to complex scaling; the representative of each class is
/// the one of smallest norm. For `n = 1` every level yields the single direction `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    n: usize,
    refinement: usize,
    dirs: Vec<Direction>,
}

impl DirectionSet {
    pub fn new(n: usize, refinement: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if refinement == 0 {
            return Err(Error::invalid("stencil refinement K must be ≥ 1"));
        }
        let entries: Vec<(i32, i32)> = if refinement <= 2 {
            vec![(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
        } else {
            let m = refinement as i32 - if n <= 2 { 1 } else { 2 };
            let mut v = Vec::new();
            for a in -m..=m {
                for b in -m..=m {
                    v.push((a, b));
                }
            }
            v
        };
        let max_support = if refinement == 1 { 2 } else { n };

        let mut classes: BTreeMap<Vec<(i64, i64, i64)>, Direction> = BTreeMap::new();
        let mut idx = vec![0usize; n];
        loop {
            let w: Vec<(i32, i32)> = idx.iter().map(|&i| entries[i]).collect();
            let support = w.iter().filter(|&&e| e != (0, 0)).count();
            if support > 0 && support <= max_support {
                let d = Direction::new(w);
                let key = d.projective_key();
                match classes.get(&key) {
                    Some(old)
                        if old.norm2() < d.norm2() || (old.norm2() == d.norm2() && *old >= d) => {}
                    _ => {
                        classes.insert(key, d);
                    }
                }
            }
            // odometer over entry indices
            let mut pos = 0;
            loop {
                if pos == n {
                    let mut dirs: Vec<Direction> = classes.into_values().collect();
                    dirs.sort_by(|a, b| a.norm2().cmp(&b.norm2()).then_with(|| b.cmp(a)));
                    return Ok(DirectionSet {
                        n,
                        refinement,
                        dirs,
                    });
                }
                idx[pos] += 1;
                if idx[pos] < entries.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn refinement(&self) -> usize {
        self.refinement
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.dirs
    }

    pub fn get(&self, i: usize) -> &Direction {
        &self.dirs[i]
    }

    pub fn reach(&self) -> i32 {
        self.dirs.iter().map(Direction::reach).max().unwrap_or(0)
    }

    /// All real stencil arms `±w̄, ±iw̄` used by the Levi forms; this list is closed
    /// under negation.
    pub fn arms(&self) -> Vec<Vec<i32>> {
        let mut out = Vec::with_capacity(4 * self.dirs.len());
        for d in &self.dirs {
            for v in d.levi_offsets() {
                out.push(v.iter().map(|x| -x).collect());
                out.push(v);
            }
        }
        out
    }
}
