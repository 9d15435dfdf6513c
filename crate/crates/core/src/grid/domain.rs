use crate::error::{Error, Result};

/// Maximum number of real axes (`2n` with `n ≤ 3`).
pub const MAX_AXES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainKind {
    /// Flat torus `(ℝ/side ℤ)^{2n}` sampled at `x_i = i·h`.
    Torus { side: f64 },
    /// Euclidean ball of radius `radius` centered at the origin, embedded in a cube
    /// that carries `margin` extra cells beyond the sphere on every side.
    Ball { radius: f64, margin: usize },
}

/// A structured grid over a torus or a ball in `ℂⁿ ≅ ℝ^{2n}`.
///
/// Real axes are interleaved as `(x1, y1, x2, y2, …)` and points are numbered
/// row-major (last axis fastest). On the ball the spacing is `h = 2R/resolution`,
/// cube coordinates are `−R − m·h + i·h` for `i = 0..resolution + 2m`, points with
/// `|x| < R` are interior and all others form the boundary collar.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    kind: DomainKind,
    dim: usize,
    resolution: usize,
    axis_len: usize,
    num_points: usize,
}

impl DomainSpec {
    pub fn torus(dim: usize, resolution: usize, side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::invalid("torus side must be positive"));
        }
        Self::build(DomainKind::Torus { side }, dim, resolution)
    }

    /// Ball with the default one-cell collar.
    pub fn ball(dim: usize, resolution: usize, radius: f64) -> Result<Self> {
        Self::ball_with_margin(dim, resolution, radius, 1)
    }

    pub fn ball_with_margin(dim: usize, resolution: usize, radius: f64, margin: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("ball radius must be positive"));
        }
        if margin == 0 {
            return Err(Error::invalid("ball margin must be at least one cell"));
        }
        Self::build(DomainKind::Ball { radius, margin }, dim, resolution)
    }

    fn build(kind: DomainKind, dim: usize, resolution: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if resolution < 2 {
            return Err(Error::invalid("resolution must be at least 2"));
        }
        let axis_len = match kind {
            DomainKind::Torus { .. } => resolution,
            DomainKind::Ball { margin, .. } => resolution + 1 + 2 * margin,
        };
        let num_points = axis_len
            .checked_pow(2 * dim as u32)
            .filter(|&p| p <= u32::MAX as usize)
            .ok_or_else(|| Error::invalid("grid too large"))?;
        Ok(DomainSpec {
            kind,
            dim,
            resolution,
            axis_len,
            num_points,
        })
    }

    /// The same geometry at another resolution.
    pub fn with_resolution(&self, resolution: usize) -> Result<Self> {
        Self::build(self.kind, self.dim, resolution)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.kind, DomainKind::Torus { .. })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn real_dim(&self) -> usize {
        2 * self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn axis_len(&self) -> usize {
        self.axis_len
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn spacing(&self) -> f64 {
        match self.kind {
            DomainKind::Torus { side } => side / self.resolution as f64,
            DomainKind::Ball { radius, .. } => 2.0 * radius / self.resolution as f64,
        }
    }

    /// Lebesgue volume of one grid cell, `h^{2n}`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.real_dim() as i32)
    }

    /// Coordinate of index `i` along any axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.kind {
            DomainKind::Torus { .. } => i as f64 * h,
            DomainKind::Ball { radius, margin } => -radius - margin as f64 * h + i as f64 * h,
        }
    }

    pub fn coords(&self, p: usize) -> [usize; MAX_AXES] {
        let mut c = [0usize; MAX_AXES];
        let mut r = p;
        for a in (0..self.real_dim()).rev() {
            c[a] = r % self.axis_len;
            r /= self.axis_len;
        }
        c
    }

    pub fn index(&self, c: &[usize]) -> usize {
        c[..self.real_dim()]
            .iter()
            .fold(0, |acc, &i| acc * self.axis_len + i)
    }

    /// Real coordinates of point `p`.
    pub fn position(&self, p: usize) -> Vec<f64> {
        let c = self.coords(p);
        (0..self.real_dim()).map(|a| self.axis_coord(c[a])).collect()
    }

    pub fn is_interior(&self, p: usize) -> bool {
        match self.kind {
            DomainKind::Torus { .. } => true,
            DomainKind::Ball { radius, .. } => {
                let r2: f64 = self.position(p).iter().map(|x| x * x).sum();
                r2 < radius * radius * (1.0 - 1e-12)
            }
        }
    }

    pub fn interior_points(&self) -> Vec<usize> {
        (0..self.num_points).filter(|&p| self.is_interior(p)).collect()
    }

    /// `p + offset`, wrapping on the torus; `None` if it leaves the stored ball cube.
    pub fn shift(&self, p: usize, offset: &[i32]) -> Option<usize> {
        let mut c = self.coords(p);
        let len = self.axis_len as i64;
        for a in 0..self.real_dim() {
            let v = c[a] as i64 + offset[a] as i64;
            c[a] = if self.is_torus() {
                v.rem_euclid(len) as usize
            } else if (0..len).contains(&v) {
                v as usize
            } else {
                return None;
            };
        }
        Some(self.index(&c))
    }

    /// `p + offset` with out-of-cube coordinates clamped to the cube faces, which are
    /// collar points of the ball.
    pub fn shift_clamped(&self, p: usize, offset: &[i32]) -> usize {
        let mut c = self.coords(p);
        let len = self.axis_len as i64;
        for a in 0..self.real_dim() {
            let v = c[a] as i64 + offset[a] as i64;
            c[a] = if self.is_torus() {
                v.rem_euclid(len) as usize
            } else {
                v.clamp(0, len - 1) as usize
            };
        }
        self.index(&c)
    }

    /// Squared distance: minimum-image on the torus, euclidean on the ball.
    pub fn distance2(&self, p: usize, q: usize) -> f64 {
        let (cp, cq) = (self.coords(p), self.coords(q));
        let h = self.spacing();
        let mut s = 0.0;
        for a in 0..self.real_dim() {
            let mut d = (cp[a] as i64 - cq[a] as i64).unsigned_abs() as usize;
            if self.is_torus() {
                d = d.min(self.axis_len - d);
            }
            let x = d as f64 * h;
            s += x * x;
        }
        s
    }

    /// Distance from an interior point to the sphere (infinite on the torus).
    pub fn boundary_distance(&self, p: usize) -> f64 {
        match self.kind {
            DomainKind::Torus { .. } => f64::INFINITY,
            DomainKind::Ball { radius, .. } => {
                let r: f64 = self.position(p).iter().map(|x| x * x).sum::<f64>().sqrt();
                radius - r
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_indexing_round_trips() {
        let d = DomainSpec::torus(2, 5, 1.0).unwrap();
        assert_eq!(d.num_points(), 625);
        for p in [0, 1, 37, 624] {
            let c = d.coords(p);
            assert_eq!(d.index(&c), p);
        }
        assert!((d.spacing() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn torus_shift_wraps() {
        let d = DomainSpec::torus(1, 4, 1.0).unwrap();
        let p = d.index(&[3, 0]);
        assert_eq!(d.shift(p, &[1, -1]), Some(d.index(&[0, 3])));
        assert!((d.distance2(d.index(&[0, 0]), d.index(&[3, 3])) - 2.0 * 0.0625).abs() < 1e-15);
    }

    #[test]
    fn ball_layout() {
        let d = DomainSpec::ball(1, 8, 1.0).unwrap();
        assert_eq!(d.axis_len(), 11);
        assert!((d.spacing() - 0.25).abs() < 1e-15);
        assert!((d.axis_coord(0) + 1.25).abs() < 1e-15);
        let center = d.index(&[5, 5]);
        assert_eq!(d.position(center), vec![0.0, 0.0]);
        assert!(d.is_interior(center));
        assert!(!d.is_interior(d.index(&[1, 5])));
        assert!(d.shift(d.index(&[0, 5]), &[-1, 0]).is_none());
        assert_eq!(d.shift_clamped(d.index(&[0, 5]), &[-2, 1]), d.index(&[0, 6]));
    }

    #[test]
    fn every_interior_neighbor_is_stored() {
        let d = DomainSpec::ball(2, 6, 1.0).unwrap();
        for p in d.interior_points() {
            for a in 0..4 {
                let mut off = [0i32; 4];
                off[a] = 1;
                assert!(d.shift(p, &off).is_some());
                off[a] = -1;
                assert!(d.shift(p, &off).is_some());
            }
        }
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(DomainSpec::torus(4, 8, 1.0).is_err());
        assert!(DomainSpec::torus(1, 1, 1.0).is_err());
        assert!(DomainSpec::torus(1, 8, -1.0).is_err());
        assert!(DomainSpec::ball_with_margin(1, 8, 1.0, 0).is_err());
    }
}
