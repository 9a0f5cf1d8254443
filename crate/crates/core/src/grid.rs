//! Rectangular parameter grids and the fields living on them. Storage is
//! row-major with u fastest: index(iu, iv) = iv*nu + iu. A periodic axis
//! excludes its right endpoint (node spacing L/n); a bounded axis includes
//! both endpoints (spacing L/(n-1)).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::minkowski::CVec;

pub const MIN_AXIS_NODES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub nu: usize,
    pub nv: usize,
    pub periodic_u: bool,
    pub periodic_v: bool,
}

impl Grid {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        u0: f64,
        u1: f64,
        v0: f64,
        v1: f64,
        nu: usize,
        nv: usize,
        periodic_u: bool,
        periodic_v: bool,
    ) -> Result<Grid> {
        if nu < MIN_AXIS_NODES || nv < MIN_AXIS_NODES {
            return Err(Error::GridTooSmall { need: MIN_AXIS_NODES, got: nu.min(nv) });
        }
        if !(u1 > u0) || !(v1 > v0) {
            return Err(Error::BadSurface("grid extents must be increasing and finite".into()));
        }
        Ok(Grid { u0, u1, v0, v1, nu, nv, periodic_u, periodic_v })
    }

    pub fn hu(&self) -> f64 {
        let span = self.u1 - self.u0;
        if self.periodic_u { span / self.nu as f64 } else { span / (self.nu - 1) as f64 }
    }

    pub fn hv(&self) -> f64 {
        let span = self.v1 - self.v0;
        if self.periodic_v { span / self.nv as f64 } else { span / (self.nv - 1) as f64 }
    }

    pub fn u(&self, iu: usize) -> f64 {
        self.u0 + iu as f64 * self.hu()
    }

    pub fn v(&self, iv: usize) -> f64 {
        self.v0 + iv as f64 * self.hv()
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idx(&self, iu: usize, iv: usize) -> usize {
        debug_assert!(iu < self.nu && iv < self.nv);
        iv * self.nu + iu
    }

    pub fn node(&self, i: usize) -> (usize, usize) {
        (i % self.nu, i / self.nu)
    }

    pub fn describe(&self) -> String {
        let ax = |p: bool| if p { "periodic" } else { "bounded" };
        format!(
            "{}x{} u:[{:.6},{:.6}] ({}) v:[{:.6},{:.6}] ({})",
            self.nu,
            self.nv,
            self.u0,
            self.u1,
            ax(self.periodic_u),
            self.v0,
            self.v1,
            ax(self.periodic_v)
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    pub nu: usize,
    pub nv: usize,
    pub data: Vec<T>,
}

pub type RField = Field<f64>;
pub type CField = Field<Complex64>;
pub type VField = Field<CVec>;
pub type Mask = Field<bool>;

impl<T: Clone> Field<T> {
    pub fn fill(grid: &Grid, value: T) -> Field<T> {
        Field { nu: grid.nu, nv: grid.nv, data: vec![value; grid.len()] }
    }

    pub fn from_vec(grid: &Grid, data: Vec<T>) -> Field<T> {
        assert_eq!(data.len(), grid.len());
        Field { nu: grid.nu, nv: grid.nv, data }
    }

    pub fn at(&self, iu: usize, iv: usize) -> &T {
        &self.data[iv * self.nu + iu]
    }

    pub fn at_mut(&mut self, iu: usize, iv: usize) -> &mut T {
        &mut self.data[iv * self.nu + iu]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

impl Mask {
    pub fn all(grid: &Grid) -> Mask {
        Field::fill(grid, true)
    }

    /// Clears `margin` nodes along every bounded edge; periodic axes keep
    /// all nodes.
    pub fn with_margin(grid: &Grid, margin: usize) -> Mask {
        let mut m = Mask::all(grid);
        for iv in 0..grid.nv {
            for iu in 0..grid.nu {
                let mut keep = true;
                if !grid.periodic_u && (iu < margin || iu + margin >= grid.nu) {
                    keep = false;
                }
                if !grid.periodic_v && (iv < margin || iv + margin >= grid.nv) {
                    keep = false;
                }
                if !keep {
                    *m.at_mut(iu, iv) = false;
                }
            }
        }
        m
    }

    pub fn and(&self, other: &Mask) -> Mask {
        assert_eq!((self.nu, self.nv), (other.nu, other.nv));
        Field {
            nu: self.nu,
            nv: self.nv,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|b| **b).count()
    }
}

/// Max of |f| over unmasked nodes; 0 when the mask is empty.
pub fn masked_max(f: &RField, mask: &Mask) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, keep) in f.data.iter().zip(&mask.data) {
        if *keep {
            worst = worst.max(x.abs());
        }
    }
    worst
}

/// Root-mean-square of f over unmasked nodes; 0 when the mask is empty.
pub fn masked_rms(f: &RField, mask: &Mask) -> f64 {
    let mut acc = 0.0;
    let mut n = 0usize;
    for (x, keep) in f.data.iter().zip(&mask.data) {
        if *keep {
            acc += x * x;
            n += 1;
        }
    }
    if n == 0 { 0.0 } else { (acc / n as f64).sqrt() }
}

/// Median over unmasked nodes; 0 when the mask is empty.
pub fn masked_median(f: &RField, mask: &Mask) -> f64 {
    let mut vals: Vec<f64> = f
        .data
        .iter()
        .zip(&mask.data)
        .filter_map(|(x, keep)| if *keep { Some(*x) } else { None })
        .collect();
    if vals.is_empty() {
        return 0.0;
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = vals.len();
    if n % 2 == 1 { vals[n / 2] } else { 0.5 * (vals[n / 2 - 1] + vals[n / 2]) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(0.0, 1.0, 0.0, 2.0, 16, 32, false, false).unwrap()
    }

    #[test]
    fn spacing_depends_on_periodicity() {
        let bounded = grid();
        assert!((bounded.hu() - 1.0 / 15.0).abs() < 1e-15);
        let periodic = Grid::new(0.0, 1.0, 0.0, 2.0, 16, 32, true, false).unwrap();
        assert!((periodic.hu() - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(bounded.u(15), 1.0);
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(matches!(
            Grid::new(0.0, 1.0, 0.0, 1.0, 8, 32, false, false),
            Err(Error::GridTooSmall { .. })
        ));
        assert!(Grid::new(0.0, 0.0, 0.0, 1.0, 16, 16, false, false).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let g = grid();
        let i = g.idx(3, 7);
        assert_eq!(g.node(i), (3, 7));
        assert_eq!(i, 7 * 16 + 3);
    }

    #[test]
    fn margin_mask_respects_periodic_axes() {
        let g = Grid::new(0.0, 1.0, 0.0, 1.0, 16, 16, true, false).unwrap();
        let m = Mask::with_margin(&g, 3);
        assert!(m.at(0, 8));
        assert!(!m.at(8, 2));
        assert!(!m.at(8, 13));
        assert!(m.at(8, 3));
        assert_eq!(m.count(), 16 * 10);
    }

    #[test]
    fn masked_stats() {
        let g = grid();
        let mut f = RField::fill(&g, 1.0);
        *f.at_mut(0, 0) = -5.0;
        let mut m = Mask::all(&g);
        assert_eq!(masked_max(&f, &m), 5.0);
        *m.at_mut(0, 0) = false;
        assert_eq!(masked_max(&f, &m), 1.0);
        assert!((masked_rms(&f, &m) - 1.0).abs() < 1e-15);
        assert_eq!(masked_median(&f, &m), 1.0);
    }
}
