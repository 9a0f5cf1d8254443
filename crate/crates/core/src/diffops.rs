//! Grid derivatives and quadrature. Periodic axes differentiate by FFT
//! (exact for band-limited data); bounded axes use 7-point order-6
//! stencils, one-sided near the edges. With z = u + iv,
//! d_z = (d_u - i d_v)/2 and d_zbar = (d_u + i d_v)/2.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::grid::{CField, Field, Grid, RField, VField};
use crate::minkowski::CVec;
use crate::par::{build_vec, rows_mut, RunMode};

const STENCIL: usize = 7;

/// Weights w_j with sum_j w_j f(x_j) ~ f^(order)(xbar), for arbitrary
/// nodes x_j (Fornberg's recursion).
pub fn fornberg_weights(xbar: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len() - 1;
    let m = order;
    assert!(n >= m, "need more nodes than the derivative order");
    let mut w = vec![vec![0.0; m + 1]; n + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - xbar;
    w[0][0] = 1.0;
    for i in 1..=n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - xbar;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[i][k] = c1 * (k as f64 * w[i - 1][k - 1] - c5 * w[i - 1][k]) / c2;
                }
                w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                w[j][k] = (c4 * w[j][k] - k as f64 * w[j][k - 1]) / c3;
            }
            w[j][0] = c4 * w[j][0] / c3;
        }
        c1 = c2;
    }
    w.into_iter().map(|row| row[m]).collect()
}

enum AxisOp {
    Spectral {
        fft: Arc<dyn Fft<f64>>,
        ifft: Arc<dyn Fft<f64>>,
        ik: Vec<Complex64>,
        inv_n: f64,
    },
    Stencil {
        n: usize,
        // weights[p][j]: first-derivative weights when the evaluation
        // node sits at offset p inside its 7-node window, divided by h.
        weights: [[f64; STENCIL]; STENCIL],
    },
}

impl AxisOp {
    fn new(n: usize, span: f64, h: f64, periodic: bool) -> AxisOp {
        if periodic {
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_forward(n);
            let ifft = planner.plan_fft_inverse(n);
            let scale = 2.0 * std::f64::consts::PI / span;
            let ik: Vec<Complex64> = (0..n)
                .map(|k| {
                    let m = if 2 * k < n {
                        k as i64
                    } else if 2 * k == n {
                        0 // the unpaired mode carries no derivative information
                    } else {
                        k as i64 - n as i64
                    };
                    Complex64::new(0.0, m as f64 * scale)
                })
                .collect();
            AxisOp::Spectral { fft, ifft, ik, inv_n: 1.0 / n as f64 }
        } else {
            assert!(n >= STENCIL);
            let xs: Vec<f64> = (0..STENCIL).map(|j| j as f64).collect();
            let mut weights = [[0.0; STENCIL]; STENCIL];
            for (p, row) in weights.iter_mut().enumerate() {
                let w = fornberg_weights(p as f64, &xs, 1);
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = w[j] / h;
                }
            }
            AxisOp::Stencil { n, weights }
        }
    }

    fn derive_row(&self, input: &[Complex64], output: &mut [Complex64]) {
        match self {
            AxisOp::Spectral { fft, ifft, ik, inv_n } => {
                let mut buf = input.to_vec();
                fft.process(&mut buf);
                for (b, f) in buf.iter_mut().zip(ik) {
                    *b *= f;
                }
                ifft.process(&mut buf);
                for (o, b) in output.iter_mut().zip(&buf) {
                    *o = b * *inv_n;
                }
            }
            AxisOp::Stencil { n, weights } => {
                for (i, out) in output.iter_mut().enumerate() {
                    let start = i.saturating_sub(3).min(n - STENCIL);
                    let w = &weights[i - start];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..STENCIL {
                        acc += input[start + j] * w[j];
                    }
                    *out = acc;
                }
            }
        }
    }
}

fn transpose<T: Copy>(input: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(input.len());
    for c in 0..cols {
        for r in 0..rows {
            out.push(input[r * cols + c]);
        }
    }
    out
}

pub struct DiffOps {
    pub grid: Grid,
    pub mode: RunMode,
    axis_u: AxisOp,
    axis_v: AxisOp,
}

impl DiffOps {
    pub fn new(grid: &Grid, mode: RunMode) -> Result<DiffOps> {
        // Grid::new already enforces >= 16 nodes per axis, which covers
        // the 7-node stencil requirement.
        let axis_u = AxisOp::new(grid.nu, grid.u1 - grid.u0, grid.hu(), grid.periodic_u);
        let axis_v = AxisOp::new(grid.nv, grid.v1 - grid.v0, grid.hv(), grid.periodic_v);
        Ok(DiffOps { grid: *grid, mode, axis_u, axis_v })
    }

    pub fn d_u(&self, f: &CField) -> CField {
        let nu = self.grid.nu;
        let mut out = vec![Complex64::new(0.0, 0.0); f.data.len()];
        rows_mut(self.mode, &mut out, nu, |iv, row| {
            self.axis_u.derive_row(&f.data[iv * nu..(iv + 1) * nu], row);
        });
        Field { nu: f.nu, nv: f.nv, data: out }
    }

    pub fn d_v(&self, f: &CField) -> CField {
        let (nu, nv) = (self.grid.nu, self.grid.nv);
        let t = transpose(&f.data, nv, nu);
        let mut dt = vec![Complex64::new(0.0, 0.0); t.len()];
        rows_mut(self.mode, &mut dt, nv, |iu, row| {
            self.axis_v.derive_row(&t[iu * nv..(iu + 1) * nv], row);
        });
        Field { nu: f.nu, nv: f.nv, data: transpose(&dt, nu, nv) }
    }

    pub fn d_z(&self, f: &CField) -> CField {
        let fu = self.d_u(f);
        let fv = self.d_v(f);
        let data = build_vec(self.mode, f.data.len(), |i| {
            0.5 * (fu.data[i] - Complex64::i() * fv.data[i])
        });
        Field { nu: f.nu, nv: f.nv, data }
    }

    pub fn d_zbar(&self, f: &CField) -> CField {
        let fu = self.d_u(f);
        let fv = self.d_v(f);
        let data = build_vec(self.mode, f.data.len(), |i| {
            0.5 * (fu.data[i] + Complex64::i() * fv.data[i])
        });
        Field { nu: f.nu, nv: f.nv, data }
    }

    fn component(&self, f: &VField, k: usize) -> CField {
        Field { nu: f.nu, nv: f.nv, data: f.data.iter().map(|v| v.get(k)).collect() }
    }

    fn map_components<F>(&self, f: &VField, op: F) -> VField
    where
        F: Fn(&CField) -> CField,
    {
        let dim = f.data[0].dim();
        let mut out = vec![CVec::zero(dim); f.data.len()];
        for k in 0..dim {
            let dk = op(&self.component(f, k));
            for (o, x) in out.iter_mut().zip(&dk.data) {
                o.set(k, *x);
            }
        }
        Field { nu: f.nu, nv: f.nv, data: out }
    }

    pub fn d_u_vec(&self, f: &VField) -> VField {
        self.map_components(f, |c| self.d_u(c))
    }

    pub fn d_v_vec(&self, f: &VField) -> VField {
        self.map_components(f, |c| self.d_v(c))
    }

    pub fn d_z_vec(&self, f: &VField) -> VField {
        self.map_components(f, |c| self.d_z(c))
    }

    pub fn d_zbar_vec(&self, f: &VField) -> VField {
        self.map_components(f, |c| self.d_zbar(c))
    }

    /// 4 e^{-2 omega} d_z d_zbar f, the Laplacian of the metric with
    /// conformal factor e^{2 omega}.
    pub fn laplacian_conformal(&self, f: &CField, omega: &RField) -> CField {
        let mixed = self.d_z(&self.d_zbar(f));
        let data = build_vec(self.mode, f.data.len(), |i| {
            mixed.data[i] * 4.0 * (-2.0 * omega.data[i]).exp()
        });
        Field { nu: f.nu, nv: f.nv, data }
    }

    /// Integral of f du dv: rectangle rule on periodic axes, trapezoid on
    /// bounded axes. Summation is sequential in index order so results do
    /// not depend on the run mode.
    pub fn integrate_density(&self, f: &RField) -> f64 {
        let g = &self.grid;
        let wu = |iu: usize| -> f64 {
            if !g.periodic_u && (iu == 0 || iu + 1 == g.nu) { 0.5 } else { 1.0 }
        };
        let wv = |iv: usize| -> f64 {
            if !g.periodic_v && (iv == 0 || iv + 1 == g.nv) { 0.5 } else { 1.0 }
        };
        let mut acc = 0.0;
        for iv in 0..g.nv {
            let mut row = 0.0;
            for iu in 0..g.nu {
                row += wu(iu) * f.data[iv * g.nu + iu];
            }
            acc += wv(iv) * row;
        }
        acc * g.hu() * g.hv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfield<F: Fn(f64, f64) -> Complex64>(g: &Grid, f: F) -> CField {
        let mut data = Vec::with_capacity(g.len());
        for iv in 0..g.nv {
            for iu in 0..g.nu {
                data.push(f(g.u(iu), g.v(iv)));
            }
        }
        CField::from_vec(g, data)
    }

    fn rfield<F: Fn(f64, f64) -> f64>(g: &Grid, f: F) -> RField {
        let mut data = Vec::with_capacity(g.len());
        for iv in 0..g.nv {
            for iu in 0..g.nu {
                data.push(f(g.u(iu), g.v(iv)));
            }
        }
        RField::from_vec(g, data)
    }

    fn max_err(a: &CField, b: &CField, skip_edge: usize, g: &Grid) -> f64 {
        let mut worst: f64 = 0.0;
        for iv in 0..g.nv {
            for iu in 0..g.nu {
                if !g.periodic_u && (iu < skip_edge || iu + skip_edge >= g.nu) {
                    continue;
                }
                if !g.periodic_v && (iv < skip_edge || iv + skip_edge >= g.nv) {
                    continue;
                }
                worst = worst.max((a.at(iu, iv) - b.at(iu, iv)).norm());
            }
        }
        worst
    }

    #[test]
    fn central_weights_match_order_six_coefficients() {
        let xs: Vec<f64> = (0..7).map(|j| j as f64).collect();
        let w = fornberg_weights(3.0, &xs, 1);
        let expect = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        // interpolation weights (order 0) at a node are a delta
        let w0 = fornberg_weights(2.0, &xs, 0);
        assert!((w0[2] - 1.0).abs() < 1e-14);
        assert!(w0[0].abs() < 1e-14);
    }

    #[test]
    fn d_z_of_coordinates() {
        let g = Grid::new(0.0, 1.0, 0.0, 1.0, 24, 24, false, false).unwrap();
        let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let u = cfield(&g, |u, _| Complex64::new(u, 0.0));
        let v = cfield(&g, |_, v| Complex64::new(v, 0.0));
        let du = ops.d_z(&u);
        let dv = ops.d_z(&v);
        for i in 0..g.len() {
            assert!((du.data[i] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
            assert!((dv.data[i] - Complex64::new(0.0, -0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn holomorphic_coordinate_is_antiholomorphic_free() {
        let g = Grid::new(0.0, 1.0, -1.0, 1.0, 20, 20, false, false).unwrap();
        let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let z = cfield(&g, |u, v| Complex64::new(u, v));
        let zb = cfield(&g, |u, v| Complex64::new(u, -v));
        let a = ops.d_zbar(&z);
        let b = ops.d_zbar(&zb);
        for i in 0..g.len() {
            assert!(a.data[i].norm() < 1e-11);
            assert!((b.data[i] - Complex64::new(1.0, 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn spectral_derivative_is_exact_for_band_limited_modes() {
        let pi = std::f64::consts::PI;
        let g = Grid::new(0.0, 2.0 * pi, 0.0, 1.0, 32, 16, true, false).unwrap();
        let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let f = cfield(&g, |u, _| Complex64::new((2.0 * u).sin(), 0.0));
        // d_z f = f_u / 2 = cos(2u)
        let df = ops.d_z(&f);
        let expect = cfield(&g, |u, _| Complex64::new((2.0 * u).cos(), 0.0));
        assert!(max_err(&df, &expect, 0, &g) < 1e-12);
    }

    #[test]
    fn stencil_derivative_converges_at_order_six()
    {
        let err_at = |n: usize| -> f64 {
            let g = Grid::new(0.0, 1.0, 0.0, 1.0, n, 16, false, false).unwrap();
            let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
            let f = cfield(&g, |u, _| Complex64::new((3.0 * u).sin(), 0.0));
            let df = ops.d_u(&f);
            let expect = cfield(&g, |u, _| Complex64::new(3.0 * (3.0 * u).cos(), 0.0));
            max_err(&df, &expect, 0, &g)
        };
        let e1 = err_at(32);
        let e2 = err_at(64);
        // order 6: halving h gains ~2^6; allow slack for the one-sided rows
        assert!(e1 / e2 > 32.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn conjugation_identity_is_bitwise_on_stencil_axes() {
        let g = Grid::new(0.0, 1.0, 0.0, 1.0, 20, 24, false, false).unwrap();
        let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let f = cfield(&g, |u, v| Complex64::new((u * v).sin(), (2.0 * u - v).cos()));
        let fbar = CField { nu: f.nu, nv: f.nv, data: f.data.iter().map(|x| x.conj()).collect() };
        let lhs = ops.d_zbar(&fbar);
        let rhs = ops.d_z(&f);
        for i in 0..g.len() {
            assert_eq!(lhs.data[i], rhs.data[i].conj());
        }
    }

    #[test]
    fn conjugation_identity_near_machine_on_spectral_axes() {
        let pi = std::f64::consts::PI;
        let g = Grid::new(0.0, 2.0 * pi, 0.0, 2.0 * pi, 24, 24, true, true).unwrap();
        let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let f = cfield(&g, |u, v| Complex64::new((u + v).sin(), (2.0 * u).cos() * v.sin()));
        let fbar = CField { nu: f.nu, nv: f.nv, data: f.data.iter().map(|x| x.conj()).collect() };
        let lhs = ops.d_zbar(&fbar);
        let rhs = ops.d_z(&f);
        for i in 0..g.len() {
            assert!((lhs.data[i] - rhs.data[i].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn conformal_laplacian_matches_flat_laplacian_at_zero_omega() {
        let g = Grid::new(-1.0, 1.0, -1.0, 1.0, 32, 32, false, false).unwrap();
        let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let f = cfield(&g, |u, v| Complex64::new(u * u + v * v, 0.0));
        let omega = rfield(&g, |_, _| 0.0);
        let lap = ops.laplacian_conformal(&f, &omega);
        let expect = cfield(&g, |_, _| Complex64::new(4.0, 0.0));
        assert!(max_err(&lap, &expect, 0, &g) < 1e-8);
    }

    #[test]
    fn conformal_factor_rescales_laplacian() {
        let g = Grid::new(-1.0, 1.0, -1.0, 1.0, 32, 32, false, false).unwrap();
        let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let f = cfield(&g, |u, v| Complex64::new(u * u + v * v, 0.0));
        let omega = rfield(&g, |_, _| 0.5 * 3.0f64.ln());
        // e^{2omega} = 3 scales the flat result 4 down to 4/3
        let lap = ops.laplacian_conformal(&f, &omega);
        let expect = cfield(&g, |_, _| Complex64::new(4.0 / 3.0, 0.0));
        assert!(max_err(&lap, &expect, 0, &g) < 1e-8);
    }

    #[test]
    fn quadrature_of_constant_and_half_a_fourier_mode() {
        let pi = std::f64::consts::PI;
        let g = Grid::new(0.0, 2.0 * pi, 0.0, 1.0, 64, 17, true, false).unwrap();
        let ops = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let one = rfield(&g, |_, _| 1.0);
        assert!((ops.integrate_density(&one) - 2.0 * pi).abs() < 1e-12);
        // sin^2 u integrates to pi per unit v; exact for the rectangle rule
        let s2 = rfield(&g, |u, _| u.sin() * u.sin());
        assert!((ops.integrate_density(&s2) - pi).abs() < 1e-12);
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let g = Grid::new(0.0, 1.0, 0.0, 1.0, 40, 40, false, true).unwrap();
        let f = cfield(&g, |u, v| Complex64::new((3.0 * u).sin() * v.cos(), u - v * v));
        let seq = DiffOps::new(&g, RunMode::Sequential).unwrap();
        let par = DiffOps::new(&g, RunMode::Parallel).unwrap();
        assert_eq!(seq.d_z(&f).data, par.d_z(&f).data);
        assert_eq!(seq.d_v(&f).data, par.d_v(&f).data);
    }
}
