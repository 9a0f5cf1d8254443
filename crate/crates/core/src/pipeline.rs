//! The invariant pipeline. A surface f into S^n is lifted to the null
//! vector field F = (1, f) in R^{n+1,1}; rescaling F by the induced
//! conformal factor gives the canonical lift Y with <Y_z, Y_zb> = 1/2.
//! From Y the pipeline builds the frame {Y, Y_z, Y_zb, N}, the
//! Schwarzian s, the normal-valued Hopf field kappa, the invariant
//! metric factor e^{2 omega} = 4<kappa, conj kappa>, its curvature
//! K = -Delta omega, the normal connection D, and the derived scalars
//! mu, rho, P = rho/<kappa,conj kappa>, psi = arg P (continuous branch),
//! Theta = rho<kappa,kappa>, the dual lift, and the conformal area
//! functional. All pairings are complex-bilinear; Hermitian combinations
//! are written with an explicit conjugation, as in <kappa, conj kappa>.
//!
//! Fields are computed on the full grid; masked nodes (margin, failed
//! immersion, umbilic) are only excluded from statistics, so a masked
//! node adjacent to valid ones can still influence them through the
//! difference stencils. The catalog surfaces have no interior masked
//! nodes; user surfaces with isolated umbilics should expect degraded
//! residuals nearby.

use num_complex::Complex64;

use crate::diffops::DiffOps;
use crate::error::{Error, Result};
use crate::grid::{masked_median, CField, Field, Grid, Mask, RField, VField};
use crate::minkowski::{CVec, LorentzTransform};
use crate::par::{build_vec, RunMode};
use crate::surface::{SurfaceSpec, Target};

#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    pub mode: RunMode,
    /// Nodes dropped along every bounded edge (stencil shadow).
    pub margin: usize,
    /// Margin for statistics of deeply chained quantities. P stacks five
    /// grid derivatives, and every application widens the band where
    /// one-sided stencils dominate by the stencil radius, so values of
    /// K, P, psi and Theta are judged on margin + 3*(depth-1) nodes.
    pub deep_margin: usize,
    /// Immersion threshold on the induced metric coefficient.
    pub immersion_floor: f64,
    /// Umbilic threshold relative to the grid median of e^{2 omega}.
    pub umbilic_rel: f64,
    /// Absolute umbilic floor, for charts that are umbilic everywhere
    /// (the median of pure noise does not separate anything).
    pub umbilic_abs: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            mode: RunMode::default(),
            margin: 3,
            deep_margin: 12,
            immersion_floor: 1e-8,
            umbilic_rel: 1e-6,
            umbilic_abs: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrameField {
    pub y: VField,
    pub y_z: VField,
    pub y_zb: VField,
    pub y_zzb: VField,
    pub n: VField,
}

#[derive(Clone, Debug)]
pub struct Invariants {
    pub surface: String,
    pub grid: Grid,
    pub sphere_dim: usize,
    pub mode: RunMode,
    /// margin ∧ immersed ∧ umbilic-free; residual statistics use this.
    pub mask: Mask,
    /// Same cuts with the deep margin; statistics of K, P, psi and Theta
    /// use this one (see PipelineOptions::deep_margin).
    pub deep_mask: Mask,
    pub immersed: Mask,
    /// Induced conformal factor of the input lift (chart-dependent).
    pub e2w_ind: RField,
    pub frame: FrameField,
    pub schwarzian: CField,
    pub kappa: VField,
    /// <kappa, conj kappa>, exactly real and >= 0.
    pub kkbar: RField,
    /// <kappa, kappa>; vanishes iff the surface is isotropic.
    pub kk: CField,
    pub omega: RField,
    pub curvature: RField,
    pub dz_kappa: VField,
    pub dzb_kappa: VField,
    pub mu: CField,
    pub rho: CField,
    pub p: CField,
    pub psi: RField,
    pub psi_valid: Mask,
    pub theta: CField,
    pub swillmore_defect: RField,
    /// Least-squares coefficient of D_z kappa along kappa (rank >= 2
    /// normal bundles only) with its own defect field.
    pub lambda: Option<CField>,
    pub iso_defect: Option<RField>,
    pub dual: Option<VField>,
    pub willmore: f64,
}

/// Evaluate the null lift F = (1, f) on the grid, optionally moved by a
/// Lorentz transform. The transform acts linearly on the lift, so grid
/// differentiation commutes with it.
pub fn lift_field(
    spec: &SurfaceSpec,
    transform: Option<&LorentzTransform>,
    mode: RunMode,
) -> Result<VField> {
    let g = spec.grid;
    let dim = spec.target.lorentz_dim();
    if let Some(t) = transform {
        if t.dim() != dim {
            return Err(Error::DimMismatch { expected: dim, got: t.dim() });
        }
    }
    // expression evaluation can fail per node; collect Results then lift
    let values: Vec<Result<CVec>> = build_vec(mode, g.len(), |i| {
        let (iu, iv) = g.node(i);
        let p = spec.evaluate(g.u(iu), g.v(iv))?;
        let mut f = CVec::zero(dim);
        f.set(0, Complex64::new(1.0, 0.0));
        for (k, x) in p.components().iter().enumerate() {
            f.set(k + 1, Complex64::new(*x, 0.0));
        }
        Ok(match transform {
            Some(t) => t.apply_c(&f),
            None => f,
        })
    });
    let mut data = Vec::with_capacity(g.len());
    for v in values {
        data.push(v?);
    }
    Ok(VField::from_vec(&g, data))
}

/// Strip numerically spurious imaginary parts from a mathematically real
/// field, so downstream conjugation identities hold exactly.
fn re_vec(f: &VField) -> VField {
    let data = f
        .data
        .iter()
        .map(|v| {
            let mut out = CVec::zero(v.dim());
            for k in 0..v.dim() {
                out.set(k, Complex64::new(v.get(k).re, 0.0));
            }
            out
        })
        .collect();
    Field { nu: f.nu, nv: f.nv, data }
}

fn conj_vec(f: &VField) -> VField {
    Field { nu: f.nu, nv: f.nv, data: f.data.iter().map(|v| v.conj()).collect() }
}

/// Canonical lift: Y = F / sqrt(2 <F_z, F_zb>). Any null lift of the same
/// surface gives the same Y, because the normalization is exactly the
/// representative's induced factor.
pub fn canonical_lift(
    lift: &VField,
    ops: &DiffOps,
    opts: &PipelineOptions,
) -> (VField, RField, Mask) {
    let f_z = ops.d_z_vec(lift);
    let n = lift.data.len();
    let e2w_ind: Vec<f64> = build_vec(ops.mode, n, |i| {
        2.0 * f_z.data[i].dot(&f_z.data[i].conj()).re
    });
    let immersed: Vec<bool> = e2w_ind.iter().map(|x| *x > opts.immersion_floor).collect();
    let y: Vec<CVec> = build_vec(ops.mode, n, |i| {
        let scale = if e2w_ind[i] > 0.0 { 1.0 / e2w_ind[i].sqrt() } else { 1.0 };
        let mut out = CVec::zero(lift.data[i].dim());
        for k in 0..out.dim() {
            out.set(k, Complex64::new(lift.data[i].get(k).re * scale, 0.0));
        }
        out
    });
    (
        Field { nu: lift.nu, nv: lift.nv, data: y },
        Field { nu: lift.nu, nv: lift.nv, data: e2w_ind },
        Field { nu: lift.nu, nv: lift.nv, data: immersed },
    )
}

/// Frame completion. With <Y, Y_zzb> = -1/2 (differentiate the null and
/// normalization conditions), N = 2 Y_zzb + 2 <Y_zzb, Y_zzb> Y satisfies
/// <N,N> = 0, <Y,N> = -1 and <N, Y_z> = 0.
pub fn build_frame(y: &VField, ops: &DiffOps) -> FrameField {
    let y_z = ops.d_z_vec(y);
    let y_zb = conj_vec(&y_z); // exact: Y is real
    let y_zzb = re_vec(&ops.d_zbar_vec(&y_z)); // mixed derivative of a real field is real
    let n_data: Vec<CVec> = build_vec(ops.mode, y.data.len(), |i| {
        let m = &y_zzb.data[i];
        let q = m.dot(m);
        y.data[i].scale_re(2.0 * q.re).add(&m.scale_re(2.0))
    });
    FrameField {
        y: y.clone(),
        y_z,
        y_zb,
        y_zzb,
        n: Field { nu: y.nu, nv: y.nv, data: n_data },
    }
}

/// s = 2 <Y_zz, N> and kappa = Y_zz + (s/2) Y, which is exactly the
/// decomposition of Y_zz into V and its normal complement.
pub fn schwarzian_hopf(frame: &FrameField, ops: &DiffOps) -> (CField, VField) {
    let y_zz = ops.d_z_vec(&frame.y_z);
    let n = y_zz.data.len();
    let s: Vec<Complex64> =
        build_vec(ops.mode, n, |i| 2.0 * y_zz.data[i].dot(&frame.n.data[i]));
    let kappa: Vec<CVec> = build_vec(ops.mode, n, |i| {
        y_zz.data[i].add(&frame.y.data[i].scale(0.5 * s[i]))
    });
    (
        Field { nu: y_zz.nu, nv: y_zz.nv, data: s },
        Field { nu: y_zz.nu, nv: y_zz.nv, data: kappa },
    )
}

/// Tangential component of w in the frame span, read off from the Gram
/// matrix (<Y,N> = -1 and <Y_z,Y_zb> = 1/2 are the only nonzero pairs).
pub(crate) fn v_part(w: &CVec, y: &CVec, y_z: &CVec, y_zb: &CVec, n: &CVec) -> CVec {
    y.scale(-w.dot(n))
        .add(&y_z.scale(2.0 * w.dot(y_zb)))
        .add(&y_zb.scale(2.0 * w.dot(y_z)))
        .sub(&n.scale(w.dot(y)))
}

/// Connection derivatives of a normal field: D xi = d xi minus its
/// tangential part. Errors when xi fails to be normal on unmasked nodes.
pub fn normal_connection(
    xi: &VField,
    frame: &FrameField,
    ops: &DiffOps,
    mask: &Mask,
) -> Result<(VField, VField)> {
    let mut worst: f64 = 0.0;
    for (i, keep) in mask.data.iter().enumerate() {
        if !keep {
            continue;
        }
        let x = &xi.data[i];
        for basis in [&frame.y, &frame.y_z, &frame.y_zb, &frame.n] {
            worst = worst.max(x.dot(&basis.data[i]).norm());
        }
    }
    if worst > 1e-6 {
        return Err(Error::NotNormal { residual: worst });
    }
    let xi_z = ops.d_z_vec(xi);
    let xi_zb = ops.d_zbar_vec(xi);
    let project = |raw: &VField| -> VField {
        let data = build_vec(ops.mode, raw.data.len(), |i| {
            raw.data[i].sub(&v_part(
                &raw.data[i],
                &frame.y.data[i],
                &frame.y_z.data[i],
                &frame.y_zb.data[i],
                &frame.n.data[i],
            ))
        });
        Field { nu: raw.nu, nv: raw.nv, data }
    };
    Ok((project(&xi_z), project(&xi_zb)))
}

fn unwrap_against(reference: f64, raw: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    raw - tau * ((raw - reference) / tau).round()
}

/// Continuous-branch argument of P: raw arguments unwrapped along the
/// first row, then down every column. Where |P| < 1e-8 the argument is
/// meaningless; those nodes keep the raw value and are masked out.
fn unwrap_psi(p: &CField, mask: &Mask) -> (RField, Mask) {
    let (nu, nv) = (p.nu, p.nv);
    let mut psi: Vec<f64> = p.data.iter().map(|x| x.arg()).collect();
    let valid: Vec<bool> = p
        .data
        .iter()
        .zip(&mask.data)
        .map(|(x, keep)| *keep && x.norm() >= 1e-8)
        .collect();
    for iu in 1..nu {
        psi[iu] = unwrap_against(psi[iu - 1], psi[iu]);
    }
    for iv in 1..nv {
        for iu in 0..nu {
            let i = iv * nu + iu;
            psi[i] = unwrap_against(psi[i - nu], psi[i]);
        }
    }
    (
        Field { nu, nv, data: psi },
        Field { nu, nv, data: valid },
    )
}

pub fn compute_invariants(spec: &SurfaceSpec, opts: &PipelineOptions) -> Result<Invariants> {
    let lift = lift_field(spec, None, opts.mode)?;
    compute_from_lift(&lift, &spec.grid, spec.target.sphere_dim(), &spec.name, opts)
}

pub fn compute_invariants_transformed(
    spec: &SurfaceSpec,
    transform: &LorentzTransform,
    opts: &PipelineOptions,
) -> Result<Invariants> {
    let lift = lift_field(spec, Some(transform), opts.mode)?;
    compute_from_lift(&lift, &spec.grid, spec.target.sphere_dim(), &spec.name, opts)
}

/// Run the pipeline on an arbitrary null lift field (used both for
/// transformed surfaces and for frames produced by integration).
pub fn compute_from_lift(
    lift: &VField,
    grid: &Grid,
    sphere_dim: usize,
    surface: &str,
    opts: &PipelineOptions,
) -> Result<Invariants> {
    let ops = DiffOps::new(grid, opts.mode)?;
    let n = grid.len();

    let (y, e2w_ind, immersed) = canonical_lift(lift, &ops, opts);
    let frame = build_frame(&y, &ops);
    let (schwarzian, kappa) = schwarzian_hopf(&frame, &ops);

    let kkbar_data: Vec<f64> = build_vec(opts.mode, n, |i| {
        kappa.data[i].dot(&kappa.data[i].conj()).re
    });
    let kkbar = RField { nu: grid.nu, nv: grid.nv, data: kkbar_data };
    let kk_data: Vec<Complex64> =
        build_vec(opts.mode, n, |i| kappa.data[i].dot(&kappa.data[i]));
    let kk = CField { nu: grid.nu, nv: grid.nv, data: kk_data };

    // masks: stencil margin, immersion, then umbilics against the median
    // of e^{2 omega} over the surviving nodes
    let margin = Mask::with_margin(grid, opts.margin);
    let base = margin.and(&immersed);
    let e2w = RField {
        nu: grid.nu,
        nv: grid.nv,
        data: kkbar.data.iter().map(|x| 4.0 * x).collect(),
    };
    let med = masked_median(&e2w, &base);
    let umbilic_cut = (opts.umbilic_rel * med).max(opts.umbilic_abs);
    let umbilic_free = Mask {
        nu: grid.nu,
        nv: grid.nv,
        data: e2w.data.iter().map(|x| *x >= umbilic_cut).collect(),
    };
    let mask = base.and(&umbilic_free);
    if mask.count() == 0 {
        return Err(Error::NoUsableNodes);
    }
    let mut deep_mask = Mask::with_margin(grid, opts.margin.max(opts.deep_margin))
        .and(&immersed)
        .and(&umbilic_free);
    if deep_mask.count() == 0 {
        // grid too small for the deep cut; better a noisy statistic
        // than none at all
        deep_mask = mask.clone();
    }

    let omega_data: Vec<f64> = build_vec(opts.mode, n, |i| {
        0.5 * e2w.data[i].max(f64::MIN_POSITIVE).ln()
    });
    let omega = RField { nu: grid.nu, nv: grid.nv, data: omega_data };
    let omega_c = CField {
        nu: grid.nu,
        nv: grid.nv,
        data: omega.data.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
    };
    let lap_omega = ops.laplacian_conformal(&omega_c, &omega);
    let curvature = RField {
        nu: grid.nu,
        nv: grid.nv,
        data: lap_omega.data.iter().map(|x| -x.re).collect(),
    };

    let (dz_kappa, dzb_kappa) = normal_connection(&kappa, &frame, &ops, &mask)?;

    let guard = |x: f64| if x > 0.0 { x } else { f64::MIN_POSITIVE };
    let mu_bar_data: Vec<Complex64> = build_vec(opts.mode, n, |i| {
        -2.0 * dzb_kappa.data[i].dot(&kappa.data[i].conj()) / guard(kkbar.data[i])
    });
    let mu_bar = CField { nu: grid.nu, nv: grid.nv, data: mu_bar_data };
    let mu = CField {
        nu: grid.nu,
        nv: grid.nv,
        data: mu_bar.data.iter().map(|x| x.conj()).collect(),
    };

    let defect_data: Vec<f64> = build_vec(opts.mode, n, |i| {
        let r = dzb_kappa.data[i].add(&kappa.data[i].scale(0.5 * mu_bar.data[i]));
        let r2 = r.dot(&r.conj()).re.max(0.0);
        (r2 / guard(kkbar.data[i])).sqrt()
    });
    let swillmore_defect = RField { nu: grid.nu, nv: grid.nv, data: defect_data };

    let dz_mu_bar = ops.d_z(&mu_bar);
    let rho_data: Vec<Complex64> =
        build_vec(opts.mode, n, |i| dz_mu_bar.data[i] - 2.0 * kkbar.data[i]);
    let rho = CField { nu: grid.nu, nv: grid.nv, data: rho_data };
    let p_data: Vec<Complex64> =
        build_vec(opts.mode, n, |i| rho.data[i] / guard(kkbar.data[i]));
    let p = CField { nu: grid.nu, nv: grid.nv, data: p_data };
    let theta_data: Vec<Complex64> =
        build_vec(opts.mode, n, |i| rho.data[i] * kk.data[i]);
    let theta = CField { nu: grid.nu, nv: grid.nv, data: theta_data };
    let (psi, psi_valid) = unwrap_psi(&p, &mask);

    // parallel Hopf direction in z as well (rank >= 2 normal bundle only;
    // in S^3 the normal bundle has rank 1 and lambda duplicates mu)
    let (lambda, iso_defect) = if sphere_dim >= 4 {
        let lam_data: Vec<Complex64> = build_vec(opts.mode, n, |i| {
            dz_kappa.data[i].dot(&kappa.data[i].conj()) / guard(kkbar.data[i])
        });
        let lam = CField { nu: grid.nu, nv: grid.nv, data: lam_data };
        let def_data: Vec<f64> = build_vec(opts.mode, n, |i| {
            let r = dz_kappa.data[i].sub(&kappa.data[i].scale(lam.data[i]));
            let r2 = r.dot(&r.conj()).re.max(0.0);
            (r2 / guard(kkbar.data[i])).sqrt()
        });
        (Some(lam), Some(RField { nu: grid.nu, nv: grid.nv, data: def_data }))
    } else {
        (None, None)
    };

    let defect_max = crate::grid::masked_max(&swillmore_defect, &mask);
    let dual = if defect_max < 1e-5 {
        Some(dual_lift(&frame, &mu, opts.mode))
    } else {
        None
    };

    let willmore = 4.0 * ops.integrate_density(&kkbar);

    Ok(Invariants {
        surface: surface.to_string(),
        grid: *grid,
        sphere_dim,
        mode: opts.mode,
        mask,
        deep_mask,
        immersed,
        e2w_ind,
        frame,
        schwarzian,
        kappa,
        kkbar,
        kk,
        omega,
        curvature,
        dz_kappa,
        dzb_kappa,
        mu,
        rho,
        p,
        psi,
        psi_valid,
        theta,
        swillmore_defect,
        lambda,
        iso_defect,
        dual,
        willmore,
    })
}

/// Dual lift: (|mu|^2/2) Y + conj(mu) Y_z + mu Y_zb + N.
fn dual_lift(frame: &FrameField, mu: &CField, mode: RunMode) -> VField {
    let data = build_vec(mode, mu.data.len(), |i| {
        let m = mu.data[i];
        frame.y.data[i]
            .scale_re(0.5 * m.norm_sqr())
            .add(&frame.y_z.data[i].scale(m.conj()))
            .add(&frame.y_zb.data[i].scale(m))
            .add(&frame.n.data[i])
    });
    Field { nu: mu.nu, nv: mu.nv, data }
}

/// Standalone dual-surface construction with the S-Willmore gate.
pub fn dual_surface(inv: &Invariants) -> Result<VField> {
    let defect = crate::grid::masked_max(&inv.swillmore_defect, &inv.mask);
    if defect >= 1e-5 {
        return Err(Error::NotSWillmore { defect, limit: 1e-5 });
    }
    Ok(dual_lift(&inv.frame, &inv.mu, inv.mode))
}

#[derive(Clone, Debug)]
pub struct EuclideanShape {
    pub mean: RField,
    pub gauss: RField,
    pub area_density: RField,
    pub willmore_classical: f64,
}

/// Classical shape quantities of an R3 chart, for cross-checks against
/// the conformal quantities. The normal is f_v x f_u, which orients the
/// unit cylinder chart (cos u, sin u, v) with mean curvature +1/2.
pub fn euclidean_shape(spec: &SurfaceSpec, opts: &PipelineOptions) -> Result<EuclideanShape> {
    if spec.target != Target::R3 {
        return Err(Error::TargetNotR3 { target: spec.target.name() });
    }
    let g = spec.grid;
    let ops = DiffOps::new(&g, opts.mode)?;
    let mut comps: Vec<CField> = Vec::with_capacity(3);
    for k in 0..3 {
        let mut data = Vec::with_capacity(g.len());
        for iv in 0..g.nv {
            for iu in 0..g.nu {
                let c = spec.evaluate_chart(g.u(iu), g.v(iv))?;
                data.push(Complex64::new(c[k], 0.0));
            }
        }
        comps.push(CField::from_vec(&g, data));
    }
    let fu: Vec<CField> = comps.iter().map(|c| ops.d_u(c)).collect();
    let fv: Vec<CField> = comps.iter().map(|c| ops.d_v(c)).collect();
    let fuu: Vec<CField> = fu.iter().map(|c| ops.d_u(c)).collect();
    let fuv: Vec<CField> = fu.iter().map(|c| ops.d_v(c)).collect();
    let fvv: Vec<CField> = fv.iter().map(|c| ops.d_v(c)).collect();

    let n = g.len();
    let take = |f: &[CField], i: usize| [f[0].data[i].re, f[1].data[i].re, f[2].data[i].re];
    let dot3 = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };

    let mut mean = vec![0.0; n];
    let mut gauss = vec![0.0; n];
    let mut area = vec![0.0; n];
    for i in 0..n {
        let xu = take(&fu, i);
        let xv = take(&fv, i);
        let e1 = dot3(xu, xu);
        let f1 = dot3(xu, xv);
        let g1 = dot3(xv, xv);
        let det = e1 * g1 - f1 * f1;
        let nc = cross(xv, xu);
        let nn = dot3(nc, nc).sqrt();
        if det <= 0.0 || nn == 0.0 {
            continue; // degenerate node; caller's mask covers it
        }
        let unit = [nc[0] / nn, nc[1] / nn, nc[2] / nn];
        let e2 = dot3(take(&fuu, i), unit);
        let f2 = dot3(take(&fuv, i), unit);
        let g2 = dot3(take(&fvv, i), unit);
        mean[i] = (e2 * g1 - 2.0 * f2 * f1 + g2 * e1) / (2.0 * det);
        gauss[i] = (e2 * g2 - f2 * f2) / det;
        area[i] = det.sqrt();
    }
    let mean = RField { nu: g.nu, nv: g.nv, data: mean };
    let gauss = RField { nu: g.nu, nv: g.nv, data: gauss };
    let area = RField { nu: g.nu, nv: g.nv, data: area };
    let integrand = RField {
        nu: g.nu,
        nv: g.nv,
        data: (0..n)
            .map(|i| (mean.data[i] * mean.data[i] - gauss.data[i]) * area.data[i])
            .collect(),
    };
    let willmore_classical = ops.integrate_density(&integrand);
    Ok(EuclideanShape { mean, gauss, area_density: area, willmore_classical })
}

impl Invariants {
    /// Hermitian magnitude sqrt(<xi, conj xi>) of a normal-bundle field.
    pub fn normal_mag(xi: &CVec) -> f64 {
        xi.dot(&xi.conj()).re.max(0.0).sqrt()
    }

    pub fn masked_max_c(&self, f: &CField) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, keep) in f.data.iter().zip(&self.mask.data) {
            if *keep {
                worst = worst.max(x.norm());
            }
        }
        worst
    }
}

/// Helper for tests and the classifier: max |f - c| over the mask.
pub fn masked_max_dev_c(f: &CField, mask: &Mask, c: Complex64) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, keep) in f.data.iter().zip(&mask.data) {
        if *keep {
            worst = worst.max((x - c).norm());
        }
    }
    worst
}

pub fn masked_max_dev(f: &RField, mask: &Mask, c: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, keep) in f.data.iter().zip(&mask.data) {
        if *keep {
            worst = worst.max((x - c).abs());
        }
    }
    worst
}
