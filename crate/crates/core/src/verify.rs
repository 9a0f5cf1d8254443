//! Residual suites over the pipeline output: the four frame structure
//! equations, the integrability conditions (gauss, codazzi, ricci), the
//! fourth-order surface equation, the conservation laws around mu, rho
//! and Theta with the dual lift, the curvature identities for P, the
//! auxiliary metric built from |P|, and phase-rotation stability of the
//! whole family. On top of the suites sits a (K, P) classifier.
//!
//! Masks follow derivative depth: checks on first-pass residuals use the
//! standard interior mask, while statistics of quantities that stack
//! five or more grid derivatives (mu, rho, P, psi, Theta and their
//! derived checks) use the deep mask. Default tolerances are 1e-6 on
//! fully periodic (spectral) grids and 1e-4 otherwise; checks that
//! apply a Laplacian on top of P carry a further factor of 100 on
//! bounded grids, matching the extra two derivative levels.

use crate::diffops::DiffOps;
use crate::error::Result;
use crate::grid::{masked_max, masked_median, masked_rms, CField, Field, Grid, Mask, RField, VField};
use crate::minkowski::CVec;
use crate::par::build_vec;
use crate::pipeline::{normal_connection, v_part, Invariants};
use crate::report::{Check, SuiteReport};
use num_complex::Complex64;

/// Willmore residual above this level marks a surface as genuinely
/// non-Willmore rather than numerically marginal.
pub const WILLMORE_FAIL_FLOOR: f64 = 0.05;

/// Deep-interior |P| below this level means the quartic invariant
/// vanishes on the surface and log/argument identities are vacuous.
pub const DEGENERATE_P: f64 = 1e-5;

/// Isotropy gate for the 4-sphere identities.
pub const ISOTROPY_GATE: f64 = 1e-6;

pub fn default_tol(g: &Grid) -> f64 {
    if g.periodic_u && g.periodic_v {
        1e-6
    } else {
        1e-4
    }
}

fn second_order_tol(g: &Grid, base: f64) -> f64 {
    if g.periodic_u && g.periodic_v {
        base
    } else {
        base * 100.0
    }
}

fn measure(name: &str, f: &RField, mask: &Mask, tol: f64) -> Check {
    Check::from_stats(name, masked_max(f, mask), masked_rms(f, mask), mask.count(), tol)
}

fn rfield(g: &Grid, data: Vec<f64>) -> RField {
    Field { nu: g.nu, nv: g.nv, data }
}

fn max_c(f: &CField, mask: &Mask) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, keep) in f.data.iter().zip(&mask.data) {
        if *keep {
            worst = worst.max(x.norm());
        }
    }
    worst
}

/// Componentwise imaginary part, measured in the Euclidean norm.
fn im_norm(w: &CVec) -> f64 {
    let mut s = 0.0;
    for j in 0..w.dim() {
        let t = w.get(j).im;
        s += t * t;
    }
    s.sqrt()
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let det3 = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| -> f64 {
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
    };
    let minor = |row: usize, col: usize| -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut k = 0;
        for j in 0..4 {
            if j != col {
                out[k] = m[row][j];
                k += 1;
            }
        }
        out
    };
    let mut det = 0.0;
    for col in 0..4 {
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][col] * det3(minor(1, col), minor(2, col), minor(3, col));
    }
    det
}

/// Canonical unit normal of a 3-sphere immersion: the metric dual of
/// the 4-fold cross product of (Y, Re Y_z, Im Y_z, N). Smooth and
/// orientation-consistent, unlike a normalized seed projection, whose
/// sign flips wherever the seed coefficient crosses zero.
fn unit_normal_rank1(inv: &Invariants) -> VField {
    let g = &inv.grid;
    let fr = &inv.frame;
    let n = g.len();
    let dim = inv.sphere_dim + 2;
    let data = build_vec(inv.mode, n, |i| {
        let mut v = [[0.0_f64; 5]; 4];
        for a in 0..dim {
            v[0][a] = fr.y.data[i].get(a).re;
            v[1][a] = fr.y_z.data[i].get(a).re;
            v[2][a] = fr.y_z.data[i].get(a).im;
            v[3][a] = fr.n.data[i].get(a).re;
        }
        let mut x = [0.0_f64; 5];
        for a in 0..dim {
            let mut m = [[0.0_f64; 4]; 4];
            for (r, row) in v.iter().enumerate() {
                let mut k = 0;
                for (b, val) in row.iter().enumerate().take(dim) {
                    if b != a {
                        m[r][k] = *val;
                        k += 1;
                    }
                }
            }
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            // metric dual: lower the index so Lorentz pairings vanish
            let eta = if a == 0 { -1.0 } else { 1.0 };
            x[a] = eta * sign * det4(&m);
        }
        let mut out = crate::minkowski::LVec::zero(dim);
        for (a, val) in x.iter().enumerate().take(dim) {
            out.set(a, *val);
        }
        let n2 = out.dot(&out);
        if n2 > 1e-12 {
            out.scale(1.0 / n2.sqrt()).to_complex()
        } else {
            CVec::zero(dim)
        }
    });
    Field { nu: g.nu, nv: g.nv, data }
}

/// Smooth real fields spanning the normal bundle. Rank one gives the
/// canonical unit normal; higher rank gives unnormalized projections
/// of fixed coordinate directions (chosen once per grid by projected
/// mass). They stay smooth precisely because they are not normalized;
/// every consumer below is linear in the field, so scale is free.
pub fn normal_basis(inv: &Invariants) -> Vec<VField> {
    let g = &inv.grid;
    let fr = &inv.frame;
    let n = g.len();
    let dim = inv.sphere_dim + 2;
    let rank = inv.sphere_dim - 2;
    if rank == 1 {
        return vec![unit_normal_rank1(inv)];
    }
    let project = |j: usize, i: usize| -> CVec {
        let e = crate::minkowski::LVec::basis(dim, j).to_complex();
        e.sub(&v_part(
            &e,
            &fr.y.data[i],
            &fr.y_z.data[i],
            &fr.y_zb.data[i],
            &fr.n.data[i],
        ))
    };
    let mut scored: Vec<(usize, f64)> = (0..dim)
        .map(|j| {
            let mut mass = 0.0;
            for (i, keep) in inv.mask.data.iter().enumerate() {
                if *keep {
                    let w = project(j, i);
                    mass += w.dot(&w.conj()).re;
                }
            }
            (j, mass)
        })
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored
        .iter()
        .take(rank)
        .map(|(seed, _)| {
            let j = *seed;
            let data = build_vec(inv.mode, n, |i| project(j, i));
            Field { nu: g.nu, nv: g.nv, data }
        })
        .collect()
}

/// Residual fields of the conditions that every conformal immersion or
/// Willmore surface must satisfy, recomputed from kappa (optionally
/// phase-rotated) through one shared code path so that rotation
/// comparisons are apples to apples.
struct EqFields {
    gauss: RField,
    codazzi: RField,
    willmore: RField,
    p: CField,
}

fn equation_fields(inv: &Invariants, ops: &DiffOps, rot: Option<Complex64>) -> Result<EqFields> {
    let g = &inv.grid;
    let n = g.len();
    let kappa: VField = match rot {
        None => inv.kappa.clone(),
        Some(r) => Field {
            nu: g.nu,
            nv: g.nv,
            data: build_vec(inv.mode, n, |i| inv.kappa.data[i].scale(r)),
        },
    };
    let kkbar: Vec<f64> =
        build_vec(inv.mode, n, |i| kappa.data[i].dot(&kappa.data[i].conj()).re);
    let (dzk, dzbk) = normal_connection(&kappa, &inv.frame, ops, &inv.mask)?;
    let s_zb = ops.d_zbar(&inv.schwarzian);

    let gauss = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            let dz_kbar = dzbk.data[i].conj();
            (0.5 * s_zb.data[i]
                - 3.0 * dz_kbar.dot(&kappa.data[i])
                - kappa.data[i].conj().dot(&dzk.data[i]))
            .norm()
        }),
    );

    let (_, dzb2) = normal_connection(&dzbk, &inv.frame, ops, &inv.mask)?;
    let wop: Vec<CVec> = build_vec(inv.mode, n, |i| {
        dzb2.data[i].add(&kappa.data[i].scale(0.5 * inv.schwarzian.data[i].conj()))
    });
    let willmore = rfield(
        g,
        (0..n)
            .map(|i| wop[i].norm_e() / kkbar[i].max(f64::MIN_POSITIVE).sqrt())
            .collect(),
    );
    let codazzi = rfield(g, (0..n).map(|i| im_norm(&wop[i])).collect());

    let mubar_data: Vec<Complex64> = build_vec(inv.mode, n, |i| {
        -2.0 * dzbk.data[i].dot(&kappa.data[i].conj()) / kkbar[i].max(f64::MIN_POSITIVE)
    });
    let mubar = Field { nu: g.nu, nv: g.nv, data: mubar_data };
    let mubar_z = ops.d_z(&mubar);
    let p_data: Vec<Complex64> = build_vec(inv.mode, n, |i| {
        (mubar_z.data[i] - 2.0 * kkbar[i]) / kkbar[i].max(f64::MIN_POSITIVE)
    });
    let p = Field { nu: g.nu, nv: g.nv, data: p_data };

    Ok(EqFields { gauss, codazzi, willmore, p })
}

/// Pointwise Willmore residual |W| / |kappa| of the fourth-order
/// surface equation; shared by the suite, the classifier and the
/// per-node dump.
pub fn willmore_residual(inv: &Invariants, ops: &DiffOps) -> Result<RField> {
    Ok(equation_fields(inv, ops, None)?.willmore)
}

/// The four frame structure equations plus the metric gauge identity,
/// evaluated against the surface's own s and kappa fields. Feeding a
/// corrupted s makes line 1 and line 3 fail, which is the suite's
/// sensitivity control.
pub fn structure_suite(inv: &Invariants, ops: &DiffOps, tol: Option<f64>) -> SuiteReport {
    let tol = tol.unwrap_or_else(|| default_tol(&inv.grid));
    let g = &inv.grid;
    let fr = &inv.frame;
    let n = g.len();
    let y_zz = ops.d_z_vec(&fr.y_z);
    let n_z = ops.d_z_vec(&fr.n);

    let line1 = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            y_zz.data[i]
                .add(&fr.y.data[i].scale(0.5 * inv.schwarzian.data[i]))
                .sub(&inv.kappa.data[i])
                .norm_e()
        }),
    );
    let line2 = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            fr.y_zzb.data[i]
                .add(&fr.y.data[i].scale_re(inv.kkbar.data[i]))
                .sub(&fr.n.data[i].scale_re(0.5))
                .norm_e()
        }),
    );
    let line3 = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            n_z.data[i]
                .add(&fr.y_z.data[i].scale_re(2.0 * inv.kkbar.data[i]))
                .add(&fr.y_zb.data[i].scale(inv.schwarzian.data[i]))
                .sub(&inv.dzb_kappa.data[i].scale_re(2.0))
                .norm_e()
        }),
    );
    let gauge = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            let q = fr.y_zzb.data[i].dot(&fr.y_zzb.data[i]).re;
            (4.0 * inv.kkbar.data[i] - 4.0 * q).abs()
        }),
    );

    let mut checks = vec![
        measure("line1", &line1, &inv.mask, tol),
        measure("line2", &line2, &inv.mask, tol),
        measure("line3", &line3, &inv.mask, tol),
    ];

    let basis = normal_basis(inv);
    for (b, xi) in basis.iter().enumerate() {
        let name = format!("line4-xi{b}");
        match normal_connection(xi, fr, ops, &inv.mask) {
            Ok((dz_xi, _)) => {
                let xi_z = ops.d_z_vec(xi);
                let res = rfield(
                    g,
                    build_vec(inv.mode, n, |i| {
                        let lhs = xi_z.data[i].sub(&dz_xi.data[i]);
                        let rhs = fr.y.data[i]
                            .scale(2.0 * xi.data[i].dot(&inv.dzb_kappa.data[i]))
                            .sub(
                                &fr.y_zb.data[i]
                                    .scale(2.0 * xi.data[i].dot(&inv.kappa.data[i])),
                            );
                        lhs.sub(&rhs).norm_e()
                    }),
                );
                checks.push(measure(&name, &res, &inv.mask, tol));
            }
            Err(e) => {
                checks.push(
                    Check::from_stats(&name, f64::INFINITY, f64::INFINITY, 0, tol)
                        .with_note(&format!("basis field not normal: {e}")),
                );
            }
        }
    }
    if inv.sphere_dim == 3 {
        if let Some(xi) = basis.first() {
            if let Ok((dz_xi, _)) = normal_connection(xi, fr, ops, &inv.mask) {
                let res = rfield(
                    g,
                    build_vec(inv.mode, n, |i| dz_xi.data[i].norm_e()),
                );
                checks.push(
                    measure("normal-parallel", &res, &inv.mask, tol)
                        .with_note("rank-1 normal bundle: the unit normal is D-parallel"),
                );
            }
        }
    }
    checks.push(measure("gauge", &gauge, &inv.mask, tol));
    SuiteReport::new("structure", checks)
}

/// Gauss, Codazzi and Ricci conditions. These hold for every conformal
/// immersion of the frame, Willmore or not.
pub fn integrability_suite(inv: &Invariants, ops: &DiffOps, tol: Option<f64>) -> SuiteReport {
    let tol = tol.unwrap_or_else(|| default_tol(&inv.grid));
    let g = &inv.grid;
    let n = g.len();
    let mut checks = Vec::new();
    match equation_fields(inv, ops, None) {
        Ok(eq) => {
            checks.push(measure("gauss", &eq.gauss, &inv.mask, tol));
            checks.push(measure("codazzi", &eq.codazzi, &inv.mask, tol));
        }
        Err(e) => {
            checks.push(
                Check::from_stats("gauss", f64::INFINITY, f64::INFINITY, 0, tol)
                    .with_note(&format!("{e}")),
            );
        }
    }

    let basis = normal_basis(inv);
    for (b, xi) in basis.iter().enumerate() {
        let name = format!("ricci-xi{b}");
        let run = || -> Result<RField> {
            let (dz_xi, dzb_xi) = normal_connection(xi, &inv.frame, ops, &inv.mask)?;
            let (_, dzb_of_dz) = normal_connection(&dz_xi, &inv.frame, ops, &inv.mask)?;
            let (dz_of_dzb, _) = normal_connection(&dzb_xi, &inv.frame, ops, &inv.mask)?;
            Ok(rfield(
                g,
                build_vec(inv.mode, n, |i| {
                    let curv = dzb_of_dz.data[i].sub(&dz_of_dzb.data[i]);
                    let rhs = inv.kappa.data[i]
                        .conj()
                        .scale(2.0 * xi.data[i].dot(&inv.kappa.data[i]))
                        .sub(
                            &inv.kappa.data[i]
                                .scale(2.0 * xi.data[i].dot(&inv.kappa.data[i].conj())),
                        );
                    curv.sub(&rhs).norm_e()
                }),
            ))
        };
        match run() {
            Ok(res) => {
                let mut c = measure(&name, &res, &inv.deep_mask, tol);
                if inv.sphere_dim == 3 {
                    c = c.with_note("rank-1 normal bundle: curvature and right side both vanish");
                }
                checks.push(c);
            }
            Err(e) => checks.push(
                Check::from_stats(&name, f64::INFINITY, f64::INFINITY, 0, tol)
                    .with_note(&format!("{e}")),
            ),
        }
    }
    SuiteReport::new("integrability", checks)
}

/// The fourth-order surface equation, relative to |kappa|.
pub fn willmore_suite(inv: &Invariants, ops: &DiffOps, tol: Option<f64>) -> SuiteReport {
    let tol = tol.unwrap_or_else(|| default_tol(&inv.grid));
    let checks = match equation_fields(inv, ops, None) {
        Ok(eq) => vec![measure("willmore", &eq.willmore, &inv.mask, tol)],
        Err(e) => vec![
            Check::from_stats("willmore", f64::INFINITY, f64::INFINITY, 0, tol)
                .with_note(&format!("{e}")),
        ],
    };
    SuiteReport::new("willmore", checks)
}

/// Conservation laws that hold once D_zbar kappa is proportional to
/// kappa: the second-order equation for mu, antiholomorphicity of rho,
/// holomorphicity of Theta, and the structure of the dual lift.
pub fn swillmore_suite(inv: &Invariants, ops: &DiffOps, tol: Option<f64>) -> SuiteReport {
    let tol = tol.unwrap_or_else(|| default_tol(&inv.grid));
    let g = &inv.grid;
    let n = g.len();
    let mask = &inv.deep_mask;
    let mut checks = vec![measure("defect", &inv.swillmore_defect, mask, tol)];

    let mu_z = ops.d_z(&inv.mu);
    let sdev = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            let m = inv.mu.data[i];
            (mu_z.data[i] - 0.5 * m * m - inv.schwarzian.data[i]).norm()
        }),
    );
    checks.push(measure("mu-z", &sdev, mask, tol));

    let rho_zb = ops.d_zbar(&inv.rho);
    let rho_scale = max_c(&inv.rho, mask).max(1.0);
    let rho_res = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            (rho_zb.data[i] - inv.mu.data[i].conj() * inv.rho.data[i]).norm() / rho_scale
        }),
    );
    checks.push(measure("rho-zbar", &rho_res, mask, tol));

    let theta_scale = max_c(&inv.theta, mask);
    if theta_scale < 1e-10 {
        checks.push(Check::vacuous(
            "theta-holomorphic",
            "Theta vanishes identically (isotropic kappa): holomorphy is trivial",
        ));
    } else {
        let th_zb = ops.d_zbar(&inv.theta);
        let th_res = rfield(
            g,
            build_vec(inv.mode, n, |i| th_zb.data[i].norm() / theta_scale.max(1.0)),
        );
        checks.push(measure("theta-holomorphic", &th_res, mask, tol));
    }

    match &inv.dual {
        Some(dual) => {
            let yhat_z = ops.d_z_vec(dual);
            let yhat_zb = ops.d_zbar_vec(dual);
            let d1 = rfield(
                g,
                build_vec(inv.mode, n, |i| {
                    let m = inv.mu.data[i];
                    yhat_z.data[i]
                        .sub(&dual.data[i].scale(0.5 * m))
                        .sub(
                            &inv.frame.y_z.data[i]
                                .add(&inv.frame.y.data[i].scale(0.5 * m))
                                .scale(inv.rho.data[i]),
                        )
                        .norm_e()
                }),
            );
            let d2 = rfield(
                g,
                build_vec(inv.mode, n, |i| yhat_z.data[i].dot(&yhat_z.data[i]).norm()),
            );
            let d3 = rfield(
                g,
                build_vec(inv.mode, n, |i| {
                    (yhat_z.data[i].dot(&yhat_zb.data[i])
                        - Complex64::new(0.5 * inv.rho.data[i].norm_sqr(), 0.0))
                    .norm()
                }),
            );
            let d4 = rfield(
                g,
                build_vec(inv.mode, n, |i| dual.data[i].dot(&dual.data[i]).norm()),
            );
            checks.push(measure("dual-structure", &d1, mask, tol));
            checks.push(measure("dual-isotropic", &d2, mask, tol));
            checks.push(measure("dual-metric", &d3, mask, tol));
            checks.push(measure("dual-null", &d4, mask, tol));
        }
        None => {
            checks.push(Check::vacuous(
                "dual-structure",
                "dual lift not constructed: the defect gate failed upstream",
            ));
        }
    }
    SuiteReport::new("swillmore", checks)
}

fn p_is_degenerate(inv: &Invariants) -> bool {
    max_c(&inv.p, &inv.deep_mask) < DEGENERATE_P
}

/// Curvature identities binding K and P. On the 3-sphere: Re P =
/// 2(K-1), the conformal Laplacian of log|P| equals 4K, and of the
/// unwrapped argument equals Im P. On the 4-sphere the isotropic
/// variants replace them (K = Re(P)/2 + 2, 4K - 2, Im P).
pub fn lemmap_suite(inv: &Invariants, ops: &DiffOps, tol: Option<f64>) -> SuiteReport {
    let g = &inv.grid;
    let n = g.len();
    let first = tol.unwrap_or_else(|| default_tol(g));
    let second = second_order_tol(g, first);
    let mask = &inv.deep_mask;
    let mut checks = Vec::new();
    let s3 = inv.sphere_dim == 3;

    if !s3 {
        let iso = rfield(g, build_vec(inv.mode, n, |i| inv.kk.data[i].norm()));
        let c = measure("isotropy", &iso, mask, ISOTROPY_GATE);
        let isotropic = c.pass;
        checks.push(c);
        if !isotropic {
            checks.push(Check::vacuous(
                "P5",
                "kappa is not isotropic: the 4-sphere identities do not apply",
            ));
            return SuiteReport::new("lemmaP", checks);
        }
    }

    let affine = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            let k = inv.curvature.data[i];
            if s3 {
                (inv.p.data[i].re - 2.0 * (k - 1.0)).abs()
            } else {
                (k - 0.5 * inv.p.data[i].re - 2.0).abs()
            }
        }),
    );
    checks.push(measure(if s3 { "P1" } else { "P5" }, &affine, mask, first));

    let (log_name, arg_name) = if s3 { ("P3", "P4") } else { ("P6", "P7") };
    if p_is_degenerate(inv) {
        let note = "P vanishes on this surface: log and argument identities are vacuous";
        checks.push(Check::vacuous(log_name, note));
        checks.push(Check::vacuous(arg_name, note));
        return SuiteReport::new("lemmaP", checks);
    }

    let logp = Field {
        nu: g.nu,
        nv: g.nv,
        data: inv
            .p
            .data
            .iter()
            .map(|x| Complex64::new(x.norm().max(f64::MIN_POSITIVE).ln(), 0.0))
            .collect(),
    };
    let lap_logp = ops.laplacian_conformal(&logp, &inv.omega);
    let log_res = rfield(
        g,
        build_vec(inv.mode, n, |i| {
            let target =
                if s3 { 4.0 * inv.curvature.data[i] } else { 4.0 * inv.curvature.data[i] - 2.0 };
            (lap_logp.data[i].re - target).abs()
        }),
    );
    checks.push(measure(log_name, &log_res, mask, second));

    let psi_c = Field {
        nu: g.nu,
        nv: g.nv,
        data: inv.psi.data.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
    };
    let lap_psi = ops.laplacian_conformal(&psi_c, &inv.omega);
    let arg_res = rfield(
        g,
        build_vec(inv.mode, n, |i| (lap_psi.data[i].re - inv.p.data[i].im).abs()),
    );
    let arg_mask = mask.and(&inv.psi_valid);
    checks.push(measure(arg_name, &arg_res, &arg_mask, second));
    SuiteReport::new("lemmaP", checks)
}

/// Curvature of the auxiliary metric sqrt|P| g. Whenever the log
/// identity for P holds, this metric is flat on 3-sphere targets and
/// has constant curvature 1/(2 sqrt|P|) on isotropic 4-sphere targets.
pub fn auxmetric_suite(inv: &Invariants, ops: &DiffOps, tol: Option<f64>) -> SuiteReport {
    let g = &inv.grid;
    let n = g.len();
    let first = tol.unwrap_or_else(|| default_tol(g));
    let second = second_order_tol(g, first);
    if p_is_degenerate(inv) {
        return SuiteReport::new(
            "auxmetric",
            vec![Check::vacuous("flat", "inapplicable: P vanishes on this surface")],
        );
    }
    let ktilde = aux_curvature(&inv.p, &inv.omega, ops);
    let checks = if inv.sphere_dim == 3 {
        vec![measure("flat", &ktilde, &inv.deep_mask, second)]
    } else {
        let med = masked_median(&ktilde, &inv.deep_mask);
        let dev = rfield(
            g,
            build_vec(inv.mode, n, |i| (ktilde.data[i] - med).abs()),
        );
        vec![measure("constant-curvature", &dev, &inv.deep_mask, second)
            .with_note(&format!("aux curvature levels at {med:.6}"))]
    };
    SuiteReport::new("auxmetric", checks)
}

/// Gaussian curvature of the rescaled metric sqrt|P| e^{2 omega} |dz|^2.
pub fn aux_curvature(p: &CField, omega: &RField, ops: &DiffOps) -> RField {
    let n = p.data.len();
    let omega_t: Vec<f64> = (0..n)
        .map(|i| 0.25 * p.data[i].norm().max(f64::MIN_POSITIVE).ln() + omega.data[i])
        .collect();
    let omega_t_r = Field { nu: p.nu, nv: p.nv, data: omega_t.clone() };
    let omega_t_c = Field {
        nu: p.nu,
        nv: p.nv,
        data: omega_t.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
    };
    let lap = ops.laplacian_conformal(&omega_t_c, &omega_t_r);
    Field {
        nu: p.nu,
        nv: p.nv,
        data: lap.data.iter().map(|x| -x.re).collect(),
    }
}

/// Stability of every residual and of P itself under kappa -> e^{it}
/// kappa. The t = 0 and t = pi paths reproduce the baseline bit for
/// bit; other angles agree to floating-point cancellation, far below
/// the pinned 1e-9.
pub fn family_suite(inv: &Invariants, ops: &DiffOps, t: f64) -> SuiteReport {
    let tol = 1e-9;
    let g = &inv.grid;
    let n = g.len();
    let base = match equation_fields(inv, ops, None) {
        Ok(e) => e,
        Err(e) => {
            return SuiteReport::new(
                "family",
                vec![Check::from_stats("gauss-shift", f64::INFINITY, f64::INFINITY, 0, tol)
                    .with_note(&format!("{e}"))],
            )
        }
    };
    let rot = if t == 0.0 {
        None
    } else if t == std::f64::consts::PI {
        Some(Complex64::new(-1.0, 0.0))
    } else {
        Some(Complex64::new(t.cos(), t.sin()))
    };
    let turned = match equation_fields(inv, ops, rot) {
        Ok(e) => e,
        Err(e) => {
            return SuiteReport::new(
                "family",
                vec![Check::from_stats("gauss-shift", f64::INFINITY, f64::INFINITY, 0, tol)
                    .with_note(&format!("{e}"))],
            )
        }
    };
    let shift = |a: &RField, b: &RField| -> RField {
        rfield(g, (0..n).map(|i| (a.data[i] - b.data[i]).abs()).collect())
    };
    let p_shift = rfield(
        g,
        (0..n).map(|i| (turned.p.data[i] - base.p.data[i]).norm()).collect(),
    );
    let mut checks = vec![
        measure("gauss-shift", &shift(&turned.gauss, &base.gauss), &inv.mask, tol),
        measure("willmore-shift", &shift(&turned.willmore, &base.willmore), &inv.mask, tol),
        measure("p-shift", &p_shift, &inv.mask, tol),
    ];
    if rot.is_none() {
        let identical = turned
            .p
            .data
            .iter()
            .zip(&base.p.data)
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
        checks.push(Check::from_stats(
            "p-bitwise",
            if identical { 0.0 } else { 1.0 },
            0.0,
            n,
            0.5,
        ));
    }
    SuiteReport::new("family", checks)
}

/// All residual suites in a fixed order.
pub fn all_suites(inv: &Invariants, ops: &DiffOps, tol: Option<f64>) -> Vec<SuiteReport> {
    vec![
        structure_suite(inv, ops, tol),
        integrability_suite(inv, ops, tol),
        willmore_suite(inv, ops, tol),
        swillmore_suite(inv, ops, tol),
        lemmap_suite(inv, ops, tol),
        auxmetric_suite(inv, ops, tol),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    MinimalR3,
    CliffordClass,
    ComplexCurve,
    VeroneseClass,
    NonConstantK,
    NotWillmore,
    Indeterminate,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::MinimalR3 => "MinimalR3",
            Verdict::CliffordClass => "CliffordClass",
            Verdict::ComplexCurve => "ComplexCurve",
            Verdict::VeroneseClass => "VeroneseClass",
            Verdict::NonConstantK => "NonConstantK",
            Verdict::NotWillmore => "NotWillmore",
            Verdict::Indeterminate => "Indeterminate",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    /// The inequalities that decided the verdict, with their values.
    pub fired: Vec<String>,
    pub k_level: f64,
    pub p_level: Complex64,
}

/// Decide which constant-curvature model the surface matches. K bands
/// are 10x the suite tolerance and P bands 100x, one derivative level
/// apart: K needs three grid derivatives past the lift, P five.
pub fn classify(inv: &Invariants, ops: &DiffOps, tol: Option<f64>) -> Result<Classification> {
    let tol = tol.unwrap_or_else(|| default_tol(&inv.grid));
    let k_band = 10.0 * tol;
    let p_band = 100.0 * tol;
    let mut fired = Vec::new();

    let will = willmore_residual(inv, ops)?;
    let wmax = masked_max(&will, &inv.mask);
    let k_level = masked_median(&inv.curvature, &inv.deep_mask);
    let re_level = masked_median(
        &Field {
            nu: inv.p.nu,
            nv: inv.p.nv,
            data: inv.p.data.iter().map(|x| x.re).collect(),
        },
        &inv.deep_mask,
    );
    let im_level = masked_median(
        &Field {
            nu: inv.p.nu,
            nv: inv.p.nv,
            data: inv.p.data.iter().map(|x| x.im).collect(),
        },
        &inv.deep_mask,
    );
    let p_level = Complex64::new(re_level, im_level);

    if wmax > WILLMORE_FAIL_FLOOR {
        fired.push(format!(
            "willmore residual {wmax:.3e} > {WILLMORE_FAIL_FLOOR} (not a Willmore surface)"
        ));
        return Ok(Classification { verdict: Verdict::NotWillmore, fired, k_level, p_level });
    }
    fired.push(format!("willmore residual {wmax:.3e} <= {WILLMORE_FAIL_FLOOR}"));

    let k_dev = masked_max_dev_abs(&inv.curvature, &inv.deep_mask, k_level);
    if k_dev > k_band {
        fired.push(format!("K varies by {k_dev:.3e} > band {k_band:.1e}"));
        return Ok(Classification { verdict: Verdict::NonConstantK, fired, k_level, p_level });
    }
    fired.push(format!("K constant at {k_level:.6} within {k_dev:.3e}"));

    let p_dev = {
        let mut worst: f64 = 0.0;
        for (x, keep) in inv.p.data.iter().zip(&inv.deep_mask.data) {
            if *keep {
                worst = worst.max((x - p_level).norm());
            }
        }
        worst
    };
    if p_dev > p_band {
        fired.push(format!("P varies by {p_dev:.3e} > band {p_band:.1e}"));
        return Ok(Classification { verdict: Verdict::Indeterminate, fired, k_level, p_level });
    }
    fired.push(format!(
        "P constant at {:.6}{:+.6}i within {p_dev:.3e}",
        p_level.re, p_level.im
    ));

    let isotropic = inv.sphere_dim >= 4
        && max_c(&inv.kk, &inv.deep_mask) <= ISOTROPY_GATE;

    let near = |a: f64, b: f64, band: f64| (a - b).abs() <= band;
    let p_near = |re: f64| near(p_level.re, re, p_band) && near(p_level.im, 0.0, p_band);

    let verdict = if near(k_level, 1.0, k_band) && p_near(0.0) {
        fired.push(format!("|K - 1| <= {k_band:.1e} and |P| <= {p_band:.1e}"));
        Verdict::MinimalR3
    } else if near(k_level, 0.0, k_band) && p_near(-2.0) {
        fired.push(format!("|K| <= {k_band:.1e} and |P + 2| <= {p_band:.1e}"));
        Verdict::CliffordClass
    } else if isotropic && near(k_level, 2.0, k_band) && p_near(0.0) {
        fired.push(format!(
            "isotropic, |K - 2| <= {k_band:.1e} and |P| <= {p_band:.1e}"
        ));
        Verdict::ComplexCurve
    } else if isotropic && near(k_level, 0.5, k_band) && p_near(-3.0) {
        fired.push(format!(
            "isotropic, |K - 1/2| <= {k_band:.1e} and |P + 3| <= {p_band:.1e}"
        ));
        Verdict::VeroneseClass
    } else {
        fired.push("no constant-curvature model matched".to_string());
        Verdict::Indeterminate
    };
    Ok(Classification { verdict, fired, k_level, p_level })
}

fn masked_max_dev_abs(f: &RField, mask: &Mask, c: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, keep) in f.data.iter().zip(&mask.data) {
        if *keep {
            worst = worst.max((x - c).abs());
        }
    }
    worst
}

/// Pointwise agreement of the scalar invariants of two runs of the
/// same surface (typically one of them through an ambient isometry).
#[derive(Clone, Copy, Debug)]
pub struct InvarianceDeviation {
    pub omega: f64,
    pub kkbar: f64,
    pub curvature: f64,
    pub p: f64,
}

impl InvarianceDeviation {
    pub fn worst(&self) -> f64 {
        self.omega.max(self.kkbar).max(self.curvature).max(self.p)
    }
}

pub fn invariance_deviation(a: &Invariants, b: &Invariants) -> InvarianceDeviation {
    let mask = a.deep_mask.and(&b.deep_mask);
    let mut omega: f64 = 0.0;
    let mut kkbar: f64 = 0.0;
    let mut curvature: f64 = 0.0;
    let mut p: f64 = 0.0;
    for (i, keep) in mask.data.iter().enumerate() {
        if !keep {
            continue;
        }
        omega = omega.max((a.omega.data[i] - b.omega.data[i]).abs());
        kkbar = kkbar.max((a.kkbar.data[i] - b.kkbar.data[i]).abs());
        curvature = curvature.max((a.curvature.data[i] - b.curvature.data[i]).abs());
        p = p.max((a.p.data[i] - b.p.data[i]).norm());
    }
    InvarianceDeviation { omega, kkbar, curvature, p }
}

/// Plot-ready per-node dump in row-major order.
pub fn nodes_csv(inv: &Invariants, ops: &DiffOps) -> Result<String> {
    let will = willmore_residual(inv, ops)?;
    let g = &inv.grid;
    let mut out = String::with_capacity(g.len() * 96);
    out.push_str("u,v,masked,K,ReP,ImP,psi,omega,kkbar,willmore_res,swillmore_defect,isotropy\n");
    for iv in 0..g.nv {
        for iu in 0..g.nu {
            let i = g.idx(iu, iv);
            out.push_str(&format!(
                "{:.9},{:.9},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}\n",
                g.u(iu),
                g.v(iv),
                u8::from(inv.mask.data[i]),
                inv.curvature.data[i],
                inv.p.data[i].re,
                inv.p.data[i].im,
                inv.psi.data[i],
                inv.omega.data[i],
                inv.kkbar.data[i],
                will.data[i],
                inv.swillmore_defect.data[i],
                inv.kk.data[i].norm(),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{compute_invariants, PipelineOptions};
    use crate::surface::builtin_spec;

    fn run(name: &str) -> (Invariants, DiffOps) {
        let spec = builtin_spec(name).unwrap();
        let inv = compute_invariants(&spec, &PipelineOptions::default()).unwrap();
        let ops = DiffOps::new(&inv.grid, inv.mode).unwrap();
        (inv, ops)
    }

    #[test]
    fn clifford_passes_every_suite() {
        let (inv, ops) = run("clifford");
        for suite in all_suites(&inv, &ops, None) {
            assert!(
                suite.pass(),
                "suite {} failed: {:?}",
                suite.suite,
                suite.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
            );
        }
        let cls = classify(&inv, &ops, None).unwrap();
        assert_eq!(cls.verdict, Verdict::CliffordClass, "fired: {:?}", cls.fired);
    }

    #[test]
    fn catenoid_passes_and_reports_vacuous_p_checks() {
        let (inv, ops) = run("catenoid");
        let suites = all_suites(&inv, &ops, None);
        for suite in &suites {
            assert!(
                suite.pass(),
                "suite {} failed: {:?}",
                suite.suite,
                suite.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
            );
        }
        let lemma = suites.iter().find(|s| s.suite == "lemmaP").unwrap();
        assert!(lemma.check("P3").unwrap().note.is_some());
        assert!(lemma.check("P4").unwrap().note.is_some());
        let aux = suites.iter().find(|s| s.suite == "auxmetric").unwrap();
        assert!(aux.check("flat").unwrap().note.is_some());
        let cls = classify(&inv, &ops, None).unwrap();
        assert_eq!(cls.verdict, Verdict::MinimalR3, "fired: {:?}", cls.fired);
    }

    #[test]
    fn enneper_and_helicoid_classify_as_minimal() {
        for name in ["enneper", "helicoid"] {
            let (inv, ops) = run(name);
            assert!(structure_suite(&inv, &ops, None).pass(), "{name} structure");
            assert!(integrability_suite(&inv, &ops, None).pass(), "{name} integrability");
            assert!(willmore_suite(&inv, &ops, None).pass(), "{name} willmore");
            let cls = classify(&inv, &ops, None).unwrap();
            assert_eq!(cls.verdict, Verdict::MinimalR3, "{name} fired: {:?}", cls.fired);
        }
    }

    #[test]
    fn corrupted_schwarzian_fails_structure() {
        let (mut inv, ops) = run("clifford");
        for x in inv.schwarzian.data.iter_mut() {
            *x += 0.1;
        }
        let suite = structure_suite(&inv, &ops, None);
        assert!(!suite.pass());
        assert!(suite.check("line1").unwrap().max > 0.01);
    }

    #[test]
    fn cylinder_fails_willmore_and_classifies_not_willmore() {
        let (inv, ops) = run("cylinder");
        let suite = willmore_suite(&inv, &ops, None);
        assert!(!suite.pass());
        assert!(suite.check("willmore").unwrap().max > 0.05);
        // the first-order conditions still hold: any immersion
        // satisfies them, Willmore or not
        let integ = integrability_suite(&inv, &ops, None);
        assert!(integ.pass(), "{:?}", integ.checks);
        let cls = classify(&inv, &ops, None).unwrap();
        assert_eq!(cls.verdict, Verdict::NotWillmore);
    }

    #[test]
    fn veronese_runs_the_isotropic_identities() {
        let (inv, ops) = run("veronese");
        let lemma = lemmap_suite(&inv, &ops, None);
        assert!(lemma.pass(), "{:?}", lemma.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        assert!(lemma.check("isotropy").unwrap().pass);
        assert!(lemma.check("P5").unwrap().note.is_none());
        assert!(lemma.check("P6").is_some());
        let aux = auxmetric_suite(&inv, &ops, None);
        assert!(aux.pass(), "{:?}", aux.checks);
        assert!(aux.check("constant-curvature").unwrap().note.is_some());
        // the rescaled metric has curvature 1/(2 sqrt|P|) here
        let level = 1.0 / (2.0 * 3.0_f64.sqrt());
        let ktilde = aux_curvature(&inv.p, &inv.omega, &ops);
        let med = masked_median(&ktilde, &inv.deep_mask);
        assert!((med - level).abs() < 1e-3, "aux curvature level {med} vs {level}");
        let cls = classify(&inv, &ops, None).unwrap();
        assert_eq!(cls.verdict, Verdict::VeroneseClass, "fired: {:?}", cls.fired);
    }

    #[test]
    fn complex_parabola_classifies_as_complex_curve() {
        let (inv, ops) = run("complex_parabola");
        let lemma = lemmap_suite(&inv, &ops, None);
        assert!(lemma.pass());
        assert!(lemma.check("P6").unwrap().note.is_some());
        let cls = classify(&inv, &ops, None).unwrap();
        assert_eq!(cls.verdict, Verdict::ComplexCurve, "fired: {:?}", cls.fired);
    }

    #[test]
    fn phase_rotation_is_exact_at_zero_and_pi() {
        let (inv, ops) = run("clifford");
        let zero = family_suite(&inv, &ops, 0.0);
        assert!(zero.pass(), "{:?}", zero.checks);
        assert_eq!(zero.check("p-bitwise").unwrap().max, 0.0);
        let pi = family_suite(&inv, &ops, std::f64::consts::PI);
        assert!(pi.pass(), "{:?}", pi.checks);
        assert_eq!(pi.check("p-shift").unwrap().max, 0.0);
    }

    #[test]
    fn phase_rotation_cancels_to_rounding_at_general_angles() {
        let (inv, ops) = run("catenoid");
        for t in [std::f64::consts::PI / 6.0, std::f64::consts::PI / 3.0] {
            let suite = family_suite(&inv, &ops, t);
            assert!(suite.pass(), "t = {t}: {:?}", suite.checks);
        }
    }

    #[test]
    fn normal_basis_spans_and_stays_normal() {
        let (inv, ops) = run("veronese");
        let basis = normal_basis(&inv);
        assert_eq!(basis.len(), 2);
        // pointwise independence: the Gram determinant of the two
        // fields stays bounded away from zero on usable nodes
        let mut min_det = f64::INFINITY;
        for (i, keep) in inv.mask.data.iter().enumerate() {
            if !keep {
                continue;
            }
            let g11 = basis[0].data[i].dot(&basis[0].data[i].conj()).re;
            let g22 = basis[1].data[i].dot(&basis[1].data[i].conj()).re;
            let g12 = basis[0].data[i].dot(&basis[1].data[i].conj()).norm();
            min_det = min_det.min(g11 * g22 - g12 * g12);
        }
        assert!(min_det > 1e-6, "gram determinant dropped to {min_det}");
        for xi in &basis {
            assert!(normal_connection(xi, &inv.frame, &ops, &inv.mask).is_ok());
        }
    }

    #[test]
    fn unit_normal_is_unit_and_smooth_on_clifford() {
        let (inv, ops) = run("clifford");
        let basis = normal_basis(&inv);
        assert_eq!(basis.len(), 1);
        let x = &basis[0];
        let mut worst: f64 = 0.0;
        for (i, keep) in inv.mask.data.iter().enumerate() {
            if *keep {
                worst = worst.max((x.data[i].dot(&x.data[i].conj()).re - 1.0).abs());
            }
        }
        assert!(worst < 1e-9, "unit norm deviation {worst}");
        // D X = 0 for the rank-1 bundle; blows up instead if the field
        // carries orientation jumps
        let (dz_x, _) = normal_connection(x, &inv.frame, &ops, &inv.mask).unwrap();
        let mut dmax: f64 = 0.0;
        for (i, keep) in inv.mask.data.iter().enumerate() {
            if *keep {
                dmax = dmax.max(dz_x.data[i].norm_e());
            }
        }
        assert!(dmax < 1e-8, "D_z X = {dmax}");
    }

    #[test]
    fn synthetic_flat_gauge_aux_curvature_vanishes() {
        // choose omega freely and force log|P| = -4 omega, so the
        // rescaled metric is exactly flat; the residual is pure
        // discretization noise
        let g = Grid::new(0.0, 1.0, 0.0, 1.0, 64, 64, true, true).unwrap();
        let ops = DiffOps::new(&g, crate::par::RunMode::Sequential).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let mut omega = vec![0.0; g.len()];
        let mut p = vec![Complex64::new(0.0, 0.0); g.len()];
        for iv in 0..g.nv {
            for iu in 0..g.nu {
                let i = g.idx(iu, iv);
                let w = 0.1 * (tau * g.u(iu)).sin() * (tau * g.v(iv)).cos();
                omega[i] = w;
                p[i] = Complex64::new((-4.0 * w).exp(), 0.0);
            }
        }
        let ktilde = aux_curvature(
            &Field { nu: g.nu, nv: g.nv, data: p },
            &Field { nu: g.nu, nv: g.nv, data: omega },
            &ops,
        );
        let worst = masked_max(&ktilde, &Mask::all(&g));
        assert!(worst < 1e-8, "aux curvature {worst}");
    }

    #[test]
    fn invariance_deviation_is_zero_against_itself() {
        let (inv, _) = run("clifford");
        let dev = invariance_deviation(&inv, &inv);
        assert_eq!(dev.worst(), 0.0);
    }

    #[test]
    fn csv_has_one_row_per_node() {
        let (inv, ops) = run("clifford");
        let csv = nodes_csv(&inv, &ops).unwrap();
        assert_eq!(csv.lines().count(), inv.grid.len() + 1);
        assert!(csv.lines().nth(1).unwrap().split(',').count() == 12);
    }
}
