//! Surface specifications: a named map from a parameter rectangle into
//! S^3 or S^4, given either by a builtin from the catalog or by component
//! expressions. Euclidean targets (R3, R4) are carried onto the sphere by
//! one fixed inverse stereographic projection with the pole on the last
//! coordinate axis; everything computed downstream is invariant under
//! that choice.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::grid::Grid;
use crate::minkowski::LVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    R3,
    R4,
    S3,
    S4,
}

impl Target {
    pub fn parse(s: &str) -> Option<Target> {
        match s.to_ascii_lowercase().as_str() {
            "r3" => Some(Target::R3),
            "r4" => Some(Target::R4),
            "s3" => Some(Target::S3),
            "s4" => Some(Target::S4),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::R3 => "R3",
            Target::R4 => "R4",
            Target::S3 => "S3",
            Target::S4 => "S4",
        }
    }

    /// Number of component expressions a definition must supply.
    pub fn chart_components(self) -> usize {
        match self {
            Target::R3 => 3,
            Target::R4 => 4,
            Target::S3 => 4,
            Target::S4 => 5,
        }
    }

    /// n for the ambient sphere S^n the surface ends up in.
    pub fn sphere_dim(self) -> usize {
        match self {
            Target::R3 | Target::S3 => 3,
            Target::R4 | Target::S4 => 4,
        }
    }

    /// Dimension n+2 of the Lorentz space the lift lives in.
    pub fn lorentz_dim(self) -> usize {
        self.sphere_dim() + 2
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceKind {
    Builtin(&'static str),
    Chart(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub name: String,
    pub target: Target,
    pub kind: SurfaceKind,
    pub grid: Grid,
    pub expect_curvature: Option<f64>,
    pub expect_p: Option<f64>,
}

/// Inverse stereographic projection with pole on the last axis:
/// x in R^n -> (2x, |x|^2 - 1) / (|x|^2 + 1).
pub fn inverse_stereographic(x: &[f64]) -> LVec {
    let r2: f64 = x.iter().map(|a| a * a).sum();
    let s = 1.0 / (r2 + 1.0);
    let mut out = LVec::zero(x.len() + 1);
    for (k, a) in x.iter().enumerate() {
        out.set(k, 2.0 * a * s);
    }
    out.set(x.len(), (r2 - 1.0) * s);
    out
}

struct Builtin {
    name: &'static str,
    target: Target,
    eval: fn(f64, f64, &mut [f64]),
    grid: fn() -> Grid,
    expect_curvature: Option<f64>,
    expect_p: Option<f64>,
}

fn clifford_chart(u: f64, v: f64, out: &mut [f64]) {
    let a = 2.0 * 2.0f64.sqrt();
    let r = 0.5f64.sqrt();
    out[0] = r * (a * u).cos();
    out[1] = r * (a * u).sin();
    out[2] = r * (a * v).cos();
    out[3] = r * (a * v).sin();
}

fn catenoid_chart(u: f64, v: f64, out: &mut [f64]) {
    out[0] = v.cosh() * u.cos();
    out[1] = v.cosh() * u.sin();
    out[2] = v;
}

fn enneper_chart(u: f64, v: f64, out: &mut [f64]) {
    out[0] = u - u * u * u / 3.0 + u * v * v;
    out[1] = v - v * v * v / 3.0 + v * u * u;
    out[2] = u * u - v * v;
}

fn helicoid_chart(u: f64, v: f64, out: &mut [f64]) {
    out[0] = v.sinh() * u.cos();
    out[1] = v.sinh() * u.sin();
    out[2] = u;
}

fn complex_parabola_chart(u: f64, v: f64, out: &mut [f64]) {
    // (z, z^2/2) in C^2 with z = u + iv
    out[0] = u;
    out[1] = v;
    out[2] = 0.5 * (u * u - v * v);
    out[3] = u * v;
}

fn veronese_chart(u: f64, v: f64, out: &mut [f64]) {
    // (u,v) -> unit 2-sphere, then the degree-2 orthogonal map into S^4
    let q = 1.0 / (1.0 + u * u + v * v);
    let x = 2.0 * u * q;
    let y = 2.0 * v * q;
    let z = (u * u + v * v - 1.0) * q;
    let s3 = 3.0f64.sqrt();
    out[0] = s3 * x * y;
    out[1] = s3 * x * z;
    out[2] = s3 * y * z;
    out[3] = s3 * 0.5 * (x * x - y * y);
    out[4] = 0.5 * (x * x + y * y - 2.0 * z * z);
}

fn cylinder_chart(u: f64, v: f64, out: &mut [f64]) {
    out[0] = u.cos();
    out[1] = u.sin();
    out[2] = v;
}

fn builtins() -> &'static [Builtin] {
    const PI: f64 = std::f64::consts::PI;
    static TABLE: &[Builtin] = &[
        Builtin {
            name: "clifford",
            target: Target::S3,
            eval: clifford_chart,
            grid: || {
                let l = PI / 2.0f64.sqrt();
                Grid::new(0.0, l, 0.0, l, 64, 64, true, true).unwrap()
            },
            expect_curvature: Some(0.0),
            expect_p: Some(-2.0),
        },
        Builtin {
            name: "catenoid",
            target: Target::R3,
            eval: catenoid_chart,
            grid: || Grid::new(0.0, 2.0 * PI, -1.2, 1.2, 64, 96, true, false).unwrap(),
            expect_curvature: Some(1.0),
            expect_p: Some(0.0),
        },
        Builtin {
            name: "enneper",
            target: Target::R3,
            eval: enneper_chart,
            grid: || Grid::new(-1.0, 1.0, -1.0, 1.0, 96, 96, false, false).unwrap(),
            expect_curvature: Some(1.0),
            expect_p: Some(0.0),
        },
        Builtin {
            name: "helicoid",
            target: Target::R3,
            // the third component is u itself, so no axis is periodic
            eval: helicoid_chart,
            grid: || Grid::new(-1.2, 1.2, -1.2, 1.2, 96, 96, false, false).unwrap(),
            expect_curvature: Some(1.0),
            expect_p: Some(0.0),
        },
        Builtin {
            name: "complex_parabola",
            target: Target::R4,
            eval: complex_parabola_chart,
            grid: || Grid::new(0.2, 1.2, 0.2, 1.2, 96, 96, false, false).unwrap(),
            expect_curvature: Some(2.0),
            expect_p: None,
        },
        Builtin {
            name: "veronese",
            target: Target::S4,
            eval: veronese_chart,
            grid: || Grid::new(0.15, 1.0, 0.15, 1.0, 96, 96, false, false).unwrap(),
            expect_curvature: Some(0.5),
            expect_p: Some(-3.0),
        },
        Builtin {
            name: "cylinder",
            target: Target::R3,
            eval: cylinder_chart,
            grid: || Grid::new(0.0, 2.0 * PI, -1.0, 1.0, 64, 64, true, false).unwrap(),
            expect_curvature: None,
            expect_p: None,
        },
    ];
    TABLE
}

fn find_builtin(name: &str) -> Option<&'static Builtin> {
    builtins().iter().find(|b| b.name == name)
}

pub fn builtin_spec(name: &str) -> Option<SurfaceSpec> {
    find_builtin(name).map(|b| SurfaceSpec {
        name: b.name.to_string(),
        target: b.target,
        kind: SurfaceKind::Builtin(b.name),
        grid: (b.grid)(),
        expect_curvature: b.expect_curvature,
        expect_p: b.expect_p,
    })
}

pub fn catalog() -> Vec<SurfaceSpec> {
    builtins().iter().map(|b| builtin_spec(b.name).unwrap()).collect()
}

impl SurfaceSpec {
    /// Chart value before any projection: the raw component tuple.
    pub fn evaluate_chart(&self, u: f64, v: f64) -> Result<Vec<f64>> {
        let n = self.target.chart_components();
        let mut out = vec![0.0; n];
        match &self.kind {
            SurfaceKind::Builtin(name) => {
                let b = find_builtin(name).expect("builtin disappeared");
                (b.eval)(u, v, &mut out);
            }
            SurfaceKind::Chart(exprs) => {
                for (k, e) in exprs.iter().enumerate() {
                    out[k] = e.eval(u, v)?;
                }
            }
        }
        Ok(out)
    }

    /// Point of the ambient unit sphere S^n, as n+1 Euclidean components.
    pub fn evaluate(&self, u: f64, v: f64) -> Result<LVec> {
        let chart = self.evaluate_chart(u, v)?;
        Ok(match self.target {
            Target::R3 | Target::R4 => inverse_stereographic(&chart),
            Target::S3 | Target::S4 => LVec::new(&chart),
        })
    }

    /// Max deviation of |f|^2 from 1 over the grid (spherical targets).
    pub fn max_unit_norm_deviation(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for iv in 0..self.grid.nv {
            for iu in 0..self.grid.nu {
                let p = self.evaluate(self.grid.u(iu), self.grid.v(iv))?;
                let n2: f64 = p.components().iter().map(|a| a * a).sum();
                worst = worst.max((n2 - 1.0).abs());
            }
        }
        Ok(worst)
    }

    pub fn print(&self) -> String {
        let mut out = String::new();
        out.push_str("[surface]\n");
        out.push_str(&format!("name = {}\n", self.name));
        out.push_str(&format!("target = {}\n", self.target));
        match &self.kind {
            SurfaceKind::Builtin(b) => out.push_str(&format!("builtin = {b}\n")),
            SurfaceKind::Chart(exprs) => {
                for (k, e) in exprs.iter().enumerate() {
                    out.push_str(&format!("c{} = {}\n", k + 1, e));
                }
            }
        }
        out.push_str("\n[grid]\n");
        let g = &self.grid;
        out.push_str(&format!("u0 = {:?}\nu1 = {:?}\nnu = {}\nperiodic_u = {}\n", g.u0, g.u1, g.nu, g.periodic_u));
        out.push_str(&format!("v0 = {:?}\nv1 = {:?}\nnv = {}\nperiodic_v = {}\n", g.v0, g.v1, g.nv, g.periodic_v));
        if self.expect_curvature.is_some() || self.expect_p.is_some() {
            out.push_str("\n[expect]\n");
            if let Some(k) = self.expect_curvature {
                out.push_str(&format!("K = {k:?}\n"));
            }
            if let Some(p) = self.expect_p {
                out.push_str(&format!("P = {p:?}\n"));
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Surface,
    Grid,
    Expect,
}

#[derive(Default)]
struct RawDoc {
    name: Option<String>,
    target: Option<Target>,
    builtin: Option<String>,
    components: Vec<Option<(Expr, usize)>>, // (expr, line), index = component-1
    u0: Option<f64>,
    u1: Option<f64>,
    v0: Option<f64>,
    v1: Option<f64>,
    nu: Option<usize>,
    nv: Option<usize>,
    periodic_u: Option<bool>,
    periodic_v: Option<bool>,
    expect_curvature: Option<f64>,
    expect_p: Option<f64>,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Constant numeric value: an expression in which u and v do not appear.
fn const_value(src: &str, line: usize, col: usize) -> Result<f64> {
    let e = expr::parse_at(src, line, col)?;
    e.eval(f64::NAN, f64::NAN)
        .map_err(|_| perr(line, col + 1, "value must be a constant expression"))
}

fn bool_value(src: &str, line: usize, col: usize) -> Result<bool> {
    match src {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(perr(line, col + 1, format!("expected true or false, got '{other}'"))),
    }
}

fn int_value(src: &str, line: usize, col: usize) -> Result<usize> {
    src.parse::<usize>()
        .map_err(|_| perr(line, col + 1, format!("expected a positive integer, got '{src}'")))
}

pub fn parse_surface(text: &str) -> Result<SurfaceSpec> {
    let mut raw = RawDoc { components: vec![None; 5], ..Default::default() };
    let mut section = Section::None;
    let mut surface_seen = false;

    for (li, full_line) in text.lines().enumerate() {
        let line_no = li + 1;
        let line = full_line.trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = line.len() - trimmed.len();

        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| {
                perr(line_no, indent + 1, "unterminated section header")
            })?;
            section = match name {
                "surface" => {
                    surface_seen = true;
                    Section::Surface
                }
                "grid" => Section::Grid,
                "expect" => Section::Expect,
                other => return Err(perr(line_no, indent + 2, format!("unknown section '{other}'"))),
            };
            continue;
        }

        let eq = trimmed.find('=').ok_or_else(|| {
            perr(line_no, indent + 1, "expected 'key = value' or a section header")
        })?;
        let key = trimmed[..eq].trim();
        let key_col = indent + 1;
        let val_rel = trimmed[eq + 1..].len() - trimmed[eq + 1..].trim_start().len();
        let val_col = indent + eq + 1 + val_rel; // 0-based offset of value start
        let val = trimmed[eq + 1..].trim();
        if val.is_empty() {
            return Err(perr(line_no, val_col + 1, format!("missing value for '{key}'")));
        }

        macro_rules! set_once {
            ($slot:expr, $value:expr) => {{
                if $slot.is_some() {
                    return Err(perr(line_no, key_col, format!("duplicate key '{key}'")));
                }
                $slot = Some($value);
            }};
        }

        match section {
            Section::None => {
                return Err(perr(line_no, key_col, "key outside of any section"));
            }
            Section::Surface => match key {
                "name" => set_once!(raw.name, val.to_string()),
                "target" => {
                    let t = Target::parse(val).ok_or_else(|| {
                        perr(line_no, val_col + 1, format!("unknown target '{val}' (expected R3, R4, S3 or S4)"))
                    })?;
                    set_once!(raw.target, t)
                }
                "builtin" => set_once!(raw.builtin, val.to_string()),
                "c1" | "c2" | "c3" | "c4" | "c5" => {
                    let idx = key[1..].parse::<usize>().unwrap() - 1;
                    if raw.components[idx].is_some() {
                        return Err(perr(line_no, key_col, format!("duplicate key '{key}'")));
                    }
                    let e = expr::parse_at(val, line_no, val_col)?;
                    raw.components[idx] = Some((e, line_no));
                }
                other => {
                    return Err(perr(line_no, key_col, format!("unknown key '{other}' in [surface]")));
                }
            },
            Section::Grid => match key {
                "u0" => set_once!(raw.u0, const_value(val, line_no, val_col)?),
                "u1" => set_once!(raw.u1, const_value(val, line_no, val_col)?),
                "v0" => set_once!(raw.v0, const_value(val, line_no, val_col)?),
                "v1" => set_once!(raw.v1, const_value(val, line_no, val_col)?),
                "nu" => set_once!(raw.nu, int_value(val, line_no, val_col)?),
                "nv" => set_once!(raw.nv, int_value(val, line_no, val_col)?),
                "periodic_u" => set_once!(raw.periodic_u, bool_value(val, line_no, val_col)?),
                "periodic_v" => set_once!(raw.periodic_v, bool_value(val, line_no, val_col)?),
                other => {
                    return Err(perr(line_no, key_col, format!("unknown key '{other}' in [grid]")));
                }
            },
            Section::Expect => match key {
                "K" => set_once!(raw.expect_curvature, const_value(val, line_no, val_col)?),
                "P" => set_once!(raw.expect_p, const_value(val, line_no, val_col)?),
                other => {
                    return Err(perr(line_no, key_col, format!("unknown key '{other}' in [expect]")));
                }
            },
        }
    }

    if !surface_seen {
        return Err(perr(1, 1, "missing [surface] section"));
    }
    assemble(raw)
}

fn assemble(raw: RawDoc) -> Result<SurfaceSpec> {
    let bad = |msg: String| Error::BadSurface(msg);

    let base = match &raw.builtin {
        Some(name) => Some(
            builtin_spec(name)
                .ok_or_else(|| bad(format!("unknown builtin '{name}'")))?,
        ),
        None => None,
    };

    let target = match (raw.target, &base) {
        (Some(t), Some(b)) if t != b.target => {
            return Err(bad(format!(
                "builtin '{}' targets {}, document says {}",
                b.name, b.target, t
            )));
        }
        (Some(t), _) => t,
        (None, Some(b)) => b.target,
        (None, None) => return Err(bad("missing target".into())),
    };

    let given: Vec<usize> = raw
        .components
        .iter()
        .enumerate()
        .filter_map(|(k, c)| c.as_ref().map(|_| k))
        .collect();

    let kind = if let Some(b) = &base {
        if !given.is_empty() {
            return Err(bad(format!(
                "builtin '{}' does not take component expressions",
                b.name
            )));
        }
        b.kind.clone()
    } else {
        let need = target.chart_components();
        for k in 0..need {
            if raw.components[k].is_none() {
                return Err(bad(format!(
                    "target {target} expects {need} components, c{} is missing",
                    k + 1
                )));
            }
        }
        if let Some(extra) = given.iter().find(|k| **k >= need) {
            let line = raw.components[*extra].as_ref().unwrap().1;
            return Err(perr(
                line,
                1,
                format!("target {target} expects {need} components, c{} is not allowed", extra + 1),
            ));
        }
        SurfaceKind::Chart(
            raw.components.into_iter().take(need).map(|c| c.unwrap().0).collect(),
        )
    };

    let grid = if let Some(b) = &base {
        let d = b.grid;
        Grid::new(
            raw.u0.unwrap_or(d.u0),
            raw.u1.unwrap_or(d.u1),
            raw.v0.unwrap_or(d.v0),
            raw.v1.unwrap_or(d.v1),
            raw.nu.unwrap_or(d.nu),
            raw.nv.unwrap_or(d.nv),
            raw.periodic_u.unwrap_or(d.periodic_u),
            raw.periodic_v.unwrap_or(d.periodic_v),
        )?
    } else {
        let need = |x: Option<f64>, what: &str| x.ok_or_else(|| bad(format!("missing grid key '{what}'")));
        let needn = |x: Option<usize>, what: &str| x.ok_or_else(|| bad(format!("missing grid key '{what}'")));
        Grid::new(
            need(raw.u0, "u0")?,
            need(raw.u1, "u1")?,
            need(raw.v0, "v0")?,
            need(raw.v1, "v1")?,
            needn(raw.nu, "nu")?,
            needn(raw.nv, "nv")?,
            raw.periodic_u.unwrap_or(false),
            raw.periodic_v.unwrap_or(false),
        )?
    };

    let spec = SurfaceSpec {
        name: raw
            .name
            .or_else(|| base.as_ref().map(|b| b.name.clone()))
            .ok_or_else(|| bad("missing surface name".into()))?,
        target,
        kind,
        grid,
        expect_curvature: raw.expect_curvature.or(base.as_ref().and_then(|b| b.expect_curvature)),
        expect_p: raw.expect_p.or(base.as_ref().and_then(|b| b.expect_p)),
    };

    if matches!(spec.target, Target::S3 | Target::S4) {
        let dev = spec.max_unit_norm_deviation()?;
        if dev > 1e-9 {
            return Err(bad(format!(
                "image of '{}' is not on the unit sphere (max deviation {dev:.3e})",
                spec.name
            )));
        }
    }
    Ok(spec)
}
