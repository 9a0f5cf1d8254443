use crate::ratpoly::RatPoly;
use crate::trig::{TrigPoly, TrigRational};

/// Ambient sphere for the isoparametric reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    S3,
    S4,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::S3 => "s3",
            Space::S4 => "s4",
        }
    }

    /// Offset b in the candidate pair: G = 2(K - b) tan(q),
    /// F = 4(K cos^2 q - (K - b)/2 sin^2 q).
    fn shift(self) -> i64 {
        match self {
            Space::S3 => 1,
            Space::S4 => 2,
        }
    }
}

/// Candidate isoparametric data (F, G) as exact trig expressions in the
/// constant curvature symbol K and the phase q.
pub fn build_fg(space: Space) -> (TrigPoly, TrigRational) {
    let b = RatPoly::from_ints(&[-space.shift(), 1]); // K - b
    let k = RatPoly::symbol();
    let c2 = &TrigPoly::cos() * &TrigPoly::cos();
    let s2 = &TrigPoly::sin() * &TrigPoly::sin();
    let f = &c2.scale(&k.scale(&crate::ratpoly::int(4)))
        - &s2.scale(&b.scale(&crate::ratpoly::int(2)));
    let g = TrigRational::new(
        TrigPoly::sin().scale(&b.scale(&crate::ratpoly::int(2))),
        TrigPoly::cos(),
    );
    (f, g)
}

/// The compatibility expression
///   2K F + (2G - F')(G - F') + F (2G' - F'')
/// as an exact rational trig expression. It vanishes identically exactly when
/// (F, G) close the moving-frame system for a curvature-K isoparametric
/// foliation.
pub fn eisenhart_identity(f: &TrigPoly, g: &TrigRational) -> TrigRational {
    let two = crate::ratpoly::int(2);
    let k2 = RatPoly::symbol().scale(&two); // 2K
    let f = TrigRational::from_poly(f.clone());
    let fp = f.deriv();
    let fpp = fp.deriv();
    let gp = g.deriv();

    let term1 = &f * &TrigRational::from_poly(TrigPoly::constant(k2));
    let two_g = &TrigRational::from_poly(TrigPoly::constant(RatPoly::from_ints(&[2]))) * g;
    let term2 = &(&two_g - &fp) * &(g - &fp);
    let two_gp = &TrigRational::from_poly(TrigPoly::constant(RatPoly::from_ints(&[2]))) * &gp;
    let term3 = &f * &(&two_gp - &fpp);
    (&(&term1 + &term2) + &term3).cancel()
}

/// How derivative values are obtained for the numeric residual check.
pub enum DerivSource<'a> {
    /// Caller supplies F', F'', G', G''... only first and second of F and
    /// first of G are used.
    Analytic {
        f1: &'a dyn Fn(f64) -> f64,
        f2: &'a dyn Fn(f64) -> f64,
        g1: &'a dyn Fn(f64) -> f64,
    },
    /// Central differences with the given step.
    CentralDiff { h: f64 },
}

/// Outcome of a numeric sweep of the compatibility expression.
pub struct NumericCheck {
    pub max_residual: f64,
    /// Samples skipped because F <= 0 there (foliation breaks down).
    pub skipped: Vec<(f64, String)>,
}

/// Evaluates 2K F + (2G - F')(G - F') + F(2G' - F'') at the given phases.
pub fn identity_numeric_check(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    k: f64,
    samples: &[f64],
    derivs: DerivSource,
) -> NumericCheck {
    let mut max_residual: f64 = 0.0;
    let mut skipped = vec![];
    for &q in samples {
        let fv = f(q);
        if fv <= 0.0 {
            skipped.push((q, format!("F({q:.6}) = {fv:.3e} <= 0, sample skipped")));
            continue;
        }
        let (f1, f2, g1) = match &derivs {
            DerivSource::Analytic { f1, f2, g1 } => (f1(q), f2(q), g1(q)),
            DerivSource::CentralDiff { h } => {
                let h = *h;
                (
                    (f(q + h) - f(q - h)) / (2.0 * h),
                    (f(q + h) - 2.0 * fv + f(q - h)) / (h * h),
                    (g(q + h) - g(q - h)) / (2.0 * h),
                )
            }
        };
        let gv = g(q);
        let r = 2.0 * k * fv + (2.0 * gv - f1) * (gv - f1) + fv * (2.0 * g1 - f2);
        max_residual = max_residual.max(r.abs());
    }
    NumericCheck { max_residual, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, rat};

    #[test]
    fn build_fg_special_values() {
        let (f, g) = build_fg(Space::S3);
        // F at q=0 is 4K; at q=pi/2 it is -2(K-1)
        let at0 = f.substitute_k(&int(0));
        assert!((at0.eval_f64(0.0, 0.0) - 0.0).abs() < 1e-15);
        assert!((f.eval_f64(3.0, 0.0) - 12.0).abs() < 1e-12);
        assert!((f.eval_f64(3.0, std::f64::consts::FRAC_PI_2) - (-4.0)).abs() < 1e-12);
        // G = 2(K-1) tan q
        let q = 0.4;
        assert!((g.eval_f64(3.0, q) - 4.0 * q.tan()).abs() < 1e-12);

        let (f4, g4) = build_fg(Space::S4);
        // G cos = 2(K-2) sin as a TrigPoly
        let gc = &g4.num; // den is cos by construction
        assert_eq!(
            gc,
            &TrigPoly::sin().scale(&RatPoly::from_ints(&[-4, 2]))
        );
        assert!((f4.eval_f64(0.5, 0.3) - (4.0 * 0.5 * 0.3f64.cos().powi(2) + 3.0 * 0.3f64.sin().powi(2))).abs() < 1e-12);
    }

    #[test]
    fn flat_data_closes_only_at_zero_curvature() {
        // F=1, G=0: expression reduces to 2K, zero exactly at K=0
        let f = TrigPoly::one();
        let g = TrigRational::from_poly(TrigPoly::zero());
        let e = eisenhart_identity(&f, &g);
        assert!(e.substitute_k(&int(0)).is_zero());
        assert!(!e.substitute_k(&int(1)).is_zero());
    }

    #[test]
    fn cotangent_closes_the_unit_sphere_case() {
        // F=1, G=cot q, K=1: 2 + 2cot^2 - 2csc^2 = 0 exactly
        let f = TrigPoly::one();
        let g = TrigRational::new(TrigPoly::cos(), TrigPoly::sin());
        let e = eisenhart_identity(&f, &g);
        assert!(e.substitute_k(&int(1)).is_zero());
        assert!(!e.substitute_k(&rat(1, 2)).is_zero());
    }

    #[test]
    fn numeric_check_sphere_and_hyperbolic() {
        // sphere: F=1, G=cot, K=1
        let f = |_: f64| 1.0;
        let g = |q: f64| q.cos() / q.sin();
        let g1 = |q: f64| -1.0 / (q.sin() * q.sin());
        let z = |_: f64| 0.0;
        let chk = identity_numeric_check(
            &f,
            &g,
            1.0,
            &[0.3, 0.7, 1.2],
            DerivSource::Analytic { f1: &z, f2: &z, g1: &g1 },
        );
        assert!(chk.max_residual < 1e-12, "sphere residual {}", chk.max_residual);
        assert!(chk.skipped.is_empty());

        // hyperbolic: F=1, G=coth, K=-1
        let gh = |q: f64| q.cosh() / q.sinh();
        let gh1 = |q: f64| 1.0 - gh(q) * gh(q);
        let chk = identity_numeric_check(
            &f,
            &gh,
            -1.0,
            &[0.4, 0.9, 1.5],
            DerivSource::Analytic { f1: &z, f2: &z, g1: &gh1 },
        );
        assert!(chk.max_residual < 1e-12, "hyperbolic residual {}", chk.max_residual);
    }

    #[test]
    fn numeric_check_skips_degenerate_samples() {
        let f = |q: f64| q - 1.0; // nonpositive for q <= 1
        let g = |_: f64| 0.0;
        let chk = identity_numeric_check(&f, &g, 0.0, &[0.5, 1.5], DerivSource::CentralDiff { h: 1e-5 });
        assert_eq!(chk.skipped.len(), 1);
        assert!(chk.skipped[0].1.contains("skipped"));
    }

    #[test]
    fn central_differences_agree_with_analytic() {
        let f = |q: f64| 1.0 + 0.3 * (2.0 * q).sin();
        let g = |q: f64| q.cos();
        let f1 = |q: f64| 0.6 * (2.0 * q).cos();
        let f2 = |q: f64| -1.2 * (2.0 * q).sin();
        let g1 = |q: f64| -q.sin();
        let samples: Vec<f64> = (0..10).map(|i| 0.2 + 0.1 * i as f64).collect();
        let a = identity_numeric_check(&f, &g, 0.7, &samples, DerivSource::Analytic { f1: &f1, f2: &f2, g1: &g1 });
        let b = identity_numeric_check(&f, &g, 0.7, &samples, DerivSource::CentralDiff { h: 1e-5 });
        // second differences at h=1e-5 carry ~1e-6 cancellation noise
        assert!((a.max_residual - b.max_residual).abs() < 5e-5);
    }
}
