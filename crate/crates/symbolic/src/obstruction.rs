use crate::eisenhart::{build_fg, eisenhart_identity, Space};
use crate::ratpoly::RatPoly;
use crate::roots::{exact_roots, RootSet};
use crate::SymbolicError;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::fmt;

/// Denominator-cleared, content-normalized compatibility polynomial
///   sum_m coeffs[m](K) * cos^(2m) q.
/// The original rational expression E satisfies
///   poly(K, q) = premultiplier * E(K, q) * cos^cos_power q,
/// which is what ties the exact reduction back to numeric sampling.
#[derive(Clone, Debug)]
pub struct Obstruction {
    pub space: Space,
    pub coeffs: Vec<RatPoly>,
    pub cos_power: usize,
    pub premultiplier: BigRational,
}

impl Obstruction {
    pub fn eval_f64(&self, k: f64, q: f64) -> f64 {
        let x = q.cos() * q.cos();
        let mut acc = 0.0;
        for p in self.coeffs.iter().rev() {
            acc = acc * x + p.eval_f64(k);
        }
        acc
    }
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, p) in self.coeffs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", p)?;
            if m == 1 {
                write!(f, "*cos^2")?;
            } else if m > 1 {
                write!(f, "*cos^{}", 2 * m)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Reduces the compatibility expression for the candidate (F, G) of the given
/// space to a polynomial in cos^2 with coefficients in Q[K]:
/// cancels shared cos factors, clears the remaining cos-power denominator,
/// checks the sine-odd part vanishes, and divides out rational content with
/// the lowest surviving coefficient made positive-leading.
pub fn reduce_obstruction(space: Space) -> Result<Obstruction, SymbolicError> {
    let (f, g) = build_fg(space);
    let e = eisenhart_identity(&f, &g); // already cos-cancelled
    let (alpha, k) = e
        .den
        .as_cos_monomial()
        .ok_or(SymbolicError::DenominatorNotCosPower)?;
    if alpha.degree() != 0 || alpha.is_zero() {
        return Err(SymbolicError::DenominatorNotCosPower);
    }
    let alpha = alpha.coeff(0);
    let num = e.num;
    if !num.is_even() {
        return Err(SymbolicError::OddSinePartSurvives);
    }
    // only even cos powers can survive (the expression is invariant under
    // q -> q + pi); anything else means the reduction went wrong
    for (j, p) in num.even.iter().enumerate() {
        if j % 2 == 1 && !p.is_zero() {
            return Err(SymbolicError::OddSinePartSurvives);
        }
    }
    let mut coeffs: Vec<RatPoly> = num
        .even
        .iter()
        .step_by(2)
        .cloned()
        .collect();
    while coeffs.last().map_or(false, |p| p.is_zero()) {
        coeffs.pop();
    }
    // normalize: divide by alpha and by content, sign so the first surviving
    // coefficient has a positive leading term
    let content = TrigContent(&coeffs).value();
    let mut scale = if content.is_zero() {
        BigRational::zero()
    } else {
        content.recip()
    };
    if let Some(first) = coeffs.iter().find(|p| !p.is_zero()) {
        if (first.leading() * &scale).is_negative() {
            scale = -scale;
        }
    }
    let coeffs: Vec<RatPoly> = coeffs.iter().map(|p| p.scale(&scale)).collect();
    // poly = (num / (content*sign)) and num = E * alpha * cos^k
    let premultiplier = alpha * &scale;
    Ok(Obstruction { space, coeffs, cos_power: k, premultiplier })
}

struct TrigContent<'a>(&'a [RatPoly]);

impl TrigContent<'_> {
    fn value(&self) -> BigRational {
        use num_integer::Integer;
        let mut c = BigRational::zero();
        for p in self.0 {
            let pc = p.content();
            if c.is_zero() {
                c = pc;
            } else if !pc.is_zero() {
                let num = c.numer().gcd(pc.numer());
                let den = c.denom().lcm(pc.denom());
                c = BigRational::new(num, den);
            }
        }
        c
    }
}

/// Exact root analysis of an obstruction-style coefficient list.
#[derive(Clone, Debug)]
pub struct ObstructionVerdict {
    pub coefficient_roots: Vec<(String, RootSet)>,
    pub intersection: RootSet,
    /// True when no constant K satisfies every coefficient simultaneously.
    pub no_admissible_constant: bool,
}

impl fmt::Display for ObstructionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (poly, roots) in &self.coefficient_roots {
            writeln!(f, "  roots of {}: {}", poly, roots)?;
        }
        writeln!(f, "  common roots: {}", self.intersection)?;
        if self.no_admissible_constant {
            write!(f, "  verdict: no admissible constant K")
        } else {
            write!(f, "  verdict: admissible constant K exists")
        }
    }
}

pub fn obstruction_verdict(coeffs: &[RatPoly]) -> Result<ObstructionVerdict, SymbolicError> {
    let mut coefficient_roots = vec![];
    let mut intersection = RootSet::All;
    for p in coeffs {
        let roots = exact_roots(p)?;
        intersection = intersection.intersect(&roots);
        coefficient_roots.push((p.to_string(), roots));
    }
    let no_admissible_constant = intersection.is_empty();
    Ok(ObstructionVerdict { coefficient_roots, intersection, no_admissible_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, rat};

    /// Reference coefficients, derived by hand: substitute x = cos^2 q,
    /// expand the cleared expression, and collect powers of x. Both spaces
    /// come out linear in x.
    fn frozen(space: Space) -> (RatPoly, RatPoly) {
        match space {
            // 4(27K-8)(K-1) and -4(3K-1)(3K-8)
            Space::S3 => (
                RatPoly::from_ints(&[32, -140, 108]),
                RatPoly::from_ints(&[-32, 108, -36]),
            ),
            // 4(K-2)(27K-16) and -4(3K-2)(3K-16)
            Space::S4 => (
                RatPoly::from_ints(&[128, -280, 108]),
                RatPoly::from_ints(&[-128, 216, -36]),
            ),
        }
    }

    fn proportional(a: &RatPoly, b: &RatPoly) -> bool {
        if a.is_zero() || b.is_zero() {
            return a.is_zero() && b.is_zero();
        }
        // a = t b for a single rational t
        let t = a.leading() / b.leading();
        &b.scale(&t) == a
    }

    #[test]
    fn s3_reduction_matches_hand_derivation_exactly() {
        let ob = reduce_obstruction(Space::S3).unwrap();
        assert_eq!(ob.coeffs.len(), 2, "degree in cos^2 must be 1, got {}", ob);
        let (c0, c1) = frozen(Space::S3);
        assert!(proportional(&ob.coeffs[0], &c0), "c0 = {}", ob.coeffs[0]);
        assert!(proportional(&ob.coeffs[1], &c1), "c1 = {}", ob.coeffs[1]);
        // same proportionality constant for both
        let t0 = ob.coeffs[0].leading() / c0.leading();
        let t1 = ob.coeffs[1].leading() / c1.leading();
        assert_eq!(t0, t1);
        assert!(!t0.is_zero());
    }

    #[test]
    fn s4_reduction_matches_frozen_pair() {
        let ob = reduce_obstruction(Space::S4).unwrap();
        assert_eq!(ob.coeffs.len(), 2);
        let (c0, c1) = frozen(Space::S4);
        assert!(proportional(&ob.coeffs[0], &c0), "c0 = {}", ob.coeffs[0]);
        assert!(proportional(&ob.coeffs[1], &c1), "c1 = {}", ob.coeffs[1]);
    }

    #[test]
    fn s3_root_sets_and_empty_intersection() {
        let ob = reduce_obstruction(Space::S3).unwrap();
        let v = obstruction_verdict(&ob.coeffs).unwrap();
        let want0 = exact_roots(&frozen(Space::S3).0).unwrap();
        let want1 = exact_roots(&frozen(Space::S3).1).unwrap();
        assert_eq!(v.coefficient_roots[0].1, want0);
        assert_eq!(v.coefficient_roots[1].1, want1);
        // {8/27, 1} and {1/3, 8/3}
        match &v.coefficient_roots[0].1 {
            RootSet::Finite(r) => {
                assert_eq!(r.len(), 2);
                assert!((r[0].to_f64() - 8.0 / 27.0).abs() < 1e-15);
                assert!((r[1].to_f64() - 1.0).abs() < 1e-15);
            }
            _ => panic!(),
        }
        assert!(v.no_admissible_constant);
    }

    #[test]
    fn s4_verdict_no_admissible_constant() {
        let ob = reduce_obstruction(Space::S4).unwrap();
        let v = obstruction_verdict(&ob.coeffs).unwrap();
        assert!(v.no_admissible_constant);
        // {16/27, 2} and {2/3, 16/3}
        match &v.coefficient_roots[0].1 {
            RootSet::Finite(r) => {
                let xs: Vec<f64> = r.iter().map(|x| x.to_f64()).collect();
                assert!((xs[0] - 16.0 / 27.0).abs() < 1e-15);
                assert!((xs[1] - 2.0).abs() < 1e-15);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn shared_root_control_is_detected() {
        // both coefficients proportional to (K - 2): intersection {2}
        let c = vec![RatPoly::from_ints(&[-2, 1]), RatPoly::from_ints(&[-4, 2])];
        let v = obstruction_verdict(&c).unwrap();
        assert!(!v.no_admissible_constant);
        assert_eq!(v.intersection, exact_roots(&c[0]).unwrap());
    }

    #[test]
    fn normalization_is_unique_content_free_form() {
        // running the reduction twice yields identical coefficient lists, and
        // the content of the result is 1
        let a = reduce_obstruction(Space::S3).unwrap();
        let b = reduce_obstruction(Space::S3).unwrap();
        assert_eq!(a.coeffs.len(), b.coeffs.len());
        for (x, y) in a.coeffs.iter().zip(b.coeffs.iter()) {
            assert_eq!(x, y);
        }
        let content = TrigContent(&a.coeffs).value();
        assert_eq!(content, int(1));
        // first surviving coefficient has positive leading term
        assert!(a.coeffs[0].leading().is_positive());
    }

    #[test]
    fn premultiplier_ties_polynomial_to_raw_expression() {
        use num_traits::ToPrimitive;
        for space in [Space::S3, Space::S4] {
            let ob = reduce_obstruction(space).unwrap();
            let (f, g) = build_fg(space);
            let e = eisenhart_identity(&f, &g);
            let pm = ob.premultiplier.to_f64().unwrap();
            for (k, q) in [(0.37, 0.81), (-1.2, 0.33), (2.5, 1.21)] {
                let lhs = ob.eval_f64(k, q);
                let rhs = pm * e.eval_f64(k, q) * q.cos().powi(ob.cos_power as i32);
                assert!(
                    (lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0),
                    "{space:?} at ({k},{q}): {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn s3_polynomial_printed_form() {
        let ob = reduce_obstruction(Space::S3).unwrap();
        // content-free proportional form of 4(27K-8)(K-1) - 4(3K-1)(3K-8)cos^2
        assert_eq!(ob.to_string(), "(27*K^2 - 35*K + 8) + (-9*K^2 + 27*K - 8)*cos^2");
        assert_eq!(ob.coeffs[0].eval(&rat(8, 27)), int(0));
    }
}
