use crate::ratpoly::RatPoly;
use crate::SymbolicError;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Exact real algebraic number of degree at most two over Q,
/// in the canonical form p + q*sqrt(r) with r a squarefree integer > 1
/// and q != 0, or a plain rational.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlgebraicRoot {
    Rational(BigRational),
    Quadratic {
        p: BigRational,
        q: BigRational,
        r: BigInt,
    },
}

impl fmt::Display for AlgebraicRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicRoot::Rational(x) => {
                if x.is_integer() {
                    write!(f, "{}", x.numer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
            AlgebraicRoot::Quadratic { p, q, r } => write!(f, "{} + {}*sqrt({})", p, q, r),
        }
    }
}

impl AlgebraicRoot {
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            AlgebraicRoot::Rational(x) => x.to_f64().unwrap(),
            AlgebraicRoot::Quadratic { p, q, r } => {
                p.to_f64().unwrap() + q.to_f64().unwrap() * r.to_f64().unwrap().sqrt()
            }
        }
    }
}

/// Set of real roots of a nonzero polynomial (sorted, deduplicated), or
/// `All` for the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSet {
    All,
    Finite(Vec<AlgebraicRoot>),
}

impl RootSet {
    pub fn intersect(&self, other: &RootSet) -> RootSet {
        match (self, other) {
            (RootSet::All, _) => other.clone(),
            (_, RootSet::All) => self.clone(),
            (RootSet::Finite(a), RootSet::Finite(b)) => {
                RootSet::Finite(a.iter().filter(|r| b.contains(r)).cloned().collect())
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, RootSet::Finite(v) if v.is_empty())
    }
}

impl fmt::Display for RootSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSet::All => write!(f, "all K"),
            RootSet::Finite(v) => {
                write!(f, "{{")?;
                for (i, r) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", r)?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Largest s with s^2 | n, by trial division up to 10^6; returns (s, n/s^2).
/// Inputs beyond that bound keep any huge square factor in the radicand,
/// which is still a correct (just non-canonical) representation; the
/// obstruction polynomials handled here stay far below the bound.
fn extract_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut rest = n.clone();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000u32);
    while &d * &d <= rest && d <= limit {
        let d2 = &d * &d;
        while (&rest % &d2).is_zero() {
            rest /= &d2;
            s *= &d;
        }
        d += 1;
    }
    (s, rest)
}

/// Exact real roots of a quadratic with rational coefficients.
fn quadratic_roots(a: &BigRational, b: &BigRational, c: &BigRational) -> Vec<AlgebraicRoot> {
    let four = BigRational::from_integer(BigInt::from(4));
    let disc = b * b - four * a * c;
    let two_a = a + a;
    if disc.is_zero() {
        return vec![AlgebraicRoot::Rational(-b / &two_a)];
    }
    if disc.is_negative() {
        return vec![];
    }
    // sqrt(n/d) = sqrt(n*d)/d; pull square factors out of n*d.
    let radicand = disc.numer() * disc.denom();
    let (s, r) = extract_square(&radicand);
    let sqrt_rat = BigRational::new(s, disc.denom().clone());
    if r.is_one() {
        // perfect square: two rational roots
        let r1 = (-b + &sqrt_rat) / &two_a;
        let r2 = (-b - &sqrt_rat) / &two_a;
        let mut v = vec![AlgebraicRoot::Rational(r1), AlgebraicRoot::Rational(r2)];
        v.sort();
        return v;
    }
    let p = -b / &two_a;
    let q = &sqrt_rat / &two_a;
    let q_abs = q.abs();
    vec![
        AlgebraicRoot::Quadratic { p: p.clone(), q: -&q_abs, r: r.clone() },
        AlgebraicRoot::Quadratic { p, q: q_abs, r },
    ]
}

/// Rational roots via the rational root theorem on the integer-cleared
/// polynomial, returned with the deflated quotient.
fn rational_roots(p: &RatPoly) -> (Vec<BigRational>, RatPoly) {
    let mut roots = vec![];
    let mut cur = p.clone();
    loop {
        if cur.degree() == 0 || cur.is_zero() {
            break;
        }
        // clear denominators
        let mut den = BigInt::one();
        for c in cur.coeffs() {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = cur.coeffs().iter().map(|c| c.numer() * (&den / c.denom())).collect();
        // strip zero constant terms: K = 0 is a root
        if ints[0].is_zero() {
            roots.push(BigRational::zero());
            cur = deflate(&cur, &BigRational::zero());
            continue;
        }
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let mut found = None;
        'search: for num in divisors(&a0) {
            for d in divisors(&an) {
                for sign in [Sign::Plus, Sign::Minus] {
                    let cand = BigRational::new(
                        BigInt::from_biguint(sign, num.magnitude().clone()),
                        d.clone(),
                    );
                    if cur.eval(&cand).is_zero() {
                        found = Some(cand);
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(r) => {
                cur = deflate(&cur, &r);
                roots.push(r);
            }
            None => break,
        }
    }
    (roots, cur)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // n is a coefficient of a small obstruction polynomial; enumerate naively.
    let mut out = vec![];
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            out.push(n / &d);
        }
        d += 1;
    }
    out
}

/// Synthetic division by (K - r); remainder is known to vanish.
fn deflate(p: &RatPoly, r: &BigRational) -> RatPoly {
    let cs = p.coeffs();
    let n = cs.len();
    let mut out = vec![BigRational::zero(); n - 1];
    let mut carry = BigRational::zero();
    for i in (1..n).rev() {
        carry = &cs[i] + &carry * r;
        out[i - 1] = carry.clone();
    }
    RatPoly::new(out)
}

/// Exact real root set for degree <= 4: rational-root deflation down to a
/// quadratic, then exact discriminant logic. Degrees whose irrational part
/// cannot be resolved this way are reported as an error rather than
/// approximated.
pub fn exact_roots(p: &RatPoly) -> Result<RootSet, SymbolicError> {
    if p.is_zero() {
        return Ok(RootSet::All);
    }
    if p.degree() > 4 {
        return Err(SymbolicError::RootsUnresolved(p.degree()));
    }
    let (rational, rest) = rational_roots(p);
    let mut roots: Vec<AlgebraicRoot> = rational.into_iter().map(AlgebraicRoot::Rational).collect();
    match rest.degree() {
        0 => {}
        1 => {
            roots.push(AlgebraicRoot::Rational(-&(rest.coeff(0) / rest.coeff(1))));
        }
        2 => roots.extend(quadratic_roots(&rest.coeff(2), &rest.coeff(1), &rest.coeff(0))),
        d => return Err(SymbolicError::RootsUnresolved(d)),
    }
    roots.sort();
    roots.dedup();
    Ok(RootSet::Finite(roots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, rat};

    fn rational_set(xs: &[BigRational]) -> RootSet {
        let mut v: Vec<_> = xs.iter().cloned().map(AlgebraicRoot::Rational).collect();
        v.sort();
        RootSet::Finite(v)
    }

    #[test]
    fn quadratic_with_rational_roots() {
        // 27K^2 - 35K + 8 = (27K - 8)(K - 1)
        let p = RatPoly::from_ints(&[8, -35, 27]);
        let rs = exact_roots(&p).unwrap();
        assert_eq!(rs, rational_set(&[rat(8, 27), int(1)]));
    }

    #[test]
    fn quadratic_with_surd_roots() {
        // K^2 - 2K - 1: roots 1 +- sqrt(2)
        let p = RatPoly::from_ints(&[-1, -2, 1]);
        let rs = exact_roots(&p).unwrap();
        match rs {
            RootSet::Finite(v) => {
                assert_eq!(v.len(), 2);
                for root in &v {
                    match root {
                        AlgebraicRoot::Quadratic { p, q, r } => {
                            assert_eq!(p, &int(1));
                            assert_eq!(q.abs(), int(1));
                            assert_eq!(r, &num_bigint::BigInt::from(2));
                        }
                        _ => panic!("expected surd"),
                    }
                }
            }
            _ => panic!(),
        }
    }

    #[test]
    fn radicand_is_canonicalized() {
        // K^2 - 8: roots +-2 sqrt(2), radicand 8 reduces to 2
        let p = RatPoly::from_ints(&[-8, 0, 1]);
        match exact_roots(&p).unwrap() {
            RootSet::Finite(v) => match &v[1] {
                AlgebraicRoot::Quadratic { q, r, .. } => {
                    assert_eq!(q, &int(2));
                    assert_eq!(r, &num_bigint::BigInt::from(2));
                }
                _ => panic!(),
            },
            _ => panic!(),
        }
    }

    #[test]
    fn negative_discriminant_has_no_real_roots() {
        let p = RatPoly::from_ints(&[1, 0, 1]); // K^2 + 1
        assert_eq!(exact_roots(&p).unwrap(), RootSet::Finite(vec![]));
    }

    #[test]
    fn quartic_via_deflation() {
        // (K-1)(K+2)(K^2 - 3) = K^4 + K^3 - 5K^2 - 3K + 6
        let p = RatPoly::from_ints(&[6, -3, -5, 1, 1]);
        let rs = exact_roots(&p).unwrap();
        match rs {
            RootSet::Finite(v) => {
                assert_eq!(v.len(), 4);
                let mut approx: Vec<f64> = v.iter().map(|r| r.to_f64()).collect();
                approx.sort_by(f64::total_cmp);
                let mut want = vec![-2.0, 1.0, 3f64.sqrt(), -(3f64.sqrt())];
                want.sort_by(f64::total_cmp);
                for (a, b) in approx.iter().zip(want.iter()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
            _ => panic!(),
        }
    }

    #[test]
    fn intersection_is_exact() {
        let a = exact_roots(&RatPoly::from_ints(&[8, -35, 27])).unwrap(); // {8/27, 1}
        let b = exact_roots(&RatPoly::from_ints(&[8, -30, 9])).unwrap(); // {1/3, 8/3}
        assert!(a.intersect(&b).is_empty());
        let c = exact_roots(&RatPoly::from_ints(&[-1, 1])).unwrap(); // {1}
        assert_eq!(a.intersect(&c), c);
        assert_eq!(RootSet::All.intersect(&b), b);
    }

    #[test]
    fn zero_polynomial_vanishes_everywhere() {
        assert_eq!(exact_roots(&RatPoly::zero()).unwrap(), RootSet::All);
    }
}
