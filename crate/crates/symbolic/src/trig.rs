use crate::ratpoly::RatPoly;
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Element of Q[K][cos q, sin q] / (sin^2 q + cos^2 q - 1), kept in the
/// canonical form  sum_j p_j(K) cos^j q  +  sin q * sum_j q_j(K) cos^j q.
///
/// Every product of sines is reduced on the fly via sin^2 = 1 - cos^2, so the
/// sine degree never exceeds one and equality is plain coefficient equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigPoly {
    /// cos-power coefficients of the sine-free part.
    pub even: Vec<RatPoly>,
    /// cos-power coefficients of the part carrying one factor of sin.
    pub odd: Vec<RatPoly>,
}

fn trim(v: &mut Vec<RatPoly>) {
    while v.last().map_or(false, |p| p.is_zero()) {
        v.pop();
    }
}

fn add_vecs(a: &[RatPoly], b: &[RatPoly]) -> Vec<RatPoly> {
    let n = a.len().max(b.len());
    let zero = RatPoly::zero();
    (0..n)
        .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
        .collect()
}

/// Convolution of cos-power coefficient vectors.
fn mul_vecs(a: &[RatPoly], b: &[RatPoly]) -> Vec<RatPoly> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![RatPoly::zero(); a.len() + b.len() - 1];
    for (i, p) in a.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        for (j, q) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(p * q);
        }
    }
    out
}

impl TrigPoly {
    fn normalized(mut even: Vec<RatPoly>, mut odd: Vec<RatPoly>) -> Self {
        trim(&mut even);
        trim(&mut odd);
        TrigPoly { even, odd }
    }

    pub fn zero() -> Self {
        TrigPoly { even: vec![], odd: vec![] }
    }

    pub fn one() -> Self {
        TrigPoly::constant(RatPoly::one())
    }

    pub fn constant(p: RatPoly) -> Self {
        TrigPoly::normalized(vec![p], vec![])
    }

    pub fn cos() -> Self {
        TrigPoly::normalized(vec![RatPoly::zero(), RatPoly::one()], vec![])
    }

    pub fn sin() -> Self {
        TrigPoly::normalized(vec![], vec![RatPoly::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    /// True when the element carries no factor of sin.
    pub fn is_even(&self) -> bool {
        self.odd.is_empty()
    }

    pub fn scale(&self, p: &RatPoly) -> Self {
        TrigPoly::normalized(
            self.even.iter().map(|c| c * p).collect(),
            self.odd.iter().map(|c| c * p).collect(),
        )
    }

    /// d/dq, using (cos^j)' = -j cos^(j-1) sin and
    /// (sin cos^j)' = (j+1) cos^(j+1) - j cos^(j-1).
    pub fn deriv(&self) -> Self {
        let mut even = vec![RatPoly::zero(); self.odd.len() + 2];
        let mut odd = vec![RatPoly::zero(); self.even.len()];
        for (j, p) in self.even.iter().enumerate() {
            if j > 0 {
                odd[j - 1] = &odd[j - 1] - &p.scale(&crate::ratpoly::int(j as i64));
            }
        }
        for (j, p) in self.odd.iter().enumerate() {
            even[j + 1] = &even[j + 1] + &p.scale(&crate::ratpoly::int(j as i64 + 1));
            if j > 0 {
                even[j - 1] = &even[j - 1] - &p.scale(&crate::ratpoly::int(j as i64));
            }
        }
        TrigPoly::normalized(even, odd)
    }

    /// Substitute a rational value for the symbol K.
    pub fn substitute_k(&self, k: &BigRational) -> Self {
        let sub = |v: &[RatPoly]| {
            v.iter()
                .map(|p| RatPoly::constant(p.eval(k)))
                .collect::<Vec<_>>()
        };
        TrigPoly::normalized(sub(&self.even), sub(&self.odd))
    }

    pub fn eval_f64(&self, k: f64, q: f64) -> f64 {
        let (c, s) = (q.cos(), q.sin());
        let horner = |v: &[RatPoly]| {
            let mut acc = 0.0;
            for p in v.iter().rev() {
                acc = acc * c + p.eval_f64(k);
            }
            acc
        };
        horner(&self.even) + s * horner(&self.odd)
    }

    /// True when every term carries at least one factor of cos.
    pub fn divisible_by_cos(&self) -> bool {
        self.even.first().map_or(true, |p| p.is_zero())
            && self.odd.first().map_or(true, |p| p.is_zero())
    }

    pub fn div_cos(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if !self.divisible_by_cos() {
            return None;
        }
        let shift = |v: &[RatPoly]| v.iter().skip(1).cloned().collect::<Vec<_>>();
        Some(TrigPoly::normalized(shift(&self.even), shift(&self.odd)))
    }

    /// Writes the element as a * cos^k when it is a single sine-free monomial.
    pub fn as_cos_monomial(&self) -> Option<(RatPoly, usize)> {
        if !self.odd.is_empty() || self.even.is_empty() {
            return None;
        }
        let k = self.even.len() - 1;
        for p in &self.even[..k] {
            if !p.is_zero() {
                return None;
            }
        }
        Some((self.even[k].clone(), k))
    }

    /// Gcd of all rational coefficients, for content normalization.
    pub fn content(&self) -> BigRational {
        let mut c = BigRational::zero();
        for p in self.even.iter().chain(self.odd.iter()) {
            let pc = p.content();
            if c.is_zero() {
                c = pc;
            } else if !pc.is_zero() {
                // gcd of two positive rationals
                let num = num_integer::Integer::gcd(c.numer(), pc.numer());
                let den = num_integer::Integer::lcm(c.denom(), pc.denom());
                c = BigRational::new(num, den);
            }
        }
        c
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        TrigPoly::normalized(add_vecs(&self.even, &rhs.even), add_vecs(&self.odd, &rhs.odd))
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self + &(-rhs)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        TrigPoly::normalized(
            self.even.iter().map(|p| -p).collect(),
            self.odd.iter().map(|p| -p).collect(),
        )
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        // (e1 + s*o1)(e2 + s*o2) = e1e2 + s^2 o1o2 + s(e1o2 + o1e2),
        // then s^2 -> 1 - c^2.
        let ee = mul_vecs(&self.even, &rhs.even);
        let oo = mul_vecs(&self.odd, &rhs.odd);
        let eo = add_vecs(&mul_vecs(&self.even, &rhs.odd), &mul_vecs(&self.odd, &rhs.even));
        let mut even = ee;
        if !oo.is_empty() {
            even = add_vecs(&even, &oo);
            let mut shifted = vec![RatPoly::zero(), RatPoly::zero()];
            shifted.extend(oo.iter().cloned());
            even = add_vecs(&even, &shifted.iter().map(|p| -p).collect::<Vec<_>>());
        }
        TrigPoly::normalized(even, eo)
    }
}

fn fmt_part(f: &mut fmt::Formatter<'_>, v: &[RatPoly], sin: bool, first: &mut bool) -> fmt::Result {
    for (j, p) in v.iter().enumerate().rev() {
        if p.is_zero() {
            continue;
        }
        if !*first {
            write!(f, " + ")?;
        }
        *first = false;
        write!(f, "({})", p)?;
        if sin {
            write!(f, "*sin")?;
        }
        match j {
            0 => {}
            1 => write!(f, "*cos")?,
            _ => write!(f, "*cos^{}", j)?,
        }
    }
    Ok(())
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        fmt_part(f, &self.even, false, &mut first)?;
        fmt_part(f, &self.odd, true, &mut first)
    }
}

/// Quotient of two TrigPoly, denominator nonzero. No general gcd is taken;
/// arithmetic cross-multiplies and callers that need a canonical form cancel
/// cos powers and rational content explicitly.
#[derive(Clone, Debug)]
pub struct TrigRational {
    pub num: TrigPoly,
    pub den: TrigPoly,
}

impl TrigRational {
    pub fn new(num: TrigPoly, den: TrigPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        TrigRational { num, den }
    }

    pub fn from_poly(p: TrigPoly) -> Self {
        TrigRational::new(p, TrigPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Quotient rule; keeps the denominator a perfect square of the input's.
    pub fn deriv(&self) -> Self {
        let num = &(&self.num.deriv() * &self.den) - &(&self.num * &self.den.deriv());
        let den = &self.den * &self.den;
        TrigRational::new(num, den)
    }

    pub fn eval_f64(&self, k: f64, q: f64) -> f64 {
        self.num.eval_f64(k, q) / self.den.eval_f64(k, q)
    }

    pub fn substitute_k(&self, k: &BigRational) -> Self {
        TrigRational::new(self.num.substitute_k(k), self.den.substitute_k(k))
    }

    /// Cancel common factors of cos and shared rational content.
    pub fn cancel(&self) -> Self {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        while !num.is_zero() && num.divisible_by_cos() && den.divisible_by_cos() {
            num = num.div_cos().unwrap();
            den = den.div_cos().unwrap();
        }
        TrigRational::new(num, den)
    }

    /// Exact equality via cross-multiplication.
    pub fn equiv(&self, other: &TrigRational) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Add for &TrigRational {
    type Output = TrigRational;
    fn add(self, rhs: &TrigRational) -> TrigRational {
        TrigRational::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &TrigRational {
    type Output = TrigRational;
    fn sub(self, rhs: &TrigRational) -> TrigRational {
        self + &(-rhs)
    }
}

impl Neg for &TrigRational {
    type Output = TrigRational;
    fn neg(self) -> TrigRational {
        TrigRational::new(-&self.num, self.den.clone())
    }
}

impl Mul for &TrigRational {
    type Output = TrigRational;
    fn mul(self, rhs: &TrigRational) -> TrigRational {
        TrigRational::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl fmt::Display for TrigRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == TrigPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}
