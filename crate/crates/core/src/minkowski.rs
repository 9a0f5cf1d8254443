//! Vectors of the ambient Lorentz space R^{n+1,1} with the bilinear form
//! <a,b> = -a0*b0 + a1*b1 + ... . Dimensions 5 and 6 cover surfaces in S^3
//! and S^4; the fixed-size backing array avoids per-node allocation.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 6;

/// Real vector in R^{n+1,1}. Component 0 is the timelike direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LVec {
    dim: usize,
    c: [f64; MAX_DIM],
}

impl LVec {
    pub fn new(components: &[f64]) -> Self {
        assert!(components.len() <= MAX_DIM, "vector dimension above {MAX_DIM}");
        let mut c = [0.0; MAX_DIM];
        c[..components.len()].copy_from_slice(components);
        LVec { dim: components.len(), c }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM);
        LVec { dim, c: [0.0; MAX_DIM] }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zero(dim);
        v.c[k] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn get(&self, k: usize) -> f64 {
        debug_assert!(k < self.dim);
        self.c[k]
    }

    pub fn set(&mut self, k: usize, x: f64) {
        debug_assert!(k < self.dim);
        self.c[k] = x;
    }

    /// Lorentz form <a,b>.
    pub fn dot(&self, other: &LVec) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = -self.c[0] * other.c[0];
        for k in 1..self.dim {
            acc += self.c[k] * other.c[k];
        }
        acc
    }

    /// Euclidean norm of the component tuple; used to scale residuals,
    /// where the Lorentz form would vanish on null directions.
    pub fn norm_e(&self) -> f64 {
        self.components().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, a: f64) -> LVec {
        let mut out = *self;
        for k in 0..self.dim {
            out.c[k] *= a;
        }
        out
    }

    pub fn add(&self, other: &LVec) -> LVec {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for k in 0..self.dim {
            out.c[k] += other.c[k];
        }
        out
    }

    pub fn sub(&self, other: &LVec) -> LVec {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for k in 0..self.dim {
            out.c[k] -= other.c[k];
        }
        out
    }

    pub fn to_complex(&self) -> CVec {
        let mut out = CVec::zero(self.dim);
        for k in 0..self.dim {
            out.c[k] = Complex64::new(self.c[k], 0.0);
        }
        out
    }

    /// Dehomogenize a light-cone point to the unit sphere: x_k = Y_k / Y_0.
    /// Fails off the cone or when Y_0 vanishes (degenerate representative).
    pub fn project_to_sphere(&self) -> Result<LVec> {
        let n2 = self.components().iter().map(|x| x * x).sum::<f64>();
        if n2 == 0.0 {
            return Err(Error::PointAtInfinity);
        }
        let form = self.dot(self);
        if form.abs() > 1e-9 * n2 {
            return Err(Error::NotNull { form });
        }
        if self.c[0].abs() < 1e-12 * n2.sqrt() {
            return Err(Error::PointAtInfinity);
        }
        let mut out = LVec::zero(self.dim - 1);
        for k in 1..self.dim {
            out.c[k - 1] = self.c[k] / self.c[0];
        }
        Ok(out)
    }
}

/// Complexified vector; the form extends bilinearly (no conjugation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec {
    dim: usize,
    c: [Complex64; MAX_DIM],
}

impl CVec {
    pub fn new(components: &[Complex64]) -> Self {
        assert!(components.len() <= MAX_DIM);
        let mut c = [Complex64::new(0.0, 0.0); MAX_DIM];
        c[..components.len()].copy_from_slice(components);
        CVec { dim: components.len(), c }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM);
        CVec { dim, c: [Complex64::new(0.0, 0.0); MAX_DIM] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Complex64] {
        &self.c[..self.dim]
    }

    pub fn get(&self, k: usize) -> Complex64 {
        debug_assert!(k < self.dim);
        self.c[k]
    }

    pub fn set(&mut self, k: usize, x: Complex64) {
        debug_assert!(k < self.dim);
        self.c[k] = x;
    }

    /// Bilinear extension of the Lorentz form.
    pub fn dot(&self, other: &CVec) -> Complex64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = -self.c[0] * other.c[0];
        for k in 1..self.dim {
            acc += self.c[k] * other.c[k];
        }
        acc
    }

    pub fn conj(&self) -> CVec {
        let mut out = *self;
        for k in 0..self.dim {
            out.c[k] = out.c[k].conj();
        }
        out
    }

    pub fn re(&self) -> LVec {
        let mut out = LVec::zero(self.dim);
        for k in 0..self.dim {
            out.c[k] = self.c[k].re;
        }
        out
    }

    pub fn im(&self) -> LVec {
        let mut out = LVec::zero(self.dim);
        for k in 0..self.dim {
            out.c[k] = self.c[k].im;
        }
        out
    }

    /// Euclidean magnitude of the component tuple: sqrt(sum |c_k|^2).
    pub fn norm_e(&self) -> f64 {
        self.components().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, a: Complex64) -> CVec {
        let mut out = *self;
        for k in 0..self.dim {
            out.c[k] *= a;
        }
        out
    }

    pub fn scale_re(&self, a: f64) -> CVec {
        let mut out = *self;
        for k in 0..self.dim {
            out.c[k] *= a;
        }
        out
    }

    pub fn add(&self, other: &CVec) -> CVec {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for k in 0..self.dim {
            out.c[k] += other.c[k];
        }
        out
    }

    pub fn sub(&self, other: &CVec) -> CVec {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for k in 0..self.dim {
            out.c[k] -= other.c[k];
        }
        out
    }
}

/// Element of O(n+1,1) stored densely. Only proper orthochronous maps are
/// generated here, but `apply` works for any matrix satisfying M^T eta M = eta.
#[derive(Clone, Debug)]
pub struct LorentzTransform {
    dim: usize,
    m: [[f64; MAX_DIM]; MAX_DIM],
}

impl LorentzTransform {
    pub fn identity(dim: usize) -> Self {
        assert!(dim <= MAX_DIM);
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for k in 0..dim {
            m[k][k] = 1.0;
        }
        LorentzTransform { dim, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rotation by `angle` in the spacelike plane (i,j); requires i,j >= 1.
    pub fn rotation(dim: usize, i: usize, j: usize, angle: f64) -> Self {
        assert!(i >= 1 && j >= 1 && i != j && i < dim && j < dim);
        let mut t = Self::identity(dim);
        let (s, c) = angle.sin_cos();
        t.m[i][i] = c;
        t.m[j][j] = c;
        t.m[i][j] = -s;
        t.m[j][i] = s;
        t
    }

    /// Boost of the given rapidity in the (0,i) plane.
    pub fn boost(dim: usize, i: usize, rapidity: f64) -> Self {
        assert!(i >= 1 && i < dim);
        let mut t = Self::identity(dim);
        let ch = rapidity.cosh();
        let sh = rapidity.sinh();
        t.m[0][0] = ch;
        t.m[i][i] = ch;
        t.m[0][i] = sh;
        t.m[i][0] = sh;
        t
    }

    /// self ∘ other (apply `other` first).
    pub fn compose(&self, other: &LorentzTransform) -> LorentzTransform {
        assert_eq!(self.dim, other.dim);
        let mut out = LorentzTransform { dim: self.dim, m: [[0.0; MAX_DIM]; MAX_DIM] };
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mut acc = 0.0;
                for k in 0..self.dim {
                    acc += self.m[r][k] * other.m[k][c];
                }
                out.m[r][c] = acc;
            }
        }
        out
    }

    pub fn apply(&self, v: &LVec) -> LVec {
        assert_eq!(self.dim, v.dim());
        let mut out = LVec::zero(self.dim);
        for r in 0..self.dim {
            let mut acc = 0.0;
            for k in 0..self.dim {
                acc += self.m[r][k] * v.c[k];
            }
            out.c[r] = acc;
        }
        out
    }

    pub fn apply_c(&self, v: &CVec) -> CVec {
        assert_eq!(self.dim, v.dim());
        let mut out = CVec::zero(self.dim);
        for r in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..self.dim {
                acc += v.c[k] * self.m[r][k];
            }
            out.c[r] = acc;
        }
        out
    }

    /// max |(M^T eta M - eta)_{rc}|, a direct measure of form preservation.
    pub fn form_deviation(&self) -> f64 {
        let eta = |k: usize| if k == 0 { -1.0 } else { 1.0 };
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let mut acc = 0.0;
                for k in 0..self.dim {
                    acc += self.m[k][r] * eta(k) * self.m[k][c];
                }
                let target = if r == c { eta(r) } else { 0.0 };
                worst = worst.max((acc - target).abs());
            }
        }
        worst
    }

    pub fn is_orthochronous(&self) -> bool {
        self.m[0][0] > 0.0
    }
}

/// Seeded product of random rotations and boosts. Rapidities stay in
/// [-1, 1] so transformed surfaces keep a usable dynamic range.
pub fn random_lorentz(dim: usize, seed: u64) -> LorentzTransform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = LorentzTransform::identity(dim);
    for i in 1..dim {
        for j in (i + 1)..dim {
            let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            t = LorentzTransform::rotation(dim, i, j, angle).compose(&t);
        }
    }
    for i in 1..dim {
        let rapidity = rng.gen_range(-1.0..1.0);
        t = LorentzTransform::boost(dim, i, rapidity).compose(&t);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_signature_on_basis() {
        let e0 = LVec::basis(5, 0);
        let e1 = LVec::basis(5, 1);
        assert_eq!(e0.dot(&e0), -1.0);
        assert_eq!(e1.dot(&e1), 1.0);
        assert_eq!(e0.dot(&e1), 0.0);
    }

    #[test]
    fn sphere_point_lifts_to_cone_and_back() {
        let r = 1.0 / 2.0f64.sqrt();
        let y = LVec::new(&[1.0, r, 0.0, r, 0.0]);
        assert!(y.dot(&y).abs() < 1e-15);
        let x = y.project_to_sphere().unwrap();
        assert_eq!(x.components(), &[r, 0.0, r, 0.0]);
    }

    #[test]
    fn projection_rejects_off_cone_points() {
        let v = LVec::new(&[1.0, 2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(v.project_to_sphere(), Err(Error::NotNull { .. })));
        // the only representative with vanishing first component is 0
        let w = LVec::zero(5);
        assert!(matches!(w.project_to_sphere(), Err(Error::PointAtInfinity)));
    }

    #[test]
    fn boost_preserves_form() {
        let t = LorentzTransform::boost(6, 2, 0.7);
        assert!(t.form_deviation() < 1e-12);
        let a = LVec::new(&[2.0, 0.3, -1.0, 0.5, 0.1, -0.2]);
        let b = LVec::new(&[1.0, -0.4, 0.2, 0.9, -1.1, 0.6]);
        let before = a.dot(&b);
        let after = t.apply(&a).dot(&t.apply(&b));
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn random_transform_is_lorentz_and_orthochronous() {
        for seed in 0..20 {
            let t = random_lorentz(5, seed);
            assert!(t.form_deviation() < 1e-12, "seed {seed}");
            assert!(t.is_orthochronous(), "seed {seed}");
        }
    }

    #[test]
    fn random_transform_keeps_cone_points_on_cone() {
        let t = random_lorentz(5, 11);
        let r = 1.0 / 2.0f64.sqrt();
        let y = LVec::new(&[1.0, r, 0.0, r, 0.0]);
        let ty = t.apply(&y);
        assert!(ty.dot(&ty).abs() < 1e-10);
        assert!(ty.project_to_sphere().is_ok());
    }

    #[test]
    fn complex_dot_is_bilinear_not_hermitian() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let v = CVec::new(&[one, i, one, i * 2.0, one]);
        // bilinear: <v,v> = -1 + i^2 + 1 + (2i)^2 + 1 = -4
        let d = v.dot(&v);
        assert!((d - Complex64::new(-4.0, 0.0)).norm() < 1e-15);
        // hermitian pairing via explicit conj: -1 + 1 + 1 + 4 + 1 = 6
        let h = v.dot(&v.conj());
        assert!((h - Complex64::new(6.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn seeded_transform_is_reproducible() {
        let a = random_lorentz(6, 42);
        let b = random_lorentz(6, 42);
        let v = LVec::new(&[1.0, 0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(a.apply(&v), b.apply(&v));
    }
}
