//! Forward-mode dual numbers that nest to arbitrary depth.
//!
//! `Dual<T>` carries one infinitesimal direction on top of an arbitrary
//! [`Scalar`]. Because `Dual<T>` is itself a `Scalar`, each layer of nesting
//! adds one independent direction, so `Dual<Dual<f64>>` yields exact second
//! mixed partials, `Dual<Dual<Dual<f64>>>` third partials, and so on. The
//! layers are distinct types, which rules out perturbation confusion.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Real-like number type the geometry kernels are generic over.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn from_f64(v: f64) -> Self;
    /// The plain real value with every infinitesimal part dropped.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powi(self, k: i32) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    #[inline]
    fn scale(self, c: f64) -> Self {
        self * Self::from_f64(c)
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
    #[inline]
    fn scale(self, c: f64) -> Self {
        self * c
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    #[inline]
    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::zero() }
    }

    /// Seeds `re` with unit tangent.
    #[inline]
    pub fn variable(re: T) -> Self {
        Dual { re, eps: T::one() }
    }

    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Dual {
            re: f,
            eps: self.eps * df,
        }
    }
}

/// Lifts `q` to dual numbers moving along `dir`.
pub fn seed_along<T: Scalar>(q: &[T], dir: &[T]) -> Vec<Dual<T>> {
    debug_assert_eq!(q.len(), dir.len());
    q.iter().zip(dir).map(|(&v, &d)| Dual::new(v, d)).collect()
}

/// Lifts `q` to dual numbers moving along coordinate `k`.
pub fn seed_coordinate<T: Scalar>(q: &[T], k: usize) -> Vec<Dual<T>> {
    q.iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == k {
                Dual::variable(v)
            } else {
                Dual::constant(v)
            }
        })
        .collect()
}

pub fn lift<T: Scalar>(q: &[T]) -> Vec<Dual<T>> {
    q.iter().map(|&v| Dual::constant(v)).collect()
}

pub fn real_parts<T: Scalar>(v: &[Dual<T>]) -> Vec<T> {
    v.iter().map(|d| d.re).collect()
}

pub fn eps_parts<T: Scalar>(v: &[Dual<T>]) -> Vec<T> {
    v.iter().map(|d| d.eps).collect()
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual {
            re: self.re + o.re,
            eps: self.eps + o.eps,
        }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual {
            re: self.re - o.re,
            eps: self.eps - o.eps,
        }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual {
            re: self.re * o.re,
            eps: self.re * o.eps + self.eps * o.re,
        }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.re;
        let re = self.re * inv;
        Dual {
            re,
            eps: (self.eps - re * o.eps) * inv,
        }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual {
            re: -self.re,
            eps: -self.eps,
        }
    }
}

impl<T: Scalar> AddAssign for Dual<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> SubAssign for Dual<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> MulAssign for Dual<T> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Dual::constant(T::from_f64(v))
    }
    #[inline]
    fn value(&self) -> f64 {
        self.re.value()
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, (s + s).powi(-1))
    }
    #[inline]
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    #[inline]
    fn ln(self) -> Self {
        self.chain(self.re.ln(), T::one() / self.re)
    }
    #[inline]
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    #[inline]
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    #[inline]
    fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Self::one();
        }
        let lower = self.re.powi(k - 1);
        self.chain(lower * self.re, lower.scale(k as f64))
    }
    #[inline]
    fn scale(self, c: f64) -> Self {
        Dual {
            re: self.re.scale(c),
            eps: self.eps.scale(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D2 = Dual<Dual<f64>>;

    #[test]
    fn first_derivative_of_product() {
        let x = Dual::variable(3.0);
        let f = x * x * x + x.sin();
        assert!((f.eps - (27.0 + 3.0f64.cos())).abs() < 1e-14);
    }

    #[test]
    fn nested_layers_give_mixed_partial() {
        // f(a, b) = a² b, ∂²f/∂a∂b = 2a
        let a: D2 = Dual::new(Dual::new(2.0, 0.0), Dual::new(1.0, 0.0));
        let b: D2 = Dual::new(Dual::new(5.0, 1.0), Dual::new(0.0, 0.0));
        let f = a * a * b;
        assert_eq!(f.eps.eps, 4.0);
        assert_eq!(f.re.eps, 4.0);
        assert_eq!(f.eps.re, 20.0);
    }

    #[test]
    fn elementary_functions_second_order() {
        let x: D2 = Dual::new(Dual::variable(0.7), Dual::new(1.0, 0.0));
        let checks = [
            (x.exp().eps.eps, 0.7f64.exp()),
            (x.ln().eps.eps, -1.0 / 0.49),
            (x.sqrt().eps.eps, -0.25 * 0.7f64.powf(-1.5)),
            (x.sin().eps.eps, -(0.7f64.sin())),
            (x.cos().eps.eps, -(0.7f64.cos())),
            (x.powi(4).eps.eps, 12.0 * 0.49),
            ((D2::one() / x).eps.eps, 2.0 / 0.343),
        ];
        for (got, want) in checks {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}
