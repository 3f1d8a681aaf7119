use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Scalar type accepted by the numerical modules.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline(always)]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).unwrap()
}

#[inline(always)]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap()
}

/// Double-word arithmetic, used where a power series cancels badly.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd<T> {
    pub hi: T,
    pub lo: T,
}

impl<T: Real> Dd<T> {
    pub fn new(hi: T, lo: T) -> Self {
        Dd { hi, lo }
    }

    pub fn from(x: T) -> Self {
        Dd { hi: x, lo: T::zero() }
    }

    #[inline]
    fn two_sum(a: T, b: T) -> (T, T) {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        (s, err)
    }

    #[inline]
    fn quick_two_sum(a: T, b: T) -> (T, T) {
        let s = a + b;
        (s, b - (s - a))
    }

    #[inline]
    fn two_prod(a: T, b: T) -> (T, T) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    #[inline]
    pub fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (t, f) = Self::two_sum(self.lo, o.lo);
        let (s, e) = Self::quick_two_sum(s, e + t);
        let (hi, lo) = Self::quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Self {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    #[inline]
    pub fn mul(self, o: Self) -> Self {
        let (p, e) = Self::two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = Self::quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_t(self, b: T) -> Self {
        let (p, e) = Self::two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = Self::quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div_t(self, b: T) -> Self {
        let q1 = self.hi / b;
        let r = self.sub(Dd::from(b).mul_t(q1));
        let q2 = r.hi / b;
        let (hi, lo) = Self::quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn value(self) -> T {
        self.hi + self.lo
    }
}
