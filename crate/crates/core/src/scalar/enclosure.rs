use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{pow2, rat, to_f64, Rational};

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "inverted enclosure");
        Enclosure { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn min_abs(&self) -> Rational {
        if self.lo.is_positive() {
            self.lo.clone()
        } else if self.hi.is_negative() {
            -self.hi.clone()
        } else {
            Rational::zero()
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Sign if the enclosure excludes zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure::new(lo, hi)
    }

    /// `None` when the divisor straddles zero.
    pub fn div(&self, o: &Enclosure) -> Option<Enclosure> {
        if o.sign().is_none_or(|s| s == Ordering::Equal) {
            return None;
        }
        let inv = Enclosure::new(o.hi.recip(), o.lo.recip());
        Some(self.mul(&inv))
    }

    pub fn scale(&self, k: &Rational) -> Enclosure {
        self.mul(&Enclosure::point(k.clone()))
    }

    pub fn lo_f64(&self) -> f64 {
        f64_below(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        f64_above(&self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) * rat(1, 2)))
    }
}

/// Serialized as `[lo, hi]` rounded outward to doubles.
impl serde::Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&[self.lo_f64(), self.hi_f64()], ser)
    }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let b = x.to_bits();
    f64::from_bits(if x > 0.0 { b + 1 } else { b - 1 })
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Largest double not above `r`.
pub fn f64_below(r: &Rational) -> f64 {
    let mut f = to_f64(r);
    while f.is_finite() && Rational::from_float(f).is_some_and(|q| &q > r) {
        f = next_down(f);
    }
    f
}

/// Smallest double not below `r`.
pub fn f64_above(r: &Rational) -> f64 {
    let mut f = to_f64(r);
    while f.is_finite() && Rational::from_float(f).is_some_and(|q| &q < r) {
        f = next_up(f);
    }
    f
}

/// Bounds on `atanh(z)·2^p` for rational `0 ≤ z ≤ 1/3`.
fn atanh_scaled(z: &Rational, p: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << p as usize;
    let zs = z * Rational::from_integer(one.clone());
    let (zl, zh) = (zs.floor().to_integer(), zs.ceil().to_integer());
    let z2l = (&zl * &zl) >> p as usize;
    let z2h = ((&zh * &zh) >> p as usize) + 1;
    // 9^-n < 2^-p once n > p/3
    let terms = p / 3 + 2;
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    let (mut tl, mut th) = (zl, zh);
    for j in 0..terms {
        let k = BigInt::from(2 * j + 1);
        lo += &tl / &k;
        hi += (&th + &k - 1) / &k;
        tl = (&tl * &z2l) >> p as usize;
        th = ((&th * &z2h) >> p as usize) + 1;
    }
    // tail bound: remaining sum ≤ next term / (1 − z²) ≤ 9/8 · next term
    hi += &th * 2 + 1;
    (lo, hi)
}

/// Validated enclosure of `ln x` for rational `x > 0`, width about `2^-bits`.
pub fn ln_enclosure(x: &Rational, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    let p = bits + 16;
    let scale = pow2(-(p as i64));
    // x = 2^k y with 1 ≤ y < 2
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut y = x * pow2(-k);
    while y < Rational::one() {
        y *= rat(2, 1);
        k -= 1;
    }
    while y >= rat(2, 1) {
        y *= rat(1, 2);
        k += 1;
    }
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let (yl, yh) = atanh_scaled(&z, p);
    let (l2l, l2h) = atanh_scaled(&rat(1, 3), p);
    let two = BigInt::from(2);
    let ln_y = Enclosure::new(
        Rational::from_integer(yl * &two) * &scale,
        Rational::from_integer(yh * &two) * &scale,
    );
    let ln2 = Enclosure::new(
        Rational::from_integer(l2l * &two) * &scale,
        Rational::from_integer(l2h * &two) * &scale,
    );
    ln2.scale(&Rational::from_integer(BigInt::from(k))).add(&ln_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_bounds_bracket_std() {
        for (n, d) in [(2, 1), (3, 1), (1, 3), (10, 7), (1000, 1), (1, 1), (7, 1024)] {
            let x = rat(n, d);
            let e = ln_enclosure(&x, 80);
            let f = (n as f64 / d as f64).ln();
            assert!(e.lo_f64() <= f + 1e-15 && f - 1e-15 <= e.hi_f64(), "{n}/{d}");
            assert!(to_f64(&e.width()) < 1e-20);
        }
    }

    #[test]
    fn ln_two_high_precision() {
        let e = ln_enclosure(&rat(2, 1), 300);
        // ln 2 = 0.693147180559945309417232121458176568...
        let digits = Rational::new(
            "693147180559945309417232121458176568".parse().unwrap(),
            BigInt::from(10).pow(36),
        );
        let ulp = Rational::new(BigInt::one(), BigInt::from(10).pow(36));
        assert!(e.hi() >= &digits && e.lo() <= &(&digits + ulp));
        assert!(e.width() < pow2(-290));
    }

    #[test]
    fn outward_rounding() {
        let third = rat(1, 3);
        assert!(Rational::from_float(f64_below(&third)).unwrap() <= third);
        assert!(Rational::from_float(f64_above(&third)).unwrap() >= third);
    }

    #[test]
    fn interval_ops() {
        let a = Enclosure::new(rat(-1, 1), rat(2, 1));
        let b = Enclosure::new(rat(3, 1), rat(4, 1));
        assert_eq!(a.mul(&b), Enclosure::new(rat(-4, 1), rat(8, 1)));
        assert!(b.div(&a).is_none());
        assert_eq!(a.div(&b).unwrap(), Enclosure::new(rat(-1, 3), rat(2, 3)));
    }
}
