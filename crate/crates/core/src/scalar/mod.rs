//! Exact numbers: rationals and elements `u + v·g` of a real quadratic field
//! where `g` is the larger root of `g² = a·g + b`.

pub mod enclosure;
mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use enclosure::{ln_enclosure, Enclosure};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Declaration `g² = a·g + b`; `g` always denotes the larger real root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    a: Rational,
    b: Rational,
}

impl FieldSpec {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        let disc = &a * &a + int(4) * &b;
        if !disc.is_positive() {
            return Err(Error::InvalidField(format!(
                "discriminant {disc} is not positive"
            )));
        }
        if rational_sqrt(&disc).is_some() {
            return Err(Error::InvalidField(format!(
                "discriminant {disc} is a rational square; use rationals instead"
            )));
        }
        // larger root (a + sqrt(d))/2 > 1  <=>  sqrt(d) > 2 - a
        let two_minus_a = int(2) - &a;
        if !two_minus_a.is_negative() && disc <= &two_minus_a * &two_minus_a {
            return Err(Error::InvalidField("larger root does not exceed 1".into()));
        }
        Ok(FieldSpec { a, b })
    }

    pub fn golden() -> Arc<Self> {
        Arc::new(FieldSpec::new(int(1), int(1)).expect("golden field"))
    }

    /// Parses `g^2=<linear expression in g>`.
    pub fn parse(text: &str) -> Result<Arc<Self>> {
        let (lhs, rhs) = text
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("field declaration needs '=': {text}")))?;
        let lhs: String = lhs.chars().filter(|c| !c.is_whitespace()).collect();
        if lhs != "g^2" && lhs != "g*g" {
            return Err(Error::Parse(format!(
                "field declaration must start with g^2: {text}"
            )));
        }
        let (b, a) = parse::parse_linear(rhs)?;
        Ok(Arc::new(FieldSpec::new(a, b)?))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn discriminant(&self) -> Rational {
        &self.a * &self.a + int(4) * &self.b
    }

    /// True when `g` is an algebraic integer, i.e. ℤ[g] is a ring.
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn approx_root(&self) -> f64 {
        let a = to_f64(&self.a);
        let d = to_f64(&self.discriminant());
        (a + d.sqrt()) / 2.0
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rhs = Scalar::raw(self.b.clone(), self.a.clone(), None);
        write!(f, "g^2={}", rhs.render())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// `u + v·g`; rationals carry no field (`v = 0` always normalizes to `field = None`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    u: Rational,
    v: Rational,
    field: Option<Arc<FieldSpec>>,
}

impl Scalar {
    fn raw(u: Rational, v: Rational, field: Option<Arc<FieldSpec>>) -> Self {
        Scalar { u, v, field }
    }

    pub fn new(u: Rational, v: Rational, field: Option<Arc<FieldSpec>>) -> Result<Self> {
        if v.is_zero() {
            return Ok(Scalar::rational(u));
        }
        match field {
            Some(f) => Ok(Scalar { u, v, field: Some(f) }),
            None => Err(Error::InvalidParameter(
                "irrational component without a field".into(),
            )),
        }
    }

    pub fn rational(u: Rational) -> Self {
        Scalar { u, v: Rational::zero(), field: None }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::rational(int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::rational(rat(n, d))
    }

    pub fn zero() -> Self {
        Scalar::from_int(0)
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    /// The generator `g` of a field.
    pub fn generator(field: &Arc<FieldSpec>) -> Self {
        Scalar { u: Rational::zero(), v: Rational::one(), field: Some(field.clone()) }
    }

    /// `u + v·g` with small integer components.
    pub fn quad(u: i64, v: i64, field: &Arc<FieldSpec>) -> Self {
        Scalar::new(int(u), int(v), Some(field.clone())).expect("field given")
    }

    pub fn parse(text: &str, field: Option<&Arc<FieldSpec>>) -> Result<Self> {
        parse::parse_scalar(text, field)
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn v(&self) -> &Rational {
        &self.v
    }

    pub fn field(&self) -> Option<&Arc<FieldSpec>> {
        self.field.as_ref()
    }

    pub fn is_rational(&self) -> bool {
        self.field.is_none()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.u)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.u.is_integer()
    }

    fn shared_field(&self, other: &Scalar) -> Result<Option<Arc<FieldSpec>>> {
        match (&self.field, &other.field) {
            (None, None) => Ok(None),
            (Some(f), None) | (None, Some(f)) => Ok(Some(f.clone())),
            (Some(f), Some(g)) => {
                if Arc::ptr_eq(f, g) || f == g {
                    Ok(Some(f.clone()))
                } else {
                    Err(Error::MixedFields(f.to_string(), g.to_string()))
                }
            }
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        let field = self.shared_field(other)?;
        Scalar::new(&self.u + &other.u, &self.v + &other.v, field)
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        let field = self.shared_field(other)?;
        Scalar::new(&self.u - &other.u, &self.v - &other.v, field)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        let field = self.shared_field(other)?;
        match &field {
            None => Ok(Scalar::rational(&self.u * &other.u)),
            Some(f) => {
                // (u1 + v1 g)(u2 + v2 g) with g² = a g + b
                let vv = &self.v * &other.v;
                let u = &self.u * &other.u + &f.b * &vv;
                let v = &self.u * &other.v + &other.u * &self.v + &f.a * &vv;
                Scalar::new(u, v, field)
            }
        }
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        self.shared_field(other)?;
        self.try_mul(&other.recip()?)
    }

    pub fn field_arith(&self, other: &Scalar, op: ArithOp) -> Result<Scalar> {
        match op {
            ArithOp::Add => self.try_add(other),
            ArithOp::Sub => self.try_sub(other),
            ArithOp::Mul => self.try_mul(other),
            ArithOp::Div => self.try_div(other),
        }
    }

    /// Image under `g ↦ a − g`, the other root.
    pub fn conjugate(&self) -> Scalar {
        match &self.field {
            None => self.clone(),
            Some(f) => Scalar::raw(&self.u + &f.a * &self.v, -&self.v, self.field.clone()),
        }
    }

    /// `x · conj(x) = u² + a·u·v − b·v²`.
    pub fn norm(&self) -> Rational {
        match &self.field {
            None => &self.u * &self.u,
            Some(f) => &self.u * &self.u + &f.a * &self.u * &self.v - &f.b * &self.v * &self.v,
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.field {
            None => Ok(Scalar::rational(self.u.recip())),
            Some(_) => {
                let n = self.norm();
                let c = self.conjugate();
                Scalar::new(c.u / &n, c.v / &n, self.field.clone())
            }
        }
    }

    pub fn pow(&self, e: i64) -> Result<Scalar> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Scalar::one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.try_mul(&sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.try_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Exact sign, decided algebraically.
    pub fn signum(&self) -> Ordering {
        let f = match &self.field {
            None => return self.u.cmp(&Rational::zero()),
            Some(f) => f,
        };
        // u + v g = A + B sqrt(d) with A = u + v a/2, B = v/2
        let half = rat(1, 2);
        let a_part = &self.u + &self.v * &f.a * &half;
        let sa = a_part.cmp(&Rational::zero());
        let sb = self.v.cmp(&Rational::zero());
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare A² with B² d, whose difference is the norm
        match self.norm().cmp(&Rational::zero()) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("nonzero element with zero norm"),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering> {
        Ok(self.try_sub(other)?.signum())
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn max_of(&self, other: &Scalar) -> Scalar {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min_of(&self, other: &Scalar) -> Scalar {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Rational bounds of width at most `2^(1-bits)·|x|`.
    pub fn enclosure(&self, bits: u32) -> Enclosure {
        let f = match &self.field {
            None => return Enclosure::point(self.u.clone()),
            Some(f) => f,
        };
        let d = f.discriminant();
        let half = rat(1, 2);
        let a_part = &self.u + &self.v * &f.a * &half;
        let b_part = &self.v * &half;
        let target_exp = bits as i64 - 1;
        let mut k = bits + 16;
        loop {
            let (slo, shi) = sqrt_bounds(&d, k);
            let (p, q) = (&b_part * &slo, &b_part * &shi);
            let (lo, hi) = if b_part.is_negative() { (q, p) } else { (p, q) };
            let enc = Enclosure::new(&a_part + lo, &a_part + hi);
            let width = enc.width();
            let mag = enc.min_abs();
            if mag.is_positive() && width * pow2(target_exp) <= mag {
                return enc;
            }
            k += 32;
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.field {
            None => to_f64(&self.u),
            Some(_) => self.enclosure(64).mid_f64(),
        }
    }

    /// Least k with k·u and k·v integral.
    pub fn denominator_lcm(&self) -> BigInt {
        self.u.denom().lcm(self.v.denom())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.u.is_zero() || self.v.is_zero() {
            out.push_str(&self.u.to_string());
        }
        if !self.v.is_zero() {
            let mag = self.v.abs();
            if self.v.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push('g');
        }
        out
    }
}

/// Smallest positive integer k making every `k·x` integral in each component.
pub fn common_denominator(xs: &[Scalar]) -> BigInt {
    xs.iter().fold(BigInt::one(), |k, x| k.lcm(&x.denominator_lcm()))
}

pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Bounds `lo ≤ sqrt(d) ≤ hi` with `hi − lo ≤ 2^-k / denom(d)`.
fn sqrt_bounds(d: &Rational, k: u32) -> (Rational, Rational) {
    let m = d.denom().clone();
    let scaled: BigInt = (d.numer() * &m) << (2 * k as usize);
    let s = scaled.sqrt();
    let den = &m << k as usize;
    (Rational::new(s.clone(), den.clone()), Rational::new(s + 1, den))
}

/// Serialized as its exact text form.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.render())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    /// Panics when the operands live in different fields.
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparison across fields")
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::rational(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$inner(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::raw(-&self.u, -&self.v, self.field.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g() -> Arc<FieldSpec> {
        FieldSpec::golden()
    }

    #[test]
    fn gamma_cubed() {
        let f = g();
        let x = Scalar::generator(&f);
        let x2 = &x * &x;
        assert_eq!(&x * &x2, Scalar::quad(1, 2, &f));
    }

    #[test]
    fn inverse_square_of_gamma() {
        let f = g();
        let x = Scalar::generator(&f);
        let inv = x.pow(-2).unwrap();
        assert_eq!(inv, Scalar::quad(2, -1, &f));
    }

    #[test]
    fn identity_multiplication() {
        let f = g();
        let x = Scalar::quad(3, -7, &f);
        assert_eq!(&x * &Scalar::one(), x);
    }

    #[test]
    fn comparisons() {
        let f = g();
        assert!(Scalar::quad(8, 8, &f) > Scalar::quad(6, 8, &f));
        assert!(Scalar::quad(-3, 2, &f).is_positive());
        assert!(Scalar::quad(-4, 3, &f) < Scalar::one());
        assert!(Scalar::quad(-1, 1, &f) < Scalar::ratio(5, 8));
        assert!(Scalar::quad(-1, 1, &f) > Scalar::ratio(3, 5));
    }

    #[test]
    fn mixed_fields_rejected() {
        let other = Arc::new(FieldSpec::new(int(0), int(2)).unwrap());
        let x = Scalar::generator(&g());
        let y = Scalar::generator(&other);
        assert!(matches!(x.try_add(&y), Err(Error::MixedFields(_, _))));
        assert!(x.try_cmp(&y).is_err());
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(Scalar::one().try_div(&Scalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn invalid_fields() {
        assert!(FieldSpec::new(int(0), int(-1)).is_err());
        assert!(FieldSpec::new(int(0), int(4)).is_err());
        assert!(FieldSpec::new(int(0), rat(1, 2)).is_err());
        assert!(FieldSpec::new(int(0), int(2)).is_ok());
    }

    #[test]
    fn common_denominators() {
        let f = g();
        assert_eq!(common_denominator(&[Scalar::ratio(1, 2), Scalar::ratio(3, 4)]), BigInt::from(4));
        assert_eq!(common_denominator(&[Scalar::generator(&f)]), BigInt::one());
        // 1/g^6 = 13 - 8g, so -(8g+8)/g^6 is already integral
        let inv6 = Scalar::generator(&f).pow(-6).unwrap();
        assert_eq!(inv6, Scalar::quad(13, -8, &f));
        let b1 = -(Scalar::quad(8, 8, &f) * &inv6);
        let b2 = -(Scalar::quad(6, 8, &f) * &inv6);
        assert_eq!(common_denominator(&[b1, b2]), BigInt::one());
    }

    #[test]
    fn enclosures() {
        let f = g();
        let e = Scalar::generator(&f).enclosure(60);
        assert!(e.lo_f64() <= 1.618_033_988_749_895 && 1.618_033_988_749_894 <= e.hi_f64());
        let e = Scalar::zero().enclosure(53);
        assert!(e.lo().is_zero() && e.hi().is_zero());
        let two_over = (Scalar::from_int(2) / Scalar::generator(&f)).enclosure(60);
        assert!((two_over.mid_f64() - 1.236_067_977_499_79).abs() < 1e-14);
    }

    #[test]
    fn render_round_trip_examples() {
        let f = g();
        for (u, v) in [(0, 1), (2, 3), (-1, -1), (0, -2), (5, 0)] {
            let x = Scalar::quad(u, v, &f);
            assert_eq!(Scalar::parse(&x.to_string(), Some(&f)).unwrap(), x);
        }
        let x = Scalar::new(rat(-1, 2), rat(3, 7), Some(f.clone())).unwrap();
        assert_eq!(x.to_string(), "-1/2+3/7g");
        assert_eq!(Scalar::parse(&x.to_string(), Some(&f)).unwrap(), x);
    }

    #[test]
    fn field_declaration_round_trip() {
        let f = FieldSpec::parse("g^2=g+1").unwrap();
        assert_eq!(*f, *FieldSpec::golden());
        assert_eq!(f.to_string(), "g^2=1+g");
        assert_eq!(*FieldSpec::parse(&f.to_string()).unwrap(), *f);
        assert!(FieldSpec::parse("g^2=g*g").is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-60i64..60, 1i64..40).prop_map(|(n, d)| rat(n, d))
    }

    fn golden_scalar() -> impl Strategy<Value = Scalar> {
        (small_rat(), small_rat())
            .prop_map(|(u, v)| Scalar::new(u, v, Some(FieldSpec::golden())).unwrap())
    }

    proptest! {
        #[test]
        fn sign_agrees_with_enclosure(x in golden_scalar()) {
            let e = x.enclosure(200);
            if e.lo().is_positive() {
                prop_assert!(x.is_positive());
            } else if e.hi().is_negative() {
                prop_assert!(x.is_negative());
            } else {
                prop_assert!(x.is_zero());
            }
        }

        #[test]
        fn field_axioms(x in golden_scalar(), y in golden_scalar(), z in golden_scalar()) {
            prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
            prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
            if !x.is_zero() {
                prop_assert_eq!(&x * x.recip().unwrap(), Scalar::one());
            }
        }

        #[test]
        fn display_parses_back(x in golden_scalar()) {
            let f = FieldSpec::golden();
            prop_assert_eq!(Scalar::parse(&x.to_string(), Some(&f)).unwrap(), x);
        }
    }

    #[test]
    fn golden_powers_follow_fibonacci() {
        let f = g();
        let x = Scalar::generator(&f);
        let (mut fa, mut fb) = (0i64, 1i64); // F(n-1), F(n)
        let mut p = x.clone();
        for _ in 1..=30 {
            assert_eq!(p, Scalar::quad(fa, fb, &f));
            p = &p * &x;
            let next = fa + fb;
            fa = fb;
            fb = next;
        }
    }
}
