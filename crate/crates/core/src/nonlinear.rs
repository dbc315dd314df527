//! Depth-one linking conditions on slope ranges and interval certificates for
//! `f(C_α) − g(C_β)` with smooth `f`, `g`.

use std::cmp::Ordering;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::{CantorPair, LogRatio, MiddleCantor};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::enclosure::{f64_above, f64_below};
use crate::scalar::Scalar;

/// Closed interval of doubles, widened outward after every operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Iv {
    pub lo: f64,
    pub hi: f64,
}

const SLACK_ULPS: u32 = 4;

fn nudge_up(mut x: f64) -> f64 {
    for _ in 0..SLACK_ULPS {
        x = if x == 0.0 { f64::from_bits(1) } else if x > 0.0 { f64::from_bits(x.to_bits() + 1) } else { f64::from_bits(x.to_bits() - 1) };
    }
    x
}

fn nudge_down(x: f64) -> f64 {
    -nudge_up(-x)
}

impl Iv {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Iv { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Iv { lo: x, hi: x }
    }

    /// Outward enclosure of an exact scalar.
    pub fn of_scalar(x: &Scalar) -> Self {
        let e = x.enclosure(80);
        Iv { lo: f64_below(e.lo()), hi: f64_above(e.hi()) }
    }

    pub fn of_interval(iv: &Interval) -> Self {
        Iv { lo: Iv::of_scalar(iv.lo()).lo, hi: Iv::of_scalar(iv.hi()).hi }
    }

    fn out(lo: f64, hi: f64) -> Self {
        Iv { lo: nudge_down(lo), hi: nudge_up(hi) }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn add(self, o: Iv) -> Iv {
        Iv::out(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Iv) -> Iv {
        Iv::out(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn neg(self) -> Iv {
        Iv { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, o: Iv) -> Iv {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Iv::out(lo, hi)
    }

    pub fn div(self, o: Iv) -> Result<Iv> {
        if o.contains_zero() {
            return Err(Error::Undecided("division by an enclosure containing zero".into()));
        }
        Ok(self.mul(Iv::out(1.0 / o.hi, 1.0 / o.lo)))
    }

    /// Strictly inside `(lo, hi)`.
    pub fn strictly_within(&self, lo: f64, hi: f64) -> bool {
        lo < self.lo && self.hi < hi
    }
}

fn trig_enclosure(x: Iv, f: fn(f64) -> f64, max_phase: f64, min_phase: f64) -> Iv {
    let a = f(x.lo);
    let b = f(x.hi);
    let mut lo = a.min(b);
    let mut hi = a.max(b);
    let two_pi = 2.0 * std::f64::consts::PI;
    let hits = |phase: f64| {
        let k_lo = ((x.lo - phase) / two_pi - 1e-9).ceil();
        let k_hi = ((x.hi - phase) / two_pi + 1e-9).floor();
        k_lo <= k_hi
    };
    if hits(max_phase) {
        hi = 1.0;
    }
    if hits(min_phase) {
        lo = -1.0;
    }
    Iv::out(lo.max(-1.0), hi.min(1.0))
}

/// Catalog of smooth functions with validated value and derivative enclosures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothFn {
    Affine { a: Scalar, b: Scalar },
    Square,
    Sqrt,
    Sin,
    Cos,
    Neg { inner: Box<SmoothFn> },
}

impl SmoothFn {
    pub fn negated(self) -> SmoothFn {
        SmoothFn::Neg { inner: Box::new(self) }
    }

    /// Parses `square`, `sqrt`, `sin`, `cos`, `affine:a:b` and a `neg-` prefix.
    pub fn parse(text: &str) -> Result<SmoothFn> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix("neg-") {
            return Ok(SmoothFn::parse(rest)?.negated());
        }
        match t {
            "square" => Ok(SmoothFn::Square),
            "sqrt" => Ok(SmoothFn::Sqrt),
            "sin" => Ok(SmoothFn::Sin),
            "cos" => Ok(SmoothFn::Cos),
            _ => {
                let parts: Vec<&str> = t.split(':').collect();
                if parts.len() == 3 && parts[0] == "affine" {
                    Ok(SmoothFn::Affine { a: Scalar::parse(parts[1], None)?, b: Scalar::parse(parts[2], None)? })
                } else {
                    Err(Error::Parse(format!("unknown function '{t}'")))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            SmoothFn::Affine { a, b } => format!("affine:{a}:{b}"),
            SmoothFn::Square => "square".into(),
            SmoothFn::Sqrt => "sqrt".into(),
            SmoothFn::Sin => "sin".into(),
            SmoothFn::Cos => "cos".into(),
            SmoothFn::Neg { inner } => format!("neg-{}", inner.name()),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            SmoothFn::Affine { a, b } => a.to_f64() * x + b.to_f64(),
            SmoothFn::Square => x * x,
            SmoothFn::Sqrt => x.sqrt(),
            SmoothFn::Sin => x.sin(),
            SmoothFn::Cos => x.cos(),
            SmoothFn::Neg { inner } => -inner.eval_f64(x),
        }
    }

    pub fn eval(&self, x: Iv) -> Result<Iv> {
        Ok(match self {
            SmoothFn::Affine { a, b } => Iv::of_scalar(a).mul(x).add(Iv::of_scalar(b)),
            SmoothFn::Square => {
                let m = x.mul(x);
                if x.contains_zero() {
                    Iv::new(0.0, m.hi)
                } else {
                    Iv::new(m.lo.max(0.0), m.hi)
                }
            }
            SmoothFn::Sqrt => {
                if x.lo < 0.0 {
                    return Err(Error::InvalidParameter("sqrt of a negative enclosure".into()));
                }
                Iv::out(x.lo.sqrt(), x.hi.sqrt()).clamp_low(0.0)
            }
            SmoothFn::Sin => {
                let h = std::f64::consts::FRAC_PI_2;
                trig_enclosure(x, f64::sin, h, -h)
            }
            SmoothFn::Cos => trig_enclosure(x, f64::cos, 0.0, std::f64::consts::PI),
            SmoothFn::Neg { inner } => inner.eval(x)?.neg(),
        })
    }

    pub fn deriv(&self, x: Iv) -> Result<Iv> {
        Ok(match self {
            SmoothFn::Affine { a, .. } => Iv::of_scalar(a),
            SmoothFn::Square => Iv::point(2.0).mul(x),
            SmoothFn::Sqrt => {
                if x.lo <= 0.0 {
                    return Err(Error::InvalidParameter("sqrt is not differentiable at 0".into()));
                }
                Iv::point(0.5).div(SmoothFn::Sqrt.eval(x)?)?
            }
            SmoothFn::Sin => SmoothFn::Cos.eval(x)?,
            SmoothFn::Cos => SmoothFn::Sin.eval(x)?.neg(),
            SmoothFn::Neg { inner } => inner.deriv(x)?.neg(),
        })
    }
}

impl Iv {
    fn clamp_low(self, floor: f64) -> Iv {
        Iv { lo: self.lo.max(floor), hi: self.hi.max(floor) }
    }
}

/// Open slope range `(m1, m2)` not containing 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkRange {
    pub m1: Scalar,
    pub m2: Scalar,
}

impl LinkRange {
    pub fn new(m1: Scalar, m2: Scalar) -> Result<Self> {
        if m1 >= m2 {
            return Err(Error::Precondition(format!("empty slope range ({m1}, {m2})")));
        }
        if !m1.is_zero() && !m2.is_zero() && m1.signum() != m2.signum() {
            return Err(Error::Precondition("slope range must not contain 0".into()));
        }
        if m1.is_zero() && m2.is_negative() || m2.is_zero() && m1.is_positive() {
            return Err(Error::Precondition("slope range must not contain 0".into()));
        }
        Ok(LinkRange { m1, m2 })
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.m1 < x && x < &self.m2
    }

    fn positive(&self) -> bool {
        self.m2.is_positive() && !self.m1.is_negative()
    }
}

/// `c0 + c1·λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Line {
    c0: Scalar,
    c1: Scalar,
}

impl Line {
    fn at(&self, lam: &Scalar) -> Scalar {
        &self.c0 + &(&self.c1 * lam)
    }

    fn crossing(&self, o: &Line) -> Option<Scalar> {
        let slope = &self.c1 - &o.c1;
        if slope.is_zero() {
            return None;
        }
        Some((&o.c0 - &self.c0) / slope)
    }
}

/// Depth-one images of the hull, as endpoint lines in `λ` for one sign of `λ`.
fn image_lines(pair: &CantorPair, positive: bool) -> Result<Vec<(Line, Line)>> {
    let (n0, m0) = match pair.log_ratio() {
        LogRatio::Rational { n0, m0 } => (n0, m0),
        LogRatio::Unknown => return Err(Error::Precondition("no rational relation between the expansions".into())),
    };
    let (k, k2) = (pair.first().homogeneous(), pair.second().homogeneous());
    let r = k.expansion().pow(-(m0 as i64))?;
    let (lo1, hi1) = (k.hull().lo(), k.hull().hi());
    let (lo2, hi2) = (k2.hull().lo(), k2.hull().hi());
    let cs = k.level_translations(m0)?;
    let ds = k2.level_translations(n0)?;
    let mut out = Vec::with_capacity(cs.len() * ds.len());
    for c in &cs {
        for d in &ds {
            let (l_slope, r_slope) = if positive {
                (-(&(&r * hi2) + d), -(&(&r * lo2) + d))
            } else {
                (-(&(&r * lo2) + d), -(&(&r * hi2) + d))
            };
            out.push((
                Line { c0: &(&r * lo1) + c, c1: l_slope },
                Line { c0: &(&r * hi1) + c, c1: r_slope },
            ));
        }
    }
    Ok(out)
}

/// Whether the open depth-one images form one interval at `λ`.
fn connected_at(lines: &[(Line, Line)], lam: &Scalar) -> bool {
    let mut ivs: Vec<(Scalar, Scalar)> = lines.iter().map(|(l, r)| (l.at(lam), r.at(lam))).collect();
    ivs.sort();
    let mut reach = ivs[0].1.clone();
    for (l, r) in &ivs[1..] {
        if *l >= reach {
            return false;
        }
        if *r > reach {
            reach = r.clone();
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    pub linked: bool,
    /// Condition (i): connected union throughout the range.
    pub connected: bool,
    /// Condition (ii): every pair is always disjoint or shares a fixed point.
    pub pairs_consistent: bool,
    /// Endpoint crossings strictly inside the range.
    pub crossings: Vec<Scalar>,
    pub disconnected_at: Option<Scalar>,
    /// First offending map pair (indices into the depth-one maps).
    pub failing_pair: Option<(usize, usize)>,
}

/// Decides the depth-one linking conditions on the open range.
pub fn regularly_linked(pair: &CantorPair, range: &LinkRange) -> Result<LinkReport> {
    let lines = image_lines(pair, range.positive())?;
    let mut ends: Vec<&Line> = Vec::with_capacity(2 * lines.len());
    for (l, r) in &lines {
        ends.push(l);
        ends.push(r);
    }
    let mut crossings: Vec<Scalar> = Vec::new();
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            if let Some(x) = ends[i].crossing(ends[j]) {
                if range.contains(&x) {
                    crossings.push(x);
                }
            }
        }
    }
    crossings.sort();
    crossings.dedup();
    let mut marks = vec![range.m1.clone()];
    marks.extend(crossings.iter().cloned());
    marks.push(range.m2.clone());
    let two = Scalar::from_int(2);
    let mut probes: Vec<Scalar> = crossings.clone();
    for w in marks.windows(2) {
        probes.push((&w[0] + &w[1]) / two.clone());
    }
    probes.sort();
    let disconnected_at = probes.par_iter().find_first(|lam| !connected_at(&lines, lam)).cloned();
    let (m1, m2) = (&range.m1, &range.m2);
    let failing_pair = (0..lines.len())
        .into_par_iter()
        .flat_map_iter(|i| (i + 1..lines.len()).map(move |j| (i, j)))
        .find_first(|&(i, j)| {
            let (li, ri) = &lines[i];
            let (lj, rj) = &lines[j];
            let apart = |r: &Line, l: &Line| r.at(m1) <= l.at(m1) && r.at(m2) <= l.at(m2);
            if apart(ri, lj) || apart(rj, li) {
                return false;
            }
            let left = [li.at(m1), li.at(m2), lj.at(m1), lj.at(m2)].into_iter().max().unwrap();
            let right = [ri.at(m1), ri.at(m2), rj.at(m1), rj.at(m2)].into_iter().min().unwrap();
            left >= right
        });
    let connected = disconnected_at.is_none();
    let pairs_consistent = failing_pair.is_none();
    Ok(LinkReport {
        linked: connected && pairs_consistent,
        connected,
        pairs_consistent,
        crossings,
        disconnected_at,
        failing_pair,
    })
}

/// Eventually periodic binary address of a point of a middle Cantor set;
/// digit 1 selects the right branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitPoint {
    pub prefix: Vec<u8>,
    pub period: Vec<u8>,
}

impl DigitPoint {
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() || prefix.iter().chain(&period).any(|&d| d > 1) {
            return Err(Error::InvalidParameter("digits must be 0/1 with a nonempty period".into()));
        }
        Ok(DigitPoint { prefix, period })
    }

    pub fn digit(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn digits(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.digit(i)).collect()
    }

    pub fn value(&self, set: &MiddleCantor) -> Result<Scalar> {
        let a = set.alpha();
        let step = &Scalar::one() - a;
        let word_value = |w: &[u8]| -> Scalar {
            let mut acc = Scalar::zero();
            let mut scale = Scalar::one();
            for &d in w {
                if d == 1 {
                    acc = acc + &step * &scale;
                }
                scale = &scale * a;
            }
            acc
        };
        let head = word_value(&self.prefix);
        let cycle = word_value(&self.period) / (Scalar::one() - a.pow(self.period.len() as i64)?);
        Ok(head + cycle * a.pow(self.prefix.len() as i64)?)
    }
}

/// Level-`depth` construction interval of a middle Cantor set with the given address.
pub fn construction_interval(set: &MiddleCantor, word: &[u8]) -> Result<Interval> {
    let a = set.alpha();
    let step = &Scalar::one() - a;
    let mut lo = Scalar::zero();
    let mut scale = Scalar::one();
    for &d in word {
        if d == 1 {
            lo = lo + &step * &scale;
        }
        scale = &scale * a;
    }
    Interval::new(lo.clone(), lo + scale)
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub base: (Scalar, Scalar),
    pub range: LinkRange,
    /// Depth multiplier `k`: the square is at depths `(k·m₀, k·n₀)`.
    pub depth: u32,
    pub words: (String, String),
    pub square: (Interval, Interval),
    /// Enclosure of `g′(y₀)/f′(x₀)`.
    pub base_ratio: Iv,
    /// Enclosure of `f′(x)/g′(y)` over the square.
    pub ratio_bounds: Iv,
    /// Length of the projection of one child square, the gap scale the smoke test allows.
    pub modulus: f64,
    pub verdict: &'static str,
}

pub const CERTIFICATE_DEPTH_CAP: u32 = 40;

/// Finds a construction square around the base point on which the slope cone
/// of the level curves of `f(x) − g(y)` stays inside the reciprocal range.
pub fn interval_certificate(
    f: &SmoothFn,
    g: &SmoothFn,
    pair: &CantorPair,
    base: (&DigitPoint, &DigitPoint),
    range: &LinkRange,
) -> Result<Certificate> {
    let (ca, cb) = pair.middles()?;
    let link = regularly_linked(pair, range)?;
    if !link.linked {
        return Err(Error::Precondition(format!("pair is not regularly linked on ({}, {})", range.m1, range.m2)));
    }
    let (n0, m0) = match pair.log_ratio() {
        LogRatio::Rational { n0, m0 } => (n0, m0),
        LogRatio::Unknown => return Err(Error::Precondition("no rational relation between the expansions".into())),
    };
    let x0 = base.0.value(ca)?;
    let y0 = base.1.value(cb)?;
    let (m1, m2) = (Iv::of_scalar(&range.m1), Iv::of_scalar(&range.m2));
    let base_ratio = g.deriv(Iv::of_scalar(&y0))?.div(f.deriv(Iv::of_scalar(&x0))?)?;
    if !base_ratio.strictly_within(m1.hi, m2.lo) {
        return Err(Error::Precondition(format!(
            "g'(y0)/f'(x0) in [{:.6}, {:.6}] is not inside ({}, {})",
            base_ratio.lo, base_ratio.hi, range.m1, range.m2
        )));
    }
    let inv_lo = Iv::point(1.0).div(m2)?;
    let inv_hi = Iv::point(1.0).div(m1)?;
    let mut last = None;
    for k in 1..=CERTIFICATE_DEPTH_CAP {
        let wx = base.0.digits((k * m0) as usize);
        let wy = base.1.digits((k * n0) as usize);
        let sx = construction_interval(ca, &wx)?;
        let sy = construction_interval(cb, &wy)?;
        let (dx, dy) = (f.deriv(Iv::of_interval(&sx)), g.deriv(Iv::of_interval(&sy)));
        let (Ok(dx), Ok(dy)) = (dx, dy) else { continue };
        let Ok(ratio) = dx.div(dy) else { continue };
        last = Some(ratio);
        if ratio.strictly_within(inv_lo.hi, inv_hi.lo) {
            let side = Iv::of_scalar(&sx.length()).hi;
            let slope = |d: Iv| d.lo.abs().max(d.hi.abs());
            let r = Iv::of_scalar(&ca.alpha().pow(m0 as i64)?).hi;
            let modulus = (slope(dx) + slope(dy)) * side * r;
            let word = |w: &[u8]| w.iter().map(|d| char::from(b'0' + d)).collect::<String>();
            return Ok(Certificate {
                base: (x0, y0),
                range: range.clone(),
                depth: k,
                words: (word(&wx), word(&wy)),
                square: (sx, sy),
                base_ratio,
                ratio_bounds: ratio,
                modulus,
                verdict: "contains_interval",
            });
        }
    }
    Err(Error::Undecided(format!(
        "no square within depth {CERTIFICATE_DEPTH_CAP}; last ratio bounds {:?} vs ({:.6}, {:.6})",
        last, inv_lo.hi, inv_hi.lo
    )))
}

#[derive(Clone, Debug, Serialize)]
pub struct SmokeReport {
    pub samples: usize,
    pub value_range: (f64, f64),
    /// Largest gap between sorted sample values in the middle half of the range.
    pub largest_gap: f64,
    pub modulus: f64,
    pub passed: bool,
}

/// Samples depth-`extra` construction points inside the certificate square and
/// checks that `f(x) − g(y)` leaves no gap wider than the certificate modulus.
pub fn certificate_smoke_test(
    cert: &Certificate,
    f: &SmoothFn,
    g: &SmoothFn,
    pair: &CantorPair,
    samples: usize,
    extra: u32,
    seed: u64,
) -> Result<SmokeReport> {
    let (ca, cb) = pair.middles()?;
    let mut rng = StdRng::seed_from_u64(seed);
    let (a, b) = (ca.alpha().to_f64(), cb.alpha().to_f64());
    let (x_lo, x_len) = (cert.square.0.lo().to_f64(), cert.square.0.length().to_f64());
    let (y_lo, y_len) = (cert.square.1.lo().to_f64(), cert.square.1.length().to_f64());
    let point = |rng: &mut StdRng, ratio: f64| -> f64 {
        let (mut v, mut s) = (0.0, 1.0);
        for _ in 0..extra {
            if rng.gen::<bool>() {
                v += (1.0 - ratio) * s;
            }
            s *= ratio;
        }
        v
    };
    let mut values: Vec<f64> = (0..samples)
        .map(|_| {
            let x = x_lo + x_len * point(&mut rng, a);
            let y = y_lo + y_len * point(&mut rng, b);
            f.eval_f64(x) - g.eval_f64(y)
        })
        .collect();
    values.sort_by(|p, q| p.partial_cmp(q).unwrap_or(Ordering::Equal));
    let (lo, hi) = (values[0], values[values.len() - 1]);
    let (c_lo, c_hi) = (lo + (hi - lo) / 4.0, hi - (hi - lo) / 4.0);
    let largest_gap = values
        .windows(2)
        .filter(|w| w[1] > c_lo && w[0] < c_hi)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    Ok(SmokeReport {
        samples,
        value_range: (lo, hi),
        largest_gap,
        modulus: cert.modulus,
        passed: largest_gap <= cert.modulus,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum WeakStable {
    Range { m: Scalar },
    None { reason: String },
}

const BISECTION_BITS: i64 = 20;

/// Largest `m > 1` (to `2⁻²⁰`) with the pair linked on `(1/m, m)`, provided
/// the depth-one images at `λ = 1` already fill the hull.
pub fn weak_stable_range(pair: &CantorPair) -> Result<WeakStable> {
    let lines = image_lines(pair, true)?;
    if !connected_at(&lines, &Scalar::one()) {
        return Ok(WeakStable::None { reason: "depth-one images at λ = 1 do not fill the hull".into() });
    }
    let linked = |m: &Scalar| -> Result<bool> {
        Ok(regularly_linked(pair, &LinkRange::new(m.recip()?, m.clone())?)?.linked)
    };
    let one = Scalar::one();
    let mut good = None;
    for k in 1..=30 {
        let m = &one + &Scalar::rational(crate::scalar::pow2(-k));
        if linked(&m)? {
            good = Some(m);
            break;
        }
    }
    let Some(mut lo) = good else {
        return Ok(WeakStable::None { reason: "no range (1/m, m) around 1 is linked".into() });
    };
    let cap = Scalar::from_int(1 << 10);
    let mut hi = Scalar::from_int(2);
    while linked(&hi)? {
        lo = hi.clone();
        if hi >= cap {
            return Ok(WeakStable::Range { m: hi });
        }
        hi = &hi * &Scalar::from_int(2);
    }
    let tol = Scalar::rational(crate::scalar::pow2(-BISECTION_BITS));
    let two = Scalar::from_int(2);
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / two.clone();
        if linked(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(WeakStable::Range { m: lo })
}

/// The three worked examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GalleryExample {
    /// `C² + C²`, middle-third.
    SquareSum,
    /// `sin C + cos C`, middle-third.
    SinCos,
    /// `√C_α − √C_β`, golden pair.
    GoldenSqrt,
}

#[derive(Clone, Debug)]
pub struct ExampleSetup {
    pub f: SmoothFn,
    pub g: SmoothFn,
    pub pair: CantorPair,
    pub base: (DigitPoint, DigitPoint),
    pub range: LinkRange,
}

impl GalleryExample {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "sq-sum" => Ok(GalleryExample::SquareSum),
            "sincos" => Ok(GalleryExample::SinCos),
            "sqrt" => Ok(GalleryExample::GoldenSqrt),
            other => Err(Error::Parse(format!("unknown example '{other}' (sq-sum, sincos, sqrt)"))),
        }
    }

    pub fn setup(self) -> ExampleSetup {
        let third = || CantorPair::middle_rational((1, 3), (1, 3));
        let dp = |p: &[u8], q: &[u8]| DigitPoint::new(p.to_vec(), q.to_vec()).expect("valid digits");
        let range = |a: (i64, i64), b: (i64, i64)| {
            LinkRange::new(Scalar::ratio(a.0, a.1), Scalar::ratio(b.0, b.1)).expect("valid range")
        };
        match self {
            // (2/3, 1/3): g′/f′ = −1/2
            GalleryExample::SquareSum => ExampleSetup {
                f: SmoothFn::Square,
                g: SmoothFn::Square.negated(),
                pair: third(),
                base: (dp(&[1], &[0]), dp(&[0], &[1])),
                range: range((-11, 20), (-9, 20)),
            },
            // (1/3, 1/3): g′/f′ = tan(1/3)
            GalleryExample::SinCos => ExampleSetup {
                f: SmoothFn::Sin,
                g: SmoothFn::Cos.negated(),
                pair: third(),
                base: (dp(&[0], &[1]), dp(&[0], &[1])),
                range: range((17, 50), (9, 25)),
            },
            // (1 − α, 1): g′/f′ = √(1 − α)
            GalleryExample::GoldenSqrt => ExampleSetup {
                f: SmoothFn::Sqrt,
                g: SmoothFn::Sqrt,
                pair: CantorPair::golden(),
                base: (dp(&[1], &[0]), dp(&[], &[1])),
                range: range((873, 1000), (7, 8)),
            },
        }
    }
}
