//! Closed-form decision of `C_α − λC_β = [−λ, 1]` for middle pairs, through
//! the piecewise map `T` on slopes and its minimal invariant set `Λ`.

use serde::Serialize;

use crate::cantor::{CantorPair, LogRatio};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::renorm::full_interval_via_thickness;
use crate::scalar::Scalar;

/// How the expansions `p`, `q` relate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclaredRatio {
    /// `p = γ^{n₀}`, `q = γ^{m₀}` with `γ > 1`.
    Rational { n0: u32, m0: u32, gamma: Scalar },
    /// `log p / log q` is irrational (a user declaration).
    Irrational,
}

impl DeclaredRatio {
    /// Finds `γ = p^x q^y` with `x·n₀ + y·m₀ = 1` when the log ratio is rational.
    pub fn infer(pair: &CantorPair) -> Result<DeclaredRatio> {
        let (n0, m0) = match pair.log_ratio() {
            LogRatio::Rational { n0, m0 } => (n0, m0),
            LogRatio::Unknown => {
                return Err(Error::Precondition(
                    "no rational log relation found; declare the ratio explicitly".into(),
                ))
            }
        };
        let (x, y) = bezout(n0 as i64, m0 as i64);
        let gamma = pair.p().pow(x)? * pair.q().pow(y)?;
        Ok(DeclaredRatio::Rational { n0, m0, gamma })
    }
}

/// `(x, y)` with `a·x + b·y = 1` for coprime `a, b`.
fn bezout(a: i64, b: i64) -> (i64, i64) {
    let (mut r0, mut r1, mut x0, mut x1, mut y0, mut y1) = (a, b, 1i64, 0i64, 0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (x0, x1) = (x1, x0 - k * x1);
        (y0, y1) = (y1, y0 - k * y1);
    }
    debug_assert_eq!(r0, 1);
    (x0, y0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullIntervalAnalysis {
    pub p: Scalar,
    pub q: Scalar,
    /// `s₀ = q/(q−2)`.
    pub s0: Scalar,
    /// `s₁ = (p−2)/p`.
    pub s1: Scalar,
    /// Open interval `(q/(p(q−2)), q(p−2)/p)`, stored by its closure.
    pub gap: Interval,
    /// `[q(p−2)/(γp), q/(p(q−2))]`, absent when empty.
    pub base: Option<Interval>,
    pub ratio: DeclaredRatio,
    /// Invariant set, the union of `γⁿ·base` for `n = −m₀+1 ..= n₀`.
    pub invariant: IntervalSet,
}

impl FullIntervalAnalysis {
    pub fn gamma(&self) -> Option<&Scalar> {
        match &self.ratio {
            DeclaredRatio::Rational { gamma, .. } => Some(gamma),
            DeclaredRatio::Irrational => None,
        }
    }

    /// The piece containing `x`: `Some(true)` for `x ↦ p·x`, `Some(false)` for `x ↦ x/q`.
    fn pieces(&self, x: &Scalar) -> (bool, bool) {
        let left = &self.s1 <= x && x <= self.gap.lo();
        let right = self.gap.hi() <= x && x <= &self.s0;
        (left, right)
    }

    /// Every image of `x` under the two branches of `T` whose domain contains it.
    pub fn t_map_all(&self, x: &Scalar) -> Vec<Scalar> {
        let (left, right) = self.pieces(x);
        let mut out = Vec::new();
        if left {
            out.push(&self.p * x);
        }
        if right {
            out.push(x / &self.q);
        }
        out
    }

    pub fn t_map(&self, x: &Scalar) -> Result<Scalar> {
        let imgs = self.t_map_all(x);
        match imgs.len() {
            0 => Err(Error::InvalidParameter(format!("{x} is outside the domain of T"))),
            1 => Ok(imgs.into_iter().next().unwrap()),
            _ if imgs[0] == imgs[1] => Ok(imgs.into_iter().next().unwrap()),
            _ => Err(Error::InvalidParameter(format!("{x} lies in both pieces of T"))),
        }
    }

    /// Image of a closed interval lying in one piece of `T`.
    pub fn t_map_interval(&self, iv: &Interval) -> Result<Interval> {
        let (l1, r1) = self.pieces(iv.lo());
        let (l2, r2) = self.pieces(iv.hi());
        if l1 && l2 {
            Ok(iv.affine_image(&self.p, &Scalar::zero()))
        } else if r1 && r2 {
            Ok(iv.affine_image(&self.q.recip()?, &Scalar::zero()))
        } else {
            Err(Error::InvalidParameter(format!("{iv} is not inside one piece of T")))
        }
    }

    /// Inverse branch `S = T⁻¹` applied to an interval.
    pub fn s_map_interval(&self, iv: &Interval) -> Result<Interval> {
        let two = Scalar::from_int(2);
        let one = Scalar::one();
        let left = Interval::new(self.s1.clone(), (&self.q - &two).recip()?)?;
        let right = Interval::new(&self.p - &two, self.s0.clone())?;
        if left.contains_interval(iv) && !(right.contains_interval(iv) && iv.length() > Scalar::zero()) {
            Ok(iv.affine_image(&self.q, &Scalar::zero()))
        } else if right.contains_interval(iv) {
            Ok(iv.affine_image(&(&one / &self.p), &Scalar::zero()))
        } else {
            Err(Error::InvalidParameter(format!("{iv} is not inside one piece of S")))
        }
    }

    /// Lengths of `Tⁿ(J)` for `n < n₀+m₀` and `Sⁿ(I)` for `n < n₀+m₀−1`; their
    /// sum equals `s₀ − s₁` when the base is nonempty.
    pub fn accounting(&self) -> Result<(Scalar, Scalar)> {
        let (n0, m0) = match &self.ratio {
            DeclaredRatio::Rational { n0, m0, .. } => (*n0 as usize, *m0 as usize),
            DeclaredRatio::Irrational => return Err(Error::Precondition("rational ratio required".into())),
        };
        let base = self.base.clone().ok_or_else(|| Error::Precondition("empty base interval".into()))?;
        let mut j = base;
        let mut total_j = Scalar::zero();
        for _ in 0..n0 + m0 {
            total_j = total_j + j.length();
            j = self.t_map_interval(&j)?;
        }
        let mut i = self.gap.clone();
        let mut total_i = Scalar::zero();
        for k in 0..n0 + m0 - 1 {
            total_i = total_i + i.length();
            if k + 1 < n0 + m0 - 1 {
                i = self.s_map_interval(&i)?;
            }
        }
        Ok((total_j, total_i))
    }
}

pub fn analyze(pair: &CantorPair, ratio: DeclaredRatio) -> Result<FullIntervalAnalysis> {
    let (ca, cb) = pair.middles()?;
    let (alpha, beta) = (ca.alpha().clone(), cb.alpha().clone());
    let (p, q) = (pair.p().clone(), pair.q().clone());
    if pair.thickness_product()? >= Scalar::one() {
        return Err(Error::Precondition("thickness product is at least 1; use the thickness route".into()));
    }
    let one = Scalar::one();
    let two = Scalar::from_int(2);
    let s0 = &q / &(&q - &two);
    let s1 = &(&p - &two) / &p;
    let gap = Interval::new(&q / &(&p * &(&q - &two)), &(&q * &(&p - &two)) / &p)?;
    let (base, invariant) = match &ratio {
        DeclaredRatio::Irrational => (None, IntervalSet::empty()),
        DeclaredRatio::Rational { n0, m0, gamma } => {
            if gamma <= &one {
                return Err(Error::InvalidParameter("γ must exceed 1".into()));
            }
            if gamma.pow(*n0 as i64)? != p || gamma.pow(*m0 as i64)? != q {
                return Err(Error::Precondition(format!("{gamma} does not satisfy p = γ^{n0}, q = γ^{m0}")));
            }
            let lo = (&one - &(&two * &alpha)) / (gamma * &beta);
            let hi = &alpha / &(&one - &(&two * &beta));
            if lo > hi {
                (None, IntervalSet::empty())
            } else {
                let base = Interval::new(lo, hi)?;
                let parts: Result<Vec<Interval>> = (-(*m0 as i64) + 1..=*n0 as i64)
                    .map(|n| Ok(base.affine_image(&gamma.pow(n)?, &Scalar::zero())))
                    .collect();
                (Some(base), IntervalSet::from_intervals(parts?))
            }
        }
    };
    Ok(FullIntervalAnalysis { p, q, s0, s1, gap, base, ratio, invariant })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum FullCertificate {
    /// `τ·τ′ ≥ 1`: full exactly on `[s₁, s₀]`.
    Thickness { s1: Scalar, s0: Scalar },
    /// `λ` lies in the component `γⁿ·J` of the invariant set.
    InvariantComponent { n: i64 },
    /// `λ` misses the nonempty invariant set.
    OutsideInvariant,
    /// `J` is empty, so no slope gives the full interval.
    EmptyInvariant,
    /// Irrational log ratio.
    Irrational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullVerdict {
    pub full: bool,
    /// `|λ|` actually decided (negative slopes turn into sums).
    pub decided_lambda: Scalar,
    pub certificate: FullCertificate,
}

/// Decides whether `C_α − λC_β` is the whole interval between `−λ` and `1`.
/// Pass `None` to infer the ratio from the expansions.
pub fn is_full(pair: &CantorPair, lambda: &Scalar, ratio: Option<DeclaredRatio>) -> Result<FullVerdict> {
    if lambda.is_zero() {
        return Err(Error::InvalidParameter("lambda must be nonzero".into()));
    }
    pair.middles()?;
    // C_α + |λ|C_β = (C_α − |λ|C_β) + |λ| by symmetry of C_β
    let lam = lambda.abs();
    if pair.thickness_product()? >= Scalar::one() {
        let (s1, s0) = crate::renorm::thickness_window(pair)?;
        let full = full_interval_via_thickness(pair, &lam)?;
        return Ok(FullVerdict { full, decided_lambda: lam, certificate: FullCertificate::Thickness { s1, s0 } });
    }
    let ratio = match ratio {
        Some(r) => r,
        None => DeclaredRatio::infer(pair)?,
    };
    let analysis = analyze(pair, ratio)?;
    let certificate = match (&analysis.ratio, &analysis.base) {
        (DeclaredRatio::Irrational, _) => FullCertificate::Irrational,
        (_, None) => FullCertificate::EmptyInvariant,
        (DeclaredRatio::Rational { n0, m0, gamma }, Some(base)) => {
            let mut hit = None;
            for n in -(*m0 as i64) + 1..=*n0 as i64 {
                if base.affine_image(&gamma.pow(n)?, &Scalar::zero()).contains(&lam) {
                    hit = Some(n);
                    break;
                }
            }
            match hit {
                Some(n) => FullCertificate::InvariantComponent { n },
                None => FullCertificate::OutsideInvariant,
            }
        }
    };
    let full = matches!(certificate, FullCertificate::InvariantComponent { .. });
    Ok(FullVerdict { full, decided_lambda: lam, certificate })
}

/// `C_α + C_β = [0, 2]` via the exponent window
/// `[log_γ((1−2β)/α), 1 − log_γ((1−2α)/β)] ∩ {−m₀+1, …, n₀} ≠ ∅`.
pub fn sum_full(pair: &CantorPair, ratio: Option<DeclaredRatio>) -> Result<bool> {
    let (ca, cb) = pair.middles()?;
    if pair.thickness_product()? >= Scalar::one() {
        return Err(Error::Precondition("thickness product is at least 1".into()));
    }
    let ratio = match ratio {
        Some(r) => r,
        None => DeclaredRatio::infer(pair)?,
    };
    let (n0, m0, gamma) = match ratio {
        DeclaredRatio::Irrational => return Ok(false),
        DeclaredRatio::Rational { n0, m0, gamma } => (n0 as i64, m0 as i64, gamma),
    };
    let one = Scalar::one();
    let two = Scalar::from_int(2);
    let (a, b) = (ca.alpha(), cb.alpha());
    let lower = (&one - &(&two * b)) / a.clone();
    let upper_arg = (&one - &(&two * a)) / b.clone();
    for n in -m0 + 1..=n0 {
        // n ≥ log_γ(lower) and n ≤ 1 − log_γ(upper_arg)
        if gamma.pow(n)? >= lower && gamma.pow(1 - n)? >= upper_arg {
            return Ok(true);
        }
    }
    Ok(false)
}
