//! Middle and homogeneous affine Cantor sets and pairs of them.

use std::cmp::Ordering;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::scalar::{ln_enclosure, rat, Enclosure, FieldSpec, Rational, Scalar};

/// Intervals produced by `level_intervals` before giving up.
pub const LEVEL_BUDGET: usize = 1 << 20;

/// Self-similar set whose expanding branches are `x ↦ p·x + e_i` on
/// `I_i = [(A − e_i)/p, (B − e_i)/p]` inside the hull `[A, B]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousCantor {
    expansion: Scalar,
    offsets: Vec<Scalar>,
    hull: Interval,
}

impl HomogeneousCantor {
    pub fn new(expansion: Scalar, offsets: Vec<Scalar>, hull: Interval) -> Result<Self> {
        if expansion <= Scalar::one() {
            return Err(Error::InvalidParameter("expansion must exceed 1".into()));
        }
        if offsets.len() < 2 {
            return Err(Error::InvalidParameter("need at least two branches".into()));
        }
        let mut set = HomogeneousCantor { expansion, offsets, hull };
        // order branches left to right
        set.offsets.sort_by(|a, b| b.cmp(a));
        let branches = set.branch_intervals();
        for w in branches.windows(2) {
            if w[0].hi() >= w[1].lo() {
                return Err(Error::InvalidParameter("branch intervals overlap".into()));
            }
        }
        if branches[0].lo() != set.hull.lo() || branches.last().unwrap().hi() != set.hull.hi() {
            return Err(Error::InvalidParameter(
                "hull endpoints must be fixed by the outer branches".into(),
            ));
        }
        Ok(set)
    }

    pub fn expansion(&self) -> &Scalar {
        &self.expansion
    }

    /// Branch translations `e_i`, ordered left to right.
    pub fn offsets(&self) -> &[Scalar] {
        &self.offsets
    }

    pub fn hull(&self) -> &Interval {
        &self.hull
    }

    pub fn branch_count(&self) -> usize {
        self.offsets.len()
    }

    pub fn branch_intervals(&self) -> Vec<Interval> {
        self.offsets
            .iter()
            .map(|e| {
                Interval::spanning(
                    (self.hull.lo() - e) / &self.expansion,
                    (self.hull.hi() - e) / &self.expansion,
                )
            })
            .collect()
    }

    /// Translations `c_w` of the depth-`m` inverse branches `x ↦ x/p^m + c_w`,
    /// in left-to-right order.
    pub fn level_translations(&self, m: u32) -> Result<Vec<Scalar>> {
        let count = (self.offsets.len() as f64).powi(m as i32);
        if count > LEVEL_BUDGET as f64 {
            return Err(Error::Budget { what: "level interval", limit: LEVEL_BUDGET });
        }
        let mut out = vec![Scalar::zero()];
        let mut scale = Scalar::one();
        for _ in 0..m {
            scale = &scale / &self.expansion;
            let shifts: Vec<Scalar> = self.offsets.iter().map(|e| e * &scale).collect();
            out = out.iter().flat_map(|c| shifts.iter().map(move |s| c - s)).collect();
        }
        Ok(out)
    }

    pub fn level_intervals(&self, m: u32) -> Result<IntervalSet> {
        let shrink = self.expansion.pow(-(m as i64))?;
        let lo = self.hull.lo() * &shrink;
        let hi = self.hull.hi() * &shrink;
        let parts = self
            .level_translations(m)?
            .into_iter()
            .map(|c| Interval::spanning(&lo + &c, &hi + &c));
        Ok(IntervalSet::from_intervals(parts))
    }

    /// Newhouse thickness; defined here for two branches (bridge over gap).
    pub fn thickness(&self) -> Result<Scalar> {
        if self.offsets.len() != 2 {
            return Err(Error::Precondition("thickness implemented for two branches".into()));
        }
        let b = self.branch_intervals();
        let gap = b[1].lo() - b[0].hi();
        Ok(b[0].length().min_of(&b[1].length()) / gap)
    }

    /// `ln(branch count) / ln p`.
    pub fn hausdorff_dim(&self, bits: u32) -> Enclosure {
        let k = Rational::from_integer((self.offsets.len() as i64).into());
        log_ratio_enclosure(&k, &self.expansion, bits)
    }
}

/// `C_α`: two branches `[0, α]` and `[1 − α, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiddleCantor {
    alpha: Scalar,
    form: HomogeneousCantor,
}

impl MiddleCantor {
    pub fn new(alpha: Scalar) -> Result<Self> {
        if !alpha.is_positive() || alpha >= Scalar::ratio(1, 2) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} not in (0, 1/2)")));
        }
        let p = alpha.recip()?;
        let form = HomogeneousCantor {
            offsets: vec![Scalar::zero(), Scalar::one() - &p],
            expansion: p,
            hull: Interval::new(Scalar::zero(), Scalar::one())?,
        };
        Ok(MiddleCantor { alpha, form })
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn expansion(&self) -> &Scalar {
        &self.form.expansion
    }

    pub fn as_homogeneous(&self) -> &HomogeneousCantor {
        &self.form
    }

    pub fn thickness(&self) -> Scalar {
        &self.alpha / (Scalar::one() - Scalar::from_int(2) * &self.alpha)
    }

    pub fn hausdorff_dim(&self, bits: u32) -> Enclosure {
        self.form.hausdorff_dim(bits)
    }

    pub fn level_intervals(&self, n: u32) -> Result<IntervalSet> {
        self.form.level_intervals(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CantorSet {
    Middle(MiddleCantor),
    Homogeneous(HomogeneousCantor),
}

impl CantorSet {
    pub fn homogeneous(&self) -> &HomogeneousCantor {
        match self {
            CantorSet::Middle(m) => m.as_homogeneous(),
            CantorSet::Homogeneous(h) => h,
        }
    }

    pub fn middle(&self) -> Option<&MiddleCantor> {
        match self {
            CantorSet::Middle(m) => Some(m),
            CantorSet::Homogeneous(_) => None,
        }
    }

    pub fn expansion(&self) -> &Scalar {
        self.homogeneous().expansion()
    }

    pub fn hull(&self) -> &Interval {
        self.homogeneous().hull()
    }

    pub fn thickness(&self) -> Result<Scalar> {
        match self {
            CantorSet::Middle(m) => Ok(m.thickness()),
            CantorSet::Homogeneous(h) => h.thickness(),
        }
    }

    fn scalars(&self) -> Vec<&Scalar> {
        let h = self.homogeneous();
        let mut v = vec![h.expansion(), h.hull().lo(), h.hull().hi()];
        v.extend(h.offsets());
        v
    }
}

/// `(n₀, m₀)` with `p^{m₀} = q^{n₀}`, or no relation found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LogRatio {
    Rational { n0: u32, m0: u32 },
    Unknown,
}

pub const LOG_RATIO_SEARCH: u32 = 64;

/// Searches for coprime `(n₀, m₀)` with `p^{m₀} = q^{n₀}` exactly, `m₀ ≤ limit`.
pub fn log_ratio(p: &Scalar, q: &Scalar, limit: u32) -> LogRatio {
    let ratio = p.to_f64().ln() / q.to_f64().ln();
    for m0 in 1..=limit {
        let est = (ratio * m0 as f64).round() as i64;
        for n0 in (est - 1).max(1)..=(est + 1) {
            let n0 = n0 as u32;
            if n0.gcd(&m0) != 1 {
                continue;
            }
            if let (Ok(a), Ok(b)) = (p.pow(m0 as i64), q.pow(n0 as i64)) {
                if a == b {
                    return LogRatio::Rational { n0, m0 };
                }
            }
        }
    }
    LogRatio::Unknown
}

/// Enclosure of `ln k / ln x` for rational `k > 0` and scalar `x > 1`.
fn log_ratio_enclosure(k: &Rational, x: &Scalar, bits: u32) -> Enclosure {
    let num = ln_enclosure(k, bits);
    let den = ln_of_scalar(x, bits);
    num.div(&den).expect("logarithm of expansion is positive")
}

/// Enclosure of `ln x` for a positive scalar.
pub fn ln_of_scalar(x: &Scalar, bits: u32) -> Enclosure {
    let e = x.enclosure(bits + 8);
    let lo = ln_enclosure(e.lo(), bits);
    let hi = ln_enclosure(e.hi(), bits);
    Enclosure::new(lo.lo().clone(), hi.hi().clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorPair {
    first: CantorSet,
    second: CantorSet,
    field: Option<Arc<FieldSpec>>,
}

impl CantorPair {
    pub fn new(first: CantorSet, second: CantorSet) -> Result<Self> {
        let mut field: Option<Arc<FieldSpec>> = None;
        for s in first.scalars().into_iter().chain(second.scalars()) {
            if let Some(f) = s.field() {
                match &field {
                    Some(g) if g != f => {
                        return Err(Error::MixedFields(g.to_string(), f.to_string()))
                    }
                    _ => field = Some(f.clone()),
                }
            }
        }
        Ok(CantorPair { first, second, field })
    }

    pub fn middle(alpha: Scalar, beta: Scalar) -> Result<Self> {
        CantorPair::new(
            CantorSet::Middle(MiddleCantor::new(alpha)?),
            CantorSet::Middle(MiddleCantor::new(beta)?),
        )
    }

    /// `α = 1/g³`, `β = 1/g²` with `g` the golden ratio.
    pub fn golden() -> Self {
        let f = FieldSpec::golden();
        let g = Scalar::generator(&f);
        CantorPair::middle(g.pow(-3).unwrap(), g.pow(-2).unwrap()).unwrap()
    }

    pub fn middle_rational(alpha: (i64, i64), beta: (i64, i64)) -> Self {
        CantorPair::middle(Scalar::ratio(alpha.0, alpha.1), Scalar::ratio(beta.0, beta.1))
            .unwrap()
    }

    pub fn first(&self) -> &CantorSet {
        &self.first
    }

    pub fn second(&self) -> &CantorSet {
        &self.second
    }

    pub fn field(&self) -> Option<&Arc<FieldSpec>> {
        self.field.as_ref()
    }

    pub fn swapped(&self) -> CantorPair {
        CantorPair { first: self.second.clone(), second: self.first.clone(), field: self.field.clone() }
    }

    /// Both members as middle sets, or a precondition error.
    pub fn middles(&self) -> Result<(&MiddleCantor, &MiddleCantor)> {
        match (self.first.middle(), self.second.middle()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Precondition("both members must be middle Cantor sets".into())),
        }
    }

    pub fn p(&self) -> &Scalar {
        self.first.expansion()
    }

    pub fn q(&self) -> &Scalar {
        self.second.expansion()
    }

    pub fn thickness_product(&self) -> Result<Scalar> {
        Ok(self.first.thickness()? * self.second.thickness()?)
    }

    pub fn log_ratio(&self) -> LogRatio {
        log_ratio(self.p(), self.q(), LOG_RATIO_SEARCH)
    }

    pub fn hd_sum(&self, bits: u32) -> Enclosure {
        self.first.homogeneous().hausdorff_dim(bits).add(&self.second.homogeneous().hausdorff_dim(bits))
    }

    /// Dimension sum above 1 and thickness product below 1, both strict.
    pub fn in_omega(&self) -> Result<bool> {
        self.middles()?;
        if self.thickness_product()? >= Scalar::one() {
            return Ok(false);
        }
        Ok(self.hd_sum_vs_one()? == Ordering::Greater)
    }

    /// Compares the dimension sum with 1, exactly when the log ratio is rational.
    pub fn hd_sum_vs_one(&self) -> Result<Ordering> {
        let (a, _) = self.middles()?;
        if let LogRatio::Rational { n0, m0 } = self.log_ratio() {
            // p = γ^{n0}, q = γ^{m0}: sum = ln2·(n0+m0)/(n0·m0·lnγ), compare 2^{n0+m0} with p^{m0}
            let two_pow = Scalar::from_int(2).pow((n0 + m0) as i64)?;
            return Ok(two_pow.cmp(&a.expansion().pow(m0 as i64)?));
        }
        let mut bits = 64;
        while bits <= 512 {
            let s = self.hd_sum(bits).sub(&Enclosure::point(rat(1, 1)));
            if let Some(sign) = s.sign() {
                if sign != Ordering::Equal {
                    return Ok(sign);
                }
            }
            bits *= 2;
        }
        Err(Error::Undecided("dimension sum too close to 1 at 512 bits".into()))
    }
}

/// Text form of a middle pair: `field` (optional), `alpha`, `beta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub alpha: String,
    pub beta: String,
}

impl PairConfig {
    pub fn field_spec(&self) -> Result<Option<Arc<FieldSpec>>> {
        self.field.as_deref().map(FieldSpec::parse).transpose()
    }

    pub fn to_pair(&self) -> Result<CantorPair> {
        let f = self.field_spec()?;
        let alpha = Scalar::parse(&self.alpha, f.as_ref())?;
        let beta = Scalar::parse(&self.beta, f.as_ref())?;
        CantorPair::middle(alpha, beta)
    }

    pub fn golden() -> Self {
        PairConfig { field: Some("g^2=g+1".into()), alpha: "1/g^3".into(), beta: "1/g^2".into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::to_f64;
    use proptest::prelude::*;

    fn third() -> MiddleCantor {
        MiddleCantor::new(Scalar::ratio(1, 3)).unwrap()
    }

    #[test]
    fn thickness_values() {
        assert_eq!(third().thickness(), Scalar::one());
        assert_eq!(MiddleCantor::new(Scalar::ratio(1, 4)).unwrap().thickness(), Scalar::ratio(1, 2));
        let golden = CantorPair::golden();
        let f = golden.field().unwrap().clone();
        let expected = (Scalar::from_int(3) - Scalar::generator(&f)).recip().unwrap();
        assert_eq!(golden.thickness_product().unwrap(), expected);
        assert!((golden.thickness_product().unwrap().to_f64() - 0.7236).abs() < 1e-4);
    }

    #[test]
    fn dimensions() {
        let quarter = MiddleCantor::new(Scalar::ratio(1, 4)).unwrap().hausdorff_dim(64);
        assert!(quarter.contains(&rat(1, 2)));
        let t = third().hausdorff_dim(64);
        assert!((t.mid_f64() - 0.630_929_753_571_457).abs() < 1e-12);
        let sum = CantorPair::golden().hd_sum(64);
        assert!((sum.mid_f64() - 1.2003).abs() < 1e-4);
        assert!(to_f64(&sum.width()) < 1e-15);
    }

    #[test]
    fn level_intervals_examples() {
        let l0 = third().level_intervals(0).unwrap();
        assert_eq!(l0.intervals(), &[Interval::new(Scalar::zero(), Scalar::one()).unwrap()]);
        let l1 = third().level_intervals(1).unwrap();
        let lows: Vec<_> = l1.intervals().iter().map(|i| i.lo().clone()).collect();
        assert_eq!(lows, vec![Scalar::zero(), Scalar::ratio(2, 3)]);
        assert_eq!(l1.intervals()[0].hi(), &Scalar::ratio(1, 3));
        let q = MiddleCantor::new(Scalar::ratio(1, 4)).unwrap().level_intervals(2).unwrap();
        let lows: Vec<_> = q.intervals().iter().map(|i| i.lo().clone()).collect();
        let want: Vec<_> = [(0, 1), (3, 16), (3, 4), (15, 16)].iter().map(|&(a, b)| Scalar::ratio(a, b)).collect();
        assert_eq!(lows, want);
    }

    #[test]
    fn omega_membership() {
        assert!(CantorPair::golden().in_omega().unwrap());
        assert!(!CantorPair::middle_rational((1, 3), (1, 3)).in_omega().unwrap());
        assert!(!CantorPair::middle_rational((1, 4), (1, 4)).in_omega().unwrap());
        assert_eq!(
            CantorPair::middle_rational((1, 4), (1, 4)).hd_sum_vs_one().unwrap(),
            Ordering::Equal
        );
        // no exact log relation: decided by enclosures (ln2/ln(10/3) + ln2/ln 3 ≈ 1.2068)
        let p = CantorPair::middle_rational((3, 10), (1, 3));
        assert_eq!(p.log_ratio(), LogRatio::Unknown);
        assert_eq!(p.hd_sum_vs_one().unwrap(), Ordering::Greater);
    }

    #[test]
    fn log_ratios() {
        assert_eq!(CantorPair::golden().log_ratio(), LogRatio::Rational { n0: 3, m0: 2 });
        assert_eq!(CantorPair::middle_rational((1, 5), (1, 5)).log_ratio(), LogRatio::Rational { n0: 1, m0: 1 });
        assert_eq!(
            CantorPair::middle_rational((1, 8), (1, 64)).log_ratio(),
            LogRatio::Rational { n0: 1, m0: 2 }
        );
    }

    #[test]
    fn homogeneous_validation() {
        let hull = Interval::new(Scalar::zero(), Scalar::one()).unwrap();
        // three branches of ratio 1/9 at 0, 4/9, 8/9
        let k = HomogeneousCantor::new(
            Scalar::from_int(9),
            vec![Scalar::zero(), Scalar::from_int(-4), Scalar::from_int(-8)],
            hull.clone(),
        )
        .unwrap();
        assert_eq!(k.branch_count(), 3);
        assert!(HomogeneousCantor::new(Scalar::from_int(2), vec![Scalar::zero(), Scalar::from_int(-1)], hull.clone()).is_err());
        assert!(HomogeneousCantor::new(Scalar::from_int(3), vec![Scalar::zero(), Scalar::from_int(-1)], hull).is_err());
    }

    #[test]
    fn config_round_trip() {
        let cfg = PairConfig::golden();
        assert_eq!(cfg.to_pair().unwrap(), CantorPair::golden());
        assert!(MiddleCantor::new(Scalar::ratio(1, 2)).is_err());
    }

    proptest! {
        #[test]
        fn levels_refine(num in 1i64..49, n in 0u32..6) {
            let c = MiddleCantor::new(Scalar::ratio(num, 100)).unwrap();
            let coarse = c.level_intervals(n).unwrap();
            let fine = c.level_intervals(n + 1).unwrap();
            prop_assert!(fine.is_subset_of(&coarse));
            let two_alpha = Scalar::from_int(2) * c.alpha();
            prop_assert_eq!(fine.total_length(), two_alpha.pow(n as i64 + 1).unwrap());
            for iv in coarse.intervals() {
                let inside = fine.intervals().iter().filter(|f| iv.contains_interval(f)).count();
                prop_assert_eq!(inside, 2);
            }
        }

        #[test]
        fn thickness_product_criterion(a in 1i64..49, b in 1i64..49) {
            let pair = CantorPair::middle_rational((a, 100), (b, 100));
            let lhs = pair.thickness_product().unwrap() < Scalar::one();
            let p = pair.p() - Scalar::from_int(2);
            let q = pair.q() - Scalar::from_int(2);
            prop_assert_eq!(lhs, p * q > Scalar::one());
        }

        #[test]
        fn log_ratio_relation_holds(k in 2i64..6, i in 1u32..4, j in 1u32..4) {
            let p = Scalar::from_int(k).pow(i as i64).unwrap();
            let q = Scalar::from_int(k).pow(j as i64).unwrap();
            if let LogRatio::Rational { n0, m0 } = log_ratio(&p, &q, 16) {
                prop_assert_eq!(p.pow(m0 as i64).unwrap(), q.pow(n0 as i64).unwrap());
            } else {
                prop_assert!(false, "relation exists");
            }
        }
    }
}
