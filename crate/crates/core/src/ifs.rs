//! Contraction systems on the line whose attractor is `K − λK′`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::{CantorPair, CantorSet, HomogeneousCantor, LogRatio};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::lattice::LatticeIfs;
use crate::scalar::Scalar;
use crate::verdict::Membership;

/// `t ↦ ratio·t + offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineMap {
    pub ratio: Scalar,
    pub offset: Scalar,
}

impl LineMap {
    pub fn apply(&self, t: &Scalar) -> Scalar {
        &self.ratio * t + &self.offset
    }

    pub fn image(&self, iv: &Interval) -> Interval {
        iv.affine_image(&self.ratio, &self.offset)
    }

    /// Expanding inverse `t ↦ (t − offset)/ratio`.
    pub fn invert(&self, t: &Scalar) -> Scalar {
        (t - &self.offset) / &self.ratio
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub lambda: Scalar,
    pub n0: u32,
    pub m0: u32,
}

/// Equal-ratio contractions, deduplicated and sorted by offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineIfs {
    ratio: Scalar,
    offsets: Vec<Scalar>,
    hull: Interval,
    provenance: Option<Provenance>,
}

impl LineIfs {
    pub fn new(ratio: Scalar, offsets: Vec<Scalar>, hull: Interval) -> Result<Self> {
        if !ratio.is_positive() || ratio >= Scalar::one() {
            return Err(Error::InvalidParameter(format!("ratio {ratio} not in (0, 1)")));
        }
        if offsets.is_empty() {
            return Err(Error::InvalidParameter("no maps".into()));
        }
        let mut offsets = offsets;
        offsets.sort();
        offsets.dedup();
        let ifs = LineIfs { ratio, offsets, hull, provenance: None };
        for m in ifs.maps() {
            if !ifs.hull.contains_interval(&m.image(&ifs.hull)) {
                return Err(Error::Invariant(format!(
                    "map with offset {} leaves the hull {}",
                    m.offset, ifs.hull
                )));
            }
        }
        Ok(ifs)
    }

    pub fn ratio(&self) -> &Scalar {
        &self.ratio
    }

    pub fn expansion(&self) -> Scalar {
        self.ratio.recip().expect("ratio is nonzero")
    }

    pub fn offsets(&self) -> &[Scalar] {
        &self.offsets
    }

    pub fn hull(&self) -> &Interval {
        &self.hull
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn maps(&self) -> Vec<LineMap> {
        self.offsets
            .iter()
            .map(|b| LineMap { ratio: self.ratio.clone(), offset: b.clone() })
            .collect()
    }

    /// Translations `a` of the expanding inverses `t ↦ t/ratio + a`.
    pub fn expanding_offsets(&self) -> Vec<Scalar> {
        let e = self.expansion();
        self.offsets.iter().map(|b| -(&e * b)).collect()
    }

    /// Conjugate by `x ↦ x + shift`: same attractor, translated.
    pub fn translate(&self, shift: &Scalar) -> LineIfs {
        let k = shift * (Scalar::one() - &self.ratio);
        LineIfs {
            ratio: self.ratio.clone(),
            offsets: self.offsets.iter().map(|b| b + &k).collect(),
            hull: self.hull.translate(shift),
            provenance: None,
        }
    }

    /// Conjugate by `x ↦ factor·x` (factor may be negative).
    pub fn rescale(&self, factor: &Scalar) -> Result<LineIfs> {
        if factor.is_zero() {
            return Err(Error::InvalidParameter("zero scale factor".into()));
        }
        let zero = Scalar::zero();
        LineIfs::new(
            self.ratio.clone(),
            self.offsets.iter().map(|b| factor * b).collect(),
            self.hull.affine_image(factor, &zero),
        )
    }

    /// `∪ S_i(set)`.
    pub fn apply_to(&self, set: &IntervalSet) -> IntervalSet {
        let parts: Vec<Interval> = self
            .offsets
            .iter()
            .flat_map(|b| set.intervals().iter().map(move |iv| iv.affine_image(&self.ratio, b)))
            .collect();
        IntervalSet::from_intervals(parts)
    }

    /// Union of all depth-`n` images of the hull, by iterating `U ↦ ∪ S_i(U)`.
    pub fn depth_union(&self, n: usize, component_budget: usize) -> Result<IntervalSet> {
        let hull = IntervalSet::single(self.hull.clone());
        let mut u = hull.clone();
        for _ in 0..n {
            if u.len() * self.len() > component_budget {
                return Err(Error::Budget { what: "interval component", limit: component_budget });
            }
            let next = self.apply_to(&u);
            if next == u {
                break;
            }
            u = next;
        }
        Ok(u)
    }

    /// Number of distinct depth-`k` maps for `k = 1..=depth`; `None` past `cap`.
    pub fn class_counts(&self, depth: usize, cap: usize) -> Vec<Option<u64>> {
        match LatticeIfs::from_ifs(self) {
            Some(lat) => lat.class_counts(depth, cap),
            None => self.exact_class_counts(depth, cap),
        }
    }

    /// Same counts by composing offsets as exact scalars.
    pub fn exact_class_counts(&self, depth: usize, cap: usize) -> Vec<Option<u64>> {
        let mut out = Vec::with_capacity(depth);
        let mut level: Vec<Scalar> = vec![Scalar::zero()];
        let mut scale = Scalar::one();
        for _ in 0..depth {
            let steps: Vec<Scalar> = self.offsets.iter().map(|b| &scale * b).collect();
            let next: HashSet<Scalar> = level
                .par_iter()
                .flat_map_iter(|o| steps.iter().map(move |s| o + s))
                .collect();
            if next.len() > cap {
                break;
            }
            out.push(Some(next.len() as u64));
            level = next.into_iter().collect();
            scale = &scale * &self.ratio;
        }
        out.resize(depth, None);
        out
    }

    pub fn coverage(&self, depth: usize, opts: &CoverageOptions) -> Result<CoverageReport> {
        if depth == 0 {
            return Err(Error::Precondition("depth must be at least 1".into()));
        }
        let union = self.depth_union(depth, opts.component_budget)?;
        let gaps = union.gaps_within(&self.hull);
        let class_count = if opts.class_budget > 0 {
            self.class_counts(depth, opts.class_budget).pop().flatten()
        } else {
            None
        };
        Ok(CoverageReport { depth, covered: gaps.is_empty(), gaps, union, class_count })
    }

    /// Depth-first search of backward orbits `t ↦ S_i^{-1}(t)` inside the hull.
    pub fn attractor_membership(&self, t: &Scalar, budget: usize) -> Membership {
        if !self.hull.contains(t) {
            return Membership::Out { depth: 0 };
        }
        let maps = self.maps();
        let images: Vec<Interval> = maps.iter().map(|m| m.image(&self.hull)).collect();
        let children = |x: &Scalar| -> Vec<(usize, Scalar)> {
            let mut seen = HashSet::new();
            images
                .iter()
                .enumerate()
                .filter(|(_, im)| im.contains(x))
                .map(|(i, _)| (i, maps[i].invert(x)))
                .filter(|(_, y)| seen.insert(y.clone()))
                .collect()
        };

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done(usize),
        }
        let mut index: HashMap<Scalar, usize> = HashMap::new();
        let mut marks: Vec<Mark> = Vec::new();
        // stack frames: (node, its children, next child position, label used to reach it)
        let mut stack: Vec<(usize, Vec<(usize, Scalar)>, usize, Option<usize>)> = Vec::new();
        index.insert(t.clone(), 0);
        marks.push(Mark::Open);
        stack.push((0, children(t), 0, None));
        while let Some(frame) = stack.last_mut() {
            if frame.2 < frame.1.len() {
                let (label, y) = frame.1[frame.2].clone();
                frame.2 += 1;
                match index.get(&y) {
                    Some(&id) => match marks[id] {
                        Mark::Open => {
                            let mut word: Vec<String> =
                                stack.iter().filter_map(|f| f.3).map(|l| format!("S{}", l + 1)).collect();
                            word.push(format!("S{}", label + 1));
                            let cycle_start = stack.iter().position(|f| f.0 == id).unwrap();
                            return Membership::In { word, cycle_start };
                        }
                        Mark::Done(_) => {}
                    },
                    None => {
                        if marks.len() >= budget {
                            return Membership::Unknown { explored: marks.len() };
                        }
                        let id = marks.len();
                        index.insert(y.clone(), id);
                        marks.push(Mark::Open);
                        let kids = children(&y);
                        stack.push((id, kids, 0, Some(label)));
                    }
                }
            } else {
                let (node, kids, _, _) = stack.pop().unwrap();
                let height = 1 + kids
                    .iter()
                    .map(|(_, y)| match marks[index[y]] {
                        Mark::Done(h) => h,
                        Mark::Open => 0,
                    })
                    .max()
                    .unwrap_or(0);
                marks[node] = Mark::Done(height);
            }
        }
        match marks[0] {
            Mark::Done(h) => Membership::Out { depth: h },
            Mark::Open => unreachable!(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoverageOptions {
    pub component_budget: usize,
    /// Distinct classes counted for the report; 0 disables counting.
    pub class_budget: usize,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        CoverageOptions { component_budget: 200_000, class_budget: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub depth: usize,
    pub covered: bool,
    /// Uncovered open intervals of the hull, stored by their closures.
    pub gaps: IntervalSet,
    pub union: IntervalSet,
    /// Distinct depth-n maps, when within the class budget.
    pub class_count: Option<u64>,
}

/// Hull of `K − λK′` from the hull corners.
pub fn difference_hull(k: &HomogeneousCantor, k2: &HomogeneousCantor, lambda: &Scalar) -> Interval {
    let xs = [k.hull().lo(), k.hull().hi()];
    let ys = [k2.hull().lo(), k2.hull().hi()];
    let vals: Vec<Scalar> = xs
        .iter()
        .flat_map(|x| ys.iter().map(move |y| *x - &(lambda * *y)))
        .collect();
    let lo = vals.iter().min().unwrap().clone();
    let hi = vals.iter().max().unwrap().clone();
    Interval::new(lo, hi).expect("ordered")
}

/// System whose attractor is `K − λK′`, built from the projected depth-(m₀, n₀) squares.
pub fn generate_ifs(pair: &CantorPair, lambda: &Scalar) -> Result<LineIfs> {
    if lambda.is_zero() {
        return Err(Error::Precondition("lambda must be nonzero".into()));
    }
    let (n0, m0) = match pair.log_ratio() {
        LogRatio::Rational { n0, m0 } => (n0, m0),
        LogRatio::Unknown => {
            return Err(Error::Precondition(
                "no rational relation between the expansions was found".into(),
            ))
        }
    };
    let k = pair.first().homogeneous();
    let k2 = pair.second().homogeneous();
    let cs = k.level_translations(m0)?;
    let ds = k2.level_translations(n0)?;
    let ratio = k.expansion().pow(-(m0 as i64))?;
    let scaled: Vec<Scalar> = ds.iter().map(|d| lambda * d).collect();
    let offsets: Vec<Scalar> = cs
        .iter()
        .flat_map(|c| scaled.iter().map(move |d| c - d))
        .collect();
    let mut ifs = LineIfs::new(ratio, offsets, difference_hull(k, k2, lambda))?;
    ifs.provenance = Some(Provenance { lambda: lambda.clone(), n0, m0 });
    Ok(ifs)
}

pub fn generate_ifs_homogeneous(
    k: &HomogeneousCantor,
    k2: &HomogeneousCantor,
    lambda: &Scalar,
) -> Result<LineIfs> {
    let pair = CantorPair::new(
        CantorSet::Homogeneous(k.clone()),
        CantorSet::Homogeneous(k2.clone()),
    )?;
    generate_ifs(&pair, lambda)
}

/// Systems for `λ` and `p^i λ / q^j`.
pub fn scaled_lambda_pair(pair: &CantorPair, lambda: &Scalar, i: i64, j: i64) -> Result<(LineIfs, LineIfs)> {
    let factor = pair.p().pow(i)? / pair.q().pow(j)?;
    Ok((generate_ifs(pair, lambda)?, generate_ifs(pair, &(lambda * &factor))?))
}

/// `K + λK′ = (K − λK′) + λ` for a symmetric middle second factor.
pub fn sum_as_difference(pair: &CantorPair, lambda: &Scalar) -> Result<LineIfs> {
    if pair.second().middle().is_none() {
        return Err(Error::Precondition("second factor must be a middle Cantor set".into()));
    }
    Ok(generate_ifs(pair, lambda)?.translate(lambda))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MeasureZeroVerdict {
    MeasureZero { classes: usize },
    Inconclusive { classes: usize },
}

#[derive(Clone, Debug)]
pub struct MeasureZeroReport {
    pub lambda: Scalar,
    pub raw_maps: usize,
    pub verdict: MeasureZeroVerdict,
    /// `(3/4)·2^{m₀+n₀} < p^{m₀}`, the closed-form sufficient condition.
    pub count_condition: bool,
    /// `Π(1, 1 − 1/q) = Π(1/p, 0)` at the critical λ.
    pub aligned: bool,
}

/// Counts depth-1 classes at `λ = q(p−1)/(p(q−1))` against `p^{m₀}`.
pub fn measure_zero_by_count(pair: &CantorPair) -> Result<MeasureZeroReport> {
    pair.middles()?;
    let (p, q) = (pair.p(), pair.q());
    let one = Scalar::one();
    let lambda = (q * &(p - &one)) / (p * &(q - &one));
    let ifs = generate_ifs(pair, &lambda)?;
    let prov = ifs.provenance().unwrap().clone();
    let classes = ifs.len();
    let bound = p.pow(prov.m0 as i64)?;
    let verdict = if Scalar::from_int(classes as i64) < bound {
        MeasureZeroVerdict::MeasureZero { classes }
    } else {
        MeasureZeroVerdict::Inconclusive { classes }
    };
    let raw = 1usize << (prov.m0 + prov.n0);
    let count_condition = Scalar::ratio(3 * raw as i64, 4) < bound;
    let project = |x: &Scalar, y: &Scalar| x - &(&lambda * y);
    let aligned = project(&one, &(&one - &q.recip()?)) == project(&p.recip()?, &Scalar::zero());
    Ok(MeasureZeroReport { lambda, raw_maps: raw, verdict, count_condition, aligned })
}
