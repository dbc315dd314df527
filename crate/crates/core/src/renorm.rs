//! Affine operators on `ℝ* × ℝ` acting on relative configurations `(s, t)`,
//! where `t ∈ K − sK′` is decided by the boundedness of operator orbits.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::{CantorPair, CantorSet, HomogeneousCantor};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::verdict::Membership;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanePoint {
    s: Scalar,
    t: Scalar,
}

impl PlanePoint {
    pub fn new(s: Scalar, t: Scalar) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::InvalidParameter("s must be nonzero".into()));
        }
        Ok(PlanePoint { s, t })
    }

    pub fn s(&self) -> &Scalar {
        &self.s
    }

    pub fn t(&self) -> &Scalar {
        &self.t
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.s, self.t)
    }
}

/// `(s, t) ↦ (s_scale·s, t_scale·t + st_coeff·s + t_offset)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneOp {
    pub label: String,
    pub s_scale: Scalar,
    pub t_scale: Scalar,
    pub st_coeff: Scalar,
    pub t_offset: Scalar,
}

impl PlaneOp {
    /// Expansion of the first set on the branch `x ↦ p·x + e`.
    pub fn expanding(label: impl Into<String>, p: &Scalar, e: &Scalar) -> Self {
        PlaneOp {
            label: label.into(),
            s_scale: p.clone(),
            t_scale: p.clone(),
            st_coeff: Scalar::zero(),
            t_offset: e.clone(),
        }
    }

    /// Expansion of the second set on the branch `y ↦ q·y + f`.
    pub fn contracting(label: impl Into<String>, q: &Scalar, f: &Scalar) -> Self {
        PlaneOp {
            label: label.into(),
            s_scale: q.recip().expect("expansion is nonzero"),
            t_scale: Scalar::one(),
            st_coeff: -(f / q),
            t_offset: Scalar::zero(),
        }
    }

    pub fn apply(&self, x: &PlanePoint) -> PlanePoint {
        PlanePoint {
            s: &self.s_scale * &x.s,
            t: &self.t_scale * &x.t + &self.st_coeff * &x.s + &self.t_offset,
        }
    }
}

/// Operators of a pair: one per branch of each set.
#[derive(Clone, Debug)]
pub struct Operators {
    pub first: Vec<PlaneOp>,
    pub second: Vec<PlaneOp>,
}

impl Operators {
    pub fn all(&self) -> impl Iterator<Item = &PlaneOp> {
        self.first.iter().chain(self.second.iter())
    }

    pub fn by_label(&self, label: &str) -> Option<&PlaneOp> {
        self.all().find(|o| o.label == label)
    }

    /// Parses labels like `T0`, `T'1`.
    pub fn word(&self, labels: &[&str]) -> Result<Vec<PlaneOp>> {
        labels
            .iter()
            .map(|l| self.by_label(l).cloned().ok_or_else(|| Error::Parse(format!("unknown operator {l}"))))
            .collect()
    }
}

pub fn make_operators(pair: &CantorPair) -> Operators {
    let k = pair.first().homogeneous();
    let k2 = pair.second().homogeneous();
    Operators {
        first: k
            .offsets()
            .iter()
            .enumerate()
            .map(|(i, e)| PlaneOp::expanding(format!("T{i}"), k.expansion(), e))
            .collect(),
        second: k2
            .offsets()
            .iter()
            .enumerate()
            .map(|(j, f)| PlaneOp::contracting(format!("T'{j}"), k2.expansion(), f))
            .collect(),
    }
}

/// Applies the word left to right: the first operator acts first.
pub fn apply_word(ops: &[PlaneOp], x: &PlanePoint) -> PlanePoint {
    ops.iter().fold(x.clone(), |acc, op| op.apply(&acc))
}

/// Range of `x − s·y` over the hulls.
fn difference_range(pair: &CantorPair, s: &Scalar) -> (Scalar, Scalar) {
    let (kh, kh2) = (pair.first().hull(), pair.second().hull());
    let vals = [
        kh.lo() - &(s * kh2.lo()),
        kh.lo() - &(s * kh2.hi()),
        kh.hi() - &(s * kh2.lo()),
        kh.hi() - &(s * kh2.hi()),
    ];
    let lo = vals.iter().min().unwrap().clone();
    let hi = vals.iter().max().unwrap().clone();
    (lo, hi)
}

/// `t` lies outside the hull of `K − sK′`; no bounded orbit starts here.
pub fn escapes(pair: &CantorPair, x: &PlanePoint) -> bool {
    let (lo, hi) = difference_range(pair, &x.s);
    x.t < lo || x.t > hi
}

struct Node {
    point: PlanePoint,
    edges: Vec<(usize, usize)>,
    expanded: bool,
    recurrent: bool,
}

/// Orbit search for `t ∈ K − sK′`. The first set is expanded while `|s|`
/// does not exceed its starting size, the second otherwise, so `s` stays in
/// a fixed window. A reachable cycle (or a point of `region`) proves
/// membership; a closed acyclic graph proves non-membership.
pub fn membership(
    t: &Scalar,
    s: &Scalar,
    pair: &CantorPair,
    budget: usize,
    region: Option<&RecurrentRegion>,
) -> Result<Membership> {
    let start = PlanePoint::new(s.clone(), t.clone())?;
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    if escapes(pair, &start) {
        return Ok(Membership::Out { depth: 0 });
    }
    let ops = make_operators(pair);
    let window = s.abs();
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<PlanePoint, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let in_region = |p: &PlanePoint| region.is_some_and(|r| r.contains(p));
    index.insert(start.clone(), 0);
    nodes.push(Node { recurrent: in_region(&start), point: start, edges: Vec::new(), expanded: false });
    queue.push_back(0usize);
    let mut found_region = nodes[0].recurrent;
    while let Some(id) = queue.pop_front() {
        if found_region {
            break;
        }
        if nodes[id].recurrent {
            continue;
        }
        let family = if nodes[id].point.s.abs() > window { &ops.second } else { &ops.first };
        let mut edges = Vec::new();
        let mut budget_hit = false;
        for (k, op) in family.iter().enumerate() {
            let y = op.apply(&nodes[id].point);
            if escapes(pair, &y) {
                continue;
            }
            let child = match index.get(&y) {
                Some(&c) => c,
                None => {
                    if nodes.len() >= budget {
                        budget_hit = true;
                        break;
                    }
                    let c = nodes.len();
                    let rec = in_region(&y);
                    found_region |= rec;
                    index.insert(y.clone(), c);
                    nodes.push(Node { point: y, edges: Vec::new(), expanded: false, recurrent: rec });
                    queue.push_back(c);
                    c
                }
            };
            edges.push((k, child));
        }
        if budget_hit {
            break;
        }
        nodes[id].edges = edges;
        nodes[id].expanded = true;
    }
    let frontier = nodes.iter().any(|n| !n.expanded && !n.recurrent);

    // Strip nodes that cannot continue forever; what remains reaches a cycle
    // or a recurrent point.
    let n = nodes.len();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut outdeg = vec![0usize; n];
    for (i, node) in nodes.iter().enumerate() {
        if node.expanded {
            outdeg[i] = node.edges.len();
            for &(_, c) in &node.edges {
                parents[c].push(i);
            }
        }
    }
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&i| outdeg[i] == 0 && !nodes[i].recurrent).collect();
    let mut removal_order = Vec::new();
    while let Some(i) = stack.pop() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        removal_order.push(i);
        for &par in &parents[i] {
            outdeg[par] -= 1;
            if outdeg[par] == 0 && !nodes[par].recurrent && alive[par] {
                stack.push(par);
            }
        }
    }
    if alive[0] {
        let mut word = Vec::new();
        let mut pos: HashMap<usize, usize> = HashMap::new();
        let mut cur = 0usize;
        loop {
            if nodes[cur].recurrent {
                let len = word.len();
                return Ok(Membership::In { word, cycle_start: len });
            }
            if let Some(&p) = pos.get(&cur) {
                return Ok(Membership::In { word, cycle_start: p });
            }
            pos.insert(cur, word.len());
            let family = if nodes[cur].point.s.abs() > window { &ops.second } else { &ops.first };
            let &(k, next) = nodes[cur]
                .edges
                .iter()
                .find(|(_, c)| alive[*c])
                .expect("surviving node keeps a surviving child");
            word.push(family[k].label.clone());
            cur = next;
        }
    }
    if frontier {
        return Ok(Membership::Unknown { explored: n });
    }
    let mut depth = vec![0usize; n];
    for &i in &removal_order {
        depth[i] = 1 + nodes[i].edges.iter().map(|&(_, c)| depth[c]).max().unwrap_or(0);
    }
    Ok(Membership::Out { depth: depth[0] })
}

/// Data of a two-branch set translated so its hull is `[0, a]`:
/// branches `x ↦ p·x` and `x ↦ p·x + e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoBranch {
    pub p: Scalar,
    pub e: Scalar,
    pub a: Scalar,
}

impl TwoBranch {
    pub fn of(set: &CantorSet) -> Result<Self> {
        let h: &HomogeneousCantor = set.homogeneous();
        if h.branch_count() != 2 {
            return Err(Error::Precondition("a two-branch Cantor set is required".into()));
        }
        let shift = h.hull().lo();
        let p = h.expansion();
        // conjugating by x ↦ x − lo turns e into e + (p − 1)·lo
        let norm = |e: &Scalar| e + &((p - &Scalar::one()) * shift);
        let e = norm(&h.offsets()[1]);
        debug_assert!(norm(&h.offsets()[0]).is_zero());
        Ok(TwoBranch { p: p.clone(), e, a: h.hull().length() })
    }

    /// Gap between the branches divided by the branch length.
    pub fn thickness(&self) -> Scalar {
        let branch = &self.a / &self.p;
        let gap = -(&self.e / &self.p) - &branch;
        branch / gap
    }
}

/// Thickness window `[s₁, s₀]` of a two-branch pair.
pub fn thickness_window(pair: &CantorPair) -> Result<(Scalar, Scalar)> {
    let k = TwoBranch::of(pair.first())?;
    let k2 = TwoBranch::of(pair.second())?;
    let s1 = (-(&k.e / &k.p) - &(&k.a / &k.p)) / &k2.a;
    let s0 = &k.a / &(-(&k2.e / &k2.p) - &(&k2.a / &k2.p));
    Ok((s1, s0))
}

/// With `τ·τ′ ≥ 1` the difference is the whole hull exactly on `[s₁, s₀]`.
pub fn full_interval_via_thickness(pair: &CantorPair, lambda: &Scalar) -> Result<bool> {
    let k = TwoBranch::of(pair.first())?;
    let k2 = TwoBranch::of(pair.second())?;
    if &k.thickness() * &k2.thickness() < Scalar::one() {
        return Err(Error::Precondition("thickness product is below 1".into()));
    }
    let (s1, s0) = thickness_window(pair)?;
    Ok(&s1 <= lambda && lambda <= &s0)
}

/// `R = {−b·s + δ ≤ t ≤ a − δ, s_min ≤ s ≤ s_max}` with the three-zone split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrentRegion {
    pub s_min: Scalar,
    pub s_max: Scalar,
    /// Width of the second hull; the lower edge is `t = −b·s + δ`.
    pub b: Scalar,
    /// Width of the first hull; the upper edge is `t = a − δ`.
    pub a: Scalar,
    pub epsilon: Scalar,
    pub delta: Scalar,
    pub s0: Scalar,
    /// `s` above this is expanded with the second set.
    pub s_split: Scalar,
    /// Below this `t` the left branch of the first set is used.
    pub t_split: Scalar,
    /// Shift of the first hull (coordinates are relative to its left end).
    #[serde(skip)]
    shift_first: Scalar,
    #[serde(skip)]
    shift_second: Scalar,
}

impl RecurrentRegion {
    fn to_local(&self, x: &PlanePoint) -> (Scalar, Scalar) {
        // t = x − s·y with x = x̃ + A, y = ỹ + B gives t̃ = t − A + s·B
        (x.s.clone(), &x.t - &self.shift_first + &x.s * &self.shift_second)
    }

    fn local_lower(&self, s: &Scalar) -> Scalar {
        -(&self.b * s) + &self.delta
    }

    fn local_upper(&self) -> Scalar {
        &self.a - &self.delta
    }

    pub fn contains(&self, x: &PlanePoint) -> bool {
        let (s, t) = self.to_local(x);
        s >= self.s_min && s <= self.s_max && t >= self.local_lower(&s) && t <= self.local_upper()
    }

    pub fn interior_contains(&self, x: &PlanePoint) -> bool {
        let (s, t) = self.to_local(x);
        s > self.s_min && s < self.s_max && t > self.local_lower(&s) && t < self.local_upper()
    }

    /// Point at grid position `(i, j)` of an `n × n` grid over `R`.
    pub fn grid_point(&self, i: usize, j: usize, n: usize) -> PlanePoint {
        let denom = Scalar::from_int((n - 1).max(1) as i64);
        let fi = Scalar::from_int(i as i64) / &denom;
        let fj = Scalar::from_int(j as i64) / &denom;
        let s = &self.s_min + &(&fi * &(&self.s_max - &self.s_min));
        let lo = self.local_lower(&s);
        let t = &lo + &(&fj * &(self.local_upper() - &lo));
        PlanePoint { t: &t + &self.shift_first - &(&s * &self.shift_second), s }
    }
}

/// Left side of the recurrence inequality minus `1/(1 − ε)`; positive when it holds.
fn recurrence_margin(k: &TwoBranch, k2: &TwoBranch, eps: &Scalar, delta: &Scalar) -> Scalar {
    let left = (&k.a / &k.p) / (-(&k.e / &k.p) - &(&k.a / &k.p) + &(delta / &k.p));
    let right = (&k2.a / &k2.p) / (-(&k2.e / &k2.p) - &(&k2.a / &k2.p));
    &left * &right - (Scalar::one() - eps).recip().expect("ε < 1")
}

/// Builds `R` for a pair with `τ·τ′ > 1`, halving `ε` (with `δ = a·ε/2`)
/// until the recurrence inequality holds.
pub fn build_recurrent_set(pair: &CantorPair) -> Result<RecurrentRegion> {
    let k = TwoBranch::of(pair.first())?;
    let k2 = TwoBranch::of(pair.second())?;
    let product = &k.thickness() * &k2.thickness();
    if product <= Scalar::one() {
        return Err(Error::Precondition(format!("thickness product {product} is not above 1")));
    }
    let (q, f1, b) = (&k2.p, &k2.e, &k2.a);
    // s₀ = −q₀q₁a/(q₀f₁ + q₁b) with q₀ = q₁ = q
    let s0 = -(q * q * &k.a) / (q * f1 + q * b);
    let mut eps = Scalar::ratio(1, 4);
    for _ in 0..64 {
        let delta = &(&k.a * &eps) / &Scalar::from_int(2);
        if recurrence_margin(&k, &k2, &eps, &delta).is_positive() {
            let s_max = &(Scalar::one() - &eps) * &s0;
            let s_split = &s_max / &k.p;
            let s_min = &s_split / q;
            return Ok(RecurrentRegion {
                s_min,
                s_max,
                b: b.clone(),
                a: k.a.clone(),
                t_split: &k.a / &k.p,
                epsilon: eps,
                delta,
                s0,
                s_split,
                shift_first: pair.first().hull().lo().clone(),
                shift_second: pair.second().hull().lo().clone(),
            });
        }
        eps = &eps / &Scalar::from_int(2);
    }
    let delta = &(&k.a * &eps) / &Scalar::from_int(2);
    Err(Error::Undecided(format!(
        "recurrence inequality fails down to ε = {eps}: margin {}",
        recurrence_margin(&k, &k2, &eps, &delta)
    )))
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    pub points: usize,
    pub max_steps: usize,
    pub failures: usize,
    /// Up to ten failing grid points, rendered.
    pub failure_examples: Vec<String>,
}

pub const RECURRENCE_STEP_CAP: usize = 64;

/// Follows the three-zone rule from `x` until it enters `R°`; `None` on failure.
pub fn return_steps(region: &RecurrentRegion, pair: &CantorPair, x: &PlanePoint) -> Option<usize> {
    let ops = make_operators(pair);
    let mut cur = x.clone();
    for step in 1..=RECURRENCE_STEP_CAP {
        let (s, t) = region.to_local(&cur);
        let next = if s > region.s_split {
            let images: Vec<PlanePoint> = ops.second.iter().map(|op| op.apply(&cur)).collect();
            images
                .iter()
                .find(|y| region.interior_contains(y))
                .or_else(|| images.iter().find(|y| region.contains(y)))
                .or_else(|| images.iter().find(|y| !escapes(pair, y)))?
                .clone()
        } else if t < region.t_split {
            ops.first[0].apply(&cur)
        } else {
            ops.first[1].apply(&cur)
        };
        if escapes(pair, &next) {
            return None;
        }
        if region.interior_contains(&next) {
            return Some(step);
        }
        cur = next;
    }
    None
}

pub fn verify_recurrence(region: &RecurrentRegion, pair: &CantorPair, grid: usize) -> RecurrenceReport {
    let n = grid.max(2);
    let results: Vec<(PlanePoint, Option<usize>)> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let x = region.grid_point(k / n, k % n, n);
            let r = return_steps(region, pair, &x);
            (x, r)
        })
        .collect();
    let failures: Vec<&PlanePoint> = results.iter().filter(|(_, r)| r.is_none()).map(|(x, _)| x).collect();
    RecurrenceReport {
        points: results.len(),
        max_steps: results.iter().filter_map(|(_, r)| *r).max().unwrap_or(0),
        failures: failures.len(),
        failure_examples: failures.iter().take(10).map(|x| x.to_string()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::generate_ifs;
    use proptest::prelude::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn pt(a: Scalar, b: Scalar) -> PlanePoint {
        PlanePoint::new(a, b).unwrap()
    }

    #[test]
    fn middle_pair_operators() {
        let pair = CantorPair::middle_rational((1, 3), (1, 5));
        let ops = make_operators(&pair);
        let x = pt(s(2, 7), s(1, 11));
        let (p, q) = (Scalar::from_int(3), Scalar::from_int(5));
        assert_eq!(ops.first[0].apply(&x), pt(&p * x.s(), &p * x.t()));
        assert_eq!(ops.first[1].apply(&x), pt(&p * x.s(), &p * x.t() - &p + Scalar::one()));
        assert_eq!(ops.second[0].apply(&x), pt(x.s() / &q, x.t().clone()));
        assert_eq!(
            ops.second[1].apply(&x),
            pt(x.s() / &q, x.t() + &(&(&q - &Scalar::one()) / &q * x.s()))
        );
        let eq = CantorPair::middle_rational((1, 3), (1, 3));
        let ops = make_operators(&eq);
        let y = apply_word(&[ops.first[0].clone(), ops.second[0].clone()], &x);
        assert_eq!(y.s(), x.s());
        assert_eq!(apply_word(&[], &x), x);
    }

    #[test]
    fn golden_return_word() {
        let pair = CantorPair::golden();
        let f = pair.field().unwrap().clone();
        let ops = make_operators(&pair);
        let word = ops.word(&["T'0", "T'0", "T'0", "T1", "T0"]).unwrap();
        let lambda = Scalar::from_int(2) / Scalar::generator(&f);
        let y = apply_word(&word, &pt(lambda.clone(), s(1, 3)));
        assert_eq!(y.s(), &lambda);
    }

    fn closed_forms(p: i64, q: i64, a_digits: &[u8], b_digits: &[u8]) {
        let pair = CantorPair::middle_rational((1, p), (1, q));
        let ops = make_operators(&pair);
        let (ps, qs) = (Scalar::from_int(p), Scalar::from_int(q));
        let x = pt(s(3, 7), s(-2, 9));
        let m = a_digits.len() as i64;
        let word: Vec<PlaneOp> = a_digits.iter().map(|&d| ops.first[d as usize].clone()).collect();
        let y = apply_word(&word, &x);
        let sum = a_digits
            .iter()
            .enumerate()
            .fold(Scalar::zero(), |acc, (k, &d)| acc + Scalar::from_int(d as i64) * ps.pow(m - 1 - k as i64).unwrap());
        let pm = ps.pow(m).unwrap();
        assert_eq!(y, pt(&pm * x.s(), &pm * x.t() - &(&ps - &Scalar::one()) * &sum));
        let n = b_digits.len() as i64;
        let word: Vec<PlaneOp> = b_digits.iter().map(|&d| ops.second[d as usize].clone()).collect();
        let y = apply_word(&word, &x);
        let sum = b_digits
            .iter()
            .enumerate()
            .fold(Scalar::zero(), |acc, (k, &d)| acc + Scalar::from_int(d as i64) * qs.pow(n - 1 - k as i64).unwrap());
        let sn = x.s() / &qs.pow(n).unwrap();
        assert_eq!(y, pt(sn.clone(), x.t() + &(&sn * &(&qs - &Scalar::one()) * &sum)));
    }

    proptest! {
        #[test]
        fn words_match_closed_forms(
            p in 3i64..9, q in 3i64..9,
            a in proptest::collection::vec(0u8..2, 0..12),
            b in proptest::collection::vec(0u8..2, 0..12),
        ) {
            closed_forms(p, q, &a, &b);
        }

        #[test]
        fn s_depends_only_on_multiset(word in proptest::collection::vec(0usize..4, 0..10), seed in 0u64..1000) {
            let pair = CantorPair::middle_rational((1, 3), (2, 7));
            let ops = make_operators(&pair);
            let all: Vec<PlaneOp> = ops.all().cloned().collect();
            let w: Vec<PlaneOp> = word.iter().map(|&i| all[i].clone()).collect();
            let mut shuffled = w.clone();
            let len = shuffled.len().max(1);
            shuffled.rotate_left((seed as usize) % len);
            shuffled.reverse();
            let x = pt(s(5, 3), s(1, 2));
            prop_assert_eq!(apply_word(&w, &x).s().clone(), apply_word(&shuffled, &x).s().clone());
        }
    }

    #[test]
    fn membership_examples() {
        let third = CantorPair::middle_rational((1, 3), (1, 3));
        let four = Scalar::from_int(4);
        assert!(membership(&Scalar::from_int(-3), &four, &third, 10_000, None).unwrap().is_in());
        assert!(membership(&s(-3, 2), &four, &third, 10_000, None).unwrap().is_out());
        assert!(membership(&Scalar::zero(), &Scalar::one(), &third, 10_000, None).unwrap().is_in());
        assert_eq!(
            membership(&Scalar::from_int(5), &four, &third, 10, None).unwrap(),
            Membership::Out { depth: 0 }
        );
        assert!(membership(&Scalar::one(), &Scalar::zero(), &third, 10, None).is_err());
        let golden = CantorPair::golden();
        assert!(membership(&Scalar::zero(), &Scalar::one(), &golden, 100_000, None).unwrap().is_in());
    }

    #[test]
    fn in_certificate_replays() {
        let third = CantorPair::middle_rational((1, 3), (1, 3));
        let four = Scalar::from_int(4);
        let t = s(-1, 3);
        match membership(&t, &four, &third, 10_000, None).unwrap() {
            Membership::In { word, cycle_start } => {
                let ops = make_operators(&third);
                let labels: Vec<&str> = word.iter().map(|w| w.as_str()).collect();
                let ops_word = ops.word(&labels).unwrap();
                let x = pt(four.clone(), t.clone());
                let prefix = apply_word(&ops_word[..cycle_start], &x);
                let full = apply_word(&ops_word, &x);
                assert_eq!(prefix, full);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn agrees_with_attractor_search() {
        let third = CantorPair::middle_rational((1, 3), (1, 3));
        let lambda = Scalar::from_int(4);
        let ifs = generate_ifs(&third, &lambda).unwrap();
        for k in -16..=4 {
            let t = s(k, 4);
            let a = ifs.attractor_membership(&t, 10_000);
            let b = membership(&t, &lambda, &third, 10_000, None).unwrap();
            assert_eq!(a.is_in(), b.is_in(), "t = {t}");
            assert_eq!(a.is_out(), b.is_out(), "t = {t}");
        }
    }

    #[test]
    fn thickness_route() {
        let third = CantorPair::middle_rational((1, 3), (1, 3));
        assert_eq!(thickness_window(&third).unwrap(), (s(1, 3), Scalar::from_int(3)));
        assert!(full_interval_via_thickness(&third, &Scalar::one()).unwrap());
        assert!(!full_interval_via_thickness(&third, &Scalar::from_int(4)).unwrap());
        let thick = CantorPair::middle_rational((2, 5), (2, 5));
        let (_, s0) = thickness_window(&thick).unwrap();
        assert_eq!(s0, Scalar::from_int(5));
        assert!(full_interval_via_thickness(&thick, &s0).unwrap());
        assert!(full_interval_via_thickness(&CantorPair::middle_rational((1, 4), (1, 4)), &Scalar::one()).is_err());
    }

    #[test]
    fn recurrent_region_construction() {
        let pair = CantorPair::middle_rational((2, 5), (2, 5));
        let r = build_recurrent_set(&pair).unwrap();
        assert_eq!(r.s0, Scalar::from_int(5));
        assert!(r.delta < &r.a * &r.epsilon);
        assert_eq!(r.s_min, &r.s_max / &Scalar::ratio(25, 4));
        assert!(build_recurrent_set(&CantorPair::middle_rational((1, 3), (1, 3))).is_err());
        // boundary between zones A and B
        let x = pt(r.s_split.clone(), Scalar::zero());
        assert!(r.contains(&x));
        assert!(return_steps(&r, &pair, &x).is_some());
        let report = verify_recurrence(&r, &pair, 40);
        assert_eq!(report.failures, 0, "{:?}", report.failure_examples);
    }

    #[test]
    fn recurrent_points_are_members() {
        let pair = CantorPair::middle_rational((2, 5), (2, 5));
        let r = build_recurrent_set(&pair).unwrap();
        let x = r.grid_point(3, 5, 10);
        let m = membership(x.t(), x.s(), &pair, 10, Some(&r)).unwrap();
        assert_eq!(m, Membership::In { word: vec![], cycle_start: 0 });
    }
}
