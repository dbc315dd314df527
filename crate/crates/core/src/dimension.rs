//! Finite-type detection, the neighbor automaton, spectral bounds and the
//! resulting Hausdorff (= box) dimension of line attractors.
//!
//! A state records where the other distinct same-depth classes sit relative
//! to a class, in units of the current scale, keeping only those whose hull
//! images overlap its own in the interior. Each class is owned by its leftmost
//! parent, so the automaton counts distinct classes exactly.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cantor::{ln_of_scalar, CantorPair};
use crate::error::{Error, Result};
use crate::ifs::{generate_ifs, LineIfs};
use crate::lattice::{LatticeIfs, QuadInt, QuadRing};
use crate::scalar::enclosure::{ln_enclosure, Enclosure};
use crate::scalar::{common_denominator, FieldSpec, Rational, Scalar};

pub const DEFAULT_STATE_BUDGET: usize = 10_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const LOG_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteTypeCertificate {
    /// Offsets lie in `(1/k)·ring`.
    #[serde(serialize_with = "big_as_string")]
    pub denominator: BigInt,
    /// `"Z"` or the quadratic ring `"Z[g]"`.
    pub ring: String,
    pub expansion: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "finite_type", rename_all = "snake_case")]
pub enum FiniteType {
    Yes(FiniteTypeCertificate),
    Unknown { reason: String },
}

impl FiniteType {
    pub fn is_yes(&self) -> bool {
        matches!(self, FiniteType::Yes(_))
    }
}

fn big_as_string<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Pisot expansion with offsets in a common lattice.
pub fn is_finite_type(ifs: &LineIfs) -> FiniteType {
    let rho = ifs.expansion();
    let unknown = |reason: &str| FiniteType::Unknown { reason: reason.into() };
    if !rho.u().is_integer() || !rho.v().is_integer() {
        return unknown("expansion is not an algebraic integer of the declared ring");
    }
    let ring = match rho.field() {
        None => "Z".to_string(),
        Some(f) => {
            if !f.is_integral() {
                return unknown("field equation does not have integer coefficients");
            }
            let conj = rho.conjugate();
            if conj.abs() >= Scalar::one() {
                return unknown("expansion is not a Pisot number");
            }
            "Z[g]".to_string()
        }
    };
    if rho <= Scalar::one() {
        return unknown("expansion must exceed 1");
    }
    let mut all = ifs.offsets().to_vec();
    all.push(ifs.hull().lo().clone());
    all.push(ifs.hull().hi().clone());
    FiniteType::Yes(FiniteTypeCertificate { denominator: common_denominator(&all), ring, expansion: rho.clone() })
}

/// Arithmetic on relative positions, in units of the current scale.
trait Coords: Sync {
    type P: Clone + Eq + Hash + Send + Sync + Debug;
    fn steps(&self) -> &[Self::P];
    fn expand(&self, x: &Self::P) -> Self::P;
    fn add(&self, x: &Self::P, y: &Self::P) -> Self::P;
    fn sub(&self, x: &Self::P, y: &Self::P) -> Self::P;
    fn cmp(&self, x: &Self::P, y: &Self::P) -> Ordering;
    fn sign(&self, x: &Self::P) -> Ordering;
    /// `|x|` below the hull width.
    fn overlaps(&self, x: &Self::P) -> bool;
    fn to_scalar(&self, x: &Self::P) -> Scalar;
}

struct LatticeCoords {
    lat: LatticeIfs,
    ring: QuadRing,
    width: QuadInt,
}

impl Coords for LatticeCoords {
    type P = QuadInt;
    fn steps(&self) -> &[QuadInt] {
        self.lat.steps()
    }
    fn expand(&self, x: &QuadInt) -> QuadInt {
        self.ring.mul(self.lat.expansion(), *x)
    }
    fn add(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x.add(*y)
    }
    fn sub(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x.sub(*y)
    }
    fn cmp(&self, x: &QuadInt, y: &QuadInt) -> Ordering {
        self.ring.cmp(*x, *y)
    }
    fn sign(&self, x: &QuadInt) -> Ordering {
        self.ring.sign(*x)
    }
    fn overlaps(&self, x: &QuadInt) -> bool {
        self.ring.sign(self.width.sub(*x)) == Ordering::Greater && self.ring.sign(self.width.add(*x)) == Ordering::Greater
    }
    fn to_scalar(&self, x: &QuadInt) -> Scalar {
        self.lat.to_scalar(*x) / Scalar::from_int(self.lat.denominator() as i64)
    }
}

struct ExactCoords {
    rho: Scalar,
    steps: Vec<Scalar>,
    width: Scalar,
}

impl Coords for ExactCoords {
    type P = Scalar;
    fn steps(&self) -> &[Scalar] {
        &self.steps
    }
    fn expand(&self, x: &Scalar) -> Scalar {
        &self.rho * x
    }
    fn add(&self, x: &Scalar, y: &Scalar) -> Scalar {
        x + y
    }
    fn sub(&self, x: &Scalar, y: &Scalar) -> Scalar {
        x - y
    }
    fn cmp(&self, x: &Scalar, y: &Scalar) -> Ordering {
        x.cmp(y)
    }
    fn sign(&self, x: &Scalar) -> Ordering {
        x.signum()
    }
    fn overlaps(&self, x: &Scalar) -> bool {
        x.abs() < self.width
    }
    fn to_scalar(&self, x: &Scalar) -> Scalar {
        x.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NeighborState {
    /// Sorted relative positions of overlapping same-depth classes.
    pub neighbors: Vec<Scalar>,
}

/// Nonnegative integer matrix in sparse row form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountMatrix {
    rows: Vec<Vec<(usize, u64)>>,
}

impl CountMatrix {
    pub fn from_dense(m: &[Vec<u64>]) -> Result<Self> {
        let n = m.len();
        if m.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("matrix must be square".into()));
        }
        let rows = m
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &c)| c > 0).map(|(j, &c)| (j, c)).collect())
            .collect();
        Ok(CountMatrix { rows })
    }

    pub fn from_rows(rows: Vec<Vec<(usize, u64)>>) -> Self {
        CountMatrix { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, u64)>] {
        &self.rows
    }

    pub fn dense(&self) -> Vec<Vec<u64>> {
        let n = self.size();
        self.rows
            .iter()
            .map(|r| {
                let mut row = vec![0; n];
                for &(j, c) in r {
                    row[j] += c;
                }
                row
            })
            .collect()
    }

    /// `v·M` with overflow checks.
    pub fn left_apply(&self, v: &[u128]) -> Option<Vec<u128>> {
        let mut out = vec![0u128; self.size()];
        for (i, r) in self.rows.iter().enumerate() {
            if v[i] == 0 {
                continue;
            }
            for &(j, c) in r {
                out[j] = out[j].checked_add(v[i].checked_mul(c as u128)?)?;
            }
        }
        Some(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NeighborAutomaton {
    pub states: Vec<NeighborState>,
    pub matrix: CountMatrix,
    /// Children of the root, i.e. depth-1 class types.
    pub start: Vec<u64>,
    pub expansion: Scalar,
    /// `false` when the state budget stopped the closure.
    pub complete: bool,
}

impl NeighborAutomaton {
    /// Distinct classes at depths `1..=depth`; `None` on overflow.
    pub fn class_counts(&self, depth: usize) -> Option<Vec<u128>> {
        let mut v = vec![0u128; self.states.len()];
        v[0] = 1;
        let mut out = Vec::with_capacity(depth);
        for _ in 0..depth {
            v = self.matrix.left_apply(&v)?;
            out.push(v.iter().try_fold(0u128, |a, &x| a.checked_add(x))?);
        }
        Some(out)
    }
}

fn refine<C: Coords>(c: &C, state: &[C::P]) -> Vec<Vec<C::P>> {
    let steps = c.steps();
    let mut all: Vec<C::P> = steps.to_vec();
    let mut seen: HashSet<C::P> = all.iter().cloned().collect();
    let mut claimed: HashSet<C::P> = HashSet::new();
    for d in state {
        let base = c.expand(d);
        let left = c.sign(d) == Ordering::Less;
        for s in steps {
            let x = c.add(&base, s);
            if left {
                claimed.insert(x.clone());
            }
            if seen.insert(x.clone()) {
                all.push(x);
            }
        }
    }
    steps
        .iter()
        .filter(|s| !claimed.contains(*s))
        .map(|ci| {
            let mut nb: Vec<C::P> = all
                .iter()
                .filter(|x| *x != ci)
                .map(|x| c.sub(x, ci))
                .filter(|d| c.overlaps(d))
                .collect();
            nb.sort_by(|x, y| c.cmp(x, y));
            nb
        })
        .collect()
}

fn close<C: Coords>(c: &C, expansion: Scalar, budget: usize) -> NeighborAutomaton {
    let mut states: Vec<Vec<C::P>> = vec![Vec::new()];
    let mut index: HashMap<Vec<C::P>, usize> = HashMap::from([(Vec::new(), 0)]);
    let mut rows: Vec<Vec<(usize, u64)>> = Vec::new();
    let mut complete = true;
    'outer: while rows.len() < states.len() {
        let generation: Vec<Vec<Vec<C::P>>> =
            states[rows.len()..].par_iter().map(|s| refine(c, s)).collect();
        for kids in generation {
            let mut row: HashMap<usize, u64> = HashMap::new();
            for kid in kids {
                let id = match index.get(&kid) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= budget {
                            complete = false;
                            break 'outer;
                        }
                        states.push(kid.clone());
                        index.insert(kid, states.len() - 1);
                        states.len() - 1
                    }
                };
                *row.entry(id).or_insert(0) += 1;
            }
            let mut row: Vec<(usize, u64)> = row.into_iter().collect();
            row.sort_unstable();
            rows.push(row);
        }
    }
    rows.resize(states.len(), Vec::new());
    let mut start = vec![0u64; states.len()];
    for &(j, k) in &rows[0] {
        start[j] = k;
    }
    NeighborAutomaton {
        states: states
            .iter()
            .map(|s| NeighborState { neighbors: s.iter().map(|x| c.to_scalar(x)).collect() })
            .collect(),
        matrix: CountMatrix { rows },
        start,
        expansion,
        complete,
    }
}

/// Closes the neighbor automaton, stopping after `budget` states.
pub fn build_automaton(ifs: &LineIfs, budget: usize) -> NeighborAutomaton {
    let expansion = ifs.expansion();
    match LatticeIfs::from_ifs(ifs) {
        Some(lat) => {
            let (lo, hi) = lat.hull();
            let coords = LatticeCoords { ring: *lat.ring(), width: hi.sub(lo), lat };
            close(&coords, expansion, budget)
        }
        None => {
            let coords = ExactCoords {
                steps: ifs.offsets().iter().map(|b| &expansion * b).collect(),
                rho: expansion.clone(),
                width: ifs.hull().length(),
            };
            close(&coords, expansion, budget)
        }
    }
}

/// Integer polynomial, highest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<BigInt>);

impl Poly {
    pub fn from_i64(c: &[i64]) -> Self {
        Poly(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
    }

    pub fn eval_scalar(&self, x: &Scalar) -> Scalar {
        self.0
            .iter()
            .fold(Scalar::zero(), |acc, c| acc * x + Scalar::rational(Rational::from_integer(c.clone())))
    }

    /// Product with another polynomial.
    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().serialize(s)
    }
}

/// Characteristic polynomial `det(xI − M)` by Faddeev–LeVerrier.
pub fn char_poly(m: &[Vec<u64>]) -> Poly {
    let n = m.len();
    let a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mul = |x: &[Vec<BigInt>], y: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &x[i][k] * &y[k][j]).sum()).collect())
            .collect()
    };
    let mut coeffs = vec![BigInt::one()];
    let mut acc = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        let c_prev = coeffs.last().unwrap().clone();
        let mut next = mul(&a, &acc);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c_prev;
        }
        acc = next;
        let am = mul(&a, &acc);
        let trace: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs.push(-(trace / BigInt::from(k)));
    }
    Poly(coeffs)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentBound {
    pub states: Vec<usize>,
    pub radius: Enclosure,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralBounds {
    pub radius: Enclosure,
    pub components: Vec<ComponentBound>,
    /// Present for at most 12 states.
    pub char_poly: Option<Poly>,
}

/// Collatz–Wielandt bounds for one irreducible block.
fn block_bounds(rows: &[Vec<(usize, u64)>], tol: f64) -> Enclosure {
    let n = rows.len();
    let mut x = vec![1.0f64; n];
    let ratios = |x: &[f64]| -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (i, r) in rows.iter().enumerate() {
            let y: f64 = r.iter().map(|&(j, c)| c as f64 * x[j]).sum();
            lo = lo.min(y / x[i]);
            hi = hi.max(y / x[i]);
        }
        (lo, hi)
    };
    for it in 0..200_000 {
        // iterate with M + I, which is primitive on an irreducible block
        let mut y: Vec<f64> = x.clone();
        for (i, r) in rows.iter().enumerate() {
            for &(j, c) in r {
                y[i] += c as f64 * x[j];
            }
        }
        let top = y.iter().cloned().fold(0.0, f64::max);
        for v in y.iter_mut() {
            *v = (*v / top).max(1e-280);
        }
        x = y;
        if it % 32 == 31 {
            let (lo, hi) = ratios(&x);
            if hi - lo < tol * 1e-3 * hi.max(1.0) {
                break;
            }
        }
    }
    let top = x.iter().cloned().fold(0.0, f64::max);
    let xi: Vec<BigInt> = x
        .iter()
        .map(|v| BigInt::from(((v / top) * 2f64.powi(52)).round().max(1.0) as u64))
        .collect();
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for (i, r) in rows.iter().enumerate() {
        let y: BigInt = r.iter().map(|&(j, c)| BigInt::from(c) * &xi[j]).sum();
        let q = Rational::new(y, xi[i].clone());
        if lo.as_ref().is_none_or(|l| &q < l) {
            lo = Some(q.clone());
        }
        if hi.as_ref().is_none_or(|h| &q > h) {
            hi = Some(q);
        }
    }
    Enclosure::new(lo.unwrap(), hi.unwrap())
}

/// Rigorous enclosure of the spectral radius, block by block.
pub fn spectral_radius(m: &CountMatrix, tol: f64) -> SpectralBounds {
    let n = m.size();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, r) in m.rows.iter().enumerate() {
        for &(j, _) in r {
            g.add_edge(nodes[i], nodes[j], ());
        }
    }
    let mut components = Vec::new();
    for comp in tarjan_scc(&g) {
        let mut states: Vec<usize> = comp.iter().map(|v| v.index()).collect();
        states.sort_unstable();
        let local: HashMap<usize, usize> = states.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let rows: Vec<Vec<(usize, u64)>> = states
            .iter()
            .map(|&i| m.rows[i].iter().filter_map(|&(j, c)| local.get(&j).map(|&k| (k, c))).collect())
            .collect();
        if rows.iter().all(|r| r.is_empty()) {
            continue;
        }
        components.push(ComponentBound { radius: block_bounds(&rows, tol), states });
    }
    components.sort_by(|a, b| b.radius.hi().cmp(a.radius.hi()));
    let radius = if components.is_empty() {
        Enclosure::point(Rational::zero())
    } else {
        let lo = components.iter().map(|c| c.radius.lo().clone()).max().unwrap();
        let hi = components.iter().map(|c| c.radius.hi().clone()).max().unwrap();
        Enclosure::new(lo, hi)
    };
    let char_poly = (n <= 12).then(|| char_poly(&m.dense()));
    SpectralBounds { radius, components, char_poly }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionResult {
    pub states: usize,
    pub complete: bool,
    pub spectral_radius: Option<Enclosure>,
    /// Hausdorff dimension, equal to the box dimension.
    pub hdim: Enclosure,
    pub similarity_dimension: Enclosure,
    pub char_poly: Option<Poly>,
}

fn log_ratio(x: &Enclosure, base: &Enclosure) -> Enclosure {
    let lo = ln_enclosure(x.lo(), LOG_BITS);
    let hi = ln_enclosure(x.hi(), LOG_BITS);
    Enclosure::new(lo.lo().clone(), hi.hi().clone()).div(base).expect("expansion exceeds 1")
}

fn clamp_unit(e: Enclosure) -> Enclosure {
    let zero = Rational::zero();
    let one = Rational::one();
    let lo = e.lo().clone().max(zero.clone()).min(one.clone());
    let hi = e.hi().clone().min(one).max(lo.clone());
    Enclosure::new(lo, hi)
}

pub fn hausdorff_dimension(ifs: &LineIfs, budget: usize) -> Result<DimensionResult> {
    let automaton = build_automaton(ifs, budget);
    dimension_of(ifs, &automaton)
}

pub fn dimension_of(ifs: &LineIfs, automaton: &NeighborAutomaton) -> Result<DimensionResult> {
    let ln_rho = ln_of_scalar(&ifs.expansion(), LOG_BITS);
    let maps = Rational::from_integer(BigInt::from(ifs.len()));
    let similarity_dimension = log_ratio(&Enclosure::point(maps), &ln_rho);
    if !automaton.complete {
        // k_{nj} ≤ k_nʲ, so every depth gives an upper bound
        let mut best = Rational::one();
        for (n, k) in ifs.class_counts(8, 2_000_000).into_iter().enumerate() {
            let Some(k) = k else { break };
            let b = log_ratio(&Enclosure::point(Rational::from_integer(BigInt::from(k))), &ln_rho)
                .scale(&Rational::new(BigInt::one(), BigInt::from(n + 1)));
            best = best.min(b.hi().clone());
        }
        return Ok(DimensionResult {
            states: automaton.states.len(),
            complete: false,
            spectral_radius: None,
            hdim: Enclosure::new(Rational::zero(), best),
            similarity_dimension,
            char_poly: None,
        });
    }
    let bounds = spectral_radius(&automaton.matrix, DEFAULT_TOLERANCE);
    // k_n ≥ 1 at every depth, so the radius is at least 1
    let radius = Enclosure::new(
        bounds.radius.lo().clone().max(Rational::one()),
        bounds.radius.hi().clone().max(Rational::one()),
    );
    let hdim = clamp_unit(log_ratio(&radius, &ln_rho));
    Ok(DimensionResult {
        states: automaton.states.len(),
        complete: true,
        spectral_radius: Some(radius),
        hdim,
        similarity_dimension,
        char_poly: bounds.char_poly,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountSource {
    Enumerated,
    Automaton,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingBound {
    pub depth: usize,
    pub classes: u128,
    /// `k_n^{1/n}`.
    pub root: f64,
    /// `log k_n / (n log ρ)`, an upper bound on the dimension.
    pub bound: Enclosure,
    pub source: CountSource,
}

/// Distinct depth-`n` classes and the covering bound they give.
/// Counts come from enumeration up to `cap` classes and from the automaton beyond.
pub fn depth_counting_bound(ifs: &LineIfs, n: usize, cap: usize) -> Result<CountingBound> {
    if n == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let (classes, source) = match ifs.class_counts(n, cap).last().copied().flatten() {
        Some(k) => (k as u128, CountSource::Enumerated),
        None => {
            let automaton = build_automaton(ifs, DEFAULT_STATE_BUDGET);
            if !automaton.complete {
                return Err(Error::Budget { what: "automaton state", limit: DEFAULT_STATE_BUDGET });
            }
            let k = automaton
                .class_counts(n)
                .ok_or(Error::Budget { what: "class count", limit: usize::MAX })?;
            (k[n - 1], CountSource::Automaton)
        }
    };
    let ln_rho = ln_of_scalar(&ifs.expansion(), LOG_BITS);
    let k = Rational::from_integer(BigInt::from(classes));
    let bound = log_ratio(&Enclosure::point(k), &ln_rho).scale(&Rational::new(BigInt::one(), BigInt::from(n)));
    let root = (classes as f64).powf(1.0 / n as f64);
    Ok(CountingBound { depth: n, classes, root, bound, source })
}

/// Depth-1 arrangement cells grouped by exact length and cover multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellType {
    pub length: Scalar,
    pub multiplicity: usize,
    /// Cells of this type as `(left, right)` endpoints on the line.
    pub cells: Vec<(Scalar, Scalar)>,
}

fn lattice_of(ifs: &LineIfs) -> Result<LatticeIfs> {
    LatticeIfs::from_ifs(ifs)
        .ok_or_else(|| Error::Precondition("system does not fit the integer lattice".into()))
}

pub fn cell_types(ifs: &LineIfs) -> Result<Vec<CellType>> {
    let lat = lattice_of(ifs)?;
    let mut out: Vec<CellType> = Vec::new();
    for cell in lat.cells() {
        let length = lat.offset_of(cell.length(), 1);
        let ends = (lat.offset_of(cell.lo, 1), lat.offset_of(cell.hi, 1));
        match out.iter_mut().find(|t| t.length == length && t.multiplicity == cell.multiplicity) {
            Some(t) => t.cells.push(ends),
            None => out.push(CellType { length, multiplicity: cell.multiplicity, cells: vec![ends] }),
        }
    }
    Ok(out)
}

/// Depth-`depth` population of each cell type (classes meeting a singly
/// covered cell, classes inside a multiply covered one). With `exhaustive`
/// every cell is counted and cells of one type must agree.
pub fn cell_type_populations(ifs: &LineIfs, depth: u32, exhaustive: bool) -> Result<Vec<u64>> {
    let lat = lattice_of(ifs)?;
    let types = cell_types(ifs)?;
    let cells = lat.cells();
    let overflow = || Error::Budget { what: "lattice range", limit: i128::MAX as usize };
    let mut out = Vec::with_capacity(types.len());
    for t in &types {
        let members: Vec<_> = cells
            .iter()
            .filter(|c| c.multiplicity == t.multiplicity && lat.offset_of(c.length(), 1) == t.length)
            .collect();
        let take = if exhaustive { members.len() } else { 1 };
        let pops: Vec<u64> = members[..take]
            .par_iter()
            .map(|c| lat.cell_population(c, depth))
            .collect::<Option<Vec<u64>>>()
            .ok_or_else(overflow)?;
        if pops.iter().any(|&x| x != pops[0]) {
            return Err(Error::Invariant(format!("cells of one type disagree at depth {depth}: {pops:?}")));
        }
        out.push(pops[0]);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PisotVerdict {
    ContainsInterval,
    MeasureZero,
}

#[derive(Clone, Debug, Serialize)]
pub struct PisotReport {
    pub verdict: PisotVerdict,
    pub dimension: DimensionResult,
}

/// Exact determinant by elimination over the field.
fn determinant(mut a: Vec<Vec<Scalar>>) -> Scalar {
    let n = a.len();
    let mut det = Scalar::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Scalar::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det = det * &a[col][col];
        let inv = a[col][col].recip().expect("nonzero pivot");
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let v = &a[col][c] * &f;
                a[r][c] = &a[r][c] - &v;
            }
        }
    }
    det
}

/// `C_{ω^{−n}} − μ·C_{ω^{−m}}` either contains an interval or is Lebesgue-null.
pub fn classify_pisot_pair(omega: &Arc<FieldSpec>, n: u32, m: u32, mu: &Scalar) -> Result<PisotReport> {
    if mu.is_zero() {
        return Err(Error::InvalidParameter("mu must be nonzero".into()));
    }
    if !omega.is_integral() {
        return Err(Error::Precondition("ω must be an algebraic integer".into()));
    }
    let w = Scalar::generator(omega);
    if w <= Scalar::one() || w.conjugate().abs() >= Scalar::one() {
        return Err(Error::Precondition(format!("{w} in {omega} is not a quadratic Pisot number")));
    }
    let pair = CantorPair::middle(w.pow(-(n as i64))?, w.pow(-(m as i64))?)?;
    let ifs = generate_ifs(&pair, mu)?;
    if !is_finite_type(&ifs).is_yes() {
        return Err(Error::Invariant("Pisot system failed the finite-type check".into()));
    }
    let automaton = build_automaton(&ifs, DEFAULT_STATE_BUDGET);
    let dimension = dimension_of(&ifs, &automaton)?;
    if !automaton.complete {
        return Err(Error::Undecided("automaton exceeded the state budget".into()));
    }
    let rho = ifs.expansion();
    let rho_enc = rho.enclosure(LOG_BITS);
    let bounds = spectral_radius(&automaton.matrix, DEFAULT_TOLERANCE);
    if bounds.radius.hi() < rho_enc.lo() {
        return Ok(PisotReport { verdict: PisotVerdict::MeasureZero, dimension });
    }
    for comp in bounds.components.iter().filter(|c| c.radius.hi() >= rho_enc.lo()) {
        if comp.states.len() > 200 {
            continue;
        }
        let dense = automaton.matrix.dense();
        let block: Vec<Vec<Scalar>> = comp
            .states
            .iter()
            .map(|&i| {
                comp.states
                    .iter()
                    .map(|&j| {
                        let c = Scalar::from_int(dense[i][j] as i64);
                        if i == j {
                            &rho - &c
                        } else {
                            -c
                        }
                    })
                    .collect()
            })
            .collect();
        if determinant(block).is_zero() {
            return Ok(PisotReport { verdict: PisotVerdict::ContainsInterval, dimension });
        }
    }
    Err(Error::Undecided(format!(
        "spectral radius enclosure [{:.12}, {:.12}] does not separate from the expansion",
        bounds.radius.lo_f64(),
        bounds.radius.hi_f64()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::CantorPair;
    use crate::ifs::generate_ifs;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn golden_ifs(lambda: &Scalar) -> LineIfs {
        generate_ifs(&CantorPair::golden(), lambda).unwrap()
    }

    fn two_over_gamma() -> Scalar {
        let pair = CantorPair::golden();
        Scalar::from_int(2) / Scalar::generator(pair.field().unwrap())
    }

    fn five_type_matrix() -> Vec<Vec<u64>> {
        vec![
            vec![5, 11, 3, 11, 5],
            vec![2, 6, 2, 6, 2],
            vec![4, 10, 3, 10, 4],
            vec![0, 2, 0, 1, 2],
            vec![0, 8, 2, 6, 5],
        ]
    }

    #[test]
    fn five_type_matrix_char_poly() {
        let p = char_poly(&five_type_matrix());
        assert_eq!(p, Poly::from_i64(&[1, -20, 50, -28, -3, 0]));
        let factored = Poly::from_i64(&[1, 0]).mul(&Poly::from_i64(&[1, -1])).mul(&Poly::from_i64(&[1, -19, 31, 3]));
        assert_eq!(p, factored);
    }

    #[test]
    fn five_type_matrix_radius() {
        let m = CountMatrix::from_dense(&five_type_matrix()).unwrap();
        let b = spectral_radius(&m, DEFAULT_TOLERANCE);
        assert!(b.radius.width() < Rational::new(1.into(), BigInt::from(10u64.pow(9))));
        assert!((b.radius.lo_f64() - 17.186054896).abs() < 1e-8);
        let poly = b.char_poly.unwrap();
        let (l, h) = (poly.eval(b.radius.lo()), poly.eval(b.radius.hi()));
        assert!(!(l.is_positive() && h.is_positive()) && !(l.is_negative() && h.is_negative()));
    }

    #[test]
    fn small_radii() {
        let eye = CountMatrix::from_dense(&[vec![1, 0], vec![0, 1]]).unwrap();
        let b = spectral_radius(&eye, DEFAULT_TOLERANCE);
        assert_eq!(b.radius, Enclosure::point(Rational::one()));
        let m = CountMatrix::from_dense(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert!(spectral_radius(&m, DEFAULT_TOLERANCE).radius.contains(&Rational::from_integer(3.into())));
        let z = CountMatrix::from_dense(&[vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(spectral_radius(&z, DEFAULT_TOLERANCE).radius, Enclosure::point(Rational::zero()));
        // reducible: block radii 1 and 4
        let r = CountMatrix::from_dense(&[vec![1, 5], vec![0, 4]]).unwrap();
        let b = spectral_radius(&r, DEFAULT_TOLERANCE);
        assert!(b.radius.contains(&Rational::from_integer(4.into())));
        assert_eq!(b.components.len(), 2);
    }

    #[test]
    fn golden_finite_type_and_automaton() {
        let ifs = golden_ifs(&two_over_gamma());
        match is_finite_type(&ifs) {
            FiniteType::Yes(c) => assert_eq!(c.ring, "Z[g]"),
            other => panic!("{other:?}"),
        }
        let a = build_automaton(&ifs, DEFAULT_STATE_BUDGET);
        assert!(a.complete);
        assert_eq!(a.states.len(), 6);
        assert_eq!(
            a.class_counts(6).unwrap(),
            vec![21, 369, 6357, 109281, 1878165, 32278353]
        );
        let d = dimension_of(&ifs, &a).unwrap();
        let r = d.spectral_radius.clone().unwrap();
        assert!((r.lo_f64() - 17.186054896).abs() < 1e-8);
        assert!(d.hdim.lo_f64() > 0.98504 && d.hdim.hi_f64() < 0.98505);
        assert!(d.char_poly.is_some());
    }

    #[test]
    fn automaton_matches_enumeration() {
        let pairs = [
            (CantorPair::golden(), two_over_gamma()),
            (CantorPair::golden(), Scalar::one()),
            (CantorPair::middle_rational((1, 3), (1, 3)), Scalar::ratio(1, 2)),
            (CantorPair::middle_rational((1, 4), (1, 4)), Scalar::ratio(7, 10)),
            (CantorPair::middle_rational((1, 4), (1, 16)), Scalar::ratio(3, 5)),
        ];
        for (pair, lam) in pairs {
            let ifs = generate_ifs(&pair, &lam).unwrap();
            let a = build_automaton(&ifs, DEFAULT_STATE_BUDGET);
            assert!(a.complete, "{lam}");
            let want: Vec<u128> = ifs.exact_class_counts(4, 1_000_000).into_iter().map(|k| k.unwrap() as u128).collect();
            assert_eq!(a.class_counts(4).unwrap(), want, "{lam}");
        }
    }

    #[test]
    fn tilings_have_one_state() {
        let third = generate_ifs(&CantorPair::middle_rational((1, 3), (1, 3)), &Scalar::one()).unwrap();
        let a = build_automaton(&third, 100);
        assert_eq!(a.matrix.dense(), vec![vec![3]]);
        let d = dimension_of(&third, &a).unwrap();
        assert!(d.hdim.contains(&Rational::one()));
        assert!(d.hdim.width() < Rational::new(1.into(), BigInt::from(10u64.pow(15))));
        let quarter = generate_ifs(&CantorPair::middle_rational((1, 4), (1, 4)), &Scalar::ratio(1, 2)).unwrap();
        let a = build_automaton(&quarter, 100);
        assert_eq!(a.matrix.dense(), vec![vec![4]]);
    }

    #[test]
    fn single_map_system() {
        let ifs = LineIfs::new(
            Scalar::ratio(1, 2),
            vec![Scalar::zero()],
            crate::interval::Interval::new(Scalar::zero(), Scalar::one()).unwrap(),
        )
        .unwrap();
        let b = depth_counting_bound(&ifs, 4, 1000).unwrap();
        assert_eq!(b.classes, 1);
        assert!(b.bound.contains(&Rational::zero()));
        let d = hausdorff_dimension(&ifs, 100).unwrap();
        assert_eq!(d.hdim.lo(), &Rational::zero());
        assert!(d.hdim.hi_f64() < 1e-12);
    }

    #[test]
    fn counting_bounds() {
        let ifs = golden_ifs(&two_over_gamma());
        let b2 = depth_counting_bound(&ifs, 2, 1_000_000).unwrap();
        assert_eq!(b2.classes, 369);
        assert_eq!(b2.source, CountSource::Enumerated);
        assert!((b2.root - 19.2093).abs() < 1e-3);
        let b6 = depth_counting_bound(&ifs, 6, 200_000).unwrap();
        assert_eq!(b6.source, CountSource::Automaton);
        assert_eq!(b6.classes, 32278353);
        assert!(b6.bound.hi_f64() < 0.9982);
        let b5 = depth_counting_bound(&ifs, 5, 200_000).unwrap();
        assert!(b5.bound.lo_f64() > 1.0);
    }

    #[test]
    fn golden_cell_types() {
        let ifs = golden_ifs(&two_over_gamma());
        let types = cell_types(&ifs).unwrap();
        let mut shape: Vec<(usize, usize)> = types.iter().map(|t| (t.multiplicity, t.cells.len())).collect();
        shape.sort_unstable();
        assert_eq!(shape, vec![(0, 2), (1, 3), (1, 6), (1, 12), (2, 6), (2, 12)]);
        let pops = cell_type_populations(&ifs, 2, true).unwrap();
        let total: u64 = types.iter().zip(&pops).map(|(t, p)| t.cells.len() as u64 * p).sum();
        // overlap cells share their boundary classes with neighbouring single-cover cells
        assert!(total >= 369);
    }

    #[test]
    fn scaling_and_duality_invariance() {
        let pair = CantorPair::golden();
        let lam = two_over_gamma();
        let base = hausdorff_dimension(&generate_ifs(&pair, &lam).unwrap(), DEFAULT_STATE_BUDGET).unwrap();
        let scaled = &lam * &(pair.p() / pair.q());
        let other = hausdorff_dimension(&generate_ifs(&pair, &scaled).unwrap(), DEFAULT_STATE_BUDGET).unwrap();
        assert!(base.hdim.lo() <= other.hdim.hi() && other.hdim.lo() <= base.hdim.hi());
        let dual = generate_ifs(&pair.swapped(), &lam.recip().unwrap()).unwrap();
        let dual = hausdorff_dimension(&dual, DEFAULT_STATE_BUDGET).unwrap();
        assert!(base.hdim.lo() <= dual.hdim.hi() && dual.hdim.lo() <= base.hdim.hi());
    }

    #[test]
    fn pisot_classification() {
        let f = FieldSpec::golden();
        let g = Scalar::generator(&f);
        let r = classify_pisot_pair(&f, 3, 2, &(Scalar::from_int(2) / g)).unwrap();
        assert_eq!(r.verdict, PisotVerdict::MeasureZero);
        let r = classify_pisot_pair(&f, 3, 2, &Scalar::one()).unwrap();
        assert_eq!(r.verdict, PisotVerdict::ContainsInterval);
        // x² = 3x + 1 has conjugate ≈ −0.30, x² = x + 3 has conjugate ≈ −1.30
        let bad = FieldSpec::parse("g^2=g+3").unwrap();
        assert!(matches!(classify_pisot_pair(&bad, 3, 2, &Scalar::one()), Err(Error::Precondition(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn collatz_wielandt_brackets_exact_root(a in 0u64..6, b in 1u64..6, c in 1u64..6, d in 0u64..6) {
            // radius of [[a,b],[c,d]] is ((a+d) + sqrt((a−d)² + 4bc))/2
            let m = CountMatrix::from_dense(&[vec![a, b], vec![c, d]]).unwrap();
            let e = spectral_radius(&m, DEFAULT_TOLERANCE).radius;
            let disc = ((a as f64 - d as f64).powi(2) + 4.0 * (b * c) as f64).sqrt();
            let exact = (a + d) as f64 / 2.0 + disc / 2.0;
            prop_assert!(e.lo_f64() <= exact + 1e-12 && exact - 1e-12 <= e.hi_f64());
            let poly = char_poly(&m.dense());
            let (l, h) = (poly.eval(e.lo()), poly.eval(e.hi()));
            prop_assert!(!(l.is_positive() && h.is_positive()) && !(l.is_negative() && h.is_negative()));
        }

        #[test]
        fn dimension_below_similarity_bound(num in 1i64..10) {
            let lam = Scalar::ratio(num, 7);
            let ifs = generate_ifs(&CantorPair::middle_rational((1, 4), (1, 4)), &lam).unwrap();
            let d = hausdorff_dimension(&ifs, DEFAULT_STATE_BUDGET).unwrap();
            prop_assert!(d.complete);
            prop_assert!(d.hdim.lo() <= d.similarity_dimension.hi());
            prop_assert!(d.hdim.hi_f64() <= 1.0);
        }
    }
}
