//! Fixed-width integer arithmetic in `ℤ[γ]` for systems whose offsets share a
//! common denominator and whose expansion is an algebraic integer.
//!
//! A depth-`n` class with offset `O` is stored as `P = k·ρⁿ·O`, where `ρ` is the
//! expansion and `k` the common denominator. Then `P' = ρ·P + kρ·bᵢ` and the
//! image of the hull is `[P + k·lo, P + k·hi]` in units of `ρ⁻ⁿ/k`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::ifs::LineIfs;
use crate::scalar::{common_denominator, FieldSpec, Rational, Scalar};

/// `u + vγ` with machine integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub u: i128,
    pub v: i128,
}

impl QuadInt {
    pub const ZERO: QuadInt = QuadInt { u: 0, v: 0 };

    pub fn new(u: i128, v: i128) -> Self {
        QuadInt { u, v }
    }

    pub fn checked_add(self, o: QuadInt) -> Option<QuadInt> {
        Some(QuadInt { u: self.u.checked_add(o.u)?, v: self.v.checked_add(o.v)? })
    }

    pub fn checked_sub(self, o: QuadInt) -> Option<QuadInt> {
        Some(QuadInt { u: self.u.checked_sub(o.u)?, v: self.v.checked_sub(o.v)? })
    }

    pub fn add(self, o: QuadInt) -> QuadInt {
        self.checked_add(o).expect("lattice overflow")
    }

    pub fn sub(self, o: QuadInt) -> QuadInt {
        self.checked_sub(o).expect("lattice overflow")
    }

    pub fn scale(self, k: i128) -> QuadInt {
        QuadInt { u: self.u * k, v: self.v * k }
    }
}

/// `ℤ[γ]` with `γ² = aγ + b`; `a = b = 0` stands for plain `ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadRing {
    a: i128,
    b: i128,
}

impl QuadRing {
    pub fn integers() -> Self {
        QuadRing { a: 0, b: 0 }
    }

    pub fn of_field(f: &FieldSpec) -> Option<Self> {
        if !f.is_integral() {
            return None;
        }
        Some(QuadRing { a: f.a().to_integer().to_i128()?, b: f.b().to_integer().to_i128()? })
    }

    pub fn checked_mul(&self, x: QuadInt, y: QuadInt) -> Option<QuadInt> {
        let vv = x.v.checked_mul(y.v)?;
        Some(QuadInt {
            u: x.u.checked_mul(y.u)?.checked_add(self.b.checked_mul(vv)?)?,
            v: x.u
                .checked_mul(y.v)?
                .checked_add(x.v.checked_mul(y.u)?)?
                .checked_add(self.a.checked_mul(vv)?)?,
        })
    }

    pub fn mul(&self, x: QuadInt, y: QuadInt) -> QuadInt {
        self.checked_mul(x, y).expect("lattice overflow")
    }

    /// Exact sign of `u + vγ` with `γ` the larger root.
    pub fn sign(&self, x: QuadInt) -> Ordering {
        if x.v == 0 {
            return x.u.cmp(&0);
        }
        // 2(u + vγ) = (2u + av) + v·√D
        let big = |n: i128| BigInt::from(n);
        let lhs = big(2) * big(x.u) + big(self.a) * big(x.v);
        let disc = big(self.a) * big(self.a) + big(4) * big(self.b);
        let rhs_sign = x.v.cmp(&0);
        let lhs_sign = lhs.sign();
        use num_bigint::Sign;
        match (lhs_sign, rhs_sign) {
            (Sign::Plus, Ordering::Greater) | (Sign::NoSign, Ordering::Greater) => Ordering::Greater,
            (Sign::Minus, Ordering::Less) | (Sign::NoSign, Ordering::Less) => Ordering::Less,
            _ => {
                let l2 = &lhs * &lhs;
                let r2 = big(x.v) * big(x.v) * disc;
                match l2.cmp(&r2) {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => {
                        if lhs_sign == Sign::Plus {
                            Ordering::Greater
                        } else {
                            Ordering::Less
                        }
                    }
                    Ordering::Less => rhs_sign,
                }
            }
        }
    }

    pub fn cmp(&self, x: QuadInt, y: QuadInt) -> Ordering {
        self.sign(x.sub(y))
    }

    pub fn approx(&self, x: QuadInt) -> f64 {
        let d = (self.a * self.a + 4 * self.b) as f64;
        let g = (self.a as f64 + d.sqrt()) / 2.0;
        x.u as f64 + x.v as f64 * g
    }
}

fn to_quad(x: &Scalar) -> Option<QuadInt> {
    if !x.u().is_integer() || !x.v().is_integer() {
        return None;
    }
    Some(QuadInt {
        u: x.u().to_integer().to_i128()?,
        v: x.v().to_integer().to_i128()?,
    })
}

/// How a window population treats classes at the window edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowMode {
    /// Image interior meets the open window.
    Meets,
    /// Image lies inside the closed window.
    Inside,
}

/// Depth-1 arrangement cell between consecutive image endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub lo: QuadInt,
    pub hi: QuadInt,
    /// Number of depth-1 images covering the cell.
    pub multiplicity: usize,
}

impl Cell {
    pub fn length(&self) -> QuadInt {
        self.hi.sub(self.lo)
    }
}

#[derive(Clone, Debug)]
pub struct LatticeIfs {
    ring: QuadRing,
    field: Option<Arc<FieldSpec>>,
    rho: QuadInt,
    denom: i128,
    steps: Vec<QuadInt>,
    lo: QuadInt,
    hi: QuadInt,
}

impl LatticeIfs {
    /// `None` unless the expansion lies in `ℤ[γ]` and everything fits in `i128`.
    pub fn from_ifs(ifs: &LineIfs) -> Option<Self> {
        let rho_s = ifs.expansion();
        let field = rho_s
            .field()
            .or_else(|| ifs.offsets().iter().find_map(|b| b.field()))
            .or_else(|| ifs.hull().lo().field())
            .or_else(|| ifs.hull().hi().field())
            .cloned();
        let ring = match &field {
            Some(f) => QuadRing::of_field(f)?,
            None => QuadRing::integers(),
        };
        let rho = to_quad(&rho_s)?;
        let mut all: Vec<Scalar> = ifs.offsets().to_vec();
        all.push(ifs.hull().lo().clone());
        all.push(ifs.hull().hi().clone());
        let k = common_denominator(&all);
        let denom = k.to_i128()?;
        if denom > 1 << 40 {
            return None;
        }
        let ks = Scalar::rational(Rational::from_integer(k));
        let scale = &ks * &rho_s;
        let steps: Option<Vec<QuadInt>> = ifs.offsets().iter().map(|b| to_quad(&(&scale * b))).collect();
        Some(LatticeIfs {
            ring,
            field,
            rho,
            denom,
            steps: steps?,
            lo: to_quad(&(&ks * ifs.hull().lo()))?,
            hi: to_quad(&(&ks * ifs.hull().hi()))?,
        })
    }

    pub fn ring(&self) -> &QuadRing {
        &self.ring
    }

    pub fn expansion(&self) -> QuadInt {
        self.rho
    }

    pub fn denominator(&self) -> i128 {
        self.denom
    }

    pub fn steps(&self) -> &[QuadInt] {
        &self.steps
    }

    /// Scaled hull `(k·lo, k·hi)`.
    pub fn hull(&self) -> (QuadInt, QuadInt) {
        (self.lo, self.hi)
    }

    pub fn to_scalar(&self, x: QuadInt) -> Scalar {
        let u = Scalar::rational(Rational::from_integer(BigInt::from(x.u)));
        match &self.field {
            Some(f) if x.v != 0 => {
                u + Scalar::generator(f) * Scalar::rational(Rational::from_integer(BigInt::from(x.v)))
            }
            _ => u,
        }
    }

    /// Exact position of a depth-`depth` class as an offset on the line.
    pub fn offset_of(&self, x: QuadInt, depth: u32) -> Scalar {
        let rho = self.to_scalar(self.rho).pow(depth as i64).expect("nonzero expansion");
        self.to_scalar(x) / (rho * Scalar::from_int(self.denom as i64))
    }

    pub fn rho_power(&self, e: u32) -> Option<QuadInt> {
        let mut acc = QuadInt::new(1, 0);
        for _ in 0..e {
            acc = self.ring.checked_mul(acc, self.rho)?;
        }
        Some(acc)
    }

    fn children(&self, p: QuadInt) -> Option<impl Iterator<Item = QuadInt> + '_> {
        let base = self.ring.checked_mul(self.rho, p)?;
        // one overflow check on the extreme steps covers the rest
        for s in &self.steps {
            base.checked_add(*s)?;
        }
        Some(self.steps.iter().map(move |s| base.add(*s)))
    }

    fn expand(&self, level: &[QuadInt]) -> Option<HashSet<QuadInt>> {
        let parts: Option<Vec<Vec<QuadInt>>> = level
            .par_chunks(4096)
            .map(|chunk| {
                let mut out = Vec::with_capacity(chunk.len() * self.steps.len());
                for p in chunk {
                    out.extend(self.children(*p)?);
                }
                Some(out)
            })
            .collect();
        Some(parts?.into_iter().flatten().collect())
    }

    /// Distinct depth-`k` positions for `k = 1..=depth`; `None` past `cap` or on overflow.
    pub fn class_counts(&self, depth: usize, cap: usize) -> Vec<Option<u64>> {
        let mut out = Vec::with_capacity(depth);
        let mut level = vec![QuadInt::ZERO];
        for _ in 0..depth {
            if level.len().saturating_mul(self.steps.len()) > cap.saturating_mul(self.steps.len()) {
                break;
            }
            match self.expand(&level) {
                Some(next) if next.len() <= cap => {
                    out.push(Some(next.len() as u64));
                    level = next.into_iter().collect();
                }
                _ => break,
            }
        }
        out.resize(depth, None);
        out
    }

    /// Distinct depth-`depth` positions sorted by value.
    pub fn level(&self, depth: u32, cap: usize) -> Option<Vec<QuadInt>> {
        let mut level = vec![QuadInt::ZERO];
        for _ in 0..depth {
            let next = self.expand(&level)?;
            if next.len() > cap {
                return None;
            }
            level = next.into_iter().collect();
        }
        level.sort_by(|x, y| self.ring.cmp(*x, *y));
        Some(level)
    }

    /// Depth-1 arrangement cells of the hull, left to right.
    pub fn cells(&self) -> Vec<Cell> {
        let images: Vec<(QuadInt, QuadInt)> =
            self.steps.iter().map(|p| (p.add(self.lo), p.add(self.hi))).collect();
        let mut ends: Vec<QuadInt> = images.iter().flat_map(|&(a, b)| [a, b]).collect();
        ends.sort_by(|x, y| self.ring.cmp(*x, *y));
        ends.dedup();
        let (hull_lo, hull_hi) = (
            self.ring.mul(self.rho, self.lo),
            self.ring.mul(self.rho, self.hi),
        );
        ends.retain(|e| self.ring.cmp(*e, hull_lo) != Ordering::Less && self.ring.cmp(*e, hull_hi) != Ordering::Greater);
        ends.windows(2)
            .map(|w| {
                let multiplicity = images
                    .iter()
                    .filter(|(a, b)| {
                        self.ring.cmp(*a, w[0]) != Ordering::Greater && self.ring.cmp(w[1], *b) != Ordering::Greater
                    })
                    .count();
                Cell { lo: w[0], hi: w[1], multiplicity }
            })
            .collect()
    }

    /// Distinct depth-`depth` classes relative to a window given at depth-1 scale.
    pub fn window_population(&self, window: (QuadInt, QuadInt), depth: u32, mode: WindowMode) -> Option<u64> {
        assert!(depth >= 1);
        let lift = self.rho_power(depth - 1)?;
        let (wl, wr) = (self.ring.checked_mul(lift, window.0)?, self.ring.checked_mul(lift, window.1)?);
        let powers: Option<Vec<QuadInt>> = (0..=depth).map(|e| self.rho_power(e)).collect();
        let powers = powers?;
        let mut level = vec![QuadInt::ZERO];
        for m in 1..=depth {
            let next = self.expand(&level)?;
            let up = powers[(depth - m) as usize];
            let keep = |p: &QuadInt| -> Option<bool> {
                let l = self.ring.checked_mul(up, p.checked_add(self.lo)?)?;
                let r = self.ring.checked_mul(up, p.checked_add(self.hi)?)?;
                Some(self.ring.cmp(l, wr) == Ordering::Less && self.ring.cmp(r, wl) == Ordering::Greater)
            };
            let mut kept = Vec::with_capacity(next.len());
            for p in next {
                if keep(&p)? {
                    kept.push(p);
                }
            }
            level = kept;
        }
        let count = match mode {
            WindowMode::Meets => level.len(),
            WindowMode::Inside => level
                .iter()
                .filter(|p| {
                    self.ring.cmp(p.add(self.lo), wl) != Ordering::Less
                        && self.ring.cmp(p.add(self.hi), wr) != Ordering::Greater
                })
                .count(),
        };
        Some(count as u64)
    }

    /// Population of a depth-1 cell: covering classes for single cover,
    /// enclosed classes for overlaps, nothing for gaps.
    pub fn cell_population(&self, cell: &Cell, depth: u32) -> Option<u64> {
        match cell.multiplicity {
            0 => Some(0),
            1 => self.window_population((cell.lo, cell.hi), depth, WindowMode::Meets),
            _ => self.window_population((cell.lo, cell.hi), depth, WindowMode::Inside),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::CantorPair;
    use crate::ifs::generate_ifs;

    fn golden_lattice() -> LatticeIfs {
        let pair = CantorPair::golden();
        let f = pair.field().unwrap().clone();
        let lambda = Scalar::from_int(2) / Scalar::generator(&f);
        LatticeIfs::from_ifs(&generate_ifs(&pair, &lambda).unwrap()).unwrap()
    }

    #[test]
    fn ring_sign_matches_floats() {
        let r = QuadRing { a: 1, b: 1 };
        for u in -30..30 {
            for v in -30..30 {
                let x = QuadInt::new(u, v);
                let f = r.approx(x);
                if f.abs() > 1e-9 {
                    assert_eq!(r.sign(x), if f > 0.0 { Ordering::Greater } else { Ordering::Less });
                }
            }
        }
        assert_eq!(r.sign(QuadInt::ZERO), Ordering::Equal);
        // γ⁶ = 8γ + 5
        let g = QuadInt::new(0, 1);
        let mut acc = QuadInt::new(1, 0);
        for _ in 0..6 {
            acc = r.mul(acc, g);
        }
        assert_eq!(acc, QuadInt::new(5, 8));
    }

    #[test]
    fn golden_positions_and_counts() {
        let lat = golden_lattice();
        assert_eq!(lat.denominator(), 1);
        assert_eq!(lat.expansion(), QuadInt::new(5, 8));
        assert_eq!(lat.hull(), (QuadInt::new(2, -2), QuadInt::new(1, 0)));
        let counts = lat.class_counts(4, 1 << 22);
        assert_eq!(counts, vec![Some(21), Some(369), Some(6357), Some(109281)]);
        assert_eq!(lat.class_counts(3, 1000), vec![Some(21), Some(369), None]);
    }

    #[test]
    fn golden_cells_fingerprints() {
        let lat = golden_lattice();
        let cells = lat.cells();
        let r = lat.ring();
        let mut total = QuadInt::ZERO;
        for c in &cells {
            total = total.add(c.length());
            assert_eq!(r.sign(c.length()), Ordering::Greater);
        }
        // cells partition the scaled hull of width ρ·(1 + 2/γ)
        let width = r.mul(lat.expansion(), QuadInt::new(-1, 2));
        assert_eq!(total, width);
        assert_eq!(cells.iter().filter(|c| c.multiplicity == 0).count(), 2);
        let pops: Vec<u64> = cells.iter().map(|c| lat.cell_population(c, 2).unwrap()).collect();
        let weights: u64 = cells.iter().zip(&pops).map(|(_, p)| *p).sum();
        assert!(weights >= 369);
    }

    #[test]
    fn offsets_round_trip() {
        let lat = golden_lattice();
        let pair = CantorPair::golden();
        let f = pair.field().unwrap().clone();
        let ifs = generate_ifs(&pair, &(Scalar::from_int(2) / Scalar::generator(&f))).unwrap();
        let level = lat.level(1, 100).unwrap();
        let mut expected: Vec<Scalar> = ifs.offsets().to_vec();
        expected.sort();
        let got: Vec<Scalar> = level.iter().map(|p| lat.offset_of(*p, 1)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn rational_system() {
        let ifs = generate_ifs(&CantorPair::middle_rational((1, 3), (1, 3)), &Scalar::from_int(4)).unwrap();
        let lat = LatticeIfs::from_ifs(&ifs).unwrap();
        assert_eq!(lat.denominator(), 3);
        let exact = ifs.exact_class_counts(4, 1 << 20);
        assert_eq!(lat.class_counts(4, 1 << 20), exact);
        assert_eq!(exact[0], Some(4));
    }
}
