//! Local spinor norm groups θ(O⁺(L_p)) and the idèle class quotient whose
//! order is the number of proper spinor genera in a genus.
//!
//! Square classes are F₂-vectors: at ∞ one sign bit; at odd p the bits
//! (valuation parity, unit is a non-residue); at 2 the bits (valuation parity,
//! unit ≡ 3 mod 4, unit ≡ ±3 mod 8).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::arith::{is_prime, legendre, valuation};
use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::padic::{bad_primes, jordan_split, least_nonresidue, JordanComponent, JordanSplitting};

/// A place of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl Place {
    pub fn width(self) -> u32 {
        match self {
            Place::Infinite => 1,
            Place::Finite(2) => 3,
            Place::Finite(_) => 2,
        }
    }
}

/// Local square class of a nonzero integer.
pub fn square_class(x: &BigInt, place: Place) -> u8 {
    match place {
        Place::Infinite => x.is_negative() as u8,
        Place::Finite(p) => {
            let v = valuation(x, p).expect("nonzero");
            let u = x / BigInt::from(p).pow(v);
            let par = (v % 2) as u8;
            if p == 2 {
                let r = u.mod_floor(&BigInt::from(8)).to_u8().unwrap();
                par | (((r % 4 == 3) as u8) << 1) | (((r == 3 || r == 5) as u8) << 2)
            } else {
                par | (((legendre(&u, p) == -1) as u8) << 1)
            }
        }
    }
}

/// Positive integer representative p^v·u of a local square class.
pub fn class_representative(bits: u8, p: u64) -> u64 {
    let pv = if bits & 1 == 1 { p } else { 1 };
    let u = if p == 2 {
        match (bits >> 1) & 3 {
            0 => 1,
            3 => 3,
            2 => 5,
            _ => 7,
        }
    } else if bits & 2 != 0 {
        least_nonresidue(p)
    } else {
        1
    };
    pv * u
}

/// Reduced row echelon basis of an F₂-subspace, vectors as bitmasks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct F2Span {
    rows: Vec<u64>,
}

impl F2Span {
    pub fn insert(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let pivot = 63 - v.leading_zeros();
        for r in self.rows.iter_mut() {
            if *r >> pivot & 1 == 1 {
                *r ^= v;
            }
        }
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    /// Canonical representative of v modulo the span.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let pivot = 63 - r.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.rows
    }

    pub fn elements(&self) -> Vec<u64> {
        let mut out = vec![0u64];
        for &r in &self.rows {
            let extra: Vec<u64> = out.iter().map(|&x| x ^ r).collect();
            out.extend(extra);
        }
        out.sort_unstable();
        out
    }
}

/// θ(O⁺(L_p)) as a subgroup of Q_p^×/(Q_p^×)².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinorNormGroup {
    pub prime: u64,
    pub span: F2Span,
    pub contains_units: bool,
    /// Square class of the norm of some vector whose symmetry lies in O(L_p).
    pub symmetry_norm: u8,
}

impl SpinorNormGroup {
    /// Representatives p^v·u of the classes in θ, ascending.
    pub fn representatives(&self) -> Vec<u64> {
        let mut r: Vec<u64> = self.span.elements().into_iter().map(|b| class_representative(b as u8, self.prime)).collect();
        r.sort_unstable();
        r
    }
}

impl fmt::Display for SpinorNormGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.representatives().iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", r.join(","))
    }
}

fn group_from_norms(prime: u64, norms: &BTreeSet<u8>) -> SpinorNormGroup {
    let mut span = F2Span::default();
    let first = *norms.iter().next().expect("some symmetry exists");
    for &c in norms {
        span.insert((c ^ first) as u64);
    }
    let contains_units = if prime == 2 { span.contains(0b010) && span.contains(0b100) } else { span.contains(0b10) };
    SpinorNormGroup { prime, span, contains_units, symmetry_norm: first }
}

/// Square classes of Q(v) over primitive v with τ_v ∈ O(L_p).
pub fn symmetry_norm_classes(split: &JordanSplitting) -> BTreeSet<u8> {
    let p = split.prime;
    let mut out = BTreeSet::new();
    if p != 2 {
        let delta = least_nonresidue(p);
        for c in &split.components {
            let par = (c.scale % 2) as u8;
            if c.rank() >= 2 {
                out.insert(par);
                out.insert(par | 2);
            } else {
                out.insert(par | (((c.units[0] == delta) as u8) << 1));
            }
        }
        return out;
    }
    dyadic_symmetry_norms(split)
}

/// Values mod 2^k of the unit form of a component on primitive vectors, for k ≤ 4.
fn primitive_values(c: &JordanComponent) -> Vec<BTreeSet<u32>> {
    let unit = JordanComponent { scale: 0, ..c.clone() };
    let g = unit.model_gram();
    let n = g.len();
    let g: Vec<Vec<i64>> = g.iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
    let mut out = vec![BTreeSet::from([0u32])];
    for k in 1..=4u32 {
        let m = 1i64 << k;
        let mut vals = BTreeSet::new();
        let total = (m as u64).pow(n as u32);
        for idx in 0..total {
            let mut w = vec![0i64; n];
            let mut t = idx;
            for x in w.iter_mut() {
                *x = (t % m as u64) as i64;
                t /= m as u64;
            }
            if w.iter().all(|x| x % 2 == 0) {
                continue;
            }
            let mut q = 0i64;
            for i in 0..n {
                for j in 0..n {
                    q += g[i][j] * w[i] * w[j];
                }
            }
            vals.insert(q.rem_euclid(m) as u32);
        }
        out.push(vals);
    }
    out
}

fn dyadic_symmetry_norms(split: &JordanSplitting) -> BTreeSet<u8> {
    let comps = &split.components;
    let values: Vec<Vec<BTreeSet<u32>>> = comps.iter().map(primitive_values).collect();
    let t = comps.iter().map(|c| c.scale).max().unwrap_or(0);
    let mut out = BTreeSet::new();
    for e in 0..=t {
        let modulus: u64 = 1 << (e + 4);
        // per component: (r, contribution set) options; None = w_s = 0
        let mut options: Vec<Vec<Option<(u32, Vec<u64>)>>> = Vec::new();
        for (c, vals) in comps.iter().zip(&values) {
            let s = c.scale;
            let mut opts: Vec<Option<(u32, Vec<u64>)>> = vec![None];
            let rmin = e.saturating_sub(s);
            let mut r = rmin;
            loop {
                let shift = s + 2 * r;
                if shift >= e + 4 {
                    if r == 0 {
                        opts.push(Some((0, vec![0])));
                    }
                    break;
                }
                let k = e + 4 - shift;
                let contrib: Vec<u64> = vals[k as usize].iter().map(|&q| ((q as u64) << shift) % modulus).collect();
                opts.push(Some((r, contrib)));
                r += 1;
            }
            options.push(opts);
        }
        let mut choice = vec![0usize; comps.len()];
        loop {
            let mut has_prim = false;
            let mut min_level = u32::MAX;
            for (i, &ci) in choice.iter().enumerate() {
                if let Some((r, _)) = &options[i][ci] {
                    has_prim |= *r == 0;
                    min_level = min_level.min(comps[i].scale + r);
                }
            }
            if has_prim && min_level == e {
                let mut sums: BTreeSet<u64> = BTreeSet::from([0]);
                for (i, &ci) in choice.iter().enumerate() {
                    if let Some((_, contrib)) = &options[i][ci] {
                        let mut next = BTreeSet::new();
                        for &a in &sums {
                            for &b in contrib {
                                next.insert((a + b) % modulus);
                            }
                        }
                        sums = next;
                    }
                }
                for x in sums {
                    if x == 0 {
                        continue;
                    }
                    let ord = x.trailing_zeros();
                    if ord == e || ord == e + 1 {
                        let u = (x >> ord) % 8;
                        let bits = (ord % 2) as u8 | (((u % 4 == 3) as u8) << 1) | (((u == 3 || u == 5) as u8) << 2);
                        out.insert(bits);
                    }
                }
            }
            // advance odometer
            let mut i = 0;
            while i < choice.len() {
                choice[i] += 1;
                if choice[i] < options[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
        }
    }
    out
}

pub fn theta_from_split(split: &JordanSplitting) -> SpinorNormGroup {
    group_from_norms(split.prime, &symmetry_norm_classes(split))
}

pub fn theta_group(lat: &GramLattice, p: u64) -> Result<SpinorNormGroup> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(theta_from_split(&jordan_split(lat, p)?))
}

/// Dyadic splittings whose spinor norm group contains every unit.
pub fn is_type_e(split: &JordanSplitting) -> bool {
    split.prime == 2 && theta_from_split(split).contains_units
}

/// J_Q / (Q^× · Π θ(O⁺(L_p))) reduced to the places S = {∞} ∪ {p | 2d}.
#[derive(Clone, Debug)]
pub struct IdeleClassQuotient {
    pub places: Vec<Place>,
    offsets: Vec<u32>,
    pub ambient_dim: u32,
    relations: F2Span,
    improper: F2Span,
    pub thetas: BTreeMap<u64, SpinorNormGroup>,
    /// Class of the improper twist; zero iff every spinor genus is a proper one.
    pub delta: u64,
}

impl IdeleClassQuotient {
    pub fn from_thetas(thetas: BTreeMap<u64, SpinorNormGroup>) -> Self {
        let mut places = vec![Place::Infinite];
        places.extend(thetas.keys().map(|&p| Place::Finite(p)));
        let mut offsets = Vec::new();
        let mut off = 0;
        for pl in &places {
            offsets.push(off);
            off += pl.width();
        }
        let mut q = IdeleClassQuotient {
            places,
            offsets,
            ambient_dim: off,
            relations: F2Span::default(),
            improper: F2Span::default(),
            thetas,
            delta: 0,
        };
        let mut rel = F2Span::default();
        for (i, pl) in q.places.iter().enumerate() {
            if let Place::Finite(p) = pl {
                for &b in q.thetas[p].span.basis() {
                    rel.insert(b << q.offsets[i]);
                }
            }
        }
        rel.insert(q.diagonal(&BigInt::from(-1)));
        for pl in q.places.clone() {
            if let Place::Finite(p) = pl {
                rel.insert(q.diagonal(&BigInt::from(p)));
            }
        }
        q.relations = rel;
        let mut delta = 0u64;
        for (i, pl) in q.places.iter().enumerate() {
            if let Place::Finite(p) = pl {
                delta |= (q.thetas[p].symmetry_norm as u64) << q.offsets[i];
            }
        }
        q.delta = q.relations.reduce(delta);
        q.improper = q.relations.clone();
        q.improper.insert(q.delta);
        q
    }

    /// Image of the principal idèle x at the places of S (unreduced).
    pub fn diagonal(&self, x: &BigInt) -> u64 {
        let mut v = 0u64;
        for (i, pl) in self.places.iter().enumerate() {
            v |= (square_class(x, *pl) as u64) << self.offsets[i];
        }
        v
    }

    pub fn reduce(&self, v: u64) -> u64 {
        self.relations.reduce(v)
    }

    /// Reduction modulo the relations and the improper twist.
    pub fn reduce_improper(&self, v: u64) -> u64 {
        self.improper.reduce(v)
    }

    pub fn dim(&self) -> u32 {
        self.ambient_dim - self.relations.dim() as u32
    }

    pub fn g_plus(&self) -> u64 {
        1 << self.dim()
    }

    pub fn g(&self) -> u64 {
        if self.delta == 0 {
            self.g_plus()
        } else {
            self.g_plus() / 2
        }
    }

    /// Reduced class of the idèle carrying q at the place q, for q ∉ S.
    pub fn prime_image(&self, q: u64) -> Result<u64> {
        if self.places.contains(&Place::Finite(q)) || !is_prime(q) {
            return Err(Error::BadPrime(q));
        }
        Ok(self.reduce(self.diagonal(&BigInt::from(q))))
    }
}

pub fn idele_quotient(lat: &GramLattice) -> Result<IdeleClassQuotient> {
    let mut thetas = BTreeMap::new();
    for p in bad_primes(lat) {
        thetas.insert(p, theta_group(lat, p)?);
    }
    Ok(IdeleClassQuotient::from_thetas(thetas))
}

pub fn g_plus(lat: &GramLattice) -> Result<u64> {
    Ok(idele_quotient(lat)?.g_plus())
}

pub fn g(lat: &GramLattice) -> Result<u64> {
    Ok(idele_quotient(lat)?.g())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::dyadic_diagonal;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_rows(rows).unwrap()
    }

    #[test]
    fn case_three_theta() {
        let split = dyadic_diagonal(&[(0, 3), (4, 3), (4, 7), (8, 7)]);
        let th = theta_from_split(&split);
        assert_eq!(th.representatives(), vec![1, 5, 6, 14]);
        assert!(!is_type_e(&split));
    }

    #[test]
    fn type_e_configurations() {
        assert!(is_type_e(&dyadic_diagonal(&[(0, 1), (1, 1), (2, 3), (6, 7)])));
        assert!(is_type_e(&dyadic_diagonal(&[(0, 1), (1, 1), (3, 3), (7, 7)])));
    }

    #[test]
    fn unimodular_places() {
        let i4 = lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let q = idele_quotient(&i4).unwrap();
        assert_eq!(q.g_plus(), 1);
        assert_eq!(q.prime_image(3).unwrap(), 0);
        let th = theta_group(&i4, 5).unwrap();
        assert!(th.contains_units);
        assert_eq!(th.representatives(), vec![1, 2]);
    }

    #[test]
    fn disc_729_genus_has_two_spinor_genera() {
        let l1 = lat(&[&[2, 0, 0, 1], &[0, 6, 3, 0], &[0, 3, 6, 0], &[1, 0, 0, 14]]);
        let q = idele_quotient(&l1).unwrap();
        assert_eq!(q.g_plus(), 2);
        assert_eq!(q.g(), 2);
    }

    #[test]
    fn f2_span_reduction() {
        let mut s = F2Span::default();
        assert!(s.insert(0b110));
        assert!(s.insert(0b011));
        assert!(!s.insert(0b101));
        assert_eq!(s.dim(), 2);
        assert_eq!(s.elements().len(), 4);
        assert_eq!(s.reduce(0b111), s.reduce(0b001));
    }
}
