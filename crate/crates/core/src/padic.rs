//! Local structure at a prime: Jordan splittings, p-profiles, local genus
//! symbols and the dyadic order classes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{is_prime, legendre, mod_inverse, prime_divisors, valuation, valuation_capped};
use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::linalg::IntMatrix;

/// Binary unimodular dyadic blocks of type II.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryBlock {
    /// ⟨A(0,0)⟩, determinant ≡ 7 mod 8.
    Hyperbolic,
    /// ⟨A(2,2)⟩, determinant ≡ 3 mod 8.
    Anisotropic,
}

/// One p^scale-modular Jordan component, with its unit data normalised:
/// diagonal units are stored as square-class representatives (1 or the least
/// non-residue at odd p; 1, 3, 5, 7 at p = 2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JordanComponent {
    pub prime: u64,
    pub scale: u32,
    pub units: Vec<u64>,
    pub blocks: Vec<BinaryBlock>,
}

impl JordanComponent {
    pub fn rank(&self) -> usize {
        self.units.len() + 2 * self.blocks.len()
    }

    /// Type II at p = 2 means no odd diagonal entry; at odd p this is never set.
    pub fn is_type_ii(&self) -> bool {
        self.units.is_empty()
    }

    pub fn is_type_i(&self) -> bool {
        !self.units.is_empty()
    }

    /// Determinant of the unit form: mod 8 at p = 2, a square-class
    /// representative at odd p.
    pub fn det_unit(&self) -> u64 {
        if self.prime == 2 {
            let mut d = 1u64;
            for &u in &self.units {
                d = d * u % 8;
            }
            for b in &self.blocks {
                d = d * if *b == BinaryBlock::Hyperbolic { 7 } else { 3 } % 8;
            }
            d
        } else if self.det_is_square() {
            1
        } else {
            least_nonresidue(self.prime)
        }
    }

    /// Odd p: whether the unit determinant is a square mod p.
    pub fn det_is_square(&self) -> bool {
        debug_assert!(self.prime != 2);
        let nonres = self.units.iter().filter(|&&u| u != 1).count();
        nonres % 2 == 0
    }

    /// Sum of diagonal units mod 8 (p = 2).
    pub fn oddity(&self) -> u8 {
        (self.units.iter().sum::<u64>() % 8) as u8
    }

    /// Octane value mod 8 (p = 2): ±1 per diagonal unit ≡ ±1 mod 4... counted
    /// as +1 for units ≡ 1 mod 4 and −1 for units ≡ 3 mod 4, plus 4 per 𝔸.
    pub fn octane(&self) -> i64 {
        let mut o: i64 = 0;
        for &u in &self.units {
            o += if u % 4 == 1 { 1 } else { -1 };
        }
        o += 4 * self.blocks.iter().filter(|b| **b == BinaryBlock::Anisotropic).count() as i64;
        o.rem_euclid(8)
    }

    /// A block-diagonal integral Gram matrix in the same local class.
    pub fn model_gram(&self) -> IntMatrix {
        let n = self.rank();
        let s = BigInt::from(self.prime).pow(self.scale);
        let mut g = crate::linalg::zeros(n, n);
        let mut k = 0;
        for &u in &self.units {
            g[k][k] = &s * u;
            k += 1;
        }
        for b in &self.blocks {
            let (a, c) = match b {
                BinaryBlock::Anisotropic => (2, 2),
                BinaryBlock::Hyperbolic => (2, 4),
            };
            g[k][k] = &s * a;
            g[k + 1][k + 1] = &s * c;
            g[k][k + 1] = s.clone();
            g[k + 1][k] = s.clone();
            k += 2;
        }
        g
    }
}

pub(crate) fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| legendre(&BigInt::from(a), p) == -1).expect("odd prime")
}

/// Jordan splitting of L_p; components have strictly increasing scale.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JordanSplitting {
    pub prime: u64,
    pub components: Vec<JordanComponent>,
}

impl JordanSplitting {
    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank()).sum()
    }

    pub fn profile(&self) -> PProfile {
        let mut exps = Vec::new();
        for c in &self.components {
            exps.extend(std::iter::repeat(c.scale).take(c.rank()));
        }
        PProfile { prime: self.prime, exps }
    }

    pub fn component(&self, scale: u32) -> Option<&JordanComponent> {
        self.components.iter().find(|c| c.scale == scale)
    }

    /// Block-diagonal Gram matrix with the same localisation.
    pub fn model_gram(&self) -> IntMatrix {
        let n = self.rank();
        let mut g = crate::linalg::zeros(n, n);
        let mut k = 0;
        for c in &self.components {
            let m = c.model_gram();
            for i in 0..m.len() {
                for j in 0..m.len() {
                    g[k + i][k + j] = m[i][j].clone();
                }
            }
            k += m.len();
        }
        g
    }

    /// Local symbol of this splitting.
    pub fn symbol(&self) -> LocalSymbol {
        if self.prime == 2 {
            LocalSymbol::Dyadic(canonical_dyadic(self))
        } else {
            LocalSymbol::Odd(
                self.components
                    .iter()
                    .map(|c| (c.scale, c.rank(), if c.det_is_square() { 1 } else { -1 }))
                    .collect(),
            )
        }
    }
}

/// Sorted multiset of Jordan scale exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PProfile {
    pub prime: u64,
    pub exps: Vec<u32>,
}

impl PProfile {
    pub fn new(prime: u64, mut exps: Vec<u32>) -> Self {
        exps.sort_unstable();
        PProfile { prime, exps }
    }
}

impl fmt::Display for PProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.exps.iter().map(|x| x.to_string()).collect();
        write!(f, "({})_{}", e.join(","), self.prime)
    }
}

fn reduce_mod(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

/// Jordan splitting by pivoting on minimal-valuation entries modulo p^N, with N
/// beyond the largest scale that can occur.
pub fn jordan_split(lat: &GramLattice, p: u64) -> Result<JordanSplitting> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let d = lat.discriminant();
    let vd = valuation(&d, p).unwrap_or(0);
    let prec = vd + 6;
    let modulus = BigInt::from(p).pow(prec);
    let n = lat.rank();
    let mut m: IntMatrix = lat.gram().iter().map(|r| r.iter().map(|x| reduce_mod(x, &modulus)).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    // (scale, unit) or (scale, block)
    let mut pieces: Vec<(u32, Option<BigInt>, Option<BinaryBlock>)> = Vec::new();
    let val = |x: &BigInt| valuation_capped(x, p, prec);
    let pp = BigInt::from(p);

    while !active.is_empty() {
        let mut best_diag: Option<(u32, usize)> = None;
        let mut best_off: Option<(u32, usize, usize)> = None;
        for (a, &i) in active.iter().enumerate() {
            let v = val(&m[i][i]);
            if best_diag.map_or(true, |(bv, _)| v < bv) {
                best_diag = Some((v, i));
            }
            for &j in &active[a + 1..] {
                let v = val(&m[i][j]);
                if best_off.map_or(true, |(bv, _, _)| v < bv) {
                    best_off = Some((v, i, j));
                }
            }
        }
        let (dv, di) = best_diag.unwrap();
        let use_diag = match best_off {
            None => true,
            Some((ov, _, _)) => dv <= ov,
        };
        if dv >= prec && best_off.map_or(true, |(ov, _, _)| ov >= prec) {
            return Err(Error::Overflow("jordan precision"));
        }
        if use_diag || p != 2 {
            let piv = if use_diag {
                di
            } else {
                let (_, i, j) = best_off.unwrap();
                // e_i <- e_i + e_j makes the diagonal attain the minimal valuation
                for k in 0..n {
                    let t = &m[i][k] + &m[j][k];
                    m[i][k] = reduce_mod(&t, &modulus);
                }
                for k in 0..n {
                    let t = &m[k][i] + &m[k][j];
                    m[k][i] = reduce_mod(&t, &modulus);
                }
                i
            };
            let v = val(&m[piv][piv]);
            let pv = pp.pow(v);
            let unit = &m[piv][piv] / &pv;
            let inv = mod_inverse(&unit, &modulus).expect("unit");
            for &j in active.iter().filter(|&&j| j != piv) {
                if m[piv][j].is_zero() {
                    continue;
                }
                let c = reduce_mod(&(&m[piv][j] / &pv * &inv), &modulus);
                // e_j <- e_j - c e_piv
                for k in 0..n {
                    let t = &m[j][k] - &c * &m[piv][k];
                    m[j][k] = reduce_mod(&t, &modulus);
                }
                for k in 0..n {
                    let t = &m[k][j] - &c * &m[k][piv];
                    m[k][j] = reduce_mod(&t, &modulus);
                }
            }
            pieces.push((v, Some(unit), None));
            active.retain(|&x| x != piv);
        } else {
            let (v, i, j) = best_off.unwrap();
            let pv = pp.pow(v);
            let a = &m[i][i] / &pv;
            let b = &m[i][j] / &pv;
            let c = &m[j][j] / &pv;
            let det = &a * &c - &b * &b;
            let dinv = mod_inverse(&det, &modulus).expect("unit block determinant");
            for &k in active.iter().filter(|&&k| k != i && k != j) {
                let yi = &m[i][k] / &pv;
                let yj = &m[j][k] / &pv;
                // solve [[a,b],[b,c]] (x,y) = (yi,yj)
                let x = reduce_mod(&((&c * &yi - &b * &yj) * &dinv), &modulus);
                let y = reduce_mod(&((&a * &yj - &b * &yi) * &dinv), &modulus);
                for t in 0..n {
                    let val_t = &m[k][t] - &x * &m[i][t] - &y * &m[j][t];
                    m[k][t] = reduce_mod(&val_t, &modulus);
                }
                for t in 0..n {
                    let val_t = &m[t][k] - &x * &m[t][i] - &y * &m[t][j];
                    m[t][k] = reduce_mod(&val_t, &modulus);
                }
            }
            let det8 = det.mod_floor(&BigInt::from(8)).to_u64().unwrap();
            let block = if det8 == 7 { BinaryBlock::Hyperbolic } else { BinaryBlock::Anisotropic };
            pieces.push((v, None, Some(block)));
            active.retain(|&x| x != i && x != j);
        }
    }

    let mut by_scale: BTreeMap<u32, JordanComponent> = BTreeMap::new();
    let nonres = if p == 2 { 0 } else { least_nonresidue(p) };
    for (s, unit, block) in pieces {
        let comp = by_scale
            .entry(s)
            .or_insert_with(|| JordanComponent { prime: p, scale: s, units: Vec::new(), blocks: Vec::new() });
        if let Some(u) = unit {
            let rep = if p == 2 {
                u.mod_floor(&BigInt::from(8)).to_u64().unwrap()
            } else if legendre(&u, p) == 1 {
                1
            } else {
                nonres
            };
            comp.units.push(rep);
        }
        if let Some(b) = block {
            comp.blocks.push(b);
        }
    }
    let mut components: Vec<JordanComponent> = by_scale.into_values().collect();
    for c in components.iter_mut() {
        c.units.sort_unstable();
        c.blocks.sort_unstable();
    }
    Ok(JordanSplitting { prime: p, components })
}

pub fn p_profile(lat: &GramLattice, p: u64) -> Result<PProfile> {
    Ok(jordan_split(lat, p)?.profile())
}

/// Dyadic constituent [scale, rank, sign, odd, oddity] of the canonical symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicConstituent {
    pub scale: u32,
    pub rank: usize,
    pub sign: i8,
    pub odd: bool,
    pub oddity: u8,
}

/// Local invariants that decide local isometry among lattices of equal rank
/// and discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalSymbol {
    Odd(Vec<(u32, usize, i8)>),
    Dyadic(Vec<DyadicConstituent>),
}

impl fmt::Display for LocalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalSymbol::Odd(v) => {
                for (s, r, e) in v {
                    write!(f, "[{s},{r},{}]", if *e > 0 { '+' } else { '-' })?;
                }
            }
            LocalSymbol::Dyadic(v) => {
                for c in v {
                    write!(
                        f,
                        "[{},{},{},{},{}]",
                        c.scale,
                        c.rank,
                        if c.sign > 0 { '+' } else { '-' },
                        if c.odd { "I" } else { "II" },
                        c.oddity
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn compartments(sym: &[DyadicConstituent]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sym.len() {
        if sym[i].odd {
            let mut v = sym[i].scale;
            let mut c = Vec::new();
            while i < sym.len() && sym[i].odd && sym[i].scale == v {
                c.push(i);
                i += 1;
                v += 1;
            }
            out.push(c);
        } else {
            i += 1;
        }
    }
    out
}

fn trains(sym: &[DyadicConstituent]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0];
    for i in 1..sym.len() {
        let (prev, now) = (&sym[i - 1], &sym[i]);
        let gap = now.scale - prev.scale;
        let split = gap > 2 || (gap == 2 && !(prev.odd && now.odd)) || (!prev.odd && !now.odd);
        if split {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(i);
    }
    out.push(cur);
    out
}

/// Canonical 2-adic symbol: oddity fusion within compartments, then sign
/// walking within trains so that only the first sign of a train may be −.
fn canonical_dyadic(split: &JordanSplitting) -> Vec<DyadicConstituent> {
    let mut sym: Vec<DyadicConstituent> = split
        .components
        .iter()
        .map(|c| {
            let d = c.det_unit();
            DyadicConstituent {
                scale: c.scale,
                rank: c.rank(),
                sign: if d == 1 || d == 7 { 1 } else { -1 },
                odd: c.is_type_i(),
                oddity: if c.is_type_i() { c.oddity() } else { 0 },
            }
        })
        .collect();
    if sym.is_empty() {
        return sym;
    }
    let comps = compartments(&sym);
    for c in &comps {
        let total = c.iter().map(|&i| sym[i].oddity as u32).sum::<u32>() % 8;
        for &i in c {
            sym[i].oddity = 0;
        }
        sym[c[0]].oddity = total as u8;
    }
    for train in trains(&sym) {
        for &t1 in train.iter().skip(1).rev() {
            if sym[t1].sign == -1 {
                sym[t1].sign = 1;
                sym[t1 - 1].sign = -sym[t1 - 1].sign;
                for c in &comps {
                    if c.contains(&(t1 - 1)) || c.contains(&t1) {
                        sym[c[0]].oddity = (sym[c[0]].oddity + 4) % 8;
                    }
                }
            }
        }
    }
    sym
}

pub fn local_symbol(lat: &GramLattice, p: u64) -> Result<LocalSymbol> {
    Ok(jordan_split(lat, p)?.symbol())
}

/// Local isometry of L_p and M_p for lattices of the same rank and discriminant.
pub fn local_isometric(l: &GramLattice, m: &GramLattice, p: u64) -> Result<bool> {
    if l.rank() != m.rank() {
        return Err(Error::RankMismatch(l.rank(), m.rank()));
    }
    let (dl, dm) = (l.discriminant(), m.discriminant());
    if valuation(&dl, p) != valuation(&dm, p) {
        return Ok(false);
    }
    Ok(local_symbol(l, p)? == local_symbol(m, p)?)
}

/// Rank, discriminant and the local symbols at every prime dividing 2d.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenusSymbol {
    pub rank: usize,
    pub discriminant: BigInt,
    pub local: BTreeMap<u64, LocalSymbol>,
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.rank, self.discriminant)?;
        for (p, s) in &self.local {
            write!(f, " {p}:{s}")?;
        }
        Ok(())
    }
}

pub fn bad_primes(lat: &GramLattice) -> Vec<u64> {
    let mut ps = prime_divisors(&(lat.discriminant() * 2));
    ps.dedup();
    ps
}

pub fn genus_symbol(lat: &GramLattice) -> Result<GenusSymbol> {
    let mut local = BTreeMap::new();
    for p in bad_primes(lat) {
        local.insert(p, local_symbol(lat, p)?);
    }
    Ok(GenusSymbol { rank: lat.rank(), discriminant: lat.discriminant(), local })
}

/// Order class of a binary unimodular dyadic lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderClass {
    Even,
    Odd,
    Neither,
}

/// Classifies a rank-2 scale-0 dyadic component by the square classes of its
/// primitive values.
pub fn binary_order_class(c: &JordanComponent) -> Result<OrderClass> {
    if c.prime != 2 || c.rank() != 2 || c.scale != 0 {
        return Err(Error::WrongComponent(format!("{c:?}")));
    }
    if !c.blocks.is_empty() {
        return Ok(OrderClass::Odd);
    }
    let (a, b) = (c.units[0], c.units[1]);
    // ⟨a,b⟩ ≅ ⟨a, a·d⟩; the four "neither" classes are ⟨1,1⟩, ⟨3,3⟩, ⟨3,7⟩, ⟨1,5⟩
    let neither = [(1, 1), (3, 3), (3, 7), (1, 5)];
    let same = |x: (u64, u64)| binary_isometric((a, b), x);
    if neither.iter().any(|&x| same(x)) {
        Ok(OrderClass::Neither)
    } else {
        Ok(OrderClass::Even)
    }
}

/// L_2 ≅ M ⊥ 2^m·M with M binary unimodular of neither odd nor even order.
pub fn is_doubled_neither(split: &JordanSplitting, m: u32) -> bool {
    if split.prime != 2 || split.components.len() != 2 {
        return false;
    }
    let (a, b) = (&split.components[0], &split.components[1]);
    if a.scale != 0 || b.scale != m || a.rank() != 2 || b.rank() != 2 || !a.blocks.is_empty() || !b.blocks.is_empty() {
        return false;
    }
    matches!(binary_order_class(a), Ok(OrderClass::Neither)) && binary_isometric((a.units[0], a.units[1]), (b.units[0], b.units[1]))
}

/// Isometry of diagonal binary unimodular dyadic forms ⟨a,b⟩ and ⟨c,d⟩.
fn binary_isometric(x: (u64, u64), y: (u64, u64)) -> bool {
    let mk = |(a, b): (u64, u64)| JordanSplitting {
        prime: 2,
        components: vec![JordanComponent { prime: 2, scale: 0, units: vec![a, b], blocks: vec![] }],
    };
    mk(x).symbol() == mk(y).symbol()
}

/// Order class of a rank-1 dyadic component 2^m⟨ε⟩: parity of m.
pub fn unary_order_class(c: &JordanComponent) -> Result<OrderClass> {
    if c.prime != 2 || c.rank() != 1 {
        return Err(Error::WrongComponent(format!("{c:?}")));
    }
    Ok(if c.scale % 2 == 0 { OrderClass::Even } else { OrderClass::Odd })
}

/// Splitting built from explicit diagonal dyadic data, e.g. ⟨3⟩⊥2⁴⟨3,7⟩.
pub fn dyadic_diagonal(entries: &[(u32, u64)]) -> JordanSplitting {
    let mut by_scale: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for &(s, u) in entries {
        by_scale.entry(s).or_default().push(u % 8);
    }
    JordanSplitting {
        prime: 2,
        components: by_scale
            .into_iter()
            .map(|(scale, mut units)| {
                units.sort_unstable();
                JordanComponent { prime: 2, scale, units, blocks: vec![] }
            })
            .collect(),
    }
}

/// A diagonal integral Gram matrix 2-adically realising the given entries.
pub fn diagonal_gram(entries: &[(u32, u64)]) -> GramLattice {
    let n = entries.len();
    let mut g = crate::linalg::zeros(n, n);
    for (i, &(s, u)) in entries.iter().enumerate() {
        g[i][i] = BigInt::from(u) * BigInt::from(2u32).pow(s);
    }
    GramLattice::new(g).expect("positive diagonal")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_rows(rows).unwrap()
    }

    #[test]
    fn profiles_at_three() {
        let l1 = lat(&[&[2, 0, 0, 1], &[0, 6, 3, 0], &[0, 3, 6, 0], &[1, 0, 0, 14]]);
        assert_eq!(p_profile(&l1, 3).unwrap().exps, vec![0, 1, 2, 3]);
        let m2 = lat(&[&[4, 2, 1, 1], &[2, 4, -1, 2], &[1, -1, 10, 4], &[1, 2, 4, 10]]);
        assert_eq!(p_profile(&m2, 3).unwrap().exps, vec![0, 1, 2, 3]);
        let i4 = lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert_eq!(p_profile(&i4, 5).unwrap().exps, vec![0, 0, 0, 0]);
    }

    #[test]
    fn dyadic_split_of_k1() {
        let k1 = lat(&[&[4, 2, -1, 0], &[2, 10, 4, 0], &[-1, 4, 10, 3], &[0, 0, 3, 12]]);
        let s = jordan_split(&k1, 2).unwrap();
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.components[0].blocks, vec![BinaryBlock::Hyperbolic]);
        let model = dyadic_diagonal(&[(1, 1), (1, 7)]);
        assert_eq!(s.components[1].scale, 1);
        let ours = JordanSplitting { prime: 2, components: vec![s.components[1].clone()] };
        assert_eq!(ours.symbol(), model.symbol());
    }

    #[test]
    fn valuation_sum_matches_determinant() {
        let l = lat(&[&[2, 1, 0, 0], &[1, 14, 0, 0], &[0, 0, 6, 3], &[0, 0, 3, 6]]);
        for p in [2, 3, 5] {
            let s = jordan_split(&l, p).unwrap();
            let sum: u32 = s.components.iter().map(|c| c.scale * c.rank() as u32).sum();
            assert_eq!(Some(sum), valuation(&l.discriminant(), p).or(Some(0)));
        }
    }

    #[test]
    fn known_dyadic_equivalences() {
        // ⟨1,1⟩ ≅ ⟨5,5⟩, ⟨1,3⟩ ≅ ⟨5,7⟩; ⟨1,1⟩ ≇ ⟨3,3⟩
        assert!(binary_isometric((1, 1), (5, 5)));
        assert!(binary_isometric((1, 3), (5, 7)));
        assert!(!binary_isometric((1, 1), (3, 3)));
        assert_ne!(dyadic_diagonal(&[(0, 1), (1, 1)]).symbol(), dyadic_diagonal(&[(0, 5), (1, 5)]).symbol());
        // ⟨1,1,1⟩ ≅ ⟨3,3,3⟩? oddity 3 vs 9≡1: no
        assert_ne!(dyadic_diagonal(&[(0, 1), (0, 1), (0, 1)]).symbol(), dyadic_diagonal(&[(0, 3), (0, 3), (0, 3)]).symbol());
        // ⟨1,1,1,1⟩ ≅ ⟨3,3,3,3⟩ (det 1, oddity 4)
        assert_eq!(
            dyadic_diagonal(&[(0, 1), (0, 1), (0, 1), (0, 1)]).symbol(),
            dyadic_diagonal(&[(0, 3), (0, 3), (0, 3), (0, 3)]).symbol()
        );
    }

    // brute force: some T mod 16 with Tᵀ diag(a) T ≡ diag(b) mod 16
    fn brute_binary(a: [i64; 2], b: [i64; 2]) -> bool {
        for t in 0..16i64.pow(4) {
            let (p, q, r, s) = (t % 16, t / 16 % 16, t / 256 % 16, t / 4096);
            if (p * s - q * r) % 2 == 0 {
                continue;
            }
            let e11 = a[0] * p * p + a[1] * r * r;
            let e12 = a[0] * p * q + a[1] * r * s;
            let e22 = a[0] * q * q + a[1] * s * s;
            if (e11 - b[0]) % 16 == 0 && e12 % 16 == 0 && (e22 - b[1]) % 16 == 0 {
                return true;
            }
        }
        false
    }

    #[test]
    fn dyadic_symbol_matches_brute_force() {
        let mut entries = Vec::new();
        for s in [0u32, 1] {
            for u in [1u64, 3, 5, 7] {
                entries.push((s, u));
            }
        }
        for &x0 in &entries {
            for &x1 in &entries {
                if x1 < x0 {
                    continue;
                }
                for &y0 in &entries {
                    for &y1 in &entries {
                        if y1 < y0 || (x0.0 + x1.0) != (y0.0 + y1.0) {
                            continue;
                        }
                        let sym = dyadic_diagonal(&[x0, x1]).symbol() == dyadic_diagonal(&[y0, y1]).symbol();
                        let v = |(s, u): (u32, u64)| (u as i64) << s;
                        let brute = brute_binary([v(x0), v(x1)], [v(y0), v(y1)]);
                        assert_eq!(sym, brute, "{x0:?}{x1:?} vs {y0:?}{y1:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn order_classes() {
        let h = JordanComponent { prime: 2, scale: 0, units: vec![], blocks: vec![BinaryBlock::Hyperbolic] };
        assert_eq!(binary_order_class(&h).unwrap(), OrderClass::Odd);
        let a = JordanComponent { prime: 2, scale: 0, units: vec![], blocks: vec![BinaryBlock::Anisotropic] };
        assert_eq!(binary_order_class(&a).unwrap(), OrderClass::Odd);
        let d = JordanComponent { prime: 2, scale: 0, units: vec![1, 5], blocks: vec![] };
        assert_eq!(binary_order_class(&d).unwrap(), OrderClass::Neither);
        let e = JordanComponent { prime: 2, scale: 0, units: vec![1, 7], blocks: vec![] };
        assert_eq!(binary_order_class(&e).unwrap(), OrderClass::Even);
        let u = JordanComponent { prime: 2, scale: 0, units: vec![3], blocks: vec![] };
        assert_eq!(unary_order_class(&u).unwrap(), OrderClass::Even);
        let u = JordanComponent { prime: 2, scale: 1, units: vec![1], blocks: vec![] };
        assert_eq!(unary_order_class(&u).unwrap(), OrderClass::Odd);
    }

    #[test]
    fn genus_symbols_separate_known_genera() {
        let l1 = lat(&[&[2, 0, 0, 1], &[0, 6, 3, 0], &[0, 3, 6, 0], &[1, 0, 0, 14]]);
        let l3 = lat(&[&[6, 3, 3, 3], &[3, 6, 0, 3], &[3, 0, 8, 4], &[3, 3, 4, 8]]);
        let m3 = lat(&[&[2, 1, 1, 1], &[1, 8, -1, 2], &[1, -1, 8, 2], &[1, 2, 2, 8]]);
        assert_eq!(genus_symbol(&l1).unwrap(), genus_symbol(&l3).unwrap());
        assert_ne!(genus_symbol(&l1).unwrap(), genus_symbol(&m3).unwrap());
    }
}
