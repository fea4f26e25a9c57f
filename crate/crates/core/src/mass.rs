//! Local and global masses of rank 3 and 4 lattices.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_square, kronecker, legendre, squarefree_decomposition};
use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::padic::{bad_primes, jordan_split, JordanSplitting};

/// Exact value coeff·√radicand with radicand squarefree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MassValue {
    pub coeff: BigRational,
    pub radicand: BigInt,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl MassValue {
    pub fn rational(q: BigRational) -> Self {
        MassValue { coeff: q, radicand: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    /// √n for a positive integer n.
    pub fn sqrt(n: &BigInt) -> Self {
        let (core, root) = squarefree_decomposition(n);
        MassValue { coeff: BigRational::from_integer(root), radicand: core }
    }

    /// p^(e/2) for an integer e.
    pub fn half_power(p: u64, e: i64) -> Self {
        let pb = BigInt::from(p);
        let half = e.div_euclid(2);
        let mut c = BigRational::from_integer(pb.pow(half.unsigned_abs() as u32));
        if half < 0 {
            c = c.recip();
        }
        let radicand = if e.rem_euclid(2) == 1 { pb } else { BigInt::one() };
        MassValue { coeff: c, radicand }
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_one()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prod = &self.radicand * &other.radicand;
        let (core, root) = squarefree_decomposition(&prod);
        MassValue { coeff: &self.coeff * &other.coeff * BigRational::from_integer(root), radicand: core }
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        MassValue { coeff: &self.coeff * q, radicand: self.radicand.clone() }
    }

    pub fn recip(&self) -> Self {
        // 1/(c√r) = √r/(c r)
        MassValue {
            coeff: (self.coeff.clone() * BigRational::from_integer(self.radicand.clone())).recip(),
            radicand: self.radicand.clone(),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    /// Square of the value, a rational.
    pub fn squared(&self) -> BigRational {
        &self.coeff * &self.coeff * BigRational::from_integer(self.radicand.clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN) * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// Comparison of positive values.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        self.squared().cmp(&other.squared())
    }
}

impl fmt::Display for MassValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.coeff)
        } else {
            write!(f, "{}*sqrt({})", self.coeff, self.radicand)
        }
    }
}

/// Species label of a Jordan component, with its mass factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesId {
    pub scale: i64,
    pub dim: usize,
    pub bound: bool,
    /// Species number; for even species `sign` is ±1, for odd species 0.
    pub species: i32,
    pub sign: i8,
    pub factor: BigRational,
}

impl fmt::Display for SpeciesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 0 && self.bound {
            return write!(f, "bound 0");
        }
        match self.sign {
            0 => write!(f, "{}", self.species),
            1 => write!(f, "{}+", self.species),
            _ => write!(f, "{}-", self.species),
        }
    }
}

fn species_factor(p: u64, s: i32, sign: i8) -> BigRational {
    let pinv2 = rat(1, (p * p) as i64);
    let mut denom = rat(2, 1);
    if s % 2 != 0 {
        for i in 1..=(s - 1) / 2 {
            denom *= BigRational::one() - pinv2.pow(i as i32);
        }
    } else if s > 0 {
        for i in 1..s / 2 {
            denom *= BigRational::one() - pinv2.pow(i as i32);
        }
        let t = rat(1, p as i64).pow((s / 2) as i32);
        denom *= if sign > 0 { BigRational::one() - t } else { BigRational::one() + t };
    } else {
        return BigRational::one();
    }
    denom.recip()
}

/// Species of every Jordan component, including the 0-dimensional ones from
/// scale −1 to one beyond the largest scale.
pub fn species_list(split: &JordanSplitting) -> Vec<SpeciesId> {
    let p = split.prime;
    let max = split.components.iter().map(|c| c.scale).max().unwrap_or(0) as i64;
    let type_i = |s: i64| s >= 0 && split.component(s as u32).map_or(false, |c| c.is_type_i());
    let mut out = Vec::new();
    for s in -1..=max + 1 {
        let comp = if s >= 0 { split.component(s as u32) } else { None };
        let dim = comp.map_or(0, |c| c.rank());
        let bound = p == 2 && (type_i(s - 1) || type_i(s + 1));
        let (species, sign) = match comp {
            None => (0, 1),
            Some(c) if p != 2 => {
                let n = c.rank() as i32;
                if n % 2 == 1 {
                    (n, 0)
                } else {
                    let mut d = BigInt::from(c.det_unit());
                    if (n / 2) % 2 == 1 {
                        d = -d;
                    }
                    (n, legendre(&d, p) as i8)
                }
            }
            Some(c) => {
                let n = c.rank() as i32;
                let t = if c.is_type_i() { n - 1 } else { n };
                let oct = c.octane();
                if bound || oct == 2 || oct == 6 {
                    (if t % 2 != 0 { t } else { t + 1 }, 0)
                } else {
                    let sp = if t % 2 == 0 { t } else { t - 1 };
                    let sign = if matches!(oct, 0 | 1 | 7) { 1 } else { -1 };
                    (sp, sign)
                }
            }
        };
        let (species, sign) = if species % 2 != 0 { (species, 0) } else { (species, sign) };
        let factor = if dim == 0 {
            if bound {
                rat(1, 2)
            } else {
                BigRational::one()
            }
        } else {
            debug_assert!(!(species == 0 && sign < 0), "species 0- does not occur");
            species_factor(p, species, sign)
        };
        out.push(SpeciesId { scale: s, dim, bound, species, sign, factor });
    }
    out
}

/// m_p from a Jordan splitting.
pub fn local_mass_split(split: &JordanSplitting) -> MassValue {
    let p = split.prime;
    let mut diag = BigRational::one();
    for s in species_list(split) {
        diag *= s.factor;
    }
    let comps = &split.components;
    let mut cross: i64 = 0;
    for (a, ca) in comps.iter().enumerate() {
        for cb in &comps[a + 1..] {
            cross += (cb.scale as i64 - ca.scale as i64) * (ca.rank() * cb.rank()) as i64;
        }
    }
    let mut two_exp: i64 = 0;
    if p == 2 {
        for w in comps.windows(2) {
            if w[1].scale == w[0].scale + 1 && w[0].is_type_i() && w[1].is_type_i() {
                two_exp += 1;
            }
        }
        for c in comps.iter().filter(|c| c.is_type_ii()) {
            two_exp -= c.rank() as i64;
        }
    }
    let mut two = BigRational::from_integer(BigInt::from(2).pow(two_exp.unsigned_abs() as u32));
    if two_exp < 0 {
        two = two.recip();
    }
    MassValue::half_power(p, cross).mul_rational(&(diag * two))
}

pub fn local_mass(lat: &GramLattice, p: u64) -> Result<MassValue> {
    Ok(local_mass_split(&jordan_split(lat, p)?))
}

/// Which closure of the Euler product was used for the global mass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MassBranch {
    Ternary,
    QuaternarySquare,
    QuaternaryCharacter,
}

/// Fundamental discriminant of Q(√d) for a positive non-square d.
pub fn fundamental_discriminant(d: &BigInt) -> BigInt {
    let (core, _) = squarefree_decomposition(d);
    if core.mod_floor(&BigInt::from(4)) == BigInt::one() {
        core
    } else {
        core * 4
    }
}

/// Generalised Bernoulli number B_{2,χ} for the Kronecker character of f.
pub fn bernoulli2(f: i64) -> BigRational {
    let mut s2 = BigInt::zero();
    let mut s1 = BigInt::zero();
    for a in 1..=f {
        let c = kronecker(f, a) as i64;
        s2 += BigInt::from(c * a * a);
        s1 += BigInt::from(c * a);
    }
    BigRational::new(s2, BigInt::from(f)) - BigRational::from_integer(s1)
}

/// Global mass from local data at every prime dividing 2d.
pub fn total_mass_local(rank: usize, d: &BigInt, splits: &[JordanSplitting]) -> Result<(MassValue, MassBranch)> {
    let mut prod = MassValue::one();
    match rank {
        3 => {
            for s in splits {
                let p = s.prime as i64;
                let e = BigRational::one() - rat(1, p * p);
                prod = prod.mul(&local_mass_split(s)).mul_rational(&(e * rat(2, 1)));
            }
            Ok((prod.mul_rational(&rat(1, 6)), MassBranch::Ternary))
        }
        4 if is_square(d) => {
            for s in splits {
                let p = s.prime as i64;
                let e = BigRational::one() - rat(1, p * p);
                prod = prod.mul(&local_mass_split(s)).mul_rational(&(&e * &e * rat(2, 1)));
            }
            Ok((prod.mul_rational(&rat(1, 36)), MassBranch::QuaternarySquare))
        }
        4 => {
            let f = fundamental_discriminant(d);
            let fi = f.to_i64().ok_or(Error::UnsupportedMass("conductor too large".into()))?;
            for s in splits {
                let p = s.prime as i64;
                let chi = kronecker(fi, p) as i64;
                let e = (BigRational::one() - rat(1, p * p)) * (BigRational::one() - rat(chi, p * p));
                prod = prod.mul(&local_mass_split(s)).mul_rational(&(e * rat(2, 1)));
            }
            // π⁻⁴ ζ(2) L(2,χ) = B_{2,χ} / (6 f √f)
            let b = bernoulli2(fi);
            let closure = MassValue::sqrt(&f).recip().mul_rational(&(b / BigRational::from_integer(f * 6)));
            Ok((prod.mul(&closure), MassBranch::QuaternaryCharacter))
        }
        r => Err(Error::UnsupportedMass(format!("rank {r}"))),
    }
}

pub fn total_mass(lat: &GramLattice) -> Result<MassValue> {
    Ok(total_mass_with_branch(lat)?.0)
}

pub fn total_mass_with_branch(lat: &GramLattice) -> Result<(MassValue, MassBranch)> {
    let splits = bad_primes(lat).into_iter().map(|p| jordan_split(lat, p)).collect::<Result<Vec<_>>>()?;
    total_mass_local(lat.rank(), &lat.discriminant(), &splits)
}

/// m(L)/g(L).
pub fn spinor_mass(total: &MassValue, g: u64) -> MassValue {
    total.mul_rational(&rat(1, g as i64))
}

fn bound_constant(q: u64, n_even: bool) -> BigRational {
    let qi = q as i64;
    if n_even {
        let t = BigRational::one() - rat(1, qi * qi);
        &t * &t * rat(1, 512 * 3 * 5)
    } else {
        (BigRational::one() - rat(1, qi.pow(4))) * rat(1, 256 * 9 * 5)
    }
}

/// Lower bound for m(L) when d(L) = q^n and L_q has rank-1 components at
/// scales 0 < k < l < m.
pub fn mass_lower_bound(q: u64, k: u32, l: u32, m: u32, n_even: bool) -> MassValue {
    let e = 3 * m as i64 + l as i64 - k as i64;
    MassValue::half_power(q, e).mul_rational(&bound_constant(q, n_even))
}

/// Largest value of 3m+l−k for which the lower bound does not exceed 1.
pub fn bound_exponent_check(q: u64, n_even: bool) -> Result<i64> {
    if !matches!(q, 3 | 5 | 7) {
        return Err(Error::BadPrime(q));
    }
    let c = bound_constant(q, n_even);
    let one = MassValue::one();
    let exceeds = |e: i64| MassValue::half_power(q, e).mul_rational(&c).cmp_value(&one) == Ordering::Greater;
    let mut e = 0;
    while !exceeds(e + 1) {
        e += 1;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::dyadic_diagonal;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_rows(rows).unwrap()
    }

    #[test]
    fn dyadic_unimodular_species() {
        let m = |l: GramLattice| local_mass(&l, 2).unwrap();
        assert_eq!(m(lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 3, 0], &[0, 0, 0, 3]])), MassValue::rational(rat(1, 4)));
        assert_eq!(m(lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 5]])), MassValue::rational(rat(1, 12)));
        assert_eq!(m(lat(&[&[2, 1, 0, 0], &[1, 2, 0, 0], &[0, 0, 2, 1], &[0, 0, 1, 2]])), MassValue::rational(rat(1, 18)));
        assert_eq!(m(lat(&[&[2, 1, 0, 0], &[1, 2, 0, 0], &[0, 0, 2, 1], &[0, 0, 1, 4]])), MassValue::rational(rat(1, 30)));
        assert_eq!(m(lat(&[&[2, 1, 0, 0], &[1, 2, 0, 0], &[0, 0, 8, 4], &[0, 0, 4, 8]])), MassValue::rational(rat(1, 9)));
    }

    #[test]
    fn root_lattice_masses() {
        let i4 = lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert_eq!(total_mass(&i4).unwrap(), MassValue::rational(rat(1, 384)));
        let d4 = lat(&[&[2, -1, 0, 0], &[-1, 2, -1, -1], &[0, -1, 2, 0], &[0, -1, 0, 2]]);
        assert_eq!(total_mass(&d4).unwrap(), MassValue::rational(rat(1, 1152)));
        let i3 = lat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(total_mass(&i3).unwrap(), MassValue::rational(rat(1, 48)));
        // A4 has discriminant 5, |O| = 2·5! = 240, class number 1
        let a4 = lat(&[&[2, -1, 0, 0], &[-1, 2, -1, 0], &[0, -1, 2, -1], &[0, 0, -1, 2]]);
        assert_eq!(total_mass(&a4).unwrap(), MassValue::rational(rat(1, 240)));
    }

    #[test]
    fn odd_prime_closed_form() {
        for (q, k, l, m) in [(3u64, 1u32, 2u32, 3u32), (5, 1, 3, 4), (7, 2, 3, 5)] {
            let split = crate::padic::JordanSplitting {
                prime: q,
                components: [0, k, l, m]
                    .iter()
                    .map(|&s| crate::padic::JordanComponent { prime: q, scale: s, units: vec![1], blocks: vec![] })
                    .collect(),
            };
            let expect = MassValue::half_power(q, (3 * m + l - k) as i64).mul_rational(&rat(1, 16));
            assert_eq!(local_mass_split(&split), expect);
        }
    }

    #[test]
    fn case_one_family() {
        for m in 4..=6u32 {
            let split = dyadic_diagonal(&[(0, 1), (0, 1), (m, 1), (m, 1)]);
            let expect = MassValue::half_power(2, 2 * (2 * m as i64 - 6));
            assert_eq!(local_mass_split(&split), expect);
            let d = BigInt::from(2).pow(2 * m);
            let (tm, _) = total_mass_local(4, &d, &[split]).unwrap();
            assert_eq!(tm, MassValue::half_power(2, 2 * (2 * m as i64 - 11)));
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli2(5), rat(4, 5));
        assert_eq!(bernoulli2(8), rat(2, 1));
        assert_eq!(fundamental_discriminant(&BigInt::from(12)), BigInt::from(12));
        assert_eq!(fundamental_discriminant(&BigInt::from(20)), BigInt::from(5));
    }

    #[test]
    fn thresholds() {
        assert_eq!(bound_exponent_check(3, true).unwrap(), 16);
        assert_eq!(bound_exponent_check(3, false).unwrap(), 17);
        assert_eq!(bound_exponent_check(5, true).unwrap(), 11);
        assert_eq!(bound_exponent_check(7, false).unwrap(), 9);
        assert!(bound_exponent_check(11, true).is_err());
    }
}
