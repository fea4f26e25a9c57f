//! The μ_p transformation L ↦ L + p⁻¹L^{p²}, its iteration μ̂, and the
//! inverse profile map.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::arith::{is_prime, prime_divisors, valuation};
use crate::error::{Error, Result};
use crate::isometry::canonical;
use crate::lattice::GramLattice;
use crate::linalg;
use crate::padic::{p_profile, PProfile};

/// The six p-profiles at which μ̂ stops for a quaternary lattice.
pub const ADMISSIBLE_PROFILES: [[u32; 4]; 6] =
    [[0, 0, 0, 1], [0, 0, 1, 1], [0, 1, 1, 1], [0, 0, 0, 2], [0, 0, 2, 2], [0, 2, 2, 2]];

pub fn is_admissible(profile: &PProfile) -> bool {
    ADMISSIBLE_PROFILES.iter().any(|a| a[..] == profile.exps[..])
}

/// μ_p(L), returned in canonical form.
pub fn mu_p(lat: &GramLattice, p: u64) -> Result<GramLattice> {
    Ok(canonical(&mu_p_raw(lat, p)?)?.gram)
}

fn mu_p_raw(lat: &GramLattice, p: u64) -> Result<GramLattice> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let pb = BigInt::from(p);
    let n = lat.rank();
    let kernel = linalg::kernel_mod(lat.gram(), &(&pb * &pb));
    // generators of p·(L + p⁻¹ K): p·e_i and the rows of K
    let mut gens: linalg::IntMatrix =
        linalg::identity(n).into_iter().map(|r| r.into_iter().map(|x| x * &pb).collect()).collect();
    gens.extend(kernel);
    lat.span_over(&gens, &pb)
}

/// Outcome of μ̂.
#[derive(Clone, Debug)]
pub struct MuResult {
    pub lattice: GramLattice,
    /// Number of μ_p steps applied at each prime dividing d(L).
    pub iterations: BTreeMap<u64, u32>,
    /// Profiles after each step, per prime (starting with the input profile).
    pub trace: BTreeMap<u64, Vec<PProfile>>,
    /// Whether every resulting profile is admissible.
    pub fixed: bool,
}

/// Iterates μ_p at every p | d(L) until the next step would be unimodular at p
/// or nothing changes.
pub fn mu_hat(lat: &GramLattice) -> Result<MuResult> {
    let mut cur = lat.clone();
    let mut iterations = BTreeMap::new();
    let mut trace = BTreeMap::new();
    for p in prime_divisors(&lat.discriminant()) {
        let cap = valuation(&lat.discriminant(), p).unwrap_or(0);
        let mut steps = 0;
        let mut profiles = vec![p_profile(&cur, p)?];
        loop {
            let prof = profiles.last().unwrap();
            if prof.exps.iter().all(|&e| e <= 1) {
                break;
            }
            let next = mu_p_raw(&cur, p)?;
            if valuation(&next.discriminant(), p).unwrap_or(0) == 0 {
                break;
            }
            steps += 1;
            if steps > cap {
                return Err(Error::IterationCap("mu_hat"));
            }
            cur = next;
            profiles.push(p_profile(&cur, p)?);
        }
        iterations.insert(p, steps);
        trace.insert(p, profiles);
    }
    let cur = canonical(&cur)?.gram;
    let fixed = lat.rank() == 4
        && prime_divisors(&cur.discriminant())
            .into_iter()
            .all(|p| p_profile(&cur, p).map(|pr| is_admissible(&pr)).unwrap_or(false));
    Ok(MuResult { lattice: cur, iterations, trace, fixed })
}

/// Profiles of primitive quaternary L′ with μ_p(L′) of the given profile,
/// other than the profile itself.
pub fn mu_preimage_profiles(profile: &PProfile) -> BTreeSet<PProfile> {
    let mut out = BTreeSet::new();
    let n = profile.exps.len();
    for mask in 0u32..(1 << n) {
        let exps: Vec<u32> =
            profile.exps.iter().enumerate().map(|(i, &e)| if mask >> i & 1 == 1 { e + 2 } else { e }).collect();
        let cand = PProfile::new(profile.prime, exps);
        if cand.exps[0] != 0 || cand == *profile {
            continue;
        }
        let back = PProfile::new(profile.prime, cand.exps.iter().map(|&e| if e >= 2 { e - 2 } else { e }).collect());
        if back == *profile {
            out.insert(cand);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::local_isometric;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_rows(rows).unwrap()
    }

    fn prof(exps: &[u32]) -> PProfile {
        PProfile::new(3, exps.to_vec())
    }

    #[test]
    fn mu_three_on_l1() {
        let l1 = lat(&[&[2, 0, 0, 1], &[0, 6, 3, 0], &[0, 3, 6, 0], &[1, 0, 0, 14]]);
        let m = mu_p(&l1, 3).unwrap();
        assert_eq!(m.discriminant(), BigInt::from(9));
        assert_eq!(p_profile(&m, 3).unwrap().exps, vec![0, 0, 1, 1]);
        for q in [2, 5, 7] {
            assert!(local_isometric(&l1, &m, q).unwrap());
        }
        let h = mu_hat(&l1).unwrap();
        assert_eq!(h.lattice.discriminant(), BigInt::from(9));
        assert_eq!(h.iterations[&3], 1);
        assert!(h.fixed);
    }

    #[test]
    fn admissible_profiles_are_fixed() {
        // diag(1,1,3,3): profile (0,0,1,1)_3
        let l = lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 3, 0], &[0, 0, 0, 3]]);
        assert_eq!(mu_p(&l, 3).unwrap(), canonical(&l).unwrap().gram);
        let l = lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 9, 0], &[0, 0, 0, 9]]);
        let h = mu_hat(&l).unwrap();
        assert_eq!(h.iterations[&3], 0);
        assert_eq!(h.lattice.discriminant(), BigInt::from(81));
    }

    #[test]
    fn preimages() {
        let got: Vec<Vec<u32>> = mu_preimage_profiles(&prof(&[0, 0, 0, 1])).into_iter().map(|p| p.exps).collect();
        assert_eq!(got.len(), 5);
        for e in [[0, 0, 1, 2], [0, 0, 0, 3], [0, 1, 2, 2], [0, 0, 2, 3], [0, 2, 2, 3]] {
            assert!(got.contains(&e.to_vec()));
        }
        assert_eq!(mu_preimage_profiles(&prof(&[0, 1, 1, 1])).len(), 3);
        let got: BTreeSet<Vec<u32>> = mu_preimage_profiles(&prof(&[0, 0, 1, 1])).into_iter().map(|p| p.exps).collect();
        let want: BTreeSet<Vec<u32>> =
            [[0, 0, 3, 3], [0, 0, 1, 3], [0, 1, 2, 3], [0, 1, 1, 2], [0, 2, 3, 3]].iter().map(|e| e.to_vec()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn profile_step_arithmetic() {
        // (0,2,2,3)_3 → (0,0,0,1)_3
        let l = lat(&[&[1, 0, 0, 0], &[0, 9, 0, 0], &[0, 0, 9, 0], &[0, 0, 0, 27]]);
        assert_eq!(p_profile(&mu_p(&l, 3).unwrap(), 3).unwrap().exps, vec![0, 0, 0, 1]);
    }
}
