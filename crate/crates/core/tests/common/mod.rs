#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use quadlat::isometry::canonical;
use quadlat::GramLattice;

/// Every class of positive definite lattices of the given rank and
/// discriminant, found by scanning Minkowski-reduced Gram matrices.
pub fn brute_force_classes(rank: usize, d: i64) -> Vec<GramLattice> {
    let hermite = match rank {
        3 => 2,
        4 => 4,
        _ => 1,
    } * d;
    let mut found: BTreeMap<GramLattice, ()> = BTreeMap::new();
    let mut diag = vec![0i64; rank];
    scan_diag(rank, 0, 1, hermite, &mut diag, &mut |diag| {
        let pairs: Vec<(usize, usize)> = (0..rank).flat_map(|i| (i + 1..rank).map(move |j| (i, j))).collect();
        let mut off = vec![0i64; pairs.len()];
        scan_off(&pairs, 0, diag, &mut off, &mut |off| {
            let mut g = vec![vec![0i64; rank]; rank];
            for i in 0..rank {
                g[i][i] = diag[i];
            }
            for (k, &(i, j)) in pairs.iter().enumerate() {
                g[i][j] = off[k];
                g[j][i] = off[k];
            }
            if let Ok(l) = GramLattice::from_rows(&g) {
                if l.discriminant() == BigInt::from(d) {
                    found.insert(canonical(&l).unwrap().gram, ());
                }
            }
        });
    });
    found.into_keys().collect()
}

fn scan_diag(rank: usize, i: usize, lo: i64, budget: i64, diag: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    if i == rank {
        f(diag);
        return;
    }
    let mut a = lo;
    while a.pow((rank - i) as u32) <= budget {
        diag[i] = a;
        scan_diag(rank, i + 1, a, budget / a, diag, f);
        a += 1;
    }
}

fn scan_off(pairs: &[(usize, usize)], k: usize, diag: &[i64], off: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    if k == pairs.len() {
        f(off);
        return;
    }
    let a = diag[pairs[k].0];
    let b = a / 2;
    for v in -b..=b {
        off[k] = v;
        scan_off(pairs, k + 1, diag, off, f);
    }
}

use proptest::prelude::*;
use quadlat::enumerate::q_neighbors;
use quadlat::isometry::canonical as canon;
use quadlat::lattice::{form_to_lattice, lattice_to_form, ClassicalForm};
use quadlat::linalg::{self, IntMatrix};
use quadlat::padic::{bad_primes, genus_symbol, local_isometric};
use quadlat::spinor::idele_quotient;
use quadlat::watson::mu_p;

/// G = B·D·Bᵀ with B unit lower triangular, primitive only.
pub fn lattice_strategy(rank: usize) -> impl Strategy<Value = GramLattice> {
    let off = rank * (rank - 1) / 2;
    (prop::collection::vec(-3i64..=3, off), prop::collection::vec(1i64..=12, rank))
        .prop_map(move |(o, d)| {
            let mut b = linalg::identity(rank);
            let mut k = 0;
            for i in 0..rank {
                for j in 0..i {
                    b[i][j] = BigInt::from(o[k]);
                    k += 1;
                }
            }
            let mut dm = linalg::zeros(rank, rank);
            for i in 0..rank {
                dm[i][i] = BigInt::from(d[i]);
            }
            GramLattice::new(linalg::congruence(&dm, &b)).unwrap()
        })
        .prop_filter("primitive", |l| l.is_primitive())
}

pub fn unimodular_strategy(rank: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..rank, 0..rank, -2i64..=2), 0..8).prop_map(move |ops| {
        let mut u = linalg::identity(rank);
        for (i, j, c) in ops {
            if i != j {
                let row = u[j].clone();
                for (x, y) in u[i].iter_mut().zip(row) {
                    *x += y * c;
                }
            }
        }
        u
    })
}

pub fn form_strategy(rank: usize) -> impl Strategy<Value = ClassicalForm> {
    let n = rank * (rank + 1) / 2;
    (prop::collection::vec(1i64..=9, rank), prop::collection::vec(-4i64..=4, n - rank))
        .prop_map(move |(d, c)| {
            let coeffs: Vec<i64> = d.into_iter().chain(c).collect();
            ClassicalForm::from_i64(rank, &coeffs).unwrap()
        })
        .prop_filter("primitive positive definite", |f| f.is_primitive() && form_to_lattice(f).is_ok())
}

pub fn mu_localization(l: &GramLattice, p: u64) -> Result<(), TestCaseError> {
    let m = mu_p(l, p).unwrap();
    for q in bad_primes(l).into_iter().chain(bad_primes(&m)).chain([3, 5, 7]) {
        if q != p {
            prop_assert!(local_isometric(l, &m, q).unwrap(), "μ_{} changed {} at {}", p, l, q);
        }
    }
    Ok(())
}

pub fn form_round_trip(f: &ClassicalForm) -> Result<(), TestCaseError> {
    let l = form_to_lattice(f).unwrap();
    prop_assert_eq!(&lattice_to_form(&l).unwrap(), f);
    Ok(())
}

pub fn reduce_invariance(l: &GramLattice, u: &IntMatrix) -> Result<(), TestCaseError> {
    let c = canon(l).unwrap();
    prop_assert_eq!(&canon(&c.gram).unwrap().gram, &c.gram);
    prop_assert_eq!(&canon(&l.sublattice(u)).unwrap().gram, &c.gram);
    Ok(())
}

pub fn neighbours_in_genus(l: &GramLattice) -> Result<(), TestCaseError> {
    let d = l.discriminant();
    let q = [3u64, 5, 7, 11, 13].into_iter().find(|q| (&d % q) != BigInt::from(0)).unwrap();
    let sym = genus_symbol(l).unwrap();
    for (m, _) in q_neighbors(l, q).unwrap() {
        prop_assert_eq!(genus_symbol(&m).unwrap(), sym.clone());
    }
    Ok(())
}

pub fn spinor_counts(l: &GramLattice) -> Result<(), TestCaseError> {
    let q = idele_quotient(l).unwrap();
    let gp = q.g_plus();
    prop_assert!(gp.is_power_of_two());
    prop_assert!(q.g() == gp || 2 * q.g() == gp);
    Ok(())
}
