mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use quadlat::isometry::canonical;
use quadlat::mass::{total_mass, MassValue};
use quadlat::padic::genus_symbol;

fn check(rank: usize, d: i64) {
    let classes = common::brute_force_classes(rank, d);
    let mut genera: BTreeMap<String, (BigRational, MassValue)> = BTreeMap::new();
    for l in classes {
        let sym = genus_symbol(&l).unwrap().to_string();
        let o = canonical(&l).unwrap().aut_order;
        let entry = genera
            .entry(sym)
            .or_insert_with(|| (BigRational::from_integer(BigInt::from(0)), total_mass(&l).unwrap()));
        entry.0 += BigRational::new(BigInt::from(1), BigInt::from(o));
    }
    for (sym, (sum, mass)) in genera {
        assert_eq!(MassValue::rational(sum), mass, "rank {rank} d {d} genus {sym}");
    }
}

#[test]
fn ternary_masses_match_class_sums() {
    for d in 1..=64 {
        check(3, d);
    }
}

#[test]
fn quaternary_masses_match_class_sums() {
    for d in 1..=49 {
        check(4, d);
    }
}
