//! Bundled fixtures, the ternary one-class spinor genus table, and the
//! one-class genus catalogue loader.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::prime_divisors;
use crate::error::{Error, Result};
use crate::lattice::{form_to_lattice, ClassicalForm, GramLattice};
use crate::padic::{p_profile, PProfile};

/// Primes dividing discriminants of quaternary one-class genera.
pub const CLASS_ONE_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 23];

/// Primes dividing discriminants of quaternary one-class spinor genera that
/// are not one-class genera.
pub const ONE_CLASS_SPINOR_PRIMES: [u64; 1] = [3];

/// Number of entries in the complete quaternary one-class genus catalogue.
pub const CATALOGUE_SIZE: usize = 481;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryEntry {
    pub discriminant: u64,
    pub coefficients: [i64; 6],
    pub regular: bool,
}

impl TernaryEntry {
    pub fn form(&self) -> ClassicalForm {
        ClassicalForm::from_i64(3, &self.coefficients).expect("valid table entry")
    }

    pub fn lattice(&self) -> GramLattice {
        form_to_lattice(&self.form()).expect("primitive table entry")
    }
}

// [a,b,c,d,e,g] is ax²+by²+cz²+dyz+exz+gxy
const TERNARY: [(u64, [i64; 6], bool); 45] = [
    (54, [1, 1, 9, 0, 0, 1], true),
    (54, [1, 3, 3, 3, 0, 0], true),
    (128, [1, 1, 16, 0, 0, 0], true),
    (128, [2, 2, 5, 2, 2, 0], false),
    (162, [1, 3, 7, 0, 1, 0], true),
    (216, [1, 1, 36, 0, 0, 1], true),
    (216, [1, 3, 10, 3, 1, 0], true),
    (216, [3, 3, 4, 0, 0, 3], false),
    (216, [3, 4, 4, 4, 3, 3], false),
    (256, [1, 4, 9, 4, 0, 0], false),
    (486, [1, 7, 9, 0, 0, 1], true),
    (512, [1, 4, 16, 0, 0, 0], true),
    (512, [2, 5, 8, 4, 0, 2], false),
    (512, [4, 4, 5, 0, 4, 0], false),
    (648, [1, 7, 12, 0, 0, 1], false),
    (686, [2, 7, 8, 7, 1, 0], false),
    (864, [1, 3, 36, 0, 0, 0], true),
    (864, [1, 12, 12, 12, 0, 0], true),
    (864, [3, 4, 9, 0, 0, 0], false),
    (864, [4, 4, 9, 0, 0, 4], false),
    (1944, [1, 7, 36, 0, 0, 1], true),
    (2048, [1, 16, 16, 0, 0, 0], true),
    (2048, [4, 5, 13, 2, 0, 0], false),
    (2048, [4, 9, 9, 2, 4, 4], false),
    (2048, [5, 8, 8, 0, 4, 4], false),
    (2592, [3, 4, 28, 4, 0, 0], true),
    (2744, [7, 8, 9, 6, 7, 0], false),
    (3456, [1, 12, 36, 0, 0, 0], true),
    (3456, [4, 9, 12, 0, 0, 0], false),
    (4096, [1, 8, 64, 0, 0, 0], true),
    (4096, [4, 8, 17, 0, 4, 0], false),
    (7776, [4, 9, 28, 0, 4, 0], false),
    (8192, [4, 9, 32, 0, 0, 4], false),
    (8192, [5, 13, 16, 0, 0, 2], false),
    (8192, [9, 9, 16, 8, 8, 2], false),
    (10976, [8, 9, 25, 2, 4, 8], false),
    (13824, [1, 48, 48, 48, 0, 0], true),
    (13824, [4, 13, 37, 2, 4, 4], true),
    (13824, [9, 16, 16, 16, 0, 0], false),
    (13824, [13, 13, 16, -8, 8, 10], false),
    (32768, [9, 16, 36, 16, 4, 8], false),
    (32768, [9, 17, 32, -8, 8, 6], false),
    (41472, [3, 16, 112, 16, 0, 0], true),
    (124416, [9, 16, 112, 16, 0, 0], false),
    (175616, [29, 32, 36, 32, 12, 24], false),
];

/// Ternary one-class spinor genera that are not one-class genera.
pub fn ternary_table() -> Vec<TernaryEntry> {
    TERNARY
        .iter()
        .map(|&(discriminant, coefficients, regular)| TernaryEntry { discriminant, coefficients, regular })
        .collect()
}

type Rows = [[i64; 4]; 4];

const FIXTURES: [(&str, u64, Rows); 21] = [
    ("example", 729, [[2, 1, 0, 0], [1, 14, 0, 0], [0, 0, 6, 3], [0, 0, 3, 6]]),
    ("L1", 729, [[2, 0, 0, 1], [0, 6, 3, 0], [0, 3, 6, 0], [1, 0, 0, 14]]),
    ("L2", 729, [[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 18, 9], [0, 0, 9, 18]]),
    ("L3", 729, [[6, 3, 3, 3], [3, 6, 0, 3], [3, 0, 8, 4], [3, 3, 4, 8]]),
    ("M1", 729, [[4, 1, 1, 2], [1, 4, 1, 2], [1, 1, 4, -1], [2, 2, -1, 16]]),
    ("M2", 729, [[4, 2, 1, 1], [2, 4, -1, 2], [1, -1, 10, 4], [1, 2, 4, 10]]),
    ("M3", 729, [[2, 1, 1, 1], [1, 8, -1, 2], [1, -1, 8, 2], [1, 2, 2, 8]]),
    ("K1", 2916, [[4, 2, -1, 0], [2, 10, 4, 0], [-1, 4, 10, 3], [0, 0, 3, 12]]),
    ("E10", 1024, [[3, -1, -1, -1], [-1, 7, 3, 3], [-1, 3, 7, 3], [-1, 3, 3, 11]]),
    ("E16", 65536, [[3, -1, -1, -1], [-1, 27, 11, 11], [-1, 11, 27, 11], [-1, 11, 11, 43]]),
    ("D4L1", 256, [[2, 0, 1, -2], [0, 2, 1, -2], [1, 1, 5, -2], [-2, -2, -2, 20]]),
    ("D4L2", 256, [[1, 0, 0, 0], [0, 4, 2, 4], [0, 2, 5, 2], [0, 4, 2, 20]]),
    ("D4L3", 256, [[8, 0, 2, 4], [0, 2, -1, 0], [2, -1, 3, 1], [4, 0, 1, 10]]),
    ("D4L4", 256, [[3, 0, 0, -1], [0, 12, -2, 6], [0, -2, 3, -1], [-1, 6, -1, 6]]),
    ("D5L1", 1024, [[3, 1, -1, -1], [1, 4, -2, -2], [-1, -2, 4, 4], [-1, -2, 4, 36]]),
    ("D5L2", 1024, [[2, 0, -1, -2], [0, 2, 1, -2], [-1, 1, 9, 0], [-2, -2, 0, 36]]),
    ("D5L3", 1024, [[3, -2, 0, 0], [-2, 12, 0, 0], [0, 0, 3, 1], [0, 0, 1, 11]]),
    ("D6L1", 4096, [[4, -2, 0, 0], [-2, 5, -2, 0], [0, -2, 5, 0], [0, 0, 0, 64]]),
    ("D6L2", 4096, [[2, 0, 1, -2], [0, 8, 2, 4], [1, 2, 9, 0], [-2, 4, 0, 36]]),
    ("D6L3", 4096, [[2, -1, 0, 0], [-1, 6, 1, 0], [0, 1, 6, 0], [0, 0, 0, 64]]),
    ("D6L4", 4096, [[6, 0, 1, 6], [0, 6, 3, 2], [1, 3, 7, 2], [6, 2, 2, 28]]),
];

/// SHA-256 over the fixture names and matrices.
pub const FIXTURE_DIGEST: &str = "3428b1994f2e44935f8a2a8afcfdc175435420f657b19d37b60ca8223071bc28";

fn fixture_digest() -> String {
    let mut h = Sha256::new();
    for (name, d, rows) in FIXTURES.iter() {
        h.update(name.as_bytes());
        h.update(d.to_le_bytes());
        for r in rows {
            for x in r {
                h.update(x.to_le_bytes());
            }
        }
    }
    hex::encode(h.finalize())
}

/// Named quaternary Gram matrices. `I4` is the unit lattice.
pub fn fixture_names() -> Vec<&'static str> {
    let mut v: Vec<&str> = FIXTURES.iter().map(|f| f.0).collect();
    v.push("I4");
    v
}

pub fn quaternary_fixtures() -> Result<Vec<(&'static str, GramLattice)>> {
    if fixture_digest() != FIXTURE_DIGEST {
        return Err(Error::Catalogue("fixture checksum mismatch".into()));
    }
    let mut out = Vec::new();
    for (name, d, rows) in FIXTURES.iter() {
        let l = GramLattice::from_rows(rows)?;
        if l.discriminant() != BigInt::from(*d) {
            return Err(Error::Catalogue(format!("fixture {name} has discriminant {}", l.discriminant())));
        }
        out.push((*name, l));
    }
    Ok(out)
}

pub fn fixture(name: &str) -> Result<GramLattice> {
    if name == "I4" {
        return GramLattice::from_rows(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
    }
    quaternary_fixtures()?
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, l)| l)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CatalogueRow {
    disc: u64,
    gram: Vec<Vec<i64>>,
}

/// One lattice of the one-class genus catalogue with its local profiles.
#[derive(Clone, Debug)]
pub struct OneClassGenusEntry {
    pub gram: GramLattice,
    pub discriminant: BigInt,
    pub profiles: BTreeMap<u64, PProfile>,
}

/// Parses a catalogue file: one JSON object `{"disc": d, "gram": [[..],..]}`
/// per line. Blank lines and lines starting with `#` are skipped.
pub fn load_catalogue_unchecked(path: &Path) -> Result<Vec<OneClassGenusEntry>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: CatalogueRow = serde_json::from_str(line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        let gram = GramLattice::from_rows(&row.gram).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        let d = gram.discriminant();
        if d != BigInt::from(row.disc) {
            return Err(Error::Parse { line: i + 1, msg: format!("stated discriminant {} but Gram gives {d}", row.disc) });
        }
        let mut profiles = BTreeMap::new();
        for p in prime_divisors(&d) {
            profiles.insert(p, p_profile(&gram, p)?);
        }
        out.push(OneClassGenusEntry { gram, discriminant: d, profiles });
    }
    Ok(out)
}

/// As `load_catalogue_unchecked`, but the file must hold the full catalogue.
pub fn load_catalogue(path: &Path) -> Result<Vec<OneClassGenusEntry>> {
    let entries = load_catalogue_unchecked(path)?;
    if entries.len() != CATALOGUE_SIZE {
        return Err(Error::Catalogue(format!("expected {CATALOGUE_SIZE} entries, found {}", entries.len())));
    }
    Ok(entries)
}

/// Writes entries in the catalogue line format.
pub fn write_catalogue(path: &Path, grams: &[GramLattice]) -> Result<()> {
    let mut text = String::new();
    for g in grams {
        let row = CatalogueRow { disc: g.discriminant().try_into().map_err(|_| Error::Overflow("catalogue disc"))?, gram: g.to_i64_rows()? };
        text.push_str(&serde_json::to_string(&row).expect("serializable"));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Primes dividing some catalogue discriminant.
pub fn catalogue_primes(entries: &[OneClassGenusEntry]) -> Vec<u64> {
    let mut v: Vec<u64> = entries.iter().flat_map(|e| e.profiles.keys().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Does some entry have the given p-profile and satisfy `extra`?
pub fn profile_exists(
    entries: &[OneClassGenusEntry],
    p: u64,
    profile: &PProfile,
    extra: Option<&dyn Fn(&OneClassGenusEntry) -> bool>,
) -> bool {
    entries.iter().any(|e| {
        let prof = e.profiles.get(&p).cloned().unwrap_or_else(|| PProfile::new(p, vec![0; e.gram.rank()]));
        &prof == profile && extra.is_none_or(|f| f(e))
    })
}

/// Distinct p-profiles among entries whose discriminant p divides.
pub fn profiles_at(entries: &[OneClassGenusEntry], p: u64) -> Vec<PProfile> {
    let mut v: Vec<PProfile> = entries.iter().filter_map(|e| e.profiles.get(&p).cloned()).collect();
    v.sort();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let t = ternary_table();
        assert_eq!(t.len(), 45);
        assert_eq!(t.iter().filter(|e| e.regular).count(), 18);
        assert_eq!(t[0].discriminant, 54);
        for e in &t {
            let f = e.form();
            assert_eq!(f.discriminant(), BigInt::from(e.discriminant), "{:?}", e.coefficients);
        }
        assert_eq!(t[3].lattice().discriminant(), BigInt::from(16));
    }

    #[test]
    fn fixtures_are_consistent() {
        let fx = quaternary_fixtures().unwrap();
        assert_eq!(fx.len(), 21);
        assert_eq!(fixture("L1").unwrap().discriminant(), BigInt::from(729));
        assert!(matches!(fixture("nope"), Err(Error::UnknownFixture(_))));
        assert_eq!(fixture_digest(), FIXTURE_DIGEST);
    }

    #[test]
    fn catalogue_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.jsonl");
        let grams: Vec<GramLattice> = ["L1", "M1", "K1"].iter().map(|n| fixture(n).unwrap()).collect();
        write_catalogue(&path, &grams).unwrap();
        let entries = load_catalogue_unchecked(&path).unwrap();
        assert_eq!(entries.len(), 3);
        assert!(matches!(load_catalogue(&path), Err(Error::Catalogue(_))));
        assert_eq!(catalogue_primes(&entries), vec![2, 3]);
        let p = PProfile::new(3, vec![0, 1, 2, 3]);
        assert!(profile_exists(&entries, 3, &p, None));
        let only_k1 = |e: &OneClassGenusEntry| e.discriminant == BigInt::from(2916);
        assert!(profile_exists(&entries, 3, &p, Some(&only_k1)));
        let odd_disc = |e: &OneClassGenusEntry| e.discriminant.bit(0);
        assert!(!profile_exists(&entries, 2, &PProfile::new(2, vec![0, 0, 1, 1]), Some(&odd_disc)));
        assert_eq!(profiles_at(&entries, 2), vec![PProfile::new(2, vec![0, 0, 1, 1])]);
    }

    #[test]
    fn malformed_catalogue_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        fs::write(&path, "{\"disc\": 5, \"gram\": [[1,0],[0,1]]}\n").unwrap();
        assert!(matches!(load_catalogue_unchecked(&path), Err(Error::Parse { line: 1, .. })));
    }
}
