//! On-disk cache of genus reports, laid out as
//! `<root>/<rank>/<disc>/<symbol-hash>.json`.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::{GenusClass, GenusReport};
use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::mass::total_mass;
use crate::padic::{genus_symbol, GenusSymbol};

#[derive(Serialize, Deserialize)]
struct Entry {
    symbol: String,
    classes: Vec<ClassEntry>,
    spinor_genera: Vec<Vec<usize>>,
    proper_spinor_genera: Vec<Vec<(usize, i32)>>,
    g_plus: u64,
    g: u64,
    primes: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ClassEntry {
    gram: Vec<Vec<i64>>,
    aut_order: u64,
    improper: bool,
    spinor_genus: usize,
}

pub fn entry_path(root: &Path, symbol: &GenusSymbol, rank: usize, disc: &BigInt) -> PathBuf {
    let hash = hex::encode(Sha256::digest(symbol.to_string().as_bytes()));
    root.join(rank.to_string()).join(disc.to_string()).join(format!("{}.json", &hash[..32]))
}

/// The cached report for the genus of `lat`, if present and consistent.
/// Entries that fail to parse or to match the genus are ignored.
pub fn load(root: &Path, lat: &GramLattice) -> Result<Option<GenusReport>> {
    let symbol = genus_symbol(lat)?;
    let path = entry_path(root, &symbol, lat.rank(), &lat.discriminant());
    let Ok(text) = fs::read_to_string(&path) else {
        return Ok(None);
    };
    let Ok(e) = serde_json::from_str::<Entry>(&text) else {
        return Ok(None);
    };
    if e.symbol != symbol.to_string() || e.classes.is_empty() {
        return Ok(None);
    }
    let mut classes = Vec::with_capacity(e.classes.len());
    let mut sum = BigRational::zero();
    for c in e.classes {
        let lattice = GramLattice::from_rows(&c.gram)?;
        if genus_symbol(&lattice)? != symbol || c.aut_order == 0 {
            return Ok(None);
        }
        sum += BigRational::new(BigInt::one(), BigInt::from(c.aut_order));
        classes.push(GenusClass { lattice, aut_order: c.aut_order, has_improper_aut: c.improper, spinor_genus: c.spinor_genus });
    }
    let mass = total_mass(&lat.primitive_part())?;
    let scale = lat.content();
    if !mass.is_rational() || (scale.is_one() && sum != mass.coeff) {
        return Ok(None);
    }
    Ok(Some(GenusReport {
        symbol,
        classes,
        spinor_genera: e.spinor_genera,
        proper_spinor_genera: e.proper_spinor_genera,
        g_plus: e.g_plus,
        g: e.g,
        mass,
        primes: e.primes,
    }))
}

/// Writes `report` atomically: a temporary file in the target directory is
/// renamed into place.
pub fn store(root: &Path, report: &GenusReport) -> Result<()> {
    let first = &report.classes[0].lattice;
    let path = entry_path(root, &report.symbol, first.rank(), &first.discriminant());
    let dir = path.parent().expect("entry has a parent");
    fs::create_dir_all(dir)?;
    let e = Entry {
        symbol: report.symbol.to_string(),
        classes: report
            .classes
            .iter()
            .map(|c| {
                Ok(ClassEntry {
                    gram: c.lattice.to_i64_rows()?,
                    aut_order: c.aut_order,
                    improper: c.has_improper_aut,
                    spinor_genus: c.spinor_genus,
                })
            })
            .collect::<Result<_>>()?,
        spinor_genera: report.spinor_genera.clone(),
        proper_spinor_genera: report.proper_spinor_genera.clone(),
        g_plus: report.g_plus,
        g: report.g,
        primes: report.primes.clone(),
    };
    let text = serde_json::to_string(&e).map_err(|e| Error::Io(e.to_string()))?;
    let tmp = dir.join(format!(".{}.{}.tmp", std::process::id(), path.file_name().unwrap().to_string_lossy()));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, &path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_genus, GenusOptions};

    #[test]
    fn store_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let l = GramLattice::from_rows(&[[2, 0, 0, 1], [0, 6, 3, 0], [0, 3, 6, 0], [1, 0, 0, 14]]).unwrap();
        assert!(load(dir.path(), &l).unwrap().is_none());
        let r = enumerate_genus(&l, &GenusOptions::default()).unwrap();
        store(dir.path(), &r).unwrap();
        let path = entry_path(dir.path(), &r.symbol, 4, &BigInt::from(729));
        assert!(path.starts_with(dir.path().join("4").join("729")));
        let back = load(dir.path(), &l).unwrap().unwrap();
        assert_eq!(back.class_number(), 3);
        assert_eq!(back.spinor_genera, r.spinor_genera);
        assert_eq!(back.mass, r.mass);
        let leftovers: Vec<_> = fs::read_dir(path.parent().unwrap()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }

    #[test]
    fn corrupt_entries_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let l = GramLattice::from_rows(&[[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 2, 1], [0, 0, 1, 2]]).unwrap();
        let path = entry_path(dir.path(), &genus_symbol(&l).unwrap(), 4, &l.discriminant());
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, "{not json").unwrap();
        assert!(load(dir.path(), &l).unwrap().is_none());
    }
}
