//! Genus enumeration by q-neighbours, spinor genus partition, Pall ascension
//! and discriminant-wide classification.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::is_prime;
use crate::cache;
use crate::error::{Error, Result};
use crate::isometry::canonical;
use crate::lattice::GramLattice;
use crate::linalg::{self, IntMatrix};
use crate::mass::{spinor_mass, total_mass, MassValue};
use crate::padic::{genus_symbol, GenusSymbol};
use crate::spinor::{idele_quotient, IdeleClassQuotient};

fn modinv(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1, mut s0, mut s1) = (a.rem_euclid(m), m, 1i128, 0i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m)
}

/// Bases (rows, coordinates in the basis of `lat`, scaled by q) of all
/// q-neighbours of `lat`, for an odd prime q not dividing d(L).
pub fn neighbor_bases(lat: &GramLattice, q: u64) -> Result<Vec<IntMatrix>> {
    if q == 2 || !is_prime(q) {
        return Err(Error::BadPrime(q));
    }
    if (lat.discriminant() % BigInt::from(q)).is_zero() {
        return Err(Error::BadPrime(q));
    }
    let g = lat.to_i64_rows()?;
    let n = g.len();
    let qi = q as i128;
    let qq = q as i64;
    let mut out = Vec::new();
    let total = (q as u64).checked_pow(n as u32).ok_or(Error::Overflow("neighbour search"))?;
    for idx in 1..total {
        let mut x = vec![0i128; n];
        let mut t = idx;
        for c in x.iter_mut() {
            *c = (t % q) as i128;
            t /= q;
        }
        // one representative per line: leading nonzero coordinate is 1
        if x.iter().find(|&&c| c != 0) != Some(&1) {
            continue;
        }
        let gx: Vec<i128> = (0..n).map(|i| (0..n).map(|j| g[i][j] as i128 * x[j]).sum()).collect();
        let qx: i128 = (0..n).map(|i| x[i] * gx[i]).sum();
        if qx % qi != 0 {
            continue;
        }
        let i = (0..n).find(|&i| gx[i].rem_euclid(qi) != 0).expect("q does not divide d");
        let c = (-(qx / qi) * modinv(2 * gx[i], qi)).rem_euclid(qi);
        let mut xl = x.clone();
        xl[i] += qi * c;
        let gxl: Vec<i128> = (0..n).map(|r| (0..n).map(|j| g[r][j] as i128 * xl[j]).sum()).collect();
        let qxl: i128 = (0..n).map(|r| xl[r] * gxl[r]).sum();
        debug_assert_eq!(qxl.rem_euclid(qi * qi), 0);
        let inv = modinv(gxl[i], qi);
        let mut gens: Vec<Vec<i64>> = Vec::with_capacity(2 * n);
        gens.push(xl.iter().map(|&v| v as i64).collect());
        for j in 0..n {
            let mut row = vec![0i64; n];
            row[j] = qq * qq;
            gens.push(row);
            if j != i {
                let tj = (gxl[j] * inv).rem_euclid(qi) as i64;
                let mut row = vec![0i64; n];
                row[j] = qq;
                row[i] = -tj * qq;
                gens.push(row);
            }
        }
        out.push(linalg::hnf_rows(&linalg::from_i64(&gens)));
    }
    Ok(out)
}

/// All q-neighbours of `lat` as Gram lattices, with the basis determinant sign.
pub fn q_neighbors(lat: &GramLattice, q: u64) -> Result<Vec<(GramLattice, i32)>> {
    let qq = BigInt::from(q * q);
    neighbor_bases(lat, q)?
        .into_iter()
        .map(|b| {
            let mut gram = linalg::congruence(lat.gram(), &b);
            for row in gram.iter_mut() {
                for v in row.iter_mut() {
                    if !(&*v % &qq).is_zero() {
                        return Err(Error::NonIntegral);
                    }
                    *v = &*v / &qq;
                }
            }
            let s = linalg::det(&b).signum().to_i32().unwrap();
            Ok((GramLattice::from_trusted(gram), s))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct GenusClass {
    /// Canonical Gram matrix.
    pub lattice: GramLattice,
    pub aut_order: u64,
    pub has_improper_aut: bool,
    /// Index into `GenusReport::spinor_genera`.
    pub spinor_genus: usize,
}

#[derive(Clone, Debug)]
pub struct GenusReport {
    pub symbol: GenusSymbol,
    pub classes: Vec<GenusClass>,
    /// Class indices of each spinor genus.
    pub spinor_genera: Vec<Vec<usize>>,
    /// Proper classes (class index, orientation) of each proper spinor genus.
    pub proper_spinor_genera: Vec<Vec<(usize, i32)>>,
    pub g_plus: u64,
    pub g: u64,
    pub mass: MassValue,
    /// Neighbour primes used in the walk.
    pub primes: Vec<u64>,
}

impl GenusReport {
    pub fn class_number(&self) -> usize {
        self.classes.len()
    }

    /// Number of classes in the spinor genus of class `i`.
    pub fn spinor_class_number(&self, i: usize) -> usize {
        self.spinor_genera[self.classes[i].spinor_genus].len()
    }

    /// Classes in the spinor genus of class `i`, counted properly.
    pub fn proper_spinor_class_number(&self, i: usize) -> usize {
        self.proper_spinor_genera.iter().find(|s| s.iter().any(|&(j, _)| j == i)).map_or(0, |s| s.len())
    }

    pub fn spinor_mass(&self) -> MassValue {
        spinor_mass(&self.mass, self.g)
    }

    /// Indices of classes that are alone in their spinor genus.
    pub fn one_class_spinor_genera(&self) -> Vec<usize> {
        self.spinor_genera.iter().filter(|s| s.len() == 1).map(|s| s[0]).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GenusOptions {
    pub max_classes: usize,
    /// Root of the on-disk report cache.
    pub cache: Option<PathBuf>,
}

impl Default for GenusOptions {
    fn default() -> Self {
        GenusOptions { max_classes: 100_000, cache: None }
    }
}

/// Neighbour primes outside S: the least one, then primes whose idèle images
/// extend the span until it fills the quotient.
fn walk_primes(quot: &IdeleClassQuotient) -> Result<Vec<u64>> {
    let mut span = crate::spinor::F2Span::default();
    let mut primes = Vec::new();
    let mut q = 3u64;
    while primes.is_empty() || (span.dim() as u32) < quot.dim() {
        if q > 100_000 {
            return Err(Error::IterationCap("neighbour prime search"));
        }
        if is_prime(q) && !quot.places.contains(&crate::spinor::Place::Finite(q)) {
            let img = quot.prime_image(q)?;
            if primes.is_empty() || span.insert(img) {
                span.insert(img);
                primes.push(q);
            }
        }
        q += 2;
    }
    Ok(primes)
}

struct Node {
    position: u64,
    aut_proper: u64,
}

/// Every class of the genus of `lat`, partitioned into spinor genera.
///
/// The walk runs over proper classes, each labelled with its position in
/// the idèle quotient; it stops once Σ 1/|O⁺| reaches twice the mass.
pub fn enumerate_genus(lat: &GramLattice, opts: &GenusOptions) -> Result<GenusReport> {
    let Some(root) = &opts.cache else {
        return walk_genus(lat, opts);
    };
    if let Some(r) = cache::load(root, lat)? {
        return Ok(r);
    }
    let r = walk_genus(lat, opts)?;
    cache::store(root, &r)?;
    Ok(r)
}

fn walk_genus(lat: &GramLattice, opts: &GenusOptions) -> Result<GenusReport> {
    let c = lat.content();
    if !c.is_one() {
        let c = c.to_i64().ok_or(Error::Overflow("content"))?;
        let mut r = enumerate_genus(&lat.primitive_part(), opts)?;
        for cl in r.classes.iter_mut() {
            cl.lattice = cl.lattice.rescale(c, 1)?;
        }
        r.symbol = genus_symbol(lat)?;
        return Ok(r);
    }
    let quot = idele_quotient(lat)?;
    let mass = total_mass(lat)?;
    if !mass.is_rational() {
        return Err(Error::UnsupportedMass(format!("irrational total mass {mass}")));
    }
    let target = &mass.coeff * BigRational::from_integer(BigInt::from(2));
    let primes = walk_primes(&quot)?;
    let images: Vec<u64> = primes.iter().map(|&q| quot.prime_image(q)).collect::<Result<_>>()?;

    let mut nodes: HashMap<(GramLattice, i32), Node> = HashMap::new();
    let mut improper: HashMap<GramLattice, (u64, bool)> = HashMap::new();
    let mut found = BigRational::zero();

    let root = canonical(lat)?;
    let root_key = (root.gram.clone(), if root.has_improper_aut() { 1 } else { root.orientation() });
    improper.insert(root.gram.clone(), (root.aut_order, root.has_improper_aut()));
    found += BigRational::new(BigInt::one(), BigInt::from(root.aut_proper_order));
    nodes.insert(root_key.clone(), Node { position: 0, aut_proper: root.aut_proper_order });
    let mut frontier = vec![root_key];

    while found < target && !frontier.is_empty() {
        let expanded: Vec<Vec<((GramLattice, i32), u64, u64, u64, bool)>> = frontier
            .par_iter()
            .map(|key| {
                let pos = nodes[key].position;
                let mut out = Vec::new();
                for (&q, &img) in primes.iter().zip(&images) {
                    for (nb, s) in q_neighbors(&key.0, q)? {
                        let c = canonical(&nb)?;
                        let o = if c.has_improper_aut() { 1 } else { key.1 * s * c.orientation() };
                        let imp = c.has_improper_aut();
                        out.push(((c.gram, o), pos ^ img, c.aut_order, c.aut_proper_order, imp));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (key, pos, aut, aut_proper, imp) in expanded.into_iter().flatten() {
            let pos = quot.reduce(pos);
            match nodes.get(&key) {
                Some(node) => {
                    if node.position != pos {
                        return Err(Error::SpinorInconsistency(format!(
                            "class {} reached at positions {:#x} and {:#x}",
                            key.0, node.position, pos
                        )));
                    }
                }
                None => {
                    found += BigRational::new(BigInt::one(), BigInt::from(aut_proper));
                    improper.entry(key.0.clone()).or_insert((aut, imp));
                    nodes.insert(key.clone(), Node { position: pos, aut_proper });
                    next.push(key);
                    if improper.len() > opts.max_classes {
                        return Err(Error::IterationCap("genus enumeration"));
                    }
                }
            }
        }
        frontier = next;
    }
    if found != target {
        return Err(Error::IncompleteGenus {
            found: (found / BigRational::from_integer(BigInt::from(2))).to_string(),
            expected: mass.to_string(),
        });
    }

    // proper spinor genera carry equal proper mass
    let mut proper_mass: BTreeMap<u64, BigRational> = BTreeMap::new();
    for node in nodes.values() {
        *proper_mass.entry(node.position).or_insert_with(BigRational::zero) +=
            BigRational::new(BigInt::one(), BigInt::from(node.aut_proper));
    }
    let share = &target / BigRational::from_integer(BigInt::from(quot.g_plus()));
    if proper_mass.len() as u64 != quot.g_plus() || proper_mass.values().any(|m| *m != share) {
        return Err(Error::SpinorInconsistency(format!(
            "proper spinor genus masses {:?} for g+ = {}",
            proper_mass.values().map(|m| m.to_string()).collect::<Vec<_>>(),
            quot.g_plus()
        )));
    }

    let mut grams: Vec<GramLattice> = improper.keys().cloned().collect();
    grams.sort();
    let mut labels: BTreeMap<u64, usize> = BTreeMap::new();
    let mut classes = Vec::with_capacity(grams.len());
    for gram in grams {
        let (aut, imp) = improper[&gram];
        let pos = if imp {
            if quot.delta != 0 {
                return Err(Error::SpinorInconsistency(format!("{gram} has an improper automorphism but the twist is nontrivial")));
            }
            nodes[&(gram.clone(), 1)].position
        } else {
            let a = nodes.get(&(gram.clone(), 1)).map(|n| n.position);
            let b = nodes.get(&(gram.clone(), -1)).map(|n| n.position);
            match (a, b) {
                (Some(a), Some(b)) if quot.reduce(a ^ b) == quot.delta => a,
                (Some(a), Some(b)) => {
                    return Err(Error::SpinorInconsistency(format!(
                        "orientations of {gram} differ by {:#x}, twist is {:#x}",
                        quot.reduce(a ^ b),
                        quot.delta
                    )))
                }
                _ => return Err(Error::SpinorInconsistency(format!("only one orientation of {gram} was reached"))),
            }
        };
        let key = quot.reduce_improper(pos);
        let next = labels.len();
        let label = *labels.entry(key).or_insert(next);
        classes.push(GenusClass { lattice: gram, aut_order: aut, has_improper_aut: imp, spinor_genus: label });
    }
    let mut spinor_genera = vec![Vec::new(); labels.len()];
    for (i, c) in classes.iter().enumerate() {
        spinor_genera[c.spinor_genus].push(i);
    }
    let index: HashMap<&GramLattice, usize> = classes.iter().enumerate().map(|(i, c)| (&c.lattice, i)).collect();
    let mut proper: BTreeMap<u64, Vec<(usize, i32)>> = BTreeMap::new();
    for ((gram, o), node) in &nodes {
        proper.entry(node.position).or_default().push((index[gram], *o));
    }
    let proper_spinor_genera: Vec<Vec<(usize, i32)>> = proper
        .into_values()
        .map(|mut v| {
            v.sort();
            v
        })
        .collect();
    let mut ones = BigRational::zero();
    for (i, sg) in spinor_genera.iter().enumerate() {
        let m: BigRational = sg.iter().map(|&j| BigRational::new(BigInt::one(), BigInt::from(classes[j].aut_order))).sum();
        if i == 0 {
            ones = m;
        } else if m != ones {
            return Err(Error::SpinorInconsistency(format!("spinor genus masses {ones} and {m} differ")));
        }
    }
    if spinor_genera.len() as u64 != quot.g() {
        return Err(Error::SpinorInconsistency(format!("found {} spinor genera, expected {}", spinor_genera.len(), quot.g())));
    }
    Ok(GenusReport { symbol: genus_symbol(lat)?, classes, spinor_genera, proper_spinor_genera, g_plus: quot.g_plus(), g: quot.g(), mass, primes })
}

/// Pairwise non-isometric lattices of one rank and discriminant, canonical
/// and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSet {
    pub rank: usize,
    pub discriminant: BigInt,
    pub classes: Vec<GramLattice>,
}

impl ClassSet {
    /// Classes of the seed together with all classes of their genera.
    pub fn genus_closure(&self, opts: &GenusOptions) -> Result<ClassSet> {
        let mut all = Vec::new();
        for (_, members) in self.genera()? {
            all.extend(enumerate_genus(&members[0], opts)?.classes.into_iter().map(|c| c.lattice));
        }
        all.sort();
        all.dedup();
        Ok(ClassSet { rank: self.rank, discriminant: self.discriminant.clone(), classes: all })
    }

    /// Canonicalizes and deduplicates.
    pub fn from_lattices(rank: usize, discriminant: BigInt, lats: Vec<GramLattice>) -> Result<Self> {
        for l in &lats {
            if l.rank() != rank {
                return Err(Error::RankMismatch(rank, l.rank()));
            }
        }
        let canon: Vec<GramLattice> = lats.par_iter().map(|l| canonical(l).map(|c| c.gram)).collect::<Result<_>>()?;
        let mut classes: Vec<GramLattice> = canon.into_iter().filter(|c| c.discriminant() == discriminant).collect();
        classes.sort();
        classes.dedup();
        Ok(ClassSet { rank, discriminant, classes })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn genera(&self) -> Result<BTreeMap<GenusSymbol, Vec<GramLattice>>> {
        let mut out: BTreeMap<GenusSymbol, Vec<GramLattice>> = BTreeMap::new();
        for c in &self.classes {
            out.entry(genus_symbol(c)?).or_default().push(c.clone());
        }
        Ok(out)
    }
}

fn det_i128(m: &[Vec<i64>]) -> i128 {
    let g = linalg::from_i64(m);
    linalg::det(&g).to_i128().unwrap()
}

/// Leading (n-1)×(n-1) blocks of reduced Gram matrices: nondecreasing
/// diagonal, |2a_ij| ≤ a_ii, a_1j ≤ 0, positive leading minors.
fn leading_blocks(n: usize, diag_bound: i64) -> Vec<Vec<Vec<i64>>> {
    let m = n - 1;
    let mut out = Vec::new();
    let mut cur = vec![vec![0i64; m]; m];
    fn rec(i: usize, m: usize, n: usize, bound: i64, cur: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        if i == m {
            out.push(cur.clone());
            return;
        }
        let prod: i64 = (0..i).map(|k| cur[k][k]).product();
        let lo = if i == 0 { 1 } else { cur[i - 1][i - 1] };
        let mut a = lo;
        // remaining n - i diagonal entries are all ≥ a
        while prod.saturating_mul(a.saturating_pow((n - i) as u32)) <= bound {
            cur[i][i] = a;
            rec_off(i, 0, m, n, bound, cur, out);
            a += 1;
        }
    }
    fn rec_off(i: usize, j: usize, m: usize, n: usize, bound: i64, cur: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        if j == i {
            let sub: Vec<Vec<i64>> = cur[..=i].iter().map(|r| r[..=i].to_vec()).collect();
            if det_i128(&sub) > 0 {
                rec(i + 1, m, n, bound, cur, out);
            }
            return;
        }
        let h = cur[j][j] / 2;
        let hi = if j == 0 { 0 } else { h };
        for v in -h..=hi {
            cur[i][j] = v;
            cur[j][i] = v;
            rec_off(i, j + 1, m, n, bound, cur, out);
        }
        cur[i][j] = 0;
        cur[j][i] = 0;
    }
    rec(0, m, n, diag_bound, &mut cur, &mut out);
    out
}

/// All classes of rank 3 or 4 and discriminant d by exhaustive search over
/// reduced Gram matrices.
pub fn reduced_classes(rank: usize, d: u64, primitive_only: bool) -> Result<ClassSet> {
    if !(3..=4).contains(&rank) {
        return Err(Error::UnsupportedRank(rank));
    }
    let d = d as i64;
    let bound = if rank == 3 { 2 * d } else { 4 * d };
    let blocks = leading_blocks(rank, bound);
    let m = rank - 1;
    let found: Vec<GramLattice> = blocks
        .par_iter()
        .flat_map_iter(|p| {
            let det_p = det_i128(p);
            let adj = linalg::adjugate(&linalg::from_i64(p));
            let adj: Vec<Vec<i128>> = adj.iter().map(|r| r.iter().map(|x| x.to_i128().unwrap()).collect()).collect();
            let prod: i64 = (0..m).map(|k| p[k][k]).product();
            let last = p[m - 1][m - 1];
            let amax = bound / prod;
            let mut hits = Vec::new();
            let mut c = vec![0i64; m];
            let ranges: Vec<(i64, i64)> = (0..m).map(|k| (-(p[k][k] / 2), if k == 0 { 0 } else { p[k][k] / 2 })).collect();
            let total: i64 = ranges.iter().map(|(a, b)| b - a + 1).product();
            for mut idx in 0..total {
                for k in 0..m {
                    let w = ranges[k].1 - ranges[k].0 + 1;
                    c[k] = ranges[k].0 + idx % w;
                    idx /= w;
                }
                let mut quad = 0i128;
                for i in 0..m {
                    for j in 0..m {
                        quad += c[i] as i128 * adj[i][j] * c[j] as i128;
                    }
                }
                let num = d as i128 + quad;
                if num % det_p != 0 {
                    continue;
                }
                let x = (num / det_p) as i64;
                if x < last || x > amax {
                    continue;
                }
                let mut g = vec![vec![0i64; rank]; rank];
                for i in 0..m {
                    g[i][..m].copy_from_slice(&p[i]);
                    g[i][m] = c[i];
                    g[m][i] = c[i];
                }
                g[m][m] = x;
                let lat = GramLattice::from_rows(&g).expect("positive definite by construction");
                if !primitive_only || lat.is_primitive() {
                    hits.push(lat);
                }
            }
            hits
        })
        .collect();
    ClassSet::from_lattices(rank, BigInt::from(d), found)
}

/// Which sublattices count as primitive during ascension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Primitivity {
    /// Gram content 1.
    Lattice,
    /// Matrices of second partials of primitive forms.
    Form,
    /// Every sublattice.
    Any,
}

impl Primitivity {
    pub fn accepts(self, l: &GramLattice) -> bool {
        match self {
            Primitivity::Lattice => l.is_primitive(),
            Primitivity::Form => l.is_primitive_hessian(),
            Primitivity::Any => true,
        }
    }
}

/// Index-p sublattices of every seed class: one per hyperplane of (Z/p)^n,
/// results filtered by `mode` and deduplicated.
pub fn pall_ascend(seed: &ClassSet, p: u64, mode: Primitivity) -> Result<ClassSet> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let n = seed.rank;
    let pi = p as i64;
    let mut hyperplanes: Vec<(usize, Vec<i64>)> = Vec::new();
    for k in 0..n {
        // φ_k = 1, φ_i = 0 for i > k
        let count = (p as usize).pow(k as u32);
        for mut idx in 0..count {
            let mut phi = vec![0i64; n];
            phi[k] = 1;
            for v in phi.iter_mut().take(k) {
                *v = (idx % p as usize) as i64;
                idx /= p as usize;
            }
            hyperplanes.push((k, phi));
        }
    }
    let bases: Vec<IntMatrix> = hyperplanes
        .iter()
        .map(|(k, phi)| {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    let mut r = vec![0i64; n];
                    if i == *k {
                        r[i] = pi;
                    } else {
                        r[i] = 1;
                        r[*k] = -phi[i];
                    }
                    r
                })
                .collect();
            linalg::from_i64(&rows)
        })
        .collect();
    let target = &seed.discriminant * BigInt::from(p * p);
    let subs: Vec<GramLattice> = seed
        .classes
        .iter()
        .flat_map(|l| bases.iter().map(move |b| l.sublattice(b)))
        .filter(|m| mode.accepts(m))
        .collect();
    ClassSet::from_lattices(n, target, subs)
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub rank: usize,
    pub discriminant: BigInt,
    pub genera: Vec<GenusReport>,
}

/// A class alone in its spinor genus but not in its genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneClassSpinorGenus {
    pub lattice: GramLattice,
    pub h: usize,
    pub h_s: usize,
    pub g: u64,
}

impl ClassificationReport {
    pub fn class_count(&self) -> usize {
        self.genera.iter().map(|g| g.class_number()).sum()
    }

    pub fn genus_count(&self) -> usize {
        self.genera.len()
    }

    pub fn find_one_class_spinor(&self) -> Vec<OneClassSpinorGenus> {
        let mut out = Vec::new();
        for gen in &self.genera {
            if gen.class_number() < 2 {
                continue;
            }
            for i in gen.one_class_spinor_genera() {
                out.push(OneClassSpinorGenus { lattice: gen.classes[i].lattice.clone(), h: gen.class_number(), h_s: 1, g: gen.g });
            }
        }
        out
    }
}

pub fn find_one_class_spinor(reports: &[ClassificationReport]) -> Vec<OneClassSpinorGenus> {
    reports.iter().flat_map(|r| r.find_one_class_spinor()).collect()
}

/// Full genus reports for every genus met by `set`. When `complete` is set the
/// class set must contain each genus entirely.
pub fn classify_set(set: &ClassSet, complete: bool, opts: &GenusOptions) -> Result<ClassificationReport> {
    let genera = set
        .genera()?
        .into_par_iter()
        .map(|(sym, members)| {
            let rep = enumerate_genus(&members[0], opts)?;
            debug_assert_eq!(rep.symbol, sym);
            for m in &members {
                if !rep.classes.iter().any(|c| &c.lattice == m) {
                    return Err(Error::SpinorInconsistency(format!("{m} missing from the walk of its genus")));
                }
            }
            if complete && rep.class_number() != members.len() {
                return Err(Error::IncompleteGenus {
                    found: members.len().to_string(),
                    expected: rep.class_number().to_string(),
                });
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport { rank: set.rank, discriminant: set.discriminant.clone(), genera })
}

/// Repeated index-p ascension from `seed`; one report per level, seed excluded.
pub fn ascension_sweep(seed: &ClassSet, p: u64, steps: usize, mode: Primitivity, opts: &GenusOptions) -> Result<Vec<ClassificationReport>> {
    let mut cur = seed.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        cur = pall_ascend(&cur, p, mode)?;
        out.push(classify_set(&cur, false, opts)?);
    }
    Ok(out)
}

fn gcd_all<'a>(it: impl Iterator<Item = &'a BigInt>) -> BigInt {
    use num_integer::Integer;
    it.fold(BigInt::zero(), |a, b| a.gcd(b))
}

/// Lattices of all primitive forms of discriminant d (determinant of the
/// matrix of second partials), one per equivalence class.
pub fn form_classes(rank: usize, d: u64) -> Result<ClassSet> {
    let n = rank;
    let two = BigInt::from(2);
    // odd cross term: Gram = Hessian, even with an odd off-diagonal entry
    let mut lats: Vec<GramLattice> = reduced_classes(rank, d, false)?
        .classes
        .into_iter()
        .filter(|l| {
            if !l.is_even() {
                return false;
            }
            let g = l.gram();
            let halves: Vec<BigInt> = (0..n).map(|i| &g[i][i] / &two).collect();
            let off: Vec<&BigInt> = (0..n).flat_map(|i| (i + 1..n).map(move |j| &g[i][j])).collect();
            off.iter().any(|x| (*x % &two) != BigInt::zero()) && gcd_all(halves.iter().chain(off.iter().copied())).is_one()
        })
        .collect();
    // all cross terms even: Gram = Hessian / 2
    let scale = 1u64 << n;
    if d % scale == 0 {
        for l in reduced_classes(rank, d / scale, false)?.classes {
            let g = l.gram();
            let coeffs: Vec<BigInt> = (0..n).map(|i| g[i][i].clone()).chain((0..n).flat_map(|i| (i + 1..n).map(move |j| &g[i][j] * BigInt::from(2)))).collect();
            if gcd_all(coeffs.iter()).is_one() {
                lats.push(l);
            }
        }
    }
    let mut classes = lats;
    classes.sort();
    Ok(ClassSet { rank, discriminant: BigInt::from(d), classes })
}

/// Every primitive form class of rank 3 or 4 and discriminant d, grouped by genus.
pub fn classify(d: u64, rank: usize, opts: &GenusOptions) -> Result<ClassificationReport> {
    classify_set(&form_classes(rank, d)?, true, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[[i64; 4]]) -> GramLattice {
        GramLattice::from_rows(rows).unwrap()
    }

    #[test]
    fn small_class_sets() {
        assert_eq!(reduced_classes(4, 1, true).unwrap().len(), 1);
        assert_eq!(reduced_classes(3, 1, true).unwrap().len(), 1);
        for (rank, d) in [(3, 12), (4, 16), (4, 45)] {
            let set = reduced_classes(rank, d, true).unwrap();
            for (sym, members) in set.genera().unwrap() {
                let r = enumerate_genus(&members[0], &GenusOptions::default()).unwrap();
                assert_eq!(r.symbol, sym);
                assert_eq!(r.class_number(), members.len(), "rank {rank} disc {d}");
            }
        }
    }

    #[test]
    fn ascension_lands_in_target() {
        let seed = reduced_classes(4, 1, true).unwrap();
        let up = pall_ascend(&seed, 2, Primitivity::Lattice).unwrap();
        assert!(!up.is_empty());
        let direct = reduced_classes(4, 4, true).unwrap();
        for c in &up.classes {
            assert!(direct.classes.contains(c));
        }
    }

    #[test]
    fn neighbours_keep_discriminant() {
        let l = lat(&[[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 2, 1], [0, 0, 1, 2]]);
        let nb = q_neighbors(&l, 5).unwrap();
        assert!(!nb.is_empty());
        for (m, _) in nb {
            assert_eq!(m.discriminant(), l.discriminant());
        }
    }

    #[test]
    fn form_example_genus() {
        let l1 = lat(&[[2, 0, 0, 1], [0, 6, 3, 0], [0, 3, 6, 0], [1, 0, 0, 14]]);
        let r = enumerate_genus(&l1, &GenusOptions::default()).unwrap();
        assert_eq!(r.class_number(), 3);
        assert_eq!(r.g, 2);
        let c = canonical(&l1).unwrap().gram;
        let i = r.classes.iter().position(|x| x.lattice == c).unwrap();
        assert_eq!(r.spinor_class_number(i), 1);
        assert_eq!(r.one_class_spinor_genera(), vec![i]);
    }
}
