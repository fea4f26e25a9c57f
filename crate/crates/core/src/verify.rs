//! Reference checks: known counts, masses and spinor data recomputed from
//! scratch, one pass/fail verdict per check.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::data::{fixture, ternary_table};
use crate::enumerate::{
    ascension_sweep, classify, classify_set, enumerate_genus, find_one_class_spinor, form_classes, reduced_classes,
    ClassSet, ClassificationReport, GenusOptions, GenusReport, Primitivity,
};
use crate::error::Result;
use crate::isometry::canonical;
use crate::lattice::GramLattice;
use crate::mass::{bound_exponent_check, local_mass, local_mass_split, mass_lower_bound, total_mass, total_mass_local, MassValue};
use crate::padic::{diagonal_gram, dyadic_diagonal, genus_symbol, is_doubled_neither, jordan_split, local_isometric, p_profile, JordanComponent, JordanSplitting, PProfile};
use crate::spinor::{g_plus, theta_from_split};
use crate::watson::mu_p;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Checks that run in seconds to minutes.
    Quick,
    /// Adds the ascension sweep, the doubled dyadic family and the ternary table.
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: u64,
}

/// Runtime budgets per check, in seconds.
pub const BUDGETS: [(&str, u64); 9] =
    [("A1", 120), ("A2", 120), ("A3", 10), ("A4", 10), ("A5", 10), ("A6", 300), ("A7", 2700), ("A8", 1800), ("A9", 3600)];

fn budget(id: &str) -> u64 {
    BUDGETS.iter().find(|b| b.0 == id).map_or(u64::MAX, |b| b.1)
}

fn rat(n: i64, d: i64) -> MassValue {
    MassValue::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn lat(rows: &[[i64; 4]]) -> GramLattice {
    GramLattice::from_rows(rows).expect("valid Gram")
}

/// Collects failures of individual conditions inside one check.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn verdict(self, id: &'static str, elapsed: Duration) -> Verdict {
        let seconds = elapsed.as_secs_f64();
        let budget_seconds = budget(id);
        let mut failures = self.failures;
        if seconds > budget_seconds as f64 {
            failures.push(format!("took {seconds:.1}s, budget {budget_seconds}s"));
        }
        let pass = failures.is_empty();
        let detail = failures.into_iter().chain(self.notes).collect::<Vec<_>>().join("; ");
        Verdict { id, pass, detail, seconds, budget_seconds }
    }
}

fn timed(id: &'static str, f: impl FnOnce(&mut Checks) -> Result<()>) -> Verdict {
    let t = Instant::now();
    let mut c = Checks::default();
    if let Err(e) = f(&mut c) {
        c.failures.push(format!("error: {e}"));
    }
    c.verdict(id, t.elapsed())
}

fn genus_of<'a>(r: &'a ClassificationReport, l: &GramLattice) -> Result<Option<&'a GenusReport>> {
    let c = canonical(l)?.gram;
    Ok(r.genera.iter().find(|g| g.classes.iter().any(|x| x.lattice == c)))
}

fn profile(p: u64, e: &[u32]) -> PProfile {
    PProfile::new(p, e.to_vec())
}

fn genus_has_profile(g: &GenusReport, p: &PProfile) -> Result<bool> {
    Ok(&p_profile(&g.classes[0].lattice, p.prime)? == p)
}

/// Whether every proper spinor genus of a genus with g⁺ > 1 has at least two
/// proper classes.
pub fn splits_properly(g: &GenusReport) -> bool {
    g.g_plus > 1 && g.proper_spinor_genera.iter().all(|s| s.len() >= 2)
}

/// Sum of 1/|O| over the genus equals its mass, and spinor genera carry
/// equal mass.
pub fn mass_certificate(g: &GenusReport) -> std::result::Result<(), String> {
    let sum: BigRational = g.classes.iter().map(|c| BigRational::new(BigInt::one(), BigInt::from(c.aut_order))).sum();
    if MassValue::rational(sum.clone()) != g.mass {
        return Err(format!("{}: Σ1/|O| = {sum}, mass {}", g.symbol, g.mass));
    }
    if g.spinor_genera.len() as u64 != g.g {
        return Err(format!("{}: {} spinor genera, g = {}", g.symbol, g.spinor_genera.len(), g.g));
    }
    let share = &sum / BigRational::from_integer(BigInt::from(g.g));
    for s in &g.spinor_genera {
        let m: BigRational = s.iter().map(|&i| BigRational::new(BigInt::one(), BigInt::from(g.classes[i].aut_order))).sum();
        if m != share {
            return Err(format!("{}: spinor genus mass {m}, expected {share}", g.symbol));
        }
    }
    Ok(())
}

/// State shared between checks so later ones reuse earlier enumerations.
pub struct Verifier {
    pub opts: GenusOptions,
    disc729: Option<ClassificationReport>,
    sweep: Option<Vec<ClassificationReport>>,
    doubled: Option<Vec<ClassificationReport>>,
}

impl Verifier {
    pub fn new(opts: GenusOptions) -> Self {
        Verifier { opts, disc729: None, sweep: None, doubled: None }
    }

    fn disc729(&mut self) -> Result<&ClassificationReport> {
        if self.disc729.is_none() {
            self.disc729 = Some(classify(729, 4, &self.opts)?);
        }
        Ok(self.disc729.as_ref().unwrap())
    }

    pub fn run(&mut self, scope: Scope) -> Vec<Verdict> {
        let mut out = vec![self.a1(), self.a2(), self.a3(), self.a4(), self.a5()];
        if scope == Scope::Full {
            out.push(self.a7());
            out.push(self.a8());
            out.push(self.a9());
        }
        out.insert(5, self.a6());
        out
    }

    /// Discriminant 729: class count, profile slice, the spinor partition of
    /// the example genus and three one-class genera.
    pub fn a1(&mut self) -> Verdict {
        let t = Instant::now();
        let mut c = Checks::default();
        if let Err(e) = self.a1_inner(&mut c) {
            c.failures.push(format!("error: {e}"));
        }
        c.verdict("A1", t.elapsed())
    }

    fn a1_inner(&mut self, c: &mut Checks) -> Result<()> {
        let r = self.disc729()?;
        c.expect(r.class_count() == 33, format!("{} classes, expected 33", r.class_count()));
        let slice = profile(3, &[0, 1, 2, 3]);
        let mut in_slice = 0;
        for g in &r.genera {
            if genus_has_profile(g, &slice)? {
                in_slice += g.class_number();
            }
        }
        c.expect(in_slice == 6, format!("{in_slice} classes with 3-profile (0,1,2,3), expected 6"));
        let [l1, l2, l3] = ["L1", "L2", "L3"].map(|n| fixture(n).and_then(|l| canonical(&l)).map(|c| c.gram));
        let (l1, l2, l3) = (l1?, l2?, l3?);
        match genus_of(r, &fixture("example")?)? {
            Some(g) => {
                c.expect(g.class_number() == 3 && g.g == 2, format!("example genus h={} g={}", g.class_number(), g.g));
                let parts: BTreeSet<BTreeSet<GramLattice>> = g
                    .spinor_genera
                    .iter()
                    .map(|s| s.iter().map(|&i| g.classes[i].lattice.clone()).collect())
                    .collect();
                let expect: BTreeSet<BTreeSet<GramLattice>> = [BTreeSet::from([l1]), BTreeSet::from([l2, l3])].into();
                c.expect(parts == expect, "spinor partition is not {L1} ∪ {L2, L3}");
            }
            None => c.expect(false, "example form not found"),
        }
        for name in ["M1", "M2", "M3"] {
            let h = genus_of(r, &fixture(name)?)?.map(|g| g.class_number());
            c.expect(h == Some(1), format!("{name}: genus class number {h:?}"));
        }
        c.note(format!("33 classes in {} genera, 6 in the (0,1,2,3)_3 slice", r.genus_count()));
        Ok(())
    }

    /// The only one-class spinor genus that is not a one-class genus at 729 is
    /// the example form.
    pub fn a2(&mut self) -> Verdict {
        let t = Instant::now();
        let mut c = Checks::default();
        let res = (|| -> Result<()> {
            let r = self.disc729()?;
            let found = find_one_class_spinor(std::slice::from_ref(r));
            let target = canonical(&fixture("example")?)?.gram;
            c.expect(found.len() == 1, format!("{} one-class spinor genera", found.len()));
            if let Some(f) = found.first() {
                c.expect(f.lattice == target, format!("found {}", f.lattice));
                c.note(format!("{} with h={}, g={}", f.lattice, f.h, f.g));
            }
            Ok(())
        })();
        if let Err(e) = res {
            c.failures.push(format!("error: {e}"));
        }
        c.verdict("A2", t.elapsed())
    }

    /// Local and total mass values.
    pub fn a3(&mut self) -> Verdict {
        timed("A3", |c| {
            let species = [
                (lat(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 3, 0], [0, 0, 0, 3]]), rat(1, 4)),
                (lat(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 5]]), rat(1, 12)),
                (lat(&[[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 2, 1], [0, 0, 1, 2]]), rat(1, 18)),
                (lat(&[[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 2, 1], [0, 0, 1, 4]]), rat(1, 30)),
                (lat(&[[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 8, 4], [0, 0, 4, 8]]), rat(1, 9)),
            ];
            for (l, m) in &species {
                let got = local_mass(l, 2)?;
                c.expect(&got == m, format!("m_2 of {l} is {got}, expected {m}"));
            }
            for q in [3u64, 5, 7, 11] {
                for (k, l, m) in [(1u32, 2u32, 3u32), (1, 3, 4), (2, 3, 5), (1, 4, 6)] {
                    let split = JordanSplitting {
                        prime: q,
                        components: [0, k, l, m].iter().map(|&s| JordanComponent { prime: q, scale: s, units: vec![1], blocks: vec![] }).collect(),
                    };
                    let expect = MassValue::half_power(q, (3 * m + l - k) as i64).mul_rational(&BigRational::new(BigInt::one(), BigInt::from(16)));
                    c.expect(local_mass_split(&split) == expect, format!("m_{q} at ({k},{l},{m})"));
                }
            }
            let two = jordan_split(&species[4].0, 2)?;
            let seven = JordanSplitting {
                prime: 7,
                components: (0..4).map(|s| JordanComponent { prime: 7, scale: s, units: vec![1], blocks: vec![] }).collect(),
            };
            let d = BigInt::from(16) * BigInt::from(7).pow(6);
            let (m, _) = total_mass_local(4, &d, &[two, seven])?;
            c.expect(m == rat(7, 1), format!("mass at 2^4·7^6 is {m}"));
            let mut doubled = 0;
            for (name, mm) in [("D4L1", 4), ("D4L2", 4), ("D4L3", 4), ("D4L4", 4), ("D5L2", 5), ("D5L3", 5), ("D6L1", 6), ("D6L2", 6), ("D6L4", 6)] {
                let l = fixture(name)?;
                let split = jordan_split(&l, 2)?;
                if !is_doubled_neither(&split, mm) {
                    continue;
                }
                doubled += 1;
                let e = 2 * mm as i64;
                let m2 = local_mass(&l, 2)?;
                c.expect(m2 == MassValue::half_power(2, 2 * (e - 6)), format!("{name}: m_2 = {m2}"));
                let tm = total_mass(&l)?;
                c.expect(tm == MassValue::half_power(2, 2 * (e - 11)), format!("{name}: m = {tm}"));
            }
            c.expect(doubled == 9, format!("{doubled} doubled fixtures"));
            c.note("species 1/4, 1/12, 1/18, 1/30; 1/9; closed odd form; 7; doubled family");
            Ok(())
        })
    }

    /// Thresholds where the mass lower bound first exceeds 1.
    pub fn a4(&mut self) -> Verdict {
        timed("A4", |c| {
            for (q, even, expect) in [(3u64, true, 16i64), (3, false, 17), (5, true, 11), (7, true, 9)] {
                let got = bound_exponent_check(q, even)?;
                c.expect(got == expect, format!("q={q} even={even}: threshold {got}, expected {expect}"));
                for m in 3..=12u32 {
                    for l in 2..m {
                        for k in 1..l {
                            let above = mass_lower_bound(q, k, l, m, even).cmp_value(&MassValue::one()).is_gt();
                            let e = 3 * m as i64 + l as i64 - k as i64;
                            c.expect(above == (e > expect), format!("q={q} ({k},{l},{m})"));
                        }
                    }
                }
            }
            c.note("16, 17, 11, 9");
            Ok(())
        })
    }

    /// Spinor norm group of the three-step dyadic lattice and g⁺ of a global
    /// lattice carrying it.
    pub fn a5(&mut self) -> Verdict {
        timed("A5", |c| {
            let th = theta_from_split(&dyadic_diagonal(&[(0, 3), (4, 3), (4, 7), (8, 7)]));
            c.expect(th.representatives() == vec![1, 5, 6, 14], format!("θ = {th}"));
            let l = fixture("E16")?;
            let local = diagonal_gram(&[(0, 3), (4, 3), (4, 7), (8, 7)]);
            c.expect(local_isometric(&l, &local, 2)?, "E16 has the wrong 2-adic structure");
            let below = canonical(&mu_p(&l, 2)?)?.gram;
            c.expect(below == canonical(&fixture("E10")?)?.gram, "μ_2(E16) is not E10");
            let gp = g_plus(&l)?;
            c.expect(gp == 1, format!("g+ = {gp}"));
            c.note(format!("θ = {th}, g+ = {gp}"));
            Ok(())
        })
    }

    /// Mass certificates on every genus computed so far.
    pub fn a6(&mut self) -> Verdict {
        timed("A6", |c| {
            let mut n = 0;
            let reports = self.disc729.iter().chain(self.sweep.iter().flatten()).chain(self.doubled.iter().flatten());
            for r in reports {
                for g in &r.genera {
                    n += 1;
                    if let Err(e) = mass_certificate(g) {
                        c.expect(false, e);
                    }
                }
            }
            c.expect(n > 0, "no genera to check");
            c.note(format!("{n} genera"));
            Ok(())
        })
    }

    /// Ascension by index-2 sublattices from the forms of discriminant 3⁶.
    pub fn a7(&mut self) -> Verdict {
        let t = Instant::now();
        let mut c = Checks::default();
        let res = (|| -> Result<()> {
            let seed = form_classes(4, 729)?;
            let levels = ascension_sweep(&seed, 2, 3, Primitivity::Any, &self.opts)?;
            let slice = profile(3, &[0, 1, 2, 3]);
            let k1 = genus_symbol(&fixture("K1")?)?;
            let mut class_one = Vec::new();
            let mut ocsg = 0;
            for (r, (genera, sliced)) in levels.iter().zip([(18, 8), (63, 28), (135, 60)]) {
                let mut in_slice = 0;
                for g in &r.genera {
                    let primitive = Primitivity::Form.accepts(&g.classes[0].lattice);
                    if genus_has_profile(g, &slice)? {
                        in_slice += 1;
                        if primitive && g.class_number() == 1 {
                            class_one.push(g.symbol.clone());
                        }
                    }
                    if primitive && g.class_number() > 1 {
                        ocsg += g.one_class_spinor_genera().len();
                    }
                }
                c.expect(r.genus_count() == genera, format!("{} genera at {}, expected {genera}", r.genus_count(), r.discriminant));
                c.expect(in_slice == sliced, format!("{in_slice} sliced genera at {}, expected {sliced}", r.discriminant));
            }
            c.expect(class_one == vec![k1.clone()], format!("class-number-1 genera in the slice: {}", class_one.len()));
            c.expect(ocsg == 0, format!("{ocsg} one-class spinor genera with h > 1"));
            c.note(format!("{:?} genera", levels.iter().map(|r| r.genus_count()).collect::<Vec<_>>()));
            self.sweep = Some(levels);
            Ok(())
        })();
        if let Err(e) = res {
            c.failures.push(format!("error: {e}"));
        }
        c.verdict("A7", t.elapsed())
    }

    /// Doubled binary dyadic structures at 2^{2m}, m = 4, 5, 6.
    pub fn a8(&mut self) -> Verdict {
        let t = Instant::now();
        let mut c = Checks::default();
        let res = (|| -> Result<()> {
            let mut reports = Vec::new();
            let plan: [(u32, usize, &[&str], &[&str]); 3] = [
                (4, 4, &["D4L1"], &["D4L2", "D4L3", "D4L4"]),
                (5, 3, &["D5L2", "D5L3"], &["D5L1"]),
                (6, 4, &["D6L2", "D6L4"], &["D6L1", "D6L3"]),
            ];
            for (m, expect, split, whole) in plan {
                let d = 1u64 << (2 * m);
                let all = reduced_classes(4, d, true)?;
                let mut keep = Vec::new();
                for l in all.classes {
                    if is_doubled_neither(&jordan_split(&l, 2)?, m) {
                        keep.push(l);
                    }
                }
                let r = classify_set(&ClassSet::from_lattices(4, BigInt::from(d), keep)?, true, &self.opts)?;
                c.expect(r.genus_count() == expect, format!("m={m}: {} genera, expected {expect}", r.genus_count()));
                for name in split {
                    let g = enumerate_genus(&fixture(name)?, &self.opts)?;
                    c.expect(splits_properly(&g), format!("{name}: genus does not split (h={}, g+={})", g.class_number(), g.g_plus));
                }
                for name in whole {
                    let g = enumerate_genus(&fixture(name)?, &self.opts)?;
                    c.expect(!splits_properly(&g), format!("{name}: genus splits"));
                }
                let splitting = r.genera.iter().filter(|g| splits_properly(g)).count();
                c.note(format!("m={m}: {} genera, {splitting} split", r.genus_count()));
                reports.push(r);
            }
            self.doubled = Some(reports);
            Ok(())
        })();
        if let Err(e) = res {
            c.failures.push(format!("error: {e}"));
        }
        c.verdict("A8", t.elapsed())
    }

    /// Every ternary table entry is alone in its spinor genus but not in its
    /// genus.
    pub fn a9(&mut self) -> Verdict {
        timed("A9", |c| {
            let table = ternary_table();
            for e in &table {
                let l = e.lattice();
                let g = enumerate_genus(&l, &self.opts)?;
                let me = canonical(&l)?.gram;
                match g.classes.iter().position(|x| x.lattice == me) {
                    Some(i) => {
                        let hs = g.spinor_class_number(i);
                        c.expect(hs == 1 && g.class_number() > 1, format!("{:?}: h={} h_s={hs}", e.coefficients, g.class_number()));
                    }
                    None => c.expect(false, format!("{:?} missing from its genus", e.coefficients)),
                }
            }
            c.note(format!("{} forms", table.len()));
            Ok(())
        })
    }
}

impl Verdict {
    pub fn line(&self) -> String {
        format!("{} {} ({:.1}s) {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.seconds, self.detail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_mass_checks() {
        let mut v = Verifier::new(GenusOptions::default());
        for r in [v.a3(), v.a4(), v.a5()] {
            assert!(r.pass, "{}", r.line());
        }
        assert!(!v.a6().pass);
    }

    #[test]
    fn certificate_rejects_tampering() {
        let l = fixture("L1").unwrap();
        let mut g = enumerate_genus(&l, &GenusOptions::default()).unwrap();
        assert!(mass_certificate(&g).is_ok());
        g.classes[0].aut_order *= 2;
        assert!(mass_certificate(&g).is_err());
    }
}
