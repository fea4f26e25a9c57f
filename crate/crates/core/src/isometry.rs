//! Canonical forms, isometry testing and automorphism counts for positive
//! definite lattices of rank at most 4.
//!
//! The canonical Gram matrix is the lexicographically least sequence
//! (Q(v_k), B(v_1,v_k), …, B(v_{k−1},v_k))_{k=1..n} over all bases v_1..v_n.
//! The search keeps every partial basis achieving the least prefix, so the
//! number of surviving bases equals |O(L)|.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::linalg::IntMatrix;

const N: usize = 4;
type Mat = [[i128; N]; N];
type Basis = [[i64; N]; N];

fn ovf<T>(x: Option<T>) -> Result<T> {
    x.ok_or(Error::Overflow("isometry kernel"))
}

fn mul(a: i128, b: i128) -> Result<i128> {
    ovf(a.checked_mul(b))
}

fn add(a: i128, b: i128) -> Result<i128> {
    ovf(a.checked_add(b))
}

fn det_small(m: &Mat, idx: &[usize]) -> Result<i128> {
    match idx.len() {
        0 => Ok(1),
        1 => Ok(m[idx[0]][idx[0]]),
        _ => {
            // cofactor expansion along the first row of the principal submatrix idx×idx
            let mut s = 0i128;
            for (c, &col) in idx.iter().enumerate() {
                let rows = &idx[1..];
                let cols: Vec<usize> = idx.iter().copied().filter(|&x| x != col).collect();
                let minor = det_rect(m, rows, &cols)?;
                let term = mul(m[idx[0]][col], minor)?;
                s = if c % 2 == 0 { add(s, term)? } else { add(s, -term)? };
            }
            Ok(s)
        }
    }
}

fn det_rect(m: &Mat, rows: &[usize], cols: &[usize]) -> Result<i128> {
    match rows.len() {
        0 => Ok(1),
        1 => Ok(m[rows[0]][cols[0]]),
        _ => {
            let mut s = 0i128;
            for (c, &col) in cols.iter().enumerate() {
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != col).collect();
                let term = mul(m[rows[0]][col], det_rect(m, &rows[1..], &rest)?)?;
                s = if c % 2 == 0 { add(s, term)? } else { add(s, -term)? };
            }
            Ok(s)
        }
    }
}

/// Integer data for exact Fincke–Pohst enumeration: for each level k the
/// Schur complement of the leading k×k block scaled by its determinant.
struct Enumerator {
    n: usize,
    dets: [i128; N + 1],
    schur: [Mat; N],
}

impl Enumerator {
    fn new(g: &Mat, n: usize) -> Result<Self> {
        let mut dets = [0i128; N + 1];
        let mut schur = [[[0i128; N]; N]; N];
        for k in 0..n {
            let lead: Vec<usize> = (0..k).collect();
            dets[k] = det_small(g, &lead)?;
            // S_k[i][j] for i,j >= k: D_k g_ij − g_i,lead adj(g_lead) g_lead,j,
            // equivalently the determinant of the bordered (k+1)×(k+1) matrix.
            for i in k..n {
                for j in k..n {
                    let mut rows = lead.clone();
                    rows.push(i);
                    let mut cols = lead.clone();
                    cols.push(j);
                    schur[k][i][j] = det_rect(g, &rows, &cols)?;
                }
            }
        }
        dets[n] = det_small(g, &(0..n).collect::<Vec<_>>())?;
        Ok(Enumerator { n, dets, schur })
    }

    /// Calls `f` on every x with Q(x) ≤ bound (including x = 0).
    fn run(&self, bound: i128, f: &mut dyn FnMut(&[i64; N]) -> Result<()>) -> Result<()> {
        let mut x = [0i64; N];
        self.level(self.n - 1, bound, &mut x, f)
    }

    fn level(&self, k: usize, bound: i128, x: &mut [i64; N], f: &mut dyn FnMut(&[i64; N]) -> Result<()>) -> Result<()> {
        let s = &self.schur[k];
        let n = self.n;
        let s00 = s[k][k];
        let mut beta = 0i128;
        let mut gamma = 0i128;
        for j in k + 1..n {
            beta = add(beta, mul(s[k][j], x[j] as i128)?)?;
            for i in k + 1..n {
                gamma = add(gamma, mul(mul(s[i][j], x[i] as i128)?, x[j] as i128)?)?;
            }
        }
        let r = mul(bound, self.dets[k])?;
        // s00 t² + 2βt + γ ≤ r
        let disc = add(mul(beta, beta)?, -mul(s00, add(gamma, -r)?)?)?;
        if disc < 0 {
            return Ok(());
        }
        let root = isqrt(disc) + 1;
        let lo = (-beta - root).div_euclid(s00);
        let hi = (-beta + root).div_euclid(s00) + 1;
        for t in lo..=hi {
            let val = add(add(mul(mul(s00, t)?, t)?, mul(2 * beta, t)?)?, gamma)?;
            if val > r {
                continue;
            }
            x[k] = ovf(i64::try_from(t).ok())?;
            if k == 0 {
                f(x)?;
            } else {
                self.level(k - 1, bound, x, f)?;
            }
        }
        x[k] = 0;
        Ok(())
    }
}

fn isqrt(v: i128) -> i128 {
    if v < 2 {
        return v;
    }
    let mut r = (v as f64).sqrt() as i128;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

fn gram_of(g: &Mat, b: &Basis, n: usize) -> Result<Mat> {
    let mut out = [[0i128; N]; N];
    let mut tmp = [[0i128; N]; N];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0i128;
            for k in 0..n {
                s = add(s, mul(b[i][k] as i128, g[k][j])?)?;
            }
            tmp[i][j] = s;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut s = 0i128;
            for k in 0..n {
                s = add(s, mul(tmp[i][k], b[j][k] as i128)?)?;
            }
            out[i][j] = s;
        }
    }
    Ok(out)
}

fn round_div(a: i128, b: i128) -> i128 {
    // nearest integer to a/b for b > 0
    (2 * a + b).div_euclid(2 * b)
}

/// Pairwise size reduction of rows `movable` against all rows; preserves the
/// lattice and the rows outside `movable`.
fn pair_reduce(g: &Mat, b: &mut Basis, n: usize, movable: std::ops::Range<usize>) -> Result<Mat> {
    let mut gr = gram_of(g, b, n)?;
    loop {
        let mut changed = false;
        for j in movable.clone() {
            for i in 0..n {
                if i == j {
                    continue;
                }
                if 2 * gr[i][j].abs() > gr[i][i] {
                    let q = round_div(gr[i][j], gr[i][i]);
                    let qi = ovf(i64::try_from(q).ok())?;
                    for c in 0..n {
                        b[j][c] = ovf(b[j][c].checked_sub(ovf(qi.checked_mul(b[i][c]))?))?;
                    }
                    gr = gram_of(g, b, n)?;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(gr);
        }
    }
}

/// Unimodular m×m matrix (m ≤ 4) whose first row is the primitive vector `v`.
fn complete_primitive(v: &[i64]) -> Option<[[i64; N]; N]> {
    let m = v.len();
    let mut w: Vec<i64> = v.to_vec();
    // V tracks U⁻¹ where U·v = e₁
    let mut inv = [[0i64; N]; N];
    for (i, row) in inv.iter_mut().enumerate().take(m) {
        row[i] = 1;
    }
    for i in (1..m).rev() {
        if w[i] == 0 {
            continue;
        }
        let (g, x, y) = ext_gcd(w[i - 1], w[i]);
        let a = w[i - 1] / g;
        let b = w[i] / g;
        // E = [[x, y], [-b, a]] on rows i−1, i; E⁻¹ = [[a, -y], [b, x]]; V ← V·E⁻¹
        for row in inv.iter_mut().take(m) {
            let (p, q) = (row[i - 1], row[i]);
            row[i - 1] = p * a + q * b;
            row[i] = -p * y + q * x;
        }
        w[i - 1] = g;
        w[i] = 0;
    }
    if w[0] == -1 {
        for row in inv.iter_mut().take(m) {
            row[0] = -row[0];
        }
    } else if w[0] != 1 {
        return None;
    }
    let mut out = [[0i64; N]; N];
    for i in 0..m {
        for j in 0..m {
            out[i][j] = inv[j][i];
        }
    }
    Some(out)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1i64, 0i64, 0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn det_basis(b: &Basis, n: usize) -> Result<i128> {
    let mut m = [[0i128; N]; N];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = b[i][j] as i128;
        }
    }
    det_rect(&m, &(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>())
}

fn basis_mul(a: &Basis, b: &Basis, n: usize) -> Result<Basis> {
    let mut out = [[0i64; N]; N];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0i64;
            for k in 0..n {
                s = ovf(s.checked_add(ovf(a[i][k].checked_mul(b[k][j]))?))?;
            }
            out[i][j] = s;
        }
    }
    Ok(out)
}

fn to_small(lat: &GramLattice) -> Result<(Mat, usize)> {
    let n = lat.rank();
    let mut g = [[0i128; N]; N];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = lat.entry(i, j).to_i64().ok_or(Error::Overflow("gram entry"))? as i128;
        }
    }
    Ok((g, n))
}

fn identity_basis(n: usize) -> Basis {
    let mut b = [[0i64; N]; N];
    for (i, row) in b.iter_mut().enumerate().take(n) {
        row[i] = 1;
    }
    b
}

/// Result of the canonical basis search.
#[derive(Clone, Debug)]
pub struct Canonical {
    /// The canonical Gram matrix.
    pub gram: GramLattice,
    /// One basis (rows, coordinates in the input basis) realising `gram`.
    pub basis: IntMatrix,
    /// |O(L)|.
    pub aut_order: u64,
    /// |O⁺(L)|.
    pub aut_proper_order: u64,
}

impl Canonical {
    pub fn has_improper_aut(&self) -> bool {
        self.aut_order != self.aut_proper_order
    }

    /// Determinant (±1) of the canonical basis relative to the input basis.
    pub fn orientation(&self) -> i32 {
        crate::linalg::det(&self.basis).to_i32().expect("unimodular")
    }
}

struct State {
    basis: Basis,
    gram: Mat,
}

/// Canonical form, one canonical basis and automorphism counts.
pub fn canonical(lat: &GramLattice) -> Result<Canonical> {
    let (g0, n) = to_small(lat)?;
    let mut b0 = identity_basis(n);
    let g = pair_reduce(&g0, &mut b0, n, 0..n)?;

    let mut states = vec![State { basis: identity_basis(n), gram: g }];
    let mut prefix: Vec<i128> = Vec::new();
    for k in 0..n {
        let mut best: Option<Vec<i128>> = None;
        let mut cands: Vec<(usize, [i64; N])> = Vec::new();
        for (si, st) in states.iter().enumerate() {
            let bound = (k..n).map(|j| st.gram[j][j]).min().unwrap();
            let bound = match &best {
                Some(t) => bound.min(t[0]),
                None => bound,
            };
            let en = Enumerator::new(&st.gram, n)?;
            en.run(bound, &mut |x| {
                let tail = x[k..n].iter().fold(0i64, |a, &c| gcd_i64(a, c));
                if tail != 1 {
                    return Ok(());
                }
                let mut key = Vec::with_capacity(k + 1);
                let mut q = 0i128;
                for i in 0..n {
                    for j in 0..n {
                        q = add(q, mul(mul(st.gram[i][j], x[i] as i128)?, x[j] as i128)?)?;
                    }
                }
                key.push(q);
                for i in 0..k {
                    let mut s = 0i128;
                    for j in 0..n {
                        s = add(s, mul(st.gram[i][j], x[j] as i128)?)?;
                    }
                    key.push(s);
                }
                match &best {
                    Some(t) if key > *t => {}
                    Some(t) if key == *t => cands.push((si, *x)),
                    _ => {
                        best = Some(key);
                        cands.clear();
                        cands.push((si, *x));
                    }
                }
                Ok(())
            })?;
        }
        let best = best.expect("a primitive extension always exists");
        prefix.extend(best);
        let mut next = Vec::with_capacity(cands.len());
        for (si, x) in cands {
            let st = &states[si];
            let comp = complete_primitive(&x[k..n]).expect("primitive tail");
            let mut nb = st.basis;
            // v = Σ x_i b_i
            for c in 0..n {
                let mut s = 0i64;
                for i in 0..n {
                    s = ovf(s.checked_add(ovf(x[i].checked_mul(st.basis[i][c]))?))?;
                }
                nb[k][c] = s;
            }
            for r in 1..n - k {
                for c in 0..n {
                    let mut s = 0i64;
                    for j in 0..n - k {
                        s = ovf(s.checked_add(ovf(comp[r][j].checked_mul(st.basis[k + j][c]))?))?;
                    }
                    nb[k + r][c] = s;
                }
            }
            let gram = pair_reduce(&g, &mut nb, n, k + 1..n)?;
            next.push(State { basis: nb, gram });
        }
        states = next;
    }

    let first = &states[0];
    let base_det = det_basis(&first.basis, n)?;
    let proper = states.iter().map(|s| det_basis(&s.basis, n)).collect::<Result<Vec<_>>>()?;
    let aut_proper_order = proper.iter().filter(|&&d| d == base_det).count() as u64;
    let full = basis_mul(&first.basis, &b0, n)?;
    let basis: IntMatrix = (0..n).map(|i| (0..n).map(|j| BigInt::from(full[i][j])).collect()).collect();
    let cg: IntMatrix = (0..n).map(|i| (0..n).map(|j| BigInt::from(first.gram[i][j])).collect()).collect();
    Ok(Canonical {
        gram: GramLattice::from_trusted(cg),
        basis,
        aut_order: states.len() as u64,
        aut_proper_order,
    })
}

/// Canonical reduced representative of the isometry class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedGram {
    pub gram: GramLattice,
    pub min: BigInt,
}

pub fn reduce(lat: &GramLattice) -> Result<ReducedGram> {
    let c = canonical(lat)?;
    let min = c.gram.entry(0, 0).clone();
    Ok(ReducedGram { gram: c.gram, min })
}

/// If L ≅ M, returns P with Pᵀ·gram(L)·P = gram(M).
pub fn isometric(l: &GramLattice, m: &GramLattice) -> Result<Option<IntMatrix>> {
    if l.rank() != m.rank() {
        return Err(Error::RankMismatch(l.rank(), m.rank()));
    }
    if l.discriminant() != m.discriminant() {
        return Ok(None);
    }
    let (cl, cm) = (canonical(l)?, canonical(m)?);
    if cl.gram != cm.gram {
        return Ok(None);
    }
    // rows: T_L G_L T_Lᵀ = T_M G_M T_Mᵀ, so P = T_Lᵀ T_M⁻ᵀ
    let tm = &cm.basis;
    let d = crate::linalg::det(tm);
    let tm_inv: IntMatrix = crate::linalg::adjugate(tm).into_iter().map(|r| r.into_iter().map(|x| x * &d).collect()).collect();
    let p = crate::linalg::mul(&crate::linalg::transpose(&cl.basis), &crate::linalg::transpose(&tm_inv));
    Ok(Some(p))
}

pub fn aut_order(lat: &GramLattice) -> Result<u64> {
    Ok(canonical(lat)?.aut_order)
}

pub fn aut_proper_order(lat: &GramLattice) -> Result<u64> {
    Ok(canonical(lat)?.aut_proper_order)
}

pub fn has_improper_aut(lat: &GramLattice) -> Result<bool> {
    Ok(canonical(lat)?.has_improper_aut())
}

/// All vectors with 0 < Q(v) ≤ bound, one of each ± pair (first nonzero
/// coordinate positive), sorted by value then coordinates.
pub fn short_vectors(lat: &GramLattice, bound: &BigInt) -> Result<Vec<(Vec<BigInt>, BigInt)>> {
    let (g0, n) = to_small(lat)?;
    let mut b0 = identity_basis(n);
    let g = pair_reduce(&g0, &mut b0, n, 0..n)?;
    let bound = bound.to_i128().ok_or(Error::Overflow("bound"))?;
    let en = Enumerator::new(&g, n)?;
    let mut out: Vec<([i64; N], i128)> = Vec::new();
    en.run(bound, &mut |x| {
        if x.iter().all(|&c| c == 0) {
            return Ok(());
        }
        let mut v = [0i64; N];
        for c in 0..n {
            for i in 0..n {
                v[c] = ovf(v[c].checked_add(ovf(x[i].checked_mul(b0[i][c]))?))?;
            }
        }
        if v.iter().find(|&&c| c != 0).copied().unwrap_or(0) < 0 {
            return Ok(());
        }
        let mut q = 0i128;
        for i in 0..n {
            for j in 0..n {
                q = add(q, mul(mul(g0[i][j], v[i] as i128)?, v[j] as i128)?)?;
            }
        }
        out.push((v, q));
        Ok(())
    })?;
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(out
        .into_iter()
        .map(|(v, q)| (v[..n].iter().map(|&c| BigInt::from(c)).collect(), BigInt::from(q)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_rows(rows).unwrap()
    }

    fn i4() -> GramLattice {
        lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]])
    }

    #[test]
    fn identity_automorphisms() {
        let c = canonical(&i4()).unwrap();
        assert_eq!(c.gram, i4());
        assert_eq!(c.aut_order, 384);
        assert_eq!(c.aut_proper_order, 192);
    }

    #[test]
    fn small_automorphism_groups() {
        // A2: dihedral of order 12; D4 root lattice: 1152
        assert_eq!(aut_order(&lat(&[&[2, 1], &[1, 2]])).unwrap(), 12);
        let d4 = lat(&[&[2, -1, 0, 0], &[-1, 2, -1, -1], &[0, -1, 2, 0], &[0, -1, 0, 2]]);
        assert_eq!(aut_order(&d4).unwrap(), 1152);
        assert_eq!(aut_order(&lat(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]])).unwrap(), 8);
    }

    #[test]
    fn canonical_is_basis_invariant() {
        let l1 = lat(&[&[2, 0, 0, 1], &[0, 6, 3, 0], &[0, 3, 6, 0], &[1, 0, 0, 14]]);
        let u = linalg::from_i64(&[vec![1, 2, 0, -1], vec![0, 1, 3, 0], vec![0, 0, 1, 5], vec![0, 0, 0, 1]]);
        let m = l1.sublattice(&u);
        assert_eq!(canonical(&l1).unwrap().gram, canonical(&m).unwrap().gram);
        let p = isometric(&l1, &m).unwrap().unwrap();
        let check = linalg::congruence(l1.gram(), &linalg::transpose(&p));
        assert_eq!(&check, m.gram());
    }

    #[test]
    fn form_and_fixture_agree() {
        let f = lat(&[&[2, 1, 0, 0], &[1, 14, 0, 0], &[0, 0, 6, 3], &[0, 0, 3, 6]]);
        let l1 = lat(&[&[2, 0, 0, 1], &[0, 6, 3, 0], &[0, 3, 6, 0], &[1, 0, 0, 14]]);
        let l2 = lat(&[&[2, 1, 0, 0], &[1, 2, 0, 0], &[0, 0, 18, 9], &[0, 0, 9, 18]]);
        assert!(isometric(&f, &l1).unwrap().is_some());
        assert!(isometric(&l1, &l2).unwrap().is_none());
    }

    #[test]
    fn short_vectors_match_box_search() {
        let l1 = lat(&[&[2, 0, 0, 1], &[0, 6, 3, 0], &[0, 3, 6, 0], &[1, 0, 0, 14]]);
        let sv = short_vectors(&l1, &BigInt::from(14)).unwrap();
        let mut brute = Vec::new();
        let r = -4i64..=4;
        for a in r.clone() {
            for b in r.clone() {
                for c in r.clone() {
                    for d in r.clone() {
                        let v = [a, b, c, d].map(BigInt::from);
                        let q = l1.norm(&v);
                        let first = [a, b, c, d].into_iter().find(|&x| x != 0).unwrap_or(0);
                        if first > 0 && q <= BigInt::from(14) {
                            brute.push((v.to_vec(), q));
                        }
                    }
                }
            }
        }
        brute.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        assert_eq!(sv, brute);
        assert_eq!(short_vectors(&i4(), &BigInt::from(1)).unwrap().len(), 4);
        assert!(short_vectors(&i4(), &BigInt::from(0)).unwrap().is_empty());
    }
}
