//! Positive definite integral lattices given by Gram matrices, and the
//! correspondence with classical integral quadratic forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::valuation;
use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};

/// A positive definite lattice on (Z^n, B) with integral Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GramLattice {
    gram: IntMatrix,
}

impl GramLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        let n = gram.len();
        if !(1..=4).contains(&n) {
            return Err(Error::UnsupportedRank(n));
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSymmetric);
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        for k in 1..=n {
            let minor: IntMatrix = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
            let d = linalg::det(&minor);
            if !d.is_positive() {
                return Err(Error::NotPositiveDefinite(k, d.to_string()));
            }
        }
        Ok(GramLattice { gram })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    /// Unchecked constructor for matrices known to be Gram matrices of a
    /// positive definite lattice (e.g. congruent to one).
    pub(crate) fn from_trusted(gram: IntMatrix) -> Self {
        GramLattice { gram }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.gram[i][j]
    }

    /// Entries as machine integers, if they fit.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        self.gram
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().ok_or(Error::Overflow("gram entry"))).collect())
            .collect()
    }

    /// Determinant of the Gram matrix.
    pub fn discriminant(&self) -> BigInt {
        linalg::det(&self.gram)
    }

    /// gcd of all Gram entries.
    pub fn content(&self) -> BigInt {
        self.gram.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// True if this is the matrix of second partials of a primitive form:
    /// even, and half the diagonal together with the off-diagonal entries
    /// have gcd 1.
    pub fn is_primitive_hessian(&self) -> bool {
        if !self.is_even() {
            return false;
        }
        let n = self.rank();
        let two = BigInt::from(2);
        let g = (0..n)
            .map(|i| &self.gram[i][i] / &two)
            .chain((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| self.gram[i][j].clone()))
            .fold(BigInt::zero(), |g, x| g.gcd(&x));
        g.is_one()
    }

    /// True if every vector has even norm.
    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[i][i].is_even())
    }

    /// (p-adic order of the scale, p-adic order of the norm).
    pub fn scale_norm(&self, p: u64) -> (u32, u32) {
        let min_v = |it: &mut dyn Iterator<Item = BigInt>| {
            it.filter_map(|x| valuation(&x, p)).min().expect("nonzero lattice")
        };
        let n = self.rank();
        let scale = min_v(&mut self.gram.iter().flatten().cloned());
        let norm = min_v(
            &mut (0..n)
                .map(|i| self.gram[i][i].clone())
                .chain((0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| &self.gram[i][j] * 2)),
        );
        (scale, norm)
    }

    /// The lattice with bilinear form scaled by num/den; fails if the result is
    /// not integral.
    pub fn rescale(&self, num: i64, den: i64) -> Result<Self> {
        if num <= 0 || den <= 0 {
            return Err(Error::NonIntegral);
        }
        let (n, d) = (BigInt::from(num), BigInt::from(den));
        let mut out = self.gram.clone();
        for x in out.iter_mut().flatten() {
            let v = &*x * &n;
            let (q, r) = v.div_rem(&d);
            if !r.is_zero() {
                return Err(Error::NonIntegral);
            }
            *x = q;
        }
        Ok(GramLattice { gram: out })
    }

    /// Divides out the content.
    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        GramLattice { gram: self.gram.iter().map(|r| r.iter().map(|x| x / &c).collect()).collect() }
    }

    /// Gram matrix of the sublattice spanned by the rows of `basis`.
    pub fn sublattice(&self, basis: &IntMatrix) -> Self {
        GramLattice { gram: linalg::congruence(&self.gram, basis) }
    }

    /// The lattice spanned by the rows of `gens / denom` inside L ⊗ Q. Fails if
    /// the result is not integral or not of full rank.
    pub fn span_over(&self, gens: &IntMatrix, denom: &BigInt) -> Result<Self> {
        let basis = linalg::hnf_rows(gens);
        if basis.len() != self.rank() {
            return Err(Error::RankMismatch(self.rank(), basis.len()));
        }
        let g = linalg::congruence(&self.gram, &basis);
        let d2 = denom * denom;
        let mut out = g;
        for x in out.iter_mut().flatten() {
            let (q, r) = x.div_rem(&d2);
            if !r.is_zero() {
                return Err(Error::NonIntegral);
            }
            *x = q;
        }
        Ok(GramLattice { gram: out })
    }

    pub fn bilinear(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let n = self.rank();
        let mut s = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                s += &x[i] * &self.gram[i][j] * &y[j];
            }
        }
        s
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.bilinear(x, x)
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.rank(), other.rank());
        let mut g = linalg::zeros(a + b, a + b);
        for i in 0..a {
            for j in 0..a {
                g[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                g[a + i][a + j] = other.gram[i][j].clone();
            }
        }
        Self::new(g)
    }
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.gram.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Classical integral quadratic form Σ a_ii x_i² + Σ_{i<j} f_ij x_i x_j.
///
/// Coefficient lists: ternary forms use `[a, b, c, d, e, g]` for
/// ax² + by² + cz² + dyz + exz + gxy; quaternary forms use the diagonal
/// followed by the cross terms in the order (1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalForm {
    diag: Vec<BigInt>,
    cross: IntMatrix, // cross[i][j] for i < j
}

fn cross_order(n: usize) -> Vec<(usize, usize)> {
    match n {
        3 => vec![(1, 2), (0, 2), (0, 1)],
        _ => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
    }
}

impl ClassicalForm {
    pub fn new(rank: usize, coeffs: &[BigInt]) -> Result<Self> {
        if !(1..=4).contains(&rank) {
            return Err(Error::UnsupportedRank(rank));
        }
        let expected = rank * (rank + 1) / 2;
        if coeffs.len() != expected {
            return Err(Error::RankMismatch(expected, coeffs.len()));
        }
        let diag = coeffs[..rank].to_vec();
        let mut cross = linalg::zeros(rank, rank);
        for (k, (i, j)) in cross_order(rank).into_iter().enumerate() {
            cross[i][j] = coeffs[rank + k].clone();
        }
        Ok(ClassicalForm { diag, cross })
    }

    pub fn from_i64(rank: usize, coeffs: &[i64]) -> Result<Self> {
        Self::new(rank, &coeffs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn coefficients(&self) -> Vec<BigInt> {
        let mut out = self.diag.clone();
        for (i, j) in cross_order(self.rank()) {
            out.push(self.cross[i][j].clone());
        }
        out
    }

    /// Matrix of second partial derivatives.
    pub fn hessian(&self) -> IntMatrix {
        let n = self.rank();
        let mut f = linalg::zeros(n, n);
        for i in 0..n {
            f[i][i] = &self.diag[i] * 2;
            for j in i + 1..n {
                f[i][j] = self.cross[i][j].clone();
                f[j][i] = self.cross[i][j].clone();
            }
        }
        f
    }

    /// det of the Hessian.
    pub fn discriminant(&self) -> BigInt {
        linalg::det(&self.hessian())
    }

    pub fn is_primitive(&self) -> bool {
        self.coefficients().iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one()
    }

    pub fn evaluate(&self, x: &[BigInt]) -> BigInt {
        let n = self.rank();
        let mut s = BigInt::zero();
        for i in 0..n {
            s += &self.diag[i] * &x[i] * &x[i];
            for j in i + 1..n {
                s += &self.cross[i][j] * &x[i] * &x[j];
            }
        }
        s
    }
}

impl fmt::Display for ClassicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coefficients().iter().map(|x| x.to_string()).collect();
        write!(f, "{}: [{}]", self.rank(), c.join(", "))
    }
}

/// The primitive lattice attached to a primitive form: the Hessian if some cross
/// coefficient is odd, half of it otherwise.
pub fn form_to_lattice(form: &ClassicalForm) -> Result<GramLattice> {
    if !form.is_primitive() {
        return Err(Error::NotPrimitive(form.to_string()));
    }
    let f = form.hessian();
    let n = form.rank();
    let odd_cross = (0..n).any(|i| (i + 1..n).any(|j| f[i][j].is_odd()));
    let gram = if odd_cross { f } else { f.iter().map(|r| r.iter().map(|x| x / 2).collect()).collect() };
    GramLattice::new(gram)
}

/// Inverse of [`form_to_lattice`] on primitive lattices.
pub fn lattice_to_form(lat: &GramLattice) -> Result<ClassicalForm> {
    if !lat.is_primitive() {
        return Err(Error::NotPrimitive(lat.to_string()));
    }
    let g = lat.gram();
    let n = lat.rank();
    let odd_off = (0..n).any(|i| (i + 1..n).any(|j| g[i][j].is_odd()));
    let branch_hessian = lat.is_even() && odd_off;
    let diag: Vec<BigInt> = (0..n).map(|i| if branch_hessian { &g[i][i] / 2 } else { g[i][i].clone() }).collect();
    let mut cross = linalg::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            cross[i][j] = if branch_hessian { g[i][j].clone() } else { &g[i][j] * 2 };
        }
    }
    Ok(ClassicalForm { diag, cross })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(GramLattice::from_rows(&[[1, 2], [2, 1]]), Err(Error::NotPositiveDefinite(2, _))));
        assert!(matches!(GramLattice::from_rows(&[[1, 2], [1, 1]]), Err(Error::NotSymmetric)));
        assert!(matches!(GramLattice::from_rows(&[[1i64; 5]; 5]), Err(Error::UnsupportedRank(5))));
    }

    #[test]
    fn ternary_form_conversion() {
        let f = ClassicalForm::from_i64(3, &[1, 1, 9, 0, 0, 1]).unwrap();
        let l = form_to_lattice(&f).unwrap();
        assert_eq!(l, GramLattice::from_rows(&[[2, 1, 0], [1, 2, 0], [0, 0, 18]]).unwrap());
        assert_eq!(f.discriminant(), BigInt::from(54));
        assert_eq!(lattice_to_form(&l).unwrap(), f);
        let g = ClassicalForm::from_i64(3, &[1, 3, 3, 3, 0, 0]).unwrap();
        let lg = form_to_lattice(&g).unwrap();
        assert_eq!(lg, GramLattice::from_rows(&[[2, 0, 0], [0, 6, 3], [0, 3, 6]]).unwrap());
    }

    #[test]
    fn even_cross_terms_halve() {
        let f = ClassicalForm::from_i64(4, &[1, 1, 1, 1, 0, 0, 0, 0, 0, 0]).unwrap();
        let l = form_to_lattice(&f).unwrap();
        assert_eq!(l.discriminant(), BigInt::one());
        assert_eq!(f.discriminant(), BigInt::from(16));
        assert_eq!(lattice_to_form(&l).unwrap(), f);
    }

    #[test]
    fn scale_and_norm() {
        let l = GramLattice::from_rows(&[[2, 1], [1, 2]]).unwrap();
        assert_eq!(l.scale_norm(2), (0, 1));
        let l = GramLattice::from_rows(&[[6, 3], [3, 6]]).unwrap();
        assert_eq!(l.scale_norm(3), (1, 1));
        assert_eq!(l.rescale(1, 3).unwrap().discriminant(), BigInt::from(3));
        assert!(l.rescale(1, 2).is_err());
    }

    #[test]
    fn span_over_superlattice() {
        let l = GramLattice::from_rows(&[[4, 0], [0, 4]]).unwrap();
        let gens = linalg::from_i64(&[vec![1, 1], vec![0, 2], vec![2, 0]]);
        let m = l.span_over(&gens, &BigInt::from(2)).unwrap();
        assert_eq!(m.discriminant(), BigInt::from(4));
    }
}
