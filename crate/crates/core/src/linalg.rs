//! Exact integer linear algebra on small dense matrices.
//!
//! Matrices are `Vec<Vec<BigInt>>` in row-major order. Lattice bases are stored
//! as rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn zeros(r: usize, c: usize) -> IntMatrix {
    vec![vec![BigInt::zero(); c]; r]
}

pub fn identity(n: usize) -> IntMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn from_i64(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][t] * &b[t][j];
            }
        }
    }
    out
}

/// Gram matrix of the rows of `basis` under `gram`: basis · gram · basisᵀ.
pub fn congruence(gram: &IntMatrix, basis: &IntMatrix) -> IntMatrix {
    mul(&mul(basis, gram), &transpose(basis))
}

/// Determinant by fraction-free Gaussian elimination (Bareiss).
pub fn det(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Adjugate matrix, so that a · adj(a) = det(a) · I.
pub fn adjugate(a: &IntMatrix) -> IntMatrix {
    let n = a.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let mut out = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor: IntMatrix = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c].clone()).collect())
                .collect();
            let d = det(&minor);
            out[i][j] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    out
}

/// Row-style Hermite normal form of the lattice spanned by the given rows.
/// Returns a basis (upper triangular, positive pivots) of the row lattice; zero
/// rows are dropped.
pub fn hnf_rows(gens: &IntMatrix) -> IntMatrix {
    if gens.is_empty() {
        return Vec::new();
    }
    let ncols = gens[0].len();
    let mut rows: IntMatrix = gens.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out: IntMatrix = Vec::new();
    for col in 0..ncols {
        // gcd-combine all rows with a nonzero entry in this column
        let mut pivot: Option<Vec<BigInt>> = None;
        let mut rest = Vec::with_capacity(rows.len());
        for r in rows.into_iter() {
            if r[col].is_zero() {
                rest.push(r);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(r),
                Some(p) => {
                    let e = p[col].extended_gcd(&r[col]);
                    let a = &p[col] / &e.gcd;
                    let b = &r[col] / &e.gcd;
                    let new_p: Vec<BigInt> = p.iter().zip(&r).map(|(x, y)| &e.x * x + &e.y * y).collect();
                    let new_r: Vec<BigInt> = p.iter().zip(&r).map(|(x, y)| &a * y - &b * x).collect();
                    pivot = Some(new_p);
                    if new_r.iter().any(|x| !x.is_zero()) {
                        rest.push(new_r);
                    }
                }
            }
        }
        rows = rest;
        if let Some(mut p) = pivot {
            if p[col].is_negative() {
                for x in p.iter_mut() {
                    *x = -x.clone();
                }
            }
            out.push(p);
        }
    }
    // reduce entries above pivots
    for i in 0..out.len() {
        let pc = out[i].iter().position(|x| !x.is_zero()).unwrap();
        for k in 0..i {
            let q = out[k][pc].div_floor(&out[i][pc]);
            if !q.is_zero() {
                let row_i = out[i].clone();
                for (x, y) in out[k].iter_mut().zip(&row_i) {
                    *x -= &q * y;
                }
            }
        }
    }
    out
}

/// Dual basis of a full-rank lattice with basis rows `b`, with respect to the
/// standard dot product, scaled by `scale`: returns rows of scale · b⁻ᵀ.
/// Panics if the result is not integral.
pub fn scaled_dual(b: &IntMatrix, scale: &BigInt) -> IntMatrix {
    let d = det(b);
    let adj = adjugate(b); // b · adj = d I, so b⁻¹ = adj / d, b⁻ᵀ = adjᵀ / d
    transpose(&adj)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    let num = x * scale;
                    let (q, r) = num.div_rem(&d);
                    assert!(r.is_zero(), "scaled dual is not integral");
                    q
                })
                .collect()
        })
        .collect()
}

/// Basis (rows) of {x ∈ Zⁿ : G·x ≡ 0 mod m} for a nonsingular symmetric G.
pub fn kernel_mod(gram: &IntMatrix, m: &BigInt) -> IntMatrix {
    let n = gram.len();
    // dual lattice is Zⁿ + (1/m) G Zⁿ; scale by m: m Zⁿ + G Zⁿ
    let mut gens = identity(n)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x * m).collect())
        .collect::<IntMatrix>();
    gens.extend(gram.iter().cloned());
    let dual_scaled = hnf_rows(&gens);
    // K = (dual_scaled / m)^* = m · dual_scaled⁻ᵀ
    hnf_rows(&scaled_dual(&dual_scaled, m))
}

/// Extends a primitive integer vector to a unimodular matrix whose first row is `v`.
pub fn extend_primitive(v: &[BigInt]) -> Option<IntMatrix> {
    let n = v.len();
    // Build unimodular U with U·v = e_1 * g by column gcd steps, then invert.
    let mut u = identity(n);
    let mut w: Vec<BigInt> = v.to_vec();
    for i in (1..n).rev() {
        if w[i].is_zero() {
            continue;
        }
        let e = w[i - 1].extended_gcd(&w[i]);
        let a = &w[i - 1] / &e.gcd;
        let b = &w[i] / &e.gcd;
        // rows i-1, i of u: [x y; -b a]
        let ri = u[i - 1].clone();
        let rj = u[i].clone();
        u[i - 1] = ri.iter().zip(&rj).map(|(p, q)| &e.x * p + &e.y * q).collect();
        u[i] = ri.iter().zip(&rj).map(|(p, q)| &a * q - &b * p).collect();
        w[i - 1] = e.gcd.clone();
        w[i] = BigInt::zero();
    }
    if w[0].is_negative() {
        w[0] = -w[0].clone();
        u[0] = u[0].iter().map(|x| -x).collect();
    }
    if !w[0].is_one() {
        return None;
    }
    // U v = e1 ⇒ v = U⁻¹ e1, i.e. v is the first column of U⁻¹; we want it as first row.
    let d = det(&u);
    let inv: IntMatrix = adjugate(&u).into_iter().map(|r| r.into_iter().map(|x| x * &d).collect()).collect();
    Some(transpose(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        from_i64(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = m(&[&[2, 1, 0, 0], &[1, 14, 0, 0], &[0, 0, 6, 3], &[0, 0, 3, 6]]);
        assert_eq!(det(&a), BigInt::from(729));
        let prod = mul(&a, &adjugate(&a));
        assert_eq!(prod, mul(&identity(4), &m(&[&[729, 0, 0, 0], &[0, 729, 0, 0], &[0, 0, 729, 0], &[0, 0, 0, 729]])));
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
    }

    #[test]
    fn hnf_of_redundant_generators() {
        let g = m(&[&[2, 0], &[0, 2], &[1, 1]]);
        let h = hnf_rows(&g);
        assert_eq!(h, m(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn kernel_mod_matches_brute_force() {
        let g = m(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 18]]);
        let k = kernel_mod(&g, &BigInt::from(9));
        assert_eq!(det(&k).abs(), BigInt::from(27));
        for row in &k {
            for gr in &g {
                let s: BigInt = gr.iter().zip(row).map(|(a, b)| a * b).sum();
                assert!((s % 9i32).is_zero());
            }
        }
    }

    #[test]
    fn extension_is_unimodular() {
        let v = vec![BigInt::from(3), BigInt::from(5), BigInt::from(-7)];
        let u = extend_primitive(&v).unwrap();
        assert_eq!(u[0], v);
        assert_eq!(det(&u).abs(), BigInt::one());
        assert!(extend_primitive(&[BigInt::from(2), BigInt::from(4)]).is_none());
    }
}
