//! Finite-dimensional rational linear algebra as a strict symmetric monoidal
//! category. Objects are dimensions (at least 1; the unit is dimension 1),
//! morphisms are dense matrices of exact rationals, tensor is the Kronecker
//! product and the braiding is the commutation matrix. Everything is exact,
//! so the algebraic laws used elsewhere hold as equalities, not tolerances.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{SmcError, SymmetricMonoidal};

/// Parses an exact rational from `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<BigRational, SmcError> {
    let make = |n: &str| {
        BigInt::from_str(n.trim())
            .map_err(|e| SmcError::InvalidMorphism(format!("bad rational {s:?}: {e}")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(make(s)?)),
        Some((p, q)) => {
            let denom = make(q)?;
            if denom.is_zero() {
                return Err(SmcError::InvalidMorphism(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(make(p)?, denom))
        }
    }
}

/// Prints an exact rational as `"p"` or `"p/q"` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A dense rows-by-cols matrix of exact rationals, row-major. A morphism
/// `m -> n` is an `n x m` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "dimension 0 is excluded");
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self, SmcError> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if r == 0 || c == 0 {
            return Err(SmcError::InvalidMorphism("empty matrix".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(SmcError::InvalidMorphism("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from integer entries, row-major.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|&x| BigRational::from_integer(BigInt::from(x)))
                        .collect()
                })
                .collect(),
        )
        .expect("literal matrices are well-formed")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn matmul(&self, other: &RatMatrix) -> Result<RatMatrix, SmcError> {
        if self.cols != other.rows {
            return Err(SmcError::BoundaryMismatch {
                expected: format!("{} columns", self.cols),
                found: format!("{} rows", other.rows),
            });
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn kronecker(&self, other: &RatMatrix) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = &self[(i1, j1)];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        let b = &other[(i2, j2)];
                        if !b.is_zero() {
                            out[(i1 * other.rows + i2, j1 * other.cols + j2)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// The commutation matrix `m (x) n -> n (x) m`, sending each basis
    /// vector `e_i (x) e_j` to `e_j (x) e_i`.
    pub fn commutation(m: usize, n: usize) -> RatMatrix {
        let mut out = RatMatrix::zeros(m * n, m * n);
        for i in 0..m {
            for j in 0..n {
                out[(j * m + i, i * n + j)] = BigRational::one();
            }
        }
        out
    }

    /// Exact inverse by Gauss-Jordan elimination, `None` if singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &p;
                inv[(col, j)] = &inv[(col, j)] / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for j in 0..n {
                    let s = &a[(col, j)] * &factor;
                    a[(r, j)] -= s;
                    let s = &inv[(col, j)] * &factor;
                    inv[(r, j)] -= s;
                }
            }
        }
        Some(inv)
    }

    /// The single entry of a 1x1 matrix.
    pub fn scalar(&self) -> Option<&BigRational> {
        if self.rows == 1 && self.cols == 1 {
            Some(&self.data[0])
        } else {
            None
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;

    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format_rational(&self[(i, j)]))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| format_rational(&self[(i, j)])).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(deserializer)?;
        let parsed = rows
            .into_iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        RatMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

/// Marker type for the rational-matrix instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatQ;

impl SymmetricMonoidal for MatQ {
    type Obj = usize;
    type Mor = RatMatrix;

    const NAME: &'static str = "matq";

    fn unit() -> usize {
        1
    }

    fn tensor_obj(a: &usize, b: &usize) -> usize {
        a * b
    }

    fn dom(f: &RatMatrix) -> usize {
        f.cols()
    }

    fn cod(f: &RatMatrix) -> usize {
        f.rows()
    }

    fn identity(a: &usize) -> RatMatrix {
        RatMatrix::identity(*a)
    }

    fn compose(g: &RatMatrix, f: &RatMatrix) -> Result<RatMatrix, SmcError> {
        g.matmul(f)
    }

    fn tensor_mor(f: &RatMatrix, g: &RatMatrix) -> RatMatrix {
        f.kronecker(g)
    }

    fn symmetry(a: &usize, b: &usize) -> RatMatrix {
        RatMatrix::commutation(*a, *b)
    }

    fn mor_equal(f: &RatMatrix, g: &RatMatrix) -> bool {
        f == g
    }

    fn check_obj(a: &usize) -> Result<(), SmcError> {
        if *a == 0 {
            Err(SmcError::InvalidObject("dimension 0 is excluded".into()))
        } else {
            Ok(())
        }
    }

    fn check_mor(f: &RatMatrix) -> Result<(), SmcError> {
        // Construction already forbids empty shapes.
        let _ = f;
        Ok(())
    }

    fn obj_label(a: &usize) -> String {
        a.to_string()
    }

    fn mor_label(f: &RatMatrix) -> String {
        format!("{}x{}", f.rows(), f.cols())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smc::{perm_to_symmetry, Permutation};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_round_trip() {
        for s in ["0", "7", "-3", "1/2", "-22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        // Reduction happens on parse.
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn hand_checked_product() {
        let g = RatMatrix::from_ints(&[&[1, 0], &[1, 1]]);
        let f = RatMatrix::from_ints(&[&[2, 0], &[0, 2]]);
        let expect = RatMatrix::from_ints(&[&[2, 0], &[2, 2]]);
        assert_eq!(MatQ::compose(&g, &f).unwrap(), expect);
        assert_eq!(MatQ::compose(&g, &MatQ::identity(&2)).unwrap(), g);
    }

    #[test]
    fn tensor_dimensions_and_scalars() {
        assert_eq!(MatQ::tensor_obj(&2, &3), 6);
        assert_eq!(MatQ::tensor_obj(&MatQ::unit(), &5), 5);
        let a = RatMatrix::from_rows(vec![vec![q(3, 1)]]).unwrap();
        let b = RatMatrix::from_rows(vec![vec![q(1, 2)]]).unwrap();
        let ab = MatQ::tensor_mor(&a, &b);
        assert_eq!(ab.scalar().unwrap(), &q(3, 2));
        // f (x) id_I = f
        let f = RatMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(MatQ::tensor_mor(&f, &MatQ::identity(&1)), f);
    }

    #[test]
    fn symmetry_swaps_basis_factors() {
        // Oracle: enumerate all 6 basis vectors of 2 (x) 3.
        let s = MatQ::symmetry(&2, &3);
        for i in 0..2usize {
            for j in 0..3usize {
                let src = i * 3 + j;
                let dst = j * 2 + i;
                for r in 0..6 {
                    let want = if r == dst { q(1, 1) } else { q(0, 1) };
                    assert_eq!(s[(r, src)], want, "column {src}, row {r}");
                }
            }
        }
        // Symmetry against the unit is the identity.
        assert_eq!(MatQ::symmetry(&4, &1), RatMatrix::identity(4));
        // The symmetric structure squares to the identity.
        let back = MatQ::symmetry(&3, &2);
        assert_eq!(back.matmul(&s).unwrap(), RatMatrix::identity(6));
    }

    #[test]
    fn inverse_round_trip() {
        let m = RatMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv).unwrap(), RatMatrix::identity(2));
        assert_eq!(inv.matmul(&m).unwrap(), RatMatrix::identity(2));
        let singular = RatMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn perm_to_symmetry_matches_direct_reindexing() {
        // Independent oracle: build the permutation matrix directly from
        // multi-index bookkeeping and compare with the braiding factoring.
        fn direct(perm: &Permutation, dims: &[usize]) -> RatMatrix {
            let total: usize = dims.iter().product();
            let mut out = RatMatrix::zeros(total.max(1), total.max(1));
            let k = dims.len();
            let out_dims = perm.permute(dims);
            for flat in 0..total {
                // Decode the row-major multi-index in the source ordering.
                let mut rem = flat;
                let mut idx = vec![0usize; k];
                for pos in (0..k).rev() {
                    idx[pos] = rem % dims[pos];
                    rem /= dims[pos];
                }
                // Factor at source position i lands at position perm(i).
                let mut out_idx = vec![0usize; k];
                for i in 0..k {
                    out_idx[perm.apply(i)] = idx[i];
                }
                let mut out_flat = 0usize;
                for pos in 0..k {
                    out_flat = out_flat * out_dims[pos] + out_idx[pos];
                }
                out[(out_flat, flat)] = BigRational::one();
            }
            out
        }

        let cases: Vec<(Vec<usize>, Vec<usize>)> = vec![
            (vec![0, 1, 2], vec![2, 2, 3]),
            (vec![1, 2, 0], vec![2, 2, 3]),
            (vec![2, 0, 1], vec![3, 1, 2]),
            (vec![1, 0], vec![2, 3]),
            (vec![3, 1, 0, 2], vec![2, 1, 3, 2]),
        ];
        for (images, dims) in cases {
            let perm = Permutation::new(images).unwrap();
            let built = perm_to_symmetry::<MatQ>(&perm, &dims);
            assert_eq!(built, direct(&perm, &dims));
        }
    }

    #[test]
    fn perm_to_symmetry_is_factorization_independent() {
        // Second factorization: peel off the adjacent transposition (0 1)
        // first, then factor the remainder. The braid sequence differs from
        // the selection-sort one, so this genuinely exercises coherence.
        fn alt(perm: &Permutation, dims: &[usize]) -> RatMatrix {
            let mut tau_images: Vec<usize> = (0..dims.len()).collect();
            tau_images.swap(0, 1);
            let tau = Permutation::new(tau_images).unwrap();
            let rest = perm.compose(&tau.inverse());
            let first = perm_to_symmetry::<MatQ>(&tau, dims);
            let swapped_dims = tau.permute(dims);
            let second = perm_to_symmetry::<MatQ>(&rest, &swapped_dims);
            second.matmul(&first).unwrap()
        }
        // A 3-cycle on dimensions (2, 2, 3).
        let perm = Permutation::new(vec![1, 2, 0]).unwrap();
        let dims = vec![2usize, 2, 3];
        assert_eq!(perm_to_symmetry::<MatQ>(&perm, &dims), alt(&perm, &dims));
        let perm = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let dims = vec![2usize, 3, 2, 1];
        assert_eq!(perm_to_symmetry::<MatQ>(&perm, &dims), alt(&perm, &dims));
    }
}
