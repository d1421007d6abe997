use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{QVector, Rational};
use crate::error::{Error, Result};

/// Dense rectangular matrix over the rationals, stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: Vec<QVector>,
    cols: usize,
}

impl QMatrix {
    /// Builds a matrix from rows; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: Vec<QVector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != cols) {
            return Err(Error::shape(format!(
                "row of length {} in a matrix with {} columns",
                bad.dim(),
                cols
            )));
        }
        Ok(QMatrix { rows, cols })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| QVector::from_ints(r)).collect(), cols)
    }

    pub fn identity(dim: usize) -> Self {
        QMatrix {
            rows: (0..dim).map(|i| QVector::unit(dim, i)).collect(),
            cols: dim,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows: vec![QVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[QVector] {
        &self.rows
    }

    pub fn mul_vec(&self, x: &QVector) -> Result<QVector> {
        self.rows.iter().map(|r| r.dot(x)).collect()
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        let rows = self.rows.iter().map(|r| integer_row(r.entries(), None)).collect();
        bareiss_rank(rows, self.cols)
    }

    /// Unique solution of `A x = b` for square `A`, or `None` when `A` is
    /// singular.
    pub fn solve_square(&self, b: &QVector) -> Result<Option<QVector>> {
        let d = self.nrows();
        if self.cols != d {
            return Err(Error::shape(format!("matrix is {}x{}, not square", d, self.cols)));
        }
        if b.dim() != d {
            return Err(Error::shape(format!(
                "right-hand side has length {}, expected {}",
                b.dim(),
                d
            )));
        }
        let rows = self
            .rows
            .iter()
            .zip(b.iter())
            .map(|(r, bi)| integer_row(r.entries(), Some(bi)))
            .collect();
        Ok(bareiss_solve(rows).map(QVector::new))
    }
}

/// Scales `coeffs` (and optionally a trailing right-hand side) by the least
/// common multiple of their denominators, giving an integer row with the same
/// solution set.
pub fn integer_row(coeffs: &[Rational], rhs: Option<&Rational>) -> Vec<BigInt> {
    let lcm = coeffs
        .iter()
        .chain(rhs)
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    coeffs
        .iter()
        .chain(rhs)
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Fraction-free forward elimination over the first `cols` columns; returns
/// the number of pivots found. Rows are reduced in place to echelon form.
fn bareiss_forward(m: &mut [Vec<BigInt>], cols: usize) -> usize {
    let nrows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..width {
                let num = pivot * &row[j] - &factor * &pivot_row[j];
                // Sylvester's identity makes every step an exact division.
                debug_assert!((&num % &prev).is_zero());
                row[j] = num / &prev;
            }
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Rank of an integer matrix with `cols` columns.
pub fn bareiss_rank(mut rows: Vec<Vec<BigInt>>, cols: usize) -> usize {
    bareiss_forward(&mut rows, cols)
}

/// Solves a square system given as augmented integer rows `[A | b]`.
/// Returns `None` when `A` is singular.
pub fn bareiss_solve(mut rows: Vec<Vec<BigInt>>) -> Option<Vec<Rational>> {
    let d = rows.len();
    if bareiss_forward(&mut rows, d) < d {
        return None;
    }
    let mut x = vec![Rational::zero(); d];
    for i in (0..d).rev() {
        let mut acc = Rational::from_integer(rows[i][d].clone());
        for j in i + 1..d {
            if !rows[i][j].is_zero() {
                acc -= Rational::from_integer(rows[i][j].clone()) * &x[j];
            }
        }
        x[i] = acc / Rational::from_integer(rows[i][i].clone());
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    #[test]
    fn solve_examples() {
        let id = QMatrix::identity(2);
        let b = QVector::new(vec![q(3, 2), q(-1, 1)]);
        assert_eq!(id.solve_square(&b).unwrap(), Some(b.clone()));

        let singular = QMatrix::from_ints(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(singular.solve_square(&QVector::from_ints(&[1, 7])).unwrap(), None);

        let diag = QMatrix::from_ints(&[&[2, 0], &[0, 4]]).unwrap();
        assert_eq!(
            diag.solve_square(&QVector::from_ints(&[1, 2])).unwrap(),
            Some(QVector::new(vec![q(1, 2), q(1, 2)]))
        );
    }

    #[test]
    fn solve_shape_errors() {
        let m = QMatrix::from_ints(&[&[1, 2, 3], &[4, 5, 6]]).unwrap();
        assert!(matches!(m.solve_square(&QVector::zeros(2)), Err(Error::Shape(_))));
        let sq = QMatrix::identity(2);
        assert!(matches!(sq.solve_square(&QVector::zeros(3)), Err(Error::Shape(_))));
        assert!(QMatrix::from_rows(vec![QVector::zeros(2), QVector::zeros(3)], 2).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(QMatrix::zeros(3, 3).rank(), 0);
        for d in 1..6 {
            assert_eq!(QMatrix::identity(d).rank(), d);
        }
        assert_eq!(QMatrix::from_ints(&[&[1, 2], &[2, 4]]).unwrap().rank(), 1);
        assert_eq!(QMatrix::from_rows(vec![], 4).unwrap().rank(), 0);
        // zero leading column forces a skipped pivot column
        assert_eq!(QMatrix::from_ints(&[&[0, 1, 2], &[0, 2, 5], &[0, 3, 7]]).unwrap().rank(), 2);
    }

    /// Plain rational Gauss-Jordan with last-row-first pivot search; an
    /// independent route to the rank.
    fn oracle_rank(m: &QMatrix) -> usize {
        let mut rows: Vec<Vec<Rational>> = m.rows().iter().map(|r| r.entries().to_vec()).collect();
        let mut rank = 0;
        for c in 0..m.ncols() {
            let Some(p) = (rank..rows.len()).rev().find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && !row[c].is_zero() {
                    let f = &row[c] / &pivot_row[c];
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = QMatrix> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec((-3i64..=3, 1i64..=3), c), r).prop_map(
                move |rows| {
                    let rows = rows
                        .into_iter()
                        .map(|row| row.into_iter().map(|(p, d)| Rational::frac(p, d)).collect())
                        .collect();
                    QMatrix::from_rows(rows, c).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_matches_independent_elimination(m in small_matrix(6, 5)) {
            prop_assert_eq!(m.rank(), oracle_rank(&m));
        }

        #[test]
        fn solution_satisfies_system_exactly(m in small_matrix(4, 4), b in proptest::collection::vec(-5i64..=5, 4)) {
            let d = m.nrows().min(m.ncols());
            let sq = QMatrix::from_rows(
                m.rows()[..d].iter().map(|r| QVector::new(r.entries()[..d].to_vec())).collect(),
                d,
            ).unwrap();
            let b = QVector::from_ints(&b[..d]);
            match sq.solve_square(&b).unwrap() {
                Some(x) => prop_assert_eq!(sq.mul_vec(&x).unwrap(), b),
                None => prop_assert!(oracle_rank(&sq) < d),
            }
        }
    }
}
