use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// A point or direction with exact rational coordinates.
///
/// Ordering is lexicographic by coordinates, which gives every emitted point
/// set a deterministic order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QVector(Vec<Rational>);

impl QVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        QVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        QVector(vec![Rational::zero(); dim])
    }

    pub fn filled(dim: usize, value: Rational) -> Self {
        QVector(vec![value; dim])
    }

    /// The `axis`-th standard basis vector (0-based).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = Rational::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        QVector(xs.iter().map(|&x| Rational::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    fn check_dim(&self, other: &QVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::shape(format!(
                "vector dimensions {} and {} differ",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &QVector) -> Result<Rational> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn add(&self, other: &QVector) -> Result<QVector> {
        self.check_dim(other)?;
        Ok(QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &QVector) -> Result<QVector> {
        self.check_dim(other)?;
        Ok(QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, factor: &Rational) -> QVector {
        QVector(self.0.iter().map(|a| a * factor).collect())
    }

    /// Squared Euclidean norm; norms themselves are never formed.
    pub fn norm_squared(&self) -> Rational {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn distance_squared(&self, other: &QVector) -> Result<Rational> {
        Ok(self.sub(other)?.norm_squared())
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &QVector) -> Result<Rational> {
        self.check_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero))
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &QVector) -> QVector {
        let mut out = self.0.clone();
        out.extend(other.0.iter().cloned());
        QVector(out)
    }
}

impl Index<usize> for QVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for QVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl From<Vec<Rational>> for QVector {
    fn from(v: Vec<Rational>) -> Self {
        QVector(v)
    }
}

impl FromIterator<Rational> for QVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        QVector(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a QVector {
    type Item = &'a Rational;
    type IntoIter = std::slice::Iter<'a, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = QVector::from_ints(&[1, 2, 3]);
        let b = QVector::new(vec![Rational::frac(1, 2), Rational::zero(), Rational::frac(-1, 3)]);
        assert_eq!(a.dot(&b).unwrap(), Rational::frac(-1, 2));
        assert_eq!(a.norm_squared(), Rational::from(14));
        assert_eq!(format!("{:?}", a.sub(&b).unwrap()), "(1/2, 2, 10/3)");
        assert!(a.dot(&QVector::zeros(2)).is_err());
        assert_eq!(a.max_abs_diff(&b).unwrap(), Rational::frac(10, 3));
    }

    #[test]
    fn serializes_as_string_list() {
        let v = QVector::new(vec![Rational::frac(1, 2), Rational::from(-3)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/2","-3"]"#);
    }
}
