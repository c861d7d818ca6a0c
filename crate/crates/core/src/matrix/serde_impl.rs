//! JSON form: `{"rows": r, "cols": c, "re": [...], "im": [...]}`, row-major.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Matrix;
use crate::scalar::Real;

#[derive(Serialize, Deserialize)]
struct Wire<T> {
    rows: usize,
    cols: usize,
    re: Vec<T>,
    #[serde(default)]
    im: Option<Vec<T>>,
}

impl<T: Real + Serialize> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: Some(self.data.iter().map(|z| z.im).collect()),
        }
        .serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::<T>::deserialize(d)?;
        let n = w.rows * w.cols;
        if w.re.len() != n {
            return Err(D::Error::custom(format!(
                "expected {n} real entries for a {}x{} matrix, found {}",
                w.rows,
                w.cols,
                w.re.len()
            )));
        }
        let im = w.im.unwrap_or_else(|| vec![T::zero(); n]);
        if im.len() != n {
            return Err(D::Error::custom(format!(
                "expected {n} imaginary entries, found {}",
                im.len()
            )));
        }
        let data =
            w.re.into_iter()
                .zip(im)
                .map(|(a, b)| Complex::new(a, b))
                .collect();
        Matrix::new(w.rows, w.cols, data).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use crate::matrix::CMatrix;

    #[test]
    fn round_trip() {
        let a = CMatrix::from_fn(2, 3, |i, j| {
            num_complex::Complex::new(i as f64, -(j as f64))
        });
        let s = serde_json::to_string(&a).unwrap();
        let b: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_shape_and_missing_im_defaults() {
        assert!(serde_json::from_str::<CMatrix>(r#"{"rows":2,"cols":2,"re":[1,2,3]}"#).is_err());
        let m: CMatrix = serde_json::from_str(r#"{"rows":1,"cols":2,"re":[1,2]}"#).unwrap();
        assert_eq!(m[(0, 1)].im, 0.0);
    }
}
