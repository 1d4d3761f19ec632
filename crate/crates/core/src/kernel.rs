//! Kernel functions and Gram matrices.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Kernel used by every learner in the crate.
///
/// The Gaussian kernel is parameterized as `exp(-gamma * ||x - z||^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
        }
        Ok(KernelSpec::Gaussian { gamma })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Gaussian { gamma } => Self::gaussian(gamma).map(|_| ()),
        }
    }

    pub fn eval(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        check_dims(x, z)?;
        Ok(self.apply(x, z))
    }

    /// Evaluates without the dimension check. Callers guarantee `x.len() == z.len()`.
    #[inline]
    pub(crate) fn apply(&self, x: &[f64], z: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, z),
            KernelSpec::Gaussian { gamma } => (-gamma * sq_dist(x, z)).exp(),
        }
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            KernelSpec::Linear => KernelKind::Linear,
            KernelSpec::Gaussian { .. } => KernelKind::Gaussian,
        }
    }
}

/// Kernel family without its width; grid searches fill in `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Linear,
    Gaussian,
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(KernelKind::Linear),
            "gaussian" | "rbf" => Ok(KernelKind::Gaussian),
            other => Err(Error::param("kernel", format!("unknown kernel `{other}`"))),
        }
    }
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelKind::Linear => "linear",
            KernelKind::Gaussian => "gaussian",
        })
    }
}

impl std::fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Gaussian { gamma } => write!(f, "gaussian(gamma={gamma})"),
        }
    }
}

fn check_dims(x: &[f64], z: &[f64]) -> Result<()> {
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: z.len(),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn dot(x: &[f64], z: &[f64]) -> f64 {
    x.iter().zip(z).map(|(a, b)| a * b).sum()
}

#[inline]
pub(crate) fn sq_dist(x: &[f64], z: &[f64]) -> f64 {
    x.iter()
        .zip(z)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

pub fn linear_kernel(x: &[f64], z: &[f64]) -> Result<f64> {
    KernelSpec::Linear.eval(x, z)
}

pub fn gaussian_kernel(x: &[f64], z: &[f64], gamma: f64) -> Result<f64> {
    KernelSpec::gaussian(gamma)?.eval(x, z)
}

/// Dense symmetric `n x n` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    values: Vec<f64>,
}

impl KernelMatrix {
    /// Wraps precomputed values. The matrix must be square and symmetric.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: values.len(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidData(format!(
                        "matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn add_to_diagonal(&mut self, v: f64) {
        for i in 0..self.n {
            self.values[i * self.n + i] += v;
        }
    }
}

/// Gram matrix of `rows` under `spec`. Rows are computed in parallel.
pub fn kernel_matrix(rows: &[Vec<f64>], spec: KernelSpec) -> Result<KernelMatrix> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("kernel matrix needs at least one row"));
    }
    spec.validate()?;
    let dim = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: bad.len(),
        });
    }
    let n = rows.len();
    let mut values = vec![0.0; n * n];
    values
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, out)| {
            for (j, v) in out.iter_mut().enumerate().skip(i) {
                *v = spec.apply(&rows[i], &rows[j]);
            }
        });
    // mirror the upper triangle so the matrix is exactly symmetric
    for i in 0..n {
        for j in 0..i {
            values[i * n + j] = values[j * n + i];
        }
    }
    Ok(KernelMatrix { n, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    #[test]
    fn linear_examples() {
        assert_eq!(linear_kernel(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(linear_kernel(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        let x = [0.6, 0.8];
        assert!((linear_kernel(&x, &x).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_examples() {
        let x = [0.3, -2.0, 5.0];
        assert_eq!(gaussian_kernel(&x, &x, 7.5).unwrap(), 1.0);
        let k = gaussian_kernel(&[0.0], &[1.0], 1.0).unwrap();
        assert!((k - (-1.0f64).exp()).abs() < 1e-15);
        assert!((k - 0.367879).abs() < 1e-6);
        let k = gaussian_kernel(&[0.0, 0.0], &[3.0, 4.0], 0.01).unwrap();
        assert!((k - (-0.25f64).exp()).abs() < 1e-15);
        assert!((k - 0.778801).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            linear_kernel(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(gaussian_kernel(&[1.0, 2.0], &[1.0], 1.0).is_err());
        assert!(kernel_matrix(&[vec![1.0], vec![1.0, 2.0]], KernelSpec::Linear).is_err());
    }

    #[test]
    fn gamma_must_be_positive() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
        assert!(KernelSpec::gaussian(f64::NAN).is_err());
        assert!(kernel_matrix(&[vec![1.0]], KernelSpec::Gaussian { gamma: -1.0 }).is_err());
    }

    #[test]
    fn single_row_matrix() {
        let m = kernel_matrix(&[vec![2.0, 1.0]], KernelSpec::Linear).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.get(0, 0), 5.0);
    }

    #[test]
    fn identical_rows_give_all_ones() {
        let rows = vec![vec![0.4, 0.1, 9.0]; 4];
        let m = kernel_matrix(&rows, KernelSpec::gaussian(0.3).unwrap()).unwrap();
        assert!(m.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn matrix_matches_scalar_kernels() {
        let rows = vec![vec![0.1, 0.7, -0.2], vec![1.5, -0.3, 0.0], vec![-0.9, 0.4, 2.2]];
        for spec in [KernelSpec::Linear, KernelSpec::gaussian(0.8).unwrap()] {
            let m = kernel_matrix(&rows, spec).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let expected = match spec {
                        KernelSpec::Linear => linear_kernel(&rows[i], &rows[j]).unwrap(),
                        KernelSpec::Gaussian { gamma } => {
                            gaussian_kernel(&rows[i], &rows[j], gamma).unwrap()
                        }
                    };
                    assert_eq!(m.get(i, j), expected);
                }
            }
        }
    }

    fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..=50, 1usize..=6).prop_flat_map(|(n, d)| {
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, d), n)
        })
    }

    proptest! {
        #[test]
        fn kernels_are_symmetric(x in prop::collection::vec(-5.0f64..5.0, 4),
                                 z in prop::collection::vec(-5.0f64..5.0, 4),
                                 gamma in 0.01f64..4.0) {
            prop_assert_eq!(linear_kernel(&x, &z).unwrap(), linear_kernel(&z, &x).unwrap());
            let a = gaussian_kernel(&x, &z, gamma).unwrap();
            let b = gaussian_kernel(&z, &x, gamma).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!(a > 0.0 && a <= 1.0);
            if x != z && sq_dist(&x, &z) * gamma > 1e-12 {
                prop_assert!(a < 1.0);
            }
        }

        #[test]
        fn gaussian_matrix_is_psd(rows in rows_strategy(), gamma in 0.05f64..3.0) {
            let m = kernel_matrix(&rows, KernelSpec::gaussian(gamma).unwrap()).unwrap();
            let n = m.n();
            for i in 0..n {
                prop_assert_eq!(m.get(i, i), 1.0);
            }
            let dense = DMatrix::from_row_slice(n, n, m.values());
            let eig = dense.symmetric_eigenvalues();
            prop_assert!(eig.min() >= -1e-8, "min eigenvalue {}", eig.min());
        }
    }
}
