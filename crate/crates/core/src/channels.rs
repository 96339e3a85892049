//! Completely positive trace-preserving maps in Kraus form.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matops::{ComplexMatrix, MAX_DIM};
use crate::random::{haar_isometry, rng_from_seed};
use crate::states::{DensityMatrix, CHANNEL_TRACE_TOL};

/// Frobenius tolerance on `Σ KⱼᴴKⱼ − I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// A channel `ρ ↦ Σⱼ Kⱼ ρ Kⱼᴴ` with `M × N` Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<DMatrix<Complex64>>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::BadShape("a channel needs at least one Kraus operator".into()))?;
        let (out_dim, in_dim) = first.shape();
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::BadShape("empty Kraus operator".into()));
        }
        if in_dim > MAX_DIM || out_dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(in_dim.max(out_dim)));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (out_dim, in_dim)) {
            return Err(Error::BadShape(format!(
                "Kraus operators disagree in shape: {out_dim}x{in_dim} vs {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        if kraus.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let channel = Self {
            in_dim,
            out_dim,
            kraus,
        };
        let residual = channel.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(channel)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[DMatrix<Complex64>] {
        &self.kraus
    }

    /// `‖Σ KⱼᴴKⱼ − I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = DMatrix::<Complex64>::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        sum -= DMatrix::<Complex64>::identity(self.in_dim, self.in_dim);
        sum.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            in_dim: dim,
            out_dim: dim,
            kraus: vec![DMatrix::identity(dim, dim)],
        }
    }

    /// `Σⱼ Kⱼ ρ Kⱼᴴ`, revalidated with a trace tolerance of `1e-9`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimMismatch {
                left: self.in_dim,
                right: rho.dim(),
            });
        }
        let m = rho.matrix().as_inner();
        let mut out = DMatrix::<Complex64>::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        DensityMatrix::with_trace_tolerance(ComplexMatrix::new(out)?, CHANNEL_TRACE_TOL)
    }

    /// Dual map `X ↦ Σⱼ Kⱼᴴ X Kⱼ`, defined by `Tr[Φ(ρ)X] = Tr[ρΦ*(X)]`.
    pub fn adjoint_apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.out_dim {
            return Err(Error::DimMismatch {
                left: self.out_dim,
                right: x.dim(),
            });
        }
        let m = x.as_inner();
        let mut out = DMatrix::<Complex64>::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            out += k.adjoint() * m * k;
        }
        ComplexMatrix::new(out)
    }
}

pub fn apply_channel(phi: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    phi.apply(rho)
}

pub fn adjoint_apply(phi: &KrausChannel, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    phi.adjoint_apply(x)
}

/// Splits a Haar-random isometry `C^in → C^(kraus_count·out)` into
/// `kraus_count` blocks of `out` rows each.
pub fn random_channel(
    in_dim: usize,
    out_dim: usize,
    kraus_count: usize,
    seed: u64,
) -> Result<KrausChannel> {
    random_channel_with(&mut rng_from_seed(seed), in_dim, out_dim, kraus_count)
}

pub fn random_channel_with<R: Rng + ?Sized>(
    rng: &mut R,
    in_dim: usize,
    out_dim: usize,
    kraus_count: usize,
) -> Result<KrausChannel> {
    if kraus_count == 0 || in_dim == 0 || out_dim == 0 {
        return Err(Error::BadShape(format!(
            "need positive dimensions and Kraus count, got in {in_dim}, out {out_dim}, count {kraus_count}"
        )));
    }
    let rows = kraus_count * out_dim;
    if rows < in_dim {
        return Err(Error::BadShape(format!(
            "{kraus_count} Kraus operators of {out_dim} rows cannot cover input dimension {in_dim}"
        )));
    }
    let isometry = haar_isometry(rng, rows, in_dim);
    let kraus = (0..kraus_count)
        .map(|j| isometry.rows(j * out_dim, out_dim).into_owned())
        .collect();
    KrausChannel::new(kraus)
}

/// The 4-level channel built from the 0/1 matrices `A = |1⟩⟨0| + |3⟩⟨2|` and
/// `B = |1⟩⟨1| + |3⟩⟨3|`. It sends `(|0⟩⟨0| + |1⟩⟨1|)/2` to `|1⟩⟨1|` and
/// `(|2⟩⟨2| + |3⟩⟨3|)/2` to `|3⟩⟨3|`.
pub fn example2_channel() -> KrausChannel {
    let one = Complex64::new(1.0, 0.0);
    let mut a = DMatrix::<Complex64>::zeros(4, 4);
    a[(1, 0)] = one;
    a[(3, 2)] = one;
    let mut b = DMatrix::<Complex64>::zeros(4, 4);
    b[(1, 1)] = one;
    b[(3, 3)] = one;
    KrausChannel::new(vec![a, b]).expect("the 0/1 operators satisfy completeness exactly")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::{metric_c, super_fidelity};
    use crate::fixtures::example2_pair;
    use crate::states::random_density;

    #[test]
    fn identity_channel_is_identity() {
        let rho = random_density(3, 2, 4).unwrap();
        let id = KrausChannel::identity(3);
        assert!((id.apply(&rho).unwrap().matrix() - rho.matrix()).frobenius_norm() < 1e-14);
        let x = ComplexMatrix::from_diagonal(&[1.0, -2.0, 0.5]);
        assert_eq!(id.adjoint_apply(&x).unwrap(), x);
    }

    #[test]
    fn example2_channel_images() {
        let phi = example2_channel();
        assert_eq!(phi.completeness_residual(), 0.0);
        let (rho, sigma) = example2_pair();
        let out_rho = phi.apply(&rho).unwrap();
        let out_sigma = phi.apply(&sigma).unwrap();
        assert_eq!(out_rho.matrix(), &ComplexMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(out_sigma.matrix(), &ComplexMatrix::from_diagonal(&[0.0, 0.0, 0.0, 1.0]));

        let before = super_fidelity(&rho, &sigma).unwrap();
        let after = super_fidelity(&out_rho, &out_sigma).unwrap();
        assert!((before - 0.5).abs() < 1e-12);
        assert!(after.abs() < 1e-12);
        assert!((metric_c(&rho, &sigma).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((metric_c(&out_rho, &out_sigma).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_of_identity_operator() {
        let phi = random_channel(3, 2, 3, 17).unwrap();
        let back = phi.adjoint_apply(&ComplexMatrix::identity(2)).unwrap();
        assert!((&back - &ComplexMatrix::identity(3)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn duality_on_random_triples() {
        for seed in 0..30 {
            let phi = random_channel(3, 3, 1 + seed as usize % 4, seed).unwrap();
            let rho = random_density(3, 2, seed + 1).unwrap();
            let x = random_density(3, 3, seed + 2).unwrap().into_matrix();
            let lhs = phi.apply(&rho).unwrap().matrix().trace_product(&x);
            let rhs = rho.matrix().trace_product(&phi.adjoint_apply(&x).unwrap());
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn random_channel_contract() {
        let a = random_channel(4, 4, 2, 5).unwrap();
        let b = random_channel(4, 4, 2, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.completeness_residual() <= 1e-10);
        // single Kraus operator on a square shape is a unitary
        let u = random_channel(3, 3, 1, 8).unwrap();
        let k = &u.kraus()[0];
        let gram = k * k.adjoint() - DMatrix::<Complex64>::identity(3, 3);
        assert!(gram.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn bad_shapes() {
        assert!(matches!(random_channel(4, 2, 1, 0), Err(Error::BadShape(_))));
        assert!(matches!(random_channel(2, 2, 0, 0), Err(Error::BadShape(_))));
        assert!(matches!(KrausChannel::new(vec![]), Err(Error::BadShape(_))));
        let half = DMatrix::<Complex64>::identity(2, 2) * Complex64::new(0.5, 0.0);
        assert!(matches!(
            KrausChannel::new(vec![half]),
            Err(Error::NotTracePreserving { .. })
        ));
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            KrausChannel::identity(2).apply(&rho),
            Err(Error::DimMismatch { .. })
        ));
    }
}
