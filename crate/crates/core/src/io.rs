//! JSON file formats for states and channels, plus atomic file writes.
//!
//! A complex matrix is encoded row-major as `[[[re, im], …], …]`.
//!
//! ```json
//! {"dim": 2, "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}
//! {"in_dim": 2, "out_dim": 2, "kraus": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]}
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::matops::ComplexMatrix;
use crate::states::{make_density, DensityMatrix};

pub type EncodedMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: EncodedMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<EncodedMatrix>,
}

pub fn encode_matrix(m: &DMatrix<Complex64>) -> EncodedMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn decode_matrix(rows: &EncodedMatrix, nrows: usize, ncols: usize) -> Result<DMatrix<Complex64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format(format!("expected a {nrows}x{ncols} matrix")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self {
            dim: rho.dim(),
            matrix: encode_matrix(rho.matrix().as_inner()),
        }
    }

    /// Validates the payload; invalid states surface as `InvalidState`.
    pub fn into_state(self) -> Result<DensityMatrix> {
        let m = decode_matrix(&self.matrix, self.dim, self.dim)?;
        make_density(ComplexMatrix::new(m)?)
    }
}

impl ChannelFile {
    pub fn from_channel(phi: &KrausChannel) -> Self {
        Self {
            in_dim: phi.in_dim(),
            out_dim: phi.out_dim(),
            kraus: phi.kraus().iter().map(encode_matrix).collect(),
        }
    }

    pub fn into_channel(self) -> Result<KrausChannel> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| decode_matrix(k, self.out_dim, self.in_dim))
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(kraus)
    }
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&StateFile::from_state(rho)).expect("plain data serializes")
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    serde_json::from_str::<StateFile>(text)?.into_state()
}

pub fn channel_to_json(phi: &KrausChannel) -> String {
    serde_json::to_string(&ChannelFile::from_channel(phi)).expect("plain data serializes")
}

pub fn channel_from_json(text: &str) -> Result<KrausChannel> {
    serde_json::from_str::<ChannelFile>(text)?.into_channel()
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    state_from_json(&fs::read_to_string(path)?)
}

pub fn read_channel(path: impl AsRef<Path>) -> Result<KrausChannel> {
    channel_from_json(&fs::read_to_string(path)?)
}

pub fn write_state(path: impl AsRef<Path>, rho: &DensityMatrix) -> Result<()> {
    write_atomic(path, state_to_json(rho).as_bytes())
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::example2_channel;
    use crate::error::InvalidReason;
    use crate::states::random_density;
    use proptest::prelude::*;

    #[test]
    fn rejects_invalid_states_with_reason() {
        let text = r#"{"dim": 2, "matrix": [[[1.2, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.2, 0.0]]]}"#;
        let err = state_from_json(text).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidState {
                reason: InvalidReason::NotPsd,
                ..
            }
        ));
        assert!(err.to_string().contains("NotPSD"));

        let text = r#"{"dim": 2, "matrix": [[[0.3, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.3, 0.0]]]}"#;
        assert!(state_from_json(text).unwrap_err().to_string().contains("TraceNotOne"));

        let text = r#"{"dim": 3, "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}"#;
        assert!(matches!(state_from_json(text), Err(Error::Format(_))));
    }

    #[test]
    fn channel_loader_reports_completeness_residual() {
        let text = r#"{"in_dim": 1, "out_dim": 1, "kraus": [[[[0.5, 0.0]]]]}"#;
        match channel_from_json(text).unwrap_err() {
            Error::NotTracePreserving { residual } => assert!((residual - 0.75).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        let phi = example2_channel();
        assert_eq!(channel_from_json(&channel_to_json(&phi)).unwrap(), phi);
    }

    #[test]
    fn atomic_write_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        let rho = random_density(3, 2, 1).unwrap();
        write_state(&path, &rho).unwrap();
        let back = read_state(&path).unwrap();
        assert!((back.matrix() - rho.matrix()).frobenius_norm() < 1e-15);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn state_json_round_trips(dim in 1usize..=5, rank_pick in 0usize..5, seed in any::<u64>()) {
            let rho = random_density(dim, 1 + rank_pick % dim, seed).unwrap();
            let back = state_from_json(&state_to_json(&rho)).unwrap();
            prop_assert!((back.matrix() - rho.matrix()).frobenius_norm() < 1e-15);
        }
    }
}
