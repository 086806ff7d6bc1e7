use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linop::{self, BeamsplitterSetting, SwitchingSequence, TransferMatrix};
use crate::loss::{self, LossParams};
use crate::rng::stream_rng;

use super::config::{Angles, SweepConfig};

/// A complex matrix as separate real and imaginary row arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_complex(matrix: &DMatrix<Complex64>) -> Self {
        let (rows, cols) = matrix.shape();
        let part = |f: fn(&Complex64) -> f64| {
            (0..rows)
                .map(|r| (0..cols).map(|c| f(&matrix[(r, c)])).collect())
                .collect()
        };
        Self {
            rows,
            cols,
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Self {
        let (rows, cols) = matrix.shape();
        Self {
            rows,
            cols,
            re: (0..rows)
                .map(|r| (0..cols).map(|c| matrix[(r, c)]).collect())
                .collect(),
            im: vec![vec![0.0; cols]; rows],
        }
    }

    pub fn to_complex(&self) -> Result<DMatrix<Complex64>> {
        let shape_ok = |parts: &Vec<Vec<f64>>| {
            parts.len() == self.rows && parts.iter().all(|row| row.len() == self.cols)
        };
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Config(format!(
                "matrix arrays do not match declared shape {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(DMatrix::from_fn(self.rows, self.cols, |r, c| {
            Complex64::new(self.re[r][c], self.im[r][c])
        }))
    }

    pub fn to_transfer(&self) -> Result<TransferMatrix> {
        TransferMatrix::from_matrix(self.to_complex()?)
    }
}

/// Every map of one switching program, lossless and lossy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDump {
    pub m: usize,
    pub loops: usize,
    pub eta_f: f64,
    pub eta_s: f64,
    pub include_outer: bool,
    pub master_seed: u64,
    /// Interior angles per pass, `t = 2..=m`.
    pub sequence: Vec<Vec<Angles>>,
    /// Lossless map of each pass.
    pub v: Vec<MatrixJson>,
    /// Lossy map of each pass.
    pub v_lossy: Vec<MatrixJson>,
    pub loss_matrix: MatrixJson,
    pub outer_loop_factor: f64,
    pub u: MatrixJson,
    /// Product of the lossy pass maps, with outer-loop attenuation if `include_outer`.
    pub u_lossy: MatrixJson,
    pub version: String,
}

impl MapDump {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn single_value(values: Vec<f64>, axis: &str) -> Result<f64> {
    match values.as_slice() {
        [x] => Ok(*x),
        _ => Err(Error::Config(format!(
            "map dump takes a single {axis} value, got {}",
            values.len()
        ))),
    }
}

/// Builds the maps for the configured program, or for one drawn from stream 0 of the seed.
pub fn dump_map(config: &SweepConfig) -> Result<MapDump> {
    let m = match config.modes()?.as_slice() {
        [m] => *m,
        other => {
            return Err(Error::Config(format!(
                "map dump takes a single m value, got {}",
                other.len()
            )))
        }
    };
    let loss = LossParams::new(
        single_value(config.eta_f_values()?, "eta_f")?,
        single_value(config.eta_s_values()?, "eta_s")?,
    )?;
    let angles: Vec<Vec<Angles>> = match &config.sequence {
        Some(passes) => {
            if let Some(loops) = config.loops {
                if loops != passes.len() {
                    return Err(Error::Config(format!(
                        "loops = {loops} but the sequence has {} passes",
                        passes.len()
                    )));
                }
            }
            passes.clone()
        }
        None => {
            let loops = config.loops.unwrap_or(m.saturating_sub(1).max(1));
            let mut rng = stream_rng(config.master_seed, 0);
            linop::random_angles(m, loops, &mut rng)?
                .into_iter()
                .map(|pass| {
                    pass.into_iter()
                        .map(|(theta, phi, lambda)| Angles { theta, phi, lambda })
                        .collect()
                })
                .collect()
        }
    };
    if angles.is_empty() {
        return Err(Error::ZeroPasses);
    }
    let interior = angles
        .iter()
        .map(|pass| {
            pass.iter()
                .map(|a| BeamsplitterSetting::from_angles(a.theta, a.phi, a.lambda))
                .collect()
        })
        .collect();
    let seq = SwitchingSequence::from_interior(m, interior)?;
    let loops = seq.num_passes();

    let v = linop::build_pass_maps(&seq)?;
    let v_lossy = loss::lossy_pass_maps(&seq, loss)?;
    let serialise = |maps: &[TransferMatrix]| {
        maps.iter()
            .map(|map| MatrixJson::from_complex(map.as_matrix()))
            .collect()
    };
    Ok(MapDump {
        m,
        loops,
        eta_f: loss.eta_f(),
        eta_s: loss.eta_s(),
        include_outer: config.include_outer,
        master_seed: config.master_seed,
        sequence: angles,
        v: serialise(&v),
        v_lossy: serialise(&v_lossy),
        loss_matrix: MatrixJson::from_real(loss::loss_matrix(m, loops, loss)?.as_matrix()),
        outer_loop_factor: loss::outer_loop_factor(m, loops, loss),
        u: MatrixJson::from_complex(linop::compose_loops(&v)?.as_matrix()),
        u_lossy: MatrixJson::from_complex(
            loss::lossy_composed_map(&seq, loss, config.include_outer)?.as_matrix(),
        ),
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
