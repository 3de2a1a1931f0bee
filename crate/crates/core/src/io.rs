//! Input specs and output encodings.
//!
//! Floats are written with 17 significant digits in both JSON and CSV so that
//! every value round-trips exactly.

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::depth::DepthProfile;
use crate::dynamics::TrajectorySample;
use crate::error::{Error, Result};
use crate::frontier::StaircasePoint;
use crate::model::{
    battery_hamiltonian, check_dense, cluster_flip_hamiltonian, BatterySpec, BlockPartition, ClusterFlipSpec,
};
use crate::numkit::ComplexMatrix;

/// Hamiltonian input document, tagged by `"type"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HamiltonianSpec {
    /// Balanced cluster flip; give `g`, `T`, or both (consistent), default `T = 1`.
    ClusterFlip {
        n: usize,
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<f64>,
        #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
    },
    /// Free battery Hamiltonian, default `omega = 1`.
    Battery {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
    },
    /// Row-major `[re, im]` pairs of a `2^n × 2^n` Hermitian matrix.
    CustomDense { n: usize, matrix: Vec<[f64; 2]> },
}

#[derive(Clone, Debug)]
pub struct BuiltHamiltonian {
    pub h: ComplexMatrix<f64>,
    pub n: usize,
    /// Design charging time, when the spec fixes one.
    pub t_design: Option<f64>,
    pub partition: Option<BlockPartition>,
}

impl HamiltonianSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn n(&self) -> usize {
        match *self {
            Self::ClusterFlip { n, .. } | Self::Battery { n, .. } | Self::CustomDense { n, .. } => n,
        }
    }

    pub fn build(&self) -> Result<BuiltHamiltonian> {
        check_dense(self.n())?;
        match self {
            &Self::ClusterFlip { n, m, g, t } => {
                let partition = BlockPartition::balanced(n, m)?;
                let spec = match (g, t) {
                    (Some(g), Some(t)) => ClusterFlipSpec::new(partition, g, t)?,
                    (Some(g), None) => ClusterFlipSpec::from_coupling(partition, g)?,
                    (None, t) => ClusterFlipSpec::from_charging_time(partition, t.unwrap_or(1.0))?,
                };
                Ok(BuiltHamiltonian {
                    h: cluster_flip_hamiltonian(&spec)?,
                    n,
                    t_design: Some(spec.t_charge),
                    partition: Some(spec.partition),
                })
            }
            &Self::Battery { n, omega } => {
                let h = battery_hamiltonian(&BatterySpec::new(n, omega.unwrap_or(1.0))?)?;
                Ok(BuiltHamiltonian { h, n, t_design: None, partition: None })
            }
            Self::CustomDense { n, matrix } => {
                let d = 1usize << n;
                if matrix.len() != d * d {
                    return Err(Error::Spec(format!(
                        "custom_dense with n={n} needs {} entries, got {}",
                        d * d,
                        matrix.len()
                    )));
                }
                let data = matrix.iter().map(|&[re, im]| Complex::new(re, im)).collect();
                let h = ComplexMatrix::from_row_major(d, d, data)?;
                h.check_hermitian(crate::config::HERMITIAN_REL_TOL)?;
                Ok(BuiltHamiltonian { h, n: *n, t_design: None, partition: None })
            }
        }
    }
}

/// `{:.16e}`: 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON formatter that prints every float with 17 significant digits.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        writer.write_all(fmt17(f64::from(value)).as_bytes())
    }
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(writer: W, value: &T) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, Sig17);
    value.serialize(&mut ser)?;
    Ok(())
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json(&mut buf, value)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

pub fn write_staircase_csv<W: Write>(writer: W, points: &[StaircasePoint<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["eta", "d_cert", "smooth_bound"])?;
    for p in points {
        w.write_record([fmt17(p.eta), p.depth_certified.to_string(), p.smooth_bound.to_string()])?;
    }
    finish(w)
}

pub fn write_trajectory_csv<W: Write>(writer: W, samples: &[TrajectorySample<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "fidelity_to_target", "fs_speed", "energy"])?;
    for s in samples {
        w.write_record([fmt17(s.t), fmt17(s.fidelity_to_target), fmt17(s.fs_speed), fmt17(s.energy)])?;
    }
    finish(w)
}

pub fn write_depth_csv<W: Write>(writer: W, profile: &DepthProfile<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "depth"])?;
    for (t, d) in profile.times.iter().zip(&profile.depths) {
        w.write_record([fmt17(*t), d.to_string()])?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_sig17() {
        let xs = [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17];
        let s = to_json_string(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
        assert!(s.contains("1.0000000000000001e-1"));
    }

    #[test]
    fn parse_cluster_flip_spec() {
        let spec = HamiltonianSpec::from_json(r#"{"type":"cluster_flip","n":4,"m":2,"T":2.0}"#).unwrap();
        let built = spec.build().unwrap();
        assert_eq!(built.h.rows(), 16);
        assert_eq!(built.t_design, Some(2.0));
    }

    #[test]
    fn inconsistent_cluster_flip_rejected() {
        let spec = HamiltonianSpec::from_json(r#"{"type":"cluster_flip","n":2,"m":1,"g":1.0,"T":1.0}"#).unwrap();
        assert!(spec.build().is_err());
    }

    #[test]
    fn custom_dense_checks_shape_and_hermiticity() {
        let ok = r#"{"type":"custom_dense","n":1,"matrix":[[1,0],[0,1],[0,-1],[2,0]]}"#;
        assert!(HamiltonianSpec::from_json(ok).unwrap().build().is_ok());
        let bad = r#"{"type":"custom_dense","n":1,"matrix":[[1,0],[0,1],[0,1],[2,0]]}"#;
        assert!(HamiltonianSpec::from_json(bad).unwrap().build().is_err());
        let short = r#"{"type":"custom_dense","n":1,"matrix":[[1,0]]}"#;
        assert!(HamiltonianSpec::from_json(short).unwrap().build().is_err());
    }

    #[test]
    fn unknown_type_is_a_spec_error() {
        assert!(matches!(HamiltonianSpec::from_json(r#"{"type":"nope","n":1}"#), Err(Error::Spec(_))));
    }

    #[test]
    fn staircase_csv_header() {
        let pts = [StaircasePoint { eta: 1.0, depth_certified: 3, smooth_bound: 3 }];
        let mut buf = Vec::new();
        write_staircase_csv(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eta,d_cert,smooth_bound\n1.0000000000000000e0,3,3\n"));
    }
}
