use qlab::bloch::Direction;
use qlab::channels::{tomography_exact, tomography_sampled, ChannelSpec};
use qlab::linalg::{Mat3, Vec3};
use qlab::RngSeed;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{ChannelParams, Format};
use crate::error::{config_err, CliResult};
use crate::output::{json_document, num, Csv, Header};

/// Unit vector given either by Cartesian components or by polar angles.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Cartesian([f64; 3]),
    Polar { theta: f64, phi: f64 },
}

impl Axis {
    fn unit(self) -> CliResult<Vec3<f64>> {
        match self {
            Axis::Cartesian([x, y, z]) => Ok(Vec3::new(x, y, z)),
            Axis::Polar { theta, phi } => Ok(Direction::wrapped(theta, phi)?.unit()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelJson {
    PhaseDamping { lambda: f64, axis: Axis },
    Depolarizing { lambda: f64 },
    Rotation { axis: Axis, angle: f64 },
    Raw { m: [[f64; 3]; 3], v: [f64; 3] },
    Composition { parts: Vec<ChannelJson> },
}

impl ChannelJson {
    pub fn to_spec(&self) -> CliResult<ChannelSpec<f64>> {
        Ok(match self {
            ChannelJson::PhaseDamping { lambda, axis } => ChannelSpec::PhaseDamping { lambda: *lambda, axis: axis.unit()? },
            ChannelJson::Depolarizing { lambda } => ChannelSpec::Depolarizing { lambda: *lambda },
            ChannelJson::Rotation { axis, angle } => ChannelSpec::Rotation { axis: axis.unit()?, angle: *angle },
            ChannelJson::Raw { m, v } => ChannelSpec::Raw { m: Mat3(*m), v: Vec3(*v) },
            ChannelJson::Composition { parts } => ChannelSpec::Composition(parts.iter().map(|p| p.to_spec()).collect::<CliResult<_>>()?),
        })
    }
}

#[derive(Debug, Serialize)]
struct Resolved {
    spec: ChannelJson,
    shots: Option<u64>,
}

pub fn run(params: ChannelParams, seed: u64, format: Option<Format>) -> CliResult<String> {
    let Some(path) = params.spec else {
        return config_err("channel needs --spec <file>");
    };
    let text = std::fs::read_to_string(&path).map_err(|e| crate::error::CliError::Config(format!("{}: {e}", path.display())))?;
    let spec: ChannelJson = serde_json::from_str(&text).map_err(|e| crate::error::CliError::Config(format!("{}: {e}", path.display())))?;
    if params.shots == Some(0) {
        return config_err("shots must be at least 1");
    }
    let channel = spec.to_spec()?.build()?;
    channel.check_ball()?;
    let resolved = Resolved { spec, shots: params.shots };
    let header = Header::new("channel", seed, &resolved);

    let exact = tomography_exact(|s| channel.map(s));
    let (estimate, stderr) = match resolved.shots {
        Some(shots) => {
            let t = tomography_sampled(&channel, shots, &mut RngSeed(seed).rng())?;
            (t.channel, Some(t.stderr))
        }
        None => (exact, None),
    };

    Ok(match format.unwrap_or(Format::Json) {
        Format::Json => json_document(
            &header,
            json!({
                "config": resolved,
                "M": estimate.m.0,
                "v": estimate.v.0,
                "stderr": stderr.map(|s| json!({ "M": s.m.0, "v": s.v.0 })),
                "exact": { "M": exact.m.0, "v": exact.v.0 },
            }),
        ),
        Format::Csv => {
            let mut csv = Csv::new(&header, &["entry", "exact", "estimate", "stderr"]);
            let se = |f: &dyn Fn(&qlab::channels::ChannelStderr<f64>) -> f64| stderr.as_ref().map_or(0.0, f);
            for i in 0..3 {
                for j in 0..3 {
                    csv.row(&[format!("M{}{}", i + 1, j + 1), num(exact.m.0[i][j]), num(estimate.m.0[i][j]), num(se(&|s| s.m.0[i][j]))]);
                }
            }
            for i in 0..3 {
                csv.row(&[format!("v{}", i + 1), num(exact.v.0[i]), num(estimate.v.0[i]), num(se(&|s| s.v.0[i]))]);
            }
            csv.finish()
        }
    })
}
