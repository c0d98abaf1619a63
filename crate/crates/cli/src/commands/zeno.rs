use std::f64::consts::PI;

use qlab::bloch::DetectionModel;
use qlab::zeno::{run_length_distribution, simulate_alternating_with, simulate_fractionated_pi, survival_probability, ZenoConfig};
use qlab::RngSeed;
use serde::Serialize;
use serde_json::json;

use crate::args::{Format, ZenoParams};
use crate::error::{config_err, CliResult};
use crate::output::{json_document, num, Csv, Header};

#[derive(Debug, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum Resolved {
    Fractionated {
        fractions: Vec<u32>,
        sequences: Option<u32>,
        total_area: f64,
        prep: f64,
        detection: Detection,
    },
    RunLengths {
        pairs: usize,
        theta: f64,
        max_q: usize,
        detection: Detection,
    },
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
enum Detection {
    Efficiencies { eta0: f64, eta1: f64 },
    Photons { on_mean: f64, off_mean: f64, max_misread: f64 },
}

impl Detection {
    fn build(self) -> CliResult<DetectionModel<f64>> {
        Ok(match self {
            Detection::Efficiencies { eta0, eta1 } => DetectionModel::from_efficiencies(eta0, eta1)?,
            Detection::Photons { on_mean, off_mean, max_misread } => DetectionModel::with_max_on_misread(on_mean, off_mean, max_misread)?,
        })
    }
}

struct Row {
    key: usize,
    theory: f64,
    simulated: f64,
    stderr: f64,
}

fn resolve(p: ZenoParams) -> CliResult<Resolved> {
    let detection = match p.on_mean {
        Some(on_mean) => {
            if p.eta0.is_some() || p.eta1.is_some() {
                return config_err("give either eta0/eta1 or photon-count read-out, not both");
            }
            Detection::Photons { on_mean, off_mean: p.off_mean.unwrap_or(0.2), max_misread: p.max_misread.unwrap_or(0.005) }
        }
        None => Detection::Efficiencies { eta0: p.eta0.unwrap_or(1.0), eta1: p.eta1.unwrap_or(1.0) },
    };
    if let Some(pairs) = p.pairs {
        return Ok(Resolved::RunLengths { pairs, theta: p.theta.unwrap_or(PI), max_q: p.max_q.unwrap_or(10), detection });
    }
    let fractions = p.fractions.unwrap_or_else(|| vec![1, 2, 3, 4, 10]);
    if fractions.is_empty() {
        return config_err("fractions must not be empty");
    }
    Ok(Resolved::Fractionated {
        fractions,
        sequences: p.sequences,
        total_area: p.total_area.unwrap_or(PI),
        prep: p.prep.unwrap_or(1.0),
        detection,
    })
}

pub fn run(params: ZenoParams, seed: u64, format: Option<Format>) -> CliResult<String> {
    let resolved = resolve(params)?;
    let header = Header::new("zeno", seed, &resolved);
    let seed = RngSeed(seed);

    let (key_name, rows) = match &resolved {
        Resolved::Fractionated { fractions, sequences, total_area, prep, detection } => {
            let detection = detection.build()?;
            let mut rows = Vec::with_capacity(fractions.len());
            for (i, &n) in fractions.iter().enumerate() {
                let mut cfg = ZenoConfig::fractionated_pi(n);
                if let Some(s) = sequences {
                    cfg.sequences = *s;
                }
                cfg.total_area = *total_area;
                cfg.prep_efficiency = *prep;
                cfg.detection = detection;
                let result = simulate_fractionated_pi(&cfg, seed.derive(i as u64))?;
                rows.push(Row { key: n as usize, theory: cfg.ideal_survival(), simulated: result.corrected_survival, stderr: result.stderr });
            }
            ("n", rows)
        }
        Resolved::RunLengths { pairs, theta, max_q, detection } => {
            let traj = simulate_alternating_with(*theta, *pairs, detection.build()?, seed)?;
            let runs = run_length_distribution(&traj)?;
            let stay = survival_probability(*theta, 1);
            let rows = (1..=*max_q)
                .map(|q| Row {
                    key: q,
                    theory: survival_probability(*theta, q as u32 - 1),
                    simulated: runs.ratio(q).unwrap_or(f64::NAN),
                    stderr: runs.ratio_stderr(q, stay),
                })
                .collect();
            ("q", rows)
        }
    };

    Ok(match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(&header, &[key_name, "theory", "simulated", "stderr"]);
            for r in &rows {
                csv.row(&[r.key.to_string(), num(r.theory), num(r.simulated), num(r.stderr)]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| json!({ key_name: r.key, "theory": r.theory, "simulated": r.simulated, "stderr": r.stderr }))
                .collect();
            json_document(&header, json!({ "config": resolved, "rows": rows }))
        }
    })
}
