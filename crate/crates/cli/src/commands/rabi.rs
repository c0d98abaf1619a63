use std::f64::consts::PI;

use qlab::bloch::{rabi_excitation_probability, ramsey_probability, Pulse};
use serde::Serialize;
use serde_json::json;

use crate::args::{Format, RabiParams};
use crate::error::{config_err, CliResult};
use crate::output::{json_document, num, Csv, Header};

#[derive(Debug, Serialize)]
struct Resolved {
    rabi_hz: f64,
    detuning_hz: f64,
    t_max: f64,
    points: usize,
    ramsey: bool,
}

pub fn run(params: RabiParams, seed: u64, format: Option<Format>) -> CliResult<String> {
    let r = Resolved {
        rabi_hz: params.rabi_hz.unwrap_or(1e3),
        detuning_hz: params.detuning_hz.unwrap_or(0.0),
        t_max: params.t_max.unwrap_or(2e-3),
        points: params.points.unwrap_or(201),
        ramsey: params.ramsey.unwrap_or(false),
    };
    if r.points < 2 {
        return config_err("points must be at least 2");
    }
    if !r.t_max.is_finite() || r.t_max <= 0.0 {
        return config_err("t_max must be positive");
    }
    let header = Header::new("rabi", seed, &r);
    let (rabi, detuning) = (2.0 * PI * r.rabi_hz, 2.0 * PI * r.detuning_hz);
    let half = if r.ramsey { Some(Pulse::new(rabi, detuning, PI / (2.0 * rabi), 0.0)?) } else { None };

    let mut rows = Vec::with_capacity(r.points);
    for k in 0..r.points {
        let t = r.t_max * k as f64 / (r.points - 1) as f64;
        let p = match &half {
            Some(pulse) => ramsey_probability(pulse, t)?,
            None => rabi_excitation_probability(rabi, detuning, t)?,
        };
        rows.push((t, p));
    }

    Ok(match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(&header, &["t", "p_excited"]);
            for (t, p) in &rows {
                csv.row(&[num(*t), num(*p)]);
            }
            csv.finish()
        }
        Format::Json => {
            let (t, p): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
            json_document(&header, json!({ "config": r, "t": t, "p_excited": p }))
        }
    })
}
