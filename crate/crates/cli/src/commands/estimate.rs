use qlab::estimator::{mean_fidelity_experiment, GridSpec, Imperfections, Strategy, StrategyConfig};
use qlab::RngSeed;
use serde::Serialize;
use serde_json::json;

use crate::args::{EstimateParams, Format};
use crate::error::{config_err, CliResult};
use crate::output::{json_document, num, Csv, Header};

#[derive(Debug, Serialize)]
struct Resolved {
    strategy: &'static str,
    n: usize,
    states: usize,
    lambda: f64,
    delta_eta: f64,
    n_theta: usize,
    n_phi: usize,
}

fn resolve(p: EstimateParams) -> CliResult<(Resolved, StrategyConfig, Imperfections<f64>)> {
    let kind: Strategy = p.strategy.as_deref().unwrap_or("self").parse()?;
    let n = p.n.unwrap_or(12);
    let states = p.states.unwrap_or(1000);
    if states == 0 {
        return config_err("states must be at least 1");
    }
    let grid = GridSpec { n_theta: p.n_theta.unwrap_or(64), n_phi: p.n_phi.unwrap_or(128) };
    let (lambda, delta_eta) = (p.lambda.unwrap_or(0.0), p.delta_eta.unwrap_or(0.0));
    let imperfections = Imperfections::new(lambda, delta_eta)?;
    if !imperfections.preserves_ball() {
        return config_err(format!("lambda = {lambda} with delta_eta = {delta_eta} maps states outside the Bloch ball"));
    }
    let mut config = StrategyConfig::new(kind, n);
    config.grid = grid;
    config.validate()?;
    let resolved = Resolved { strategy: kind.name(), n, states, lambda, delta_eta, n_theta: grid.n_theta, n_phi: grid.n_phi };
    Ok((resolved, config, imperfections))
}

pub fn run(params: EstimateParams, seed: u64, format: Option<Format>) -> CliResult<String> {
    let (resolved, config, imperfections) = resolve(params)?;
    let header = Header::new("estimate", seed, &resolved);
    let stats = mean_fidelity_experiment(resolved.states, &config, &imperfections, RngSeed(seed))?;

    Ok(match format.unwrap_or(Format::Json) {
        Format::Json => {
            let bound = (resolved.n as f64 + 1.0) / (resolved.n as f64 + 2.0);
            json_document(
                &header,
                json!({
                    "config": resolved,
                    "strategy": resolved.strategy,
                    "N": resolved.n,
                    "states": resolved.states,
                    "mean": stats.mean,
                    "stderr": stats.stderr,
                    "optimal_bound": bound,
                }),
            )
        }
        Format::Csv => {
            let mut csv = Csv::new(&header, &["state", "theta", "phi", "fidelity"]);
            for (i, s) in stats.per_state.iter().enumerate() {
                csv.row(&[i.to_string(), num(s.true_state.theta()), num(s.true_state.phi()), num(s.fidelity)]);
            }
            csv.finish()
        }
    })
}
