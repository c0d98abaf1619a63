use std::f64::consts::PI;
use std::fmt::Write as _;

use qlab::constants::{Constants, PROVENANCE};
use qlab::ionchain::{ChainCalculator, ChainReport, Species, TrapConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{ChainParams, Format};
use crate::error::{config_err, CliError, CliResult};
use crate::output::{json_document, num, Csv, Header};

pub const CONSTANTS_ENV: &str = "QLAB_CONSTANTS";

/// Replacement values for entries of the constants table, SI units.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsOverride {
    hbar: Option<f64>,
    elementary_charge: Option<f64>,
    epsilon0: Option<f64>,
    bohr_magneton: Option<f64>,
    nuclear_magneton: Option<f64>,
    atomic_mass_unit: Option<f64>,
    electron_proton_mass_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsInUse {
    pub source: String,
    pub hbar: f64,
    pub elementary_charge: f64,
    pub epsilon0: f64,
    pub bohr_magneton: f64,
    pub nuclear_magneton: f64,
    pub atomic_mass_unit: f64,
    pub electron_proton_mass_ratio: f64,
}

impl ConstantsInUse {
    fn table(&self) -> Constants<f64> {
        Constants {
            hbar: self.hbar,
            elementary_charge: self.elementary_charge,
            epsilon0: self.epsilon0,
            bohr_magneton: self.bohr_magneton,
            nuclear_magneton: self.nuclear_magneton,
            atomic_mass_unit: self.atomic_mass_unit,
            electron_proton_mass_ratio: self.electron_proton_mass_ratio,
        }
    }
}

/// CODATA table, with entries replaced from the file named by `QLAB_CONSTANTS` if set.
pub fn load_constants() -> CliResult<ConstantsInUse> {
    let c = Constants::<f64>::codata2018();
    let (source, o) = match std::env::var_os(CONSTANTS_ENV) {
        None => (PROVENANCE.to_string(), ConstantsOverride::default()),
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{CONSTANTS_ENV}: {e}")))?;
            let o = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{CONSTANTS_ENV}: {e}")))?;
            (format!("{PROVENANCE}, overridden from {}", path.to_string_lossy()), o)
        }
    };
    Ok(ConstantsInUse {
        source,
        hbar: o.hbar.unwrap_or(c.hbar),
        elementary_charge: o.elementary_charge.unwrap_or(c.elementary_charge),
        epsilon0: o.epsilon0.unwrap_or(c.epsilon0),
        bohr_magneton: o.bohr_magneton.unwrap_or(c.bohr_magneton),
        nuclear_magneton: o.nuclear_magneton.unwrap_or(c.nuclear_magneton),
        atomic_mass_unit: o.atomic_mass_unit.unwrap_or(c.atomic_mass_unit),
        electron_proton_mass_ratio: o.electron_proton_mass_ratio.unwrap_or(c.electron_proton_mass_ratio),
    })
}

#[derive(Debug, Serialize)]
struct Resolved {
    species: String,
    n: usize,
    nu1_khz: f64,
    gradient: f64,
    b0: Option<f64>,
    table: bool,
    constants: ConstantsInUse,
}

/// Coupling constants `J_ij/2π` for `i > j`, one row per ion, in the layout of the usual lower-triangular table.
pub fn format_table(report: &ChainReport<f64>) -> String {
    let hz = report.coupling.hz();
    let n = hz.dim();
    let mut s = String::new();
    let _ = write!(s, "{:>3} |", "i");
    for j in 1..n {
        let _ = write!(s, " {:>8}", format!("J_i{j}"));
    }
    s.push('\n');
    s.push_str(&"-".repeat(5 + 9 * n.saturating_sub(1)));
    s.push('\n');
    for i in 0..n {
        let _ = write!(s, "{:>3} |", i + 1);
        for j in 0..i {
            let _ = write!(s, " {:>8.2}", hz[(i, j)]);
        }
        s.push('\n');
    }
    s
}

pub fn run(params: ChainParams, seed: u64, format: Option<Format>) -> CliResult<String> {
    let species = params.species.unwrap_or_else(|| "yb171".into());
    if species != "yb171" {
        return config_err(format!("unknown species {species:?}; supported: yb171"));
    }
    let constants = load_constants()?;
    let table = constants.table();
    let resolved = Resolved {
        species,
        n: params.n.unwrap_or(10),
        nu1_khz: params.nu1_khz.unwrap_or(100.0),
        gradient: params.gradient.unwrap_or(25.0),
        b0: params.b0,
        table: params.table.unwrap_or(false),
        constants,
    };
    let header = Header::new("chain", seed, &resolved);

    let calc = ChainCalculator::new(table, Species::yb171(&table));
    let nu1 = 2.0 * PI * resolved.nu1_khz * 1e3;
    let trap = TrapConfig::new(nu1, resolved.n, resolved.gradient, resolved.b0)?;
    let report = calc.report(&trap)?;

    if resolved.table {
        let mut out = header.comment_line();
        let _ = writeln!(
            out,
            "# J_ij/2pi in Hz: {} ions, nu1 = 2pi x {} kHz, gradient {} T/m, {}",
            resolved.n,
            resolved.nu1_khz,
            resolved.gradient,
            if trap.is_weak_field() { "weak-field limit".to_string() } else { format!("B0 = {} T", resolved.b0.unwrap()) }
        );
        out.push_str(&format_table(&report));
        return Ok(out);
    }

    let um = |x: f64| x * 1e6;
    let positions_um: Vec<f64> = report.modes.z0.iter().map(|&z| um(z)).collect();
    let mode_freqs_khz: Vec<f64> = report.modes.nu.iter().map(|&v| v / (2.0 * PI) / 1e3).collect();
    let hz = report.coupling.hz();
    let j_hz: Vec<&[f64]> = hz.rows().collect();
    let spacing = calc.spacing_estimate(resolved.n, report.zeta).ok();
    let delta_z1 = calc.lamb_dicke(1.0, nu1).dz;

    Ok(match format.unwrap_or(Format::Json) {
        Format::Json => json_document(
            &header,
            json!({
                "config": resolved,
                "weak_field": trap.is_weak_field(),
                "zeta": report.zeta,
                "zeta_um": um(report.zeta),
                "spacing_estimate_um": spacing.map(um),
                "delta_z1_nm": delta_z1 * 1e9,
                "field_for_chi_1": calc.field_for_chi(1.0),
                "positions_um": positions_um,
                "mode_freqs_khz": mode_freqs_khz,
                "required_gradient": report.required_gradient,
                "J_hz": j_hz,
            }),
        ),
        Format::Csv => {
            let mut csv = Csv::new(&header, &["i", "j", "J_hz"]);
            for i in 0..resolved.n {
                for j in 0..i {
                    csv.row(&[(i + 1).to_string(), (j + 1).to_string(), num(hz[(i, j)])]);
                }
            }
            csv.finish()
        }
    })
}
