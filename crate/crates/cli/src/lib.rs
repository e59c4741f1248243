//! Configuration loading and the `run`, `cyclecheck` and `describe` commands.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fidecay::circuit::{compile_entangler, compile_to_pulses, CircuitPlan, PulseParams};
use fidecay::experiment::{
    compare_models, recurrence_count, run_decay, saturation_estimate, spectrum, Component,
    DecaySeries, Spectrum, MIN_SPECTRUM_SAMPLES, RECURRENCE_THRESHOLD,
};
use fidecay::noise::perturbed_iteration_superop;

pub use config::{load_config, ConfigError, ExperimentConfig, ModelSelection};
use output::{decay_csv, spectrum_csv, OutputSet};

/// Tolerance on the `G^n_c` identity residual.
pub const CYCLE_TOL: f64 = 1e-9;

fn config_or_default(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

struct ModelOutput {
    series: DecaySeries,
    spectra: Vec<Spectrum>,
}

fn spectra_of(series: &DecaySeries) -> Result<Vec<Spectrum>> {
    if series.len() < MIN_SPECTRUM_SAMPLES {
        return Ok(Vec::new());
    }
    Ok(Component::ALL
        .iter()
        .map(|c| spectrum(series, *c))
        .collect::<fidecay::Result<_>>()?)
}

fn single_summary(out: &ModelOutput) -> String {
    let f = out.series.fidelities();
    let mut s = format!(
        "recurrences {}: {}\nsaturation {}: {:.6}\n",
        out.series.model,
        recurrence_count(&f, RECURRENCE_THRESHOLD),
        out.series.model,
        saturation_estimate(&f)
    );
    for sp in &out.spectra {
        s.push_str(&format!(
            "nyquist {} {}: {:.6e}\n",
            sp.component.label(),
            out.series.model,
            sp.nyquist_magnitude()
        ));
    }
    s.push_str("nyquist ratios: not available, both models are required\n");
    s
}

/// Runs the configured models and writes CSV files plus `summary.txt`.
/// Returns the written paths; nothing is left behind on failure.
pub fn run(
    config: Option<&Path>,
    model: Option<ModelSelection>,
    out: Option<&Path>,
) -> Result<Vec<PathBuf>> {
    let mut cfg = config_or_default(config)?;
    if let Some(m) = model {
        cfg.model = m;
    }
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.dir.clone());
    let setup = cfg.setup()?;
    let digest = cfg.digest();

    let mut outputs = Vec::new();
    let mut summary = format!("# config sha256 {digest}\n");
    if cfg.model == ModelSelection::Both && cfg.n_max + 1 >= MIN_SPECTRUM_SAMPLES {
        let report = compare_models(&setup)?;
        summary.push_str(&report.summary());
        outputs.push(ModelOutput {
            series: report.incoherent,
            spectra: report.incoherent_spectra,
        });
        outputs.push(ModelOutput {
            series: report.decoherent,
            spectra: report.decoherent_spectra,
        });
    } else {
        for m in cfg.model.models() {
            let series = run_decay(m, &setup)?;
            let spectra = spectra_of(&series)?;
            let o = ModelOutput { series, spectra };
            summary.push_str(&single_summary(&o));
            outputs.push(o);
        }
    }
    if outputs.iter().any(|o| o.spectra.is_empty()) {
        summary.push_str(&format!(
            "spectra skipped: {} samples, at least {MIN_SPECTRUM_SAMPLES} required\n",
            cfg.n_max + 1
        ));
    }

    let mut files = OutputSet::create(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut write = |name: String, text: String| -> Result<()> {
        files
            .write(&name, &text)
            .map(|_| ())
            .map_err(|(p, e)| anyhow::anyhow!("cannot write {}: {e}", p.display()))
    };
    for o in &outputs {
        let m = o.series.model;
        write(format!("decay_{m}.csv"), decay_csv(&o.series, &digest))?;
        for sp in &o.spectra {
            write(
                format!("spectrum_{m}_{}.csv", sp.component.column()),
                spectrum_csv(sp, &digest),
            )?;
        }
    }
    write("summary.txt".into(), summary)?;
    Ok(files.commit())
}

pub struct CycleCheck {
    pub residual: f64,
    pub pass: bool,
    pub report: String,
}

/// Residual `‖S(z)^cycle − I‖_F` of the gate-level entangler superoperator.
pub fn cyclecheck(config: Option<&Path>, scale: f64, cycle: usize) -> Result<CycleCheck> {
    let cfg = config_or_default(config)?;
    let sys = cfg.spin_system()?;
    let s = perturbed_iteration_superop(&CircuitPlan::standard(), &sys, scale)?;
    let residual = s.pow(cycle).distance_to_identity();
    let pass = residual < CYCLE_TOL;
    let report = format!(
        "cycle length {cycle}, field scale {scale}: residual {residual:.3e} ({})",
        if pass {
            "identity, PASS"
        } else {
            "non-identity, FAIL"
        }
    );
    Ok(CycleCheck {
        residual,
        pass,
        report,
    })
}

/// Gate lists plus the compiled pulse sequences.
pub fn describe(config: Option<&Path>) -> Result<String> {
    let cfg = config_or_default(config)?;
    let sys = cfg.spin_system()?;
    let plan = CircuitPlan::standard();
    let params = PulseParams {
        iteration_duration: Some(cfg.iteration_duration),
    };
    let mut s = plan.describe();
    let prep = compile_to_pulses(&plan.prep, &sys, &plan.channels, &params)?;
    let ent = compile_entangler(&plan, &sys, &params)?;
    s.push_str(&format!(
        "compiled prep: {} pulses, {:.6e} s\ncompiled entangler iteration: {} pulses, {:.6e} s\n",
        prep.n_pulses(),
        prep.duration(),
        ent.n_pulses(),
        ent.duration()
    ));
    for seg in &ent.segments {
        s.push_str(&format!("  {seg:?}\n"));
    }
    Ok(s)
}
