use std::path::{Path, PathBuf};
use std::time::Instant;

use mor_core::bt_lowrank::export_rom;
use mor_core::eksm::EksmProgress;
use mor_core::freqresp::{
    compare, compare_sparams, to_s_parameters, touchstone_name, transfer_function, write_csv, write_touchstone,
    ComparisonMetrics, SParamSet, TransferFunctionSamples,
};
use mor_core::model::{assemble_mna, load_manifest, parse_netlist, AssemblyOptions, DescriptorSystem, ParameterKind};
use mor_core::pipeline::{reduce, Mode};
use mor_core::MorError;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{peak_rss_bytes, table, Failure, EXIT_INPUT, EXIT_NUMERICAL};

/// A `.json` path is a matrix manifest; anything else is read as a netlist.
pub fn load_model(path: &Path, cfg: &RunConfig) -> Result<DescriptorSystem, Failure> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        return Ok(load_manifest(path)?);
    }
    let text = std::fs::read_to_string(path).map_err(|source| MorError::Io { path: path.into(), source })?;
    let list = parse_netlist(&text)?;
    let options = AssemblyOptions { grounding_capacitance: cfg.grounding_capacitance };
    Ok(assemble_mna(&list, &options)?)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|source| Failure::from(MorError::Io { path: dir.into(), source }))
}

fn memory() -> String {
    peak_rss_bytes().map_or_else(|| "n/a".into(), |b| format!("{:.3} GB (peak RSS)", b as f64 / 1e9))
}

pub fn cmd_reduce(input: &Path, cfg: &RunConfig) -> Result<(), Failure> {
    let start = Instant::now();
    let sys = load_model(input, cfg)?;
    let verbose = cfg.verbose;
    let progress = move |p: &EksmProgress| {
        if verbose >= 2 || (verbose == 1 && p.iteration.is_multiple_of(10)) {
            eprintln!(
                "eksm {:?} iteration {} basis {} residual {:.3e}",
                p.side, p.iteration, p.basis_size, p.residual
            );
        }
    };
    let red = reduce(&sys, &cfg.reduce, &progress)?;
    let elapsed = start.elapsed();
    let manifest = export_rom(&red.rom, &cfg.out)?;
    let rom = &red.rom;
    for w in &rom.provenance.warnings {
        eprintln!("warning: {w}");
    }

    let mut rows = vec![
        ("initial order", sys.order().to_string()),
        ("ports", sys.inputs().to_string()),
        ("ROM order", rom.order().to_string()),
    ];
    match (&cfg.reduce.mode, &rom.provenance.eksm) {
        (Mode::Eksm, Some(e)) => {
            rows.push(("mode", format!("eksm ({})", e.formulation)));
            rows.push(("EKSM iterations", format!("P {}, Q {}", e.iterations_p, e.iterations_q)));
            rows.push(("EKSM residual", format!("P {:.3e}, Q {:.3e} (tol {:.1e})", e.residual_p, e.residual_q, e.tol)));
        }
        _ => rows.push(("mode", "dense-oracle".into())),
    }
    rows.push(("error bound", format!("{:.6e}", rom.error_bound)));
    rows.push(("reduction time", format!("{:.3} s", elapsed.as_secs_f64())));
    rows.push(("memory", memory()));
    rows.push(("ROM manifest", manifest.display().to_string()));
    print!("{}", table(&rows));

    if !red.converged() {
        let e = rom.provenance.eksm.as_ref().expect("eksm mode");
        return Err(Failure::new(
            EXIT_NUMERICAL,
            "not-converged",
            format!(
                "EKSM stopped before reaching tol {:.1e}; the ROM in {} was built from the best iterate",
                e.tol,
                cfg.out.display()
            ),
        )
        .with_details(json!({
            "residual_P": e.residual_p,
            "residual_Q": e.residual_q,
            "converged_P": e.converged_p,
            "converged_Q": e.converged_q,
            "rom": manifest,
        })));
    }
    Ok(())
}

fn s_parameters(samples: &TransferFunctionSamples, cfg: &RunConfig) -> Result<Option<SParamSet>, Failure> {
    if samples.kind == ParameterKind::Generic {
        return Ok(None);
    }
    Ok(Some(to_s_parameters(samples, cfg.z0)?))
}

fn write_set(set: &SParamSet, dir: &Path, stem: &str) -> Result<Vec<PathBuf>, Failure> {
    let ts = dir.join(touchstone_name(stem, set.ports()));
    let csv = dir.join(format!("{stem}.csv"));
    write_touchstone(set, &ts)?;
    write_csv(set, &csv)?;
    Ok(vec![ts, csv])
}

fn metrics_json(m: &ComparisonMetrics) -> serde_json::Value {
    json!({
        "grid_max": m.max,
        "argmax_hz": m.argmax_omega / (2.0 * std::f64::consts::PI),
        "rms": m.rms,
        "max_entry": m.max_entry,
        "reference_max": m.reference_max,
        "relative_max": m.relative_max(),
    })
}

pub fn cmd_compare(original: &Path, reduced: &Path, cfg: &RunConfig) -> Result<(), Failure> {
    let a = load_model(original, cfg)?;
    let b = load_model(reduced, cfg)?;
    if (a.inputs(), a.outputs()) != (b.inputs(), b.outputs()) {
        return Err(Failure::new(
            EXIT_INPUT,
            "port-mismatch",
            format!(
                "models have {}x{} and {}x{} ports",
                a.outputs(),
                a.inputs(),
                b.outputs(),
                b.inputs()
            ),
        ));
    }
    if a.kind() != b.kind() {
        return Err(Failure::new(
            EXIT_INPUT,
            "kind-mismatch",
            format!("models describe {:?} and {:?} parameters", a.kind(), b.kind()),
        ));
    }
    let ha = transfer_function(&a, &cfg.grid)?;
    let hb = transfer_function(&b, &cfg.grid)?;
    let h_metrics = compare(&ha, &hb)?;
    create_dir(&cfg.out)?;
    let mut files = Vec::new();
    let mut rows = vec![
        ("points", cfg.grid.len().to_string()),
        ("orders", format!("{} vs {}", a.order(), b.order())),
        ("H grid max", format!("{:.6e}", h_metrics.max)),
        ("H relative max", format!("{:.6e}", h_metrics.relative_max())),
    ];
    let mut metrics = json!({ "points": cfg.grid.len(), "transfer_function": metrics_json(&h_metrics) });
    match (s_parameters(&ha, cfg)?, s_parameters(&hb, cfg)?) {
        (Some(sa), Some(sb)) => {
            let s_metrics = compare_sparams(&sa, &sb)?;
            rows.push(("S grid max", format!("{:.6e}", s_metrics.max)));
            rows.push(("S rms", format!("{:.6e}", s_metrics.rms)));
            rows.push((
                "S max at",
                format!("{:.6e} Hz", s_metrics.argmax_omega / (2.0 * std::f64::consts::PI)),
            ));
            metrics["z0"] = json!(cfg.z0);
            metrics["s_parameters"] = metrics_json(&s_metrics);
            files.extend(write_set(&sa, &cfg.out, "original")?);
            files.extend(write_set(&sb, &cfg.out, "reduced")?);
        }
        _ => eprintln!("warning: generic transfer functions have no S-parameters; only metrics are written"),
    }
    let path = cfg.out.join("metrics.json");
    let text = serde_json::to_string_pretty(&metrics).expect("metrics serialize") + "\n";
    std::fs::write(&path, text).map_err(|source| Failure::from(MorError::Io { path: path.clone(), source }))?;
    files.push(path);
    rows.push(("written", files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")));
    print!("{}", table(&rows));
    Ok(())
}

pub fn cmd_freqresp(input: &Path, cfg: &RunConfig) -> Result<(), Failure> {
    let sys = load_model(input, cfg)?;
    let h = transfer_function(&sys, &cfg.grid)?;
    let set = s_parameters(&h, cfg)?.ok_or_else(|| {
        Failure::new(
            EXIT_INPUT,
            "no-s-parameters",
            "model is neither an impedance nor an admittance description".into(),
        )
    })?;
    create_dir(&cfg.out)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
    let stem = if stem == "manifest" { "model" } else { stem };
    let files = write_set(&set, &cfg.out, stem)?;
    let peak = set.values.iter().map(mor_core::freqresp::spectral_norm).fold(0.0, f64::max);
    print!(
        "{}",
        table(&[
            ("order", sys.order().to_string()),
            ("ports", sys.inputs().to_string()),
            ("points", cfg.grid.len().to_string()),
            ("max |S|", format!("{peak:.6e}")),
            ("written", files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")),
        ])
    );
    Ok(())
}

pub fn cmd_validate(input: &Path, cfg: &RunConfig) -> Result<(), Failure> {
    let sys = load_model(input, cfg)?;
    let report = sys.validate(cfg.reduce.dense_cap);
    let rows: Vec<(&str, String)> = report
        .checks
        .iter()
        .map(|c| {
            let status = match c.passed {
                Some(true) => "ok",
                Some(false) => "FAILED",
                None => "skipped",
            };
            (c.name.as_str(), format!("{status:<8}{}", c.detail))
        })
        .collect();
    print!("{}", table(&rows));
    if !report.is_ok() {
        let failed: Vec<_> = report.failures().map(|c| json!({ "check": c.name, "detail": c.detail })).collect();
        return Err(Failure::new(EXIT_INPUT, "validation-failed", format!("{} check(s) failed", failed.len()))
            .with_details(json!({ "failed": failed })));
    }
    Ok(())
}
