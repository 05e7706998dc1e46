use std::fs;
use std::io::Write;

use halfspace_casimir::verify::{run_all, VerifyConfig};
use halfspace_casimir::{
    n_total, CachedReflection, Cell, CouplingMode, CurveTable, EuclideanMomentum, ModelParams,
};
use rayon::prelude::*;

use crate::config::{Common, EnergyConfig, Format, ReflectionConfig, VerifyRunConfig};
use crate::{CliError, VERSION};

fn numeric(context: impl Into<String>) -> impl FnOnce(halfspace_casimir::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Numeric { context, source }
}

fn header(command: &str, common: &Common) -> CurveTable {
    CurveTable::default()
        .with_metadata("program", format!("halfspace-casimir {VERSION}"))
        .with_metadata("command", command)
        .with_metadata("mode", common.mode)
        .with_metadata("lambda", common.lambda)
        .with_metadata("rel_tol", common.spec.rel_tol)
        .with_metadata("abs_tol", common.spec.abs_tol)
}

fn with_columns(meta: CurveTable, columns: &[&str]) -> CurveTable {
    let mut t = CurveTable::new(columns.iter().copied());
    for (k, v) in meta.metadata() {
        t = t.with_metadata(k.clone(), v);
    }
    t
}

fn emit(table: &CurveTable, common: &Common) -> Result<(), CliError> {
    let text = match common.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn push(table: &mut CurveTable, row: Vec<Cell>) {
    table.push_row(row).expect("row width matches the declared columns");
}

pub fn reflection(cfg: &ReflectionConfig) -> Result<(), CliError> {
    let c = &cfg.common;
    let p = ModelParams::new(c.lambda, cfg.mass, c.mode).map_err(|e| CliError::Config(e.to_string()))?;
    let rows = cfg
        .gamma
        .values()
        .into_par_iter()
        .map(|g| {
            let gamma = EuclideanMomentum::new(g).map_err(numeric(format!("gamma = {g}")))?;
            n_total(gamma, &p, &c.spec).map_err(numeric(format!("reflection factor at gamma = {g}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let meta = header("reflection", c)
        .with_metadata("mass", cfg.mass)
        .with_metadata("gamma", cfg.gamma)
        .with_metadata("values", if cfg.magnitude { "magnitude" } else { "signed" });
    let sign = |v: f64| if cfg.magnitude { v.abs() } else { v };
    let mut table = with_columns(
        meta,
        &["gamma", "n_mm", "n_mp", "n_nt", "n_t", "total", "error_estimate"],
    );
    for b in rows {
        push(
            &mut table,
            [b.gamma, sign(b.n_mm), sign(b.n_mp), sign(b.n_nt), sign(b.n_t), sign(b.total), b.error_estimate]
                .into_iter()
                .map(Cell::from)
                .collect(),
        );
    }
    emit(&table, c)
}

pub fn energy(cfg: &EnergyConfig) -> Result<(), CliError> {
    let c = &cfg.common;
    if c.mode == CouplingMode::Constant {
        eprintln!("warning: constant coupling makes the energy complex at every separation; rows will report stable = false");
    }
    let ls = cfg.l.values();
    let (m_lo, m_hi) = cfg
        .mus
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &m| (lo.min(m), hi.max(m)));
    let table_n = CachedReflection::table_for_masses(m_lo, m_hi, ls[0], ls[ls.len() - 1], &c.spec)
        .map_err(numeric("tabulating the reflection factor"))?;

    let mu_list = cfg.mus.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    let meta = header("energy", c).with_metadata("mu", mu_list).with_metadata("L", cfg.l);
    let mut table = with_columns(
        meta,
        &["mu", "L", "lambda_L", "eta", "E_real", "E_imag", "E_error", "stable"],
    );
    for &mu in &cfg.mus {
        let p = ModelParams::new(c.lambda, mu, c.mode).map_err(|e| CliError::Config(e.to_string()))?;
        let curve = halfspace_casimir::energy::energy_curve_with_table(&p, &ls, &table_n, &c.spec)
            .map_err(numeric(format!("energy curve for mu = {mu}")))?;
        for row in curve.rows {
            let e = &row.energy;
            push(
                &mut table,
                vec![
                    mu.into(),
                    row.lambda_l.into(),
                    (c.lambda * row.lambda_l).into(),
                    row.eta.into(),
                    e.real_part.into(),
                    e.imag_part.into(),
                    e.error_estimate.into(),
                    e.stable.into(),
                ],
            );
        }
    }
    emit(&table, c)
}

pub fn verify(cfg: &VerifyRunConfig) -> Result<(), CliError> {
    let c = &cfg.common;
    let vc = VerifyConfig {
        spec: c.spec,
        mc_samples: cfg.mc_samples,
        seed: cfg.seed,
    };
    let report = run_all(&vc).map_err(numeric("verification run"))?;
    {
        let mut out = std::io::stdout().lock();
        for o in &report.outcomes {
            writeln!(out, "{o}")?;
        }
        for n in &report.notes {
            writeln!(out, "note: {n}")?;
        }
    }
    if c.out.is_some() {
        let mut meta = header("verify", c)
            .with_metadata("mc_samples", cfg.mc_samples)
            .with_metadata("seed", cfg.seed);
        for (i, n) in report.notes.iter().enumerate() {
            meta = meta.with_metadata(format!("note {}", i + 1), n);
        }
        let mut table = with_columns(
            meta,
            &["id", "description", "measured", "target", "tolerance", "passed", "detail"],
        );
        for o in &report.outcomes {
            push(
                &mut table,
                vec![
                    o.id.as_str().into(),
                    o.description.as_str().into(),
                    o.measured.into(),
                    o.target.into(),
                    o.tolerance.into(),
                    o.passed.into(),
                    o.detail.as_str().into(),
                ],
            );
        }
        emit(&table, c)?;
    }
    let failed = report.outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(CliError::VerificationFailed(failed));
    }
    Ok(())
}
