use serde::Serialize;
use serde_json::json;
use wot1d::entropic::{
    count_exceedances, decade_grid, falsify_ricci, reg_incomplete_beta_upper, sample_quantile,
    DirichletSpec, McEstimate, RngState,
};
use wot1d::entropy::entropy_scan;
use wot1d::gh::{certify_epsilon_isometry, Partition};
use wot1d::wasserstein::{
    alexandrov_deficiency, geodesic_point, lp_oracle, optimal_plan, wasserstein2, DEFAULT_MAX_ATOMS,
};
use wot1d::{psi_inverse, QuantileFunction, ScanSeries, ScanValue};

use crate::input::{load_measure, load_quantiles};
use crate::{Cli, CliError, Command, Format};

type Out = Result<String, CliError>;

fn real(x: f64) -> ScanValue {
    ScanValue::Real(x)
}

fn to_json<T: Serialize>(value: &T) -> Out {
    let mut text = serde_json::to_string_pretty(value).expect("output types serialize");
    text.push('\n');
    Ok(text)
}

/// CSV from the table, or JSON from `value`.
fn emit<T: Serialize>(format: Format, table: ScanSeries, value: &T) -> Out {
    match format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => to_json(value),
    }
}

fn emit_table(format: Format, table: ScanSeries) -> Out {
    match format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => to_json(&table),
    }
}

/// Quantile pieces as `prefix.., t0, t1, left, right` rows.
fn push_pieces(table: &mut ScanSeries, prefix: &[ScanValue], f: &QuantileFunction) {
    for s in f.segments() {
        let mut row = prefix.to_vec();
        row.extend([real(s.t0), real(s.t1), real(s.v0), real(s.v1)]);
        table.push(row);
    }
}

pub fn dispatch(cli: &Cli) -> Out {
    let g = &cli.global;
    match &cli.command {
        Command::Dist { mu, nu, lp } => {
            let (mu, nu) = (load_measure(mu)?, load_measure(nu)?);
            let d = wasserstein2(&mu, &nu);
            if *lp {
                let oracle = lp_oracle(&mu, &nu, DEFAULT_MAX_ATOMS)?;
                let mut table = ScanSeries::new(["distance", "lp_distance"]);
                table.push(vec![real(d), real(oracle.sqrt())]);
                emit(
                    g.format,
                    table,
                    &json!({ "distance": d, "lp_distance": oracle.sqrt() }),
                )
            } else {
                let mut table = ScanSeries::new(["distance"]);
                table.push(vec![real(d)]);
                emit(g.format, table, &json!({ "distance": d }))
            }
        }
        Command::Plan { mu, nu } => {
            let (mu, nu) = (load_measure(mu)?, load_measure(nu)?);
            let plan = optimal_plan(&mu, &nu);
            if mu.is_atomic() && nu.is_atomic() {
                let discrete = plan.to_discrete()?;
                let mut table = ScanSeries::new(["x", "y", "mass"]);
                for (x, y, m) in discrete.entries() {
                    table.push(vec![real(x), real(y), real(m)]);
                }
                emit(
                    g.format,
                    table,
                    &json!({ "cost": plan.cost(), "plan": discrete }),
                )
            } else {
                let mut table = ScanSeries::new([
                    "t0",
                    "t1",
                    "source_left",
                    "source_right",
                    "target_left",
                    "target_right",
                ]);
                let wot1d::wasserstein::TransportPlan::QuantileCoupling { source, target } = &plan
                else {
                    unreachable!("optimal_plan returns the quantile coupling")
                };
                let mut cuts: Vec<f64> = source
                    .breakpoints()
                    .iter()
                    .chain(target.breakpoints())
                    .copied()
                    .collect();
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                for w in cuts.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    table.push(vec![
                        real(a),
                        real(b),
                        real(source.right_limit(a)?),
                        real(source.eval(b)?),
                        real(target.right_limit(a)?),
                        real(target.eval(b)?),
                    ]);
                }
                emit(
                    g.format,
                    table,
                    &json!({ "cost": plan.cost(), "plan": plan }),
                )
            }
        }
        Command::Geodesic { mu, nu, t } => {
            let (mu, nu) = (load_measure(mu)?, load_measure(nu)?);
            let mut table = ScanSeries::new(["t", "t0", "t1", "left", "right"]);
            let mut points = Vec::new();
            for &ti in &t.0 {
                let m = geodesic_point(&mu, &nu, ti)?;
                let q = psi_inverse(&m);
                push_pieces(&mut table, &[real(ti)], &q);
                points.push(json!({ "t": ti, "measure": m, "quantile": q }));
            }
            emit(g.format, table, &points)
        }
        Command::EntropyScan { mu0, mu1, grid } => {
            let (mu0, mu1) = (load_measure(mu0)?, load_measure(mu1)?);
            emit_table(g.format, entropy_scan(&mu0, &mu1, &grid.0)?)
        }
        Command::AlexandrovCheck { mu, nu, eta, t } => {
            let (mu, nu, eta) = (load_measure(mu)?, load_measure(nu)?, load_measure(eta)?);
            let mut table = ScanSeries::new(["t", "deficiency"]);
            for &ti in &t.0 {
                table.push(vec![
                    real(ti),
                    real(alexandrov_deficiency(&mu, &nu, &eta, ti)?),
                ]);
            }
            emit_table(g.format, table)
        }
        Command::GhCertify {
            levels,
            quantiles,
            samples,
            beta,
            sample_level,
        } => {
            let draws = match quantiles {
                Some(path) => load_quantiles(path)?,
                None => {
                    let mut rng = RngState::new(g.seed, 0);
                    (0..*samples)
                        .map(|_| sample_quantile(*sample_level, *beta, &mut rng))
                        .collect::<Result<_, _>>()?
                }
            };
            let mut table = ScanSeries::new([
                "level",
                "samples",
                "mesh",
                "epsilon",
                "max_distortion",
                "max_approximation",
                "passed",
            ]);
            let mut reports = Vec::new();
            for &level in &levels.0 {
                if level.fract() != 0.0 || level < 1.0 {
                    return Err(CliError::Usage(format!(
                        "partition level must be a positive integer, got {level}"
                    )));
                }
                let report = certify_epsilon_isometry(&Partition::standard(level as u32)?, &draws)?;
                table.push(vec![
                    ScanValue::Int(level as i64),
                    ScanValue::Int(report.samples as i64),
                    real(report.mesh),
                    real(report.epsilon),
                    real(report.max_distortion),
                    real(report.max_approximation),
                    ScanValue::Flag(report.passed()),
                ]);
                reports.push(
                    json!({ "level": level as u32, "passed": report.passed(), "report": report }),
                );
            }
            emit(g.format, table, &reports)
        }
        Command::Sample { level, beta, count } => {
            let mut rng = RngState::new(g.seed, 0);
            let draws: Vec<QuantileFunction> = (0..*count)
                .map(|_| sample_quantile(*level, *beta, &mut rng))
                .collect::<Result<_, _>>()?;
            let mut table = ScanSeries::new(["draw", "t0", "t1", "left", "right"]);
            for (i, q) in draws.iter().enumerate() {
                push_pieces(&mut table, &[ScanValue::Int(i as i64)], q);
            }
            emit(g.format, table, &draws)
        }
        Command::BetaCheck {
            s,
            beta,
            level,
            draws,
        } => {
            let spec = DirichletSpec::new(*beta, Partition::new(vec![*s])?)?;
            let exact = reg_incomplete_beta_upper(*level, beta * s, beta * (1.0 - s))?;
            let hits = count_exceedances(&spec, *s, &[*level], *draws, g.seed, 0, g.jobs)?;
            let mc = McEstimate::from_count(hits[0], *draws);
            let z = if mc.stderr > 0.0 {
                (mc.estimate - exact) / mc.stderr
            } else {
                0.0
            };
            let mut table =
                ScanSeries::new(["s", "beta", "level", "exact", "estimate", "stderr", "z"]);
            table.push(vec![
                real(*s),
                real(*beta),
                real(*level),
                real(exact),
                real(mc.estimate),
                real(mc.stderr),
                real(z),
            ]);
            emit_table(g.format, table)
        }
        Command::RicciFalsify { beta, t, k, s_grid } => {
            let grid = s_grid
                .as_ref()
                .map_or_else(|| decade_grid(14), |l| l.0.clone());
            let report = falsify_ricci(*k, *t, *beta, &grid)?;
            emit(g.format, report.to_series(), &report)
        }
    }
}
