//! Command implementations: each job writes exactly one output file, prints
//! a one-line summary, and reports its exit status.

use eville_core::families::{DistributionFamily, TailFunction};
use eville_core::linecross::{fixed_k_mean_bound, l1_bound, l1_bound_auto, BoundReport};
use eville_core::mc::{
    estimate_stop_prob, eprocess_check, mu_star_grid_bound, run_replicates, ville_check,
    ReportRow, VerificationReport,
};
use eville_core::oracles::{binary_pn_stop_prob, two_coin_tau_n_prob, ExactProbability};
use eville_core::paths::{level_rule, StoppingRule};
use eville_core::slln::{k_schedule, slln_witness, KSchedule};

use crate::config::JobConfig;
use crate::error::{usage, CliError, EXIT_OK, EXIT_VIOLATION};
use crate::output::{fmt_f64, write_rows, Cell};
use crate::spec::{parse_family, parse_process, parse_rule};

const MC_HEADER: [&str; 10] = [
    "family",
    "process_or_rule",
    "kind",
    "value",
    "stderr",
    "n_paths",
    "horizon",
    "seed",
    "bound",
    "violated",
];

fn mc_row(row: &ReportRow) -> Vec<Cell> {
    vec![
        Cell::Str(row.member.clone()),
        Cell::Str(row.subject.clone()),
        Cell::Str(row.estimate.kind.as_str().to_owned()),
        Cell::F64(row.estimate.value),
        Cell::F64(row.estimate.stderr),
        Cell::U64(row.estimate.n_paths),
        Cell::U64(row.estimate.horizon),
        Cell::U64(row.estimate.seed),
        row.bound.map_or(Cell::Missing, Cell::F64),
        Cell::Bool(row.violated),
    ]
}

fn write_mc_report(config: &JobConfig, report: &VerificationReport) -> Result<(), CliError> {
    let rows: Vec<Vec<Cell>> = report.rows.iter().map(mc_row).collect();
    write_rows(&config.out, config.format, config.seed, &MC_HEADER, &rows)
}

/// Grid supremum of `r(K)` as a tail function; requires closed-form tails
/// for every member of the grid.
fn family_tail(family: &DistributionFamily) -> Result<TailFunction, CliError> {
    for member in family.members() {
        match member.tail() {
            Some(t) if t.is_closed_form() => {}
            _ => {
                return Err(usage(format!(
                    "family member {} has no closed-form tail function",
                    member.label()
                )))
            }
        }
    }
    let members: Vec<_> = family.members().to_vec();
    let support = members
        .iter()
        .map(|m| m.tail().and_then(|t| t.support_bound()))
        .try_fold(0.0_f64, |acc, b| b.map(|b| acc.max(b)));
    Ok(TailFunction::closed_form(support, move |k| {
        members
            .iter()
            .map(|m| m.tail().expect("checked").r(k))
            .fold(0.0, f64::max)
    }))
}

pub fn run(config: &JobConfig) -> Result<i32, CliError> {
    match config.command.as_str() {
        "simulate" => simulate(config),
        "mu-star" => mu_star(config),
        "verify-ville" => verify_ville(config),
        "verify-eprocess" => verify_eprocess(config),
        "bound-l1" => bound_l1(config),
        "bound-l1-auto" => bound_l1_auto(config),
        "bound-mean-k" => bound_mean_k(config),
        "slln-schedule" => slln_schedule(config),
        "slln-run" => slln_run(config),
        "oracle-two-coin" => oracle_two_coin(config),
        "oracle-binary-pn" => oracle_binary_pn(config),
        other => Err(usage(format!("unknown command '{other}'"))),
    }
}

fn simulate(config: &JobConfig) -> Result<i32, CliError> {
    let family = parse_family(config.require_str("family", &config.family)?)?;
    let rule = parse_rule(config.require_str("rule", &config.rule)?)?;
    let horizon = config.horizon_usize()?;
    let n_paths = config.require("paths", config.n_paths)?;
    let mut rows = Vec::new();
    for member in family.members() {
        let est = estimate_stop_prob(member, &rule, horizon, n_paths, config.seed)?;
        rows.push(ReportRow {
            member: member.label().to_owned(),
            subject: rule.description().to_owned(),
            estimate: est,
            bound: None,
            violated: false,
        });
    }
    let report = VerificationReport {
        rows,
        config_echo: String::new(),
    };
    write_mc_report(config, &report)?;
    let max = report
        .rows
        .iter()
        .map(|r| r.estimate.value)
        .fold(0.0, f64::max);
    println!(
        "simulate: {} member(s), P(tau <= {horizon}) up to {} -> {}",
        report.rows.len(),
        fmt_f64(max),
        config.out.display()
    );
    Ok(EXIT_OK)
}

fn mu_star(config: &JobConfig) -> Result<i32, CliError> {
    let family = parse_family(config.require_str("family", &config.family)?)?;
    let rule = parse_rule(config.require_str("rule", &config.rule)?)?;
    let horizon = config.horizon_usize()?;
    let n_paths = config.require("paths", config.n_paths)?;
    let report = mu_star_grid_bound(&family, &rule, horizon, n_paths, config.seed)?;
    write_mc_report(config, &report)?;
    let max_row = report.rows.last().expect("grid-max row");
    println!(
        "mu-star: grid supremum {} +- {} at T={horizon} (lower bound on sup_P P(tau<inf) over \
         the grid; not by itself a bound on the inverse-capital measure) -> {}",
        fmt_f64(max_row.estimate.value),
        fmt_f64(max_row.estimate.stderr),
        config.out.display()
    );
    Ok(EXIT_OK)
}

fn verify_ville(config: &JobConfig) -> Result<i32, CliError> {
    let family = parse_family(config.require_str("family", &config.family)?)?;
    let process = parse_process(config.require_str("process", &config.process)?)?;
    let alpha = config.require("alpha", config.alpha)?;
    let horizon = config.horizon_usize()?;
    let n_paths = config.require("paths", config.n_paths)?;
    let mut rows = Vec::new();
    for member in family.members() {
        let report = ville_check(&process, member, alpha, horizon, n_paths, config.seed)?;
        rows.extend(report.rows);
    }
    let report = VerificationReport {
        rows,
        config_echo: String::new(),
    };
    write_mc_report(config, &report)?;
    summarize_verification("verify-ville", config, &report)
}

fn verify_eprocess(config: &JobConfig) -> Result<i32, CliError> {
    let family = parse_family(config.require_str("family", &config.family)?)?;
    let process = parse_process(config.require_str("process", &config.process)?)?;
    let horizon = config.horizon_usize()?;
    let n_paths = config.require("paths", config.n_paths)?;
    let levels = config.levels.clone().unwrap_or_else(|| vec![5.0, 20.0]);
    let mut times = vec![1, (horizon / 10).max(1), horizon];
    times.sort_unstable();
    times.dedup();
    let mut rules = times
        .into_iter()
        .map(StoppingRule::fixed_time)
        .collect::<eville_core::Result<Vec<_>>>()?;
    for level in levels {
        rules.push(level_rule(process.clone(), level)?);
    }
    let report = eprocess_check(&process, &rules, &family, horizon, n_paths, config.seed)?;
    write_mc_report(config, &report)?;
    summarize_verification("verify-eprocess", config, &report)
}

fn summarize_verification(
    name: &str,
    config: &JobConfig,
    report: &VerificationReport,
) -> Result<i32, CliError> {
    let violations = report.rows.iter().filter(|r| r.violated).count();
    println!(
        "{name}: {} row(s), {} violation(s) -> {}",
        report.rows.len(),
        violations,
        config.out.display()
    );
    Ok(if violations > 0 { EXIT_VIOLATION } else { EXIT_OK })
}

const BOUND_HEADER: [&str; 6] = ["bound", "eps", "gamma", "K", "rK", "vacuous"];

fn write_bound(config: &JobConfig, report: &BoundReport) -> Result<i32, CliError> {
    let row = vec![
        Cell::F64(report.bound_value),
        Cell::F64(report.epsilon),
        Cell::F64(report.gamma),
        Cell::F64(report.k_truncation),
        Cell::F64(report.r_of_k),
        Cell::Bool(report.vacuous),
    ];
    write_rows(
        &config.out,
        config.format,
        config.seed,
        &BOUND_HEADER,
        &[row],
    )?;
    println!(
        "{}: bound {} on the event at threshold {}{} -> {}",
        config.command,
        fmt_f64(report.bound_value),
        fmt_f64(report.event_threshold),
        if report.vacuous { " (vacuous)" } else { "" },
        config.out.display()
    );
    Ok(EXIT_OK)
}

fn resolve_r_of_k(config: &JobConfig, k: f64) -> Result<f64, CliError> {
    match (&config.family, config.r_of_k) {
        (Some(_), Some(_)) => Err(usage("give either --family or --r-of-k, not both")),
        (None, None) => Err(usage("one of --family or --r-of-k is required")),
        (None, Some(r)) => Ok(r),
        (Some(spec), None) => {
            let family = parse_family(spec)?;
            Ok(family_tail(&family)?.r(k))
        }
    }
}

fn bound_l1(config: &JobConfig) -> Result<i32, CliError> {
    let eps = config.require("eps", config.eps)?;
    let gamma = config.require("gamma", config.gamma)?;
    let k = config.require("K", config.k_trunc)?;
    let r = resolve_r_of_k(config, k)?;
    write_bound(config, &l1_bound(eps, gamma, k, r)?)
}

fn bound_l1_auto(config: &JobConfig) -> Result<i32, CliError> {
    let eps = config.require("eps", config.eps)?;
    let gamma = config.require("gamma", config.gamma)?;
    let family = parse_family(config.require_str("family", &config.family)?)?;
    let tail = family_tail(&family)?;
    write_bound(config, &l1_bound_auto(eps, gamma, &tail)?)
}

fn bound_mean_k(config: &JobConfig) -> Result<i32, CliError> {
    let eps = config.require("eps", config.eps)?;
    let k = config.require("k", config.k)?;
    let family = parse_family(config.require_str("family", &config.family)?)?;
    let tail = family_tail(&family)?;
    write_bound(config, &fixed_k_mean_bound(eps, k, &tail)?)
}

fn slln_schedule(config: &JobConfig) -> Result<i32, CliError> {
    let family = parse_family(config.require_str("family", &config.family)?)?;
    let n_max = config.require("n-max", config.n_max)?;
    let schedule = k_schedule(&family, n_max)?;
    let rows: Vec<Vec<Cell>> = schedule
        .entries()
        .iter()
        .map(|e| {
            vec![
                Cell::U64(u64::from(e.n)),
                Cell::U128(e.k_n),
                Cell::Bool(schedule.certified()),
            ]
        })
        .collect();
    write_rows(
        &config.out,
        config.format,
        config.seed,
        &["n", "k_n", "certified"],
        &rows,
    )?;
    println!(
        "slln-schedule: {} certified entr(ies) for grid {} -> {}",
        schedule.entries().len(),
        schedule.family_label(),
        config.out.display()
    );
    Ok(EXIT_OK)
}

fn load_schedule_csv(path: &std::path::Path) -> Result<Vec<(u32, u128)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read schedule {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.eq_ignore_ascii_case("n,k_n") {
            if idx > 1 {
                return Err(usage("schedule header n,k_n must be the first line"));
            }
            continue;
        }
        let (n, k) = line
            .split_once(',')
            .ok_or_else(|| usage(format!("schedule line '{line}' is not n,k_n")))?;
        let n: u32 = n
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad n in schedule line '{line}'")))?;
        let k: u128 = k
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad k_n in schedule line '{line}'")))?;
        entries.push((n, k));
    }
    if entries.is_empty() {
        return Err(usage(format!("schedule {} has no entries", path.display())));
    }
    Ok(entries)
}

fn slln_run(config: &JobConfig) -> Result<i32, CliError> {
    let family = parse_family(config.require_str("family", &config.family)?)?;
    let schedule_path = config
        .schedule
        .as_ref()
        .ok_or_else(|| usage("'slln-run' requires --schedule FILE"))?;
    let horizon = config.horizon_usize()?;
    let n_paths = config.require("paths", config.n_paths)?;
    let entries = load_schedule_csv(schedule_path)?;
    // the file carries no certification; re-derive the flag against this grid
    let schedule = KSchedule::with_certification(entries, &family)?;
    let witness = slln_witness(&schedule)?;
    let mut rows = Vec::new();
    let mut total = 0.0;
    for member in family.members() {
        let terminals: Vec<f64> = run_replicates(n_paths, config.seed, |_, rng| {
            let path = member.sample_path(horizon, rng);
            *witness.values(&path).last().expect("nonempty values")
        })?;
        for (idx, value) in terminals.iter().enumerate() {
            rows.push(vec![
                Cell::Str(member.label().to_owned()),
                Cell::U64(idx as u64),
                Cell::F64(*value),
                Cell::Bool(schedule.certified()),
            ]);
        }
        total += terminals.iter().sum::<f64>() / terminals.len() as f64;
    }
    write_rows(
        &config.out,
        config.format,
        config.seed,
        &["family", "path_index", "terminal_witness", "certified"],
        &rows,
    )?;
    println!(
        "slln-run: certified={}, mean terminal witness {} over {} member(s) -> {}",
        schedule.certified(),
        fmt_f64(total / family.members().len() as f64),
        family.members().len(),
        config.out.display()
    );
    Ok(EXIT_OK)
}

const ORACLE_HEADER: [&str; 3] = ["value", "error_bound", "method"];

fn write_oracle(config: &JobConfig, exact: &ExactProbability) -> Result<i32, CliError> {
    let row = vec![
        Cell::F64(exact.value),
        Cell::F64(exact.error_bound),
        Cell::Str(exact.method.clone()),
    ];
    write_rows(
        &config.out,
        config.format,
        config.seed,
        &ORACLE_HEADER,
        &[row],
    )?;
    println!(
        "{}: {} +- {} ({}) -> {}",
        config.command,
        fmt_f64(exact.value),
        fmt_f64(exact.error_bound),
        exact.method,
        config.out.display()
    );
    Ok(EXIT_OK)
}

fn oracle_two_coin(config: &JobConfig) -> Result<i32, CliError> {
    let n = config.require("n", config.n)?;
    let trunc = config.require("trunc", config.trunc)?;
    let i = config.i.unwrap_or(1);
    write_oracle(config, &two_coin_tau_n_prob(i, n, trunc)?)
}

fn oracle_binary_pn(config: &JobConfig) -> Result<i32, CliError> {
    let m = config.require("m", config.m)?;
    let n = config.require("n", config.n)?;
    write_oracle(config, &binary_pn_stop_prob(m, n)?)
}
