use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{
    constant_table, scan_chain, stirling_ratio, BetaConfig, CONSTANT_CSV_HEADER,
};
use crate::error::{Error, Result};
use crate::poly::HomogeneousPolynomial;
use crate::verify::{
    derive_seed, exponent_probe, random_polynomial, search_constant_lower_bound, summarize_steps,
    verify_polynomial, write_summary_csv, RecordContext, SearchParams, StepId, StepReport, Tolerances,
};

use super::manifest::{csv_document, json_document, jsonl_document, manifest_comment, RunManifest, Sink};
use super::{ConstantsArgs, Format, ProbeArgs, SearchArgs, Status, StirlingArgs, VerifyArgs};

pub(super) struct Context<'a> {
    pub seed: u64,
    pub format: Format,
    pub sink: &'a Sink,
    pub command: &'static str,
}

#[derive(Serialize)]
struct Parameters<'a, A> {
    #[serde(flatten)]
    args: &'a A,
    format: Format,
}

impl Context<'_> {
    fn manifest<A: Serialize>(&self, args: &A) -> Result<RunManifest> {
        RunManifest::new(
            self.command,
            &Parameters {
                args,
                format: self.format,
            },
            self.seed,
        )
    }

    fn record(&self, budget: u64, beta1: Option<f64>, tolerance: f64) -> RecordContext {
        RecordContext {
            seed: self.seed,
            budget,
            beta1,
            tolerance,
        }
    }

    fn file(&self, stem: &str) -> String {
        match self.format {
            Format::Csv => format!("{stem}.csv"),
            Format::Json => format!("{stem}.jsonl"),
        }
    }
}

fn context_columns(r: &RecordContext) -> [String; 3] {
    [
        r.seed.to_string(),
        r.budget.to_string(),
        r.beta1.map_or(String::new(), |b| b.to_string()),
    ]
}

/// `a..b` and `a..=b` are both inclusive; a bare `a` is `a..=a`.
pub(super) fn parse_range(text: &str) -> Result<RangeInclusive<u32>> {
    let bad = || Error::InvalidParameter(format!("bad m range {text:?}; expected a..b"));
    let parse = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    let range = match text.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let m = parse(text)?;
            m..=m
        }
    };
    if range.is_empty() {
        return Err(bad());
    }
    Ok(range)
}

pub(super) fn constants(ctx: &Context, a: &ConstantsArgs) -> Result<Status> {
    let range = parse_range(&a.m)?;
    let beta = BetaConfig::with_beta1(a.beta1);
    beta.validate()?;
    let table = constant_table(a.max_vars, range.clone(), &beta)?;
    let scan = scan_chain(a.max_vars, *range.end(), &beta)?;
    let manifest = ctx.manifest(a)?;
    let record = ctx.record(0, Some(beta.beta1), 0.0);
    let doc = match ctx.format {
        Format::Csv => csv_document(&manifest, &CONSTANT_CSV_HEADER, table.iter().map(|r| r.csv_record())),
        Format::Json => jsonl_document(&manifest, &record, &table),
    }?;
    ctx.sink.emit(&ctx.file("constants"), &doc)?;
    ctx.sink.emit("constants_summary.json", &json_document(&manifest, &scan)?)?;
    Ok(Status::Passed)
}

#[derive(Serialize)]
struct StirlingRow {
    m: u32,
    #[serde(rename = "M")]
    max_vars: u32,
    ratio: f64,
    limit: f64,
    relative_gap: f64,
}

pub(super) fn stirling(ctx: &Context, a: &StirlingArgs) -> Result<Status> {
    let limit = f64::from(a.max_vars).powf(f64::from(a.max_vars));
    let rows = a
        .m
        .iter()
        .map(|&m| {
            let ratio = stirling_ratio(m, a.max_vars)?;
            Ok(StirlingRow {
                m,
                max_vars: a.max_vars,
                ratio,
                limit,
                relative_gap: (ratio / limit - 1.0).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = ctx.manifest(a)?;
    let doc = match ctx.format {
        Format::Csv => csv_document(
            &manifest,
            &["m", "M", "ratio", "limit", "relative_gap"],
            rows.iter().map(|r| {
                [
                    r.m.to_string(),
                    r.max_vars.to_string(),
                    r.ratio.to_string(),
                    r.limit.to_string(),
                    r.relative_gap.to_string(),
                ]
            }),
        ),
        Format::Json => jsonl_document(&manifest, &ctx.record(0, None, 0.0), &rows),
    }?;
    ctx.sink.emit(&ctx.file("stirling"), &doc)?;
    Ok(Status::Passed)
}

fn load_polynomials(ctx: &Context, a: &VerifyArgs) -> Result<Vec<HomogeneousPolynomial>> {
    if let Some(path) = &a.input {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        return if value.is_array() {
            Ok(serde_json::from_value(value)?)
        } else {
            HomogeneousPolynomial::from_json(&text).map(|p| vec![p])
        };
    }
    let kind = a
        .generate
        .ok_or_else(|| Error::InvalidParameter("either --input or --generate is required".into()))?;
    let (m, n) = match (a.m, a.n) {
        (Some(m), Some(n)) => (m, n),
        _ => return Err(Error::InvalidParameter("--generate needs --m and --n".into())),
    };
    (0..a.count)
        .map(|i| random_polynomial(kind, m, a.max_vars, n, a.density, derive_seed(ctx.seed, i as u64)))
        .collect()
}

fn parse_steps(names: &[String]) -> Result<Vec<StepId>> {
    if names.iter().any(|s| s == "all") {
        return Ok(StepId::ALL.to_vec());
    }
    names
        .iter()
        .map(|s| StepId::parse(s.trim()).ok_or_else(|| Error::InvalidParameter(format!("unknown step {s:?}"))))
        .collect()
}

#[derive(Serialize)]
struct VerifyRow<'a> {
    polynomial: usize,
    #[serde(flatten)]
    report: &'a StepReport,
}

pub(super) fn verify(ctx: &Context, a: &VerifyArgs) -> Result<Status> {
    let steps = parse_steps(&a.steps)?;
    let beta = BetaConfig::with_beta1(a.beta1);
    beta.validate()?;
    let tol = Tolerances {
        exact: a.tolerance,
        optimizer: a.optimizer_tolerance,
    };
    let polys = load_polynomials(ctx, a)?;
    let reports: Vec<Vec<StepReport>> = polys
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let cfg = a.norm.config(derive_seed(ctx.seed, i as u64));
            verify_polynomial(p, a.max_vars, &steps, &cfg, &beta, &tol)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<VerifyRow> = reports
        .iter()
        .enumerate()
        .flat_map(|(i, rs)| rs.iter().map(move |report| VerifyRow { polynomial: i, report }))
        .collect();

    let manifest = ctx.manifest(a)?;
    let record = ctx.record(polys.len() as u64, Some(beta.beta1), tol.exact);
    let doc = match ctx.format {
        Format::Csv => csv_document(
            &manifest,
            &[
                "polynomial", "step", "lhs", "rhs", "slack", "passed", "tolerance", "lower_slack", "seed", "budget",
                "beta1",
            ],
            rows.iter().map(|r| {
                let s = r.report;
                let mut row = vec![
                    r.polynomial.to_string(),
                    s.step.as_str().to_string(),
                    s.lhs.to_string(),
                    s.rhs.to_string(),
                    s.slack.to_string(),
                    s.passed.to_string(),
                    s.tolerance.to_string(),
                    s.lower_slack.map_or(String::new(), |v| v.to_string()),
                ];
                row.extend(context_columns(&record));
                row
            }),
        ),
        Format::Json => jsonl_document(&manifest, &record, &rows),
    }?;
    ctx.sink.emit(&ctx.file("verify"), &doc)?;

    let summary = summarize_steps(reports.iter().flatten());
    let mut doc = manifest_comment(&manifest)?;
    write_summary_csv(&mut doc, &record, &summary)?;
    ctx.sink.emit("verify_summary.csv", &doc)?;

    let failed = rows.iter().filter(|r| !r.report.passed).count();
    eprintln!("verify: {} polynomials, {} checks, {failed} failed", polys.len(), rows.len());
    Ok(if failed == 0 { Status::Passed } else { Status::Failed })
}

pub(super) fn search(ctx: &Context, a: &SearchArgs) -> Result<Status> {
    let params = SearchParams {
        m: a.m,
        max_vars: a.max_vars,
        n: a.n,
        q: a.q,
        budget: a.budget,
        seed: ctx.seed,
    };
    let cfg = a.norm.config(ctx.seed);
    let w = search_constant_lower_bound(&params, &cfg)?;
    let manifest = ctx.manifest(a)?;
    let record = ctx.record(a.budget as u64, None, cfg.step_tolerance);
    let doc = match ctx.format {
        Format::Csv => {
            let mut row = vec![
                a.m.to_string(),
                a.max_vars.to_string(),
                a.n.to_string(),
                w.q.to_string(),
                w.lhs.to_string(),
                w.norm.lower.to_string(),
                w.norm.upper.to_string(),
                w.ratio_lower.to_string(),
                w.ratio_upper.to_string(),
                w.provenance.clone(),
                w.polynomial.to_json(),
            ];
            row.extend(context_columns(&record));
            row.push(record.tolerance.to_string());
            csv_document(
                &manifest,
                &[
                    "m", "M", "n", "q", "lhs", "norm_lower", "norm_upper", "ratio_lower", "ratio_upper", "provenance",
                    "polynomial", "seed", "budget", "beta1", "tolerance",
                ],
                [row],
            )
        }
        Format::Json => jsonl_document(&manifest, &record, [&w]),
    }?;
    ctx.sink.emit(&ctx.file("search"), &doc)?;
    eprintln!("search: ratio in [{}, {}]", w.ratio_lower, w.ratio_upper);
    Ok(Status::Passed)
}

pub(super) fn probe(ctx: &Context, a: &ProbeArgs) -> Result<Status> {
    let cfg = a.norm.config(ctx.seed);
    let report = exponent_probe(a.max_vars, a.q, &a.n, a.m, a.budget, ctx.seed, &cfg)?;
    let manifest = ctx.manifest(a)?;
    let record = ctx.record(a.budget as u64, None, cfg.step_tolerance);
    let doc = match ctx.format {
        Format::Csv => csv_document(
            &manifest,
            &[
                "n", "m", "M", "q", "ratio_lower", "ratio_upper", "provenance", "seed", "budget", "beta1",
                "tolerance",
            ],
            report.rows.iter().map(|r| {
                let mut row = vec![
                    r.n.to_string(),
                    a.m.to_string(),
                    a.max_vars.to_string(),
                    a.q.to_string(),
                    r.ratio_lower.to_string(),
                    r.ratio_upper.to_string(),
                    r.provenance.clone(),
                ];
                row.extend(context_columns(&record));
                row.push(record.tolerance.to_string());
                row
            }),
        ),
        Format::Json => jsonl_document(&manifest, &record, &report.rows),
    }?;
    ctx.sink.emit(&ctx.file("probe"), &doc)?;
    ctx.sink.emit("probe_summary.json", &json_document(&manifest, &report)?)?;
    eprintln!("probe: trend {:?}", report.trend);
    Ok(Status::Passed)
}
