//! Parameter sweeps over rings, lengths and twists.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use constacyclic::codes::{self, CodeReport, DistanceOptions, Strategy};
use constacyclic::idempotents::IdempotentSystem;
use constacyclic::twisted::TwistedRing;
use constacyclic::{Elem, Error, Ring};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::parse::RingDesc;
use crate::{forms_over, table_header, table_row, Outcome, Sink};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    #[serde(default)]
    pub rings: Vec<RingDesc>,
    #[serde(default)]
    pub n: Lengths,
    #[serde(default)]
    pub lambda: Twists,
    #[serde(default = "default_forms")]
    pub forms: Vec<String>,
    #[serde(default)]
    pub ceilings: Ceilings,
    /// JSON-lines destination when `--json` is not given.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_forms() -> Vec<String> {
    vec!["euclid".into()]
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Lengths {
    List(Vec<usize>),
    Range { from: usize, to: usize },
}

impl Default for Lengths {
    fn default() -> Self {
        Lengths::List(Vec::new())
    }
}

impl Lengths {
    fn values(&self) -> Vec<usize> {
        match self {
            Lengths::List(v) => v.clone(),
            Lengths::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

/// `"all"` units, `"involutive"` units (λ² = 1), or an explicit list.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Twists {
    Named(String),
    List(Vec<Value>),
}

impl Default for Twists {
    fn default() -> Self {
        Twists::Named("all".into())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ceilings {
    #[serde(default = "default_enumeration")]
    pub enumeration: u64,
    #[serde(default = "default_weight")]
    pub weight: usize,
    #[serde(default = "default_factors")]
    pub factors: usize,
}

fn default_enumeration() -> u64 {
    codes::FULL_ENUMERATION_LIMIT
}

fn default_weight() -> usize {
    codes::DEFAULT_WEIGHT_CEILING
}

fn default_factors() -> usize {
    12
}

impl Default for Ceilings {
    fn default() -> Self {
        Ceilings {
            enumeration: default_enumeration(),
            weight: default_weight(),
            factors: default_factors(),
        }
    }
}

enum Twist {
    Unit(Elem),
    Invalid(String),
}

struct Cell {
    ring: Ring,
    n: usize,
    lambda: Twist,
}

struct Skip {
    mask: Option<u64>,
    reason: &'static str,
    detail: String,
}

enum CellOutcome {
    Skipped(Skip),
    Done {
        factors: usize,
        forms: Vec<String>,
        codes: Vec<Result<(u64, CodeReport), Skip>>,
    },
}

fn reason(e: &Error) -> &'static str {
    match e {
        Error::PDividesN { .. } => "PDividesN",
        Error::TooManyFactors { .. } => "TooManyFactors",
        Error::SearchCeilingExceeded { .. } => "SearchCeilingExceeded",
        Error::DegreeBoundExceeded(_) => "DegreeBoundExceeded",
        Error::RingTooLarge { .. } => "RingTooLarge",
        Error::NotAUnit(_) => "NotAUnit",
        _ => "Error",
    }
}

fn skip(mask: Option<u64>, e: &Error) -> Skip {
    Skip {
        mask,
        reason: reason(e),
        detail: e.to_string(),
    }
}

pub fn load(path: &Path) -> Result<Job> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let job: Job = serde_json::from_str(&text).map_err(|e| {
        anyhow::anyhow!(
            "job {} does not parse at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })?;
    let c = &job.ceilings;
    if c.enumeration == 0 || c.weight == 0 || c.factors == 0 {
        bail!("job ceilings must be positive");
    }
    Ok(job)
}

fn grid(job: &Job) -> Result<Vec<Cell>> {
    let lengths = job.n.values();
    let mut cells = Vec::new();
    for desc in &job.rings {
        let ring = desc.ring()?;
        let twists: Vec<Twist> = match &job.lambda {
            Twists::Named(s) if s == "all" || s == "involutive" => {
                let mut us = ring.units()?;
                if s == "involutive" {
                    us.retain(|&u| ring.mul(u, u) == ring.one());
                }
                us.sort();
                us.into_iter().map(Twist::Unit).collect()
            }
            Twists::Named(s) => bail!("unknown lambda selection `{s}`; use all, involutive or a list"),
            Twists::List(vs) => vs
                .iter()
                .map(|v| match ring.decode(v) {
                    Ok(x) => Twist::Unit(x),
                    Err(e) => Twist::Invalid(e.to_string()),
                })
                .collect(),
        };
        for &n in &lengths {
            for t in &twists {
                let lambda = match t {
                    Twist::Unit(x) => Twist::Unit(*x),
                    Twist::Invalid(s) => Twist::Invalid(s.clone()),
                };
                cells.push(Cell { ring: ring.clone(), n, lambda });
            }
        }
    }
    Ok(cells)
}

fn process(cell: &Cell, job: &Job) -> CellOutcome {
    let lambda = match &cell.lambda {
        Twist::Unit(x) => *x,
        Twist::Invalid(s) => {
            return CellOutcome::Skipped(Skip {
                mask: None,
                reason: "InvalidLambda",
                detail: s.clone(),
            })
        }
    };
    let p = cell.ring.characteristic_prime();
    if cell.n % p as usize == 0 {
        return CellOutcome::Skipped(skip(None, &Error::PDividesN { p, n: cell.n }));
    }
    let ctx = match TwistedRing::new(&cell.ring, cell.n, lambda) {
        Ok(c) => c,
        Err(e) => return CellOutcome::Skipped(skip(None, &e)),
    };
    let sys = match IdempotentSystem::bounded(&ctx, job.ceilings.factors) {
        Ok(s) => s,
        Err(e) => return CellOutcome::Skipped(skip(None, &e)),
    };
    let forms = forms_over(&cell.ring, &job.forms.join(",")).0;
    let opts = DistanceOptions {
        strategy: Strategy::Auto,
        weight_ceiling: job.ceilings.weight,
        enumeration_limit: job.ceilings.enumeration,
    };
    let codes = (0..sys.len() as u64)
        .into_par_iter()
        .map(|mask| {
            let e = sys.subset_sum(mask);
            codes::code_from_idempotent(&e)
                .and_then(|c| codes::classify(&c, &forms, &opts))
                .map(|r| (mask, r))
                .map_err(|e| skip(Some(mask), &e))
        })
        .collect();
    CellOutcome::Done {
        factors: sys.primitives.len(),
        forms: forms.iter().map(|f| f.label()).collect(),
        codes,
    }
}

#[derive(Default)]
struct Totals {
    cells: usize,
    processed: usize,
    skipped: usize,
    codes: usize,
    code_skips: usize,
    mdr: usize,
    mds: usize,
    lcd: BTreeMap<String, usize>,
    self_orth: BTreeMap<String, usize>,
}

impl Totals {
    fn add(&mut self, r: &CodeReport) {
        self.codes += 1;
        self.mdr += r.mdr as usize;
        self.mds += r.mds as usize;
        for (k, v) in &r.lcd {
            *self.lcd.entry(k.clone()).or_default() += (*v == Some(true)) as usize;
        }
        for (k, v) in &r.self_orth {
            *self.self_orth.entry(k.clone()).or_default() += (*v == Some(true)) as usize;
        }
    }
}

pub fn run(path: &Path, threads: Option<usize>, sink: &mut Sink) -> Result<Outcome> {
    let job = load(path)?;
    let mut own;
    let sink = match (&sink.0, &job.output) {
        (None, Some(out)) => {
            own = Sink::open(Some(out))?;
            &mut own
        }
        _ => sink,
    };
    let cells = grid(&job)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build()?;
    let outcomes: Vec<CellOutcome> = pool.install(|| cells.par_iter().map(|c| process(c, &job)).collect());

    let mut totals = Totals {
        cells: cells.len(),
        ..Totals::default()
    };
    println!("{}", table_header());
    for (cell, outcome) in cells.iter().zip(&outcomes) {
        let lam = match &cell.lambda {
            Twist::Unit(x) => cell.ring.encode(*x),
            Twist::Invalid(_) => Value::Null,
        };
        let lam_text = match &cell.lambda {
            Twist::Unit(x) => cell.ring.render(*x),
            Twist::Invalid(_) => "?".into(),
        };
        let head = format!("{} n={} lambda={}", cell.ring.label(), cell.n, lam_text);
        let base = json!({"ring": cell.ring.label(), "n": cell.n, "lambda": lam});
        let emit_skip = |sink: &mut Sink, scope: &str, s: &Skip| {
            let mut v = base.clone();
            v["type"] = json!("skip");
            v["scope"] = json!(scope);
            v["mask"] = json!(s.mask);
            v["reason"] = json!(s.reason);
            v["detail"] = json!(s.detail);
            sink.emit(&v)
        };
        match outcome {
            CellOutcome::Skipped(s) => {
                totals.skipped += 1;
                println!("# {head}: skipped ({}: {})", s.reason, s.detail);
                emit_skip(sink, "cell", s)?;
            }
            CellOutcome::Done { factors, forms, codes } => {
                totals.processed += 1;
                println!("# {head}: {factors} primitive idempotent(s), {} code(s)", codes.len());
                let mut v = base.clone();
                v["type"] = json!("cell");
                v["factors"] = json!(factors);
                v["idempotents"] = json!(codes.len());
                v["forms"] = json!(forms);
                sink.emit(&v)?;
                for c in codes {
                    match c {
                        Ok((mask, r)) => {
                            totals.add(r);
                            println!("{}", table_row(&format!("mask={mask}"), r));
                            sink.emit(&json!({"type": "report", "mask": mask, "report": r}))?;
                        }
                        Err(s) => {
                            totals.code_skips += 1;
                            println!("mask={:<15} skipped ({}: {})", s.mask.unwrap_or(0), s.reason, s.detail);
                            emit_skip(sink, "code", s)?;
                        }
                    }
                }
            }
        }
    }
    println!(
        "cells: {} ({} processed, {} skipped); codes: {} classified, {} skipped; mdr {}, mds {}",
        totals.cells, totals.processed, totals.skipped, totals.codes, totals.code_skips, totals.mdr, totals.mds
    );
    for (k, v) in &totals.lcd {
        println!("  lcd[{k}]: {v}");
    }
    for (k, v) in &totals.self_orth {
        println!("  self-orthogonal[{k}]: {v}");
    }
    sink.emit(&json!({
        "type": "summary",
        "cells": totals.cells,
        "processed": totals.processed,
        "skipped": totals.skipped,
        "codes": totals.codes,
        "code_skips": totals.code_skips,
        "mdr": totals.mdr,
        "mds": totals.mds,
        "lcd": totals.lcd,
        "self_orth": totals.self_orth,
    }))?;
    Ok(Outcome::Ok)
}
