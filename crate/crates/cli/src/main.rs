mod parse;
mod search;
mod verify;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use constacyclic::codes::{self, CodeReport, ConstacyclicCode, DistanceOptions, Strategy};
use constacyclic::idempotents::IdempotentSystem;
use constacyclic::twisted::{GaloisForm, TwistedRing};
use constacyclic::{Error, Ring};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "constacyclic", version, about = "Constacyclic codes over finite chain rings")]
struct Cli {
    /// Also write machine-readable records (one JSON object per line).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every assertion of an example manifest.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Factor x^n - lambda over the residue field and print the primitive idempotents.
    Factor {
        #[command(flatten)]
        context: ContextArgs,
    },
    /// Classify the code generated by one idempotent.
    Classify {
        #[command(flatten)]
        context: ContextArgs,
        /// Ascending coefficients of e: comma-separated values or a JSON array.
        #[arg(long, allow_hyphen_values = true)]
        idempotent: String,
        /// Comma-separated forms: euclid, hermitian, frobenius[:k], semilinear:F:T[:k].
        #[arg(long, default_value = "euclid")]
        forms: String,
        /// Also classify <1 - e>.
        #[arg(long)]
        complement: bool,
        /// Also classify the residue-field reduction.
        #[arg(long)]
        reduce: bool,
        /// Also classify the dual under every additive form.
        #[arg(long)]
        dual: bool,
        #[command(flatten)]
        distance: DistanceArgs,
    },
    /// Sweep a grid of rings, lengths and twists described by a job file.
    Search {
        #[arg(long)]
        job: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(clap::Args)]
struct ContextArgs {
    /// Z_N, F_q, F_q+uF_q, or a JSON ring object.
    #[arg(long)]
    ring: String,
    #[arg(long)]
    n: usize,
    /// The twist, as an integer, packed code or JSON encoding.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
}

impl ContextArgs {
    fn build(&self) -> Result<TwistedRing> {
        let r = parse::ring(&self.ring)?;
        let lambda = parse::element(&r, &self.lambda)?;
        Ok(TwistedRing::new(&r, self.n, lambda)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    FullEnumeration,
    BoundedWeight,
    Reduction,
}

#[derive(clap::Args)]
struct DistanceArgs {
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    #[arg(long)]
    weight_ceiling: Option<usize>,
}

impl DistanceArgs {
    fn options(&self) -> DistanceOptions {
        let strategy = match self.strategy {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::FullEnumeration => Strategy::FullEnumeration,
            StrategyArg::BoundedWeight => Strategy::BoundedWeight,
            StrategyArg::Reduction => Strategy::Reduction,
        };
        let mut o = DistanceOptions::with_strategy(strategy);
        if let Some(w) = self.weight_ceiling {
            o.weight_ceiling = w;
        }
        o
    }
}

/// Optional JSON-lines stream.
pub struct Sink(Option<BufWriter<File>>);

impl Sink {
    fn open(path: Option<&Path>) -> Result<Self> {
        Ok(Sink(match path {
            Some(p) => Some(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => None,
        }))
    }

    pub fn emit(&mut self, v: &Value) -> Result<()> {
        if let Some(w) = &mut self.0 {
            serde_json::to_writer(&mut *w, v)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if let Some(mut w) = self.0 {
            w.flush()?;
        }
        Ok(())
    }
}

/// Exit status 0 or 1; errors exit with 2.
pub enum Outcome {
    Ok,
    Assertions,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Sink::open(cli.json.as_deref()).and_then(|mut sink| {
        let out = run(cli.command, &mut sink)?;
        sink.finish()?;
        Ok(out)
    });
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Assertions) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command, sink: &mut Sink) -> Result<Outcome> {
    match cmd {
        Command::Verify { manifest } => verify::run(&manifest, sink),
        Command::Factor { context } => factor(&context.build()?, sink),
        Command::Classify {
            context,
            idempotent,
            forms,
            complement,
            reduce,
            dual,
            distance,
        } => {
            let ctx = context.build()?;
            let e = parse::twisted_element(&ctx, parse::coefficients(ctx.ring(), &idempotent)?)?;
            let code = match codes::code_from_idempotent(&e) {
                Err(Error::NotIdempotent) => {
                    let residual = e.mul(&e)?.sub(&e)?;
                    anyhow::bail!("generator is not idempotent: e^2 - e = {residual}");
                }
                other => other?,
            };
            let req = ClassifyRequest {
                forms: &forms,
                complement,
                reduce,
                dual,
                opts: distance.options(),
            };
            classify(&code, &req, sink)
        }
        Command::Search { job, threads } => search::run(&job, threads, sink),
    }
}

fn factor(ctx: &TwistedRing, sink: &mut Sink) -> Result<Outcome> {
    let sys = IdempotentSystem::new(ctx)?;
    let res = ctx.ring().residue_ring();
    let sp = &sys.splitting;
    println!(
        "x^{} - {} over {}: {} irreducible factor(s), splitting field of degree {}",
        ctx.n(),
        ctx.ring().render(ctx.lambda()),
        res.label(),
        sp.factors.len(),
        sp.extension_degree
    );
    let mut rows = Vec::new();
    for (f, e) in sp.factors.iter().zip(&sys.primitives) {
        let poly = render_poly(&res, f);
        println!("  {poly:<32} e = {e}");
        rows.push(json!({
            "factor": f.iter().map(|&c| res.encode(res.elem(c).unwrap())).collect::<Vec<_>>(),
            "factor_text": poly,
            "idempotent": e.coeffs().iter().map(|&c| ctx.ring().encode(c)).collect::<Vec<_>>(),
            "idempotent_text": e.to_string(),
        }));
    }
    let mut sum = ctx.zero();
    let mut orthogonal = true;
    for (i, a) in sys.primitives.iter().enumerate() {
        sum = sum.add(a)?;
        orthogonal &= a.is_idempotent();
        for b in &sys.primitives[i + 1..] {
            orthogonal &= a.mul(b)?.is_zero();
        }
    }
    let ok = sum == ctx.one() && orthogonal;
    println!(
        "check: sum of idempotents = 1 and pairwise products = 0: {}",
        if ok { "ok" } else { "FAILED" }
    );
    sink.emit(&json!({
        "type": "factorization",
        "ring": ctx.ring().spec(),
        "n": ctx.n(),
        "lambda": ctx.ring().encode(ctx.lambda()),
        "extension_degree": sp.extension_degree,
        "factors": rows,
        "check": ok,
    }))?;
    Ok(if ok { Outcome::Ok } else { Outcome::Assertions })
}

/// Ascending coefficients over a field, rendered as a polynomial in `x`.
fn render_poly(field: &Ring, coeffs: &[u64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let mut s = field.render(field.elem(c).unwrap());
            if s.contains('+') {
                s = format!("({s})");
            }
            match (i, c == 1) {
                (0, _) => s,
                (1, true) => "x".into(),
                (1, false) => format!("{s}*x"),
                (_, true) => format!("x^{i}"),
                (_, false) => format!("{s}*x^{i}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

struct ClassifyRequest<'a> {
    forms: &'a str,
    complement: bool,
    reduce: bool,
    dual: bool,
    opts: DistanceOptions,
}

/// Forms from the list that make sense over `r`; the rest are reported.
fn forms_over(r: &Ring, list: &str) -> (Vec<GaloisForm>, Vec<String>) {
    let mut ok = Vec::new();
    let mut dropped = Vec::new();
    for s in list.split(',').filter(|s| !s.trim().is_empty()) {
        match parse::form(r, s) {
            Ok(f) => ok.push(f),
            Err(_) => dropped.push(s.trim().to_string()),
        }
    }
    (ok, dropped)
}

fn classify(code: &ConstacyclicCode, req: &ClassifyRequest, sink: &mut Sink) -> Result<Outcome> {
    let forms = parse::forms(code.ring(), req.forms)?;
    let mut targets: Vec<(String, ConstacyclicCode, Vec<GaloisForm>)> =
        vec![("code".into(), code.clone(), forms.clone())];
    if req.complement {
        targets.push(("complement".into(), code.complement(), forms.clone()));
    }
    if req.reduce {
        let (rforms, dropped) = forms_over(&code.ring().residue_ring(), req.forms);
        if !dropped.is_empty() {
            println!("note: forms {dropped:?} do not apply over the residue field");
        }
        let red = codes::reduce_code(code);
        if req.complement {
            targets.push(("reduced_complement".into(), red.complement(), rforms.clone()));
        }
        targets.insert(1, ("reduced".into(), red, rforms));
    }
    if req.dual {
        for f in &forms {
            match codes::dual(code, f) {
                Ok(d) => targets.push((format!("dual:{}", f.label()), d, forms.clone())),
                Err(e) => println!("note: no dual under {}: {e}", f.label()),
            }
        }
    }
    println!("{}", table_header());
    for (label, c, fs) in &targets {
        let rep = codes::classify(c, fs, &req.opts)?;
        println!("{}", table_row(label, &rep));
        println!("{:<20} e = {}", "", c.generator());
        sink.emit(&json!({"type": "report", "target": label, "report": rep}))?;
    }
    Ok(Outcome::Ok)
}

pub fn table_header() -> String {
    format!(
        "{:<20} {:<14} {:<5} {:<8} {:<24} {:<24} {:<5} {:<5} {}",
        "code", "[n,k,d]", "free", "method", "lcd", "self-orth", "mdr", "mds", "const-wt"
    )
}

fn flags(m: &std::collections::BTreeMap<String, Option<bool>>) -> String {
    if m.is_empty() {
        return "-".into();
    }
    m.iter()
        .map(|(k, v)| {
            let v = match v {
                Some(true) => "y",
                Some(false) => "n",
                None => "?",
            };
            format!("{k}={v}")
        })
        .collect::<Vec<_>>()
        .join(",")
}

pub fn table_row(label: &str, r: &CodeReport) -> String {
    let method = serde_json::to_value(r.d_method).unwrap();
    format!(
        "{:<20} {:<14} {:<5} {:<8} {:<24} {:<24} {:<5} {:<5} {}",
        label,
        format!("[{},{},{}]", r.n, r.k_rank, r.d),
        r.free,
        method.as_str().unwrap_or("").split('_').next().unwrap_or(""),
        flags(&r.lcd),
        flags(&r.self_orth),
        r.mdr,
        r.mds,
        r.constant_weight.map_or("-".to_string(), |b| b.to_string()),
    )
}
