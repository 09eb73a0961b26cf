//! Example manifests: each entry names a code and a list of expected facts.

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use constacyclic::codes::{self, ConstacyclicCode, DistanceOptions, LcdRoute, Strategy};
use constacyclic::twisted::{TwistedElement, TwistedRing};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::parse::{self, RingDesc};
use crate::{Outcome, Sink};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub entries: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub name: String,
    /// Where the expected values come from.
    pub source: String,
    pub ring: RingDesc,
    pub n: usize,
    pub lambda: Value,
    /// Ascending: entry `i` is the coefficient of `g^i`.
    pub idempotent: Vec<Value>,
    /// Descending rendering, compared against the parsed element.
    pub printed: String,
    pub assertions: Vec<Check>,
}

#[derive(Debug, Deserialize)]
pub struct Check {
    #[serde(flatten)]
    pub kind: Assertion,
    pub note: String,
}

/// `target` is one of `code`, `complement`, `reduced`, `reduced_complement`
/// or `dual:<form>`; it defaults to `code`.
#[derive(Debug, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Assertion {
    Idempotent { expect: bool },
    StarFixed { expect: bool },
    LambdaInvolutive { expect: bool },
    MapFixesLambda { form: String, expect: bool },
    MapFixed { form: String, expect: bool },
    MapImage { form: String, expect: Vec<Value> },
    StarOfMapImage { form: String, expect: Vec<Value> },
    /// `e (m^k e)* = 0`.
    AnnihilatesMapStar { form: String, expect: bool },
    /// `e (m^k e)* = e`.
    CriterionHolds { form: String, expect: bool },
    Generator { #[serde(default)] target: Option<String>, expect: Vec<Value> },
    Rank { #[serde(default)] target: Option<String>, expect: usize },
    Size { #[serde(default)] target: Option<String>, expect: u64 },
    Free { #[serde(default)] target: Option<String>, expect: bool },
    MinDistance {
        #[serde(default)]
        target: Option<String>,
        #[serde(default)]
        strategy: Option<Strategy>,
        expect: usize,
    },
    Lcd {
        #[serde(default)]
        target: Option<String>,
        form: String,
        #[serde(default)]
        route: Option<LcdRoute>,
        expect: bool,
    },
    SelfOrthogonal { #[serde(default)] target: Option<String>, form: String, expect: bool },
    Mdr { #[serde(default)] target: Option<String>, expect: bool },
    Mds { #[serde(default)] target: Option<String>, expect: bool },
    ConstantWeight { #[serde(default)] target: Option<String>, expect: bool },
}

impl Assertion {
    fn name(&self) -> &'static str {
        match self {
            Assertion::Idempotent { .. } => "idempotent",
            Assertion::StarFixed { .. } => "star_fixed",
            Assertion::LambdaInvolutive { .. } => "lambda_involutive",
            Assertion::MapFixesLambda { .. } => "map_fixes_lambda",
            Assertion::MapFixed { .. } => "map_fixed",
            Assertion::MapImage { .. } => "map_image",
            Assertion::StarOfMapImage { .. } => "star_of_map_image",
            Assertion::AnnihilatesMapStar { .. } => "annihilates_map_star",
            Assertion::CriterionHolds { .. } => "criterion_holds",
            Assertion::Generator { .. } => "generator",
            Assertion::Rank { .. } => "rank",
            Assertion::Size { .. } => "size",
            Assertion::Free { .. } => "free",
            Assertion::MinDistance { .. } => "min_distance",
            Assertion::Lcd { .. } => "lcd",
            Assertion::SelfOrthogonal { .. } => "self_orthogonal",
            Assertion::Mdr { .. } => "mdr",
            Assertion::Mds { .. } => "mds",
            Assertion::ConstantWeight { .. } => "constant_weight",
        }
    }
}

pub fn load(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow!(
            "manifest {} does not parse at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })
}

/// The code of an entry and everything derived from it, built on demand.
struct Subject {
    e: TwistedElement,
    code: Option<ConstacyclicCode>,
    derived: HashMap<String, ConstacyclicCode>,
    distances: HashMap<String, codes::MinDistance>,
}

impl Subject {
    fn code(&mut self) -> Result<&ConstacyclicCode> {
        if self.code.is_none() {
            self.code = Some(codes::code_from_idempotent(&self.e)?);
        }
        Ok(self.code.as_ref().unwrap())
    }

    fn target(&mut self, name: &Option<String>) -> Result<ConstacyclicCode> {
        let name = name.as_deref().unwrap_or("code");
        if let Some(c) = self.derived.get(name) {
            return Ok(c.clone());
        }
        let base = self.code()?.clone();
        let c = match name {
            "code" => base,
            "complement" => base.complement(),
            "reduced" => codes::reduce_code(&base),
            "reduced_complement" => codes::reduce_code(&base).complement(),
            other => match other.strip_prefix("dual:") {
                Some(f) => codes::dual(&base, &parse::form(base.ring(), f)?)?,
                None => bail!("unknown target `{other}`"),
            },
        };
        self.derived.insert(name.to_string(), c.clone());
        Ok(c)
    }

    fn distance(&mut self, name: &Option<String>, strategy: Option<Strategy>) -> Result<codes::MinDistance> {
        let key = format!("{}/{strategy:?}", name.as_deref().unwrap_or("code"));
        if let Some(d) = self.distances.get(&key) {
            return Ok(d.clone());
        }
        let c = self.target(name)?;
        let d = codes::min_distance(&c, &DistanceOptions::with_strategy(strategy.unwrap_or(Strategy::Auto)))?;
        self.distances.insert(key, d.clone());
        Ok(d)
    }

    /// Distance with the constant-weight flag, which needs a full enumeration.
    fn enumerated(&mut self, name: &Option<String>) -> Result<codes::MinDistance> {
        self.distance(name, Some(Strategy::FullEnumeration))
    }
}

fn encode_all(e: &TwistedElement) -> Value {
    Value::from(e.coeffs().iter().map(|&c| e.ring().encode(c)).collect::<Vec<_>>())
}

fn expected_element(ctx: &TwistedRing, vs: &[Value]) -> Result<TwistedElement> {
    parse::twisted_element(ctx, parse::values(ctx.ring(), vs)?)
}

/// Returns `(actual, passed)`.
fn evaluate(s: &mut Subject, a: &Assertion) -> Result<(Value, bool)> {
    let ctx = s.e.context().clone();
    let r = ctx.ring().clone();
    let b = |actual: bool, expect: &bool| Ok((Value::from(actual), actual == *expect));
    match a {
        Assertion::Idempotent { expect } => b(s.e.is_idempotent(), expect),
        Assertion::StarFixed { expect } => b(s.e.star()? == s.e, expect),
        Assertion::LambdaInvolutive { expect } => b(ctx.lambda_involutive(), expect),
        Assertion::MapFixesLambda { form, expect } => {
            let f = parse::form(&r, form)?;
            b(f.apply(ctx.lambda()) == ctx.lambda(), expect)
        }
        Assertion::MapFixed { form, expect } => {
            let f = parse::form(&r, form)?;
            b(s.e.map_coeffs(&f)? == s.e, expect)
        }
        Assertion::MapImage { form, expect } => {
            let img = s.e.map_coeffs(&parse::form(&r, form)?)?;
            Ok((encode_all(&img), img == expected_element(&ctx, expect)?))
        }
        Assertion::StarOfMapImage { form, expect } => {
            let img = s.e.map_coeffs(&parse::form(&r, form)?)?.star()?;
            Ok((encode_all(&img), img == expected_element(&ctx, expect)?))
        }
        Assertion::AnnihilatesMapStar { form, expect } => {
            let p = s.e.mul(&s.e.map_coeffs(&parse::form(&r, form)?)?.star()?)?;
            b(p.is_zero(), expect)
        }
        Assertion::CriterionHolds { form, expect } => {
            let p = s.e.mul(&s.e.map_coeffs(&parse::form(&r, form)?)?.star()?)?;
            b(p == s.e, expect)
        }
        Assertion::Generator { target, expect } => {
            let c = s.target(target)?;
            let g = c.generator();
            Ok((encode_all(g), *g == expected_element(g.context(), expect)?))
        }
        Assertion::Rank { target, expect } => {
            let k = s.target(target)?.rank();
            Ok((Value::from(k), k == *expect))
        }
        Assertion::Size { target, expect } => {
            let size = s.target(target)?.size();
            Ok((json!(size), size == Some(*expect)))
        }
        Assertion::Free { target, expect } => b(s.target(target)?.is_free(), expect),
        Assertion::MinDistance { target, strategy, expect } => {
            let d = s.distance(target, *strategy)?;
            Ok((Value::from(d.d), d.d == *expect))
        }
        Assertion::Lcd { target, form, route, expect } => {
            let c = s.target(target)?;
            let dec = codes::is_lcd(&c, &parse::form(c.ring(), form)?)?;
            let route_ok = route.map_or(true, |rt| rt == dec.route);
            Ok((json!({"lcd": dec.lcd, "route": dec.route}), dec.lcd == *expect && route_ok))
        }
        Assertion::SelfOrthogonal { target, form, expect } => {
            let c = s.target(target)?;
            b(codes::is_self_orthogonal(&c, &parse::form(c.ring(), form)?)?, expect)
        }
        Assertion::Mdr { target, expect } | Assertion::Mds { target, expect } => {
            let c = s.target(target)?;
            let d = s.distance(target, None)?;
            let mdr = !c.is_zero() && d.d == c.n() - c.rank() + 1;
            let v = if matches!(a, Assertion::Mds { .. }) { mdr && c.is_free() } else { mdr };
            b(v, expect)
        }
        Assertion::ConstantWeight { target, expect } => {
            let d = s.enumerated(target)?;
            Ok((json!(d.constant_weight), d.constant_weight == Some(*expect)))
        }
    }
}

fn expected_value(a: &Assertion) -> Value {
    match a {
        Assertion::MapImage { expect, .. }
        | Assertion::StarOfMapImage { expect, .. }
        | Assertion::Generator { expect, .. } => Value::from(expect.clone()),
        Assertion::Rank { expect, .. } | Assertion::MinDistance { expect, .. } => Value::from(*expect),
        Assertion::Size { expect, .. } => Value::from(*expect),
        Assertion::Lcd { expect, route, .. } => json!({"lcd": expect, "route": route}),
        Assertion::Idempotent { expect }
        | Assertion::StarFixed { expect }
        | Assertion::LambdaInvolutive { expect }
        | Assertion::MapFixesLambda { expect, .. }
        | Assertion::MapFixed { expect, .. }
        | Assertion::AnnihilatesMapStar { expect, .. }
        | Assertion::CriterionHolds { expect, .. }
        | Assertion::Free { expect, .. }
        | Assertion::SelfOrthogonal { expect, .. }
        | Assertion::Mdr { expect, .. }
        | Assertion::Mds { expect, .. }
        | Assertion::ConstantWeight { expect, .. } => Value::from(*expect),
    }
}

fn target_of(a: &Assertion) -> Option<&str> {
    match a {
        Assertion::Generator { target, .. }
        | Assertion::Rank { target, .. }
        | Assertion::Size { target, .. }
        | Assertion::Free { target, .. }
        | Assertion::MinDistance { target, .. }
        | Assertion::Lcd { target, .. }
        | Assertion::SelfOrthogonal { target, .. }
        | Assertion::Mdr { target, .. }
        | Assertion::Mds { target, .. }
        | Assertion::ConstantWeight { target, .. } => Some(target.as_deref().unwrap_or("code")),
        _ => None,
    }
}

fn subject(entry: &Entry) -> Result<Subject> {
    let r = entry.ring.ring()?;
    let lambda = r.decode(&entry.lambda)?;
    let ctx = TwistedRing::new(&r, entry.n, lambda)?;
    let e = parse::twisted_element(&ctx, parse::values(&r, &entry.idempotent)?)?;
    Ok(Subject {
        e,
        code: None,
        derived: HashMap::new(),
        distances: HashMap::new(),
    })
}

pub fn run(path: &Path, sink: &mut Sink) -> Result<Outcome> {
    let manifest = load(path)?;
    let (mut passed, mut failed) = (0usize, 0usize);
    for entry in &manifest.entries {
        let start = Instant::now();
        let mut s = subject(entry).with_context(|| format!("entry `{}`", entry.name))?;
        let (mut ep, mut ef) = (0usize, 0usize);
        println!("{} [{}]", entry.name, entry.source);

        let rendered = s.e.to_string();
        let printed_ok = rendered == entry.printed;
        report_line(printed_ok, "printed", None, &format!("e = {}", entry.printed), &rendered);
        sink.emit(&json!({
            "type": "assertion", "entry": entry.name, "check": "printed",
            "passed": printed_ok, "expected": entry.printed, "actual": rendered,
            "note": "listed coefficients render to the printed form",
        }))?;
        if printed_ok { ep += 1 } else { ef += 1 }

        for check in &entry.assertions {
            let a = &check.kind;
            let (actual, ok) = match evaluate(&mut s, a) {
                Ok(v) => v,
                Err(e) => (Value::from(format!("error: {e:#}")), false),
            };
            let expected = expected_value(a);
            report_line(ok, a.name(), target_of(a), &check.note, &format!("expected {expected}, got {actual}"));
            sink.emit(&json!({
                "type": "assertion", "entry": entry.name, "check": a.name(),
                "target": target_of(a), "passed": ok, "expected": expected,
                "actual": actual, "note": check.note,
            }))?;
            if ok { ep += 1 } else { ef += 1 }
        }
        let ms = start.elapsed().as_secs_f64() * 1e3;
        println!("  {ep} passed, {ef} failed ({ms:.1} ms)");
        sink.emit(&json!({
            "type": "entry", "entry": entry.name, "passed": ep, "failed": ef, "elapsed_ms": ms,
        }))?;
        passed += ep;
        failed += ef;
    }
    println!(
        "{} entries, {passed} assertions passed, {failed} failed",
        manifest.entries.len()
    );
    sink.emit(&json!({
        "type": "summary", "entries": manifest.entries.len(), "passed": passed, "failed": failed,
    }))?;
    Ok(if failed == 0 { Outcome::Ok } else { Outcome::Assertions })
}

fn report_line(ok: bool, check: &str, target: Option<&str>, note: &str, detail: &str) {
    let tag = if ok { "ok  " } else { "FAIL" };
    let name = match target {
        Some(t) if t != "code" => format!("{check}({t})"),
        _ => check.to_string(),
    };
    if ok {
        println!("  [{tag}] {name:<28} {note}");
    } else {
        println!("  [{tag}] {name:<28} {note}: {detail}");
    }
}
