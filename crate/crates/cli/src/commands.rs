use std::fs;
use std::io::Read;
use std::path::Path;

use spirality::batch::{bridge, bridge_all, random_flow_cases, Exec, FlowCase};
use spirality::flow::{
    decorate_from_flow, rw_breakdown, validate_flow, FlowManifest, LoopItinerary, SideConvention,
};
use spirality::generate::{gen_matched_slopes, gen_twisted_pair, FlowShape, TwistedPairParams};
use spirality::graph::{
    has_errors, validate, verdict, DecoratedJSJGraph, Diagnostic, Severity, ValidationOptions,
};
use spirality::lattice::fdtc;
use spirality::manifest::{parse_manifest, to_json, Manifest, ParseOptions};
use spirality::Rational;

use crate::report::Report;

/// Why a command did not succeed; the variant fixes the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable input, malformed or incomplete manifest: exit 2.
    Input(String),
    /// Well-formed input that fails a mathematical check: exit 1.
    Domain(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub lenient: bool,
    pub allow_rational_h: bool,
    pub conv: SideConvention,
    pub seed: Option<u64>,
}

pub struct Outcome {
    pub report: Report,
    /// A domain check failed; the report says which.
    pub failed: bool,
    /// Manifest text produced by `gen`.
    pub manifest: Option<String>,
}

impl Outcome {
    fn done(report: Report, failed: bool) -> Self {
        Outcome {
            report,
            failed,
            manifest: None,
        }
    }
}

struct Loaded {
    bytes: Vec<u8>,
    manifest: Manifest,
    warnings: Vec<String>,
}

fn load(path: &Path, s: &Settings) -> Result<Loaded, Failure> {
    let bytes = if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        buf
    } else {
        fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let parsed = parse_manifest(text, ParseOptions { lenient: s.lenient })
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Loaded {
        manifest: parsed.manifest,
        warnings: parsed.warnings,
        bytes,
    })
}

fn start(command: &str, loaded: &Loaded) -> Report {
    let mut r = Report::new(command, &loaded.bytes);
    for w in &loaded.warnings {
        r.warn(w);
    }
    r
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Records diagnostics: errors as results, warnings as warnings. Returns
/// whether any error was seen.
fn record(r: &mut Report, diags: &[Diagnostic]) -> bool {
    for d in diags {
        match d.severity {
            Severity::Error => r.fact("error", d),
            Severity::Warning => r.warn(d),
        }
    }
    has_errors(diags)
}

fn flow_and_loop<'a>(
    m: &'a Manifest,
    command: &str,
) -> Result<(&'a FlowManifest, &'a LoopItinerary), Failure> {
    match (&m.flow, &m.alpha) {
        (Some(f), Some(a)) => Ok((f, a)),
        _ => Err(Failure::Input(format!(
            "{command} needs pieces, tori and a loop"
        ))),
    }
}

pub fn validate_cmd(path: &Path, s: &Settings) -> Result<Outcome, Failure> {
    let loaded = load(path, s)?;
    let m = &loaded.manifest;
    let mut r = start("validate", &loaded);
    let mut bad = false;
    if m.graph.is_none() && m.flow.is_none() && m.alpha.is_none() && m.twists.is_empty() {
        return Err(Failure::Input(
            "manifest has no graph, flow or fdtc data".into(),
        ));
    }
    if let Some(g) = &m.graph {
        r.fact(
            "graph",
            format!("{} vertices, {} edges", g.vertices.len(), g.edges.len()),
        );
        let opts = ValidationOptions {
            allow_rational_h: s.allow_rational_h,
        };
        bad |= record(&mut r, &validate(g, opts));
    }
    match (&m.flow, &m.alpha) {
        (Some(f), alpha) => {
            r.fact(
                "flow",
                format!("{} pieces, {} tori", f.pieces.len(), f.tori.len()),
            );
            if let Some(a) = alpha {
                r.fact("loop", format!("{} crossings", a.len()));
            }
            bad |= record(&mut r, &validate_flow(f, alpha.as_ref(), s.conv));
        }
        (None, Some(_)) => {
            r.fact("error", "loop given without pieces and tori");
            bad = true;
        }
        (None, None) => {}
    }
    for t in &m.twists {
        if !t.e.is_primitive() || t.m == 0 {
            r.fact(
                "error",
                format!(
                    "fdtc {}: reduction curve must be primitive and m positive",
                    t.id
                ),
            );
            bad = true;
        }
    }
    r.fact("valid", yes_no(!bad));
    Ok(Outcome::done(r, bad))
}

fn graph_for_aspiral(
    m: &Manifest,
    s: &Settings,
    r: &mut Report,
) -> Result<Option<DecoratedJSJGraph>, Failure> {
    if let Some(g) = &m.graph {
        let opts = ValidationOptions {
            allow_rational_h: s.allow_rational_h,
        };
        if record(r, &validate(g, opts)) {
            return Ok(None);
        }
        return Ok(Some(g.clone()));
    }
    let (f, a) = flow_and_loop(m, "aspiral")?;
    if record(r, &validate_flow(f, Some(a), s.conv)) {
        return Ok(None);
    }
    let (g, _) = decorate_from_flow(a, f, s.conv).map_err(|e| Failure::Domain(e.to_string()))?;
    r.fact("graph", "decorated from the loop");
    Ok(Some(g))
}

pub fn aspiral_cmd(path: &Path, s: &Settings) -> Result<Outcome, Failure> {
    let loaded = load(path, s)?;
    let mut r = start("aspiral", &loaded);
    let Some(g) = graph_for_aspiral(&loaded.manifest, s, &mut r)? else {
        return Ok(Outcome::done(r, true));
    };
    let v = verdict(&g).map_err(|e| Failure::Domain(e.to_string()))?;
    for b in &v.character.basis {
        r.value(format!("s({})", b.cycle.display(&g)), &b.value);
    }
    for ig in &v.character.internal {
        r.value(
            format!("s(internal @ {})", g.vertices[ig.vertex].id),
            &ig.value,
        );
    }
    if v.components.len() > 1 {
        for c in &v.components {
            r.fact(
                format!("component {{{}}}", c.vertices.join(", ")),
                format!("aspiral {}", yes_no(c.aspiral)),
            );
        }
    }
    let aspiral = match (&v.witness, v.vacuous) {
        (_, true) => "yes (vacuous)".to_string(),
        (None, false) => "yes".to_string(),
        (Some(w), false) => format!("no, witness {} = {}", w.cycle.display(&g), w.value),
    };
    r.fact("aspiral", aspiral);
    r.fact("virtually embedded", yes_no(v.virtually_embedded));
    r.fact(
        "virtually a taut foliation leaf",
        yes_no(v.virtually_taut_leaf),
    );
    Ok(Outcome::done(r, false))
}

pub fn rw_cmd(path: &Path, s: &Settings) -> Result<Outcome, Failure> {
    let loaded = load(path, s)?;
    let mut r = start("rw", &loaded);
    let (f, a) = flow_and_loop(&loaded.manifest, "rw")?;
    if record(&mut r, &validate_flow(f, Some(a), s.conv)) {
        return Ok(Outcome::done(r, true));
    }
    let b = rw_breakdown(a, f, s.conv).map_err(|e| Failure::Domain(e.to_string()))?;
    for (id, v) in &b.sigmas {
        r.value(format!("sigma({id})"), v);
    }
    for (i, (seg, v)) in b.rhos.iter().enumerate() {
        r.value(
            format!(
                "rho(segment {i} in {}: {} -> {})",
                seg.piece, seg.entry, seg.exit
            ),
            v,
        );
    }
    r.value("sigma product", &b.sigma_product);
    r.value("rho product", &b.rho_product);
    r.value("s", &b.value);
    let mut failed = false;
    if let Some(e) = &loaded.manifest.expected {
        r.value("expected", e);
        let ok = e == &b.value;
        r.fact("matches expected", yes_no(ok));
        failed = !ok;
    }
    Ok(Outcome::done(r, failed))
}

pub fn fdtc_cmd(path: &Path, s: &Settings) -> Result<Outcome, Failure> {
    let loaded = load(path, s)?;
    let mut r = start("fdtc", &loaded);
    let twists = loaded.manifest.all_twists();
    if twists.is_empty() {
        return Err(Failure::Input(
            "no fdtc entries and no torus with a reduction curve".into(),
        ));
    }
    let mut failed = false;
    for t in &twists {
        match fdtc(&t.l_plus, &t.l_minus, &t.e, t.m) {
            Ok(v) => r.value(format!("fdtc({})", t.id), v),
            Err(e) => {
                failed = true;
                r.fact(format!("fdtc({})", t.id), format!("error: {e}"));
            }
        }
    }
    Ok(Outcome::done(r, failed))
}

pub enum GenKind {
    TwistedPair(TwistedPairParams),
    Matched { pieces: usize },
}

pub fn gen_cmd(kind: GenKind, s: &Settings) -> Result<Outcome, Failure> {
    let (manifest, label) = match kind {
        GenKind::TwistedPair(p) => {
            let inst = gen_twisted_pair(p).map_err(|e| Failure::Domain(e.to_string()))?;
            let generator = serde_json::json!({
                "kind": "twisted-pair",
                "k": p.k, "p": p.p, "q": p.q,
                "r_minus": p.r_minus, "r_plus": p.r_plus, "d": p.d,
            });
            (
                Manifest {
                    flow: Some(inst.manifest),
                    alpha: Some(inst.elevated_loop),
                    expected: Some(inst.expected),
                    generator: Some(generator),
                    ..Manifest::default()
                },
                "twisted-pair",
            )
        }
        GenKind::Matched { pieces } => {
            let seed = s.seed.unwrap_or(0);
            let (flow, alpha) =
                gen_matched_slopes(pieces, seed).map_err(|e| Failure::Domain(e.to_string()))?;
            (
                Manifest {
                    flow: Some(flow),
                    alpha: Some(alpha),
                    expected: Some(Rational::one()),
                    generator: Some(
                        serde_json::json!({"kind": "matched", "pieces": pieces, "seed": seed}),
                    ),
                    ..Manifest::default()
                },
                "matched",
            )
        }
    };
    let text = to_json(&manifest);
    let mut r = Report::new("gen", text.as_bytes());
    r.fact("kind", label);
    if let Some(e) = &manifest.expected {
        r.value("expected", e);
    }
    Ok(Outcome {
        report: r,
        failed: false,
        manifest: Some(text),
    })
}

pub fn crosscheck_cmd(
    path: Option<&Path>,
    random: Option<usize>,
    s: &Settings,
) -> Result<Outcome, Failure> {
    if let Some(path) = path {
        let loaded = load(path, s)?;
        let mut r = start("crosscheck", &loaded);
        let (f, a) = flow_and_loop(&loaded.manifest, "crosscheck")?;
        if record(&mut r, &validate_flow(f, Some(a), s.conv)) {
            return Ok(Outcome::done(r, true));
        }
        let case = FlowCase {
            manifest: f.clone(),
            alpha: a.clone(),
        };
        let b = bridge(&case, s.conv).map_err(|e| Failure::Domain(e.to_string()))?;
        r.value("rw", &b.rw);
        r.value("holonomy", &b.holonomy);
        r.fact("agree", if b.agrees() { "yes" } else { "MISMATCH" });
        return Ok(Outcome::done(r, !b.agrees()));
    }

    let count = random.unwrap_or(100);
    let seed = s.seed.unwrap_or(0);
    let cases = random_flow_cases(count, seed, FlowShape::default(), Exec::Parallel);
    let results = bridge_all(&cases, s.conv, Exec::Parallel);
    let mut r = Report::new(
        "crosscheck",
        format!("random {count} seed {seed}").as_bytes(),
    );
    r.value("checked", count);
    let mut mismatches = 0;
    for (i, res) in results.iter().enumerate() {
        match res {
            Ok(b) if b.agrees() => {}
            Ok(b) => {
                mismatches += 1;
                r.fact(
                    format!("case {i}"),
                    format!("MISMATCH rw {} holonomy {}", b.rw, b.holonomy),
                );
            }
            Err(e) => {
                mismatches += 1;
                r.fact(format!("case {i}"), format!("error: {e}"));
            }
        }
    }
    r.value("mismatches", mismatches);
    r.fact("all equal", yes_no(mismatches == 0));
    Ok(Outcome::done(r, mismatches > 0))
}
