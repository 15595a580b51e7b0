//! Run configuration, command dispatch and deterministic reports.
//!
//! Every report is a JSON object with sorted keys holding the tool version,
//! the full configuration, an overall status, caveats and the command result.
//! Floats are rounded to twelve significant digits before printing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::connection::{self, Frame, FramedPoint, HolonomyInstanceJson};
use crate::corpus;
use crate::dynamics::orbit::{veech_orbit_with, OrbitGraph, OrbitOptions};
use crate::dynamics::stream::DEFAULT_DIGIT_CAP;
use crate::envelope::{self, DEFAULT_RANK_TOL};
use crate::error::Error;
use crate::exact::matrix::RatMatrix;
use crate::exact::rational::{self, Subspace, Q};
use crate::forni::{self, Claim, ClaimStatus, ForniCertificate, ForniOptions};
use crate::homology::homology;
use crate::lyapunov::{self, CocycleSamples};
use crate::origami::{stratum, Origami, OrigamiJson};
use crate::subspace::{Space, SubspaceBasis};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_MALFORMED: i32 = 64;

pub const TOOL: &str = "origami-kz";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Stratum,
    Homology,
    Orbit,
    Lyapunov,
    Forni,
    Holonomy,
    Envelope,
    CheckTheorem,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Stratum => "stratum",
            Command::Homology => "homology",
            Command::Orbit => "orbit",
            Command::Lyapunov => "lyapunov",
            Command::Forni => "forni",
            Command::Holonomy => "holonomy",
            Command::Envelope => "envelope",
            Command::CheckTheorem => "check-theorem",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "stratum" => Command::Stratum,
            "homology" => Command::Homology,
            "orbit" => Command::Orbit,
            "lyapunov" => Command::Lyapunov,
            "forni" => Command::Forni,
            "holonomy" => Command::Holonomy,
            "envelope" => Command::Envelope,
            "check-theorem" => Command::CheckTheorem,
            _ => return Err(format!("unknown command `{s}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format `{s}` (expected json, csv or text)")),
        }
    }
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// A file path, or `corpus:NAME` for a bundled origami.
    pub input: Option<String>,
    pub seed: u64,
    pub steps: usize,
    pub blocks: usize,
    pub word_len: usize,
    pub norm_cap: Option<f64>,
    pub element_cap: usize,
    pub tol: f64,
    pub zero_tol: f64,
    pub max_nodes: usize,
    pub max_depth: Option<usize>,
    pub space: Space,
    pub parallelism: usize,
    pub digit_cap: u32,
    pub points: usize,
    pub spread: f64,
    pub max_denominator: i64,
    pub instances: usize,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            seed: 0,
            steps: 100_000,
            blocks: lyapunov::DEFAULT_BLOCKS,
            word_len: forni::DEFAULT_WORD_LEN,
            norm_cap: None,
            element_cap: forni::DEFAULT_ELEMENT_CAP,
            tol: DEFAULT_RANK_TOL,
            zero_tol: lyapunov::DEFAULT_ZERO_TOL,
            max_nodes: 5000,
            max_depth: None,
            space: Space::Absolute,
            parallelism: 1,
            digit_cap: DEFAULT_DIGIT_CAP,
            points: 200,
            spread: 0.3,
            max_denominator: envelope::DEFAULT_MAX_DENOMINATOR,
            instances: 200,
            format: Format::Json,
        }
    }

    /// Sets one parameter from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.trim().parse().map_err(|_| format!("`{key}`: cannot parse `{value}`"))
        }
        let v = value.trim();
        match key.trim() {
            "input" => self.input = Some(v.to_string()),
            "seed" => self.seed = num(key, v)?,
            "steps" => self.steps = num(key, v)?,
            "blocks" => self.blocks = num(key, v)?,
            "word_len" | "word-len" => self.word_len = num(key, v)?,
            "norm_cap" | "norm-cap" => self.norm_cap = if v == "auto" { None } else { Some(num(key, v)?) },
            "element_cap" | "element-cap" => self.element_cap = num(key, v)?,
            "tol" => self.tol = num(key, v)?,
            "zero_tol" | "zero-tol" => self.zero_tol = num(key, v)?,
            "max_nodes" | "max-nodes" => self.max_nodes = num(key, v)?,
            "max_depth" | "max-depth" => self.max_depth = if v == "none" { None } else { Some(num(key, v)?) },
            "space" => {
                self.space = match v {
                    "absolute" => Space::Absolute,
                    "relative" => Space::Relative,
                    _ => return Err(format!("`space`: expected absolute or relative, got `{v}`")),
                }
            }
            "parallelism" => self.parallelism = num(key, v)?,
            "digit_cap" | "digit-cap" => self.digit_cap = num(key, v)?,
            "points" => self.points = num(key, v)?,
            "spread" => self.spread = num(key, v)?,
            "max_denominator" | "max-denominator" => self.max_denominator = num(key, v)?,
            "instances" => self.instances = num(key, v)?,
            "format" => self.format = v.parse()?,
            "command" => self.command = v.parse()?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| format!("config line {}: expected `key = value`", k + 1))?;
            self.set(key, value).map_err(|e| format!("config line {}: {e}", k + 1))?;
        }
        Ok(())
    }

    pub fn echo(&self) -> BTreeMap<&'static str, Value> {
        let mut m = BTreeMap::new();
        m.insert("command", json!(self.command.name()));
        m.insert("input", json!(self.input));
        m.insert("seed", json!(self.seed));
        m.insert("steps", json!(self.steps));
        m.insert("blocks", json!(self.blocks));
        m.insert("word_len", json!(self.word_len));
        m.insert("norm_cap", self.norm_cap.map_or(json!("auto"), |c| json!(c)));
        m.insert("element_cap", json!(self.element_cap));
        m.insert("tol", json!(self.tol));
        m.insert("zero_tol", json!(self.zero_tol));
        m.insert("max_nodes", json!(self.max_nodes));
        m.insert("max_depth", self.max_depth.map_or(json!("none"), |d| json!(d)));
        m.insert("space", json!(self.space));
        m.insert("parallelism", json!(self.parallelism));
        m.insert("digit_cap", json!(self.digit_cap));
        m.insert("points", json!(self.points));
        m.insert("spread", json!(self.spread));
        m.insert("max_denominator", json!(self.max_denominator));
        m.insert("instances", json!(self.instances));
        m.insert("format", json!(self.format.name()));
        m
    }

    fn forni_options(&self) -> ForniOptions {
        ForniOptions { norm_cap: self.norm_cap, word_len: self.word_len, element_cap: self.element_cap, seed: self.seed, ..ForniOptions::default() }
    }

    fn orbit_options(&self) -> OrbitOptions {
        OrbitOptions { max_nodes: self.max_nodes, max_depth: self.max_depth, ..OrbitOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => EXIT_PASS,
            Status::Fail => EXIT_FAIL,
            Status::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }

    fn from_checks(ok: bool, conclusive: bool) -> Self {
        if !ok {
            Status::Fail
        } else if !conclusive {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }
}

/// Output of a run: process exit code and the rendered artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub output: String,
}

struct Outcome {
    status: Status,
    caveats: Vec<String>,
    result: Value,
    csv: Option<String>,
    text: Vec<String>,
}

/// A diagnostic for malformed input.
#[derive(Debug, Clone, PartialEq)]
pub struct Malformed(pub String);

impl From<Error> for Malformed {
    fn from(e: Error) -> Self {
        Malformed(e.to_string())
    }
}

/// Maps library errors to the exit-code scheme: errors about the input are
/// malformed, search limits are inconclusive, the rest are failures.
fn error_outcome(cfg: &RunConfig, e: &Error) -> RunOutcome {
    let code = match e {
        Error::SizeMismatch(..)
        | Error::InvalidPermutation(_)
        | Error::NotConnected { .. }
        | Error::Empty
        | Error::DimensionMismatch(_)
        | Error::PreconditionViolated { .. }
        | Error::InvalidArgument(_)
        | Error::Parse(_)
        | Error::SingularMatrix(_) => EXIT_MALFORMED,
        Error::OrbitTooLarge { .. } | Error::NoConvergence(_) | Error::DegenerateStream(_) => EXIT_INCONCLUSIVE,
        Error::NotInvariant(_) | Error::HypothesisFailure(_) | Error::Internal(_) => EXIT_FAIL,
    };
    let status = match code {
        EXIT_INCONCLUSIVE => "inconclusive",
        EXIT_MALFORMED => "malformed",
        _ => "fail",
    };
    let doc = envelope_doc(cfg, json!(status), &[], json!({ "error": e.to_string() }));
    RunOutcome { exit_code: code, output: render_json(&doc) }
}

fn envelope_doc(cfg: &RunConfig, status: Value, caveats: &[String], result: Value) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "config": cfg.echo(),
        "status": status,
        "caveats": caveats,
        "result": result,
    })
}

/// Rounds every non-integer number to twelve significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = lyapunov::fmt12(x).parse().unwrap_or(x);
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn render_json(doc: &Value) -> String {
    let mut d = doc.clone();
    round_floats(&mut d);
    let mut s = serde_json::to_string_pretty(&d).expect("values serialize");
    s.push('\n');
    s
}

/// Reads the run input: a file path or `corpus:NAME`.
pub fn read_input(cfg: &RunConfig) -> Result<String, Malformed> {
    let input = cfg.input.as_deref().ok_or_else(|| Malformed("--input is required".into()))?;
    if let Some(name) = input.strip_prefix("corpus:") {
        let o = corpus::by_name(name).ok_or_else(|| Malformed(format!("no bundled origami named `{name}`")))?;
        return Ok(serde_json::to_string(&o.to_json()).expect("origami serializes"));
    }
    std::fs::read_to_string(input).map_err(|e| Malformed(format!("{input}: {e}")))
}

fn json_diag(e: &serde_json::Error) -> Malformed {
    Malformed(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn parse_origami(text: &str) -> Result<Origami, Malformed> {
    let j: OrigamiJson = serde_json::from_str(text).map_err(|e| json_diag(&e))?;
    Ok(Origami::from_json(&j)?)
}

/// Runs one command on the given input text.
pub fn run_with_input(cfg: &RunConfig, text: &str) -> RunOutcome {
    let outcome = match cfg.command {
        Command::Holonomy => serde_json::from_str::<HolonomyInstanceJson>(text)
            .map_err(|e| json_diag(&e))
            .and_then(|inst| holonomy_cmd(&inst).map_err(Into::into)),
        _ => match parse_origami(text) {
            Ok(o) => match dispatch(cfg, &o) {
                Ok(out) => Ok(out),
                Err(e) => return error_outcome(cfg, &e),
            },
            Err(m) => Err(m),
        },
    };
    let mut out = match outcome {
        Ok(out) => out,
        Err(Malformed(msg)) => {
            let doc = envelope_doc(cfg, json!("malformed"), &[], json!({ "error": msg }));
            return RunOutcome { exit_code: EXIT_MALFORMED, output: render_json(&doc) };
        }
    };
    let mut seen = std::collections::HashSet::new();
    out.caveats.retain(|c| seen.insert(c.clone()));
    let rendered = match cfg.format {
        Format::Json => render_json(&envelope_doc(cfg, json!(out.status), &out.caveats, out.result)),
        Format::Csv => match out.csv {
            Some(c) => c,
            None => {
                let doc = envelope_doc(cfg, json!("malformed"), &[], json!({ "error": format!("csv output is not available for {}", cfg.command.name()) }));
                return RunOutcome { exit_code: EXIT_MALFORMED, output: render_json(&doc) };
            }
        },
        Format::Text => {
            let mut s = format!("{TOOL} {VERSION} {}\nstatus: {}\n", cfg.command.name(), json!(out.status).as_str().unwrap_or(""));
            for line in &out.text {
                s.push_str(line);
                s.push('\n');
            }
            for c in &out.caveats {
                let _ = writeln!(s, "caveat: {c}");
            }
            s
        }
    };
    RunOutcome { exit_code: out.status.exit_code(), output: rendered }
}

/// Reads the input named by the configuration and runs.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    match read_input(cfg) {
        Ok(text) => run_with_input(cfg, &text),
        Err(Malformed(msg)) => {
            let doc = envelope_doc(cfg, json!("malformed"), &[], json!({ "error": msg }));
            RunOutcome { exit_code: EXIT_MALFORMED, output: render_json(&doc) }
        }
    }
}

fn dispatch(cfg: &RunConfig, o: &Origami) -> crate::Result<Outcome> {
    match cfg.command {
        Command::Stratum => stratum_cmd(o),
        Command::Homology => homology_cmd(o),
        Command::Orbit => orbit_cmd(cfg, o),
        Command::Lyapunov => lyapunov_cmd(cfg, o),
        Command::Forni => forni_cmd(cfg, o),
        Command::Envelope => envelope_cmd(cfg, o),
        Command::CheckTheorem => check_theorem_cmd(cfg, o),
        Command::Holonomy => unreachable!("handled before dispatch"),
    }
}

fn stratum_cmd(o: &Origami) -> crate::Result<Outcome> {
    let s = stratum(o);
    let ok = s.is_consistent();
    let kappa: Vec<String> = s.kappa.iter().map(|k| k.to_string()).collect();
    Ok(Outcome {
        status: Status::from_checks(ok, true),
        caveats: vec![],
        result: json!({ "origami": o.to_json(), "stratum": s, "sum_kappa_is_2g_minus_2": ok }),
        csv: Some(format!("kappa,genus,n_singularities\n{},{},{}\n", kappa.join(" "), s.genus, s.n_singularities)),
        text: vec![format!("kappa: ({})", kappa.join(", ")), format!("genus: {}", s.genus), format!("singularities: {}", s.n_singularities)],
    })
}

fn homology_cmd(o: &Origami) -> crate::Result<Outcome> {
    let hd = homology(o)?;
    let ok = crate::exact::integer::preserves_form(&crate::exact::matrix::IntMatrix::identity(hd.abs_rank), &hd.j)
        && rational::det(&hd.j.to_rational()).is_one();
    Ok(Outcome {
        status: Status::from_checks(ok, true),
        caveats: vec![],
        result: json!({ "homology": hd.to_json(), "form_unimodular": ok }),
        csv: None,
        text: vec![format!("genus: {}", hd.genus), format!("absolute rank: {}", hd.abs_rank), format!("relative rank: {}", hd.rel_rank)],
    })
}

fn build_orbit(cfg: &RunConfig, o: &Origami) -> crate::Result<OrbitGraph> {
    veech_orbit_with(o, &cfg.orbit_options())
}

fn orbit_cmd(cfg: &RunConfig, o: &Origami) -> crate::Result<Outcome> {
    let g = build_orbit(cfg, o)?;
    let hd = g.base_homology();
    let mut checked = 0usize;
    let mut ok = true;
    for e in &g.edges {
        let h = &g.nodes[e.from].homology;
        checked += 1;
        ok &= e.cocycle.is_symplectic(&h.j) && e.cocycle.is_compatible(&h.p);
    }
    for m in &g.monodromy_generators {
        checked += 1;
        ok &= m.is_symplectic(&hd.j) && m.is_compatible(&hd.p);
    }
    let mut caveats = g.caveats.clone();
    caveats.push(crate::dynamics::orbit::GENERATOR_CAVEAT.to_string());
    Ok(Outcome {
        status: Status::from_checks(ok, g.complete),
        caveats,
        result: json!({ "graph": g.to_json()?, "matrices_checked": checked, "all_symplectic_and_compatible": ok }),
        csv: None,
        text: vec![
            format!("nodes: {}", g.nodes.len()),
            format!("generators: {}", g.monodromy_generators.len()),
            format!("matrices checked: {checked}, all symplectic and compatible: {ok}"),
        ],
    })
}

fn lyapunov_cmd(cfg: &RunConfig, o: &Origami) -> crate::Result<Outcome> {
    let g = build_orbit(cfg, o)?;
    let hd = g.base_homology();
    let dim = match cfg.space {
        Space::Absolute => hd.abs_rank,
        Space::Relative => hd.rel_rank,
    };
    let report = if cfg.parallelism > 1 {
        lyapunov::estimate_spectrum_parallel(
            |s| CocycleSamples::new(&g, s, cfg.digit_cap, cfg.space),
            cfg.seed,
            cfg.parallelism,
            dim,
            cfg.steps,
            cfg.blocks,
        )?
    } else {
        let mut s = CocycleSamples::new(&g, cfg.seed, cfg.digit_cap, cfg.space)?;
        lyapunov::estimate_spectrum(&mut s, dim, cfg.steps, cfg.blocks)?
    };
    let sym = lyapunov::spectrum_symmetry_check(&report);
    let zeros = lyapunov::near_zero_count(&report, cfg.zero_tol);
    let mut text = vec![format!("steps: {} blocks: {}", report.steps, report.blocks)];
    for (k, (l, s)) in report.exponents.iter().zip(&report.stderr).enumerate() {
        text.push(format!("lambda_{}: {} ± {}", k + 1, lyapunov::fmt12(*l), lyapunov::fmt12(*s)));
    }
    text.push(format!("near-zero exponents (|λ| ≤ {}): {zeros}", cfg.zero_tol));
    text.push(format!("symmetric spectrum: {}", sym.pass));
    let mut caveats = report.caveats.clone();
    caveats.extend(g.caveats.iter().cloned());
    Ok(Outcome {
        status: Status::from_checks(sym.pass, report.rescaled),
        caveats,
        csv: Some(report.to_csv()),
        result: json!({ "report": report, "symmetry": sym, "near_zero_count": zeros, "dimension": dim }),
        text,
    })
}

fn certificate(cfg: &RunConfig, g: &OrbitGraph) -> crate::Result<ForniCertificate> {
    forni::certify(&g.abs_generators(), &cfg.forni_options())
}

fn forni_cmd(cfg: &RunConfig, o: &Origami) -> crate::Result<Outcome> {
    let g = build_orbit(cfg, o)?;
    let cert = certificate(cfg, &g)?;
    let mut caveats = cert.caveats.clone();
    caveats.push(crate::dynamics::orbit::GENERATOR_CAVEAT.to_string());
    let mut csv = String::from("index,vector\n");
    for (k, v) in cert.integer_basis.iter().enumerate() {
        let _ = writeln!(csv, "{},{}", k + 1, v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
    }
    Ok(Outcome {
        status: Status::from_checks(true, cert.conclusive),
        caveats,
        result: json!({ "certificate": cert.to_json() }),
        csv: Some(csv),
        text: vec![
            format!("dim F: {}", cert.dim()),
            format!("conclusive: {}", cert.conclusive),
            format!("closure order: {}", cert.closure_size.map_or("none".into(), |k| k.to_string())),
        ],
    })
}

fn holonomy_cmd(inst: &HolonomyInstanceJson) -> crate::Result<Outcome> {
    let parsed = inst.parse()?;
    let h = parsed.run()?;
    let ok = h.identity_holds();
    let q = connection::q_strings;
    Ok(Outcome {
        status: Status::from_checks(ok, true),
        caveats: vec![],
        result: json!({
            "composed": q(&h.composed),
            "closed_form": q(&h.closed_form),
            "defect": q(&h.defect),
            "steps": h.steps.iter().map(|s| q(s)).collect::<Vec<_>>(),
            "identity_holds": ok,
        }),
        csv: None,
        text: vec![
            format!("composed: [{}]", q(&h.composed).join(", ")),
            format!("closed form: [{}]", q(&h.closed_form).join(", ")),
            format!("defect: [{}]", q(&h.defect).join(", ")),
            format!("identity holds: {ok}"),
        ],
    })
}

fn envelope_cmd(cfg: &RunConfig, o: &Origami) -> crate::Result<Outcome> {
    let g = build_orbit(cfg, o)?;
    let cert = certificate(cfg, &g)?;
    let cloud = envelope::sample_orbit(o, cfg.points, cfg.seed, cfg.spread)?;
    let fit = envelope::affine_fit(&cloud, cfg.tol)?;
    let rep = envelope::tangent_report_with(&fit, g.base_homology(), &cert, cfg.max_denominator)?;
    let ok = rep.pass && fit.complex_check.pass;
    Ok(Outcome {
        status: Status::from_checks(ok, cert.conclusive),
        caveats: rep.caveats.clone(),
        csv: Some(fit.singular_values_csv()),
        text: vec![
            format!("fitted real dimension: {}", fit.dim()),
            format!("residual: {}", lyapunov::fmt12(fit.residual)),
            format!("complex structure check: {}", fit.complex_check.pass),
            format!("p(T) equals tautological plane: {:?}", rep.equals_tautological_plane),
            format!("pairings with F: {}", if rep.pass { "all zero" } else { "violated" }),
        ],
        result: json!({ "fit": fit.to_json(), "tangent": rep, "points": cloud.points.len() }),
    })
}

fn claim(id: &str, statement: &str, ok: Option<bool>, evidence: Value) -> Claim {
    let status = match ok {
        Some(true) => ClaimStatus::Pass,
        Some(false) => ClaimStatus::Fail,
        None => ClaimStatus::NotComputed,
    };
    Claim::new(id, statement, status, evidence)
}

/// Exact holonomy checks at the base point framed by the tautological classes.
/// Random squares test the closed form; squares with `v ∈ F` and `p(δ)`
/// orthogonal to F (as the tangent is) must return `v` unchanged.
fn holonomy_claim(cfg: &RunConfig, g: &OrbitGraph, cert: &ForniCertificate) -> crate::Result<Claim> {
    let hd = g.base_homology();
    let frame = Frame::from_homology(hd);
    let a = rational::to_q(&hd.taut_a);
    let b0 = rational::to_q(&hd.taut_b);
    let area = frame.pair(&frame.project(&a), &frame.project(&b0));
    if area.is_zero() {
        return Err(Error::Internal("tautological classes pair to zero".into()));
    }
    let b: Vec<Q> = b0.iter().map(|x| x / &area).collect();
    let pt = FramedPoint::new(&frame, a, b)?;

    // δ with p(δ) orthogonal to F, p(a) and p(b)
    let rel = frame.rel_dim();
    let images: Vec<Vec<Q>> = (0..rel).map(|k| frame.p.col(k)).collect();
    let mut targets: Vec<Vec<Q>> = cert.f.basis().to_vec();
    targets.push(pt.pa().to_vec());
    targets.push(pt.pb().to_vec());
    let constraints = RatMatrix::from_fn(targets.len(), rel, |r, c| frame.pair(&targets[r], &images[c]));
    let deltas_f = rational::kernel(&constraints);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut identity, mut f_moved, mut f_nontrivial) = (0usize, 0usize, 0usize);
    let n = cfg.instances;
    for _ in 0..n {
        let delta = connection::random::orthogonal_rel(&mut rng, &pt);
        let v = connection::random::orthogonal_abs(&mut rng, &pt);
        let eps = connection::random::rational(&mut rng, 5, 3);
        if connection::holonomy_square(&pt, &delta, &eps, &v)?.identity_holds() {
            identity += 1;
        }
        if cert.f.dim() > 0 && !deltas_f.is_empty() {
            let v = combine(cert.f.basis(), &connection::random::vector(&mut rng, cert.f.dim()));
            let delta = combine(&deltas_f, &connection::random::vector(&mut rng, deltas_f.len()));
            if !rational::is_zero_vec(&frame.project(&delta)) {
                f_nontrivial += 1;
            }
            let h = connection::holonomy_square(&pt, &delta, &eps, &v)?;
            if !rational::is_zero_vec(&h.defect) || h.leaves(&cert.f) {
                f_moved += 1;
            }
        }
    }
    let mut c = claim(
        "holonomy-square",
        "transport around a square adds ε⟨v,p(δ)⟩p(δ), and is trivial on F when p(δ) is orthogonal to F",
        Some(identity == n && f_moved == 0),
        json!({
            "instances": n,
            "identity_holds": identity,
            "f_instances_with_nonzero_p_delta": f_nontrivial,
            "f_instances_moved": f_moved,
        }),
    );
    if cert.f.dim() > 0 && f_nontrivial == 0 {
        c.caveats.push("every admissible δ has p(δ) = 0 here, so triviality on F holds vacuously".into());
    }
    Ok(c)
}

fn combine(vs: &[Vec<Q>], c: &[Q]) -> Vec<Q> {
    let len = vs.first().map_or(0, |v| v.len());
    let mut out = vec![Q::zero(); len];
    for (v, k) in vs.iter().zip(c) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += k * x;
        }
    }
    out
}

fn complement_claim(g: &OrbitGraph, cert: &ForniCertificate) -> Claim {
    let hd = g.base_homology();
    let gens = g.abs_generators();
    let (ta, tb) = hd.taut_abs();
    let cases = [
        ("forni", SubspaceBasis::from_subspace(Space::Absolute, &cert.f)),
        ("tautological", SubspaceBasis::from_subspace(Space::Absolute, &Subspace::span_int(hd.abs_rank, &[ta, tb]))),
        ("full", SubspaceBasis::from_subspace(Space::Absolute, &Subspace::full(hd.abs_rank))),
    ];
    let mut ok = true;
    let mut evidence = serde_json::Map::new();
    for (name, l) in &cases {
        let entry = match forni::invariant_complement(l, &gens, cert, &hd.j) {
            Ok(c) => {
                ok &= c.invariant && c.direct_sum;
                json!({ "dim": c.subspace.dim(), "invariant": c.invariant, "direct_sum": c.direct_sum })
            }
            Err(e) => {
                ok = false;
                json!({ "error": e.to_string() })
            }
        };
        evidence.insert(name.to_string(), entry);
    }
    claim("invariant-complement", "every tested invariant subspace has an exactly invariant complement", Some(ok), Value::Object(evidence))
}

fn check_theorem_cmd(cfg: &RunConfig, o: &Origami) -> crate::Result<Outcome> {
    let g = build_orbit(cfg, o)?;
    let hd = g.base_homology();
    let cert = certificate(cfg, &g)?;
    let cloud = envelope::sample_orbit(o, cfg.points, cfg.seed, cfg.spread)?;
    let fit = envelope::affine_fit(&cloud, cfg.tol)?;
    let rep = envelope::tangent_report_with(&fit, hd, &cert, cfg.max_denominator)?;

    let mut caveats = rep.caveats.clone();
    caveats.push(crate::dynamics::orbit::GENERATOR_CAVEAT.to_string());
    let (ta, tb) = hd.taut_abs();
    let taut = Subspace::span_int(hd.abs_rank, &[ta, tb]);
    let tangent_abs = if rep.exact {
        let rows: Vec<Vec<Q>> = rep.p_tangent.iter().map(|r| r.iter().map(|s| s.parse().expect("exact entries")).collect()).collect();
        SubspaceBasis::rational(Space::Absolute, hd.abs_rank, rows)?
    } else {
        caveats.push("fitted tangent was not rationalized; exact checks use the tautological plane".into());
        SubspaceBasis::from_subspace(Space::Absolute, &taut)
    };
    let mut claims = if cert.conclusive {
        forni::check_theorem_suite(hd, &cert, &tangent_abs)?
    } else {
        vec![claim("forni-certificate", "a bounded subspace was certified", None, json!({ "caveats": cert.caveats }))]
    };
    claims.push(claim(
        "envelope-complex-structure",
        "the fitted orbit tangent is closed under the complex structure",
        Some(fit.complex_check.pass && fit.residual <= cfg.tol * fit.singular_values.first().copied().unwrap_or(1.0).max(1.0)),
        json!({ "dim": fit.dim(), "residual": fit.residual, "defect": fit.complex_check.defect }),
    ));
    claims.push(claim(
        "tangent-is-tautological",
        "p of the fitted real tangent equals the tautological plane",
        rep.equals_tautological_plane,
        json!({ "p_tangent": rep.p_tangent, "taut_residual": rep.taut_residual }),
    ));
    claims.push(holonomy_claim(cfg, &g, &cert)?);
    if cert.conclusive {
        claims.push(complement_claim(&g, &cert));
    }

    let failed = claims.iter().any(|c| c.status == ClaimStatus::Fail);
    let status = Status::from_checks(!failed, cert.conclusive);
    let mut csv = String::from("id,status\n");
    let mut text = Vec::new();
    for c in &claims {
        let st = json!(c.status);
        let st = st.as_str().unwrap_or("");
        let _ = writeln!(csv, "{},{}", c.id, st);
        text.push(format!("{:<13} {}: {}", st.to_uppercase(), c.id, c.statement));
    }
    Ok(Outcome {
        status,
        caveats,
        csv: Some(csv),
        text,
        result: json!({
            "origami": o.to_json(),
            "stratum": stratum(o),
            "forni": cert.to_json(),
            "claims": claims,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(cmd: Command, input: &str) -> RunConfig {
        let mut c = RunConfig::new(cmd);
        c.input = Some(input.into());
        c.instances = 20;
        c.points = 60;
        c
    }

    #[test]
    fn config_file_overrides() {
        let mut c = RunConfig::new(Command::Lyapunov);
        c.apply_file("# comment\nsteps = 500\nspace=relative\n\nnorm_cap = 7.5\n").unwrap();
        assert_eq!((c.steps, c.space, c.norm_cap), (500, Space::Relative, Some(7.5)));
        let err = c.apply_file("seed = 1\nbogus\n").unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        assert!(c.apply_file("steps = many").unwrap_err().contains("steps"));
    }

    #[test]
    fn rounding_is_twelve_digits() {
        let mut v = json!({"a": 0.1 + 0.2, "b": [1, 2.000000000000004], "c": "x"});
        round_floats(&mut v);
        assert_eq!(v, json!({"a": 0.3, "b": [1, 2.0], "c": "x"}));
    }

    #[test]
    fn torus_check_passes() {
        let out = run(&cfg(Command::CheckTheorem, "corpus:torus"));
        assert_eq!(out.exit_code, EXIT_PASS, "{}", out.output);
    }

    #[test]
    fn wollmilchsau_check_and_determinism() {
        let c = cfg(Command::CheckTheorem, "corpus:wollmilchsau");
        let a = run(&c);
        assert_eq!(a.exit_code, EXIT_PASS, "{}", a.output);
        let v: Value = serde_json::from_str(&a.output).unwrap();
        let claims = v["result"]["claims"].as_array().unwrap();
        let status = |id: &str| claims.iter().find(|c| c["id"] == id).unwrap()["status"].clone();
        assert_eq!(status("tangent-orthogonal-to-forni"), json!("pass"));
        assert_eq!(status("hodge-orthogonality"), json!("not-computed"));
        assert_eq!(run(&c).output, a.output);
    }

    #[test]
    fn malformed_inputs() {
        let c = cfg(Command::Stratum, "unused");
        let bad = run_with_input(&c, r#"{"n": 3, "h": [1, 1, 2], "v": [1, 2, 3]}"#);
        assert_eq!(bad.exit_code, EXIT_MALFORMED);
        assert!(bad.output.contains("field \\\"h\\\""), "{}", bad.output);
        let syntax = run_with_input(&c, "{\n  \"n\": 3,\n  \"h\": [1, 2\n");
        assert_eq!(syntax.exit_code, EXIT_MALFORMED);
        assert!(syntax.output.contains("line "), "{}", syntax.output);
        let disconnected = run_with_input(&c, r#"{"n": 2, "h": [1, 2], "v": [1, 2]}"#);
        assert_eq!(disconnected.exit_code, EXIT_MALFORMED);
    }
}
