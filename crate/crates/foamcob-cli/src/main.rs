//! `foamcob`: validate, evaluate, normalize and certify ring-decorated
//! foam diagrams from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use foamcob::diagram::{
    diagram_from_json, diagram_to_json, fb_assembly, parse_diagram, planar_invariant, serialize_diagram, DiagramError,
    SlicedDiagram,
};
use foamcob::exactalg::{k1_of, Matrix, RingSpec};
use foamcob::foamcore::random::random_abstract_foam;
use foamcob::foamcore::{
    abstract_invariant, assemble_fb, canonical_strong_cut, gamma0, validate_abstract, AbstractFoam, ZeroFoam,
};
use foamcob::rewrite::random::{random_diagram, Bounds};
use foamcob::rewrite::{check_certificate, normalize, MoveCertificate};
use foamcob::selftest::{run_suite, SUITES};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "foamcob", version, about = "Exact invariants and certified rewriting of decorated foams")]
struct Cli {
    /// Coefficient ring: Q, Z, Fp:<p> or Zmod:<n>. Inputs must use it.
    #[arg(long, global = true)]
    ring: Option<RingSpec>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Replay and check what was produced.
    #[arg(long, global = true)]
    verify: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file, or a directory for `normalize`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Diagram,
    Foam,
}

#[derive(Subcommand)]
enum Cmd {
    /// Report validation diagnostics for a diagram or foam.
    Validate { input: PathBuf },
    /// K₁ invariant of a closed diagram, its class mod ±1 for an abstract
    /// foam, or the K₀ class of a zero-foam.
    Invariant {
        input: PathBuf,
        /// Also print the f_B matrix.
        #[arg(long)]
        fb: bool,
    },
    /// Reduce a closed diagram to one clockwise circle, with a certificate.
    Normalize { input: PathBuf },
    /// Check a certificate between two diagrams.
    Check { from: PathBuf, to: PathBuf, cert: PathBuf },
    /// Generate a random closed diagram or abstract foam.
    Random {
        #[arg(long, value_enum, default_value_t = Kind::Diagram)]
        kind: Kind,
        #[arg(long, default_value_t = 15)]
        max_slices: usize,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        #[arg(long, default_value_t = 6)]
        max_strands: usize,
    },
    /// Run the built-in acceptance suites.
    Selftest {
        /// Suite numbers to run; all when omitted.
        #[arg(long = "suite", value_parser = clap::value_parser!(u8).range(1..=SUITES as i64))]
        suites: Vec<u8>,
    },
}

/// A failure and the exit code it maps to.
struct Fail(u8, String);

impl Fail {
    fn usage(msg: impl ToString) -> Fail {
        Fail(2, msg.to_string())
    }
    fn verify(msg: impl ToString) -> Fail {
        Fail(1, msg.to_string())
    }
}

fn diagram_fail(e: DiagramError) -> Fail {
    match e {
        DiagramError::Invalid(_) | DiagramError::Semantic { .. } | DiagramError::NotClosed => Fail::verify(e),
        _ => Fail::usage(e),
    }
}

enum Input {
    Diagram(SlicedDiagram),
    Foam(AbstractFoam),
    Zero(ZeroFoam),
}

fn read_text(path: &Path) -> Result<String, Fail> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(Fail::usage)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path, want: Option<RingSpec>) -> Result<Input, Fail> {
    let text = read_text(path)?;
    let input = if text.trim_start().starts_with('{') {
        let v: Json = serde_json::from_str(&text).map_err(|e| Fail::usage(format!("json: {e}")))?;
        if v.get("points").is_some() {
            Input::Zero(ZeroFoam::from_json(&v).map_err(Fail::usage)?)
        } else if v.get("slices").is_some() {
            Input::Diagram(diagram_from_json(&v).map_err(diagram_fail)?)
        } else {
            Input::Foam(AbstractFoam::from_json(&v).map_err(Fail::usage)?)
        }
    } else {
        Input::Diagram(parse_diagram(&text).map_err(diagram_fail)?)
    };
    let ring = match &input {
        Input::Diagram(d) => Some(d.ring),
        Input::Foam(f) => Some(f.ring),
        Input::Zero(_) => None,
    };
    if let (Some(w), Some(r)) = (want, ring) {
        if w != r {
            return Err(Fail::usage(format!("{}: ring {r} but --ring {w}", path.display())));
        }
    }
    Ok(input)
}

fn load_diagram(path: &Path, want: Option<RingSpec>) -> Result<SlicedDiagram, Fail> {
    match load(path, want)? {
        Input::Diagram(d) => Ok(d),
        _ => Err(Fail::usage(format!("{}: expected a diagram", path.display()))),
    }
}

/// Writes through a temporary sibling so readers never see a partial file.
fn write_atomic(path: &Path, body: &str) -> Result<(), Fail> {
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, body).and_then(|_| fs::rename(&tmp, path)).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, text: String, json: Json) -> Result<(), Fail> {
    let body = match cli.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&json).expect("json serializes") + "\n",
    };
    match &cli.out {
        Some(p) => write_atomic(p, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn validate(cli: &Cli, input: &Path) -> Result<(), Fail> {
    let diags: Vec<String> = match load(input, cli.ring) {
        Ok(Input::Foam(f)) => validate_abstract(&f).iter().map(|d| d.to_string()).collect(),
        Ok(_) => vec![],
        Err(Fail(1, msg)) => vec![msg],
        Err(e) => return Err(e),
    };
    let text = if diags.is_empty() { "valid\n".to_string() } else { diags.iter().map(|d| d.clone() + "\n").collect() };
    emit(cli, text, json!({ "valid": diags.is_empty(), "diagnostics": diags }))?;
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Fail(1, String::new()))
    }
}

/// One matrix row per line.
fn rows(m: &Matrix) -> String {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

fn invariant(cli: &Cli, input: &Path, fb: bool) -> Result<(), Fail> {
    let (text, json) = match load(input, cli.ring)? {
        Input::Diagram(d) => {
            let k = planar_invariant(&d).map_err(diagram_fail)?;
            let mut text = format!("K1: {k}\n");
            let mut json = json!({ "kind": "K1", "value": k.to_string() });
            if fb {
                let m = fb_assembly(&d).map_err(diagram_fail)?.matrix();
                text += &format!("f_B:\n{}", rows(&m));
                json["f_B"] = m.to_json();
            }
            (text, json)
        }
        Input::Foam(f) => {
            let diags = validate_abstract(&f);
            if !diags.is_empty() {
                let msg: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
                return Err(Fail::verify(msg.join("\n")));
            }
            let q = abstract_invariant(&f).map_err(Fail::verify)?;
            let mut text = format!("K1Quot: {q}\n");
            let mut json = json!({ "kind": "K1Quot", "value": q.representative().to_string() });
            if fb {
                let m = assemble_fb(&f, &canonical_strong_cut(&f)).map_err(Fail::verify)?.matrix();
                text += &format!("f_B:\n{}", rows(&m));
                json["f_B"] = m.to_json();
            }
            (text, json)
        }
        Input::Zero(z) => {
            let k = gamma0(&z);
            (format!("K0: {k}\n"), json!({ "kind": "K0", "value": k.0 }))
        }
    };
    emit(cli, text, json)
}

fn normalize_cmd(cli: &Cli, input: &Path) -> Result<(), Fail> {
    let d = load_diagram(input, cli.ring)?;
    if !d.is_closed() {
        return Err(Fail::verify("diagram is not closed"));
    }
    let out = normalize(&d).map_err(Fail::verify)?;
    let want = planar_invariant(&d).map_err(diagram_fail)?;
    let got = k1_of(&out.monodromy).map_err(Fail::verify)?;
    if got != want {
        return Err(Fail::verify(format!("normal form has determinant {got}, invariant is {want}")));
    }
    if cli.verify {
        let rep = check_certificate(&d, &out.target, &out.cert);
        if !rep.ok {
            return Err(Fail::verify(rep.diagnostics.join("\n")));
        }
    }
    let mut circle = diagram_to_json(&out.target);
    circle["monodromy"] = out.monodromy.to_json();
    let cert = out.cert.to_json();
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).map_err(|e| Fail::usage(format!("{}: {e}", dir.display())))?;
        let pretty = |v: &Json| serde_json::to_string_pretty(v).expect("json serializes") + "\n";
        write_atomic(&dir.join("circle.json"), &pretty(&circle))?;
        write_atomic(&dir.join("certificate.json"), &pretty(&cert))?;
    }
    let text = format!("monodromy: {}\nK1: {got}\nsteps: {}\n", out.monodromy, out.cert.steps.len());
    let json = json!({ "monodromy": out.monodromy.to_json(), "K1": got.to_string(), "circle": circle, "certificate": cert });
    match cli.format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&json).expect("json serializes")),
    }
    Ok(())
}

fn check(cli: &Cli, from: &Path, to: &Path, cert: &Path) -> Result<(), Fail> {
    let d0 = load_diagram(from, cli.ring)?;
    let d1 = load_diagram(to, cli.ring)?;
    let v: Json = serde_json::from_str(&read_text(cert)?).map_err(|e| Fail::usage(format!("json: {e}")))?;
    let c = MoveCertificate::from_json(&v).map_err(Fail::usage)?;
    let rep = check_certificate(&d0, &d1, &c);
    let text = if rep.ok {
        "accepted\n".to_string()
    } else {
        let at = rep.failed_step.map_or(String::new(), |i| format!(" at step {i}"));
        format!("rejected{at}: {}\n", rep.diagnostics.join("; "))
    };
    emit(cli, text, json!({ "accepted": rep.ok, "failed_step": rep.failed_step, "diagnostics": rep.diagnostics }))?;
    if rep.ok {
        Ok(())
    } else {
        Err(Fail(1, String::new()))
    }
}

fn random(cli: &Cli, kind: Kind, bounds: Bounds) -> Result<(), Fail> {
    if bounds.max_slices == 0 || bounds.max_strands == 0 {
        return Err(Fail::usage("bounds must be positive"));
    }
    let ring = cli.ring.unwrap_or(RingSpec::Rationals);
    let (text, json) = match kind {
        Kind::Diagram => {
            let d = random_diagram(cli.seed, &bounds, ring);
            (serialize_diagram(&d), diagram_to_json(&d))
        }
        Kind::Foam => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let f = random_abstract_foam(&mut rng, ring, bounds.max_slices, bounds.max_rank);
            let j = f.to_json();
            (serde_json::to_string_pretty(&j).expect("json serializes") + "\n", j)
        }
    };
    emit(cli, text, json)
}

fn selftest(cli: &Cli, suites: &[u8]) -> Result<(), Fail> {
    let ids: Vec<usize> = if suites.is_empty() { (1..=SUITES).collect() } else { suites.iter().map(|&s| s as usize).collect() };
    let mut reports = vec![];
    for id in ids {
        let r = run_suite(id, cli.seed, cli.ring);
        if cli.format == Format::Text {
            println!("{}", r.line());
        }
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.passed());
    if cli.format == Format::Json {
        let v = json!({ "pass": ok, "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>() });
        println!("{}", serde_json::to_string_pretty(&v).expect("json serializes"));
    }
    if ok {
        Ok(())
    } else {
        Err(Fail(1, String::new()))
    }
}

fn run(cli: &Cli) -> Result<(), Fail> {
    match &cli.cmd {
        Cmd::Validate { input } => validate(cli, input),
        Cmd::Invariant { input, fb } => invariant(cli, input, *fb),
        Cmd::Normalize { input } => normalize_cmd(cli, input),
        Cmd::Check { from, to, cert } => check(cli, from, to, cert),
        Cmd::Random { kind, max_slices, max_rank, max_strands } => random(
            cli,
            *kind,
            Bounds { max_slices: *max_slices, max_rank: *max_rank, max_strands: *max_strands },
        ),
        Cmd::Selftest { suites } => selftest(cli, suites),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
