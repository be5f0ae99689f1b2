//! Command-line front end: JSON documents in, reports and graded tables out.

pub mod document;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use pinfloer::models::{generate, Generated, ModelOptions, ModelSpec};
use pinfloer::pin2::{
    check_invariant_properties, classify_image_i, cobordism_homology, ijp_homology, invariant_homology, InvariantCase,
    Pin2Complex,
};
use pinfloer::{
    gysin_sequence, ExactnessReport, FilteredComplex, FloerData, Flavor, Grading, Homology, ModelName, Pin2Error,
    Status, Window,
};
use thiserror::Error;

use document::{emit_cobordism, emit_document, parse_cobordism_between, parse_document, DocError, Document};
use table::{Format, Table};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "PINFLOER_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
    #[error("inconclusive window: {0}")]
    Inconclusive(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Input(_) => 2,
            CliError::Inconclusive(_) => 3,
        }
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<Pin2Error> for CliError {
    fn from(e: Pin2Error) -> Self {
        match e {
            Pin2Error::Inconclusive(m) => CliError::Inconclusive(m),
            Pin2Error::NotQhs(_) | Pin2Error::NoInvolution | Pin2Error::NoModuleOp(_) | Pin2Error::Floer(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "pinfloer", version, about = "Pin(2)-equivariant Floer chain complexes over GF(2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct WindowArg {
    /// Degree window `lo..hi`; defaults to the document's window.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Runs every structural and algebraic check.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Graded homology table of one flavor.
    Homology {
        file: PathBuf,
        #[arg(long, value_parser = parse_flavor)]
        flavor: Flavor,
        /// Use the invariant subcomplex.
        #[arg(long)]
        invariant: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Prints alpha, beta and gamma.
    Invariants {
        file: PathBuf,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Exactness of the sequence through bar, check and hat.
    Les {
        file: PathBuf,
        #[arg(long)]
        invariant: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Exactness of the Gysin sequence.
    Gysin {
        file: PathBuf,
        /// Defaults to all three flavors.
        #[arg(long, value_parser = parse_flavor)]
        flavor: Option<Flavor>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Pages of the spectral sequence of the energy filtration.
    Specseq {
        file: PathBuf,
        #[arg(long, value_parser = parse_flavor)]
        flavor: Flavor,
        #[arg(long, default_value_t = 8)]
        pages: usize,
        #[arg(long)]
        invariant: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        window: WindowArg,
    },
    /// Writes a builtin model.
    Model {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Output path; standard output when absent.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long)]
        no_involution: bool,
        #[arg(long)]
        no_module: bool,
        #[arg(long)]
        no_filtration: bool,
    },
    /// Checks cobordism operators and prints the induced map.
    Cobmap {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        #[arg(long)]
        ops: PathBuf,
        #[arg(long, value_parser = parse_flavor)]
        flavor: Flavor,
        #[arg(long)]
        invariant: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        window: WindowArg,
    },
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    s.parse()
}

/// Parses `lo..hi` with integer or `n/d` ends.
pub fn parse_window(s: &str) -> Result<Window, CliError> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| input(format!("window '{s}' is not of the form lo..hi")))?;
    let lo: Grading = lo.parse().map_err(input)?;
    let hi: Grading = hi.parse().map_err(input)?;
    if lo > hi {
        return Err(input(format!("window '{s}' is empty")));
    }
    Ok(Window::new(lo, hi))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Document, CliError> {
    let text = read(path)?;
    parse_document(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Flag first, then the document's window, then the span of its generators.
fn resolve_window(arg: &WindowArg, doc: &Document) -> Result<Window, CliError> {
    let w = match (&arg.window, doc.window) {
        (Some(s), _) => parse_window(s)?,
        (None, Some(w)) => w,
        (None, None) => span(&doc.data),
    };
    let den = doc.data.grading_denominator;
    for end in [w.lo, w.hi] {
        if !end.on_lattice(den) {
            return Err(input(format!("window end {end} is not a multiple of 1/{den}")));
        }
    }
    Ok(w)
}

fn span(data: &FloerData) -> Window {
    let lo = data.manifolds.iter().map(|m| m.base_grading - 1).min();
    let hi = data.manifolds.iter().map(|m| m.base_grading + m.dim() + 1).max();
    match (lo, hi) {
        (Some(lo), Some(hi)) => Window::new(lo, hi),
        _ => Window::new(0, 0),
    }
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Edge => "edge",
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

/// Rows `(degree, dimension, edge)` for every degree carrying generators.
pub fn homology_table(h: &Homology) -> Table {
    let mut t = Table::new(&["degree", "dimension", "edge"]);
    for (d, n, edge) in h.table() {
        t.push(vec![d.to_string(), n.to_string(), yes_no(edge)]);
    }
    t
}

fn exactness_table(report: &ExactnessReport, names: [&str; 3]) -> Table {
    let mut t = Table::new(&["junction", "degree", "status"]);
    for c in &report.checks {
        t.push(vec![names[c.junction % 3].to_string(), c.degree.to_string(), status(c.status).into()]);
    }
    t
}

/// Runs one invocation, writing reports to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn write(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("write failed: {e}")))
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Validate { file, window } => {
            let doc = load(&file)?;
            let w = resolve_window(&window, &doc)?;
            let report = doc.data.validate(w);
            let mut t = Table::new(&["check", "status", "detail"]);
            for f in &report.findings {
                t.push(vec![f.check.clone(), status(f.status).into(), f.detail.clone()]);
            }
            let mut text = t.render(Format::Text);
            for warning in &report.warnings {
                text.push_str(&format!("warning: {warning}\n"));
            }
            let failed = report.failures().len();
            if failed == 0 {
                text.push_str("valid\n");
            } else {
                text.push_str(&format!("invalid: {failed} failing checks\n"));
            }
            write(out, &text)?;
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::Homology {
            file,
            flavor,
            invariant,
            format,
            window,
        } => {
            let doc = load(&file)?;
            let w = resolve_window(&window, &doc)?;
            let h = if invariant {
                invariant_homology(&doc.data, flavor, w)?
            } else if doc.data.manifolds.is_empty() {
                Homology::empty(w)
            } else {
                let c = doc.data.assemble_complex(flavor, w).map_err(input)?;
                c.homology().map_err(|e| CliError::Failure(e.to_string()))?
            };
            write(out, &homology_table(&h).render(format))?;
            Ok(0)
        }
        Command::Invariants { file, window } => {
            let doc = load(&file)?;
            let w = resolve_window(&window, &doc)?;
            let params = classify_image_i(&doc.data, w)?;
            write(out, &format!("{params}\n"))?;
            let case = InvariantCase {
                name: doc.data.metadata.name.clone(),
                params,
                dual: None,
                rokhlin_times8: doc.data.metadata.rokhlin_times8,
            };
            let report = check_invariant_properties(&[case]);
            if !report.passed() {
                return Err(CliError::Failure(format!("property check failed: {}", report.failures().join(", "))));
            }
            Ok(0)
        }
        Command::Les {
            file,
            invariant,
            format,
            window,
        } => {
            let doc = load(&file)?;
            let w = resolve_window(&window, &doc)?;
            let les = ijp_homology(&doc.data, w, invariant)?;
            let report = les.exactness().map_err(|e| CliError::Failure(e.to_string()))?;
            report_exactness(out, &report, ["check", "hat", "bar"], format)
        }
        Command::Gysin {
            file,
            flavor,
            format,
            window,
        } => {
            let doc = load(&file)?;
            let w = resolve_window(&window, &doc)?;
            let flavors = flavor.map_or(Flavor::ALL.to_vec(), |f| vec![f]);
            let mut code = 0;
            for f in flavors {
                write(out, &format!("flavor {f}\n"))?;
                let report = gysin_sequence(&doc.data, f, w)?;
                code = code.max(report_exactness(out, &report, ["total", "image", "invariant"], format)?);
            }
            Ok(code)
        }
        Command::Specseq {
            file,
            flavor,
            pages,
            invariant,
            format,
            window,
        } => {
            let doc = load(&file)?;
            let w = resolve_window(&window, &doc)?;
            specseq(out, &doc.data, flavor, pages, invariant, format, w)
        }
        Command::Model {
            name,
            window,
            emit,
            no_involution,
            no_module,
            no_filtration,
        } => {
            let name: ModelName = name.parse().map_err(input)?;
            let w = parse_window(&window)?;
            let spec = ModelSpec {
                options: ModelOptions {
                    involution: !no_involution,
                    module: !no_module,
                    filtration: !no_filtration,
                },
                ..ModelSpec::new(name, w)
            };
            let text = match generate(&spec).map_err(input)? {
                Generated::Data(d) => emit_document(&d, Some(w)),
                Generated::Cobordism(fx) => emit_cobordism(&fx.name, &fx.ops),
            };
            match emit {
                Some(path) => std::fs::write(&path, text).map_err(|e| input(format!("{}: {e}", path.display())))?,
                None => write(out, &text)?,
            }
            Ok(0)
        }
        Command::Cobmap {
            src,
            tgt,
            ops,
            flavor,
            invariant,
            format,
            window,
        } => {
            let s = load(&src)?;
            let t = load(&tgt)?;
            let ops = parse_cobordism_between(&read(&ops)?, &s.data, &t.data)
                .map_err(|e| input(format!("{}: {e}", ops.display())))?;
            let w = resolve_window(&window, &s)?;
            let c = match cobordism_homology(&s.data, &t.data, &ops, flavor, w, invariant) {
                Ok(c) => c,
                Err(Pin2Error::Complex(e)) => {
                    write(out, &format!("chain map: fail ({e})\n"))?;
                    return Ok(1);
                }
                Err(e) => return Err(e.into()),
            };
            let mut text = String::from("chain map: pass\n");
            let mut tab = Table::new(&["degree", "target", "source_dim", "target_dim", "rank", "edge"]);
            for (d, n, _) in c.src.table() {
                let e = d + c.map.shift;
                let rank = c.map.block(d, &c.src, &c.tgt).rank();
                tab.push(vec![
                    d.to_string(),
                    e.to_string(),
                    n.to_string(),
                    c.tgt.dim(e).to_string(),
                    rank.to_string(),
                    yes_no(!c.map.reliable.contains(&d)),
                ]);
            }
            text.push_str(&tab.render(format));
            write(out, &text)?;
            Ok(0)
        }
    }
}

fn report_exactness(
    out: &mut dyn Write,
    report: &ExactnessReport,
    names: [&str; 3],
    format: Format,
) -> Result<i32, CliError> {
    let mut text = exactness_table(report, names).render(format);
    let fails = report.failures().len();
    if fails == 0 {
        text.push_str(&format!("exact: {} interior junctions checked\n", report.interior_checks()));
    } else {
        text.push_str(&format!("not exact: {fails} failing junctions\n"));
    }
    write(out, &text)?;
    Ok(if fails == 0 { 0 } else { 1 })
}

fn specseq(
    out: &mut dyn Write,
    data: &FloerData,
    flavor: Flavor,
    pages: usize,
    invariant: bool,
    format: Format,
    w: Window,
) -> Result<i32, CliError> {
    let asm = data.assemble().map_err(input)?;
    let levels = asm
        .levels(flavor, w)
        .map_err(input)?
        .ok_or_else(|| input("document has no filtration"))?;
    let fc = if invariant {
        let pc = Pin2Complex::new(&asm, flavor, w)?;
        let lv = pc.invariant_levels(&levels);
        FilteredComplex::new(pc.invariant.complex, lv)
    } else {
        FilteredComplex::new(asm.complex(flavor, w).map_err(input)?, levels)
    }
    .map_err(|e| CliError::Failure(e.to_string()))?;
    let ss = fc.spectral_sequence(pages);
    let mut text = String::new();
    for page in &ss.pages {
        text.push_str(&format!("page {}\n", page.r));
        let mut t = Table::new(&["degree", "level", "dimension", "differential_rank"]);
        for (&(d, p), &n) in &page.dims {
            let rank = page.diff_ranks.get(&(d, p)).copied().unwrap_or(0);
            t.push(vec![d.to_string(), p.to_string(), n.to_string(), rank.to_string()]);
        }
        text.push_str(&t.render(format));
    }
    let nonzero: Vec<String> = ss.nonzero_pages().iter().map(|r| r.to_string()).collect();
    text.push_str(&format!(
        "nonzero differentials on pages: {}\n",
        if nonzero.is_empty() { "none".to_string() } else { nonzero.join(", ") }
    ));
    match ss.collapse_page {
        Some(r) => text.push_str(&format!("collapse page: {r}\n")),
        None => text.push_str(&format!("collapse page: not reached within {pages} pages\n")),
    }
    write(out, &text)?;
    Ok(0)
}
