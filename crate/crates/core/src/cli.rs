//! Command-line front end and the wire formats it speaks.
//!
//! Data goes to the output stream (or `--out`), diagnostics to stderr.
//! Exit codes: 0 success, 1 verification failure or I/O error, 2 invalid
//! input, 3 quadrature or continuation failure, 4 lattice extraction failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveSpec, FormIndex};
use crate::error::Error;
use crate::homology::{enumerate_generators, HomologyWord};
use crate::lattice::{extract_basis, lattice_rank, real_split, LatticeBasis, DEFAULT_RANK_TOL};
use crate::oracle::{crosscheck_report, Report};
use crate::periods::{assemble, PeriodMatrix};
use crate::quad::QuadConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICS: i32 = 3;
pub const EXIT_LATTICE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "gfc",
    version,
    about = "Period lattices of generalized Fermat curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Genus, holomorphic forms and generator count.
    Info(JobArgs),
    /// Full period matrix, one row per homology generator.
    Periods(JobArgs),
    /// Extracted Z-basis of the period lattice.
    Basis(JobArgs),
    /// Cross-check closed forms against contour integration and special values.
    Verify(JobArgs),
}

#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    /// Degree k ≥ 2.
    #[arg(short = 'k')]
    pub k: u32,
    /// Number of branch points n ≥ 2.
    #[arg(short = 'n')]
    pub n: usize,
    /// Extra branch point, "a+bi" or "a,b"; give n − 2 of them.
    #[arg(short = 'l', long = "lambda", value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambdas: Vec<Complex64>,
    /// Relative tolerance for quadrature convergence.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Starting tanh-sinh level.
    #[arg(long)]
    pub level: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write data here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for the verification sampler.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of generators sampled by `verify`.
    #[arg(long, default_value_t = 25)]
    pub sample: usize,
    /// Keep the null-homologous k-th powers as (zero) rows.
    #[arg(long)]
    pub include_powers: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl JobArgs {
    pub fn spec(&self) -> Result<CurveSpec, Error> {
        CurveSpec::new(self.k, self.n, &self.lambdas)
    }

    pub fn quad_config(&self) -> Result<QuadConfig, Error> {
        let mut cfg = QuadConfig::default();
        if let Some(tol) = self.tol {
            cfg.rel_tol = tol;
        }
        if let Some(level) = self.level {
            cfg.level = level;
            cfg.max_level = cfg.max_level.max(level);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `"a+bi"`, `"a-bi"`, `"bi"`, `"a"` or `"a,b"`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let num = |t: &str| -> Result<f64, String> {
        let v: f64 = t
            .parse()
            .map_err(|_| format!("cannot parse {t:?} in {text:?}"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite component in {text:?}"))
        }
    };
    if let Some((re, im)) = s.split_once(',') {
        return Ok(Complex64::new(num(re)?, num(im)?));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(num(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => num(t),
    };
    match split {
        Some(p) => Ok(Complex64::new(num(&body[..p])?, imag(&body[p..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence(_) | Error::StepTooCoarse { .. } => EXIT_NUMERICS,
        Error::NotFullRank { .. } | Error::ReconstructionFailed(_) => EXIT_LATTICE,
        Error::DegenerateInput(_)
        | Error::CollidingBranchPoints { .. }
        | Error::BasePointOnBranchPoint(_)
        | Error::ClearanceUnachievable(_)
        | Error::InvalidArity(_)
        | Error::DegenerateLambda => EXIT_INPUT,
    }
}

/// A generator as it appears on the wire: branch indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GeneratorDoc {
    ConjComm { g: Vec<u32>, j: usize, l: usize },
    Power { i: usize },
}

impl From<&HomologyWord> for GeneratorDoc {
    fn from(w: &HomologyWord) -> Self {
        match w {
            HomologyWord::ConjComm { g, j, l } => Self::ConjComm {
                g: g.clone(),
                j: j + 1,
                l: l + 1,
            },
            HomologyWord::Power { i } => Self::Power { i: i + 1 },
        }
    }
}

impl GeneratorDoc {
    pub fn to_word(&self) -> Result<HomologyWord, String> {
        let dec = |x: usize| {
            x.checked_sub(1)
                .ok_or_else(|| "branch indices are 1-based".to_string())
        };
        Ok(match self {
            Self::ConjComm { g, j, l } => HomologyWord::ConjComm {
                g: g.clone(),
                j: dec(*j)?,
                l: dec(*l)?,
            },
            Self::Power { i } => HomologyWord::Power { i: dec(*i)? },
        })
    }

    /// `conj_comm:g1.g2.…:j:l` or `power:i`.
    pub fn token(&self) -> String {
        match self {
            Self::ConjComm { g, j, l } => format!("conj_comm:{}:{j}:{l}", join_dots(g)),
            Self::Power { i } => format!("power:{i}"),
        }
    }

    pub fn parse_token(token: &str) -> Result<Self, String> {
        let parts: Vec<&str> = token.split(':').collect();
        let int = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| format!("bad index {t:?} in {token:?}"))
        };
        match parts.as_slice() {
            ["power", i] => Ok(Self::Power { i: int(i)? }),
            ["conj_comm", g, j, l] => Ok(Self::ConjComm {
                g: split_dots(g)?,
                j: int(j)?,
                l: int(l)?,
            }),
            _ => Err(format!("unrecognised generator {token:?}")),
        }
    }
}

fn join_dots(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(".")
}

fn split_dots(s: &str) -> Result<Vec<u32>, String> {
    s.split('.')
        .map(|t| t.parse().map_err(|_| format!("bad exponent {t:?}")))
        .collect()
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoDoc {
    pub k: u32,
    pub n: usize,
    pub lambdas: Vec<[f64; 2]>,
    pub genus: usize,
    pub form_count: usize,
    pub forms: Vec<Vec<u32>>,
    pub generator_count: usize,
}

impl InfoDoc {
    pub fn new(spec: &CurveSpec, include_powers: bool) -> Self {
        let forms = spec.forms();
        Self {
            k: spec.k(),
            n: spec.n(),
            lambdas: spec.lambdas().iter().copied().map(pair).collect(),
            genus: spec.genus(),
            form_count: forms.len(),
            forms: forms.iter().map(|f| f.alpha().to_vec()).collect(),
            generator_count: enumerate_generators(spec, include_powers).len(),
        }
    }
}

/// The period matrix on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodsDoc {
    pub k: u32,
    pub n: usize,
    pub lambdas: Vec<[f64; 2]>,
    pub genus: usize,
    pub forms: Vec<Vec<u32>>,
    pub generators: Vec<GeneratorDoc>,
    /// `periods[s][c]` is `[re, im]` of generator `s` against form `c`.
    pub periods: Vec<Vec<[f64; 2]>>,
    pub base_point: [f64; 2],
}

impl From<&PeriodMatrix> for PeriodsDoc {
    fn from(pm: &PeriodMatrix) -> Self {
        Self {
            k: pm.spec.k(),
            n: pm.spec.n(),
            lambdas: pm.spec.lambdas().iter().copied().map(pair).collect(),
            genus: pm.genus(),
            forms: pm.cols.iter().map(|f| f.alpha().to_vec()).collect(),
            generators: pm.rows.iter().map(GeneratorDoc::from).collect(),
            periods: pm
                .entries
                .iter()
                .map(|row| row.iter().copied().map(pair).collect())
                .collect(),
            base_point: pair(pm.base_point()),
        }
    }
}

impl PeriodsDoc {
    pub fn words(&self) -> Result<Vec<HomologyWord>, String> {
        self.generators.iter().map(GeneratorDoc::to_word).collect()
    }

    pub fn form_indices(&self) -> Result<Vec<FormIndex>, Error> {
        self.forms
            .iter()
            .map(|a| FormIndex::new(a.clone(), self.k))
            .collect()
    }

    pub fn entries(&self) -> Vec<Vec<Complex64>> {
        self.periods
            .iter()
            .map(|row| {
                row.iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect()
            })
            .collect()
    }

    /// Header `generator,re:α,im:α,…` then one row per generator.
    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["generator".to_string()];
        for a in &self.forms {
            let tag = join_dots(a);
            header.push(format!("re:{tag}"));
            header.push(format!("im:{tag}"));
        }
        w.write_record(&header)?;
        for (gen, row) in self.generators.iter().zip(&self.periods) {
            let mut rec = vec![gen.token()];
            for [re, im] in row {
                rec.push(fmt_f64(*re));
                rec.push(fmt_f64(*im));
            }
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

/// Generators, form exponents and entries recovered from [`PeriodsDoc::to_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodsCsv {
    pub forms: Vec<Vec<u32>>,
    pub generators: Vec<GeneratorDoc>,
    pub periods: Vec<Vec<[f64; 2]>>,
}

pub fn parse_periods_csv(data: &[u8]) -> Result<PeriodsCsv, String> {
    let mut r = csv::Reader::from_reader(data);
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    let cols: Vec<&str> = header.iter().skip(1).collect();
    if !cols.len().is_multiple_of(2) {
        return Err("re/im columns must come in pairs".into());
    }
    let forms = cols
        .chunks(2)
        .map(
            |p| match (p[0].strip_prefix("re:"), p[1].strip_prefix("im:")) {
                (Some(a), Some(b)) if a == b => split_dots(a),
                _ => Err(format!("bad column pair {:?}", p)),
            },
        )
        .collect::<Result<Vec<_>, _>>()?;
    let mut generators = Vec::new();
    let mut periods = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        generators.push(GeneratorDoc::parse_token(&rec[0])?);
        let vals = rec
            .iter()
            .skip(1)
            .map(|t| t.parse::<f64>().map_err(|_| format!("bad number {t:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        if vals.len() != cols.len() {
            return Err(format!(
                "row has {} values, expected {}",
                vals.len(),
                cols.len()
            ));
        }
        periods.push(vals.chunks(2).map(|p| [p[0], p[1]]).collect());
    }
    Ok(PeriodsCsv {
        forms,
        generators,
        periods,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub k: u32,
    pub n: usize,
    pub lambdas: Vec<[f64; 2]>,
    pub genus: usize,
    pub rank: usize,
    #[serde(flatten)]
    pub basis: LatticeBasis,
}

impl BasisDoc {
    /// One row per basis vector: `basis,x0,x1,…` (real parts, then imaginary).
    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let dim = self.basis.basis.first().map_or(0, Vec::len);
        let mut header = vec!["basis".to_string()];
        header.extend((0..dim).map(|c| format!("x{c}")));
        w.write_record(&header)?;
        for (i, v) in self.basis.basis.iter().enumerate() {
            let mut rec = vec![(i + 1).to_string()];
            rec.extend(v.iter().map(|x| fmt_f64(*x)));
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact JSON whose floats carry exactly 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

fn report_csv(report: &Report) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "passed", "max_deviation", "tolerance"])?;
    for c in &report.checks {
        w.write_record([
            c.name.clone(),
            c.passed.to_string(),
            fmt_f64(c.max_deviation),
            fmt_f64(c.tolerance),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

fn info_csv(info: &InfoDoc) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"])?;
    for (key, val) in [
        ("k", info.k.to_string()),
        ("n", info.n.to_string()),
        ("genus", info.genus.to_string()),
        ("form_count", info.form_count.to_string()),
        ("generator_count", info.generator_count.to_string()),
    ] {
        w.write_record([key, val.as_str()])?;
    }
    for a in &info.forms {
        w.write_record(["form", join_dots(a).as_str()])?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

/// What a command produced: bytes to emit and the exit code.
pub struct Outcome {
    pub data: Vec<u8>,
    pub code: i32,
}

#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Self::Lib(e) => exit_code(e),
            Self::Io(_) => EXIT_FAILED,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Lib(e) => write!(f, "{e}"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Info(a) => cmd_info(a),
        Command::Periods(a) => cmd_periods(a),
        Command::Basis(a) => cmd_basis(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn ok(data: Vec<u8>) -> Result<Outcome, Failure> {
    Ok(Outcome {
        data,
        code: EXIT_OK,
    })
}

pub fn cmd_info(args: &JobArgs) -> Result<Outcome, Failure> {
    let info = InfoDoc::new(&args.spec()?, args.include_powers);
    ok(match args.format {
        Format::Json => to_json(&info)?,
        Format::Csv => info_csv(&info)?,
    })
}

pub fn cmd_periods(args: &JobArgs) -> Result<Outcome, Failure> {
    let spec = args.spec()?;
    let pm = assemble(&spec, &args.quad_config()?, args.include_powers)?;
    let doc = PeriodsDoc::from(&pm);
    ok(match args.format {
        Format::Json => to_json(&doc)?,
        Format::Csv => doc.to_csv()?,
    })
}

pub fn cmd_basis(args: &JobArgs) -> Result<Outcome, Failure> {
    let spec = args.spec()?;
    let pm = assemble(&spec, &args.quad_config()?, false)?;
    let split = real_split(&pm);
    let rank = lattice_rank(&split, DEFAULT_RANK_TOL);
    let basis = extract_basis(&split, &spec)?;
    let doc = BasisDoc {
        k: spec.k(),
        n: spec.n(),
        lambdas: spec.lambdas().iter().copied().map(pair).collect(),
        genus: spec.genus(),
        rank,
        basis,
    };
    ok(match args.format {
        Format::Json => to_json(&doc)?,
        Format::Csv => doc.to_csv()?,
    })
}

pub fn cmd_verify(args: &JobArgs) -> Result<Outcome, Failure> {
    let spec = args.spec()?;
    let report = crosscheck_report(&spec, &args.quad_config()?, args.sample, args.seed)?;
    let data = match args.format {
        Format::Json => to_json(&report)?,
        Format::Csv => report_csv(&report)?,
    };
    let code = if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    Ok(Outcome { data, code })
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("GFC_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("GFC_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(data: &[u8], out: Option<&PathBuf>) -> io::Result<()> {
    match out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(data)?;
            f.flush()
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(data)?;
            stdout.flush()
        }
    }
}

/// Parses `argv`, runs the job and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("gfc: {msg}");
        return EXIT_INPUT;
    }
    let out = match &cli.command {
        Command::Info(a) | Command::Periods(a) | Command::Basis(a) | Command::Verify(a) => {
            a.out.clone()
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.data, out.as_ref()) {
                eprintln!("gfc: cannot write output: {e}");
                return EXIT_FAILED;
            }
            if outcome.code != EXIT_OK {
                eprintln!("gfc: verification failed");
            }
            outcome.code
        }
        Err(f) => {
            eprintln!("gfc: {f}");
            f.code()
        }
    }
}
