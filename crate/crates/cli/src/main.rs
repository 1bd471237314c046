mod report;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use riffle_core::algebra::{check_spectrum, SpectrumCheck};
use riffle_core::arrangement::{
    bhr_spectrum, bhr_transition_matrix, face_weights, faces, measure_h, measure_h_definition2, verify_bhr_spectrum,
    Arrangement, IntersectionLattice,
};
use riffle_core::cellini::{measure_xk, FROZEN_CONVENTION};
use riffle_core::coxeter::{build_group, CoxeterGroup, CoxeterType};
use riffle_core::descent::{measure_m, measure_m_symbolic, spectrum_m};
use riffle_core::shuffle::{exact_model_distribution, monte_carlo_with_index, DeckEncoding, DeckIndex, Model};
use riffle_core::verify::{self, default_scope, Task, CHARPOLY_LIMIT};
use riffle_core::{format_rational, parse_rational, Error};

use report::{header, json_output, measure_csv, measure_table, opt, params, Format};

/// Exact riffle-shuffle measures on finite Coxeter groups.
#[derive(Parser)]
#[command(name = "riffle", version)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "RIFFLE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct GroupSpec {
    /// Type label: A, B, C, D, G2, F4, H3, H4, I2(m); a rank may be appended (B3).
    #[arg(long = "type")]
    ty: String,
    /// Rank (or m for I2) when not part of the label.
    #[arg(long)]
    rank: Option<usize>,
}

impl GroupSpec {
    fn resolve(&self) -> Result<CoxeterType, Error> {
        CoxeterType::parse(&self.ty, self.rank)
    }
}

#[derive(Args, Clone, Debug)]
struct OptionalGroupSpec {
    #[arg(long = "type")]
    ty: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeasureKind {
    /// M_{W,x} from the descent algebra.
    Descent,
    /// H_{W,x} from the reflection arrangement.
    Hyperplane,
    /// Cellini's x_k.
    Cellini,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpectrumKind {
    Descent,
    Walk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Agree,
    Specialize,
    Identities,
    Lemmas,
    Endpoints,
    Convolution,
    Spectrum,
    Primes,
    Cellini,
    Shuffles,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ModelKind {
    Gsr,
    #[value(name = "typec")]
    #[serde(rename = "typec")]
    TypeC,
    X2,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EncodingArg {
    PositionToCard,
    CardToPosition,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CompareTarget {
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Group data: order, exponents, roots, parabolic classes.
    Group {
        #[command(flatten)]
        group: GroupSpec,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// A measure evaluated at x (or symbolically), or Cellini's x_k.
    Measure {
        #[arg(value_enum)]
        kind: MeasureKind,
        #[command(flatten)]
        group: GroupSpec,
        /// Parameter as "p/q", an integer or a decimal.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Output polynomial numerators over x^n instead of values.
        #[arg(long)]
        symbolic: bool,
        /// Dilation factor for Cellini's measure.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Intersection lattice, characteristic polynomials and faces.
    Arrangement {
        #[command(flatten)]
        group: OptionalGroupSpec,
        /// Arrangement file (JSON or text) instead of a reflection arrangement.
        #[arg(long, conflicts_with = "ty")]
        file: Option<PathBuf>,
        /// Evaluate face weights at this parameter.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Predicted eigenvalues, optionally confirmed on the explicit matrix.
    Spectrum {
        #[arg(value_enum)]
        kind: SpectrumKind,
        #[command(flatten)]
        group: OptionalGroupSpec,
        #[arg(long, conflicts_with = "ty")]
        file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Build the matrix and confirm the prediction.
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Run verification suites; exit code 3 if any claimed identity fails.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        group: OptionalGroupSpec,
        /// Accepted for clarity; identities are always checked as polynomial identities where possible.
        #[arg(long)]
        symbolic: bool,
        /// Parameters for convolution and spectrum checks.
        #[arg(long)]
        x: Option<i64>,
        /// Primes for the positivity check.
        #[arg(long, value_delimiter = ',')]
        p: Vec<u32>,
        /// Dilation factors for Cellini checks.
        #[arg(long, value_delimiter = ',')]
        k: Vec<u32>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Monte Carlo simulation of a physical shuffle.
    Simulate {
        #[arg(long, value_enum)]
        model: ModelKind,
        /// Number of cards.
        #[arg(long)]
        n: usize,
        /// Piles for the GSR shuffle.
        #[arg(long, default_value_t = 2)]
        a: u32,
        /// The type C shuffle uses 2k+1 stacks.
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "position-to-card")]
        encoding: EncodingArg,
        /// Report the total variation distance to the exact law.
        #[arg(long, value_enum)]
        compare: Option<CompareTarget>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Pairwise comparison of M_{W,x}, H_{W,x} and x_k on one group.
    Compare {
        #[command(flatten)]
        group: GroupSpec,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

/// Outcome of a command: text for standard output and whether a claimed identity failed.
struct Output {
    text: String,
    failed: bool,
}

impl Output {
    fn ok(text: String) -> Output {
        Output { text, failed: false }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not configure the thread pool: {e}");
        }
    }
    match run(cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            if out.failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invariant(_) => 3,
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn group_of(spec: &OptionalGroupSpec) -> Result<Option<CoxeterType>, Error> {
    match &spec.ty {
        Some(t) => CoxeterType::parse(t, spec.rank).map(Some),
        None if spec.rank.is_some() => Err(Error::Parse("--rank needs --type".into())),
        None => Ok(None),
    }
}

fn run(command: Command) -> Result<Output, Error> {
    match command {
        Command::Group { group, format } => cmd_group(group.resolve()?, format),
        Command::Measure { kind, group, x, symbolic, k, format } => cmd_measure(kind, group.resolve()?, x, symbolic, k, format),
        Command::Arrangement { group, file, x, format } => cmd_arrangement(group_of(&group)?, file, x, format),
        Command::Spectrum { kind, group, file, x, check, format } => cmd_spectrum(kind, group_of(&group)?, file, &x, check, format),
        Command::Verify { suite, group, symbolic, x, p, k, format } => cmd_verify(suite, group_of(&group)?, symbolic, x, p, k, format),
        Command::Simulate { model, n, a, k, trials, seed, encoding, compare, format } => {
            cmd_simulate(model, n, a, k, trials, seed, encoding, compare.is_some(), format)
        }
        Command::Compare { group, x, format } => cmd_compare(group.resolve()?, &x, format),
    }
}

fn cmd_group(ty: CoxeterType, format: Format) -> Result<Output, Error> {
    let g = build_group(ty)?;
    let p = params(&[("type", json!(ty.to_string()))]);
    let s = g.summary();
    Ok(Output::ok(match format {
        Format::Json => json_output("group", &p, &s),
        Format::Table => {
            let mut out = header("group", &p);
            let _ = writeln!(out, "order            {}", s.order);
            let _ = writeln!(out, "rank             {}", s.rank);
            let _ = writeln!(out, "positive roots   {}", s.positive_roots);
            let _ = writeln!(out, "exponents        {:?}", s.exponents);
            let _ = writeln!(out, "field            {}", s.field);
            let _ = writeln!(out, "crystallographic {}", s.crystallographic);
            if let Some(b) = &s.bad_primes {
                let _ = writeln!(out, "bad primes       {b:?}");
            }
            let _ = writeln!(out, "parabolic classes");
            for c in &s.classes {
                let _ = writeln!(out, "  K={:?} size {} members {:?}", c.representative, c.size, c.members);
            }
            out
        }
        Format::Csv => {
            let mut out = header("group", &p);
            out.push_str("word,length,descent_set\n");
            for w in g.elements() {
                let d: Vec<String> = (0..g.rank()).filter(|i| g.descent_set(w) >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
                let _ = writeln!(out, "{},{},{}", g.word_string(w), g.length(w), d.join(" "));
            }
            out
        }
    }))
}

fn cmd_measure(kind: MeasureKind, ty: CoxeterType, x: Option<String>, symbolic: bool, k: Option<u32>, format: Format) -> Result<Output, Error> {
    let g = build_group(ty)?;
    let name = match kind {
        MeasureKind::Descent => "descent",
        MeasureKind::Hyperplane => "hyperplane",
        MeasureKind::Cellini => "cellini",
    };
    let (json, p) = match kind {
        MeasureKind::Cellini => {
            if x.is_some() || symbolic {
                return Err(Error::Parse("the Cellini measure takes --k, not --x or --symbolic".into()));
            }
            let k = k.ok_or_else(|| Error::Parse("the Cellini measure needs --k".into()))?;
            let m = measure_xk(&g, k)?;
            let p = params(&[
                ("measure", json!(name)),
                ("type", json!(ty.to_string())),
                ("k", json!(k)),
                ("convention", json!(FROZEN_CONVENTION)),
            ]);
            (m.to_json(), p)
        }
        _ => {
            if k.is_some() {
                return Err(Error::Parse("--k applies to the Cellini measure only".into()));
            }
            let symbolic_measure = || -> Result<_, Error> {
                Ok(match kind {
                    MeasureKind::Descent => measure_m_symbolic(&g)?,
                    _ => measure_h(&g, &IntersectionLattice::reflection(&g))?,
                })
            };
            match (x.as_deref(), symbolic) {
                (Some("symbolic"), _) | (None, true) => {
                    let p = params(&[("measure", json!(name)), ("type", json!(ty.to_string())), ("x", json!("symbolic"))]);
                    (symbolic_measure()?.to_json(), p)
                }
                (Some(xs), false) => {
                    let xq = parse_rational(xs)?;
                    let m = match kind {
                        MeasureKind::Descent => measure_m(&g, &xq)?,
                        _ => measure_h(&g, &IntersectionLattice::reflection(&g))?.eval(&xq)?,
                    };
                    let label = format_rational(&xq);
                    let p = params(&[("measure", json!(name)), ("type", json!(ty.to_string())), ("x", json!(label))]);
                    (m.to_json(&label), p)
                }
                (Some(_), true) => return Err(Error::Parse("give either --x or --symbolic".into())),
                (None, false) => return Err(Error::Parse("give --x <value> or --symbolic".into())),
            }
        }
    };
    Ok(Output::ok(match format {
        Format::Json => json_output("measure", &p, &json),
        Format::Table => header("measure", &p) + &measure_table(&json),
        Format::Csv => header("measure", &p) + &measure_csv(&json),
    }))
}

fn load_arrangement(ty: Option<CoxeterType>, file: Option<PathBuf>) -> Result<(Arrangement, Value), Error> {
    match (ty, file) {
        (Some(t), None) => Ok((Arrangement::reflection(&build_group(t)?), json!(t.to_string()))),
        (None, Some(f)) => Ok((Arrangement::from_file(&f)?, json!(f.display().to_string()))),
        _ => Err(Error::Parse("give exactly one of --type or --file".into())),
    }
}

#[derive(Serialize)]
struct FlatRow {
    hyperplanes: Vec<usize>,
    dim: usize,
    chi: Vec<String>,
    faces: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<String>,
}

#[derive(Serialize)]
struct ArrangementReport {
    dim: usize,
    hyperplanes: usize,
    central: bool,
    flats: usize,
    chambers: usize,
    faces: usize,
    characteristic_polynomial: Vec<String>,
    mobius_profile: Vec<usize>,
    lattice: Vec<FlatRow>,
}

fn cmd_arrangement(ty: Option<CoxeterType>, file: Option<PathBuf>, x: Option<String>, format: Format) -> Result<Output, Error> {
    let (arr, source) = load_arrangement(ty, file)?;
    let lattice = IntersectionLattice::new(&arr)?;
    let f = faces(&arr, &lattice)?;
    let xq = x.as_deref().map(parse_rational).transpose()?;
    let weights = xq.as_ref().map(|x| face_weights(&lattice, &f, x)).transpose()?;
    let m = arr.num_hyperplanes();
    let rows: Vec<FlatRow> = lattice
        .nodes()
        .iter()
        .enumerate()
        .map(|(y, node)| FlatRow {
            hyperplanes: (0..m).filter(|i| node.mask >> i & 1 == 1).map(|i| i + 1).collect(),
            dim: node.dim,
            chi: lattice.char_poly(y).to_strings(),
            faces: f.fiber(y),
            weight: weights.as_ref().map(|w| format_rational(&w.per_node[y])),
        })
        .collect();
    let rep = ArrangementReport {
        dim: arr.dim(),
        hyperplanes: m,
        central: arr.is_central(),
        flats: lattice.len(),
        chambers: f.num_chambers(),
        faces: f.len(),
        characteristic_polynomial: lattice.char_poly(0).to_strings(),
        mobius_profile: lattice.mobius_profile(),
        lattice: rows,
    };
    let p = params(&[("source", source), ("x", opt(&xq.as_ref().map(format_rational)))]);
    Ok(Output::ok(match format {
        Format::Json => json_output("arrangement", &p, &rep),
        Format::Table | Format::Csv => {
            let mut out = header("arrangement", &p);
            if format == Format::Table {
                let _ = writeln!(out, "dimension {}  hyperplanes {}  central {}", rep.dim, rep.hyperplanes, rep.central);
                let _ = writeln!(out, "flats {}  faces {}  chambers {}", rep.flats, rep.faces, rep.chambers);
                let _ = writeln!(out, "chi(x) = {}", lattice.char_poly(0));
                let _ = writeln!(out, "|mu| by codimension {:?}", rep.mobius_profile);
            }
            out.push_str("flat,dim,hyperplanes,faces,chi");
            out.push_str(if weights.is_some() { ",weight\n" } else { "\n" });
            for (y, r) in rep.lattice.iter().enumerate() {
                let hs: Vec<String> = r.hyperplanes.iter().map(|h| h.to_string()).collect();
                let _ = write!(out, "{y},{},{},{},{}", r.dim, hs.join(" "), r.faces, r.chi.join(" "));
                if let Some(w) = &r.weight {
                    let _ = write!(out, ",{w}");
                }
                out.push('\n');
            }
            out
        }
    }))
}

#[derive(Serialize)]
struct SpectrumReport {
    eigenvalues: Vec<(String, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<String>,
}

fn cmd_spectrum(kind: SpectrumKind, ty: Option<CoxeterType>, file: Option<PathBuf>, x: &str, check: bool, format: Format) -> Result<Output, Error> {
    let xq = parse_rational(x)?;
    let describe = |c: SpectrumCheck| match c {
        SpectrumCheck::CharacteristicPolynomial => "confirmed: characteristic polynomial".to_string(),
        SpectrumCheck::TraceAndAnnihilation { probes } => format!("confirmed: trace and annihilation on {probes} probes"),
    };
    let (spectrum, checked, source) = match kind {
        SpectrumKind::Descent => {
            let t = ty.ok_or_else(|| Error::Parse("the descent spectrum needs --type".into()))?;
            let g = build_group(t)?;
            let s = spectrum_m(&g, &xq)?;
            let c = if check {
                let m = measure_m(&g, &xq)?;
                Some(describe(check_spectrum(g.order(), &m.element().left_multiplication_matrix(), &s, CHARPOLY_LIMIT)?))
            } else {
                None
            };
            (s, c, json!(t.to_string()))
        }
        SpectrumKind::Walk => {
            let (arr, source) = load_arrangement(ty, file)?;
            let lattice = IntersectionLattice::new(&arr)?;
            let s = bhr_spectrum(&lattice, &xq)?;
            let c = if check {
                let f = faces(&arr, &lattice)?;
                let t = bhr_transition_matrix(&f, &face_weights(&lattice, &f, &xq)?)?;
                Some(describe(verify_bhr_spectrum(&t, &s, CHARPOLY_LIMIT)?))
            } else {
                None
            };
            (s, c, source)
        }
    };
    let kind_name = match kind {
        SpectrumKind::Descent => "descent",
        SpectrumKind::Walk => "walk",
    };
    let p = params(&[("kind", json!(kind_name)), ("source", source), ("x", json!(format_rational(&xq)))]);
    let rep = SpectrumReport {
        eigenvalues: spectrum.entries.iter().map(|(v, m)| (format_rational(v), *m)).collect(),
        check: checked,
    };
    Ok(Output::ok(match format {
        Format::Json => json_output("spectrum", &p, &rep),
        Format::Table | Format::Csv => {
            let mut out = header("spectrum", &p);
            out.push_str("eigenvalue,multiplicity\n");
            for (v, m) in &rep.eigenvalues {
                let _ = writeln!(out, "{v},{m}");
            }
            if let Some(c) = &rep.check {
                let _ = writeln!(out, "# {c}");
            }
            out
        }
    }))
}

fn tasks_for(suite: Suite, ty: CoxeterType, x: Option<i64>, primes: &[u32], ks: &[u32]) -> Vec<Task> {
    let x = x.unwrap_or(2);
    let mut t = vec![];
    let want = |s: Suite| matches!(suite, Suite::All) || std::mem::discriminant(&suite) == std::mem::discriminant(&s);
    if want(Suite::Agree) {
        t.push(Task::Agree { group: ty });
    }
    if want(Suite::Specialize) {
        t.push(Task::Specialize { group: ty });
    }
    if want(Suite::Identities) {
        t.push(Task::Identities { group: ty });
    }
    if want(Suite::Lemmas) {
        t.push(Task::Lemmas { group: ty });
    }
    if want(Suite::Endpoints) {
        t.push(Task::Endpoints { group: ty });
    }
    if want(Suite::Convolution) {
        t.push(Task::Convolution { group: ty, x, y: x + 1 });
    }
    if want(Suite::Spectrum) {
        t.push(Task::Spectrum { group: ty, x });
    }
    if want(Suite::Primes) && ty.is_crystallographic() {
        let default: Vec<u32> = [2, 3, 5, 7].into_iter().collect();
        for &p in if primes.is_empty() { &default } else { primes } {
            t.push(Task::Prime { group: ty, p });
        }
    }
    if want(Suite::Cellini) && ty.is_crystallographic() {
        let default: Vec<u32> = (1..=5).collect();
        for &k in if ks.is_empty() { &default } else { ks } {
            t.push(Task::Cellini { group: ty, k });
        }
    }
    t
}

fn same_kind(suite: Suite, t: &Task) -> bool {
    match suite {
        Suite::All => true,
        Suite::Agree => matches!(t, Task::Agree { .. }),
        Suite::Specialize => matches!(t, Task::Specialize { .. }),
        Suite::Identities => matches!(t, Task::Identities { .. }),
        Suite::Lemmas => matches!(t, Task::Lemmas { .. } | Task::GenericLemmas),
        Suite::Endpoints => matches!(t, Task::Endpoints { .. }),
        Suite::Convolution => matches!(t, Task::Convolution { .. }),
        Suite::Spectrum => matches!(t, Task::Spectrum { .. }),
        Suite::Primes => matches!(t, Task::Prime { .. }),
        Suite::Cellini => matches!(t, Task::Cellini { .. }),
        Suite::Shuffles => matches!(t, Task::Shuffle { .. }),
    }
}

fn cmd_verify(
    suite: Suite,
    ty: Option<CoxeterType>,
    symbolic: bool,
    x: Option<i64>,
    primes: Vec<u32>,
    ks: Vec<u32>,
    format: Format,
) -> Result<Output, Error> {
    if x == Some(0) {
        return Err(Error::Domain("the parameter x must be nonzero".into()));
    }
    let tasks = match ty {
        Some(t) => {
            if matches!(suite, Suite::Shuffles) {
                return Err(Error::Parse("the shuffle suite does not take --type".into()));
            }
            tasks_for(suite, t, x, &primes, &ks)
        }
        None => default_scope().into_iter().filter(|t| same_kind(suite, t)).collect(),
    };
    let report = verify::run(&tasks);
    let suite_name = format!("{suite:?}").to_lowercase();
    let p = params(&[
        ("suite", json!(suite_name)),
        ("type", opt(&ty.map(|t| t.to_string()))),
        ("symbolic", json!(symbolic)),
        ("x", opt(&x)),
        ("tasks", json!(tasks.len())),
    ]);
    let text = match format {
        Format::Json => json_output("verify", &p, &report),
        Format::Table => header("verify", &p) + &report.to_table(),
        Format::Csv => {
            let mut out = header("verify", &p);
            out.push_str("status,check,subject,detail\n");
            for r in &report.results {
                let _ = writeln!(out, "{:?},{},{},{}", r.status, r.check, r.subject, r.detail.replace(',', ";"));
            }
            out
        }
    };
    Ok(Output { text, failed: !report.passed() })
}

#[derive(Serialize)]
struct SimulationRow {
    word: String,
    descents: u32,
    count: u64,
    frequency: String,
}

#[derive(Serialize)]
struct SimulationReport {
    group: String,
    trials: u64,
    frequency_precision: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_variation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_variation_exact: Option<String>,
    counts: Vec<SimulationRow>,
}

const FREQUENCY_DIGITS: usize = 6;

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    kind: ModelKind,
    n: usize,
    a: u32,
    k: u32,
    trials: u64,
    seed: u64,
    encoding: EncodingArg,
    compare: bool,
    format: Format,
) -> Result<Output, Error> {
    let model = match kind {
        ModelKind::Gsr => Model::Gsr { n, a },
        ModelKind::TypeC => Model::TypeCFlip { n, k },
        ModelKind::X2 => Model::X2Physical { n },
    };
    let enc = match encoding {
        EncodingArg::PositionToCard => DeckEncoding::PositionToCard,
        EncodingArg::CardToPosition => DeckEncoding::CardToPosition,
    };
    let index = DeckIndex::new(model, enc)?;
    let emp = monte_carlo_with_index(model, &index, trials, seed)?;
    let g: &CoxeterGroup = index.group();
    let tv = if compare {
        let exact = exact_model_distribution(model, enc)?;
        Some(emp.total_variation_exact(&exact)?)
    } else {
        None
    };
    let tv_decimal = tv.as_ref().map(|t| format!("{:.6}", riffle_core::field::to_f64(t)));
    let mut p = params(&[
        ("model", json!(kind)),
        ("n", json!(n)),
        ("trials", json!(trials)),
        ("seed", json!(seed)),
        ("encoding", json!(encoding)),
        ("compare", json!(if compare { "exact" } else { "none" })),
    ]);
    match model {
        Model::Gsr { a, .. } => p["a"] = json!(a),
        Model::TypeCFlip { k, .. } => p["k"] = json!(k),
        Model::X2Physical { .. } => {}
    }
    let rep = SimulationReport {
        group: g.label(),
        trials,
        frequency_precision: FREQUENCY_DIGITS,
        total_variation: tv_decimal.clone(),
        total_variation_exact: tv.as_ref().map(format_rational),
        counts: g
            .elements()
            .map(|w| SimulationRow {
                word: g.word_string(w),
                descents: g.descent_count(w),
                count: emp.counts[w],
                frequency: format!("{:.*}", FREQUENCY_DIGITS, emp.frequency(w)),
            })
            .collect(),
    };
    Ok(Output::ok(match format {
        Format::Json => json_output("simulate", &p, &rep),
        Format::Csv => {
            let mut out = header("simulate", &p);
            out.push_str("word,descents,count,frequency\n");
            for r in &rep.counts {
                let _ = writeln!(out, "{},{},{},{}", r.word, r.descents, r.count, r.frequency);
            }
            out
        }
        Format::Table => {
            let mut out = header("simulate", &p);
            let support = rep.counts.iter().filter(|r| r.count > 0).count();
            let _ = writeln!(out, "group {}  trials {}  outcomes seen {}", rep.group, trials, support);
            if let Some(t) = &tv_decimal {
                let _ = writeln!(out, "TV distance to exact law: {t}");
            }
            out
        }
    }))
}

#[derive(Serialize)]
struct ComparisonRow {
    left: String,
    right: String,
    equal: bool,
    total_variation: String,
}

fn cmd_compare(ty: CoxeterType, x: &str, format: Format) -> Result<Output, Error> {
    let g = build_group(ty)?;
    let xq = parse_rational(x)?;
    let mut measures = vec![
        ("M".to_string(), measure_m(&g, &xq)?),
        ("H".to_string(), measure_h_definition2(&g, &IntersectionLattice::reflection(&g)).eval(&xq)?),
    ];
    let mut notes = vec![];
    match (xq.is_integer(), g.is_crystallographic()) {
        (true, true) => {
            let k = xq.to_integer().try_into().ok().filter(|k: &u32| *k >= 1);
            match k.map(|k| measure_xk(&g, k)) {
                Some(Ok(m)) => measures.push((format!("x_{}", xq.numer()), m.to_measure()?)),
                Some(Err(e)) => notes.push(format!("x_k skipped: {e}")),
                None => notes.push("x_k skipped: k must be a positive integer".into()),
            }
        }
        _ => notes.push("x_k skipped: needs a Weyl group and a positive integer parameter".into()),
    }
    let mut rows = vec![];
    for i in 0..measures.len() {
        for j in i + 1..measures.len() {
            let tv = measures[i].1.total_variation(&measures[j].1)?;
            rows.push(ComparisonRow {
                left: measures[i].0.clone(),
                right: measures[j].0.clone(),
                equal: measures[i].1 == measures[j].1,
                total_variation: format_rational(&tv),
            });
        }
    }
    let p = params(&[("type", json!(ty.to_string())), ("x", json!(format_rational(&xq)))]);
    Ok(Output::ok(match format {
        Format::Json => json_output("compare", &p, json!({ "pairs": rows, "notes": notes })),
        Format::Table | Format::Csv => {
            let mut out = header("compare", &p);
            out.push_str("left,right,equal,total_variation\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{},{}", r.left, r.right, r.equal, r.total_variation);
            }
            for n in &notes {
                let _ = writeln!(out, "# {n}");
            }
            out
        }
    }))
}
