//! Command-line front end: check files, run constructions, emit catalog
//! objects and search for Rota-Baxter operators.
//!
//! Exit codes: 0 all checks pass, 1 identity violation or failed
//! precondition, 2 usage or parse error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use naryalg::error::AlgebraError;
use naryalg::geometry;
use naryalg::io::{self, AlgebraFile, FileKind};
use naryalg::ldend::{self, NLDendriform, PreLieMode};
use naryalg::linalg::{BilinearForm, Covector, LinearMap};
use naryalg::nlie::{self, NLieAlgebra, NLieRep};
use naryalg::nprelie::{self, NPreLieAlgebra, NPreLieRep};
use naryalg::rational::{parse_rational, Rational};
use naryalg::report::Report;
use naryalg::trace;

#[derive(Parser)]
#[command(name = "naryalg", version, about = "Exact structure-constant workbench for n-ary algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the kind-appropriate identity checkers on a file.
    Check {
        /// Path to a JSON file, or `catalog:NAME`.
        input: String,
        /// Only report violations of this identity family.
        #[arg(long)]
        identity: Option<String>,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Execute a construction and write the derived structure.
    Derive {
        /// Construction name; run `derive list` for the available set.
        construction: String,
        /// Input files (paths or `catalog:NAME`), plus integer parameters
        /// where the construction takes them.
        inputs: Vec<String>,
        /// Output path for the derived JSON file.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Skip input verification (recorded in the output metadata).
        #[arg(long)]
        force: bool,
    },
    /// List built-in objects, or emit one by name.
    Catalog {
        name: Option<String>,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustively enumerate weight-zero Rota-Baxter operators.
    #[command(name = "search-rb")]
    SearchRb {
        /// An n-Lie or n-pre-Lie file (path or `catalog:NAME`).
        input: String,
        /// Comma-separated candidate entries (canonical rationals).
        #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
        entries: String,
        /// `diag` or 1-based cells like `1,1;2,3`.
        #[arg(long, default_value = "diag")]
        support: String,
        /// Write each found operator to `PREFIX-<k>.json`.
        #[arg(short, long)]
        output: Option<String>,
        /// Emit the operators as a JSON array.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    /// Identity violation or failed mathematical precondition.
    Violation(String),
    /// Bad input: unparsable file, unknown name, wrong shapes.
    Usage(String),
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Unverified(_) | AlgebraError::Precondition(_) => {
                Failure::Violation(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    // Die quietly when the output pipe closes early (e.g. piping into head).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check { input, identity, json } => cmd_check(&input, identity.as_deref(), json),
        Command::Derive { construction, inputs, output, force } => {
            cmd_derive(&construction, &inputs, output.as_deref(), force)
        }
        Command::Catalog { name, output } => cmd_catalog(name.as_deref(), output.as_deref()),
        Command::SearchRb { input, entries, support, output, json } => {
            cmd_search_rb(&input, &entries, &support, output.as_deref(), json)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_file(input: &str) -> CmdResult<AlgebraFile> {
    if let Some(name) = input.strip_prefix("catalog:") {
        return Ok(io::catalog_file(name)?);
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| Failure::Usage(format!("cannot read `{input}`: {e}")))?;
    Ok(io::parse_text(&text)?)
}

fn write_output(path: &Path, file: &AlgebraFile) -> CmdResult<()> {
    std::fs::write(path, io::to_canonical_string(file))
        .map_err(|e| Failure::Usage(format!("cannot write `{}`: {e}", path.display())))
}

// ---------------------------------------------------------------- check --

fn run_checks(file: &AlgebraFile) -> CmdResult<Report> {
    match file.kind {
        FileKind::NLie => Ok(io::to_nlie(file)?.check()),
        FileKind::NPreLie => Ok(io::to_nprelie(file)?.check()),
        FileKind::NLDendriform => Ok(io::to_ldend(file)?.check()),
        FileKind::Representation => {
            let rep = io::to_nlie_rep(file)?;
            let mut report = Report::new("representation");
            let algebra_report = rep.algebra().check();
            if algebra_report.is_empty() {
                report.merge(rep.check()?);
            } else {
                report.merge_prefixed("algebra", algebra_report);
            }
            Ok(report)
        }
        FileKind::PreRepresentation => {
            let rep = io::to_nprelie_rep(file)?;
            let mut report = Report::new("pre-representation");
            let algebra_report = rep.algebra().check();
            if algebra_report.is_empty() {
                report.merge(rep.check()?);
            } else {
                report.merge_prefixed("algebra", algebra_report);
            }
            Ok(report)
        }
        FileKind::BilinearForm => {
            let form = io::to_bilinear_form(file)?;
            let mut report = Report::new("bilinear-form");
            let rank = form.rank();
            if rank < form.dim() {
                report.push(naryalg::report::Violation::new(
                    "nondegenerate",
                    vec![],
                    naryalg::tensor::Coeffs::from([(0, naryalg::rational::int(rank as i64))]),
                ));
            }
            Ok(report)
        }
        FileKind::LinearMap => {
            io::to_linear_map(file)?;
            Ok(Report::new("linear-map"))
        }
        FileKind::Covector => {
            io::to_covector(file)?;
            Ok(Report::new("covector"))
        }
    }
}

fn cmd_check(input: &str, identity: Option<&str>, json: bool) -> CmdResult<ExitCode> {
    let file = load_file(input)?;
    let mut report = run_checks(&file)?;
    if let Some(id) = identity {
        report = report.filtered(id);
    }
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&io::report_to_json(&report)).expect("serializable")
        );
    } else {
        print!("{report}");
    }
    Ok(if report.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// --------------------------------------------------------------- derive --

struct DeriveCtx {
    force: bool,
    warnings: Vec<String>,
    provenance: Vec<serde_json::Value>,
}

impl DeriveCtx {
    fn new(force: bool) -> Self {
        Self {
            force,
            warnings: Vec::new(),
            provenance: Vec::new(),
        }
    }

    fn record(&mut self, source: &str, file: &AlgebraFile) {
        self.provenance.push(serde_json::json!({
            "source": source,
            "sha256": io::canonical_hash(file),
        }));
    }

    fn load(&mut self, input: &str) -> CmdResult<AlgebraFile> {
        let file = load_file(input)?;
        self.record(input, &file);
        Ok(file)
    }

    fn verify(&mut self, what: &str, report: Report, assume: impl Fn()) -> CmdResult<()> {
        if self.force {
            assume();
            if !report.is_empty() {
                self.warnings
                    .push(format!("{what}: {} violation(s) ignored by --force", report.len()));
            }
            return Ok(());
        }
        if report.is_empty() {
            Ok(())
        } else {
            Err(Failure::Violation(format!(
                "{what} fails its identities on {} tuple(s); rerun with --force to override",
                report.len()
            )))
        }
    }

    fn nlie(&mut self, input: &str) -> CmdResult<NLieAlgebra> {
        let file = self.load(input)?;
        let algebra = io::to_nlie(&file)?;
        let report = algebra.check();
        self.verify(&format!("`{input}`"), report, || algebra.assume_verified())?;
        Ok(algebra)
    }

    fn nprelie(&mut self, input: &str) -> CmdResult<NPreLieAlgebra> {
        let file = self.load(input)?;
        let prelie = io::to_nprelie(&file)?;
        let report = prelie.check();
        self.verify(&format!("`{input}`"), report, || prelie.assume_verified())?;
        Ok(prelie)
    }

    fn ldend(&mut self, input: &str) -> CmdResult<NLDendriform> {
        let file = self.load(input)?;
        let algebra = io::to_ldend(&file)?;
        let report = algebra.check();
        self.verify(&format!("`{input}`"), report, || algebra.assume_verified())?;
        Ok(algebra)
    }

    fn nlie_rep(&mut self, input: &str) -> CmdResult<NLieRep> {
        let file = self.load(input)?;
        let rep = io::to_nlie_rep(&file)?;
        let algebra_report = rep.algebra().check();
        self.verify(&format!("`{input}` algebra"), algebra_report, || {
            rep.algebra().assume_verified()
        })?;
        let report = rep.check()?;
        self.verify(&format!("`{input}`"), report, || rep.assume_verified())?;
        Ok(rep)
    }

    fn nprelie_rep(&mut self, input: &str) -> CmdResult<NPreLieRep> {
        let file = self.load(input)?;
        let rep = io::to_nprelie_rep(&file)?;
        let algebra_report = rep.algebra().check();
        self.verify(&format!("`{input}` algebra"), algebra_report, || {
            rep.algebra().assume_verified()
        })?;
        let report = rep.check()?;
        self.verify(&format!("`{input}`"), report, || rep.assume_verified())?;
        Ok(rep)
    }

    fn bilinear(&mut self, input: &str) -> CmdResult<BilinearForm> {
        let file = self.load(input)?;
        Ok(io::to_bilinear_form(&file)?)
    }

    fn linear_map(&mut self, input: &str) -> CmdResult<LinearMap> {
        let file = self.load(input)?;
        Ok(io::to_linear_map(&file)?)
    }

    fn covector(&mut self, input: &str) -> CmdResult<Covector> {
        let file = self.load(input)?;
        Ok(io::to_covector(&file)?)
    }

    fn finish(self, construction: &str, mut file: AlgebraFile) -> AlgebraFile {
        let mut meta = serde_json::Map::new();
        meta.insert("construction".into(), construction.into());
        meta.insert("inputs".into(), serde_json::Value::Array(self.provenance));
        if self.force {
            meta.insert("forced".into(), true.into());
            meta.insert(
                "warnings".into(),
                serde_json::Value::Array(self.warnings.into_iter().map(Into::into).collect()),
            );
        }
        file.metadata
            .insert("provenance".into(), serde_json::Value::Object(meta));
        file
    }
}

const CONSTRUCTIONS: &[&str] = &[
    "sub-adjacent",
    "adjoint-rep",
    "semidirect-nlie",
    "semidirect-nprelie",
    "dual-rep",
    "dual-pre-rep",
    "left-right-mult",
    "rho-tilde",
    "phase-space",
    "double-prelie",
    "induce",
    "induce-nlie",
    "o-to-nprelie",
    "o-to-ldend",
    "rb-to-ldend",
    "commuting-rb-nprelie",
    "commuting-rb-ldend",
    "hessian-to-ldend",
    "hessian-solve",
    "symplectic-to-nprelie",
    "metric-to-derivation",
    "derivation-to-symplectic",
    "assoc-horizontal",
    "assoc-vertical",
    "assoc-nlie",
    "build-a-m",
    "manin-check",
];

fn expect_inputs(inputs: &[String], n: usize, usage: &str) -> CmdResult<()> {
    if inputs.len() != n {
        return Err(Failure::Usage(format!(
            "expected {n} input(s): {usage} (got {})",
            inputs.len()
        )));
    }
    Ok(())
}

fn cmd_derive(
    construction: &str,
    inputs: &[String],
    output: Option<&Path>,
    force: bool,
) -> CmdResult<ExitCode> {
    if construction == "list" {
        for name in CONSTRUCTIONS {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let mut ctx = DeriveCtx::new(force);
    let derived: AlgebraFile = match construction {
        "sub-adjacent" => {
            expect_inputs(inputs, 1, "<n_pre_lie>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            io::from_nlie(&prelie.sub_adjacent()?, None)
        }
        "adjoint-rep" => {
            expect_inputs(inputs, 1, "<n_lie>")?;
            let algebra = ctx.nlie(&inputs[0])?;
            io::from_nlie_rep(&algebra.adjoint_rep())
        }
        "semidirect-nlie" => {
            expect_inputs(inputs, 1, "<representation>")?;
            let rep = ctx.nlie_rep(&inputs[0])?;
            let total = nlie::semidirect(&rep)?;
            io::from_nlie(&total, None)
        }
        "semidirect-nprelie" => {
            expect_inputs(inputs, 1, "<pre_representation>")?;
            let rep = ctx.nprelie_rep(&inputs[0])?;
            let total = nprelie::semidirect(&rep)?;
            io::from_nprelie(&total, None)
        }
        "dual-rep" => {
            expect_inputs(inputs, 1, "<representation>")?;
            let rep = ctx.nlie_rep(&inputs[0])?;
            io::from_nlie_rep(&rep.dual()?)
        }
        "dual-pre-rep" => {
            expect_inputs(inputs, 1, "<pre_representation>")?;
            let rep = ctx.nprelie_rep(&inputs[0])?;
            io::from_nprelie_rep(&rep.dual()?)
        }
        "left-right-mult" => {
            expect_inputs(inputs, 1, "<n_pre_lie>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            io::from_nprelie_rep(&prelie.adjoint_pre_rep()?)
        }
        "rho-tilde" => {
            expect_inputs(inputs, 1, "<pre_representation>")?;
            let rep = ctx.nprelie_rep(&inputs[0])?;
            io::from_nlie_rep(&rep.rho_tilde()?)
        }
        "phase-space" => {
            expect_inputs(inputs, 1, "<n_pre_lie>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            let ps = geometry::phase_space(&prelie)?;
            let mut file = io::from_nlie(&ps.total.algebra, Some(io::doubled_basis(ps.base_dim)));
            file.metadata.insert("base_dim".into(), ps.base_dim.into());
            file.metadata.insert("perfect".into(), ps.perfect.into());
            file.metadata.insert(
                "omega".into(),
                serde_json::to_value(io::from_bilinear_form(&ps.total.omega)).expect("serializable"),
            );
            file
        }
        "double-prelie" => {
            expect_inputs(inputs, 1, "<n_pre_lie>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            let doubled = geometry::double_prelie(&prelie)?;
            io::from_nprelie(&doubled, Some(io::doubled_basis(prelie.dim())))
        }
        "induce" => {
            expect_inputs(inputs, 2, "<n_pre_lie> <covector>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            let tau = ctx.covector(&inputs[1])?;
            io::from_nprelie(&trace::induce(&prelie, &tau)?, None)
        }
        "induce-nlie" => {
            expect_inputs(inputs, 2, "<n_lie> <covector>")?;
            let algebra = ctx.nlie(&inputs[0])?;
            let tau = ctx.covector(&inputs[1])?;
            io::from_nlie(&trace::induce_nlie(&algebra, &tau)?, None)
        }
        "o-to-nprelie" => {
            expect_inputs(inputs, 2, "<linear_map> <representation>")?;
            let map = ctx.linear_map(&inputs[0])?;
            let rep = ctx.nlie_rep(&inputs[1])?;
            let induced = nlie::o_to_nprelie(&map, &rep)?;
            let mut file = io::from_nprelie(&induced.algebra, None);
            file.metadata.insert(
                "morphism_violations".into(),
                induced.morphism.len().into(),
            );
            file
        }
        "o-to-ldend" => {
            expect_inputs(inputs, 2, "<linear_map> <pre_representation>")?;
            let map = ctx.linear_map(&inputs[0])?;
            let rep = ctx.nprelie_rep(&inputs[1])?;
            let induced = ldend::o_to_ldend(&map, &rep)?;
            let mut file = io::from_ldend(&induced.dendriform, None);
            file.metadata.insert(
                "horizontal_morphism_violations".into(),
                induced.horizontal_morphism.len().into(),
            );
            file.metadata.insert(
                "vertical_morphism_violations".into(),
                induced.vertical_morphism.len().into(),
            );
            file
        }
        "rb-to-ldend" => {
            expect_inputs(inputs, 2, "<n_pre_lie> <linear_map>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            let map = ctx.linear_map(&inputs[1])?;
            io::from_ldend(&ldend::rb_to_ldend(&prelie, &map)?, None)
        }
        "commuting-rb-nprelie" => {
            expect_inputs(inputs, 3, "<n_lie> <linear_map> <linear_map>")?;
            let algebra = ctx.nlie(&inputs[0])?;
            let p1 = ctx.linear_map(&inputs[1])?;
            let p2 = ctx.linear_map(&inputs[2])?;
            let (prelie, report) = nprelie::commuting_rb(&algebra, &p1, &p2)?;
            let mut file = io::from_nprelie(&prelie, None);
            file.metadata
                .insert("second_operator_violations".into(), report.len().into());
            file
        }
        "commuting-rb-ldend" => {
            expect_inputs(inputs, 3, "<n_lie> <linear_map> <linear_map>")?;
            let algebra = ctx.nlie(&inputs[0])?;
            let p1 = ctx.linear_map(&inputs[1])?;
            let p2 = ctx.linear_map(&inputs[2])?;
            io::from_ldend(&ldend::commuting_rb_to_ldend(&algebra, &p1, &p2)?, None)
        }
        "hessian-to-ldend" => {
            expect_inputs(inputs, 2, "<n_pre_lie> <bilinear_form>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            let form = ctx.bilinear(&inputs[1])?;
            let (dendriform, derived) = ldend::hessian_to_ldend(&prelie, &form)?;
            let mut file = io::from_ldend(&dendriform, None);
            file.metadata.insert(
                "derived_product".into(),
                serde_json::to_value(io::from_nprelie(&derived, None)).expect("serializable"),
            );
            file
        }
        "hessian-solve" => {
            expect_inputs(inputs, 1, "<n_pre_lie>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            let solved = ldend::pseudo_hessian_solutions(&prelie)?;
            let Some(example) = solved.example else {
                return Err(Failure::Violation(format!(
                    "no nondegenerate solution: system rank {}, nullity {}, {}",
                    solved.rank,
                    solved.nullity,
                    if solved.exhaustive {
                        "every solution is degenerate (full grid scanned)"
                    } else {
                        "grid scan skipped (solution space too large)"
                    }
                )));
            };
            let mut file = io::from_bilinear_form(&example);
            file.metadata.insert("system_rank".into(), solved.rank.into());
            file.metadata.insert("system_nullity".into(), solved.nullity.into());
            file.metadata
                .insert("exhaustive".into(), solved.exhaustive.into());
            file
        }
        "symplectic-to-nprelie" => {
            expect_inputs(inputs, 2, "<n_lie> <bilinear_form>")?;
            let algebra = ctx.nlie(&inputs[0])?;
            let omega = ctx.bilinear(&inputs[1])?;
            let symplectic = geometry::SymplecticNLie { algebra, omega };
            io::from_nprelie(&geometry::symplectic_to_nprelie(&symplectic)?, None)
        }
        "metric-to-derivation" => {
            expect_inputs(inputs, 3, "<n_lie> <symmetric form> <skew form>")?;
            let algebra = ctx.nlie(&inputs[0])?;
            let form = ctx.bilinear(&inputs[1])?;
            let omega = ctx.bilinear(&inputs[2])?;
            let metric = geometry::MetricNLie { algebra, form };
            io::from_linear_map(&geometry::metric_symplectic_to_derivation(&metric, &omega)?)
        }
        "derivation-to-symplectic" => {
            expect_inputs(inputs, 3, "<n_lie> <symmetric form> <linear_map>")?;
            let algebra = ctx.nlie(&inputs[0])?;
            let form = ctx.bilinear(&inputs[1])?;
            let map = ctx.linear_map(&inputs[2])?;
            let metric = geometry::MetricNLie { algebra, form };
            io::from_bilinear_form(&geometry::derivation_to_symplectic(&metric, &map)?)
        }
        "assoc-horizontal" | "assoc-vertical" => {
            expect_inputs(inputs, 1, "<n_l_dendriform>")?;
            let algebra = ctx.ldend(&inputs[0])?;
            let mode = if construction == "assoc-horizontal" {
                PreLieMode::Horizontal
            } else {
                PreLieMode::Vertical
            };
            io::from_nprelie(&ldend::assoc_prelie(&algebra, mode)?, None)
        }
        "assoc-nlie" => {
            expect_inputs(inputs, 1, "<n_l_dendriform>")?;
            let algebra = ctx.ldend(&inputs[0])?;
            io::from_nlie(&ldend::assoc_nlie(&algebra)?, None)
        }
        "build-a-m" => {
            expect_inputs(inputs, 2, "<n_lie> <m>")?;
            let algebra = ctx.nlie(&inputs[0])?;
            let m: usize = inputs[1]
                .parse()
                .map_err(|_| Failure::Usage(format!("bad integer `{}`", inputs[1])))?;
            let built = geometry::build_a_m(&algebra, m)?;
            let half = built.nilpotent.dim();
            let mut file = io::from_nlie(&built.metric.algebra, Some(io::doubled_basis(half)));
            for (key, value) in [
                ("metric", io::from_bilinear_form(&built.metric.form)),
                ("derivation", io::from_linear_map(&built.derivation)),
                ("omega", io::from_bilinear_form(&built.omega)),
                ("nilpotent", io::from_nlie(&built.nilpotent, None)),
            ] {
                file.metadata
                    .insert(key.into(), serde_json::to_value(value).expect("serializable"));
            }
            file
        }
        "manin-check" => {
            expect_inputs(inputs, 1, "<n_pre_lie on A ⊕ A*>")?;
            let prelie = ctx.nprelie(&inputs[0])?;
            if prelie.dim() % 2 != 0 {
                return Err(Failure::Usage("total dimension must be even".into()));
            }
            let form = geometry::canonical_symplectic_form(prelie.dim() / 2);
            let report = geometry::check_manin_triple(&prelie, &form)?;
            print!("{report}");
            if let Some(path) = output {
                std::fs::write(
                    path,
                    serde_json::to_string_pretty(&io::report_to_json(&report))
                        .expect("serializable"),
                )
                .map_err(|e| Failure::Usage(format!("cannot write `{}`: {e}", path.display())))?;
            }
            return Ok(if report.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown construction `{other}`; run `naryalg derive list`"
            )));
        }
    };
    let Some(path) = output else {
        return Err(Failure::Usage("derive requires --output <path>".into()));
    };
    let finished = ctx.finish(construction, derived);
    write_output(path, &finished)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

// -------------------------------------------------------------- catalog --

fn cmd_catalog(name: Option<&str>, output: Option<&Path>) -> CmdResult<ExitCode> {
    match name {
        None => {
            for fixed in naryalg::catalog::FIXED_NAMES {
                println!("{fixed}");
            }
            println!("Z(d,n)       zero n-ary bracket on dimension d");
            println!("Zpre(d,n)    zero n-pre-Lie product on dimension d");
            println!("Am(S3,m)     nilpotent double of the Levi-Civita bracket");
            println!("Am(S4,m)     nilpotent double of the 4-ary Levi-Civita bracket");
            Ok(ExitCode::SUCCESS)
        }
        Some(name) => {
            let file = io::catalog_file(name)?;
            match output {
                Some(path) => write_output(path, &file)?,
                None => print!("{}", io::to_canonical_string(&file)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

// ------------------------------------------------------------- search-rb --

fn parse_entries(text: &str) -> CmdResult<Vec<Rational>> {
    text.split(',')
        .map(|s| {
            parse_rational(s.trim()).map_err(|e| Failure::Usage(format!("bad entry list: {e}")))
        })
        .collect()
}

fn parse_support(text: &str, dim: usize) -> CmdResult<Vec<(usize, usize)>> {
    if text == "diag" {
        return Ok((0..dim).map(|i| (i, i)).collect());
    }
    let mut cells = Vec::new();
    for part in text.split(';') {
        let Some((r, c)) = part.split_once(',') else {
            return Err(Failure::Usage(format!("bad support cell `{part}` (want r,c)")));
        };
        let r: usize = r
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad support row `{r}`")))?;
        let c: usize = c
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad support column `{c}`")))?;
        if r == 0 || c == 0 {
            return Err(Failure::Usage("support cells are 1-based".into()));
        }
        cells.push((r - 1, c - 1));
    }
    if cells.len() > nlie::RB_SUPPORT_CAP {
        return Err(Failure::Usage(format!(
            "support of {} cells exceeds cap {}",
            cells.len(),
            nlie::RB_SUPPORT_CAP
        )));
    }
    Ok(cells)
}

fn cmd_search_rb(
    input: &str,
    entries: &str,
    support: &str,
    output: Option<&str>,
    json: bool,
) -> CmdResult<ExitCode> {
    let file = load_file(input)?;
    let entry_set = parse_entries(entries)?;
    let found = match file.kind {
        FileKind::NLie => {
            let algebra = io::to_nlie(&file)?;
            let report = algebra.check();
            if !report.is_empty() {
                return Err(Failure::Violation(format!(
                    "`{input}` fails its identities on {} tuple(s)",
                    report.len()
                )));
            }
            let cells = parse_support(support, algebra.dim())?;
            nlie::rb_search(&algebra, &entry_set, &cells)?
        }
        FileKind::NPreLie => {
            let prelie = io::to_nprelie(&file)?;
            let report = prelie.check();
            if !report.is_empty() {
                return Err(Failure::Violation(format!(
                    "`{input}` fails its identities on {} tuple(s)",
                    report.len()
                )));
            }
            let cells = parse_support(support, prelie.dim())?;
            nprelie::rb_search(&prelie, &entry_set, &cells)?
        }
        other => {
            return Err(Failure::Usage(format!(
                "search-rb needs an n_lie or n_pre_lie file, got {}",
                other.as_str()
            )));
        }
    };
    let files: Vec<AlgebraFile> = found
        .iter()
        .enumerate()
        .map(|(k, map)| {
            let mut f = io::from_linear_map(map);
            let mut meta = BTreeMap::new();
            meta.insert("index".to_string(), serde_json::Value::from(k));
            meta.insert("verified".to_string(), serde_json::Value::from(true));
            meta.insert("source".to_string(), serde_json::Value::from(input));
            f.metadata = meta;
            f
        })
        .collect();
    if let Some(prefix) = output {
        for (k, f) in files.iter().enumerate() {
            let path = PathBuf::from(format!("{prefix}-{k:03}.json"));
            write_output(&path, f)?;
        }
        println!("found {} operator(s), wrote {} file(s)", files.len(), files.len());
    } else if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&files).expect("serializable")
        );
    } else {
        println!("found {} operator(s)", files.len());
        for (k, map) in found.iter().enumerate() {
            let mut cells = Vec::new();
            for r in 0..map.rows() {
                for c in 0..map.cols() {
                    let v = map.entry(r, c);
                    if !naryalg::rational::is_zero(v) {
                        cells.push(format!(
                            "({},{})={}",
                            r + 1,
                            c + 1,
                            naryalg::rational::format_rational(v)
                        ));
                    }
                }
            }
            if cells.is_empty() {
                println!("  [{k}] zero map");
            } else {
                println!("  [{k}] {}", cells.join(" "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
