//! Command-line front end for `superhomology`.
//!
//! [`run_cli`] takes the full argument list (program name first) and returns
//! the exit code with everything that would go to stdout and stderr, so the
//! binary and the tests share one code path.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use superhomology::algebra::{
    catalog, catalog_spec, paper_basis, parse_binding, parse_rational, AlgebraSpec, Bindings,
    StructureConstants,
};
use superhomology::chain::{chain_basis, weight_basis};
use superhomology::exterior::{bracket_table, GeneratorSystem};
use superhomology::homology::{betti_table, compute_row, verify_table, BettiTable, ExpectedTable, RowComputation};
use superhomology::Error;

/// Environment variable capping the worker-thread count (`0` = automatic).
pub const THREADS_ENV: &str = "SUPERHOMOLOGY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "superhomology", version, about = "Exact super homology of Schouten-bracket superalgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the built-in algebras and their parameters.
    Catalog,
    /// Check the Jacobi identity of an algebra.
    CheckJacobi(Source),
    /// Print the Schouten bracket table of the generators.
    BracketTable(BasisArgs),
    /// List the chain basis of degree m and weight w.
    Basis {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        w: usize,
    },
    /// Compute the Betti table for w = 0..=wmax.
    Table(TableArgs),
    /// Compare a computed table against an expected JSON table.
    Verify {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        expected: PathBuf,
        /// Defaults to the largest weight in the expected table.
        #[arg(long)]
        wmax: Option<usize>,
    },
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct SourceChoice {
    /// Catalog name, see `catalog`.
    #[arg(long)]
    algebra: Option<String>,
    /// JSON algebra description.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Source {
    #[command(flatten)]
    choice: SourceChoice,
    /// Parameter binding `name=p/q`; repeatable.
    #[arg(long = "param", value_name = "NAME=P/Q")]
    params: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisChoice {
    Canonical,
    Paper,
}

#[derive(Debug, Args)]
struct BasisArgs {
    #[command(flatten)]
    source: Source,
    /// Level-2 basis: canonical wedges or the named paper basis.
    #[arg(long, value_enum, default_value = "canonical")]
    basis: BasisChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[command(flatten)]
    basis: BasisArgs,
    #[arg(long)]
    wmax: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write every boundary matrix and its basis into this directory.
    #[arg(long, value_name = "DIR")]
    dump_matrix: Option<PathBuf>,
    /// Write elimination reports as JSON to this file.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Run once per value, e.g. `alpha=-1,1,2`, and list differing cells.
    #[arg(long, value_name = "NAME=V1,V2,..")]
    sweep: Option<String>,
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> Self {
        CliOutput {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(stderr: String) -> Self {
        CliOutput {
            code: 2,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Runs one command line. Exit codes: 0 success, 1 verification difference
/// or Jacobi violation, 2 usage or input error.
pub fn run_cli<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliOutput::ok(text),
                _ => CliOutput::usage(text),
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => return CliOutput::usage(msg),
    };
    pool.install(|| match dispatch(cli.command) {
        Ok(out) => out,
        Err(e) => CliOutput::usage(format!("error: {e}\n")),
    })
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("error: {THREADS_ENV} must be a natural number, got `{v}`\n"))?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| format!("error: cannot start worker threads: {e}\n"))
}

fn dispatch(command: Command) -> Result<CliOutput, Error> {
    match command {
        Command::Catalog => Ok(CliOutput::ok(render_catalog())),
        Command::CheckJacobi(source) => check_jacobi(&source),
        Command::BracketTable(args) => {
            let (_, _, gs) = load(&args)?;
            Ok(CliOutput::ok(bracket_table(&gs).render()))
        }
        Command::Basis { basis, m, w } => {
            let (_, _, gs) = load(&basis)?;
            let mut out = String::new();
            let monos = chain_basis(&gs, m, w);
            let _ = writeln!(out, "# dim C_{m}^{w} = {}", monos.len());
            for mono in monos {
                out.push_str(&mono.render(&gs));
                out.push('\n');
            }
            Ok(CliOutput::ok(out))
        }
        Command::Table(args) => table(&args),
        Command::Verify { basis, expected, wmax } => verify(&basis, &expected, wmax),
    }
}

fn render_catalog() -> String {
    let entries = catalog();
    let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for e in entries {
        let params = if e.params.is_empty() { "-".to_string() } else { e.params.join(",") };
        let paper = if e.has_paper_basis { "  [paper basis]" } else { "" };
        let _ = writeln!(out, "{:width$}  dim {}  params {:11}  {}{}", e.name, e.dim, params, e.summary, paper);
    }
    out
}

fn bindings(source: &Source) -> Result<Bindings, Error> {
    let mut b = Bindings::new();
    for text in &source.params {
        let (name, value) = parse_binding(text)?;
        b.insert(name, value);
    }
    Ok(b)
}

fn spec_of(source: &Source) -> Result<(String, AlgebraSpec), Error> {
    match (&source.choice.algebra, &source.choice.file) {
        (Some(name), None) => Ok((name.clone(), catalog_spec(name)?)),
        (None, Some(path)) => {
            let spec = AlgebraSpec::from_json(&fs::read_to_string(path)?)?;
            Ok((spec.name.clone(), spec))
        }
        _ => unreachable!("clap enforces exactly one source"),
    }
}

fn check_jacobi(source: &Source) -> Result<CliOutput, Error> {
    let (name, spec) = spec_of(source)?;
    match spec.instantiate(&bindings(source)?) {
        Ok(_) => Ok(CliOutput::ok(format!("{name}: Jacobi identity holds\n"))),
        Err(Error::Jacobi(violations)) => {
            let mut out = format!("{name}: Jacobi identity fails for {} triple(s)\n", violations.len());
            for v in violations {
                let _ = writeln!(out, "{v}");
            }
            Ok(CliOutput {
                code: 1,
                stdout: out,
                stderr: String::new(),
            })
        }
        Err(e) => Err(e),
    }
}

fn system(name: &str, sc: &StructureConstants, b: &Bindings, basis: BasisChoice, from_catalog: bool) -> Result<GeneratorSystem, Error> {
    match basis {
        BasisChoice::Canonical => Ok(GeneratorSystem::canonical(sc)),
        BasisChoice::Paper => {
            let alias = if from_catalog { paper_basis(name, b)? } else { None };
            let alias = alias.ok_or_else(|| Error::Parse(format!("algebra `{name}` has no paper basis")))?;
            GeneratorSystem::with_aliases(sc, &[alias])
        }
    }
}

fn load(args: &BasisArgs) -> Result<(String, Bindings, GeneratorSystem), Error> {
    let b = bindings(&args.source)?;
    let (name, spec) = spec_of(&args.source)?;
    let sc = spec.instantiate(&b)?;
    let gs = system(&name, &sc, &b, args.basis, args.source.choice.algebra.is_some())?;
    Ok((name, b, gs))
}

fn render(table: &BettiTable, format: Format) -> String {
    match format {
        Format::Json => table.to_json_string(),
        Format::Csv => table.to_csv(),
        Format::Md => table.to_markdown(),
    }
}

fn table(args: &TableArgs) -> Result<CliOutput, Error> {
    let Some(sweep) = &args.sweep else {
        let (name, b, gs) = load(&args.basis)?;
        let table = compute_table(&name, &b, &gs, args)?;
        return Ok(CliOutput::ok(render(&table, args.format)));
    };

    let (param, values) = sweep
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("sweep must look like name=v1,v2, got `{sweep}`")))?;
    let values: Vec<_> = values.split(',').map(parse_rational).collect::<Result<_, _>>()?;
    let b0 = bindings(&args.basis.source)?;
    let (name, spec) = spec_of(&args.basis.source)?;
    let mut tables = Vec::new();
    for v in &values {
        let mut b = b0.clone();
        b.insert(param.trim().to_string(), v.clone());
        let sc = spec.instantiate(&b)?;
        let gs = system(&name, &sc, &b, args.basis.basis, args.basis.source.choice.algebra.is_some())?;
        tables.push(compute_table(&name, &b, &gs, args)?);
    }
    let summary = sweep_summary(param.trim(), &values, &tables);
    Ok(match args.format {
        Format::Json => {
            let docs: Vec<_> = tables.iter().map(BettiTable::to_json).collect();
            CliOutput {
                code: 0,
                stdout: serde_json::to_string_pretty(&docs).expect("tables serialize") + "\n",
                stderr: summary,
            }
        }
        format => {
            let mut out = String::new();
            for t in &tables {
                out.push_str(&render(t, format));
                out.push('\n');
            }
            out.push_str(&summary);
            CliOutput::ok(out)
        }
    })
}

/// Lists every `(w, m)` whose Betti number changes across the sweep.
fn sweep_summary(param: &str, values: &[superhomology::Rational], tables: &[BettiTable]) -> String {
    let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, t) in tables.iter().enumerate() {
        for row in &t.rows {
            for &m in &row.degrees {
                cells.entry((row.w, m)).or_insert_with(|| vec![0; tables.len()])[i] = row.cell(m).betti;
            }
        }
    }
    let mut out = String::new();
    let differing: Vec<_> = cells.iter().filter(|(_, v)| v.windows(2).any(|p| p[0] != p[1])).collect();
    if differing.is_empty() {
        let _ = writeln!(out, "Betti numbers agree for every {param} in the sweep");
        return out;
    }
    let _ = writeln!(out, "Betti numbers differing across {param}:");
    for ((w, m), v) in differing {
        let parts: Vec<String> = values.iter().zip(v).map(|(x, b)| format!("{param}={x}: {b}")).collect();
        let _ = writeln!(out, "  w={w} m={m}  {}", parts.join(", "));
    }
    out
}

fn compute_table(name: &str, b: &Bindings, gs: &GeneratorSystem, args: &TableArgs) -> Result<BettiTable, Error> {
    if args.dump_matrix.is_none() && args.report.is_none() {
        return Ok(betti_table(gs, name, b, args.wmax));
    }
    let rows: Vec<RowComputation> = (0..=args.wmax).into_par_iter().map(|w| compute_row(gs, w)).collect();
    if let Some(dir) = &args.dump_matrix {
        dump_matrices(dir, gs, &rows)?;
    }
    if let Some(path) = &args.report {
        let reports: Vec<serde_json::Value> = rows
            .iter()
            .flat_map(|r| &r.boundaries)
            .map(|bd| {
                let mut v = bd.report.to_json();
                v["w"] = bd.w.into();
                v["m"] = bd.m.into();
                v["rows"] = bd.matrix.rows().into();
                v["cols"] = bd.matrix.cols().into();
                v
            })
            .collect();
        fs::write(path, serde_json::to_string_pretty(&reports)? + "\n")?;
    }
    Ok(BettiTable {
        algebra: name.to_string(),
        params: b.clone(),
        rows: rows.into_iter().map(|r| r.row).collect(),
    })
}

fn dump_matrices(dir: &Path, gs: &GeneratorSystem, rows: &[RowComputation]) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    for r in rows {
        let w = r.row.w;
        for (m, basis) in weight_basis(gs, w) {
            let mut text = String::new();
            for mono in basis {
                text.push_str(&mono.render(gs));
                text.push('\n');
            }
            fs::write(dir.join(format!("basis_w{w}_m{m}.txt")), text)?;
        }
        for bd in &r.boundaries {
            fs::write(dir.join(format!("d_w{w}_m{}.txt", bd.m)), bd.matrix.dump())?;
        }
    }
    Ok(())
}

fn verify(args: &BasisArgs, expected_path: &Path, wmax: Option<usize>) -> Result<CliOutput, Error> {
    let expected = ExpectedTable::parse(&fs::read_to_string(expected_path)?)?;
    let mut b = expected.params.clone();
    b.extend(bindings(&args.source)?);
    let (name, spec) = spec_of(&args.source)?;
    let sc = spec.instantiate(&b)?;
    let gs = system(&name, &sc, &b, args.basis, args.source.choice.algebra.is_some())?;
    let wmax = wmax.unwrap_or_else(|| expected.rows.iter().map(|r| r.w).max().unwrap_or(0));
    let computed = betti_table(&gs, &name, &b, wmax);
    let report = verify_table(&computed, &expected);
    Ok(CliOutput {
        code: if report.is_empty() { 0 } else { 1 },
        stdout: report.to_string(),
        stderr: String::new(),
    })
}
