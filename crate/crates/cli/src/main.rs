use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use intsec::catalog::{build_catalog, build_catalog_matching, export, verify_tables, Format, TableFixture};
use intsec::rootsys::LatticeSpec;
use intsec::weierstrass::{
    classify_bound, discriminant, search_sections, squarefree_structure, verify_section, BoundVerdict, Poly,
    WeierstrassModel,
};

#[derive(Parser)]
#[command(name = "intsec", version, about = "Integral sections of rational elliptic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all 74 entries.
    Catalog {
        #[arg(long, default_value = "csv", value_parser = parse_format)]
        format: Format,
    },
    /// Compute the entries for one table number or one trivial lattice.
    Type {
        #[command(flatten)]
        select: Selector,
        #[arg(long, default_value = "csv", value_parser = parse_format)]
        format: Format,
    },
    /// Compare the computed catalog with a reference fixture.
    Verify {
        /// CSV or JSON fixture; defaults to the built-in corrected tables.
        #[arg(long, conflicts_with = "printed")]
        fixture: Option<PathBuf>,
        /// Compare with the tables exactly as printed, without corrections.
        #[arg(long)]
        printed: bool,
    },
    /// Print Σ m·# against 240 − v(T) for every entry.
    Identity,
    /// Discriminant, fibre configuration and section-count verdict of a model.
    WstAnalyze { file: PathBuf },
    /// Check whether (x, y) is a polynomial section of a model.
    WstVerifySection {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: Poly,
        #[arg(long, allow_hyphen_values = true)]
        y: Poly,
    },
    /// List sections with x = gt² + ht + k, coefficients p/q with |p| ≤ box, q ≤ den.
    WstSearch {
        file: PathBuf,
        #[arg(long = "box")]
        bound: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        den: u32,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Selector {
    #[arg(long = "no")]
    number: Option<u32>,
    #[arg(long)]
    lattice: Option<LatticeSpec>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e| format!("{e}"))
}

/// Failure of a command: `Mismatch` exits 1, `Usage` exits 2.
enum Failure {
    Mismatch(String),
    Usage(String),
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read_model(path: &Path) -> Result<WeierstrassModel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    WeierstrassModel::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_fixture(path: &Path) -> Result<TableFixture, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|x| x == "json") {
        TableFixture::from_json(&text)
    } else {
        TableFixture::from_csv(&text)
    };
    parsed.map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn verdict_summary(v: &BoundVerdict) -> String {
    match (v.exact_count(), v.lower_bound(), v.upper_bound()) {
        (Some(n), _, _) => format!("n = {n}"),
        (None, Some(lo), _) => format!("n >= {lo}"),
        (None, None, Some(hi)) => format!("n <= {hi}"),
        (None, None, None) => "n unbounded by the clause".to_string(),
    }
}

fn analyze(m: &WeierstrassModel) -> Result<String, Failure> {
    let d = discriminant(m).map_err(usage)?;
    let v = classify_bound(m).map_err(usage)?;
    let mut out = String::new();
    writeln!(out, "discriminant: {d}").unwrap();
    write!(out, "roots:").unwrap();
    for (f, k) in &squarefree_structure(&d).factors {
        write!(out, " ({f})^{k}").unwrap();
    }
    writeln!(out, "\ndistinct roots: {}, degree: {}", v.distinct_roots, v.degree).unwrap();
    match &v.configuration {
        Some(c) => {
            writeln!(out, "fibres:").unwrap();
            for (place, t) in &c.places {
                writeln!(out, "  {place}: {t}").unwrap();
            }
            writeln!(out, "euler total: {}", c.euler_total).unwrap();
            writeln!(out, "trivial lattice: {}", c.trivial_lattice()).unwrap();
        }
        None => writeln!(out, "fibres: model is not minimal").unwrap(),
    }
    writeln!(out, "verdict: {} ({})", v.category, v.detail).unwrap();
    for e in &v.exact_rows {
        write!(out, "  No.{} {}:", e.number, e.spec).unwrap();
        for r in &e.rows {
            write!(out, " ({},{},{})", r.height, r.m, r.count).unwrap();
        }
        writeln!(out).unwrap();
    }
    writeln!(out, "{}", verdict_summary(&v)).unwrap();
    Ok(out)
}

fn run(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Catalog { format } => Ok(export(&build_catalog().map_err(usage)?, format)),
        Command::Type { select, format } => {
            let entries = match (select.number, &select.lattice) {
                (Some(no), _) => build_catalog_matching(|e| e.number == no),
                (None, Some(spec)) => build_catalog_matching(|e| &e.spec == spec),
                (None, None) => unreachable!("clap enforces the group"),
            }
            .map_err(usage)?;
            if entries.is_empty() {
                return Err(usage("no table entry matches"));
            }
            Ok(export(&entries, format))
        }
        Command::Verify { fixture, printed } => {
            let reference = match (fixture, printed) {
                (Some(path), _) => read_fixture(&path)?,
                (None, true) => TableFixture::verbatim(),
                (None, false) => TableFixture::embedded(),
            };
            let computed = build_catalog().map_err(usage)?;
            let found = verify_tables(&computed, &reference);
            let mut out = String::new();
            for d in &found {
                writeln!(out, "{d}").unwrap();
            }
            let bad: std::collections::BTreeSet<u32> = found.iter().map(|d| d.number).collect();
            let total = reference.entries.len();
            writeln!(out, "{}/{total} entries match", total.saturating_sub(bad.len())).unwrap();
            if found.is_empty() {
                Ok(out)
            } else {
                Err(Failure::Mismatch(out))
            }
        }
        Command::Identity => {
            let mut out = String::new();
            let mut ok = true;
            for e in build_catalog().map_err(usage)? {
                let (lhs, rhs) = (e.weighted_total(), 240 - e.v as u64);
                ok &= lhs == rhs;
                writeln!(out, "{:>2} {:<12} {lhs:>3} {rhs:>3} {}", e.number, e.spec, if lhs == rhs { "ok" } else { "FAIL" })
                    .unwrap();
            }
            if ok {
                Ok(out)
            } else {
                Err(Failure::Mismatch(out))
            }
        }
        Command::WstAnalyze { file } => analyze(&read_model(&file)?),
        Command::WstVerifySection { file, x, y } => Ok(format!("{}\n", verify_section(&read_model(&file)?, &x, &y))),
        Command::WstSearch { file, bound, den } => {
            let m = read_model(&file)?;
            let mut out = String::new();
            for (x, y) in search_sections(&m, bound, den) {
                writeln!(out, "x = {x}, y = {y}").unwrap();
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Mismatch(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
