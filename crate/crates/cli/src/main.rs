//! `vknot`: batch front end printing JSON reports on standard output.
//!
//! Exit codes: 0 success, 2 parse or validation error, 3 resource cap.

use std::io::Write;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vknot::algebra::enumerate_biracks;
use vknot::braids::{close_braid, flat_quotient, rho_image, verify_presentation, BraidWord};
use vknot::catalog::{catalog, lookup, named_birack, resolve_code, CatalogDiagram};
use vknot::homology::{boundary_matrices, homology, HomologyError, Variant};
use vknot::moves::{simplify_with_certificate, Budget};
use vknot::planar::{flat_linking, realize, PlanarDiagram};
use vknot::report::{distinguish, report, Invariant, ReportError, REPORT_VERSION};

#[derive(Parser)]
#[command(name = "vknot", version, about = "Virtual knot invariants from Gauss codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute invariants of a catalog entry or a Gauss code.
    Invariants(InvariantArgs),
    /// List the shipped catalog.
    Catalog,
    /// Compare two inputs with the invariant battery.
    Distinguish { a: String, b: String },
    /// Homology of a named birack (`R<m>`, `T<m>`) or a table file.
    Homology(HomologyArgs),
    /// Virtual braid words: closure, free group image, relation checks.
    Braid(BraidArgs),
    /// Reduce a code by Reidemeister moves and print the certificate.
    Simplify {
        input: String,
        /// Search depth between greedy reductions.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Mod-2 count of virtual crossings between components of a flat diagram.
    FlatLinking {
        /// Catalog name of a planar entry, or a diagram file.
        input: String,
    },
    /// Draw a code as a planar diagram, adding virtual crossings as needed.
    Realize { input: String },
    /// Count biracks and biquandles of a given order, up to isomorphism.
    Enumerate {
        #[arg(long)]
        order: usize,
        /// Also print every table.
        #[arg(long)]
        tables: bool,
    },
}

#[derive(Args)]
struct InvariantArgs {
    input: String,
    #[arg(long)]
    all: bool,
    /// Number of components.
    #[arg(long)]
    components: bool,
    /// Normalized bracket f.
    #[arg(long)]
    f: bool,
    /// Bracket, writhe, state counts and span bound.
    #[arg(long)]
    bracket: bool,
    /// Crossing count and carrier genus.
    #[arg(long)]
    genus: bool,
    /// Generalized Alexander polynomial G(s,t).
    #[arg(long)]
    galex: bool,
    /// Gcd of the codimension-1 Alexander minors.
    #[arg(long)]
    alex_ideal: bool,
    /// Study determinant and codimension-1 gcd of the quaternionic matrix.
    #[arg(long)]
    quat: bool,
    /// Coloring counts by involutory quandles of order at most 4.
    #[arg(long)]
    iq: bool,
    /// Coloring counts by biquandles of order at most 3.
    #[arg(long)]
    colorings: bool,
}

impl InvariantArgs {
    fn selected(&self) -> Vec<Invariant> {
        let flags = [
            (self.components, Invariant::Components),
            (self.f, Invariant::F),
            (self.bracket, Invariant::Bracket),
            (self.genus, Invariant::Genus),
            (self.galex, Invariant::Galex),
            (self.alex_ideal, Invariant::AlexIdeal),
            (self.quat, Invariant::Quat),
            (self.iq, Invariant::Iq),
            (self.colorings, Invariant::Colorings),
        ];
        let chosen: Vec<Invariant> = flags.iter().filter(|f| f.0).map(|f| f.1).collect();
        if self.all || chosen.is_empty() {
            Invariant::ALL.to_vec()
        } else {
            chosen
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HomologyVariant {
    /// The full cubical complex (rack homology for quandles).
    Full,
    Rack,
    /// The quotient by degenerate cubes.
    Quandle,
    Biquandle,
}

#[derive(Args)]
struct HomologyArgs {
    #[arg(long)]
    birack: String,
    #[arg(long)]
    degree: usize,
    #[arg(long, value_enum, default_value = "full")]
    variant: HomologyVariant,
}

#[derive(Args)]
#[command(group(ArgGroup::new("action").required(true).args(["close", "rho", "verify", "flat"])))]
struct BraidArgs {
    #[arg(long, default_value = "")]
    word: String,
    /// Number of strands.
    #[arg(long)]
    n: usize,
    /// Gauss code of the closure.
    #[arg(long)]
    close: bool,
    /// With --close, add the invariant report of the closure.
    #[arg(long, requires = "close")]
    invariants: bool,
    /// Image in Aut(F_{n+1}).
    #[arg(long)]
    rho: bool,
    /// Check the defining relations on n strands.
    #[arg(long)]
    verify: bool,
    /// Image in the flat braid group.
    #[arg(long)]
    flat: bool,
}

enum Failure {
    Invalid(String),
    Cap(String),
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::ResourceCap { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn run(cli: Cli) -> Result<Value, Failure> {
    match cli.command {
        Command::Invariants(args) => {
            let code = resolve_code(&args.input).map_err(invalid)?;
            Ok(json!(report(&args.input, &code, &args.selected())?))
        }
        Command::Catalog => {
            let entries: Vec<Value> = catalog()
                .iter()
                .map(|e| {
                    let (kind, diagram) = match &e.diagram {
                        CatalogDiagram::Gauss(c) => ("gauss", c.to_string()),
                        CatalogDiagram::Planar(d) => ("planar", d.to_string()),
                    };
                    json!({ "name": e.name, "kind": kind, "diagram": diagram, "note": e.note, "expect": e.expect })
                })
                .collect();
            Ok(json!({ "version": REPORT_VERSION, "entries": entries }))
        }
        Command::Distinguish { a, b } => {
            let ca = resolve_code(&a).map_err(invalid)?;
            let cb = resolve_code(&b).map_err(invalid)?;
            Ok(json!({ "version": REPORT_VERSION, "a": a, "b": b, "result": distinguish(&ca, &cb)? }))
        }
        Command::Homology(args) => {
            let text = std::fs::read_to_string(&args.birack).unwrap_or_else(|_| args.birack.clone());
            let b = named_birack(&text).map_err(invalid)?;
            let variant = match args.variant {
                HomologyVariant::Full | HomologyVariant::Rack => Variant::Full,
                HomologyVariant::Quandle | HomologyVariant::Biquandle => Variant::BiquandleQuotient,
            };
            let cap = |e: HomologyError| match e {
                HomologyError::SizeCap { .. } => Failure::Cap(e.to_string()),
                _ => invalid(e),
            };
            let complex = boundary_matrices(&b, args.degree + 1).map_err(cap)?;
            let h = homology(&complex, args.degree, variant).map_err(cap)?;
            Ok(json!({
                "version": REPORT_VERSION,
                "birack": args.birack,
                "order": b.order,
                "variant": variant,
                "degree": h.degree,
                "free_rank": h.free_rank,
                "torsion": h.torsion,
                "group": h.to_string(),
            }))
        }
        Command::Braid(args) => {
            let w = BraidWord::parse(&args.word, args.n).map_err(invalid)?;
            let mut out = json!({ "version": REPORT_VERSION, "word": w.to_string(), "strands": w.strands });
            if args.close {
                let code = close_braid(&w);
                out["closure"] = json!(code.to_string());
                if args.invariants {
                    out["invariants"] = json!(report(&code.to_string(), &code, &Invariant::ALL)?.invariants);
                }
            }
            if args.rho {
                let a = rho_image(&w);
                out["rho"] = json!(a.to_string());
            }
            if args.verify {
                if !(2..=6).contains(&args.n) {
                    return Err(invalid("relation checks cover 2 to 6 strands"));
                }
                let r = verify_presentation(args.n);
                out["all_hold"] = json!(r.all_hold());
                out["failures"] = json!(r.failures().collect::<Vec<_>>());
                out["checked"] = json!(r.checks.len());
            }
            if args.flat {
                out["flat"] = json!(flat_quotient(&w).to_string());
            }
            Ok(out)
        }
        Command::Simplify { input, depth } => {
            let code = resolve_code(&input).map_err(invalid)?;
            let cert = simplify_with_certificate(&code, Budget::steps(depth));
            Ok(json!({
                "version": REPORT_VERSION,
                "input": code.to_string(),
                "output": cert.output.to_string(),
                "crossings": [code.chord_count(), cert.output.chord_count()],
                "moves": cert.moves,
            }))
        }
        Command::FlatLinking { input } => {
            let d = match lookup(&input) {
                Ok(e) => match &e.diagram {
                    CatalogDiagram::Planar(d) => d.clone(),
                    CatalogDiagram::Gauss(_) => return Err(invalid(format!("{input} is not a planar diagram"))),
                },
                Err(_) => {
                    let text = std::fs::read_to_string(&input).map_err(|e| invalid(format!("{input}: {e}")))?;
                    PlanarDiagram::parse(&text).map_err(invalid)?
                }
            };
            Ok(json!({ "version": REPORT_VERSION, "input": input, "flat_linking": flat_linking(&d) }))
        }
        Command::Realize { input } => {
            let code = resolve_code(&input).map_err(invalid)?;
            let d = realize(&code);
            Ok(json!({
                "version": REPORT_VERSION,
                "code": code.to_string(),
                "virtual_crossings": d.crossing_count(vknot::planar::CrossingKind::Virtual),
                "diagram": d.to_string(),
            }))
        }
        Command::Enumerate { order, tables } => {
            if !(1..=4).contains(&order) {
                return Err(Failure::Cap(format!("enumeration covers orders 1 to 4, got {order}")));
            }
            let all = enumerate_biracks(order, |_| true);
            let mut out = json!({
                "version": REPORT_VERSION,
                "order": order,
                "biracks": all.len(),
                "biquandles": all.iter().filter(|b| b.is_biquandle).count(),
                "strong": all.iter().filter(|b| b.is_strong).count(),
            });
            if tables {
                out["tables"] = json!(all.iter().map(|b| b.to_table_text()).collect::<Vec<_>>());
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v).expect("reports serialize");
            // a closed pipe downstream is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("resource cap: {m}");
            ExitCode::from(3)
        }
    }
}
