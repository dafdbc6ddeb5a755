//! Command-line surface for the perfect-form toolkit.
//!
//! Exit codes: 0 on success, 1 on mathematical falsification or runtime
//! failure, 2 on usage errors (bad flags, malformed matrices).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use voronoi_forms::conefan::{cocore_height, extend, locate_cone, FanContext};
use voronoi_forms::exact::{QuadForm, SymLatticePoint};
use voronoi_forms::perfection::{
    enumerate_perfect, is_perfect, perfection_rank, PerfectFormRecord,
};
use voronoi_forms::picard::{
    canonical_class, intersect_c1, intersect_c2_sign, is_ample, is_nef, slope,
    slope_ring_finitely_generated, DivisorClass,
};
use voronoi_forms::shell::{
    catalog_load, catalog_save, catalog_to_file, catalog_verify, matrix_to_string, parse_matrix,
    quadform_to_doc, rat_to_string, records_from_file,
};
use voronoi_forms::shortvec::minimal_vectors;
use voronoi_forms::taibound::{
    exceptional_scan, min_fractional_sum, MinimumFlag, TaiProblem, ZeroConvention,
};
use voronoi_forms::toricsing::{
    classify_singularity, ToricCone, DEFAULT_SCAN_BUDGET,
};
use voronoi_forms::Error;

#[derive(Parser)]
#[command(
    name = "voronoi",
    about = "Exact arithmetic for perfect quadratic forms, the perfect cone decomposition, toric singularity certificates, and boundary divisor classes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct JsonFlag {
    /// Emit a machine-readable JSON document instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Arithmetical minimum and minimal vectors of a positive definite form.
    Minvec {
        /// Gram matrix, rows separated by ';', entries by ',' (rationals as p/q)
        gram: String,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Perfect-form operations.
    Perfect {
        #[command(subcommand)]
        sub: PerfectCmd,
    },
    /// Operations on the perfect cone fan.
    Fan {
        #[command(subcommand)]
        sub: FanCmd,
    },
    /// Toric singularity certificates.
    Toric {
        #[command(subcommand)]
        sub: ToricCmd,
    },
    /// Fractional-part sum minimization over unit residues.
    Tai(TaiArgs),
    /// Nef/ample tests for a·M − b·D divisor classes.
    Nef {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 2)]
        g: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// The canonical divisor class (g+1)M − D and its positivity.
    Canonical {
        #[arg(long)]
        g: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Catalog file operations.
    Catalog {
        #[command(subcommand)]
        sub: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum PerfectCmd {
    /// Perfection test and rank for a positive definite form.
    Check {
        gram: String,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Enumerate all perfect-form classes of a rank, with closure links.
    Enumerate {
        #[arg(long)]
        g: usize,
        /// Worker threads for the neighbor steps (output is identical
        /// for every value).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the catalog to this path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Neighbor links of one catalogued class.
    Neighbors {
        class_id: usize,
        #[arg(long)]
        catalog: PathBuf,
        #[command(flatten)]
        json: JsonFlag,
    },
}

#[derive(Subcommand)]
enum FanCmd {
    /// Locate the cone of the fan containing a symmetric lattice matrix.
    Locate {
        matrix: String,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Co-core height ⟨q, B⟩ / m(q) at the containing cone.
    Height {
        matrix: String,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// One-variable extension f ↦ f + m(f)·x².
    Extend {
        gram: String,
        #[command(flatten)]
        json: JsonFlag,
    },
}

#[derive(Subcommand)]
enum ToricCmd {
    /// Classify the toric singularity of a perfect cone (by catalogued
    /// class id with --catalog, or directly from a Gram matrix).
    Classify {
        /// class id (digits) or a Gram matrix
        target: String,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        json: JsonFlag,
    },
}

#[derive(Args)]
struct TaiArgs {
    #[command(subcommand)]
    sub: Option<TaiCmd>,
    /// Order of the automorphism.
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, value_parser = parse_convention, default_value = "zero-as-one")]
    convention: ZeroConvention,
    #[command(flatten)]
    json: JsonFlag,
}

#[derive(Subcommand)]
enum TaiCmd {
    /// List all orders up to --max whose refined bound is below one.
    Scan {
        #[arg(long)]
        max: u64,
        #[command(flatten)]
        json: JsonFlag,
    },
}

fn parse_convention(s: &str) -> Result<ZeroConvention, String> {
    match s {
        "zero-as-one" => Ok(ZeroConvention::ZeroAsOne),
        "zero-as-zero" => Ok(ZeroConvention::ZeroAsZero),
        other => Err(format!(
            "unknown convention '{other}' (expected zero-as-one or zero-as-zero)"
        )),
    }
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Reload a catalog and independently re-verify its records.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        json: JsonFlag,
    },
}

fn scan_budget() -> u128 {
    std::env::var("VORONOI_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_SCAN_BUDGET)
}

fn parse_quadform(s: &str) -> Result<QuadForm, Error> {
    QuadForm::from_rows(&parse_matrix(s)?)
}

fn parse_sym_lattice(s: &str) -> Result<SymLatticePoint, Error> {
    let rows = parse_matrix(s)?;
    let int_rows: Vec<Vec<voronoi_forms::Int>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(Error::InvalidArgument(
                            "lattice matrices must have integer entries".into(),
                        ))
                    }
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    SymLatticePoint::from_rows(&int_rows)
}

fn emit<T: Serialize>(json: bool, doc: &T, text: String) -> Result<(), Error> {
    if json {
        println!("{}", serde_json::to_string(doc)?);
    } else {
        println!("{text}");
    }
    Ok(())
}

#[derive(Serialize)]
struct MinvecDoc {
    minimum: String,
    kissing: usize,
    reps: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct PerfectCheckDoc {
    perfect: bool,
    perfection_rank: usize,
    full_rank: usize,
    minimum: String,
    kissing: usize,
}

#[derive(Serialize)]
struct EnumerateSummaryDoc {
    g: usize,
    classes: usize,
    kissing: Vec<usize>,
    determinants: Vec<String>,
}

#[derive(Serialize)]
struct NeighborsDoc {
    class: usize,
    links: Vec<NeighborLinkDoc>,
}

#[derive(Serialize)]
struct NeighborLinkDoc {
    facet: usize,
    neighbor: usize,
}

#[derive(Serialize)]
struct LocateDoc {
    class_id: usize,
    form: Vec<Vec<String>>,
    minimum: String,
    scale: String,
    twist: Vec<Vec<String>>,
    roots: Vec<Vec<String>>,
    coefficients: Vec<String>,
    crossings: usize,
}

#[derive(Serialize)]
struct HeightDoc {
    height: String,
}

#[derive(Serialize)]
struct ExtendDoc {
    gram: Vec<Vec<String>>,
    minimum: String,
    kissing: usize,
    perfection_rank: usize,
}

#[derive(Serialize)]
struct ToricDoc {
    classification: String,
    generators: usize,
}

#[derive(Serialize)]
struct TaiDoc {
    m: u64,
    min: String,
    minimizer: Vec<u64>,
}

#[derive(Serialize)]
struct TaiScanRowDoc {
    m: u64,
    refined_bound: String,
    min: String,
    relation_to_one: String,
}

#[derive(Serialize)]
struct NefDoc {
    a: String,
    b: String,
    g: u32,
    n: u32,
    nef: bool,
    ample: bool,
    c1_intersection: String,
    c2_sign: String,
    slope: Option<String>,
    slope_ring_finitely_generated: Option<bool>,
}

#[derive(Serialize)]
struct CatalogVerifyDoc {
    file: String,
    classes: usize,
    verified: bool,
}

fn load_records(path: &PathBuf) -> Result<(usize, Vec<PerfectFormRecord>), Error> {
    let file = catalog_load(path)?;
    let recs = records_from_file(&file)?;
    Ok((file.g, recs))
}

fn divisor_doc(d: &DivisorClass) -> Result<NefDoc, Error> {
    let lvl1 = d.to_level_one();
    let slope_val = slope(d).ok();
    let fin = if slope_val.is_some() {
        Some(slope_ring_finitely_generated(d)?)
    } else {
        None
    };
    Ok(NefDoc {
        a: rat_to_string(&d.a),
        b: rat_to_string(&d.b),
        g: d.g,
        n: d.n,
        nef: is_nef(d),
        ample: is_ample(d),
        c1_intersection: rat_to_string(&intersect_c1(&lvl1)?),
        c2_sign: intersect_c2_sign(d).to_string(),
        slope: slope_val.as_ref().map(rat_to_string),
        slope_ring_finitely_generated: fin,
    })
}

fn nef_text(doc: &NefDoc) -> String {
    let mut t = format!(
        "class {}M - {}D (g={}, n={}): nef={}, ample={}\nC1 intersection: {}\nC2 sign: {}",
        doc.a, doc.b, doc.g, doc.n, doc.nef, doc.ample, doc.c1_intersection, doc.c2_sign
    );
    if let Some(s) = &doc.slope {
        t.push_str(&format!("\nslope: {s}"));
    }
    if let Some(f) = doc.slope_ring_finitely_generated {
        t.push_str(&format!("\nslope ring finitely generated: {f}"));
    }
    t
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Minvec { gram, json } => {
            let q = parse_quadform(&gram)?;
            let mv = minimal_vectors(&q)?;
            let doc = MinvecDoc {
                minimum: rat_to_string(&mv.minimum),
                kissing: mv.kissing,
                reps: mv
                    .reps
                    .iter()
                    .map(|r| r.coords().iter().map(|c| c.to_string()).collect())
                    .collect(),
            };
            let reps_text = mv
                .reps
                .iter()
                .map(|r| {
                    format!(
                        "({})",
                        r.coords()
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect::<Vec<_>>()
                .join(" ");
            emit(
                json.json,
                &doc,
                format!(
                    "minimum {}  kissing {}\nreps (one per ± pair): {}",
                    doc.minimum, doc.kissing, reps_text
                ),
            )?;
        }
        Command::Perfect { sub } => match sub {
            PerfectCmd::Check { gram, json } => {
                let q = parse_quadform(&gram)?;
                let rank = perfection_rank(&q)?;
                let mv = minimal_vectors(&q)?;
                let doc = PerfectCheckDoc {
                    perfect: is_perfect(&q)?,
                    perfection_rank: rank,
                    full_rank: voronoi_forms::exact::sym_dim(q.g()),
                    minimum: rat_to_string(&mv.minimum),
                    kissing: mv.kissing,
                };
                emit(
                    json.json,
                    &doc,
                    format!(
                        "perfect: {} (perfection rank {}/{}, minimum {}, kissing {})",
                        doc.perfect, doc.perfection_rank, doc.full_rank, doc.minimum, doc.kissing
                    ),
                )?;
            }
            PerfectCmd::Enumerate { g, jobs, out, json } => {
                let records = enumerate_perfect(g, jobs)?;
                let file = catalog_to_file(g, &records)?;
                if let Some(path) = &out {
                    catalog_save(path, &file)?;
                }
                if json.json {
                    println!("{}", serde_json::to_string(&file)?);
                } else {
                    let doc = EnumerateSummaryDoc {
                        g,
                        classes: records.len(),
                        kissing: records.iter().map(|r| r.minvecs.kissing).collect(),
                        determinants: records
                            .iter()
                            .map(|r| rat_to_string(&r.form.det()))
                            .collect(),
                    };
                    let mut t = format!("g={} perfect-form classes: {}", doc.g, doc.classes);
                    for (i, r) in records.iter().enumerate() {
                        t.push_str(&format!(
                            "\n  class {i}: gram {}  kissing {}  det {}  facets {}",
                            matrix_to_string(&r.form.rows()),
                            r.minvecs.kissing,
                            rat_to_string(&r.form.det()),
                            r.cone.facets().len()
                        ));
                    }
                    if let Some(path) = &out {
                        t.push_str(&format!("\ncatalog written to {}", path.display()));
                    }
                    println!("{t}");
                }
            }
            PerfectCmd::Neighbors {
                class_id,
                catalog,
                json,
            } => {
                let (_, recs) = load_records(&catalog)?;
                let rec = recs.get(class_id).ok_or(Error::IndexOutOfRange {
                    index: class_id,
                    len: recs.len(),
                })?;
                let doc = NeighborsDoc {
                    class: class_id,
                    links: rec
                        .neighbors
                        .iter()
                        .map(|l| NeighborLinkDoc {
                            facet: l.facet,
                            neighbor: l.class,
                        })
                        .collect(),
                };
                let text = doc
                    .links
                    .iter()
                    .map(|l| format!("facet {} -> class {}", l.facet, l.neighbor))
                    .collect::<Vec<_>>()
                    .join("\n");
                emit(
                    json.json,
                    &doc,
                    format!("class {class_id} neighbor links:\n{text}"),
                )?;
            }
        },
        Command::Fan { sub } => match sub {
            FanCmd::Locate { matrix, json } => {
                let b = parse_sym_lattice(&matrix)?;
                let ctx = FanContext::new(b.g(), None)?;
                let cert = locate_cone(&b, &ctx)?;
                let doc = LocateDoc {
                    class_id: cert.class_id,
                    form: quadform_to_doc(&cert.form),
                    minimum: rat_to_string(&cert.minimum),
                    scale: rat_to_string(&cert.scale),
                    twist: cert
                        .twist
                        .rows()
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_string()).collect())
                        .collect(),
                    roots: cert
                        .roots
                        .iter()
                        .map(|r| r.coords().iter().map(|c| c.to_string()).collect())
                        .collect(),
                    coefficients: cert.coefficients.iter().map(rat_to_string).collect(),
                    crossings: cert.path.len(),
                };
                emit(
                    json.json,
                    &doc,
                    format!(
                        "located in class {} after {} crossings\nperfect form: {}\ncoefficients: [{}]",
                        doc.class_id,
                        doc.crossings,
                        matrix_to_string(&cert.form.rows()),
                        doc.coefficients.join(", ")
                    ),
                )?;
            }
            FanCmd::Height { matrix, json } => {
                let b = parse_sym_lattice(&matrix)?;
                let ctx = FanContext::new(b.g(), None)?;
                let h = cocore_height(&b, &ctx)?;
                let doc = HeightDoc {
                    height: rat_to_string(&h),
                };
                emit(json.json, &doc, format!("co-core height: {}", doc.height))?;
            }
            FanCmd::Extend { gram, json } => {
                let q = parse_quadform(&gram)?;
                let e = extend(&q)?;
                let mv = minimal_vectors(&e)?;
                let doc = ExtendDoc {
                    gram: quadform_to_doc(&e),
                    minimum: rat_to_string(&mv.minimum),
                    kissing: mv.kissing,
                    perfection_rank: perfection_rank(&e)?,
                };
                emit(
                    json.json,
                    &doc,
                    format!(
                        "extension: {}\nminimum {}  kissing {}  perfection rank {}",
                        matrix_to_string(&e.rows()),
                        doc.minimum,
                        doc.kissing,
                        doc.perfection_rank
                    ),
                )?;
            }
        },
        Command::Toric { sub } => match sub {
            ToricCmd::Classify {
                target,
                catalog,
                json,
            } => {
                let tc = if target.chars().all(|c| c.is_ascii_digit()) {
                    let id: usize = target.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad class id '{target}'"))
                    })?;
                    let path = catalog.ok_or_else(|| {
                        Error::InvalidArgument(
                            "classifying by class id requires --catalog".into(),
                        )
                    })?;
                    let (_, recs) = load_records(&path)?;
                    let rec = recs.get(id).ok_or(Error::IndexOutOfRange {
                        index: id,
                        len: recs.len(),
                    })?;
                    ToricCone::from_record(rec)?
                } else {
                    let q = parse_quadform(&target)?;
                    ToricCone::from_form(&q)?
                };
                let class = classify_singularity(&tc, scan_budget())?;
                let doc = ToricDoc {
                    classification: class.to_string(),
                    generators: tc.cone().generators().len(),
                };
                emit(
                    json.json,
                    &doc,
                    format!(
                        "classification: {} ({} generators)",
                        doc.classification, doc.generators
                    ),
                )?;
            }
        },
        Command::Tai(args) => match args.sub {
            Some(TaiCmd::Scan { max, json }) => {
                let rows = exceptional_scan(max)?;
                let docs: Vec<TaiScanRowDoc> = rows
                    .iter()
                    .map(|r| TaiScanRowDoc {
                        m: r.m,
                        refined_bound: rat_to_string(&r.refined_bound),
                        min: rat_to_string(&r.minimum.value),
                        relation_to_one: match r.flag {
                            MinimumFlag::EqualsOne => "= 1".into(),
                            MinimumFlag::GreaterThanOne => "> 1".into(),
                            MinimumFlag::LessThanOne => "< 1".into(),
                        },
                    })
                    .collect();
                if json.json {
                    println!("{}", serde_json::to_string(&docs)?);
                } else {
                    println!("orders with refined bound below one (m <= {max}):");
                    for d in &docs {
                        println!(
                            "  m={:<3} bound {}  exact min {} ({})",
                            d.m, d.refined_bound, d.min, d.relation_to_one
                        );
                    }
                }
            }
            None => {
                let m = args.m.ok_or_else(|| {
                    Error::InvalidArgument("tai requires --m M or the scan subcommand".into())
                })?;
                let p = TaiProblem::new(m, args.convention)?;
                let result = min_fractional_sum(&p);
                let doc = TaiDoc {
                    m,
                    min: rat_to_string(&result.value),
                    minimizer: result.minimizer.clone(),
                };
                emit(
                    args.json.json,
                    &doc,
                    format!(
                        "m={}: minimum {} at representatives {:?}",
                        m, doc.min, doc.minimizer
                    ),
                )?;
            }
        },
        Command::Nef { a, b, g, n, json } => {
            let a = voronoi_forms::shell::rat_from_string(&a)?;
            let b = voronoi_forms::shell::rat_from_string(&b)?;
            let d = DivisorClass::new(a, b, g, n)?;
            let doc = divisor_doc(&d)?;
            emit(json.json, &doc, nef_text(&doc))?;
        }
        Command::Canonical { g, n, json } => {
            let d = canonical_class(g, n)?;
            let doc = divisor_doc(&d)?;
            emit(
                json.json,
                &doc,
                format!("canonical class of genus {g} at level {n}:\n{}", nef_text(&doc)),
            )?;
        }
        Command::Catalog { sub } => match sub {
            CatalogCmd::Verify { file, json } => {
                let parsed = catalog_load(&file)?;
                let result = catalog_verify(&parsed);
                let verified = result.is_ok();
                let doc = CatalogVerifyDoc {
                    file: file.display().to_string(),
                    classes: parsed.classes.len(),
                    verified,
                };
                emit(
                    json.json,
                    &doc,
                    match &result {
                        Ok(()) => format!(
                            "catalog {} verified: {} classes, digest and records consistent",
                            doc.file, doc.classes
                        ),
                        Err(e) => format!("catalog {} FAILED verification: {e}", doc.file),
                    },
                )?;
                return Ok(verified);
            }
        },
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let usage = matches!(
                e,
                Error::InvalidArgument(_)
                    | Error::DimensionMismatch(_)
                    | Error::NotSymmetric
                    | Error::IndexOutOfRange { .. }
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
