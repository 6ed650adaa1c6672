//! Command-line front end: count tables, ownership partitions, verification
//! campaigns, and functional-list export, with deterministic text/json/csv
//! output and exit codes 0 (pass), 1 (verification failure), 2 (bad input).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ssfem::{
    build_element, faces, family_profile, partition, verify_continuity, verify_counts,
    verify_unisolvence, Count, Error, Face, SmoothnessProfile,
};

#[derive(Parser)]
#[command(
    name = "ssfem",
    about = "Exact degree-of-freedom construction and verification for smooth simplex elements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the degree-of-freedom count table, aggregated by face dimension.
    Count(TableArgs),
    /// Print the ownership partition with per-face detail.
    Partition(TableArgs),
    /// Cross-check the partition against constructive formulas and pinned constants.
    Verify(ProfileArgs),
    /// Certify exact full rank of the nodal matrix.
    Unisolvence(UnisolvenceArgs),
    /// Certify zero derivative jumps across the shared facet of a two-element mesh.
    Continuity(ContinuityArgs),
    /// Export the full nodal functional list (dimensions 1 through 3).
    Export(ExportArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// Ambient dimension n of the simplex.
    #[arg(long, short = 'n')]
    dim: usize,
    /// Family smoothness parameter m; the facet order is m, orders double downward.
    #[arg(long, short = 'm', default_value_t = 1)]
    smoothness: u32,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    base: ProfileArgs,
    /// Override the polynomial degree.
    #[arg(long)]
    degree: Option<u32>,
    /// Override the face smoothness orders r_0,..,r_{n-1} (requires --degree).
    #[arg(long = "profile", value_delimiter = ',', value_name = "R0,R1,..")]
    orders: Option<Vec<u32>>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct UnisolvenceArgs {
    #[command(flatten)]
    base: ProfileArgs,
    /// Nodal matrix size cap; also settable via SSFEM_CAP.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args)]
struct ContinuityArgs {
    #[command(flatten)]
    base: ProfileArgs,
    /// Seed for the deterministic coefficient and sample-point generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample points per positive-dimensional shared face.
    #[arg(long, default_value_t = 25)]
    samples: usize,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    base: ProfileArgs,
    /// Output format (text or json).
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

// ---- serialized shapes -----------------------------------------------------
// All numbers travel as decimal strings so downstream tools never squeeze
// them through 53-bit floats.

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct CountDto {
    dimension: String,
    degree: String,
    profile: Vec<String>,
    faces: Vec<FaceCountDto>,
    grand_total: String,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct FaceCountDto {
    face_dim: String,
    num_faces: String,
    per_face_counts_by_order: Vec<(String, String)>,
    per_face_total: String,
    dimension_total: String,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct PartitionDto {
    dimension: String,
    degree: String,
    profile: Vec<String>,
    faces: Vec<FaceCellDto>,
    grand_total: String,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct FaceCellDto {
    vertices: Vec<String>,
    counts_by_order: Vec<(String, String)>,
    total: String,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct ExportDto {
    dimension: String,
    degree: String,
    profile: Vec<String>,
    functionals: Vec<FunctionalDto>,
    total: String,
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct FunctionalDto {
    owner: Vec<String>,
    order: String,
    direction_multiorder: Vec<String>,
    point: Vec<String>,
    source_index: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InternalVerification(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cmd: Command) -> ssfem::Result<bool> {
    match cmd {
        Command::Count(args) => {
            let profile = resolve_profile(&args)?;
            let table = count_table(&profile)?;
            let body = match args.format {
                Format::Text => render_count_text(&table.dto),
                Format::Json => to_json(&table.dto),
                Format::Csv => table.csv,
            };
            emit(&args.output, &body)?;
            Ok(true)
        }
        Command::Partition(args) => {
            let profile = resolve_profile(&args)?;
            let dto = partition_table(&profile)?;
            let body = match args.format {
                Format::Text => render_partition_text(&dto),
                Format::Json => to_json(&dto),
                Format::Csv => render_partition_csv(&dto),
            };
            emit(&args.output, &body)?;
            Ok(true)
        }
        Command::Verify(args) => {
            let cmp = verify_counts(args.dim, args.smoothness)?;
            println!(
                "profile: dimension {}, degree {}, orders {:?}",
                args.dim,
                cmp.profile.degree(),
                cmp.profile.orders()
            );
            println!(
                "partition grand total = {} (polynomial space dimension)",
                cmp.partition.grand_total()
            );
            println!(
                "constructive formulas: {}",
                if cmp.constructive.is_some() {
                    "checked"
                } else {
                    "not available for this profile; partition-only"
                }
            );
            println!(
                "reference constants: {}",
                if cmp.reference_constants_checked {
                    "checked"
                } else {
                    "none pinned for this profile"
                }
            );
            println!(
                "same-dimension face symmetry: {}",
                if cmp.symmetric { "ok" } else { "BROKEN" }
            );
            for m in &cmp.mismatches {
                println!("mismatch: {m}");
            }
            if cmp.passed() {
                println!("verified: all counts agree");
            } else {
                println!("FAILED: {} mismatches", cmp.mismatches.len());
            }
            Ok(cmp.passed())
        }
        Command::Unisolvence(args) => {
            let cap = resolve_cap(args.cap)?;
            let rep = verify_unisolvence(args.base.dim, args.base.smoothness, cap)?;
            println!(
                "nodal matrix {}x{}: rank {}",
                rep.matrix_dim, rep.matrix_dim, rep.rank
            );
            if rep.passed() {
                println!("unisolvent: the functionals determine the polynomial uniquely");
            } else {
                println!("FAILED: rank deficiency {}", rep.matrix_dim - rep.rank);
            }
            Ok(rep.passed())
        }
        Command::Continuity(args) => {
            let rep = verify_continuity(args.base.dim, args.base.smoothness, args.seed, args.samples)?;
            println!(
                "two-element mesh, dimension {}, degree {}, seed {}, {} samples per face",
                args.base.dim,
                rep.profile.degree(),
                rep.seed,
                rep.samples
            );
            println!("shared dofs = {}", rep.shared_dofs);
            println!("checked jumps = {}", rep.checked_jumps);
            println!("max jump = {}", rep.max_jump);
            if !rep.passed() {
                println!("FAILED: nonzero derivative jump across the shared facet");
            }
            Ok(rep.passed())
        }
        Command::Export(args) => {
            if args.base.dim > 3 {
                return Err(Error::InvalidArgument(format!(
                    "functional export covers dimensions 1 through 3, got {}",
                    args.base.dim
                )));
            }
            let spec = build_element(args.base.dim, args.base.smoothness)?;
            let dto = export_table(&spec);
            let body = match args.format {
                Format::Text => render_export_text(&dto),
                Format::Json => to_json(&dto),
                Format::Csv => {
                    return Err(Error::InvalidArgument(
                        "export supports text or json output".into(),
                    ))
                }
            };
            emit(&args.output, &body)?;
            Ok(true)
        }
    }
}

fn resolve_profile(args: &TableArgs) -> ssfem::Result<SmoothnessProfile> {
    let n = args.base.dim;
    match (&args.orders, args.degree) {
        (Some(orders), Some(k)) => {
            if !(1..=5).contains(&n) {
                return Err(Error::UnsupportedDimension(n));
            }
            if orders.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "profile override lists {} orders; dimension {n} needs exactly {n}",
                    orders.len()
                )));
            }
            SmoothnessProfile::new(orders.clone(), k)
        }
        (Some(_), None) => Err(Error::InvalidArgument(
            "--profile override requires --degree".into(),
        )),
        (None, Some(k)) => {
            let base = family_profile(n, args.base.smoothness)?;
            SmoothnessProfile::new(base.orders().to_vec(), k)
        }
        (None, None) => family_profile(n, args.base.smoothness),
    }
}

fn resolve_cap(flag: Option<usize>) -> ssfem::Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("SSFEM_CAP") {
        Ok(raw) => raw.trim().parse::<usize>().map(Some).map_err(|_| {
            Error::InvalidArgument(format!("SSFEM_CAP must be a non-negative integer, got {raw:?}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::InvalidArgument(format!("SSFEM_CAP: {e}"))),
    }
}

fn emit(output: &Option<PathBuf>, body: &str) -> ssfem::Result<()> {
    match output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization is infallible");
    s.push('\n');
    s
}

// ---- table construction -----------------------------------------------------

fn profile_strings(profile: &SmoothnessProfile) -> Vec<String> {
    profile.orders().iter().map(|r| r.to_string()).collect()
}

struct CountTable {
    dto: CountDto,
    csv: String,
}

fn count_table(profile: &SmoothnessProfile) -> ssfem::Result<CountTable> {
    let n = profile.ambient_dim();
    let report = partition(profile)?;
    let mut out = Vec::new();
    let mut csv = String::from("face_dim,order,per_face,num_faces,total\n");
    for d in 0..=n {
        let dim_faces = if d == n {
            vec![Face::full(n)]
        } else {
            faces(n, d)?
        };
        let empty = std::collections::BTreeMap::new();
        let hist = report.counts().get(&dim_faces[0]).unwrap_or(&empty);
        // The grid is symmetric under vertex relabeling, so every face of one
        // dimension must own the same per-order histogram.
        for face in &dim_faces[1..] {
            if report.counts().get(face).unwrap_or(&empty) != hist {
                return Err(Error::InternalVerification(format!(
                    "faces of dimension {d} own unequal histograms"
                )));
            }
        }
        let num_faces = dim_faces.len() as u64;
        let mut per_face_total = Count::zero();
        for (t, c) in hist {
            per_face_total += c;
            let _ = writeln!(
                csv,
                "{d},{t},{c},{num_faces},{}",
                c.clone() * num_faces
            );
        }
        let dimension_total = per_face_total.clone() * num_faces;
        if dimension_total != report.per_dim_totals()[d] {
            return Err(Error::InternalVerification(format!(
                "dimension {d} total disagrees with the partition census"
            )));
        }
        out.push(FaceCountDto {
            face_dim: d.to_string(),
            num_faces: num_faces.to_string(),
            per_face_counts_by_order: hist
                .iter()
                .map(|(t, c)| (t.to_string(), c.to_string()))
                .collect(),
            per_face_total: per_face_total.to_string(),
            dimension_total: dimension_total.to_string(),
        });
    }
    let dto = CountDto {
        dimension: n.to_string(),
        degree: profile.degree().to_string(),
        profile: profile_strings(profile),
        faces: out,
        grand_total: report.grand_total().to_string(),
    };
    Ok(CountTable { dto, csv })
}

fn partition_table(profile: &SmoothnessProfile) -> ssfem::Result<PartitionDto> {
    let n = profile.ambient_dim();
    let report = partition(profile)?;
    let mut out = Vec::new();
    for (face, orders) in report.counts() {
        let mut total = Count::zero();
        for c in orders.values() {
            total += c;
        }
        out.push(FaceCellDto {
            vertices: face.vertices().iter().map(|v| v.to_string()).collect(),
            counts_by_order: orders
                .iter()
                .map(|(t, c)| (t.to_string(), c.to_string()))
                .collect(),
            total: total.to_string(),
        });
    }
    Ok(PartitionDto {
        dimension: n.to_string(),
        degree: profile.degree().to_string(),
        profile: profile_strings(profile),
        faces: out,
        grand_total: report.grand_total().to_string(),
    })
}

fn export_table(spec: &ssfem::ElementSpec) -> ExportDto {
    ExportDto {
        dimension: spec.profile.ambient_dim().to_string(),
        degree: spec.profile.degree().to_string(),
        profile: profile_strings(&spec.profile),
        functionals: spec
            .functionals
            .iter()
            .map(|f| FunctionalDto {
                owner: f.owner.vertices().iter().map(|v| v.to_string()).collect(),
                order: f.order.to_string(),
                direction_multiorder: f
                    .direction_multiorder
                    .iter()
                    .map(|o| o.to_string())
                    .collect(),
                point: f.point.coords().iter().map(|c| c.to_string()).collect(),
                source_index: f
                    .source_index
                    .entries()
                    .iter()
                    .map(|e| e.to_string())
                    .collect(),
            })
            .collect(),
        total: spec.functionals.len().to_string(),
    }
}

// ---- rendering ---------------------------------------------------------------

fn header_line(dto_dim: &str, dto_degree: &str, profile: &[String]) -> String {
    format!(
        "dimension {}, degree {}, orders [{}]\n",
        dto_dim,
        dto_degree,
        profile.join(", ")
    )
}

fn render_count_text(dto: &CountDto) -> String {
    let mut s = header_line(&dto.dimension, &dto.degree, &dto.profile);
    for f in &dto.faces {
        let label = if f.face_dim == dto.dimension {
            format!("dim {} (interior)", f.face_dim)
        } else {
            format!("dim {}", f.face_dim)
        };
        let _ = writeln!(
            s,
            "{label}: {} x {} = {}",
            f.num_faces, f.per_face_total, f.dimension_total
        );
        for (t, c) in &f.per_face_counts_by_order {
            let _ = writeln!(s, "    order {t}: {c}");
        }
    }
    let _ = writeln!(s, "total {}", dto.grand_total);
    s
}

fn render_partition_text(dto: &PartitionDto) -> String {
    let mut s = header_line(&dto.dimension, &dto.degree, &dto.profile);
    let n: usize = dto.dimension.parse().expect("own serialization");
    for f in &dto.faces {
        let label = if f.vertices.len() == n + 1 {
            "interior"
        } else {
            "face"
        };
        let orders: Vec<String> = f
            .counts_by_order
            .iter()
            .map(|(t, c)| format!("{t}:{c}"))
            .collect();
        let _ = writeln!(
            s,
            "{label} {{{}}}: total {}; orders {}",
            f.vertices.join(","),
            f.total,
            orders.join(" ")
        );
    }
    let _ = writeln!(s, "total {}", dto.grand_total);
    s
}

fn render_partition_csv(dto: &PartitionDto) -> String {
    let mut s = String::from("face,order,count\n");
    for f in &dto.faces {
        for (t, c) in &f.counts_by_order {
            let _ = writeln!(s, "{},{},{}", f.vertices.join("-"), t, c);
        }
    }
    s
}

fn render_export_text(dto: &ExportDto) -> String {
    let mut s = header_line(&dto.dimension, &dto.degree, &dto.profile);
    for f in &dto.functionals {
        let _ = writeln!(
            s,
            "owner {{{}}} order {} multiorder [{}] at ({})",
            f.owner.join(","),
            f.order,
            f.direction_multiorder.join(","),
            f.point.join(", ")
        );
    }
    let _ = writeln!(s, "total {}", dto.total);
    s
}
