//! The `mubforge` command line.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::artifact::{
    decomposition_artifact, family_artifact, fixture_artifacts, floatify, generator_artifact, read_artifact,
    to_json, verify_value, write_atomic, FixtureName, Pipeline, SCHEMA,
};
use crate::certificate::Certificate;
use crate::error::Result;
use crate::exact_number::{rational, CyclotomicNumber};
use crate::finite_field::{FieldSpecWire, DEFAULT_MAX_Q};
use crate::lie::{
    larger_group_profile, odd_orbit_profile, verify_sl_decomposition, verify_sp_decomposition, DEFAULT_LIE_MAX_Q,
};
use crate::linalg::ExactMatrix;
use crate::mub::{compare_with_fixture, flatness_profile, generate_family, ProfileRow};
use crate::representation::verify_character;

#[derive(Parser, Debug)]
#[command(name = "mubforge", version, about = "Exact construction and certification of mutually unbiased bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build D and its family of mutually unbiased bases.
    Generate {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Re-check stored artifacts from scratch.
    Verify {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_Q)]
        max_q: u64,
    },
    /// Cartan decompositions of sl_q and sp_q (q a power of 2).
    Lie {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Report orbit structure without pass/fail; allows odd p.
        #[arg(long)]
        profile: bool,
    },
    /// Flatness of every power of D.
    Profile {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the built-in 2×2 and real 4×4 reference matrices.
    Fixtures {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub a: u32,
    /// Position of the central character among the admissible ones.
    #[arg(long, default_value_t = 0)]
    pub lambda_index: usize,
    /// First matrix-unit seed (row-major) tried for the intertwiner.
    #[arg(long, default_value_t = 0)]
    pub seed_index: usize,
    /// Largest q accepted (default 32, or 8 for lie).
    #[arg(long)]
    pub max_q: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::ExactJson)]
    pub format: Format,
    /// Decimal digits kept in float exports.
    #[arg(long, default_value_t = 12)]
    pub digits: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    ExactJson,
    FloatJson,
    Text,
}

impl PipelineArgs {
    fn build(&self, default_max: u64) -> Result<Pipeline> {
        Pipeline::build(
            self.p,
            self.a,
            self.max_q.unwrap_or(default_max),
            self.lambda_index,
            self.seed_index,
        )
    }
}

struct Writer<'a> {
    output: &'a OutputArgs,
}

impl Writer<'_> {
    /// Writes `value` under `stem` in the requested format; text mode writes nothing.
    fn json<T: Serialize>(&self, stem: &str, value: &T) -> Result<Option<PathBuf>> {
        let Some(dir) = &self.output.out else {
            return Ok(None);
        };
        let (name, text) = match self.output.format {
            Format::ExactJson => (format!("{stem}.json"), to_json(value)?),
            Format::FloatJson => {
                let mut v = serde_json::to_value(value)?;
                floatify(&mut v, self.output.digits)?;
                (format!("{stem}.float.json"), to_json(&v)?)
            }
            Format::Text => return Ok(None),
        };
        let path = dir.join(name);
        write_atomic(&path, &text)?;
        Ok(Some(path))
    }

    fn summary(&self, text: &str) -> Result<()> {
        if let Some(dir) = &self.output.out {
            write_atomic(&dir.join("summary.txt"), text)?;
        }
        Ok(())
    }
}

fn header(pl: &Pipeline) -> String {
    format!(
        "q = {} (p = {}, a = {}), field of definition Q(ζ_{}), λ index {}\n",
        pl.q(),
        pl.p(),
        pl.a(),
        pl.rep.conductor(),
        pl.lambda_index
    )
}

fn show_matrix(m: &ExactMatrix) -> String {
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
        .collect();
    let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for row in cells {
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(s, "  [ {} ]", padded.join("  "));
    }
    s
}

fn note_path(summary: &mut String, path: Option<PathBuf>) {
    if let Some(p) = path {
        let _ = writeln!(summary, "wrote {}", p.display());
    }
}

/// Fails with the first failing clause of any certificate.
fn conclude(certs: Vec<Certificate>) -> Result<()> {
    for c in certs {
        c.into_result()?;
    }
    Ok(())
}

fn cmd_generate<W: Write>(pipeline: &PipelineArgs, output: &OutputArgs, out: &mut W) -> Result<()> {
    let pl = pipeline.build(DEFAULT_MAX_Q)?;
    let mut summary = header(&pl);
    let hom = pl.rep.verify_homomorphism(64);
    let character = verify_character(&pl.rep)?;
    let family = generate_family(&pl.generator, pl.p())?;
    for c in [&hom, &character, &pl.generator.certificate, &family.certificate] {
        let _ = write!(summary, "{c}");
    }
    let _ = writeln!(
        summary,
        "{} mutually unbiased bases, exponents {:?}",
        family.bases.len(),
        family.exponents
    );
    if output.format == Format::Text {
        let _ = write!(summary, "D =\n{}", show_matrix(&pl.generator.matrix));
    }
    let failed = !(hom.passed() && character.passed());
    if !failed {
        let w = Writer { output };
        note_path(&mut summary, w.json("generator", &generator_artifact(&pl))?);
        note_path(&mut summary, w.json("mub_family", &family_artifact(&pl, &family))?);
        w.summary(&summary)?;
    }
    out.write_all(summary.as_bytes())?;
    conclude(vec![hom, character])
}

fn cmd_verify<W: Write>(paths: &[PathBuf], max_q: u64, out: &mut W) -> Result<()> {
    let mut certs = Vec::new();
    for path in paths {
        let value = read_artifact(path)?;
        let cert = verify_value(&value, max_q)?;
        writeln!(out, "{}", path.display())?;
        write!(out, "{cert}")?;
        certs.push(cert);
    }
    conclude(certs)
}

#[derive(Serialize)]
struct LieProfileReport {
    schema: &'static str,
    kind: &'static str,
    field: FieldSpecWire,
    q: usize,
    sl_orbit: crate::lie::OddOrbitProfile,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    actions: Vec<crate::lie::GeneratorAction>,
}

fn cmd_lie<W: Write>(pipeline: &PipelineArgs, output: &OutputArgs, profile: bool, out: &mut W) -> Result<()> {
    let pl = pipeline.build(DEFAULT_LIE_MAX_Q)?;
    let w = Writer { output };
    let mut summary = header(&pl);
    if profile {
        let orbit = odd_orbit_profile(&pl.rep, &pl.generator)?;
        let actions = if pl.p() == 2 {
            larger_group_profile(&pl.rep, &pl.generator)?
        } else {
            Vec::new()
        };
        let _ = writeln!(
            summary,
            "{} distinct summands of dimensions {:?}; D acts as {:?} with cycle lengths {:?}",
            orbit.summands, orbit.dimensions, orbit.orbit, orbit.cycle_lengths
        );
        for act in &actions {
            let _ = writeln!(summary, "  {} permutes summands as {:?}", act.label, act.permutation);
        }
        let report = LieProfileReport {
            schema: SCHEMA,
            kind: "lie-profile",
            field: pl.group.field().to_wire(),
            q: pl.q(),
            sl_orbit: orbit,
            actions,
        };
        note_path(&mut summary, w.json("lie_profile", &report)?);
        w.summary(&summary)?;
        out.write_all(summary.as_bytes())?;
        return Ok(());
    }
    let sl = verify_sl_decomposition(&pl.rep, &pl.generator)?;
    let sp = verify_sp_decomposition(&pl.rep, &pl.generator)?;
    for dec in [&sl, &sp] {
        let _ = write!(summary, "{}", dec.certificate);
        let _ = writeln!(summary, "  orbit under D: {:?}", dec.orbit);
    }
    note_path(&mut summary, w.json("sl_decomposition", &decomposition_artifact(&pl, &sl))?);
    note_path(&mut summary, w.json("sp_decomposition", &decomposition_artifact(&pl, &sp))?);
    w.summary(&summary)?;
    out.write_all(summary.as_bytes())?;
    conclude(vec![sl.certificate, sp.certificate])
}

#[derive(Serialize)]
struct ProfileReport<'a> {
    schema: &'static str,
    kind: &'static str,
    field: FieldSpecWire,
    q: usize,
    rows: &'a [ProfileRow],
    certificate: &'a Certificate,
}

fn cmd_profile<W: Write>(pipeline: &PipelineArgs, output: &OutputArgs, out: &mut W) -> Result<()> {
    let pl = pipeline.build(DEFAULT_MAX_Q)?;
    let mut summary = header(&pl);
    let prof = flatness_profile(&pl.generator, pl.p(), pl.a());
    let prof = match prof {
        Ok(p) => p,
        Err(e) => {
            out.write_all(summary.as_bytes())?;
            return Err(e);
        }
    };
    let _ = writeln!(summary, "{:>4}  {:>5}  {:>13}  {:>8}  {:>10}", "k", "flat", "diagonal flat", "witness", "deviation");
    for r in &prof.rows {
        let _ = writeln!(
            summary,
            "{:>4}  {:>5}  {:>13}  {:>8}  {:>10.3e}",
            r.k,
            r.flat,
            r.diagonal_flat,
            format!("({},{})", r.witness.0, r.witness.1),
            r.deviation
        );
    }
    let _ = write!(summary, "{}", prof.certificate);
    let w = Writer { output };
    let report = ProfileReport {
        schema: SCHEMA,
        kind: "flatness-profile",
        field: pl.group.field().to_wire(),
        q: prof.q,
        rows: &prof.rows,
        certificate: &prof.certificate,
    };
    note_path(&mut summary, w.json("flatness_profile", &report)?);
    w.summary(&summary)?;
    out.write_all(summary.as_bytes())?;
    Ok(())
}

fn cmd_fixtures<W: Write>(output: &OutputArgs, out: &mut W) -> Result<()> {
    let w = Writer { output };
    let mut summary = String::new();
    let mut certs = Vec::new();
    for art in fixture_artifacts()? {
        let stem = match art.name {
            FixtureName::Unitary2 => "fixture_unitary2",
            FixtureName::Real4 => "fixture_real4",
        };
        let _ = write!(summary, "{}", art.certificate);
        if output.format == Format::Text {
            let (label, factor) = match art.name {
                FixtureName::Unitary2 => ("(1+i)/2", CyclotomicNumber::from_coeffs(4, vec![rational(1, 2), rational(1, 2)])?),
                FixtureName::Real4 => ("1/2", CyclotomicNumber::from_rational(4, rational(1, 2))),
            };
            let _ = write!(summary, "M = {label} ·\n{}", show_matrix(&art.matrix.scale(&factor.inv()?)));
        }
        note_path(&mut summary, w.json(stem, &art)?);
        certs.push(art.certificate);
    }
    let pl = Pipeline::build(2, 1, DEFAULT_MAX_Q, 0, 0)?;
    let relation = compare_with_fixture(&pl.generator.matrix)?;
    let _ = writeln!(summary, "canonical q = 2 generator vs 2×2 reference: {relation:?}");
    w.summary(&summary)?;
    out.write_all(summary.as_bytes())?;
    conclude(certs)
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<()> {
    match &cli.command {
        Command::Generate { pipeline, output } => cmd_generate(pipeline, output, out),
        Command::Verify { paths, max_q } => cmd_verify(paths, *max_q, out),
        Command::Lie {
            pipeline,
            output,
            profile,
        } => cmd_lie(pipeline, output, *profile, out),
        Command::Profile { pipeline, output } => cmd_profile(pipeline, output, out),
        Command::Fixtures { output } => cmd_fixtures(output, out),
    }
}

/// Runs the parsed command line and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("mubforge: {e}");
            e.exit_code()
        }
    }
}
