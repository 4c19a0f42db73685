use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use hochgysin_core::exactlin::{scalar_json, vector, Infeasibility};
use hochgysin_core::gysin::{check_theorem_th, gysin_extension, GroupShape, SplitOutcome};
use hochgysin_core::hochschild::{theta, trivialize, Trivialization};
use hochgysin_core::massey::{massey_triple, ClassRef};
use hochgysin_core::simplicial::{build_circle, build_sphere, build_torus};
use hochgysin_core::torus::torus_theta_trivial;
use hochgysin_core::{
    cochain_algebra, compute_cohomology, CohomologySections, DgAlgebra, Error, ExactMatrix, Ring,
    Scalar, SimplicialComplex, TwistedBimodule,
};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(
    name = "hochgysin",
    version,
    about = "Secondary multiplication, Massey products and Gysin extensions of dg-algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct AlgebraInput {
    /// `.dga.json` file, or `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Seed for the section choice; defaults to `HOCHGYSIN_SEED` or the canonical sections.
    #[arg(long)]
    seed: Option<u64>,
    /// Reuse a `.sections.json` file instead of building sections.
    #[arg(long)]
    sections: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a simplicial complex fixture.
    Build {
        #[command(subcommand)]
        shape: Shape,
    },
    /// Turn a `.scx.json` complex into its cochain algebra.
    Cochains {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, default_value = "Z")]
        ring: Ring,
    },
    /// Check the dg-algebra axioms.
    Validate {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Cohomology groups, canonical basis and cup products.
    Cohomology {
        #[command(flatten)]
        alg: AlgebraInput,
    },
    /// Emit the sections package `s`, `q`.
    Sections {
        #[command(flatten)]
        alg: AlgebraInput,
    },
    /// Emit the Hochschild 3-cochain `θ`.
    Theta {
        #[command(flatten)]
        alg: AlgebraInput,
    },
    /// Decide whether `[θ]` vanishes.
    ThetaClass {
        #[command(flatten)]
        alg: AlgebraInput,
        /// Exit 1 unless a witness is found.
        #[arg(long)]
        require_trivial: bool,
    },
    /// Triple Massey product of three classes `deg:[c0,c1,...]`.
    Massey {
        #[command(flatten)]
        alg: AlgebraInput,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        z: String,
    },
    /// Gysin extension of a class `c`.
    Gysin {
        #[command(flatten)]
        alg: AlgebraInput,
        #[arg(long)]
        c: String,
        /// Compare the extension class with `θ`.
        #[arg(long)]
        check_th: bool,
        /// Construct an H-linear splitting.
        #[arg(long)]
        split: bool,
        /// Change the algebra's ring before computing.
        #[arg(long)]
        ring: Option<Ring>,
    },
    /// Build the n-torus and trivialize its `θ`.
    Torus {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "Z")]
        ring: Ring,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the witness 2-cochain here.
        #[arg(long)]
        emit_witness: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Shape {
    Circle,
    Sphere {
        #[arg(long)]
        m: usize,
    },
    Torus {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Serialize)]
struct Verdict {
    check: String,
    passed: bool,
}

#[derive(Serialize)]
struct RunReport {
    command: Vec<String>,
    inputs: BTreeMap<String, String>,
    verdicts: Vec<Verdict>,
    witnesses: BTreeMap<String, Value>,
    result: Value,
    exit_status: u8,
}

struct Run {
    inputs: BTreeMap<String, String>,
    verdicts: Vec<Verdict>,
    witnesses: BTreeMap<String, Value>,
    result: Value,
    summary: Vec<String>,
}

impl Run {
    fn new() -> Self {
        Run {
            inputs: BTreeMap::new(),
            verdicts: Vec::new(),
            witnesses: BTreeMap::new(),
            result: Value::Null,
            summary: Vec::new(),
        }
    }

    fn verdict(&mut self, check: impl Into<String>, passed: bool) {
        self.verdicts.push(Verdict {
            check: check.into(),
            passed,
        });
    }
}

fn read_input(name: &str, run: &mut Run) -> anyhow::Result<String> {
    let text = if name == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(Error::Io)?;
        s
    } else {
        std::fs::read_to_string(name)
            .map_err(Error::Io)
            .with_context(|| format!("reading {name}"))?
    };
    run.inputs.insert(
        name.to_string(),
        hex::encode(Sha256::digest(text.as_bytes())),
    );
    Ok(text)
}

fn default_seed(seed: Option<u64>) -> anyhow::Result<Option<u64>> {
    if seed.is_some() {
        return Ok(seed);
    }
    match std::env::var("HOCHGYSIN_SEED") {
        Ok(s) => Ok(Some(s.trim().parse().map_err(|_| {
            Error::Format(format!("HOCHGYSIN_SEED `{s}` is not an integer"))
        })?)),
        Err(_) => Ok(None),
    }
}

fn load_sections(
    alg: &AlgebraInput,
    ring: Option<Ring>,
    run: &mut Run,
) -> anyhow::Result<CohomologySections> {
    let mut a = DgAlgebra::from_json(&read_input(&alg.input, run)?)?;
    if let Some(r) = ring {
        a = a.change_ring(r)?;
    }
    let a = Arc::new(a);
    if let Some(path) = &alg.sections {
        let text = read_input(&path.display().to_string(), run)?;
        return Ok(CohomologySections::from_json(a, &text)?);
    }
    Ok(CohomologySections::build(a, default_seed(alg.seed)?)?)
}

/// Parses `deg:[c0,c1,...]`; entries may be integers or fractions.
fn parse_class(text: &str, ring: Ring) -> anyhow::Result<(usize, Vec<Scalar>)> {
    let bad = || {
        Error::Format(format!(
            "class literal `{text}` is not of the form deg:[c0,c1,...]"
        ))
    };
    let (deg, rest) = text.split_once(':').ok_or_else(bad)?;
    let deg: usize = deg.trim().parse().map_err(|_| bad())?;
    let body = rest
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(bad)?;
    let mut coords = Vec::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let x: Scalar = part.parse().map_err(|_| bad())?;
        coords.push(ring.element(&x)?);
    }
    Ok((deg, coords))
}

fn shape_json(g: &GroupShape) -> Value {
    json!({
        "free_rank": g.free_rank,
        "torsion": g.torsion.iter().map(scalar_json::to_value).collect::<Vec<_>>(),
    })
}

fn certificate_json(c: &Infeasibility) -> Value {
    json!({ "functional": vector::to_json(&c.functional), "modulus": scalar_json::to_value(&c.modulus) })
}

fn matrix_map_json(m: &BTreeMap<usize, ExactMatrix>) -> Value {
    Value::Object(
        m.iter()
            .map(|(k, v)| (k.to_string(), v.to_json_rows()))
            .collect(),
    )
}

fn trivialization_json(t: &Trivialization) -> Value {
    match t {
        Trivialization::Witness(a) => a.to_json_value(),
        Trivialization::Obstructed {
            certificate,
            unknowns,
            equations,
        } => json!({
            "certificate": certificate_json(certificate),
            "unknowns": unknowns,
            "equations": equations,
        }),
    }
}

fn execute(command: Command, run: &mut Run) -> anyhow::Result<Option<String>> {
    match command {
        Command::Build { shape } => {
            let k = match shape {
                Shape::Circle => build_circle(),
                Shape::Sphere { m } => build_sphere(m),
                Shape::Torus { n } => build_torus(n)?,
            };
            Ok(Some(k.to_json()?))
        }
        Command::Cochains { input, ring } => {
            let k = SimplicialComplex::from_json(&read_input(&input, run)?)?;
            Ok(Some(cochain_algebra(&k, ring).to_json()))
        }
        Command::Validate { input } => {
            let text = read_input(&input, run)?;
            let v: Value = serde_json::from_str(&text).map_err(Error::Json)?;
            let a = DgAlgebra::from_json_value_unchecked(&v)?;
            let report = a.validate();
            for c in &report.checks {
                run.verdict(c.axiom.clone(), c.passed);
                if let Some(w) = &c.witness {
                    run.witnesses.insert(c.axiom.clone(), json!(w));
                }
            }
            run.result = json!({ "ring": a.ring().to_string(), "ranks": a.ranks() });
            run.summary.push(format!(
                "{} axiom checks, {} failed",
                report.checks.len(),
                report.failures().count()
            ));
            if !report.passed() {
                let first = report
                    .failures()
                    .next()
                    .map(|f| f.axiom.clone())
                    .unwrap_or_default();
                return Err(Error::AxiomViolation(first).into());
            }
            Ok(None)
        }
        Command::Cohomology { alg } => {
            let co = load_sections(&alg, None, run)?;
            let groups = compute_cohomology(co.algebra())?;
            let h = co.cohomology_ring();
            let mut products = serde_json::Map::new();
            for p in 0..=h.top_degree() {
                for q in 0..=h.top_degree() - p {
                    let m = h.product_matrix(p, q);
                    if !m.is_zero() {
                        products.insert(format!("{p},{q}"), m.to_json_rows());
                    }
                }
            }
            run.result = json!({
                "ring": co.ring().to_string(),
                "ranks": co.h_ranks(),
                "groups": groups.iter().map(|g| shape_json(&GroupShape::of(g))).collect::<Vec<_>>(),
                "basis": (0..=co.top_degree()).map(|n| co.s(n).to_json_rows()).collect::<Vec<_>>(),
                "products": products,
            });
            run.verdict("torsion-free", true);
            run.summary
                .push(format!("cohomology ranks {:?}", co.h_ranks()));
            Ok(None)
        }
        Command::Sections { alg } => {
            let co = load_sections(&alg, None, run)?;
            Ok(Some(co.to_json()))
        }
        Command::Theta { alg } => {
            let co = load_sections(&alg, None, run)?;
            Ok(Some(theta(&co)?.to_json()))
        }
        Command::ThetaClass {
            alg,
            require_trivial,
        } => {
            let co = load_sections(&alg, None, run)?;
            let th = theta(&co)?;
            let t = trivialize(&th, &TwistedBimodule::new(co.cohomology_ring()))?;
            let trivial = t.is_trivial();
            run.witnesses.insert(
                if trivial { "a" } else { "obstruction" }.into(),
                trivialization_json(&t),
            );
            run.result = json!({ "trivial": trivial });
            if require_trivial {
                run.verdict("[θ] = 0", trivial);
            }
            run.summary.push(
                if trivial {
                    "[θ] = 0: witness a with δa = θ"
                } else {
                    "[θ] ≠ 0: certificate found"
                }
                .into(),
            );
            Ok(None)
        }
        Command::Massey { alg, x, y, z } => {
            let co = load_sections(&alg, None, run)?;
            let ring = co.ring();
            let (cx, cy, cz) = (
                parse_class(&x, ring)?,
                parse_class(&y, ring)?,
                parse_class(&z, ring)?,
            );
            let m = massey_triple(
                &co,
                ClassRef::new(cx.0, &cx.1),
                ClassRef::new(cy.0, &cy.1),
                ClassRef::new(cz.0, &cz.1),
            )?;
            let contains_zero = m.contains_zero()?;
            run.result = json!({
                "degree": m.degree,
                "representative": vector::to_json(&m.representative),
                "indeterminacy": m.indeterminacy.generators().to_json_rows(),
                "contains_zero": contains_zero,
            });
            run.summary.push(format!(
                "<x,y,z> in degree {} = {:?} + indeterminacy of rank {}",
                m.degree,
                m.representative
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>(),
                m.indeterminacy.generators().cols()
            ));
            Ok(None)
        }
        Command::Gysin {
            alg,
            c,
            check_th,
            split,
            ring,
        } => {
            let co = load_sections(&alg, ring, run)?;
            let (deg, coords) = parse_class(&c, co.ring())?;
            let ext = gysin_extension(&co, ClassRef::new(deg, &coords))?;
            for (name, ok) in ext.check_exactness()? {
                run.verdict(name, ok);
            }
            let middle = ext.middle();
            let shapes: BTreeMap<String, Value> = (middle.min_degree()..=middle.max_degree())
                .map(|n| (n.to_string(), shape_json(&middle.shape(n))))
                .collect();
            let mut result = json!({ "class": { "degree": deg, "coords": vector::to_json(&coords) }, "cone_cohomology": shapes });
            if check_th {
                let th = theta(&co)?;
                let t = check_theorem_th(&ext, &th)?;
                run.verdict("extension class = image of [θ]", t.holds);
                if let Some(w) = &t.witness {
                    run.witnesses
                        .insert("theorem_correction".into(), matrix_map_json(w));
                }
                if let Some(cert) = &t.certificate {
                    run.witnesses
                        .insert("theorem_obstruction".into(), certificate_json(cert));
                }
                result["identical"] = json!(t.identical);
                run.summary.push(format!(
                    "theorem: {}",
                    if t.holds { "holds" } else { "FAILS" }
                ));
            }
            if split {
                match split_extension_report(&ext)? {
                    SplitOutcome::Split(s) => {
                        run.verdict("extension splits", true);
                        run.verdict("splitting is H-linear", s.h_linear);
                        run.verdict(
                            "projection of splitting is the identity",
                            s.projection_identity,
                        );
                        run.witnesses
                            .insert("correction".into(), matrix_map_json(&s.correction));
                        run.witnesses
                            .insert("sections".into(), matrix_map_json(&s.sections));
                        run.witnesses
                            .insert("classes".into(), matrix_map_json(&s.classes));
                        result["from_witness"] = json!(s.from_witness);
                        run.summary.push("extension splits".into());
                    }
                    SplitOutcome::Obstructed(cert) => {
                        run.verdict("extension splits", false);
                        run.witnesses
                            .insert("split_obstruction".into(), certificate_json(&cert));
                        run.summary.push("extension does not split".into());
                    }
                }
            }
            run.result = result;
            Ok(None)
        }
        Command::Torus {
            n,
            ring,
            seed,
            emit_witness,
        } => {
            let start = std::time::Instant::now();
            let t = torus_theta_trivial(n, ring, default_seed(seed)?)?;
            let elapsed = start.elapsed();
            run.verdict("[θ] = 0", t.result.is_trivial());
            run.verdict("symmetrized θ = 0", t.symmetrized.is_zero());
            if let (Some(path), Some(a)) = (&emit_witness, t.witness()) {
                std::fs::write(path, a.to_json()).map_err(Error::Io)?;
                run.witnesses
                    .insert("a".into(), json!(path.display().to_string()));
            } else if !t.result.is_trivial() {
                run.witnesses
                    .insert("obstruction".into(), trivialization_json(&t.result));
            }
            run.result = json!({
                "n": n,
                "ring": ring.to_string(),
                "h_ranks": t.h_ranks,
                "theta_blocks": t.theta.blocks().len(),
                "seconds": elapsed.as_secs_f64(),
            });
            run.summary
                .push(format!("torus({n}) over {ring}: {:.2?}", elapsed));
            Ok(None)
        }
    }
}

fn split_extension_report(
    ext: &hochgysin_core::gysin::GysinExtension,
) -> anyhow::Result<SplitOutcome> {
    let co = ext.sections();
    let th = theta(co)?;
    let t = trivialize(&th, &TwistedBimodule::new(co.cohomology_ring()))?;
    Ok(hochgysin_core::gysin::split_extension(ext, t.witness())?)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::NotACocycle { .. }
            | Error::ProductNotACoboundary { .. }
            | Error::Inconsistent(_),
        ) => 1,
        _ => 2,
    }
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe downstream is not our failure
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn render(
    command: Vec<String>,
    mut run: Run,
    outcome: anyhow::Result<Option<String>>,
) -> anyhow::Result<u8> {
    let status = match outcome {
        Ok(Some(text)) => {
            emit(&text);
            return Ok(0);
        }
        Ok(None) => {
            if run.verdicts.iter().all(|v| v.passed) {
                0
            } else {
                1
            }
        }
        Err(err) => {
            run.result = json!({ "error": format!("{err:#}") });
            run.summary.push(format!("error: {err:#}"));
            exit_code(&err)
        }
    };
    for v in run.verdicts.iter().filter(|v| !v.passed) {
        eprintln!("FAILED: {}", v.check);
    }
    for line in &run.summary {
        eprintln!("{line}");
    }
    let report = RunReport {
        command,
        inputs: run.inputs,
        verdicts: run.verdicts,
        witnesses: run.witnesses,
        result: run.result,
        exit_status: status,
    };
    emit(&serde_json::to_string_pretty(&report)?);
    Ok(status)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let mut run = Run::new();
    let outcome = execute(cli.command, &mut run);
    match render(args[1..].to_vec(), run, outcome) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
