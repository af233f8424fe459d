//! Command-line surface for the circle chain calculus.
//!
//! Exit codes: 0 success / all checks pass, 1 a verification check failed,
//! 2 invalid input. Data goes to stdout, diagnostics to stderr.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use circle_chains::chain::{self, Chain, ReturnPivots};
use circle_chains::doc::{
    canonical_json, parse_scene, scene_hash, write_scene, CheckRecord, ReportDocument,
    SceneDocument,
};
use circle_chains::geom::{normalize_angle, Line, Point, Tolerance};
use circle_chains::incidence::{
    self, lighthouse_sweep, steiner_frame, steiner_report, TouchingReport,
};
use circle_chains::mobius::{apply_scene, random_mobius};
use circle_chains::scenes::{self, GeneratedScene, SceneKind, SceneSpec};
use circle_chains::svg::{render_svg, StyleOptions};

#[derive(Parser)]
#[command(name = "circle-chains", version, about = "Circle chain calculus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Polygon,
    CommonPoint,
    Touching,
    Quadrilateral,
    NLines,
    Rational,
    OpenPolygon,
}

impl From<KindArg> for SceneKind {
    fn from(k: KindArg) -> SceneKind {
        match k {
            KindArg::Polygon => SceneKind::Polygon,
            KindArg::CommonPoint => SceneKind::CommonPoint,
            KindArg::Touching => SceneKind::Touching,
            KindArg::Quadrilateral => SceneKind::Quadrilateral,
            KindArg::NLines => SceneKind::NLines,
            KindArg::Rational => SceneKind::Rational,
            KindArg::OpenPolygon => SceneKind::OpenPolygon,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic scene and print its JSON document.
    Generate {
        #[arg(long)]
        kind: KindArg,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rational target numerator (rational kind).
        #[arg(long, default_value_t = 1)]
        p: i64,
        /// Rational target denominator (rational kind).
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the closing condition of a scene; exit 0 iff it closes.
    Verify {
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Iterate the pivot maps and print the trace(s).
    Iterate {
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Trace this many deterministic starts instead of the scene start.
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Lighthouse sweep, or the touching-circles report for tangent chains.
    Incidence {
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Verify the extended Steiner quadrilateral theorem.
    Steiner {
        scene: Option<PathBuf>,
        /// Four lines "ax,ay,dx,dy" separated by semicolons.
        #[arg(long)]
        lines: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Apply a random Möbius map and verify the chain invariants.
    Mobius {
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Render a scene (optionally with a trace) as SVG.
    Render {
        scene: Option<PathBuf>,
        /// Also draw one round of the iteration polygon.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run generator property campaigns across scene kinds.
    Sweep {
        /// Comma-separated kinds; defaults to all.
        #[arg(long)]
        kinds: Option<String>,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

/// Any failure that should terminate the process with a specific code.
enum CliError {
    /// Exit 2: bad input or environment.
    Input(String),
    /// Exit 1: a verification check failed.
    Check(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<Vec<u8>, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read(p)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| CliError::Input(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> CliResult {
    match out {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Input(format!("cannot write stdout: {e}"))),
    }
}

fn load_scene(path: &Option<PathBuf>) -> Result<SceneDocument, CliError> {
    parse_scene(&read_input(path)?).map_err(CliError::input)
}

fn scene_chain(doc: &SceneDocument, rel: f64) -> Result<(Chain, Tolerance), CliError> {
    let (chain, _) = doc.chain_geometry().map_err(CliError::input)?;
    let tol = chain.tolerance_with_rel(rel);
    chain.validate(&tol).map_err(CliError::input)?;
    Ok((chain, tol))
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Generate {
            kind,
            n,
            seed,
            p,
            q,
            out,
        } => cmd_generate(kind, n, seed, p, q, &out),
        Command::Verify { scene, tol } => cmd_verify(&scene, tol),
        Command::Iterate {
            scene,
            rounds,
            starts,
            tol,
        } => cmd_iterate(&scene, rounds, starts, tol),
        Command::Incidence { scene, starts, tol } => cmd_incidence(&scene, starts, tol),
        Command::Steiner { scene, lines, tol } => cmd_steiner(&scene, lines.as_deref(), tol),
        Command::Mobius { scene, seed, tol } => cmd_mobius(&scene, seed, tol),
        Command::Render { scene, trace, out } => cmd_render(&scene, trace, &out),
        Command::Sweep {
            kinds,
            count,
            seed,
            tol,
        } => cmd_sweep(kinds.as_deref(), count, seed, tol),
    }
}

fn scene_document(generated: &GeneratedScene, spec: &SceneSpec) -> SceneDocument {
    let mut doc = SceneDocument::from_chain(&generated.chain, generated.witness, None);
    doc.meta.insert(
        "scene_spec".to_string(),
        serde_json::to_value(spec).expect("spec serializes"),
    );
    if let Some(lines) = &generated.lines {
        doc.meta.insert(
            "lines".to_string(),
            serde_json::to_value(lines).expect("lines serialize"),
        );
    }
    doc
}

fn cmd_generate(
    kind: KindArg,
    n: usize,
    seed: u64,
    p: i64,
    q: u64,
    out: &Option<PathBuf>,
) -> CliResult {
    let spec = SceneSpec {
        kind: kind.into(),
        n,
        seed,
        p,
        q,
    };
    let generated = scenes::generate(&spec).map_err(CliError::input)?;
    emit(out, &write_scene(&scene_document(&generated, &spec)))
}

fn cmd_verify(scene: &Option<PathBuf>, rel: f64) -> CliResult {
    let doc = load_scene(scene)?;
    let (chain, tol) = scene_chain(&doc, rel)?;
    // Open chains are verified through their forward-and-back doubling.
    let chain = if chain.closed {
        chain
    } else {
        chain::doubled_chain(&chain, ReturnPivots::Same, &tol).map_err(CliError::input)?
    };
    let report = chain::transfer_report(&chain, &tol).map_err(CliError::input)?;
    let allowed = chain.joint_count() as f64 * tol.rel;
    let mut checks = vec![CheckRecord::new(
        "closing_defect",
        vec![report.total, report.winding as f64],
        report.closing_defect,
        allowed,
    )];
    for (i, j) in report.joints.iter().enumerate() {
        checks.push(CheckRecord {
            name: format!("joint_{}_mu", i + 1),
            values: vec![j.delta.radians(), j.gamma.radians(), j.mu.radians()],
            defect: 0.0,
            pass: true,
        });
    }
    let out = ReportDocument::new("verify", rel, scene_hash(&doc), checks);
    emit(&None, &canonical_json(&out))?;
    if out.overall {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "chain does not close (defect {:.6})",
            report.closing_defect
        )))
    }
}

fn cmd_iterate(
    scene: &Option<PathBuf>,
    rounds: usize,
    starts: Option<usize>,
    rel: f64,
) -> CliResult {
    let doc = load_scene(scene)?;
    let (chain, tol) = scene_chain(&doc, rel)?;
    let anchor = doc.anchor_point();
    let start_points: Vec<Point> = match starts {
        Some(k) => (0..k)
            .map(|s| chain.circles[0].point_at(incidence::start_angle(s)))
            .collect(),
        None => vec![doc
            .start_point()
            .unwrap_or_else(|| chain.circles[0].point_at(0.25))],
    };
    let traces: Vec<_> = start_points
        .into_iter()
        .map(|p| chain::iterate(&chain, p, rounds, anchor, &tol))
        .collect::<Result<_, _>>()
        .map_err(CliError::input)?;
    emit(&None, &canonical_json(&traces))
}

fn cmd_incidence(scene: &Option<PathBuf>, starts: usize, rel: f64) -> CliResult {
    let doc = load_scene(scene)?;
    let (chain, tol) = scene_chain(&doc, rel)?;
    let all_tangent = (0..chain.joint_count()).all(|i| {
        let (a, b) = chain.joint(i);
        incidence::tangency_probe(a, b, &tol).0
    });
    if all_tangent && chain.closed && chain.circles.len() == 3 {
        let report =
            incidence::three_touching_report(&chain, starts, &tol).map_err(CliError::input)?;
        emit(&None, &canonical_json(&report))?;
        let TouchingReport::Three {
            orthogonality_defects,
            midpoint_defect,
            membership_defects,
            ..
        } = &report
        else {
            unreachable!()
        };
        let worst = orthogonality_defects
            .iter()
            .chain(membership_defects)
            .chain(std::iter::once(midpoint_defect))
            .cloned()
            .fold(0.0, f64::max);
        return check_threshold(worst, tol.eps().max(1e-9));
    }
    if all_tangent && chain.closed && chain.circles.len() == 4 {
        let report =
            incidence::four_touching_report(&chain, starts, &tol).map_err(CliError::input)?;
        emit(&None, &canonical_json(&report))?;
        let TouchingReport::Four {
            membership_defects, ..
        } = &report
        else {
            unreachable!()
        };
        let worst = membership_defects.iter().cloned().fold(0.0, f64::max);
        return check_threshold(worst, tol.eps().max(1e-9));
    }
    let chain = if chain.closed {
        chain
    } else {
        chain::doubled_chain(&chain, ReturnPivots::Same, &tol).map_err(CliError::input)?
    };
    let report = lighthouse_sweep(&chain, starts, &tol).map_err(CliError::input)?;
    emit(&None, &canonical_json(&report))?;
    let allowed = 1e-8 * tol.scene_scale;
    let worst_residual = report.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    let worst_spread = report.triples.iter().map(|t| t.spread).fold(0.0, f64::max);
    check_threshold(worst_residual.max(worst_spread), allowed)
}

fn check_threshold(worst: f64, allowed: f64) -> CliResult {
    if worst <= allowed {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "worst defect {worst:.3e} exceeds {allowed:.3e}"
        )))
    }
}

fn parse_lines(text: &str) -> Result<[Line; 4], CliError> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != 4 {
        return Err(CliError::Input(format!(
            "--lines needs 4 semicolon-separated entries, got {}",
            parts.len()
        )));
    }
    let mut lines = Vec::with_capacity(4);
    for part in parts {
        let nums: Vec<f64> = part
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Input(format!("bad line entry {part:?}: {e}")))?;
        if nums.len() != 4 {
            return Err(CliError::Input(format!(
                "line entry {part:?} needs ax,ay,dx,dy"
            )));
        }
        lines.push(
            Line::new(Point::new(nums[0], nums[1]), Point::new(nums[2], nums[3]))
                .map_err(CliError::input)?,
        );
    }
    Ok([lines[0], lines[1], lines[2], lines[3]])
}

fn lines_from_scene(doc: &SceneDocument) -> Result<[Line; 4], CliError> {
    let value = doc
        .meta
        .get("lines")
        .ok_or_else(|| CliError::Input("scene has no lines metadata".into()))?;
    let arrangement: circle_chains::scenes::LineArrangement =
        serde_json::from_value(value.clone()).map_err(CliError::input)?;
    if arrangement.lines.len() != 4 {
        return Err(CliError::Input(format!(
            "steiner needs exactly 4 lines, scene has {}",
            arrangement.lines.len()
        )));
    }
    Ok([
        arrangement.lines[0],
        arrangement.lines[1],
        arrangement.lines[2],
        arrangement.lines[3],
    ])
}

fn cmd_steiner(scene: &Option<PathBuf>, lines: Option<&str>, rel: f64) -> CliResult {
    let lines = match lines {
        Some(text) => parse_lines(text)?,
        None => lines_from_scene(&load_scene(scene)?)?,
    };
    let probe_tol = Tolerance::new(rel, 1.0);
    let frame = steiner_frame(&lines, &probe_tol).map_err(CliError::input)?;
    let tol = Tolerance::with_rel(frame.circumcircles.iter(), rel);
    let start = frame.circumcircles[0].point_at(incidence::start_angle(0));
    let report = steiner_report(&lines, start, &tol).map_err(CliError::input)?;
    emit(&None, &canonical_json(&report))?;
    let worst = report
        .membership_defects
        .iter()
        .map(|(_, d)| *d)
        .chain(report.collinearity_defects)
        .fold(0.0, f64::max);
    check_threshold(worst, tol.eps().max(1e-9))
}

fn cmd_mobius(scene: &Option<PathBuf>, seed: u64, rel: f64) -> CliResult {
    let doc = load_scene(scene)?;
    let (chain, tol) = scene_chain(&doc, rel)?;
    let map = random_mobius(seed, tol.scene_scale);
    let image = apply_scene(&map, &chain, &tol).map_err(CliError::input)?;
    let image_tol = image.tolerance_with_rel(rel);
    let before = chain::transfer_report(&chain, &tol).map_err(CliError::input)?;
    let after = chain::transfer_report(&image, &image_tol).map_err(CliError::input)?;

    let mut checks = Vec::new();
    for i in 0..chain.joint_count() {
        let a = before.joints[i].mu.radians();
        let b = after.joints[i].mu.radians();
        let defect = normalize_angle(a - b).abs();
        checks.push(CheckRecord::new(
            format!("joint_{}_mu_preserved", i + 1),
            vec![a, b],
            defect,
            1e-8,
        ));
    }
    let closing_before = chain::is_closing(&chain, &tol).map_err(CliError::input)?;
    let closing_after = chain::is_closing(&image, &image_tol).map_err(CliError::input)?;
    checks.push(CheckRecord {
        name: "is_closing_preserved".into(),
        values: vec![closing_before as u8 as f64, closing_after as u8 as f64],
        defect: if closing_before == closing_after {
            0.0
        } else {
            1.0
        },
        pass: closing_before == closing_after,
    });
    let out = ReportDocument::new("mobius", rel, scene_hash(&doc), checks);
    emit(&None, &canonical_json(&out))?;
    if out.overall {
        Ok(())
    } else {
        Err(CliError::Check("Möbius invariance violated".into()))
    }
}

fn cmd_render(scene: &Option<PathBuf>, with_trace: bool, out: &Option<PathBuf>) -> CliResult {
    let doc = load_scene(scene)?;
    let trace = if with_trace {
        let (chain, tol) = scene_chain(&doc, 1e-9)?;
        let start = doc
            .start_point()
            .unwrap_or_else(|| chain.circles[0].point_at(0.25));
        Some(chain::iterate(&chain, start, 1, doc.anchor_point(), &tol).map_err(CliError::input)?)
    } else {
        None
    };
    let svg = render_svg(&doc, trace.as_ref(), None, &StyleOptions::default());
    emit(out, &svg)
}

fn sweep_kinds(arg: Option<&str>) -> Result<Vec<KindArg>, CliError> {
    match arg {
        None => Ok(vec![
            KindArg::Polygon,
            KindArg::CommonPoint,
            KindArg::Touching,
            KindArg::Quadrilateral,
            KindArg::NLines,
            KindArg::Rational,
            KindArg::OpenPolygon,
        ]),
        Some(csv) => csv
            .split(',')
            .map(|s| {
                KindArg::from_str(s.trim(), true)
                    .map_err(|e| CliError::Input(format!("bad kind {s:?}: {e}")))
            })
            .collect(),
    }
}

/// One deterministic property check per (kind, seed) pair; returns the
/// reproduction command on failure.
fn sweep_one(kind: KindArg, index: usize, seed: u64, rel: f64) -> Result<(), String> {
    let scene_seed = seed.wrapping_add(index as u64);
    let n = match kind {
        KindArg::Quadrilateral => 4,
        KindArg::NLines => 4 + (index % 4),
        KindArg::Touching => 3 + (index % 6),
        KindArg::OpenPolygon => 2 + (index % 5),
        _ => 3 + (index % 5),
    };
    let (p, q) = match index % 3 {
        0 => (1, 2),
        1 => (1, 3),
        _ => (2, 3),
    };
    let spec = SceneSpec {
        kind: kind.into(),
        n,
        seed: scene_seed,
        p,
        q,
    };
    let repro = format!(
        "circle-chains generate --kind {} --n {} --seed {} --p {} --q {}",
        format!("{kind:?}").to_lowercase().replace("point", "-point").replace("lines", "-lines").replace("polygon", "polygon"),
        n,
        scene_seed,
        p,
        q
    );
    let fail = |what: &str| Err(format!("{what} [{repro}]"));
    let generated = match scenes::generate(&spec) {
        Ok(g) => g,
        Err(e) => return fail(&format!("generator error: {e}")),
    };
    let chain = &generated.chain;
    let tol = chain.tolerance_with_rel(rel);
    match kind {
        KindArg::Polygon | KindArg::CommonPoint | KindArg::NLines | KindArg::Quadrilateral => {
            if !chain::is_closing(chain, &tol).unwrap_or(false) {
                return fail("expected closing chain");
            }
        }
        KindArg::Touching => {
            let closes = chain::is_closing(chain, &tol).unwrap_or(false);
            if n % 2 == 0 && !closes {
                return fail("even touching chain must close");
            }
            if n % 2 == 1
                && chain::closure_order(chain, 2, &tol).unwrap_or(None) != Some(2)
            {
                return fail("odd touching chain must have closure order 2");
            }
        }
        KindArg::Rational => {
            if chain::closure_order(chain, q as usize, &tol).unwrap_or(None) != Some(q as usize) {
                return fail("rational chain must close after exactly q rounds");
            }
        }
        KindArg::OpenPolygon => {
            let doubled = match chain::doubled_chain(chain, ReturnPivots::Same, &tol) {
                Ok(d) => d,
                Err(e) => return fail(&format!("doubling failed: {e}")),
            };
            if !chain::is_closing(&doubled, &tol).unwrap_or(false) {
                return fail("doubled open chain must close");
            }
        }
    }
    if let Some(witness) = generated.witness {
        if chain.closed {
            match chain::iterate(chain, witness, 1, None, &tol) {
                Ok(trace) => {
                    let back = *trace.vertices.last().unwrap();
                    if back.dist(witness) > 1e-9 * tol.scene_scale {
                        return fail("witness does not return");
                    }
                }
                Err(e) => return fail(&format!("iteration failed: {e}")),
            }
        }
    }
    Ok(())
}

fn cmd_sweep(kinds: Option<&str>, count: usize, seed: u64, rel: f64) -> CliResult {
    let kinds = sweep_kinds(kinds)?;
    let mut failures: Vec<String> = Vec::new();
    let mut total = 0usize;
    for kind in &kinds {
        for index in 0..count {
            total += 1;
            if let Err(msg) = sweep_one(*kind, index, seed, rel) {
                failures.push(format!("{kind:?} #{index}: {msg}"));
            }
        }
    }
    let summary = serde_json::json!({
        "scenes": total,
        "failures": failures,
        "pass": failures.is_empty(),
    });
    emit(&None, &canonical_json(&summary))?;
    for f in &failures {
        eprintln!("sweep failure: {f}");
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "{} of {total} scenes failed",
            failures.len()
        )))
    }
}
