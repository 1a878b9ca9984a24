use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use periagroup::action::{analyse, ActionReport};
use periagroup::pipeline::{run_pipeline, DEFAULT_PRODUCT_SAMPLES};
use periagroup::quasicube::{verify_completion, verify_popset, DEFAULT_ORIENTATION_CAP};
use periagroup::separability::{check_cross_characterization, default_exponent};
use periagroup::verify::check_mediangle;
use periagroup::word::DEFAULT_WORD_CAP;
use periagroup::{
    fixtures, parse_presentation, quasi_cubulate, verify_cross_double_coset, virtual_retract_witness,
    CayleyBall, Error, Hyperplanes, Letter, Periagroup, PeriagroupSpec, SpaceWithPartitions, WordError,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_AXIOM: u8 = 4;
const EXIT_UNDETERMINED: u8 = 5;

#[derive(Parser)]
#[command(name = "peria", version, about = "Cayley balls, hyperplanes and graph-product embeddings of periagroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a presentation
    Validate(Common),
    /// Build the Cayley ball
    Ball(Common),
    /// Hyperplanes, sectors and angles of the ball
    Hyperplanes(Common),
    /// Check the mediangle axioms on the ball
    CheckMediangle(Common),
    /// Quasi-cubulate the space with partitions given by the hyperplanes
    Quasicubulate(Common),
    /// Obs, CoxObs and the conspicial subgroup search
    Conspiciality(Common),
    /// Build the graph product and verify the embedding
    Embed(Common),
    /// Cross sets, double cosets and virtual retract witnesses
    Separability(SeparabilityArgs),
    /// Everything from decomposition to embedding
    Pipeline(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// A `.peria` file, or one of the bundled fixtures F1 to F5
    input: String,
    /// Ball radius
    #[arg(short = 'R', long)]
    radius: Option<usize>,
    /// Trust radius; the ball radius is chosen to support it
    #[arg(long, conflicts_with = "radius")]
    trust: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_WORD_CAP)]
    cap_words: usize,
    #[arg(long, default_value_t = DEFAULT_ORIENTATION_CAP)]
    cap_orientations: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write to this file instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SeparabilityArgs {
    #[command(flatten)]
    common: Common,
    /// Vertices of Phi for the double coset check (comma separated)
    #[arg(long, value_delimiter = ',')]
    phi: Option<Vec<String>>,
    /// Vertices of Psi for the double coset check (comma separated)
    #[arg(long, value_delimiter = ',')]
    psi: Option<Vec<String>>,
    /// Vertices of Xi for the virtual retract witness (comma separated)
    #[arg(long, value_delimiter = ',')]
    xi: Option<Vec<String>>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Dot,
}

/// Printed output and the verdict it carries.
struct Output {
    body: String,
    status: Status,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Fail,
    Undetermined,
}

impl Status {
    fn from_counts(failed: bool, undetermined: usize) -> Self {
        if failed {
            Status::Fail
        } else if undetermined > 0 {
            Status::Undetermined
        } else {
            Status::Ok
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Presentation(_) | Error::Word(WordError::Parse(_)) => EXIT_PARSE,
        Error::StateCap(_) | Error::Word(WordError::CapExceeded { .. }) => EXIT_CAP,
        _ => EXIT_FAILURE,
    }
}

fn load_spec(input: &str) -> Result<PeriagroupSpec, (u8, String)> {
    let path = Path::new(input);
    if !path.exists() {
        if let Some(spec) = fixtures::by_name(input) {
            return Ok(spec);
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| (EXIT_PARSE, format!("cannot read {input}: {e}")))?;
    parse_presentation(&text).map_err(|e| (EXIT_PARSE, format!("{input}: {e}")))
}

fn build_ball(spec: PeriagroupSpec, c: &Common) -> periagroup::Result<CayleyBall> {
    let group = Periagroup::with_cap(spec, c.cap_words);
    match (c.radius, c.trust) {
        (_, Some(t)) => CayleyBall::with_trust_radius(group, t),
        (r, None) => CayleyBall::build(group, r.unwrap_or(3)),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialisable") + "\n"
}

fn vertex_list(spec: &PeriagroupSpec, names: &[String]) -> Result<Vec<usize>, (u8, String)> {
    names
        .iter()
        .filter(|n| !n.is_empty())
        .map(|n| {
            spec.vertex_index(n)
                .ok_or_else(|| (EXIT_PARSE, format!("unknown vertex '{n}'")))
        })
        .collect()
}

fn ball_summary(ball: &CayleyBall) -> String {
    format!(
        "ball: radius {}, {} vertices, {} edges, trust radius {}, complete {}\n",
        ball.radius(),
        ball.len(),
        ball.graph().edge_count(),
        ball.trust_radius(),
        ball.is_complete()
    )
}

fn validate(spec: &PeriagroupSpec, c: &Common) -> Output {
    let types = spec.classify_vertices();
    let body = match c.format {
        Format::Json => json(&serde_json::json!({
            "presentation": spec.to_json(),
            "types": types,
            "coxeter_vertices": spec.coxeter_vertices().iter().map(|&v| spec.vertex_name(v)).collect::<Vec<_>>(),
        })),
        _ => {
            let mut out = String::new();
            for v in 0..spec.vertex_count() {
                let _ = writeln!(
                    out,
                    "vertex {} order {} type {:?}",
                    spec.vertex_name(v),
                    spec.group(v).order(),
                    types[v]
                );
            }
            for &(a, b, l) in spec.edges() {
                let _ = writeln!(out, "edge {} {} label {l}", spec.vertex_name(a), spec.vertex_name(b));
            }
            out.push_str("valid\n");
            out
        }
    };
    Output { body, status: Status::Ok }
}

fn hyperplanes_cmd(ball: &CayleyBall, c: &Common) -> periagroup::Result<Output> {
    let hyps = Hyperplanes::compute(ball);
    let body = match c.format {
        Format::Json => json(&hyps.to_json(ball)),
        Format::Dot => hyps.to_dot(ball),
        Format::Text => {
            let mut out = ball_summary(ball);
            let _ = writeln!(out, "convex even cycles: {}", hyps.cycles.len());
            let _ = writeln!(out, "hyperplanes: {}", hyps.len());
            let spec = ball.spec();
            for p in hyps.planes.iter().filter(|p| p.certified) {
                let _ = writeln!(
                    out,
                    "  J{} label {} type {:?} sectors {} edges {}",
                    p.id,
                    p.label.map_or("-", |v| spec.vertex_name(v)),
                    p.kind,
                    p.trusted_sector_count(ball),
                    p.edges.len()
                );
            }
            for (a, b) in hyps.transverse_pairs() {
                if hyps.planes[a].certified && hyps.planes[b].certified {
                    if let Ok(angle) = hyps.angle(ball, a, b) {
                        let _ = writeln!(out, "  J{a} x J{b} angle {angle}");
                    }
                }
            }
            out
        }
    };
    Ok(Output { body, status: Status::Ok })
}

fn quasicubulate_cmd(ball: &CayleyBall, c: &Common) -> periagroup::Result<Output> {
    let hyps = Hyperplanes::compute(ball);
    let space = SpaceWithPartitions::from_hyperplanes(ball, &hyps)?;
    let qm = quasi_cubulate(&space, c.cap_orientations)?;
    let popset = verify_popset(&qm, &space);
    let completion = verify_completion(ball, &hyps, &space, &qm);
    let failed = !popset.passed() || !completion.passed();
    let body = match c.format {
        Format::Dot => qm.to_dot(),
        Format::Json => json(&serde_json::json!({
            "graph": qm.to_json(&space),
            "popset": popset,
            "completion": completion,
        })),
        Format::Text => {
            let mut out = ball_summary(ball);
            let _ = writeln!(
                out,
                "space: {} points, {} partitions; QM: {} vertices, {} edges",
                space.point_count(),
                space.len(),
                qm.graph.len(),
                qm.graph.edge_count()
            );
            out.push_str(&popset.quasi_median.to_string());
            for line in popset.checks.iter().chain(&completion.checks) {
                let _ = writeln!(
                    out,
                    "{:<28} {} (checked {}, failures {})",
                    line.name,
                    if line.passed() { "pass" } else { "FAIL" },
                    line.checked,
                    line.failures
                );
            }
            out
        }
    };
    Ok(Output {
        body,
        status: Status::from_counts(failed, 0),
    })
}

fn action_text(r: &ActionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Psi: {{{}}}  |Delta| = {}", r.psi.join(", "), r.delta_size);
    let _ = writeln!(out, "peripheral hyperplanes: {} (labels {})", r.peripheral.len(), r.peripheral_labels.join(", "));
    let _ = writeln!(out, "Rot generators: {}", r.rot_generators.join(" "));
    let _ = writeln!(
        out,
        "Obs: {} elements, {} tests, {} undetermined",
        r.obs.members.len(),
        r.obs.tested,
        r.obs.undetermined
    );
    for (clause, n) in &r.obs.per_clause {
        let _ = writeln!(out, "  {clause:<22} {n}");
    }
    match (&r.coxeter_order, &r.coxobs, &r.inclusion, &r.subgroup) {
        (Some(order), Some(coxobs), Some(inclusion), Some(subgroup)) => {
            let _ = writeln!(out, "C(Psi): order {order}; CoxObs = {{{}}}", coxobs.join(", "));
            let _ = writeln!(
                out,
                "Obs in Rot.CoxObs: {} factored, {} failures, {} undetermined",
                inclusion.factored,
                inclusion.failures.len(),
                inclusion.undetermined
            );
            let _ = writeln!(out, "H = {{{}}} (index {})", subgroup.join(", "), order / subgroup.len());
            if let Some(robs) = &r.restricted_obs {
                let _ = writeln!(
                    out,
                    "Obs over Pi-: {} elements, {} undetermined",
                    robs.members.len(),
                    robs.undetermined
                );
            }
        }
        _ => out.push_str("C(Psi) is infinite: CoxObs and subgroup search unsupported\n"),
    }
    out
}

fn conspiciality_cmd(ball: &CayleyBall, c: &Common) -> periagroup::Result<Output> {
    let hyps = Hyperplanes::compute(ball);
    let r = analyse(ball, &hyps)?;
    let failed = r.inclusion.as_ref().is_some_and(|i| !i.passed())
        || r.restricted_obs.as_ref().is_some_and(|o| !o.members.is_empty());
    let undetermined = r.restricted_obs.as_ref().map_or(r.obs.undetermined, |o| o.undetermined);
    let body = match c.format {
        Format::Json => json(&r),
        _ => ball_summary(ball) + &action_text(&r),
    };
    Ok(Output {
        body,
        status: Status::from_counts(failed, undetermined),
    })
}

fn pipeline_cmd(ball: &CayleyBall, c: &Common, target_only: bool) -> periagroup::Result<Output> {
    let hyps = Hyperplanes::compute(ball);
    let r = run_pipeline(ball, &hyps, DEFAULT_PRODUCT_SAMPLES, c.seed)?;
    let status = Status::from_counts(!r.passed(), r.undetermined());
    let body = match c.format {
        Format::Json if target_only => json(&serde_json::json!({
            "target": r.target,
            "embedding": r.embedding,
        })),
        Format::Json => json(&r),
        _ => {
            let mut out = ball_summary(ball);
            if !target_only {
                let _ = writeln!(out, "Psi: {{{}}}, C(Psi) of order {}", r.psi.join(", "), r.coxeter_order);
                let _ = writeln!(out, "CoxObs: {{{}}}", r.coxobs.join(", "));
                let _ = writeln!(out, "H = {{{}}}, index {}", r.subgroup.join(", "), r.index);
                let _ = writeln!(
                    out,
                    "Obs over Pi-: {} elements, {} undetermined -> {}",
                    r.obs.members.len(),
                    r.obs.undetermined,
                    if r.obs.members.is_empty() { "conspicial" } else { "NOT conspicial" }
                );
            }
            let e = &r.embedding;
            let _ = writeln!(
                out,
                "embedding: {} samples, {} collisions, {}/{} products fail, {} undetermined",
                e.samples,
                e.collisions.len(),
                e.product_failures.len(),
                e.products_checked,
                e.undetermined
            );
            out.push_str("target presentation:\n");
            out.push_str(&r.target_presentation);
            out
        }
    };
    Ok(Output { body, status })
}

fn separability_cmd(spec: &PeriagroupSpec, ball: &CayleyBall, a: &SeparabilityArgs) -> Result<Output, (u8, String)> {
    let err = |e: Error| (exit_code(&e), e.to_string());
    let hyps = Hyperplanes::compute(ball);
    let n = default_exponent(spec);
    let mut failed = false;
    let mut undetermined = 0;
    let mut report = serde_json::Map::new();
    let mut text = ball_summary(ball);

    let mut pairs = Vec::new();
    for u in 0..spec.vertex_count() {
        for v in u..spec.vertex_count() {
            let plane = |w: usize| {
                ball.index_of(&periagroup::Word::letter(Letter::new(w, 1)))
                    .and_then(|y| hyps.plane_of_edge(0, y))
            };
            let (Some(j), Some(h)) = (plane(u), plane(v)) else { continue };
            let r = check_cross_characterization(ball, &hyps, j, h, n).map_err(err)?;
            failed |= !r.passed();
            undetermined += r.undetermined;
            let _ = writeln!(
                text,
                "Cross(J_{}, J_{}): N = {n}, {} checked, {} disagreements, {} with gJ = H, {} undetermined",
                spec.vertex_name(u),
                spec.vertex_name(v),
                r.checked,
                r.disagreements.len(),
                r.equal_with_condition,
                r.undetermined
            );
            pairs.push(serde_json::json!({
                "j": spec.vertex_name(u),
                "h": spec.vertex_name(v),
                "report": r,
            }));
        }
    }
    report.insert("cross".into(), pairs.into());

    if let (Some(phi), Some(psi)) = (&a.phi, &a.psi) {
        let phi = vertex_list(spec, phi)?;
        let psi = vertex_list(spec, psi)?;
        let trust = a.common.trust.unwrap_or(3);
        let r = verify_cross_double_coset(spec, &phi, &psi, trust).map_err(err)?;
        failed |= !r.passed();
        let _ = writeln!(
            text,
            "double coset: {} checked; <Phi><Psi><u_Phi,u_Psi>: {} missing, {} extra; carrier product: {}",
            r.checked,
            r.missing.len(),
            r.extra.len(),
            if r.carrier_form_passed() { "pass" } else { "FAIL" }
        );
        report.insert("double_coset".into(), serde_json::to_value(&r).expect("serialisable"));
    }
    if let Some(xi) = &a.xi {
        let xi = vertex_list(spec, xi)?;
        let r = virtual_retract_witness(spec, &xi, a.common.cap_words).map_err(err)?;
        failed |= !r.passed();
        let _ = writeln!(
            text,
            "retract witness for <{}>: |Rot(Y)| = {}, |H+| = {}, index {}, {}",
            r.xi.join(","),
            r.rot_order,
            r.h_plus_order,
            r.index,
            if r.passed() { "pass" } else { "FAIL" }
        );
        report.insert("retract".into(), serde_json::to_value(&r).expect("serialisable"));
    }
    let body = match a.common.format {
        Format::Json => json(&report),
        _ => text,
    };
    Ok(Output {
        body,
        status: Status::from_counts(failed, undetermined),
    })
}

fn run(cli: Cli) -> Result<(Output, Option<PathBuf>), (u8, String)> {
    let err = |e: Error| (exit_code(&e), e.to_string());
    let common = match &cli.command {
        Command::Validate(c)
        | Command::Ball(c)
        | Command::Hyperplanes(c)
        | Command::CheckMediangle(c)
        | Command::Quasicubulate(c)
        | Command::Conspiciality(c)
        | Command::Embed(c)
        | Command::Pipeline(c) => c.clone(),
        Command::Separability(a) => a.common.clone(),
    };
    if common.cap_words == 0 || common.cap_orientations == 0 {
        return Err((EXIT_PARSE, "caps must be positive".into()));
    }
    if common.radius == Some(0) {
        return Err((EXIT_PARSE, "radius must be at least 1".into()));
    }
    let spec = load_spec(&common.input)?;
    if let Command::Validate(c) = &cli.command {
        return Ok((validate(&spec, c), c.output.clone()));
    }
    let ball = build_ball(spec.clone(), &common).map_err(err)?;
    let c = &common;
    let out = match &cli.command {
        Command::Validate(_) => unreachable!(),
        Command::Ball(_) => Output {
            body: match c.format {
                Format::Json => json(&ball.to_json()),
                Format::Dot => ball.to_dot(),
                Format::Text => ball_summary(&ball),
            },
            status: Status::Ok,
        },
        Command::Hyperplanes(_) => hyperplanes_cmd(&ball, c).map_err(err)?,
        Command::CheckMediangle(_) => {
            let r = check_mediangle(&ball);
            Output {
                body: match c.format {
                    Format::Json => json(&r),
                    _ => ball_summary(&ball) + &r.to_string(),
                },
                status: Status::from_counts(!r.passed(), 0),
            }
        }
        Command::Quasicubulate(_) => quasicubulate_cmd(&ball, c).map_err(err)?,
        Command::Conspiciality(_) => conspiciality_cmd(&ball, c).map_err(err)?,
        Command::Embed(_) => pipeline_cmd(&ball, c, true).map_err(err)?,
        Command::Pipeline(_) => pipeline_cmd(&ball, c, false).map_err(err)?,
        Command::Separability(a) => separability_cmd(&spec, &ball, a)?,
    };
    Ok((out, common.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, path)) => {
            match path {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, &out.body) {
                        eprintln!("peria: cannot write {}: {e}", p.display());
                        return ExitCode::from(EXIT_FAILURE);
                    }
                }
                None => print!("{}", out.body),
            }
            match out.status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Fail => ExitCode::from(EXIT_AXIOM),
                Status::Undetermined => ExitCode::from(EXIT_UNDETERMINED),
            }
        }
        Err((code, message)) => {
            eprintln!("peria: {message}");
            ExitCode::from(code)
        }
    }
}
