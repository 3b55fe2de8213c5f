//! `hypflex`: construct flexible octahedra, check the signed-sum condition,
//! trace flexes over `t` and tabulate large-`t` limits.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hypflex_core::bricard::{
    construct_type1, construct_type2, flat_config_circle, flat_config_horocycle,
    flat_config_hypercycle, lift_type3, FlatOctahedronConfig, Octahedron, PairingChoice, Pairings,
    QuadrilateralH3,
};
use hypflex_core::flexibility::{
    certify_octahedron, limit_edge_factor, limit_ratios, necessary_condition, numeric_ratios,
    trace_flex, trace_window, EquatorCertificate, FlexTrace, TraceOptions, Verdict, TOL_CLOSURE,
};
use hypflex_core::hypgeom::{PointH2, PointH3};
use hypflex_core::io::{
    parse_spec_json, placement_to_obj, spec_to_json, trace_to_csv, SpecDocument,
};
use hypflex_core::suspension::{place, SignVector, SuspensionSpec};
use hypflex_core::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "hypflex",
    version,
    about = "Flexible suspensions and octahedra in hyperbolic 3-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Bricard-Stachel octahedron and write its spec JSON.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Search each equator for sign vectors with Σσe = 0.
    Check {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol_cert: f64,
        #[arg(long, value_enum, default_value_t = CheckFormat::Text)]
        format: CheckFormat,
    },
    /// Trace closure solutions over a range of t.
    Flex(FlexArgs),
    /// Tabulate the closed-form large-t limits against the finite-t formulas.
    Limits {
        spec: PathBuf,
        /// t at which the finite formulas are evaluated.
        #[arg(long, default_value_t = 1e6)]
        t: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlexFormat {
    Csv,
    Json,
    Obj,
}

#[derive(Args)]
struct FlexArgs {
    spec: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    t_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_hi: Option<f64>,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = TOL_CLOSURE)]
    tol_closure: f64,
    /// Only follow branches starting from this sign vector, e.g. `+-+-`.
    #[arg(long, allow_hyphen_values = true)]
    signs: Option<String>,
    /// Trace output: CSV rows, the full trace as JSON, or one mesh.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FlexFormat::Csv)]
    format: FlexFormat,
    /// Directory receiving one OBJ mesh per closing sample.
    #[arg(long)]
    frames: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Same,
    Cross,
    Auto,
}

impl From<PairingArg> for PairingChoice {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Same => PairingChoice::Same,
            PairingArg::Cross => PairingChoice::Cross,
            PairingArg::Auto => PairingChoice::Auto,
        }
    }
}

#[derive(Args)]
struct QuadArgs {
    /// Vertices `x,y,z` of the quadrilateral ABCD and the north pole.
    #[arg(long, value_parser = parse_h3, allow_hyphen_values = true)]
    a: PointH3,
    #[arg(long, value_parser = parse_h3, allow_hyphen_values = true)]
    b: PointH3,
    #[arg(long, value_parser = parse_h3, allow_hyphen_values = true)]
    c: PointH3,
    #[arg(long, value_parser = parse_h3, allow_hyphen_values = true)]
    d: PointH3,
    #[arg(long, value_parser = parse_h3, allow_hyphen_values = true)]
    n: PointH3,
}

#[derive(Args)]
struct Type3Common {
    /// `ρ,z` of the vertices A₁ and A₂.
    #[arg(long, value_parser = parse_h2, allow_hyphen_values = true)]
    a1: PointH2,
    #[arg(long, value_parser = parse_h2, allow_hyphen_values = true)]
    a2: PointH2,
    #[arg(long, value_enum)]
    pairing_b: Option<PairingArg>,
    #[arg(long, value_enum)]
    pairing_c: Option<PairingArg>,
}

#[derive(Subcommand)]
enum ConstructKind {
    Type1 {
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Type2 {
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    #[command(name = "type3-circle")]
    Type3Circle {
        /// Center `ρ,z` and radius of the circle touched by the B-quadrilateral.
        #[arg(long, value_parser = parse_h2, allow_hyphen_values = true)]
        m: PointH2,
        #[arg(long)]
        r: f64,
        /// Radius of the concentric circle for C (default r/2).
        #[arg(long)]
        r2: Option<f64>,
        #[command(flatten)]
        common: Type3Common,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    #[command(name = "type3-horocycle")]
    Type3Horocycle {
        /// Height of the horocycle touched by the B-quadrilateral.
        #[arg(long = "R", default_value_t = 1.0)]
        r: f64,
        /// Height of the horocycle for C (default halfway between the
        /// higher vertex and R).
        #[arg(long)]
        r2: Option<f64>,
        #[command(flatten)]
        common: Type3Common,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    #[command(name = "type3-hypercycle")]
    Type3Hypercycle {
        /// Angle of the ray `z = ρ tan α` touched by the B-quadrilateral.
        #[arg(long)]
        alpha: f64,
        /// Tangent centers `ρ_l(A₁), ρ_r(A₁), ρ_l(A₂), ρ_r(A₂)`.
        #[arg(long, value_parser = parse_centers, allow_hyphen_values = true)]
        centers: [f64; 4],
        /// Angle of the ray for C (default halfway between α and π/2).
        #[arg(long)]
        alpha2: Option<f64>,
        #[arg(long, value_enum)]
        pairing_b: Option<PairingArg>,
        #[arg(long, value_enum)]
        pairing_c: Option<PairingArg>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!(
            "expected {n} comma-separated numbers, got {}",
            v.len()
        ));
    }
    Ok(v)
}

fn parse_h2(s: &str) -> Result<PointH2, String> {
    let v = parse_floats(s, 2)?;
    Ok(PointH2 { rho: v[0], z: v[1] })
}

fn parse_h3(s: &str) -> Result<PointH3, String> {
    let v = parse_floats(s, 3)?;
    Ok(PointH3 {
        x: v[0],
        y: v[1],
        z: v[2],
    })
}

fn parse_centers(s: &str) -> Result<[f64; 4], String> {
    let v = parse_floats(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn h2_json(p: &PointH2) -> Value {
    json!([p.rho, p.z])
}

fn h3_json(p: &PointH3) -> Value {
    json!([p.x, p.y, p.z])
}

fn pairings(
    common_b: Option<PairingArg>,
    common_c: Option<PairingArg>,
    default: Pairings,
) -> Pairings {
    Pairings {
        b: common_b.map_or(default.b, Into::into),
        c: common_c.map_or(default.c, Into::into),
    }
}

fn type3_provenance(kind: &str, mut params: Value, cfg: &FlatOctahedronConfig) -> Value {
    params["pairing_b"] = json!(cfg.quad_b.pairing);
    params["pairing_c"] = json!(cfg.quad_c.pairing);
    json!({ "type": kind, "params": params })
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn construct(kind: ConstructKind) -> anyhow::Result<ExitCode> {
    let (oct, mut provenance, out): (Octahedron, Value, Option<PathBuf>) = match kind {
        ConstructKind::Type1 { quad, out } => {
            let q = QuadrilateralH3 {
                a: quad.a,
                b: quad.b,
                c: quad.c,
                d: quad.d,
            };
            let oct = construct_type1(&q, &quad.n)?;
            (oct, quad_provenance("type1", &quad), out)
        }
        ConstructKind::Type2 { quad, out } => {
            let q = QuadrilateralH3 {
                a: quad.a,
                b: quad.b,
                c: quad.c,
                d: quad.d,
            };
            let oct = construct_type2(&q, &quad.n)?;
            (oct, quad_provenance("type2", &quad), out)
        }
        ConstructKind::Type3Circle {
            m,
            r,
            r2,
            common,
            out,
        } => {
            let r2 = r2.unwrap_or(r / 2.0);
            let p = pairings(
                common.pairing_b,
                common.pairing_c,
                Pairings {
                    b: PairingChoice::Auto,
                    c: PairingChoice::Auto,
                },
            );
            let cfg = flat_config_circle(&m, r, r2, &common.a1, &common.a2, p)?;
            let params = json!({ "m": h2_json(&m), "r": r, "r2": r2, "a1": h2_json(&common.a1), "a2": h2_json(&common.a2) });
            (
                lift_type3(&cfg)?,
                type3_provenance("type3-circle", params, &cfg),
                out,
            )
        }
        ConstructKind::Type3Horocycle { r, r2, common, out } => {
            let r2 = r2.unwrap_or(0.5 * (common.a1.z.max(common.a2.z) + r));
            let p = pairings(common.pairing_b, common.pairing_c, Pairings::default());
            let cfg = flat_config_horocycle(r, &common.a1, &common.a2, r2, p)?;
            let params =
                json!({ "R": r, "r2": r2, "a1": h2_json(&common.a1), "a2": h2_json(&common.a2) });
            (
                lift_type3(&cfg)?,
                type3_provenance("type3-horocycle", params, &cfg),
                out,
            )
        }
        ConstructKind::Type3Hypercycle {
            alpha,
            centers,
            alpha2,
            pairing_b,
            pairing_c,
            out,
        } => {
            let alpha2 = alpha2.unwrap_or(0.5 * (alpha + std::f64::consts::FRAC_PI_2));
            let p = pairings(pairing_b, pairing_c, Pairings::default());
            let cfg = flat_config_hypercycle(alpha, centers, alpha2, p)?;
            let params = json!({ "alpha": alpha, "alpha2": alpha2, "centers": centers });
            (
                lift_type3(&cfg)?,
                type3_provenance("type3-hypercycle", params, &cfg),
                out,
            )
        }
    };
    if let Some(t0) = oct.t0() {
        provenance["t0"] = json!(t0);
    }
    write_or_print(out.as_deref(), &spec_to_json(&oct.spec, Some(&provenance)))?;
    Ok(ExitCode::SUCCESS)
}

fn quad_provenance(kind: &str, q: &QuadArgs) -> Value {
    json!({
        "type": kind,
        "params": { "a": h3_json(&q.a), "b": h3_json(&q.b), "c": h3_json(&q.c), "d": h3_json(&q.d), "n": h3_json(&q.n) },
    })
}

fn read_spec(path: &Path) -> anyhow::Result<SpecDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_spec_json(&text)?)
}

fn check(spec: &Path, tol: f64, format: CheckFormat) -> anyhow::Result<ExitCode> {
    if !(tol > 0.0) {
        bail!("--tol-cert must be positive, got {tol}");
    }
    let doc = read_spec(spec)?;
    let certs: Vec<EquatorCertificate> = if doc.spec.v() == 4 {
        certify_octahedron(&doc.spec, tol)?.into()
    } else {
        vec![necessary_condition(&doc.spec.equator, tol)?]
    };
    match format {
        CheckFormat::Json => println!("{}", serde_json::to_string_pretty(&certs)?),
        CheckFormat::Text => {
            for (k, c) in certs.iter().enumerate() {
                let lengths: Vec<String> = c.equator.iter().map(|e| e.to_string()).collect();
                println!("equator {}: [{}]", k + 1, lengths.join(", "));
                println!("  min |sum| = {:e}", c.min_residual);
                for (s, r) in c.solutions.iter().zip(&c.residuals) {
                    println!("  {s}  residual {r:e}");
                }
                if c.is_empty() {
                    println!("  no balancing sign vector");
                }
            }
        }
    }
    Ok(if certs.iter().all(|c| !c.is_empty()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn frame_obj(spec: &SuspensionSpec, trace: &FlexTrace, i: usize) -> anyhow::Result<Option<String>> {
    let s = &trace.samples[i];
    let Some(sol) = &s.solution else {
        return Ok(None);
    };
    let p = place(spec, s.t, &sol.signs, 0.0)?;
    Ok(Some(placement_to_obj(&p)?))
}

fn flex(args: FlexArgs) -> anyhow::Result<ExitCode> {
    for (name, v) in [("--t-lo", args.t_lo), ("--t-hi", args.t_hi)] {
        if let Some(t) = v {
            if !(t > 1.0) {
                bail!("{name} must exceed 1, got {t}");
            }
        }
    }
    if args.steps < 2 {
        bail!("--steps must be at least 2");
    }
    if !(args.tol_closure > 0.0) {
        bail!("--tol-closure must be positive");
    }
    let doc = read_spec(&args.spec)?;
    let spec = &doc.spec;
    let restrict = args
        .signs
        .as_deref()
        .map(str::parse::<SignVector>)
        .transpose()?;
    let opts = TraceOptions {
        tol_closure: args.tol_closure,
        restrict,
        ..Default::default()
    };

    let t0 = doc
        .provenance
        .as_ref()
        .and_then(|p| p.get("t0"))
        .and_then(Value::as_f64);
    let (lo, hi) = match (args.t_lo, args.t_hi) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => match trace_window(spec, t0) {
            Ok((wa, wb)) => (a.unwrap_or(wa), b.unwrap_or(wb)),
            Err(Error::NoFeasibleInterval { .. }) => {
                println!("RIGID");
                return Ok(ExitCode::from(1));
            }
            Err(e) => return Err(e.into()),
        },
    };
    let trace = match trace_flex(spec, lo, hi, args.steps, &opts) {
        Ok(tr) => tr,
        Err(Error::NoFeasibleInterval { .. }) => {
            println!("RIGID");
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.into()),
    };

    if let Some(out) = &args.out {
        let text = match args.format {
            FlexFormat::Csv => trace_to_csv(&trace),
            FlexFormat::Json => serde_json::to_string_pretty(&trace)? + "\n",
            FlexFormat::Obj => {
                let i = match trace.verdict {
                    Verdict::Flexible { t_a, t_b } => {
                        let mid = 0.5 * (t_a + t_b);
                        (0..trace.samples.len())
                            .min_by(|&i, &j| {
                                (trace.samples[i].t - mid)
                                    .abs()
                                    .total_cmp(&(trace.samples[j].t - mid).abs())
                            })
                            .unwrap_or(0)
                    }
                    Verdict::Rigid => trace
                        .samples
                        .iter()
                        .position(|s| s.solution.is_some())
                        .unwrap_or(0),
                };
                frame_obj(spec, &trace, i)?.ok_or_else(|| anyhow!("no placement to export"))?
            }
        };
        fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    if let Some(dir) = &args.frames {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for i in 0..trace.samples.len() {
            if let Some(obj) = frame_obj(spec, &trace, i)? {
                let path = dir.join(format!("frame_{i:04}.obj"));
                fs::write(&path, obj).with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }

    println!(
        "window [{}, {}]{}",
        trace.t_lo,
        trace.t_hi,
        if trace.trimmed { " (trimmed)" } else { "" }
    );
    for f in &trace.flats {
        let edges: Vec<String> = f.edges.iter().map(|j| (j + 1).to_string()).collect();
        println!(
            "flat t = {} edges {} cos = {}",
            f.t,
            edges.join(","),
            f.cos_sign
        );
    }
    Ok(match trace.verdict {
        Verdict::Flexible { t_a, t_b } => {
            println!("FLEXIBLE [{t_a}, {t_b}]");
            ExitCode::SUCCESS
        }
        Verdict::Rigid => {
            println!("RIGID");
            ExitCode::from(1)
        }
    })
}

fn limits(spec: &Path, t: f64) -> anyhow::Result<ExitCode> {
    if !(t > 1.0) {
        bail!("--t must exceed 1, got {t}");
    }
    let doc = read_spec(spec)?;
    let s = &doc.spec;
    let v = s.v();
    println!(
        "j,e_j,e_next,e_eq,rho_limit,re_g_limit,im_g_limit,consistency,factor_plus,factor_minus"
    );
    let mut worst: f64 = 0.0;
    for j in 0..v {
        let k = (j + 1) % v;
        let l = limit_ratios(s.north[j], s.north[k], s.equator[j]);
        let n = numeric_ratios(
            t,
            s.north[j],
            s.south[j],
            s.north[k],
            s.south[k],
            s.equator[j],
        )?;
        let dev = [n.rho / l.rho, n.re_g / l.re_g, n.abs_im_g / l.abs_im_g]
            .iter()
            .map(|r| (r - 1.0).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        println!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            j + 1,
            s.north[j],
            s.north[k],
            s.equator[j],
            l.rho,
            l.re_g,
            l.abs_im_g,
            dev,
            limit_edge_factor(s.equator[j], 1),
            limit_edge_factor(s.equator[j], -1),
        );
    }
    eprintln!("max consistency {worst:e} at t = {t:e}");
    Ok(ExitCode::SUCCESS)
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(val) = std::env::var("HYPFLEX_THREADS") else {
        return Ok(());
    };
    let n: usize = val
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("HYPFLEX_THREADS must be a positive integer, got {val:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    init_threads()?;
    match cli.command {
        Command::Construct { kind } => construct(kind),
        Command::Check {
            spec,
            tol_cert,
            format,
        } => check(&spec, tol_cert, format),
        Command::Flex(args) => flex(args),
        Command::Limits { spec, t } => limits(&spec, t),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
