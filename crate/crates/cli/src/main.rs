use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use modecount::bounds::{
    aim_conjecture, crossover_dimension, lower_bound, seed_closure_bound, upper_bound, BoundValue, CrossoverKind,
    LowerFamily, SeedFamily, SeedTriple, UpperFamily, DEFAULT_DMAX,
};
use modecount::constructions::{
    pad_remote, product, realize_recipe, recipe_from_seeds, simplex_seed, solved_modes, verify_modes, PaddingSpec,
    Provenance, SeedRegistry, Verification, DEFAULT_SIMPLEX_EPSILON, DEFAULT_TILT_SEED,
};
use modecount::io::{format_f64, read_mixture, write_mixture};
use modecount::mixture::reduce_homoscedastic;
use modecount::solver::{classify, find_critical_points, SolveReport, SolverConfig};
use modecount::{tables, Error, Mixture};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "modecount", version, about = "Mode and critical-point bounds for Gaussian mixtures")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    output: Format,
    /// Gradient residual accepted as critical.
    #[arg(long, global = true)]
    tol_grad: Option<f64>,
    /// Relative distance below which points merge.
    #[arg(long, global = true)]
    tol_dedup: Option<f64>,
    /// Eigenvalue ratio below which a point is degenerate.
    #[arg(long, global = true)]
    tol_degenerate: Option<f64>,
    /// Seed for the tilt direction used on degenerate instances.
    #[arg(long, global = true, default_value_t = DEFAULT_TILT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate bound families at one (d, k).
    Bounds {
        /// An upper or lower family name, AIM, CLOSURE, or ALL.
        #[arg(long, default_value = "ALL")]
        family: String,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        k: u64,
    },
    /// Print one of the comparison tables.
    Tables {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
    },
    /// Find and classify every critical point of a mixture file.
    Solve {
        file: PathBuf,
        /// Solve a homoscedastic mixture on the affine span of its means.
        #[arg(long)]
        reduce_rank: bool,
        /// Ignore the dimension and component limits.
        #[arg(long)]
        force: bool,
        /// Reference component of the ratio system.
        #[arg(long)]
        reference: Option<usize>,
    },
    /// Build a witness mixture and its provenance record.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Check that a mixture has at least `claim` modes.
    Verify {
        file: PathBuf,
        #[arg(long)]
        claim: usize,
        #[arg(long)]
        force: bool,
    },
    /// First dimension at which one bound family overtakes another.
    Crossover {
        /// AUG_VS_HET, AUG_VS_AEH, PP_VS_BIN or ALL.
        #[arg(long, default_value = "ALL")]
        kind: String,
        /// Component counts, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = (2..=11u64).collect::<Vec<_>>())]
        k: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_DMAX)]
        dmax: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ConstructKind {
    /// Regular-simplex seed with K components in K-1 dimensions.
    Simplex {
        #[arg(long = "K", short = 'K')]
        vertices: usize,
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_EPSILON)]
        eps: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Add remote components, one new mode each.
    Pad {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        count: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Product of two mixtures on the sum of their dimensions.
    Product {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Realize a seed recipe: product, lift, pad.
    Recipe {
        /// Seed triples `dim,comps,modes` separated by `;`.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        /// Epsilon of any simplex seeds.
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_EPSILON)]
        eps: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(clap::Args, Debug)]
struct OutArgs {
    /// Mixture output path; provenance goes to `<out>.provenance.json`.
    /// Without it the mixture is printed.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip solving the result.
    #[arg(long)]
    no_verify: bool,
    #[arg(long)]
    force: bool,
}

impl Cli {
    fn solver_config(&self, force: bool, reference: Option<usize>) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tol_grad {
            cfg.grad_tol = t;
        }
        if let Some(t) = self.tol_dedup {
            cfg.dedup_tol = t;
        }
        if let Some(t) = self.tol_degenerate {
            cfg.degeneracy_tol = t;
        }
        cfg.force = force;
        cfg.reference = reference;
        cfg
    }

    fn echo(&self, command: &str, params: Value, solver: Option<&SolverConfig>) -> Value {
        let mut v = json!({
            "command": command,
            "output": format!("{:?}", self.output).to_lowercase(),
            "parameters": params,
        });
        if let Some(cfg) = solver {
            v["solver"] = serde_json::to_value(cfg).expect("config serializes");
            v["seed"] = json!(self.seed);
        }
        v
    }
}

/// Text and JSON embed the configuration; CSV sends it to stderr.
struct Out {
    format: Format,
    config: Value,
}

impl Out {
    fn emit(&self, text: String, csv: String, body: Value) {
        match self.format {
            Format::Text => {
                print!("# config: {}\n{text}", self.config);
            }
            Format::Csv => {
                eprintln!("# config: {}", self.config);
                print!("{csv}");
            }
            Format::Json => {
                let doc = json!({"config": self.config, "result": body});
                println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("MODECOUNT_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::PaddingFailed { .. }) => EXIT_FAIL,
                _ => EXIT_INPUT,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Bounds { family, d, k } => cmd_bounds(cli, family, *d, *k),
        Command::Tables { which } => cmd_tables(cli, *which),
        Command::Solve {
            file,
            reduce_rank,
            force,
            reference,
        } => cmd_solve(cli, file, *reduce_rank, cli.solver_config(*force, *reference)),
        Command::Construct { kind } => cmd_construct(cli, kind),
        Command::Verify { file, claim, force } => cmd_verify(cli, file, *claim, cli.solver_config(*force, None)),
        Command::Crossover { kind, k, dmax } => cmd_crossover(cli, kind, k, *dmax),
    }
}

fn load(path: &Path) -> Result<Mixture> {
    read_mixture(path).with_context(|| format!("reading {}", path.display()))
}

fn cmd_bounds(cli: &Cli, family: &str, d: u64, k: u64) -> Result<u8> {
    let name = family.trim().to_ascii_uppercase();
    let mut rows: Vec<(String, BoundValue, Option<Value>)> = Vec::new();
    let all = name == "ALL";
    if all {
        for f in UpperFamily::ALL {
            rows.push((f.name().into(), upper_bound(f, d, k)?, None));
        }
        if d >= 2 {
            for f in LowerFamily::ALL {
                rows.push((f.name().into(), lower_bound(f, d, k)?, None));
            }
        } else {
            rows.push(("PP".into(), lower_bound(LowerFamily::Pp, d, k)?, None));
        }
        rows.push(("AIM".into(), aim_conjecture(d, k)?, None));
    }
    if all || name == "CLOSURE" {
        let (v, recipe) = seed_closure_bound(d, k, &[SeedFamily::RayRen, SeedFamily::Simplex])?;
        rows.push(("CLOSURE".into(), v, Some(serde_json::to_value(&recipe)?)));
    } else if name == "AIM" {
        rows.push(("AIM".into(), aim_conjecture(d, k)?, None));
    } else if !all {
        let v = match name.parse::<UpperFamily>() {
            Ok(f) => upper_bound(f, d, k)?,
            Err(_) => lower_bound(name.parse::<LowerFamily>()?, d, k)?,
        };
        rows.push((name.clone(), v, None));
    }
    let out = Out {
        format: cli.output,
        config: cli.echo("bounds", json!({"family": name, "d": d, "k": k}), None),
    };
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut text = String::new();
    let mut csv = String::from("family,d,k,exact,rendered\n");
    let mut body = Vec::new();
    for (f, v, recipe) in &rows {
        let _ = writeln!(text, "{f:<width$}  {:>10}  {}", v.rendered, v.exact);
        let _ = writeln!(csv, "{f},{d},{k},{},{}", v.exact, v.rendered);
        let mut entry = json!({"family": f, "d": d, "k": k, "exact": v.exact.to_string(), "rendered": v.rendered});
        if let Some(r) = recipe {
            entry["recipe"] = r.clone();
        }
        body.push(entry);
    }
    out.emit(text, csv, Value::Array(body));
    Ok(0)
}

fn cmd_tables(cli: &Cli, which: u8) -> Result<u8> {
    let t = tables::table(which)?;
    let out = Out {
        format: cli.output,
        config: cli.echo("tables", json!({"which": which}), None),
    };
    out.emit(t.to_text(), t.to_csv(), serde_json::to_value(&t)?);
    Ok(0)
}

fn cmd_crossover(cli: &Cli, kind: &str, ks: &[u64], dmax: u64) -> Result<u8> {
    let kinds: Vec<CrossoverKind> = if kind.trim().eq_ignore_ascii_case("all") {
        vec![CrossoverKind::AugVsHet, CrossoverKind::AugVsAeh, CrossoverKind::PpVsBin]
    } else {
        vec![kind.parse()?]
    };
    let out = Out {
        format: cli.output,
        config: cli.echo(
            "crossover",
            json!({"kind": kinds.iter().map(|k| k.name()).collect::<Vec<_>>(), "k": ks, "dmax": dmax}),
            None,
        ),
    };
    let mut text = String::new();
    let mut csv = String::from("kind,k,d\n");
    let mut body = Vec::new();
    for kind in &kinds {
        let mut cells = Vec::new();
        for &k in ks {
            let d = crossover_dimension(*kind, k, dmax)?;
            let shown = d.map_or_else(|| "-".to_string(), |d| d.to_string());
            let _ = writeln!(csv, "{},{k},{shown}", kind.name());
            cells.push(format!("{k}:{shown}"));
            body.push(json!({"kind": kind.name(), "k": k, "d": d}));
        }
        let _ = writeln!(text, "{:<10}  {}", kind.name(), cells.join(" "));
    }
    out.emit(text, csv, Value::Array(body));
    Ok(0)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format_f64(*x)).collect();
    format!("[{}]", parts.join(", "))
}

fn report_text(r: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "d={} k={} rank={} homoscedastic={} N={} M={} C_(d-1)={} nondegenerate={} morse={} sandwich={} bound={}",
        r.dim,
        r.components,
        r.affine_rank,
        r.homoscedastic,
        r.n_critical,
        r.n_modes,
        r.n_index_dminus1,
        r.all_nondegenerate,
        r.morse_inequality_ok,
        r.upper_sandwich_ok,
        r.critical_bound
    );
    for (i, p) in r.points.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i:>3}  index={} {} log_density={} residual={:.3e} location={}",
            p.morse_index,
            if p.is_mode {
                "mode  "
            } else if p.degenerate {
                "degen "
            } else {
                "saddle"
            },
            format_f64(p.log_density),
            p.gradient_residual,
            fmt_vec(&p.location)
        );
    }
    s
}

fn report_csv(r: &SolveReport) -> String {
    let mut s = String::from("point,index,is_mode,degenerate,log_density,gradient_residual,eig_ratio,location\n");
    for (i, p) in r.points.iter().enumerate() {
        let loc: Vec<String> = p.location.iter().map(|x| format_f64(*x)).collect();
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{:e},{:e},{}",
            p.morse_index,
            p.is_mode,
            p.degenerate,
            format_f64(p.log_density),
            p.gradient_residual,
            p.eig_ratio,
            loc.join(";")
        );
    }
    s
}

/// Solves on the affine span of the means and classifies the lifted points
/// in the original coordinates. Verdicts come from the reduced solve.
fn solve_reduced(m: &Mixture, cfg: &SolverConfig) -> Result<(SolveReport, Option<usize>)> {
    let red = match reduce_homoscedastic(m) {
        Ok(r) => r,
        Err(Error::ZeroRank) => return Ok((find_critical_points(m, cfg)?, Some(0))),
        Err(e) => return Err(e.into()),
    };
    let mut report = find_critical_points(&red.reduced, cfg)?;
    let full_cfg = SolverConfig {
        force: true,
        ..cfg.clone()
    };
    report.points = report
        .points
        .iter()
        .map(|p| classify(m, &red.lift_point(&p.location_vector()), &full_cfg))
        .collect::<modecount::Result<_>>()?;
    report.dim = m.dim();
    report.affine_rank = red.rank;
    Ok((report, Some(red.rank)))
}

fn cmd_solve(cli: &Cli, file: &Path, reduce_rank: bool, cfg: SolverConfig) -> Result<u8> {
    let m = load(file)?;
    let (report, reduced_rank) = if reduce_rank {
        solve_reduced(&m, &cfg)?
    } else {
        (find_critical_points(&m, &cfg)?, None)
    };
    let out = Out {
        format: cli.output,
        config: cli.echo(
            "solve",
            json!({"file": file.display().to_string(), "reduce_rank": reduce_rank, "reduced_rank": reduced_rank}),
            Some(&cfg),
        ),
    };
    out.emit(report_text(&report), report_csv(&report), serde_json::to_value(&report)?);
    Ok(if report.checks_ok() { 0 } else { EXIT_FAIL })
}

fn verification_code(v: &Verification) -> u8 {
    if v.inconclusive {
        EXIT_INCONCLUSIVE
    } else if v.passed {
        0
    } else {
        EXIT_FAIL
    }
}

fn verification_text(v: &Verification) -> String {
    let verdict = if v.inconclusive {
        "INCONCLUSIVE"
    } else if v.passed {
        "PASS"
    } else {
        "FAIL"
    };
    let mut s = format!(
        "{verdict}: claim={} verified_modes={} N={} nondegenerate={} checks={}\n",
        v.claim, v.verified_modes, v.n_critical, v.all_nondegenerate, v.checks_ok
    );
    if let Some(c) = &v.tilt {
        let _ = writeln!(s, "tilt={}", fmt_vec(c));
    }
    if v.inconclusive {
        s.push_str("degenerate critical points remain; retry with a different --seed or a looser --tol-degenerate\n");
    }
    s
}

fn cmd_verify(cli: &Cli, file: &Path, claim: usize, cfg: SolverConfig) -> Result<u8> {
    let m = load(file)?;
    let v = verify_modes(&m, claim, &cfg, cli.seed)?;
    let out = Out {
        format: cli.output,
        config: cli.echo("verify", json!({"file": file.display().to_string(), "claim": claim}), Some(&cfg)),
    };
    let csv = format!(
        "claim,verified_modes,n_critical,all_nondegenerate,checks_ok,passed,inconclusive\n{},{},{},{},{},{},{}\n",
        v.claim, v.verified_modes, v.n_critical, v.all_nondegenerate, v.checks_ok, v.passed, v.inconclusive
    );
    let mut body = serde_json::to_value(&v)?;
    if let Some(r) = &v.report {
        body["report"] = serde_json::to_value(r)?;
    }
    out.emit(verification_text(&v), csv, body);
    Ok(verification_code(&v))
}

fn cmd_construct(cli: &Cli, kind: &ConstructKind) -> Result<u8> {
    let (mixture, claimed, kind_name, params, recipe, out_args) = match kind {
        ConstructKind::Simplex { vertices, eps, out } => {
            let (m, expected) = simplex_seed(*vertices, *eps)?;
            (m, expected, "simplex", json!({"K": vertices, "eps": eps}), None, out)
        }
        ConstructKind::Pad { base, count, out } => {
            let m = load(base)?;
            let cfg = cli.solver_config(out.force, None);
            let witnesses = solved_modes(&m, &cfg)?;
            let padded = pad_remote(&m, &PaddingSpec::new(*count), &witnesses)?;
            let params = json!({"base": base.display().to_string(), "count": count, "doublings": padded.doublings});
            (padded.mixture, padded.witnesses.len(), "pad", params, None, out)
        }
        ConstructKind::Product { first, second, out } => {
            let (a, b) = (load(first)?, load(second)?);
            let cfg = cli.solver_config(out.force, None);
            let modes = solved_modes(&a, &cfg)?.len() * solved_modes(&b, &cfg)?.len();
            let params = json!({"first": first.display().to_string(), "second": second.display().to_string()});
            (product(&a, &b)?, modes, "product", params, None, out)
        }
        ConstructKind::Recipe { seeds, d, k, eps, out } => {
            let triples = seeds
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(str::parse::<SeedTriple>)
                .collect::<modecount::Result<Vec<_>>>()?;
            let recipe = recipe_from_seeds(triples, *d, *k)?;
            let mut registry = SeedRegistry::new();
            registry.simplex_epsilon = Some(*eps);
            let padded = realize_recipe(&recipe, &registry, &cli.solver_config(out.force, None))?;
            let params = json!({"seeds": seeds, "d": d, "k": k, "eps": eps});
            (padded.mixture, recipe.value as usize, "recipe", params, Some(recipe), out)
        }
    };
    let cfg = cli.solver_config(out_args.force, None);
    let verification = if out_args.no_verify {
        None
    } else {
        Some(verify_modes(&mixture, claimed, &cfg, cli.seed)?)
    };
    let provenance = Provenance {
        kind: kind_name.into(),
        parameters: params.clone(),
        recipe,
        dim: mixture.dim(),
        components: mixture.len(),
        claimed_modes: claimed,
        verification,
        solver: cfg.clone(),
    };
    let out = Out {
        format: cli.output,
        config: cli.echo(&format!("construct {kind_name}"), params, Some(&cfg)),
    };
    let prov_json = serde_json::to_string_pretty(&provenance)?;
    let Some(path) = &out_args.out else {
        print!("{}", modecount::io::mixture_to_json(&mixture));
        return Ok(0);
    };
    write_mixture(path, &mixture).with_context(|| format!("writing {}", path.display()))?;
    let mut side = path.clone().into_os_string();
    side.push(".provenance.json");
    let side = PathBuf::from(side);
    std::fs::write(&side, format!("{prov_json}\n")).with_context(|| format!("writing {}", side.display()))?;
    let verified = provenance.verification.as_ref().map(|v| v.verified_modes);
    let shown = verified.map_or_else(|| "-".to_string(), |v| v.to_string());
    let text = format!(
        "{kind_name}: d={} k={} claimed_modes={} verified_modes={shown}\nmixture: {}\nprovenance: {}\n",
        provenance.dim,
        provenance.components,
        claimed,
        path.display(),
        side.display()
    );
    let csv = format!(
        "kind,d,k,claimed_modes,verified_modes,mixture,provenance\n{kind_name},{},{},{claimed},{shown},{},{}\n",
        provenance.dim,
        provenance.components,
        path.display(),
        side.display()
    );
    out.emit(text, csv, serde_json::to_value(&provenance)?);
    Ok(0)
}
