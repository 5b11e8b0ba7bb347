//! `fuzzyvc`: command-line front end.
//!
//! Every command reads instance files in the crate's JSON schemas,
//! dispatches to the corresponding library operation, and prints a
//! single canonical `RunReport` object on stdout. Exit codes: 0 on
//! success, 1 on domain/not-found errors, 2 on malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use fuzzy_vc::approx::{self, ApproxStrategy};
use fuzzy_vc::covering::{self, CoveringMethod};
use fuzzy_vc::disamb::{self, DisambiguationMode};
use fuzzy_vc::generate::{self, GenKind, GenParams};
use fuzzy_vc::helly;
use fuzzy_vc::instance::{self, InstanceFile};
use fuzzy_vc::measure::DiscreteMeasure;
use fuzzy_vc::nets::{self, NetStrategy};
use fuzzy_vc::pq;
use fuzzy_vc::rat::{self, Rat};
use fuzzy_vc::report::RunReport;
use fuzzy_vc::selftest::{self, Budget};
use fuzzy_vc::system::{sauer_bound, FuzzySetSystem};
use fuzzy_vc::transversal;
use fuzzy_vc::width::{self, WidthDist, WidthMode};
use fuzzy_vc::{Error, FunctionClass, Result};

fn parse_ratio(s: &str) -> std::result::Result<Rat, String> {
    rat::parse_rat(s, "flag").map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(name = "fuzzyvc", version, about = "Exact fuzzy set system combinatorics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct InArg {
    /// Input instance file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(clap::Args)]
struct OutArg {
    /// Write the produced instance to this file as canonical JSON.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct MeasureArg {
    /// Measure instance file; defaults to the uniform measure.
    #[arg(long, value_name = "FILE")]
    measure: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// VC-dimension of a fuzzy or crisp set system.
    Vc {
        #[command(flatten)]
        input: InArg,
    },
    /// Full shatter-function profile of a fuzzy or crisp set system.
    Shatter {
        #[command(flatten)]
        input: InArg,
    },
    /// Dual of a fuzzy set system (membership-matrix transpose).
    Dual {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Threshold slice of a function class into a fuzzy system.
    Slice {
        #[command(flatten)]
        input: InArg,
        #[arg(long, value_parser = parse_ratio)]
        r: Rat,
        #[arg(long, value_parser = parse_ratio)]
        s: Rat,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fat-shattering dimension of a function class at gap eps.
    Fat {
        #[command(flatten)]
        input: InArg,
        #[arg(long, value_parser = parse_ratio)]
        eps: Rat,
    },
    /// Gap VC-dimension of a function class at gap eps.
    Vceps {
        #[command(flatten)]
        input: InArg,
        #[arg(long, value_parser = parse_ratio)]
        eps: Rat,
    },
    /// Strong disambiguation of a fuzzy set system.
    Disamb {
        #[command(flatten)]
        input: InArg,
        /// trivial | greedy | minimal
        #[arg(long, default_value = "greedy")]
        mode: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Mean width of a function class's rows, or its width profile.
    Width {
        #[command(flatten)]
        input: InArg,
        /// exact | mc
        #[arg(long, default_value = "exact")]
        mode: String,
        /// rademacher | gaussian
        #[arg(long, default_value = "rademacher")]
        dist: String,
        /// Profile size; omitted means the plain width of the rows.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        measure: MeasureArg,
    },
    /// Find a verified eps-approximation.
    Approx {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long, value_parser = parse_ratio)]
        eps: Rat,
        /// random | exhaustive_min
        #[arg(long, default_value = "exhaustive_min")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "size-cap", default_value_t = 16)]
        size_cap: usize,
    },
    /// Covering or packing number of an evaluated function class.
    Cover {
        #[command(flatten)]
        input: InArg,
        #[arg(long, value_parser = parse_ratio)]
        eps: Rat,
        /// internal | grid:STEP | packing
        #[arg(long, default_value = "internal")]
        mode: String,
        /// Comma-separated point tuple; defaults to all points.
        #[arg(long)]
        xbar: Option<String>,
    },
    /// Closed-form bound calculators.
    Bounds {
        /// covering | deviation | sauer
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_parser = parse_ratio, default_value = "1/1")]
        eps: Rat,
        #[arg(long, default_value_t = 1.0)]
        ncov: f64,
    },
    /// Find a verified eps-net for a fuzzy set system.
    Net {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long, value_parser = parse_ratio)]
        eps: Rat,
        /// random[:C] | greedy | exhaustive_min
        #[arg(long, default_value = "greedy")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact minimum transversal (crisp input) or the net-based
    /// transversal pipeline (fuzzy input).
    Transversal {
        #[command(flatten)]
        input: InArg,
        /// Net strategy for fuzzy inputs: random[:C] | greedy | exhaustive_min
        #[arg(long, default_value = "greedy")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fractional transversal and packing numbers with duality check.
    Fractional {
        #[command(flatten)]
        input: InArg,
    },
    /// Fractional Helly witness for a fuzzy relation.
    Helly {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_ratio)]
        alpha: Rat,
        #[arg(long = "m-max", default_value_t = helly::DEFAULT_M_MAX)]
        m_max: usize,
    },
    /// The (p,q) pipeline on a function class.
    Pq {
        #[command(flatten)]
        input: InArg,
        #[arg(long, value_parser = parse_ratio)]
        r: Rat,
        #[arg(long, value_parser = parse_ratio)]
        t: Rat,
        #[arg(long, value_parser = parse_ratio)]
        s: Rat,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Net strategy: random[:C] | greedy | exhaustive_min
        #[arg(long, default_value = "greedy")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Seeded instance generation.
    Gen {
        /// crisp_intervals | fuzzy_margin_intervals | distance_functions |
        /// random_fuzzy | random_function_matrix
        #[arg(long)]
        mode: String,
        /// Generator overrides, e.g. "n=8,k=5,width=1/2".
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the seeded property battery.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// small | medium
        #[arg(long, default_value = "small")]
        budget: String,
    },
}

struct Loaded {
    instance: InstanceFile,
    digest: String,
}

fn load(path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: format!("cannot read file: {e}"),
    })?;
    let instance = instance::parse_instance(&bytes)?;
    let digest = instance::digest(&instance);
    Ok(Loaded { instance, digest })
}

fn load_fuzzy(path: &Path) -> Result<(FuzzySetSystem, String)> {
    let loaded = load(path)?;
    match loaded.instance {
        InstanceFile::FuzzySystem(f) => Ok((f, loaded.digest)),
        InstanceFile::SetSystem(s) => Ok((s.to_fuzzy(), loaded.digest)),
        other => Err(Error::domain(format!(
            "expected a fuzzy or crisp set system, got {}",
            other.type_tag()
        ))),
    }
}

fn load_class(path: &Path) -> Result<(FunctionClass, String)> {
    let loaded = load(path)?;
    match loaded.instance {
        InstanceFile::FunctionClass(q) => Ok((q, loaded.digest)),
        other => Err(Error::domain(format!(
            "expected a function class, got {}",
            other.type_tag()
        ))),
    }
}

fn load_measure(arg: &MeasureArg, points: usize) -> Result<DiscreteMeasure> {
    match &arg.measure {
        None => DiscreteMeasure::uniform(points),
        Some(path) => {
            let loaded = load(path)?;
            match loaded.instance {
                InstanceFile::Measure(m) if m.len() == points => Ok(m),
                InstanceFile::Measure(m) => Err(Error::domain(format!(
                    "measure on {} points does not match ground of {points}",
                    m.len()
                ))),
                other => Err(Error::domain(format!(
                    "expected a measure, got {}",
                    other.type_tag()
                ))),
            }
        }
    }
}

fn net_strategy(mode: &str, seed: u64) -> Result<NetStrategy> {
    if mode == "greedy" {
        return Ok(NetStrategy::Greedy);
    }
    if mode == "exhaustive_min" {
        return Ok(NetStrategy::ExhaustiveMin);
    }
    if mode == "random" {
        return Ok(NetStrategy::random(seed));
    }
    if let Some(c_text) = mode.strip_prefix("random:") {
        let c: f64 = c_text
            .parse()
            .map_err(|_| Error::domain(format!("bad net constant {c_text:?}")))?;
        return Ok(NetStrategy::Random {
            c,
            seed,
            retries: nets::DEFAULT_NET_RETRIES,
        });
    }
    Err(Error::domain(format!("unknown net strategy {mode:?}")))
}

fn write_out(out: &OutArg, produced: &InstanceFile) -> Result<Value> {
    let text = instance::canonical_json(produced);
    if let Some(path) = &out.out {
        std::fs::write(path, format!("{text}\n")).map_err(|e| {
            Error::domain(format!("cannot write {}: {e}", path.display()))
        })?;
    }
    Ok(instance::to_value(produced))
}

fn run(cli: Cli) -> Result<RunReport> {
    match cli.command {
        Command::Vc { input } => {
            let (f, digest) = load_fuzzy(&input.input)?;
            let vc = f.vc_dimension();
            Ok(RunReport::new("vc", digest, json!({}), json!({ "vc": vc }), 0))
        }
        Command::Shatter { input } => {
            let (f, digest) = load_fuzzy(&input.input)?;
            let profile = (0..=f.ground_size())
                .map(|n| f.shatter_function(n))
                .collect::<Result<Vec<_>>>()?;
            Ok(RunReport::new(
                "shatter",
                digest,
                json!({}),
                json!({ "profile": profile, "ground_size": f.ground_size() }),
                0,
            ))
        }
        Command::Dual { input, out } => {
            let (f, digest) = load_fuzzy(&input.input)?;
            let dual = InstanceFile::FuzzySystem(f.dual());
            let payload = write_out(&out, &dual)?;
            Ok(RunReport::new("dual", digest, json!({}), json!({ "instance": payload }), 0))
        }
        Command::Slice { input, r, s, out } => {
            let (q, digest) = load_class(&input.input)?;
            let sliced = InstanceFile::FuzzySystem(q.slice(&r, &s)?);
            let payload = write_out(&out, &sliced)?;
            Ok(RunReport::new(
                "slice",
                digest,
                json!({ "r": rat::format_rat(&r), "s": rat::format_rat(&s) }),
                json!({ "instance": payload }),
                0,
            ))
        }
        Command::Fat { input, eps } => {
            let (q, digest) = load_class(&input.input)?;
            let value = q.fat_shattering(&eps)?;
            Ok(RunReport::new(
                "fat",
                digest,
                json!({ "eps": rat::format_rat(&eps) }),
                json!({ "fat_shattering": value }),
                0,
            ))
        }
        Command::Vceps { input, eps } => {
            let (q, digest) = load_class(&input.input)?;
            let value = q.vc_eps(&eps)?;
            Ok(RunReport::new(
                "vceps",
                digest,
                json!({ "eps": rat::format_rat(&eps) }),
                json!({ "vc_eps": value }),
                0,
            ))
        }
        Command::Disamb { input, mode, out } => {
            let (f, digest) = load_fuzzy(&input.input)?;
            let mode_enum = match mode.as_str() {
                "trivial" => DisambiguationMode::Trivial,
                "greedy" => DisambiguationMode::Greedy,
                "minimal" => DisambiguationMode::Minimal,
                other => return Err(Error::domain(format!("unknown mode {other:?}"))),
            };
            let crisp = disamb::strong_disambiguation(&f, mode_enum)?;
            let verified = disamb::verify_disambiguation(&f, &crisp);
            let payload = write_out(&out, &InstanceFile::SetSystem(crisp.clone()))?;
            Ok(RunReport::new(
                "disamb",
                digest,
                json!({ "mode": mode }),
                json!({ "size": crisp.len(), "verified": verified, "instance": payload }),
                0,
            ))
        }
        Command::Width { input, mode, dist, n, samples, seed, measure } => {
            let (q, digest) = load_class(&input.input)?;
            let dist_enum = match dist.as_str() {
                "rademacher" => WidthDist::Rademacher,
                "gaussian" => WidthDist::Gaussian,
                other => return Err(Error::domain(format!("unknown distribution {other:?}"))),
            };
            let mode_enum = match mode.as_str() {
                "exact" => WidthMode::Exact,
                "mc" => WidthMode::MonteCarlo { samples, seed },
                other => return Err(Error::domain(format!("unknown width mode {other:?}"))),
            };
            let estimate = match n {
                None => width::mean_width(q.rows(), dist_enum, mode_enum)?,
                Some(n) => {
                    let mu = match measure.measure {
                        Some(_) => Some(load_measure(&measure, q.point_count())?),
                        None => None,
                    };
                    width::width_profile(&q, n, dist_enum, mu.as_ref(), mode_enum)?
                }
            };
            Ok(RunReport::new(
                "width",
                digest,
                json!({ "mode": mode, "dist": dist, "n": n, "samples": samples }),
                json!({
                    "value": estimate.value,
                    "exact": estimate.exact.as_ref().map(rat::format_rat),
                    "std_error": estimate.std_error,
                    "samples": estimate.samples,
                }),
                seed,
            ))
        }
        Command::Approx { input, measure, eps, mode, seed, size_cap } => {
            let (q, digest) = load_class(&input.input)?;
            let mu = load_measure(&measure, q.point_count())?;
            let strategy = match mode.as_str() {
                "random" => ApproxStrategy::Random { seed },
                "exhaustive_min" => ApproxStrategy::ExhaustiveMin,
                other => return Err(Error::domain(format!("unknown strategy {other:?}"))),
            };
            let tuple = approx::find_eps_approximation(&q, &mu, &eps, strategy, size_cap)?;
            let deviation = approx::max_deviation(&q, &mu, &tuple)?;
            Ok(RunReport::new(
                "approx",
                digest,
                json!({ "eps": rat::format_rat(&eps), "mode": mode, "size_cap": size_cap }),
                json!({
                    "tuple": tuple,
                    "size": tuple.len(),
                    "max_deviation": rat::format_rat(&deviation),
                }),
                seed,
            ))
        }
        Command::Cover { input, eps, mode, xbar } => {
            let (q, digest) = load_class(&input.input)?;
            let tuple: Vec<usize> = match &xbar {
                None => (0..q.point_count()).collect(),
                Some(text) => text
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::domain(format!("bad tuple entry {s:?}")))
                    })
                    .collect::<Result<_>>()?,
            };
            let method = if mode == "internal" {
                CoveringMethod::Internal
            } else if mode == "packing" {
                CoveringMethod::Packing
            } else if let Some(step) = mode.strip_prefix("grid:") {
                CoveringMethod::Grid { step: rat::parse_rat(step, "mode")? }
            } else {
                return Err(Error::domain(format!("unknown covering method {mode:?}")));
            };
            let value = covering::covering_number(&q, &tuple, &eps, method)?;
            Ok(RunReport::new(
                "cover",
                digest,
                json!({ "eps": rat::format_rat(&eps), "mode": mode, "xbar": tuple }),
                json!({ "count": value }),
                0,
            ))
        }
        Command::Bounds { mode, d, n, eps, ncov } => {
            let eps_f = rat::rat_to_f64(&eps);
            let result = match mode.as_str() {
                "covering" => json!({ "covering_bound": covering::covering_bound(d, n, eps_f)? }),
                "deviation" => {
                    json!({ "deviation_bound": covering::deviation_bound(n, eps_f, ncov)? })
                }
                "sauer" => json!({ "sauer_bound": sauer_bound(d, n).to_string() }),
                other => return Err(Error::domain(format!("unknown bound {other:?}"))),
            };
            let params = json!({
                "mode": mode, "d": d, "n": n, "eps": rat::format_rat(&eps), "ncov": ncov,
            });
            let digest = instance::digest_bytes(params.to_string().as_bytes());
            Ok(RunReport::new("bounds", digest, params, result, 0))
        }
        Command::Net { input, measure, eps, mode, seed } => {
            let (f, digest) = load_fuzzy(&input.input)?;
            let mu = load_measure(&measure, f.ground_size())?;
            let strategy = net_strategy(&mode, seed)?;
            let cert = nets::find_eps_net(&f, &mu, &eps, strategy)?;
            Ok(RunReport::new(
                "net",
                digest,
                json!({ "eps": rat::format_rat(&eps), "mode": mode }),
                json!({
                    "net": cert.net,
                    "size": cert.net.len(),
                    "heavy_sets": cert.heavy_sets,
                    "checked_sets": cert.checked_sets,
                }),
                seed,
            ))
        }
        Command::Transversal { input, mode, seed } => {
            let loaded = load(&input.input)?;
            match loaded.instance {
                InstanceFile::SetSystem(s) => {
                    let points = transversal::optimal_transversal(&s)?;
                    let (tau_star, _) = transversal::fractional_transversal(&s)?;
                    Ok(RunReport::new(
                        "transversal",
                        loaded.digest,
                        json!({}),
                        json!({
                            "transversal": points,
                            "size": points.len(),
                            "tau_star": rat::format_rat(&tau_star),
                        }),
                        0,
                    ))
                }
                InstanceFile::FuzzySystem(f) => {
                    let strategy = net_strategy(&mode, seed)?;
                    let (points, cert) = nets::transversal_via_net(&f, strategy)?;
                    Ok(RunReport::new(
                        "transversal",
                        loaded.digest,
                        json!({ "mode": mode }),
                        json!({
                            "transversal": points,
                            "size": points.len(),
                            "tau_star_inner": rat::format_rat(&cert.tau_star_inner),
                            "net_heavy_sets": cert.net.heavy_sets,
                        }),
                        seed,
                    ))
                }
                other => Err(Error::domain(format!(
                    "expected a set system or fuzzy system, got {}",
                    other.type_tag()
                ))),
            }
        }
        Command::Fractional { input } => {
            let loaded = load(&input.input)?;
            let InstanceFile::SetSystem(s) = loaded.instance else {
                return Err(Error::domain("expected a set system".to_string()));
            };
            let (tau, t_weights) = transversal::fractional_transversal(&s)?;
            let (nu, p_weights) = transversal::fractional_packing(&s)?;
            Ok(RunReport::new(
                "fractional",
                loaded.digest,
                json!({}),
                json!({
                    "tau_star": rat::format_rat(&tau),
                    "nu_star": rat::format_rat(&nu),
                    "duality_holds": tau == nu,
                    "transversal_weights": t_weights.iter().map(rat::format_rat).collect::<Vec<_>>(),
                    "packing_weights": p_weights.iter().map(rat::format_rat).collect::<Vec<_>>(),
                }),
                0,
            ))
        }
        Command::Helly { input, k, alpha, m_max } => {
            let loaded = load(&input.input)?;
            let InstanceFile::FuzzyRelation(r) = loaded.instance else {
                return Err(Error::domain("expected a fuzzy relation".to_string()));
            };
            let cert = helly::fractional_helly_witness_with_m_max(&r, k, &alpha, m_max)?;
            Ok(RunReport::new(
                "helly",
                loaded.digest,
                json!({ "k": k, "alpha": rat::format_rat(&alpha), "m_max": m_max }),
                json!({
                    "witness": cert.witness,
                    "j": cert.j,
                    "j_size": cert.j.len(),
                    "m": cert.m,
                    "beta": rat::format_rat(&cert.beta),
                    "good_fraction": rat::format_rat(&cert.good_fraction),
                }),
                0,
            ))
        }
        Command::Pq { input, r, t, s, p, q, mode, seed } => {
            let (class, digest) = load_class(&input.input)?;
            let strategy = net_strategy(&mode, seed)?;
            let (points, cert) = pq::pq_pipeline(&class, &r, &t, &s, p, q, strategy)?;
            Ok(RunReport::new(
                "pq",
                digest,
                json!({
                    "r": rat::format_rat(&r), "t": rat::format_rat(&t), "s": rat::format_rat(&s),
                    "p": p, "q": q, "mode": mode,
                }),
                json!({
                    "transversal": points,
                    "size": points.len(),
                    "dual_vc": cert.d,
                    "denominator": cert.denominator.to_string(),
                    "expanded_size": cert.expanded_size.to_string(),
                    "tau_star_outer": rat::format_rat(&cert.tau_star_outer),
                    "stages": cert.stages.iter().map(|st| json!({
                        "name": st.name,
                        "verified": st.verified,
                        "detail": st.detail,
                    })).collect::<Vec<_>>(),
                }),
                seed,
            ))
        }
        Command::Gen { mode, params, seed, out } => {
            let kind = GenKind::parse(&mode)?;
            let gen_params = GenParams::parse_str(&params)?;
            let produced = generate::generate(kind, &gen_params, seed)?;
            let payload = write_out(&out, &produced)?;
            let digest = instance::digest(&produced);
            Ok(RunReport::new(
                "gen",
                digest,
                json!({ "mode": mode, "params": params }),
                json!({ "instance": payload }),
                seed,
            ))
        }
        Command::Selftest { seed, budget } => {
            let budget_enum = Budget::parse(&budget)?;
            let result = selftest::run_selftest(seed, budget_enum);
            let digest = instance::digest_bytes(format!("selftest:{seed}:{budget}").as_bytes());
            Ok(RunReport::new(
                "selftest",
                digest,
                json!({ "budget": budget }),
                result,
                seed,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            println!("{}", report.to_canonical_json());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
