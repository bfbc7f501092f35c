//! `symfix`: command-line front end for exact fixed-point statistics of
//! symmetric-group actions.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use symfix_core::distributions::{derangement_proportion, distribution_ksets, distribution_matchings, rank_bounds_for};
use symfix_core::limits::{derangement_limit_probe, derangement_upper_bound, limit_prob_dp, limit_prob_exact, limit_prob_mc};
use symfix_core::oracle::{brute_force_fixed_points, fixed_points_via_class_intersection, OracleAction};
use symfix_core::rational::{to_f64, to_fraction_string};
use symfix_core::reproduce;
use symfix_core::rng::seeded;
use symfix_core::samplers::{payne_derangement, payne_exact_distribution, rejection_derangement, PayneVariant, Start};
use symfix_core::series::{
    a1_constant, b1_constant, block_system_bound, matchings_j_series, matchings_nonderangement_series, pj_at_one, wreath_bound_asymptotic,
    wreath_bound_series, AsymptoticConstant, Variable,
};
use symfix_core::shuffle::{eigenvalue_multiset_check, trace_table_csv, ShuffleChain};
use symfix_core::{Action, BigUint, CycleType, Rational, VERSION};

#[derive(Parser, Debug)]
#[command(name = "symfix", version, about = "Exact fixed-point statistics for symmetric-group actions")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "SYMFIX_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ActionArg {
    Ksets,
    Matchings,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OracleArg {
    Ksets,
    Matchings,
    Blocks,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LimitMethod {
    Exact,
    Mc,
    Dp,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ConstantArg {
    A,
    B,
    C,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VariableArg {
    T,
    U,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SampleAction {
    Derangement,
    Permutation,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SampleMethod {
    Rejection,
    Payne,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact law of the fixed-point count, its moments and rank bounds.
    Dist {
        #[arg(long, value_enum)]
        action: ActionArg,
        /// Degree of the symmetric group (2n for matchings).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Limit law of the fixed k-set count as n grows.
    Limit {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        j: u64,
        #[arg(long, value_enum, default_value_t = LimitMethod::Exact)]
        method: LimitMethod,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Poisson tail mass neglected per coordinate by the DP method.
        #[arg(long, default_value_t = 1e-9)]
        tail: f64,
        /// Also report lim P(F_k = 0) for every k up to this value.
        #[arg(long)]
        probe: Option<usize>,
    },
    /// Generating-function coefficients and asymptotic constants for matchings.
    Series {
        /// Print a constant instead of coefficients.
        #[arg(long, value_enum)]
        constant: Option<ConstantArg>,
        /// Fixed-point value; 0 gives the probability of at least one fixed matching.
        #[arg(long, default_value_t = 0)]
        j: usize,
        /// Order in u = t^2.
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[arg(long, value_enum, default_value_t = VariableArg::U)]
        variable: VariableArg,
    },
    /// Wreath-product bound series, its asymptotics, and block-system bounds.
    Wreath {
        #[arg(long, default_value_t = 2)]
        a: usize,
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Report the bound for m blocks of size m instead.
        #[arg(long)]
        block_bound: Option<usize>,
    },
    /// Traces of the top-k-to-random shuffle and the spectrum check.
    Shuffle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Largest power r.
        #[arg(long, default_value_t = 10)]
        traces: usize,
    },
    /// Draw random permutations or derangements, one per line.
    Sample {
        #[arg(long, value_enum, default_value_t = SampleAction::Derangement)]
        action: SampleAction,
        #[arg(long, value_enum, default_value_t = SampleMethod::Rejection)]
        method: SampleMethod,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "distinct")]
        variant: String,
    },
    /// Exact output law of one fixed-point-swapping pass.
    PayneAudit {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "uniform")]
        start: String,
        #[arg(long, default_value = "distinct")]
        variant: String,
    },
    /// Compare brute-force tables with the closed-form counts.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        action: OracleArg,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
    },
    /// Run the acceptance suite and report one line per claim.
    Reproduce {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

struct RunContext {
    invocation: String,
    seed: Option<u64>,
}

impl RunContext {
    fn envelope(&self, command: &str, body: Value) -> Value {
        json!({
            "command": command,
            "invocation": self.invocation,
            "seed": self.seed,
            "version": VERSION,
            "result": body,
        })
    }

    fn csv_header(&self) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        format!("# symfix {VERSION}; seed {seed}; invocation: {}\n", self.invocation)
    }
}

fn certified(value: f64, error: f64) -> Value {
    json!({ "value": value, "error": error })
}

fn constant_json(c: &AsymptoticConstant) -> Value {
    json!({ "value": c.value, "error": c.tail_bound, "definition": c.description })
}

fn need_k(k: Option<usize>) -> Result<usize> {
    k.context("--k is required for this action")
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Limit { method: LimitMethod::Mc, seed, .. } | Command::Sample { seed, .. } => Some(*seed),
        Command::Limit { probe: Some(_), seed, .. } => Some(*seed),
        Command::Reproduce { .. } => Some(reproduce::pinned::SEED),
        _ => None,
    }
}

enum Artifact {
    Json(Value),
    Text(String),
}

fn run(cli: &Cli, ctx: &RunContext) -> Result<(Artifact, bool)> {
    let csv = cli.format == Format::Csv;
    let artifact = match &cli.command {
        Command::Dist { action, n, k } => {
            let d = match action {
                ActionArg::Ksets => distribution_ksets(*n, need_k(*k)?)?,
                ActionArg::Matchings => distribution_matchings(*n)?,
            };
            let bounds = rank_bounds_for(&d)?;
            let p0 = derangement_proportion(&d);
            if csv {
                let mut out = ctx.csv_header();
                out.push_str("value,probability\n");
                for (v, p) in d.support() {
                    out.push_str(&format!("{v},{}\n", to_fraction_string(p)));
                }
                Artifact::Text(out)
            } else {
                Artifact::Json(ctx.envelope(
                    "dist",
                    json!({
                        "distribution": d.to_json(),
                        "mean": to_fraction_string(&d.mean()),
                        "variance": to_fraction_string(&d.variance()),
                        "second_moment": to_fraction_string(&d.moment(2)),
                        "p0": to_fraction_string(&p0),
                        "p0_float": to_f64(&p0),
                        "bounds": {
                            "omega": bounds.omega.to_string(),
                            "rank": bounds.rank.to_string(),
                            "lower": to_fraction_string(&bounds.lower),
                            "upper": to_fraction_string(&bounds.upper),
                            "holds": bounds.contains(&p0),
                        },
                    }),
                ))
            }
        }
        Command::Limit { k, j, method, samples, seed, tail, probe } => {
            let estimate = match method {
                LimitMethod::Exact => {
                    let c = limit_prob_exact(*k, *j)?;
                    certified(c.value, c.error)
                }
                LimitMethod::Mc => {
                    let (p, se) = limit_prob_mc(*k, *j, *samples, *seed)?;
                    json!({ "value": p, "standard_error": se, "samples": samples })
                }
                LimitMethod::Dp => {
                    let t = limit_prob_dp(*k, *j, *tail)?;
                    json!({ "value": t.probability, "error": t.neglected_mass })
                }
            };
            let mut body = json!({
                "k": k,
                "j": j,
                "method": format!("{method:?}").to_lowercase(),
                "probability": estimate,
                "derangement_upper_bound": derangement_upper_bound(*k).ok(),
            });
            if let Some(kmax) = probe {
                let rows: Vec<Value> = derangement_limit_probe(*kmax, *samples, *seed)?
                    .into_iter()
                    .map(|(k, p, se)| json!({ "k": k, "p0": p, "standard_error": se }))
                    .collect();
                body["probe"] = Value::Array(rows);
            }
            Artifact::Json(ctx.envelope("limit", body))
        }
        Command::Series { constant, j, order, variable } => {
            if let Some(c) = constant {
                let body = match c {
                    ConstantArg::A => constant_json(&a1_constant()),
                    ConstantArg::B => constant_json(&b1_constant()),
                    ConstantArg::C => json!({ "j": j, "value": to_fraction_string(&pj_at_one(*j)?) }),
                };
                Artifact::Json(ctx.envelope("series", body))
            } else {
                let s = if *j == 0 {
                    matchings_nonderangement_series::<Rational>(*order)
                } else {
                    matchings_j_series::<Rational>(*j, *order)?
                };
                let var = match variable {
                    VariableArg::T => Variable::T,
                    VariableArg::U => Variable::U,
                };
                if csv {
                    let mut out = ctx.csv_header();
                    out.push_str("degree_in_u,coefficient\n");
                    for (i, c) in s.coefficients().iter().enumerate() {
                        out.push_str(&format!("{i},{}\n", to_fraction_string(c)));
                    }
                    Artifact::Text(out)
                } else {
                    let mut body = s.to_json(var);
                    body["j"] = json!(j);
                    Artifact::Json(ctx.envelope("series", body))
                }
            }
        }
        Command::Wreath { a, order, block_bound } => {
            if let Some(m) = block_bound {
                let b = block_system_bound(*m)?;
                Artifact::Json(ctx.envelope(
                    "wreath",
                    json!({ "m": m, "bound": to_fraction_string(&b), "bound_float": to_f64(&b),
                            "scaled_by_m_three_halves": to_f64(&b) * (*m as f64).powf(1.5) }),
                ))
            } else {
                let s = wreath_bound_series::<Rational>(*a, *order)?;
                let asym = wreath_bound_asymptotic(*a)?;
                if csv {
                    let mut out = ctx.csv_header();
                    out.push_str("n,coefficient\n");
                    for (i, c) in s.coefficients().iter().enumerate() {
                        out.push_str(&format!("{i},{}\n", to_fraction_string(c)));
                    }
                    Artifact::Text(out)
                } else {
                    Artifact::Json(ctx.envelope(
                        "wreath",
                        json!({
                            "a": a,
                            "series": s.to_json(Variable::U),
                            "asymptotic": { "constant": constant_json(&asym.constant), "exponent": asym.exponent },
                        }),
                    ))
                }
            }
        }
        Command::Shuffle { n, k, traces } => {
            if *traces == 0 {
                bail!("--traces must be at least 1");
            }
            let chain = ShuffleChain::new(*n, *k)?;
            if csv {
                let mut out = ctx.csv_header();
                out.push_str(&trace_table_csv(&chain, *traces));
                Artifact::Text(out)
            } else {
                let report = eigenvalue_multiset_check(&chain, *traces)?;
                let states = Rational::from_integer((chain.num_states() as i64).into());
                let rows: Vec<Value> = report
                    .traces
                    .iter()
                    .zip(&report.power_sums)
                    .enumerate()
                    .map(|(i, (t, p))| {
                        json!({
                            "r": i + 1,
                            "trace": to_fraction_string(t),
                            "spectral_power_sum": to_fraction_string(p),
                            "return_probability": to_fraction_string(&(t / &states)),
                        })
                    })
                    .collect();
                Artifact::Json(ctx.envelope(
                    "shuffle",
                    json!({
                        "n": n, "k": k,
                        "traces": rows,
                        "max_abs_difference": to_fraction_string(&report.max_abs_difference),
                        "spectrum_matches": report.exact_match(),
                    }),
                ))
            }
        }
        Command::Sample { action, method, n, count, seed, variant } => {
            let variant: PayneVariant = variant.parse()?;
            let mut rng = seeded(*seed);
            let mut out = ctx.csv_header();
            for _ in 0..*count {
                let w = match (action, method) {
                    (SampleAction::Permutation, _) => symfix_core::samplers::random_permutation(&mut rng, *n),
                    (SampleAction::Derangement, SampleMethod::Rejection) => rejection_derangement(&mut rng, *n)?.permutation,
                    (SampleAction::Derangement, SampleMethod::Payne) => payne_derangement(&mut rng, *n, variant)?,
                };
                if *action == SampleAction::Derangement && !w.is_derangement() {
                    bail!("internal error: sampler emitted {w} with a fixed point");
                }
                out.push_str(&format!("{w}\n"));
            }
            Artifact::Text(out)
        }
        Command::PayneAudit { n, start, variant } => {
            let start: Start = start.parse()?;
            let variant: PayneVariant = variant.parse()?;
            let r = payne_exact_distribution(*n, start, variant)?;
            Artifact::Json(ctx.envelope("payne-audit", r.to_json()))
        }
        Command::Oracle { n, action, k, a } => {
            let oracle_action = match action {
                OracleArg::Ksets => OracleAction::KSets(need_k(*k)?),
                OracleArg::Matchings => OracleAction::Matchings,
                OracleArg::Blocks => OracleAction::Blocks(a.context("--a is required for blocks")?),
            };
            let table = brute_force_fixed_points(*n, oracle_action)?;
            let mut body = json!({
                "n": n,
                "set_size": table.set_size,
                "mean": to_fraction_string(&table.mean()),
                "proportion_fixing_some": to_fraction_string(&table.proportion_fixing_some()),
            });
            let classes = table.by_cycle_type()?;
            match oracle_action {
                OracleAction::KSets(k) => {
                    let formula = Action::KSets { k };
                    body["matches_class_formula"] = json!(matches_formula(&classes, formula)?);
                    if let Ok(d) = distribution_ksets(*n, k) {
                        body["matches_distribution"] = json!(table.distribution()? == d);
                    }
                    if k >= 1 && 2 * k <= *n {
                        let rows = fixed_points_via_class_intersection(*n, k)?;
                        let agree = rows.iter().all(|r| r.via_intersection == r.via_centralizers);
                        body["class_intersection_forms_agree"] = json!(agree);
                    }
                }
                OracleAction::Matchings => {
                    body["matches_class_formula"] = json!(matches_formula(&classes, Action::Matchings)?);
                    body["matches_distribution"] = json!(table.distribution()? == distribution_matchings(*n)?);
                }
                OracleAction::Blocks(a) => {
                    let blocks = *n / a;
                    let bound = wreath_bound_series::<Rational>(a, blocks)?.coeff(blocks).clone();
                    body["wreath_bound"] = json!(to_fraction_string(&bound));
                    body["bound_holds"] = json!(table.proportion_fixing_some() <= bound);
                }
            }
            Artifact::Json(ctx.envelope("oracle", body))
        }
        Command::Reproduce { only } => {
            let outcomes = match only {
                Some(id) if (1..=reproduce::CRITERIA).contains(id) => vec![reproduce::run(*id)],
                Some(id) => bail!("criterion {id} does not exist; pick 1..={}", reproduce::CRITERIA),
                None => reproduce::run_all(),
            };
            for o in &outcomes {
                eprintln!("{}", o.line());
            }
            let all = outcomes.iter().all(|o| o.passed);
            let body = json!({
                "criteria": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
                "all_passed": all,
            });
            return Ok((Artifact::Json(ctx.envelope("reproduce", body)), all));
        }
    };
    Ok((artifact, true))
}

fn matches_formula(classes: &BTreeMap<CycleType, u64>, action: Action) -> Result<bool> {
    for (ct, &c) in classes {
        if action.fixed_points(ct)? != BigUint::from(c) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = RunContext {
        invocation: std::env::args().collect::<Vec<_>>().join(" "),
        seed: seed_of(&cli.command),
    };
    match run(&cli, &ctx).and_then(|(artifact, ok)| {
        let text = match artifact {
            Artifact::Json(v) => serde_json::to_string_pretty(&v)? + "\n",
            Artifact::Text(t) => t,
        };
        match &cli.output {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
            None => io::stdout().write_all(text.as_bytes())?,
        }
        Ok(ok)
    }) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

