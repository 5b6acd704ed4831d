use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use distp::audit::{
    audit_distp, audit_div_dp, audit_div_xdp, audit_xdistp, check_cp_theorem, expected_utility_loss, worst_case_loss,
    AuditReport,
};
use distp::divergence::Divergence;
use distp::io::{self, MechanismFile, RelationFile};
use distp::mechanism::{
    build_coupling_mechanism, geometric_mechanism, liftseq_compose, post_process, pre_process, randomized_response,
    seq_compose, AdaptiveKernel, CouplingMode, Fallback,
};
use distp::prob::{FiniteDistribution, Ground, GroundMetric, Label, StochasticKernel};
use distp::sample::{obfuscate, DEFAULT_SEED};
use distp::tolerance::{Tolerances, TAU_MASS, TAU_NUM};
use distp::transport::{
    northwest_corner, validate_coupling, wasserstein_inf, wasserstein_p, Coupling, DistributionMetric,
};

#[derive(Parser)]
#[command(name = "distp", version, about = "Distribution privacy toolkit for finite mechanisms")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Allowed deviation of an input distribution's mass from 1.
    #[arg(long, global = true, default_value_t = TAU_MASS)]
    tau_mass: f64,
    /// Tolerance used when comparing an observed value with a claim.
    #[arg(long, global = true, default_value_t = TAU_NUM)]
    tau_num: f64,
    /// Evaluate δ-approximate max divergence over every event instead of by prefixes.
    #[arg(long, global = true)]
    exact_subsets: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Divergence between two distributions.
    Divergence {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[command(flatten)]
        div: DivergenceArgs,
    },
    /// Optimal transport between two distributions.
    Emd {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        /// Wasserstein order.
        #[arg(short, long, default_value_t = 1.0, conflicts_with = "inf")]
        p: f64,
        /// Compute W∞ instead.
        #[arg(long)]
        inf: bool,
    },
    /// Build a coupling by a fixed rule, or check a given one.
    Couple {
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, value_enum, default_value_t = Rule::Northwest)]
        rule: Rule,
        /// Check this coupling's marginals instead of building one.
        #[arg(long)]
        check: Option<PathBuf>,
        /// Also report the coupling's cost under this metric.
        #[arg(long)]
        cost: Option<PathBuf>,
    },
    /// Coupling mechanisms.
    CoupleMech {
        #[command(subcommand)]
        action: CoupleMech,
    },
    /// Sample one output label per input row.
    Obfuscate {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        aux: Option<String>,
        /// CSV with the single header `x`.
        #[arg(long)]
        data: PathBuf,
    },
    /// Audit a mechanism against a relation.
    Audit {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        relation: PathBuf,
        #[command(flatten)]
        div: DivergenceArgs,
        #[arg(long)]
        claimed_eps: Option<f64>,
        /// Ground metric for the extended notions.
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Distance between distributions built from the metric.
        #[arg(long, value_enum, default_value_t = Wasserstein::One, requires = "metric")]
        wasserstein: Wasserstein,
    },
    /// Compose mechanisms.
    Compose {
        #[arg(value_enum)]
        how: Composition,
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        /// Keep only the second-stage output of seq.
        #[arg(long)]
        marginalize: bool,
    },
    /// Baseline mechanisms.
    Baseline {
        #[arg(value_enum)]
        kind: BaselineKind,
        /// Comma-separated labels.
        #[arg(long, value_delimiter = ',', required = true)]
        ground: Vec<String>,
        #[arg(long)]
        eps: f64,
        /// Metric for the geometric mechanism; defaults to |i - j| on label positions.
        #[arg(long)]
        cost: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DivergenceArgs {
    /// kl, rkl, tv, chi2, hellinger, max or max-delta.
    #[arg(long, default_value = "max")]
    divergence: String,
    /// δ for max-delta.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
}

#[derive(Subcommand)]
enum CoupleMech {
    /// Build a coupling mechanism specification.
    Build {
        #[arg(long)]
        target: PathBuf,
        /// JSON list of `{s, ground, probs}` approximate inputs.
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        cost: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Optimal)]
        mode: Mode,
        /// JSON list of couplings, one per input, for `--mode given`.
        #[arg(long)]
        couplings: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FallbackArg::Error)]
        fallback: FallbackArg,
    },
    /// The kernel used for one auxiliary input.
    Kernel {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        aux: String,
    },
    /// Check the closeness bounds against actual input distributions.
    Check {
        #[arg(long)]
        mech: PathBuf,
        /// JSON list of `{s, ground, probs}` actual inputs.
        #[arg(long)]
        actual: PathBuf,
    },
    /// Expected and worst-case utility loss for one auxiliary input.
    Loss {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        aux: String,
        #[arg(long)]
        cost: PathBuf,
        /// Input distribution; defaults to the approximate input of `aux`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Northwest,
    Independent,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Optimal,
    WorstCase,
    Northwest,
    Given,
}

#[derive(Clone, Copy, ValueEnum)]
enum FallbackArg {
    Error,
    SampleTarget,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Wasserstein {
    #[value(name = "1")]
    One,
    Inf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Composition {
    Seq,
    Liftseq,
    Post,
    Pre,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Rr,
    Geometric,
}

#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    tolerances: Tolerances,
    exact_subsets: bool,
}

impl RunConfig {
    fn meta(&self) -> Meta {
        Meta {
            tool: "distp",
            version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            tolerances: Tolerances {
                mass: self.tau_mass,
                num: self.tau_num,
                ..Tolerances::default()
            },
            exact_subsets: self.exact_subsets,
        }
    }

    fn csv_comment(&self) -> String {
        let m = self.meta();
        format!(
            "# {} {} seed={} tau_mass={} tau_zero={} tau_num={} exact_subsets={}\n",
            m.tool, m.version, m.seed, m.tolerances.mass, m.tolerances.zero, m.tolerances.num, m.exact_subsets
        )
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn json_only(&self, what: &str) -> Result<()> {
        if self.format == Some(Format::Csv) {
            bail!("csv output is not available for {what}");
        }
        Ok(())
    }

    fn divergence(&self, args: &DivergenceArgs) -> Result<Divergence> {
        let mut div: Divergence = args.divergence.parse()?;
        if args.divergence == "max-delta" {
            div = Divergence::Max { delta: args.delta };
        }
        Ok(if self.exact_subsets { div.exhaustive() } else { div })
    }
}

fn emit(cfg: &RunConfig, report: &impl Serialize) -> Result<()> {
    let mut v = serde_json::to_value(report)?;
    if let Value::Object(map) = &mut v {
        map.insert("meta".into(), serde_json::to_value(cfg.meta())?);
    }
    write_out(&format!("{}\n", serde_json::to_string_pretty(&v)?))
}

fn emit_csv(cfg: &RunConfig, rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r)?;
    }
    let body = String::from_utf8(w.into_inner()?)?;
    write_out(&format!("{}{}", cfg.csv_comment(), body))
}

fn write_out(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        v.to_string()
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn value_to_dist(v: Value, tau_mass: f64) -> distp::Result<FiniteDistribution> {
    #[derive(serde::Deserialize)]
    struct Raw {
        ground: Vec<Label>,
        probs: Vec<f64>,
    }
    let raw: Raw = serde_json::from_value(v)?;
    FiniteDistribution::with_tolerance(Ground::new(raw.ground)?, raw.probs, tau_mass)
}

fn read_dist(cfg: &RunConfig, path: &Path) -> Result<FiniteDistribution> {
    let v: Value = serde_json::from_str(&read(path)?).with_context(|| format!("{}", path.display()))?;
    value_to_dist(v, cfg.tau_mass).with_context(|| format!("{}", path.display()))
}

fn read_inputs(cfg: &RunConfig, path: &Path) -> Result<Vec<(Label, FiniteDistribution)>> {
    let items: Vec<Value> = serde_json::from_str(&read(path)?).with_context(|| format!("{}", path.display()))?;
    items
        .into_iter()
        .enumerate()
        .map(|(i, mut v)| {
            let s = v
                .as_object_mut()
                .and_then(|m| m.remove("s"))
                .and_then(|s| s.as_str().map(Label::from))
                .unwrap_or_else(|| Label::new(format!("s{i}")));
            let d = value_to_dist(v, cfg.tau_mass).with_context(|| format!("{} entry {i}", path.display()))?;
            Ok((s, d))
        })
        .collect()
}

fn read_metric(path: &Path) -> Result<GroundMetric> {
    let f = fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    io::read_cost_csv(f).with_context(|| format!("{}", path.display()))
}

fn read_mech(path: &Path) -> Result<MechanismFile> {
    io::parse_mechanism(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn read_kernel(path: &Path) -> Result<StochasticKernel> {
    match read_mech(path)? {
        MechanismFile::Kernel(k) => Ok(k),
        _ => bail!("{} must hold a plain kernel", path.display()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = &cli.run;
    match cli.command {
        Command::Divergence { lhs, rhs, div } => {
            let (a, b) = (read_dist(cfg, &lhs)?, read_dist(cfg, &rhs)?);
            let div = cfg.divergence(&div)?;
            let value = div.evaluate(&a, &b)?;
            #[derive(Serialize)]
            struct Out {
                divergence: String,
                #[serde(with = "distp::serde_ext::ext_f64")]
                value: f64,
                vacuous: bool,
            }
            let out = Out {
                divergence: div.name(),
                value,
                vacuous: value == f64::NEG_INFINITY,
            };
            match cfg.format(Format::Json) {
                Format::Json => emit(cfg, &out)?,
                Format::Csv => emit_csv(
                    cfg,
                    vec![vec!["divergence".into(), "value".into()], vec![out.divergence, fmt_f64(value)]],
                )?,
            }
        }
        Command::Emd { lhs, rhs, cost, p, inf } => {
            let (a, b) = (read_dist(cfg, &lhs)?, read_dist(cfg, &rhs)?);
            let d = read_metric(&cost)?;
            let r = if inf { wasserstein_inf(&a, &b, &d)? } else { wasserstein_p(&a, &b, &d, p)? };
            match cfg.format(Format::Json) {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        p: String,
                        #[serde(flatten)]
                        result: &'a distp::transport::TransportResult,
                    }
                    let p = if inf { "inf".to_owned() } else { p.to_string() };
                    emit(cfg, &Out { p, result: &r })?
                }
                Format::Csv => emit_csv(cfg, coupling_rows(&r.coupling))?,
            }
        }
        Command::Couple { lhs, rhs, rule, check, cost } => {
            let (a, b) = (read_dist(cfg, &lhs)?, read_dist(cfg, &rhs)?);
            let gamma = match &check {
                Some(path) => serde_json::from_str::<Coupling>(&read(path)?).with_context(|| format!("{}", path.display()))?,
                None => match rule {
                    Rule::Northwest => northwest_corner(&a, &b),
                    Rule::Independent => Coupling::independent(&a, &b),
                },
            };
            let valid = validate_coupling(&gamma, &a, &b)?;
            let (cost_value, submodular) = match &cost {
                Some(path) => {
                    let d = read_metric(path)?;
                    let c = d.cross_costs(a.ground(), b.ground())?;
                    (Some(gamma.cost(&c)), Some(c.is_submodular()))
                }
                None => (None, None),
            };
            if cfg.format(Format::Json) == Format::Csv {
                emit_csv(cfg, coupling_rows(&gamma))?;
            } else {
                #[derive(Serialize)]
                struct Out {
                    valid: bool,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    cost: Option<f64>,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    submodular: Option<bool>,
                    coupling: Coupling,
                }
                emit(
                    cfg,
                    &Out {
                        valid,
                        cost: cost_value,
                        submodular,
                        coupling: gamma,
                    },
                )?;
            }
            if !valid {
                return Ok(ExitCode::from(2));
            }
        }
        Command::CoupleMech { action } => return couple_mech(cfg, action),
        Command::Obfuscate { mech, aux, data } => {
            let m = read_mech(&mech)?;
            let kernel = m.kernel(aux.map(Label::from).as_ref())?;
            let f = fs::File::open(&data).with_context(|| format!("cannot read {}", data.display()))?;
            let xs = io::read_label_csv(f).with_context(|| format!("{}", data.display()))?;
            let ys = obfuscate(&kernel, &xs, cfg.seed)?;
            match cfg.format(Format::Csv) {
                Format::Csv => {
                    let mut rows = vec![vec!["y".to_owned()]];
                    rows.extend(ys.iter().map(|y| vec![y.to_string()]));
                    emit_csv(cfg, rows)?
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out {
                        outputs: Vec<Label>,
                    }
                    emit(cfg, &Out { outputs: ys })?
                }
            }
        }
        Command::Audit {
            mech,
            relation,
            div,
            claimed_eps,
            metric,
            wasserstein,
        } => {
            let m = read_mech(&mech)?;
            let rel = io::parse_relation(&read(&relation)?).with_context(|| format!("{}", relation.display()))?;
            let div = cfg.divergence(&div)?;
            let d = metric.as_deref().map(read_metric).transpose()?;
            let mut report = audit(&m, &rel, &div, d.as_ref(), wasserstein)?;
            if let Some(eps) = claimed_eps {
                report = report.with_claim(eps, cfg.tau_num);
            }
            match cfg.format(Format::Json) {
                Format::Json => emit(cfg, &report)?,
                Format::Csv => {
                    let mut rows = vec![["index", "left", "right", "forward", "backward", "distance", "value", "bound", "pass"]
                        .map(String::from)
                        .to_vec()];
                    for p in &report.per_pair {
                        rows.push(vec![
                            p.index.to_string(),
                            p.left.clone(),
                            p.right.clone(),
                            fmt_f64(p.forward),
                            fmt_f64(p.backward),
                            p.distance.map(fmt_f64).unwrap_or_default(),
                            fmt_f64(p.value),
                            p.bound.map(fmt_f64).unwrap_or_default(),
                            p.pass.to_string(),
                        ]);
                    }
                    emit_csv(cfg, rows)?
                }
            }
            if !report.passed() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Compose {
            how,
            first,
            second,
            marginalize,
        } => {
            cfg.json_only("compose")?;
            let a = read_kernel(&first)?;
            let k = match how {
                Composition::Seq | Composition::Liftseq => {
                    let a1: AdaptiveKernel =
                        serde_json::from_str(&read(&second)?).with_context(|| format!("{}", second.display()))?;
                    match how {
                        Composition::Seq => seq_compose(&a, &a1, marginalize)?,
                        _ => liftseq_compose(&a, &a1)?,
                    }
                }
                Composition::Post => post_process(&a, &read_kernel(&second)?)?,
                Composition::Pre => pre_process(&a, &read_kernel(&second)?)?,
            };
            emit(cfg, &k)?;
        }
        Command::Baseline { kind, ground, eps, cost } => {
            cfg.json_only("baseline")?;
            let g = Ground::new(ground)?;
            match kind {
                BaselineKind::Rr => emit(cfg, &randomized_response(g, eps)?)?,
                BaselineKind::Geometric => {
                    let d = match &cost {
                        Some(p) => read_metric(p)?,
                        None => GroundMetric::line(g.clone()),
                    };
                    let m = geometric_mechanism(g, eps, &d)?;
                    #[derive(Serialize)]
                    struct Out<'a> {
                        #[serde(flatten)]
                        kernel: &'a StochasticKernel,
                        #[serde(with = "distp::serde_ext::ext_f64")]
                        effective_epsilon: f64,
                    }
                    emit(
                        cfg,
                        &Out {
                            kernel: &m.kernel,
                            effective_epsilon: m.effective_epsilon,
                        },
                    )?
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn coupling_rows(gamma: &Coupling) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["row".into(), "col".into(), "mass".into()]];
    for (i, r) in gamma.rows().labels().iter().enumerate() {
        for (j, c) in gamma.cols().labels().iter().enumerate() {
            rows.push(vec![r.to_string(), c.to_string(), gamma.get(i, j).to_string()]);
        }
    }
    rows
}

fn audit(
    m: &MechanismFile,
    rel: &RelationFile,
    div: &Divergence,
    d: Option<&GroundMetric>,
    w: Wasserstein,
) -> Result<AuditReport> {
    let metric = d.map(|d| match w {
        Wasserstein::One => DistributionMetric::W1(d),
        Wasserstein::Inf => DistributionMetric::Winf(d),
    });
    Ok(match (m, rel) {
        (MechanismFile::Kernel(k), RelationFile::Points(pairs)) => {
            let phi = distp::prob::PointRelation::new(k.inputs().clone(), pairs)?;
            match d {
                Some(d) => audit_div_xdp(k, &phi, d, div)?,
                None => audit_div_dp(k, &phi, div)?,
            }
        }
        (MechanismFile::Kernel(k), RelationFile::Distributions(psi)) => match metric {
            Some(metric) => audit_xdistp(k, psi, metric, div)?,
            None => audit_distp(k, psi, div)?,
        },
        (_, RelationFile::Points(_)) => bail!("auxiliary mechanisms need a relation over tagged distributions"),
        (m, RelationFile::Distributions(psi)) => {
            let aux = m.to_aux_kernel()?.expect("auxiliary mechanism");
            psi.check_aux(aux.aux())?;
            match metric {
                Some(metric) => audit_xdistp(&aux, psi, metric, div)?,
                None => audit_distp(&aux, psi, div)?,
            }
        }
    })
}

fn couple_mech(cfg: &RunConfig, action: CoupleMech) -> Result<ExitCode> {
    cfg.json_only("couple-mech")?;
    match action {
        CoupleMech::Build {
            target,
            inputs,
            cost,
            mode,
            couplings,
            fallback,
        } => {
            let mu = read_dist(cfg, &target)?;
            let inputs = read_inputs(cfg, &inputs)?;
            let d = cost.as_deref().map(read_metric).transpose()?;
            let need_metric = || d.as_ref().context("--cost is required for this mode");
            let mode = match mode {
                Mode::Optimal => CouplingMode::Optimal(need_metric()?),
                Mode::WorstCase => CouplingMode::OptimalWorstCase(need_metric()?),
                Mode::Northwest => CouplingMode::NorthWest,
                Mode::Given => {
                    let path = couplings.context("--couplings is required for --mode given")?;
                    CouplingMode::Given(
                        serde_json::from_str(&read(&path)?).with_context(|| format!("{}", path.display()))?,
                    )
                }
            };
            let fallback = match fallback {
                FallbackArg::Error => Fallback::Error,
                FallbackArg::SampleTarget => Fallback::SampleTarget,
            };
            emit(cfg, &build_coupling_mechanism(mu, inputs, mode, fallback)?)?;
        }
        CoupleMech::Kernel { mech, aux } => {
            let k = read_mech(&mech)?.kernel(Some(&Label::from(aux)))?;
            emit(cfg, &k)?;
        }
        CoupleMech::Check { mech, actual } => {
            let MechanismFile::Coupling(spec) = read_mech(&mech)? else {
                bail!("{} must hold a coupling mechanism", mech.display());
            };
            let actual = read_inputs(cfg, &actual)?;
            let report = check_cp_theorem(&spec, &actual, cfg.tau_num)?;
            emit(cfg, &report)?;
            if !report.pass {
                return Ok(ExitCode::from(2));
            }
        }
        CoupleMech::Loss { mech, aux, cost, input } => {
            let m = read_mech(&mech)?;
            let s = Label::from(aux);
            let k = m.kernel(Some(&s))?;
            let lambda = match (&input, &m) {
                (Some(p), _) => read_dist(cfg, p)?,
                (None, MechanismFile::Coupling(spec)) => spec.entry(&s)?.approx_input.clone(),
                (None, _) => bail!("--input is required for this mechanism"),
            };
            let d = read_metric(&cost)?;
            #[derive(Serialize)]
            struct Out {
                aux: Label,
                expected_loss: f64,
                worst_case_loss: f64,
            }
            emit(
                cfg,
                &Out {
                    expected_loss: expected_utility_loss(&k, &lambda, &d)?,
                    worst_case_loss: worst_case_loss(&k, &lambda, &d)?,
                    aux: s,
                },
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
