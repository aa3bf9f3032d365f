use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nullsubject::domain::{build_fixture_domain, load_domain, save_domain, Domain};
use nullsubject::iarc::{fit_growth, GrowthKind};
use nullsubject::population::{
    build_cohort, estimate_sigma, study_groups, write_cohort_csv, TailSide,
};
use nullsubject::runner::{
    run_cohort, write_children_csv, write_summary_csv, write_svg, write_trajectories_csv,
    DomainSource, Execution, RunContext,
};
use nullsubject::{Calendar, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "nullsubject",
    version,
    about = "Null subject acquisition simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run a cohort experiment from a config file.
    Simulate(SimulateArgs),
    /// Print the age to utterance table and convert between the two.
    Calendar(CalendarArgs),
    /// Standard deviation of a normal from one tail probability.
    EstimateSigma(SigmaArgs),
    /// Fit an IARC growth curve through three (age, IARC) observations.
    FitIarc(FitArgs),
    /// Write the built-in domain as TSV.
    MakeDomain(MakeDomainArgs),
    /// Sample a cohort and write its profiles as CSV without simulating.
    Cohort(CohortArgs),
}

/// One flag per config key. Values use the config file syntax.
#[derive(Args)]
struct Overrides {
    #[arg(long, value_name = "fixture|PATH")]
    domain: Option<String>,
    #[arg(long, value_name = "english|ns-english|BITS")]
    target: Option<String>,
    #[arg(long, value_name = "vl|ssvl")]
    learner: Option<String>,
    #[arg(long)]
    aggressive_rate: Option<String>,
    #[arg(long)]
    conservative_rate: Option<String>,
    #[arg(long, value_name = "none|PARAM:VALUE,..")]
    registry: Option<String>,
    #[arg(long, value_name = "linear|logistic")]
    growth: Option<String>,
    #[arg(long)]
    cohort_size: Option<String>,
    #[arg(long)]
    total_utterances: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    record_all_weights: Option<String>,
    #[arg(long, value_name = "standard|PATH")]
    calendar: Option<String>,
    #[arg(long, value_name = "none|PATH")]
    trace: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("domain", &self.domain),
            ("target", &self.target),
            ("learner", &self.learner),
            ("aggressive_rate", &self.aggressive_rate),
            ("conservative_rate", &self.conservative_rate),
            ("registry", &self.registry),
            ("growth", &self.growth),
            ("cohort_size", &self.cohort_size),
            ("total_utterances", &self.total_utterances),
            ("stride", &self.stride),
            ("threshold", &self.threshold),
            ("noise", &self.noise),
            ("scale", &self.scale),
            ("record_all_weights", &self.record_all_weights),
            ("calendar", &self.calendar),
            ("trace", &self.trace),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Config file of `key = value` lines.
    config: PathBuf,
    /// Master seed; overrides any seed in the config file.
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write plot.svg.
    #[arg(long)]
    plot: bool,
    /// Run children one after another instead of on the worker pool.
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct CalendarArgs {
    /// Calendar override file.
    #[arg(long)]
    calendar: Option<PathBuf>,
    /// Print cumulative utterances at this age in years.
    #[arg(long)]
    age: Vec<f64>,
    /// Print the age at this cumulative utterance count.
    #[arg(long)]
    utterances: Vec<u64>,
}

#[derive(Args)]
struct SigmaArgs {
    /// Group mean. Without arguments the three study groups are tabulated.
    #[arg(long, requires_all = ["tail", "prob", "side"])]
    mu: Option<f64>,
    /// Tail cut-off value.
    #[arg(long)]
    tail: Option<f64>,
    /// Probability mass beyond the cut-off.
    #[arg(long)]
    prob: Option<f64>,
    #[arg(long, value_name = "below|above")]
    side: Option<TailSide>,
}

#[derive(Args)]
struct FitArgs {
    /// Three observations as AGE:IARC, e.g. 2.73:0.4.
    #[arg(num_args = 3, required = true, value_parser = parse_point)]
    points: Vec<(f64, f64)>,
    #[arg(long, default_value = "linear")]
    kind: GrowthKind,
    #[arg(long)]
    calendar: Option<PathBuf>,
}

#[derive(Args)]
struct MakeDomainArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CohortArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    size: usize,
    #[arg(long, default_value = "linear")]
    growth: GrowthKind,
    #[arg(long)]
    calendar: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (a, i) = s
        .split_once(':')
        .ok_or_else(|| format!("expected AGE:IARC, got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(a)?, num(i)?))
}

fn load_calendar(path: Option<&Path>) -> Result<Calendar> {
    match path {
        None => Ok(Calendar::standard()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading calendar {}", p.display()))?;
            Calendar::parse_override(&text)
                .with_context(|| format!("parsing calendar {}", p.display()))
        }
    }
}

fn load_domain_source(src: &DomainSource) -> Result<Domain> {
    match src {
        DomainSource::Fixture => Ok(build_fixture_domain()),
        DomainSource::File(p) => {
            let f = File::open(p).with_context(|| format!("opening domain {}", p.display()))?;
            load_domain(BufReader::new(f))
                .with_context(|| format!("loading domain {}", p.display()))
        }
    }
}

/// Writes to `path`, or stdout when `None`.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut cfg =
        ExperimentConfig::parse(&text).with_context(|| format!("in {}", args.config.display()))?;
    for (key, value) in args.overrides.pairs() {
        cfg.set(key, value)
            .with_context(|| format!("--{}", key.replace('_', "-")))?;
    }
    cfg.seed = Some(args.seed);

    let domain = load_domain_source(&cfg.domain)?;
    let calendar = load_calendar(cfg.calendar.as_deref())?;
    let ctx = RunContext::new(&cfg, &domain, &calendar)?;
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut trace = match &cfg.trace {
        Some(p) => {
            Some(BufWriter::new(File::create(p).with_context(|| {
                format!("creating trace {}", p.display())
            })?))
        }
        None => None,
    };
    let run = run_cohort(&ctx, execution, trace.as_mut().map(|t| t as &mut dyn Write))?;
    if let Some(mut t) = trace {
        t.flush()?;
    }

    fs::write(args.out.join("config.txt"), cfg.to_text())?;
    write_trajectories_csv(
        run.trajectories(),
        cfg.record_all_weights,
        create(&args.out, "trajectories.csv")?,
    )?;
    write_children_csv(&run, &calendar, create(&args.out, "children.csv")?)?;
    write_summary_csv(&run.summary, create(&args.out, "summary.csv")?)?;
    let s = &run.summary;
    if args.plot {
        write_svg(
            run.trajectories(),
            &calendar,
            &[s.fastest, s.median, s.slowest],
            create(&args.out, "plot.svg")?,
        )?;
    }

    println!(
        "{} children ({} excluded, {} failed), {} converged",
        s.children, s.excluded, s.failed, s.converged
    );
    println!(
        "peak NS weight mean {:.4} [{:.4}, {:.4}], final NS mean {:.4}",
        s.peak_mean, s.peak_min, s.peak_max, s.final_ns_mean
    );
    if let Some([q1, q2, q3]) = s.speed_quantiles {
        println!("convergence u quartiles {q1} / {q2} / {q3}");
    }
    println!(
        "fastest {}, median {}, slowest {}",
        s.fastest, s.median, s.slowest
    );
    println!("results in {}", args.out.display());
    Ok(())
}

fn calendar(args: CalendarArgs) -> Result<()> {
    let cal = load_calendar(args.calendar.as_deref())?;
    let mut out = io::stdout().lock();
    writeln!(out, "age range\twaking hours/day\tutterances\tcumulative")?;
    for (r, cum) in cal.ranges().iter().zip(cal.cumulative_totals()) {
        writeln!(
            out,
            "{}-{}\t{}-{}\t{}\t{}",
            r.start_age,
            r.end_age,
            r.waking_start,
            r.waking_end,
            cal.utterances_in_range(r),
            cum
        )?;
    }
    for age in args.age {
        writeln!(
            out,
            "age {age} -> {} utterances",
            cal.cumulative_utterances(age)?
        )?;
    }
    for u in args.utterances {
        writeln!(out, "{u} utterances -> age {:.6}", cal.age_at_utterance(u)?)?;
    }
    Ok(())
}

fn sigma(args: SigmaArgs) -> Result<()> {
    if let (Some(mu), Some(tail), Some(prob), Some(side)) =
        (args.mu, args.tail, args.prob, args.side)
    {
        println!("{:.4}", estimate_sigma(mu, tail, prob, side)?);
        return Ok(());
    }
    println!("group\tmean IARC\tsigma");
    for g in study_groups::<f64>() {
        println!("{}\t{}\t{:.4}", g.label, g.iarc_mean, g.iarc_sigma);
    }
    Ok(())
}

fn fit(args: FitArgs) -> Result<()> {
    let cal = load_calendar(args.calendar.as_deref())?;
    let points: [(f64, f64); 3] = match args.points.as_slice() {
        &[a, b, c] => [a, b, c],
        _ => bail!("exactly three observations are needed"),
    };
    let g = fit_growth(&points, args.kind, &cal)?;
    println!("kind = {}", g.kind);
    println!("m = {:e}", g.m);
    println!("c = {:e}", g.c);
    for (age, iarc) in points {
        let u = cal.cumulative_utterances(age)?;
        println!(
            "age {age}: observed {iarc}, fitted {:.4}",
            g.evaluate(u as f64)?
        );
    }
    Ok(())
}

fn make_domain(args: MakeDomainArgs) -> Result<()> {
    let mut out = output(args.out.as_deref())?;
    save_domain(&build_fixture_domain(), &mut out)?;
    out.flush()?;
    Ok(())
}

fn cohort(args: CohortArgs) -> Result<()> {
    let cal = load_calendar(args.calendar.as_deref())?;
    let cohort = build_cohort(&study_groups(), args.size, args.growth, &cal, args.seed)?;
    let mut out = output(args.out.as_deref())?;
    write_cohort_csv(&cohort, &mut out)?;
    out.flush()?;
    if !cohort.excluded.is_empty() {
        eprintln!(
            "{} children excluded: growth fit failed",
            cohort.excluded.len()
        );
    }
    Ok(())
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
            || matches!(c.downcast_ref::<nullsubject::Error>(), Some(nullsubject::Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let result = match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::Calendar(a) => calendar(a),
        Command::EstimateSigma(a) => sigma(a),
        Command::FitIarc(a) => fit(a),
        Command::MakeDomain(a) => make_domain(a),
        Command::Cohort(a) => cohort(a),
    };
    match result {
        Err(e) if is_broken_pipe(&e) => Ok(()),
        r => r,
    }
}
