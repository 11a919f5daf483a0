use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kolportrait::global::tables_json;
use kolportrait::parameter_domain::DEFAULT_EPS_PARAM;
use kolportrait::render::{render_svg, RenderStyle};
use kolportrait::report::{classify, ClassifyOptions};
use kolportrait::sweep::{sweep, Axis, RandomSpec, SweepSpec, PARAMS};
use kolportrait::{Error, ParameterPoint, Scalar};

#[derive(Parser)]
#[command(name = "kolportrait", version, about = "Classify, trace and draw phase portraits of the cubic Kolmogorov family")]
struct Cli {
    /// Zero tolerance for float coefficients.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS_PARAM)]
    epsilon_param: f64,
    /// Distance to the connection stratum below which tracing is not trusted.
    #[arg(long, global = true, default_value_t = kolportrait::global::DEFAULT_EPS_CONN)]
    epsilon_conn: f64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "KOLPORTRAIT_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one parameter point.
    Classify {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also trace the separatrix skeleton and compare its invariants.
        #[arg(long)]
        with_tracing: bool,
        /// Check the sector pattern of both chart origins numerically.
        #[arg(long)]
        check_sectors: bool,
    },
    /// Trace a portrait and write it as SVG.
    Render {
        #[command(flatten)]
        params: Params,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
    },
    /// Classify many points and count the classes.
    Sweep {
        /// JSON sweep description.
        spec: Option<PathBuf>,
        /// Uniform random samples in the box, in addition to the spec file.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling box for --samples.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, default_values_t = [-3.0, 3.0])]
        r#box: Vec<f64>,
        /// Inline grid axis, `name=value` or `name=lo:hi:steps`; all five are needed.
        #[arg(long = "range", value_name = "NAME=RANGE", allow_hyphen_values = true)]
        ranges: Vec<String>,
        #[arg(long)]
        with_tracing: bool,
    },
    /// Dump the embedded classification tables.
    Tables,
}

#[derive(Args)]
struct Params {
    #[arg(long, allow_hyphen_values = true)]
    b0: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    b1: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    b2: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    b3: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    c0: Scalar,
}

impl Params {
    fn point(&self, eps: f64) -> ParameterPoint {
        ParameterPoint::new(self.b0.clone(), self.b1.clone(), self.b2.clone(), self.b3.clone(), self.c0.clone())
            .with_eps(eps)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Svg,
}

fn parse_range(s: &str) -> Result<(String, Axis)> {
    let (name, r) = s.split_once('=').with_context(|| format!("expected NAME=RANGE, got `{s}`"))?;
    let nums: Vec<&str> = r.split(':').collect();
    let f = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad number `{t}` in `{s}`"));
    let axis = match nums.as_slice() {
        [v] => Axis::Fixed(f(v)?),
        [lo, hi, n] => Axis::Range(f(lo)?, f(hi)?, n.trim().parse().with_context(|| format!("bad step count in `{s}`"))?),
        _ => bail!("expected `value` or `lo:hi:steps` in `{s}`"),
    };
    Ok((name.trim().to_string(), axis))
}

fn json_line(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    let base = ClassifyOptions { eps_conn: cli.epsilon_conn, ..ClassifyOptions::default() };
    match cli.command {
        Command::Classify { params, format, with_tracing, check_sectors } => {
            let opts = ClassifyOptions {
                with_tracing: with_tracing || format == Format::Svg,
                detect_connection: true,
                check_sectors,
                ..base
            };
            let c = classify(&params.point(cli.epsilon_param), &opts)?;
            match format {
                Format::Json => emit(None, json_line(&c)?.as_bytes()),
                Format::Svg => {
                    let s = c.skeleton.as_ref().context("no skeleton was traced")?;
                    emit(None, &render_svg(s, &RenderStyle::default()))
                }
            }
        }
        Command::Render { params, out, format } => {
            let opts = ClassifyOptions { with_tracing: true, ..base };
            let c = classify(&params.point(cli.epsilon_param), &opts)?;
            let s = c.skeleton.as_ref().context("no skeleton was traced")?;
            let bytes = match format {
                Format::Svg => render_svg(s, &RenderStyle::default()),
                Format::Json => json_line(s)?.into_bytes(),
            };
            emit(out.as_ref(), &bytes)
        }
        Command::Sweep { spec, samples, seed, r#box, ranges, with_tracing } => {
            let mut sw: SweepSpec = match &spec {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text).map_err(|e| Error::Unclassifiable(format!("sweep spec: {e}")))?
                }
                None => SweepSpec::default(),
            };
            if !ranges.is_empty() {
                let grid = sw.grid.get_or_insert_with(Default::default);
                for r in &ranges {
                    let (name, axis) = parse_range(r).map_err(|e| Error::Unclassifiable(e.to_string()))?;
                    if !PARAMS.contains(&name.as_str()) {
                        return Err(Error::Unclassifiable(format!("unknown parameter `{name}`")).into());
                    }
                    grid.insert(name, axis);
                }
            }
            if let Some(n) = samples {
                sw.random = Some(RandomSpec { n, seed, bounds: (r#box[0], r#box[1]) });
            }
            if sw.grid.is_none() && sw.random.is_none() && sw.points.is_empty() {
                return Err(Error::Unclassifiable("empty sweep: give a spec file, --samples or --range".into()).into());
            }
            let pts = sw.samples().map_err(Error::Unclassifiable)?;
            let pts: Vec<_> = pts.into_iter().map(|p| p.with_eps(cli.epsilon_param)).collect();
            let census = sweep(&pts, &ClassifyOptions { with_tracing, ..base });
            emit(None, json_line(&census)?.as_bytes())
        }
        Command::Tables => emit(None, json_line(&tables_json())?.as_bytes()),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::TableMismatch { .. } | Error::SectorMismatch { .. }) => 3,
        Some(Error::MalformedSkeleton(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
