//! Command-line interface.
//!
//! Exit codes: 0 success, 1 processing failure, 2 usage or parse error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amplipix_core::{GuidedFilterParams, MethodExpr, PriorKind};
use clap::{Args, Parser, Subcommand};

use crate::batch::run_batch;
use crate::config::{ConfigError, ConfigFile};
use crate::io::{self, Depth};
use crate::pipeline::{map_stats, transmission_map, Enhancer, Settings};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "amplipix", version, about = "Retinal fundus enhancement by pixel color amplification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enhance a single image.
    Enhance {
        /// Method expression, e.g. `X`, `A+X` or `sA+sC+sX+sZ`.
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
        input: PathBuf,
        output: PathBuf,
    },
    /// Write a prior's transmission map as a grayscale image and print its statistics.
    InspectT {
        /// color-illumination | dcp | strong-dark | bright-channel
        #[arg(long)]
        prior: Option<String>,
        /// Skip the guided refinement and show the raw map.
        #[arg(long)]
        raw: bool,
        #[command(flatten)]
        common: CommonArgs,
        input: PathBuf,
        output: PathBuf,
    },
    /// Enhance every image in a directory.
    Batch {
        #[arg(long)]
        method: Option<String>,
        /// Worker threads.
        #[arg(long, env = "AMPLIPIX_JOBS")]
        jobs: Option<usize>,
        /// Manifest path (default: OUTPUT_DIR/manifest.jsonl).
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
        input_dir: PathBuf,
        output_dir: PathBuf,
    },
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Neighbourhood size for the min statistics [default: 5]
    #[arg(long)]
    pub omega: Option<usize>,
    /// Guided filter radius for transmission refinement [default: 100]
    #[arg(long)]
    pub t_radius: Option<usize>,
    /// Guided filter eps for transmission refinement [default: 1e-8]
    #[arg(long)]
    pub t_eps: Option<f64>,
    /// Guided filter radius of the sharpening blur [default: 30]
    #[arg(long)]
    pub blur_radius: Option<usize>,
    /// Guided filter eps of the sharpening blur [default: 1e-8]
    #[arg(long)]
    pub blur_eps: Option<f64>,
    /// Uniform transmission for simple sharpening [default: 0.15]
    #[arg(long)]
    pub scalar_t: Option<f64>,
    /// Do not crop to the fundus.
    #[arg(long)]
    pub no_crop: bool,
    /// Keep the (possibly cropped) size.
    #[arg(long, conflicts_with = "resize")]
    pub no_resize: bool,
    /// Target size as HxW [default: 512x512]
    #[arg(long, value_parser = parse_size)]
    pub resize: Option<(usize, usize)>,
    /// Keep the blue channel in the dark-channel statistics.
    #[arg(long)]
    pub no_blue_trick: bool,
    /// Output sample depth, 8 or 16 [default: 8]
    #[arg(long)]
    pub depth: Option<u8>,
    /// key=value file with defaults; command-line flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got `{s}`"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in `{s}`"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in `{s}`"))?;
    if h == 0 || w == 0 {
        return Err("resize dimensions must be at least 1".into());
    }
    Ok((h, w))
}

/// A failure mapped to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn processing(message: impl ToString) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::usage(e)
    }
}

fn load_config(common: &CommonArgs) -> Result<ConfigFile, Failure> {
    match &common.config {
        Some(path) => Ok(ConfigFile::load(path)?),
        None => Ok(ConfigFile::default()),
    }
}

/// Merges flags over the config file over built-in defaults.
pub fn resolve_settings(common: &CommonArgs, cfg: &ConfigFile) -> Result<Settings, Failure> {
    let mut s = Settings::default();

    if let Some(omega) = common.omega.or(cfg.get("omega")?) {
        s.amplify.omega = omega;
    }
    let t_radius = common.t_radius.or(cfg.get("t-radius")?).unwrap_or(s.amplify.t_refine.radius());
    let t_eps = common.t_eps.or(cfg.get("t-eps")?).unwrap_or(s.amplify.t_refine.eps());
    s.amplify.t_refine = GuidedFilterParams::new(t_radius, t_eps).map_err(Failure::usage)?;
    if common.no_blue_trick {
        s.amplify.blue_channel_to_ones = false;
    } else if let Some(v) = cfg.get_bool("blue-trick")? {
        s.amplify.blue_channel_to_ones = v;
    }
    s.amplify.validate().map_err(Failure::usage)?;

    let b_radius = common.blur_radius.or(cfg.get("blur-radius")?).unwrap_or(s.sharpen.blur.radius());
    let b_eps = common.blur_eps.or(cfg.get("blur-eps")?).unwrap_or(s.sharpen.blur.eps());
    s.sharpen.blur = GuidedFilterParams::new(b_radius, b_eps).map_err(Failure::usage)?;
    if let Some(t) = common.scalar_t.or(cfg.get("scalar-t")?) {
        s.sharpen.scalar_t = t;
    }
    s.sharpen.validate().map_err(Failure::usage)?;

    if common.no_crop {
        s.preprocess.crop = false;
    } else if let Some(v) = cfg.get_bool("crop")? {
        s.preprocess.crop = v;
    }
    if common.no_resize {
        s.preprocess.resize = None;
    } else if let Some(size) = common.resize {
        s.preprocess.resize = Some(size);
    } else if let Some(v) = cfg.raw("resize") {
        s.preprocess.resize = match v.to_ascii_lowercase().as_str() {
            "none" | "off" | "no" => None,
            _ => Some(parse_size(v).map_err(Failure::usage)?),
        };
    }
    if let Some(v) = cfg.get_bool("clip")? {
        s.preprocess.clip = v;
    }

    s.depth = match common.depth.or(cfg.get("depth")?) {
        None | Some(8) => Depth::Eight,
        Some(16) => Depth::Sixteen,
        Some(_) => return Err(Failure::usage("depth must be 8 or 16")),
    };
    Ok(s)
}

fn resolve_method(flag: Option<&str>, cfg: &ConfigFile) -> Result<MethodExpr, Failure> {
    let text = flag
        .or(cfg.raw("method"))
        .ok_or_else(|| Failure::usage("--method is required"))?;
    MethodExpr::parse(text).map_err(|e| Failure::usage(format!("invalid method `{text}`: {e}")))
}

fn cmd_enhance(method: Option<&str>, common: &CommonArgs, input: &Path, output: &Path) -> Result<(), Failure> {
    let cfg = load_config(common)?;
    let expr = resolve_method(method, &cfg)?;
    let settings = resolve_settings(common, &cfg)?;
    let enhancer = Enhancer::new(expr, settings);
    let warnings = enhancer
        .enhance_file(input, output)
        .map_err(|e| Failure::processing(format!("{}: {e}", input.display())))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", input.display());
    }
    Ok(())
}

fn cmd_inspect_t(
    prior: Option<&str>,
    raw: bool,
    common: &CommonArgs,
    input: &Path,
    output: &Path,
) -> Result<(), Failure> {
    let cfg = load_config(common)?;
    let name = prior
        .or(cfg.raw("prior"))
        .ok_or_else(|| Failure::usage("--prior is required"))?;
    let prior: PriorKind = name
        .parse()
        .map_err(|_| Failure::usage(format!("unknown prior `{name}`")))?;
    let settings = resolve_settings(common, &cfg)?;

    let run = || -> Result<(f64, f64, f64), Box<dyn std::error::Error>> {
        let img = io::read_image(input)?;
        let (map, warnings) = transmission_map(img, prior, &settings, raw)?;
        for w in warnings {
            eprintln!("warning: {}: {w}", input.display());
        }
        io::write_image(output, map.image(), settings.depth)?;
        Ok(map_stats(&map))
    };
    let (min, mean, max) = run().map_err(|e| Failure::processing(format!("{}: {e}", input.display())))?;
    println!("prior={prior} raw={raw} min={min:.6} mean={mean:.6} max={max:.6}");
    Ok(())
}

fn cmd_batch(
    method: Option<&str>,
    jobs: Option<usize>,
    manifest: Option<&Path>,
    common: &CommonArgs,
    input_dir: &Path,
    output_dir: &Path,
) -> Result<(), Failure> {
    let cfg = load_config(common)?;
    let expr = resolve_method(method, &cfg)?;
    let settings = resolve_settings(common, &cfg)?;
    let jobs = match jobs.or(cfg.get("jobs")?) {
        Some(0) => return Err(Failure::usage("jobs must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let manifest = manifest.map_or_else(|| output_dir.join("manifest.jsonl"), Path::to_path_buf);

    let enhancer = Enhancer::new(expr, settings);
    let report = run_batch(&enhancer, input_dir, output_dir, &manifest, jobs).map_err(Failure::processing)?;
    let failed = report.failures();
    eprintln!(
        "processed {} file(s), {} failed; manifest: {}",
        report.records.len(),
        failed,
        manifest.display()
    );
    if failed > 0 {
        return Err(Failure::processing(format!("{failed} file(s) failed")));
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Enhance {
            method,
            common,
            input,
            output,
        } => cmd_enhance(method.as_deref(), common, input, output),
        Command::InspectT {
            prior,
            raw,
            common,
            input,
            output,
        } => cmd_inspect_t(prior.as_deref(), *raw, common, input, output),
        Command::Batch {
            method,
            jobs,
            manifest,
            common,
            input_dir,
            output_dir,
        } => cmd_batch(method.as_deref(), *jobs, manifest.as_deref(), common, input_dir, output_dir),
    }
}

/// Parses `args` and runs the command, reporting errors on stderr.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
