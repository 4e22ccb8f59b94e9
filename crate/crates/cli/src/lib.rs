//! Command-line driver for `voronoi-core`: configuration, subcommands and
//! report files.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, RunConfig};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "voronoi", version, about = "Voronoi summation for symmetric-square coefficients")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub precision_bits: Option<String>,
    /// Largest residue order the planner may choose.
    #[arg(long, global = true)]
    pub kmax: Option<String>,
    /// N_trunc of the linear system.
    #[arg(long, global = true)]
    pub truncate: Option<String>,
    #[arg(long, global = true)]
    pub unknowns: Option<String>,
    /// validation | discovery
    #[arg(long, global = true)]
    pub mode: Option<String>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// json | csv | table
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Any config key, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coefficient table A(m, n).
    Oracle {
        #[arg(long)]
        n_max: Option<String>,
        /// Rows m ≤ this are written.
        #[arg(long)]
        rows: Option<String>,
    },
    /// Ramanujan τ(1..=n_max).
    Tau {
        #[arg(long)]
        n_max: Option<String>,
    },
    /// Residue series of one test function, optionally checked by quadrature.
    Transform {
        #[arg(long, short = 'm')]
        degree: u32,
        #[arg(long, short = 'x')]
        scale: String,
        #[arg(long, default_value_t = 50.0)]
        x_max: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,10,30,50")]
        points: Vec<String>,
        #[arg(long)]
        check: bool,
        /// Scale to peak value 1.
        #[arg(long)]
        normalize: bool,
    },
    /// Untwisted identity residual for every family atom.
    Verify,
    /// Twisted identity residuals at a/c with index q.
    Twist {
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, default_value_t = 1)]
        c: u64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        /// Also run the κ calibration over the configured grid.
        #[arg(long)]
        calibrate: bool,
    },
    /// Solve the linear system for a_2, …, a_{N_u}.
    Solve,
    /// Render an existing JSON report.
    Report { path: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Oracle { .. } => "oracle",
            Command::Tau { .. } => "tau",
            Command::Transform { .. } => "transform",
            Command::Verify => "verify",
            Command::Twist { .. } => "twist",
            Command::Solve => "solve",
            Command::Report { .. } => "report",
        }
    }
}

/// Config file, then flags, then validation.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let g = &cli.global;
    let mut cfg = RunConfig::load(g.config.as_deref())?;
    let flags = [
        ("precision_bits", &g.precision_bits),
        ("residue_order_max", &g.kmax),
        ("truncation", &g.truncate),
        ("unknowns", &g.unknowns),
        ("mode", &g.mode),
        ("format", &g.format),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if let Some(out) = &g.out {
        cfg.out_dir = out.clone();
    }
    for kv in &g.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::UnknownKey(kv.clone()))?;
        cfg.set(k.trim(), v.trim())?;
    }
    match &cli.command {
        Command::Oracle { n_max, rows } => {
            if let Some(n) = n_max {
                cfg.set("oracle_n_max", n)?;
            }
            if let Some(r) = rows {
                cfg.set("oracle_rows", r)?;
            }
        }
        Command::Tau { n_max: Some(n) } => cfg.set("oracle_n_max", n)?,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Exit status: 0 when every tolerance is met, 1 when a tolerance fails,
/// 2 when the run could not be carried out.
pub fn run(cli: Cli) -> i32 {
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Command::Report { path } = &cli.command {
        return match Report::read(path).and_then(|r| Ok((r.render(cfg.format)?, r.passed))) {
            Ok((text, passed)) => {
                print!("{text}");
                if passed {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                2
            }
        };
    }
    let mut rep = Report::new(cli.command.name(), &cfg);
    let result = match &cli.command {
        Command::Oracle { .. } => commands::oracle(&cfg, &mut rep),
        Command::Tau { .. } => commands::tau(&cfg, &mut rep),
        Command::Transform { degree, scale, x_max, points, check, normalize } => {
            let args = commands::TransformArgs {
                degree: *degree,
                scale: scale.clone(),
                x_max: *x_max,
                points: points.clone(),
                check: *check,
                normalize: *normalize,
            };
            commands::transform(&cfg, &args, &mut rep)
        }
        Command::Verify => commands::verify(&cfg, &mut rep),
        Command::Twist { a, c, q, calibrate } => {
            commands::twist(&cfg, &commands::TwistArgs { a: *a, c: *c, q: *q, calibrate: *calibrate }, &mut rep)
        }
        Command::Solve => commands::solve(&cfg, &mut rep).map(|_| ()),
        Command::Report { .. } => unreachable!(),
    };
    let mut code = if rep.passed { 0 } else { 1 };
    if let Err(e) = result {
        rep.passed = false;
        rep.error = Some(format!("{e:#}"));
        eprintln!("error: {e:#}");
        code = 2;
    }
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    match rep.write(&cfg.out_dir, cfg.format) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    }
    if cfg.format == config::Format::Table {
        if let Ok(text) = rep.render(cfg.format) {
            print!("{text}");
        }
    }
    code
}
