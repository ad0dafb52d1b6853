//! The `lorcone` command line.
//!
//! Exit codes: 0 success or consistent, 2 violation or falsified, 1 error.
//! Errors are printed as `error: <message>` lines on stderr.

use crate::acceptance;
use crate::comparison::{certify_bound, fiber_bound_from_cone, with_thread_cap, Direction};
use crate::config::{parse_config, Cone, ConeConfig};
use crate::cone::ConePoint;
use crate::error::{Error, Result};
use crate::fiber::{AnyPoint, FiberSpace};
use crate::llstructure::{check_bare_llspace, CurveCatalog};
use crate::report::fmt_num;
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};

const POINT_HELP: &str = "Points are written `t;x1,x2,...`: the base time, a semicolon, then the fiber \
coordinates. Graph fibers take `edge:offset` or `v:label`; spheres and hyperbolic planes take three \
ambient coordinates or two polar ones.";

const PATH_CSV_HELP: &str = "Path CSV columns: `s,t,x` (or `s,t,x1,...,xn`), where `s` is an optional \
parameter column, `t` the base time and `x*` the fiber coordinates. Numbers carry 9 significant digits.";

const REPORT_CSV_HELP: &str = "Report CSV columns: `triangle,s_p,s_q,value,model,gap,counted`. \
`s_p` and `s_q` are the proper times of the compared points on the sides xy and yz, `value` and \
`model` the separations (distances on the fiber side), `gap = value - model`, and `counted` marks \
pairs that enter the verdict.";

#[derive(Debug, Parser)]
#[command(name = "lorcone", version, about = "Time separation, maximizers and curvature comparison on generalized cones I x_f X")]
pub struct Cli {
    /// JSON cone configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time separation and causal relation of two points.
    #[command(after_help = POINT_HELP)]
    Tau {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
    /// Samples the maximizing geodesic from P to Q as CSV.
    #[command(after_help = format!("{POINT_HELP}\n\n{PATH_CSV_HELP}"))]
    Geodesic {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Output file; the CSV goes to stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Certifies, classifies and measures a sampled path from CSV.
    #[command(after_help = PATH_CSV_HELP)]
    Path {
        file: PathBuf,
        /// Dyadic refinement depth of the variational length.
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// Sampled check of a timelike curvature bound on the cone.
    #[command(after_help = REPORT_CSV_HELP)]
    Certify {
        /// Model curvature K' of the Lorentzian comparison plane.
        #[arg(long = "K", allow_negative_numbers = true)]
        k: f64,
        /// `below` (lower bound) or `above` (upper bound).
        #[arg(long, default_value = "below")]
        dir: Direction,
        /// Number of triangles.
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Overrides the configuration seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Compared points per side.
        #[arg(long, default_value_t = 5)]
        pairs: usize,
        /// Overrides the relative gap tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Base-time window `lo,hi` for triangle centres.
        #[arg(long, allow_hyphen_values = true, value_name = "LO,HI")]
        window: Option<String>,
        /// Fiber size as a fraction of the lifting bound.
        #[arg(long)]
        fiber_scale: Option<f64>,
        /// Also compare the fiber against M2(K) for this K (converse direction).
        #[arg(long = "fiber", allow_negative_numbers = true, value_name = "K")]
        fiber_k: Option<f64>,
        /// Report CSV (the fiber-side report when --fiber is given).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Cone-side report CSV when --fiber is given.
        #[arg(long, value_name = "FILE")]
        cone_out: Option<PathBuf>,
    },
    /// Concavity, diameter and big bang/crunch verdicts for the warp.
    Singularity {
        #[arg(long = "K", allow_negative_numbers = true)]
        k: f64,
    },
    /// Checks a curve catalog for the bare Lorentzian length space axioms.
    Llcheck {
        file: PathBuf,
        /// Also print the derived time separation table.
        #[arg(long)]
        tau: bool,
    },
    /// Runs the acceptance suite.
    Selftest {
        /// Criteria to run, e.g. `1,2,9`; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            1
        }
    }
}

fn load_config(cli: &Cli) -> Result<ConeConfig> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("this command needs --config FILE".into()))?;
    parse_config(&read(path)?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parses `t;x1,x2,...` into a point of the cone.
pub fn parse_point(cone: &Cone, text: &str) -> Result<ConePoint<AnyPoint>> {
    let (t, x) = text
        .split_once(';')
        .ok_or_else(|| Error::InvalidPoint(format!("{text:?}: expected `t;coords`")))?;
    let t: f64 = t.trim().parse().map_err(|_| Error::InvalidPoint(format!("{text:?}: bad base time {t:?}")))?;
    let fields: Vec<&str> = x.split(',').map(str::trim).collect();
    let x = cone.fiber().decode(&fields)?;
    cone.point(t, x)
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

/// Runs a parsed command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Tau { p, q } => {
            let cone = load_config(cli)?.build()?;
            let (p, q) = (parse_point(&cone, p)?, parse_point(&cone, q)?);
            let v = cone.relate(&p, &q)?;
            let tau = cone.time_separation(&p, &q)?;
            writeln!(out, "tau: {}", fmt_num(tau)).map_err(io)?;
            writeln!(out, "relation: {}", v.relation.name()).map_err(io)?;
            writeln!(out, "fiber_distance: {}", fmt_num(v.fiber_distance)).map_err(io)?;
            writeln!(out, "horizon: {}", fmt_num(v.horizon)).map_err(io)?;
            if let Some(h) = v.null_time {
                writeln!(out, "null_time: {}", fmt_num(h)).map_err(io)?;
            }
            Ok(0)
        }
        Command::Geodesic { p, q, samples, out: file } => {
            let cone = load_config(cli)?.build()?;
            let (p, q) = (parse_point(&cone, p)?, parse_point(&cone, q)?);
            let m = cone.maximizer(&p, &q)?;
            let path = m.sample(*samples)?;
            let csv = cone.path_to_csv(&path);
            match file {
                Some(f) => {
                    write(f, &csv)?;
                    writeln!(out, "tau: {}", fmt_num(m.tau())).map_err(io)?;
                    // The length of the written samples, as `path` will report it.
                    let reread = cone.path_from_csv(&csv)?;
                    writeln!(out, "length: {}", fmt_num(cone.path_length(&reread)?)).map_err(io)?;
                    writeln!(out, "class: {}", cone.classify_path(&reread)?.name()).map_err(io)?;
                    writeln!(out, "samples: {}", path.len()).map_err(io)?;
                    writeln!(out, "out: {}", f.display()).map_err(io)?;
                }
                None => out.write_all(csv.as_bytes()).map_err(io)?,
            }
            Ok(0)
        }
        Command::Path { file, depth } => {
            let cone = load_config(cli)?.build()?;
            let path = cone.path_from_csv(&read(file)?)?;
            let class = cone.classify_path(&path)?;
            let var = cone.variational_length(&path, *depth)?;
            writeln!(out, "samples: {}", path.len()).map_err(io)?;
            writeln!(out, "class: {}", class.name()).map_err(io)?;
            writeln!(out, "length: {}", fmt_num(cone.path_length(&path)?)).map_err(io)?;
            writeln!(out, "variational_length: {}", fmt_num(*var.last().unwrap_or(&0.0))).map_err(io)?;
            writeln!(out, "energy: {}", fmt_num(cone.energy(&path)?)).map_err(io)?;
            Ok(0)
        }
        Command::Certify { k, dir, n, seed, pairs, tolerance, window, fiber_scale, fiber_k, out: file, cone_out } => {
            let cfg = load_config(cli)?;
            let cone = cfg.build()?;
            let mut s = cfg.sampling();
            s.n_triangles = *n;
            s.pair_samples = *pairs;
            if let Some(seed) = seed {
                s.seed = *seed;
            }
            if let Some(t) = tolerance {
                s.tolerance = *t;
            }
            if let Some(w) = window {
                s.t_window = Some(parse_window(w)?);
            }
            if let Some(f) = fiber_scale {
                s.fiber_scale = *f;
            }
            match fiber_k {
                None => {
                    let rep = with_thread_cap(|| certify_bound(&cone, *k, *dir, &s))?;
                    if let Some(f) = file {
                        write(f, &rep.to_csv())?;
                    }
                    out.write_all(rep.summary().as_bytes()).map_err(io)?;
                    Ok(if rep.violated { 2 } else { 0 })
                }
                Some(kf) => {
                    let rep = with_thread_cap(|| fiber_bound_from_cone(&cone, *kf, *k, *dir, &s))?;
                    if let Some(f) = file {
                        write(f, &rep.fiber.to_csv())?;
                    }
                    if let Some(f) = cone_out {
                        write(f, &rep.cone.to_csv())?;
                    }
                    out.write_all(rep.fiber.summary().as_bytes()).map_err(io)?;
                    writeln!(out).map_err(io)?;
                    out.write_all(rep.cone.summary().as_bytes()).map_err(io)?;
                    Ok(if rep.fiber.violated || rep.cone.violated { 2 } else { 0 })
                }
            }
        }
        Command::Singularity { k } => {
            let w = load_config(cli)?.warp_spec()?;
            let r = w.singularity_report(*k)?;
            let iv = w.interval();
            writeln!(out, "K: {}", fmt_num(r.k)).map_err(io)?;
            writeln!(out, "interval: ({}, {})", fmt_num(iv.a), fmt_num(iv.b)).map_err(io)?;
            writeln!(out, "lower_bound_consistent: {}", r.lower_bound_consistent).map_err(io)?;
            writeln!(out, "holds_concave: {}", r.concavity.holds_concave).map_err(io)?;
            writeln!(out, "holds_convex: {}", r.concavity.holds_convex).map_err(io)?;
            writeln!(out, "worst_margin: {} at t = {}", fmt_num(r.concavity.worst_margin), fmt_num(r.concavity.worst_t))
                .map_err(io)?;
            writeln!(out, "tau_diameter_bound: {}", fmt_num(r.tau_diameter_bound)).map_err(io)?;
            writeln!(out, "big_bang: {}", r.big_bang).map_err(io)?;
            writeln!(out, "big_crunch: {}", r.big_crunch).map_err(io)?;
            writeln!(out, "upper_bound_possible: {}", r.upper_bound_possible).map_err(io)?;
            for v in &r.verdicts {
                writeln!(out, "verdict: {v}").map_err(io)?;
            }
            Ok(if r.lower_bound_consistent { 0 } else { 2 })
        }
        Command::Llcheck { file, tau } => {
            let cat = CurveCatalog::parse(&read(file)?)?;
            let v = check_bare_llspace(&cat);
            writeln!(out, "points: {}", v.points).map_err(io)?;
            writeln!(out, "curves: {}", v.curves).map_err(io)?;
            writeln!(out, "triples_checked: {}", v.triples_checked).map_err(io)?;
            writeln!(out, "failures: {}", v.failures.len()).map_err(io)?;
            for f in &v.failures {
                writeln!(out, "failure: {f}").map_err(io)?;
            }
            if *tau {
                let t = cat.derived_tau();
                writeln!(out, "tau,{}", cat.points().join(",")).map_err(io)?;
                for (i, row) in t.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "{},{}", cat.points()[i], cells.join(",")).map_err(io)?;
                }
            }
            writeln!(out, "verdict: {}", if v.passed() { "bare Lorentzian length space" } else { "failed" }).map_err(io)?;
            Ok(if v.passed() { 0 } else { 2 })
        }
        Command::Selftest { only } => {
            let ids: Vec<usize> = if only.is_empty() { (1..=acceptance::CRITERIA.len()).collect() } else { only.clone() };
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > acceptance::CRITERIA.len()) {
                return Err(Error::Precondition(format!("no acceptance criterion {bad}")));
            }
            let mut failed = 0;
            for id in ids {
                let o = acceptance::run(id);
                writeln!(out, "{}", o.line()).map_err(io)?;
                out.flush().map_err(io)?;
                failed += usize::from(!o.passed);
            }
            Ok(if failed == 0 { 0 } else { 2 })
        }
    }
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Precondition(format!("window {s:?}: expected `lo,hi` with lo < hi"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if a < b {
        Ok((a, b))
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_and_windows() {
        let cone = parse_config(r#"{"interval":{"a":"-inf","b":"inf"},"warp":{"kind":"constant","c":1},"fiber":{"kind":"euclidean","n":2}}"#)
            .unwrap()
            .build()
            .unwrap();
        let p = parse_point(&cone, "-0.5;1,-2").unwrap();
        assert_eq!(p.t, -0.5);
        assert_eq!(p.x, AnyPoint::Vector(vec![1.0, -2.0]));
        assert!(parse_point(&cone, "0,1,2").is_err());
        assert!(parse_point(&cone, "0;1").is_err());
        assert_eq!(parse_window("-1,2").unwrap(), (-1.0, 2.0));
        assert!(parse_window("2,1").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
