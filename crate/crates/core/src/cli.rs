//! Command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::aura::{aura_extent, far_field_profile, fibonacci_directions, lattice_directions, AuraOptions, AuraReport, RayProfile};
use crate::config::{parse_config, DirectionSet, RunConfig, Task};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::output::{color_collisions, crossing_csv, label_csv, membrane_csv, ppm_bytes, profile_csv, Manifest};
use crate::parallel::default_workers;
use crate::probe::DrifterProbe;
use crate::scanner::{detect_transitions, measure_ima_thickness, refine_transitions, scan, RefineOptions};
use crate::trajectory::{trace_path, PathSpec};

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Parser)]
#[command(name = "hsmor", version, about = "Drifter-field simulator for iterative-averaging grouping", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const AFTER_HELP: &str = "Every run also writes manifest.txt. The [task] kind in the config must match the subcommand.";

#[derive(Debug, Subcommand)]
enum Command {
    /// Label every grid point; writes labels.csv and, for planes, field.ppm
    Scan(RunArgs),
    /// Measure the aura extent; writes aura.txt
    Aura(RunArgs),
    /// Sample Ω along a ray; writes profile.csv and profile.txt
    #[command(name = "omega-profile")]
    OmegaProfile(RunArgs),
    /// Trace a drifter path; writes crossings.csv
    Trajectory(RunArgs),
    /// Scan, then refine every transition; writes membranes.csv
    Refine(RunArgs),
}

impl Command {
    fn split(self) -> (&'static str, RunArgs) {
        match self {
            Command::Scan(a) => ("scan", a),
            Command::Aura(a) => ("aura", a),
            Command::OmegaProfile(a) => ("omega-profile", a),
            Command::Trajectory(a) => ("trajectory", a),
            Command::Refine(a) => ("refine", a),
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// INI configuration file
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Worker threads (defaults to the available parallelism)
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
}

/// Runs the command line `argv` (without the program name) and returns the
/// process exit code.
pub fn run<S: AsRef<str>>(argv: &[S]) -> i32 {
    let full = std::iter::once("hsmor").chain(argv.iter().map(AsRef::as_ref));
    let cli = match Cli::try_parse_from(full) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let (command, args) = cli.command.split();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return 1;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return e.exit_code();
        }
    };
    if cfg.task.name() != command {
        eprintln!("error: subcommand {command} does not match [task] kind = {}", cfg.task.name());
        return 1;
    }
    cfg.out_dir = Some(args.out);
    cfg.workers = Some(args.workers.map_or_else(default_workers, usize::from));
    match execute(&cfg, &text) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed configuration, writing its outputs and manifest into the
/// configured directory. Returns the written paths.
pub fn execute(cfg: &RunConfig, config_text: &str) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let out = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let workers = cfg.workers.unwrap_or(1);
    std::fs::create_dir_all(&out)?;
    let mut manifest = Manifest::new();
    manifest.push("tool", concat!("hsmor ", env!("CARGO_PKG_VERSION")));
    manifest.push("task", cfg.task.name());
    manifest.push("workers", workers);
    manifest.push("objects", cfg.objects.names().join(","));
    manifest.push("drifter", cfg.objects.drifter_name());
    manifest.push("metric", cfg.metric.kind);
    let mut files = Vec::new();
    let mut write = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = out.join(name);
        std::fs::write(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    let probe = DrifterProbe::new(cfg.objects.clone(), cfg.metric, cfg.ia)?;

    match &cfg.task {
        Task::Scan(grid) => {
            let field = scan(&cfg.objects, &cfg.metric, grid, &cfg.ia, workers)?;
            write("labels.csv", label_csv(&field)?.as_bytes())?;
            if grid.is_plane() {
                write("field.ppm", &ppm_bytes(&field)?)?;
                let collisions = color_collisions(&field);
                manifest.push("color_collisions", collisions.len());
                for c in collisions {
                    manifest.push("color_collision", c.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" | "));
                }
            }
            let mut sigs = field.signatures();
            sigs.sort();
            sigs.dedup();
            manifest.push("samples", field.len());
            manifest.push("signatures", sigs.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" | "));
            manifest.push("degenerate_points", field.records.iter().filter(|r| r.degenerate).count());
        }
        Task::Aura(t) => {
            let directions = match t.directions {
                DirectionSet::Lattice => lattice_directions(cfg.objects.dimension()),
                DirectionSet::Fibonacci(n) => fibonacci_directions(n),
            };
            let r_max = t.r_max.unwrap_or(100.0 * cfg.objects.fixed_diameter());
            let opts = AuraOptions { growth: t.growth, workers, ..AuraOptions::default() };
            let rep = aura_extent(&probe, &directions, r_max, &opts)?;
            write("aura.txt", aura_text(&rep).as_bytes())?;
            manifest.push("r_max", format!("{r_max:.16e}"));
            manifest.push("ratio", format!("{:.16e}", rep.ratio));
        }
        Task::OmegaProfile(t) => {
            let fo = cfg.objects.fixed_diameter();
            let d_min = t.d_min.unwrap_or(10.0 * fo);
            let d_max = t.d_max.unwrap_or(1e3 * fo);
            let prof = far_field_profile(&probe, t.origin.as_deref(), &t.direction, d_min, d_max, t.samples, workers)?;
            write("profile.csv", profile_csv(&prof)?.as_bytes())?;
            write("profile.txt", profile_text(&prof).as_bytes())?;
            for n in &prof.notes {
                manifest.push("note", n);
            }
        }
        Task::Trajectory(t) => {
            let path = PathSpec::polyline(t.waypoints.clone(), t.samples_per_unit)?;
            let refine = RefineOptions::default();
            let trace = trace_path(&probe, &path, &refine, workers)?;
            write("crossings.csv", crossing_csv(&trace.events, path.dimension())?.as_bytes())?;
            manifest.push("crossings", trace.events.len());
            manifest.push("start_signature", trace.start_signature);
            manifest.push("end_signature", trace.end_signature);
            manifest.push("dense_only_crossings", trace.dense_only);
        }
        Task::Refine(t) => {
            let field = scan(&cfg.objects, &cfg.metric, &t.grid, &cfg.ia, workers)?;
            let mut edges = detect_transitions(&field);
            let total = edges.len();
            if let Some(m) = t.max_points.filter(|&m| m < edges.len()) {
                edges = (0..m).map(|k| edges[k * total / m]).collect();
            }
            let opts = RefineOptions { tol: t.tol, ..RefineOptions::default() };
            let points = refine_transitions(&probe, &field, &edges, &opts, workers)?;
            write("membranes.csv", membrane_csv(&points)?.as_bytes())?;
            manifest.push("transitions", total);
            manifest.push("refined", points.len());
            if t.thickness {
                let dim = cfg.objects.dimension();
                let thick = crate::parallel::map_indexed(points.len(), workers, |k| {
                    let axis = &t.grid.free[edges[k].axis];
                    let mut dir = vec![0.0; dim];
                    dir[axis.axis] = 1.0;
                    let spacing = (axis.max - axis.min).abs() / (axis.steps.max(2) - 1) as f64;
                    measure_ima_thickness(&probe, &points[k], &dir, spacing * 1e-3)
                });
                let mut csv = String::from(if dim == 3 { "x,y,z,thickness\n" } else { "position,thickness\n" });
                for (p, w) in points.iter().zip(&thick) {
                    let coords: Vec<String> = p.position.iter().map(|v| format!("{v:.16e}")).collect();
                    let _ = writeln!(csv, "{},{w:.16e}", coords.join(if dim == 3 { "," } else { " " }));
                }
                write("thickness.csv", csv.as_bytes())?;
                manifest.push("max_thickness", format!("{:.16e}", thick.iter().cloned().fold(0.0, f64::max)));
            }
        }
    }

    manifest.push("outputs", files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect::<Vec<_>>().join(","));
    manifest.push("wall_time_seconds", format!("{:.3}", started.elapsed().as_secs_f64()));
    manifest.push("config", config_text.trim_end());
    let mpath = out.join(MANIFEST_FILE);
    std::fs::write(&mpath, manifest.render())?;
    files.push(mpath);
    Ok(files)
}

fn vector(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",")
}

pub fn aura_text(rep: &AuraReport) -> String {
    let mut m = Manifest::new();
    m.push("outside_signature", &rep.outside_signature);
    m.push("center", vector(&rep.center));
    m.push("fo_extent", format!("{:.16e}", rep.fo_extent));
    m.push("fo_box_edge", format!("{:.16e}", rep.fo_box_edge));
    m.push("cube_edge", format!("{:.16e}", rep.cube_edge));
    m.push("ratio", format!("{:.16e}", rep.ratio));
    m.push("box_ratio", format!("{:.16e}", rep.box_ratio));
    m.push("box_min", vector(&rep.box_min));
    m.push("box_max", vector(&rep.box_max));
    m.push("box_edges", vector(&rep.box_edges));
    m.push("directions", rep.directions.len());
    for (k, (d, r)) in rep.directions.iter().zip(&rep.radii).enumerate() {
        m.push(format!("radius.{k}"), format!("{r:.16e} along {}", vector(d)));
    }
    m.render()
}

pub fn profile_text(p: &RayProfile) -> String {
    let mut m = Manifest::new();
    m.push("origin", vector(&p.origin));
    m.push("direction", vector(&p.direction));
    m.push("tail_start", p.tail_start);
    m.push("tail_signature", p.tail_signature());
    let fit = |f: &Option<crate::numeric::LinearFit>| match f {
        Some(f) => format!("slope {:.16e} intercept {:.16e} r_squared {:.16e}", f.slope, f.intercept, f.r_squared),
        None => "undefined".into(),
    };
    m.push("linear_fit", fit(&p.linear));
    m.push("log_fit", fit(&p.logarithmic));
    for n in &p.notes {
        m.push("note", n);
    }
    m.render()
}

/// Lists the output files of a run directory, excluding the manifest.
pub fn output_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().is_some_and(|n| n != MANIFEST_FILE))
        .collect();
    v.sort();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from(argv("hsmor scan --config c.ini --out o --workers 3")).unwrap();
        let (name, a) = cli.command.split();
        assert_eq!((name, a.config, a.out, a.workers), ("scan", "c.ini".into(), "o".into(), Some(3)));
        let cli = Cli::try_parse_from(argv("hsmor omega-profile --config c.ini")).unwrap();
        assert_eq!(cli.command.split().0, "omega-profile");
        assert!(Cli::try_parse_from(argv("hsmor dance --config c.ini")).is_err());
        assert!(Cli::try_parse_from(argv("hsmor scan")).is_err());
        assert!(Cli::try_parse_from(argv("hsmor scan --config c.ini --workers 0")).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run::<&str>(&[]), 1);
        assert_eq!(run(&["--help"]), 0);
        assert_eq!(run(&argv("dance --config x")), 1);
        assert_eq!(run(&argv("scan --config /nonexistent/cfg.ini")), 1);
    }
}
