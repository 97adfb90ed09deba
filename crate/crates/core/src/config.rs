//! INI-style run configuration.
//!
//! ```text
//! # two fixed objects and a drifter
//! [objects]
//! A = 1,1,0
//! B = 0,0,1
//! Dr = 0,0,0
//!
//! [metric]
//! kind = xr
//! b = 1.5
//!
//! [ia]
//! max_cycles = 10000
//!
//! [task]
//! kind = scan
//! free = x,y
//! fixed = z:0.5
//! min = -3
//! max = 4
//! steps = 256
//! ```
//!
//! Every key is checked; unknown sections or keys are errors.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::ia::IaSettings;
use crate::metric::{MetricKind, MetricSpec, Object, ObjectConfig, DEFAULT_DRIFTER};
use crate::scanner::{AxisRange, ScanGrid, DEFAULT_BUDGET};

#[derive(Clone, Debug, PartialEq)]
pub enum DirectionSet {
    Lattice,
    Fibonacci(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuraTask {
    pub directions: DirectionSet,
    /// Defaults to 100 fixed-object diameters.
    pub r_max: Option<f64>,
    pub growth: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileTask {
    pub direction: Vec<f64>,
    pub origin: Option<Vec<f64>>,
    /// Defaults to 10 fixed-object diameters.
    pub d_min: Option<f64>,
    /// Defaults to 1000 fixed-object diameters.
    pub d_max: Option<f64>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTask {
    pub waypoints: Vec<Vec<f64>>,
    pub samples_per_unit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefineTask {
    pub grid: ScanGrid,
    pub tol: f64,
    /// Refine at most this many transitions, spread evenly over the list.
    pub max_points: Option<usize>,
    /// Also measure the transition layer thickness at each refined point.
    pub thickness: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Task {
    Scan(ScanGrid),
    Aura(AuraTask),
    OmegaProfile(ProfileTask),
    Trajectory(TrajectoryTask),
    Refine(RefineTask),
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Scan(_) => "scan",
            Task::Aura(_) => "aura",
            Task::OmegaProfile(_) => "omega-profile",
            Task::Trajectory(_) => "trajectory",
            Task::Refine(_) => "refine",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub objects: ObjectConfig,
    pub metric: MetricSpec,
    pub ia: IaSettings,
    pub task: Task,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

#[derive(Default)]
struct Section {
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(i))
    }

    fn finish(self, name: &str) -> Result<()> {
        match self.entries.first() {
            Some(e) => Err(parse_err(e.line, format!("unknown key {:?} in [{name}]", e.key))),
            None => Ok(()),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

const SECTIONS: [&str; 4] = ["objects", "metric", "ia", "task"];

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(parse_err(line, format!("unknown section [{name}]")));
            }
            if sections.contains_key(&name) {
                return Err(parse_err(line, format!("section [{name}] appears twice")));
            }
            sections.insert(name.clone(), Section { line, entries: Vec::new() });
            current = Some(name);
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| parse_err(line, format!("expected KEY = VALUE, got {body:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(parse_err(line, "empty key"));
        }
        let name = current.as_ref().ok_or_else(|| parse_err(line, "key outside of any section"))?;
        let section = sections.get_mut(name).unwrap();
        if section.entries.iter().any(|e| e.key == key) {
            return Err(parse_err(line, format!("duplicate key {key:?}")));
        }
        section.entries.push(Entry { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(sections)
}

fn parse_f64(e: &Entry) -> Result<f64> {
    let v: f64 = e.value.parse().map_err(|_| parse_err(e.line, format!("{}: not a number: {:?}", e.key, e.value)))?;
    if !v.is_finite() {
        return Err(parse_err(e.line, format!("{}: value must be finite", e.key)));
    }
    Ok(v)
}

fn parse_usize(e: &Entry) -> Result<usize> {
    e.value
        .parse()
        .map_err(|_| parse_err(e.line, format!("{}: not a nonnegative integer: {:?}", e.key, e.value)))
}

fn parse_bool(e: &Entry) -> Result<bool> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(parse_err(e.line, format!("{}: expected true or false", e.key))),
    }
}

fn parse_vector(line: usize, key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|c| {
            let c = c.trim();
            c.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("{key}: bad coordinate {c:?}")))
        })
        .collect()
}

/// Axis names `x`, `y`, `z` or a zero-based index.
fn parse_axis(line: usize, text: &str, dim: usize) -> Result<usize> {
    let axis = match text.trim() {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        t => t.parse().map_err(|_| parse_err(line, format!("unknown axis {t:?}")))?,
    };
    if axis >= dim {
        return Err(parse_err(line, format!("axis {text:?} out of range for {dim} dimensions")));
    }
    Ok(axis)
}

/// One value for every free axis, or a single value shared by all.
fn per_axis<T: Clone>(e: &Entry, n: usize, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    let parts: Vec<T> = e
        .value
        .split(',')
        .map(|s| parse(s.trim()).ok_or_else(|| parse_err(e.line, format!("{}: bad value {:?}", e.key, s.trim()))))
        .collect::<Result<_>>()?;
    match parts.len() {
        1 => Ok(vec![parts[0].clone(); n]),
        m if m == n => Ok(parts),
        m => Err(parse_err(e.line, format!("{}: expected 1 or {n} values, got {m}", e.key))),
    }
}

fn required(s: &mut Section, key: &str, section: &str) -> Result<Entry> {
    s.take(key).ok_or_else(|| parse_err(s.line, format!("[{section}] is missing {key:?}")))
}

fn parse_grid(s: &mut Section, dim: usize) -> Result<ScanGrid> {
    let free_e = required(s, "free", "task")?;
    let free: Vec<usize> = free_e.value.split(',').map(|a| parse_axis(free_e.line, a, dim)).collect::<Result<_>>()?;
    let n = free.len();
    let finite = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite());
    let min = per_axis(&required(s, "min", "task")?, n, finite)?;
    let max = per_axis(&required(s, "max", "task")?, n, finite)?;
    let steps = per_axis(&required(s, "steps", "task")?, n, |t| t.parse::<usize>().ok())?;
    let mut fixed = Vec::new();
    if let Some(e) = s.take("fixed") {
        for part in e.value.split(',') {
            let (axis, value) = part
                .split_once(':')
                .ok_or_else(|| parse_err(e.line, format!("fixed: expected AXIS:VALUE, got {:?}", part.trim())))?;
            let v = finite(value.trim()).ok_or_else(|| parse_err(e.line, format!("fixed: bad value {:?}", value.trim())))?;
            fixed.push((parse_axis(e.line, axis, dim)?, v));
        }
    } else {
        // Unlisted axes sit at zero.
        fixed = (0..dim).filter(|a| !free.contains(a)).map(|a| (a, 0.0)).collect();
    }
    let budget = match s.take("budget") {
        Some(e) => parse_usize(&e)?,
        None => DEFAULT_BUDGET,
    };
    let axes = free.iter().enumerate().map(|(i, &a)| AxisRange::new(a, min[i], max[i], steps[i])).collect();
    let mut grid = ScanGrid::new(axes, fixed);
    grid.budget = budget;
    grid.validate(dim).map_err(|err| match err {
        Error::Budget { .. } => err,
        other => parse_err(free_e.line, other.to_string()),
    })?;
    Ok(grid)
}

fn parse_objects(mut s: Section) -> Result<ObjectConfig> {
    let drifter = s.take("drifter");
    let drifter_name = drifter.as_ref().map_or(DEFAULT_DRIFTER.to_string(), |e| e.value.clone());
    let mut objects = Vec::new();
    for e in &s.entries {
        objects.push(Object::new(e.key.clone(), parse_vector(e.line, &e.key, &e.value)?));
    }
    ObjectConfig::new(objects, &drifter_name).map_err(|err| {
        // Point at the object named in the message when there is one.
        let msg = err.to_string();
        let line = s
            .entries
            .iter()
            .find(|e| names_object(&msg, &e.key))
            .map_or(drifter.as_ref().map_or(s.line, |d| d.line), |e| e.line);
        parse_err(line, msg)
    })
}

fn names_object(msg: &str, name: &str) -> bool {
    let needle = format!("object {name}");
    msg.match_indices(&needle).any(|(i, _)| {
        msg[i + needle.len()..].chars().next().map_or(true, |c| !c.is_alphanumeric() && c != '_')
    })
}

fn parse_metric(mut s: Section) -> Result<MetricSpec> {
    let kind_e = required(&mut s, "kind", "metric")?;
    let kind = MetricKind::parse(&kind_e.value)
        .ok_or_else(|| parse_err(kind_e.line, format!("unknown metric {:?}; expected ed, cb or xr", kind_e.value)))?;
    let mut spec = MetricSpec::new(kind);
    let mut line = kind_e.line;
    if let Some(e) = s.take("b") {
        spec.b = parse_f64(&e)?;
        line = e.line;
    }
    if let Some(e) = s.take("cb_floor") {
        spec.cb_floor = parse_f64(&e)?;
        line = e.line;
    }
    s.finish("metric")?;
    spec.validate().map_err(|e| parse_err(line, e.to_string()))?;
    Ok(spec)
}

fn parse_ia(mut s: Section) -> Result<IaSettings> {
    let mut ia = IaSettings::default();
    let mut line = s.line;
    if let Some(e) = s.take("max_cycles") {
        ia.max_cycles = parse_usize(&e)?;
        line = e.line;
    }
    if let Some(e) = s.take("tie_epsilon") {
        ia.tie_epsilon = parse_f64(&e)?;
        line = e.line;
    }
    s.finish("ia")?;
    ia.validate().map_err(|e| parse_err(line, e.to_string()))?;
    Ok(ia)
}

fn parse_task(mut s: Section, dim: usize) -> Result<Task> {
    let kind = required(&mut s, "kind", "task")?;
    let task = match kind.value.as_str() {
        "scan" => Task::Scan(parse_grid(&mut s, dim)?),
        "aura" => {
            let directions = match s.take("directions") {
                None => DirectionSet::Lattice,
                Some(e) => match e.value.split_once(':') {
                    None if e.value == "lattice" => DirectionSet::Lattice,
                    Some(("fibonacci", n)) => DirectionSet::Fibonacci(
                        n.trim().parse().map_err(|_| parse_err(e.line, "directions: bad fibonacci count"))?,
                    ),
                    _ => return Err(parse_err(e.line, "directions: expected lattice or fibonacci:N")),
                },
            };
            if matches!(directions, DirectionSet::Fibonacci(_)) && dim != 3 {
                return Err(parse_err(kind.line, "fibonacci directions need three dimensions"));
            }
            let r_max = s.take("r_max").map(|e| parse_f64(&e)).transpose()?;
            let growth = s.take("growth").map(|e| parse_f64(&e)).transpose()?.unwrap_or(1.1);
            Task::Aura(AuraTask { directions, r_max, growth })
        }
        "omega-profile" => {
            let d = required(&mut s, "direction", "task")?;
            let direction = parse_vector(d.line, "direction", &d.value)?;
            if direction.len() != dim {
                return Err(parse_err(d.line, format!("direction has {} components, expected {dim}", direction.len())));
            }
            let origin = match s.take("origin") {
                Some(e) => {
                    let v = parse_vector(e.line, "origin", &e.value)?;
                    if v.len() != dim {
                        return Err(parse_err(e.line, format!("origin has {} components, expected {dim}", v.len())));
                    }
                    Some(v)
                }
                None => None,
            };
            let d_min = s.take("d_min").map(|e| parse_f64(&e)).transpose()?;
            let d_max = s.take("d_max").map(|e| parse_f64(&e)).transpose()?;
            let samples = s.take("samples").map(|e| parse_usize(&e)).transpose()?.unwrap_or(64);
            Task::OmegaProfile(ProfileTask { direction, origin, d_min, d_max, samples })
        }
        "trajectory" => {
            let w = required(&mut s, "waypoints", "task")?;
            let waypoints: Vec<Vec<f64>> =
                w.value.split(';').map(|p| parse_vector(w.line, "waypoints", p)).collect::<Result<_>>()?;
            if let Some(p) = waypoints.iter().find(|p| p.len() != dim) {
                return Err(parse_err(w.line, format!("waypoint has {} components, expected {dim}", p.len())));
            }
            let samples_per_unit = s.take("samples_per_unit").map(|e| parse_f64(&e)).transpose()?.unwrap_or(50.0);
            Task::Trajectory(TrajectoryTask { waypoints, samples_per_unit })
        }
        "refine" => {
            let grid = parse_grid(&mut s, dim)?;
            let tol = s.take("tol").map(|e| parse_f64(&e)).transpose()?.unwrap_or(1e-12);
            let max_points = s.take("max_points").map(|e| parse_usize(&e)).transpose()?;
            let thickness = s.take("thickness").map(|e| parse_bool(&e)).transpose()?.unwrap_or(false);
            Task::Refine(RefineTask { grid, tol, max_points, thickness })
        }
        other => {
            return Err(parse_err(
                kind.line,
                format!("unknown task kind {other:?}; expected scan, aura, omega-profile, trajectory or refine"),
            ))
        }
    };
    s.finish("task")?;
    Ok(task)
}

/// Parses and validates a configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut sections = split_sections(text)?;
    let missing = |name: &str| Error::Config(format!("missing section [{name}]"));
    let objects = parse_objects(sections.remove("objects").ok_or_else(|| missing("objects"))?)?;
    let metric = parse_metric(sections.remove("metric").ok_or_else(|| missing("metric"))?)?;
    let ia = match sections.remove("ia") {
        Some(s) => parse_ia(s)?,
        None => IaSettings::default(),
    };
    let task = parse_task(sections.remove("task").ok_or_else(|| missing("task"))?, objects.dimension())?;
    Ok(RunConfig { objects, metric, ia, task, out_dir: None, workers: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[objects]\nA = 1,1,0\nB = 0,0,1\nDr = 0,0,0\n[metric]\nkind = xr\nb = 1.5\n";

    fn with_task(task: &str) -> String {
        format!("{BASE}[task]\n{task}")
    }

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_scan_config() {
        let cfg = parse_config(&with_task("kind = scan\nfree = x,y\nfixed = z:0.5\nmin = -3\nmax = 4\nsteps = 256\n")).unwrap();
        assert_eq!(cfg.objects.dimension(), 3);
        assert_eq!(cfg.metric.kind, MetricKind::Xr);
        assert_eq!(cfg.metric.b, 1.5);
        match cfg.task {
            Task::Scan(g) => {
                assert_eq!(g.shape(), vec![256, 256]);
                assert_eq!(g.fixed, vec![(2, 0.5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_other_tasks() {
        let t = parse_config(&with_task("kind = aura\ndirections = fibonacci:100\nr_max = 50\n")).unwrap().task;
        assert_eq!(t, Task::Aura(AuraTask { directions: DirectionSet::Fibonacci(100), r_max: Some(50.0), growth: 1.1 }));
        let t = parse_config(&with_task("kind = omega-profile\ndirection = 1,0,0\n")).unwrap().task;
        assert!(matches!(t, Task::OmegaProfile(p) if p.samples == 64 && p.d_min.is_none()));
        let t = parse_config(&with_task("kind = trajectory\nwaypoints = -5,0,0; 5,0,0\nsamples_per_unit = 20\n")).unwrap().task;
        assert!(matches!(t, Task::Trajectory(p) if p.waypoints.len() == 2));
        let t = parse_config(&with_task("kind = refine\nfree = x,y\nfixed = z:0.5\nmin = -3\nmax = 4\nsteps = 32\nthickness = yes\n"))
            .unwrap()
            .task;
        assert!(matches!(t, Task::Refine(r) if r.thickness && r.tol == 1e-12));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "[objects]\nA = 1,1,0\nB = 0,0\nDr = 0,0,0\n[metric]\nkind = ed\n[task]\nkind = aura\n";
        let err = parse_config(text).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains('B'), "{err}");
        assert_eq!(line_of(err), 3);

        let err = parse_config(&BASE.replace("b = 1.5", "b = 1.0")).unwrap_err();
        assert_eq!(line_of(err), 7);

        let err = parse_config(&with_task("kind = aura\ncolour = red\n")).unwrap_err();
        assert_eq!(line_of(err), 10);
        let err = parse_config(&with_task("kind = dance\n")).unwrap_err();
        assert_eq!(line_of(err), 9);
        assert!(parse_config(&format!("{BASE}[extra]\n")).is_err());
        assert!(matches!(parse_config(BASE), Err(Error::Config(_))));
    }

    #[test]
    fn drifter_key_must_resolve() {
        let text = "[objects]\nA = 1,1,0\nB = 0,0,1\nP = 0,0,0\ndrifter = Q\n[metric]\nkind = ed\n[task]\nkind = aura\n";
        assert_eq!(line_of(parse_config(text).unwrap_err()), 5);
        let ok = parse_config(&text.replace("= Q", "= P")).unwrap();
        assert_eq!(ok.objects.drifter_name(), "P");
    }

    #[test]
    fn grid_budget_is_enforced() {
        let err = parse_config(&with_task("kind = scan\nfree = x,y,z\nmin = 0\nmax = 1\nsteps = 300\n")).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
        assert_eq!(err.exit_code(), 2);
    }
}
