//! Experiment configuration files (TOML).
//!
//! ```toml
//! config_version = 1
//! grid = 256                 # ignored for file bodies, which carry their own N
//! record_every = 100
//! monitors = ["harnack"]     # pointwise monitors; trajectory monitors always run
//! monitor_tolerance = 1e-7
//! recenter = false           # translate the body so it shrinks onto the origin
//!
//! [body]
//! kind = "random"            # "ellipse" {a, b, rot} | "random" | "file" {path}
//! seed = 1
//! max_harmonic = 8
//! decay = 2.0
//! amplitude = 0.2
//! halving = true
//!
//! [controller]
//! safety = 0.5
//! dt_max = 1e-2
//! area_floor = 1e-4
//!
//! [output]
//! dir = "out"                # relative to the config file; overridden by AFFINE_FLOW_OUT_DIR
//! trajectory = "trajectory.csv"
//! summary = "summary.json"
//! plot = "trajectory.dat"    # whitespace-separated columns for gnuplot
//! ```
//!
//! Parsing reports every problem at once, each tagged with its dotted field path.

use std::fmt;
use std::path::{Path, PathBuf};

use affine_flow::body::RandomBodySpec;
use affine_flow::diagnostics::PointwiseMonitor;
use affine_flow::spectral::{check_grid_size, DEFAULT_GRID};
use affine_flow::StepController;
use toml::{Table, Value};

pub const CONFIG_VERSION: i64 = 1;
pub const OUT_DIR_ENV: &str = "AFFINE_FLOW_OUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub enum BodyConfig {
    Ellipse { a: f64, b: f64, rot: f64 },
    Random(RandomBodySpec),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub trajectory: PathBuf,
    pub summary: PathBuf,
    pub plot: Option<PathBuf>,
}

impl OutputConfig {
    fn resolve(&self, name: &Path) -> PathBuf {
        self.dir.join(name)
    }

    pub fn trajectory_path(&self) -> PathBuf {
        self.resolve(&self.trajectory)
    }

    pub fn summary_path(&self) -> PathBuf {
        self.resolve(&self.summary)
    }

    pub fn plot_path(&self) -> Option<PathBuf> {
        self.plot.as_deref().map(|p| self.resolve(p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub body: BodyConfig,
    pub grid: usize,
    pub controller: StepController,
    pub record_every: usize,
    pub monitors: Vec<PointwiseMonitor>,
    pub monitor_tolerance: f64,
    pub recenter: bool,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Reads typed fields out of one TOML table, collecting errors and flagging
/// keys that were never asked for.
struct Reader<'t, 'e> {
    table: &'t Table,
    prefix: &'static str,
    seen: Vec<&'static str>,
    errors: &'e mut Vec<FieldError>,
}

impl<'t, 'e> Reader<'t, 'e> {
    fn new(table: &'t Table, prefix: &'static str, errors: &'e mut Vec<FieldError>) -> Self {
        Self {
            table,
            prefix,
            seen: Vec::new(),
            errors,
        }
    }

    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn fail(&mut self, key: &str, message: impl Into<String>) {
        let field = self.path(key);
        self.errors.push(FieldError {
            field,
            message: message.into(),
        });
    }

    fn raw(&mut self, key: &'static str) -> Option<&'t Value> {
        self.seen.push(key);
        self.table.get(key)
    }

    fn float(&mut self, key: &'static str, default: Option<f64>) -> Option<f64> {
        match self.raw(key) {
            None if default.is_none() => {
                self.fail(key, "missing");
                None
            }
            None => default,
            Some(Value::Float(x)) => Some(*x),
            Some(Value::Integer(i)) => Some(*i as f64),
            Some(other) => {
                self.fail(key, format!("expected a number, got {}", other.type_str()));
                None
            }
        }
    }

    fn positive(&mut self, key: &'static str, default: Option<f64>) -> Option<f64> {
        let x = self.float(key, default)?;
        if x > 0.0 && x.is_finite() {
            Some(x)
        } else {
            self.fail(key, format!("must be positive and finite, got {x}"));
            None
        }
    }

    fn integer(&mut self, key: &'static str, default: Option<i64>) -> Option<i64> {
        match self.raw(key) {
            None if default.is_none() => {
                self.fail(key, "missing");
                None
            }
            None => default,
            Some(Value::Integer(i)) => Some(*i),
            Some(other) => {
                self.fail(key, format!("expected an integer, got {}", other.type_str()));
                None
            }
        }
    }

    fn count(&mut self, key: &'static str, default: Option<usize>, min: usize) -> Option<usize> {
        let i = self.integer(key, default.map(|d| d as i64))?;
        match usize::try_from(i) {
            Ok(u) if u >= min => Some(u),
            _ => {
                self.fail(key, format!("must be an integer >= {min}, got {i}"));
                None
            }
        }
    }

    fn boolean(&mut self, key: &'static str, default: bool) -> Option<bool> {
        match self.raw(key) {
            None => Some(default),
            Some(Value::Boolean(b)) => Some(*b),
            Some(other) => {
                self.fail(key, format!("expected a boolean, got {}", other.type_str()));
                None
            }
        }
    }

    fn string(&mut self, key: &'static str, default: Option<&str>) -> Option<String> {
        match self.raw(key) {
            None if default.is_none() => {
                self.fail(key, "missing");
                None
            }
            None => default.map(str::to_string),
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => {
                self.fail(key, format!("expected a string, got {}", other.type_str()));
                None
            }
        }
    }

    fn table(&mut self, key: &'static str) -> Option<&'t Table> {
        match self.raw(key) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(other) => {
                self.fail(key, format!("expected a table, got {}", other.type_str()));
                None
            }
        }
    }

    fn finish(self) {
        let unknown: Vec<String> = self
            .table
            .keys()
            .filter(|k| !self.seen.contains(&k.as_str()))
            .map(|k| self.path(k))
            .collect();
        for field in unknown {
            self.errors.push(FieldError {
                field,
                message: "unknown field".into(),
            });
        }
    }
}

fn parse_body(table: Option<&Table>, base: &Path, errors: &mut Vec<FieldError>) -> Option<BodyConfig> {
    let Some(table) = table else {
        errors.push(FieldError {
            field: "body".into(),
            message: "missing".into(),
        });
        return None;
    };
    let mut r = Reader::new(table, "body", errors);
    let kind = r.string("kind", None);
    let body = match kind.as_deref() {
        Some("ellipse") => {
            let a = r.positive("a", None);
            let b = r.positive("b", None);
            let rot = r.float("rot", Some(0.0));
            Some(BodyConfig::Ellipse {
                a: a?,
                b: b?,
                rot: rot?,
            })
        }
        Some("random") => {
            let d = RandomBodySpec::default();
            let seed = r.integer("seed", Some(d.seed as i64)).and_then(|s| {
                u64::try_from(s).ok().or_else(|| {
                    r.fail("seed", format!("must be non-negative, got {s}"));
                    None
                })
            });
            let max_harmonic = r.count("max_harmonic", Some(d.max_harmonic), 2);
            let decay = r.float("decay", Some(d.decay));
            let amplitude = r.float("amplitude", Some(d.amplitude));
            let halving = r.boolean("halving", d.halving);
            Some(BodyConfig::Random(RandomBodySpec {
                seed: seed?,
                max_harmonic: max_harmonic?,
                decay: decay?,
                amplitude: amplitude?,
                halving: halving?,
            }))
        }
        Some("file") => r.string("path", None).map(|p| BodyConfig::File(base.join(p))),
        Some(other) => {
            r.fail(
                "kind",
                format!("unknown body kind {other:?}; expected ellipse, random or file"),
            );
            None
        }
        None => None,
    };
    r.finish();
    body
}

fn parse_monitors(value: Option<&Value>, errors: &mut Vec<FieldError>) -> Vec<PointwiseMonitor> {
    let all = [
        PointwiseMonitor::Harnack,
        PointwiseMonitor::AncientHarnack,
        PointwiseMonitor::SigmaNonIncreasing,
    ];
    let Some(value) = value else {
        return Vec::new();
    };
    let Some(items) = value.as_array() else {
        errors.push(FieldError {
            field: "monitors".into(),
            message: format!("expected an array of names, got {}", value.type_str()),
        });
        return Vec::new();
    };
    let mut out = Vec::new();
    for (k, item) in items.iter().enumerate() {
        match item.as_str().and_then(|s| all.iter().find(|m| m.name() == s)) {
            Some(m) => out.push(*m),
            None => errors.push(FieldError {
                field: format!("monitors[{k}]"),
                message: format!(
                    "unknown monitor {item}; expected one of {}",
                    all.map(|m| m.name()).join(", ")
                ),
            }),
        }
    }
    out
}

impl ExperimentConfig {
    /// Parse and validate a config. Relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigErrors> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| {
            ConfigErrors(vec![FieldError {
                field: "<file>".into(),
                message: e.message().to_string(),
            }])
        })?;
        let mut errors = Vec::new();
        let mut r = Reader::new(&root, "", &mut errors);

        match r.integer("config_version", None) {
            Some(CONFIG_VERSION) | None => {}
            Some(v) => r.fail(
                "config_version",
                format!("unsupported version {v}; this build reads {CONFIG_VERSION}"),
            ),
        }
        let grid = r.count("grid", Some(DEFAULT_GRID), 0);
        if let Some(n) = grid {
            if check_grid_size(n).is_err() {
                r.fail("grid", format!("must be a power of two >= 64, got {n}"));
            }
        }
        let record_every = r.count("record_every", Some(100), 1);
        let monitor_tolerance = r.positive("monitor_tolerance", Some(1e-7));
        let recenter = r.boolean("recenter", false);
        let monitors_value = r.raw("monitors");
        let body_table = r.table("body");
        let controller_table = r.table("controller");
        let output_table = r.table("output");
        r.finish();

        let monitors = parse_monitors(monitors_value, &mut errors);
        let body = parse_body(body_table, base, &mut errors);

        let empty = Table::new();
        let defaults = StepController::default();
        let mut c = Reader::new(controller_table.unwrap_or(&empty), "controller", &mut errors);
        let safety = c.positive("safety", Some(defaults.safety));
        if let Some(s) = safety {
            if s > 1.0 {
                c.fail("safety", format!("must lie in (0, 1], got {s}"));
            }
        }
        let dt_max = c.positive("dt_max", Some(defaults.dt_max));
        let area_floor = c.positive("area_floor", Some(defaults.area_floor));
        c.finish();

        let mut o = Reader::new(output_table.unwrap_or(&empty), "output", &mut errors);
        let dir = o.string("dir", Some("."));
        let trajectory = o.string("trajectory", Some("trajectory.csv"));
        let summary = o.string("summary", Some("summary.json"));
        let plot = match o.raw("plot") {
            None => Some(None),
            Some(Value::String(s)) => Some(Some(PathBuf::from(s))),
            Some(other) => {
                o.fail("plot", format!("expected a string, got {}", other.type_str()));
                None
            }
        };
        o.finish();

        if !errors.is_empty() {
            return Err(ConfigErrors(errors));
        }
        // every field parsed, so the unwraps below cannot fail
        let dir = match std::env::var_os(OUT_DIR_ENV) {
            Some(d) => PathBuf::from(d),
            None => base.join(dir.unwrap()),
        };
        Ok(Self {
            body: body.unwrap(),
            grid: grid.unwrap(),
            controller: StepController {
                safety: safety.unwrap(),
                dt_max: dt_max.unwrap(),
                area_floor: area_floor.unwrap(),
            },
            record_every: record_every.unwrap(),
            monitors,
            monitor_tolerance: monitor_tolerance.unwrap(),
            recenter: recenter.unwrap(),
            output: OutputConfig {
                dir,
                trajectory: trajectory.unwrap().into(),
                summary: summary.unwrap().into(),
                plot: plot.unwrap(),
            },
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigErrors> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigErrors(vec![FieldError {
                field: "<file>".into(),
                message: format!("cannot read {}: {e}", path.display()),
            }])
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
        ExperimentConfig::parse(text, Path::new("/base"))
    }

    #[test]
    fn minimal_config_takes_documented_defaults() {
        let c = parse(
            "config_version = 1\n[body]\nkind = \"ellipse\"\na = 2\nb = 0.5\n",
        )
        .unwrap();
        assert_eq!(
            c.body,
            BodyConfig::Ellipse {
                a: 2.0,
                b: 0.5,
                rot: 0.0
            }
        );
        assert_eq!(c.grid, 256);
        assert_eq!(c.record_every, 100);
        assert_eq!(c.controller, StepController::default());
        assert!(c.monitors.is_empty());
        assert!(!c.recenter);
        assert_eq!(c.output.trajectory_path(), PathBuf::from("/base/./trajectory.csv"));
        assert_eq!(c.output.plot, None);
    }

    #[test]
    fn random_body_and_monitors() {
        let c = parse(
            r#"
            config_version = 1
            monitors = ["harnack", "sigma_non_increasing"]
            recenter = true
            [body]
            kind = "random"
            seed = 7
            halving = false
            [output]
            dir = "runs"
            plot = "t.dat"
            "#,
        )
        .unwrap();
        let BodyConfig::Random(spec) = &c.body else {
            panic!("expected a random body")
        };
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.max_harmonic, 8);
        assert!(!spec.halving);
        assert_eq!(
            c.monitors,
            vec![PointwiseMonitor::Harnack, PointwiseMonitor::SigmaNonIncreasing]
        );
        assert_eq!(c.output.plot_path(), Some(PathBuf::from("/base/runs/t.dat")));
    }

    #[test]
    fn all_field_errors_are_reported_together() {
        let err = parse(
            r#"
            config_version = 2
            grid = 100
            record_every = 0
            monitors = ["harnack", "bogus"]
            colour = "red"
            [body]
            kind = "ellipse"
            a = -1
            [controller]
            safety = 2.0
            area_floor = "small"
            "#,
        )
        .unwrap_err();
        let fields: Vec<&str> = err.0.iter().map(|e| e.field.as_str()).collect();
        for f in [
            "config_version",
            "grid",
            "record_every",
            "colour",
            "monitors[1]",
            "body.a",
            "body.b",
            "controller.safety",
            "controller.area_floor",
        ] {
            assert!(fields.contains(&f), "missing {f} in {fields:?}");
        }
    }

    #[test]
    fn syntax_errors_and_missing_body() {
        assert_eq!(parse("grid = ").unwrap_err().0[0].field, "<file>");
        let err = parse("config_version = 1").unwrap_err();
        assert_eq!(err.0[0].field, "body");
    }

    #[test]
    fn file_body_resolves_against_config_dir() {
        let c = parse("config_version = 1\n[body]\nkind = \"file\"\npath = \"k.json\"\n").unwrap();
        assert_eq!(c.body, BodyConfig::File(PathBuf::from("/base/k.json")));
    }
}
