//! JSON report envelope, failure classes and file helpers.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use bundle_decomp_core::audit::Audit;
use bundle_decomp_core::graph::{parse_bipartite, parse_edge_list};
use bundle_decomp_core::packing::BoundCheck;
use bundle_decomp_core::{BipartiteHost, Error, Graph};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Why a command stopped; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Gate(String),
    Invariant(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Gate(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Gate(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_feasibility_gate() {
            return Failure::Gate(e.to_string());
        }
        match e {
            Error::BundleConclusion(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub streams: BTreeMap<String, u64>,
    pub log_base: &'static str,
    pub strict: bool,
    pub results: Value,
    /// Hard invariants; any failure exits with 3.
    pub assertions: Audit,
    /// Theorem conclusions; hard only in strict mode.
    pub clauses: Audit,
    pub bounds: Vec<BoundCheck>,
    pub warnings: Vec<String>,
    pub passed: bool,
    /// Wall-clock per phase; the only field allowed to differ between reruns.
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, config: &impl Serialize, seed: Option<u64>, strict: bool) -> Self {
        Report {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: serde_json::to_value(config).expect("config serializes"),
            seed,
            streams: BTreeMap::new(),
            log_base: "e",
            strict,
            results: Value::Null,
            assertions: Audit::default(),
            clauses: Audit::default(),
            bounds: Vec::new(),
            warnings: Vec::new(),
            passed: true,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn stream(&mut self, name: &str, id: u64) {
        self.streams.insert(name.to_string(), id);
    }

    /// Runs `f` and records its wall-clock time under `phase`.
    pub fn timed<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings_ms.insert(phase.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub fn set_results(&mut self, results: impl Serialize) {
        self.results = serde_json::to_value(results).expect("results serialize");
    }

    fn finish(&mut self) {
        let soft_ok = self.clauses.all_pass() && self.bounds.iter().all(|b| b.holds);
        self.passed = self.assertions.all_pass() && (!self.strict || soft_ok);
        if !self.strict {
            for c in self.clauses.failures() {
                self.warnings.push(format!("clause {} failed{}", c.name, detail(c.detail.as_deref())));
            }
            for b in self.bounds.iter().filter(|b| !b.holds) {
                self.warnings.push(format!("bound missed: {} = {} against {} = {}", b.name, b.observed, b.formula, b.value));
            }
        }
    }

    /// Writes the report to `out` (stdout when absent) and returns the exit code.
    pub fn emit(mut self, out: Option<&Path>) -> CmdResult<i32> {
        self.finish();
        let mut text = serde_json::to_string_pretty(&self).expect("report serializes");
        text.push('\n');
        match out {
            Some(p) => write_file(p, &text)?,
            None => print!("{text}"),
        }
        if self.passed {
            Ok(0)
        } else {
            let failed: Vec<&str> = self.assertions.failures().chain(self.clauses.failures()).map(|c| c.name.as_str()).collect();
            eprintln!("invariant violated: {}", if failed.is_empty() { "bound missed".to_string() } else { failed.join(", ") });
            Ok(3)
        }
    }
}

fn detail(d: Option<&str>) -> String {
    d.map(|d| format!(": {d}")).unwrap_or_default()
}

pub fn read_file(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> CmdResult<()> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn read_graph(path: &Path) -> CmdResult<Graph> {
    parse_edge_list(&read_file(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn read_pair(path: &Path) -> CmdResult<BipartiteHost> {
    parse_bipartite(&read_file(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn read_json(path: &Path) -> CmdResult<Value> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Typed view of `value[pointer]`; schema errors name the JSON pointer.
pub fn typed<T: DeserializeOwned>(value: &Value, pointer: &str) -> CmdResult<T> {
    let node = value.pointer(pointer).ok_or_else(|| Failure::Usage(format!("missing {pointer}")))?;
    serde_path_to_error::deserialize(node).map_err(|e| {
        let mut at = pointer.to_string();
        for seg in e.path().iter() {
            match seg {
                serde_path_to_error::Segment::Seq { index } => at.push_str(&format!("/{index}")),
                serde_path_to_error::Segment::Map { key } => at.push_str(&format!("/{key}")),
                _ => {}
            }
        }
        Failure::Usage(format!("schema mismatch at {at}: {}", e.inner()))
    })
}

pub fn required<T: Copy>(v: Option<T>, flag: &str) -> CmdResult<T> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
}
