//! Command-line front end: `gen`, `solve`, `verify`, `compare`, `stats`.
//!
//! Exit codes: 0 success, 1 verification failure or solver error, 2 usage,
//! parse or validation error, 3 oracle inconclusive.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::connectivity::{verify_mmn, Report};
use crate::error::Error;
use crate::geometry::{canonicalize, Coord, Network, Point, Segment};
use crate::grid::{solve_mmn, GridOptions};
use crate::instances::{gen_generating_set_instance, gen_kplanes, gen_random, GeneratedInstance};
use crate::kplanes::{solve_kplanes, PlanarLayering};
use crate::mmn2d::approx_mmn2d;
use crate::oracle::{exact_mmn, lower_bound, DEFAULT_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Error with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inconclusive { .. } => EXIT_INCONCLUSIVE,
            Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::EmptyInput(_)
            | Error::Degenerate(_)
            | Error::ZeroLengthSegment { .. }
            | Error::NotAxisParallel { .. } => EXIT_USAGE,
            _ => EXIT_INFEASIBLE,
        };
        CliError { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Algo {
    Kplanes,
    Grid,
    Oracle,
    Mmn2d,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Kplanes => "kplanes",
            Algo::Grid => "grid",
            Algo::Oracle => "oracle",
            Algo::Mmn2d => "mmn2d",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Random,
    Kplanes,
    #[value(name = "theorem1")]
    GeneratingSet,
}

#[derive(Parser, Debug)]
#[command(name = "mmn", version, about = "Minimum Manhattan network solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum, default_value = "random")]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Number of planes (kplanes family).
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coordinate range per axis (random family); defaults to 4n.
        #[arg(long)]
        range: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the companion network (theorem1 family).
        #[arg(long)]
        companion: Option<PathBuf>,
    },
    /// Solve an instance and write the network.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        params: SolveParams,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check the output and record the report in the network file.
        #[arg(long)]
        verify: bool,
    },
    /// Check a network against an instance.
    Verify { instance: PathBuf, network: PathBuf },
    /// Ratio table over instances and algorithms.
    Compare {
        instances: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "grid,oracle")]
        algos: Vec<Algo>,
        /// Include the built-in standard instance set.
        #[arg(long)]
        standard: bool,
        #[command(flatten)]
        params: SolveParams,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write weight-versus-n plot data.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Summary statistics of an instance, optionally with a network.
    Stats { instance: PathBuf, network: Option<PathBuf> },
}

#[derive(clap::Args, Debug, Clone)]
pub struct SolveParams {
    #[arg(long, value_enum, default_value = "grid")]
    pub algo: Algo,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Recursive greedy level for patching.
    #[arg(long, default_value_t = 2)]
    pub level: usize,
    /// Reserved for randomized variants; recorded in the output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Oracle node budget.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams { algo: Algo::Grid, epsilon: 1.0, level: 2, seed: 0, budget: DEFAULT_BUDGET }
    }
}

/// A terminal set as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub dimension: usize,
    pub terminals: Vec<Point>,
    pub meta: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    dimension: usize,
    terminals: Vec<Vec<Coord>>,
    #[serde(default)]
    meta: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    dimension: usize,
    segments: Vec<[Vec<Coord>; 2]>,
    #[serde(default)]
    weight: Option<Coord>,
    #[serde(default)]
    meta: Option<Value>,
}

fn coords_json(c: &[Coord]) -> String {
    let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

impl Instance {
    pub fn new(terminals: Vec<Point>, meta: Option<Value>) -> CliResult<Self> {
        let dimension = terminals.first().map_or(0, Point::dim);
        let inst = Instance { dimension, terminals, meta };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_generated(g: &GeneratedInstance) -> Self {
        let mut meta = json!({ "family": g.family, "params": g.params });
        if let Some(seed) = g.seed {
            meta["seed"] = json!(seed);
        }
        if let Some(pairs) = &g.pairs {
            meta["pairs"] = json!(pairs);
        }
        Instance { dimension: g.terminals[0].dim(), terminals: g.terminals.clone(), meta: Some(meta) }
    }

    fn validate(&self) -> CliResult<()> {
        if self.dimension == 0 {
            return Err(CliError::usage("field `dimension`: must be positive"));
        }
        for (i, t) in self.terminals.iter().enumerate() {
            if t.dim() != self.dimension {
                return Err(CliError::usage(format!(
                    "field `terminals[{i}]`: expected {} coordinates, found {}",
                    self.dimension,
                    t.dim()
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let f: InstanceFile =
            serde_json::from_str(text).map_err(|e| CliError::usage(format!("instance parse error: {e}")))?;
        let inst = Instance {
            dimension: f.dimension,
            terminals: f.terminals.into_iter().map(Point::new).collect(),
            meta: f.meta,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Canonical text: fixed field order, one terminal per line, compact
    /// metadata with sorted keys.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{{").unwrap();
        writeln!(s, "  \"dimension\": {},", self.dimension).unwrap();
        if self.terminals.is_empty() {
            write!(s, "  \"terminals\": []").unwrap();
        } else {
            writeln!(s, "  \"terminals\": [").unwrap();
            let rows: Vec<String> = self.terminals.iter().map(|t| format!("    {}", coords_json(t.coords()))).collect();
            writeln!(s, "{}", rows.join(",\n")).unwrap();
            write!(s, "  ]").unwrap();
        }
        if let Some(m) = &self.meta {
            write!(s, ",\n  \"meta\": {}", serde_json::to_string(m).unwrap()).unwrap();
        }
        s.push_str("\n}\n");
        s
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {}", path.display(), e.message)))
    }
}

pub fn network_to_json(n: &Network, meta: &Value) -> String {
    let mut s = String::new();
    writeln!(s, "{{").unwrap();
    writeln!(s, "  \"dimension\": {},", n.dim()).unwrap();
    if n.is_empty() {
        writeln!(s, "  \"segments\": [],").unwrap();
    } else {
        writeln!(s, "  \"segments\": [").unwrap();
        let rows: Vec<String> = n
            .segments()
            .iter()
            .map(|g| format!("    [{}, {}]", coords_json(g.a().coords()), coords_json(g.b().coords())))
            .collect();
        writeln!(s, "{}", rows.join(",\n")).unwrap();
        writeln!(s, "  ],").unwrap();
    }
    writeln!(s, "  \"weight\": {},", n.weight()).unwrap();
    writeln!(s, "  \"meta\": {}", serde_json::to_string(meta).unwrap()).unwrap();
    s.push_str("}\n");
    s
}

pub fn parse_network(text: &str) -> CliResult<(Network, Option<Value>)> {
    let f: NetworkFile =
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("network parse error: {e}")))?;
    let mut segs = Vec::with_capacity(f.segments.len());
    for (i, [a, b]) in f.segments.into_iter().enumerate() {
        if a.len() != f.dimension || b.len() != f.dimension {
            return Err(CliError::usage(format!(
                "field `segments[{i}]`: expected {} coordinates per endpoint",
                f.dimension
            )));
        }
        let seg = Segment::new(Point::new(a), Point::new(b))
            .map_err(|e| CliError::usage(format!("field `segments[{i}]`: {e}")))?;
        segs.push(seg);
    }
    let n = canonicalize(f.dimension, segs);
    if let Some(w) = f.weight {
        if w != n.weight() {
            return Err(CliError::usage(format!(
                "field `weight`: file says {w}, segments measure {}",
                n.weight()
            )));
        }
    }
    Ok((n, f.meta))
}

fn read_network(path: &Path) -> CliResult<Network> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_network(&text)
        .map(|(n, _)| n)
        .map_err(|e| CliError::usage(format!("{}: {}", path.display(), e.message)))
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Run one algorithm on a terminal set.
pub fn solve_terminals(terminals: &[Point], params: &SolveParams) -> CliResult<Network> {
    let d = terminals.first().map_or(0, Point::dim);
    if terminals.is_empty() {
        return Ok(Network::empty(d.max(1)));
    }
    let net = match params.algo {
        Algo::Grid => {
            let opts = GridOptions { epsilon: params.epsilon, level: params.level, budget: params.budget, ..Default::default() };
            solve_mmn(terminals, &opts)?.network
        }
        Algo::Kplanes => {
            if d != 3 {
                return Err(CliError::usage(format!("kplanes needs 3D terminals, got dimension {d}")));
            }
            let layering = PlanarLayering::new(terminals, None)?;
            if layering.k() < 2 {
                return Err(CliError::usage("kplanes needs terminals on at least 2 planes, found 1"));
            }
            solve_kplanes(&layering)?.network
        }
        Algo::Oracle => exact_mmn(terminals, params.budget)?,
        Algo::Mmn2d => {
            if d != 2 {
                return Err(CliError::usage(format!("mmn2d needs 2D terminals, got dimension {d}")));
            }
            approx_mmn2d(terminals)?
        }
    };
    Ok(net)
}

/// Options of the `solve` command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub params: SolveParams,
    pub verify: bool,
}

fn report_json(r: &Report) -> Value {
    json!({
        "checked": r.checked,
        "feasible": r.is_feasible(),
        "unconnected": r.unconnected,
    })
}

pub fn run_solve(cfg: &RunConfig) -> CliResult<i32> {
    if !(cfg.params.epsilon > 0.0 && cfg.params.epsilon <= 1.0) {
        return Err(CliError::usage(format!("--epsilon {} not in (0, 1]", cfg.params.epsilon)));
    }
    if cfg.params.level == 0 {
        return Err(CliError::usage("--level must be positive"));
    }
    let inst = Instance::read(&cfg.input)?;
    let net = solve_terminals(&inst.terminals, &cfg.params)?;
    let p = &cfg.params;
    let mut meta = json!({
        "algorithm": p.algo.name(),
        "params": { "epsilon": p.epsilon, "level": p.level, "seed": p.seed, "budget": p.budget },
    });
    let mut code = EXIT_OK;
    if cfg.verify {
        let report = verify_mmn(&net, &inst.terminals, None);
        if !report.is_feasible() {
            code = EXIT_INFEASIBLE;
        }
        meta["feasible"] = json!(report.is_feasible());
        meta["report"] = report_json(&report);
    }
    write_out(cfg.output.as_deref(), &network_to_json(&net, &meta))?;
    Ok(code)
}

pub fn run_verify(instance: &Path, network: &Path) -> CliResult<i32> {
    let inst = Instance::read(instance)?;
    let net = read_network(network)?;
    if net.dim() != inst.dimension && !net.is_empty() {
        return Err(CliError::usage(format!(
            "dimension mismatch: instance {}, network {}",
            inst.dimension,
            net.dim()
        )));
    }
    let report = verify_mmn(&net, &inst.terminals, None);
    println!("{}", serde_json::to_string_pretty(&report_json(&report)).unwrap());
    Ok(if report.is_feasible() { EXIT_OK } else { EXIT_INFEASIBLE })
}

/// Largest instance the comparison table hands to the oracle.
pub fn oracle_size_limit(d: usize) -> usize {
    match d {
        0..=2 => 10,
        3 => 6,
        _ => 4,
    }
}

/// One cell of the comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub instance: String,
    pub algo: Algo,
    pub n: usize,
    pub d: usize,
    /// Weight, or the failure that prevented a result.
    pub weight: std::result::Result<Coord, String>,
    pub lower_bound: Coord,
    pub opt: Option<Coord>,
    pub ms: u128,
}

impl CompareRow {
    pub fn lb_ratio(&self) -> Option<f64> {
        let w = *self.weight.as_ref().ok()?;
        Some(if self.lower_bound == 0 { 1.0 } else { w as f64 / self.lower_bound as f64 })
    }

    pub fn opt_ratio(&self) -> Option<f64> {
        let w = *self.weight.as_ref().ok()?;
        let o = self.opt?;
        Some(if o == 0 { 1.0 } else { w as f64 / o as f64 })
    }
}

fn failure_label(e: &CliError) -> String {
    match e.code {
        EXIT_INCONCLUSIVE => "inconclusive".into(),
        EXIT_USAGE => "invalid".into(),
        _ => "error".into(),
    }
}

/// Solve every instance with every algorithm. The oracle runs once per
/// instance (when small enough) and supplies the optimum column.
pub fn compare(instances: &[(String, Vec<Point>)], algos: &[Algo], params: &SolveParams) -> Vec<CompareRow> {
    let mut rows: Vec<CompareRow> = instances
        .par_iter()
        .flat_map(|(name, terms)| {
            let d = terms.first().map_or(0, Point::dim);
            let n = terms.len();
            let lb = lower_bound(terms);
            let small = n <= oracle_size_limit(d);
            let oracle = |start: Instant| {
                let r = if small {
                    solve_terminals(terms, &SolveParams { algo: Algo::Oracle, ..params.clone() })
                } else {
                    Err(CliError::usage("skipped"))
                };
                (r, start.elapsed().as_millis())
            };
            let needs_oracle = small;
            let (opt_res, opt_ms) = if needs_oracle { oracle(Instant::now()) } else { (Err(CliError::usage("skipped")), 0) };
            let opt = opt_res.as_ref().ok().map(Network::weight);
            algos
                .iter()
                .map(|&algo| {
                    let (res, ms) = if algo == Algo::Oracle {
                        (opt_res.clone(), opt_ms)
                    } else {
                        let start = Instant::now();
                        let r = solve_terminals(terms, &SolveParams { algo, ..params.clone() });
                        (r, start.elapsed().as_millis())
                    };
                    let weight = match res {
                        Ok(net) => Ok(net.weight()),
                        Err(e) if e.message == "skipped" => Err("skipped".to_string()),
                        Err(e) => Err(failure_label(&e)),
                    };
                    CompareRow { instance: name.clone(), algo, n, d, weight, lower_bound: lb, opt, ms }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    rows.sort_by(|a, b| (&a.instance, a.algo).cmp(&(&b.instance, b.algo)));
    rows
}

pub const CSV_HEADER: &str = "instance,algo,n,d,weight,lower_bound,lb_ratio,opt_ratio,ms";

fn ratio(r: Option<f64>) -> String {
    r.map_or(String::new(), |v| format!("{v:.4}"))
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let weight = match &r.weight {
            Ok(w) => w.to_string(),
            Err(e) => e.clone(),
        };
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.instance,
            r.algo.name(),
            r.n,
            r.d,
            weight,
            r.lower_bound,
            ratio(r.lb_ratio()),
            ratio(r.opt_ratio()),
            r.ms
        )
        .unwrap();
    }
    s
}

/// Weight against n per algorithm, for external plotting.
pub fn plot_csv(rows: &[CompareRow]) -> String {
    let mut ok: Vec<&CompareRow> = rows.iter().filter(|r| r.weight.is_ok()).collect();
    ok.sort_by(|a, b| (a.algo, a.d, a.n, &a.instance).cmp(&(b.algo, b.d, b.n, &b.instance)));
    let mut s = String::from("algo,d,n,instance,weight,lb_ratio\n");
    for r in ok {
        writeln!(s, "{},{},{},{},{},{}", r.algo.name(), r.d, r.n, r.instance, r.weight.as_ref().unwrap(), ratio(r.lb_ratio())).unwrap();
    }
    s
}

/// Fixed regression set: random instances in 3D and 4D.
pub fn standard_instances() -> Vec<(String, Vec<Point>)> {
    let mut out = Vec::new();
    for (n, d) in [(6, 3), (10, 3), (16, 3), (24, 3), (32, 3), (8, 4), (12, 4)] {
        for seed in 0..3u64 {
            let g = gen_random(n, d, seed, 4 * n).expect("valid parameters");
            out.push((format!("std-d{d}-n{n:02}-s{seed}"), g.terminals));
        }
    }
    out
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn run_gen(
    family: Family,
    n: usize,
    d: usize,
    k: usize,
    seed: u64,
    range: Option<usize>,
    out: Option<&Path>,
    companion: Option<&Path>,
) -> CliResult<i32> {
    let g = match family {
        Family::Random => gen_random(n, d, seed, range.unwrap_or(4 * n))?,
        Family::Kplanes => gen_kplanes(n, k, seed)?,
        Family::GeneratingSet => gen_generating_set_instance(n)?,
    };
    write_out(out, &Instance::from_generated(&g).to_json())?;
    if let (Some(path), Some(net)) = (companion, &g.network) {
        let meta = json!({ "algorithm": "companion", "family": g.family });
        write_out(Some(path), &network_to_json(net, &meta))?;
    }
    Ok(EXIT_OK)
}

fn run_stats(instance: &Path, network: Option<&Path>) -> CliResult<i32> {
    let inst = Instance::read(instance)?;
    let t = &inst.terminals;
    let d = inst.dimension;
    let bbox: Vec<[Coord; 2]> = (0..d)
        .map(|a| {
            let it = t.iter().map(|p| p.coord(a));
            [it.clone().min().unwrap_or(0), it.max().unwrap_or(0)]
        })
        .collect();
    let planes = t.iter().map(|p| p.coord(d - 1)).collect::<std::collections::BTreeSet<_>>().len();
    let lb = lower_bound(t);
    let mut out = json!({
        "n": t.len(),
        "dimension": d,
        "bbox": bbox,
        "planes": planes,
        "lower_bound": lb,
    });
    if let Some(path) = network {
        let net = read_network(path)?;
        out["weight"] = json!(net.weight());
        out["segments"] = json!(net.len());
        out["lb_ratio"] = json!(if lb == 0 { 1.0 } else { net.weight() as f64 / lb as f64 });
    }
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(EXIT_OK)
}

pub fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Gen { family, n, d, k, seed, range, out, companion } => {
            run_gen(family, n, d, k, seed, range, out.as_deref(), companion.as_deref())
        }
        Command::Solve { input, params, out, verify } => {
            run_solve(&RunConfig { input, output: out, params, verify })
        }
        Command::Verify { instance, network } => run_verify(&instance, &network),
        Command::Compare { instances, algos, standard, params, out, plot } => {
            let mut set = Vec::new();
            for p in &instances {
                set.push((file_stem(p), Instance::read(p)?.terminals));
            }
            if standard {
                set.extend(standard_instances());
            }
            let rows = compare(&set, &algos, &params);
            write_out(out.as_deref(), &compare_csv(&rows))?;
            if let Some(p) = plot {
                write_out(Some(&p), &plot_csv(&rows))?;
            }
            Ok(EXIT_OK)
        }
        Command::Stats { instance, network } => run_stats(&instance, network.as_deref()),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip_is_byte_identical() {
        for g in [
            gen_random(5, 3, 7, 20).unwrap(),
            gen_kplanes(6, 3, 1).unwrap(),
            gen_generating_set_instance(6).unwrap(),
        ] {
            let text = Instance::from_generated(&g).to_json();
            assert_eq!(Instance::parse(&text).unwrap().to_json(), text);
        }
        let bare = "{\n  \"dimension\": 2,\n  \"terminals\": [\n    [0, 1],\n    [-3, 4]\n  ]\n}\n";
        assert_eq!(Instance::parse(bare).unwrap().to_json(), bare);
    }

    #[test]
    fn malformed_instances_name_the_problem() {
        let e = Instance::parse("{\"dimension\": 2, \"terminals\": [[0, 1], [2]]}").unwrap_err();
        assert_eq!(e.code, EXIT_USAGE);
        assert!(e.message.contains("terminals[1]"));
        let e = Instance::parse("{\"dimension\": 2,\n \"terminals\": [[0, 1.5]]}").unwrap_err();
        assert!(e.message.contains("line 2"));
    }

    #[test]
    fn network_round_trip() {
        let t = gen_random(6, 3, 2, 24).unwrap().terminals;
        let net = solve_terminals(&t, &SolveParams::default()).unwrap();
        let text = network_to_json(&net, &json!({"algorithm": "grid"}));
        let (back, meta) = parse_network(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(meta.unwrap()["algorithm"], "grid");
        let (empty, _) = parse_network(&network_to_json(&Network::empty(3), &json!({}))).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn kplanes_rejects_single_plane() {
        let t = vec![Point::new(vec![0, 0, 1]), Point::new(vec![2, 3, 1])];
        let e = solve_terminals(&t, &SolveParams { algo: Algo::Kplanes, ..Default::default() }).unwrap_err();
        assert_eq!(e.code, EXIT_USAGE);
    }

    #[test]
    fn compare_on_two_terminals() {
        let set = vec![("pair".to_string(), vec![Point::new(vec![0, 0, 0]), Point::new(vec![1, 2, 3])])];
        let rows = compare(&set, &[Algo::Grid, Algo::Kplanes, Algo::Oracle], &SolveParams::default());
        let csv = compare_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        let oracle = rows.iter().find(|r| r.algo == Algo::Oracle).unwrap();
        assert_eq!(oracle.opt_ratio(), Some(1.0));
        for r in &rows {
            if let Some(q) = r.opt_ratio() {
                assert!(q >= 1.0);
            }
        }
    }
}
