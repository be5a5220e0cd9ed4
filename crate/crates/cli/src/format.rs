//! The instance-file and report formats.
//!
//! Instance files are line oriented: a header `n m k`, then `m` arc lines
//! `u v` (0-indexed, arc `u → v`). `#` starts a comment; blank lines are
//! ignored.
//!
//! Reports are line oriented too, so they can be re-checked byte-exactly by
//! any implementation: `key value` lines (`decision`, `instance`, `a`,
//! `gamma_q`, `threshold_q`, `witness`, `forward`, `time_ms`), a bare
//! `guaranteed_by_bound` flag, `trace <step>` lines carrying the rule-trace
//! serialization, and an optional kernel block (`kernel n m k` followed by
//! `kernel_arc u v` lines).

use asapt_core::reduce::{parse_step_line, ParsedStep, ReductionTrace};
use asapt_core::{GraphError, OrientedGraph, WitnessOrdering};
use std::fmt::Write as _;

#[derive(Debug)]
pub enum FormatError {
    Parse { line: usize, message: String },
    Graph(GraphError),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Parse { line, message } => write!(f, "line {line}: {message}"),
            FormatError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<GraphError> for FormatError {
    fn from(e: GraphError) -> Self {
        FormatError::Graph(e)
    }
}

#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub graph: OrientedGraph,
    pub k: i64,
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, FormatError> {
    let err = |line: usize, message: String| FormatError::Parse { line, message };
    let mut header: Option<(usize, usize, i64)> = None;
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 3 {
                    return Err(err(line_no, "expected header `n m k`".into()));
                }
                let n = fields[0]
                    .parse::<usize>()
                    .map_err(|_| err(line_no, format!("bad vertex count {:?}", fields[0])))?;
                let m = fields[1]
                    .parse::<usize>()
                    .map_err(|_| err(line_no, format!("bad arc count {:?}", fields[1])))?;
                let k = fields[2]
                    .parse::<i64>()
                    .map_err(|_| err(line_no, format!("bad parameter {:?}", fields[2])))?;
                header = Some((n, m, k));
            }
            Some(_) => {
                if fields.len() != 2 {
                    return Err(err(line_no, "expected arc line `u v`".into()));
                }
                let u = fields[0]
                    .parse::<usize>()
                    .map_err(|_| err(line_no, format!("bad vertex {:?}", fields[0])))?;
                let v = fields[1]
                    .parse::<usize>()
                    .map_err(|_| err(line_no, format!("bad vertex {:?}", fields[1])))?;
                arcs.push((u, v));
            }
        }
    }
    let (n, m, k) = header.ok_or_else(|| err(0, "missing header `n m k`".into()))?;
    if arcs.len() != m {
        return Err(err(
            0,
            format!("header promises {m} arcs but the file has {}", arcs.len()),
        ));
    }
    let graph = OrientedGraph::build(n, &arcs)?;
    Ok(InstanceFile { graph, k })
}

pub fn emit_instance(graph: &OrientedGraph, k: i64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", graph.n(), graph.m(), k);
    for &(u, v) in graph.arcs() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub decision: Option<bool>,
    /// `n m k` the producing command actually ran with.
    pub instance: Option<(usize, usize, i64)>,
    pub a_value: Option<usize>,
    pub gamma_q: Option<i64>,
    pub threshold_q: Option<i64>,
    pub witness: Option<Vec<usize>>,
    pub forward: Option<usize>,
    pub guaranteed_by_bound: bool,
    pub trace: Vec<ParsedStep>,
    pub kernel: Option<InstanceFile>,
    /// Size-report block accompanying a kernel: the bounds its vertex and
    /// arc counts are certified against.
    pub kernel_bounds: Option<(i64, i64)>,
    pub time_ms: Option<f64>,
}

impl Report {
    pub fn with_witness(mut self, w: &WitnessOrdering) -> Report {
        self.witness = Some(w.order.clone());
        self.forward = Some(w.forward_arcs);
        self
    }

    pub fn with_trace(mut self, trace: &ReductionTrace) -> Report {
        self.trace = trace
            .steps
            .iter()
            .map(|s| ParsedStep {
                rule: s.app.rule,
                removed: s.app.removed.clone(),
                added: s.app.added.clone(),
                k_delta: s.app.k_delta,
            })
            .collect();
        self
    }
}

pub fn emit_report(r: &Report) -> String {
    let mut out = String::new();
    if let Some(d) = r.decision {
        let _ = writeln!(out, "decision {}", if d { "YES" } else { "NO" });
    }
    if let Some((n, m, k)) = r.instance {
        let _ = writeln!(out, "instance {n} {m} {k}");
    }
    if let Some(a) = r.a_value {
        let _ = writeln!(out, "a {a}");
    }
    if let Some(q) = r.gamma_q {
        let _ = writeln!(out, "gamma_q {q}");
    }
    if let Some(q) = r.threshold_q {
        let _ = writeln!(out, "threshold_q {q}");
    }
    if let Some(w) = &r.witness {
        let ids: Vec<String> = w.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "witness {}", ids.join(" "));
    }
    if let Some(f) = r.forward {
        let _ = writeln!(out, "forward {f}");
    }
    if r.guaranteed_by_bound {
        let _ = writeln!(out, "guaranteed_by_bound");
    }
    for step in &r.trace {
        let _ = writeln!(out, "trace {}", step.to_line());
    }
    if let Some(kernel) = &r.kernel {
        let _ = writeln!(
            out,
            "kernel {} {} {}",
            kernel.graph.n(),
            kernel.graph.m(),
            kernel.k
        );
        for &(u, v) in kernel.graph.arcs() {
            let _ = writeln!(out, "kernel_arc {u} {v}");
        }
    }
    if let Some((vb, ab)) = r.kernel_bounds {
        let _ = writeln!(out, "kernel_vertex_bound {vb}");
        let _ = writeln!(out, "kernel_arc_bound {ab}");
    }
    if let Some(t) = r.time_ms {
        let _ = writeln!(out, "time_ms {t:.3}");
    }
    out
}

pub fn parse_report(text: &str) -> Result<Report, FormatError> {
    let err = |line: usize, message: String| FormatError::Parse { line, message };
    let mut r = Report::default();
    let mut kernel_header: Option<(usize, usize, i64)> = None;
    let mut kernel_arcs: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = match line.split_once(' ') {
            Some((k, v)) => (k, v.trim()),
            None => (line, ""),
        };
        let ints = |s: &str| -> Result<Vec<i64>, FormatError> {
            s.split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| err(line_no, format!("bad integer {t:?}")))
                })
                .collect()
        };
        match key {
            "decision" => {
                r.decision = Some(match rest {
                    "YES" => true,
                    "NO" => false,
                    other => return Err(err(line_no, format!("bad decision {other:?}"))),
                })
            }
            "instance" => {
                let v = ints(rest)?;
                if v.len() != 3 {
                    return Err(err(line_no, "instance expects `n m k`".into()));
                }
                r.instance = Some((v[0] as usize, v[1] as usize, v[2]));
            }
            "a" => r.a_value = Some(ints(rest)?[0] as usize),
            "gamma_q" => r.gamma_q = Some(ints(rest)?[0]),
            "threshold_q" => r.threshold_q = Some(ints(rest)?[0]),
            "witness" => r.witness = Some(ints(rest)?.into_iter().map(|v| v as usize).collect()),
            "forward" => r.forward = Some(ints(rest)?[0] as usize),
            "guaranteed_by_bound" => r.guaranteed_by_bound = true,
            "trace" => r
                .trace
                .push(parse_step_line(rest).map_err(|e| err(line_no, e.to_string()))?),
            "kernel" => {
                let v = ints(rest)?;
                if v.len() != 3 {
                    return Err(err(line_no, "kernel expects `n m k`".into()));
                }
                kernel_header = Some((v[0] as usize, v[1] as usize, v[2]));
            }
            "kernel_arc" => {
                let v = ints(rest)?;
                if v.len() != 2 {
                    return Err(err(line_no, "kernel_arc expects `u v`".into()));
                }
                kernel_arcs.push((v[0] as usize, v[1] as usize));
            }
            "kernel_vertex_bound" => {
                let vb = ints(rest)?[0];
                r.kernel_bounds = Some((vb, r.kernel_bounds.map(|(_, a)| a).unwrap_or(0)));
            }
            "kernel_arc_bound" => {
                let ab = ints(rest)?[0];
                r.kernel_bounds = Some((r.kernel_bounds.map(|(v, _)| v).unwrap_or(0), ab));
            }
            "time_ms" => {
                r.time_ms = Some(
                    rest.parse::<f64>()
                        .map_err(|_| err(line_no, format!("bad duration {rest:?}")))?,
                )
            }
            other => return Err(err(line_no, format!("unknown key {other:?}"))),
        }
    }
    if let Some((n, m, k)) = kernel_header {
        if kernel_arcs.len() != m {
            return Err(err(
                0,
                format!("kernel promises {m} arcs but carries {}", kernel_arcs.len()),
            ));
        }
        r.kernel = Some(InstanceFile {
            graph: OrientedGraph::build(n, &kernel_arcs)?,
            k,
        });
    }
    Ok(r)
}
