//! Consistency checking of a report against the instance it claims to
//! describe: the witness is recounted, the threshold re-derived, the rule
//! trace replayed with every precondition and `k` delta re-validated, and
//! the kernel block compared against the replayed graph.

use crate::format::{InstanceFile, Report};
use asapt_core::reduce::Replayer;
use asapt_core::{count_forward, gamma, threshold_q};

/// Returns the list of inconsistencies; empty means the report checks out.
pub fn check(instance: &InstanceFile, report: &Report) -> Vec<String> {
    let mut problems = Vec::new();
    let g = &instance.graph;
    // The report records the k it ran with (a --k override may differ from
    // the file header).
    let k = report.instance.map(|(_, _, k)| k).unwrap_or(instance.k);

    if let Some((n, m, _)) = report.instance {
        if n != g.n() || m != g.m() {
            problems.push(format!(
                "report claims an instance with n={n}, m={m}; the file has n={}, m={}",
                g.n(),
                g.m()
            ));
        }
    }
    if let Some(q) = report.gamma_q {
        let actual = gamma(g).0;
        if q != actual {
            problems.push(format!("gamma_q {q} should be {actual}"));
        }
    }
    if let Some(q) = report.threshold_q {
        let actual = threshold_q(g, k);
        if q != actual {
            problems.push(format!("threshold_q {q} should be {actual}"));
        }
    }

    let mut recounted = None;
    match (&report.witness, report.forward) {
        (Some(order), Some(forward)) => match count_forward(g, order) {
            Ok(f) => {
                recounted = Some(f);
                if f != forward {
                    problems.push(format!(
                        "witness realizes {f} forward arcs, report claims {forward}"
                    ));
                }
            }
            Err(e) => problems.push(format!("witness is invalid: {e}")),
        },
        (Some(_), None) => problems.push("witness without a forward count".into()),
        (None, Some(_)) => problems.push("forward count without a witness".into()),
        (None, None) => {}
    }

    if let (Some(a), Some(f)) = (report.a_value, recounted) {
        if a != f {
            problems.push(format!(
                "exact value {a} disagrees with the witness's {f} forward arcs"
            ));
        }
    }
    if let (Some(decision), Some(a)) = (report.decision, report.a_value) {
        let implied = 4 * a as i64 >= threshold_q(g, k);
        if decision != implied {
            problems.push(format!(
                "decision {} contradicts a = {a} against the threshold",
                if decision { "YES" } else { "NO" }
            ));
        }
    }
    if report.decision == Some(true) && !report.guaranteed_by_bound {
        match recounted {
            Some(f) => {
                if (4 * f as i64) < threshold_q(g, k) {
                    problems.push(format!(
                        "yes-decision but the witness's {f} forward arcs miss the threshold"
                    ));
                }
            }
            None => problems.push(
                "yes-decision carries neither a witness nor the guaranteed_by_bound flag".into(),
            ),
        }
    }

    // Replay the trace, re-validating every step.
    let mut replayer = Replayer::new(g, k);
    let mut replay_ok = true;
    for (i, step) in report.trace.iter().enumerate() {
        if let Err(e) = replayer.apply(step) {
            problems.push(format!("trace step {} rejected: {e}", i + 1));
            replay_ok = false;
            break;
        }
    }
    if replay_ok {
        if report.decision == Some(true) && report.guaranteed_by_bound && replayer.k > 0 {
            problems.push(format!(
                "yes-by-bound report but the trace only brings k down to {}",
                replayer.k
            ));
        }
        if let Some(kernel) = &report.kernel {
            if replayer.graph != kernel.graph {
                problems.push("kernel block differs from the replayed graph".into());
            }
            if kernel.k != replayer.k {
                problems.push(format!(
                    "kernel block claims k = {}, replay gives {}",
                    kernel.k, replayer.k
                ));
            }
            if let Some((vb, ab)) = report.kernel_bounds {
                let quad = 12 * kernel.k * kernel.k + 2 * kernel.k;
                let (evb, eab) = (20 * quad + 3 * kernel.k, 9 * kernel.k * kernel.k + 60 * quad);
                if (vb, ab) != (evb, eab) {
                    problems.push(format!(
                        "kernel size bounds {vb}/{ab} should be {evb}/{eab} at k = {}",
                        kernel.k
                    ));
                }
                if (kernel.graph.n() as i64) > vb || (kernel.graph.m() as i64) > ab {
                    problems.push(format!(
                        "kernel has {} vertices / {} arcs, exceeding its certified bounds",
                        kernel.graph.n(),
                        kernel.graph.m()
                    ));
                }
            }
        }
    }
    problems
}
