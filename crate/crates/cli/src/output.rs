//! Report serialization and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::run::{Item, Report};
use crate::{CliError, Format};

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn header_and_row(item: &Item) -> (Vec<&'static str>, Vec<String>) {
    match item {
        Item::Classify(d) => {
            let i = &d.instance;
            let th = d.product_thresholds.as_ref();
            let st = d.sum_thresholds.as_ref();
            (
                vec![
                    "kind",
                    "N",
                    "p",
                    "q",
                    "s",
                    "m",
                    "M",
                    "theorem",
                    "liouville",
                    "estimate_exponent",
                    "R",
                    "Q",
                    "Q1",
                    "Q2",
                    "Q3",
                    "a",
                    "delta_pq",
                    "S_minus",
                    "S_plus",
                    "m_max",
                ],
                vec![
                    i.kind.as_str().into(),
                    i.n.to_string(),
                    num(i.p),
                    num(i.q),
                    num(i.s),
                    num(i.m),
                    num(i.big_m),
                    d.theorem.as_str().into(),
                    d.liouville.to_string(),
                    opt(d.estimate_exponent),
                    opt(th.map(|t| t.r)),
                    opt(th.map(|t| t.q_cal)),
                    opt(th.and_then(|t| t.q1)),
                    opt(th.and_then(|t| t.q2)),
                    opt(th.and_then(|t| t.q3().ok())),
                    opt(th.and_then(|t| t.a)),
                    opt(st.map(|t| t.delta_pq)),
                    opt(st.and_then(|t| t.s_minus)),
                    opt(st.and_then(|t| t.s_plus)),
                    opt(st.map(|t| t.m_max)),
                ],
            )
        }
        Item::SearchB(s) => {
            let i = &s.instance;
            let sel = &s.selection;
            let o = s.oracle.as_ref();
            (
                vec![
                    "kind",
                    "N",
                    "p",
                    "q",
                    "s",
                    "m",
                    "M",
                    "case",
                    "feasible",
                    "t_star",
                    "b_star",
                    "kappa",
                    "L1",
                    "L2",
                    "L3",
                    "oracle_t_min",
                    "oracle_min",
                    "confirmed",
                    "failing_check",
                ],
                vec![
                    i.kind.as_str().into(),
                    i.n.to_string(),
                    num(i.p),
                    num(i.q),
                    num(i.s),
                    num(i.m),
                    num(i.big_m),
                    sel.case_tag.as_str().into(),
                    sel.is_feasible().to_string(),
                    opt(sel.t_star),
                    opt(sel.b_star),
                    opt(sel.kappa),
                    opt(sel.coeffs.map(|c| c.l1)),
                    opt(sel.coeffs.map(|c| c.l2)),
                    opt(sel.coeffs.map(|c| c.l3)),
                    opt(o.map(|o| o.t_min)),
                    opt(o.map(|o| o.value_min)),
                    o.and_then(|o| o.confirmed).map(|b| b.to_string()).unwrap_or_default(),
                    sel.failing_check().unwrap_or_default().to_string(),
                ],
            )
        }
        Item::IlWindow(w) => (
            vec!["q", "m", "feasible", "gamma_lo", "gamma_hi"],
            vec![
                num(w.q),
                num(w.m),
                w.window.feasible.to_string(),
                opt(w.window.gamma_lo),
                num(w.window.gamma_hi),
            ],
        ),
        Item::Identity(r) => (
            vec![
                "name",
                "max_abs_error",
                "rel_error",
                "observed_order",
                "passed",
                "tolerance_used",
                "spacing",
                "nodes",
                "excluded_nodes",
                "min_slack",
            ],
            vec![
                r.name.clone(),
                num(r.max_abs_error),
                num(r.rel_error),
                opt(r.observed_order),
                r.passed.to_string(),
                num(r.tolerance_used),
                num(r.spacing),
                r.nodes.to_string(),
                r.excluded_nodes.to_string(),
                opt(r.min_slack),
            ],
        ),
        Item::SolveRadial(r) => {
            let i = &r.instance;
            (
                vec![
                    "kind",
                    "N",
                    "p",
                    "q",
                    "s",
                    "m",
                    "M",
                    "mesh",
                    "u0",
                    "u1",
                    "scheme",
                    "converged",
                    "residual_norm",
                    "certificate",
                    "newton_iters",
                    "continuation_steps",
                    "data_fraction",
                    "theorem",
                    "predicted_rate",
                    "fitted_exponent",
                    "fitted_C",
                    "r_squared",
                    "bound_constant",
                ],
                vec![
                    i.kind.as_str().into(),
                    i.n.to_string(),
                    num(i.p),
                    num(i.q),
                    num(i.s),
                    num(i.m),
                    num(i.big_m),
                    r.mesh.to_string(),
                    num(r.u0),
                    num(r.u1),
                    format!("{:?}", r.scheme).to_lowercase(),
                    r.converged.to_string(),
                    num(r.residual_norm),
                    num(r.certificate),
                    r.newton_iters.to_string(),
                    r.continuation_steps.to_string(),
                    num(r.data_fraction),
                    r.theorem.as_str().into(),
                    opt(r.predicted_rate),
                    opt(r.fit.map(|f| f.fitted_exponent)),
                    opt(r.fit.map(|f| f.fitted_c)),
                    opt(r.fit.map(|f| f.r_squared)),
                    opt(r.estimate.as_ref().and_then(|e| e.bound_constant)),
                ],
            )
        }
        Item::Failed(_) => (vec![], vec![]),
    }
}

fn csv(report: &Report) -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str(&format!("# schema: {}\n", report.schema));
    out.push_str(&format!("# tool_version: {}\n", report.tool_version));
    let echo = serde_json::to_string(&report.config_echo).map_err(|e| CliError::Usage(e.to_string()))?;
    out.push_str(&format!("# config: {echo}\n"));
    out.push_str(&format!("# command: {}\n", report.results.command));

    let header = report
        .results
        .items
        .iter()
        .map(|it| header_and_row(it).0)
        .find(|h| !h.is_empty())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    let mut cols = vec!["index"];
    cols.extend(&header);
    if report.timing.is_some() {
        cols.push("ms");
    }
    cols.push("error");
    w.write_record(&cols).map_err(io)?;
    for (i, item) in report.results.items.iter().enumerate() {
        let mut row = vec![i.to_string()];
        match item {
            Item::Failed(f) => {
                row.extend(std::iter::repeat_n(String::new(), header.len()));
                if let Some(t) = &report.timing {
                    row.push(num(t[i]));
                }
                row.push(f.error.clone());
            }
            _ => {
                row.extend(header_and_row(item).1);
                if let Some(t) = &report.timing {
                    row.push(num(t[i]));
                }
                row.push(String::new());
            }
        }
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    out.push_str(&String::from_utf8(bytes).expect("csv is utf-8"));
    Ok(out)
}

/// Report text in the requested format.
pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Usage(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => csv(report),
    }
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("--out `{}` is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(CliError::from)
}
