//! Plot-ready CSV series extracted from a stored report.

use std::fmt::Write;

use crate::run::{Item, Report};
use crate::CliError;

pub const SELECTORS: &[&str] = &["gradient_profile", "solution", "trinomial", "il_window"];

type Rows = Vec<Vec<f64>>;

fn series(item: &Item, selector: &str) -> Option<(&'static [&'static str], Rows)> {
    match (selector, item) {
        ("gradient_profile", Item::SolveRadial(r)) => {
            let mut rows: Rows = r.gradient_profile.iter().map(|&(d, g)| vec![d, g]).collect();
            rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
            Some((&["d", "abs_du"], rows))
        }
        ("solution", Item::SolveRadial(r)) => Some((
            &["r", "u"],
            r.solution
                .r
                .iter()
                .zip(&r.solution.u)
                .map(|(&r, &u)| vec![r, u])
                .collect(),
        )),
        ("trinomial", Item::SearchB(s)) => {
            let (c, o) = (s.selection.coeffs?, s.oracle?);
            let n = o.grid_points.max(2);
            let step = o.t_max / (n - 1) as f64;
            Some((
                &["t", "L"],
                (0..n).map(|i| i as f64 * step).map(|t| vec![t, c.value(t)]).collect(),
            ))
        }
        ("il_window", Item::IlWindow(w)) => Some((
            &["gamma", "alpha_lo", "alpha_hi"],
            w.window
                .alpha_bounds
                .iter()
                .map(|a| vec![a.gamma, a.alpha_lo, a.alpha_hi])
                .collect(),
        )),
        _ => None,
    }
}

/// CSV for one selector. Columns are listed in a leading `#` line; an
/// `item` column is prepended when several items carry the series.
pub fn render_plot_data(report: &Report, selector: &str) -> Result<String, CliError> {
    if !SELECTORS.contains(&selector) {
        return Err(CliError::Usage(format!(
            "unknown selector `{selector}` (known: {})",
            SELECTORS.join(", ")
        )));
    }
    let found: Vec<(usize, &'static [&'static str], Rows)> = report
        .results
        .items
        .iter()
        .enumerate()
        .filter_map(|(i, it)| series(it, selector).map(|(cols, rows)| (i, cols, rows)))
        .collect();
    let Some(&(_, cols, _)) = found.first() else {
        return Err(CliError::Usage(format!(
            "a {} report has no `{selector}` series",
            report.results.command
        )));
    };
    let tagged = found.len() > 1;
    let mut out = String::from("# columns: ");
    if tagged {
        out.push_str("item,");
    }
    out.push_str(&cols.join(","));
    out.push('\n');
    for (i, _, rows) in &found {
        for row in rows {
            if tagged {
                write!(out, "{i},").unwrap();
            }
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    }
    Ok(out)
}
