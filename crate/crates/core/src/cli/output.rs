//! Text renderings of results: CSV, plot columns and the run manifest.

use std::fmt::Write as _;

use super::run::{PlotGroup, Row};

pub const CSV_HEADER: &str =
    "experiment_id,kind,alpha,beta,gamma,boundary_kind,T,n_paths,survivors,p_hat,ln_p,ci_low,ci_high,seed";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn results_csv(rows: &[Row]) -> String {
    let mut s = String::with_capacity(64 + rows.len() * 200);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.experiment_id,
            r.kind,
            num(r.alpha),
            num(r.beta),
            num(r.gamma),
            r.boundary_kind,
            num(r.t),
            r.n_paths,
            r.survivors,
            num(r.p_hat),
            num(r.ln_p),
            num(r.ci_low),
            num(r.ci_high),
            r.seed
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptyResults;

impl std::fmt::Display for EmptyResults {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("no survival results to emit as plot data")
    }
}

impl std::error::Error for EmptyResults {}

/// Tab-separated columns `lnT, lnp, ci_low, ci_high, flag` per group, the
/// group label in brackets on every column name. `flag` is `censored` for
/// points without survivors (where `lnp` is `-inf`).
pub fn emit_plot_data(groups: &[PlotGroup]) -> Result<String, EmptyResults> {
    if groups.is_empty() || groups.iter().all(|g| g.points.is_empty()) {
        return Err(EmptyResults);
    }
    let mut s = String::new();
    let header: Vec<String> = groups
        .iter()
        .flat_map(|g| ["lnT", "lnp", "ci_low", "ci_high", "flag"].map(|c| format!("{c}[{}]", g.label)))
        .collect();
    s.push_str(&header.join("\t"));
    s.push('\n');
    let rows = groups.iter().map(|g| g.points.len()).max().unwrap_or(0);
    for i in 0..rows {
        let cells: Vec<String> = groups
            .iter()
            .flat_map(|g| match g.points.get(i) {
                Some(e) => [
                    num(e.t.ln()),
                    num(e.p_hat.ln()),
                    num(e.log_ci.0),
                    num(e.log_ci.1),
                    if e.censored() { "censored" } else { "ok" }.to_string(),
                ],
                None => Default::default(),
            })
            .collect();
        s.push_str(&cells.join("\t"));
        s.push('\n');
    }
    Ok(s)
}

/// The resolved configuration preceded by provenance comments and followed
/// by the run's findings as comments, so the file parses back as a config.
pub fn manifest(config_text: &str, wall_seconds: f64, summary: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# levy-passage {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# wall_time_seconds = {wall_seconds:.3}");
    s.push_str(config_text);
    for line in summary {
        let _ = writeln!(s, "# result: {line}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::SurvivalEstimate;

    fn group(label: &str, counts: &[u64]) -> PlotGroup {
        PlotGroup {
            label: label.into(),
            points: counts
                .iter()
                .enumerate()
                .map(|(i, &k)| SurvivalEstimate::from_counts(2f64.powi(i as i32 + 4), k, 100, 1))
                .collect(),
        }
    }

    #[test]
    fn plot_rows_and_groups() {
        let g = group("constant:level=1", &[50, 40, 30, 20, 10, 5, 2, 1]);
        let text = emit_plot_data(std::slice::from_ref(&g)).unwrap();
        assert_eq!(text.lines().count(), 9);
        let three = emit_plot_data(&[g.clone(), group("b", &[1, 0]), g]).unwrap();
        let header = three.lines().next().unwrap();
        assert_eq!(header.split('\t').count(), 15);
        assert!(header.contains("lnp[b]"));
        assert!(three.lines().nth(2).unwrap().contains("censored"));
        assert_eq!(emit_plot_data(&[]), Err(EmptyResults));
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.938313490600833, 1e-300, -2.5e10] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }
}
