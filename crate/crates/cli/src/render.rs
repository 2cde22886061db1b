use iterfrac::itlog::Multiplier;
use iterfrac::scalar::Scalar;
use iterfrac::triangle::CoeffTriangle;

use crate::MethodReport;

/// Left-aligned columns separated by two spaces; ragged rows are fine.
pub fn columns(rows: &[Vec<String>]) -> String {
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
                .collect();
            cells.join("  ").trim_end().to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn triangle(t: &CoeffTriangle) -> String {
    let mut rows = vec![std::iter::once("n\\k".to_string())
        .chain((0..=t.size()).map(|k| k.to_string()))
        .collect::<Vec<_>>()];
    for (n, row) in t.rows().iter().enumerate() {
        rows.push(std::iter::once(n.to_string()).chain(row.iter().map(Scalar::to_string)).collect());
    }
    columns(&rows)
}

pub fn cross_check(methods: &[MethodReport], worst: f64, tol: f64) -> String {
    let mut rows = vec![vec!["method".to_string(), "status".into(), "max rel dev".into()]];
    for m in methods {
        let detail = match (&m.error, m.max_rel_dev) {
            (Some(e), _) => e.clone(),
            (None, Some(d)) => format!("{d:.3e}"),
            (None, None) => "-".into(),
        };
        rows.push(vec![m.method.to_string(), m.status.to_string(), detail]);
    }
    format!("{}\nmax discrepancy {worst:.3e} (tolerance {tol:.1e})", columns(&rows))
}

pub fn itlog(multiplier: &Multiplier, body: &[Scalar], ordinary: &[Scalar]) -> String {
    let mut rows = vec![vec!["n".to_string(), "e_n".into(), "e_n/n!".into()]];
    for (i, (e, c)) in body.iter().zip(ordinary).enumerate() {
        rows.push(vec![(i + 1).to_string(), e.to_string(), c.to_string()]);
    }
    format!("multiplier {multiplier}\n{}", columns(&rows))
}
