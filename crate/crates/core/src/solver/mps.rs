//! Fixed-format MPS export.
//!
//! Columns are named `C` followed by the zero-padded 7-digit column index,
//! rows `R` plus the 7-digit row index, the objective row is `COST`, the
//! right-hand-side set `RHS` and the bound set `BND`. Entries are written
//! one per line in column order, then row order, so the output depends only
//! on the problem. When requested, the symbolic column and row names are
//! listed in `*` comment lines ahead of the `NAME` card.

use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::{MilpProblem, Relation};

pub fn column_name(j: usize) -> String {
    format!("C{j:07}")
}

pub fn row_name(i: usize) -> String {
    format!("R{i:07}")
}

/// Most accurate representation of `v` that fits the 12-character numeric field.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return String::from("0");
    }
    let exact = format!("{v:?}");
    let exact = exact.strip_suffix(".0").map(String::from).unwrap_or(exact);
    if exact.len() <= 12 {
        return exact;
    }
    let fixed = (0..=11usize).map(|d| {
        let s = format!("{v:.d$}");
        if s.contains('.') {
            String::from(s.trim_end_matches('0').trim_end_matches('.'))
        } else {
            s
        }
    });
    let sci = (0..=11usize).map(|d| format!("{v:.d$e}"));
    fixed
        .chain(sci)
        .filter(|s| s.len() <= 12)
        .filter_map(|s| s.parse::<f64>().ok().map(|p| ((p - v).abs(), s)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.len().cmp(&b.1.len())))
        .map(|(_, s)| s)
        .unwrap_or_else(|| format!("{v:.0e}"))
}

fn entry(out: &mut String, f1: &str, f2: &str, f3: &str, value: f64) {
    let _ = writeln!(out, " {f1:<2} {f2:<8}  {f3:<8}  {}", format_number(value));
}

/// Render `p` as fixed-format MPS.
pub fn write_mps(p: &MilpProblem, name: &str, with_name_map: bool) -> String {
    let mut out = String::new();
    if with_name_map {
        for (j, n) in p.col_names.iter().enumerate() {
            let _ = writeln!(out, "* {} {n}", column_name(j));
        }
        for (i, n) in p.row_names.iter().enumerate() {
            let _ = writeln!(out, "* {} {n}", row_name(i));
        }
    }
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("ROWS\n N  COST\n");
    for (i, c) in p.constraints.iter().enumerate() {
        let kind = match c.relation {
            Relation::Le => 'L',
            Relation::Ge => 'G',
            Relation::Eq => 'E',
        };
        let _ = writeln!(out, " {kind}  {}", row_name(i));
    }

    // Column-major view of the rows.
    let n = p.num_cols();
    let mut by_col: alloc::vec::Vec<alloc::vec::Vec<(usize, f64)>> = alloc::vec![alloc::vec::Vec::new(); n];
    for (i, c) in p.constraints.iter().enumerate() {
        for &(j, a) in &c.terms {
            by_col[j].push((i, a));
        }
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    for j in 0..n {
        if p.integral[j] != in_int {
            let tag = if p.integral[j] { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    MARKER    'MARKER'                 {tag}");
            in_int = p.integral[j];
        }
        let cname = column_name(j);
        let obj = p.objective[j];
        if obj != 0.0 || by_col[j].is_empty() {
            entry(&mut out, "", &cname, "COST", obj);
        }
        for &(i, a) in &by_col[j] {
            entry(&mut out, "", &cname, &row_name(i), a);
        }
    }
    if in_int {
        let _ = writeln!(out, "    MARKER    'MARKER'                 'INTEND'");
    }

    out.push_str("RHS\n");
    for (i, c) in p.constraints.iter().enumerate() {
        if c.rhs != 0.0 {
            entry(&mut out, "", "RHS", &row_name(i), c.rhs);
        }
    }

    out.push_str("BOUNDS\n");
    for j in 0..n {
        let (l, u) = (p.lower[j], p.upper[j]);
        let cname = column_name(j);
        let bound = |out: &mut String, kind: &str, v: f64| entry(out, kind, "BND", &cname, v);
        if l == u {
            bound(&mut out, "FX", l);
            continue;
        }
        match (l.is_finite(), u.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " FR BND       {cname}");
            }
            (false, true) => {
                let _ = writeln!(out, " MI BND       {cname}");
                bound(&mut out, "UP", u);
            }
            (true, _) => {
                if l != 0.0 {
                    bound(&mut out, "LO", l);
                }
                if u.is_finite() {
                    bound(&mut out, "UP", u);
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}
