//! Ladder tables as CSV and a small SVG line plot.
//!
//! Output bytes depend only on the rows, so equal inputs give identical
//! files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::cheeger::VerdictRecord;
use crate::diagram::Rational;
use crate::format::format_rational;

pub const CSV_HEADER: &str = "family,q,N,dim,h_upper,h_exact,lambda,certified_lower";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to report")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderRow {
    pub family: String,
    pub q: u32,
    pub n: u32,
    pub dim: usize,
    pub h_upper: Rational,
    pub h_exact: Option<Rational>,
    pub lambda: f64,
    pub certified_lower: Option<Rational>,
}

pub fn rows_from_verdict(rec: &VerdictRecord) -> Vec<LadderRow> {
    rec.entries
        .iter()
        .map(|e| LadderRow {
            family: rec.family.clone(),
            q: rec.q,
            n: e.n,
            dim: e.dimension,
            h_upper: e.h_upper.clone(),
            h_exact: e.h_exact.clone(),
            lambda: e.lambda,
            certified_lower: e.certified_lower.clone(),
        })
        .collect()
}

/// `x` rounded to `sig` significant digits, written as a plain decimal with
/// trailing zeros dropped.
pub fn format_significant(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", sig.saturating_sub(1), x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let point = exp + 1;
    let mut s = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if negative {
        s.insert(0, '-');
    }
    s
}

/// `p/q~decimal`.
pub fn format_exact(r: &Rational) -> String {
    format!(
        "{}~{}",
        format_rational(r),
        format_significant(r.to_f64().unwrap_or(f64::NAN), 12)
    )
}

pub fn to_csv(rows: &[LadderRow]) -> Result<String, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    let opt = |r: &Option<Rational>| r.as_ref().map(format_exact).unwrap_or_default();
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.family,
            r.q,
            r.n,
            r.dim,
            format_exact(&r.h_upper),
            opt(&r.h_exact),
            format_significant(r.lambda, 12),
            opt(&r.certified_lower),
        );
    }
    Ok(out)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;

/// λ and h_upper against N, one pair of series per family, log-scaled y.
pub fn to_svg(rows: &[LadderRow]) -> Result<String, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    let h = |r: &LadderRow| r.h_upper.to_f64().unwrap_or(f64::NAN);
    let values: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.lambda, h(r)])
        .filter(|v| v.is_finite() && *v > 0.0)
        .collect();
    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v.log10()), b.max(v.log10())));
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 0.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil().max(lo.floor() + 1.0));
    let n_min = rows.iter().map(|r| r.n).min().expect("nonempty") as f64;
    let n_max = rows.iter().map(|r| r.n).max().expect("nonempty") as f64;
    let span = (n_max - n_min).max(1.0);
    let px = |n: u32| MARGIN + (n as f64 - n_min) / span * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v.log10() - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for e in lo as i32..=hi as i32 {
        let y = py(10f64.powi(e));
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
        let _ = writeln!(svg, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#ddd"/>"##);
    }
    let mut ns: Vec<u32> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in &ns {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{n}</text>"#,
            px(*n),
            y0 + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">N</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );

    let mut families: Vec<&str> = rows.iter().map(|r| r.family.as_str()).collect();
    families.dedup();
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut legend_y = MARGIN - 30.0;
    for (i, fam) in families.iter().enumerate() {
        let color = palette[i % palette.len()];
        let series: Vec<&LadderRow> = rows.iter().filter(|r| r.family == *fam).collect();
        for (label, dash, get) in [
            ("lambda", "", &(|r: &LadderRow| r.lambda) as &dyn Fn(&LadderRow) -> f64),
            ("h_upper", r#" stroke-dasharray="6 4""#, &h),
        ] {
            let pts: Vec<String> = series
                .iter()
                .filter(|r| get(r) > 0.0 && get(r).is_finite())
                .map(|r| format!("{:.2},{:.2}", px(r.n), py(get(r))))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#,
                pts.join(" ")
            );
            for p in &pts {
                let (x, y) = p.split_once(',').expect("point");
                let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
                x1 - 150.0,
                x1 - 120.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}">{fam} {label}</text>"#,
                x1 - 114.0,
                legend_y + 4.0
            );
            legend_y += 14.0;
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Write `rows` as CSV and SVG. Nothing is written when `rows` is empty.
pub fn emit_report(rows: &[LadderRow], csv: &Path, svg: &Path) -> Result<(), ReportError> {
    let csv_text = to_csv(rows)?;
    let svg_text = to_svg(rows)?;
    fs::write(csv, csv_text)?;
    fs::write(svg, svg_text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::ratio;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(3.0 / 11.0, 12), "0.272727272727");
        assert_eq!(format_significant(2.44069e-5, 12), "0.0000244069");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(-1234.5, 3), "-1230");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_exact(&ratio(3, 21)), "1/7~0.142857142857");
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(to_csv(&[]), Err(ReportError::Empty)));
        assert!(matches!(to_svg(&[]), Err(ReportError::Empty)));
    }
}
