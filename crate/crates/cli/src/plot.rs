//! CUSUM output: CSV rows and a small SVG line chart.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{PipelineError, Stage};
use crate::report::CusumSection;

pub fn cusum_csv(c: &CusumSection) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["period", "path", "lower", "upper", "outside"]).expect("in-memory write");
    for r in &c.rows {
        w.write_record([
            r.period.to_string(),
            format!("{:.6}", r.path),
            format!("{:.6}", r.lower),
            format!("{:.6}", r.upper),
            (r.outside as u8).to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("ascii")
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

pub fn cusum_svg(c: &CusumSection) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if c.rows.is_empty() {
        let _ = writeln!(s, r#"<text x="{MARGIN}" y="{MARGIN}">no recursive residuals</text>"#);
        s.push_str("</svg>\n");
        return s;
    }
    let first = c.rows[0].period as f64;
    let last = c.rows[c.rows.len() - 1].period as f64;
    let span = (last - first).max(1.0);
    let ymax = c
        .rows
        .iter()
        .flat_map(|r| [r.path.abs(), r.upper.abs(), r.lower.abs()])
        .fold(1.0f64, f64::max)
        * 1.1;
    let px = |period: i32| MARGIN + (period as f64 - first) / span * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT / 2.0 - v / ymax * (HEIGHT / 2.0 - MARGIN);
    let line = |values: &dyn Fn(usize) -> f64| -> String {
        c.rows
            .iter()
            .enumerate()
            .map(|(i, r)| format!("{:.2},{:.2}", px(r.period), py(values(i))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        s,
        r##"<line x1="{MARGIN}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="#999" stroke-width="1"/>"##,
        y0 = py(0.0),
        x1 = WIDTH - MARGIN
    );
    for (label, f) in [
        ("upper", &(|i: usize| c.rows[i].upper) as &dyn Fn(usize) -> f64),
        ("lower", &|i: usize| c.rows[i].lower),
    ] {
        let _ = writeln!(
            s,
            r##"<polyline class="{label}" points="{}" fill="none" stroke="#c0392b" stroke-dasharray="6 4" stroke-width="1.5"/>"##,
            line(f)
        );
    }
    let _ = writeln!(
        s,
        r##"<polyline class="cusum" points="{}" fill="none" stroke="#1f4e99" stroke-width="2"/>"##,
        line(&|i: usize| c.rows[i].path)
    );
    for r in c.rows.iter().filter(|r| r.outside) {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#c0392b"><title>{} outside</title></circle>"##,
            px(r.period),
            py(r.path),
            r.period
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{:.2}" font-size="12">{}</text>"#,
        HEIGHT - 12.0,
        c.rows[0].period
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
        WIDTH - MARGIN,
        HEIGHT - 12.0,
        c.rows[c.rows.len() - 1].period
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="24" font-size="14">CUSUM with {}% bounds</text>"#,
        c.level * 100.0
    );
    s.push_str("</svg>\n");
    s
}

/// Writes `cusum.csv` and `cusum.svg` into `dir`.
pub fn emit_cusum_plot(c: &CusumSection, dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(PipelineError::io(Stage::Output, dir))?;
    let csv_path = dir.join("cusum.csv");
    std::fs::write(&csv_path, cusum_csv(c)).map_err(PipelineError::io(Stage::Output, &csv_path))?;
    let svg_path = dir.join("cusum.svg");
    std::fs::write(&svg_path, cusum_svg(c)).map_err(PipelineError::io(Stage::Output, &svg_path))?;
    Ok(())
}
