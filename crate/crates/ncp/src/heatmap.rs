//! Grayscale SVG heatmaps for two-parameter success-rate grids.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::experiment::ResultTable;

const CELL: usize = 40;
const MARGIN_LEFT: usize = 70;
const MARGIN_BOTTOM: usize = 50;
const MARGIN_TOP: usize = 20;
const MARGIN_RIGHT: usize = 20;

fn fmt(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Renders `table` as an SVG heatmap over the named grid axes.
///
/// Every row must carry exactly the two axis parameters, belong to a single
/// method, and together the rows must fill the full Cartesian grid exactly
/// once. Success rate 1 renders white, 0 renders black. The output is
/// byte-stable for identical input.
pub fn render_heatmap(table: &ResultTable, x_param: &str, y_param: &str) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParams("empty result table".into()));
    }
    let method = table.rows[0].method;
    if table.rows.iter().any(|r| r.method != method) {
        return Err(Error::InvalidParams(
            "heatmap requires a single-method table".into(),
        ));
    }
    let mut xs: BTreeSet<u64> = BTreeSet::new();
    let mut ys: BTreeSet<u64> = BTreeSet::new();
    let mut cells: Vec<(u64, u64, f64)> = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let x = lookup(&row.grid, x_param)?;
        let y = lookup(&row.grid, y_param)?;
        if row.grid.len() != 2 {
            return Err(Error::InvalidParams(format!(
                "expected a 2-D grid, row has {} parameters",
                row.grid.len()
            )));
        }
        xs.insert(x.to_bits());
        ys.insert(y.to_bits());
        cells.push((x.to_bits(), y.to_bits(), row.success_rate));
    }
    if xs.len() * ys.len() != table.rows.len() {
        return Err(Error::InvalidParams(format!(
            "rows do not tile a {}x{} grid",
            xs.len(),
            ys.len()
        )));
    }
    let x_vals: Vec<f64> = xs.iter().map(|&b| f64::from_bits(b)).collect();
    let y_vals: Vec<f64> = ys.iter().map(|&b| f64::from_bits(b)).collect();
    let width = MARGIN_LEFT + CELL * x_vals.len() + MARGIN_RIGHT;
    let height = MARGIN_TOP + CELL * y_vals.len() + MARGIN_BOTTOM;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
    ));
    // Largest y value at the top row.
    let mut sorted_cells = cells;
    sorted_cells.sort_by_key(|&(xb, yb, _)| (yb, xb));
    for (xb, yb, rate) in &sorted_cells {
        let xi = x_vals
            .iter()
            .position(|v| v.to_bits() == *xb)
            .expect("x value present");
        let yi = y_vals
            .iter()
            .position(|v| v.to_bits() == *yb)
            .expect("y value present");
        let px = MARGIN_LEFT + xi * CELL;
        let py = MARGIN_TOP + (y_vals.len() - 1 - yi) * CELL;
        let level = (rate.clamp(0.0, 1.0) * 255.0).round() as u8;
        svg.push_str(&format!(
            "  <rect x=\"{px}\" y=\"{py}\" width=\"{CELL}\" height=\"{CELL}\" \
             fill=\"#{level:02x}{level:02x}{level:02x}\"/>\n"
        ));
    }
    for (xi, v) in x_vals.iter().enumerate() {
        let px = MARGIN_LEFT + xi * CELL + CELL / 2;
        let py = MARGIN_TOP + CELL * y_vals.len() + 16;
        svg.push_str(&format!(
            "  <text x=\"{px}\" y=\"{py}\" font-size=\"11\" text-anchor=\"middle\" \
             font-family=\"monospace\">{}</text>\n",
            fmt(*v)
        ));
    }
    for (yi, v) in y_vals.iter().enumerate() {
        let px = MARGIN_LEFT - 6;
        let py = MARGIN_TOP + (y_vals.len() - 1 - yi) * CELL + CELL / 2 + 4;
        svg.push_str(&format!(
            "  <text x=\"{px}\" y=\"{py}\" font-size=\"11\" text-anchor=\"end\" \
             font-family=\"monospace\">{}</text>\n",
            fmt(*v)
        ));
    }
    let x_label_y = height - 8;
    let x_label_x = MARGIN_LEFT + CELL * x_vals.len() / 2;
    svg.push_str(&format!(
        "  <text x=\"{x_label_x}\" y=\"{x_label_y}\" font-size=\"13\" text-anchor=\"middle\" \
         font-family=\"monospace\">{x_param}</text>\n"
    ));
    let y_label_y = MARGIN_TOP + CELL * y_vals.len() / 2;
    svg.push_str(&format!(
        "  <text x=\"14\" y=\"{y_label_y}\" font-size=\"13\" text-anchor=\"middle\" \
         font-family=\"monospace\" transform=\"rotate(-90 14 {y_label_y})\">{y_param}</text>\n"
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn lookup(grid: &[(String, f64)], name: &str) -> Result<f64> {
    grid.iter()
        .find(|(k, _)| k == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::InvalidParams(format!("grid parameter {name} not found")))
}
