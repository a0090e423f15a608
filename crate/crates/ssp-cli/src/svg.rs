//! Static SVG scatter plot of projected prompt features. No plotting crate;
//! deterministic string output so reruns are byte-identical.

use std::collections::BTreeMap;

use ssp_core::features::ProjectedPoints;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

pub fn scatter(points: &ProjectedPoints) -> String {
    let n = points.coordinates.rows();
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        min_x = min_x.min(points.coordinates.get(i, 0));
        max_x = max_x.max(points.coordinates.get(i, 0));
        min_y = min_y.min(points.coordinates.get(i, 1));
        max_y = max_y.max(points.coordinates.get(i, 1));
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    let sx = |x: f64| MARGIN + (x - min_x) / span_x * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - min_y) / span_y * (HEIGHT - 2.0 * MARGIN);

    let mut colors: BTreeMap<&str, &str> = BTreeMap::new();
    for g in &points.groups {
        let idx = colors.len().min(PALETTE.len() - 1);
        colors.entry(g.as_str()).or_insert(PALETTE[idx]);
    }

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\"/>\n",
        HEIGHT - MARGIN,
        WIDTH - MARGIN,
        HEIGHT - MARGIN
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{}\" stroke=\"#999\"/>\n",
        HEIGHT - MARGIN
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#333\">pc1</text>\n",
        WIDTH - MARGIN + 6.0,
        HEIGHT - MARGIN + 4.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#333\">pc2</text>\n",
        MARGIN - 30.0,
        MARGIN - 8.0
    ));

    for i in 0..n {
        let color = colors[points.groups[i].as_str()];
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.7\"/>\n",
            sx(points.coordinates.get(i, 0)),
            sy(points.coordinates.get(i, 1))
        ));
    }

    for (i, (group, color)) in colors.iter().enumerate() {
        let y = MARGIN + 16.0 * i as f64;
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{color}\"/>\n",
            WIDTH - MARGIN - 110.0,
            y
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#333\">{group}</text>\n",
            WIDTH - MARGIN - 100.0,
            y + 4.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
