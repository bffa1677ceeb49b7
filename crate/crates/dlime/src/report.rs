//! SVG figure emitters: horizontal explanation bar charts, stability
//! heatmaps, and dendrograms. Plain text output keeps the figures
//! golden-file testable; every numeric attribute is formatted with a fixed
//! precision so reruns are byte-identical.

use std::fmt::Write as _;

use crate::clustering::Dendrogram;
use crate::explainers::Explanation;
use crate::stability::StabilityReport;

const BAR_GREEN: &str = "#2e8b57";
const BAR_RED: &str = "#c0392b";

fn svg_header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"monospace\" font-size=\"12\">\n"
    )
}

/// Horizontal bar chart: one bar per explanation entry, positive weights
/// green and negative red, feature names on the left.
pub fn explanation_bar_chart(explanation: &Explanation) -> String {
    let n = explanation.entries.len();
    let row_h = 28.0;
    let label_w = 220.0;
    let chart_w = 320.0;
    let width = label_w + chart_w + 20.0;
    let height = row_h * n as f64 + 50.0;
    let max_abs = explanation
        .entries
        .iter()
        .map(|e| e.weight.abs())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let zero_x = label_w + chart_w / 2.0;
    let scale = (chart_w / 2.0 - 10.0) / max_abs;

    let mut svg = svg_header(width, height);
    let _ = writeln!(
        svg,
        "  <text x=\"10\" y=\"20\">{} explanation (K={}, r2={:.4})</text>",
        explanation.method, explanation.k, explanation.r2
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{zero_x:.1}\" y1=\"30\" x2=\"{zero_x:.1}\" y2=\"{:.1}\" stroke=\"#888\"/>",
        height - 10.0
    );
    for (i, entry) in explanation.entries.iter().enumerate() {
        let y = 40.0 + i as f64 * row_h;
        let bar_len = entry.weight.abs() * scale;
        let (x, color) = if entry.weight >= 0.0 {
            (zero_x, BAR_GREEN)
        } else {
            (zero_x - bar_len, BAR_RED)
        };
        let _ = writeln!(
            svg,
            "  <text x=\"10\" y=\"{:.1}\">{}</text>",
            y + 14.0,
            xml_escape(&entry.feature)
        );
        let _ = writeln!(
            svg,
            "  <rect class=\"bar\" x=\"{x:.2}\" y=\"{y:.1}\" width=\"{bar_len:.2}\" \
             height=\"18\" fill=\"{color}\"/>"
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{:+.4}</text>",
            zero_x + chart_w / 2.0 - 55.0,
            y + 13.0,
            entry.weight
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Blue-scale heatmap of the pairwise Jaccard-distance matrix.
pub fn stability_heatmap(report: &StabilityReport) -> String {
    let n = report.iterations;
    let cell = 36.0;
    let margin = 40.0;
    let size = margin + n as f64 * cell + 10.0;
    let mut svg = svg_header(size, size + 20.0);
    let _ = writeln!(
        svg,
        "  <text x=\"10\" y=\"20\">{} J_distance matrix ({}x{}), average {:.4}</text>",
        report.method, n, n, report.average_distance
    );
    for i in 0..n {
        for j in 0..n {
            let v = report.distance_matrix[i][j];
            let shade = (255.0 - v * 200.0).round() as u8;
            let x = margin + j as f64 * cell;
            let y = margin + i as f64 * cell;
            let _ = writeln!(
                svg,
                "  <rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell:.0}\" height=\"{cell:.0}\" \
                 fill=\"rgb({shade},{shade},255)\" stroke=\"#ccc\"/>"
            );
            let _ = writeln!(
                svg,
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"9\">{:.2}</text>",
                x + 4.0,
                y + cell / 2.0 + 3.0,
                v
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Simple dendrogram rendering: leaves evenly spaced on the x-axis, merge
/// heights on the y-axis (taller = later merge).
pub fn dendrogram_svg(dendrogram: &Dendrogram) -> String {
    let n = dendrogram.n_leaves;
    let width = 720.0;
    let height = 420.0;
    let plot_h = height - 60.0;
    let max_h = dendrogram
        .merges
        .last()
        .map(|m| m.height)
        .unwrap_or(1.0)
        .max(1e-12);
    let y_of = |h: f64| height - 30.0 - (h / max_h) * plot_h;

    // Leaf order: left-to-right traversal of the merge tree.
    let mut children: Vec<Option<(usize, usize)>> = vec![None; 2 * n - 1];
    for (step, m) in dendrogram.merges.iter().enumerate() {
        children[n + step] = Some((m.left, m.right));
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![2 * n - 2];
    while let Some(node) = stack.pop() {
        match children[node] {
            None => order.push(node),
            Some((l, r)) => {
                stack.push(r);
                stack.push(l);
            }
        }
    }
    let mut leaf_pos = vec![0.0f64; 2 * n - 1];
    for (slot, &leaf) in order.iter().enumerate() {
        leaf_pos[leaf] = 30.0 + (width - 60.0) * (slot as f64 + 0.5) / n as f64;
    }

    let mut node_x = leaf_pos.clone();
    let mut node_y: Vec<f64> = vec![y_of(0.0); 2 * n - 1];
    let mut svg = svg_header(width, height);
    let _ = writeln!(svg, "  <text x=\"10\" y=\"20\">dendrogram ({n} leaves)</text>");
    for (step, m) in dendrogram.merges.iter().enumerate() {
        let (xl, xr) = (node_x[m.left], node_x[m.right]);
        let (yl, yr) = (node_y[m.left], node_y[m.right]);
        let y = y_of(m.height);
        let _ = writeln!(
            svg,
            "  <path d=\"M {xl:.2} {yl:.2} L {xl:.2} {y:.2} L {xr:.2} {y:.2} L {xr:.2} {yr:.2}\" \
             fill=\"none\" stroke=\"#333\"/>"
        );
        node_x[n + step] = (xl + xr) / 2.0;
        node_y[n + step] = y;
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explainers::{ExplanationEntry, Provenance};
    use crate::surrogate::SelectionMode;

    fn sample_explanation(weights: &[f64]) -> Explanation {
        Explanation {
            method: "dlime".into(),
            instance_id: "0".into(),
            k: weights.len(),
            entries: weights
                .iter()
                .enumerate()
                .map(|(i, &w)| ExplanationEntry {
                    feature: format!("f{i}"),
                    weight: w,
                })
                .collect(),
            r2: 0.9,
            selection_mode: SelectionMode::HighestWeights,
            provenance: Provenance::Dlime {
                cluster_id: 0,
                cluster_size: 10,
            },
        }
    }

    #[test]
    fn bar_chart_has_one_bar_per_entry() {
        let svg = explanation_bar_chart(&sample_explanation(&[0.5, -0.2, 0.1, 0.9, -0.7]));
        assert_eq!(svg.matches("class=\"bar\"").count(), 5);
    }

    #[test]
    fn bar_colors_follow_sign() {
        let svg = explanation_bar_chart(&sample_explanation(&[0.5, -0.2]));
        assert_eq!(svg.matches(BAR_GREEN).count(), 1);
        assert_eq!(svg.matches(BAR_RED).count(), 1);
    }

    #[test]
    fn rendering_is_deterministic() {
        let e = sample_explanation(&[0.123456789, -0.987654321]);
        assert_eq!(explanation_bar_chart(&e), explanation_bar_chart(&e));
    }

    #[test]
    fn heatmap_has_n_squared_cells() {
        let report = StabilityReport {
            method: "lime".into(),
            dataset: "d".into(),
            model: "m".into(),
            iterations: 3,
            feature_sets: vec![],
            distance_matrix: vec![
                vec![0.0, 0.5, 1.0],
                vec![0.5, 0.0, 0.25],
                vec![1.0, 0.25, 0.0],
            ],
            average_distance: 0.583,
            max_weight_delta: 0.0,
        };
        let svg = stability_heatmap(&report);
        assert_eq!(svg.matches("<rect").count(), 9);
    }

    #[test]
    fn dendrogram_draws_a_path_per_merge() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * i as f64]).collect();
        let d = crate::clustering::agglomerate(&rows).unwrap();
        let svg = dendrogram_svg(&d);
        assert_eq!(svg.matches("<path").count(), 5);
    }
}
