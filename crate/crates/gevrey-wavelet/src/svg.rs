//! Minimal deterministic SVG polyline plots; no plotting dependency.

/// Renders one data series as a polyline with a frame, tick labels at the
/// corners, and a title. Output is a pure function of the inputs.
pub fn polyline_plot(title: &str, series: &[(f64, f64)], width: u32, height: u32) -> String {
    let (w, h) = (f64::from(width), f64::from(height));
    let margin = 46.0;
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if !(x_min < x_max) {
        x_max = x_min + 1.0;
    }
    if !(y_min < y_max) {
        y_max = y_min + 1.0;
    }
    // A little vertical headroom keeps flat plateaus off the frame.
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let sx = |x: f64| margin + (x - x_min) / (x_max - x_min) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y_min) / (y_max - y_min) * (h - 2.0 * margin);

    let mut points = String::new();
    for &(x, y) in series {
        points.push_str(&format!("{:.3},{:.3} ", sx(x), sy(y)));
    }

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<rect x=\"{m:.1}\" y=\"{m:.1}\" width=\"{iw:.1}\" height=\"{ih:.1}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        m = margin,
        iw = w - 2.0 * margin,
        ih = h - 2.0 * margin,
    ));
    // Zero axis when visible.
    if y_min < 0.0 && y_max > 0.0 {
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{:.3}\" x2=\"{:.1}\" y2=\"{:.3}\" \
             stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n",
            margin,
            sy(0.0),
            w - margin,
            sy(0.0)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        margin,
        xml_escape(title)
    ));
    for (x, y, anchor, label) in [
        (margin, h - margin + 18.0, "middle", format!("{x_min:.4}")),
        (w - margin, h - margin + 18.0, "middle", format!("{x_max:.4}")),
        (margin - 6.0, h - margin, "end", format!("{y_min:.4}")),
        (margin - 6.0, margin + 4.0, "end", format!("{y_max:.4}")),
    ] {
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"{anchor}\">{label}</text>\n"
        ));
    }
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\" points=\"{}\"/>\n",
        points.trim_end()
    ));
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_svg() {
        let series: Vec<(f64, f64)> = (0..100)
            .map(|i| {
                let x = i as f64 / 10.0;
                (x, x.sin())
            })
            .collect();
        let svg = polyline_plot("sample <series>", &series, 800, 500);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("&lt;series&gt;"));
        // Deterministic output.
        assert_eq!(svg, polyline_plot("sample <series>", &series, 800, 500));
    }

    #[test]
    fn degenerate_series_do_not_panic() {
        let svg = polyline_plot("flat", &[(0.0, 1.0), (1.0, 1.0)], 300, 200);
        assert!(svg.contains("polyline"));
    }
}
