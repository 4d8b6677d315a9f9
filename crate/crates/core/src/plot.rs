//! Deterministic two-curve SVG panel (SCC vs SMAC over years).

/// Render the two series over `years` into a self-contained SVG string.
/// `window` restricts the year axis; series points outside it are
/// dropped. Output is byte-deterministic for identical inputs.
pub fn render_panel(
    title: &str,
    years: &[i64],
    scc: &[f64],
    smac: &[f64],
    window: Option<(i64, i64)>,
) -> String {
    const W: f64 = 900.0;
    const H: f64 = 560.0;
    const ML: f64 = 70.0; // margins
    const MR: f64 = 25.0;
    const MT: f64 = 45.0;
    const MB: f64 = 55.0;

    let (y_from, y_to) = window.unwrap_or((
        years.first().copied().unwrap_or(2015),
        years.last().copied().unwrap_or(2015),
    ));
    let idx: Vec<usize> = (0..years.len())
        .filter(|&i| years[i] >= y_from && years[i] <= y_to)
        .collect();

    let mut vmax = 0.0f64;
    for &i in &idx {
        vmax = vmax.max(scc[i]).max(smac[i]);
    }
    if vmax <= 0.0 {
        vmax = 1.0;
    }
    let vmax = vmax * 1.05;
    let x_span = ((y_to - y_from) as f64).max(1.0);
    let sx = |yr: i64| ML + (yr - y_from) as f64 / x_span * (W - ML - MR);
    let sy = |v: f64| H - MB - (v / vmax) * (H - MT - MB);

    let path = |series: &[f64]| -> String {
        idx.iter()
            .map(|&i| format!("{:.2},{:.2}", sx(years[i]), sy(series[i])))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"26\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        (ML + W - MR) / 2.0,
        xml_escape(title)
    ));

    // axes
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        H - MB
    ));

    // x ticks: at most 11, on multiples of 5 years
    let n_ticks = 10.min((y_to - y_from) / 5).max(1);
    let step = (((y_to - y_from) as f64 / n_ticks as f64 / 5.0).ceil() * 5.0) as i64;
    let mut yr = y_from;
    while yr <= y_to {
        let x = sx(yr);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            H - MB,
            H - MB + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{yr}</text>\n",
            H - MB + 20.0
        ));
        yr += step;
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">year</text>\n",
        (ML + W - MR) / 2.0,
        H - 12.0
    ));

    // y ticks: 6 round-ish levels
    for k in 0..=5 {
        let v = vmax * k as f64 / 5.0;
        let y = sy(v);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{ML}\" y2=\"{y:.2}\" stroke=\"black\"/>\n",
            ML - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{:.1}</text>\n",
            ML - 9.0,
            y + 4.0,
            v
        ));
    }
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" transform=\"rotate(-90 16 {:.2})\" \
         text-anchor=\"middle\">$/tCO2</text>\n",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0
    ));

    // curves
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
        path(scc)
    ));
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" \
         stroke-dasharray=\"6 4\"/>\n",
        path(smac)
    ));

    // legend
    let lx = ML + 14.0;
    svg.push_str(&format!(
        "<line x1=\"{lx}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#1f77b4\" \
         stroke-width=\"2\"/><text x=\"{:.2}\" y=\"{:.2}\">SCC</text>\n",
        MT + 14.0,
        lx + 30.0,
        MT + 14.0,
        lx + 38.0,
        MT + 18.0
    ));
    svg.push_str(&format!(
        "<line x1=\"{lx}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#d62728\" \
         stroke-width=\"2\" stroke-dasharray=\"6 4\"/><text x=\"{:.2}\" y=\"{:.2}\">SMAC</text>\n",
        MT + 34.0,
        lx + 30.0,
        MT + 34.0,
        lx + 38.0,
        MT + 38.0
    ));

    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
