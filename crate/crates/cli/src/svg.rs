use rlspec_core::format::fmt_f64;
use rlspec_core::spectrum::SpectrumCloud;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

/// Scatter of the spectral points with the circle `|λ| = bound` drawn for scale.
pub fn scatter(cloud: &SpectrumCloud, bound: f64) -> String {
    let extent = cloud.points.iter().fold(bound, |a, p| a.max(p.r)).max(1e-12);
    let half = SIZE / 2.0;
    let px = (half - MARGIN) / extent;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    out.push_str(&format!("<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"));
    out.push_str(&format!(
        "<line x1=\"0\" y1=\"{half}\" x2=\"{SIZE}\" y2=\"{half}\" stroke=\"#bbb\"/>\n<line x1=\"{half}\" y1=\"0\" x2=\"{half}\" y2=\"{SIZE}\" stroke=\"#bbb\"/>\n"
    ));
    out.push_str(&format!(
        "<circle cx=\"{half}\" cy=\"{half}\" r=\"{}\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n",
        fmt_f64(bound * px)
    ));
    for p in &cloud.points {
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"#1f5fbf\"/>\n",
            fmt_f64(half + p.lambda.re * px),
            fmt_f64(half - p.lambda.im * px)
        ));
    }
    out.push_str("</svg>\n");
    out
}
