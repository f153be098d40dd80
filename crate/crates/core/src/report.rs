//! Output rendering: CSV tables, SVG timelines and SVG field graphs.
//!
//! Every renderer is a pure function of its input, so identical inputs give
//! byte-identical documents.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chrono::Slicing;
use crate::colloc::{frequency_series, CoocRow, DicePoint, KwicLine, QueryError};
use crate::corpus::{CorpusStats, LemmaGroup, LexiconReport};
use crate::dsm::FieldGraph;
use crate::index::PositionalIndex;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("plot has no series")]
    NoSeries,
    #[error("series {0:?} needs at least two points")]
    TooFewPoints(String),
    #[error("series {0:?} does not share the bin axis of the first series")]
    MismatchedAxes(String),
    #[error("smoothing width {0} must be odd and at least 3")]
    BadSmoothing(usize),
    #[error("series {0:?} has a non-finite value")]
    NonFinite(String),
    #[error("field graph is malformed: {0}")]
    InvalidGraph(&'static str),
}

/// Header plus string cells; the common shape behind every CSV export.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub trait Tabular {
    fn to_table(&self) -> Table;
}

/// RFC 4180 CSV with a header row and LF line endings.
pub fn emit_csv<T: Tabular + ?Sized>(table: &T) -> String {
    let t = table.to_table();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(true)
        .from_writer(Vec::new());
    w.write_record(&t.header).expect("in-memory write");
    for r in &t.rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv of utf-8 cells is utf-8")
}

fn strings<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

impl Tabular for [CoocRow] {
    fn to_table(&self) -> Table {
        Table {
            header: strings(["target", "occurrences", "associations", "percent", "percent_exact"]),
            rows: self
                .iter()
                .map(|r| {
                    vec![
                        r.target.clone(),
                        r.occurrences.to_string(),
                        r.associations.to_string(),
                        r.percent_display(),
                        r.percent.to_string(),
                    ]
                })
                .collect(),
        }
    }
}

impl Tabular for [DicePoint] {
    fn to_table(&self) -> Table {
        Table {
            header: strings(["bin", "f_a", "f_b", "hits_a", "hits_b", "dice", "dice_exact"]),
            rows: self
                .iter()
                .map(|p| {
                    vec![
                        p.bin_index.to_string(),
                        p.f_a.to_string(),
                        p.f_b.to_string(),
                        p.hits_a.to_string(),
                        p.hits_b.to_string(),
                        p.dice.round_half_up(6),
                        p.dice.to_string(),
                    ]
                })
                .collect(),
        }
    }
}

impl Tabular for [KwicLine] {
    fn to_table(&self) -> Table {
        Table {
            header: strings(["doc_id", "position", "year", "left", "keyword", "right"]),
            rows: self
                .iter()
                .map(|l| {
                    vec![
                        l.doc_id.clone(),
                        l.position.to_string(),
                        l.year.map(|y| y.to_string()).unwrap_or_default(),
                        l.left.join(" "),
                        l.keyword.clone(),
                        l.right.join(" "),
                    ]
                })
                .collect(),
        }
    }
}

impl Tabular for Slicing {
    fn to_table(&self) -> Table {
        Table {
            header: strings(["index", "year_start", "year_end", "midpoint", "token_mass", "n_docs"]),
            rows: self
                .bins
                .iter()
                .map(|b| {
                    vec![
                        b.index.to_string(),
                        b.year_start.to_string(),
                        b.year_end.to_string(),
                        b.midpoint().to_string(),
                        b.token_mass.to_string(),
                        b.doc_ids.len().to_string(),
                    ]
                })
                .collect(),
        }
    }
}

impl Tabular for CorpusStats {
    fn to_table(&self) -> Table {
        let span = |f: fn((i32, i32)) -> i32| self.year_span.map(|s| f(s).to_string()).unwrap_or_default();
        Table {
            header: strings(["metric", "value"]),
            rows: vec![
                vec!["documents".into(), self.n_documents.to_string()],
                vec!["dated_documents".into(), self.n_dated.to_string()],
                vec!["tokens".into(), self.n_tokens.to_string()],
                vec!["dated_tokens".into(), self.n_dated_tokens.to_string()],
                vec!["first_year".into(), span(|s| s.0)],
                vec!["last_year".into(), span(|s| s.1)],
            ],
        }
    }
}

impl Tabular for LexiconReport {
    fn to_table(&self) -> Table {
        let mut rows: Vec<Vec<String>> =
            self.rows.iter().map(|r| vec![r.name.clone(), r.all.to_string(), r.dated.to_string()]).collect();
        rows.push(vec!["total".into(), self.total_all().to_string(), self.total_dated().to_string()]);
        Table { header: strings(["lemma", "all", "dated"]), rows }
    }
}

/// Per-bin counts of several groups; one row per group, one column per bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub bin_labels: Vec<String>,
    pub midpoints: Vec<f64>,
    pub token_mass: Vec<u64>,
    pub series: Vec<NamedCounts>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCounts {
    pub name: String,
    pub counts: Vec<u64>,
}

/// Denominator of the rate axis: occurrences per this many tokens of bin mass.
pub const RATE_PER: f64 = 10_000.0;

impl FrequencyTable {
    pub fn build(index: &PositionalIndex<'_>, slicing: &Slicing, groups: &[LemmaGroup]) -> Result<Self, QueryError> {
        let series = groups
            .iter()
            .map(|g| Ok(NamedCounts { name: g.name().to_string(), counts: frequency_series(index, slicing, g)? }))
            .collect::<Result<Vec<_>, QueryError>>()?;
        Ok(FrequencyTable {
            bin_labels: slicing.bins.iter().map(|b| b.label()).collect(),
            midpoints: slicing.bins.iter().map(|b| b.midpoint()).collect(),
            token_mass: slicing.bins.iter().map(|b| b.token_mass).collect(),
            series,
        })
    }

    /// One series per group at bin midpoints, as raw counts or per [`RATE_PER`] tokens.
    pub fn timeline(&self, title: &str, rate: bool, smoothing: Option<usize>) -> TimelinePlotSpec {
        let series = self
            .series
            .iter()
            .map(|s| Series {
                name: s.name.clone(),
                points: self
                    .midpoints
                    .iter()
                    .zip(&s.counts)
                    .zip(&self.token_mass)
                    .map(|((&x, &c), &m)| (x, if rate { c as f64 * RATE_PER / m as f64 } else { c as f64 }))
                    .collect(),
            })
            .collect();
        TimelinePlotSpec {
            title: title.to_string(),
            y_kind: if rate { YKind::Rate } else { YKind::Count },
            series,
            x_range: None,
            smoothing,
        }
    }
}

/// Dice scores at bin midpoints.
pub fn dice_timeline(title: &str, name: &str, slicing: &Slicing, points: &[DicePoint], smoothing: Option<usize>) -> TimelinePlotSpec {
    TimelinePlotSpec {
        title: title.to_string(),
        y_kind: YKind::Dice,
        series: vec![Series {
            name: name.to_string(),
            points: points.iter().map(|p| (slicing.bins[p.bin_index].midpoint(), p.dice.to_f64())).collect(),
        }],
        x_range: None,
        smoothing,
    }
}

impl Tabular for FrequencyTable {
    fn to_table(&self) -> Table {
        let mut header = vec!["group".to_string()];
        header.extend(self.bin_labels.iter().enumerate().map(|(i, l)| format!("{i}:{l}")));
        Table {
            header,
            rows: self
                .series
                .iter()
                .map(|s| std::iter::once(s.name.clone()).chain(s.counts.iter().map(u64::to_string)).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YKind {
    Count,
    Rate,
    /// Association scores, drawn on a fixed [0, 1] axis.
    Dice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    /// (midpoint year, value)
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimelinePlotSpec {
    pub title: String,
    pub y_kind: YKind,
    pub series: Vec<Series>,
    pub x_range: Option<(f64, f64)>,
    /// Centred moving-average width; odd, at least 3.
    pub smoothing: Option<usize>,
}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const PLOT_LEFT: f64 = 80.0;
const PLOT_RIGHT: f64 = 740.0;
const PLOT_TOP: f64 = 60.0;
const PLOT_BOTTOM: f64 = 470.0;
const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// Step from the 1/2/2.5/5 × 10^k ladder giving at most `max_ticks` intervals over `range`.
fn nice_step(range: f64, max_ticks: usize) -> f64 {
    let raw = range / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

fn decimals_for(step: f64) -> usize {
    (0..6).find(|&d| {
        let scaled = step * 10f64.powi(d as i32);
        (scaled - scaled.round()).abs() < 1e-9
    })
    .unwrap_or(6)
}

/// Centred moving average; the window shrinks at both ends.
pub fn moving_average(values: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

pub fn emit_timeline_svg(spec: &TimelinePlotSpec) -> Result<String, ReportError> {
    let first = spec.series.first().ok_or(ReportError::NoSeries)?;
    for s in &spec.series {
        if s.points.len() < 2 {
            return Err(ReportError::TooFewPoints(s.name.clone()));
        }
        if s.points.len() != first.points.len() || s.points.iter().zip(&first.points).any(|(a, b)| a.0 != b.0) {
            return Err(ReportError::MismatchedAxes(s.name.clone()));
        }
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(ReportError::NonFinite(s.name.clone()));
        }
    }
    if let Some(w) = spec.smoothing {
        if w < 3 || w % 2 == 0 {
            return Err(ReportError::BadSmoothing(w));
        }
    }

    let series: Vec<(String, Vec<(f64, f64)>)> = spec
        .series
        .iter()
        .map(|s| match spec.smoothing {
            None => (s.name.clone(), s.points.clone()),
            Some(w) => {
                let ys: Vec<f64> = s.points.iter().map(|p| p.1).collect();
                let smooth = moving_average(&ys, w);
                (
                    format!("{} (moving average, width {w})", s.name),
                    s.points.iter().zip(smooth).map(|(p, y)| (p.0, y)).collect(),
                )
            }
        })
        .collect();

    let (mut x0, mut x1) = spec.x_range.unwrap_or_else(|| {
        let xs = first.points.iter().map(|p| p.0);
        (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max))
    });
    if x1 <= x0 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let (y0, y1, y_step) = match spec.y_kind {
        YKind::Dice => (0.0, 1.0, 0.2),
        YKind::Count | YKind::Rate => {
            let all = series.iter().flat_map(|s| s.1.iter().map(|p| p.1));
            let lo = all.clone().fold(0.0, f64::min);
            let hi = all.fold(0.0, f64::max);
            let hi = if hi <= lo { lo + 1.0 } else { hi };
            let step = nice_step(hi - lo, 8);
            ((lo / step).floor() * step, (hi / step).ceil() * step, step)
        }
    };
    let sx = |x: f64| PLOT_LEFT + (x - x0) / (x1 - x0) * (PLOT_RIGHT - PLOT_LEFT);
    let sy = |y: f64| PLOT_BOTTOM - (y - y0) / (y1 - y0) * (PLOT_BOTTOM - PLOT_TOP);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        out,
        "<text class=\"title\" x=\"{}\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        num((PLOT_LEFT + PLOT_RIGHT) / 2.0),
        xml_escape(&spec.title)
    );

    out.push_str("<g class=\"axes\" stroke=\"#000000\" fill=\"none\">\n");
    let _ = writeln!(
        out,
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/>\n<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\"/>",
        l = num(PLOT_LEFT),
        r = num(PLOT_RIGHT),
        t = num(PLOT_TOP),
        b = num(PLOT_BOTTOM)
    );
    out.push_str("</g>\n<g class=\"ticks\" font-size=\"11\">\n");
    let x_step = nice_step(x1 - x0, 10).max(1.0);
    let mut k = (x0 / x_step).ceil();
    while k * x_step <= x1 + 1e-9 {
        let x = sx(k * x_step);
        let _ = writeln!(
            out,
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"#000000\"/><text x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\">{label}</text>",
            x = num(x),
            b = num(PLOT_BOTTOM),
            b2 = num(PLOT_BOTTOM + 5.0),
            ty = num(PLOT_BOTTOM + 20.0),
            label = format!("{:.0}", k * x_step)
        );
        k += 1.0;
    }
    let y_dec = decimals_for(y_step);
    let n_y = ((y1 - y0) / y_step).round() as i64;
    for i in 0..=n_y {
        let v = y0 + i as f64 * y_step;
        let y = sy(v);
        let _ = writeln!(
            out,
            "<line x1=\"{l5}\" y1=\"{y}\" x2=\"{l}\" y2=\"{y}\" stroke=\"#000000\"/><line x1=\"{l}\" y1=\"{y}\" x2=\"{r}\" y2=\"{y}\" stroke=\"#dddddd\"/><text x=\"{tx}\" y=\"{ty}\" text-anchor=\"end\">{label}</text>",
            l5 = num(PLOT_LEFT - 5.0),
            l = num(PLOT_LEFT),
            r = num(PLOT_RIGHT),
            y = num(y),
            tx = num(PLOT_LEFT - 8.0),
            ty = num(y + 4.0),
            label = format!("{v:.y_dec$}")
        );
    }
    out.push_str("</g>\n<g class=\"series\" fill=\"none\" stroke-width=\"2\">\n");
    for (i, (_, pts)) in series.iter().enumerate() {
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{},{}", num(sx(x)), num(sy(y)))).collect();
        let _ = writeln!(out, "<polyline stroke=\"{}\" points=\"{}\"/>", PALETTE[i % PALETTE.len()], coords.join(" "));
    }
    out.push_str("</g>\n<g class=\"legend\">\n");
    for (i, (name, _)) in series.iter().enumerate() {
        let y = PLOT_TOP + 10.0 + 22.0 * i as f64;
        let _ = writeln!(
            out,
            "<rect x=\"760\" y=\"{}\" width=\"14\" height=\"4\" fill=\"{}\"/><text x=\"782\" y=\"{}\">{}</text>",
            num(y - 2.0),
            PALETTE[i % PALETTE.len()],
            num(y + 4.0),
            xml_escape(name)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

const FIELD_SIZE: f64 = 800.0;
const FIELD_RING: f64 = 300.0;

/// Circular layout: target in the centre, neighbours clockwise from the top by rank.
pub fn emit_field_svg(graph: &FieldGraph) -> Result<String, ReportError> {
    let first = graph.nodes.first().ok_or(ReportError::InvalidGraph("no nodes"))?;
    if first.lemma != graph.target {
        return Err(ReportError::InvalidGraph("first node must be the target"));
    }
    let c = FIELD_SIZE / 2.0;
    let ring = graph.nodes.len() - 1;
    let place = |i: usize| -> (f64, f64) {
        if i == 0 {
            (c, c)
        } else {
            let theta = -PI / 2.0 + 2.0 * PI * (i - 1) as f64 / ring as f64;
            (c + FIELD_RING * theta.cos(), c + FIELD_RING * theta.sin())
        }
    };
    let at = |lemma: &str| graph.nodes.iter().position(|n| n.lemma == lemma);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{FIELD_SIZE}\" height=\"{FIELD_SIZE}\" viewBox=\"0 0 {FIELD_SIZE} {FIELD_SIZE}\" font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{FIELD_SIZE}\" height=\"{FIELD_SIZE}\" fill=\"#ffffff\"/>");
    out.push_str("<g class=\"edges\" stroke=\"#1b5e20\" stroke-width=\"1.5\">\n");
    for e in &graph.edges {
        let (Some(a), Some(b)) = (at(&e.a), at(&e.b)) else {
            return Err(ReportError::InvalidGraph("edge endpoint is not a node"));
        };
        let ((xa, ya), (xb, yb)) = (place(a), place(b));
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke-opacity=\"{:.3}\"/>",
            num(xa),
            num(ya),
            num(xb),
            num(yb),
            e.sim.clamp(0.0, 1.0)
        );
    }
    out.push_str("</g>\n<g class=\"nodes\">\n");
    for (i, n) in graph.nodes.iter().enumerate() {
        let (x, y) = place(i);
        let (r, fill) = if i == 0 { (10.0, "#d95f02") } else { (6.0, "#1b9e77") };
        let _ = writeln!(
            out,
            "<circle cx=\"{x}\" cy=\"{y}\" r=\"{r}\" fill=\"{fill}\"/><text x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\">{label}</text>",
            x = num(x),
            y = num(y),
            ty = num(y - r - 4.0),
            label = xml_escape(&n.lemma)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
