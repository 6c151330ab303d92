//! Deterministic SVG rendering of factor planes: respondent points, modality
//! points with labels, supplementary projections and group centroids, with an
//! origin crosshair and inertia-rate axis labels.

use thiserror::Error;

use crate::ca::{modified_rates, CaError, FactorModel, ModelKind, Projection};

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("bad axes ({0}, {1}): need two distinct retained axes")]
    BadAxes(usize, usize),
    #[error("axis {0} has no modified rate (eigenvalue at or below 1/Q)")]
    NoModifiedRate(usize),
    #[error("modified rates apply to MCA models only")]
    NotMca,
    #[error(transparent)]
    Ca(#[from] CaError),
}

/// Which inertia rate labels the axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    Raw,
    Modified,
}

#[derive(Clone, Debug)]
pub struct PlotOptions {
    /// Zero-based axis pair (horizontal, vertical).
    pub axes: (usize, usize),
    pub rate_mode: RateMode,
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// Draw the row (respondent) layer.
    pub show_rows: bool,
    /// Draw the main column (modality) layer with labels.
    pub show_cols: bool,
    /// Draw supplementary projections attached to the model.
    pub show_supplementary: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            axes: (0, 1),
            rate_mode: RateMode::Raw,
            width: 800.0,
            height: 600.0,
            margin: 60.0,
            show_rows: true,
            show_cols: true,
            show_supplementary: true,
        }
    }
}

/// The affine data-to-viewport transform used by the plot. Equal scale on
/// both axes so factor-plane distances stay faithful; y is flipped for SVG.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotGeometry {
    pub scale: f64,
    pub data_center: (f64, f64),
    pub view_center: (f64, f64),
}

impl PlotGeometry {
    /// Builds the transform from data bounds and the viewport size; bounds
    /// are padded by 5% of each range (ranges of zero pad by one unit).
    pub fn from_bounds(
        (min_x, max_x): (f64, f64),
        (min_y, max_y): (f64, f64),
        width: f64,
        height: f64,
        margin: f64,
    ) -> Self {
        let pad = |lo: f64, hi: f64| {
            let range = hi - lo;
            let p = if range > 0.0 { 0.05 * range } else { 1.0 };
            (lo - p, hi + p)
        };
        let (min_x, max_x) = pad(min_x, max_x);
        let (min_y, max_y) = pad(min_y, max_y);
        let usable_w = width - 2.0 * margin;
        let usable_h = height - 2.0 * margin;
        let scale = (usable_w / (max_x - min_x)).min(usable_h / (max_y - min_y));
        PlotGeometry {
            scale,
            data_center: ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0),
            view_center: (width / 2.0, height / 2.0),
        }
    }

    /// Maps a data point to viewport coordinates.
    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.view_center.0 + (x - self.data_center.0) * self.scale,
            self.view_center.1 - (y - self.data_center.1) * self.scale,
        )
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Percentage shown beside an axis, per the configured rate mode.
fn axis_rate(model: &FactorModel, axis: usize, mode: RateMode) -> Result<f64, PlotError> {
    match mode {
        RateMode::Raw => Ok(model.eigenvalues()[axis] / model.total_inertia() * 100.0),
        RateMode::Modified => {
            let ModelKind::Mca { q_active } = model.kind() else {
                return Err(PlotError::NotMca);
            };
            let rates = modified_rates(model.eigenvalues(), *q_active)?;
            rates
                .iter()
                .find(|r| r.axis == axis)
                .map(|r| r.rate * 100.0)
                .ok_or(PlotError::NoModifiedRate(axis))
        }
    }
}

/// Renders the factor plane of a fitted model as a standalone SVG 1.1
/// document. `centroids` are extra group-mean projections to overlay
/// (usually from [`FactorModel::category_centroid`]).
///
/// Output is a pure function of the inputs, so re-rendering a stored model
/// is byte-identical.
pub fn factor_plane_svg(
    model: &FactorModel,
    opts: &PlotOptions,
    centroids: &[Projection],
) -> Result<String, PlotError> {
    let (ax, ay) = opts.axes;
    if ax == ay || ax >= model.n_axes() || ay >= model.n_axes() {
        return Err(PlotError::BadAxes(ax, ay));
    }
    let rate_x = axis_rate(model, ax, opts.rate_mode)?;
    let rate_y = axis_rate(model, ay, opts.rate_mode)?;

    // gather drawn points to size the viewport; the origin is always shown
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    if opts.show_rows {
        for i in 0..model.n_rows() {
            xs.push(model.row_coords()[(i, ax)]);
            ys.push(model.row_coords()[(i, ay)]);
        }
    }
    if opts.show_cols {
        for j in 0..model.n_cols() {
            xs.push(model.col_coords()[(j, ax)]);
            ys.push(model.col_coords()[(j, ay)]);
        }
    }
    // supplementary rows/columns draw as triangles, centroids as diamonds;
    // centroids attached to the model and extra ones passed in both count
    let supplementary: Vec<&Projection> = if opts.show_supplementary {
        model
            .supplementary()
            .iter()
            .filter(|p| p.role != ProjectionRole::Centroid)
            .collect()
    } else {
        Vec::new()
    };
    let centroids: Vec<&Projection> = model
        .supplementary()
        .iter()
        .filter(|p| p.role == ProjectionRole::Centroid)
        .chain(centroids)
        .collect();
    for p in supplementary.iter().chain(&centroids) {
        xs.push(p.coords[ax]);
        ys.push(p.coords[ay]);
    }
    let bounds_x = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let bounds_y = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let geom = PlotGeometry::from_bounds(bounds_x, bounds_y, opts.width, opts.height, opts.margin);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = fmt(opts.width),
        h = fmt(opts.height)
    ));
    svg.push_str(
        "<style>\n\
         .respondents circle { fill: #4477aa; fill-opacity: 0.45; stroke: none; }\n\
         .modalities rect { fill: #cc3311; }\n\
         .modalities text, .supplementary text, .centroids text { font: 11px sans-serif; fill: #222222; }\n\
         .supplementary polygon { fill: #009988; }\n\
         .centroids polygon { fill: #ee7733; stroke: #000000; stroke-width: 0.5; }\n\
         .axis-label { font: 13px sans-serif; fill: #000000; }\n\
         .crosshair { stroke: #999999; stroke-width: 1; stroke-dasharray: 4 3; }\n\
         </style>\n",
    );
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        fmt(opts.width),
        fmt(opts.height)
    ));

    // origin crosshair at data (0,0)
    let (ox, oy) = geom.map(0.0, 0.0);
    svg.push_str(&format!(
        "<g class=\"crosshair\"><line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\
         <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/></g>\n",
        fmt(opts.margin),
        fmt(oy),
        fmt(opts.width - opts.margin),
        fmt(oy),
        fmt(ox),
        fmt(opts.margin),
        fmt(ox),
        fmt(opts.height - opts.margin)
    ));

    let mode_note = match opts.rate_mode {
        RateMode::Raw => "",
        RateMode::Modified => ", modified",
    };
    svg.push_str(&format!(
        "<text class=\"axis-label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">Axis {} ({:.2}%{})</text>\n",
        fmt(opts.width / 2.0),
        fmt(opts.height - opts.margin / 3.0),
        ax + 1,
        rate_x,
        mode_note
    ));
    svg.push_str(&format!(
        "<text class=\"axis-label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">Axis {} ({:.2}%{})</text>\n",
        fmt(opts.margin / 3.0),
        fmt(opts.height / 2.0),
        fmt(opts.margin / 3.0),
        fmt(opts.height / 2.0),
        ay + 1,
        rate_y,
        mode_note
    ));

    if opts.show_rows {
        svg.push_str("<g class=\"respondents\">\n");
        for i in 0..model.n_rows() {
            let (x, y) = geom.map(model.row_coords()[(i, ax)], model.row_coords()[(i, ay)]);
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2\"/>\n",
                fmt(x),
                fmt(y)
            ));
        }
        svg.push_str("</g>\n");
    }

    if opts.show_cols {
        svg.push_str("<g class=\"modalities\">\n");
        for j in 0..model.n_cols() {
            let (x, y) = geom.map(model.col_coords()[(j, ax)], model.col_coords()[(j, ay)]);
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"6\" height=\"6\"/>\n",
                fmt(x - 3.0),
                fmt(y - 3.0)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                fmt(x + 5.0),
                fmt(y - 4.0),
                escape(&model.col_labels()[j])
            ));
        }
        svg.push_str("</g>\n");
    }

    if opts.show_supplementary {
        svg.push_str("<g class=\"supplementary\">\n");
        for p in &supplementary {
            let (x, y) = geom.map(p.coords[ax], p.coords[ay]);
            svg.push_str(&format!(
                "<polygon points=\"{},{} {},{} {},{}\"/>\n",
                fmt(x),
                fmt(y - 4.0),
                fmt(x - 4.0),
                fmt(y + 4.0),
                fmt(x + 4.0),
                fmt(y + 4.0)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                fmt(x + 5.0),
                fmt(y - 4.0),
                escape(&p.label)
            ));
        }
        svg.push_str("</g>\n");
    }

    if !centroids.is_empty() {
        svg.push_str("<g class=\"centroids\">\n");
        for p in &centroids {
            let (x, y) = geom.map(p.coords[ax], p.coords[ay]);
            svg.push_str(&format!(
                "<polygon points=\"{},{} {},{} {},{} {},{}\"/>\n",
                fmt(x),
                fmt(y - 5.0),
                fmt(x + 5.0),
                fmt(y),
                fmt(x),
                fmt(y + 5.0),
                fmt(x - 5.0),
                fmt(y)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                fmt(x + 7.0),
                fmt(y - 5.0),
                escape(&p.label)
            ));
        }
        svg.push_str("</g>\n");
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Marker roles drawn by [`factor_plane_svg`], exposed for front ends that
/// want a legend.
pub fn marker_legend() -> &'static [(&'static str, &'static str)] {
    &[
        ("respondents", "circle"),
        ("modalities", "square"),
        ("supplementary", "triangle"),
        ("centroids", "diamond"),
    ]
}
