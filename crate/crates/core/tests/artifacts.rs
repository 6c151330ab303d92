//! Serialization, report and plot artifacts: structure, determinism and the
//! declared viewport transform.

mod common;

use common::{random_table, seeded_rng};
use gda_core::ca::{fit_ca, fit_mca, fit_pca_standardized};
use gda_core::model_io;
use gda_core::plot::{factor_plane_svg, PlotGeometry, PlotOptions, RateMode};
use gda_core::report::{axis_report, ReportTarget};
use gda_core::tabular::{ColumnInfo, ColumnRole, ContingencyTable, IndicatorMatrix};
use nalgebra::DMatrix;

fn fixture_model() -> gda_core::FactorModel {
    let mut rng = seeded_rng(808);
    let counts = random_table(&mut rng, 5, 4, 9).map(|x| x + 1.0);
    let t = ContingencyTable::with_roles(
        counts,
        (0..5).map(|i| format!("r{i}")).collect(),
        (0..4).map(|j| format!("c{j}")).collect(),
        vec![
            ColumnRole::Main,
            ColumnRole::Main,
            ColumnRole::Main,
            ColumnRole::Main,
            ColumnRole::Supplementary,
        ],
        vec![ColumnRole::Main; 4],
    )
    .unwrap();
    fit_ca(&t, None).unwrap()
}

#[test]
fn model_json_round_trips_bit_exactly() {
    let model = fixture_model();
    let json = model_io::to_json(&model);
    let back = model_io::from_json(&json).unwrap();
    assert_eq!(model.eigenvalues(), back.eigenvalues());
    assert_eq!(model.total_inertia().to_bits(), back.total_inertia().to_bits());
    for i in 0..model.n_rows() {
        for l in 0..model.n_axes() {
            assert_eq!(
                model.row_coords()[(i, l)].to_bits(),
                back.row_coords()[(i, l)].to_bits()
            );
        }
    }
    assert_eq!(model.supplementary().len(), back.supplementary().len());
    // distances still work on the restored model
    assert_eq!(
        model.chi2_distance(0, 1).unwrap().to_bits(),
        back.chi2_distance(0, 1).unwrap().to_bits()
    );
    // and serializing again is byte-identical
    assert_eq!(json, model_io::to_json(&back));
}

#[test]
fn mca_model_json_carries_modified_rates() {
    let mut rng = seeded_rng(809);
    let n = 30;
    let mut data = DMatrix::zeros(n, 5);
    for i in 0..n {
        data[(i, (i + rng.random_range(0..2)) % 2)] = 1.0;
        data[(i, 2 + (i / 2 + rng.random_range(0..2)) % 3)] = 1.0;
    }
    use rand::Rng;
    let columns = (0..5)
        .map(|j| ColumnInfo {
            question_id: format!("q{}", if j < 2 { 1 } else { 2 }),
            modality: format!("m{j}"),
            role: ColumnRole::Main,
        })
        .collect();
    let ids = (0..n).map(|i| format!("i{i}")).collect();
    let ind = IndicatorMatrix::from_parts(data, columns, ids, 2).unwrap();
    let model = fit_mca(&ind, None).unwrap();
    let file = model_io::to_file(&model);
    assert_eq!(file.kind, "mca");
    assert_eq!(file.q_active, Some(2));
    assert!(file.modified_rates.is_some());
    let back = model_io::from_json(&model_io::to_json(&model)).unwrap();
    assert_eq!(back.kind().name(), "mca");
}

#[test]
fn pca_model_json_keeps_standardization() {
    let mut rng = seeded_rng(810);
    use rand::Rng;
    let data = DMatrix::from_fn(8, 3, |_, _| rng.random::<f64>() * 3.0 + 1.0);
    let model = fit_pca_standardized(
        &data,
        (0..8).map(|i| format!("i{i}")).collect(),
        vec!["a".into(), "b".into(), "c".into()],
        None,
    )
    .unwrap();
    let back = model_io::from_json(&model_io::to_json(&model)).unwrap();
    let values: Vec<f64> = (0..3).map(|j| data[(4, j)]).collect();
    let a = model.project_data_row("x", &values).unwrap();
    let b = back.project_data_row("x", &values).unwrap();
    for l in 0..model.n_axes() {
        assert_eq!(a.coords[l].to_bits(), b.coords[l].to_bits());
    }
}

#[test]
fn report_sorts_by_descending_contribution_then_label() {
    let model = fixture_model();
    for axis in 0..model.n_axes() {
        let report = axis_report(&model, axis, ReportTarget::Cols).unwrap();
        for w in report.lines.windows(2) {
            assert!(
                w[0].contribution > w[1].contribution
                    || (w[0].contribution == w[1].contribution && w[0].label <= w[1].label)
            );
        }
        let total: f64 = report.lines.iter().map(|l| l.contribution).sum();
        approx::assert_relative_eq!(total, 1.0, epsilon = 1e-10);
    }
}

#[test]
fn report_lists_supplementary_points_separately() {
    let model = fixture_model();
    let rows = axis_report(&model, 0, ReportTarget::Rows).unwrap();
    assert_eq!(rows.supplementary.len(), 1); // the supplementary table row
    assert_eq!(rows.lines.len(), 4); // main rows only
    let cols = axis_report(&model, 0, ReportTarget::Cols).unwrap();
    assert!(cols.supplementary.is_empty());
    assert_eq!(cols.lines.len(), 4);
}

#[test]
fn report_text_and_csv_are_deterministic() {
    let model = fixture_model();
    let a = axis_report(&model, 0, ReportTarget::Cols).unwrap();
    let b = axis_report(&model, 0, ReportTarget::Cols).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.to_csv().starts_with("label,role,contribution,coordinate,cos2\n"));
    // csv floats round-trip
    let line = a.to_csv().lines().nth(1).unwrap().to_string();
    let fields: Vec<&str> = line.split(',').collect();
    let parsed: f64 = fields[3].parse().unwrap();
    let original = a.lines[0].coordinate;
    assert_eq!(parsed.to_bits(), original.to_bits());
}

#[test]
fn svg_counts_markers_and_draws_the_crosshair() {
    let model = fixture_model();
    let opts = PlotOptions::default();
    let centroid = model.category_centroid("g1", &[0, 1]).unwrap();
    let svg = factor_plane_svg(&model, &opts, std::slice::from_ref(&centroid)).unwrap();

    // one circle per main row inside the respondents layer
    let respondents = svg
        .split("<g class=\"respondents\">")
        .nth(1)
        .unwrap()
        .split("</g>")
        .next()
        .unwrap();
    assert_eq!(respondents.matches("<circle").count(), model.n_rows());

    // modalities: one square + one text per main column
    let modalities = svg
        .split("<g class=\"modalities\">")
        .nth(1)
        .unwrap()
        .split("</g>")
        .next()
        .unwrap();
    assert_eq!(modalities.matches("<rect").count(), model.n_cols());

    // supplementary: one triangle
    let supp = svg
        .split("<g class=\"supplementary\">")
        .nth(1)
        .unwrap()
        .split("</g>")
        .next()
        .unwrap();
    assert_eq!(supp.matches("<polygon").count(), 1);

    // crosshair lines meet at the mapped origin
    assert!(svg.contains("class=\"crosshair\""));

    // determinism
    assert_eq!(
        svg,
        factor_plane_svg(&model, &opts, std::slice::from_ref(&centroid)).unwrap()
    );
}

#[test]
fn svg_centroid_markers_sit_at_the_declared_transform() {
    let model = fixture_model();
    let opts = PlotOptions::default();
    let centroids = vec![
        model.category_centroid("g1", &[0, 1]).unwrap(),
        model.category_centroid("g2", &[2, 3]).unwrap(),
    ];
    let svg = factor_plane_svg(&model, &opts, &centroids).unwrap();

    // rebuild the transform independently from the documented rule
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    for i in 0..model.n_rows() {
        xs.push(model.row_coords()[(i, 0)]);
        ys.push(model.row_coords()[(i, 1)]);
    }
    for j in 0..model.n_cols() {
        xs.push(model.col_coords()[(j, 0)]);
        ys.push(model.col_coords()[(j, 1)]);
    }
    for p in model.supplementary().iter().chain(&centroids) {
        xs.push(p.coords[0]);
        ys.push(p.coords[1]);
    }
    let bx = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let by = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let geom = PlotGeometry::from_bounds(bx, by, opts.width, opts.height, opts.margin);

    for c in &centroids {
        let (x, y) = geom.map(c.coords[0], c.coords[1]);
        let marker = format!(
            "<polygon points=\"{:.4},{:.4} {:.4},{:.4} {:.4},{:.4} {:.4},{:.4}\"/>",
            x,
            y - 5.0,
            x + 5.0,
            y,
            x,
            y + 5.0,
            x - 5.0,
            y
        );
        assert!(svg.contains(&marker), "missing centroid marker for {}", c.label);
    }
}

#[test]
fn svg_rejects_bad_axes_and_non_mca_modified_rates() {
    let model = fixture_model();
    let mut opts = PlotOptions::default();
    opts.axes = (0, 0);
    assert!(factor_plane_svg(&model, &opts, &[]).is_err());
    let mut opts = PlotOptions::default();
    opts.rate_mode = RateMode::Modified;
    assert!(factor_plane_svg(&model, &opts, &[]).is_err());
}
