//! Acceptance suite: one test per acceptance criterion, each printing a
//! pass line when its checks hold. Reference implementations here are
//! deliberately independent of the library's metric code paths.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use propeval::data_model::{Category, Dataset, GroundTruthInstance, ImageRecord, ProposalSet};
use propeval::diagnostics::{bias_capacity, bias_capacity_simulation, three_regime_eval};
use propeval::geometry::{iou, BoundingBox, ScoredBox};
use propeval::metrics::{
    abo, auc, average_recall, best_overlaps, mabo, recall_at, vus, EvaluationConfig,
    ThresholdComparison,
};
use propeval::proposers::{random_proposer, DmpConfig};
use propeval::synth::{generate_dataset, CategorySizeParams, SynthConfig};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

fn pass(line: &str) {
    println!("[PASS] {line}");
}

// ---------------------------------------------------------------------------
// independent brute-force reference
// ---------------------------------------------------------------------------

struct RawWorld {
    gt: Vec<Vec<(u32, [f64; 4])>>,
    proposals: Vec<Vec<([f64; 4], f64)>>,
}

fn ref_iou(a: [f64; 4], b: [f64; 4]) -> f64 {
    let iw = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let ih = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    inter / ((a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter)
}

fn ref_best(world: &RawWorld, m: usize) -> Vec<(u32, f64)> {
    let mut out = Vec::new();
    for (gts, props) in world.gt.iter().zip(&world.proposals) {
        for (cat, g) in gts {
            let mut best = 0.0f64;
            for (p, _) in props.iter().take(m) {
                let v = ref_iou(*g, *p);
                if v > best {
                    best = v;
                }
            }
            out.push((*cat, best));
        }
    }
    out
}

fn ref_recall(best: &[(u32, f64)], t: f64, strict: bool) -> f64 {
    if best.is_empty() {
        return 0.0;
    }
    best.iter()
        .filter(|(_, b)| if strict { *b > t } else { *b >= t })
        .count() as f64
        / best.len() as f64
}

fn ref_trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|p| (p[1].0 - p[0].0) * (p[0].1 + p[1].1) / 2.0)
        .sum()
}

fn ref_auc(best: &[(u32, f64)], thresholds: &[f64], strict: bool) -> f64 {
    let pts: Vec<(f64, f64)> = thresholds
        .iter()
        .map(|&t| (t, ref_recall(best, t, strict)))
        .collect();
    ref_trapezoid(&pts) / (thresholds[thresholds.len() - 1] - thresholds[0])
}

fn ref_abo(best: &[(u32, f64)], category: Option<u32>) -> f64 {
    let vals: Vec<f64> = best
        .iter()
        .filter(|(c, _)| category.is_none_or(|cat| *c == cat))
        .map(|(_, b)| *b)
        .collect();
    if vals.is_empty() {
        0.0
    } else {
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

fn ref_mabo(best: &[(u32, f64)]) -> f64 {
    let mut classes: Vec<u32> = best.iter().map(|(c, _)| *c).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.is_empty() {
        0.0
    } else {
        classes.iter().map(|&c| ref_abo(best, Some(c))).sum::<f64>() / classes.len() as f64
    }
}

/// Mean recall over [lo, hi]: trapezoid on a grid of the given step.
fn ref_fine_mean_recall(best: &[(u32, f64)], lo: f64, hi: f64, step: f64, strict: bool) -> f64 {
    let n = ((hi - lo) / step).round() as usize;
    let pts: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            (t, ref_recall(best, t, strict))
        })
        .collect();
    ref_trapezoid(&pts) / (hi - lo)
}

fn ref_fine_vus(world: &RawWorld, budgets: &[usize], strict: bool) -> f64 {
    let pts: Vec<(f64, f64)> = budgets
        .iter()
        .map(|&m| {
            let best = ref_best(world, m);
            (
                (m as f64).ln(),
                ref_fine_mean_recall(&best, 0.5, 1.0, 1e-4, strict),
            )
        })
        .collect();
    ref_trapezoid(&pts) / (pts[pts.len() - 1].0 - pts[0].0)
}

fn random_world(rng: &mut impl Rng, categories: u32) -> (Dataset, ProposalSet, RawWorld) {
    let num_images = rng.random_range(1..=10);
    let (w, h) = (100.0f64, 80.0f64);
    let mut images = Vec::new();
    let mut instances = Vec::new();
    let mut per_image = BTreeMap::new();
    let mut raw_gt = Vec::new();
    let mut raw_props = Vec::new();
    let mut next_instance = 0u64;

    let random_box = |rng: &mut dyn rand::RngCore| loop {
        let x0: f64 = rng.random_range(0.0..w);
        let x1: f64 = rng.random_range(0.0..w);
        let y0: f64 = rng.random_range(0.0..h);
        let y1: f64 = rng.random_range(0.0..h);
        if let Ok(b) = BoundingBox::new(x0.min(x1), y0.min(y1), x0.max(x1), y0.max(y1)) {
            return b;
        }
    };

    for img in 0..num_images {
        let image_id = format!("img_{img:02}");
        images.push(ImageRecord {
            image_id: image_id.clone(),
            width: w as u32,
            height: h as u32,
        });
        let mut gt_row = Vec::new();
        for _ in 0..rng.random_range(0..=5) {
            let bbox = random_box(rng);
            let category_id = rng.random_range(0..categories);
            gt_row.push((category_id, bbox.corners()));
            instances.push(GroundTruthInstance {
                instance_id: next_instance,
                image_id: image_id.clone(),
                category_id,
                bbox,
            });
            next_instance += 1;
        }
        let mut prop_row = Vec::new();
        let mut boxes = Vec::new();
        for rank in 0..rng.random_range(0..=20) {
            let bbox = random_box(rng);
            let score: f64 = rng.random();
            prop_row.push((bbox.corners(), score));
            boxes.push(ScoredBox::new(bbox, score, rank).unwrap());
        }
        prop_row.sort_by(|a, b| b.1.total_cmp(&a.1));
        raw_gt.push(gt_row);
        raw_props.push(prop_row);
        per_image.insert(image_id, boxes);
    }

    let category_table = (0..categories)
        .map(|id| Category {
            id,
            name: format!("cat_{id}"),
            supercategory: None,
        })
        .collect();
    let dataset =
        Dataset::new(images, category_table, instances, (0..categories).collect()).unwrap();
    (
        dataset,
        ProposalSet::new("acceptance", per_image),
        RawWorld {
            gt: raw_gt,
            proposals: raw_props,
        },
    )
}

// ---------------------------------------------------------------------------
// criterion 1: metric-oracle equivalence
// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_metric_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = Pcg64Mcg::seed_from_u64(0xACCE_0001);
    let budgets = vec![1usize, 4, 9, 20];
    for case in 0..200 {
        let strict = case % 2 == 0;
        let cfg = EvaluationConfig {
            proposal_budgets: budgets.clone(),
            threshold_comparison: if strict {
                ThresholdComparison::StrictGreater
            } else {
                ThresholdComparison::GreaterEqual
            },
            ..Default::default()
        };
        let (dataset, proposals, raw) = random_world(&mut rng, 3);
        let table = best_overlaps(&dataset, &proposals, &budgets).unwrap();

        for &m in &budgets {
            let best = ref_best(&raw, m);
            for &t in &[0.3, 0.5, 0.75, 0.9, 1.0] {
                let ours = recall_at(&table, t, m, cfg.threshold_comparison).unwrap();
                let want = ref_recall(&best, t, strict);
                assert!(
                    (ours - want).abs() < 1e-12,
                    "recall@{t} M={m}: {ours} vs {want}"
                );
            }
            let ours = auc(&table, &cfg, m).unwrap();
            let want = ref_auc(&best, &cfg.iou_thresholds, strict);
            assert!((ours - want).abs() < 1e-12, "auc M={m}: {ours} vs {want}");

            let ours = abo(&table, None, m).unwrap();
            assert!((ours - ref_abo(&best, None)).abs() < 1e-12, "abo M={m}");
            let ours = mabo(&table, m).unwrap();
            assert!((ours - ref_mabo(&best)).abs() < 1e-12, "mabo M={m}");

            let ours = average_recall(&table, m).unwrap();
            let want = ref_fine_mean_recall(&best, 0.5, 1.0, 1e-4, strict);
            assert!((ours - want).abs() < 1e-3, "ar M={m}: {ours} vs {want}");
        }
        let ours = vus(&table, &cfg).unwrap();
        let want = ref_fine_vus(&raw, &budgets, strict);
        assert!((ours - want).abs() < 1e-3, "vus: {ours} vs {want}");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "oracle equivalence took {elapsed:?}, budget is 10 s"
    );
    pass(&format!(
        "metric-oracle equivalence: 200 random instances within 1e-12 (1e-3 for AR/VUS) in {elapsed:.2?}"
    ));
}

// ---------------------------------------------------------------------------
// criterion 2: IOU rasterization oracle
// ---------------------------------------------------------------------------

#[test]
fn acceptance_02_iou_rasterization_oracle() {
    fn cell_in(b: &BoundingBox, x: i64, y: i64) -> bool {
        let (xf, yf) = (x as f64, y as f64);
        xf >= b.x_min() && xf < b.x_max() && yf >= b.y_min() && yf < b.y_max()
    }
    fn rasterized(a: &BoundingBox, b: &BoundingBox) -> f64 {
        let x_lo = a.x_min().min(b.x_min()) as i64;
        let x_hi = a.x_max().max(b.x_max()).ceil() as i64;
        let y_lo = a.y_min().min(b.y_min()) as i64;
        let y_hi = a.y_max().max(b.y_max()).ceil() as i64;
        let (mut inter, mut union) = (0u64, 0u64);
        for x in x_lo..x_hi {
            for y in y_lo..y_hi {
                let (ia, ib) = (cell_in(a, x, y), cell_in(b, x, y));
                inter += u64::from(ia && ib);
                union += u64::from(ia || ib);
            }
        }
        if union == 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }

    let mut rng = Pcg64Mcg::seed_from_u64(0xACCE_0002);
    let int_box = |rng: &mut Pcg64Mcg| loop {
        let x0 = rng.random_range(0i64..40);
        let x1 = rng.random_range(0i64..40);
        let y0 = rng.random_range(0i64..40);
        let y1 = rng.random_range(0i64..40);
        if x0 != x1 && y0 != y1 {
            return BoundingBox::new(
                x0.min(x1) as f64,
                y0.min(y1) as f64,
                x0.max(x1) as f64,
                y0.max(y1) as f64,
            )
            .unwrap();
        }
    };
    for _ in 0..1000 {
        let a = int_box(&mut rng);
        let b = int_box(&mut rng);
        let analytic = iou(&a, &b);
        let counted = rasterized(&a, &b);
        assert!(
            (analytic - counted).abs() < 1e-9,
            "{a:?} vs {b:?}: {analytic} vs {counted}"
        );
    }
    pass("IOU oracle: 1,000 integer box pairs match pixel-rasterization counting within 1e-9");
}

// ---------------------------------------------------------------------------
// criterion 3: monotonicity suite
// ---------------------------------------------------------------------------

#[test]
fn acceptance_03_monotonicity_suite() {
    let mut rng = Pcg64Mcg::seed_from_u64(0xACCE_0003);
    let budgets = vec![1usize, 3, 8, 20];
    let cfg = EvaluationConfig {
        proposal_budgets: budgets.clone(),
        ..Default::default()
    };
    for _ in 0..100 {
        let (dataset, proposals, _) = random_world(&mut rng, 3);
        let table = best_overlaps(&dataset, &proposals, &budgets).unwrap();
        for comparison in [
            ThresholdComparison::StrictGreater,
            ThresholdComparison::GreaterEqual,
        ] {
            for &t in &cfg.iou_thresholds {
                let series: Vec<f64> = budgets
                    .iter()
                    .map(|&m| recall_at(&table, t, m, comparison).unwrap())
                    .collect();
                assert!(series.windows(2).all(|w| w[1] >= w[0]));
            }
            for &m in &budgets {
                let series: Vec<f64> = cfg
                    .iou_thresholds
                    .iter()
                    .map(|&t| recall_at(&table, t, m, comparison).unwrap())
                    .collect();
                assert!(series.windows(2).all(|w| w[1] <= w[0]));
            }
        }
        for row in table.rows() {
            assert!(row.best.windows(2).all(|w| w[1] >= w[0]));
        }
        for &m in &budgets {
            for value in [
                auc(&table, &cfg, m).unwrap(),
                abo(&table, None, m).unwrap(),
                mabo(&table, m).unwrap(),
                average_recall(&table, m).unwrap(),
            ] {
                assert!((0.0..=1.0).contains(&value));
            }
        }
        assert!((0.0..=1.0).contains(&vus(&table, &cfg).unwrap()));
    }
    pass("monotonicity: 100 random tables monotone in M and t with all metrics in [0, 1]");
}

// ---------------------------------------------------------------------------
// criterion 4: gameability inversion on the pinned fixture
// ---------------------------------------------------------------------------

fn gameability_world(num_images: usize, seed: u64) -> Dataset {
    let mut size_params = Vec::new();
    for i in 0..20 {
        if i < 10 {
            size_params.push(CategorySizeParams {
                mean_relative_side: 0.16,
                jitter: 0.3,
            });
        } else {
            size_params.push(CategorySizeParams {
                mean_relative_side: 0.72,
                jitter: 0.12,
            });
        }
    }
    let cfg = SynthConfig {
        seed,
        num_images,
        image_size: (500, 500),
        num_categories: 20,
        category_frequency_weights: vec![1.0; 20],
        category_size_params: size_params,
        instances_per_image: (4, 10),
        annotated_fraction_of_categories: 0.5,
    };
    generate_dataset(&cfg).unwrap().0
}

#[test]
fn acceptance_04_gameability_inversion() {
    let started = Instant::now();
    let full = gameability_world(200, 0xD11A_605E);
    let annotated: BTreeSet<u32> = (0..10).collect();
    let cfg = EvaluationConfig {
        proposal_budgets: vec![1, 3, 10, 32, 100],
        ..Default::default()
    };
    let dmp = propeval::proposers::oracle_dmp(
        &full,
        &DmpConfig {
            seen_categories: annotated.clone(),
            hit_rate: 0.95,
            jitter_sigma: 0.04,
            false_positive_rate: 2.0,
            nms_threshold: 0.5,
            budget: 100,
            seed: 0xBEEF,
        },
    )
    .unwrap();
    let random = random_proposer(&full, 100, 0xF00D).unwrap();

    let report = three_regime_eval(&full, &annotated, &[dmp, random], &cfg).unwrap();
    let rows = |name: &str| {
        &report
            .methods
            .iter()
            .find(|m| m.method == name)
            .unwrap()
            .per_budget
    };
    let dmp_rows = rows("oracle_dmp");
    let random_rows = rows("random");
    let at_100 = dmp_rows.iter().position(|r| r.budget == 100).unwrap();

    let subset_gap =
        dmp_rows[at_100].auc_annotated_subset - random_rows[at_100].auc_annotated_subset;
    assert!(
        subset_gap >= 0.20,
        "annotated-subset AUC@100 gap {subset_gap:.4} below 0.20"
    );
    let complement_gap = random_rows[at_100].auc_complement - dmp_rows[at_100].auc_complement;
    assert!(
        complement_gap >= 0.10,
        "complement AUC@100 gap {complement_gap:.4} below 0.10"
    );
    assert!(
        report.inversions.iter().any(|inv| inv.budget == 100
            && inv.method_a == "oracle_dmp"
            && inv.method_b == "random"),
        "expected a ranking inversion at budget 100"
    );
    for (d, r) in dmp_rows.iter().zip(random_rows.iter()) {
        assert!(
            d.drop > r.drop,
            "budget {}: dmp drop {:.4} not above random drop {:.4}",
            d.budget,
            d.drop,
            r.drop
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {elapsed:?}, budget is 30 s"
    );
    pass(&format!(
        "gameability inversion: subset gap {subset_gap:.3} >= 0.20, complement gap {complement_gap:.3} >= 0.10, dmp drop largest everywhere, in {elapsed:.2?}"
    ));
}

// ---------------------------------------------------------------------------
// criterion 5: bias-capacity trend
// ---------------------------------------------------------------------------

fn spearman(points: &[(f64, f64)]) -> f64 {
    let rank = |values: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut ranks = vec![0.0; values.len()];
        for (r, &i) in order.iter().enumerate() {
            ranks[i] = r as f64;
        }
        ranks
    };
    let xs: Vec<f64> = points.iter().map(|(x, _)| *x).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| *y).collect();
    let rx = rank(&xs);
    let ry = rank(&ys);
    let n = points.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let cov: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let var: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    cov / var
}

#[test]
fn acceptance_05_bias_capacity_trend() {
    let started = Instant::now();
    let cfg = EvaluationConfig {
        proposal_budgets: vec![1, 3, 10, 32, 100],
        ..Default::default()
    };
    let seen_counts = [2usize, 4, 6, 8, 10];
    let mut rhos = Vec::new();
    let mut control_slopes = Vec::new();
    for seed in 0..5u64 {
        let world_cfg = SynthConfig {
            seed: 0x1A5_0000 + seed,
            num_images: 100,
            image_size: (400, 400),
            num_categories: 10,
            category_frequency_weights: vec![1.0; 10],
            category_size_params: vec![
                CategorySizeParams {
                    mean_relative_side: 0.25,
                    jitter: 0.3,
                };
                10
            ],
            instances_per_image: (3, 8),
            annotated_fraction_of_categories: 1.0,
        };
        let (full, _) = generate_dataset(&world_cfg).unwrap();
        let base = DmpConfig {
            seen_categories: BTreeSet::new(),
            hit_rate: 0.9,
            jitter_sigma: 0.05,
            false_positive_rate: 2.0,
            nms_threshold: 0.5,
            budget: 100,
            seed: 0xD1_0000 + seed,
        };
        let result = bias_capacity_simulation(&full, &seen_counts, &base, &cfg).unwrap();
        let summary = result
            .auc_vs_seen_count
            .iter()
            .find(|c| c.budget == 100)
            .unwrap();
        let points = &summary.curve.points;
        assert!(
            points.windows(2).all(|w| w[1].1 > w[0].1),
            "seed {seed}: auc@100 not strictly increasing in k: {points:?}"
        );
        rhos.push(spearman(points));

        let runs: Vec<(usize, ProposalSet)> = seen_counts
            .iter()
            .map(|&k| {
                let p = random_proposer(&full, 100, 0xC0_0000 + seed * 100 + k as u64)
                    .unwrap()
                    .with_method_name(format!("random_k{k}"));
                (k, p)
            })
            .collect();
        let control = bias_capacity(&full, &runs, &cfg).unwrap();
        let summary = control
            .auc_vs_seen_count
            .iter()
            .find(|c| c.budget == 100)
            .unwrap();
        control_slopes.push(ols_slope(&summary.curve.points));
    }
    let mean_rho = rhos.iter().sum::<f64>() / rhos.len() as f64;
    assert!(
        mean_rho >= 0.9,
        "mean Spearman rho {mean_rho:.3} below 0.9 ({rhos:?})"
    );
    let mean_slope = control_slopes.iter().sum::<f64>() / control_slopes.len() as f64;
    assert!(
        mean_slope.abs() < 0.02,
        "control slope {mean_slope:.4} not flat ({control_slopes:?})"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "took {elapsed:?}, budget is 60 s"
    );
    pass(&format!(
        "bias capacity: mean Spearman rho {mean_rho:.3} >= 0.9, control slope {mean_slope:.4} within 0.02, in {elapsed:.2?}"
    ));
}

// ---------------------------------------------------------------------------
// criterion 6: parser fidelity
// ---------------------------------------------------------------------------

#[test]
fn acceptance_06_parser_fidelity() {
    // VOC: two documents, three objects over two categories.
    let voc_a = "<annotation><filename>a.jpg</filename>\
                 <size><width>500</width><height>400</height><depth>3</depth></size>\
                 <object><name>chair</name><bndbox><xmin>10</xmin><ymin>20</ymin>\
                 <xmax>110</xmax><ymax>220</ymax></bndbox></object>\
                 <object><name>lamp</name><bndbox><xmin>5</xmin><ymin>5</ymin>\
                 <xmax>50</xmax><ymax>50</ymax></bndbox></object></annotation>";
    let voc_b = "<annotation><filename>b.jpg</filename>\
                 <size><width>300</width><height>200</height><depth>3</depth></size>\
                 <object><name>chair</name><bndbox><xmin>1</xmin><ymin>1</ymin>\
                 <xmax>30</xmax><ymax>40</ymax></bndbox></object></annotation>";
    let voc = propeval::data_model::voc::parse_voc_documents(
        &[("a.xml", voc_a), ("b.xml", voc_b)],
        Default::default(),
    )
    .unwrap();
    let expected_voc = r#"{
  "images": [
    {
      "id": "a.jpg",
      "width": 500,
      "height": 400
    },
    {
      "id": "b.jpg",
      "width": 300,
      "height": 200
    }
  ],
  "categories": [
    {
      "id": 0,
      "name": "chair",
      "supercategory": null
    },
    {
      "id": 1,
      "name": "lamp",
      "supercategory": null
    }
  ],
  "annotated_categories": [
    0,
    1
  ],
  "annotations": [
    {
      "id": 0,
      "image_id": "a.jpg",
      "category_id": 0,
      "bbox": [
        10.0,
        20.0,
        111.0,
        221.0
      ]
    },
    {
      "id": 1,
      "image_id": "a.jpg",
      "category_id": 1,
      "bbox": [
        5.0,
        5.0,
        51.0,
        51.0
      ]
    },
    {
      "id": 2,
      "image_id": "b.jpg",
      "category_id": 0,
      "bbox": [
        1.0,
        1.0,
        31.0,
        41.0
      ]
    }
  ]
}
"#;
    let canonical_voc = propeval::data_model::canonical::to_canonical_string(&voc);
    assert_eq!(canonical_voc, expected_voc, "VOC canonical bytes differ");

    // COCO: two images, supercategories, sparse source ids remapped densely.
    let coco = r#"{
        "images": [{"id": 10, "width": 64, "height": 64}, {"id": 11, "width": 32, "height": 32}],
        "annotations": [
            {"id": 3, "image_id": 10, "category_id": 5, "bbox": [10, 20, 30, 40]},
            {"id": 1, "image_id": 11, "category_id": 9, "bbox": [1, 1, 8, 8.5]}
        ],
        "categories": [
            {"id": 5, "name": "tv", "supercategory": "electronics"},
            {"id": 9, "name": "cat", "supercategory": "animal"}
        ]
    }"#;
    let coco = propeval::data_model::coco::parse_coco_str(coco, "fixture.json").unwrap();
    let expected_coco = r#"{
  "images": [
    {
      "id": "10",
      "width": 64,
      "height": 64
    },
    {
      "id": "11",
      "width": 32,
      "height": 32
    }
  ],
  "categories": [
    {
      "id": 0,
      "name": "tv",
      "supercategory": "electronics"
    },
    {
      "id": 1,
      "name": "cat",
      "supercategory": "animal"
    }
  ],
  "annotated_categories": [
    0,
    1
  ],
  "annotations": [
    {
      "id": 1,
      "image_id": "11",
      "category_id": 1,
      "bbox": [
        1.0,
        1.0,
        9.0,
        9.5
      ]
    },
    {
      "id": 3,
      "image_id": "10",
      "category_id": 0,
      "bbox": [
        10.0,
        20.0,
        40.0,
        60.0
      ]
    }
  ]
}
"#;
    let canonical_coco = propeval::data_model::canonical::to_canonical_string(&coco);
    assert_eq!(canonical_coco, expected_coco, "COCO canonical bytes differ");

    // canonical load → save is the identity on both
    for text in [expected_voc, expected_coco] {
        let ds = propeval::data_model::canonical::from_canonical_str(text, "fixture").unwrap();
        assert_eq!(
            propeval::data_model::canonical::to_canonical_string(&ds),
            text
        );
    }

    // proposal CSV round trip is the identity
    let mut rng = Pcg64Mcg::seed_from_u64(0xACCE_0006);
    let mut per_image = BTreeMap::new();
    for img in 0..4 {
        let mut boxes = Vec::new();
        for rank in 0..25 {
            let x0: f64 = rng.random_range(0.0..90.0);
            let y0: f64 = rng.random_range(0.0..70.0);
            let w: f64 = rng.random_range(0.5..10.0);
            let h: f64 = rng.random_range(0.5..10.0);
            boxes.push(
                ScoredBox::new(
                    BoundingBox::new(x0, y0, x0 + w, y0 + h).unwrap(),
                    rng.random::<f64>(),
                    rank,
                )
                .unwrap(),
            );
        }
        per_image.insert(format!("img_{img}"), boxes);
    }
    let set = ProposalSet::new("fixture", per_image);
    let csv_text = propeval::data_model::proposals::proposals_to_csv_string(&set);
    let back =
        propeval::data_model::proposals::proposals_from_csv_str(&csv_text, "fixture", "t.csv")
            .unwrap();
    assert_eq!(back, set, "proposal CSV round trip not the identity");
    assert_eq!(
        propeval::data_model::proposals::proposals_to_csv_string(&back),
        csv_text
    );

    pass("parser fidelity: VOC and COCO fixtures match hand-built canonical bytes; CSV round trip is identity");
}

// ---------------------------------------------------------------------------
// criterion 7: CLI determinism across repeats and thread counts
// ---------------------------------------------------------------------------

fn propeval_bin() -> &'static str {
    env!("CARGO_BIN_EXE_propeval")
}

fn run_cli(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(propeval_bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn propeval")
}

/// All regular files under `dir`, relative path -> bytes.
fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

#[test]
fn acceptance_07_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    std::fs::write(
        dir.join("synth.toml"),
        "seed = 7\nnum_images = 10\nimage_size = [320, 240]\nnum_categories = 4\n\
         category_frequency_weights = [2.0, 1.0, 1.0, 1.0]\ninstances_per_image = [2, 5]\n\
         annotated_fraction_of_categories = 0.5\n\
         [[category_size_params]]\nmean_relative_side = 0.3\njitter = 0.3\n\
         [[category_size_params]]\nmean_relative_side = 0.25\njitter = 0.2\n\
         [[category_size_params]]\nmean_relative_side = 0.5\njitter = 0.2\n\
         [[category_size_params]]\nmean_relative_side = 0.45\njitter = 0.1\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("dmp.toml"),
        "seen_categories = [0, 1]\nhit_rate = 0.9\njitter_sigma = 0.05\n\
         false_positive_rate = 2.0\nnms_threshold = 0.5\nbudget = 50\nseed = 99\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("evalcfg.toml"),
        "proposal_budgets = [1, 3, 10, 32]\n",
    )
    .unwrap();

    // fixture inputs for the data-consuming commands
    let seed_run = run_cli(
        dir,
        &[
            "synth",
            "--synth-config",
            "synth.toml",
            "--dmp-config",
            "dmp.toml",
            "--random-proposals",
            "40",
            "--out",
            "world",
        ],
    );
    assert!(seed_run.status.success(), "{seed_run:?}");

    let commands: Vec<(&str, Vec<&str>)> = vec![
        (
            "synth",
            vec![
                "synth",
                "--synth-config",
                "synth.toml",
                "--dmp-config",
                "dmp.toml",
                "--random-proposals",
                "40",
            ],
        ),
        (
            "eval",
            vec![
                "eval",
                "--dataset",
                "world/dataset_full.json",
                "--proposals",
                "world/proposals_oracle_dmp.csv",
                "world/proposals_random.csv",
                "--config",
                "evalcfg.toml",
            ],
        ),
        (
            "gameability",
            vec![
                "gameability",
                "--dataset",
                "world/dataset_full.json",
                "--subset",
                "cat_00,cat_01",
                "--proposals",
                "world/proposals_oracle_dmp.csv",
                "world/proposals_random.csv",
                "--config",
                "evalcfg.toml",
            ],
        ),
        (
            "bias-capacity",
            vec![
                "bias-capacity",
                "--simulate",
                "--synth-config",
                "synth.toml",
                "--dmp-config",
                "dmp.toml",
                "--seen-counts",
                "1,2,3",
                "--config",
                "evalcfg.toml",
            ],
        ),
        (
            "stats",
            vec![
                "stats",
                "--dataset",
                "world/dataset_full.json",
                "--subset",
                "cat_00,cat_01",
            ],
        ),
        (
            "finegrained",
            vec![
                "finegrained",
                "--dataset",
                "world/dataset_full.json",
                "--proposals",
                "world/proposals_oracle_dmp.csv",
                "--key",
                "size",
                "--budget",
                "32",
            ],
        ),
    ];

    for (name, args) in &commands {
        let mut outputs: Vec<BTreeMap<String, Vec<u8>>> = Vec::new();
        for (run_idx, threads) in ["1", "1", "4", "8"].iter().enumerate() {
            let out_dir = format!("out_{name}_{run_idx}");
            let mut full_args: Vec<&str> = args.clone();
            full_args.push("--out");
            full_args.push(&out_dir);
            full_args.push("--threads");
            full_args.push(threads);
            let output = run_cli(dir, &full_args);
            assert!(
                output.status.success(),
                "{name} run {run_idx} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
            outputs.push(dir_contents(&dir.join(&out_dir)));
        }
        for later in &outputs[1..] {
            assert_eq!(
                outputs[0].keys().collect::<Vec<_>>(),
                later.keys().collect::<Vec<_>>(),
                "{name}: file sets differ"
            );
            for (file, bytes) in &outputs[0] {
                assert_eq!(
                    bytes, &later[file],
                    "{name}: {file} differs between runs/thread counts"
                );
            }
        }
    }

    // convert writes a single output file; check it the same way
    let mut converted: Vec<Vec<u8>> = Vec::new();
    for (run_idx, threads) in ["1", "1", "4", "8"].iter().enumerate() {
        let out_file = format!("conv_{run_idx}.json");
        let output = run_cli(
            dir,
            &[
                "convert",
                "--input",
                "world/proposals_random.csv",
                "--input-format",
                "proposals-csv",
                "--output",
                &out_file,
                "--output-format",
                "proposals-json",
                "--threads",
                threads,
            ],
        );
        assert!(output.status.success());
        converted.push(std::fs::read(dir.join(&out_file)).unwrap());
    }
    assert!(converted.windows(2).all(|w| w[0] == w[1]));

    // reports validate against the schema (manifest embedded)
    for report in [
        "out_eval_0/eval_report.json",
        "out_gameability_0/gameability_report.json",
        "out_bias-capacity_0/bias_capacity.json",
        "out_stats_0/stats.json",
        "out_finegrained_0/finegrained.json",
    ] {
        let value: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.join(report)).unwrap()).unwrap();
        propeval_cli::report::validate_report(&value).unwrap_or_else(|e| panic!("{report}: {e}"));
    }

    pass("CLI determinism: every command byte-identical across repeated runs and --threads 1/4/8");
}

// ---------------------------------------------------------------------------
// criterion 8: best-overlap throughput
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_throughput() {
    // 1,000 images x 1,000 proposals x 5 GT each: ~5M IOU evaluations.
    let num_images = 1000usize;
    let per_image_proposals = 1000usize;
    let gt_per_image = 5usize;
    let mut rng = Pcg64Mcg::seed_from_u64(0xACCE_0008);

    let mut images = Vec::with_capacity(num_images);
    let mut instances = Vec::with_capacity(num_images * gt_per_image);
    let mut per_image = BTreeMap::new();
    let mut next_id = 0u64;
    for img in 0..num_images {
        let image_id = format!("img_{img:04}");
        images.push(ImageRecord {
            image_id: image_id.clone(),
            width: 640,
            height: 480,
        });
        for _ in 0..gt_per_image {
            let x0: f64 = rng.random_range(0.0..600.0);
            let y0: f64 = rng.random_range(0.0..440.0);
            let w: f64 = rng.random_range(5.0..40.0);
            let h: f64 = rng.random_range(5.0..40.0);
            instances.push(GroundTruthInstance {
                instance_id: next_id,
                image_id: image_id.clone(),
                category_id: 0,
                bbox: BoundingBox::new(x0, y0, (x0 + w).min(640.0), (y0 + h).min(480.0)).unwrap(),
            });
            next_id += 1;
        }
        let mut boxes = Vec::with_capacity(per_image_proposals);
        for rank in 0..per_image_proposals {
            let x0: f64 = rng.random_range(0.0..600.0);
            let y0: f64 = rng.random_range(0.0..440.0);
            let w: f64 = rng.random_range(5.0..60.0);
            let h: f64 = rng.random_range(5.0..60.0);
            boxes.push(
                ScoredBox::new(
                    BoundingBox::new(x0, y0, (x0 + w).min(640.0), (y0 + h).min(480.0)).unwrap(),
                    rng.random::<f64>(),
                    rank,
                )
                .unwrap(),
            );
        }
        per_image.insert(image_id, boxes);
    }
    let categories = vec![Category {
        id: 0,
        name: "thing".into(),
        supercategory: None,
    }];
    let dataset = Dataset::new(images, categories, instances, [0].into()).unwrap();
    let proposals = ProposalSet::new("throughput", per_image);
    let budgets = vec![1usize, 10, 100, 1000];

    let single_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let started = Instant::now();
    let single = single_pool.install(|| best_overlaps(&dataset, &proposals, &budgets).unwrap());
    let single_elapsed = started.elapsed();
    assert!(
        single_elapsed.as_secs_f64() < 2.0,
        "single-threaded best_overlaps took {single_elapsed:?}, budget is 2 s"
    );

    let quad_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let started = Instant::now();
    let quad = quad_pool.install(|| best_overlaps(&dataset, &proposals, &budgets).unwrap());
    let quad_elapsed = started.elapsed();
    let speedup = single_elapsed.as_secs_f64() / quad_elapsed.as_secs_f64();

    // identical results regardless of thread count
    assert_eq!(single.rows().len(), quad.rows().len());
    for (a, b) in single.rows().iter().zip(quad.rows()) {
        assert_eq!(a.instance_id, b.instance_id);
        assert_eq!(a.best, b.best);
    }

    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    if cores >= 4 {
        assert!(
            speedup >= 2.5,
            "4-thread speedup {speedup:.2}x below near-linear on {cores} cores"
        );
        pass(&format!(
            "throughput: 5M IOU in {single_elapsed:.2?} single-threaded; 4-thread speedup {speedup:.2}x"
        ));
    } else {
        pass(&format!(
            "throughput: 5M IOU in {single_elapsed:.2?} single-threaded; speedup check skipped ({cores} core(s) available, measured {speedup:.2}x)"
        ));
    }
}
