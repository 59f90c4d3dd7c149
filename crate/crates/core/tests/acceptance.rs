//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p plotminer --test acceptance -- --nocapture` to see
//! the per-criterion lines and timings.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plotminer::anneal::{anneal, cost, match_placements, AnnealConfig, Placement};
use plotminer::derive_seed;
use plotminer::features::FamilySet;
use plotminer::plotseg::{
    connected_components, detect_axes, remove_lines, segment_regions, shape_template,
    BuiltinShape, TemplateLibrary,
};
use plotminer::raster::BinaryImage;
use plotminer::svm::{cross_validate, fit_minmax, hinge_objective, hinge_subgradient, train};
use plotminer::synth::{
    eval_disambiguation, gen_classifier_corpus, gen_overlap_image, gen_plot_image, OverlapSpec,
    PlotSpec,
};

fn report(criterion: usize, ok: bool, detail: &str, elapsed: Duration, budget: Duration) {
    let verdict = if ok && elapsed <= budget { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion} {verdict}: {detail} [{:.2}s of {:.0}s budget]",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its runtime budget: {:.2}s > {:.0}s",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
}

fn dt_library() -> TemplateLibrary {
    let mut lib = TemplateLibrary::new();
    lib.push(shape_template(BuiltinShape::Diamond, 11)).unwrap();
    lib.push(shape_template(BuiltinShape::Triangle, 11)).unwrap();
    lib
}

/// Single-pixel template: placements of it can paint any canvas bit pattern.
fn pixel_library() -> TemplateLibrary {
    let mut mask = BinaryImage::zeros(1, 1);
    mask.set(0, 0, 1);
    let mut lib = TemplateLibrary::new();
    lib.push(plotminer::plotseg::ShapeTemplate::new("px", mask).unwrap())
        .unwrap();
    lib
}

fn random_binary(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> BinaryImage {
    let mut img = BinaryImage::zeros(w, h);
    for r in 0..h {
        for c in 0..w {
            if rng.random::<f64>() < density {
                img.set(r, c, 1);
            }
        }
    }
    img
}

fn hamming(a: &BinaryImage, b: &BinaryImage) -> u64 {
    a.data()
        .iter()
        .zip(b.data())
        .filter(|(x, y)| x != y)
        .count() as u64
}

#[test]
fn criterion_1_cost_oracle_equivalence() {
    let start = Instant::now();
    let lib = pixel_library();
    let to_placements = |img: &BinaryImage| -> Vec<Placement> {
        img.foreground().map(|(r, c)| Placement::new("px", r, c)).collect()
    };

    let mut checked = 0usize;
    for b_bits in 0..16u32 {
        for c_bits in 0..16u32 {
            let mut target = BinaryImage::zeros(2, 2);
            let mut canvas = BinaryImage::zeros(2, 2);
            for k in 0..4 {
                if b_bits >> k & 1 == 1 {
                    target.set(k / 2, k % 2, 1);
                }
                if c_bits >> k & 1 == 1 {
                    canvas.set(k / 2, k % 2, 1);
                }
            }
            let got = cost(&target, &to_placements(&canvas), &lib).unwrap();
            assert_eq!(got, hamming(&target, &canvas), "2x2 case B={b_bits:04b} C={c_bits:04b}");
            checked += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let target = random_binary(&mut rng, 32, 32, 0.5);
        let canvas = random_binary(&mut rng, 32, 32, 0.5);
        let got = cost(&target, &to_placements(&canvas), &lib).unwrap();
        assert_eq!(got, hamming(&target, &canvas));
        checked += 1;
    }

    report(
        1,
        checked == 256 + 1000,
        &format!("cost equals the Hamming oracle on all {checked} matrix pairs"),
        start.elapsed(),
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_2_table4_reproduction() {
    let start = Instant::now();
    let lib = dt_library();
    let n_images = 20;
    let mut fully_recovered = 0usize;
    for i in 0..n_images {
        let spec = OverlapSpec {
            min_overlap_pairs: 1,
            seed: derive_seed(11, i as u64),
            ..OverlapSpec::with_counts(&[("diamond", 3), ("triangle", 2)])
        };
        let (target, truth) = gen_overlap_image(&spec, &lib).unwrap();
        let config = AnnealConfig {
            max_iterations: 10_000,
            temp_constant_e: 0.4,
            seed: derive_seed(77, i as u64),
            ..AnnealConfig::default()
        };
        let result = anneal(&target, &lib, &config).unwrap();
        let matched = match_placements(&result, &truth, 2);
        if matched.recall == 1.0 {
            fully_recovered += 1;
        }
    }
    let fraction = fully_recovered as f64 / n_images as f64;
    report(
        2,
        fraction >= 0.8,
        &format!(
            "{fully_recovered}/{n_images} images fully recovered within 2 px (10k iterations, e = 0.4)"
        ),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_3_table5_reproduction() {
    let start = Instant::now();
    let lib = dt_library();
    // 24 images x (3 diamonds + 3 triangles) = 72 + 72 shapes.
    let spec = OverlapSpec {
        min_overlap_pairs: 1,
        seed: 2024,
        ..OverlapSpec::with_counts(&[("diamond", 3), ("triangle", 3)])
    };
    let fast = AnnealConfig {
        max_iterations: 10_000,
        temp_constant_e: 0.4,
        seed: 7,
        ..AnnealConfig::default()
    };
    let fast_table = eval_disambiguation(24, &spec, &fast, 2, &lib).unwrap();
    let d_total: usize = fast_table.rows.iter().filter(|r| r.shape_id == "diamond").map(|r| r.total).sum();
    let t_total: usize = fast_table.rows.iter().filter(|r| r.shape_id == "triangle").map(|r| r.total).sum();
    let d_recall = fast_table.recall_of("diamond").unwrap();
    let t_recall = fast_table.recall_of("triangle").unwrap();

    let slow = AnnealConfig {
        max_iterations: 30_000,
        temp_constant_e: 0.2,
        seed: 7,
        ..AnnealConfig::default()
    };
    let slow_table = eval_disambiguation(24, &spec, &slow, 2, &lib).unwrap();
    let monotone = slow_table.overall() >= fast_table.overall() - 0.1;

    let ok = d_total >= 70 && t_total >= 70 && d_recall >= 0.85 && t_recall >= 0.85 && monotone;
    report(
        3,
        ok,
        &format!(
            "diamond {:.1}% of {d_total}, triangle {:.1}% of {t_total}; slow {:.1}% vs fast {:.1}% overall",
            d_recall * 100.0,
            t_recall * 100.0,
            slow_table.overall() * 100.0,
            fast_table.overall() * 100.0
        ),
        start.elapsed(),
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_4_feature_family_direction() {
    let start = Instant::now();
    let lib = plotminer::plotseg::builtin_library();
    let params = plotminer::features::FeatureParams::default();
    let corpus = gen_classifier_corpus(200, 200, 404, &lib, &params).unwrap();
    let labels: Vec<i8> = corpus.iter().map(|c| c.label).collect();

    let accuracy_for = |mask: FamilySet| -> f64 {
        let xs: Vec<Vec<f64>> = corpus
            .iter()
            .map(|c| c.features.masked(mask).dense())
            .collect();
        cross_validate(&xs, &labels, 3, 1.0, 99).unwrap().0
    };
    let all = accuracy_for(FamilySet::ALL);
    let only_is = accuracy_for(FamilySet::IS_ONLY);
    let only_ca = accuracy_for(FamilySet::CA_ONLY);
    let only_ct = accuracy_for(FamilySet::CT_ONLY);

    let ok = all >= 90.0 && all >= only_is && all >= only_ca && all >= only_ct;
    report(
        4,
        ok,
        &format!(
            "3-fold CV accuracy: all {all:.2}%, IS {only_is:.2}%, CA {only_ca:.2}%, CT {only_ct:.2}%"
        ),
        start.elapsed(),
        Duration::from_secs(180),
    );
}

#[test]
fn criterion_5_axes_recovery() {
    let start = Instant::now();
    let lib = plotminer::plotseg::builtin_library();
    let shapes = ["diamond", "triangle", "square", "circle", "cross"];
    let n = 50;
    let mut good = 0usize;
    for i in 0..n {
        let seed = derive_seed(500, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = rng.random_range(100..140);
        let w = rng.random_range(100..140);
        let spec = PlotSpec {
            canvas: (h, w),
            axes: (
                rng.random_range(h * 7 / 10..h * 9 / 10),
                rng.random_range(w / 12..w / 5),
            ),
            series: vec![(
                shapes[rng.random_range(0..shapes.len())].to_string(),
                rng.random_range(4..10),
            )],
            noise: rng.random_range(0.0..0.005),
            caption: String::new(),
            connect: false,
            seed: derive_seed(seed, 1),
        };
        let (img, truth) = gen_plot_image(&spec, &lib).unwrap();
        let binary = plotminer::raster::binarize(&img, None);
        let Ok((x_axis, y_axis)) = detect_axes(&binary) else {
            continue;
        };
        // Ground-truth normal forms: horizontal row r -> rho = -r at theta 90;
        // vertical column c -> rho = c at theta 0.
        let rho_ok = (x_axis.rho - -(truth.axis_row as f64)).abs() <= 2.0
            && (y_axis.rho - truth.axis_col as f64).abs() <= 2.0;
        let d = (x_axis.orientation_deg - y_axis.orientation_deg).abs();
        let mutual = d.min(180.0 - d);
        if rho_ok && (88.0..=92.0).contains(&mutual) {
            good += 1;
        }
    }
    let fraction = good as f64 / n as f64;
    report(
        5,
        fraction >= 0.95,
        &format!("axes within 2 px and mutual angle in [88, 92] on {good}/{n} plots"),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_6_svm_solver_checks() {
    let start = Instant::now();

    // Subgradient vs central finite differences at 100 non-kink points.
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let xs: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            let c = if i < 20 { -2.0 } else { 2.0 };
            vec![
                c + rng.random_range(-1.0..1.0),
                c + rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]
        })
        .collect();
    let ys: Vec<i8> = (0..40).map(|i| if i < 20 { -1 } else { 1 }).collect();
    let (lo, range) = fit_minmax(&xs);
    let scaled: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            x.iter()
                .zip(lo.iter().zip(&range))
                .map(|(&v, (&l, &r))| if r > 0.0 { (v - l) / r } else { 0.0 })
                .collect()
        })
        .collect();
    let h = 1e-6;
    let mut checked = 0usize;
    let mut max_rel = 0.0f64;
    while checked < 100 {
        let w: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b: f64 = rng.random_range(-2.0..2.0);
        let near_kink = scaled.iter().zip(&ys).any(|(x, &y)| {
            let m = y as f64 * (w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b);
            (m - 1.0).abs() < 1e-4
        });
        if near_kink {
            continue;
        }
        let (gw, gb) = hinge_subgradient(&scaled, &ys, 1.0, &w, b);
        for d in 0..=3 {
            let fd = if d < 3 {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[d] += h;
                wm[d] -= h;
                (hinge_objective(&scaled, &ys, 1.0, &wp, b)
                    - hinge_objective(&scaled, &ys, 1.0, &wm, b))
                    / (2.0 * h)
            } else {
                (hinge_objective(&scaled, &ys, 1.0, &w, b + h)
                    - hinge_objective(&scaled, &ys, 1.0, &w, b - h))
                    / (2.0 * h)
            };
            let g = if d < 3 { gw[d] } else { gb };
            let rel = (fd - g).abs() / fd.abs().max(1.0);
            max_rel = max_rel.max(rel);
        }
        checked += 1;
    }
    let grad_ok = max_rel <= 1e-4;

    // XOR is not linearly separable: training accuracy caps at 3/4.
    let xor_x = vec![
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
    ];
    let xor_y = vec![-1i8, 1, 1, -1];
    let model = train(&xor_x, &xor_y, 1.0, 300, 6).unwrap();
    let xor_acc = xor_x
        .iter()
        .zip(&xor_y)
        .filter(|(x, &y)| model.predict(x).unwrap().0 == y)
        .count() as f64
        / 4.0;
    let xor_ok = xor_acc <= 0.75;

    // Separable corpus reaches full training accuracy.
    let model = train(&xs, &ys, 1.0, 300, 42).unwrap();
    let sep_acc = xs
        .iter()
        .zip(&ys)
        .filter(|(x, &y)| model.predict(x).unwrap().0 == y)
        .count() as f64
        / xs.len() as f64;
    let sep_ok = sep_acc == 1.0;

    report(
        6,
        grad_ok && xor_ok && sep_ok,
        &format!(
            "subgradient max rel err {max_rel:.2e} over {checked} points, XOR accuracy {xor_acc}, separable accuracy {sep_acc}"
        ),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_7_pipeline_integrity() {
    let start = Instant::now();
    let lib = dt_library();
    let n = 200;

    // Connected-component partition invariant.
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    for _ in 0..n {
        let density = rng.random_range(0.1..0.5);
        let img = random_binary(&mut rng, 28, 22, density);
        let comps = connected_components(&img);
        let mut rebuilt = BinaryImage::zeros(img.width(), img.height());
        let mut total = 0usize;
        for comp in &comps {
            total += comp.pixel_count;
            for (r, c) in comp.mask.foreground() {
                assert_eq!(rebuilt.get(comp.bbox.top + r, comp.bbox.left + c), 0);
                rebuilt.set(comp.bbox.top + r, comp.bbox.left + c, 1);
            }
        }
        assert_eq!(total, img.foreground_count());
        assert_eq!(rebuilt, img);
    }

    // Line removal never adds foreground.
    for _ in 0..n {
        let density = rng.random_range(0.05..0.4);
        let img = random_binary(&mut rng, 30, 30, density);
        let row = rng.random_range(0..30);
        let line = plotminer::features::LineSegment {
            rho: -(row as f64),
            theta_deg: 90.0,
            votes: 30,
            orientation_deg: 0.0,
        };
        let out = remove_lines(&img, &[line], 1.0);
        for (o, i) in out.data().iter().zip(img.data()) {
            assert!(o <= i, "line removal added foreground");
        }
    }

    // Region disjointness for detected axes.
    let mut region_checked = 0usize;
    let mut attempt = 0u64;
    while region_checked < n {
        attempt += 1;
        let mut axis_rng = ChaCha8Rng::seed_from_u64(derive_seed(701, attempt));
        let row = axis_rng.random_range(10..95);
        let col = axis_rng.random_range(4..80);
        let mut img = BinaryImage::zeros(100, 100);
        for c in 0..100 {
            img.set(row, c, 1);
        }
        for r in 0..100 {
            img.set(r, col, 1);
        }
        let axes = detect_axes(&img).unwrap();
        let Ok(regions) = segment_regions(&img, &axes) else {
            continue;
        };
        let boxes = [
            regions.plotting_region,
            regions.x_axis_region,
            regions.y_axis_region,
        ];
        for r in 0..100 {
            for c in 0..100 {
                let hits = boxes.iter().filter(|b| b.contains(r, c)).count();
                assert!(hits <= 1, "pixel in {hits} regions");
            }
        }
        region_checked += 1;
    }

    // Generator/renderer coherence.
    for i in 0..n {
        let spec = OverlapSpec {
            min_overlap_pairs: 1,
            seed: derive_seed(702, i as u64),
            ..OverlapSpec::with_counts(&[("diamond", 2), ("triangle", 2)])
        };
        let (img, truth) = gen_overlap_image(&spec, &lib).unwrap();
        assert_eq!(cost(&img, &truth, &lib).unwrap(), 0, "image != render(truth)");
    }

    // End-to-end determinism: generate -> anneal -> match, twice.
    for i in 0..n {
        let spec = OverlapSpec {
            min_overlap_pairs: 1,
            seed: derive_seed(703, i as u64),
            ..OverlapSpec::with_counts(&[("diamond", 2), ("triangle", 1)])
        };
        let config = AnnealConfig {
            max_iterations: 1500,
            seed: derive_seed(704, i as u64),
            ..AnnealConfig::default()
        };
        let (target, truth) = gen_overlap_image(&spec, &lib).unwrap();
        let a = anneal(&target, &lib, &config).unwrap();
        let b = anneal(&target, &lib, &config).unwrap();
        assert_eq!(a, b, "annealing is not deterministic");
        assert_eq!(
            match_placements(&a, &truth, 2),
            match_placements(&b, &truth, 2)
        );
    }

    report(
        7,
        true,
        &format!("partition, erasure-subset, region-disjointness, coherence and determinism held on {n} instances each"),
        start.elapsed(),
        Duration::from_secs(300),
    );
}
