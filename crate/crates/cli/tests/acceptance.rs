//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use coloc_core::dtw::{dba_barycenter, dtw_distance, in_band, ChannelSeries, DbaOptions};
use coloc_core::ena::{accumulate_connections, code_pairs, means_rotation, sphere_normalize, ConnectionVector};
use coloc_core::eval::{confusion_matrix, map_range, pr_curve};
use coloc_core::rng;
use coloc_core::stats::{
    exact_p, holm_adjust, normal_approx_p, permanova, rank_biserial, PermanovaOptions, PermutationScheme,
};
use coloc_core::{ActionTaxonomy, BoundingBox, Detection, FrameRecord, Level, TimelineMatrix};
use rand::Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got:.6}, expected {want} ± {tol}"))
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let mut argv = vec!["coloc"];
    argv.extend_from_slice(args);
    match coloc_cli::dispatch(argv) {
        0 => Ok(()),
        code => Err(format!("`{}` exited with {code}", args.join(" "))),
    }
}

const AGREEMENT: [(&str, f64, f64, f64); 8] = [
    ("Overall", 0.928, 0.939, 0.933),
    ("Using Computer", 0.980, 0.962, 0.971),
    ("Doc/Note Interaction", 0.875, 0.933, 0.903),
    ("Medi/Equip Interaction", 0.891, 0.953, 0.921),
    ("Patient Interaction", 0.852, 0.945, 0.896),
    ("Using Phone", 0.895, 0.944, 0.919),
    ("Sitting", 1.000, 1.000, 1.000),
    ("Other", 0.948, 0.911, 0.929),
];

fn agreement_table() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("irr.csv");
    let f = fixtures();
    let start = Instant::now();
    run_cli(&[
        "irr",
        "--a",
        f.join("agreement_a.jsonl").to_str().unwrap(),
        "--b",
        f.join("agreement_b.jsonl").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])?;
    let elapsed = start.elapsed();
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("irr.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let results = &report["results"];
    let mut rows: Vec<&Value> = vec![&results["overall"]];
    rows.extend(results["classes"].as_array().ok_or("no class rows")?);
    let mut checked = 0;
    for (class, p, r, f1) in AGREEMENT {
        let row = rows
            .iter()
            .find(|v| v["class"] == class)
            .ok_or_else(|| format!("row {class} missing"))?;
        within(&format!("{class} P"), row["precision"].as_f64().unwrap_or(f64::NAN), p, 0.0005)?;
        within(&format!("{class} R"), row["recall"].as_f64().unwrap_or(f64::NAN), r, 0.0005)?;
        within(&format!("{class} F1"), row["f1"].as_f64().unwrap_or(f64::NAN), f1, 0.0005)?;
        checked += 3;
    }
    let csv = fs::read_to_string(&out).map_err(|e| e.to_string())?;
    check(csv.lines().any(|l| l == "Overall,399,31,26,0.928,0.939,0.933"), || {
        "CSV Overall row differs".into()
    })?;
    check(elapsed < Duration::from_secs(1), || format!("runtime {elapsed:?} exceeds 1 s"))?;
    Ok(format!("{checked} values within ±0.0005 in {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

fn effect_sizes() -> Outcome {
    let cases = [
        (123.0, 40, 11, 0.441),
        (106.0, 40, 11, 0.518),
        (198.0, 30, 21, 0.371),
        (359.0, 40, 11, -0.632),
        (505.0, 30, 21, -0.603),
        (363.0, 40, 11, -0.650),
        (492.0, 30, 21, -0.562),
    ];
    for (u, n1, n2, r) in cases {
        within(&format!("U={u} n=({n1},{n2})"), rank_biserial(u, n1, n2), r, 0.001)?;
    }
    Ok("7 tuples within ±0.001".into())
}

fn holm_values() -> Outcome {
    let family = |smallest: f64, m: usize| -> Vec<f64> {
        let mut v = vec![smallest];
        v.extend((1..m).map(|i| 0.2 + 0.05 * i as f64));
        v
    };
    let a = holm_adjust(&family(0.0011, 11)).map_err(|e| e.to_string())?;
    within("m=11 raw 0.0011", a.adjusted[0], 0.0121, 0.0001)?;
    let b = holm_adjust(&family(0.000730, 11)).map_err(|e| e.to_string())?;
    within("m=11 raw 0.000730", b.adjusted[0], 0.00803, 0.0001)?;
    let c = holm_adjust(&family(0.027, 6)).map_err(|e| e.to_string())?;
    within("m=6 raw 0.027", c.adjusted[0], 0.163, 0.002)?;
    Ok(format!("{:.5}, {:.5}, {:.4}", a.adjusted[0], b.adjusted[0], c.adjusted[0]))
}

fn series(rows: &[Vec<f64>]) -> ChannelSeries {
    let d = rows[0].len();
    ChannelSeries::new("s", (0..d).map(|c| format!("c{c}")).collect(), rows).unwrap()
}

fn brute_dtw(a: &ChannelSeries, b: &ChannelSeries, band: f64) -> f64 {
    fn dist(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
    }
    // depth-first over every monotone path
    fn walk(a: &ChannelSeries, b: &ChannelSeries, band: f64, i: usize, j: usize, acc: f64, best: &mut f64) {
        if !in_band(i, j, a.len(), b.len(), band) {
            return;
        }
        let acc = acc + dist(a.row(i), b.row(j));
        if i + 1 == a.len() && j + 1 == b.len() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < a.len() {
            walk(a, b, band, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, band, i, j + 1, acc, best);
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, band, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, band, 0, 0, 0.0, &mut best);
    best
}

fn dtw_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng::seeded(2024);
    let fixtures = 250;
    let mut comparisons = 0;
    for f in 0..fixtures {
        let d = r.random_range(1..=2);
        let n = r.random_range(1..=6).max(2);
        let m = r.random_range(1..=6).max(2);
        let mut mk = |len: usize| -> Vec<Vec<f64>> {
            (0..len).map(|_| (0..d).map(|_| r.random_range(-3.0..3.0)).collect()).collect()
        };
        let a = series(&mk(n));
        let b = series(&mk(m));
        let diff = n.abs_diff(m) as f64;
        let mut previous = f64::INFINITY;
        for band in [diff, diff + 0.5, diff + 1.0, diff + 2.0, diff + 3.0, f64::INFINITY] {
            let got = dtw_distance(&a, &b, band).map_err(|e| format!("fixture {f}: {e}"))?.cost;
            let want = brute_dtw(&a, &b, band);
            check((got - want).abs() <= 1e-9, || format!("fixture {f} band {band}: dp {got} vs brute force {want}"))?;
            check(got <= previous + 1e-12, || format!("fixture {f}: cost rose from {previous} to {got} at band {band}"))?;
            previous = got;
            comparisons += 1;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), || format!("runtime {elapsed:?} exceeds 5 s"))?;
    Ok(format!("{fixtures} fixtures, {comparisons} band settings, exact to 1e-9, monotone, {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

fn dba_properties() -> Outcome {
    let mut r = rng::seeded(77);
    let opts = DbaOptions::default();
    let fixtures = 60;
    for f in 0..fixtures {
        let n = r.random_range(2..=6);
        let len = r.random_range(4..=12);
        let d = r.random_range(1..=3);
        let group: Vec<ChannelSeries> = (0..n)
            .map(|k| {
                let rows: Vec<Vec<f64>> = (0..len).map(|_| (0..d).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
                ChannelSeries::new(format!("u{k}"), (0..d).map(|c| format!("c{c}")).collect(), &rows).unwrap()
            })
            .collect();
        let target = r.random_range(4..=10);
        let p = dba_barycenter("g", &group, target, (0.1 * target as f64).ceil().max(1.0), &opts)
            .map_err(|e| format!("fixture {f}: {e}"))?;
        check(p.trace.windows(2).all(|w| w[1] <= w[0]), || format!("fixture {f}: inertia trace {:?} increases", p.trace))?;
    }

    let copy = series(&[vec![0.5, -1.0], vec![2.0, 0.0], vec![1.0, 1.5], vec![-0.5, 0.25]]);
    let copies: Vec<ChannelSeries> = (0..5)
        .map(|k| ChannelSeries::new(format!("c{k}"), copy.channels().to_vec(), &copy.to_rows()).unwrap())
        .collect();
    let p = dba_barycenter("g", &copies, 4, 1.0, &opts).map_err(|e| e.to_string())?;
    check(p.values == copy.data() && p.inertia == 0.0 && p.iterations == 1, || {
        format!("identical copies gave {:?}, inertia {}, {} iterations", p.values, p.inertia, p.iterations)
    })?;

    let pair = [
        ChannelSeries::new("a", vec!["c".into()], &[vec![0.0], vec![0.0], vec![0.0]]).unwrap(),
        ChannelSeries::new("b", vec!["c".into()], &[vec![2.0], vec![2.0], vec![2.0]]).unwrap(),
    ];
    let p = dba_barycenter("g", &pair, 3, 1.0, &opts).map_err(|e| e.to_string())?;
    check(p.values == [1.0, 1.0, 1.0], || format!("two constant series gave {:?}", p.values))?;
    Ok(format!("{fixtures} random fixtures non-increasing; fixed point exact; [1,1,1] reproduced"))
}

fn brute_connections(rows: &[Vec<u8>], k: usize, window: usize) -> Vec<f64> {
    let pairs = code_pairs(k);
    let mut out = vec![0.0; pairs.len()];
    for t in 0..rows.len() {
        let from = t.saturating_sub(window - 1);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let mut linked = false;
            for s in from..=t {
                if (rows[t][i] == 1 && rows[s][j] == 1) || (rows[t][j] == 1 && rows[s][i] == 1) {
                    linked = true;
                }
            }
            if linked {
                out[p] += 1.0;
            }
        }
    }
    out
}

fn check_timeline(rows: Vec<Vec<u8>>, k: usize, window: usize) -> Result<(), String> {
    let codes = (0..k).map(|c| format!("c{c}")).collect();
    let want = brute_connections(&rows, k, window);
    let tl = TimelineMatrix::from_rows("u", 0, codes, rows).map_err(|e| e.to_string())?;
    let got = accumulate_connections(&tl, window).map_err(|e| e.to_string())?;
    check(got.values == want, || format!("window {window}: {:?} vs brute force {want:?}", got.values))
}

fn ena_oracle() -> Outcome {
    let mut exhaustive = 0usize;
    for k in 2..=4usize {
        for t in 1..=5usize {
            let bits = k * t;
            for mask in 0u32..(1 << bits) {
                let rows: Vec<Vec<u8>> = (0..t)
                    .map(|r| (0..k).map(|c| ((mask >> (r * k + c)) & 1) as u8).collect())
                    .collect();
                check_timeline(rows, k, 6)?;
                exhaustive += 1;
            }
        }
    }
    let mut r = rng::seeded(31);
    let mut sampled = 0;
    for _ in 0..3000 {
        let k = r.random_range(2..=4);
        let t = r.random_range(6..=10);
        let window = r.random_range(1..=7);
        let rows: Vec<Vec<u8>> = (0..t).map(|_| (0..k).map(|_| u8::from(r.random_bool(0.4))).collect()).collect();
        check_timeline(rows, k, window)?;
        sampled += 1;
    }

    let mut rotations = 0;
    let mut worst = 0.0f64;
    for f in 0..120 {
        let n = r.random_range(4..=14);
        let p = r.random_range(3..=10);
        let mut levels: Vec<Level> = (0..n).map(|_| if r.random_bool(0.5) { Level::High } else { Level::Low }).collect();
        levels[0] = Level::High;
        levels[1] = Level::Low;
        let vectors: Vec<ConnectionVector> = (0..n)
            .map(|i| {
                let raw = ConnectionVector {
                    unit_id: format!("u{i}"),
                    values: (0..p).map(|_| r.random_range(0.0..10.0)).collect(),
                    normalized: false,
                };
                sphere_normalize(&raw).0
            })
            .collect();
        let dims = r.random_range(1..p);
        let space = means_rotation(&vectors, &levels, dims).map_err(|e| format!("fixture {f}: {e}"))?;
        for d in 1..space.axes.len() {
            let gap = group_mean(&space.scores(d, Level::High)) - group_mean(&space.scores(d, Level::Low));
            worst = worst.max(gap.abs());
        }
        rotations += 1;
    }
    check(worst < 1e-9, || format!("group means differ by {worst:e} beyond the first dimension"))?;
    Ok(format!(
        "{exhaustive} exhaustive + {sampled} sampled timelines match; {rotations} rotations, max residual gap {worst:.1e}"
    ))
}

fn group_mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn permanova_oracle() -> Outcome {
    let mut r = rng::seeded(5);
    let b = 999usize;
    let mut fixtures = 0;
    let mut worst_z = 0.0f64;
    for f in 0..12u64 {
        let n = r.random_range(5..=8);
        let shift = r.random_range(0.0..2.0);
        let labels: Vec<u8> = (0..n).map(|i| u8::from(i % 2 == 0)).collect();
        let units: Vec<Vec<f64>> = labels
            .iter()
            .map(|&g| (0..3).map(|_| r.random_range(0.0..1.0) + shift * f64::from(g)).collect())
            .collect();
        let exact = permanova(&units, &labels, &PermanovaOptions { scheme: PermutationScheme::Exact, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let mc = permanova(
            &units,
            &labels,
            &PermanovaOptions {
                scheme: PermutationScheme::MonteCarlo,
                permutations: b,
                seed: 100 + f,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let se = (exact.p * (1.0 - exact.p) / b as f64).sqrt();
        let gap = (mc.p - exact.p).abs();
        check(gap <= 3.0 * se, || format!("fixture {f}: Monte Carlo p {} vs exact {} (3 SE = {})", mc.p, exact.p, 3.0 * se))?;
        if se > 0.0 {
            worst_z = worst_z.max(gap / se);
        }

        // rigid motion: rotate the first two coordinates and translate everything
        let (s, c) = (0.7f64.sin(), 0.7f64.cos());
        let moved: Vec<Vec<f64>> = units
            .iter()
            .map(|u| vec![c * u[0] - s * u[1] + 4.0, s * u[0] + c * u[1] - 2.5, u[2] + 10.0])
            .collect();
        let again = permanova(&moved, &labels, &PermanovaOptions { scheme: PermutationScheme::Exact, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let rel = (again.pseudo_f - exact.pseudo_f).abs() / exact.pseudo_f.abs().max(1e-300);
        check(rel <= 1e-9, || format!("fixture {f}: F changed by {rel:e} under a rigid motion"))?;
        fixtures += 1;
    }
    let twins = vec![vec![0.0, 1.0], vec![3.0, 2.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![3.0, 2.0], vec![1.0, 1.0]];
    let same = permanova(&twins, &[0, 0, 0, 1, 1, 1], &PermanovaOptions::default()).map_err(|e| e.to_string())?;
    check(same.pseudo_f.abs() < 1e-12, || format!("identical groups gave F = {}", same.pseudo_f))?;
    Ok(format!("{fixtures} fixtures, worst |MC - exact| = {worst_z:.2} SE; F = 0 for identical groups; rigid-motion invariant"))
}

fn mann_whitney_exactness() -> Outcome {
    let mut worst = (0.0f64, 0usize, 0usize, 0usize);
    let mut splits = 0;
    for total in 2..=12usize {
        for n1 in 1..total {
            let n2 = total - n1;
            let no_ties = vec![1; total];
            for u in 0..=(n1 * n2) {
                let gap = (normal_approx_p(u as f64, n1, n2, &no_ties) - exact_p(u as f64, n1, n2)).abs();
                if gap > worst.0 {
                    worst = (gap, n1, n2, u);
                }
                splits += 1;
            }
        }
    }
    let (gap, n1, n2, u) = worst;
    check(gap <= 0.01, || {
        format!("largest |normal - exact| = {gap:.4} at n1={n1}, n2={n2}, U={u} over {splits} (split, U) cases")
    })?;
    Ok(format!("{splits} (split, U) cases within 0.01"))
}

fn frame(t: f64, dets: &[(&str, Option<f64>, [f64; 4])]) -> FrameRecord {
    FrameRecord {
        session_id: "s".into(),
        t,
        source: "x".into(),
        detections: dets
            .iter()
            .map(|(l, c, b)| Detection::new(*l, *c, BoundingBox::new(b[0], b[1], b[2], b[3]).unwrap()).unwrap())
            .collect(),
    }
}

fn detection_metrics() -> Outcome {
    let tax = ActionTaxonomy::new(vec!["A".into(), "B".into(), "C".into()]).unwrap();
    let boxes = [[0.0, 0.0, 10.0, 10.0], [20.0, 0.0, 30.0, 10.0], [40.0, 0.0, 50.0, 10.0], [0.0, 20.0, 10.0, 30.0]];
    let labels = ["A", "B", "C", "A"];
    let mut gt = Vec::new();
    let mut perfect = Vec::new();
    for t in 0..6 {
        let g: Vec<_> = boxes.iter().zip(labels).map(|(b, l)| (l, None, *b)).collect();
        let p: Vec<_> = boxes
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(k, (b, l))| (l, Some(0.5 + 0.05 * k as f64), *b))
            .collect();
        gt.push(frame(t as f64, &g));
        perfect.push(frame(t as f64, &p));
    }
    let map50 = map_range(&perfect, &gt, &tax, &[0.5]).map_err(|e| e.to_string())?.mean;
    let map_all = map_range(&perfect, &gt, &tax, &coloc_core::eval::coco_thresholds()).map_err(|e| e.to_string())?.mean;
    check(map50 == Some(1.0) && map_all == Some(1.0), || format!("perfect detector: {map50:?} / {map_all:?}"))?;

    // a noisy detector, then the same with every confidence scaled by 0.37
    let mut r = rng::seeded(12);
    let noisy: Vec<FrameRecord> = gt
        .iter()
        .map(|f| {
            let mut dets: Vec<(&str, Option<f64>, [f64; 4])> = Vec::new();
            for (b, l) in boxes.iter().zip(labels) {
                if r.random_bool(0.7) {
                    let jitter = r.random_range(0.0..4.0);
                    let label = if r.random_bool(0.8) { l } else { "B" };
                    dets.push((label, Some(r.random_range(0.05..1.0)), [b[0] + jitter, b[1], b[2] + jitter, b[3]]));
                }
            }
            dets.push(("C", Some(r.random_range(0.05..1.0)), [60.0, 60.0, 70.0, 70.0]));
            frame(f.t, &dets)
        })
        .collect();
    let scaled: Vec<FrameRecord> = noisy
        .iter()
        .map(|f| {
            let mut f = f.clone();
            for d in &mut f.detections {
                d.confidence = d.confidence.map(|c| c * 0.37);
            }
            f
        })
        .collect();
    for class in ["A", "B", "C"] {
        let a = pr_curve(&noisy, &gt, class, 0.5).map_err(|e| e.to_string())?.map(|c| c.ap);
        let b = pr_curve(&scaled, &gt, class, 0.5).map_err(|e| e.to_string())?.map(|c| c.ap);
        check(a == b, || format!("class {class}: AP {a:?} changed to {b:?} after rescaling"))?;
    }

    let cm = confusion_matrix(&noisy, &gt, &tax, 0.25, 0.5, true).map_err(|e| e.to_string())?;
    for c in 0..cm.labels.len() {
        let s = cm.column_sum(c);
        check(s == 0.0 || (s - 1.0).abs() <= 1e-9, || format!("confusion column {} sums to {s}", cm.labels[c]))?;
    }

    let a = [0.0, 0.0, 10.0, 10.0];
    let b = [20.0, 0.0, 30.0, 10.0];
    let far = [100.0, 100.0, 110.0, 110.0];
    let gt3 = vec![frame(0.0, &[("X", None, a), ("X", None, b)])];
    let pred3 = vec![frame(0.0, &[("X", Some(0.9), a), ("X", Some(0.8), far), ("X", Some(0.7), b)])];
    let ap = pr_curve(&pred3, &gt3, "X", 0.5).map_err(|e| e.to_string())?.map(|c| c.ap).unwrap_or(f64::NAN);
    within("3-detection AP", ap, 5.0 / 6.0, 1e-12)?;
    Ok("perfect mAP = 1 at both ranges; AP rank-invariant; columns sum to 1; AP = 5/6".into())
}

fn pipeline(seed: &str) -> Result<(), String> {
    let f = fixtures();
    let log = f.join("corpus.jsonl");
    let cfg = f.join("corpus_config.json");
    let p = |name: &str| format!("out/{name}");
    let tl = p("timelines");
    run_cli(&["timeline", "--log", log.to_str().unwrap(), "--config", cfg.to_str().unwrap(), "--mode", "spatial", "--out", &tl])?;
    let groups = ["--timelines", &tl, "--groups", cfg.to_str().unwrap()];
    let (ena_out, ena_svg) = (p("ena.json"), p("networks.svg"));
    let mut ena = vec!["ena"];
    ena.extend(groups);
    ena.extend(["--window", "6", "--out", &ena_out, "--svg", &ena_svg]);
    run_cli(&ena)?;
    let (dtw_out, dtw_svg) = (p("dtw.json"), p("heatmaps.svg"));
    let mut dtw = vec!["dtw"];
    dtw.extend(groups);
    dtw.extend(["--lengths", "20,40", "--band", "0.1", "--boot", "20", "--seed", seed, "--out", &dtw_out, "--svg", &dtw_svg]);
    run_cli(&dtw)?;
    let stats_out = p("stats.csv");
    let mut stats = vec!["stats"];
    stats.extend(groups);
    stats.extend(["--mode", "spatial", "--permutations", "999", "--seed", seed, "--out", &stats_out]);
    run_cli(&stats)?;
    let tl_report = p("timelines/timeline.json");
    run_cli(&[
        "report",
        "--inputs",
        &tl_report,
        &ena_out,
        &dtw_out,
        &p("stats.json"),
        "--out",
        &p("report.json"),
    ])
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn end_to_end_determinism() -> Outcome {
    let start = Instant::now();
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    // identical relative output paths, so run reports echo identical arguments
    let cwd = std::env::current_dir().map_err(|e| e.to_string())?;
    for dir in [first.path(), second.path()] {
        std::env::set_current_dir(dir).map_err(|e| e.to_string())?;
        let outcome = pipeline("7");
        std::env::set_current_dir(&cwd).map_err(|e| e.to_string())?;
        outcome?;
    }
    let elapsed = start.elapsed();
    let a = files_under(first.path());
    let b = files_under(second.path());
    check(a == b, || format!("output sets differ: {a:?} vs {b:?}"))?;
    for rel in &a {
        let x = fs::read(first.path().join(rel)).map_err(|e| e.to_string())?;
        let y = fs::read(second.path().join(rel)).map_err(|e| e.to_string())?;
        check(x == y, || format!("{} differs between runs", rel.display()))?;
    }
    check(elapsed < Duration::from_secs(60), || format!("two runs took {elapsed:?}"))?;
    Ok(format!("{} files byte-identical across two runs, {:.1} s total", a.len(), elapsed.as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("agreement table reproduction", agreement_table),
        ("effect-size reproduction", effect_sizes),
        ("Holm reproduction", holm_values),
        ("DTW oracle equivalence", dtw_oracle),
        ("DBA properties", dba_properties),
        ("ENA oracle equivalence", ena_oracle),
        ("PERMANOVA oracle", permanova_oracle),
        ("Mann-Whitney exactness", mann_whitney_exactness),
        ("detection-metric properties", detection_metrics),
        ("end-to-end determinism", end_to_end_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
