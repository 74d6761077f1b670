//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::fs;
use std::panic;
use std::time::{Duration, Instant};

use cfmetric::RayonExecutor;
use cfmetric_core::cantor::{
    admissible_words, fundamental_length_bounds, gap, holder_report_with, layer_mass, sample_word, schedule,
    ConstructionParams, MassMode, ScheduleMode,
};
use cfmetric_core::cf::{continuants, cylinder, cylinder_length, last_continuants, rational_to_f64, tail_measure, Word};
use cfmetric_core::mc::{digit_frequencies, hit_fraction_with, EventFamily, EventTag, SampleStream};
use cfmetric_core::measure::{hn_measures, product_tail_measure, HVariant};
use cfmetric_core::pressure::{
    dimension_with, ln_lambda, pressure, profile_table, s_n_root, transfer_apply, Functional, OperatorState,
    PotentialSpec,
};
use cfmetric_core::Error;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exec() -> RayonExecutor {
    RayonExecutor::new(None).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, max_len: u64, max_q: u64) -> Word {
    let len = rng.next_u64() % (max_len + 1);
    let q: Vec<u64> = (0..len).map(|_| 1 + rng.next_u64() % max_q).collect();
    Word::from_u64s(&q).unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases = 10_000;
    for _ in 0..cases {
        let max_q = 1 + rng.next_u64() % 5000;
        let w = random_word(&mut rng, 25, max_q);
        let t = continuants(&w);
        for i in -1..(w.order() as isize) {
            let want = if i.rem_euclid(2) == 0 { -1 } else { 1 };
            ensure(t.determinant(i) == BigInt::from(want), || format!("determinant at {i} for {w}"))?;
        }

        let v = random_word(&mut rng, 12, 100);
        let q = |x: &Word| last_continuants(x).2;
        let (quv, prod) = (q(&w.concat(&v)), q(&w) * q(&v));
        ensure(prod <= quv && quv <= &prod * 2u32, || format!("concatenation ratio for {w} | {v}"))?;

        let m = 1 + rng.next_u64() % 40;
        let mut sum = tail_measure(&w, &BigUint::from(m)).unwrap();
        for a in 1..m {
            sum += cylinder_length(&w.pushed(BigUint::from(a)));
        }
        ensure(sum == cylinder_length(&w), || format!("partition identity for {w}, m = {m}"))?;

        ensure(cylinder(&w).length() == cylinder_length(&w), || format!("length formula for {w}"))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!("{cases} cases exact in {:.1}s", t.as_secs_f64()))
}

fn criterion_2() -> Check {
    let want = (3.0 - 5f64.sqrt()) / 2.0;
    let mut worst: f64 = 0.0;
    for b in [1.5, 2.0, 10.0] {
        let r = s_n_root(1, &PotentialSpec::new(b, Functional::F2, 1).unwrap(), 1e-13).map_err(|e| e.to_string())?;
        worst = worst.max((r.value - want).abs());
    }
    ensure(worst <= 1e-10, || format!("root error {worst:e}"))?;
    let ln_gamma = ((5f64.sqrt() - 1.0) / 2.0).ln();
    let mut worst_p: f64 = 0.0;
    for s in [0.5, 0.75, 1.0] {
        let (p, _) = pressure(s, 1, 1e-13).map_err(|e| e.to_string())?;
        worst_p = worst_p.max((p - 2.0 * s * ln_gamma).abs());
    }
    ensure(worst_p <= 1e-8, || format!("pressure error {worst_p:e}"))?;
    Ok(format!("root error {worst:.1e}, pressure error {worst_p:.1e}"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in 1..=8u64 {
        for s in [0.6, 0.8, 1.0] {
            let mut state = OperatorState::constant(s, m, 64);
            for n in 1..=8usize {
                state = transfer_apply(&state).map_err(|e| e.to_string())?;
                let exact = ln_lambda(n, m, s).map_err(|e| e.to_string())?.exp();
                let rel = (state.at_zero() - exact).abs() / exact;
                worst = worst.max(rel);
                ensure(rel <= 1e-9, || format!("M={m} n={n} s={s}: relative gap {rel:e}"))?;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!("worst relative gap {worst:.1e} in {:.1}s", t.as_secs_f64()))
}

fn criterion_4() -> Check {
    let ex = exec();
    let grid = [1.5, 2.0, 4.0, 16.0, 256.0];
    let rows = profile_table(&ex, &grid, 64, 1e-9).map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    for r in &rows {
        let v = r.ordered();
        for k in 0..3 {
            if v[k].lo > v[k + 1].hi {
                problems.push(format!("B={}: s({})={:.6} > s({})={:.6}", r.b, v[k].g, v[k].value, v[k + 1].g, v[k + 1].value));
            }
        }
        for d in v {
            if !(d.value > 0.5 && d.value < 1.0) {
                problems.push(format!("B={}: s({})={:.6} outside (1/2, 1)", r.b, d.g, d.value));
            }
        }
    }
    for w in rows.windows(2) {
        if w[1].f2.value >= w[0].f2.value {
            problems.push(format!("s(F2) not decreasing from B={} to B={}", w[0].b, w[1].b));
        }
    }
    let near_one = dimension_with(&ex, &PotentialSpec::new(1.01, Functional::F2, 64).unwrap(), 1e-9)
        .map_err(|e| e.to_string())?
        .value;
    let spread = near_one - rows[4].f2.value;
    if spread < 0.2 {
        problems.push(format!("s(F2, 1.01) - s(F2, 256) = {spread:.4} < 0.2"));
    }
    ensure(problems.is_empty(), || problems.join("; "))?;
    Ok(format!("all orderings hold, spread {spread:.4}"))
}

fn criterion_5() -> Check {
    let prefix = Word::from_u64s(&[1, 3]).unwrap();
    let len = rational_to_f64(&cylinder_length(&prefix));
    let mut widest: f64 = 0.0;
    for l in [100u64, 1_000, 10_000, 100_000] {
        let lr = BigRational::from_integer(BigInt::from(l));
        let lf = l as f64;
        let p = rational_to_f64(&product_tail_measure(&prefix, &lr).map_err(|e| e.to_string())?);
        let shape = lf * p / len - lf.ln();
        ensure((-5.0..=5.0).contains(&shape), || format!("product shape {shape} at l={l}"))?;
        let h = hn_measures(&prefix, &lr, 1e-7, HVariant::H).map_err(|e| e.to_string())?;
        let ht = hn_measures(&prefix, &lr, 1e-7, HVariant::HTilde).map_err(|e| e.to_string())?;
        widest = widest.max(h.relative_width()).max(ht.relative_width());
        for (name, m, scale) in [("H", &h, lf), ("H~", &ht, lf / lf.ln())] {
            ensure(m.relative_width() <= 1e-6, || format!("{name} width {} at l={l}", m.relative_width()))?;
            let (lo, hi) = (scale * m.lower_f64() / len, scale * m.upper_f64() / len);
            ensure(lo >= 0.05 && hi <= 20.0, || format!("{name} shape [{lo}, {hi}] at l={l}"))?;
        }
    }
    Ok(format!("all shapes in range, widest bracket {widest:.1e}"))
}

fn geometry_checks(params: &ConstructionParams, words: &[cfmetric_core::cantor::AdmissibleWord]) -> Result<usize, String> {
    let mut n = 0;
    for w in words {
        let lb = fundamental_length_bounds(w, params).map_err(|e| e.to_string())?;
        ensure(lb.holds(), || format!("length bounds fail at {}: {lb:?}", w.word()))?;
        match gap(w, params) {
            Ok(g) => ensure(g.holds(), || format!("gap fails at {}", w.word()))?,
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(e.to_string()),
        }
        n += 1;
    }
    Ok(n)
}

fn criterion_6() -> Check {
    let ex = exec();
    let mut instances = 0;
    let mut worst_mass: f64 = 0.0;
    let toys = [
        schedule(2, 3, 2.0, ScheduleMode::Scaled(1)),
        schedule(1, 4, 3.0, ScheduleMode::Scaled(1)),
        schedule(2, 2, 1.5, ScheduleMode::Scaled(2)),
    ];
    for params in toys {
        let params = params.map_err(|e| e.to_string())?;
        let mut depth = 1;
        while let Ok(words) = admissible_words(&params, depth, 5_000) {
            instances += geometry_checks(&params, &words)?;
            let total = layer_mass(&params, depth, MassMode::Normalized, 5_000).map_err(|e| e.to_string())?;
            worst_mass = worst_mass.max((total - 1.0).abs());
            depth += 1;
        }
    }
    let full = schedule(8, 4, 2.0, ScheduleMode::Paper).map_err(|e| e.to_string())?;
    let depth = full.n_seq[0] as usize + 20;
    let samples = 200;
    let sampled: Vec<_> = (0..samples as u64)
        .map(|i| sample_word(&full, depth, 1, i))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    instances += geometry_checks(&full, &sampled)?;
    let report = holder_report_with(&ex, &full, depth, samples, 1, MassMode::Normalized).map_err(|e| e.to_string())?;
    worst_mass = worst_mass.max(report.max_conservation_error);
    ensure(worst_mass <= 1e-12, || format!("mass conservation error {worst_mass:e}"))?;
    ensure(instances >= 10_000, || format!("only {instances} geometry instances"))?;
    ensure(report.meets_target == Some(true), || {
        format!("Hölder minimum {} below {} - 0.05", report.min_over_depths, report.target)
    })?;
    Ok(format!(
        "{instances} instances, mass error {worst_mass:.1e}, Hölder min {:.4} vs target {:.4}",
        report.min_over_depths, report.target
    ))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let ex = exec();
    let stream = SampleStream::covering(7, 10_000, 2000).map_err(|e| e.to_string())?;
    let frac = |phi: &str| {
        let fam = EventFamily::new(EventTag::F2, phi.parse().unwrap()).unwrap();
        hit_fraction_with(&ex, &fam, 100..=10_000, &stream).map_err(|e| e.to_string())
    };
    let slow = frac("n^0.4")?;
    let fast = frac("n^2")?;
    ensure(slow.fraction >= 0.95, || format!("F2 n^0.4 fraction {}", slow.fraction))?;
    ensure(fast.fraction <= 0.2, || format!("F2 n^2 fraction {}", fast.fraction))?;
    let digits = digit_frequencies(&ex, &stream, 10);
    let worst = digits.iter().map(|d| d.z_score().abs()).fold(0.0, f64::max);
    ensure(worst <= 3.0, || format!("digit z-score {worst:.2}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(600), || format!("took {t:?}"))?;
    Ok(format!(
        "n^0.4: {}, n^2: {}, max |z| {worst:.2}, {:.0}s",
        slow.fraction,
        fast.fraction,
        t.as_secs_f64()
    ))
}

const REGRESSIONS: &[&[&str]] = &[
    &["expand", "--x", "7/10"],
    &["cylinder", "--word", "1 2 3"],
    &["measure", "--kind", "jk", "--prefix", "3", "--suffix", "2", "--l", "50", "--tol", "1e-9"],
    &["measure", "--kind", "h-tilde", "--prefix", "2", "--l", "100"],
    &["dimension", "--B", "2", "--g", "F2", "--M", "32", "--tol", "1e-9"],
    &["dimension", "--B", "2", "--g", "F2", "--M", "4", "--method", "enumeration", "--n", "7"],
    &["profile", "--B-grid", "1.5,2,4,16", "--M", "64"],
    &["cantor", "--L", "8", "--M", "4", "--B", "2", "--samples", "50", "--seed", "1", "--format", "json"],
    &["cantor", "--L", "2", "--M", "3", "--B", "2", "--mode", "scaled:1", "--depth", "30", "--samples", "100"],
    &["zero-one", "--family", "F2", "--phi", "n^0.4", "--window", "100:10000", "--samples", "2000", "--seed", "7"],
    &["zero-one", "--family", "F1", "--phi", "n*log(n+1)^1", "--window", "10:2000", "--samples", "500", "--seed", "3"],
    &["zero-one", "--family", "F2", "--phi", "n^1.5", "--an", "200", "--samples", "3000", "--seed", "7"],
];

fn criterion_8() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (i, args) in REGRESSIONS.iter().enumerate() {
        let mut outputs = Vec::new();
        for (threads, rep) in [(1, 0), (1, 1), (8, 0), (8, 1)] {
            let path = dir.path().join(format!("r{i}-{threads}-{rep}.out"));
            let mut argv = vec!["cfmetric".to_string()];
            argv.extend(args.iter().map(|s| s.to_string()));
            argv.extend(["--threads".into(), threads.to_string(), "--out".into(), path.display().to_string()]);
            let code = cfmetric::cli::run(argv);
            ensure(code == 0, || format!("{args:?} exited with {code}"))?;
            outputs.push(fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(outputs.iter().all(|o| o == &outputs[0]), || format!("{args:?} differs across runs"))?;
    }
    Ok(format!("{} regressions byte-identical at 1 and 8 threads", REGRESSIONS.len()))
}

fn main() {
    let criteria: [(u32, fn() -> Check); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let outcome = panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
}
