//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bqf::classgroup::{class_data, reduced_forms};
use bqf::classification::{classify, Verdict};
use bqf::forms::{dw, dw_upper};
use bqf::pell::{fundamental_unit, pell4};
use bqf::reduction::{is_gl2_equivalent, is_sl2_equivalent};
use bqf::surveys::{survey, CheckStatus};
use bqf::valuesets::{
    evenize_representation, image_mod, represents, represents_exact, represents_primitively,
    square_count, value_window, Restriction,
};
use bqf::{BigInt, Form64, Matrix64};
use bqf_cli::{dispatch, ExitStatus};
use num_integer::{Integer, Roots};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<Vec<String>, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let r = dispatch(std::iter::once("bqf").chain(args.iter().copied()));
    ensure!(r.status == ExitStatus::Ok, "{args:?}: {}", r.render());
    Ok(r.payload)
}

fn is_disc(d: i64) -> bool {
    matches!(d.rem_euclid(4), 0 | 1) && !(d >= 0 && d.sqrt() * d.sqrt() == d)
}

fn worked_example() -> Outcome {
    let classes = cli(&["classnum", "229"])?;
    ensure!(classes["h_plus"] == 3 && classes["h_star"] == 2, "{classes}");
    let unit = cli(&["unit", "229"])?;
    ensure!(
        unit["x"] == 7 && unit["y"] == 1 && unit["parity_criterion"] == true,
        "{unit}"
    );
    let listed = [(1, -1, -57), (3, 13, -5), (9, 7, -5)].map(|(a, b, c)| Form64::new(a, b, c));
    for i in 0..3 {
        for j in i + 1..3 {
            ensure!(
                !is_sl2_equivalent(&listed[i], &listed[j]).map_err(err)?,
                "{} ~ {} over SL₂",
                listed[i],
                listed[j]
            );
            let merged = is_gl2_equivalent(&listed[i], &listed[j]).map_err(err)?;
            ensure!(merged == ((i, j) == (1, 2)), "GL₂ merge of {} and {}", listed[i], listed[j]);
        }
    }
    for f in &listed {
        let v = cli(&["classify", &f.to_string()])?;
        ensure!(v["verdict"] == "LowerExtraordinary", "{f}: {}", v["verdict"]);
    }
    let reps = class_data(&229i64).map_err(err)?.reps;
    for f in &reps {
        ensure!(
            listed.iter().any(|g| is_sl2_equivalent(f, g).unwrap_or(false)),
            "{f} missing from the list"
        );
    }
    Ok(vec![])
}

fn delone_watson() -> Outcome {
    let (small, large) = (dw::<i64>(), dw_upper::<i64>());
    ensure!(
        small.act(&Matrix64::from_i64(2, 0, 0, 1)) == large.act(&Matrix64::from_i64(1, 1, 1, 0)),
        "dw(2X,Y) ≠ DW(X+Y,X)"
    );
    for (f, g) in [(small.neg(), large.neg()), (small, large)] {
        let c = classify(&f).map_err(err)?;
        ensure!(c.verdict == Verdict::LowerExtraordinary, "{f}: {:?}", c.verdict);
        let p = c.partner.ok_or("no partner")?;
        ensure!(is_gl2_equivalent(&p, &g).map_err(err)?, "{f}: partner {p}");
    }
    let mut hits = BTreeSet::new();
    let mut scanned = 0usize;
    for d in -4000i64..=-3 {
        if !is_disc(d) {
            continue;
        }
        for k in (1i64..).take_while(|k| k * k <= -d) {
            if d % (k * k) != 0 || !is_disc(d / (k * k)) {
                continue;
            }
            for f in class_data(&(d / (k * k))).map_err(err)?.reps {
                for g in [f.scale(&k), f.scale(&-k)] {
                    scanned += 1;
                    let c = classify(&g).map_err(err)?;
                    if c.verdict.is_extraordinary() {
                        hits.insert(c.certificate.reduced_d);
                    }
                }
            }
        }
    }
    ensure!(
        hits == BTreeSet::from([-12, -3]),
        "extraordinary at d̄ ∈ {hits:?}"
    );
    Ok(vec![format!("{scanned} definite forms scanned")])
}

fn consistency_sweep() -> Outcome {
    let mut checked = 0;
    for d in (-3000i64..=3000).filter(|d| d.rem_euclid(8) == 5 && is_disc(*d)) {
        let lower = class_data(&d).map_err(err)?;
        let upper = class_data(&(4 * d)).map_err(err)?;
        let (h, h4) = (lower.h_plus, upper.h_plus);
        ensure!(h4 == h || h4 == 3 * h, "d = {d}: h⁺ {h} vs {h4}");
        let y_odd = if d > 0 {
            fundamental_unit(&d).map_err(err)?.y.is_odd()
        } else {
            d == -3
        };
        ensure!(y_odd == (h == h4), "d = {d}: parity {y_odd}, h⁺ {h} vs {h4}");
        ensure!(
            (h == h4) == (lower.h_ord == upper.h_ord),
            "d = {d}: h {} vs {}",
            lower.h_ord,
            upper.h_ord
        );
        checked += 1;
    }
    for d in (1i64..=3000).filter(|d| d.rem_euclid(4) == 1 && is_disc(*d)) {
        let (e, e4) = (
            fundamental_unit(&d).map_err(err)?,
            fundamental_unit(&(4 * d)).map_err(err)?,
        );
        ensure!(e.norm == e4.norm, "d = {d}: unit norms differ");
        checked += 1;
    }
    Ok(vec![format!("{checked} discriminants")])
}

fn value_sets() -> Outcome {
    let mut certified = 0;
    for d in [5i64, 13, 21, 29, 53, 61, 229] {
        for f in class_data(&BigInt::from(d)).map_err(err)?.reps {
            let g = f.dag();
            let (wf, wg) = (value_window(&f, 500).map_err(err)?, value_window(&g, 500).map_err(err)?);
            ensure!(wf.complete && wg.complete, "{f}: incomplete window");
            ensure!(wf.values == wg.values, "{f}: windows differ");
            for v in &wf.values {
                let (x, y) = represents(&f, v).map_err(err)?.ok_or(format!("{f} at {v}"))?;
                let (ex, ey) = evenize_representation(&f, &x, &y).map_err(err)?;
                ensure!(ex.is_even(), "{f} at {v}: odd first coordinate");
                let half = &ex / BigInt::from(2);
                ensure!(g.eval(&half, &ey) == *v, "{g} at ({half}, {ey}) ≠ {v}");
                certified += 1;
            }
        }
    }
    for d in [17i64, 33, 37] {
        for f in class_data(&BigInt::from(d)).map_err(err)?.reps {
            let g = f.dag();
            let mut found = None;
            'search: for k in 1i64..=100 {
                for n in [BigInt::from(k), BigInt::from(-k)] {
                    if represents_exact(&f, &n).map_err(err)?.is_some()
                        && represents(&g, &n).map_err(err)?.is_none()
                    {
                        found = Some(n);
                        break 'search;
                    }
                }
            }
            ensure!(found.is_some(), "{f}: no separating value up to 100");
        }
    }
    Ok(vec![format!("{certified} values certified")])
}

fn residues(f: &Form64, r: Restriction) -> Result<BTreeSet<u64>, String> {
    Ok(image_mod(f, 32, r).map_err(err)?.residues)
}

fn congruences() -> Outcome {
    let f1: BTreeSet<u64> = (0..8).map(|k| 4 * k).collect();
    let f5 = BTreeSet::from([0, 4, 12, 16, 20, 28]);
    for d in (1i64..=400).filter(|d| is_disc(*d) && d % 2 == 1) {
        let got = residues(&Form64::new(1, 0, -d), Restriction::EqualParity)?;
        match d.rem_euclid(8) {
            1 => ensure!(got == f1, "d = {d}: {got:?}"),
            5 => ensure!(got == f5, "d = {d}: {got:?}"),
            _ => {}
        }
    }
    for lambda in 0i64..4 {
        let family = |offsets: &[i64]| -> BTreeSet<u64> {
            offsets
                .iter()
                .map(|o| (o - 8 * lambda).rem_euclid(32) as u64)
                .collect()
        };
        let odd: BTreeSet<u64> = [0u64, 4, 16, 20]
            .into_iter()
            .chain(family(&[0, 12, 28]))
            .collect();
        let even: BTreeSet<u64> = [0u64, 4, 16]
            .into_iter()
            .chain(family(&[0, 4, 16]))
            .collect();
        ensure!(
            (odd == f5) == (lambda % 2 == 0) && odd != f1,
            "λ = {lambda}: {odd:?}"
        );
        for j in 0i64..8 {
            for (big_d, want) in [(4 + 8 * lambda + 32 * j, &odd), (8 * lambda + 32 * j, &even)] {
                if big_d == 0 || !is_disc(4 * big_d) {
                    continue;
                }
                let got = residues(&Form64::new(1, 0, -big_d), Restriction::EvenFirst)?;
                ensure!(&got == want, "D = {big_d}: {got:?} vs {want:?}");
            }
        }
    }
    for q in [2u64, 3, 5, 7] {
        for k in 1..=8u32 {
            let m = q.pow(k);
            let brute: BTreeSet<u64> = (0..m).map(|x| x * x % m).collect();
            let got = square_count(q, k).map_err(err)?;
            ensure!(got == brute.len() as u64, "{q}^{k}: {got} vs {}", brute.len());
        }
    }
    Ok(vec![])
}

fn coprime_values() -> Outcome {
    let mut forms = 0;
    for d in [5i64, 13, 21, 29, 53, 61, 229] {
        for f in class_data(&d).map_err(err)?.reps {
            let c = classify(&f).map_err(err)?;
            if c.verdict != Verdict::LowerExtraordinary {
                continue;
            }
            forms += 1;
            for n in (-200i64..=200).filter(|n| *n != 0 && n % 2 == 0) {
                ensure!(
                    represents_primitively(&f, &n).map_err(err)?.is_none(),
                    "{f} primitively represents {n}"
                );
            }
            let partner = c.partner.ok_or("no partner")?;
            let target = f.eval(&2, &2);
            let w = represents_primitively(&partner, &target)
                .map_err(err)?
                .ok_or(format!("{partner} misses {target}"))?;
            ensure!(partner.eval(&w.0, &w.1) == target, "bad witness {w:?}");
        }
    }
    ensure!(forms > 0, "no lower extraordinary forms");
    Ok(vec![format!("{forms} forms")])
}

fn density() -> Outcome {
    let report = survey(100_000).map_err(err)?;
    let mut notes = vec![format!(
        "D58 {} S58 {} G58 {} E {}",
        report.d58, report.s58, report.g58, report.e
    )];
    for check in &report.checks {
        notes.push(format!("{} {}: {}", check.status.name(), check.name, check.detail));
        ensure!(check.status != CheckStatus::Fail, "{}: {}", check.name, check.detail);
    }
    ensure!(report.s58 + report.e == report.g58, "S58 + E ≠ G58");
    Ok(notes)
}

fn random_unimodular(rng: &mut ChaCha8Rng) -> Matrix64 {
    (0..8).fold(Matrix64::identity(), |m, _| {
        let k = rng.gen_range(-2i64..=2);
        let step = match rng.gen_range(0..4) {
            0 => Matrix64::from_i64(1, k, 0, 1),
            1 => Matrix64::from_i64(1, 0, k, 1),
            2 => Matrix64::from_i64(0, -1, 1, 0),
            _ => Matrix64::from_i64(1, 0, 0, -1),
        };
        m.mul(&step)
    })
}

/// Every value `|n| ≤ limit` of `f`, by exhaustive search over `y`.
///
/// With `X = 2ax + by`, `4a·f(x, y) = X² - d·y²`. Multiplying `X + y√d` by the
/// unit `(t + u√d)/2` moves along an orbit of representations, and each orbit
/// has a member with `|y| ≤ u·√|4an| / √(2(t - 2))`. Definite forms need
/// `|d|·y² ≤ |4an|`.
fn search_values(f: &Form64, limit: i64) -> Result<BTreeSet<i64>, String> {
    let (a, b, d) = (f.a, f.b, f.discriminant());
    let span = 4 * a.abs() * limit;
    let y_max = if d < 0 {
        (span / -d).sqrt() + 1
    } else {
        let (t, u) = pell4(&d).map_err(err)?;
        let (t, u) = (t.to_f64().unwrap(), u.to_f64().unwrap());
        (u * (span as f64).sqrt() / (2.0 * (t - 2.0)).sqrt()).ceil() as i64 + 2
    };
    let mut out = BTreeSet::new();
    for y in 0..=y_max {
        let centre = d * y * y;
        if centre + span < 0 {
            continue;
        }
        let lo = (centre - span).max(0);
        for x_big in lo.sqrt()..=(centre + span).sqrt() + 1 {
            let num = x_big * x_big - centre;
            if num.abs() > span || num % (4 * a) != 0 {
                continue;
            }
            if [x_big - b * y, -x_big - b * y].iter().any(|v| v % (2 * a) == 0) {
                out.insert(num / (4 * a));
            }
        }
    }
    Ok(out)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut forms = Vec::new();
    for d in (-100i64..=100).filter(|d| is_disc(*d)) {
        for f in reduced_forms(d) {
            if d < 0 {
                forms.push(f.neg());
            }
            forms.push(f);
        }
    }
    for f in &forms {
        let searched = search_values(f, 200)?;
        for n in -200i64..=200 {
            let exact = represents_exact(f, &n).map_err(err)?;
            if let Some((x, y)) = exact {
                ensure!(f.eval(&x, &y) == n, "{f}: bad witness for {n}");
            }
            ensure!(
                exact.is_some() == searched.contains(&n),
                "{f} at {n}: exact {}, search {}",
                exact.is_some(),
                searched.contains(&n)
            );
        }
        let base = classify(f).map_err(err)?;
        for _ in 0..100 {
            let g = f.act(&random_unimodular(&mut rng));
            let c = classify(&g).map_err(err)?;
            ensure!(c.verdict == base.verdict, "{f} → {g}: verdict changed");
            if let (Some(p), Some(q)) = (&base.partner, &c.partner) {
                ensure!(is_gl2_equivalent(p, q).map_err(err)?, "{f} → {g}: partner changed");
            }
        }
    }
    Ok(vec![format!("{} forms", forms.len())])
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked example d = 229", Duration::from_secs(1), worked_example),
        ("Delone–Watson pair", Duration::from_secs(60), delone_watson),
        ("criterion consistency sweep", Duration::from_secs(300), consistency_sweep),
        ("value-set certificates", Duration::from_secs(120), value_sets),
        ("congruence endpoints", Duration::from_secs(10), congruences),
        ("coprime values", Duration::from_secs(30), coprime_values),
        ("density survey", Duration::from_secs(600), density),
        ("oracle equivalence", Duration::from_secs(300), oracle_equivalence),
    ];
    let mut failed = false;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, notes) = match outcome {
            Ok(mut notes) if elapsed > limit => {
                notes.insert(0, format!("over {limit:?}"));
                ("FAIL", notes)
            }
            Ok(notes) if notes.iter().any(|n| n.starts_with("WARN")) => ("WARN", notes),
            Ok(notes) => ("PASS", notes),
            Err(e) => ("FAIL", vec![e]),
        };
        failed |= status == "FAIL";
        println!("criterion {}: {status} {name} ({:.2} s)", i + 1, elapsed.as_secs_f64());
        for n in notes {
            println!("    {n}");
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
