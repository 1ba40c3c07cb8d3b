//! Sweeps over positive `d ≡ 5 (mod 8)` counting discriminants with `h⁺(d) = h⁺(4d)`.
//!
//! * `D58(x)`: all such `d ≤ x`;
//! * `G58(x)`: squarefree `d ≤ x` with `d ≡ 5 (mod 8)`;
//! * `S58(x)`: squarefree members of `D58`;
//! * `E(x)`: the Eisenstein set, squarefree `d` where the equality fails.
//!
//! Membership is read off the parity of `y` in the fundamental unit and
//! cross-checked against class numbers on a seeded 1% sample.

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith;
use crate::classgroup::narrow_class_number;
use crate::error::{FormError, Result};
use crate::pell::fundamental_unit;

/// Largest sweep bound accepted by [`survey`].
pub const DEFAULT_SURVEY_CAP: u64 = 100_000;
const SAMPLE_SEED: u64 = 0x5eed_0558;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurveyRow {
    pub d: u64,
    pub squarefree: bool,
    pub y_odd: bool,
    pub in_d58: bool,
    pub in_s58: bool,
    pub in_e: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

impl CheckStatus {
    pub fn name(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Warn => "WARN",
            CheckStatus::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyReport {
    pub x: u64,
    pub d58: u64,
    pub s58: u64,
    pub g58: u64,
    pub e: u64,
    /// Discriminants whose membership was recomputed from class numbers.
    pub sampled: Vec<u64>,
    /// Sampled discriminants where the two methods disagree.
    pub disagreements: Vec<u64>,
    pub rows: Vec<SurveyRow>,
    pub checks: Vec<SurveyCheck>,
}

impl SurveyReport {
    pub fn d58_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.d58, self.x.max(1))
    }

    pub fn g58_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.g58, self.x.max(1))
    }

    pub fn s58_share(&self) -> Ratio<u64> {
        Ratio::new(self.s58, self.g58.max(1))
    }

    pub fn eisenstein_share(&self) -> Ratio<u64> {
        Ratio::new(self.e, self.g58.max(1))
    }

    /// Worst status over all checks.
    pub fn status(&self) -> CheckStatus {
        let worst = |s: CheckStatus| self.checks.iter().any(|c| c.status == s);
        if worst(CheckStatus::Fail) {
            CheckStatus::Fail
        } else if worst(CheckStatus::Warn) {
            CheckStatus::Warn
        } else {
            CheckStatus::Pass
        }
    }
}

/// `flags[n]` is true for squarefree `n ≤ x`.
pub fn squarefree_sieve(x: u64) -> Vec<bool> {
    arith::squarefree_sieve(x as usize)
}

pub fn survey(x: u64) -> Result<SurveyReport> {
    survey_capped(x, DEFAULT_SURVEY_CAP)
}

pub fn survey_capped(x: u64, cap: u64) -> Result<SurveyReport> {
    if x > cap {
        return Err(FormError::BoundExceeded {
            what: "survey bound",
            value: x.to_string(),
            bound: cap.to_string(),
        });
    }
    let squarefree = squarefree_sieve(x);
    let rows: Vec<SurveyRow> = (0..=x / 8)
        .map(|k| 8 * k + 5)
        .filter(|&d| d <= x)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|d| {
            let y_odd = fundamental_unit(&(d as i64))?.y.is_odd();
            let sf = squarefree[d as usize];
            Ok(SurveyRow {
                d,
                squarefree: sf,
                y_odd,
                in_d58: y_odd,
                in_s58: sf && y_odd,
                in_e: sf && !y_odd,
            })
        })
        .collect::<Result<_>>()?;

    let count = |p: fn(&SurveyRow) -> bool| rows.iter().filter(|r| p(r)).count() as u64;
    let d58 = count(|r| r.in_d58);
    let s58 = count(|r| r.in_s58);
    let e = count(|r| r.in_e);
    let g58 = count(|r| r.squarefree);

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut sampled: Vec<u64> = rows
        .iter()
        .filter(|_| rng.gen_ratio(1, 100))
        .map(|r| r.d)
        .collect();
    if sampled.is_empty() {
        if let Some(first) = rows.first() {
            sampled.push(first.d);
        }
    }
    let mut disagreements: Vec<u64> = sampled
        .par_iter()
        .map(|&d| {
            let slow = narrow_class_number(&(d as i64))? == narrow_class_number(&(4 * d as i64))?;
            let fast = rows[((d - 5) / 8) as usize].y_odd;
            Ok((slow != fast).then_some(d))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    disagreements.sort_unstable();

    let mut report = SurveyReport {
        x,
        d58,
        s58,
        g58,
        e,
        sampled,
        disagreements,
        rows,
        checks: Vec::new(),
    };
    report.checks = evaluate(&report);
    Ok(report)
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn soft(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Warn
    }
}

fn hard(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn evaluate(r: &SurveyReport) -> Vec<SurveyCheck> {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let g = ratio_f64(r.g58_ratio());
    let dens = ratio_f64(r.d58_ratio());
    let s_share = ratio_f64(r.s58_share());
    let e_share = ratio_f64(r.eisenstein_share());
    vec![
        SurveyCheck {
            name: "s58_plus_e_equals_g58",
            status: hard(r.s58 + r.e == r.g58),
            detail: format!("{} + {} vs {}", r.s58, r.e, r.g58),
        },
        SurveyCheck {
            name: "s58_within_d58",
            status: hard(r.s58 <= r.d58),
            detail: format!("{} <= {}", r.s58, r.d58),
        },
        SurveyCheck {
            name: "sample_agreement",
            status: hard(r.disagreements.is_empty()),
            detail: format!(
                "{} sampled, {} disagreements",
                r.sampled.len(),
                r.disagreements.len()
            ),
        },
        SurveyCheck {
            name: "g58_density",
            status: soft((g * pi2 - 1.0).abs() <= 0.02),
            detail: format!("G58/x = {g:.6}, 1/π² = {:.6}", 1.0 / pi2),
        },
        SurveyCheck {
            name: "d58_density",
            status: soft(dens >= 0.0507 * 0.95),
            detail: format!("D58/x = {dens:.6}"),
        },
        SurveyCheck {
            name: "s58_share",
            status: soft(s_share >= 0.45),
            detail: format!("S58/G58 = {s_share:.6}"),
        },
        SurveyCheck {
            name: "eisenstein_share",
            status: soft(e_share > 0.25 && e_share < 0.45),
            detail: format!("E/G58 = {e_share:.6}"),
        },
        SurveyCheck {
            name: "eisenstein_members",
            status: soft(r.e >= 50),
            detail: format!("{} members", r.e),
        },
    ]
}

/// `|E ∩ [1, x]| / G58(x)`.
pub fn eisenstein_ratio(x: u64) -> Result<Ratio<u64>> {
    Ok(survey(x)?.eisenstein_share())
}
