//! Command dispatch for the `bqf` binary.
//!
//! Every command produces a JSON payload; exact quantities are JSON integers
//! (arbitrary size), forms are `[a, b, c]` arrays and ratios are
//! `{num, den, decimal}` objects.

use std::path::PathBuf;
use std::str::FromStr;

use bqf::classgroup::{class_data_bounded, validate_discriminant, DEFAULT_CLASS_BOUND};
use bqf::classification::{
    classify, separating_value, val_equivalent, Certificate, Classification,
};
use bqf::pell::{fundamental_unit_capped, unit_parity_criterion, DEFAULT_PERIOD_CAP};
use bqf::surveys::{survey_capped, SurveyReport, DEFAULT_SURVEY_CAP};
use bqf::valuesets::{image_mod, value_window_capped, Restriction, DEFAULT_WINDOW_CAP};
use bqf::{BigForm, BigInt, FormError, ScheringForm};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_bigint::Sign;
use serde_json::{json, Map, Value};

/// How far `valequiv` looks for a value taken by only one of the forms.
pub const DEFAULT_WITNESS_SEARCH: u64 = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "bqf",
    version,
    about = "Integral binary quadratic forms: value sets and classification"
)]
struct Cli {
    /// Override the size cap of the selected command.
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Emit JSON (the default and only structured format).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ordinary, lower or upper extraordinary, with partner and certificate.
    Classify {
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
    /// Whether two forms take the same values.
    Valequiv {
        #[arg(allow_hyphen_values = true)]
        first: String,
        #[arg(allow_hyphen_values = true)]
        second: String,
        /// Largest |n| tried when looking for a separating value.
        #[arg(long, default_value_t = DEFAULT_WITNESS_SEARCH)]
        search: u64,
    },
    /// Class numbers and class representatives of a discriminant.
    Classnum {
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Fundamental unit of a positive discriminant.
    Unit {
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Values of a form with |v| <= max.
    Valueset {
        #[arg(allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        max: u64,
        #[arg(long)]
        primitive: bool,
    },
    /// Residues f(x, y) mod m.
    Imagemod {
        #[arg(allow_hyphen_values = true)]
        form: String,
        m: u64,
        /// all-pairs, coprime-pairs, equal-parity or even-first.
        #[arg(long, default_value = "all-pairs")]
        restriction: String,
    },
    /// Sweep over d = 5 mod 8 up to max.
    Survey {
        #[arg(long, default_value_t = DEFAULT_SURVEY_CAP)]
        max: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Determinant, order and species of aX² + 2bXY + cY².
    Schering {
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Domain = 1,
    Usage = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub command: String,
    pub input: Vec<String>,
    pub payload: Value,
    pub status: ExitStatus,
    /// Help or version text, printed verbatim instead of the payload.
    pub text: Option<String>,
}

impl CommandResult {
    /// What the binary prints on stdout (or stderr for errors).
    pub fn render(&self) -> String {
        match &self.text {
            Some(t) => t.clone(),
            None => serde_json::to_string_pretty(&self.payload).expect("values always serialize"),
        }
    }
}

fn error_payload(code: &str, message: &str) -> Value {
    json!({ "error": { "code": code, "message": message } })
}

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let input: Vec<String> = argv.into_iter().map(Into::into).collect();
    let command = input.get(1).cloned().unwrap_or_default();
    let cli = match Cli::try_parse_from(&input) {
        Ok(cli) => cli,
        Err(e) => {
            let done = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return CommandResult {
                command,
                input,
                payload: if done {
                    Value::Null
                } else {
                    error_payload("usage", e.to_string().trim())
                },
                status: if done {
                    ExitStatus::Ok
                } else {
                    ExitStatus::Usage
                },
                text: done.then(|| e.to_string()),
            };
        }
    };
    let (payload, status) = match run(&cli) {
        Ok(v) => (v, ExitStatus::Ok),
        Err(e) => (error_payload(e.code(), &e.to_string()), ExitStatus::Domain),
    };
    CommandResult {
        command,
        input,
        payload,
        status,
        text: None,
    }
}

/// A JSON integer of any size.
pub fn int(n: &BigInt) -> Value {
    serde_json::from_str(&n.to_string()).expect("integers are valid JSON numbers")
}

pub fn form_json(f: &BigForm) -> Value {
    Value::Array(vec![int(&f.a), int(&f.b), int(&f.c)])
}

/// `{num, den, decimal}` with six decimal digits.
pub fn ratio_json(num: u64, den: u64) -> Value {
    let decimal = if den == 0 {
        "NaN".to_string()
    } else {
        format!("{:.6}", num as f64 / den as f64)
    };
    json!({ "num": num, "den": den, "decimal": decimal })
}

fn parse_form(s: &str) -> Result<BigForm, FormError> {
    BigForm::from_str(s)
}

fn parse_int(s: &str) -> Result<BigInt, FormError> {
    let t = s.trim();
    t.strip_prefix('+')
        .unwrap_or(t)
        .parse()
        .map_err(|_| FormError::Parse {
            input: s.to_string(),
            reason: "bad integer".into(),
        })
}

fn run(cli: &Cli) -> Result<Value, FormError> {
    match &cli.command {
        Command::Classify { form } => {
            let f = parse_form(form)?;
            validate_discriminant(
                &f.nonsquare_discriminant()?,
                cli.bound.unwrap_or(DEFAULT_CLASS_BOUND),
            )?;
            Ok(classification_json(&classify(&f)?))
        }
        Command::Valequiv {
            first,
            second,
            search,
        } => {
            let f = parse_form(first)?;
            let g = parse_form(second)?;
            let verdict = val_equivalent(&f, &g)?;
            let mut out = Map::new();
            out.insert("first".into(), form_json(&f));
            out.insert("second".into(), form_json(&g));
            out.insert("equal".into(), Value::Bool(verdict.equal));
            out.insert("reason".into(), Value::String(verdict.clause.text().into()));
            out.insert("clause".into(), Value::String(verdict.clause.code().into()));
            if !verdict.equal {
                if let Some(s) = separating_value(&f, &g, *search)? {
                    out.insert(
                        "witness".into(),
                        json!({
                            "value": int(&s.value),
                            "represented_by": if s.by_first { "first" } else { "second" },
                            "x": int(&s.witness.0),
                            "y": int(&s.witness.1),
                        }),
                    );
                }
            }
            Ok(Value::Object(out))
        }
        Command::Classnum { d } => {
            let d = parse_int(d)?;
            let data = class_data_bounded(&d, cli.bound.unwrap_or(DEFAULT_CLASS_BOUND))?;
            Ok(json!({
                "d": int(&data.d),
                "h_plus": data.h_plus,
                "h": data.h_ord,
                "h_star": data.h_star,
                "unit_norm": data.unit_norm.map(|n| n.value()),
                "reps": data.reps.iter().map(form_json).collect::<Vec<_>>(),
            }))
        }
        Command::Unit { d } => {
            let d = parse_int(d)?;
            let unit = fundamental_unit_capped(&d, cli.bound.unwrap_or(DEFAULT_PERIOD_CAP))?;
            let five_mod_eight = d.sign() == Sign::Plus && (&d % 8u32) == BigInt::from(5);
            let parity = if five_mod_eight {
                Value::Bool(unit_parity_criterion(&d)?)
            } else {
                Value::Null
            };
            Ok(json!({
                "d": int(&unit.d),
                "x": int(&unit.x),
                "y": int(&unit.y),
                "norm": unit.norm.value(),
                "parity_criterion": parity,
            }))
        }
        Command::Valueset {
            form,
            max,
            primitive,
        } => {
            let f = parse_form(form)?;
            let cap = cli.bound.unwrap_or(DEFAULT_WINDOW_CAP);
            let window = value_window_capped(&f, *max, cap, *primitive)?;
            Ok(Value::Array(window.values.iter().map(int).collect()))
        }
        Command::Imagemod {
            form,
            m,
            restriction,
        } => {
            let f = parse_form(form)?;
            let r = Restriction::from_str(restriction)?;
            let image = image_mod(&f, *m, r)?;
            Ok(Value::Array(
                image.residues.iter().map(|&v| Value::from(v)).collect(),
            ))
        }
        Command::Survey { max, csv } => {
            let report = survey_capped(*max, cli.bound.unwrap_or(DEFAULT_SURVEY_CAP))?;
            if let Some(path) = csv {
                write_csv(&report, path).map_err(|e| FormError::Precondition(e.to_string()))?;
            }
            Ok(survey_json(&report))
        }
        Command::Schering { form } => {
            let f = parse_form(form)?;
            let s = ScheringForm::new(f.a, f.b, f.c);
            let inv = s.invariants()?;
            Ok(json!({
                "form": [int(&s.a), int(&s.b), int(&s.c)],
                "determinant": int(&inv.determinant),
                "order": int(&inv.order),
                "species": int(&inv.species),
            }))
        }
    }
}

fn certificate_json(c: &Certificate<BigInt>) -> Value {
    json!({
        "d": int(&c.d),
        "content": int(&c.content),
        "reduced_d": int(&c.reduced_d),
        "congruence": { "modulus": c.congruence.0, "residue": c.congruence.1 },
        "h_plus": c.h_plus_pair.map(|(a, b)| vec![a, b]),
        "unit_y_odd": c.unit_y_odd,
        "clause": c.clause.code(),
        "reason": c.clause.text(),
    })
}

pub fn classification_json(c: &Classification<BigInt>) -> Value {
    json!({
        "form": form_json(&c.form),
        "verdict": c.verdict.name(),
        "partner": c.partner.as_ref().map(form_json),
        "certificate": certificate_json(&c.certificate),
    })
}

pub fn survey_json(r: &SurveyReport) -> Value {
    json!({
        "x": r.x,
        "d58": r.d58,
        "s58": r.s58,
        "g58": r.g58,
        "e": r.e,
        "ratios": {
            "d58_over_x": ratio_json(r.d58, r.x),
            "g58_over_x": ratio_json(r.g58, r.x),
            "s58_over_g58": ratio_json(r.s58, r.g58),
            "e_over_g58": ratio_json(r.e, r.g58),
        },
        "sampled": r.sampled.len(),
        "disagreements": r.disagreements,
        "checks": r.checks.iter().map(|c| json!({
            "name": c.name,
            "status": c.status.name(),
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "status": r.status().name(),
    })
}

pub fn write_csv(r: &SurveyReport, path: &PathBuf) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["d", "squarefree", "y_parity", "in_d58", "in_s58", "in_e"])?;
    for row in &r.rows {
        w.write_record([
            row.d.to_string(),
            row.squarefree.to_string(),
            if row.y_odd { "odd" } else { "even" }.to_string(),
            row.in_d58.to_string(),
            row.in_s58.to_string(),
            row.in_e.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
