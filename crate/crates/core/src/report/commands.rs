use thiserror::Error;

use super::scenario::{FleetSpec, ScenarioError, ScenarioSpec};
use super::{exit, Cell, Column, Provenance, Report, ReportError};
use crate::cost::{Budget, CostError};
use crate::device::{default_catalog, load_catalog, ByteStepRate, DeviceError, DeviceSpec};
use crate::estimate::{
    break_time, dictionary_stats, progress_years, tf1_estimate, BruteForceModel, EstimateError,
};
use crate::experiments::{brute_force_mean, keystream_bias, scan_mean, state_search_mean, state_search_scaling};
use crate::game::{
    binomial_p_value, distinguisher_success_probability, export_transcript, play, run_otp_challenge, GameConfig,
    GameError, GameResult, OtpDistinguisher, OtpEnvironment,
};
use crate::time::format_duration;
use crate::toy::{KeystreamGen, ToyError};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Toy(#[from] ToyError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{} check(s) failed", .0.rows.iter().filter(|r| r.cells.last() == Some(&Cell::text("FAIL"))).count())]
    ChecksFailed(Box<Report>),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => exit::USAGE,
            CommandError::Game(GameError::Fault(_)) => exit::FAULT,
            _ => exit::FAILURE,
        }
    }
}

fn estimate_report(title: String) -> Report {
    Report::new(
        title,
        vec![
            Column::text("quantity"),
            Column::number("value"),
            Column::text("unit"),
            Column::text("display"),
        ],
    )
}

fn push_value(r: &mut Report, quantity: &str, value: f64, unit: &str, display: String) {
    r.push(
        vec![Cell::text(quantity), Cell::Number(value), Cell::text(unit), Cell::text(display)],
        Provenance::Derived,
        "",
    )
    .expect("row matches columns");
}

fn push_time(r: &mut Report, quantity: &str, seconds: f64) {
    push_value(r, quantity, seconds, "s", format_duration(seconds));
}

fn push_fleet(r: &mut Report, fleet: &FleetSpec) {
    push_value(r, "fleet_rate", fleet.byte_steps_per_second(), "byte-steps/s", fleet.describe());
}

/// Runs the estimator a scenario describes.
pub fn cmd_estimate(spec: &ScenarioSpec) -> Result<Report, CommandError> {
    match spec {
        ScenarioSpec::BruteForce {
            key_bits,
            bytes_per_key_bit,
            fleet,
            target_seconds,
            annual_factor,
        } => {
            let model = BruteForceModel::with_cost(*key_bits, *bytes_per_key_bit)?;
            let est = break_time(model.expected_cost(), fleet)?;
            let mut r = estimate_report(format!("Exhaustive key search, {key_bits}-bit key"));
            push_value(&mut r, "bytes_per_key_bit", *bytes_per_key_bit, "byte-steps", String::new());
            push_value(&mut r, "cost_per_key", model.cost_per_key(), "byte-steps", String::new());
            push_value(&mut r, "expected_cost", est.total_cost, "byte-steps", String::new());
            push_fleet(&mut r, fleet);
            push_time(&mut r, "expected_time", est.expected_seconds);
            push_time(&mut r, "worst_case_time", est.worst_case_seconds);
            if let Some(target) = target_seconds {
                push_time(&mut r, "target_time", *target);
                let speedup = est.expected_seconds / target;
                push_value(&mut r, "speedup_needed", speedup, "x", String::new());
                let years = if speedup <= 1.0 { 0.0 } else { progress_years(speedup, *annual_factor)? };
                push_value(
                    &mut r,
                    "progress_years",
                    years,
                    "years",
                    format!("at {annual_factor}x per year"),
                );
            }
            Ok(r)
        }
        ScenarioSpec::Dictionary { model, fleet } => {
            let s = dictionary_stats(model);
            let mut r = estimate_report(format!(
                "Precomputed dictionary, {}-bit key, {} bits covered by search",
                model.key_bits(),
                model.epsilon()
            ));
            push_value(&mut r, "entries", s.entries, "entries", String::new());
            push_value(&mut r, "dictionary_bytes", s.dictionary_bytes, "bytes", String::new());
            push_value(&mut r, "expected_comparisons", s.expected_comparisons, "comparisons", String::new());
            push_value(&mut r, "steps_per_lookup", s.steps_per_lookup, "steps", String::new());
            push_value(&mut r, "lookup_cost", s.lookup_cost, "byte-steps", String::new());
            push_value(&mut r, "per_key_cost", s.per_key_cost, "byte-steps", String::new());
            push_value(&mut r, "construction_cost", s.construction_cost, "byte-steps", String::new());
            if let Some(fleet) = fleet {
                push_fleet(&mut r, fleet);
                push_time(&mut r, "per_key_time", break_time(s.per_key_cost, fleet)?.expected_seconds);
            }
            Ok(r)
        }
        ScenarioSpec::Tf1 { model, fleet } => {
            let e = tf1_estimate(model, fleet)?;
            let mut r = estimate_report(format!(
                "State recovery for a generator with {}-bit words",
                model.word_bits()
            ));
            push_value(&mut r, "state_bits", e.state_bits as f64, "bits", String::new());
            push_value(&mut r, "intended_strength_bits", e.intended_strength_bits, "bits", String::new());
            push_value(&mut r, "strength_bits", e.strength_bits, "bits", String::new());
            push_value(&mut r, "elementary_operations", e.elementary_operations, "ops", String::new());
            push_value(&mut r, "state_search_cost", e.state_search_cost, "byte-steps", String::new());
            push_fleet(&mut r, fleet);
            push_time(&mut r, "expected_time", e.expected_state_search_seconds);
            push_value(&mut r, "expected_scan_words", e.expected_scan_words, "words", "2^(w-1)".into());
            push_value(&mut r, "geometric_scan_words", e.geometric_scan_words, "words", "2^w".into());
            push_time(&mut r, "expected_scan_time", e.expected_scan_seconds);
            Ok(r)
        }
        ScenarioSpec::GameOtp { .. } => Err(CommandError::Usage(
            "game_otp scenarios are played with the `game` command".into(),
        )),
        ScenarioSpec::DeskValidation { seed, quick } => {
            let run = cmd_validate(*quick, *seed)?;
            if run.passed {
                Ok(run.report)
            } else {
                Err(CommandError::ChecksFailed(Box::new(run.report)))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GameRun {
    pub report: Report,
    pub transcript: String,
    pub result: GameResult,
}

impl GameRun {
    pub fn exit_code(&self) -> i32 {
        match self.result {
            GameResult::Won => exit::SUCCESS,
            _ => exit::GAME_LOST,
        }
    }
}

/// Plays a `game_otp` scenario with the standard distinguisher.
pub fn cmd_game(spec: &ScenarioSpec) -> Result<GameRun, CommandError> {
    let ScenarioSpec::GameOtp {
        seed,
        bias,
        trials,
        budget,
        alpha,
        per_step_information,
    } = spec
    else {
        return Err(CommandError::Usage("the game command needs a game_otp scenario".into()));
    };
    let mut env = OtpEnvironment::new(KeystreamGen::new(*bias, *seed)?);
    let mut config = GameConfig::new(Budget::new(*budget)?, *seed, *trials).with_win_threshold(*alpha);
    config.per_step_information = *per_step_information;
    let outcome = play(Box::new(OtpDistinguisher::standard()), &mut env, config)?;
    let mut report = Report::new(
        format!("One-time-pad challenge, keystream bias {bias}, {trials} trials, seed {seed}"),
        vec![
            Column::text("result"),
            Column::number("successes"),
            Column::number("trials"),
            Column::number("success_rate"),
            Column::number("p_value"),
            Column::number("oracle_rate"),
            Column::number("total_cost"),
            Column::number("budget"),
            Column::number("rounds"),
        ],
    );
    let rate = if outcome.trials > 0 {
        outcome.successes as f64 / outcome.trials as f64
    } else {
        0.0
    };
    report.push(
        vec![
            Cell::text(outcome.result.as_str()),
            Cell::Number(outcome.successes as f64),
            Cell::Number(outcome.trials as f64),
            Cell::Number(rate),
            Cell::Number(binomial_p_value(outcome.successes, outcome.trials, 0.5)),
            Cell::Number(distinguisher_success_probability(*bias)),
            Cell::Number(outcome.total_cost),
            if budget.is_finite() { Cell::Number(*budget) } else { Cell::Empty },
            Cell::Number(outcome.rounds as f64),
        ],
        Provenance::Simulation,
        "",
    )?;
    Ok(GameRun {
        report,
        transcript: export_transcript(&outcome),
        result: outcome.result,
    })
}

#[derive(Debug, Clone)]
pub struct ValidationRun {
    pub report: Report,
    pub passed: bool,
}

/// Seed used by `validate` when none is given.
pub const DEFAULT_VALIDATION_SEED: u64 = 2024;

/// Desk-scale checks of the cost model. `quick` drops the 20-bit key search
/// and shrinks the sample sizes.
pub fn cmd_validate(quick: bool, seed: u64) -> Result<ValidationRun, CommandError> {
    let mut report = Report::new(
        format!("Desk-scale validation (seed {seed}{})", if quick { ", quick" } else { "" }),
        vec![
            Column::text("check"),
            Column::number("statistic"),
            Column::number("expected"),
            Column::number("tolerance"),
            Column::text("detail"),
            Column::text("status"),
        ],
    );
    let mut passed = true;
    let mut check = |name: &str, stat: f64, expected: f64, tol: f64, relative: bool, detail: String| {
        let dev = if relative { stat / expected - 1.0 } else { stat - expected };
        let ok = dev.abs() <= tol;
        passed &= ok;
        report
            .push(
                vec![
                    Cell::text(name),
                    Cell::Number(stat),
                    Cell::Number(expected),
                    Cell::Number(tol),
                    Cell::text(detail),
                    Cell::text(if ok { "ok" } else { "FAIL" }),
                ],
                Provenance::Simulation,
                "",
            )
            .expect("row matches columns");
    };

    let key_sizes: &[(u32, u64)] = if quick {
        &[(12, 1000), (16, 1000)]
    } else {
        &[(12, 2000), (16, 2000), (20, 1000)]
    };
    let mut ledger_exact = true;
    for &(k, trials) in key_sizes {
        let r = brute_force_mean(k, trials, 6720.0, seed.wrapping_add(k as u64))?;
        ledger_exact &= r.ledger_exact;
        check(
            &format!("brute_force_mean_k{k}"),
            r.mean_keys_tested,
            r.expected,
            0.05,
            true,
            format!("{trials} trials, relative"),
        );
    }
    check(
        "brute_force_ledger_exact",
        ledger_exact as u8 as f64,
        1.0,
        0.0,
        false,
        "meter = keys_tested * per_key_cost".into(),
    );

    let ss = state_search_mean(8, 200, 16, 1.0, seed.wrapping_add(100))?;
    check(
        "state_search_mean_w8",
        ss.mean_candidates,
        ss.expected_candidates,
        0.10,
        true,
        "200 trials, relative".into(),
    );
    let fit = state_search_scaling(&[8, 10, 12], 200, seed.wrapping_add(200))?;
    check(
        "state_search_slope",
        fit.slope,
        1.5,
        0.1,
        false,
        "log2 cost per word bit, w = 8, 10, 12".into(),
    );
    check(
        "state_search_ledger_exact",
        (ss.ledger_exact && fit.points.iter().all(|p| p.ledger_exact)) as u8 as f64,
        1.0,
        0.0,
        false,
        "meter = candidates * 16 ops".into(),
    );

    let bits = if quick { 200_000 } else { 1_000_000 };
    let f = keystream_bias(0.6, bits, seed.wrapping_add(300))?;
    let tol = if quick { 0.005 } else { 0.002 };
    check("keystream_bias", f, 0.6, tol, false, format!("{bits} bits"));

    let starts = if quick { 2_000 } else { 10_000 };
    let scan = scan_mean(12, starts, seed.wrapping_add(400))?;
    check(
        "zero_scan_mean_w12",
        scan.mean_words,
        scan.geometric_expectation,
        0.10,
        true,
        format!("{starts} starts, {} on zero-free cycles", scan.zero_free),
    );

    let trials = if quick { 300 } else { 1000 };
    let s = run_otp_challenge(KeystreamGen::new(0.6, 0)?, trials, seed.wrapping_add(500))?;
    check(
        "otp_success_rate_bias_0.6",
        s as f64 / trials as f64,
        distinguisher_success_probability(0.6),
        0.03,
        false,
        format!("{trials} trials vs exact oracle"),
    );
    Ok(ValidationRun { report, passed })
}

/// Lists a device catalog with derived resource rates.
pub fn cmd_catalog(csv: Option<&str>) -> Result<Report, CommandError> {
    let (devices, builtin): (Vec<DeviceSpec>, bool) = match csv {
        Some(text) => (load_catalog(text)?, false),
        None => (default_catalog(), true),
    };
    let mut report = Report::new(
        "Device catalog",
        vec![
            Column::text("name"),
            Column::number("transistors"),
            Column::number("clock_hz"),
            Column::number("components"),
            Column::number("bits_per_transistor"),
            Column::number("i_dev_bytes"),
            Column::number("byte_steps_per_s"),
        ],
    );
    for d in &devices {
        let (prov, source) = if builtin {
            (Provenance::Published, format!("table-1 {}", d.name()))
        } else {
            (Provenance::Derived, String::new())
        };
        report.push(
            vec![
                Cell::text(d.name()),
                Cell::Number(d.transistor_count()),
                Cell::Number(d.clock_hz()),
                Cell::Number(d.component_count() as f64),
                Cell::Number(d.bits_per_transistor()),
                Cell::Number(d.i_dev()),
                Cell::Number(d.resource_rate()),
            ],
            prov,
            &source,
        )?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Scenario;

    fn resolve(text: &str) -> ScenarioSpec {
        Scenario::parse(text).unwrap().resolve(None).unwrap()
    }

    fn value(r: &Report, q: &str) -> f64 {
        r.rows
            .iter()
            .find(|row| row.cells[0] == Cell::text(q))
            .and_then(|row| row.cells[1].as_number())
            .unwrap_or_else(|| panic!("no {q}"))
    }

    #[test]
    fn speedup_sixty() {
        let r = cmd_estimate(&resolve(
            "[brute_force]\nkey_bits = 96\nfleet = 65536 x ati-radeon-5870\ntarget = 2 years\n",
        ))
        .unwrap();
        assert!((value(&r, "speedup_needed") - 60.4).abs() < 0.1);
        assert!((value(&r, "progress_years") - 6.8).abs() < 0.05);
    }

    #[test]
    fn dictionary_quantities() {
        let r = cmd_estimate(&resolve("[dictionary]\nkey_bits = 56\nepsilon = 6\n")).unwrap();
        assert!((value(&r, "dictionary_bytes") / 3.1e16 - 1.0).abs() < 0.02);
        assert_eq!(value(&r, "expected_comparisons"), 50.0);
        assert!((value(&r, "lookup_cost") / 3.1e18 - 1.0).abs() < 0.02);
        assert!((value(&r, "per_key_cost") / 2e20 - 1.0).abs() < 0.05);
    }

    #[test]
    fn tf1_w64() {
        let r = cmd_estimate(&resolve("[tf1]\nword_bits = 64\nfleet = 65536 x ati-radeon-5870\n")).unwrap();
        let years = value(&r, "expected_time") / crate::time::YEAR;
        assert!((years - 120.8).abs() < 0.1, "{years}");
    }

    #[test]
    fn game_scenarios() {
        let won = cmd_game(&resolve("[game_otp]\nseed = 42\nbias = 0.6\ntrials = 200\nbudget = 1e12\n")).unwrap();
        assert_eq!(won.result, GameResult::Won);
        assert_eq!(won.exit_code(), 0);
        assert!(won.transcript.contains("result won"));
        let broke = cmd_game(&resolve("[game_otp]\nseed = 42\nbias = 0.6\ntrials = 200\nbudget = 0\n")).unwrap();
        assert_eq!(broke.result, GameResult::LostBudgetDepleted);
        assert_eq!(broke.exit_code(), exit::GAME_LOST);
        assert!(matches!(
            cmd_estimate(&resolve("[game_otp]\nseed = 1\nbias = 0.5\ntrials = 1\nbudget = 1\n")),
            Err(CommandError::Usage(_))
        ));
    }

    #[test]
    fn catalog_listing() {
        let r = cmd_catalog(None).unwrap();
        assert_eq!(r.rows.len(), 5);
        let bad = cmd_catalog(Some("nonsense\n")).unwrap_err();
        assert_eq!(bad.exit_code(), exit::FAILURE);
    }

    #[test]
    fn faults_and_losses_exit_differently() {
        use crate::game::{FaultKind, MoveClass, ProtocolFault};
        let fault = CommandError::Game(GameError::Fault(ProtocolFault {
            machine: 0,
            round: 3,
            kind: FaultKind::AttackerClass(MoveClass::Response),
        }));
        assert_eq!(fault.exit_code(), exit::FAULT);
        assert_eq!(CommandError::Game(GameError::Config("n".into())).exit_code(), exit::FAILURE);
        assert_eq!(CommandError::Usage("u".into()).exit_code(), exit::USAGE);
    }

    #[test]
    fn quick_validation_passes() {
        let run = cmd_validate(true, DEFAULT_VALIDATION_SEED).unwrap();
        assert!(run.passed, "{}", run.report.render_text());
    }
}
