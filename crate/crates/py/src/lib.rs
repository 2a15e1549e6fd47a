//! Python module `workfunc`: estimators, table reproductions, the OTP game
//! and the toy cipher.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use workfunc_core::cost::Budget;
use workfunc_core::device::{default_catalog, find_device, Fleet};
use workfunc_core::estimate::{self, BruteForceModel, DictionaryModel, Tf1Model};
use workfunc_core::game::{self, GameConfig, OtpDistinguisher, OtpEnvironment};
use workfunc_core::report;
use workfunc_core::toy::{KeystreamGen, ToyCipher};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fleet(device: &str, count: u64) -> PyResult<Fleet> {
    let spec = find_device(&default_catalog(), device).map_err(value_error)?.clone();
    Fleet::new(spec, count).map_err(value_error)
}

/// `(name, transistors, clock_hz, byte_steps_per_s)` for every built-in device.
#[pyfunction]
fn catalog() -> Vec<(String, f64, f64, f64)> {
    default_catalog()
        .iter()
        .map(|d| (d.name().to_string(), d.transistor_count(), d.clock_hz(), d.resource_rate()))
        .collect()
}

/// Exhaustive key search cost and times on `fleet_size` copies of `device`.
#[pyfunction]
#[pyo3(signature = (key_bits, fleet_size = 1, device = "ati-radeon-5870", bytes_per_key_bit = 120.0))]
fn brute_force<'py>(
    py: Python<'py>,
    key_bits: u32,
    fleet_size: u64,
    device: &str,
    bytes_per_key_bit: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let model = BruteForceModel::with_cost(key_bits, bytes_per_key_bit).map_err(value_error)?;
    let t = estimate::break_time(model.expected_cost(), &fleet(device, fleet_size)?).map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("cost", t.total_cost)?;
    d.set_item("fleet_rate", t.fleet_rate)?;
    d.set_item("expected_seconds", t.expected_seconds)?;
    d.set_item("worst_case_seconds", t.worst_case_seconds)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (speedup, annual_factor = estimate::ANNUAL_PROGRESS_FACTOR))]
fn progress_years(speedup: f64, annual_factor: f64) -> PyResult<f64> {
    estimate::progress_years(speedup, annual_factor).map_err(value_error)
}

#[pyfunction]
fn dictionary<'py>(py: Python<'py>, key_bits: u32, epsilon: u32) -> PyResult<Bound<'py, PyDict>> {
    let s = estimate::dictionary_stats(&DictionaryModel::new(key_bits, epsilon).map_err(value_error)?);
    let d = PyDict::new(py);
    d.set_item("entries", s.entries)?;
    d.set_item("dictionary_bytes", s.dictionary_bytes)?;
    d.set_item("expected_comparisons", s.expected_comparisons)?;
    d.set_item("lookup_cost", s.lookup_cost)?;
    d.set_item("per_key_cost", s.per_key_cost)?;
    d.set_item("construction_cost", s.construction_cost)?;
    Ok(d)
}

/// State-search estimate for a generator with `word_bits`-bit words.
#[pyfunction]
#[pyo3(signature = (word_bits, fleet_size = 1, device = "ati-radeon-5870"))]
fn tf1<'py>(py: Python<'py>, word_bits: u32, fleet_size: u64, device: &str) -> PyResult<Bound<'py, PyDict>> {
    let model = Tf1Model::new(word_bits).map_err(value_error)?;
    let e = estimate::tf1_estimate(&model, &fleet(device, fleet_size)?).map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("strength_bits", e.strength_bits)?;
    d.set_item("state_search_cost", e.state_search_cost)?;
    d.set_item("expected_seconds", e.expected_state_search_seconds)?;
    d.set_item("expected_scan_words", e.expected_scan_words)?;
    d.set_item("expected_scan_seconds", e.expected_scan_seconds)?;
    Ok(d)
}

/// A reproduced table as text (or CSV) plus whether every row is in tolerance.
#[pyfunction]
#[pyo3(signature = (table_id, csv = false))]
fn table(table_id: u32, csv: bool) -> PyResult<(String, bool)> {
    let t = report::cmd_table(table_id).map_err(value_error)?;
    let out = if csv { t.report.to_csv() } else { t.report.render_text() };
    Ok((out, t.passed()))
}

/// Plays the OTP distinguishing game with the standard distinguisher.
#[pyfunction]
#[pyo3(signature = (bias, trials, seed, budget = f64::INFINITY, alpha = 0.01))]
fn play_otp<'py>(
    py: Python<'py>,
    bias: f64,
    trials: u64,
    seed: u64,
    budget: f64,
    alpha: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut env = OtpEnvironment::new(KeystreamGen::new(bias, seed).map_err(value_error)?);
    let config = GameConfig::new(Budget::new(budget).map_err(value_error)?, seed, trials).with_win_threshold(alpha);
    let outcome = game::play(Box::new(OtpDistinguisher::standard()), &mut env, config).map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("result", outcome.result.as_str())?;
    d.set_item("successes", outcome.successes)?;
    d.set_item("trials", outcome.trials)?;
    d.set_item("total_cost", outcome.total_cost)?;
    d.set_item("transcript", game::export_transcript(&outcome))?;
    Ok(d)
}

/// Exact per-trial success probability of the standard distinguisher.
#[pyfunction]
fn otp_oracle(bias: f64) -> f64 {
    game::distinguisher_success_probability(bias)
}

#[pyfunction]
#[pyo3(signature = (key_bits, key, block, test_mode = false))]
fn toy_encrypt(key_bits: u32, key: u64, block: u64, test_mode: bool) -> PyResult<u32> {
    let c = if test_mode { ToyCipher::test_mode(key_bits) } else { ToyCipher::new(key_bits) };
    c.and_then(|c| c.encrypt(key, block)).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (key_bits, key, block, test_mode = false))]
fn toy_decrypt(key_bits: u32, key: u64, block: u64, test_mode: bool) -> PyResult<u32> {
    let c = if test_mode { ToyCipher::test_mode(key_bits) } else { ToyCipher::new(key_bits) };
    c.and_then(|c| c.decrypt(key, block)).map_err(value_error)
}

/// Desk-scale validation; returns `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (quick = true, seed = report::DEFAULT_VALIDATION_SEED))]
fn validate(quick: bool, seed: u64) -> PyResult<(bool, String)> {
    let run = report::cmd_validate(quick, seed).map_err(value_error)?;
    Ok((run.passed, run.report.render_text()))
}

#[pymodule]
pub fn workfunc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(progress_years, m)?)?;
    m.add_function(wrap_pyfunction!(dictionary, m)?)?;
    m.add_function(wrap_pyfunction!(tf1, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(play_otp, m)?)?;
    m.add_function(wrap_pyfunction!(otp_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(toy_encrypt, m)?)?;
    m.add_function(wrap_pyfunction!(toy_decrypt, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
