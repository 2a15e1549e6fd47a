use super::commands::CommandError;
use super::published::{SCAN_WAITS_PRINTED, TABLE1_PRINTED, TABLE2_PRINTED, TABLE3_PRINTED};
use super::{Cell, Column, Provenance, Report};
use crate::device::{default_catalog, default_throughputs, find_device, names, Fleet};
use crate::estimate::{tf1_estimate, Tf1Model};
use crate::time::{sig3, TimeUnit};

pub const TABLE1_TOLERANCE: f64 = 0.005;
pub const TABLE2_TOLERANCE: f64 = 0.015;
pub const WORKED_TOLERANCE: f64 = 0.01;
pub const SCAN_WAIT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub report: Report,
    /// Descriptions of rows outside tolerance.
    pub failures: Vec<String>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn status(ok: bool) -> Cell {
    Cell::text(if ok { "ok" } else { "FAIL" })
}

fn significant_digits(printed: &str) -> Option<usize> {
    let mantissa = printed.split(['e', 'E']).next()?;
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_start_matches('0');
    let digits = if mantissa.contains('.') { digits } else { digits.trim_end_matches('0') };
    Some(digits.len().max(1))
}

/// True when `computed`, rounded to the significant figures shown in
/// `printed`, equals the printed number. Integer trailing zeros are not
/// counted as significant.
pub fn rounds_to_printed(computed: f64, printed: &str) -> bool {
    let (Some(sig), Ok(value)) = (significant_digits(printed), printed.trim().parse::<f64>()) else {
        return false;
    };
    if computed == 0.0 || value == 0.0 {
        return computed == value;
    }
    let magnitude = computed.abs().log10().floor() as i32;
    let scale = 10f64.powi(sig as i32 - 1 - magnitude);
    let rounded = (computed * scale).round() / scale;
    ((rounded - value) / value).abs() < 1e-9
}

pub fn cmd_table(id: u32) -> Result<TableReport, CommandError> {
    match id {
        1 => Ok(table1()),
        2 => table2(),
        3 => table3(),
        _ => Err(CommandError::Usage(format!("unknown table {id}; expected 1, 2 or 3"))),
    }
}

fn deviation_columns() -> [Column; 4] {
    [
        Column::number("computed"),
        Column::number("printed"),
        Column::number("deviation_pct"),
        Column::number("tolerance_pct"),
    ]
}

fn table1() -> TableReport {
    let catalog = default_catalog();
    let mut columns = vec![Column::text("device"), Column::number("transistors"), Column::number("clock_hz")];
    columns.extend(deviation_columns());
    columns.push(Column::text("status"));
    let mut report = Report::new("Resource rate: information content times clock (byte-steps/s)", columns);
    let mut failures = Vec::new();
    for (name, printed) in TABLE1_PRINTED {
        let d = find_device(&catalog, name).expect("embedded catalog lists every printed device");
        let computed = d.resource_rate();
        let dev = computed / printed - 1.0;
        let ok = dev.abs() <= TABLE1_TOLERANCE;
        if !ok {
            failures.push(format!("{name}: {computed:e} vs {printed:e}"));
        }
        report
            .push(
                vec![
                    Cell::text(name),
                    Cell::Number(d.transistor_count()),
                    Cell::Number(d.clock_hz()),
                    Cell::Number(computed),
                    Cell::Number(printed),
                    Cell::Number(100.0 * dev),
                    Cell::Number(100.0 * TABLE1_TOLERANCE),
                    status(ok),
                ],
                Provenance::Published,
                &format!("table-1 {name}"),
            )
            .expect("row matches columns");
    }
    TableReport { report, failures }
}

fn table2() -> Result<TableReport, CommandError> {
    let catalog = default_catalog();
    let mut columns = vec![
        Column::text("device"),
        Column::text("algorithm"),
        Column::text("operation"),
        Column::number("throughput_bps"),
        Column::number("core_fraction"),
        Column::number("units"),
    ];
    columns.extend(deviation_columns());
    columns.push(Column::text("status"));
    let mut report = Report::new("Byte-steps consumed per processed bit", columns);
    let mut failures = Vec::new();
    for (case, printed) in default_throughputs().iter().zip(TABLE2_PRINTED) {
        let r = &case.record;
        let computed = case.cost_per_bit(&catalog)?;
        let dev = computed / printed - 1.0;
        let ok = dev.abs() <= TABLE2_TOLERANCE;
        let label = format!("{} {} {}", r.device_name(), r.algorithm(), r.operation());
        if !ok {
            failures.push(format!("{label}: {computed:e} vs {printed:e}"));
        }
        report
            .push(
                vec![
                    Cell::text(r.device_name()),
                    Cell::text(r.algorithm()),
                    Cell::text(r.operation().to_string()),
                    Cell::Number(r.throughput_bits_per_s()),
                    Cell::Number(r.core_fraction()),
                    Cell::Number(case.units as f64),
                    Cell::Number(computed),
                    Cell::Number(printed),
                    Cell::Number(100.0 * dev),
                    Cell::Number(100.0 * TABLE2_TOLERANCE),
                    status(ok),
                ],
                Provenance::Published,
                &format!("table-2 {label}"),
            )
            .expect("row matches columns");
    }
    Ok(TableReport { report, failures })
}

fn table3() -> Result<TableReport, CommandError> {
    let catalog = default_catalog();
    let radeon = find_device(&catalog, names::RADEON_5870)?.clone();
    let columns = vec![
        Column::number("w"),
        Column::number("devices"),
        Column::text("computed_time"),
        Column::text("printed_time"),
        Column::number("worked_value"),
        Column::number("values_computed"),
        Column::text("values_printed"),
        Column::text("rule"),
        Column::text("zero_wait_computed"),
        Column::text("zero_wait_printed"),
        Column::text("status"),
    ];
    let mut report = Report::new(
        "Expected state-search time on ati-radeon-5870 fleets and output words before a zero",
        columns,
    );
    let mut failures = Vec::new();
    for row in TABLE3_PRINTED {
        let fleet = Fleet::new(radeon.clone(), row.fleet)?;
        let est = tf1_estimate(&Tf1Model::new(row.word_bits)?, &fleet)?;
        let unit = TimeUnit::parse(row.unit).expect("printed units are known");
        let t = est.expected_state_search_seconds / unit.seconds();
        let rule = if rounds_to_printed(t, row.time_text) {
            Some("rounds-to-printed")
        } else if (t / row.worked_value - 1.0).abs() <= WORKED_TOLERANCE {
            Some("worked-arithmetic-1pct")
        } else {
            None
        };
        let values_ok = rounds_to_printed(est.expected_scan_words, row.values_text);
        let mut ok = rule.is_some() && values_ok;
        if !ok {
            failures.push(format!("w={}: {} {} / {} values", row.word_bits, sig3(t), row.unit, est.expected_scan_words));
        }
        let (wait_computed, wait_printed) = match SCAN_WAITS_PRINTED.iter().find(|(w, _, _)| *w == row.word_bits) {
            Some(&(w, printed, unit_name)) => {
                let unit = TimeUnit::parse(unit_name).expect("printed units are known");
                let wait = est.expected_scan_seconds / unit.seconds();
                let wait_ok = (wait / printed - 1.0).abs() <= SCAN_WAIT_TOLERANCE;
                if !wait_ok {
                    failures.push(format!("zero wait w={w}: {} {unit_name}", sig3(wait)));
                }
                ok &= wait_ok;
                (
                    Cell::text(format!("{} {unit_name}", sig3(wait))),
                    Cell::text(format!("{printed} {unit_name}")),
                )
            }
            None => (Cell::Empty, Cell::Empty),
        };
        report
            .push(
                vec![
                    Cell::Number(row.word_bits as f64),
                    Cell::Number(row.fleet as f64),
                    Cell::text(format!("{} {}", sig3(t), row.unit)),
                    Cell::text(format!("{} {}", row.time_text, row.unit)),
                    Cell::Number(row.worked_value),
                    Cell::Number(est.expected_scan_words),
                    Cell::text(row.values_text),
                    Cell::text(rule.unwrap_or("none")),
                    wait_computed,
                    wait_printed,
                    status(ok),
                ],
                Provenance::Published,
                &format!("table-3 w={}", row.word_bits),
            )
            .expect("row matches columns");
    }
    Ok(TableReport { report, failures })
}
