//! Figures as printed, used as reproduction targets.

use crate::device::names::*;

/// Bytes per second per device.
pub const TABLE1_PRINTED: [(&str, f64); 5] = [
    (RADEON_5870, 18.3e17),
    (CORE_DUO, 7.57e17),
    (VIRTEX5_FX70T_249, 2.74e17),
    (VIRTEX5_LX30, 2.76e17),
    (VIRTEX5_FX70T_277, 3.04e17),
];

/// Bytes consumed per processed bit, in the order of
/// [`default_throughputs`](crate::device::default_throughputs).
pub const TABLE2_PRINTED: [f64; 9] = [
    146e9, 11.3e9, 272e9, 6.71e12, 379e6, 27.5e6, 687e6, 6.9e12, 67.3e6,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedTable3Row {
    pub word_bits: u32,
    /// Printed expected time, as text, in `unit`.
    pub time_text: &'static str,
    pub unit: &'static str,
    /// Value behind the printed figure when the worked arithmetic is shown.
    pub worked_value: f64,
    pub values_text: &'static str,
    /// Number of ati-radeon-5870 devices the time is quoted for.
    pub fleet: u64,
}

pub const TABLE3_PRINTED: [PrintedTable3Row; 5] = [
    PrintedTable3Row {
        word_bits: 32,
        time_text: "0.5",
        unit: "s",
        worked_value: 0.443583,
        values_text: "2.1e9",
        fleet: 1,
    },
    PrintedTable3Row {
        word_bits: 48,
        time_text: "4.2",
        unit: "months",
        worked_value: 4.23616109,
        values_text: "1.4e14",
        fleet: 1,
    },
    PrintedTable3Row {
        word_bits: 56,
        time_text: "9.4",
        unit: "days",
        worked_value: 9.42104576,
        values_text: "3.6e16",
        fleet: TABLE3_FLEET,
    },
    PrintedTable3Row {
        word_bits: 60,
        time_text: "1.8",
        unit: "years",
        worked_value: 1.76990292,
        values_text: "5.8e17",
        fleet: TABLE3_FLEET,
    },
    PrintedTable3Row {
        word_bits: 64,
        time_text: "120",
        unit: "years",
        worked_value: 120.825373,
        values_text: "9.2e18",
        fleet: TABLE3_FLEET,
    },
];

/// Fleet size used throughout the state-search table.
pub const TABLE3_FLEET: u64 = 65_536;

/// Waiting times for a zero word quoted alongside the table: `(w, hours)`.
pub const SCAN_WAITS_PRINTED: [(u32, f64, &str); 2] = [(48, 40.0, "hours"), (56, 14.0, "months")];
