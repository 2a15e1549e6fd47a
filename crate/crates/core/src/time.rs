//! Time units and rendering. Months are 30.5 days and years 365 days.

pub const MINUTE: f64 = 60.0;
pub const HOUR: f64 = 3_600.0;
pub const DAY: f64 = 86_400.0;
pub const MONTH: f64 = 30.5 * DAY;
pub const YEAR: f64 = 365.0 * DAY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    Seconds,
    Hours,
    Days,
    Months,
    Years,
}

impl TimeUnit {
    pub fn seconds(self) -> f64 {
        match self {
            TimeUnit::Seconds => 1.0,
            TimeUnit::Hours => HOUR,
            TimeUnit::Days => DAY,
            TimeUnit::Months => MONTH,
            TimeUnit::Years => YEAR,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            TimeUnit::Seconds => "s",
            TimeUnit::Hours => "hours",
            TimeUnit::Days => "days",
            TimeUnit::Months => "months",
            TimeUnit::Years => "years",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.trim().to_ascii_lowercase().as_str() {
            "s" | "sec" | "secs" | "second" | "seconds" => TimeUnit::Seconds,
            "h" | "hour" | "hours" => TimeUnit::Hours,
            "d" | "day" | "days" => TimeUnit::Days,
            "mo" | "month" | "months" => TimeUnit::Months,
            "y" | "yr" | "year" | "years" => TimeUnit::Years,
            _ => return None,
        })
    }

    /// Unit a human would quote: seconds below an hour, hours below a day,
    /// days below 100 days, months below a year, years beyond.
    pub fn natural(seconds: f64) -> Self {
        if seconds < HOUR {
            TimeUnit::Seconds
        } else if seconds < DAY {
            TimeUnit::Hours
        } else if seconds < 100.0 * DAY {
            TimeUnit::Days
        } else if seconds < YEAR {
            TimeUnit::Months
        } else {
            TimeUnit::Years
        }
    }
}

/// Three significant figures in the natural unit, e.g. `9.42 days`.
pub fn format_duration(seconds: f64) -> String {
    let unit = TimeUnit::natural(seconds);
    format!("{} {}", sig3(seconds / unit.seconds()), unit.suffix())
}

/// Parses `"2 years"`, `"40h"`, `"133 s"`.
pub fn parse_duration(text: &str) -> Option<f64> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(text.len());
    let (number, unit) = text.split_at(split);
    let value: f64 = number.trim().parse().ok()?;
    let unit = if unit.trim().is_empty() {
        TimeUnit::Seconds
    } else {
        TimeUnit::parse(unit)?
    };
    Some(value * unit.seconds())
}

/// Three significant figures without trailing noise.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-3..6).contains(&magnitude) {
        let decimals = (2 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.2e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_units() {
        assert_eq!(format_duration(132.48), "132 s");
        assert_eq!(format_duration(38_761.0), "10.8 hours");
        assert_eq!(format_duration(9.421 * DAY), "9.42 days");
        assert_eq!(format_duration(4.236 * MONTH), "4.24 months");
        assert_eq!(format_duration(120.83 * YEAR), "121 years");
        assert_eq!(format_duration(0.4436), "0.444 s");
    }

    #[test]
    fn parse_durations() {
        assert_eq!(parse_duration("2 years"), Some(2.0 * YEAR));
        assert_eq!(parse_duration("40h"), Some(40.0 * HOUR));
        assert_eq!(parse_duration("1.5e2"), Some(150.0));
        assert_eq!(parse_duration("3 fortnights"), None);
    }

    #[test]
    fn significant_figures() {
        assert_eq!(sig3(1.8275e18), "1.83e18");
        assert_eq!(sig3(50.0), "50.0");
        assert_eq!(sig3(0.0), "0");
    }
}
