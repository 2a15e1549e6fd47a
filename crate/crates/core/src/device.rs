//! Devices as frozen information.
//!
//! A processor is priced by the information needed to single it out among all
//! devices buildable from the same parts: one byte per transistor (one state
//! bit plus seven wiring bits). Every clock cycle costs the full information
//! content, so a device delivers `i_dev * clock_hz` byte-steps per second.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Header every catalog CSV must start with.
pub const CATALOG_HEADER: &str = "name,transistor_count,clock_hz,component_count,bits_per_transistor";

/// Table of the five reference devices shipped with the crate.
pub const DEFAULT_CATALOG_CSV: &str = include_str!("../data/devices.csv");

/// Processors of the Tianhe-1 installation (Xeon E5540, Xeon E5450, Radeon HD 4870).
pub const TIANHE1_CATALOG_CSV: &str = include_str!("../data/tianhe1.csv");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeviceError {
    #[error("invalid device {name:?}: {reason}")]
    InvalidDevice { name: String, reason: String },
    #[error("fleet must contain at least one unit")]
    EmptyFleet,
    #[error("invalid throughput record: {0}")]
    InvalidThroughput(String),
    #[error("throughput record is for {record:?} but device is {device:?}")]
    DeviceMismatch { record: String, device: String },
    #[error("catalog header mismatch: expected `{expected}`, found `{found}`")]
    BadHeader { expected: String, found: String },
    #[error("parse error at line {line}, column {column} ({field}): {message}")]
    Parse {
        line: u64,
        column: usize,
        field: &'static str,
        message: String,
    },
    #[error("invariant violation line {line}: {message}")]
    Invariant { line: u64, message: String },
    #[error("duplicate device name {name:?} at line {line}")]
    Duplicate { name: String, line: u64 },
    #[error("unknown device {0:?}")]
    UnknownDevice(String),
}

/// Lowercase-hyphenated identifier used for catalog lookups.
pub fn normalize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_dash = false;
    for ch in name.trim().chars() {
        if ch.is_ascii_alphanumeric() || ch == '.' {
            if pending_dash && !out.is_empty() {
                out.push('-');
            }
            pending_dash = false;
            out.push(ch.to_ascii_lowercase());
        } else {
            pending_dash = true;
        }
    }
    out
}

/// A processor described by its transistor count and clock.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    name: String,
    transistor_count: f64,
    clock_hz: f64,
    component_count: u64,
    bits_per_transistor: f64,
}

impl DeviceSpec {
    pub fn new(name: &str, transistor_count: f64, clock_hz: f64) -> Result<Self, DeviceError> {
        Self::with_details(name, transistor_count, clock_hz, 1, 8.0)
    }

    pub fn with_details(
        name: &str,
        transistor_count: f64,
        clock_hz: f64,
        component_count: u64,
        bits_per_transistor: f64,
    ) -> Result<Self, DeviceError> {
        let name = normalize_name(name);
        let invalid = |reason: &str| DeviceError::InvalidDevice {
            name: name.clone(),
            reason: reason.to_string(),
        };
        if name.is_empty() {
            return Err(invalid("empty name"));
        }
        if !(transistor_count.is_finite() && transistor_count >= 1.0) {
            return Err(invalid("transistor_count must be >= 1"));
        }
        if transistor_count.fract() != 0.0 {
            return Err(invalid("transistor_count must be an integer"));
        }
        if !(clock_hz.is_finite() && clock_hz > 0.0) {
            return Err(invalid("clock_hz must be > 0"));
        }
        if !(bits_per_transistor.is_finite() && bits_per_transistor > 0.0) {
            return Err(invalid("bits_per_transistor must be > 0"));
        }
        Ok(Self {
            name,
            transistor_count,
            clock_hz,
            component_count,
            bits_per_transistor,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn transistor_count(&self) -> f64 {
        self.transistor_count
    }

    pub fn clock_hz(&self) -> f64 {
        self.clock_hz
    }

    /// Parallel programmable components (cores, stream processors, slices). Informational only.
    pub fn component_count(&self) -> u64 {
        self.component_count
    }

    pub fn bits_per_transistor(&self) -> f64 {
        self.bits_per_transistor
    }

    /// Information content of the device in bytes.
    pub fn i_dev(&self) -> f64 {
        self.transistor_count * self.bits_per_transistor / 8.0
    }

    /// Byte-steps delivered per second: information content times clock rate.
    pub fn resource_rate(&self) -> f64 {
        self.i_dev() * self.clock_hz
    }
}

/// Anything that delivers byte-steps at a fixed rate.
pub trait ByteStepRate {
    fn byte_steps_per_second(&self) -> f64;
}

impl ByteStepRate for DeviceSpec {
    fn byte_steps_per_second(&self) -> f64 {
        self.resource_rate()
    }
}

/// A bare aggregate rate, for quoted figures that have no device breakdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate(pub f64);

impl ByteStepRate for Rate {
    fn byte_steps_per_second(&self) -> f64 {
        self.0
    }
}

/// `unit_count` identical devices working side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct Fleet {
    device: DeviceSpec,
    unit_count: u64,
}

impl Fleet {
    pub fn new(device: DeviceSpec, unit_count: u64) -> Result<Self, DeviceError> {
        if unit_count == 0 {
            return Err(DeviceError::EmptyFleet);
        }
        Ok(Self { device, unit_count })
    }

    pub fn single(device: DeviceSpec) -> Self {
        Self {
            device,
            unit_count: 1,
        }
    }

    pub fn device(&self) -> &DeviceSpec {
        &self.device
    }

    pub fn unit_count(&self) -> u64 {
        self.unit_count
    }

    pub fn fleet_rate(&self) -> f64 {
        self.unit_count as f64 * self.device.resource_rate()
    }
}

impl ByteStepRate for Fleet {
    fn byte_steps_per_second(&self) -> f64 {
        self.fleet_rate()
    }
}

impl ByteStepRate for [Fleet] {
    fn byte_steps_per_second(&self) -> f64 {
        self.iter().map(Fleet::fleet_rate).sum()
    }
}

impl ByteStepRate for Vec<Fleet> {
    fn byte_steps_per_second(&self) -> f64 {
        self.as_slice().byte_steps_per_second()
    }
}

impl<T: ByteStepRate + ?Sized> ByteStepRate for &T {
    fn byte_steps_per_second(&self) -> f64 {
        (**self).byte_steps_per_second()
    }
}

/// Combined rate of a heterogeneous installation.
pub fn fleet_rate(fleets: &[Fleet]) -> f64 {
    fleets.byte_steps_per_second()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operation {
    Encrypt,
    Decrypt,
    Combined,
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::Encrypt => "encrypt",
            Operation::Decrypt => "decrypt",
            Operation::Combined => "combined",
        })
    }
}

/// A published throughput figure for one algorithm on one device.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputRecord {
    device_name: String,
    algorithm: String,
    operation: Operation,
    throughput_bits_per_s: f64,
    core_fraction: f64,
}

impl ThroughputRecord {
    pub fn new(
        device_name: &str,
        algorithm: &str,
        operation: Operation,
        throughput_bits_per_s: f64,
    ) -> Result<Self, DeviceError> {
        if !(throughput_bits_per_s.is_finite() && throughput_bits_per_s > 0.0) {
            return Err(DeviceError::InvalidThroughput(format!(
                "throughput must be > 0, got {throughput_bits_per_s}"
            )));
        }
        Ok(Self {
            device_name: normalize_name(device_name),
            algorithm: algorithm.to_string(),
            operation,
            throughput_bits_per_s,
            core_fraction: 1.0,
        })
    }

    /// Throughput from a cycle count: `block_bits * clock_hz / cycles`.
    pub fn from_cycles(
        device_name: &str,
        algorithm: &str,
        operation: Operation,
        block_bits: f64,
        clock_hz: f64,
        cycles: f64,
    ) -> Result<Self, DeviceError> {
        if cycles.is_nan() || cycles <= 0.0 {
            return Err(DeviceError::InvalidThroughput("cycles must be > 0".into()));
        }
        Self::new(device_name, algorithm, operation, block_bits * clock_hz / cycles)
    }

    /// Fraction of the device the measurement occupied, e.g. 0.5 for one core of two.
    pub fn with_core_fraction(mut self, core_fraction: f64) -> Result<Self, DeviceError> {
        if !(core_fraction > 0.0 && core_fraction <= 1.0) {
            return Err(DeviceError::InvalidThroughput(format!(
                "core_fraction must be in (0, 1], got {core_fraction}"
            )));
        }
        self.core_fraction = core_fraction;
        Ok(self)
    }

    pub fn device_name(&self) -> &str {
        &self.device_name
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    pub fn operation(&self) -> Operation {
        self.operation
    }

    pub fn throughput_bits_per_s(&self) -> f64 {
        self.throughput_bits_per_s
    }

    pub fn core_fraction(&self) -> f64 {
        self.core_fraction
    }
}

/// Byte-steps consumed per processed bit on a single device.
pub fn cost_per_bit(spec: &DeviceSpec, record: &ThroughputRecord) -> Result<f64, DeviceError> {
    check_device(spec.name(), record)?;
    Ok(record.core_fraction * spec.resource_rate() / record.throughput_bits_per_s)
}

/// Byte-steps per bit when the measurement used a whole fleet (multi-chip FPGA boards).
pub fn fleet_cost_per_bit(fleet: &Fleet, record: &ThroughputRecord) -> Result<f64, DeviceError> {
    check_device(fleet.device().name(), record)?;
    Ok(record.core_fraction * fleet.fleet_rate() / record.throughput_bits_per_s)
}

fn check_device(device: &str, record: &ThroughputRecord) -> Result<(), DeviceError> {
    if device != record.device_name {
        return Err(DeviceError::DeviceMismatch {
            record: record.device_name.clone(),
            device: device.to_string(),
        });
    }
    Ok(())
}

/// Parses a device catalog. Rows are validated against the [`DeviceSpec`] invariants
/// and names must be unique after normalization.
pub fn load_catalog(source: &str) -> Result<Vec<DeviceSpec>, DeviceError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source.as_bytes());

    let mut devices = Vec::new();
    let mut seen = HashSet::new();
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| DeviceError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            column: 0,
            field: "row",
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if !header_seen {
            let found = record.iter().collect::<Vec<_>>().join(",");
            if found != CATALOG_HEADER {
                return Err(DeviceError::BadHeader {
                    expected: CATALOG_HEADER.to_string(),
                    found,
                });
            }
            header_seen = true;
            continue;
        }
        if record.len() != 5 {
            return Err(DeviceError::Parse {
                line,
                column: record.len().min(5) + 1,
                field: "row",
                message: format!("expected 5 fields, found {}", record.len()),
            });
        }
        let number = |column: usize, field: &'static str| -> Result<f64, DeviceError> {
            let raw = &record[column];
            raw.parse::<f64>().map_err(|e| DeviceError::Parse {
                line,
                column: column + 1,
                field,
                message: format!("{raw:?}: {e}"),
            })
        };
        let transistors = number(1, "transistor_count")?;
        let clock = number(2, "clock_hz")?;
        let components = number(3, "component_count")?;
        let bits = number(4, "bits_per_transistor")?;
        if components < 0.0 || components.fract() != 0.0 {
            return Err(DeviceError::Invariant {
                line,
                message: "component_count must be a non-negative integer".into(),
            });
        }
        let spec = DeviceSpec::with_details(&record[0], transistors, clock, components as u64, bits)
            .map_err(|e| DeviceError::Invariant {
                line,
                message: e.to_string(),
            })?;
        if !seen.insert(spec.name().to_string()) {
            return Err(DeviceError::Duplicate {
                name: spec.name().to_string(),
                line,
            });
        }
        devices.push(spec);
    }
    Ok(devices)
}

/// The five reference processors: one GPU, one CPU, three FPGA configurations.
pub fn default_catalog() -> Vec<DeviceSpec> {
    load_catalog(DEFAULT_CATALOG_CSV).expect("embedded catalog is valid")
}

pub fn tianhe1_catalog() -> Vec<DeviceSpec> {
    load_catalog(TIANHE1_CATALOG_CSV).expect("embedded catalog is valid")
}

pub fn find_device<'a>(catalog: &'a [DeviceSpec], name: &str) -> Result<&'a DeviceSpec, DeviceError> {
    let key = normalize_name(name);
    catalog
        .iter()
        .find(|d| d.name() == key)
        .ok_or(DeviceError::UnknownDevice(key))
}

/// Renders a catalog back to CSV in the canonical column order.
pub fn catalog_to_csv(devices: &[DeviceSpec]) -> String {
    let mut out = String::from(CATALOG_HEADER);
    out.push('\n');
    for d in devices {
        out.push_str(&format!(
            "{},{:e},{:e},{},{}\n",
            d.name, d.transistor_count, d.clock_hz, d.component_count, d.bits_per_transistor
        ));
    }
    out
}

pub mod names {
    pub const RADEON_5870: &str = "ati-radeon-5870";
    pub const CORE_DUO: &str = "intel-core-duo";
    pub const VIRTEX5_FX70T_249: &str = "xilinx-virtex-5-xc5vfx70t-2-249mhz";
    pub const VIRTEX5_LX30: &str = "xilinx-virtex-5-xc5vlx30-3";
    pub const VIRTEX5_FX70T_277: &str = "xilinx-virtex-5-xc5vfx70t-2-277mhz";
    pub const XEON_E5540: &str = "intel-xeon-e5540";
    pub const XEON_E5450: &str = "intel-xeon-e5450";
    pub const RADEON_HD4870: &str = "ati-radeon-hd-4870";
}

/// Published throughputs used for the bytes-per-bit comparison.
///
/// Core Duo rows for RSA and AES are single-core measurements (core fraction 0.5);
/// MQQ rows occupy the whole device. The MQQ encryption FPGA figure comes from a
/// four-chip board and is priced with a fleet of four.
#[derive(Debug, Clone)]
pub struct ThroughputCase {
    pub record: ThroughputRecord,
    pub units: u64,
}

pub fn default_throughputs() -> Vec<ThroughputCase> {
    use names::*;
    use Operation::*;
    let rec = |dev: &str, alg: &str, op: Operation, tp: f64, frac: f64, units: u64| ThroughputCase {
        record: ThroughputRecord::new(dev, alg, op, tp)
            .and_then(|r| r.with_core_fraction(frac))
            .expect("static throughput data is valid"),
        units,
    };
    vec![
        rec(CORE_DUO, "mqq-160", Encrypt, 5.19e6, 1.0, 1),
        rec(CORE_DUO, "mqq-160", Decrypt, 67.0e6, 1.0, 1),
        rec(CORE_DUO, "rsa-1024", Encrypt, 1.39e6, 0.5, 1),
        rec(CORE_DUO, "rsa-1024", Decrypt, 56.4e3, 0.5, 1),
        rec(CORE_DUO, "aes-128", Combined, 1.0e9, 0.5, 1),
        rec(VIRTEX5_FX70T_277, "mqq-160", Encrypt, 44.27e9, 1.0, 4),
        rec(VIRTEX5_FX70T_249, "mqq-160", Decrypt, 399.04e6, 1.0, 1),
        rec(VIRTEX5_LX30, "rsa-1024", Combined, 40e3, 1.0, 1),
        rec(VIRTEX5_LX30, "aes-128", Combined, 4.1e9, 1.0, 1),
    ]
}

impl ThroughputCase {
    pub fn cost_per_bit(&self, catalog: &[DeviceSpec]) -> Result<f64, DeviceError> {
        let device = find_device(catalog, self.record.device_name())?;
        let fleet = Fleet::new(device.clone(), self.units)?;
        fleet_cost_per_bit(&fleet, &self.record)
    }
}
