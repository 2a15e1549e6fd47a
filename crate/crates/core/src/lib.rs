//! Work-function cost model: device catalogs, byte-step accounting, attack
//! estimates, a metered attack game and desk-scale toy cryptosystems.

pub mod cost;
pub mod device;
pub mod estimate;
pub mod experiments;
pub mod game;
pub mod report;
pub mod time;
pub mod toy;

pub use cost::{Budget, ChargeOutcome, CostError, CostMeter};
pub use device::{ByteStepRate, DeviceError, DeviceSpec, Fleet, Rate, ThroughputRecord};
