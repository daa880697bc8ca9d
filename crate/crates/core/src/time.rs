//! Simulation time in integer picoseconds.
//!
//! One picosecond of light travel is 0.3 mm, far below the distance
//! resolution anything in this crate cares about, and integer time keeps
//! event ordering exact.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

/// Speed of light used for all ranging arithmetic, in meters per second.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 3.0e8;

/// Picoseconds per second.
pub const PS_PER_SECOND: u64 = 1_000_000_000_000;

/// A point on the simulation clock, in picoseconds since the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(pub u64);

/// A span of simulation time, in picoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimDuration(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn as_ps(self) -> u64 {
        self.0
    }

    /// Elapsed time since `earlier`, saturating at zero.
    pub fn since(self, earlier: SimTime) -> SimDuration {
        SimDuration(self.0.saturating_sub(earlier.0))
    }
}

impl SimDuration {
    pub const ZERO: SimDuration = SimDuration(0);

    pub const fn from_ps(ps: u64) -> Self {
        SimDuration(ps)
    }

    pub const fn from_ns(ns: u64) -> Self {
        SimDuration(ns * 1_000)
    }

    pub const fn from_us(us: u64) -> Self {
        SimDuration(us * 1_000_000)
    }

    pub const fn from_ms(ms: u64) -> Self {
        SimDuration(ms * 1_000_000_000)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimDuration(s * PS_PER_SECOND)
    }

    pub fn as_ps(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / PS_PER_SECOND as f64
    }

    /// Propagation delay over `meters` at the speed of light, rounded to the
    /// nearest picosecond.
    ///
    /// Computed as `meters * 10^4 / 3` so that whole-meter multiples of 300 m
    /// land on exact microseconds.
    pub fn light_travel(meters: f64) -> Self {
        assert!(meters >= 0.0 && meters.is_finite(), "distance must be finite and non-negative");
        SimDuration((meters * 1.0e4 / 3.0).round() as u64)
    }
}

impl Add<SimDuration> for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimDuration) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl AddAssign<SimDuration> for SimTime {
    fn add_assign(&mut self, rhs: SimDuration) {
        self.0 += rhs.0;
    }
}

impl Sub for SimTime {
    type Output = SimDuration;
    fn sub(self, rhs: SimTime) -> SimDuration {
        SimDuration(self.0 - rhs.0)
    }
}

impl Add for SimDuration {
    type Output = SimDuration;
    fn add(self, rhs: SimDuration) -> SimDuration {
        SimDuration(self.0 + rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ps", self.0)
    }
}

impl fmt::Display for SimDuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ps", self.0)
    }
}
