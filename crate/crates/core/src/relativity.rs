//! 1+1 dimensional special relativity in units where c = 1.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Default tolerance for interval and ordering comparisons.
pub const TOLERANCE: f64 = 1e-12;

/// Speed of light in m/s, for converting SI input.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub label: String,
}

impl Event {
    pub fn new(label: impl Into<String>, t: f64, x: f64) -> Result<Self> {
        for v in [t, x] {
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
        }
        Ok(Event {
            t,
            x,
            label: label.into(),
        })
    }

    /// Event given in seconds and metres.
    pub fn from_si(label: impl Into<String>, t_seconds: f64, x_metres: f64) -> Result<Self> {
        Event::new(label, t_seconds, x_metres / SPEED_OF_LIGHT)
    }

    pub fn boosted(&self, boost: Boost) -> Event {
        boost.apply(self)
    }
}

/// Change of inertial frame with velocity `v`, |v| < 1.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Boost {
    v: f64,
}

impl Boost {
    pub fn new(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
        if v.abs() >= 1.0 {
            return Err(Error::Superluminal(v));
        }
        Ok(Boost { v })
    }

    pub fn from_si(v_metres_per_second: f64) -> Result<Self> {
        Boost::new(v_metres_per_second / SPEED_OF_LIGHT)
    }

    pub fn rest() -> Self {
        Boost { v: 0.0 }
    }

    pub fn velocity(&self) -> f64 {
        self.v
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.v * self.v).sqrt()
    }

    pub fn inverse(&self) -> Boost {
        Boost { v: -self.v }
    }

    /// Single boost equal to applying `self` and then `other`.
    pub fn compose(&self, other: Boost) -> Boost {
        Boost {
            v: (self.v + other.v) / (1.0 + self.v * other.v),
        }
    }

    pub fn apply(&self, e: &Event) -> Event {
        let g = self.gamma();
        Event {
            t: g * (e.t - self.v * e.x),
            x: g * (e.x - self.v * e.t),
            label: e.label.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntervalClass {
    Spacelike,
    Timelike,
    Lightlike,
}

impl fmt::Display for IntervalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalClass::Spacelike => "spacelike",
            IntervalClass::Timelike => "timelike",
            IntervalClass::Lightlike => "lightlike",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TemporalOrder {
    Before,
    Simultaneous,
    After,
}

impl fmt::Display for TemporalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemporalOrder::Before => "before",
            TemporalOrder::Simultaneous => "simultaneous",
            TemporalOrder::After => "after",
        })
    }
}

/// s² = Δt² − Δx².
pub fn interval_squared(e1: &Event, e2: &Event) -> f64 {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    dt * dt - dx * dx
}

/// Classifies s² with a tolerance relative to Δt² + Δx².
pub fn interval_class(e1: &Event, e2: &Event) -> IntervalClass {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    let s2 = dt * dt - dx * dx;
    let tol = TOLERANCE * (dt * dt + dx * dx);
    if s2 < -tol {
        IntervalClass::Spacelike
    } else if s2 > tol {
        IntervalClass::Timelike
    } else {
        IntervalClass::Lightlike
    }
}

/// Order of `e1` relative to `e2` in the boosted frame.
pub fn temporal_order(e1: &Event, e2: &Event, boost: Boost) -> TemporalOrder {
    let t1 = boost.apply(e1).t;
    let t2 = boost.apply(e2).t;
    let tol = TOLERANCE * t1.abs().max(t2.abs()).max(1.0);
    if (t2 - t1).abs() <= tol {
        TemporalOrder::Simultaneous
    } else {
        match t1.partial_cmp(&t2) {
            Some(Ordering::Less) => TemporalOrder::Before,
            _ => TemporalOrder::After,
        }
    }
}

/// Lag v·x by which a clap at distance `x` must follow a clap at the origin
/// to be simultaneous with it in the boosted frame.
pub fn simultaneity_offset(x: f64, boost: Boost) -> f64 {
    boost.v * x
}

/// Velocity v* = Δt/Δx at which two spacelike events are simultaneous.
/// Faster frames in the same direction reverse their order.
pub fn reversing_velocity(e1: &Event, e2: &Event) -> Result<Boost> {
    if interval_class(e1, e2) != IntervalClass::Spacelike {
        return Err(Error::NoReversingFrame(e1.label.clone(), e2.label.clone()));
    }
    Boost::new((e2.t - e1.t) / (e2.x - e1.x))
}
