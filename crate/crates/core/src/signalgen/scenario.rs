//! Scenario descriptions: what happens in one generated record.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    A,
    B,
    C,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::A, Phase::B, Phase::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::A => "a",
            Phase::B => "b",
            Phase::C => "c",
        }
    }
}

/// Type 1 shunt fault topologies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "topology", rename_all = "snake_case")]
pub enum ShuntFault {
    Slg { phase: Phase },
    Ll { from: Phase, to: Phase },
    Llg { from: Phase, to: Phase },
    Lllg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum EventClass {
    Normal,
    LoadSwitchAdd { step_pct: u32 },
    LoadSwitchShed { step_pct: u32 },
    CapacitorSwitch { energize: bool },
    FaultType1 { fault: ShuntFault },
    FaultType2Downed { phase: Phase },
}

impl EventClass {
    pub fn is_fault(&self) -> bool {
        matches!(self, EventClass::FaultType1 { .. } | EventClass::FaultType2Downed { .. })
    }

    /// Faults the detection logic is designed for (everything except LLLG).
    pub fn is_unbalanced_fault(&self) -> bool {
        match self {
            EventClass::FaultType1 { fault } => !matches!(fault, ShuntFault::Lllg),
            EventClass::FaultType2Downed { .. } => true,
            _ => false,
        }
    }

    pub fn is_three_phase_fault(&self) -> bool {
        matches!(self, EventClass::FaultType1 { fault: ShuntFault::Lllg })
    }

    /// The ten Type 1 cases followed by the three downed-conductor cases.
    pub fn fault_cases() -> Vec<EventClass> {
        use Phase::*;
        let mut out = Vec::with_capacity(13);
        for phase in Phase::ALL {
            out.push(EventClass::FaultType1 { fault: ShuntFault::Slg { phase } });
        }
        for (from, to) in [(A, B), (B, C), (C, A)] {
            out.push(EventClass::FaultType1 { fault: ShuntFault::Ll { from, to } });
        }
        for (from, to) in [(A, B), (B, C), (C, A)] {
            out.push(EventClass::FaultType1 { fault: ShuntFault::Llg { from, to } });
        }
        out.push(EventClass::FaultType1 { fault: ShuntFault::Lllg });
        for phase in Phase::ALL {
            out.push(EventClass::FaultType2Downed { phase });
        }
        out
    }

    /// Normal state, add/shed at each step size, capacitor energize/de-energize.
    pub fn non_fault_cases(load_steps_pct: &[u32]) -> Vec<EventClass> {
        let mut out = vec![EventClass::Normal];
        for &step_pct in load_steps_pct {
            out.push(EventClass::LoadSwitchAdd { step_pct });
            out.push(EventClass::LoadSwitchShed { step_pct });
        }
        out.push(EventClass::CapacitorSwitch { energize: true });
        out.push(EventClass::CapacitorSwitch { energize: false });
        out
    }
}

impl fmt::Display for EventClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventClass::Normal => write!(f, "normal"),
            EventClass::LoadSwitchAdd { step_pct } => write!(f, "load_add_{step_pct}"),
            EventClass::LoadSwitchShed { step_pct } => write!(f, "load_shed_{step_pct}"),
            EventClass::CapacitorSwitch { energize: true } => write!(f, "cap_on"),
            EventClass::CapacitorSwitch { energize: false } => write!(f, "cap_off"),
            EventClass::FaultType1 { fault } => match fault {
                ShuntFault::Slg { phase } => write!(f, "slg_{}", phase.label()),
                ShuntFault::Ll { from, to } => write!(f, "ll_{}{}", from.label(), to.label()),
                ShuntFault::Llg { from, to } => write!(f, "llg_{}{}", from.label(), to.label()),
                ShuntFault::Lllg => write!(f, "lllg"),
            },
            EventClass::FaultType2Downed { phase } => write!(f, "downed_{}", phase.label()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerTech {
    Synchronous,
    Inverter,
    Hybrid,
}

impl DerTech {
    pub const ALL: [DerTech; 3] = [DerTech::Synchronous, DerTech::Inverter, DerTech::Hybrid];
}

/// Fault location along the feeder, nearest the substation first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Bus3,
    Bus11,
    Bus19,
}

impl Location {
    pub const ALL: [Location; 3] = [Location::Bus3, Location::Bus11, Location::Bus19];
}

pub const INCEPTION_ANGLES: [u32; 4] = [0, 30, 60, 90];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultParams {
    /// Ohms, in (0, 500].
    pub impedance: f64,
    /// Electrical degrees past the positive-going zero crossing of phase a.
    pub inception_angle: u32,
    pub location: Location,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub event_class: EventClass,
    /// Percent of rated load, 30..=100 in steps of 10.
    pub loading_pct: u32,
    pub der_tech: DerTech,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<FaultParams>,
    /// Source X/R ratio.
    pub x_over_r: f64,
    /// Record length, seconds.
    pub duration: f64,
    /// Earliest time at which the event may start, seconds.
    pub event_time: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn is_fault(&self) -> bool {
        self.event_class.is_fault()
    }

    pub fn validate(&self) -> Result<()> {
        if self.event_class.is_fault() != self.fault.is_some() {
            return Err(Error::Spec(format!(
                "{}: fault parameters must be present exactly when the event is a fault",
                self.event_class
            )));
        }
        if let Some(fp) = &self.fault {
            if !(fp.impedance > 0.0 && fp.impedance <= 500.0) {
                return Err(Error::Spec(format!("fault impedance {} outside (0, 500]", fp.impedance)));
            }
            if !INCEPTION_ANGLES.contains(&fp.inception_angle) {
                return Err(Error::Spec(format!(
                    "inception angle {} not one of {:?}",
                    fp.inception_angle, INCEPTION_ANGLES
                )));
            }
        }
        match self.event_class {
            EventClass::FaultType1 { fault: ShuntFault::Ll { from, to } }
            | EventClass::FaultType1 { fault: ShuntFault::Llg { from, to } }
                if from == to =>
            {
                return Err(Error::Spec("line-to-line fault needs two distinct phases".into()));
            }
            EventClass::LoadSwitchAdd { step_pct } | EventClass::LoadSwitchShed { step_pct }
                if step_pct == 0 || step_pct >= 100 =>
            {
                return Err(Error::Spec(format!("load step {step_pct}% outside (0, 100)")));
            }
            _ => {}
        }
        if !(30..=100).contains(&self.loading_pct) || !self.loading_pct.is_multiple_of(10) {
            return Err(Error::Spec(format!("loading {}% not in 30..100 step 10", self.loading_pct)));
        }
        if !(self.x_over_r > 0.0 && self.x_over_r.is_finite()) {
            return Err(Error::Spec("x_over_r must be positive".into()));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Spec("duration must be positive".into()));
        }
        if !(self.event_time >= 0.0 && self.event_time < self.duration) {
            return Err(Error::Spec("event_time must lie inside the record".into()));
        }
        Ok(())
    }

    /// Short human-readable identifier, unique within a catalog.
    pub fn tag(&self) -> String {
        let mut s = format!("{}_L{}_{:?}", self.event_class, self.loading_pct, self.der_tech).to_lowercase();
        if let Some(fp) = &self.fault {
            s.push_str(&format!("_R{}_A{}_{:?}", fp.impedance, fp.inception_angle, fp.location).to_lowercase());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ScenarioSpec {
        ScenarioSpec {
            event_class: EventClass::Normal,
            loading_pct: 50,
            der_tech: DerTech::Synchronous,
            fault: None,
            x_over_r: 10.0,
            duration: 1.0,
            event_time: 0.5,
            seed: 1,
        }
    }

    #[test]
    fn thirteen_fault_cases() {
        let cases = EventClass::fault_cases();
        assert_eq!(cases.len(), 13);
        assert_eq!(cases.iter().filter(|c| c.is_unbalanced_fault()).count(), 12);
        assert_eq!(EventClass::non_fault_cases(&[5, 10, 15]).len(), 9);
    }

    #[test]
    fn fault_fields_iff_fault() {
        let mut s = base();
        assert!(s.validate().is_ok());
        s.fault = Some(FaultParams { impedance: 100.0, inception_angle: 0, location: Location::Bus3 });
        assert!(matches!(s.validate(), Err(Error::Spec(_))));
        s.event_class = EventClass::FaultType2Downed { phase: Phase::A };
        assert!(s.validate().is_ok());
        s.fault = None;
        assert!(s.validate().is_err());
    }

    #[test]
    fn impedance_and_angle_domains() {
        let mut s = base();
        s.event_class = EventClass::FaultType1 { fault: ShuntFault::Slg { phase: Phase::B } };
        for (z, a, ok) in [(500.0, 90, true), (0.0, 0, false), (501.0, 0, false), (100.0, 45, false)] {
            s.fault = Some(FaultParams { impedance: z, inception_angle: a, location: Location::Bus11 });
            assert_eq!(s.validate().is_ok(), ok, "z={z} a={a}");
        }
    }

    #[test]
    fn degenerate_line_to_line_is_unsatisfiable() {
        let mut s = base();
        s.event_class = EventClass::FaultType1 { fault: ShuntFault::Ll { from: Phase::A, to: Phase::A } };
        s.fault = Some(FaultParams { impedance: 100.0, inception_angle: 0, location: Location::Bus11 });
        assert!(matches!(s.validate(), Err(Error::Spec(_))));
    }

    #[test]
    fn serde_roundtrip() {
        let mut s = base();
        s.event_class = EventClass::FaultType1 { fault: ShuntFault::Llg { from: Phase::B, to: Phase::C } };
        s.fault = Some(FaultParams { impedance: 30.0, inception_angle: 60, location: Location::Bus19 });
        let j = serde_json::to_string(&s).unwrap();
        let back: ScenarioSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
    }
}
