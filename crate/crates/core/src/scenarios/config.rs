use std::path::Path;

use crate::controller::ControllerConfig;
use crate::error::{Error, Result};
use crate::kv::{Entry, KvFile};
use crate::plant::MachineParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    SetVref(f64),
    /// Multiply H by `factor`, instantly or linearly over `ramp` seconds.
    ScaleH {
        factor: f64,
        ramp: Option<f64>,
    },
    SetPm(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    /// Seconds; takes effect at the first sample whose time is at or after it.
    pub t: f64,
    pub action: Action,
}

impl Event {
    /// First sample index `k` with `k dt >= t`.
    pub fn sample(&self, dt: f64) -> usize {
        ((self.t / dt) - 1e-9).ceil().max(0.0) as usize
    }
}

/// Machine, controller, horizon and the scripted events of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub machine: MachineParams,
    pub controller: ControllerConfig,
    pub t_end: f64,
    pub dt_control: f64,
    /// Initial voltage reference, pu; the run starts at the matching equilibrium.
    pub v_ref: f64,
    /// Recorded for provenance; runs are deterministic and draw no random numbers.
    pub seed: u64,
    /// Operating point whose equilibrium field voltage is the model's input origin.
    pub v_nominal: f64,
    pub events: Vec<Event>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            machine: MachineParams::reference(),
            controller: ControllerConfig::default(),
            t_end: 5.0,
            dt_control: 0.002,
            v_ref: 1.1392,
            seed: 0,
            v_nominal: 1.1392,
            events: Vec::new(),
        }
    }
}

fn parse_event(kv: &KvFile, e: &Entry) -> Result<Event> {
    let toks: Vec<&str> = e.value.split_whitespace().collect();
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| kv.error(e, format!("`{s}` is not a number")))
    };
    if toks.len() < 3 {
        return Err(kv.error(e, "expected `event = <t> <action> <value> [ramp]`"));
    }
    let t = num(toks[0])?;
    let value = num(toks[2])?;
    let action = match (toks[1], toks.len()) {
        ("set_vref", 3) => Action::SetVref(value),
        ("set_Pm", 3) => Action::SetPm(value),
        ("scale_H", 3) => Action::ScaleH {
            factor: value,
            ramp: None,
        },
        ("scale_H", 4) => Action::ScaleH {
            factor: value,
            ramp: Some(num(toks[3])?),
        },
        (other, _) => {
            return Err(kv.error(
                e,
                format!(
                    "unknown event `{other}` (set_vref, scale_H, set_Pm) or wrong argument count"
                ),
            ))
        }
    };
    Ok(Event { t, action })
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_kv(&KvFile::load(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_kv(&KvFile::parse("<scenario>", text)?)
    }

    fn from_kv(kv: &KvFile) -> Result<Self> {
        let mut c = Self::default();
        let mut v_nominal = None;
        for e in &kv.entries {
            match e.key.as_str() {
                "machine" => c.machine = MachineParams::load(&kv.path(e))?,
                "controller" => c.controller = ControllerConfig::load(&kv.path(e))?,
                "t_end" => c.t_end = kv.number(e)?,
                "dt_control" => c.dt_control = kv.number(e)?,
                "v_ref" => c.v_ref = kv.number(e)?,
                "seed" => c.seed = kv.number(e)?,
                "v_nominal" => v_nominal = Some(kv.number(e)?),
                "event" => c.events.push(parse_event(kv, e)?),
                _ => return Err(kv.unknown(e)),
            }
        }
        if let Some(v) = v_nominal {
            c.v_nominal = v;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_control > 0.0) {
            return Err(Error::Invalid(format!(
                "dt_control must be positive, got {}",
                self.dt_control
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Invalid(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if !(self.v_ref > 0.0) {
            return Err(Error::Invalid(format!(
                "v_ref must be positive, got {}",
                self.v_ref
            )));
        }
        let mut last = 0.0;
        for ev in &self.events {
            if !(ev.t >= last && ev.t <= self.t_end) {
                return Err(Error::Invalid(format!(
                    "event times must be non-decreasing within [0, t_end]; got {} after {last}",
                    ev.t
                )));
            }
            last = ev.t;
            match ev.action {
                Action::ScaleH { factor, ramp } => {
                    if !(factor > 0.0) {
                        return Err(Error::Invalid(format!(
                            "scale_H factor must be positive, got {factor}"
                        )));
                    }
                    if let Some(r) = ramp {
                        if !(r >= 0.0) {
                            return Err(Error::Invalid(format!(
                                "scale_H ramp must be non-negative, got {r}"
                            )));
                        }
                    }
                }
                Action::SetVref(v) if !(v > 0.0) => {
                    return Err(Error::Invalid(format!(
                        "set_vref value must be positive, got {v}"
                    )));
                }
                _ => {}
            }
        }
        self.controller.validate()?;
        self.machine.validate()
    }

    /// Number of control intervals; the trace has one more row.
    pub fn samples(&self) -> usize {
        (self.t_end / self.dt_control).round() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_parse() {
        let c = ScenarioConfig::parse(
            "t_end = 6\nevent = 1.0 set_vref 1.2392\nevent = 2 scale_H 0.5 0.25\nevent = 3 set_Pm 1.1\n",
        )
        .unwrap();
        assert_eq!(c.events.len(), 3);
        assert_eq!(c.events[0].action, Action::SetVref(1.2392));
        assert_eq!(
            c.events[1].action,
            Action::ScaleH {
                factor: 0.5,
                ramp: Some(0.25)
            }
        );
        assert_eq!(c.events[2].action, Action::SetPm(1.1));
    }

    #[test]
    fn bad_events_rejected() {
        assert!(ScenarioConfig::parse("t_end = 2\nevent = 3 set_vref 1\n").is_err());
        assert!(ScenarioConfig::parse("event = 2 set_vref 1\nevent = 1 set_vref 1\n").is_err());
        assert!(ScenarioConfig::parse("event = 1 jump 1\n").is_err());
        assert!(ScenarioConfig::parse("event = 1 set_vref\n").is_err());
        assert!(ScenarioConfig::parse("dt_control = 0\n").is_err());
    }

    #[test]
    fn event_sample_index() {
        let ev = |t| Event {
            t,
            action: Action::SetVref(1.0),
        };
        assert_eq!(ev(1.0).sample(0.002), 500);
        assert_eq!(ev(1.0005).sample(0.002), 501);
        assert_eq!(ev(0.0).sample(0.002), 0);
    }
}
