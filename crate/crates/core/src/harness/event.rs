//! Append-only event log. Every record is one JSON object per line with the
//! fields `t`, `kind`, `agent` and `payload`; the payload layout depends on `kind`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::cognition::{Origin, Tag, Topology};
use crate::error::{Result, SimError};
use crate::harness::config::ExperimentConfig;
use crate::lifecycle::Species;
use crate::world::{AgentId, Point};

pub const LOG_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Header,
    Birth,
    Death,
    Catch,
    TagSwitch,
    Sacrifice,
    Guard,
    Sample,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BirthCause {
    Initial,
    /// Predator offspring after a catch.
    Catch,
    /// Prey offspring after a predator starved.
    PreyReproduction,
    /// Starved predator with no prey nearby; body refilled at random.
    Refill,
    Sacrifice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeathCause {
    Caught,
    Hunger,
    Sacrificed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardReason {
    /// A catch was ignored because prey are at the floor.
    PreyFloor,
    /// The death procedure was skipped because predators are at the floor.
    PredatorFloor,
    /// Every predator was exempt; nobody died this round.
    AllExempt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentRef {
    pub agent: AgentId,
    pub controller: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenotypeRecord {
    pub topology: Topology,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeaderPayload {
    pub format: u32,
    pub model_hash: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthPayload {
    pub controller: u64,
    pub species: Species,
    pub origin: Origin,
    pub cause: BirthCause,
    pub parent: Option<ParentRef>,
    pub position: Point,
    pub heading: f64,
    pub genotype: GenotypeRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeathPayload {
    pub controller: u64,
    pub species: Species,
    pub origin: Origin,
    pub cause: DeathCause,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatchPayload {
    pub predator: AgentId,
    pub predator_controller: u64,
    pub predator_origin: Origin,
    pub prey_controller: u64,
    pub prey_origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagSwitchPayload {
    pub controller: u64,
    pub from: Tag,
    pub to: Tag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SacrificePayload {
    pub controller: u64,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardPayload {
    pub reason: GuardReason,
    /// The other party, e.g. the predator of a suppressed catch.
    pub other: Option<AgentId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSnapshot {
    pub id: AgentId,
    pub species: Species,
    pub origin: Origin,
    pub controller: u64,
    pub position: Point,
    pub heading: f64,
    pub tag: Tag,
    pub active: bool,
    pub adversary: Option<AgentId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePayload {
    pub agents: Vec<AgentSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndPayload {
    /// Records written before this one.
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Header(HeaderPayload),
    Birth(BirthPayload),
    Death(DeathPayload),
    Catch(CatchPayload),
    TagSwitch(TagSwitchPayload),
    Sacrifice(SacrificePayload),
    Guard(GuardPayload),
    Sample(SamplePayload),
    End(EndPayload),
}

impl Event {
    pub fn kind(&self) -> EventKind {
        match self {
            Event::Header(_) => EventKind::Header,
            Event::Birth(_) => EventKind::Birth,
            Event::Death(_) => EventKind::Death,
            Event::Catch(_) => EventKind::Catch,
            Event::TagSwitch(_) => EventKind::TagSwitch,
            Event::Sacrifice(_) => EventKind::Sacrifice,
            Event::Guard(_) => EventKind::Guard,
            Event::Sample(_) => EventKind::Sample,
            Event::End(_) => EventKind::End,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub t: f64,
    pub agent: Option<AgentId>,
    pub event: Event,
}

#[derive(Serialize)]
struct WireOut<'a, P: Serialize> {
    t: f64,
    kind: EventKind,
    agent: Option<AgentId>,
    payload: &'a P,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireIn {
    t: f64,
    kind: EventKind,
    agent: Option<AgentId>,
    payload: serde_json::Value,
}

impl EventRecord {
    pub fn new(t: f64, agent: Option<AgentId>, event: Event) -> Self {
        Self { t, agent, event }
    }

    pub fn kind(&self) -> EventKind {
        self.event.kind()
    }

    pub fn to_json(&self) -> String {
        fn out<P: Serialize>(r: &EventRecord, p: &P) -> String {
            serde_json::to_string(&WireOut {
                t: r.t,
                kind: r.kind(),
                agent: r.agent,
                payload: p,
            })
            .expect("event serializes")
        }
        match &self.event {
            Event::Header(p) => out(self, p),
            Event::Birth(p) => out(self, p),
            Event::Death(p) => out(self, p),
            Event::Catch(p) => out(self, p),
            Event::TagSwitch(p) => out(self, p),
            Event::Sacrifice(p) => out(self, p),
            Event::Guard(p) => out(self, p),
            Event::Sample(p) => out(self, p),
            Event::End(p) => out(self, p),
        }
    }

    pub fn from_json(line: &str) -> serde_json::Result<Self> {
        let w: WireIn = serde_json::from_str(line)?;
        let p = w.payload;
        let event = match w.kind {
            EventKind::Header => Event::Header(serde_json::from_value(p)?),
            EventKind::Birth => Event::Birth(serde_json::from_value(p)?),
            EventKind::Death => Event::Death(serde_json::from_value(p)?),
            EventKind::Catch => Event::Catch(serde_json::from_value(p)?),
            EventKind::TagSwitch => Event::TagSwitch(serde_json::from_value(p)?),
            EventKind::Sacrifice => Event::Sacrifice(serde_json::from_value(p)?),
            EventKind::Guard => Event::Guard(serde_json::from_value(p)?),
            EventKind::Sample => Event::Sample(serde_json::from_value(p)?),
            EventKind::End => Event::End(serde_json::from_value(p)?),
        };
        Ok(Self {
            t: w.t,
            agent: w.agent,
            event,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    pub records: Vec<EventRecord>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, agent: Option<AgentId>, event: Event) {
        self.records.push(EventRecord::new(t, agent, event));
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn header(&self) -> Option<&HeaderPayload> {
        match self.records.first().map(|r| &r.event) {
            Some(Event::Header(h)) => Some(h),
            _ => None,
        }
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.records {
            w.write_all(r.to_json().as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        buf
    }

    /// Parses JSON lines. Structural checks beyond per-line syntax live in replay.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| SimError::MalformedRecord {
                line: i + 1,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let rec = EventRecord::from_json(&line).map_err(|e| SimError::MalformedRecord {
                line: i + 1,
                message: e.to_string(),
            })?;
            records.push(rec);
        }
        Ok(Self { records })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| SimError::io(path, e))?;
        Self::read_jsonl(std::io::BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_layout_has_four_fields() {
        let r = EventRecord::new(
            2.5,
            Some(AgentId(3)),
            Event::TagSwitch(TagSwitchPayload {
                controller: 7,
                from: Tag::Positive,
                to: Tag::Negative,
            }),
        );
        let json = r.to_json();
        assert_eq!(
            json,
            r#"{"t":2.5,"kind":"TagSwitch","agent":3,"payload":{"controller":7,"from":1,"to":-1}}"#
        );
        assert_eq!(EventRecord::from_json(&json).unwrap(), r);
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let line = r#"{"t":0.0,"kind":"Teleport","agent":null,"payload":{}}"#;
        assert!(EventRecord::from_json(line).is_err());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text =
            "{\"t\":0.0,\"kind\":\"End\",\"agent\":null,\"payload\":{\"records\":0}}\nnot json\n";
        let err = EventLog::read_jsonl(text.as_bytes()).unwrap_err();
        assert!(
            matches!(err, SimError::MalformedRecord { line: 2, .. }),
            "{err}"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn floats_survive_the_wire(x in any::<f64>().prop_filter("finite", |v| v.is_finite()),
                                       y in any::<f64>().prop_filter("finite", |v| v.is_finite()),
                                       t in 0.0f64..1e6) {
                let r = EventRecord::new(t, None, Event::Sample(SamplePayload { agents: vec![AgentSnapshot {
                    id: AgentId(1), species: Species::Prey, origin: Origin::Random, controller: 1,
                    position: Point::new(x, y), heading: x, tag: Tag::Negative, active: true, adversary: None,
                }]}));
                let back = EventRecord::from_json(&r.to_json()).unwrap();
                prop_assert_eq!(back, r);
            }
        }
    }
}
