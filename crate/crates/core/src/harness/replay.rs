//! Rebuilds metrics from a stored log without re-simulating, after checking
//! that the log is complete and ordered.

use crate::error::{Result, SimError};
use crate::harness::config::ExperimentConfig;
use crate::harness::event::{Event, EventLog, EventRecord, LOG_FORMAT_VERSION};
use crate::metrics::{series_from_log, MetricsSeries};
use crate::world::BODY_COUNT;

/// Structural checks; returns the config recorded in the header.
pub fn verify_log(log: &EventLog) -> Result<&ExperimentConfig> {
    let records = &log.records;
    let header = match records.first() {
        None => {
            return Err(SimError::Truncated {
                index: 0,
                what: "Header".into(),
            })
        }
        Some(EventRecord {
            event: Event::Header(h),
            ..
        }) => h,
        Some(r) => {
            return Err(SimError::Integrity(format!(
                "record #0 is {:?}, expected Header",
                r.kind()
            )))
        }
    };
    if header.format != LOG_FORMAT_VERSION {
        return Err(SimError::Integrity(format!(
            "unsupported log format {}",
            header.format
        )));
    }
    let cfg = &header.config;
    cfg.validate()?;
    if cfg.model_hash() != header.model_hash {
        return Err(SimError::Integrity(
            "header config does not match its recorded hash".into(),
        ));
    }

    let tpc = cfg.ticks_per_control();
    let expected_samples = cfg.sample_count();
    let mut samples = 0usize;
    let mut prev_t = f64::NEG_INFINITY;
    for (i, r) in records.iter().enumerate() {
        if !r.t.is_finite() {
            return Err(SimError::Integrity(format!("record #{i} has non-finite t")));
        }
        if r.t < prev_t {
            return Err(SimError::Integrity(format!(
                "record #{i} at t={} is earlier than the preceding t={prev_t}",
                r.t
            )));
        }
        prev_t = r.t;
        if let Some(a) = r.agent {
            if a.index() >= BODY_COUNT {
                return Err(SimError::Integrity(format!(
                    "record #{i} names unknown agent {}",
                    a.0
                )));
            }
        }
        match &r.event {
            Event::Header(_) if i > 0 => {
                return Err(SimError::Integrity(format!("record #{i}: second Header")))
            }
            Event::End(end) => {
                if i + 1 != records.len() {
                    return Err(SimError::Integrity(format!(
                        "record #{i}: End before the last record"
                    )));
                }
                if end.records != i {
                    return Err(SimError::Integrity(format!(
                        "End reports {} records but {i} precede it",
                        end.records
                    )));
                }
            }
            Event::Sample(s) => {
                let want_t = cfg.time_at(samples as u64 * tpc);
                if samples >= expected_samples || r.t != want_t {
                    return Err(SimError::Integrity(format!(
                        "record #{i}: Sample at t={} where t={want_t} was expected",
                        r.t
                    )));
                }
                let ordered = s.agents.len() == BODY_COUNT
                    && s.agents.iter().enumerate().all(|(k, a)| a.id.index() == k);
                if !ordered {
                    return Err(SimError::Integrity(format!(
                        "record #{i}: Sample must list all {BODY_COUNT} agents in id order"
                    )));
                }
                samples += 1;
            }
            _ => {}
        }
    }

    let ended = matches!(records.last().map(|r| &r.event), Some(Event::End(_)));
    if !ended {
        let what = if samples < expected_samples {
            format!("Sample at t={}", cfg.time_at(samples as u64 * tpc))
        } else {
            "End".to_string()
        };
        return Err(SimError::Truncated {
            index: records.len(),
            what,
        });
    }
    if samples != expected_samples {
        return Err(SimError::Integrity(format!(
            "expected {expected_samples} Sample records, found {samples}"
        )));
    }
    Ok(cfg)
}

/// Metrics of a log, using the config stored in its header.
pub fn metrics_from_log(log: &EventLog) -> Result<MetricsSeries> {
    let cfg = verify_log(log)?;
    Ok(series_from_log(&log.records, cfg))
}

/// Metrics of a log, refusing if `config` describes a different model.
pub fn replay(log: &EventLog, config: &ExperimentConfig) -> Result<MetricsSeries> {
    config.validate()?;
    let recorded = verify_log(log)?;
    let found = config.model_hash();
    let expected = recorded.model_hash();
    if found != expected {
        return Err(SimError::ConfigMismatch { expected, found });
    }
    Ok(series_from_log(&log.records, recorded))
}
