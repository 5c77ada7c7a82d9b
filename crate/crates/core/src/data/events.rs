//! Event records: reporting delay and underwriting time pairs.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One observed claim. Each event carries unit weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<T> {
    pub delay: T,
    pub underwriting: T,
}

/// Observed claims on the triangle `delay + underwriting <= horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSample<T> {
    events: Vec<Event<T>>,
    horizon: T,
}

impl<T: Scalar> EventSample<T> {
    /// Validate that every event lies in the observable triangle.
    pub fn new(events: Vec<Event<T>>, horizon: T) -> Result<Self> {
        if !(horizon > T::zero()) {
            return Err(Error::invalid("horizon", "must be positive"));
        }
        for (index, e) in events.iter().enumerate() {
            let ok = e.delay >= T::zero()
                && e.underwriting >= T::zero()
                && e.delay + e.underwriting <= horizon
                && e.delay.is_finite()
                && e.underwriting.is_finite();
            if !ok {
                return Err(Error::EventOutsideSupport {
                    index,
                    delay: e.delay.to_f64_lossy(),
                    underwriting: e.underwriting.to_f64_lossy(),
                    horizon: horizon.to_f64_lossy(),
                });
            }
        }
        Ok(Self { events, horizon })
    }

    pub fn events(&self) -> &[Event<T>] {
        &self.events
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Read events from CSV with the required `delay,underwriting` header.
pub fn load_events<T: Scalar>(path: &Path, horizon: T) -> Result<EventSample<T>> {
    let text = fs::read_to_string(path)?;
    parse_events(&text, horizon)
}

pub fn parse_events<T: Scalar>(text: &str, horizon: T) -> Result<EventSample<T>> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) if line.trim().is_empty() => continue,
            Some((lineno, line)) => break (lineno + 1, line.trim()),
            None => return Err(Error::parse(0, "empty file, expected header")),
        }
    };
    let normalized = header.1.replace(' ', "");
    if normalized != "delay,underwriting" {
        return Err(Error::parse(
            header.0,
            format!("expected header \"delay,underwriting\", got {:?}", header.1),
        ));
    }
    let mut events = Vec::new();
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let delay = parse_field::<T>(fields.next(), lineno, "delay")?;
        let underwriting = parse_field::<T>(fields.next(), lineno, "underwriting")?;
        if fields.next().is_some() {
            return Err(Error::parse(lineno, "expected exactly two columns"));
        }
        events.push(Event { delay, underwriting });
    }
    EventSample::new(events, horizon)
}

fn parse_field<T: Scalar>(field: Option<&str>, lineno: usize, name: &str) -> Result<T> {
    let raw = field
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::parse(lineno, format!("missing {name} column")))?;
    let value: f64 = raw
        .parse()
        .map_err(|_| Error::parse(lineno, format!("not a number in {name} column: {raw:?}")))?;
    Ok(T::from_f64_lossy(value))
}

/// Write events in the format accepted by [`load_events`].
pub fn save_events<T: Scalar>(sample: &EventSample<T>, path: &Path) -> Result<()> {
    fs::write(path, format_events(sample))?;
    Ok(())
}

pub fn format_events<T: Scalar>(sample: &EventSample<T>) -> String {
    let mut out = String::from("delay,underwriting\n");
    for e in sample.events() {
        out.push_str(&format!("{},{}\n", e.delay, e.underwriting));
    }
    out
}
