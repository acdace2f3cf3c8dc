//! Text interchange formats.
//!
//! Every format starts with a `#<name> v1` header line.
//!
//! | format        | header              | body line                          |
//! |---------------|---------------------|------------------------------------|
//! | kernel        | `#kernel v1 total=T`| `LABEL<TAB>COUNT`, sorted by label |
//! | frame events  | `#events v1`        | `label t x`                        |
//! | branch events | `#branch-events v1` | `name outcome:count[,...]`         |
//!
//! Kernel labels use the wire form, components joined by `.` (`Au.Bu`).
//! Blank lines and lines starting with `//` are ignored in input files.
//! Life patterns are handled by [`crate::life::LifeState::from_plaintext`].

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::ensemble::{ArrowRow, SampleReport};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, OutcomeLabel};
use crate::life::BlockHistory;
use crate::mwi::EventSpec;
use crate::relativity::Event;

fn body_lines(text: &str, header: &str) -> Result<(String, Vec<(usize, String)>)> {
    let mut lines = text.lines().enumerate();
    let first = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((i, l)) => break (i, l.trim().to_string()),
            None => return Err(Error::parse(1, format!("missing {header} header"))),
        }
    };
    let mut words = first.1.split_whitespace();
    if words.next() != Some(header) || words.next() != Some("v1") {
        return Err(Error::parse(
            first.0 + 1,
            format!("expected header `{header} v1`, found {:?}", first.1),
        ));
    }
    let rest: Vec<String> = words.map(str::to_string).collect();
    let body = lines
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with("//")
        })
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .collect();
    Ok((rest.join(" "), body))
}

pub fn write_kernel(kernel: &Kernel) -> String {
    let mut out = format!("#kernel v1 total={}\n", kernel.total());
    for (label, count) in kernel.counts() {
        writeln!(out, "{}\t{}", label.to_wire(), count).unwrap();
    }
    out
}

/// Parses a kernel file. Counts are kept as written; a `total=` attribute,
/// if present, must match their sum.
pub fn parse_kernel(text: &str) -> Result<Kernel> {
    let (attrs, body) = body_lines(text, "#kernel")?;
    let mut declared_total = None;
    for attr in attrs.split_whitespace() {
        match attr.split_once('=') {
            Some(("total", v)) => {
                declared_total = Some(
                    v.parse::<BigUint>()
                        .map_err(|_| Error::parse(1, format!("bad total {v:?}")))?,
                )
            }
            _ => {
                return Err(Error::parse(
                    1,
                    format!("unknown header attribute {attr:?}"),
                ))
            }
        }
    }
    let mut entries: Vec<(OutcomeLabel, BigUint)> = Vec::with_capacity(body.len());
    for (lineno, line) in body {
        let mut parts = line.split_whitespace();
        let (Some(label), Some(count), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(lineno, "expected LABEL<TAB>COUNT"));
        };
        let label: OutcomeLabel = label
            .parse()
            .map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
        if entries.iter().any(|(l, _)| l == &label) {
            return Err(Error::parse(
                lineno,
                format!("duplicate label {}", label.to_wire()),
            ));
        }
        let count: BigUint = count
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad count {count:?}")))?;
        entries.push((label, count));
    }
    let kernel = Kernel::from_counts(entries)?;
    if let Some(t) = declared_total {
        if &t != kernel.total() {
            return Err(Error::parse(
                1,
                format!("declared total {t} but counts sum to {}", kernel.total()),
            ));
        }
    }
    Ok(kernel)
}

pub fn parse_frame_events(text: &str) -> Result<Vec<Event>> {
    let (_, body) = body_lines(text, "#events")?;
    body.into_iter()
        .map(|(lineno, line)| {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [label, t, x] = parts[..] else {
                return Err(Error::parse(lineno, "expected `label t x`"));
            };
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(lineno, format!("bad number {s:?}")))
            };
            Event::new(label, num(t)?, num(x)?)
        })
        .collect()
}

pub fn write_frame_events(events: &[Event]) -> String {
    let mut out = String::from("#events v1\n");
    for e in events {
        writeln!(out, "{} {} {}", e.label, e.t, e.x).unwrap();
    }
    out
}

pub fn parse_branch_events(text: &str) -> Result<Vec<EventSpec>> {
    let (_, body) = body_lines(text, "#branch-events")?;
    let mut events: Vec<EventSpec> = Vec::new();
    for (lineno, line) in body {
        let Some((name, outcomes)) = line.split_once(char::is_whitespace) else {
            return Err(Error::parse(lineno, "expected `name outcome:count[,...]`"));
        };
        let mut pairs = Vec::new();
        for item in outcomes.trim().split(',') {
            let Some((o, c)) = item.trim().split_once(':') else {
                return Err(Error::parse(
                    lineno,
                    format!("expected outcome:count, got {item:?}"),
                ));
            };
            let label =
                OutcomeLabel::single(o.trim()).map_err(|e| Error::parse(lineno, e.to_string()))?;
            let count: BigUint = c
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad count {c:?}")))?;
            pairs.push((label, count));
        }
        let spec = Kernel::from_counts(pairs)
            .and_then(|k| EventSpec::new(name, k))
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        if events.iter().any(|e| e.name == spec.name) {
            return Err(Error::parse(lineno, format!("duplicate event {name}")));
        }
        events.push(spec);
    }
    if events.is_empty() {
        return Err(Error::NoEvents);
    }
    Ok(events)
}

pub fn write_branch_events(events: &[EventSpec]) -> String {
    let mut out = String::from("#branch-events v1\n");
    for e in events {
        let items: Vec<String> = e
            .kernel
            .counts()
            .iter()
            .map(|(l, c)| format!("{}:{}", l.to_wire(), c))
            .collect();
        writeln!(out, "{} {}", e.name, items.join(",")).unwrap();
    }
    out
}

/// `outcome,count,frequency,exact_probability`, one row per kernel outcome.
pub fn sample_csv(report: &SampleReport, kernel: &Kernel) -> String {
    let mut out = String::from("outcome,count,frequency,exact_probability\n");
    for (label, p) in kernel.distribution() {
        let count = report.counts.get(&label).copied().unwrap_or(0);
        writeln!(
            out,
            "{},{},{:.6},{}",
            label.to_wire(),
            count,
            report.frequency(&label),
            p
        )
        .unwrap();
    }
    out
}

/// `step,entropy_bits,num_classes`.
pub fn arrow_csv(rows: &[ArrowRow]) -> String {
    let mut out = String::from("step,entropy_bits,num_classes\n");
    for r in rows {
        writeln!(out, "{},{:.10},{}", r.step, r.entropy_bits, r.num_classes).unwrap();
    }
    out
}

/// `h,population`.
pub fn population_csv(history: &BlockHistory) -> String {
    let mut out = String::from("h,population\n");
    for (h, n) in history.populations().into_iter().enumerate() {
        writeln!(out, "{h},{n}").unwrap();
    }
    out
}
