use std::io::Read;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{ActivityKey, EventLog, Trace};
use crate::error::{Error, Result};
use crate::xml::{attribute, parse_error};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scope {
    Trace,
    Event,
    Other,
}

struct Builder {
    traces: Vec<Trace>,
    current: Option<Vec<super::Activity>>,
    event_name: Option<String>,
    event_depth: usize,
    event_index: usize,
}

/// Reads an XES document. Only `log`, `trace` and `event` elements and the
/// `concept:name` string attribute of events are interpreted.
pub fn parse_xes<R: Read>(mut input: R, key: &mut ActivityKey) -> Result<EventLog> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let bytes = bytes.as_slice();
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);

    let mut stack: Vec<Scope> = Vec::new();
    let mut b = Builder {
        traces: Vec::new(),
        current: None,
        event_name: None,
        event_depth: 0,
        event_index: 0,
    };

    loop {
        let offset = reader.buffer_position();
        let event = reader
            .read_event()
            .map_err(|e| parse_error(bytes, reader.error_position(), e.to_string()))?;
        match event {
            Event::Start(e) => {
                let scope = open(&mut b, &stack, &e, bytes, offset)?;
                stack.push(scope);
            }
            Event::Empty(e) => {
                let scope = open(&mut b, &stack, &e, bytes, offset)?;
                stack.push(scope);
                close(&mut b, &mut stack, key)?;
            }
            Event::End(_) => close(&mut b, &mut stack, key)?,
            Event::Eof => {
                if !stack.is_empty() {
                    return Err(parse_error(bytes, offset, "unexpected end of document"));
                }
                break;
            }
            _ => {}
        }
    }
    Ok(EventLog::from_traces(b.traces, key))
}

fn open(
    b: &mut Builder,
    stack: &[Scope],
    e: &BytesStart<'_>,
    bytes: &[u8],
    offset: u64,
) -> Result<Scope> {
    let name = e.local_name();
    match name.as_ref() {
        b"trace" if b.current.is_none() => {
            b.current = Some(Vec::new());
            b.event_index = 0;
            Ok(Scope::Trace)
        }
        b"event" if b.current.is_some() && stack.last() == Some(&Scope::Trace) => {
            b.event_name = None;
            b.event_depth = stack.len() + 1;
            Ok(Scope::Event)
        }
        b"string" if b.current.is_some() && stack.len() == b.event_depth => {
            if attribute(bytes, offset, e, "key")?.as_deref() == Some("concept:name") {
                let value = attribute(bytes, offset, e, "value")?.unwrap_or_default();
                if !value.is_empty() && b.event_name.is_none() {
                    b.event_name = Some(value);
                }
            }
            Ok(Scope::Other)
        }
        _ => Ok(Scope::Other),
    }
}

fn close(b: &mut Builder, stack: &mut Vec<Scope>, key: &mut ActivityKey) -> Result<()> {
    match stack.pop() {
        Some(Scope::Trace) => {
            let events = b.current.take().unwrap_or_default();
            b.traces.push(Trace(events));
        }
        Some(Scope::Event) => {
            let name = b.event_name.take().ok_or(Error::MissingActivity {
                trace: b.traces.len(),
                event: b.event_index,
            })?;
            let activity = key.intern(&name);
            if let Some(events) = b.current.as_mut() {
                events.push(activity);
            }
            b.event_index += 1;
            b.event_depth = 0;
        }
        _ => {}
    }
    Ok(())
}
