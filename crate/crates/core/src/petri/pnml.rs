use std::collections::HashMap;
use std::io::Read;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{NetBuilder, PlaceId, SystemNet};
use crate::error::{Error, Result};
use crate::log::ActivityKey;
use crate::xml::{attribute, parse_error};

/// Options controlling how a PNML document is turned into a [`SystemNet`].
#[derive(Debug, Clone)]
pub struct PnmlOptions {
    /// Transition ids or names forced to be silent.
    pub silent_overrides: Vec<String>,
    /// Case-insensitive name prefixes marking a transition as silent.
    pub silent_prefixes: Vec<String>,
    /// Final marking as `(place id, tokens)`; replaces any `finalmarkings`
    /// element in the document.
    pub final_marking: Option<Vec<(String, u32)>>,
}

impl Default for PnmlOptions {
    fn default() -> Self {
        PnmlOptions {
            silent_overrides: Vec::new(),
            silent_prefixes: vec!["tau".into(), "τ".into()],
            final_marking: None,
        }
    }
}

#[derive(Debug, Default)]
struct RawTransition {
    id: String,
    name: Option<String>,
    invisible: bool,
}

#[derive(Debug, Default)]
struct RawArc {
    id: String,
    source: String,
    target: String,
    weight: u32,
}

#[derive(Debug, Default)]
struct Collected {
    places: Vec<(String, u32)>,
    transitions: Vec<RawTransition>,
    arcs: Vec<RawArc>,
    final_places: Vec<(String, u32)>,
}

#[derive(Debug)]
enum Open {
    Place { id: String, tokens: u32 },
    Transition(RawTransition),
    Arc(RawArc),
    FinalPlace { idref: String, tokens: u32 },
}

/// Reads a PNML place/transition net.
///
/// Silent transitions: an explicit `toolspecific` invisible flag wins, then
/// `options.silent_overrides`, then an empty name or one of the configured
/// prefixes.
pub fn parse_pnml<R: Read>(
    mut input: R,
    key: &mut ActivityKey,
    options: &PnmlOptions,
) -> Result<SystemNet> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let bytes = bytes.as_slice();
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);

    let mut path: Vec<Vec<u8>> = Vec::new();
    let mut open: Option<Open> = None;
    let mut acc = Collected::default();
    let mut saw_final = false;
    let mut markings_seen = 0usize;

    loop {
        let offset = reader.buffer_position();
        let event = reader
            .read_event()
            .map_err(|e| parse_error(bytes, reader.error_position(), e.to_string()))?;
        match event {
            Event::Start(e) => {
                let name = e.local_name().as_ref().to_vec();
                start(
                    &e,
                    &name,
                    &path,
                    &mut open,
                    bytes,
                    offset,
                    &mut markings_seen,
                    &mut saw_final,
                )?;
                path.push(name);
            }
            Event::Empty(e) => {
                let name = e.local_name().as_ref().to_vec();
                start(
                    &e,
                    &name,
                    &path,
                    &mut open,
                    bytes,
                    offset,
                    &mut markings_seen,
                    &mut saw_final,
                )?;
                path.push(name);
                end(&mut path, &mut open, &mut acc);
            }
            Event::Text(t) => {
                let text = t
                    .unescape()
                    .map_err(|e| parse_error(bytes, offset, e.to_string()))?;
                text_content(text.trim(), &path, &mut open, bytes, offset)?;
            }
            Event::End(_) => end(&mut path, &mut open, &mut acc),
            Event::Eof => {
                if !path.is_empty() {
                    return Err(parse_error(bytes, offset, "unexpected end of document"));
                }
                break;
            }
            _ => {}
        }
    }

    let document_final = saw_final.then(|| std::mem::take(&mut acc.final_places));
    assemble(key, options, acc, document_final)
}

#[allow(clippy::too_many_arguments)]
fn start(
    e: &BytesStart<'_>,
    name: &[u8],
    path: &[Vec<u8>],
    open: &mut Option<Open>,
    bytes: &[u8],
    offset: u64,
    markings_seen: &mut usize,
    saw_final: &mut bool,
) -> Result<()> {
    let attr = |n: &str| attribute(bytes, offset, e, n);
    match name {
        b"place" if open.is_none() && !in_final(path) => {
            let id = attr("id")?.ok_or_else(|| parse_error(bytes, offset, "place without id"))?;
            *open = Some(Open::Place { id, tokens: 0 });
        }
        b"place" if in_final(path) && *markings_seen == 1 => {
            let idref = attr("idref")?
                .ok_or_else(|| parse_error(bytes, offset, "final marking place without idref"))?;
            *open = Some(Open::FinalPlace { idref, tokens: 0 });
        }
        b"transition" if open.is_none() => {
            let id =
                attr("id")?.ok_or_else(|| parse_error(bytes, offset, "transition without id"))?;
            *open = Some(Open::Transition(RawTransition {
                id,
                ..RawTransition::default()
            }));
        }
        b"arc" if open.is_none() => {
            let id = attr("id")?.unwrap_or_default();
            let source = attr("source")?
                .ok_or_else(|| Error::Structural(format!("arc {id:?} has no source")))?;
            let target = attr("target")?
                .ok_or_else(|| Error::Structural(format!("arc {id:?} has no target")))?;
            if let Some(kind) = attr("type")? {
                reject_arc_type(&id, &kind)?;
            }
            *open = Some(Open::Arc(RawArc {
                id,
                source,
                target,
                weight: 1,
            }));
        }
        b"toolspecific" => match open {
            Some(Open::Transition(t)) => {
                if attr("activity")?.as_deref() == Some("$invisible$")
                    || attr("invisible")?.as_deref() == Some("true")
                {
                    t.invisible = true;
                }
            }
            Some(Open::Arc(a)) => {
                if let Some(kind) = attr("arcType")?.or(attr("arctype")?) {
                    reject_arc_type(&a.id, &kind)?;
                }
            }
            _ => {}
        },
        b"type" => {
            if let Some(Open::Arc(a)) = open {
                if let Some(kind) = attr("value")? {
                    reject_arc_type(&a.id, &kind)?;
                }
            }
        }
        b"finalmarkings" => *saw_final = true,
        b"marking" if in_final(path) => *markings_seen += 1,
        _ => {}
    }
    Ok(())
}

fn in_final(path: &[Vec<u8>]) -> bool {
    path.iter().any(|p| p == b"finalmarkings")
}

fn reject_arc_type(id: &str, kind: &str) -> Result<()> {
    match kind.to_ascii_lowercase().as_str() {
        "" | "normal" | "default" => Ok(()),
        other => Err(Error::Structural(format!(
            "arc {id:?} has unsupported type {other:?}; only plain arcs are allowed"
        ))),
    }
}

fn text_content(
    text: &str,
    path: &[Vec<u8>],
    open: &mut Option<Open>,
    bytes: &[u8],
    offset: u64,
) -> Result<()> {
    let parent =
        |n: &[u8]| path.len() >= 2 && path[path.len() - 2] == n && path[path.len() - 1] == b"text";
    let count = || {
        text.parse::<u32>().map_err(|_| {
            parse_error(
                bytes,
                offset,
                format!("expected a token count, got {text:?}"),
            )
        })
    };
    match open {
        Some(Open::Place { tokens, .. }) if parent(b"initialMarking") => *tokens = count()?,
        Some(Open::Transition(t)) if parent(b"name") => t.name = Some(text.to_owned()),
        Some(Open::Arc(a)) if parent(b"inscription") => a.weight = count()?,
        Some(Open::FinalPlace { tokens, .. })
            if path.last().map(Vec::as_slice) == Some(b"text") =>
        {
            *tokens = count()?
        }
        _ => {}
    }
    Ok(())
}

fn end(path: &mut Vec<Vec<u8>>, open: &mut Option<Open>, acc: &mut Collected) {
    let Some(name) = path.pop() else { return };
    let closes = matches!(
        (&*open, name.as_slice()),
        (Some(Open::Place { .. } | Open::FinalPlace { .. }), b"place")
            | (Some(Open::Transition(_)), b"transition")
            | (Some(Open::Arc(_)), b"arc")
    );
    if closes {
        match open.take() {
            Some(Open::Place { id, tokens }) => acc.places.push((id, tokens)),
            Some(Open::FinalPlace { idref, tokens }) => acc.final_places.push((idref, tokens)),
            Some(Open::Transition(t)) => acc.transitions.push(t),
            Some(Open::Arc(a)) => acc.arcs.push(a),
            None => {}
        }
    }
}

fn assemble(
    key: &mut ActivityKey,
    options: &PnmlOptions,
    acc: Collected,
    document_final: Option<Vec<(String, u32)>>,
) -> Result<SystemNet> {
    let Collected {
        places,
        transitions,
        arcs,
        ..
    } = acc;
    let mut b = NetBuilder::new();
    let mut place_ids: HashMap<String, PlaceId> = HashMap::new();
    for (id, tokens) in &places {
        if place_ids.contains_key(id) {
            return Err(Error::Structural(format!("duplicate node id {id:?}")));
        }
        let p = b.place(id.clone());
        place_ids.insert(id.clone(), p);
        if *tokens > 0 {
            b.initial(p, *tokens);
        }
    }
    let mut transition_ids = HashMap::new();
    for t in &transitions {
        if place_ids.contains_key(&t.id) || transition_ids.contains_key(&t.id) {
            return Err(Error::Structural(format!("duplicate node id {:?}", t.id)));
        }
        let name = t.name.as_deref().map(str::trim).unwrap_or("");
        let silent = t.invisible
            || options
                .silent_overrides
                .iter()
                .any(|o| *o == t.id || (!name.is_empty() && o == name))
            || name.is_empty()
            || options
                .silent_prefixes
                .iter()
                .any(|p| name.to_lowercase().starts_with(&p.to_lowercase()));
        let label = (!silent).then(|| key.intern(name));
        transition_ids.insert(t.id.clone(), b.transition(t.id.clone(), label));
    }
    for a in &arcs {
        match (
            place_ids.get(&a.source),
            transition_ids.get(&a.target),
            transition_ids.get(&a.source),
            place_ids.get(&a.target),
        ) {
            (Some(&p), Some(&t), _, _) => {
                b.input(p, t, a.weight);
            }
            (_, _, Some(&t), Some(&p)) => {
                b.output(t, p, a.weight);
            }
            _ => {
                return Err(Error::Structural(format!(
                    "arc {:?} connects {:?} to {:?}, which is not a place/transition pair of known nodes",
                    a.id, a.source, a.target
                )))
            }
        }
    }

    let final_spec = options
        .final_marking
        .clone()
        .or(document_final)
        .ok_or_else(|| {
            Error::Config(
            "the model has no final marking; supply one with --final-marking \"place:count,...\""
                .into(),
        )
        })?;
    for (id, tokens) in final_spec {
        let p = place_ids.get(&id).ok_or_else(|| {
            Error::Structural(format!("final marking references unknown place {id:?}"))
        })?;
        b.final_tokens(*p, tokens);
    }
    b.build()
}
