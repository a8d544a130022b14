#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use confapprox_core::{ActivityKey, EventLog, SystemNet};

pub const BIN: &str = env!("CARGO_BIN_EXE_confapprox");

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn write_xes(log: &EventLog, key: &ActivityKey) -> String {
    let mut out =
        String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log xes.version=\"1.0\">\n");
    for (trace, freq) in log.variants() {
        for _ in 0..*freq {
            out.push_str("  <trace>\n");
            for &a in trace.iter() {
                writeln!(
                    out,
                    "    <event><string key=\"concept:name\" value=\"{}\"/></event>",
                    escape(key.name(a))
                )
                .unwrap();
            }
            out.push_str("  </trace>\n");
        }
    }
    out.push_str("</log>\n");
    out
}

pub fn write_pnml(net: &SystemNet, key: &ActivityKey) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pnml><net id=\"n\"><page id=\"pg\">\n",
    );
    let init = net.initial_marking();
    for (i, p) in net.places().iter().enumerate() {
        write!(out, "<place id=\"{}\">", escape(&p.id)).unwrap();
        if init.tokens(confapprox_core::petri::PlaceId(i)) > 0 {
            write!(
                out,
                "<initialMarking><text>{}</text></initialMarking>",
                init.tokens(confapprox_core::petri::PlaceId(i))
            )
            .unwrap();
        }
        out.push_str("</place>\n");
    }
    for t in net.transitions() {
        let name = t.label.map(|a| key.name(a).to_string()).unwrap_or_default();
        write!(
            out,
            "<transition id=\"{}\"><name><text>{}</text></name>",
            escape(&t.id),
            escape(&name)
        )
        .unwrap();
        if t.label.is_none() {
            out.push_str("<toolspecific tool=\"ProM\" version=\"6.4\" activity=\"$invisible$\"/>");
        }
        out.push_str("</transition>\n");
    }
    let mut arc = 0;
    for t in net.transitions() {
        for (p, w) in &t.inputs {
            writeln!(out, "<arc id=\"arc{arc}\" source=\"{}\" target=\"{}\"><inscription><text>{w}</text></inscription></arc>", escape(&net.places()[p.0].id), escape(&t.id)).unwrap();
            arc += 1;
        }
        for (p, w) in &t.outputs {
            writeln!(out, "<arc id=\"arc{arc}\" source=\"{}\" target=\"{}\"><inscription><text>{w}</text></inscription></arc>", escape(&t.id), escape(&net.places()[p.0].id)).unwrap();
            arc += 1;
        }
    }
    out.push_str("</page><finalmarkings><marking>\n");
    let fin = net.final_marking();
    for (i, p) in net.places().iter().enumerate() {
        let k = fin.tokens(confapprox_core::petri::PlaceId(i));
        if k > 0 {
            writeln!(
                out,
                "<place idref=\"{}\"><text>{k}</text></place>",
                escape(&p.id)
            )
            .unwrap();
        }
    }
    out.push_str("</marking></finalmarkings></net></pnml>\n");
    out
}

/// Drops timing-derived keys (`*_ms`, `pi*`) and the echoed worker count,
/// the only fields allowed to differ between runs.
pub fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.retain(|k, _| !k.ends_with("_ms") && !k.starts_with("pi") && k != "workers");
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
