use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use confapprox_core::{
    parse_csv, parse_pnml, parse_xes, ActivityKey, CsvConfig, EventLog, PnmlOptions, SystemNet,
};

use crate::Failure;

#[derive(Clone, Copy, ValueEnum)]
pub enum LogFormat {
    Xes,
    Csv,
}

#[derive(Args)]
pub struct LogOptions {
    /// Event log (`.xes` or `.csv`).
    #[arg(long)]
    pub log: PathBuf,
    /// Log format; detected from the file extension when omitted.
    #[arg(long, value_enum)]
    pub log_format: Option<LogFormat>,
    /// CSV column holding the case id.
    #[arg(long, default_value = "case")]
    pub case_column: String,
    /// CSV column holding the activity name.
    #[arg(long, default_value = "activity")]
    pub activity_column: String,
    /// CSV column used to order events within a case. Without it, events keep
    /// their row order.
    #[arg(long)]
    pub timestamp_column: Option<String>,
    /// CSV field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Args)]
pub struct ModelOptions {
    /// Petri net in PNML.
    #[arg(long)]
    pub model: PathBuf,
    /// Final marking as `place:count,...`; overrides the one in the model file.
    #[arg(long)]
    pub final_marking: Option<String>,
    /// Comma-separated transition ids or names to treat as silent.
    #[arg(long)]
    pub silent: Option<String>,
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: confapprox_core::Error) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

pub fn load_log(opts: &LogOptions) -> Result<(EventLog, ActivityKey), Failure> {
    let format = match opts.log_format {
        Some(f) => f,
        None => {
            let ext = opts.log.extension().and_then(|e| e.to_str()).unwrap_or("");
            match ext.to_ascii_lowercase().as_str() {
                "xes" => LogFormat::Xes,
                "csv" => LogFormat::Csv,
                _ => {
                    return Err(Failure::input(format!(
                        "{}: cannot tell the log format from the extension; use --log-format",
                        opts.log.display()
                    )))
                }
            }
        }
    };
    let mut key = ActivityKey::new();
    let reader = open(&opts.log)?;
    let log = match format {
        LogFormat::Xes => parse_xes(reader, &mut key),
        LogFormat::Csv => {
            if !opts.delimiter.is_ascii() {
                return Err(Failure::input(
                    "the CSV delimiter must be an ASCII character",
                ));
            }
            let config = CsvConfig {
                case_column: opts.case_column.clone(),
                activity_column: opts.activity_column.clone(),
                timestamp_column: opts.timestamp_column.clone(),
                delimiter: opts.delimiter as u8,
            };
            parse_csv(reader, &config, &mut key)
        }
    }
    .map_err(|e| with_path(&opts.log, e))?;
    if log.is_empty() {
        return Err(Failure::input(format!(
            "{}: the log has no traces",
            opts.log.display()
        )));
    }
    Ok((log, key))
}

pub fn parse_marking(text: &str) -> Result<Vec<(String, u32)>, Failure> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (place, count) = match part.rsplit_once(':') {
            Some((p, c)) => {
                let c = c.trim().parse::<u32>().map_err(|_| {
                    Failure::input(format!("bad token count in final marking entry `{part}`"))
                })?;
                (p.trim(), c)
            }
            None => (part, 1),
        };
        if place.is_empty() {
            return Err(Failure::input(format!(
                "empty place id in final marking entry `{part}`"
            )));
        }
        out.push((place.to_string(), count));
    }
    if out.is_empty() {
        return Err(Failure::input("the final marking is empty"));
    }
    Ok(out)
}

pub fn load_model(opts: &ModelOptions, key: &mut ActivityKey) -> Result<SystemNet, Failure> {
    let mut options = PnmlOptions::default();
    if let Some(text) = &opts.final_marking {
        options.final_marking = Some(parse_marking(text)?);
    }
    if let Some(list) = &opts.silent {
        options.silent_overrides = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
    }
    let reader = open(&opts.model)?;
    parse_pnml(reader, key, &options).map_err(|e| with_path(&opts.model, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markings() {
        assert_eq!(
            parse_marking("p_end:1, p2:3").ok().unwrap(),
            vec![("p_end".to_string(), 1), ("p2".to_string(), 3)]
        );
        assert_eq!(
            parse_marking("sink").ok().unwrap(),
            vec![("sink".to_string(), 1)]
        );
        assert!(parse_marking("p:x").is_err());
        assert!(parse_marking(":2").is_err());
        assert!(parse_marking(" , ").is_err());
    }
}
