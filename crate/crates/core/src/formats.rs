//! Text formats: ground-truth annotations, per-frame tracker logs, and the
//! CSV tables written by experiments.
//!
//! Annotations hold one frame per line, either `x,y,w,h` or an absence
//! marker (`absent`, or four `nan` fields). Tracker logs hold
//! `t,x,y,w,h,confidence[,verifier_score]`. Lines starting with `#` are
//! comments in both.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::BBox;
use crate::metrics::{MetricCurves, PredictionTrace};
use crate::sequence::SequenceGroundTruth;
use crate::tracker_api::TrackerOutput;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("no records")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl FormatError {
    fn parse(line: u64, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn writer<W: Write>(output: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_writer(output)
}

fn open(path: &Path) -> Result<File, FormatError> {
    File::open(path).map_err(|e| FormatError::io(path, e))
}

fn create(path: &Path) -> Result<File, FormatError> {
    File::create(path).map_err(|e| FormatError::io(path, e))
}

fn number(field: &str, line: u64) -> Result<f64, FormatError> {
    field
        .parse::<f64>()
        .map_err(|_| FormatError::parse(line, format!("not a number: '{field}'")))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Reads annotations; `name` becomes the sequence name.
pub fn read_groundtruth<R: Read>(input: R, name: &str) -> Result<SequenceGroundTruth, FormatError> {
    let mut frames = Vec::new();
    for record in reader(input).records() {
        let record = record?;
        let line = line_of(&record);
        let fields: Vec<&str> = record.iter().collect();
        let frame = match fields.as_slice() {
            [tok] if tok.eq_ignore_ascii_case("absent") => None,
            [a, b, c, d] if [a, b, c, d].iter().all(|f| f.eq_ignore_ascii_case("nan")) => None,
            [x, y, w, h] => {
                let b = BBox::new(number(x, line)?, number(y, line)?, number(w, line)?, number(h, line)?)
                    .map_err(|e| FormatError::parse(line, e.to_string()))?;
                Some(b)
            }
            _ => {
                return Err(FormatError::parse(
                    line,
                    format!("expected 'x,y,w,h' or 'absent', got {} fields", fields.len()),
                ))
            }
        };
        frames.push(frame);
    }
    if frames.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(SequenceGroundTruth::new(name, frames))
}

/// Reads an annotation file, naming the sequence after the file stem.
pub fn parse_groundtruth(path: &Path) -> Result<SequenceGroundTruth, FormatError> {
    let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    read_groundtruth(open(path)?, &name)
}

pub fn write_groundtruth<W: Write>(output: W, gt: &SequenceGroundTruth) -> Result<(), FormatError> {
    let mut w = writer(output);
    for frame in &gt.frames {
        match frame {
            Some(b) => w.write_record(b.to_array().map(|v| v.to_string()))?,
            None => w.write_record(["absent"])?,
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn export_groundtruth(path: &Path, gt: &SequenceGroundTruth) -> Result<(), FormatError> {
    write_groundtruth(create(path)?, gt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRecord {
    pub output: TrackerOutput,
    pub verifier_score: Option<f64>,
}

/// Per-frame records of one tracker on one sequence, indexed by frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerLog {
    pub name: String,
    pub records: Vec<LogRecord>,
}

impl TrackerLog {
    pub fn from_trace(trace: &PredictionTrace) -> Self {
        Self {
            name: trace.name.clone(),
            records: trace
                .frames
                .iter()
                .map(|&output| LogRecord {
                    output,
                    verifier_score: None,
                })
                .collect(),
        }
    }

    pub fn to_trace(&self) -> PredictionTrace {
        PredictionTrace::new(self.name.clone(), self.records.iter().map(|r| r.output).collect())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Reads a tracker log. Frame numbers must start at 0 and increase by one.
pub fn read_log<R: Read>(input: R, name: &str) -> Result<TrackerLog, FormatError> {
    let mut records = Vec::new();
    for record in reader(input).records() {
        let record = record?;
        let line = line_of(&record);
        if !(6..=7).contains(&record.len()) {
            return Err(FormatError::parse(
                line,
                format!("expected 6 or 7 fields, got {}", record.len()),
            ));
        }
        let t: usize = record[0]
            .parse()
            .map_err(|_| FormatError::parse(line, format!("bad frame number '{}'", &record[0])))?;
        if t != records.len() {
            return Err(FormatError::parse(
                line,
                format!("expected frame {}, got {t}", records.len()),
            ));
        }
        let v: Vec<f64> = (1..6).map(|i| number(&record[i], line)).collect::<Result<_, _>>()?;
        let bbox = BBox::new(v[0], v[1], v[2], v[3]).map_err(|e| FormatError::parse(line, e.to_string()))?;
        let output = TrackerOutput::new(bbox, v[4]).map_err(|e| FormatError::parse(line, e.to_string()))?;
        let verifier_score = match record.get(6) {
            Some(s) => {
                let s = number(s, line)?;
                if !(0.0..=1.0).contains(&s) {
                    return Err(FormatError::parse(line, format!("verifier score {s} outside [0, 1]")));
                }
                Some(s)
            }
            None => None,
        };
        records.push(LogRecord { output, verifier_score });
    }
    if records.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(TrackerLog {
        name: name.to_string(),
        records,
    })
}

pub fn parse_log(path: &Path) -> Result<TrackerLog, FormatError> {
    let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    read_log(open(path)?, &name)
}

pub fn write_log<W: Write>(output: W, log: &TrackerLog) -> Result<(), FormatError> {
    let mut w = writer(output);
    for (t, r) in log.records.iter().enumerate() {
        let [x, y, bw, bh] = r.output.bbox.to_array();
        let mut fields = vec![
            t.to_string(),
            x.to_string(),
            y.to_string(),
            bw.to_string(),
            bh.to_string(),
            r.output.confidence.to_string(),
        ];
        if let Some(v) = r.verifier_score {
            fields.push(v.to_string());
        }
        w.write_record(&fields)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_log_file(path: &Path, log: &TrackerLog) -> Result<(), FormatError> {
    write_log(create(path)?, log)
}

/// Row of a `sequence,metric,value` table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub sequence: String,
    pub metric: String,
    pub value: Option<f64>,
}

pub fn write_metrics<W: Write>(output: W, rows: &[MetricRow]) -> Result<(), FormatError> {
    let mut w = writer(output);
    w.write_record(["sequence", "metric", "value"])?;
    for r in rows {
        let value = r.value.map_or_else(|| "NA".to_string(), |v| v.to_string());
        w.write_record([r.sequence.as_str(), r.metric.as_str(), value.as_str()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_metrics<R: Read>(input: R) -> Result<Vec<MetricRow>, FormatError> {
    let mut rows = Vec::new();
    let mut r = reader(input);
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let line = line_of(&record);
        if i == 0 && record.get(0) == Some("sequence") {
            continue;
        }
        if record.len() != 3 {
            return Err(FormatError::parse(line, "expected 'sequence,metric,value'"));
        }
        let value = match &record[2] {
            "NA" => None,
            v => Some(number(v, line)?),
        };
        rows.push(MetricRow {
            sequence: record[0].to_string(),
            metric: record[1].to_string(),
            value,
        });
    }
    Ok(rows)
}

pub fn write_curves<W: Write>(output: W, curves: &[MetricCurves]) -> Result<(), FormatError> {
    let mut w = writer(output);
    w.write_record(["metric", "threshold", "value"])?;
    for c in curves {
        for (th, v) in c.thresholds.iter().zip(&c.values) {
            w.write_record([c.metric.clone(), th.to_string(), v.to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes a table with a header row; values are written verbatim.
pub fn write_table<W: Write>(output: W, header: &[&str], rows: &[Vec<String>]) -> Result<(), FormatError> {
    let mut w = writer(output);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
