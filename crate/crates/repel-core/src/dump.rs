//! Readers and writers for the artifact file formats.
//!
//! Embedding dumps use the word2vec text layout: a `<count> <dim>` header
//! followed by one `<id> <v1> ... <vd>` line per row, reals fixed to six
//! decimals. All writers iterate in deterministic order and format floats
//! with fixed precision, so identical inputs produce identical bytes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{EvalReport, EvalTask, RankedPrediction};
use crate::pattern::PatternKind;

fn fixed(v: f64) -> String {
    format!("{:.6}", v)
}

// ---------------------------------------------------------------------------
// Embedding dumps.
// ---------------------------------------------------------------------------

pub fn write_embedding_file(
    path: impl AsRef<Path>,
    labels: &[String],
    data: &[f64],
    dim: usize,
) -> Result<()> {
    let path = path.as_ref();
    assert_eq!(labels.len() * dim, data.len(), "label/vector count mismatch");
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "{} {}", labels.len(), dim)?;
        for (i, label) in labels.iter().enumerate() {
            write!(out, "{}", label)?;
            for v in &data[i * dim..(i + 1) * dim] {
                write!(out, " {}", fixed(*v))?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Reads an embedding dump back into labels and a row-major matrix.
pub fn read_embedding_file(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<f64>, usize)> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::malformed(path, 1, "missing header line"))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let mut parts = header.split_whitespace();
    let count: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::malformed(path, 1, "header: expected `<count> <dim>`"))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::malformed(path, 1, "header: expected `<count> <dim>`"))?;

    let mut labels = Vec::with_capacity(count);
    let mut data = Vec::with_capacity(count * dim);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label = parts
            .next()
            .ok_or_else(|| Error::malformed(path, line_no, "missing id"))?;
        labels.push(label.to_string());
        let before = data.len();
        for p in parts {
            let v: f64 = p
                .parse()
                .map_err(|_| Error::malformed(path, line_no, format!("bad real `{}`", p)))?;
            data.push(v);
        }
        if data.len() - before != dim {
            return Err(Error::malformed(
                path,
                line_no,
                format!("expected {} components, found {}", dim, data.len() - before),
            ));
        }
    }
    if labels.len() != count {
        return Err(Error::malformed(
            path,
            1,
            format!("header declared {} rows, found {}", count, labels.len()),
        ));
    }
    Ok((labels, data, dim))
}

// ---------------------------------------------------------------------------
// Selected-pattern dump.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PatternDumpRow {
    pub relation: String,
    pub kind: PatternKind,
    pub canonical: String,
    pub reliability: f64,
    pub combined: f64,
    pub support: usize,
}

/// Writes `relation<TAB>kind<TAB>pattern<TAB>R<TAB>combined<TAB>support`,
/// sorted by combined score descending (ties: relation, then pattern).
pub fn write_pattern_dump(path: impl AsRef<Path>, rows: &[PatternDumpRow]) -> Result<()> {
    let path = path.as_ref();
    let mut sorted: Vec<&PatternDumpRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        b.combined
            .partial_cmp(&a.combined)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.relation.cmp(&b.relation))
            .then_with(|| a.canonical.cmp(&b.canonical))
            .then_with(|| a.kind.as_str().cmp(b.kind.as_str()))
    });
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for row in sorted {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            row.relation,
            row.kind.as_str(),
            row.canonical,
            fixed(row.reliability),
            fixed(row.combined),
            row.support
        )
        .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_pattern_dump(path: impl AsRef<Path>) -> Result<Vec<PatternDumpRow>> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(Error::malformed(path, line_no, "expected 6 tab-separated columns"));
        }
        let kind = match cols[1] {
            "meta" => PatternKind::Meta,
            "path" => PatternKind::Path,
            other => {
                return Err(Error::malformed(path, line_no, format!("unknown kind `{}`", other)))
            }
        };
        let parse_f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::malformed(path, line_no, format!("bad real `{}`", s)))
        };
        rows.push(PatternDumpRow {
            relation: cols[0].to_string(),
            kind,
            canonical: cols[2].to_string(),
            reliability: parse_f(cols[3])?,
            combined: parse_f(cols[4])?,
            support: cols[5]
                .parse()
                .map_err(|_| Error::malformed(path, line_no, format!("bad count `{}`", cols[5])))?,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Trace, reports, predictions, instances.
// ---------------------------------------------------------------------------

pub fn write_trace(path: impl AsRef<Path>, trace: &[crate::cotrain::IterationRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "iteration\tmean_reliability\tmean_bonus\to_text\to_seed\to_interaction")?;
        for rec in trace {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                rec.iteration,
                fixed(rec.mean_reliability),
                fixed(rec.mean_bonus),
                fixed(rec.text_objective),
                fixed(rec.seed_objective),
                fixed(rec.interaction_objective)
            )?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Tab-separated metric rows: `metric<TAB>cutoff?<TAB>value`.
pub fn write_report(path: impl AsRef<Path>, report: &EvalReport) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let mut write = || -> std::io::Result<()> {
        let task = match report.task {
            EvalTask::Kbc => "kbc",
            EvalTask::Re => "re",
        };
        writeln!(out, "task\t{}", task)?;
        if let Some(mr) = report.mean_rank {
            writeln!(out, "mean_rank\t{}", fixed(mr))?;
        }
        for (k, v) in &report.hits_at {
            writeln!(out, "hits@{}\t{}", k, fixed(*v))?;
        }
        for (k, v) in &report.precision_at {
            writeln!(out, "p@{}\t{}", k, fixed(*v))?;
        }
        for (k, v) in &report.recall_at {
            writeln!(out, "r@{}\t{}", k, fixed(*v))?;
        }
        for (k, v) in &report.f1_at {
            writeln!(out, "f1@{}\t{}", k, fixed(*v))?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn write_pr_curve(path: impl AsRef<Path>, curve: &[(f64, f64)]) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let mut write = || -> std::io::Result<()> {
        for (recall, precision) in curve {
            writeln!(out, "{}\t{}", fixed(*recall), fixed(*precision))?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// `head<TAB>tail<TAB>relation<TAB>confidence`, already ranked descending.
pub fn write_predictions(path: impl AsRef<Path>, ranked: &[RankedPrediction]) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let mut write = || -> std::io::Result<()> {
        for p in ranked {
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                p.head,
                p.tail,
                p.relation.as_deref().unwrap_or("NA"),
                fixed(p.confidence)
            )?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Where an extracted instance came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceSource {
    Pattern,
    Distributional,
    Both,
}

impl InstanceSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstanceSource::Pattern => "pattern",
            InstanceSource::Distributional => "distributional",
            InstanceSource::Both => "both",
        }
    }
}

#[derive(Debug, Clone)]
pub struct InstanceRow {
    pub relation: String,
    pub head: String,
    pub tail: String,
    pub confidence: f64,
    pub source: InstanceSource,
}

/// One ranked output over all relations, confidence descending.
pub fn write_instances(path: impl AsRef<Path>, rows: &[InstanceRow]) -> Result<()> {
    let path = path.as_ref();
    let mut sorted: Vec<&InstanceRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        b.confidence
            .partial_cmp(&a.confidence)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.relation.cmp(&b.relation))
            .then_with(|| a.head.cmp(&b.head))
            .then_with(|| a.tail.cmp(&b.tail))
    });
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let write = || -> std::io::Result<()> {
        for row in sorted {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                row.relation,
                row.head,
                row.tail,
                fixed(row.confidence),
                row.source.as_str()
            )?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Reads a `relation<TAB>head<TAB>tail` file (seed/test instance format).
pub fn read_triples(path: impl AsRef<Path>) -> Result<Vec<(String, String, String)>> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        match (cols.next(), cols.next(), cols.next()) {
            (Some(r), Some(h), Some(t)) if !r.is_empty() => {
                rows.push((r.to_string(), h.to_string(), t.to_string()));
            }
            _ => {
                return Err(Error::malformed(
                    path,
                    line_no,
                    "expected 3 tab-separated columns: relation, head, tail",
                ))
            }
        }
    }
    Ok(rows)
}

/// Per-epoch objective trace for distributional-only training.
pub fn write_epoch_trace(
    path: impl AsRef<Path>,
    reports: &[crate::embed::EpochReport],
) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "epoch\to_text\to_seed")?;
        for (i, rep) in reports.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}", i + 1, fixed(rep.text.mean()), fixed(rep.seed.mean()))?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Flat key=value configuration files.
// ---------------------------------------------------------------------------

/// Parses `key = value` lines; `#` starts a comment, blank lines skipped.
pub fn read_kv_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut map = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| {
            Error::malformed(path, line_no, "expected `key = value`")
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn embedding_dump_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.txt");
        let labels = vec!["a".to_string(), "b".to_string()];
        let data = vec![0.1234567, -1.0, 2.5, 0.000001, 3.0, -0.333333];
        write_embedding_file(&path, &labels, &data, 3).unwrap();

        let (rl, rd, dim) = read_embedding_file(&path).unwrap();
        assert_eq!(rl, labels);
        assert_eq!(dim, 3);
        // Values round to six decimals.
        assert!((rd[0] - 0.123457).abs() < 1e-9);
        assert_eq!(rd[1], -1.0);

        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("2 3\n"));
        assert!(text.contains("a 0.123457 -1.000000 2.500000"));
    }

    #[test]
    fn embedding_reader_rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.txt");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "1 3").unwrap();
        writeln!(f, "a 1.0 2.0").unwrap();
        drop(f);
        assert!(read_embedding_file(&path).is_err());
    }

    #[test]
    fn pattern_dump_roundtrip_sorted_by_combined() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("patterns.tsv");
        let rows = vec![
            PatternDumpRow {
                relation: "r0".into(),
                kind: PatternKind::Meta,
                canonical: "[Head] low [Tail]".into(),
                reliability: 0.1,
                combined: 0.1,
                support: 4,
            },
            PatternDumpRow {
                relation: "r1".into(),
                kind: PatternKind::Path,
                canonical: "[Head] high [Tail]".into(),
                reliability: 0.5,
                combined: 0.9,
                support: 7,
            },
        ];
        write_pattern_dump(&path, &rows).unwrap();
        let back = read_pattern_dump(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].canonical, "[Head] high [Tail]");
        assert_eq!(back[0].kind, PatternKind::Path);
        assert_eq!(back[1].support, 4);
    }

    #[test]
    fn kv_file_parses_comments_and_spaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "# a comment").unwrap();
        writeln!(f, "learning_rate = 0.01").unwrap();
        writeln!(f, "top_k=7").unwrap();
        writeln!(f).unwrap();
        drop(f);
        let map = read_kv_file(&path).unwrap();
        assert_eq!(map["learning_rate"], "0.01");
        assert_eq!(map["top_k"], "7");
        assert_eq!(map.len(), 2);
    }
}
