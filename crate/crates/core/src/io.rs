//! Point-cloud and score-vector files.
//!
//! Point clouds are CSV with a header row or the packed `LAATPC1` binary.
//! CSV columns named `x`, `y`, `z` or `x0`, `x1`, ... hold coordinates,
//! a column named `label` holds integer labels, and any other column is a
//! named attribute channel. A CSV whose first row is entirely numeric is
//! read as headerless coordinates.
//!
//! The binary layout is little-endian: magic `LAATPC1`, `u32` n, `u32` D,
//! `u32` attribute count, then n·D row-major `f64` coordinates followed by
//! each attribute channel in turn. It carries no names or labels; attribute
//! channels read back as `a0`, `a1`, ...
//!
//! Score vectors (pheromone, stationary distribution) are CSV with columns
//! `point_id,score` or the binary `LAATPH1`: magic, `u32` n, n `f64` values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{LaatError, Result};
use crate::geometry::{Attribute, PointCloud, PointSet};

pub const CLOUD_MAGIC: &[u8; 7] = b"LAATPC1";
pub const SCORES_MAGIC: &[u8; 7] = b"LAATPH1";

/// On-disk encoding, chosen by extension (`.csv` or anything else binary).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Binary,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Binary,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LaatError + '_ {
    move |source| LaatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> LaatError + '_ {
    move |source| LaatError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> LaatError {
    LaatError::Format {
        path: PathBuf::from(path),
        reason: reason.into(),
    }
}

fn coordinate_rank(name: &str) -> Option<usize> {
    match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        "w" => Some(3),
        _ => name.strip_prefix('x')?.parse().ok(),
    }
}

pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    match Format::from_path(path) {
        Format::Csv => read_cloud_csv(path),
        Format::Binary => read_cloud_binary(path),
    }
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    match Format::from_path(path) {
        Format::Csv => write_cloud_csv(path, cloud),
        Format::Binary => write_cloud_binary(path, cloud),
    }
}

pub fn read_cloud_csv(path: &Path) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))?;
    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r.map_err(csv_err(path))?,
        None => return Err(format_err(path, "file is empty")),
    };
    let headerless = first.iter().all(|f| f.parse::<f64>().is_ok());

    enum Column {
        Coord(usize),
        Attr(usize),
        Label,
    }
    let (columns, dim, attr_names, pending) = if headerless {
        let columns: Vec<Column> = (0..first.len()).map(Column::Coord).collect();
        (columns, first.len(), Vec::new(), Some(first))
    } else {
        let mut coord_cols: Vec<(usize, usize)> = Vec::new();
        let mut attr_names = Vec::new();
        let mut columns = Vec::with_capacity(first.len());
        for (c, name) in first.iter().enumerate() {
            if name == "label" {
                columns.push(Column::Label);
            } else if let Some(rank) = coordinate_rank(name) {
                coord_cols.push((rank, c));
                columns.push(Column::Coord(0));
            } else {
                columns.push(Column::Attr(attr_names.len()));
                attr_names.push(name.to_string());
            }
        }
        coord_cols.sort();
        for (slot, &(_, c)) in coord_cols.iter().enumerate() {
            columns[c] = Column::Coord(slot);
        }
        (columns, coord_cols.len(), attr_names, None)
    };
    if dim == 0 {
        return Err(format_err(path, "no coordinate columns"));
    }
    let has_labels = columns.iter().any(|c| matches!(c, Column::Label));

    let mut coords = Vec::new();
    let mut attrs: Vec<Vec<f64>> = vec![Vec::new(); attr_names.len()];
    let mut labels = Vec::new();
    let mut row = vec![0.0; dim];
    for (line, record) in pending.into_iter().map(Ok).chain(records).enumerate() {
        let record = record.map_err(csv_err(path))?;
        if record.len() != columns.len() {
            return Err(format_err(
                path,
                format!("row {} has {} fields, expected {}", line + 1, record.len(), columns.len()),
            ));
        }
        for (field, column) in record.iter().zip(&columns) {
            let bad = || format_err(path, format!("row {}: cannot parse `{field}`", line + 1));
            match *column {
                Column::Coord(k) => row[k] = field.parse().map_err(|_| bad())?,
                Column::Attr(k) => attrs[k].push(field.parse().map_err(|_| bad())?),
                Column::Label => labels.push(field.parse().map_err(|_| bad())?),
            }
        }
        coords.extend_from_slice(&row);
    }
    let points = PointSet::new(dim, coords)?;
    let attributes = attr_names
        .into_iter()
        .zip(attrs)
        .map(|(name, values)| Attribute { name, values })
        .collect();
    PointCloud::with_parts(points, attributes, has_labels.then_some(labels))
}

pub fn write_cloud_csv(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let dim = cloud.dim();
    let mut header: Vec<String> = if dim <= 3 {
        ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (0..dim).map(|k| format!("x{k}")).collect()
    };
    header.extend(cloud.attributes().iter().map(|a| a.name.clone()));
    if cloud.labels().is_some() {
        header.push("label".into());
    }
    writer.write_record(&header).map_err(csv_err(path))?;
    let mut fields = Vec::with_capacity(header.len());
    for i in 0..cloud.len() {
        fields.clear();
        fields.extend(cloud.point(i).iter().map(|v| v.to_string()));
        fields.extend(cloud.attributes().iter().map(|a| a.values[i].to_string()));
        if let Some(labels) = cloud.labels() {
            fields.push(labels[i].to_string());
        }
        writer.write_record(&fields).map_err(csv_err(path))?;
    }
    writer.flush().map_err(io_err(path))
}

fn read_u32(reader: &mut impl Read, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    reader
        .read_exact(&mut buf)
        .map_err(|_| format_err(path, "truncated header"))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64s(reader: &mut impl Read, path: &Path, count: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    reader
        .read_exact(&mut bytes)
        .map_err(|_| format_err(path, format!("body shorter than {count} values")))?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn expect_magic(reader: &mut impl Read, path: &Path, magic: &[u8; 7]) -> Result<()> {
    let mut buf = [0u8; 7];
    reader
        .read_exact(&mut buf)
        .map_err(|_| format_err(path, "truncated header"))?;
    if &buf != magic {
        return Err(format_err(
            path,
            format!("bad magic, expected {}", String::from_utf8_lossy(magic)),
        ));
    }
    Ok(())
}

fn expect_end(reader: &mut impl Read, path: &Path) -> Result<()> {
    let mut extra = [0u8; 1];
    match reader.read(&mut extra).map_err(io_err(path))? {
        0 => Ok(()),
        _ => Err(format_err(path, "trailing bytes after body")),
    }
}

pub fn read_cloud_binary(path: &Path) -> Result<PointCloud> {
    let mut reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    expect_magic(&mut reader, path, CLOUD_MAGIC)?;
    let n = read_u32(&mut reader, path)? as usize;
    let dim = read_u32(&mut reader, path)? as usize;
    let n_attr = read_u32(&mut reader, path)? as usize;
    let coords = read_f64s(&mut reader, path, n * dim)?;
    let mut attributes = Vec::with_capacity(n_attr);
    for a in 0..n_attr {
        attributes.push(Attribute {
            name: format!("a{a}"),
            values: read_f64s(&mut reader, path, n)?,
        });
    }
    expect_end(&mut reader, path)?;
    PointCloud::with_parts(PointSet::new(dim, coords)?, attributes, None)
}

fn count_u32(value: usize, what: &str) -> Result<u32> {
    u32::try_from(value).map_err(|_| LaatError::invalid(format!("{what} {value} exceeds u32")))
}

/// Labels are not part of the binary layout and are dropped.
pub fn write_cloud_binary(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path).map_err(io_err(path))?);
    let mut header = Vec::with_capacity(19);
    header.extend_from_slice(CLOUD_MAGIC);
    header.extend_from_slice(&count_u32(cloud.len(), "point count")?.to_le_bytes());
    header.extend_from_slice(&count_u32(cloud.dim(), "dimension")?.to_le_bytes());
    header.extend_from_slice(&count_u32(cloud.attributes().len(), "attribute count")?.to_le_bytes());
    writer.write_all(&header).map_err(io_err(path))?;
    for v in cloud.points().coords() {
        writer.write_all(&v.to_le_bytes()).map_err(io_err(path))?;
    }
    for a in cloud.attributes() {
        for v in &a.values {
            writer.write_all(&v.to_le_bytes()).map_err(io_err(path))?;
        }
    }
    writer.flush().map_err(io_err(path))
}

pub fn read_scores(path: &Path) -> Result<Vec<f64>> {
    match Format::from_path(path) {
        Format::Csv => read_scores_csv(path),
        Format::Binary => read_scores_binary(path),
    }
}

pub fn write_scores(path: &Path, scores: &[f64]) -> Result<()> {
    match Format::from_path(path) {
        Format::Csv => write_scores_csv(path, scores),
        Format::Binary => write_scores_binary(path, scores),
    }
}

/// Rows may come in any order but must cover ids `0..n` exactly once.
pub fn read_scores_csv(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))?;
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let parse = || -> Option<(usize, f64)> { Some((record.get(0)?.parse().ok()?, record.get(1)?.parse().ok()?)) };
        pairs.push(parse().ok_or_else(|| format_err(path, format!("row {} is not `point_id,score`", line + 1)))?);
    }
    let n = pairs.len();
    let mut out = vec![f64::NAN; n];
    let mut seen = vec![false; n];
    for (id, score) in pairs {
        if id >= n || seen[id] {
            return Err(format_err(path, format!("point ids must cover 0..{n} once; got {id}")));
        }
        seen[id] = true;
        out[id] = score;
    }
    Ok(out)
}

pub fn write_scores_csv(path: &Path, scores: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    writer.write_record(["point_id", "score"]).map_err(csv_err(path))?;
    for (i, s) in scores.iter().enumerate() {
        writer
            .write_record([i.to_string(), s.to_string()])
            .map_err(csv_err(path))?;
    }
    writer.flush().map_err(io_err(path))
}

pub fn read_scores_binary(path: &Path) -> Result<Vec<f64>> {
    let mut reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    expect_magic(&mut reader, path, SCORES_MAGIC)?;
    let n = read_u32(&mut reader, path)? as usize;
    let values = read_f64s(&mut reader, path, n)?;
    expect_end(&mut reader, path)?;
    Ok(values)
}

pub fn write_scores_binary(path: &Path, scores: &[f64]) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writer.write_all(SCORES_MAGIC).map_err(io_err(path))?;
    writer
        .write_all(&count_u32(scores.len(), "score count")?.to_le_bytes())
        .map_err(io_err(path))?;
    for v in scores {
        writer.write_all(&v.to_le_bytes()).map_err(io_err(path))?;
    }
    writer.flush().map_err(io_err(path))
}
