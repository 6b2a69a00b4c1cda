//! File formats.
//!
//! * time series: CSV, one sample per row, one column per channel, optional header
//! * point cloud: CSV, one point per row, no header
//! * diagram: CSV with header `dim,birth,death`; essential bars have death `inf`
//! * grid: CSV with K rows of K values; row 0 is the lowest death values, so
//!   y increases downward when the file is viewed as text
//! * heatmap: binary 8-bit PGM (P5), max-scaled, same orientation as the grid CSV
//! * distance matrix: CSV whose header row and first column hold the labels
//! * PGA model: directory with `mean.csv`, `component_<k>.csv`, `manifest.json`
//! * item list: CSV `path,value` (label or score), optional header; relative
//!   paths are resolved against the list's directory
//!
//! Floats are written in Rust's shortest round-trip form, so every reader
//! returns exactly what the matching writer was given.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{DistanceMatrix, Metric};
use crate::density::SqrtDensity;
use crate::embedding::{PointCloud, TimeSeries};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::persistence::PersistenceDiagram;
use crate::sphere::{PgaModel, TangentVector};

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn parse_f64(field: &str, location: impl FnOnce() -> String) -> Result<f64> {
    let t = field.trim();
    t.parse::<f64>()
        .map_err(|_| Error::parse(location(), format!("'{t}' is not a number")))
}

/// Splits CSV rows, skipping blank lines; yields `(line number, fields)`.
fn csv_rows<R: Read>(reader: R) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
        .into_records()
        .map(|r| {
            r.map(|rec| (rec.position().map_or(0, |p| p.line()), rec))
                .map_err(|e| {
                    Error::parse(
                        e.position()
                            .map_or("?".into(), |p| format!("line {}", p.line())),
                        e.to_string(),
                    )
                })
        })
        .filter(|r| !matches!(r, Ok((_, rec)) if rec.iter().all(str::is_empty)))
}

fn is_header(rec: &csv::StringRecord) -> bool {
    rec.iter().any(|f| f.parse::<f64>().is_err())
}

// -- time series ------------------------------------------------------------

/// Reads every channel of a (possibly multi-column) time-series CSV.
pub fn read_time_series<R: Read>(reader: R) -> Result<Vec<TimeSeries>> {
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut names: Option<Vec<String>> = None;
    for (idx, row) in csv_rows(reader).enumerate() {
        let (line, rec) = row?;
        if idx == 0 && is_header(&rec) {
            names = Some(rec.iter().map(str::to_string).collect());
            columns = vec![Vec::new(); rec.len()];
            continue;
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); rec.len()];
        }
        if rec.len() != columns.len() {
            return Err(Error::parse(
                format!("line {line}"),
                format!("expected {} columns, found {}", columns.len(), rec.len()),
            ));
        }
        for (c, field) in rec.iter().enumerate() {
            columns[c].push(parse_f64(field, || format!("line {line}"))?);
        }
    }
    if columns.is_empty() || columns[0].is_empty() {
        return Err(Error::parse("input", "time series has no samples"));
    }
    columns
        .into_iter()
        .enumerate()
        .map(|(c, samples)| {
            let ts = TimeSeries::new(samples)?;
            Ok(match &names {
                Some(n) => ts.with_name(n[c].clone()),
                None => ts,
            })
        })
        .collect()
}

pub fn read_time_series_file(path: &Path) -> Result<Vec<TimeSeries>> {
    read_time_series(open(path)?).map_err(|e| locate(e, path))
}

/// Prefixes parse errors with the file they came from.
fn locate(err: Error, path: &Path) -> Error {
    match err {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}:{location}", path.display()),
            message,
        },
        other => other,
    }
}

pub fn write_time_series<W: Write>(mut w: W, series: &TimeSeries) -> Result<()> {
    for x in series.samples() {
        writeln!(w, "{x}")?;
    }
    Ok(())
}

// -- point clouds -----------------------------------------------------------

pub fn read_point_cloud<R: Read>(reader: R) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (idx, row) in csv_rows(reader).enumerate() {
        let (line, rec) = row?;
        if idx == 0 && is_header(&rec) {
            continue;
        }
        let p = rec
            .iter()
            .map(|f| parse_f64(f, || format!("line {line}")))
            .collect::<Result<Vec<f64>>>()?;
        points.push(p);
    }
    PointCloud::new(points).map_err(|e| match e {
        Error::Shape { expected, found } => Error::parse(
            "input",
            format!("ragged rows: {expected} vs {found} columns"),
        ),
        other => other,
    })
}

pub fn read_point_cloud_file(path: &Path) -> Result<PointCloud> {
    read_point_cloud(open(path)?).map_err(|e| locate(e, path))
}

pub fn write_point_cloud<W: Write>(mut w: W, cloud: &PointCloud) -> Result<()> {
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(f64::to_string).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_point_cloud_file(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut w = create(path)?;
    write_point_cloud(&mut w, cloud)?;
    w.flush()?;
    Ok(())
}

// -- diagrams ---------------------------------------------------------------

pub const DIAGRAM_HEADER: &str = "dim,birth,death";

/// Writes diagrams of distinct homology dimensions into one table.
pub fn write_diagrams<W: Write>(mut w: W, diagrams: &[&PersistenceDiagram]) -> Result<()> {
    writeln!(w, "{DIAGRAM_HEADER}")?;
    for d in diagrams {
        let dim = d
            .homology_dim
            .ok_or_else(|| Error::param("cannot serialize a diagram pooled across dimensions"))?;
        for &(b, death) in d.pairs() {
            writeln!(w, "{dim},{b},{death}")?;
        }
        for &b in d.essential() {
            writeln!(w, "{dim},{b},inf")?;
        }
    }
    Ok(())
}

pub fn write_diagrams_file(path: &Path, diagrams: &[&PersistenceDiagram]) -> Result<()> {
    let mut w = create(path)?;
    write_diagrams(&mut w, diagrams)?;
    w.flush()?;
    Ok(())
}

/// Reads a diagram table; returns `(H0, H1)`, either possibly empty.
pub fn read_diagrams<R: Read>(reader: R) -> Result<(PersistenceDiagram, PersistenceDiagram)> {
    let mut pairs = [Vec::new(), Vec::new()];
    let mut essential = [Vec::new(), Vec::new()];
    let mut rows = csv_rows(reader);
    match rows.next() {
        Some(Ok((_, rec))) if rec.iter().collect::<Vec<_>>().join(",") == DIAGRAM_HEADER => {}
        Some(Ok((line, _))) => {
            return Err(Error::parse(
                format!("line {line}"),
                format!("expected header '{DIAGRAM_HEADER}'"),
            ));
        }
        Some(Err(e)) => return Err(e),
        None => return Err(Error::parse("input", "empty diagram file")),
    }
    for row in rows {
        let (line, rec) = row?;
        let loc = || format!("line {line}");
        if rec.len() != 3 {
            return Err(Error::parse(
                loc(),
                format!("expected 3 fields, found {}", rec.len()),
            ));
        }
        let dim: usize = match &rec[0] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::parse(
                    loc(),
                    format!("homology dimension '{other}' not in {{0, 1}}"),
                ))
            }
        };
        let birth = parse_f64(&rec[1], loc)?;
        let death = parse_f64(&rec[2], loc)?;
        if death == f64::INFINITY {
            essential[dim].push(birth);
        } else {
            pairs[dim].push((birth, death));
        }
    }
    let [p0, p1] = pairs;
    let [e0, e1] = essential;
    let h0 = PersistenceDiagram::new(Some(0), p0, e0)
        .map_err(|e| Error::parse("input", e.to_string()))?;
    let h1 = PersistenceDiagram::new(Some(1), p1, e1)
        .map_err(|e| Error::parse("input", e.to_string()))?;
    Ok((h0, h1))
}

pub fn read_diagrams_file(path: &Path) -> Result<(PersistenceDiagram, PersistenceDiagram)> {
    read_diagrams(open(path)?).map_err(|e| locate(e, path))
}

// -- grids ------------------------------------------------------------------

pub fn write_grid<W: Write>(mut w: W, grid: &Grid) -> Result<()> {
    for row in grid.rows() {
        let fields: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_grid_file(path: &Path, grid: &Grid) -> Result<()> {
    let mut w = create(path)?;
    write_grid(&mut w, grid)?;
    w.flush()?;
    Ok(())
}

pub fn read_grid<R: Read>(reader: R) -> Result<Grid> {
    let mut data = Vec::new();
    let mut k = None;
    let mut rows = 0usize;
    for row in csv_rows(reader) {
        let (line, rec) = row?;
        let width = *k.get_or_insert(rec.len());
        if rec.len() != width {
            return Err(Error::parse(
                format!("line {line}"),
                format!("expected {width} columns, found {}", rec.len()),
            ));
        }
        for f in rec.iter() {
            data.push(parse_f64(f, || format!("line {line}"))?);
        }
        rows += 1;
    }
    let k = k.ok_or_else(|| Error::parse("input", "empty grid file"))?;
    if rows != k {
        return Err(Error::parse(
            "input",
            format!("grid is {rows}x{k}, expected a square"),
        ));
    }
    Grid::from_vec(k, data)
}

pub fn read_grid_file(path: &Path) -> Result<Grid> {
    read_grid(open(path)?).map_err(|e| locate(e, path))
}

/// Binary PGM with the largest cell mapped to 255.
pub fn write_pgm<W: Write>(mut w: W, grid: &Grid) -> Result<()> {
    let max = grid.max();
    if !(max > 0.0 && max.is_finite()) {
        return Err(Error::param(
            "heatmap needs a grid with a positive finite maximum",
        ));
    }
    if grid.as_slice().iter().any(|&v| v < 0.0) {
        return Err(Error::param("heatmap grid has negative cells"));
    }
    write!(w, "P5\n{} {}\n255\n", grid.k(), grid.k())?;
    let pixels: Vec<u8> = grid
        .as_slice()
        .iter()
        .map(|&v| (v / max * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    w.write_all(&pixels)?;
    Ok(())
}

pub fn write_pgm_file(path: &Path, grid: &Grid) -> Result<()> {
    let mut w = create(path)?;
    write_pgm(&mut w, grid)?;
    w.flush()?;
    Ok(())
}

/// Reads a binary P5 PGM written by [`write_pgm`]; returns `(width, height, pixels)`.
pub fn read_pgm<R: Read>(reader: R) -> Result<(usize, usize, Vec<u8>)> {
    let mut r = BufReader::new(reader);
    let mut header = Vec::new();
    // magic, width height, maxval: three whitespace-delimited lines
    for _ in 0..3 {
        let mut line = String::new();
        r.read_line(&mut line)?;
        header.push(line.trim().to_string());
    }
    if header[0] != "P5" || header[2] != "255" {
        return Err(Error::parse("pgm header", "expected P5 with maxval 255"));
    }
    let dims: Vec<usize> = header[1]
        .split_whitespace()
        .map(|s| {
            s.parse()
                .map_err(|_| Error::parse("pgm header", "bad dimensions"))
        })
        .collect::<Result<_>>()?;
    let [width, height] = dims[..] else {
        return Err(Error::parse("pgm header", "bad dimensions"));
    };
    let mut pixels = vec![0u8; width * height];
    r.read_exact(&mut pixels)?;
    Ok((width, height, pixels))
}

// -- distance matrices ------------------------------------------------------

pub fn write_distance_matrix<W: Write>(mut w: W, m: &DistanceMatrix) -> Result<()> {
    let mut header = vec![String::new()];
    header.extend(m.labels().iter().cloned());
    let mut wtr = csv::Writer::from_writer(&mut w);
    wtr.write_record(&header).map_err(csv_io)?;
    for (i, label) in m.labels().iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(m.row(i).iter().map(f64::to_string));
        wtr.write_record(&rec).map_err(csv_io)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn read_distance_matrix<R: Read>(reader: R, metric: Metric) -> Result<DistanceMatrix> {
    let mut rows = csv_rows(reader);
    let (_, header) = rows
        .next()
        .ok_or_else(|| Error::parse("input", "empty matrix file"))??;
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut values = Vec::with_capacity(labels.len() * labels.len());
    for (i, row) in rows.enumerate() {
        let (line, rec) = row?;
        if rec.len() != labels.len() + 1 || rec.get(0) != labels.get(i).map(String::as_str) {
            return Err(Error::parse(
                format!("line {line}"),
                "row does not match header labels",
            ));
        }
        for f in rec.iter().skip(1) {
            values.push(parse_f64(f, || format!("line {line}"))?);
        }
    }
    DistanceMatrix::from_values(labels, values, metric)
        .map_err(|e| Error::parse("input", e.to_string()))
}

// -- item lists -------------------------------------------------------------

/// Reads `path,value` rows; a first row whose second field is `label` or
/// `score` is treated as a header. A row holding only a path gets an empty value.
pub fn read_item_list(path: &Path) -> Result<Vec<(PathBuf, String)>> {
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let mut items = Vec::new();
    for (idx, row) in csv_rows(open(path)?).enumerate() {
        let (line, rec) = row.map_err(|e| locate(e, path))?;
        if idx == 0 && matches!(rec.get(1), Some("label" | "score")) {
            continue;
        }
        if rec.len() > 2 || rec[0].is_empty() {
            return Err(locate(
                Error::parse(format!("line {line}"), "expected 'path' or 'path,value'"),
                path,
            ));
        }
        items.push((base.join(&rec[0]), rec.get(1).unwrap_or("").to_string()));
    }
    if items.is_empty() {
        return Err(Error::parse(
            path.display().to_string(),
            "item list is empty",
        ));
    }
    Ok(items)
}

pub fn write_item_list(path: &Path, items: &[(String, String)], value_header: &str) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(create(path)?);
    wtr.write_record(["path", value_header]).map_err(csv_io)?;
    for (p, v) in items {
        wtr.write_record([p, v]).map_err(csv_io)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Plain CSV table with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(create(path)?);
    wtr.write_record(header).map_err(csv_io)?;
    for row in rows {
        wtr.write_record(row).map_err(csv_io)?;
    }
    wtr.flush()?;
    Ok(())
}

// -- manifests --------------------------------------------------------------

/// Metadata written next to a distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixManifest {
    pub metric: Metric,
    pub items: usize,
    pub channels: usize,
    /// Global normalization scale of each channel.
    pub normalization_scales: Vec<f64>,
    pub aggregate: String,
    pub grid: Option<usize>,
    pub sigma: Option<f64>,
    pub homology: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgaManifest {
    pub grid: usize,
    pub sigma: f64,
    pub normalization_scale: f64,
    pub variances: Vec<f64>,
    pub components: usize,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

/// Writes `mean.csv`, `component_<k>.csv` and `manifest.json` into `dir`.
pub fn write_pga_model(
    dir: &Path,
    model: &PgaModel,
    sigma: f64,
    normalization_scale: f64,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_grid_file(&dir.join("mean.csv"), model.mean.grid())?;
    for (i, c) in model.components.iter().enumerate() {
        write_grid_file(&dir.join(format!("component_{i}.csv")), c.values())?;
    }
    write_json(
        &dir.join("manifest.json"),
        &PgaManifest {
            grid: model.mean.k(),
            sigma,
            normalization_scale,
            variances: model.variances.clone(),
            components: model.components.len(),
        },
    )
}

pub fn read_pga_model(dir: &Path) -> Result<(PgaModel, PgaManifest)> {
    let manifest: PgaManifest = read_json(&dir.join("manifest.json"))?;
    let mean = SqrtDensity::from_grid(read_grid_file(&dir.join("mean.csv"))?)?;
    let components = (0..manifest.components)
        .map(|i| {
            TangentVector::new(
                mean.clone(),
                read_grid_file(&dir.join(format!("component_{i}.csv")))?,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let model = PgaModel {
        mean,
        components,
        variances: manifest.variances.clone(),
    };
    Ok((model, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_series_with_header_and_channels() {
        let text = "x,y\n1,10\n2,20\n\n3,30\n";
        let series = read_time_series(text.as_bytes()).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0].samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(series[1].name(), Some("y"));
    }

    #[test]
    fn time_series_parse_error_has_line() {
        let err = read_time_series("1\n2\nabc3\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { location, .. } => assert!(location.contains('3'), "{location}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diagram_round_trip_with_inf() {
        let h0 = PersistenceDiagram::new(Some(0), vec![(0.0, 0.1), (0.0, 1.0 / 3.0)], vec![0.0])
            .unwrap();
        let h1 = PersistenceDiagram::new(Some(1), vec![(0.2, 0.7)], vec![]).unwrap();
        let mut buf = Vec::new();
        write_diagrams(&mut buf, &[&h0, &h1]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("dim,birth,death\n"));
        assert!(text.contains("0,0,inf"));
        let (r0, r1) = read_diagrams(buf.as_slice()).unwrap();
        assert_eq!(r0, h0);
        assert_eq!(r1, h1);
    }

    #[test]
    fn diagram_rejects_bad_rows() {
        assert!(read_diagrams("dim,birth,death\n2,0,1\n".as_bytes()).is_err());
        assert!(read_diagrams("a,b,c\n".as_bytes()).is_err());
        assert!(read_diagrams("dim,birth,death\n1,0.5,0.2\n".as_bytes()).is_err());
    }

    #[test]
    fn grid_round_trip_exact() {
        let data: Vec<f64> = (0..9).map(|i| (i as f64).sqrt() / 7.0).collect();
        let g = Grid::from_vec(3, data).unwrap();
        let mut buf = Vec::new();
        write_grid(&mut buf, &g).unwrap();
        assert_eq!(read_grid(buf.as_slice()).unwrap(), g);
        assert!(read_grid("1,2\n3,4\n5,6\n".as_bytes()).is_err());
    }

    #[test]
    fn pgm_is_max_scaled() {
        let g = Grid::from_vec(2, vec![0.0, 0.1, 0.2, 0.4]).unwrap();
        let mut buf = Vec::new();
        write_pgm(&mut buf, &g).unwrap();
        let (w, h, px) = read_pgm(buf.as_slice()).unwrap();
        assert_eq!((w, h), (2, 2));
        assert_eq!(px, vec![0, 64, 128, 255]);
        assert!(write_pgm(Vec::new(), &Grid::zeros(2)).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let labels = vec!["a".to_string(), "b,c".to_string()];
        let m =
            DistanceMatrix::from_values(labels, vec![0.0, 0.25, 0.25, 0.0], Metric::W2).unwrap();
        let mut buf = Vec::new();
        write_distance_matrix(&mut buf, &m).unwrap();
        assert_eq!(read_distance_matrix(buf.as_slice(), Metric::W2).unwrap(), m);
    }

    #[test]
    fn item_list_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let list = dir.path().join("items.csv");
        let items = vec![
            ("a.csv".to_string(), "x".to_string()),
            ("sub/b.csv".to_string(), "y".to_string()),
        ];
        write_item_list(&list, &items, "label").unwrap();
        let read = read_item_list(&list).unwrap();
        assert_eq!(read[1], (dir.path().join("sub/b.csv"), "y".to_string()));
        fs::write(&list, "a.csv\n").unwrap();
        assert_eq!(read_item_list(&list).unwrap()[0].1, "");
        fs::write(&list, "a.csv,x,y\n").unwrap();
        assert!(matches!(read_item_list(&list), Err(Error::Parse { .. })));
    }

    #[test]
    fn point_cloud_round_trip() {
        let c = PointCloud::new(vec![vec![0.1, 1e-17], vec![-3.5, 2.0 / 3.0]]).unwrap();
        let mut buf = Vec::new();
        write_point_cloud(&mut buf, &c).unwrap();
        assert_eq!(read_point_cloud(buf.as_slice()).unwrap(), c);
    }
}
