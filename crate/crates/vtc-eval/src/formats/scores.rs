//! Frame score and frame label matrices, with CSV and binary I/O.
//!
//! The CSV form is the transparent interchange: header
//! `time,KCHI,OCH,MAL,FEM`, one row per frame, times uniformly spaced. The
//! binary form (`.vtcs`) is a raw little-endian dump for long recordings:
//!
//! ```text
//! magic "VTCS" | version u32 | K u32 | N u64 | step f64 | start f64 | N×K f32 row-major
//! ```
//!
//! Both forms load to bit-identical matrices: scores are stored as `f32`,
//! which the binary layout holds natively and the CSV writer prints with
//! shortest round-tripping decimals.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use crate::core::grid::FrameGrid;
use crate::core::label::{LabelSet, VoiceType, NUM_CLASSES};
use crate::error::{Error, Result};

/// Default frame step in seconds, one frame per 10-millisecond stride.
pub const DEFAULT_FRAME_STEP: f64 = 0.010;

/// Magic bytes of the binary scores layout.
pub const SCORES_MAGIC: [u8; 4] = *b"VTCS";

/// Version of the binary scores layout.
pub const SCORES_VERSION: u32 = 1;

/// Tolerance for reconstructing row times from the inferred grid, seconds.
const TIME_TOLERANCE: f64 = 1e-6;

/// Hard cap on declared row counts, to reject nonsense binary headers
/// before allocating (2^32 frames is over a year of audio at 10 ms).
const MAX_FRAMES: u64 = 1 << 32;

/// Per-frame class scores in `[0, 1]`, row-major `count × 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    recording_id: String,
    grid: FrameGrid,
    scores: Vec<f32>,
}

impl ScoreMatrix {
    pub fn new(recording_id: impl Into<String>, grid: FrameGrid, scores: Vec<f32>) -> Result<ScoreMatrix> {
        if scores.len() != grid.count() * NUM_CLASSES {
            return Err(Error::GeometryMismatch(format!(
                "{} scores for {} frames × {} classes",
                scores.len(),
                grid.count(),
                NUM_CLASSES
            )));
        }
        for (i, &s) in scores.iter().enumerate() {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::parse(
                    i / NUM_CLASSES + 1,
                    format!("score out of range: {s}"),
                ));
            }
        }
        Ok(ScoreMatrix {
            recording_id: recording_id.into(),
            grid,
            scores,
        })
    }

    pub fn recording_id(&self) -> &str {
        &self.recording_id
    }

    pub fn grid(&self) -> &FrameGrid {
        &self.grid
    }

    pub fn num_frames(&self) -> usize {
        self.grid.count()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.count() == 0
    }

    pub fn score(&self, frame: usize, class: VoiceType) -> f32 {
        self.scores[frame * NUM_CLASSES + class.index()]
    }

    pub fn row(&self, frame: usize) -> &[f32] {
        &self.scores[frame * NUM_CLASSES..(frame + 1) * NUM_CLASSES]
    }

    /// One class's scores over all frames, in frame order.
    pub fn class_scores(&self, class: VoiceType) -> impl Iterator<Item = f32> + '_ {
        self.scores[class.index()..]
            .iter()
            .step_by(NUM_CLASSES)
            .copied()
    }

    pub fn scores(&self) -> &[f32] {
        &self.scores
    }
}

/// Per-frame activated label sets on the same geometry as a score matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    recording_id: String,
    grid: FrameGrid,
    rows: Vec<LabelSet>,
}

impl LabelMatrix {
    /// All-zero matrix.
    pub fn zeros(recording_id: impl Into<String>, grid: FrameGrid) -> LabelMatrix {
        LabelMatrix {
            recording_id: recording_id.into(),
            rows: vec![LabelSet::EMPTY; grid.count()],
            grid,
        }
    }

    pub fn from_rows(
        recording_id: impl Into<String>,
        grid: FrameGrid,
        rows: Vec<LabelSet>,
    ) -> Result<LabelMatrix> {
        if rows.len() != grid.count() {
            return Err(Error::GeometryMismatch(format!(
                "{} label rows for {} frames",
                rows.len(),
                grid.count()
            )));
        }
        Ok(LabelMatrix {
            recording_id: recording_id.into(),
            grid,
            rows,
        })
    }

    pub fn recording_id(&self) -> &str {
        &self.recording_id
    }

    pub fn grid(&self) -> &FrameGrid {
        &self.grid
    }

    pub fn num_frames(&self) -> usize {
        self.grid.count()
    }

    pub fn get(&self, frame: usize, class: VoiceType) -> bool {
        self.rows[frame].contains(class)
    }

    pub fn set(&mut self, frame: usize, class: VoiceType, active: bool) {
        if active {
            self.rows[frame].insert(class);
        } else {
            self.rows[frame].remove(class);
        }
    }

    pub fn row(&self, frame: usize) -> LabelSet {
        self.rows[frame]
    }

    pub fn rows(&self) -> &[LabelSet] {
        &self.rows
    }

    /// Total number of activated (frame, class) cells.
    pub fn active_cells(&self) -> usize {
        self.rows.iter().map(|r| r.len() as usize).sum()
    }

    /// 0/1 score matrix with the same geometry.
    pub fn to_scores(&self) -> ScoreMatrix {
        let mut scores = Vec::with_capacity(self.rows.len() * NUM_CLASSES);
        for row in &self.rows {
            for class in VoiceType::ALL {
                scores.push(if row.contains(class) { 1.0 } else { 0.0 });
            }
        }
        ScoreMatrix {
            recording_id: self.recording_id.clone(),
            grid: self.grid,
            scores,
        }
    }
}

/// A parsed score matrix plus non-fatal notes about degenerate input.
#[derive(Debug, Clone)]
pub struct ScoresParse {
    pub matrix: ScoreMatrix,
    pub warnings: Vec<String>,
}

/// Parse the CSV score form. `default_step` fills in the frame step when the
/// file has fewer than two rows (reported as a warning).
pub fn parse_scores_csv<R: BufRead>(
    reader: R,
    recording_id: &str,
    default_step: f64,
) -> Result<ScoresParse> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::parse(1, "empty file: missing header")),
    };
    if header.trim_end_matches('\r') != "time,KCHI,OCH,MAL,FEM" {
        return Err(Error::parse(
            1,
            format!("bad header \"{}\", expected \"time,KCHI,OCH,MAL,FEM\"", header.trim_end()),
        ));
    }

    let mut times: Vec<f64> = Vec::new();
    let mut scores: Vec<f32> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let trimmed = line.trim_end_matches('\r').trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 1 + NUM_CLASSES {
            return Err(Error::parse(
                line_no,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let time: f64 = fields[0].trim().parse().map_err(|_| {
            Error::parse(line_no, format!("non-numeric time \"{}\"", fields[0]))
        })?;
        times.push(time);
        for (class, field) in VoiceType::ALL.iter().zip(&fields[1..]) {
            let s: f32 = field.trim().parse().map_err(|_| {
                Error::parse(line_no, format!("non-numeric {class} score \"{field}\""))
            })?;
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::parse(
                    line_no,
                    format!("score out of range: {class} = {field}"),
                ));
            }
            scores.push(s);
        }
    }

    let mut warnings = Vec::new();
    let count = times.len();
    let (start, step) = match count {
        0 => {
            warnings.push(format!("{recording_id}: no frame rows; empty matrix"));
            (0.0, default_step)
        }
        1 => {
            warnings.push(format!(
                "{recording_id}: single row, falling back to default frame step {default_step}"
            ));
            (times[0], default_step)
        }
        _ => {
            let step = times[1] - times[0];
            if !(step > 0.0) {
                return Err(Error::parse(3, "times must be strictly increasing"));
            }
            for (i, &t) in times.iter().enumerate() {
                let expected = times[0] + i as f64 * step;
                if (t - expected).abs() > TIME_TOLERANCE {
                    return Err(Error::parse(
                        i + 2,
                        format!("non-constant step: time {t} deviates from grid position {expected}"),
                    ));
                }
            }
            (times[0], step)
        }
    };

    let grid = FrameGrid::new(step, start, count)?;
    Ok(ScoresParse {
        matrix: ScoreMatrix::new(recording_id, grid, scores)?,
        warnings,
    })
}

/// Write the CSV score form. Scores print with shortest round-tripping
/// decimals; times print at microsecond precision (within the reconstruction
/// tolerance of the parser).
pub fn write_scores_csv<W: Write>(mut writer: W, matrix: &ScoreMatrix) -> Result<()> {
    writeln!(writer, "time,KCHI,OCH,MAL,FEM")?;
    let grid = matrix.grid();
    for i in 0..matrix.num_frames() {
        let time = grid.start() + i as f64 * grid.step();
        let row = matrix.row(i);
        writeln!(
            writer,
            "{:.6},{},{},{},{}",
            time, row[0], row[1], row[2], row[3]
        )?;
    }
    Ok(())
}

/// Parse the binary score form.
pub fn parse_scores_binary<R: Read>(mut reader: R, recording_id: &str) -> Result<ScoresParse> {
    let mut magic = [0u8; 4];
    reader
        .read_exact(&mut magic)
        .map_err(|_| Error::BinaryFormat("truncated header".into()))?;
    if magic != SCORES_MAGIC {
        return Err(Error::BinaryFormat(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut reader)?;
    if version != SCORES_VERSION {
        return Err(Error::BinaryFormat(format!(
            "unsupported version {version} (expected {SCORES_VERSION})"
        )));
    }
    let k = read_u32(&mut reader)?;
    if k as usize != NUM_CLASSES {
        return Err(Error::BinaryFormat(format!(
            "{k} classes (expected {NUM_CLASSES})"
        )));
    }
    let n = read_u64(&mut reader)?;
    if n > MAX_FRAMES {
        return Err(Error::BinaryFormat(format!("row count {n} too large")));
    }
    let step = read_f64(&mut reader)?;
    let start = read_f64(&mut reader)?;

    let count = n as usize;
    let mut scores = vec![0f32; count * NUM_CLASSES];
    let mut buf = [0u8; 4];
    for (i, slot) in scores.iter_mut().enumerate() {
        reader.read_exact(&mut buf).map_err(|_| {
            Error::BinaryFormat(format!("truncated at row {}", i / NUM_CLASSES))
        })?;
        let s = f32::from_le_bytes(buf);
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::BinaryFormat(format!(
                "score out of range at row {}: {s}",
                i / NUM_CLASSES
            )));
        }
        *slot = s;
    }
    let grid = FrameGrid::new(step, start, count)
        .map_err(|e| Error::BinaryFormat(e.to_string()))?;
    Ok(ScoresParse {
        matrix: ScoreMatrix::new(recording_id, grid, scores)?,
        warnings: Vec::new(),
    })
}

/// Write the binary score form.
pub fn write_scores_binary<W: Write>(mut writer: W, matrix: &ScoreMatrix) -> Result<()> {
    writer.write_all(&SCORES_MAGIC)?;
    writer.write_all(&SCORES_VERSION.to_le_bytes())?;
    writer.write_all(&(NUM_CLASSES as u32).to_le_bytes())?;
    writer.write_all(&(matrix.num_frames() as u64).to_le_bytes())?;
    writer.write_all(&matrix.grid().step().to_le_bytes())?;
    writer.write_all(&matrix.grid().start().to_le_bytes())?;
    for &s in matrix.scores() {
        writer.write_all(&s.to_le_bytes())?;
    }
    Ok(())
}

/// Load a score file, dispatching on the `.vtcs` extension for the binary
/// form. The recording id is the file stem.
pub fn load_scores_path(path: &Path, default_step: f64) -> Result<ScoresParse> {
    let recording_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::BinaryFormat(format!("unusable file name {}", path.display())))?
        .to_string();
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    if path.extension().is_some_and(|e| e == "vtcs") {
        parse_scores_binary(reader, &recording_id)
    } else {
        parse_scores_csv(reader, &recording_id, default_step)
    }
}

fn read_u32<R: Read>(reader: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    reader
        .read_exact(&mut buf)
        .map_err(|_| Error::BinaryFormat("truncated header".into()))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(reader: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    reader
        .read_exact(&mut buf)
        .map_err(|_| Error::BinaryFormat("truncated header".into()))?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(reader: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    reader
        .read_exact(&mut buf)
        .map_err(|_| Error::BinaryFormat("truncated header".into()))?;
    Ok(f64::from_le_bytes(buf))
}
