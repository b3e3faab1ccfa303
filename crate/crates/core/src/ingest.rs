//! Parsing and validation of tabulated waggle-dance observations.
//!
//! A table carries three angle estimates per dance, the directions derived
//! from them, the dance durations, the sun azimuth and the plotted X/Y
//! position of the food source. Every derived column is recomputed from the
//! primary measurements by [`validate_observation`] so that transcription
//! errors show up as [`Discrepancy`] records.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while reading an observation table.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing mandatory column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: column `{column}`: {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },
    #[error("row {row}: expected {expected} cells, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),
    #[error("calibration table: {0}")]
    Calibration(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Wall-clock time of an observation, `hh:mm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClockTime {
    pub hour: u8,
    pub minute: u8,
}

impl fmt::Display for ClockTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.hour, self.minute)
    }
}

impl FromStr for ClockTime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (h, m) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| format!("expected hh:mm, got `{s}`"))?;
        let hour: u8 = h.parse().map_err(|_| format!("bad hour `{h}`"))?;
        let minute: u8 = m.parse().map_err(|_| format!("bad minute `{m}`"))?;
        if hour > 23 || minute > 59 {
            return Err(format!("clock time out of range `{s}`"));
        }
        Ok(ClockTime { hour, minute })
    }
}

/// One row of a dance observation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DanceObservation {
    /// Angle of the waggle run with the vertical, three estimates, degrees.
    pub angles: [f64; 3],
    /// Geographic directions derived from `angles` and `azimuth`, degrees.
    pub directions: [f64; 3],
    pub avg_direction: f64,
    pub n_dances: u32,
    /// Seconds.
    pub total_duration: f64,
    /// Seconds.
    pub avg_duration: f64,
    pub time_of_day: ClockTime,
    /// Sun azimuth at `time_of_day`, degrees.
    pub azimuth: f64,
    pub distance_km: f64,
    /// Kept verbatim; never used in computation.
    pub rad_field: Option<String>,
    pub cos_dir: f64,
    pub sin_dir: f64,
    pub x_km: f64,
    pub y_km: f64,
    pub pollen: bool,
}

/// Logical columns of the observation schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Angle1,
    Angle2,
    Angle3,
    Dir1,
    Dir2,
    Dir3,
    AvgDir,
    NDances,
    TotalDuration,
    AvgDuration,
    Time,
    Azimuth,
    DistanceKm,
    Rad,
    Cos,
    Sin,
    X,
    Y,
    Pollen,
}

impl Column {
    pub const ALL: [Column; 19] = [
        Column::Angle1,
        Column::Angle2,
        Column::Angle3,
        Column::Dir1,
        Column::Dir2,
        Column::Dir3,
        Column::AvgDir,
        Column::NDances,
        Column::TotalDuration,
        Column::AvgDuration,
        Column::Time,
        Column::Azimuth,
        Column::DistanceKm,
        Column::Rad,
        Column::Cos,
        Column::Sin,
        Column::X,
        Column::Y,
        Column::Pollen,
    ];

    /// Header name used by the canonical CSV.
    pub fn canonical_name(self) -> &'static str {
        match self {
            Column::Angle1 => "angle1",
            Column::Angle2 => "angle2",
            Column::Angle3 => "angle3",
            Column::Dir1 => "dir1",
            Column::Dir2 => "dir2",
            Column::Dir3 => "dir3",
            Column::AvgDir => "avg_dir",
            Column::NDances => "n_dances",
            Column::TotalDuration => "total_duration",
            Column::AvgDuration => "avg_duration",
            Column::Time => "time",
            Column::Azimuth => "azimuth",
            Column::DistanceKm => "distance_km",
            Column::Rad => "rad",
            Column::Cos => "cos",
            Column::Sin => "sin",
            Column::X => "x",
            Column::Y => "y",
            Column::Pollen => "pollen",
        }
    }

    pub fn is_optional(self) -> bool {
        matches!(self, Column::Rad | Column::Pollen)
    }
}

/// Field delimiter of an input table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    /// Tab if the header line contains one, comma otherwise.
    #[default]
    Auto,
    Comma,
    Tab,
}

impl Delimiter {
    fn resolve(self, text: &str) -> u8 {
        match self {
            Delimiter::Comma => b',',
            Delimiter::Tab => b'\t',
            Delimiter::Auto => {
                let header = text.lines().next().unwrap_or("");
                if header.contains('\t') {
                    b'\t'
                } else {
                    b','
                }
            }
        }
    }
}

impl FromStr for Delimiter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Delimiter::Auto),
            "comma" | "," => Ok(Delimiter::Comma),
            "tab" | "\\t" => Ok(Delimiter::Tab),
            other => Err(format!("unknown delimiter `{other}` (auto, comma, tab)")),
        }
    }
}

/// Delimiter and header-name mapping for an input table.
///
/// Columns absent from `columns` are looked up by their canonical name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FormatConfig {
    pub delimiter: Delimiter,
    pub columns: BTreeMap<Column, String>,
}

impl FormatConfig {
    pub fn header_for(&self, column: Column) -> &str {
        self.columns
            .get(&column)
            .map(String::as_str)
            .unwrap_or_else(|| column.canonical_name())
    }
}

/// Parse a duration given either as `mm:ss.ff` or as plain seconds.
pub fn parse_duration(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let secs = match s.split_once(':') {
        Some((m, rest)) => {
            let minutes: u32 = m.parse().map_err(|_| format!("bad minutes in `{s}`"))?;
            let seconds: f64 = rest.parse().map_err(|_| format!("bad seconds in `{s}`"))?;
            if !(0.0..60.0).contains(&seconds) {
                return Err(format!("seconds out of range in `{s}`"));
            }
            f64::from(minutes) * 60.0 + seconds
        }
        None => s.parse().map_err(|_| format!("bad duration `{s}`"))?,
    };
    if !secs.is_finite() || secs < 0.0 {
        return Err(format!("duration must be a non-negative number, got `{s}`"));
    }
    Ok(secs)
}

fn parse_pollen(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "-" | "0" | "false" | "no" | "none" => Ok(false),
        "pollen" | "p" | "1" | "true" | "yes" => Ok(true),
        other => Err(format!("unrecognised pollen marker `{other}`")),
    }
}

/// Parse a delimited observation table.
///
/// A header row is required. Rows are returned in file order.
pub fn parse_observations(
    table_text: &str,
    format: &FormatConfig,
) -> Result<Vec<DanceObservation>, IngestError> {
    let mut observations = Vec::new();
    for row in parse_rows(table_text, format)? {
        observations.push(row?);
    }
    Ok(observations)
}

/// Row-level variant of [`parse_observations`]: file-level problems fail the
/// whole call, malformed rows are returned as individual errors.
pub fn parse_rows(
    table_text: &str,
    format: &FormatConfig,
) -> Result<Vec<Result<DanceObservation, IngestError>>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter.resolve(table_text))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(table_text.as_bytes());

    let headers = reader.headers()?.clone();
    let mut index = BTreeMap::new();
    for column in Column::ALL {
        let name = format.header_for(column);
        match headers.iter().position(|h| h == name) {
            Some(i) => {
                index.insert(column, i);
            }
            None if column.is_optional() => {}
            None => return Err(IngestError::MissingColumn(name.to_string())),
        }
    }

    let mut rows = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            rows.push(Err(IngestError::RowLength {
                row,
                expected: headers.len(),
                found: record.len(),
            }));
            continue;
        }
        rows.push(parse_record(row, &record, &index, format));
    }
    Ok(rows)
}

fn parse_record(
    row: usize,
    record: &csv::StringRecord,
    index: &BTreeMap<Column, usize>,
    format: &FormatConfig,
) -> Result<DanceObservation, IngestError> {
    let cell = |column: Column| index.get(&column).map(|&i| &record[i]);
    let fail = |column: Column, message: String| IngestError::Cell {
        row,
        column: format.header_for(column).to_string(),
        message,
    };
    let num = |column: Column| -> Result<f64, IngestError> {
        let raw = cell(column).unwrap_or("");
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(fail(column, format!("not a finite number: `{raw}`"))),
        }
    };
    let duration = |column: Column| -> Result<f64, IngestError> {
        parse_duration(cell(column).unwrap_or("")).map_err(|e| fail(column, e))
    };

    let n_raw = cell(Column::NDances).unwrap_or("");
    let n_dances = n_raw
        .parse::<u32>()
        .map_err(|_| fail(Column::NDances, format!("not a count: `{n_raw}`")))?;
    let time_of_day = cell(Column::Time)
        .unwrap_or("")
        .parse::<ClockTime>()
        .map_err(|e| fail(Column::Time, e))?;
    let pollen = match cell(Column::Pollen) {
        Some(raw) => parse_pollen(raw).map_err(|e| fail(Column::Pollen, e))?,
        None => false,
    };
    let rad_field = cell(Column::Rad)
        .filter(|s| !s.is_empty())
        .map(str::to_string);
    let distance_km = num(Column::DistanceKm)?;
    if distance_km < 0.0 {
        return Err(fail(
            Column::DistanceKm,
            format!("negative distance {distance_km}"),
        ));
    }

    Ok(DanceObservation {
        angles: [num(Column::Angle1)?, num(Column::Angle2)?, num(Column::Angle3)?],
        directions: [num(Column::Dir1)?, num(Column::Dir2)?, num(Column::Dir3)?],
        avg_direction: num(Column::AvgDir)?,
        n_dances,
        total_duration: duration(Column::TotalDuration)?,
        avg_duration: duration(Column::AvgDuration)?,
        time_of_day,
        azimuth: num(Column::Azimuth)?,
        distance_km,
        rad_field,
        cos_dir: num(Column::Cos)?,
        sin_dir: num(Column::Sin)?,
        x_km: num(Column::X)?,
        y_km: num(Column::Y)?,
        pollen,
    })
}

/// Write observations as CSV with the canonical header.
///
/// Numbers use the shortest representation that parses back to the same
/// value, so output of this function round-trips through
/// [`parse_observations`] with the default [`FormatConfig`].
pub fn to_canonical_csv(observations: &[DanceObservation]) -> Result<String, IngestError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(Column::ALL.iter().map(|c| c.canonical_name()))?;
    for o in observations {
        let fields = [
            o.angles[0].to_string(),
            o.angles[1].to_string(),
            o.angles[2].to_string(),
            o.directions[0].to_string(),
            o.directions[1].to_string(),
            o.directions[2].to_string(),
            o.avg_direction.to_string(),
            o.n_dances.to_string(),
            o.total_duration.to_string(),
            o.avg_duration.to_string(),
            o.time_of_day.to_string(),
            o.azimuth.to_string(),
            o.distance_km.to_string(),
            o.rad_field.clone().unwrap_or_default(),
            o.cos_dir.to_string(),
            o.sin_dir.to_string(),
            o.x_km.to_string(),
            o.y_km.to_string(),
            if o.pollen { "Pollen" } else { "" }.to_string(),
        ];
        writer.write_record(&fields)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| IngestError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

/// One JSON object per line.
pub fn to_json_lines(observations: &[DanceObservation]) -> Result<String, IngestError> {
    let mut out = String::new();
    for o in observations {
        out.push_str(&serde_json::to_string(o)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn from_json_lines(text: &str) -> Result<Vec<DanceObservation>, IngestError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(IngestError::from))
        .collect()
}

fn normalize_degrees(deg: f64) -> f64 {
    let d = deg.rem_euclid(360.0);
    // rem_euclid rounds tiny negative inputs up to exactly 360.0
    if d >= 360.0 {
        0.0
    } else {
        d
    }
}

/// Smallest absolute angular difference, degrees in [0, 180].
pub fn angular_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Geographic direction of the food source: dance angle plus sun azimuth.
pub fn derive_direction(angle: f64, azimuth: f64) -> Result<f64, IngestError> {
    if !angle.is_finite() {
        return Err(IngestError::NonFinite("angle"));
    }
    if !azimuth.is_finite() {
        return Err(IngestError::NonFinite("azimuth"));
    }
    Ok(normalize_degrees(angle + azimuth))
}

/// Plot coordinates with north (0°) on +y and east (90°) on +x.
pub fn derive_xy(distance_km: f64, direction: f64) -> Result<(f64, f64), IngestError> {
    if !distance_km.is_finite() {
        return Err(IngestError::NonFinite("distance"));
    }
    if !direction.is_finite() {
        return Err(IngestError::NonFinite("direction"));
    }
    if distance_km < 0.0 {
        return Err(IngestError::NegativeDistance(distance_km));
    }
    let rad = direction.to_radians();
    Ok((distance_km * rad.sin(), distance_km * rad.cos()))
}

/// Average of a set of directions.
///
/// Arithmetic mean while the readings span at most 90°; beyond that the
/// circular mean is used, which handles sets straddling north.
pub fn average_direction(directions: &[f64]) -> Option<f64> {
    if directions.is_empty() {
        return None;
    }
    let lo = directions.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = directions.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 90.0 {
        return Some(directions.iter().sum::<f64>() / directions.len() as f64);
    }
    let (s, c) = directions.iter().fold((0.0, 0.0), |(s, c), d| {
        let r = d.to_radians();
        (s + r.sin(), c + r.cos())
    });
    if s.hypot(c) < 1e-12 {
        return None;
    }
    Some(normalize_degrees(s.atan2(c).to_degrees()))
}

/// Acceptance tolerances for the derived columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Degrees.
    pub direction: f64,
    pub trig: f64,
    /// Bound on |cos² + sin² − 1|.
    pub unit_norm: f64,
    /// Kilometers.
    pub xy: f64,
    /// Seconds.
    pub duration: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            direction: 0.05,
            trig: 0.01,
            unit_norm: 0.03,
            xy: 0.01,
            duration: 0.01,
        }
    }
}

/// A derived column that disagrees with its recomputed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub field: String,
    pub stated: f64,
    /// `None` when the value cannot be recomputed (e.g. zero dances).
    pub recomputed: Option<f64>,
    pub tolerance: f64,
}

/// Cross-check every derived column of `obs` against its primary inputs.
pub fn validate_observation(obs: &DanceObservation, tol: &Tolerances) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    let mut check = |field: &str, stated: f64, recomputed: Option<f64>, tolerance: f64, circular: bool| {
        let ok = match recomputed {
            Some(r) if circular => angular_difference(stated, r) <= tolerance,
            Some(r) => (stated - r).abs() <= tolerance,
            None => false,
        };
        if !ok {
            out.push(Discrepancy {
                field: field.to_string(),
                stated,
                recomputed,
                tolerance,
            });
        }
    };

    for k in 0..3 {
        let derived = derive_direction(obs.angles[k], obs.azimuth).ok();
        check(&format!("directions[{k}]"), obs.directions[k], derived, tol.direction, true);
    }
    check(
        "avg_direction",
        obs.avg_direction,
        average_direction(&obs.directions),
        tol.direction,
        true,
    );

    let rad = obs.avg_direction.to_radians();
    check("cos_dir", obs.cos_dir, Some(rad.cos()), tol.trig, false);
    check("sin_dir", obs.sin_dir, Some(rad.sin()), tol.trig, false);
    let norm = obs.cos_dir * obs.cos_dir + obs.sin_dir * obs.sin_dir;
    check("cos_sin_norm", norm, Some(1.0), tol.unit_norm, false);

    let xy = derive_xy(obs.distance_km, obs.avg_direction).ok();
    check("x_km", obs.x_km, xy.map(|p| p.0), tol.xy, false);
    check("y_km", obs.y_km, xy.map(|p| p.1), tol.xy, false);

    let avg = (obs.n_dances > 0).then(|| obs.total_duration / f64::from(obs.n_dances));
    check("avg_duration", obs.avg_duration, avg, tol.duration, false);
    out
}

/// Duration-to-distance anchors, strictly increasing in duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct CalibrationTable {
    anchors: Vec<(f64, f64)>,
}

impl CalibrationTable {
    pub fn new(anchors: Vec<(f64, f64)>) -> Result<Self, IngestError> {
        if anchors.len() < 2 {
            return Err(IngestError::Calibration(format!(
                "need at least two anchors, got {}",
                anchors.len()
            )));
        }
        for &(d, km) in &anchors {
            if !d.is_finite() || !km.is_finite() || km < 0.0 {
                return Err(IngestError::Calibration(format!(
                    "invalid anchor ({d}, {km})"
                )));
            }
        }
        if anchors.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(IngestError::Calibration(
                "durations must be strictly increasing".into(),
            ));
        }
        Ok(CalibrationTable { anchors })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }
}

impl TryFrom<Vec<(f64, f64)>> for CalibrationTable {
    type Error = IngestError;

    fn try_from(anchors: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        CalibrationTable::new(anchors)
    }
}

impl From<CalibrationTable> for Vec<(f64, f64)> {
    fn from(t: CalibrationTable) -> Self {
        t.anchors
    }
}

/// Distance for a mean waggle duration, by piecewise-linear interpolation.
/// Queries outside the table return the nearest boundary distance.
pub fn calibrate_distance(avg_duration: f64, table: &CalibrationTable) -> f64 {
    let a = &table.anchors;
    let (first, last) = (a[0], a[a.len() - 1]);
    if avg_duration <= first.0 {
        return first.1;
    }
    if avg_duration >= last.0 {
        return last.1;
    }
    let i = a.partition_point(|&(d, _)| d <= avg_duration);
    let (d0, k0) = a[i - 1];
    let (d1, k1) = a[i];
    k0 + (k1 - k0) * (avg_duration - d0) / (d1 - d0)
}
