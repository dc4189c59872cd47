//! CSV loaders for the benchmark datasets.

use std::collections::BTreeMap;
use std::path::Path;

use super::{ClassificationData, DepletingEnv, Rating};
use crate::error::{Error, Result};

const COVERTYPE_FEATURES: usize = 54;
const COVERTYPE_CLASSES: usize = 7;

fn reader(path: &Path, has_headers: bool) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Forest cover type: 54 numeric columns then an integer class in 1..=7.
pub fn load_covertype(path: impl AsRef<Path>) -> Result<ClassificationData> {
    let path = path.as_ref();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader(path, false)?.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(csv_error)?;
        if record.len() != COVERTYPE_FEATURES + 1 {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected {} columns, found {}",
                    COVERTYPE_FEATURES + 1,
                    record.len()
                ),
            });
        }
        for field in record.iter().take(COVERTYPE_FEATURES) {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("non-numeric feature `{field}`"),
            })?;
            features.push(v);
        }
        let class: usize = record[COVERTYPE_FEATURES]
            .parse()
            .map_err(|_| Error::Parse {
                line,
                message: format!("non-integer class `{}`", &record[COVERTYPE_FEATURES]),
            })?;
        if !(1..=COVERTYPE_CLASSES).contains(&class) {
            return Err(Error::Parse {
                line,
                message: format!("class {class} outside 1..={COVERTYPE_CLASSES}"),
            });
        }
        labels.push(class - 1);
    }
    ClassificationData::new(
        "covertype",
        COVERTYPE_FEATURES,
        COVERTYPE_CLASSES,
        features,
        labels,
    )
}

/// Per-column one-hot encoding of categorical string features.
///
/// Categories are sorted per column. Values not seen when fitting encode as
/// an all-zero block.
#[derive(Debug, Clone, PartialEq)]
pub struct OneHotEncoder {
    columns: Vec<Column>,
    width: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Column {
    Numeric {
        offset: usize,
    },
    Categorical {
        offset: usize,
        categories: BTreeMap<String, usize>,
    },
}

impl OneHotEncoder {
    /// Columns whose every value parses as a number stay numeric; the rest
    /// are one-hot encoded.
    pub fn fit<R: AsRef<[String]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        if n_cols == 0 {
            return Err(Error::invalid("cannot fit an encoder without columns"));
        }
        let mut columns = Vec::with_capacity(n_cols);
        let mut offset = 0;
        for c in 0..n_cols {
            let values = rows.iter().map(|r| r.as_ref()[c].as_str());
            if values
                .clone()
                .all(|v| v.parse::<f64>().is_ok_and(f64::is_finite))
            {
                columns.push(Column::Numeric { offset });
                offset += 1;
            } else {
                let mut cats: Vec<&str> = values.collect();
                cats.sort_unstable();
                cats.dedup();
                let categories: BTreeMap<String, usize> = cats
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.to_string(), i))
                    .collect();
                let n = categories.len();
                columns.push(Column::Categorical { offset, categories });
                offset += n;
            }
        }
        Ok(Self {
            columns,
            width: offset,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn transform(&self, row: &[String]) -> Result<Vec<f64>> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(format!(
                "row has {} columns, encoder expects {}",
                row.len(),
                self.columns.len()
            )));
        }
        let mut out = vec![0.0; self.width];
        for (col, value) in self.columns.iter().zip(row) {
            match col {
                Column::Numeric { offset } => {
                    out[*offset] = value
                        .parse()
                        .map_err(|_| Error::invalid(format!("non-numeric value `{value}`")))?;
                }
                Column::Categorical { offset, categories } => {
                    if let Some(&i) = categories.get(value.as_str()) {
                        out[offset + i] = 1.0;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Bach chorales harmony: categorical feature columns with the chord label
/// last. Labels are indexed in sorted order over the whole file.
pub fn load_chorales(path: impl AsRef<Path>) -> Result<ClassificationData> {
    let path = path.as_ref();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut label_names: Vec<String> = Vec::new();
    let mut width = None;
    for (i, record) in reader(path, false)?.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(csv_error)?;
        if record.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "expected at least one feature column and a label".into(),
            });
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} columns, found {}", record.len()),
                })
            }
            _ => {}
        }
        let mut fields: Vec<String> = record.iter().map(str::to_string).collect();
        label_names.push(fields.pop().unwrap_or_default());
        rows.push(fields);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "empty file".into(),
        });
    }
    let encoder = OneHotEncoder::fit(&rows)?;
    let mut classes = label_names.clone();
    classes.sort_unstable();
    classes.dedup();
    let index: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut features = Vec::with_capacity(rows.len() * encoder.width());
    for row in &rows {
        features.extend(encoder.transform(row)?);
    }
    let labels = label_names.iter().map(|l| index[l.as_str()]).collect();
    ClassificationData::new(
        "chorales",
        encoder.width(),
        classes.len().max(2),
        features,
        labels,
    )
}

/// Ratings CSV with a `userId,movieId,rating,timestamp` header.
pub fn parse_ratings(path: impl AsRef<Path>) -> Result<Vec<Rating>> {
    let path = path.as_ref();
    let mut rdr = reader(path, true)?;
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let expected = ["userId", "movieId", "rating"];
    if headers.len() < 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header starting userId,movieId,rating, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(csv_error)?;
        let bad = |what: &str| Error::Parse {
            line,
            message: format!("invalid {what}"),
        };
        if record.len() < 3 {
            return Err(bad("column count"));
        }
        out.push(Rating {
            user: record[0].parse().map_err(|_| bad("userId"))?,
            item: record[1].parse().map_err(|_| bad("movieId"))?,
            rating: record[2]
                .parse::<f64>()
                .ok()
                .filter(|r| r.is_finite())
                .ok_or_else(|| bad("rating"))?,
        });
    }
    Ok(out)
}

pub fn load_movielens_depleting(
    path: impl AsRef<Path>,
    seed: u64,
    context_dim: usize,
    passes: usize,
) -> Result<DepletingEnv> {
    DepletingEnv::from_ratings(&parse_ratings(path)?, seed, context_dim, passes)
}
