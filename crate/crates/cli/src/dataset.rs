//! Dataset ingestion: one number per line or comma-separated, `#` comments.

use wcregf::Sample;

#[derive(Debug)]
pub enum DataError {
    Io(String),
    Parse { line: usize, token: String },
    Negative { line: usize, value: f64 },
    Empty(String),
}

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DataError::Io(msg) => write!(f, "{msg}"),
            DataError::Parse { line, token } => {
                write!(f, "line {line}: cannot parse `{token}` as a number")
            }
            DataError::Negative { line, value } => {
                write!(f, "line {line}: negative value {value} not allowed")
            }
            DataError::Empty(path) => write!(f, "no data values found in {path}"),
        }
    }
}

/// Read a sample from a text file. Lines starting with `#` are ignored;
/// values may be separated by newlines, commas, or whitespace.
pub fn parse_dataset(path: &std::path::Path) -> Result<Sample, DataError> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| DataError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_dataset_str(&content, &path.display().to_string())
}

pub fn parse_dataset_str(content: &str, origin: &str) -> Result<Sample, DataError> {
    let mut values = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        for token in trimmed.split(',').flat_map(|part| part.split_whitespace()) {
            let token = token.trim();
            if token.is_empty() {
                continue;
            }
            let value: f64 = token
                .parse()
                .map_err(|_| DataError::Parse { line: line_no, token: token.to_string() })?;
            if value < 0.0 {
                return Err(DataError::Negative { line: line_no, value });
            }
            values.push(value);
        }
    }
    if values.is_empty() {
        return Err(DataError::Empty(origin.to_string()));
    }
    Sample::new(values).map_err(|e| DataError::Io(e.to_string()))
}
