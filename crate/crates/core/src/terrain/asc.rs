//! ESRI ASCII grid reader and writer.

use super::{DemGrid, TerrainError, DEFAULT_NODATA};
use std::fmt::Write;

const REQUIRED_KEYS: [&str; 5] = ["ncols", "nrows", "xllcorner", "yllcorner", "cellsize"];

fn format_err(line: usize, message: impl Into<String>) -> TerrainError {
    TerrainError::Format {
        line,
        message: message.into(),
    }
}

/// Parses an ASC document. Header keys are case-insensitive; data rows must
/// hold exactly `ncols` values each.
pub fn load_asc(text: &str) -> Result<DemGrid, TerrainError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    let mut header: [Option<f64>; 5] = [None; 5];
    let mut nodata = None;
    let mut last_line = 0;
    while let Some(&(lineno, line)) = lines.peek() {
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        if key.parse::<f64>().is_ok() {
            break;
        }
        lines.next();
        last_line = lineno;
        let key = key.to_ascii_lowercase();
        let value = match (parts.next(), parts.next()) {
            (Some(v), None) => v
                .parse::<f64>()
                .map_err(|_| format_err(lineno, format!("non-numeric value for `{key}`")))?,
            _ => return Err(format_err(lineno, format!("expected `{key} <value>`"))),
        };
        let slot = if key == "nodata_value" {
            &mut nodata
        } else if let Some(i) = REQUIRED_KEYS.iter().position(|k| *k == key) {
            &mut header[i]
        } else {
            return Err(format_err(lineno, format!("unrecognized header key `{key}`")));
        };
        if slot.replace(value).is_some() {
            return Err(format_err(lineno, format!("duplicate header key `{key}`")));
        }
    }

    let mut fields = [0.0; 5];
    for (i, slot) in header.iter().enumerate() {
        fields[i] = slot.ok_or_else(|| {
            format_err(last_line.max(1), format!("missing header key `{}`", REQUIRED_KEYS[i]))
        })?;
    }
    let [ncols, nrows, xll, yll, cellsize] = fields;
    let as_count = |v: f64, key: &str| {
        if v.fract() == 0.0 && v >= 2.0 && v <= u32::MAX as f64 {
            Ok(v as usize)
        } else {
            Err(format_err(1, format!("`{key}` must be an integer >= 2, got {v}")))
        }
    };
    let ncols = as_count(ncols, "ncols")?;
    let nrows = as_count(nrows, "nrows")?;
    let nodata = nodata.unwrap_or(DEFAULT_NODATA);

    let mut values = Vec::with_capacity(ncols * nrows);
    let mut rows = 0;
    for (lineno, line) in lines {
        if rows == nrows {
            return Err(format_err(lineno, format!("more than {nrows} data rows")));
        }
        let start = values.len();
        for token in line.split_whitespace() {
            let v: f64 = token
                .parse()
                .map_err(|_| format_err(lineno, format!("non-numeric cell `{token}`")))?;
            if !v.is_finite() && v != nodata {
                return Err(format_err(lineno, format!("non-finite cell `{token}`")));
            }
            values.push(v);
        }
        let got = values.len() - start;
        if got != ncols {
            return Err(format_err(
                lineno,
                format!("row {} has {got} values, expected {ncols}", rows + 1),
            ));
        }
        rows += 1;
        last_line = lineno;
    }
    if rows != nrows {
        return Err(format_err(
            last_line,
            format!("found {rows} data rows, expected {nrows}"),
        ));
    }
    DemGrid::new(ncols, nrows, xll, yll, cellsize, nodata, values)
        .map_err(|e| format_err(1, e.to_string()))
}

/// Writes the grid as ASC text. Numbers use the shortest representation that
/// parses back to the same `f64`.
pub fn save_asc(grid: &DemGrid) -> String {
    let mut out = String::with_capacity(grid.len() * 12 + 128);
    let _ = writeln!(out, "ncols {}", grid.ncols());
    let _ = writeln!(out, "nrows {}", grid.nrows());
    let _ = writeln!(out, "xllcorner {}", grid.xllcorner());
    let _ = writeln!(out, "yllcorner {}", grid.yllcorner());
    let _ = writeln!(out, "cellsize {}", grid.cellsize());
    let _ = writeln!(out, "NODATA_value {}", grid.nodata());
    for row in grid.values().chunks(grid.ncols()) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 60\n1 2\n3 4\n";

    #[test]
    fn parses_minimal_grid() {
        let g = load_asc(SMALL).unwrap();
        assert_eq!(g.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(g.nodata(), -9999.0);
        assert_eq!(g.cellsize(), 60.0);
    }

    #[test]
    fn keys_are_case_insensitive() {
        let text = "NCOLS 2\nNROWS 2\nXLLCorner 10\nYLLCORNER 20\nCellSize 30\nnodata_value -1\n1 -1\n3 4\n";
        let g = load_asc(text).unwrap();
        assert_eq!(g.xllcorner(), 10.0);
        assert_eq!(g.nodata(), -1.0);
        assert!(g.is_nodata(super::super::GridIndex::new(1, 0)));
    }

    #[test]
    fn short_row_reports_its_line() {
        let text = "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n";
        match load_asc(text) {
            Err(TerrainError::Format { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_header_and_cells() {
        let bad_key = "ncols 2\nrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n";
        assert!(matches!(load_asc(bad_key), Err(TerrainError::Format { line: 2, .. })));
        let bad_cell = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 x\n";
        assert!(matches!(load_asc(bad_cell), Err(TerrainError::Format { line: 7, .. })));
        let missing_row = "ncols 2\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n";
        assert!(matches!(load_asc(missing_row), Err(TerrainError::Format { .. })));
        let extra_row = "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n";
        assert!(load_asc(extra_row).is_err());
    }

    #[test]
    fn round_trip_keeps_nodata_sentinel() {
        let g = DemGrid::new(2, 2, 5.5, -3.25, 60.0, -9999.0, vec![0.1, -9999.0, 1e-17, 1234.5678])
            .unwrap();
        let text = save_asc(&g);
        assert!(text.contains(" -9999\n") || text.contains("-9999 "));
        assert_eq!(load_asc(&text).unwrap(), g);
    }
}
