//! Per-second binary behaviour matrix and its CSV form.
//!
//! CSV layout: header `second,<code>,<code>,...` followed by one row per
//! second with `0`/`1` cells. Seconds must be contiguous.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimelineMatrix {
    unit_id: String,
    t0: i64,
    codes: Vec<String>,
    cells: Vec<Vec<u8>>,
}

impl TimelineMatrix {
    pub fn zeros(unit_id: impl Into<String>, t0: i64, rows: usize, codes: Vec<String>) -> Self {
        let k = codes.len();
        TimelineMatrix {
            unit_id: unit_id.into(),
            t0,
            codes,
            cells: vec![vec![0; k]; rows],
        }
    }

    /// Builds a matrix from explicit rows; every cell must be 0 or 1.
    pub fn from_rows(unit_id: impl Into<String>, t0: i64, codes: Vec<String>, cells: Vec<Vec<u8>>) -> Result<Self> {
        for (r, row) in cells.iter().enumerate() {
            if row.len() != codes.len() {
                return Err(Error::Shape(format!("row {r} has {} cells for {} codes", row.len(), codes.len())));
            }
            if row.iter().any(|v| *v > 1) {
                return Err(Error::validation(format!("row {r} has a non-binary cell")));
            }
        }
        Ok(TimelineMatrix {
            unit_id: unit_id.into(),
            t0,
            codes,
            cells,
        })
    }

    pub fn unit_id(&self) -> &str {
        &self.unit_id
    }

    pub fn set_unit_id(&mut self, id: impl Into<String>) {
        self.unit_id = id.into();
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    /// Exclusive end second.
    pub fn t1(&self) -> i64 {
        self.t0 + self.cells.len() as i64
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn code_index(&self, code: &str) -> Option<usize> {
        self.codes.iter().position(|c| c == code)
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r]
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, on: bool) {
        self.cells[r][c] = u8::from(on);
    }

    pub fn column_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.codes.len()];
        for row in &self.cells {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += usize::from(*v);
            }
        }
        sums
    }

    /// Fraction of seconds in which each code is active.
    pub fn active_fractions(&self) -> Vec<f64> {
        let n = self.rows().max(1) as f64;
        self.column_sums().into_iter().map(|s| s as f64 / n).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.codes {
            if c.contains([',', '"', '\n', '\r']) {
                return Err(Error::validation(format!("code '{c}' cannot be written as a CSV header")));
            }
        }
        let io = |e: std::io::Error| Error::invalid(e.to_string());
        writeln!(out, "second,{}", self.codes.join(",")).map_err(io)?;
        for (r, row) in self.cells.iter().enumerate() {
            let cells: Vec<&str> = row.iter().map(|v| if *v == 1 { "1" } else { "0" }).collect();
            writeln!(out, "{},{}", self.t0 + r as i64, cells.join(",")).map_err(io)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(unit_id: impl Into<String>, reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((i, l)) => {
                    let l = l.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
                    if !l.trim().is_empty() {
                        break l;
                    }
                }
                None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
            }
        };
        let mut cols = header.trim_end().split(',');
        if cols.next() != Some("second") {
            return Err(Error::Parse { line: 1, message: "first column must be 'second'".into() });
        }
        let codes: Vec<String> = cols.map(str::to_string).collect();
        let mut cells = Vec::new();
        let mut t0 = None;
        for (i, line) in lines {
            let line = line.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.trim_end().split(',');
            let sec: i64 = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse { line: i + 1, message: "bad second".into() })?;
            let expected = t0.map_or(sec, |t: i64| t + cells.len() as i64);
            if sec != expected {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("seconds must be contiguous; expected {expected}, got {sec}"),
                });
            }
            t0.get_or_insert(sec);
            let row: Vec<u8> = fields
                .map(|f| match f.trim() {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(Error::Parse { line: i + 1, message: format!("non-binary cell '{other}'") }),
                })
                .collect::<Result<_>>()?;
            if row.len() != codes.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {} cells, got {}", codes.len(), row.len()),
                });
            }
            cells.push(row);
        }
        Self::from_rows(unit_id, t0.unwrap_or(0), codes, cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_layout() {
        let tl = TimelineMatrix::from_rows("s", 4, vec!["A".into(), "B".into()], vec![vec![1, 0], vec![0, 0]]).unwrap();
        let mut buf = Vec::new();
        tl.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "second,A,B\n4,1,0\n5,0,0\n");
        assert_eq!(tl.t1(), 6);
    }

    #[test]
    fn read_rejects_gaps_and_bad_cells() {
        assert!(TimelineMatrix::read_csv("s", "second,A\n0,1\n2,0\n".as_bytes()).is_err());
        assert!(TimelineMatrix::read_csv("s", "second,A\n0,2\n".as_bytes()).is_err());
        assert!(TimelineMatrix::read_csv("s", "sec,A\n0,1\n".as_bytes()).is_err());
        assert!(TimelineMatrix::read_csv("s", "second,A,B\n0,1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(t0 in -5i64..100, rows in prop::collection::vec(prop::collection::vec(0u8..2, 3), 0..20)) {
            let tl = TimelineMatrix::from_rows("u", t0, vec!["x y".into(), "p/q".into(), "z".into()], rows).unwrap();
            let mut buf = Vec::new();
            tl.write_csv(&mut buf).unwrap();
            let back = TimelineMatrix::read_csv("u", buf.as_slice()).unwrap();
            if tl.rows() > 0 {
                prop_assert_eq!(back, tl);
            } else {
                prop_assert_eq!(back.rows(), 0);
            }
        }
    }
}
