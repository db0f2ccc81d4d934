use meancut::ExactRational;

use crate::format::{format_f64, format_rational};
use crate::CliError;

pub const EVAL_HEADER: [&str; 13] = [
    "k",
    "l",
    "exact_rational",
    "exact_decimal",
    "float_p",
    "raab_p",
    "approx1",
    "approx2",
    "approx3",
    "abs_err_raab",
    "abs_err1",
    "abs_err2",
    "abs_err3",
];

/// One row of `eval` output; `None` columns are written empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalRow {
    pub k: u64,
    pub l: u64,
    pub exact: Option<ExactRational>,
    pub float_p: Option<f64>,
    pub raab_p: Option<f64>,
    pub approx: [Option<f64>; 3],
    pub abs_err_raab: Option<f64>,
    pub abs_err: [Option<f64>; 3],
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

impl EvalRow {
    pub fn record(&self) -> Vec<String> {
        let mut r = vec![self.k.to_string(), self.l.to_string()];
        match &self.exact {
            Some(e) => {
                r.push(e.to_string());
                r.push(format_rational(e));
            }
            None => r.extend([String::new(), String::new()]),
        }
        r.push(opt(self.float_p));
        r.push(opt(self.raab_p));
        r.extend(self.approx.iter().map(|&a| opt(a)));
        r.push(opt(self.abs_err_raab));
        r.extend(self.abs_err.iter().map(|&a| opt(a)));
        r
    }

    /// Parses the fields of one record as written by [`EvalRow::record`].
    ///
    /// `exact_decimal` is checked against `exact_rational` rather than stored.
    pub fn from_fields<S: AsRef<str>>(fields: &[S]) -> Result<EvalRow, CliError> {
        if fields.len() != EVAL_HEADER.len() {
            return Err(parse_err(format!(
                "expected {} fields, got {}",
                EVAL_HEADER.len(),
                fields.len()
            )));
        }
        let f = |i: usize| fields[i].as_ref();
        let uint = |i: usize| -> Result<u64, CliError> {
            let s = f(i);
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err(format!(
                    "{}: not an integer: {s:?}",
                    EVAL_HEADER[i]
                )));
            }
            s.parse()
                .map_err(|_| parse_err(format!("{}: out of range", EVAL_HEADER[i])))
        };
        let real = |i: usize| -> Result<Option<f64>, CliError> {
            let s = f(i);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| parse_err(format!("{}: not a number: {s:?}", EVAL_HEADER[i])))
        };
        let exact = match (f(2), f(3)) {
            ("", "") => None,
            (r, d) => {
                let e: ExactRational = r
                    .parse()
                    .map_err(|e| parse_err(format!("exact_rational: {e}")))?;
                if format_rational(&e) != d {
                    return Err(parse_err(format!("exact_decimal {d:?} does not match {r}")));
                }
                Some(e)
            }
        };
        Ok(EvalRow {
            k: uint(0)?,
            l: uint(1)?,
            exact,
            float_p: real(4)?,
            raab_p: real(5)?,
            approx: [real(6)?, real(7)?, real(8)?],
            abs_err_raab: real(9)?,
            abs_err: [real(10)?, real(11)?, real(12)?],
        })
    }

    /// Parses a single CSV line (no header).
    pub fn parse_line(line: &str) -> Result<EvalRow, CliError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(line.as_bytes());
        let mut records = rdr.records();
        let rec = records
            .next()
            .ok_or_else(|| parse_err("empty input".into()))?
            .map_err(|e| parse_err(e.to_string()))?;
        if records.next().is_some() {
            return Err(parse_err("more than one record".into()));
        }
        let fields: Vec<&str> = rec.iter().collect();
        EvalRow::from_fields(&fields)
    }
}

fn parse_err(msg: String) -> CliError {
    CliError::Usage(format!("malformed eval row: {msg}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let row = EvalRow {
            k: 3,
            l: 5,
            exact: Some("6203125/16777216".parse().unwrap()),
            float_p: Some(0.36973506212234497),
            approx: [Some(0.42319008112684353), None, Some(0.5)],
            ..EvalRow::default()
        };
        let line = row.record().join(",");
        assert_eq!(
            line,
            "3,5,6203125/16777216,0.36973506212234497,0.36973506212234497,,0.42319008112684353,,0.5,,,,"
        );
        assert_eq!(EvalRow::parse_line(&line).unwrap(), row);
    }

    #[test]
    fn rejects_inconsistent_decimal() {
        assert!(EvalRow::parse_line("1,1,1/4,0.5,,,,,,,,,").is_err());
        assert!(EvalRow::parse_line("1,1,1/4,,,,,,,,,,").is_err());
        assert!(EvalRow::parse_line("1,1").is_err());
        assert!(EvalRow::parse_line("1,x,,,,,,,,,,,").is_err());
    }
}
