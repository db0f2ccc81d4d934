use std::fmt;
use std::str::FromStr;

use crate::CliError;

/// Inclusive integer grid: `a`, `a:b`, `a:b:S` (step S) or `a:b:xF` (geometric, factor F).
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Linear { start: u64, end: u64, step: u64 },
    Geometric { start: u64, end: u64, factor: f64 },
}

impl Grid {
    pub fn single(v: u64) -> Grid {
        Grid::Linear {
            start: v,
            end: v,
            step: 1,
        }
    }

    /// Grid points in increasing order, without duplicates.
    pub fn points(&self) -> Vec<u64> {
        match *self {
            Grid::Linear { start, end, step } => (start..=end).step_by(step as usize).collect(),
            Grid::Geometric { start, end, factor } => {
                let mut out = vec![start];
                let mut x = start as f64;
                loop {
                    x *= factor;
                    let v = x.round();
                    if v > end as f64 {
                        break;
                    }
                    let v = v as u64;
                    if v > *out.last().unwrap() {
                        out.push(v);
                    }
                }
                out
            }
        }
    }
}

fn bad(s: &str, why: &str) -> CliError {
    CliError::Usage(format!("invalid grid {s:?}: {why}"))
}

fn int(s: &str, whole: &str) -> Result<u64, CliError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(whole, "expected a nonnegative integer"));
    }
    s.parse().map_err(|_| bad(whole, "integer out of range"))
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let (start, end) = match parts.len() {
            1 => return Ok(Grid::single(int(parts[0], s)?)),
            2 | 3 => (int(parts[0], s)?, int(parts[1], s)?),
            _ => return Err(bad(s, "too many ':'")),
        };
        if start > end {
            return Err(bad(s, "start exceeds end"));
        }
        let Some(spec) = parts.get(2) else {
            return Ok(Grid::Linear {
                start,
                end,
                step: 1,
            });
        };
        if let Some(f) = spec.strip_prefix('x') {
            let factor: f64 = f.parse().map_err(|_| bad(s, "factor is not a number"))?;
            if !(factor.is_finite() && factor > 1.0) {
                return Err(bad(s, "factor must be a finite number > 1"));
            }
            if start == 0 {
                return Err(bad(s, "geometric grid must start at >= 1"));
            }
            return Ok(Grid::Geometric { start, end, factor });
        }
        let step = int(spec, s)?;
        if step == 0 || step > usize::MAX as u64 {
            return Err(bad(s, "step must be >= 1"));
        }
        if start == end {
            return Ok(Grid::single(start));
        }
        Ok(Grid::Linear { start, end, step })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Grid::Linear { start, end, .. } if start == end => write!(f, "{start}"),
            Grid::Linear {
                start,
                end,
                step: 1,
            } => write!(f, "{start}:{end}"),
            Grid::Linear { start, end, step } => write!(f, "{start}:{end}:{step}"),
            Grid::Geometric { start, end, factor } => write!(f, "{start}:{end}:x{factor}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(s: &str) -> Vec<u64> {
        s.parse::<Grid>().unwrap().points()
    }

    #[test]
    fn forms() {
        assert_eq!(pts("7"), vec![7]);
        assert_eq!(pts("1:4"), vec![1, 2, 3, 4]);
        assert_eq!(pts("1:10:3"), vec![1, 4, 7, 10]);
        assert_eq!(pts("100:1600:x2"), vec![100, 200, 400, 800, 1600]);
        assert_eq!(pts("25:400:x2"), vec![25, 50, 100, 200, 400]);
        assert_eq!(pts("1:10:x1.5"), vec![1, 2, 3, 5, 8]);
    }

    #[test]
    fn rejects() {
        for s in [
            "", "a", "1:", "5:1", "1:2:0", "1:2:x1", "1:2:xnan", "0:4:x2", "1:2:3:4", "-1", "+3",
        ] {
            assert!(s.parse::<Grid>().is_err(), "{s:?}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["7", "1:4", "1:10:3", "100:1600:x2", "1:10:x1.5"] {
            assert_eq!(s.parse::<Grid>().unwrap().to_string(), s);
        }
        assert_eq!("5:5:3".parse::<Grid>().unwrap(), Grid::single(5));
    }
}
