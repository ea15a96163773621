use std::f64::consts::PI;

use crate::error::{CliError, CliResult};

/// Parses a number, `pi`, `pi/k` or `a*pi/k`, in radians unless `deg`.
pub fn parse_angle(text: &str, deg: bool) -> CliResult<f64> {
    let t = text.trim().to_ascii_lowercase();
    let value = if t.contains("pi") {
        if deg {
            return Err(CliError::Usage(format!("'{text}': pi is not a degree value")));
        }
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), parse_number(d, text)?),
            None => (t.as_str(), 1.0),
        };
        let factor = match num.strip_suffix("pi").map(|f| f.trim_end_matches('*').trim()) {
            Some("") => 1.0,
            Some(f) => parse_number(f, text)?,
            None => return Err(CliError::Usage(format!("cannot parse angle '{text}'"))),
        };
        factor * PI / den
    } else {
        parse_number(&t, text)?
    };
    let rad = if deg { value.to_radians() } else { value };
    if !rad.is_finite() {
        return Err(CliError::Usage(format!("angle '{text}' is not finite")));
    }
    Ok(rad)
}

fn parse_number(s: &str, whole: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("cannot parse angle '{whole}'")))
}

/// `START:STOP:COUNT` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_grid(text: &str, deg: bool) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (parse_angle(start, deg)?, parse_angle(stop, deg)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad grid count in '{text}'")))?;
            match count {
                0 => return Err(CliError::Usage("grid needs at least one point".into())),
                1 => vec![a],
                _ => (0..count)
                    .map(|i| {
                        if i + 1 == count {
                            b
                        } else {
                            a + (b - a) * i as f64 / (count - 1) as f64
                        }
                    })
                    .collect(),
            }
        }
        [list] => list
            .split(',')
            .map(|s| parse_angle(s, deg))
            .collect::<CliResult<Vec<f64>>>()?,
        _ => return Err(CliError::Usage(format!("cannot parse grid '{text}'"))),
    };
    if let Some(bad) = grid.iter().find(|&&p| !(-1e-12..=PI / 2.0 + 1e-12).contains(&p)) {
        return Err(CliError::Usage(format!("grid point {bad} outside [0, pi/2]")));
    }
    Ok(grid)
}
