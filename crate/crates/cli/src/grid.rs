//! Parsers for the integer and real grids accepted on the command line.
//!
//! Integers: `5`, `1,2,8` or the inclusive range `0..8`.
//! Reals: `0.5`, `0.5,1,2` or `lo:hi:step`.

/// A parsed integer grid, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntGrid(pub Vec<u32>);

/// A parsed real grid, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid(pub Vec<f64>);

pub fn int_grid(s: &str) -> Result<IntGrid, String> {
    parse_ints(s).map(IntGrid)
}

pub fn real_grid(s: &str) -> Result<RealGrid, String> {
    parse_reals(s).map(RealGrid)
}

fn strictly_increasing<T: PartialOrd + Copy>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

pub fn parse_ints(s: &str) -> Result<Vec<u32>, String> {
    let s = s.trim();
    let values: Vec<u32> = if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|e| format!("bad range start {lo:?}: {e}"))?;
        let hi: u32 = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|e| format!("bad range end {hi:?}: {e}"))?;
        if hi < lo {
            return Err(format!("empty range {s}"));
        }
        (lo..=hi).collect()
    } else {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|e| format!("bad integer {p:?}: {e}"))
            })
            .collect::<Result<_, _>>()?
    };
    if !strictly_increasing(&values) {
        return Err(format!("grid {s} is not strictly increasing"));
    }
    Ok(values)
}

fn real(p: &str) -> Result<f64, String> {
    let v: f64 = p
        .trim()
        .parse()
        .map_err(|e| format!("bad number {p:?}: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite value {p:?}"))
    }
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (real(lo)?, real(hi)?, real(step)?);
            if step <= 0.0 || hi < lo {
                return Err(format!("range {s} needs lo ≤ hi and a positive step"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(format!("range {s} has {count} points"));
            }
            (0..count).map(|i| lo + i as f64 * step).collect()
        }
        [_] => s.split(',').map(real).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("expected a list or lo:hi:step, got {s:?}")),
    };
    if !strictly_increasing(&values) {
        return Err(format!("grid {s} is not strictly increasing"));
    }
    Ok(values)
}

pub fn positive(s: &str) -> Result<f64, String> {
    let v = real(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not positive"))
    }
}

/// `name=value` with a positive value.
pub fn tolerance_override(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    Ok((name.trim().to_string(), positive(value)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_forms() {
        assert_eq!(parse_ints("5").unwrap(), vec![5]);
        assert_eq!(parse_ints("50,100,200").unwrap(), vec![50, 100, 200]);
        assert_eq!(parse_ints("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_ints("2..=3").unwrap(), vec![2, 3]);
        assert!(parse_ints("3,2").is_err());
        assert!(parse_ints("4..1").is_err());
        assert!(parse_ints("x").is_err());
    }

    #[test]
    fn real_forms() {
        assert_eq!(parse_reals("0.5,1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        let r = parse_reals("0:1:0.25").unwrap();
        assert_eq!(r, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_reals("-2:2:0.1").unwrap().len(), 41);
        assert!(parse_reals("1,1").is_err());
        assert!(parse_reals("0:1:0").is_err());
        assert!(parse_reals("nan").is_err());
    }

    #[test]
    fn tolerances() {
        assert_eq!(
            tolerance_override("theorem2.determinant=1e-3").unwrap().1,
            1e-3
        );
        assert!(tolerance_override("a=0").is_err());
        assert!(tolerance_override("a").is_err());
        assert!(positive("-1").is_err());
    }
}
