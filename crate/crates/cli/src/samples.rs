//! Reading `t,y` sample files.

use std::io::Read;

use perturbreg::GridFunction;

use crate::failure::{CliResult, Failure};

/// Relative tolerance on each step against the mean step.
pub const SPACING_RTOL: f64 = 1e-9;

/// Parses a `t,y` CSV and checks that `t` is a uniform increasing grid.
pub fn read_samples(reader: impl Read) -> CliResult<GridFunction> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let malformed = |m: String| Failure::Input(format!("malformed sample CSV: {m}"));
    let header = rdr.headers().map_err(|e| malformed(e.to_string()))?.clone();
    if header.len() != 2 || &header[0] != "t" || &header[1] != "y" {
        return Err(malformed(format!("expected header 't,y', got '{}'", header.iter().collect::<Vec<_>>().join(","))));
    }
    let (mut ts, mut ys) = (Vec::new(), Vec::new());
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        let parse = |s: &str| -> CliResult<f64> {
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(malformed(format!("row {}: '{s}' is not a finite number", line + 1))),
            }
        };
        ts.push(parse(&record[0])?);
        ys.push(parse(&record[1])?);
    }
    if ts.len() < 2 {
        return Err(malformed(format!("need at least two samples, got {}", ts.len())));
    }
    check_uniform(&ts)?;
    Ok(GridFunction::new(ts[0], ts[ts.len() - 1], ys)?)
}

fn check_uniform(ts: &[f64]) -> CliResult<()> {
    let n = ts.len();
    if let Some(i) = ts.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Failure::NonUniform(format!("t is not strictly increasing at row {}", i + 2)));
    }
    let h = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    for (i, w) in ts.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > SPACING_RTOL * h {
            return Err(Failure::NonUniform(format!("step {} after row {} differs from mean step {h}", w[1] - w[0], i + 1)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::{csv_bytes, float_rows};
    use proptest::prelude::*;

    fn read(s: &str) -> CliResult<GridFunction> {
        read_samples(s.as_bytes())
    }

    #[test]
    fn reads_uniform_grid() {
        let g = read("t,y\n0,1\n0.5,2\n1,4\n").unwrap();
        assert_eq!((g.a(), g.b(), g.values()), (0.0, 1.0, &[1.0, 2.0, 4.0][..]));
    }

    #[test]
    fn rejects_bad_header_and_values() {
        for bad in ["x,y\n0,1\n1,2\n", "t,y\n0,1\n1,abc\n", "t,y\n0,1\n", "t,y\n0,1\n1\n", "t,y\n0,1\n1,inf\n"] {
            assert!(matches!(read(bad), Err(Failure::Input(_))), "{bad:?}");
        }
    }

    #[test]
    fn rejects_shuffled_and_uneven() {
        assert!(matches!(read("t,y\n0,1\n1,2\n0.5,3\n"), Err(Failure::NonUniform(_))));
        assert!(matches!(read("t,y\n0,1\n0.4,2\n1,3\n"), Err(Failure::NonUniform(_))));
        assert!(matches!(read("t,y\n0,1\n0,2\n1,3\n"), Err(Failure::NonUniform(_))));
    }

    proptest! {
        #[test]
        fn written_samples_read_back_exactly(a in -10.0..10.0f64, len in 0.1..10.0f64, ys in prop::collection::vec(-1e6..1e6f64, 2..200)) {
            let g = GridFunction::new(a, a + len, ys).unwrap();
            let bytes = csv_bytes(&["t", "y"], float_rows(g.times().zip(g.values()).map(|(t, y)| [t, *y]))).unwrap();
            let back = read_samples(&bytes[..]).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
