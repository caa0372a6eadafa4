//! Serialization with 17 significant digits, enough to round-trip any `f64`.

use std::fmt::Write as _;
use std::io::{self, Write};

use geomed::{MedianResult, PointSet};

/// `v` in scientific notation with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_num(v: f64) -> String {
    if v.is_finite() {
        fmt17(v)
    } else {
        "null".into()
    }
}

/// What `solve` reports.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub result: MedianResult<f64>,
    pub eps: f64,
    pub wall_ms: f64,
}

impl SolveReport {
    /// One-line JSON object; keys in a fixed order.
    pub fn to_json(&self) -> String {
        let r = &self.result;
        let median: Vec<String> = r.x.iter().map(|&v| json_num(v)).collect();
        let mut s = String::new();
        write!(
            s,
            "{{\"median\":[{}],\"objective\":{},\"method\":\"{}\",\"eps\":{},\"seed\":{},\"outer_iters\":{},\"inner_evals\":{},\"wall_ms\":{:.3}}}",
            median.join(","),
            json_num(r.objective),
            r.method,
            json_num(self.eps),
            r.seed,
            r.outer_iters,
            r.inner_evals,
            self.wall_ms,
        )
        .expect("writing to a String");
        s
    }

    pub const CSV_HEADER: &'static str = "method,eps,seed,objective,outer_iters,inner_evals,wall_ms,median...";

    /// `method,eps,seed,objective,outer_iters,inner_evals,wall_ms,x_1,...,x_d`.
    pub fn to_csv_row(&self) -> String {
        let r = &self.result;
        let mut fields = vec![
            r.method.to_string(),
            fmt17(self.eps),
            r.seed.to_string(),
            fmt17(r.objective),
            r.outer_iters.to_string(),
            r.inner_evals.to_string(),
            format!("{:.3}", self.wall_ms),
        ];
        fields.extend(r.x.iter().map(|&v| fmt17(v)));
        fields.join(",")
    }
}

/// Writes `ps` in the input format, weights (if any) as the last column.
pub fn write_points<W: Write>(out: &mut W, ps: &PointSet<f64>) -> io::Result<()> {
    for (i, p) in ps.points().enumerate() {
        let mut row: Vec<String> = p.iter().map(|&v| fmt17(v)).collect();
        if ps.is_weighted() {
            row.push(fmt17(ps.weight(i)));
        }
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, f64::MIN_POSITIVE] {
            let s = fmt17(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
    }
}
