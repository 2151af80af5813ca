//! CSV serialization of solver traces.
//!
//! Plain format: `iter,phase,time_s,flops,residual[,err_oracle]`. The compare
//! command prepends a `method` column (long format). Floats are written with
//! the shortest round-tripping representation except `time_s`, which is fixed
//! to six decimals; re-runs of a deterministic configuration therefore differ
//! at most in the time column.

use std::io::Write;

use pinv_core::TraceRow;

pub fn write_header(w: &mut impl Write, with_method: bool, with_oracle: bool) -> std::io::Result<()> {
    if with_method {
        write!(w, "method,")?;
    }
    write!(w, "iter,phase,time_s,flops,residual")?;
    if with_oracle {
        write!(w, ",err_oracle")?;
    }
    writeln!(w)
}

pub fn write_row(
    w: &mut impl Write,
    method: Option<&str>,
    row: &TraceRow,
    with_oracle: bool,
) -> std::io::Result<()> {
    if let Some(m) = method {
        write!(w, "{m},")?;
    }
    write!(
        w,
        "{},{},{:.6},{},{}",
        row.iter, row.phase, row.time_s, row.flops, row.residual
    )?;
    if with_oracle {
        match row.err_oracle {
            Some(e) => write!(w, ",{e}")?,
            None => write!(w, ",")?,
        }
    }
    writeln!(w)
}

pub fn write_trace(
    w: &mut impl Write,
    method: Option<&str>,
    rows: &[TraceRow],
    with_oracle: bool,
) -> std::io::Result<()> {
    write_header(w, method.is_some(), with_oracle)?;
    for row in rows {
        write_row(w, method, row, with_oracle)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row() -> TraceRow {
        TraceRow {
            iter: 3,
            phase: "main",
            time_s: 0.25,
            flops: 1200,
            residual: 0.5,
            err_oracle: Some(0.125),
        }
    }

    #[test]
    fn plain_format() {
        let mut buf = Vec::new();
        write_trace(&mut buf, None, &[sample_row()], true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "iter,phase,time_s,flops,residual,err_oracle\n3,main,0.250000,1200,0.5,0.125\n"
        );
    }

    #[test]
    fn long_format_with_method() {
        let mut buf = Vec::new();
        write_trace(&mut buf, Some("ns"), &[sample_row()], false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "method,iter,phase,time_s,flops,residual\nns,3,main,0.250000,1200,0.5\n");
    }

    #[test]
    fn residual_round_trips() {
        let mut row = sample_row();
        row.residual = 1.0 / 3.0;
        let mut buf = Vec::new();
        write_row(&mut buf, None, &row, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let printed: f64 = text.trim().rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(printed.to_bits(), (1.0f64 / 3.0).to_bits());
    }
}
