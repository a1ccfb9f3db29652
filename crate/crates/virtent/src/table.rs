//! CSV output: a `# grid` comment line, a header row, LF endings, 17 significant digits.

use std::io::Write;

use crate::error::Result;
use crate::grid::Grid;
use crate::sweeps::{Figure2Row, Figure3};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(mut out: W, grid: &Grid) -> Result<csv::Writer<W>> {
    writeln!(out, "# grid: {}", grid.describe())
        .map_err(|e| crate::error::CliError::io("<csv>", e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out))
}

pub fn write_figure2<W: Write>(out: W, grid: &Grid, rows: &[Figure2Row]) -> Result<()> {
    let mut w = writer(out, grid)?;
    w.write_record(["m0", "S_total", "S_ext", "S_int", "I", "S_ext_plus_S_int"])?;
    for r in rows {
        w.write_record([r.m0, r.s_total, r.s_ext, r.s_int, r.mutual, r.ext_plus_int].map(float))?;
    }
    w.flush()
        .map_err(|e| crate::error::CliError::io("<csv>", e))?;
    Ok(())
}

pub fn write_figure3<W: Write>(out: W, grid: &Grid, fig: &Figure3) -> Result<()> {
    let mut w = writer(out, grid)?;
    let mut header = vec!["m0".to_string()];
    header.extend(fig.mus.iter().map(|mu| format!("finite_mu_{mu}")));
    w.write_record(&header)?;
    for (m0, row) in fig.m0.iter().zip(&fig.values) {
        let mut rec = vec![float(*m0)];
        rec.extend(row.iter().map(|&v| float(v)));
        w.write_record(&rec)?;
    }
    w.flush()
        .map_err(|e| crate::error::CliError::io("<csv>", e))?;
    Ok(())
}
