//! Report and CSV files. Everything written here is a pure function of the reports,
//! so equal configurations give byte-identical files.

use std::fs;
use std::io;
use std::path::Path;

use nodal_heat::bounds::{fmt_real, ExperimentReport, RunConfig, Table};
use nodal_heat::ScalarField;

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn write_table(path: &Path, table: &Table) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(&table.columns).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| fmt_real(*v))).map_err(csv_error)?;
    }
    w.flush()
}

/// One row per grid row, bottom to top; the header holds the x coordinates of the
/// cell centers and the first column the y coordinates.
pub fn write_field(path: &Path, field: &ScalarField) -> io::Result<()> {
    let g = field.grid;
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    let header = std::iter::once("y\\x".to_string()).chain((0..g.nx).map(|i| fmt_real(g.center(i, 0)[0])));
    w.write_record(header).map_err(csv_error)?;
    for j in 0..g.ny {
        let row = std::iter::once(fmt_real(g.center(0, j)[1])).chain((0..g.nx).map(|i| fmt_real(field.get(i, j))));
        w.write_record(row).map_err(csv_error)?;
    }
    w.flush()
}

pub fn write_report(dir: &Path, report: &ExperimentReport, emit_fields: bool) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.txt"), report.to_text())?;
    for t in &report.tables {
        write_table(&dir.join(format!("{}.csv", t.name)), t)?;
    }
    if emit_fields {
        for (name, f) in &report.fields {
            write_field(&dir.join(format!("field_{name}.csv")), f)?;
        }
    }
    Ok(())
}

/// Writes each report to `out/<name>/`, plus `out/suite.txt` when there are several.
pub fn write_all(reports: &[ExperimentReport], cfg: &RunConfig) -> io::Result<()> {
    fs::create_dir_all(&cfg.out)?;
    for r in reports {
        write_report(&cfg.out.join(&r.name), r, cfg.emit_fields)?;
    }
    if reports.len() > 1 {
        let mut s = String::new();
        for r in reports {
            s.push_str(&format!("{} = {}\n", r.name, r.verdict().as_str()));
        }
        let overall = if reports.iter().any(|r| r.verdict() == nodal_heat::bounds::Verdict::Fail) { "FAIL" } else { "PASS" };
        s.push_str(&format!("suite = {overall}\n"));
        fs::write(cfg.out.join("suite.txt"), s)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nodal_heat::GridSpec;

    #[test]
    fn tables_use_seventeen_digits() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("curve", &["t", "value"]);
        t.push(vec![0.1, 1.0 / 3.0]);
        let path = dir.path().join("curve.csv");
        write_table(&path, &t).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "t,value\n1.0000000000000001e-1,3.3333333333333331e-1\n");
    }

    #[test]
    fn fields_are_matrices() {
        let dir = tempfile::tempdir().unwrap();
        let f = ScalarField::from_fn(GridSpec::unit_torus(2), |p| p[0]);
        let path = dir.path().join("f.csv");
        write_field(&path, &f).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("y\\x,2.5"));
        assert_eq!(lines[1].split(',').count(), 3);
    }
}
