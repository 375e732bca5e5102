//! CSV writers for run records, tables and convergence sweeps.
//!
//! Numeric columns are written with full precision (`{:.16e}`); table files
//! also carry rounded display columns.

use std::io::{self, Write};

use crate::experiments::{RunRecord, SweepLevel, TableRow};

fn opt(v: Option<f64>) -> String {
    v.map(|e| format!("{e:.16e}")).unwrap_or_default()
}

/// Time series: one line per step.
pub fn write_series<W: Write>(mut out: W, record: &RunRecord) -> io::Result<()> {
    writeln!(out, "t,mass,mass_drift,energy,energy_drift,L2_err,Linf_err,cubic_energy,max_u")?;
    let first = record.initial();
    for r in &record.rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e}",
            r.t,
            r.mass,
            r.mass - first.mass,
            r.energy,
            r.energy - first.energy,
            opt(r.l2_error),
            opt(r.linf_error),
            r.cubic_energy,
            r.max_u
        )?;
    }
    Ok(())
}

/// One file per snapshot: `x,u`.
pub fn write_snapshot<W: Write>(mut out: W, x: &[f64], u: &[f64]) -> io::Result<()> {
    writeln!(out, "x,u")?;
    for (xj, uj) in x.iter().zip(u) {
        writeln!(out, "{xj:.16e},{uj:.16e}")?;
    }
    Ok(())
}

pub fn write_table<W: Write>(mut out: W, rows: &[TableRow]) -> io::Result<()> {
    writeln!(out, "t,mass,energy,L2_err,Linf_err,mass_display,energy_display,L2_display,Linf_display")?;
    for r in rows {
        let disp = |v: Option<f64>| v.map(|e| format!("{e:.3e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{:.16e},{:.16e},{},{},{:.5},{:.5},{},{}",
            r.t,
            r.mass,
            r.energy,
            opt(r.l2),
            opt(r.linf),
            r.mass,
            r.energy,
            disp(r.l2),
            disp(r.linf)
        )?;
    }
    Ok(())
}

pub fn write_sweep<W: Write>(mut out: W, levels: &[SweepLevel]) -> io::Result<()> {
    writeln!(out, "h,tau,L2_err,Linf_err,order_L2,order_Linf")?;
    for l in levels {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{},{}",
            l.h,
            l.tau,
            l.l2,
            l.linf,
            l.order_l2.map(|o| format!("{o:.6}")).unwrap_or_default(),
            l.order_linf.map(|o| format!("{o:.6}")).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Time formatted for use in a file name.
pub fn time_label(t: f64) -> String {
    let s = format!("{t}");
    s.replace('-', "m")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_display_columns() {
        let rows = vec![TableRow {
            t: 4.0,
            mass: 3.979927101,
            energy: 0.4298345,
            l2: Some(8.2905e-5),
            linf: Some(3.3571e-5),
        }];
        let mut buf = Vec::new();
        write_table(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert!(line.starts_with("4,3.97992710"));
        assert!(line.ends_with("3.97993,0.42983,8.291e-5,3.357e-5"), "{line}");
    }

    #[test]
    fn sweep_leaves_first_order_blank() {
        let levels = vec![SweepLevel {
            h: 0.2,
            tau: 0.2,
            l2: 1e-3,
            linf: 5e-4,
            order_l2: None,
            order_linf: None,
        }];
        let mut buf = Vec::new();
        write_sweep(&mut buf, &levels).unwrap();
        assert!(String::from_utf8(buf).unwrap().lines().nth(1).unwrap().ends_with(",,"));
    }

    #[test]
    fn labels() {
        assert_eq!(time_label(40.0), "40");
        assert_eq!(time_label(12.5), "12.5");
    }
}
