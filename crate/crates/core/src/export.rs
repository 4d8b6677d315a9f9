//! CSV export of trajectories and marginal series, plus the atomic-write
//! helper all artifacts go through.

use crate::dynamics::{Controls, Trajectory};
use crate::error::RunError;
use crate::marginals::MarginalSeries;
use std::path::Path;

/// First model year is 2015: year(t) = 2010 + 5t for 1-based t.
pub fn year(t: usize) -> i64 {
    2010 + 5 * t as i64
}

/// 17-significant-digit decimal rendering; round-trips any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write bytes via a temp file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io_err = |source: std::io::Error| RunError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

pub const TRAJECTORY_HEADER: &str =
    "year,s,mu,Q,C,c,I,K,E_ind,E,M_AT,M_UP,M_LO,F,T_AT,T_LO,Omega,Lambda,U,R";

/// Render a trajectory as CSV with the fixed column order.
pub fn trajectory_csv(u: &Controls, tr: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for i in 0..tr.q.len() {
        let cols = [
            u.s[i], u.mu[i], tr.q[i], tr.cons[i], tr.c[i], tr.inv[i], tr.k[i], tr.e_ind[i],
            tr.e[i], tr.m_at[i], tr.m_up[i], tr.m_lo[i], tr.f[i], tr.t_at[i], tr.t_lo[i],
            tr.omega[i], tr.lambda[i], tr.u[i], tr.r[i],
        ];
        out.push_str(&year(i + 1).to_string());
        for v in cols {
            out.push(',');
            out.push_str(&fmt17(v));
        }
        out.push('\n');
    }
    out
}

pub const MARGINALS_HEADER: &str = "year,eeq_m,cc_m,scc,smac,scc_over_smac";

/// Render a marginal series as CSV.
pub fn marginals_csv(m: &MarginalSeries) -> String {
    let mut out = String::from(MARGINALS_HEADER);
    out.push('\n');
    let ratio = m.scc_over_smac();
    for i in 0..m.scc.len() {
        let cols = [m.eeq_m[i], m.cc_m[i], m.scc[i], m.smac[i], ratio[i]];
        out.push_str(&year(i + 1).to_string());
        for v in cols {
            out.push(',');
            out.push_str(&fmt17(v));
        }
        out.push('\n');
    }
    out
}

/// Parse a marginals CSV written by [`marginals_csv`] back into
/// (year, scc, smac, ratio) rows — used by the `compare` report.
pub fn parse_marginals_csv(text: &str) -> Result<Vec<(i64, f64, f64, f64)>, RunError> {
    let mut rows = Vec::new();
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == MARGINALS_HEADER => {}
        other => {
            return Err(RunError::Config(format!(
                "unexpected marginals CSV header: {other:?}"
            )))
        }
    }
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 6 {
            return Err(RunError::Config(format!(
                "marginals CSV row {} has {} cells, expected 6",
                i + 2,
                cells.len()
            )));
        }
        let num = |s: &str| -> Result<f64, RunError> {
            s.parse()
                .map_err(|_| RunError::Config(format!("bad number `{s}` in marginals CSV")))
        };
        let yr: i64 = cells[0]
            .parse()
            .map_err(|_| RunError::Config(format!("bad year `{}`", cells[0])))?;
        rows.push((yr, num(cells[3])?, num(cells[4])?, num(cells[5])?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::simulate;
    use crate::testdata;

    #[test]
    fn fmt17_round_trips() {
        for x in [
            0.1,
            -158.8971460257157,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            1e300,
        ] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn trajectory_csv_shape() {
        let p = testdata::desk();
        let u = Controls::new(vec![0.2; p.t_max], vec![0.1; p.t_max]);
        let tr = simulate(&p, &u, &[]).unwrap();
        let csv = trajectory_csv(&u, &tr);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), p.t_max + 1);
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert!(lines[1].starts_with("2015,"));
        assert!(lines[20].starts_with("2110,"));
        assert_eq!(lines[1].split(',').count(), 20);
    }

    #[test]
    fn marginals_csv_round_trips_through_parser() {
        let m = MarginalSeries {
            eeq_m: vec![-2e-4, -1e-4],
            cc_m: vec![0.1, 0.05],
            scc: vec![2.0, 10.0],
            smac: vec![2.0, 8.0],
        };
        let rows = parse_marginals_csv(&marginals_csv(&m)).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], (2015, 2.0, 2.0, 1.0));
        assert_eq!(rows[1].0, 2020);
        assert_eq!(rows[1].3, 1.25);
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_atomic(&path, b"hello").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"hello");
        let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(entries.len(), 1);
    }
}
