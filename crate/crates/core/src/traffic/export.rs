//! CSV and JSON renderings of a [`TrafficReport`].

use super::{CoreMatrix, QubitLoad, Raster, Summary, TrafficReport, VerticalSeries};

/// File names written by `analyze`, in output order.
pub const CSV_FILES: [&str; 5] = [
    "core_matrix.csv",
    "per_qubit.csv",
    "raster.csv",
    "vertical.csv",
    "summary.csv",
];

fn render<F>(header: &[&str], fill: F) -> String
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .and_then(|_| fill(&mut w))
        .expect("writing to memory cannot fail");
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// Every ordered pair, zeros included.
pub fn core_matrix_csv(m: &CoreMatrix) -> String {
    render(&["src", "dst", "count"], |w| {
        for src in 0..m.n_cores() {
            for dst in 0..m.n_cores() {
                w.serialize((src, dst, m.get(src, dst)))?;
            }
        }
        Ok(())
    })
}

pub fn per_qubit_csv(loads: &[QubitLoad]) -> String {
    render(&["vqubit", "teleports", "intra_ops"], |w| {
        for (v, l) in loads.iter().enumerate() {
            w.serialize((v, l.teleports, l.intra_ops))?;
        }
        Ok(())
    })
}

pub fn raster_csv(r: &Raster) -> String {
    render(&["timestep", "pqubit", "state"], |w| {
        for t in 0..r.depth() {
            for (p, a) in r.row(t).iter().enumerate() {
                w.serialize((t, p, a.code()))?;
            }
        }
        Ok(())
    })
}

pub fn vertical_csv(v: &VerticalSeries) -> String {
    render(&["timestep", "control_bits", "readout_bps"], |w| {
        for (t, (c, r)) in v.control_bits.iter().zip(&v.readout_bps).enumerate() {
            w.serialize((t, c, r))?;
        }
        Ok(())
    })
}

pub fn summary_csv(s: &Summary) -> String {
    render(&["metric", "value"], |w| {
        w.serialize(("depth", s.depth))?;
        w.serialize(("gate_ops", s.gate_ops))?;
        w.serialize(("total_swaps", s.total_swaps))?;
        w.serialize(("total_teleports", s.total_teleports))?;
        w.serialize(("comm_ratio", s.comm_ratio))?;
        w.serialize(("load_cov", s.load_cov))?;
        Ok(())
    })
}

/// Pretty-printed JSON of every analysis.
pub fn report_json(report: &TrafficReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::Activity;

    #[test]
    fn matrix_lists_every_pair() {
        let m = CoreMatrix {
            n_cores: 2,
            counts: vec![0, 1, 0, 0],
        };
        assert_eq!(
            core_matrix_csv(&m),
            "src,dst,count\n0,0,0\n0,1,1\n1,0,0\n1,1,0\n"
        );
    }

    #[test]
    fn raster_codes() {
        let r = Raster {
            depth: 1,
            n_qubits: 3,
            cells: vec![Activity::Compute, Activity::Idle, Activity::Communicate],
        };
        assert_eq!(
            raster_csv(&r),
            "timestep,pqubit,state\n0,0,C\n0,1,I\n0,2,M\n"
        );
    }

    #[test]
    fn summary_rows() {
        let s = Summary {
            depth: 2,
            gate_ops: 1,
            total_swaps: 0,
            total_teleports: 1,
            comm_ratio: 0.5,
            load_cov: 0.0,
        };
        let text = summary_csv(&s);
        assert!(text.starts_with("metric,value\ndepth,2\n"));
        assert!(text.contains("comm_ratio,0.5\n"));
    }

    #[test]
    fn empty_series_has_header_only() {
        let v = VerticalSeries {
            control_bits: vec![],
            readout_bps: vec![],
            peak_control_bits: 0,
            peak_readout_bps: 0,
            readout_rate: 1,
        };
        assert_eq!(vertical_csv(&v), "timestep,control_bits,readout_bps\n");
        assert_eq!(per_qubit_csv(&[]), "vqubit,teleports,intra_ops\n");
    }
}
