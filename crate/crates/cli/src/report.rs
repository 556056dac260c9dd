//! CSV tables of the closed-form staleness and coverage results.

use callroute_core::analysis::{
    expected_state_changes, nn_delay, ptc_delay, ptc_fresher_periodic, DelayParams, StateDwellSpec,
};

use crate::error::{CliError, Result};

/// Parses `7`, `1,2,5` or an inclusive range `3..50`.
pub fn parse_values(s: &str) -> Result<Vec<u64>> {
    let bad = || CliError::Config(format!("bad value list `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

pub fn delay_table(ks: &[u64], tcs: &[u64], dts: &[u64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "t_c", "dt", "nn_delay", "ptc_delay", "ptc_fresher"])?;
    for &k in ks {
        for &t_c in tcs {
            for &dt in dts {
                let p = DelayParams::new(t_c, dt, k)?;
                w.write_record([
                    k.to_string(),
                    t_c.to_string(),
                    dt.to_string(),
                    nn_delay(p).to_string(),
                    ptc_delay(p).to_string(),
                    ptc_fresher_periodic(p).to_string(),
                ])?;
            }
        }
    }
    finish(w)
}

pub fn coverage_table(durations: &[u64], t_ds: &[u64], hs: &[u64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t_d", "h", "fraction", "value"])?;
    for &t_d in t_ds {
        let spec = StateDwellSpec::new(durations.to_vec(), t_d)?;
        for &h in hs {
            let r = expected_state_changes(&spec, h as usize)?;
            w.write_record([t_d.to_string(), h.to_string(), r.to_string(), crate::fmt::sig6(r.to_f64())])?;
        }
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}
