//! CSV table and JSON jump log for a solution.
//!
//! CSV columns: `t, re_phi, im_phi, re_psi_1, im_psi_1, …`; at an atom the left-limit row
//! comes first. JSON complex numbers are `{"re": …, "im": …}`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::solve::RiccatiSolution;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
struct JumpJson {
    t: f64,
    dphi: JsonComplex,
    dpsi: Vec<JsonComplex>,
}

pub fn csv_header(d: usize) -> Vec<String> {
    let mut h = vec!["t".to_string(), "re_phi".into(), "im_phi".into()];
    for k in 1..=d {
        h.push(format!("re_psi_{k}"));
        h.push(format!("im_psi_{k}"));
    }
    h
}

pub fn write_csv<W: Write>(sol: &RiccatiSolution, w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(csv_header(sol.u.len()))?;
    for n in sol.trajectory.nodes() {
        let mut row = vec![n.t.to_string()];
        for z in &n.y {
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        wr.write_record(row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn jump_log_json(sol: &RiccatiSolution) -> serde_json::Value {
    let log: Vec<JumpJson> = sol
        .jump_log
        .iter()
        .map(|j| JumpJson { t: j.t, dphi: j.dphi.into(), dpsi: j.dpsi.iter().map(|z| (*z).into()).collect() })
        .collect();
    serde_json::json!({ "T": sol.t_terminal, "u": sol.u.iter().map(|z| JsonComplex::from(*z)).collect::<Vec<_>>(), "jump_log": log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::solve_backward;
    use ajk_lk::{AffineParameterSet, GammaSpec, StateSpaceShape};
    use ajk_measure::DriverMeasure;

    #[test]
    fn csv_and_json_shapes() {
        let a = DriverMeasure::lebesgue_with_atoms(1.0, &[(0.5, 1.0)]).unwrap();
        let p = AffineParameterSet::zero(StateSpaceShape::new(0, 1).unwrap(), a)
            .with_gamma(0.5, GammaSpec::black_box(|u: &[Complex64]| Ok((u[0] * u[0], vec![Complex64::new(0.0, 0.0)]))));
        let sol = solve_backward(&p, 1.0, &[Complex64::new(0.0, 1.0)]).unwrap();
        let mut buf = Vec::new();
        write_csv(&sol, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,re_phi,im_phi,re_psi_1,im_psi_1");
        assert_eq!(text.lines().filter(|l| l.starts_with("0.5,")).count(), 2);
        let j = jump_log_json(&sol);
        assert_eq!(j["jump_log"][0]["t"], 0.5);
        assert_eq!(j["jump_log"][0]["dphi"]["re"], 1.0);
    }
}
