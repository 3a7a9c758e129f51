//! Deterministic scalar functions of time used for parameters.
//!
//! JSON forms: a number (constant), an array of coefficients (polynomial in absolute
//! time), or `{"breaks": [...], "pieces": [[...], ...]}` where piece `k` applies on
//! `[breaks[k], breaks[k+1])` and the last piece extends to the right.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeFn {
    Const(f64),
    Poly(Vec<f64>),
    Piecewise { breaks: Vec<f64>, pieces: Vec<Vec<f64>> },
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, x| acc * t + x)
}

impl TimeFn {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFn::Const(c) => *c,
            TimeFn::Poly(c) => horner(c, t),
            TimeFn::Piecewise { breaks, pieces } => {
                let k = breaks.partition_point(|b| *b <= t).saturating_sub(1).min(pieces.len().saturating_sub(1));
                pieces.get(k).map(|c| horner(c, t)).unwrap_or(0.0)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TimeFn::Const(c) => *c == 0.0,
            TimeFn::Poly(c) => c.iter().all(|x| *x == 0.0),
            TimeFn::Piecewise { pieces, .. } => pieces.iter().flatten().all(|x| *x == 0.0),
        }
    }

    /// Interior break points, for sampling.
    pub fn breaks(&self) -> &[f64] {
        match self {
            TimeFn::Piecewise { breaks, .. } => breaks,
            _ => &[],
        }
    }
}

impl From<f64> for TimeFn {
    fn from(c: f64) -> Self {
        TimeFn::Const(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let c: TimeFn = serde_json::from_str("2.5").unwrap();
        assert_eq!(c.eval(7.0), 2.5);
        let p: TimeFn = serde_json::from_str("[1, 0, 2]").unwrap();
        assert_eq!(p.eval(3.0), 19.0);
        let pw: TimeFn = serde_json::from_str(r#"{"breaks":[0,1],"pieces":[[1],[0,1]]}"#).unwrap();
        assert_eq!(pw.eval(0.5), 1.0);
        assert_eq!(pw.eval(2.0), 2.0);
        assert_eq!(pw.eval(1.0), 1.0);
    }
}
