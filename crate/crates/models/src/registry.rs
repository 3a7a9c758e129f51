//! Catalog lookup by name with `key = value` parameters.

use std::collections::BTreeMap;

use ajk_lk::StateSpaceShape;
use ajk_measure::{Error, Result};

use crate::*;

/// Parameter values by key; list-valued keys (schedules, jump times) hold several entries.
pub type ModelArgs = BTreeMap<String, Vec<f64>>;

pub fn catalog_names() -> &'static [&'static str] {
    &[
        "zero",
        "poisson",
        "poisson-normal-jump",
        "discrete-poisson",
        "vasicek",
        "discontinuous-vasicek",
        "vasicek-hjm",
        "cir",
        "ar1",
    ]
}

struct Args<'a> {
    map: &'a ModelArgs,
    used: Vec<&'static str>,
}

impl Args<'_> {
    fn scalar(&mut self, key: &'static str, default: f64) -> Result<f64> {
        self.used.push(key);
        match self.map.get(key).map(Vec::as_slice) {
            None => Ok(default),
            Some([v]) => Ok(*v),
            Some(_) => Err(Error::InvalidParameter(format!("'{key}' takes a single value"))),
        }
    }

    fn list(&mut self, key: &'static str, default: Vec<f64>) -> Vec<f64> {
        self.used.push(key);
        self.map.get(key).cloned().unwrap_or(default)
    }

    fn finish(&self, name: &str) -> Result<()> {
        match self.map.keys().find(|k| !self.used.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidParameter(format!("model '{name}' has no parameter '{k}'"))),
            None => Ok(()),
        }
    }
}

fn steps(horizon: f64) -> usize {
    (horizon.floor() as usize).max(1)
}

/// Builds a catalog model on `[0, horizon]`. Discrete models get `floor(horizon)` steps unless a
/// schedule is given.
pub fn from_name(name: &str, args: &ModelArgs, horizon: f64) -> Result<ModelSpec> {
    let mut a = Args { map: args, used: Vec::new() };
    let spec = match name {
        "zero" => {
            let m = a.scalar("m", 0.0)? as usize;
            let n = a.scalar("n", 1.0)? as usize;
            zero(StateSpaceShape::new(m, n)?, horizon)?
        }
        "poisson" => poisson(a.scalar("lambda", 1.0)?, horizon)?,
        "poisson-normal-jump" => {
            poisson_with_normal_jump(a.scalar("lambda", 1.0)?, a.scalar("tau", 0.5 * horizon)?, horizon)?
        }
        "discrete-poisson" => discrete_poisson(&a.list("p", vec![0.5; steps(horizon)]))?,
        "vasicek" => vasicek(a.scalar("alpha", 0.01)?, a.scalar("beta", -0.5)?, a.scalar("sigma", 0.2)?, horizon)?,
        "discontinuous-vasicek" => discontinuous_vasicek(
            a.scalar("alpha", 0.01)?,
            a.scalar("beta", -0.5)?,
            a.scalar("sigma", 0.2)?,
            a.scalar("gamma", 0.1)?,
            &a.list("jumps", vec![0.5 * horizon]),
            horizon,
        )?,
        "vasicek-hjm" => vasicek_hjm_state(
            a.scalar("alpha", 0.01)?,
            a.scalar("beta", -0.5)?,
            a.scalar("sigma", 0.2)?,
            a.scalar("gamma", 0.0)?,
            &a.list("jumps", Vec::new()),
            horizon,
        )?,
        "cir" => cir_type(a.scalar("kappa", 0.9)?, a.scalar("sigma", 0.3)?, a.scalar("a0", 0.1)?, horizon)?,
        "ar1" => ar1_gaussian(&a.list("alpha", vec![0.5; steps(horizon)]), a.scalar("sigma", 1.0)?)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown model '{other}' (known: {})",
                catalog_names().join(", ")
            )))
        }
    };
    a.finish(name)?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_builds_with_defaults() {
        for name in catalog_names() {
            let m = from_name(name, &ModelArgs::new(), 4.0).unwrap();
            assert_eq!(&m.name, name);
        }
    }

    #[test]
    fn unknown_keys_and_names_are_rejected() {
        let mut args = ModelArgs::new();
        args.insert("lambda".into(), vec![2.0]);
        assert!(from_name("vasicek", &args, 1.0).is_err());
        assert!(from_name("poisson", &args, 1.0).is_ok());
        assert!(from_name("nope", &ModelArgs::new(), 1.0).is_err());
    }
}
