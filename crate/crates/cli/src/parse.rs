//! Parsers for complex numbers, lists and `key=value` parameter strings.

use ajk_models::ModelArgs;
use num_complex::Complex64;

use crate::CliError;

/// `a+bi`, `a-bi`, `bi`, `a`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    t.parse::<Complex64>().map_err(|_| CliError::Config(format!("cannot parse '{s}' as a complex number a+bi")))
}

/// Comma-separated complex components.
pub fn parse_complex_vec(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(',').map(parse_complex).collect()
}

/// Numbers separated by ':' or ','; the empty string is the empty list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split([':', ','])
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<f64>().map_err(|_| CliError::Config(format!("cannot parse '{x}' as a number"))))
        .collect()
}

/// `k=v,k=v` with list values written `v1:v2:…`.
pub fn parse_params(s: &str, into: &mut ModelArgs) -> Result<(), CliError> {
    for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("parameter '{pair}' is not key=value")))?;
        let values = v
            .split(':')
            .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Config(format!("cannot parse '{x}' in '{pair}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        into.insert(k.trim().to_string(), values);
    }
    Ok(())
}
