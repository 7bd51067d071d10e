use serde_json::Value;
use zkb_core::constants_for_width;

use crate::config::parse_real;
use crate::error::{HarnessError, Result};
use crate::run::constants_json;

/// Decay constants for the strip width given as a `pi`-expression.
pub fn constants(width: &str) -> Result<Value> {
    let b = parse_real(width)
        .ok_or_else(|| HarnessError::Usage(format!("--B: not a number: {width:?}")))?;
    Ok(constants_json(&constants_for_width(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_pi() {
        let v = constants("pi").unwrap();
        assert!((v["b_star"].as_f64().unwrap() - 0.1).abs() < 1e-15);
        assert!((v["chi"].as_f64().unwrap() - 0.025).abs() < 1e-15);
        assert!((v["reg_threshold"].as_f64().unwrap() - 0.375).abs() < 1e-15);
        assert!((v["weak_threshold"].as_f64().unwrap() - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn half_pi() {
        let v = constants("pi/2").unwrap();
        assert!((v["b_star"].as_f64().unwrap() - 0.289898).abs() < 1e-6);
    }

    #[test]
    fn bad_width() {
        assert_eq!(constants("-1").unwrap_err().exit(), crate::error::Exit::Usage);
        assert!(constants("wide").is_err());
    }
}
