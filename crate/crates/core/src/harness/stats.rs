use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    /// Population standard deviation (divisor `n`).
    pub sd: f64,
    pub bias: f64,
    pub rmse: f64,
}

/// Mean, population SD, bias and RMSE against `theoretical`.
pub fn stats(values: &[f64], theoretical: f64) -> Result<Stats> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no values to summarize".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let rmse = (values
        .iter()
        .map(|v| (v - theoretical).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(Stats {
        mean,
        sd,
        bias: mean - theoretical,
        rmse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_cases() {
        assert_eq!(
            stats(&[2.0, 2.0, 2.0], 2.0).unwrap(),
            Stats {
                mean: 2.0,
                sd: 0.0,
                bias: 0.0,
                rmse: 0.0
            }
        );
        assert_eq!(
            stats(&[1.0, 3.0], 2.0).unwrap(),
            Stats {
                mean: 2.0,
                sd: 1.0,
                bias: 0.0,
                rmse: 1.0
            }
        );
        let s = stats(&[1.7], 2.0).unwrap();
        assert_eq!(s.sd, 0.0);
        assert!((s.rmse - s.bias.abs()).abs() < 1e-15);
        assert!(stats(&[], 0.0).is_err());
    }
}
