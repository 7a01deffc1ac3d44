use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Two-sided Student's t critical value: the `t` with P(|T| ≤ t) = `confidence`
/// for `df` degrees of freedom.
///
/// Uses P(|T| > t) = I_x(df/2, 1/2) with x = df/(df + t²) and solves for x by
/// bisection on the regularized incomplete beta function.
pub fn t_value(confidence: f64, df: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParam(format!("confidence {confidence} not in (0,1)")));
    }
    if !(df >= 1.0 && df.is_finite()) {
        return Err(Error::InvalidParam(format!("degrees of freedom {df} must be >= 1")));
    }
    let tail = 1.0 - confidence;
    let a = df / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, 0.5, mid) < tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((df * (1.0 - x) / x).sqrt())
}
