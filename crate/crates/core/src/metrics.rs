use crate::channel::ChannelVector;
use crate::error::{Error, Result};

/// ‖h − ĥ‖²/‖h‖² for a single sample.
pub fn nmse(h: &ChannelVector, h_hat: &ChannelVector) -> Result<f64> {
    if h.len() != h_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: h.len(),
            actual: h_hat.len(),
        });
    }
    let denom = h.norm_squared();
    if denom == 0.0 {
        return Err(Error::ZeroChannel);
    }
    Ok((h - h_hat).norm_squared() / denom)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
