//! 16-bit encodings for the depth and optical-flow ground truth.
//!
//! Depth is stored in centimetres with a far plane at 655.35 m. Flow maps
//! `[-dim, +dim]` pixels linearly onto `[0, 65535]`, rounding half up.

use crate::error::{Error, Result};

pub const CODE_MAX: u16 = u16::MAX;
pub const DEPTH_FAR_PLANE_M: f64 = 655.35;
pub const DEPTH_STEP_M: f64 = 0.01;

pub fn depth_encode(d_m: f64) -> Result<u16> {
    if !(d_m >= 0.0) {
        return Err(Error::ParameterDomain(format!("depth must be >= 0, got {d_m}")));
    }
    Ok((d_m / DEPTH_STEP_M).round().min(CODE_MAX as f64) as u16)
}

pub fn depth_decode(code: u16) -> f64 {
    code as f64 * DEPTH_STEP_M
}

fn check_dimension(dimension_px: u32) -> Result<f64> {
    if dimension_px == 0 {
        return Err(Error::ParameterDomain("flow dimension must be positive".into()));
    }
    Ok(dimension_px as f64)
}

/// Encode one flow component `u` (pixels) for an image axis of
/// `dimension_px` pixels.
pub fn flow_encode(u: f64, dimension_px: u32) -> Result<u16> {
    let d = check_dimension(dimension_px)?;
    if !(u.abs() <= d) {
        return Err(Error::ParameterDomain(format!("flow {u} px outside [-{d}, {d}]")));
    }
    let scaled = (u + d) / (2.0 * d) * CODE_MAX as f64;
    Ok((scaled + 0.5).floor().min(CODE_MAX as f64) as u16)
}

pub fn flow_decode(code: u16, dimension_px: u32) -> Result<f64> {
    let d = check_dimension(dimension_px)?;
    Ok(code as f64 / CODE_MAX as f64 * 2.0 * d - d)
}

/// Largest decode error of [`flow_encode`]: half a quantization step.
pub fn flow_step_px(dimension_px: u32) -> f64 {
    2.0 * dimension_px as f64 / CODE_MAX as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_anchor_values() {
        assert_eq!(depth_encode(0.01).unwrap(), 1);
        assert_eq!(depth_encode(655.35).unwrap(), 65535);
        assert_eq!(depth_encode(700.0).unwrap(), 65535);
        assert_eq!(depth_encode(0.0).unwrap(), 0);
        assert!(depth_encode(-0.5).is_err());
        assert!(depth_encode(f64::NAN).is_err());
    }

    #[test]
    fn flow_anchor_values() {
        assert_eq!(flow_encode(0.0, 340).unwrap(), 32768);
        assert_eq!(flow_encode(340.0, 340).unwrap(), 65535);
        assert_eq!(flow_encode(-340.0, 340).unwrap(), 0);
        assert!(flow_encode(341.0, 340).is_err());
        assert!(flow_encode(1.0, 0).is_err());
    }

    #[test]
    fn flow_round_trip_within_half_step() {
        for dim in [256u32, 340] {
            for i in 0..=2000 {
                let u = -(dim as f64) + 2.0 * dim as f64 * i as f64 / 2000.0;
                let back = flow_decode(flow_encode(u, dim).unwrap(), dim).unwrap();
                assert!((back - u).abs() <= flow_step_px(dim) / 2.0 + 1e-9);
            }
        }
    }
}
