//! Dense-tensor layer primitives for the embedding network.
//!
//! Every operation comes as a forward/backward pair over [`FeatureMap`]s in
//! double precision. The azimuth axis is cyclic throughout: index arithmetic
//! on it is always modulo `azimuth_len`, which is what gives the convolution
//! stack its exact shift equivariance.

mod blur;
mod conv;
mod gradcheck;
mod norm;
mod pool;

pub use blur::{blurpool, blurpool_backward, gaussian_taps};
pub use conv::{conv2d, conv2d_backward, conv2d_cylindrical, conv2d_cylindrical_backward};
pub use gradcheck::{finite_diff_check, finite_diff_loss_check, GradCheckReport};
pub use norm::{l2_normalize, l2_normalize_backward, relu, relu_backward};
pub use pool::{maxpool2d, maxpool2d_backward, maxpool_cylindrical, maxpool_cylindrical_backward};

use crate::error::{Error, Result};

/// Padding behaviour for the azimuth axis of a convolution.
///
/// The range axis is always zero-padded; it has true physical boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadMode {
    /// Wrap around: the polar scan has no boundary along azimuth.
    Circular,
    /// Conventional zero padding (the baseline, non-invariant variant).
    Zero,
}

/// A real-valued activation grid indexed `(azimuth, range, channel)`.
///
/// Data is stored row-major with the channel axis contiguous, so a single
/// spatial position is one contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    data: Vec<f64>,
    azimuth_len: usize,
    range_len: usize,
    channels: usize,
}

impl FeatureMap {
    pub fn zeros(azimuth_len: usize, range_len: usize, channels: usize) -> Self {
        FeatureMap {
            data: vec![0.0; azimuth_len * range_len * channels],
            azimuth_len,
            range_len,
            channels,
        }
    }

    pub fn from_vec(
        data: Vec<f64>,
        azimuth_len: usize,
        range_len: usize,
        channels: usize,
    ) -> Result<Self> {
        if data.len() != azimuth_len * range_len * channels {
            return Err(Error::Config(format!(
                "feature map data length {} does not match shape {}x{}x{}",
                data.len(),
                azimuth_len,
                range_len,
                channels
            )));
        }
        Ok(FeatureMap {
            data,
            azimuth_len,
            range_len,
            channels,
        })
    }

    pub fn from_fn(
        azimuth_len: usize,
        range_len: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut map = FeatureMap::zeros(azimuth_len, range_len, channels);
        for a in 0..azimuth_len {
            for r in 0..range_len {
                for c in 0..channels {
                    map.data[(a * range_len + r) * channels + c] = f(a, r, c);
                }
            }
        }
        map
    }

    pub fn azimuth_len(&self) -> usize {
        self.azimuth_len
    }

    pub fn range_len(&self) -> usize {
        self.range_len
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.azimuth_len, self.range_len, self.channels)
    }

    #[inline]
    pub fn at(&self, a: usize, r: usize, c: usize) -> f64 {
        self.data[(a * self.range_len + r) * self.channels + c]
    }

    #[inline]
    pub fn at_mut(&mut self, a: usize, r: usize, c: usize) -> &mut f64 {
        &mut self.data[(a * self.range_len + r) * self.channels + c]
    }

    /// All channels of one spatial position as a contiguous slice.
    #[inline]
    pub fn pixel(&self, a: usize, r: usize) -> &[f64] {
        let base = (a * self.range_len + r) * self.channels;
        &self.data[base..base + self.channels]
    }

    #[inline]
    pub fn pixel_mut(&mut self, a: usize, r: usize) -> &mut [f64] {
        let base = (a * self.range_len + r) * self.channels;
        &mut self.data[base..base + self.channels]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Cyclic shift along azimuth: output row `a` is input row `(a - shift) mod A`.
    pub fn roll_azimuth(&self, shift: i64) -> FeatureMap {
        let a_len = self.azimuth_len as i64;
        let row = self.range_len * self.channels;
        let mut out = FeatureMap::zeros(self.azimuth_len, self.range_len, self.channels);
        for a in 0..self.azimuth_len {
            let src = (a as i64 - shift).rem_euclid(a_len) as usize;
            out.data[a * row..(a + 1) * row].copy_from_slice(&self.data[src * row..(src + 1) * row]);
        }
        out
    }

    /// Errors with the offending layer name if any entry is NaN or infinite.
    pub fn check_finite(&self, layer: &str) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numeric(format!(
                "non-finite activation in layer {layer}"
            )))
        }
    }
}

/// Convolution weights: a 4-D grid `(k_a, k_r, c_in, c_out)` plus a bias per
/// output channel. Window sizes must be odd so padding is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvKernel {
    weights: Vec<f64>,
    bias: Vec<f64>,
    k_a: usize,
    k_r: usize,
    c_in: usize,
    c_out: usize,
}

impl ConvKernel {
    pub fn zeros(k_a: usize, k_r: usize, c_in: usize, c_out: usize) -> Result<Self> {
        if k_a % 2 == 0 || k_r % 2 == 0 {
            return Err(Error::Config(format!(
                "kernel window {k_a}x{k_r} must be odd in both axes"
            )));
        }
        if k_a == 0 || k_r == 0 || c_in == 0 || c_out == 0 {
            return Err(Error::Config("kernel has a zero-sized axis".into()));
        }
        Ok(ConvKernel {
            weights: vec![0.0; k_a * k_r * c_in * c_out],
            bias: vec![0.0; c_out],
            k_a,
            k_r,
            c_in,
            c_out,
        })
    }

    pub fn from_parts(
        weights: Vec<f64>,
        bias: Vec<f64>,
        k_a: usize,
        k_r: usize,
        c_in: usize,
        c_out: usize,
    ) -> Result<Self> {
        let mut kernel = ConvKernel::zeros(k_a, k_r, c_in, c_out)?;
        if weights.len() != kernel.weights.len() {
            return Err(Error::Config(format!(
                "kernel weight length {} does not match {k_a}x{k_r}x{c_in}x{c_out}",
                weights.len()
            )));
        }
        if bias.len() != c_out {
            return Err(Error::Config(format!(
                "kernel bias length {} does not match {c_out} output channels",
                bias.len()
            )));
        }
        kernel.weights = weights;
        kernel.bias = bias;
        Ok(kernel)
    }

    pub fn k_a(&self) -> usize {
        self.k_a
    }

    pub fn k_r(&self) -> usize {
        self.k_r
    }

    pub fn c_in(&self) -> usize {
        self.c_in
    }

    pub fn c_out(&self) -> usize {
        self.c_out
    }

    #[inline]
    pub fn weight(&self, ka: usize, kr: usize, ci: usize, co: usize) -> f64 {
        self.weights[((ka * self.k_r + kr) * self.c_in + ci) * self.c_out + co]
    }

    #[inline]
    pub fn weight_mut(&mut self, ka: usize, kr: usize, ci: usize, co: usize) -> &mut f64 {
        &mut self.weights[((ka * self.k_r + kr) * self.c_in + ci) * self.c_out + co]
    }

    /// The `c_out`-long weight row for one `(ka, kr, ci)` tap.
    #[inline]
    pub(crate) fn tap_row(&self, ka: usize, kr: usize, ci: usize) -> &[f64] {
        let base = ((ka * self.k_r + kr) * self.c_in + ci) * self.c_out;
        &self.weights[base..base + self.c_out]
    }

    #[inline]
    pub(crate) fn tap_row_mut(&mut self, ka: usize, kr: usize, ci: usize) -> &mut [f64] {
        let base = ((ka * self.k_r + kr) * self.c_in + ci) * self.c_out;
        &mut self.weights[base..base + self.c_out]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }
}

pub(crate) fn div_ceil(n: usize, d: usize) -> usize {
    n.div_ceil(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roll_azimuth_moves_rows() {
        let m = FeatureMap::from_fn(4, 2, 1, |a, r, _| (a * 10 + r) as f64);
        let rolled = m.roll_azimuth(1);
        // output row 1 is input row 0
        assert_eq!(rolled.at(1, 0, 0), m.at(0, 0, 0));
        assert_eq!(rolled.at(0, 1, 0), m.at(3, 1, 0));
        // rolling by the full azimuth length is the identity
        assert_eq!(m.roll_azimuth(4), m);
        assert_eq!(m.roll_azimuth(-4), m);
    }

    #[test]
    fn even_kernel_window_rejected() {
        assert!(matches!(
            ConvKernel::zeros(2, 3, 1, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ConvKernel::zeros(3, 4, 1, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn check_finite_names_layer() {
        let mut m = FeatureMap::zeros(2, 2, 1);
        m.check_finite("conv1").unwrap();
        *m.at_mut(0, 1, 0) = f64::NAN;
        let err = m.check_finite("conv1").unwrap_err();
        assert!(err.to_string().contains("conv1"));
    }
}
