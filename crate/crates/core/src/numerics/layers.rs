//! Parameter-free layers of the encoder-decoder.

use super::{shape_err, NumericsError, Tensor};

fn check_same(a: &Tensor, b: &Tensor, what: &str) -> Result<(), NumericsError> {
    if a.same_shape(b) {
        Ok(())
    } else {
        shape_err(format!(
            "{what}: upstream {:?} does not match input {:?}",
            b.shape(),
            a.shape()
        ))
    }
}

pub fn relu_forward(input: &Tensor) -> Tensor {
    input.map(|v| if v > 0.0 { v } else { 0.0 })
}

/// Subgradient at 0 is 0.
pub fn relu_backward(input: &Tensor, upstream: &Tensor) -> Result<Tensor, NumericsError> {
    check_same(input, upstream, "relu")?;
    let data = input
        .data()
        .iter()
        .zip(upstream.data())
        .map(|(x, g)| if *x > 0.0 { *g } else { 0.0 })
        .collect();
    Tensor::new(input.channels(), input.height(), input.width(), data)
}

/// `ln(1 + e^x)`, returning `x` itself once `e^-x` is below double precision.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`softplus`] for `y > 0`.
pub fn softplus_inverse(y: f64) -> f64 {
    y + (-(-y).exp()).ln_1p()
}

pub fn softplus_forward(input: &Tensor) -> Tensor {
    input.map(softplus)
}

pub fn softplus_backward(input: &Tensor, upstream: &Tensor) -> Result<Tensor, NumericsError> {
    check_same(input, upstream, "softplus")?;
    let data = input
        .data()
        .iter()
        .zip(upstream.data())
        .map(|(x, g)| g * sigmoid(*x))
        .collect();
    Tensor::new(input.channels(), input.height(), input.width(), data)
}

/// 2x2 mean pooling. Odd sides are padded by replicating the last row or
/// column, so the output is `(c, ceil(h/2), ceil(w/2))`.
pub fn avgpool2_forward(input: &Tensor) -> Tensor {
    let (c, h, w) = input.shape();
    let (oh, ow) = (h.div_ceil(2), w.div_ceil(2));
    let mut out = Tensor::zeros(c, oh, ow);
    for ch in 0..c {
        let src = input.channel(ch);
        let dst = out.channel_mut(ch);
        for y in 0..oh {
            let (y0, y1) = (2 * y, (2 * y + 1).min(h - 1));
            for x in 0..ow {
                let (x0, x1) = (2 * x, (2 * x + 1).min(w - 1));
                dst[y * ow + x] = 0.25
                    * (src[y0 * w + x0] + src[y0 * w + x1] + src[y1 * w + x0] + src[y1 * w + x1]);
            }
        }
    }
    out
}

pub fn avgpool2_backward(input: &Tensor, upstream: &Tensor) -> Result<Tensor, NumericsError> {
    let (c, h, w) = input.shape();
    let (oh, ow) = (h.div_ceil(2), w.div_ceil(2));
    if upstream.shape() != (c, oh, ow) {
        return shape_err(format!(
            "avgpool2: upstream {:?}, expected ({c}, {oh}, {ow})",
            upstream.shape()
        ));
    }
    let mut grad = Tensor::zeros(c, h, w);
    for ch in 0..c {
        let g = upstream.channel(ch);
        let dst = grad.channel_mut(ch);
        for y in 0..oh {
            let (y0, y1) = (2 * y, (2 * y + 1).min(h - 1));
            for x in 0..ow {
                let (x0, x1) = (2 * x, (2 * x + 1).min(w - 1));
                let q = 0.25 * g[y * ow + x];
                dst[y0 * w + x0] += q;
                dst[y0 * w + x1] += q;
                dst[y1 * w + x0] += q;
                dst[y1 * w + x1] += q;
            }
        }
    }
    Ok(grad)
}

/// Nearest-neighbour upsampling to `(c, out_h, out_w)` where
/// `ceil(out_h / 2) == h` and `ceil(out_w / 2) == w`; this undoes the
/// padding of [`avgpool2_forward`] on odd sides.
pub fn upsample_nearest2_to(input: &Tensor, out_h: usize, out_w: usize) -> Result<Tensor, NumericsError> {
    let (c, h, w) = input.shape();
    if out_h.div_ceil(2) != h || out_w.div_ceil(2) != w {
        return shape_err(format!(
            "upsample: cannot map ({h}, {w}) onto ({out_h}, {out_w})"
        ));
    }
    let mut out = Tensor::zeros(c, out_h, out_w);
    for ch in 0..c {
        let src = input.channel(ch);
        let dst = out.channel_mut(ch);
        for y in 0..out_h {
            for x in 0..out_w {
                dst[y * out_w + x] = src[(y / 2) * w + x / 2];
            }
        }
    }
    Ok(out)
}

/// Doubles both spatial sides.
pub fn upsample_nearest2_forward(input: &Tensor) -> Tensor {
    upsample_nearest2_to(input, 2 * input.height(), 2 * input.width())
        .expect("doubling always matches")
}

/// Backward of [`upsample_nearest2_to`]; the output size is read from `upstream`.
pub fn upsample_nearest2_backward(input: &Tensor, upstream: &Tensor) -> Result<Tensor, NumericsError> {
    let (c, h, w) = input.shape();
    let (uc, uh, uw) = upstream.shape();
    if uc != c || uh.div_ceil(2) != h || uw.div_ceil(2) != w {
        return shape_err(format!(
            "upsample: upstream {:?} does not match input {:?}",
            upstream.shape(),
            input.shape()
        ));
    }
    let mut grad = Tensor::zeros(c, h, w);
    for ch in 0..c {
        let g = upstream.channel(ch);
        let dst = grad.channel_mut(ch);
        for y in 0..uh {
            for x in 0..uw {
                dst[(y / 2) * w + x / 2] += g[y * uw + x];
            }
        }
    }
    Ok(grad)
}

/// Stacks `b`'s channels after `a`'s.
pub fn concat_channels_forward(a: &Tensor, b: &Tensor) -> Result<Tensor, NumericsError> {
    if a.height() != b.height() || a.width() != b.width() {
        return shape_err(format!(
            "concat: spatial sizes differ, {:?} vs {:?}",
            a.shape(),
            b.shape()
        ));
    }
    let mut data = Vec::with_capacity(a.data().len() + b.data().len());
    data.extend_from_slice(a.data());
    data.extend_from_slice(b.data());
    Tensor::new(a.channels() + b.channels(), a.height(), a.width(), data)
}

/// Splits the gradient back into the `a` and `b` parts.
pub fn concat_channels_backward(
    a_channels: usize,
    upstream: &Tensor,
) -> Result<(Tensor, Tensor), NumericsError> {
    let (c, h, w) = upstream.shape();
    if a_channels > c {
        return shape_err(format!("concat: {a_channels} channels requested from {c}"));
    }
    let split = a_channels * h * w;
    let ga = Tensor::new(a_channels, h, w, upstream.data()[..split].to_vec())?;
    let gb = Tensor::new(c - a_channels, h, w, upstream.data()[split..].to_vec())?;
    Ok((ga, gb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_values() {
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(softplus(40.0), 40.0);
        assert!(softplus(-800.0) >= 0.0);
        assert!(softplus(-30.0) > 0.0);
        assert!((softplus(softplus_inverse(1.0)) - 1.0).abs() < 1e-12);
        assert!((softplus_inverse(1.0) - 0.5413).abs() < 1e-4);
    }

    #[test]
    fn relu_kink_subgradient_is_zero() {
        let x = Tensor::new(1, 1, 3, vec![-1.0, 0.0, 2.0]).unwrap();
        let g = relu_backward(&x, &Tensor::filled(1, 1, 3, 1.0)).unwrap();
        assert_eq!(g.data(), &[0.0, 0.0, 1.0]);
        assert_eq!(relu_forward(&x).data(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn pool_then_upsample_is_identity_on_constants() {
        for (h, w) in [(4, 6), (5, 7)] {
            let x = Tensor::filled(2, h, w, 3.25);
            let y = upsample_nearest2_to(&avgpool2_forward(&x), h, w).unwrap();
            assert_eq!(y, x);
        }
        let x = Tensor::filled(1, 4, 4, -2.0);
        assert_eq!(upsample_nearest2_forward(&avgpool2_forward(&x)), x);
    }

    #[test]
    fn odd_pooling_replicates_edges() {
        let x = Tensor::new(1, 1, 3, vec![1.0, 2.0, 4.0]).unwrap();
        let y = avgpool2_forward(&x);
        assert_eq!(y.shape(), (1, 1, 2));
        assert_eq!(y.data(), &[1.5, 4.0]);
    }

    #[test]
    fn shape_errors() {
        let a = Tensor::zeros(1, 4, 4);
        let b = Tensor::zeros(1, 4, 5);
        assert!(concat_channels_forward(&a, &b).is_err());
        assert!(relu_backward(&a, &b).is_err());
        assert!(upsample_nearest2_to(&a, 10, 8).is_err());
        assert!(avgpool2_backward(&a, &a).is_err());
    }

    #[test]
    fn concat_round_trip() {
        let a = Tensor::filled(2, 3, 3, 1.0);
        let b = Tensor::filled(1, 3, 3, 2.0);
        let c = concat_channels_forward(&a, &b).unwrap();
        assert_eq!(c.shape(), (3, 3, 3));
        let (ga, gb) = concat_channels_backward(2, &c).unwrap();
        assert_eq!((ga, gb), (a, b));
    }
}
