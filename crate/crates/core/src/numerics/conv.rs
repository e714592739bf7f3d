use super::{shape_err, NumericsError, Tensor};

/// Stride-1 "same" convolution (cross-correlation, no kernel flip).
///
/// Weights are stored `(out_ch, in_ch, kh, kw)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    out_ch: usize,
    in_ch: usize,
    kh: usize,
    kw: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ConvLayer {
    pub fn new(
        out_ch: usize,
        in_ch: usize,
        kh: usize,
        kw: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self, NumericsError> {
        if kh % 2 == 0 || kw % 2 == 0 {
            return shape_err(format!("kernel {kh}x{kw} must have odd sides"));
        }
        if out_ch == 0 || in_ch == 0 {
            return shape_err("channel counts must be positive");
        }
        if weights.len() != out_ch * in_ch * kh * kw {
            return shape_err(format!(
                "weights length {} does not match ({out_ch}, {in_ch}, {kh}, {kw})",
                weights.len()
            ));
        }
        if bias.len() != out_ch {
            return shape_err(format!("bias length {} != out_ch {out_ch}", bias.len()));
        }
        Ok(Self {
            out_ch,
            in_ch,
            kh,
            kw,
            weights,
            bias,
        })
    }

    pub fn zeros(out_ch: usize, in_ch: usize, kh: usize, kw: usize) -> Result<Self, NumericsError> {
        Self::new(
            out_ch,
            in_ch,
            kh,
            kw,
            vec![0.0; out_ch * in_ch * kh * kw],
            vec![0.0; out_ch],
        )
    }

    /// `(out_ch, in_ch, kh, kw)`
    pub fn dims(&self) -> [usize; 4] {
        [self.out_ch, self.in_ch, self.kh, self.kw]
    }

    pub fn out_ch(&self) -> usize {
        self.out_ch
    }

    pub fn in_ch(&self) -> usize {
        self.in_ch
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn w(&self, oc: usize, ic: usize, ky: usize, kx: usize) -> f64 {
        self.weights[((oc * self.in_ch + ic) * self.kh + ky) * self.kw + kx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvGrads {
    pub input: Tensor,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Valid output range `[lo, hi)` for a kernel tap at signed offset `d`.
fn span(d: isize, n: usize) -> (usize, usize) {
    let lo = (-d).max(0) as usize;
    let hi = (n as isize - d).clamp(0, n as isize) as usize;
    (lo, hi.max(lo))
}

pub fn conv2d_forward(input: &Tensor, layer: &ConvLayer) -> Result<Tensor, NumericsError> {
    let (c, h, w) = input.shape();
    if c != layer.in_ch {
        return shape_err(format!("input has {c} channels, layer expects {}", layer.in_ch));
    }
    let (ph, pw) = ((layer.kh / 2) as isize, (layer.kw / 2) as isize);
    let mut out = Tensor::zeros(layer.out_ch, h, w);
    for oc in 0..layer.out_ch {
        let dst = out.channel_mut(oc);
        dst.fill(layer.bias[oc]);
        for ic in 0..layer.in_ch {
            let src = input.channel(ic);
            for ky in 0..layer.kh {
                let dy = ky as isize - ph;
                let (y0, y1) = span(dy, h);
                for kx in 0..layer.kw {
                    let wt = layer.w(oc, ic, ky, kx);
                    if wt == 0.0 {
                        continue;
                    }
                    let dx = kx as isize - pw;
                    let (x0, x1) = span(dx, w);
                    for y in y0..y1 {
                        let sy = (y as isize + dy) as usize;
                        let sx0 = (x0 as isize + dx) as usize;
                        let s = &src[sy * w + sx0..sy * w + sx0 + (x1 - x0)];
                        let d = &mut dst[y * w + x0..y * w + x1];
                        for (o, i) in d.iter_mut().zip(s) {
                            *o += wt * i;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn conv2d_backward(
    input: &Tensor,
    layer: &ConvLayer,
    upstream: &Tensor,
) -> Result<ConvGrads, NumericsError> {
    let (c, h, w) = input.shape();
    if c != layer.in_ch {
        return shape_err(format!("input has {c} channels, layer expects {}", layer.in_ch));
    }
    if upstream.shape() != (layer.out_ch, h, w) {
        return shape_err(format!(
            "upstream gradient {:?} does not match output ({}, {h}, {w})",
            upstream.shape(),
            layer.out_ch
        ));
    }
    let (ph, pw) = ((layer.kh / 2) as isize, (layer.kw / 2) as isize);
    let mut grad_in = Tensor::zeros(c, h, w);
    let mut grad_w = vec![0.0; layer.weights.len()];
    let grad_b: Vec<f64> = (0..layer.out_ch)
        .map(|oc| upstream.channel(oc).iter().sum())
        .collect();

    for oc in 0..layer.out_ch {
        let g = upstream.channel(oc);
        for ic in 0..layer.in_ch {
            let src = input.channel(ic);
            for ky in 0..layer.kh {
                let dy = ky as isize - ph;
                let (y0, y1) = span(dy, h);
                for kx in 0..layer.kw {
                    let dx = kx as isize - pw;
                    let (x0, x1) = span(dx, w);
                    let widx = ((oc * layer.in_ch + ic) * layer.kh + ky) * layer.kw + kx;
                    let wt = layer.weights[widx];
                    let mut acc = 0.0;
                    let gi = grad_in.channel_mut(ic);
                    for y in y0..y1 {
                        let sy = (y as isize + dy) as usize;
                        let sx0 = (x0 as isize + dx) as usize;
                        let n = x1 - x0;
                        let gr = &g[y * w + x0..y * w + x1];
                        let s = &src[sy * w + sx0..sy * w + sx0 + n];
                        for (a, b) in gr.iter().zip(s) {
                            acc += a * b;
                        }
                        let d = &mut gi[sy * w + sx0..sy * w + sx0 + n];
                        for (o, a) in d.iter_mut().zip(gr) {
                            *o += wt * a;
                        }
                    }
                    grad_w[widx] = acc;
                }
            }
        }
    }
    Ok(ConvGrads {
        input: grad_in,
        weights: grad_w,
        bias: grad_b,
    })
}
