//! Binary model files.
//!
//! ```text
//! "CRDM" | version u32 | layer count u32 |
//!   per layer: out_ch, in_ch, kh, kw (u32 each) | weights f64 | bias length u32 | biases f64
//! ```
//!
//! All integers and floats are little-endian with no padding.

use super::{IrlError, ModelParams, ARCH_VERSION};
use crate::numerics::ConvLayer;

pub const MODEL_MAGIC: [u8; 4] = *b"CRDM";

pub fn save_model(params: &ModelParams) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + params.param_count() * 8 + params.layers.len() * 20);
    out.extend_from_slice(&MODEL_MAGIC);
    out.extend_from_slice(&params.version.to_le_bytes());
    out.extend_from_slice(&(params.layers.len() as u32).to_le_bytes());
    for layer in &params.layers {
        for d in layer.dims() {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for w in &layer.weights {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.extend_from_slice(&(layer.bias.len() as u32).to_le_bytes());
        for b in &layer.bias {
            out.extend_from_slice(&b.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> IrlError {
        IrlError::Format {
            offset,
            message: message.into(),
        }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], IrlError> {
        let available = self.bytes.len() - self.pos;
        if available < n {
            return Err(self.err(
                self.pos,
                format!("truncated {what}: expected {n} bytes, found {available}"),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, IrlError> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>, IrlError> {
        let bytes = n
            .checked_mul(8)
            .ok_or_else(|| self.err(self.pos, format!("{what} length overflows")))?;
        let b = self.take(bytes, what)?;
        Ok(b.chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

pub fn load_model(bytes: &[u8]) -> Result<ModelParams, IrlError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != MODEL_MAGIC {
        return Err(r.err(0, format!("bad magic {magic:02x?}, expected \"CRDM\"")));
    }
    let version = r.u32("version")?;
    if version != ARCH_VERSION {
        return Err(r.err(4, format!("unsupported version {version}, expected {ARCH_VERSION}")));
    }
    let count_at = r.pos;
    let count = r.u32("layer count")? as usize;
    if count != super::ARCHITECTURE.len() {
        return Err(r.err(
            count_at,
            format!("{count} layers, expected {}", super::ARCHITECTURE.len()),
        ));
    }
    let mut layers = Vec::with_capacity(count);
    for (i, expected) in super::ARCHITECTURE.iter().enumerate() {
        let dims_at = r.pos;
        let mut dims = [0usize; 4];
        for d in &mut dims {
            *d = r.u32("layer dims")? as usize;
        }
        if &dims != expected {
            return Err(r.err(
                dims_at,
                format!("layer {i} dims {dims:?}, expected {expected:?}"),
            ));
        }
        let [o, ci, kh, kw] = dims;
        let weights = r.f64s(o * ci * kh * kw, &format!("layer {i} weights"))?;
        let bias_at = r.pos;
        let bias_len = r.u32("bias length")? as usize;
        if bias_len != o {
            return Err(r.err(bias_at, format!("layer {i} bias length {bias_len}, expected {o}")));
        }
        let bias = r.f64s(bias_len, &format!("layer {i} biases"))?;
        let layer = ConvLayer::new(o, ci, kh, kw, weights, bias).map_err(|e| r.err(dims_at, e.to_string()))?;
        layers.push(layer);
    }
    if r.pos != bytes.len() {
        return Err(r.err(r.pos, format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    ModelParams::new(version, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irl::init_params;

    #[test]
    fn round_trip_is_bit_exact() {
        let p = init_params(9);
        let bytes = save_model(&p);
        assert_eq!(bytes.len(), 12 + 4 * 20 + p.param_count() * 8);
        let q = load_model(&bytes).unwrap();
        assert_eq!(save_model(&q), bytes);
        assert_eq!(p, q);
    }

    #[test]
    fn bad_magic_is_at_offset_zero() {
        let mut bytes = save_model(&init_params(0));
        bytes[1] = b'X';
        assert!(matches!(load_model(&bytes), Err(IrlError::Format { offset: 0, .. })));
    }

    #[test]
    fn version_mismatch_is_at_offset_four() {
        let mut bytes = save_model(&init_params(0));
        bytes[4] = 7;
        assert!(matches!(load_model(&bytes), Err(IrlError::Format { offset: 4, .. })));
    }

    #[test]
    fn truncated_weights_name_both_lengths() {
        let bytes = save_model(&init_params(0));
        let cut = &bytes[..12 + 16 + 100];
        let err = load_model(cut).unwrap_err();
        let IrlError::Format { offset, message } = &err else {
            panic!("unexpected {err:?}")
        };
        assert_eq!(*offset, 28);
        assert!(message.contains("expected 1728 bytes, found 100"), "{message}");
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let mut bytes = save_model(&init_params(0));
        let end = bytes.len();
        bytes.push(0);
        assert!(matches!(load_model(&bytes), Err(IrlError::Format { offset, .. }) if offset == end));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(load_model(&[]), Err(IrlError::Format { offset: 0, .. })));
    }
}
