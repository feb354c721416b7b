//! Generator network inference.
//!
//! A trained generator maps a 10-dimensional latent vector to a 32×32 volume
//! of 6-channel logits. Each cell collapses to the tile of its highest channel
//! and the upper-left 16×11 window becomes a room.
//!
//! Weights are stored in a small self-describing binary container:
//!
//! ```text
//! "ZGANWT01"
//! u32 layer count
//! per layer:
//!   u32 name length, name bytes (UTF-8)
//!   u8 kind        (1 = transposed convolution, 2 = batch normalisation)
//!   u8 activation  (0 = none, 1 = relu, 2 = tanh)
//!   u32 dimension count, u32 dimensions
//!   parameter arrays, f32
//! ```
//!
//! All integers and floats are little-endian. A transposed convolution has
//! dimensions `[in, out, kernel_h, kernel_w, stride, padding]` followed by a
//! weight array laid out `[in][out][kh][kw]` and a bias of length `out`. Batch
//! normalisation has dimensions `[channels]` followed by scale, shift, running
//! mean and running variance arrays.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::model::{Cell, Room, Tile, TileGrid, ROOM_HEIGHT, ROOM_WIDTH};

pub const MAGIC: &[u8; 8] = b"ZGANWT01";
pub const LATENT_DIM: usize = 10;
pub const OUT_CHANNELS: usize = 6;
pub const OUT_SIZE: usize = 32;
pub const LOGIT_COUNT: usize = OUT_CHANNELS * OUT_SIZE * OUT_SIZE;
pub const BATCH_NORM_EPS: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum GanError {
    #[error("weights format error: {0}")]
    Format(String),
    #[error("layer {layer}: {message}")]
    Shape { layer: String, message: String },
    #[error("latent component {index} = {value} is outside [-1, 1]")]
    LatentOutOfRange { index: usize, value: f32 },
    #[error("latent vector has {0} components, expected 10")]
    LatentDim(usize),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentVector([f32; LATENT_DIM]);

impl LatentVector {
    pub fn new(values: &[f32]) -> Result<Self, GanError> {
        if values.len() != LATENT_DIM {
            return Err(GanError::LatentDim(values.len()));
        }
        let mut z = [0.0; LATENT_DIM];
        for (i, &v) in values.iter().enumerate() {
            if !(-1.0..=1.0).contains(&v) {
                return Err(GanError::LatentOutOfRange { index: i, value: v });
            }
            z[i] = v;
        }
        Ok(LatentVector(z))
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut z = [0.0; LATENT_DIM];
        for v in &mut z {
            *v = rng.random_range(-1.0..=1.0);
        }
        LatentVector(z)
    }

    pub fn values(&self) -> &[f32; LATENT_DIM] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    None,
    Relu,
    Tanh,
}

impl Activation {
    fn code(self) -> u8 {
        match self {
            Activation::None => 0,
            Activation::Relu => 1,
            Activation::Tanh => 2,
        }
    }

    fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Activation::None),
            1 => Some(Activation::Relu),
            2 => Some(Activation::Tanh),
            _ => None,
        }
    }

    fn apply(self, x: f32) -> f32 {
        match self {
            Activation::None => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerKind {
    TransposedConv {
        in_channels: usize,
        out_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
        stride: usize,
        padding: usize,
        /// `[in][out][kh][kw]`
        weight: Vec<f32>,
        bias: Vec<f32>,
    },
    BatchNorm {
        channels: usize,
        scale: Vec<f32>,
        shift: Vec<f32>,
        running_mean: Vec<f32>,
        running_var: Vec<f32>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub name: String,
    pub kind: LayerKind,
    pub activation: Activation,
}

/// Tensor shape as (channels, height, width).
type Shape = (usize, usize, usize);

impl Layer {
    fn output_shape(&self, input: Shape) -> Result<Shape, GanError> {
        let shape_err = |message: String| GanError::Shape { layer: self.name.clone(), message };
        match &self.kind {
            LayerKind::TransposedConv { in_channels, out_channels, kernel_h, kernel_w, stride, padding, weight, bias } => {
                if *in_channels != input.0 {
                    return Err(shape_err(format!("expects {in_channels} input channels, receives {}", input.0)));
                }
                if *stride == 0 {
                    return Err(shape_err("stride must be positive".into()));
                }
                if weight.len() != in_channels * out_channels * kernel_h * kernel_w || bias.len() != *out_channels {
                    return Err(shape_err("parameter array sizes do not match dimensions".into()));
                }
                let out = |n: usize, k: usize| ((n - 1) * stride + k).checked_sub(2 * padding);
                match (out(input.1, *kernel_h), out(input.2, *kernel_w)) {
                    (Some(h), Some(w)) if h > 0 && w > 0 => Ok((*out_channels, h, w)),
                    _ => Err(shape_err("padding exceeds the output size".into())),
                }
            }
            LayerKind::BatchNorm { channels, scale, shift, running_mean, running_var } => {
                if *channels != input.0 {
                    return Err(shape_err(format!("normalises {channels} channels, receives {}", input.0)));
                }
                if [scale, shift, running_mean, running_var].iter().any(|a| a.len() != *channels) {
                    return Err(shape_err("parameter array sizes do not match dimensions".into()));
                }
                Ok(input)
            }
        }
    }

    fn forward(&self, input: &[f32], shape: Shape, out_shape: Shape) -> Vec<f32> {
        let mut out: Vec<f32> = match &self.kind {
            LayerKind::TransposedConv { out_channels, kernel_h, kernel_w, stride, padding, weight, bias, .. } => {
                let (cin, h, w) = shape;
                let (cout, oh, ow) = out_shape;
                let mut acc = vec![0.0f64; cout * oh * ow];
                for ic in 0..cin {
                    for iy in 0..h {
                        for ix in 0..w {
                            let x = input[(ic * h + iy) * w + ix] as f64;
                            if x == 0.0 {
                                continue;
                            }
                            for oc in 0..cout {
                                let wbase = ((ic * out_channels + oc) * kernel_h) * kernel_w;
                                for ky in 0..*kernel_h {
                                    let oy = (iy * stride + ky) as isize - *padding as isize;
                                    if oy < 0 || oy as usize >= oh {
                                        continue;
                                    }
                                    for kx in 0..*kernel_w {
                                        let ox = (ix * stride + kx) as isize - *padding as isize;
                                        if ox < 0 || ox as usize >= ow {
                                            continue;
                                        }
                                        acc[(oc * oh + oy as usize) * ow + ox as usize] +=
                                            x * weight[wbase + ky * kernel_w + kx] as f64;
                                    }
                                }
                            }
                        }
                    }
                }
                let plane = oh * ow;
                acc.iter().enumerate().map(|(i, &v)| (v + bias[i / plane] as f64) as f32).collect()
            }
            LayerKind::BatchNorm { scale, shift, running_mean, running_var, .. } => {
                let plane = shape.1 * shape.2;
                input
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        let c = i / plane;
                        let norm = (x as f64 - running_mean[c] as f64) / (running_var[c] as f64 + BATCH_NORM_EPS).sqrt();
                        (norm * scale[c] as f64 + shift[c] as f64) as f32
                    })
                    .collect()
            }
        };
        for v in &mut out {
            *v = self.activation.apply(*v);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightBundle {
    pub layers: Vec<Layer>,
}

impl WeightBundle {
    /// Validates layer composition: 10×1×1 in, 6×32×32 out.
    pub fn validate(&self) -> Result<(), GanError> {
        if self.layers.is_empty() {
            return Err(GanError::Format("bundle has no layers".into()));
        }
        let mut shape = (LATENT_DIM, 1, 1);
        for layer in &self.layers {
            shape = layer.output_shape(shape)?;
        }
        if shape != (OUT_CHANNELS, OUT_SIZE, OUT_SIZE) {
            let last = self.layers.last().unwrap();
            return Err(GanError::Shape {
                layer: last.name.clone(),
                message: format!("final output is {}x{}x{}, expected 6x32x32", shape.0, shape.1, shape.2),
            });
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, GanError> {
        let bytes = fs::read(path).map_err(|source| GanError::Io { path: path.display().to_string(), source })?;
        Self::from_bytes(&bytes)
    }

    pub fn save(&self, path: &Path) -> Result<(), GanError> {
        fs::write(path, self.to_bytes()).map_err(|source| GanError::Io { path: path.display().to_string(), source })
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GanError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(GanError::Format("bad magic or version".into()));
        }
        let count = r.u32()? as usize;
        let mut layers = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let name_len = r.u32()? as usize;
            let name = String::from_utf8(r.take(name_len)?.to_vec())
                .map_err(|_| GanError::Format("layer name is not UTF-8".into()))?;
            let kind = r.u8()?;
            let activation = Activation::from_code(r.u8()?)
                .ok_or_else(|| GanError::Format(format!("layer {name}: unknown activation code")))?;
            let ndims = r.u32()? as usize;
            let dims: Vec<usize> = (0..ndims).map(|_| r.u32().map(|d| d as usize)).collect::<Result<_, _>>()?;
            let kind = match (kind, dims.as_slice()) {
                (1, &[cin, cout, kh, kw, stride, padding]) => LayerKind::TransposedConv {
                    in_channels: cin,
                    out_channels: cout,
                    kernel_h: kh,
                    kernel_w: kw,
                    stride,
                    padding,
                    weight: r.floats(cin * cout * kh * kw)?,
                    bias: r.floats(cout)?,
                },
                (2, &[c]) => LayerKind::BatchNorm {
                    channels: c,
                    scale: r.floats(c)?,
                    shift: r.floats(c)?,
                    running_mean: r.floats(c)?,
                    running_var: r.floats(c)?,
                },
                (1 | 2, _) => {
                    return Err(GanError::Shape { layer: name, message: format!("bad dimension list {dims:?}") })
                }
                (k, _) => return Err(GanError::Format(format!("layer {name}: unknown kind code {k}"))),
            };
            layers.push(Layer { name, kind, activation });
        }
        if r.pos != bytes.len() {
            return Err(GanError::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        let bundle = WeightBundle { layers };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.layers.len() as u32).to_le_bytes());
        for layer in &self.layers {
            out.extend_from_slice(&(layer.name.len() as u32).to_le_bytes());
            out.extend_from_slice(layer.name.as_bytes());
            let (code, dims, arrays): (u8, Vec<usize>, Vec<&Vec<f32>>) = match &layer.kind {
                LayerKind::TransposedConv { in_channels, out_channels, kernel_h, kernel_w, stride, padding, weight, bias } => (
                    1,
                    vec![*in_channels, *out_channels, *kernel_h, *kernel_w, *stride, *padding],
                    vec![weight, bias],
                ),
                LayerKind::BatchNorm { channels, scale, shift, running_mean, running_var } => {
                    (2, vec![*channels], vec![scale, shift, running_mean, running_var])
                }
            };
            out.push(code);
            out.push(layer.activation.code());
            out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
            for d in dims {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
            for array in arrays {
                for v in array {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out
    }

    /// Randomly initialised generator with the standard schedule:
    /// 10×1×1 → w0×4×4 → w1×8×8 → ... → 6×32×32, batch-normalised ReLU hidden
    /// layers and a tanh output. `widths` must have three entries for a
    /// 32×32 output (the default is `[256, 128, 64]`).
    pub fn random_generator<R: Rng + ?Sized>(rng: &mut R, widths: &[usize]) -> Self {
        let mut layers = Vec::new();
        let mut cin = LATENT_DIM;
        let conv = |rng: &mut R, name: String, cin: usize, cout: usize, stride: usize, padding: usize, act| {
            let n = cin * cout * 16;
            Layer {
                name,
                kind: LayerKind::TransposedConv {
                    in_channels: cin,
                    out_channels: cout,
                    kernel_h: 4,
                    kernel_w: 4,
                    stride,
                    padding,
                    weight: (0..n).map(|_| 0.02 * standard_normal(rng)).collect(),
                    bias: (0..cout).map(|_| 0.01 * standard_normal(rng)).collect(),
                },
                activation: act,
            }
        };
        for (i, &w) in widths.iter().enumerate() {
            let (stride, padding) = if i == 0 { (1, 0) } else { (2, 1) };
            layers.push(conv(rng, format!("conv{i}"), cin, w, stride, padding, Activation::None));
            layers.push(Layer {
                name: format!("bn{i}"),
                kind: LayerKind::BatchNorm {
                    channels: w,
                    scale: (0..w).map(|_| 1.0 + 0.1 * standard_normal(rng)).collect(),
                    shift: (0..w).map(|_| 0.1 * standard_normal(rng)).collect(),
                    running_mean: (0..w).map(|_| 0.01 * standard_normal(rng)).collect(),
                    running_var: (0..w).map(|_| 0.0004 * (1.0 + 0.1 * rng.random::<f32>())).collect(),
                },
                activation: Activation::Relu,
            });
            cin = w;
        }
        layers.push(conv(rng, "out".into(), cin, OUT_CHANNELS, 2, 1, Activation::Tanh));
        WeightBundle { layers }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], GanError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| GanError::Format("unexpected end of file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, GanError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, GanError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f32>, GanError> {
        let raw = self.take(n.checked_mul(4).ok_or_else(|| GanError::Format("array too large".into()))?)?;
        Ok(raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

/// Generator output: 6 channels over a 32×32 grid, stored channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitVolume {
    data: Vec<f32>,
}

impl LogitVolume {
    pub fn from_channel_major(data: Vec<f32>) -> Option<Self> {
        (data.len() == LOGIT_COUNT).then_some(LogitVolume { data })
    }

    pub fn get(&self, channel: usize, y: usize, x: usize) -> f32 {
        self.data[(channel * OUT_SIZE + y) * OUT_SIZE + x]
    }

    pub fn cell(&self, y: usize, x: usize) -> [f32; OUT_CHANNELS] {
        std::array::from_fn(|c| self.get(c, y, x))
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn scaled(&self, factor: f32) -> Self {
        LogitVolume { data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn max_abs_diff(&self, other: &LogitVolume) -> f32 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f32::max)
    }
}

pub fn generate_logits(z: &LatentVector, weights: &WeightBundle) -> LogitVolume {
    let mut shape: Shape = (LATENT_DIM, 1, 1);
    let mut activations: Vec<f32> = z.0.to_vec();
    for layer in &weights.layers {
        let out_shape = layer.output_shape(shape).expect("validated bundle");
        activations = layer.forward(&activations, shape, out_shape);
        shape = out_shape;
    }
    LogitVolume { data: activations }
}

/// Tile for an argmax channel. Only the first three channels are meaningful.
pub fn channel_tile(channel: usize) -> Tile {
    match channel {
        1 => Tile::Wall,
        2 => Tile::Water,
        _ => Tile::Floor,
    }
}

/// Per-cell argmax, ties to the lowest channel. Row-major `[y][x]`.
pub fn collapse(volume: &LogitVolume) -> Vec<[Tile; OUT_SIZE]> {
    (0..OUT_SIZE)
        .map(|y| {
            std::array::from_fn(|x| {
                let cell = volume.cell(y, x);
                let mut best = 0;
                for c in 1..OUT_CHANNELS {
                    if cell[c] > cell[best] {
                        best = c;
                    }
                }
                channel_tile(best)
            })
        })
        .collect()
}

/// Upper-left 16×11 window.
pub fn crop_room(grid: &[[Tile; OUT_SIZE]]) -> TileGrid {
    let mut tiles = TileGrid::filled(Tile::Wall);
    for y in 0..ROOM_HEIGHT {
        for x in 0..ROOM_WIDTH {
            tiles.set(Cell::new(x as i32, y as i32), grid[y][x]);
        }
    }
    tiles
}

/// Floor cells on the two-thick border ring become wall.
pub fn normalize_border(tiles: &mut TileGrid) {
    for y in 0..ROOM_HEIGHT as i32 {
        for x in 0..ROOM_WIDTH as i32 {
            let c = Cell::new(x, y);
            if !c.is_interior() && tiles.get(c) == Tile::Floor {
                tiles.set(c, Tile::Wall);
            }
        }
    }
}

pub fn room_from_latent(z: &LatentVector, weights: &WeightBundle) -> Room {
    let mut tiles = crop_room(&collapse(&generate_logits(z, weights)));
    normalize_border(&mut tiles);
    Room::from_tiles(tiles)
}

pub fn sample_room<R: Rng + ?Sized>(rng: &mut R, weights: &WeightBundle) -> Room {
    room_from_latent(&LatentVector::sample(rng), weights)
}

/// Parity fixture records: 10 latent floats then 6144 channel-major logits each.
pub fn parse_fixture(bytes: &[u8]) -> Result<Vec<(LatentVector, LogitVolume)>, GanError> {
    let record = (LATENT_DIM + LOGIT_COUNT) * 4;
    if bytes.is_empty() || !bytes.len().is_multiple_of(record) {
        return Err(GanError::Format(format!("fixture size {} is not a multiple of {record}", bytes.len())));
    }
    let floats: Vec<f32> = bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    floats
        .chunks_exact(LATENT_DIM + LOGIT_COUNT)
        .map(|rec| {
            let z = LatentVector::new(&rec[..LATENT_DIM])?;
            Ok((z, LogitVolume { data: rec[LATENT_DIM..].to_vec() }))
        })
        .collect()
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f32 {
    StandardNormal.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_bundle(seed: u64) -> WeightBundle {
        WeightBundle::random_generator(&mut ChaCha8Rng::seed_from_u64(seed), &[16, 8, 8])
    }

    #[test]
    fn default_schedule_shapes_validate() {
        let b = WeightBundle::random_generator(&mut ChaCha8Rng::seed_from_u64(0), &[256, 128, 64]);
        b.validate().unwrap();
        assert_eq!(b.layers.len(), 7);
    }

    #[test]
    fn three_channel_output_is_a_shape_error() {
        let mut b = small_bundle(1);
        if let LayerKind::TransposedConv { out_channels, weight, bias, in_channels, .. } = &mut b.layers.last_mut().unwrap().kind {
            *out_channels = 3;
            weight.truncate(*in_channels * 3 * 16);
            bias.truncate(3);
        }
        match b.validate() {
            Err(GanError::Shape { layer, .. }) => assert_eq!(layer, "out"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(WeightBundle::from_bytes(&b.to_bytes()), Err(GanError::Shape { .. })));
    }

    #[test]
    fn bad_magic_rejected() {
        let mut bytes = small_bundle(2).to_bytes();
        bytes[7] = b'2';
        assert!(matches!(WeightBundle::from_bytes(&bytes), Err(GanError::Format(_))));
        assert!(matches!(WeightBundle::from_bytes(&bytes[..5]), Err(GanError::Format(_))));
    }

    #[test]
    fn truncated_bundle_rejected() {
        let bytes = small_bundle(3).to_bytes();
        assert!(WeightBundle::from_bytes(&bytes[..bytes.len() - 4]).is_err());
    }

    #[test]
    fn write_read_is_identity() {
        let b = small_bundle(4);
        let bytes = b.to_bytes();
        let back = WeightBundle::from_bytes(&bytes).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn zero_weights_give_zero_logits() {
        let mut b = small_bundle(5);
        for layer in &mut b.layers {
            match &mut layer.kind {
                LayerKind::TransposedConv { weight, bias, .. } => {
                    weight.iter_mut().for_each(|w| *w = 0.0);
                    bias.iter_mut().for_each(|w| *w = 0.0);
                }
                LayerKind::BatchNorm { shift, running_mean, .. } => {
                    shift.iter_mut().for_each(|w| *w = 0.0);
                    running_mean.iter_mut().for_each(|w| *w = 0.0);
                }
            }
        }
        let z = LatentVector::new(&[0.5; 10]).unwrap();
        let v = generate_logits(&z, &b);
        assert!(v.as_slice().iter().all(|&x| x == 0.0));
        // All channels tie at zero: everything is floor.
        assert!(collapse(&v).iter().flatten().all(|&t| t == Tile::Floor));
    }

    /// Direct transposed convolution: scatter every input over the kernel
    /// without any index arithmetic shared with the implementation.
    #[test]
    fn transposed_conv_matches_scatter_oracle() {
        let layer = Layer {
            name: "t".into(),
            kind: LayerKind::TransposedConv {
                in_channels: 1,
                out_channels: 1,
                kernel_h: 3,
                kernel_w: 3,
                stride: 2,
                padding: 1,
                weight: (1..=9).map(|v| v as f32).collect(),
                bias: vec![0.5],
            },
            activation: Activation::None,
        };
        let input = [1.0f32, 2.0, 3.0, 4.0]; // 2x2
        let out_shape = layer.output_shape((1, 2, 2)).unwrap();
        assert_eq!(out_shape, (1, 3, 3));
        let got = layer.forward(&input, (1, 2, 2), out_shape);
        // Full (unpadded) output is 5x5; padding 1 crops one ring.
        let mut full = [[0.0f32; 5]; 5];
        for iy in 0..2 {
            for ix in 0..2 {
                for ky in 0..3 {
                    for kx in 0..3 {
                        full[iy * 2 + ky][ix * 2 + kx] += input[iy * 2 + ix] * (ky * 3 + kx + 1) as f32;
                    }
                }
            }
        }
        let expected: Vec<f32> = (1..4).flat_map(|y| (1..4).map(move |x| (y, x))).map(|(y, x)| full[y][x] + 0.5).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn collapse_argmax_and_ties() {
        let mut data = vec![0.0f32; LOGIT_COUNT];
        // cell (0,0): wall wins
        data[OUT_SIZE * OUT_SIZE] = 0.9;
        data[0] = 0.1;
        data[2 * OUT_SIZE * OUT_SIZE] = -0.2;
        let v = LogitVolume::from_channel_major(data).unwrap();
        let g = collapse(&v);
        assert_eq!(g[0][0], Tile::Wall);
        assert_eq!(g[0][1], Tile::Floor);
    }

    #[test]
    fn collapse_matches_max_scan_oracle_and_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let data: Vec<f32> = (0..LOGIT_COUNT).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = LogitVolume::from_channel_major(data.clone()).unwrap();
            let g = collapse(&v);
            for y in 0..OUT_SIZE {
                for x in 0..OUT_SIZE {
                    let vals: Vec<f32> = (0..6).map(|c| data[(c * OUT_SIZE + y) * OUT_SIZE + x]).collect();
                    let max = vals.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
                    let first = vals.iter().position(|&v| v == max).unwrap();
                    assert_eq!(g[y][x], channel_tile(first));
                }
            }
            assert_eq!(collapse(&v.scaled(3.5)), g);
        }
    }

    #[test]
    fn crop_keeps_upper_left() {
        let mut grid = vec![[Tile::Floor; OUT_SIZE]; OUT_SIZE];
        grid[0][0] = Tile::Wall;
        for row in grid.iter_mut() {
            for t in row[16..].iter_mut() {
                *t = Tile::Water;
            }
        }
        let room = crop_room(&grid);
        assert_eq!(room.get(Cell::new(0, 0)), Tile::Wall);
        assert!(room.rows().flatten().all(|&t| t != Tile::Water));
    }

    #[test]
    fn latent_range_checked() {
        assert!(LatentVector::new(&[0.0; 9]).is_err());
        let mut v = [0.0; 10];
        v[3] = 1.5;
        assert!(matches!(LatentVector::new(&v), Err(GanError::LatentOutOfRange { index: 3, .. })));
    }

    #[test]
    fn sampled_rooms_are_deterministic_and_well_formed() {
        let b = small_bundle(6);
        let a = sample_room(&mut ChaCha8Rng::seed_from_u64(9), &b);
        let again = sample_room(&mut ChaCha8Rng::seed_from_u64(9), &b);
        assert_eq!(a, again);
        assert!(a.violations().is_empty());
        let z = LatentVector::sample(&mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(generate_logits(&z, &b), generate_logits(&z, &b));
    }
}
