//! Rasters of `K+`, `K-`, nested bidisk preimages and forward limit classes,
//! encoded as binary PPM, CSV or a JSON summary.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::context::ParamContext;
use crate::dynamics::{forward, OrbitStatus};
use crate::error::{Error, Result};
use crate::escape::{escape_radii, in_dr, EscapeClassifier};
use crate::grid::PixelGrid;
use crate::partition::{LimitClass, RealPartition, DEFAULT_LIMIT_TOL};
use crate::point::{CPoint, Point2, RPoint};

/// Code of a Bounded pixel in the escape modes.
pub const CODE_BOUNDED: u8 = 0;
/// Code of a pixel whose backward orbit hits `y = 0`.
pub const CODE_UNDEFINED: u8 = 255;
pub const CODE_ALPHA: u8 = 0;
pub const CODE_THETA: u8 = 1;
pub const CODE_CYCLE: u8 = 2;
pub const CODE_ESCAPE: u8 = 3;
pub const CODE_UNDECIDED: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RenderMode {
    KplusReal,
    KminusReal,
    /// The slice `{y = y0}`; the window is in the `x`-plane (`Re x`, `Im x`).
    KplusComplexSlice { y0: Complex64 },
    /// Depth in the nested sequence `D ∩ f^{-1}(D) ∩ ... ∩ f^{-n}(D)` with
    /// `D = D_{R2}`, over the real plane.
    Nested { n: usize },
    LimitClasses,
}

impl FromStr for RenderMode {
    type Err = Error;

    /// `kplus-real`, `kminus-real`, `kplus-complex-slice`, `nested:N`,
    /// `limit-classes`. The slice height is set separately.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kplus-real" => Ok(RenderMode::KplusReal),
            "kminus-real" => Ok(RenderMode::KminusReal),
            "kplus-complex-slice" => Ok(RenderMode::KplusComplexSlice { y0: Complex64::new(0.0, 0.0) }),
            "limit-classes" => Ok(RenderMode::LimitClasses),
            _ => match s.strip_prefix("nested:").map(str::parse::<usize>) {
                Some(Ok(n)) if n <= 253 => Ok(RenderMode::Nested { n }),
                _ => Err(Error::InvalidSpec(format!("unknown mode '{s}'"))),
            },
        }
    }
}

impl fmt::Display for RenderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenderMode::KplusReal => write!(f, "kplus-real"),
            RenderMode::KminusReal => write!(f, "kminus-real"),
            RenderMode::KplusComplexSlice { .. } => write!(f, "kplus-complex-slice"),
            RenderMode::Nested { n } => write!(f, "nested:{n}"),
            RenderMode::LimitClasses => write!(f, "limit-classes"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterSpec {
    pub mode: RenderMode,
    pub c: Complex64,
    /// `[x0, x1, y0, y1]` in the viewing plane.
    pub window: [f64; 4],
    pub width: usize,
    pub height: usize,
    pub budget: usize,
    /// Recorded for reproducibility; no mode samples randomly.
    pub seed: u64,
}

impl RasterSpec {
    pub fn grid(&self) -> Result<PixelGrid> {
        PixelGrid::new(self.window, self.width, self.height)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub spec: RasterSpec,
    /// Row-major, top row first.
    pub codes: Vec<u8>,
}

impl Raster {
    pub fn code(&self, row: usize, col: usize) -> u8 {
        self.codes[row * self.spec.width + col]
    }

    pub fn histogram(&self) -> [usize; 256] {
        let mut h = [0; 256];
        for c in &self.codes {
            h[*c as usize] += 1;
        }
        h
    }
}

/// `1 + floor(log2(n + 1))` for escape at step `n`, capped below 255.
pub fn escape_bucket(n: usize) -> u8 {
    (1 + (n as u64).saturating_add(1).ilog2()).min(254) as u8
}

fn status_code(s: OrbitStatus) -> u8 {
    match s {
        OrbitStatus::Bounded => CODE_BOUNDED,
        OrbitStatus::Escaped(n) => escape_bucket(n),
        OrbitStatus::InverseUndefined(_) => CODE_UNDEFINED,
    }
}

pub fn limit_code(l: LimitClass) -> u8 {
    match l {
        LimitClass::Alpha => CODE_ALPHA,
        LimitClass::Theta => CODE_THETA,
        LimitClass::Cycle3(_) => CODE_CYCLE,
        LimitClass::Escape(_) => CODE_ESCAPE,
        LimitClass::Undecided => CODE_UNDECIDED,
    }
}

/// Largest `k <= n` with `f^j(z) ∈ D_R` for all `j <= k`, plus one; zero
/// when `z ∉ D_R`.
pub fn nested_depth(c: Complex64, z: CPoint, r: f64, n: usize) -> u8 {
    let mut p = z;
    for k in 0..=n {
        if !in_dr(&p, r) {
            return k as u8;
        }
        if k == n {
            break;
        }
        p = match forward(c, p) {
            Ok(q) => q,
            Err(_) => return (k + 1) as u8,
        };
    }
    (n + 1) as u8
}

fn real_param(spec: &RasterSpec) -> Result<f64> {
    ParamContext::new(spec.c).real_c().map_err(|_| {
        Error::InvalidSpec(format!("mode {} needs a real parameter, got {}", spec.mode, spec.c))
    })
}

/// Class code of every pixel centre; rows run in parallel.
pub fn rasterize(spec: &RasterSpec) -> Result<Raster> {
    let grid = spec.grid()?;
    let ctx = ParamContext::new(spec.c);
    let radii = escape_radii(spec.c)?;
    let b = spec.budget;
    let codes = match spec.mode {
        RenderMode::KplusReal => {
            real_param(spec)?;
            let cl = EscapeClassifier::<f64>::forward(&ctx, radii.r0)?;
            grid.map(|x, y| status_code(cl.classify_forward(RPoint::new(x, y), b)))
        }
        RenderMode::KminusReal => {
            real_param(spec)?;
            let cl = EscapeClassifier::<f64>::backward(&ctx, radii.r1)?;
            grid.map(|x, y| status_code(cl.classify_backward(RPoint::new(x, y), b)))
        }
        RenderMode::KplusComplexSlice { y0 } => {
            let cl = EscapeClassifier::<Complex64>::forward(&ctx, radii.r0)?;
            grid.map(|x, y| status_code(cl.classify_forward(Point2::new(Complex64::new(x, y), y0), b)))
        }
        RenderMode::Nested { n } => {
            if n > 253 {
                return Err(Error::InvalidSpec(format!("nested depth {n} exceeds 253")));
            }
            grid.map(|x, y| nested_depth(spec.c, CPoint::real(x, y), radii.r2, n))
        }
        RenderMode::LimitClasses => {
            let rp = RealPartition::new(real_param(spec)?)?;
            grid.map(|x, y| limit_code(rp.classify_limit(RPoint::new(x, y), b, DEFAULT_LIMIT_TOL)))
        }
    };
    Ok(Raster { spec: *spec, codes })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub colors: Vec<[u8; 3]>,
}

impl Palette {
    pub fn for_mode(mode: RenderMode) -> Self {
        let mut colors = vec![[0u8; 3]; 256];
        match mode {
            RenderMode::LimitClasses => {
                colors[CODE_ALPHA as usize] = [0, 0, 255];
                colors[CODE_THETA as usize] = [255, 0, 0];
                colors[CODE_CYCLE as usize] = [0, 160, 0];
                colors[CODE_ESCAPE as usize] = [255, 255, 255];
                colors[CODE_UNDECIDED as usize] = [128, 128, 128];
            }
            RenderMode::Nested { n } => {
                for k in 0..=n + 1 {
                    let v = (255 * k / (n + 1)) as u8;
                    colors[k] = [v, v, 255 - v / 2];
                }
            }
            _ => {
                colors[CODE_BOUNDED as usize] = [0, 0, 0];
                for (k, c) in colors.iter_mut().enumerate().take(255).skip(1) {
                    let t = ((k - 1) as f64 / 16.0).min(1.0);
                    let v = (255.0 * (1.0 - 0.85 * t)) as u8;
                    *c = [v, v, 255];
                }
                colors[CODE_UNDEFINED as usize] = [255, 0, 0];
            }
        }
        Palette { colors }
    }

    pub fn color(&self, code: u8) -> [u8; 3] {
        self.colors.get(code as usize).copied().unwrap_or([0, 0, 0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Ppm,
    Csv,
    JsonMeta,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ppm" => Ok(OutputFormat::Ppm),
            "csv" => Ok(OutputFormat::Csv),
            "json-meta" | "json" => Ok(OutputFormat::JsonMeta),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

/// Meaning of each code for the raster's mode.
pub fn legend(mode: RenderMode) -> Vec<(String, String)> {
    match mode {
        RenderMode::LimitClasses => vec![
            ("0".into(), "Alpha".into()),
            ("1".into(), "Theta".into()),
            ("2".into(), "Cycle3".into()),
            ("3".into(), "Escape".into()),
            ("4".into(), "Undecided".into()),
        ],
        RenderMode::Nested { n } => (0..=n + 1)
            .map(|k| {
                let meaning = if k == 0 { "outside D".to_string() } else { format!("in D ∩ ... ∩ f^-{}(D)", k - 1) };
                (k.to_string(), meaning)
            })
            .collect(),
        _ => vec![
            ("0".into(), "Bounded".into()),
            ("1..254".into(), "escaped at step n with code 1 + floor(log2(n + 1))".into()),
            ("255".into(), "inverse undefined (y = 0)".into()),
        ],
    }
}

pub fn encode_output(raster: &Raster, format: OutputFormat, palette: &Palette) -> Result<Vec<u8>> {
    let (w, h) = (raster.spec.width, raster.spec.height);
    if raster.codes.is_empty() || raster.codes.len() != w * h {
        return Err(Error::InvalidSpec("raster is empty or does not match its size".into()));
    }
    match format {
        OutputFormat::Ppm => {
            let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
            out.reserve(3 * w * h);
            for c in &raster.codes {
                out.extend_from_slice(&palette.color(*c));
            }
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut out = String::with_capacity(12 * w * h);
            for row in 0..h {
                for col in 0..w {
                    out.push_str(&format!("{row},{col},{}\n", raster.code(row, col)));
                }
            }
            Ok(out.into_bytes())
        }
        OutputFormat::JsonMeta => {
            let hist: serde_json::Map<String, serde_json::Value> = raster
                .histogram()
                .iter()
                .enumerate()
                .filter(|(_, n)| **n > 0)
                .map(|(k, n)| (k.to_string(), json!(n)))
                .collect();
            let legend: serde_json::Map<String, serde_json::Value> =
                legend(raster.spec.mode).into_iter().map(|(k, v)| (k, json!(v))).collect();
            let v = json!({
                "spec": raster.spec,
                "mode": raster.spec.mode.to_string(),
                "pixels": w * h,
                "histogram": hist,
                "legend": legend,
            });
            let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
    }
}

/// Parses a PPM produced by `encode_output` back to `(width, height, rgb)`.
pub fn decode_ppm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let bad = || Error::InvalidSpec("not a binary PPM".into());
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad());
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad())?.to_string());
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return Err(bad());
    }
    let w: usize = fields[1].parse().map_err(|_| bad())?;
    let h: usize = fields[2].parse().map_err(|_| bad())?;
    let data = bytes.get(pos + 1..).ok_or_else(bad)?;
    if data.len() != 3 * w * h {
        return Err(bad());
    }
    Ok((w, h, data.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(mode: RenderMode, c: f64, window: [f64; 4], w: usize, h: usize) -> RasterSpec {
        RasterSpec { mode, c: Complex64::new(c, 0.0), window, width: w, height: h, budget: 200, seed: 0 }
    }

    #[test]
    fn alpha_pixel() {
        let a1 = (1.0 - (1.0f64 - 0.8).sqrt()) / 2.0;
        let s = spec(RenderMode::LimitClasses, 0.2, [a1 - 0.5, a1 + 0.5, a1 - 0.5, a1 + 0.5], 1, 1);
        let r = rasterize(&s).unwrap();
        assert_eq!(r.codes, vec![CODE_ALPHA]);
        let mut pal = Palette::for_mode(RenderMode::LimitClasses);
        pal.colors[0] = [0, 0, 255];
        let ppm = encode_output(&r, OutputFormat::Ppm, &pal).unwrap();
        assert_eq!(ppm, b"P6\n1 1\n255\n\x00\x00\xff".to_vec());
    }

    #[test]
    fn csv_and_histogram() {
        let s = spec(RenderMode::KplusReal, 0.0, [-3.0, 3.0, -1.0, 1.0], 2, 1);
        let r = rasterize(&s).unwrap();
        let csv = String::from_utf8(encode_output(&r, OutputFormat::Csv, &Palette::for_mode(s.mode)).unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("0,0,"));
        assert_eq!(r.histogram().iter().sum::<usize>(), 2);
    }

    #[test]
    fn buckets() {
        assert_eq!(escape_bucket(0), 1);
        assert_eq!(escape_bucket(1), 2);
        assert_eq!(escape_bucket(2), 2);
        assert_eq!(escape_bucket(3), 3);
        assert_eq!(escape_bucket(usize::MAX), 64);
    }

    #[test]
    fn mode_text() {
        assert_eq!("nested:2".parse::<RenderMode>().unwrap(), RenderMode::Nested { n: 2 });
        assert!("nested:x".parse::<RenderMode>().is_err());
        assert!("gif".parse::<OutputFormat>().is_err());
        assert_eq!(RenderMode::Nested { n: 3 }.to_string(), "nested:3");
    }

    #[test]
    fn rejects_empty_or_complex() {
        assert!(rasterize(&spec(RenderMode::KplusReal, 0.0, [0.0, 0.0, 0.0, 1.0], 1, 1)).is_err());
        assert!(rasterize(&spec(RenderMode::KplusReal, 0.0, [0.0, 1.0, 0.0, 1.0], 0, 1)).is_err());
        let mut s = spec(RenderMode::LimitClasses, 0.2, [0.0, 1.0, 0.0, 1.0], 1, 1);
        s.c = Complex64::new(0.2, 0.1);
        assert!(rasterize(&s).is_err());
    }

    #[test]
    fn ppm_round_trip() {
        let s = spec(RenderMode::Nested { n: 2 }, 0.3, [-6.0, 6.0, -6.0, 6.0], 5, 3);
        let r = rasterize(&s).unwrap();
        let pal = Palette::for_mode(s.mode);
        let (w, h, rgb) = decode_ppm(&encode_output(&r, OutputFormat::Ppm, &pal).unwrap()).unwrap();
        assert_eq!((w, h), (5, 3));
        for (i, c) in r.codes.iter().enumerate() {
            assert_eq!(&rgb[3 * i..3 * i + 3], &pal.color(*c));
        }
    }
}
