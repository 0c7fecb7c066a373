//! Adaptive 21-point Gauss-Kronrod quadrature for real- and matrix-valued
//! integrands. Subdivision always bisects the interval with the largest error
//! estimate, so node placement is a deterministic function of the integrand.

use crate::error::{Error, Result};
use crate::matkernel::{paper_norm, ComplexMatrix};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Values that can be integrated: closed under addition and real scaling,
/// with a norm for error control.
pub trait Integrand: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn norm(&self) -> f64;
    fn diff_norm(&self, other: &Self) -> f64;
}

impl Integrand for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn diff_norm(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl Integrand for ComplexMatrix {
    fn zero_like(&self) -> Self {
        ComplexMatrix::zeros(self.nrows(), self.ncols())
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        self.zip_apply(other, |a, b| *a += b * w);
    }
    fn norm(&self) -> f64 {
        paper_norm(self)
    }
    fn diff_norm(&self, other: &Self) -> f64 {
        paper_norm(&(self - other))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_intervals: 4000,
        }
    }
}

fn gk21<T: Integrand, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc.zero_like();
    kronrod.add_scaled(&fc, WGK[10]);
    let mut gauss = fc.zero_like();
    for (j, &x) in XGK.iter().take(10).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod.add_scaled(&f1, WGK[j]);
        kronrod.add_scaled(&f2, WGK[j]);
        if j % 2 == 1 {
            gauss.add_scaled(&f1, WG[j / 2]);
            gauss.add_scaled(&f2, WG[j / 2]);
        }
    }
    let mut k = kronrod.zero_like();
    k.add_scaled(&kronrod, half);
    let mut g = gauss.zero_like();
    g.add_scaled(&gauss, half);
    let err = k.diff_norm(&g);
    (k, err)
}

/// Integral of `f` over `[a, b]` and its error estimate.
pub fn integrate<T: Integrand, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<(T, f64)> {
    let (first, first_err) = gk21(&f, a, b);
    if a == b {
        return Ok((first.zero_like(), 0.0));
    }
    let mut pieces = vec![(a, b, first, first_err)];
    loop {
        let mut total = pieces[0].2.zero_like();
        let mut err = 0.0;
        for p in &pieces {
            total.add_scaled(&p.2, 1.0);
            err += p.3;
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.norm()) {
            return Ok((total, err));
        }
        if pieces.len() >= cfg.max_intervals {
            return Err(Error::QuadratureFailure { estimate: err });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                if p.3 > be {
                    (i, p.3)
                } else {
                    (bi, be)
                }
            });
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (left, left_err) = gk21(&f, lo, mid);
        let (right, right_err) = gk21(&f, mid, hi);
        pieces.push((lo, mid, left, left_err));
        pieces.push((mid, hi, right, right_err));
        // keep summation order tied to position on the axis
        pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
    }
}
