//! Periodic orthonormal discrete wavelet transform.
//!
//! Segments are first mapped onto a dyadic grid (`resample_to_dyadic`), then
//! decomposed with a Mallat pyramid using periodic extension. Because the
//! periodized filter bank is orthonormal, synthesis is the transpose of
//! analysis and energy is preserved exactly up to rounding.
//!
//! Detail scales are indexed coarse to fine: `details[0]` is the coarsest
//! detail level and `details[J - 1]` the finest (length `N / 2`).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KwfError, Result};

/// Symmlet 6 scaling filter. Published values refined with a
/// high-precision Newton solve of the orthonormality and vanishing-moment
/// equations.
#[allow(clippy::excessive_precision)]
const SYM6_LOW_PASS: [f64; 12] = [
    0.015_404_109_327_043_856_563,
    0.003_490_712_084_218_349_022_5,
    -0.117_990_111_148_521_471_67,
    -0.048_311_742_585_685_377_127,
    0.491_055_941_927_991_822_63,
    0.787_641_141_028_648_021_44,
    0.337_929_421_728_146_385_9,
    -0.072_637_522_786_384_260_131,
    -0.021_060_292_512_366_212_106,
    0.044_724_901_770_782_721_661,
    0.001_767_711_864_251_775_831_3,
    -0.007_800_708_325_030_563_216_3,
];

const PR_TOLERANCE: f64 = 1e-10;

/// An orthonormal two-channel filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletBasis {
    name: String,
    low_pass: Vec<f64>,
    high_pass: Vec<f64>,
    max_levels: Option<usize>,
}

impl WaveletBasis {
    /// Builds a basis from its scaling filter; the wavelet filter follows
    /// from the quadrature-mirror relation `g[n] = (-1)^n h[L-1-n]`.
    /// Perfect reconstruction is checked on random signals before returning.
    pub fn from_low_pass(name: impl Into<String>, low_pass: Vec<f64>) -> Result<Self> {
        if low_pass.len() < 2 || !low_pass.len().is_multiple_of(2) {
            return Err(KwfError::invalid(
                "scaling filter needs an even number of taps",
            ));
        }
        let l = low_pass.len();
        let high_pass = (0..l)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * low_pass[l - 1 - n]
            })
            .collect();
        let basis = WaveletBasis {
            name: name.into(),
            low_pass,
            high_pass,
            max_levels: None,
        };
        basis.check_perfect_reconstruction()?;
        Ok(basis)
    }

    pub fn sym6() -> Self {
        Self::from_low_pass("sym6", SYM6_LOW_PASS.to_vec()).expect("sym6 taps are orthonormal")
    }

    pub fn haar() -> Self {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_low_pass("haar", vec![c, c]).expect("haar taps are orthonormal")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "sym6" => Ok(Self::sym6()),
            "haar" => Ok(Self::haar()),
            other => Err(KwfError::Config(format!("unknown wavelet `{other}`"))),
        }
    }

    /// Caps the decomposition depth; `None` decomposes down to a single
    /// approximation coefficient.
    pub fn with_max_levels(mut self, levels: Option<usize>) -> Self {
        self.max_levels = levels;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn low_pass(&self) -> &[f64] {
        &self.low_pass
    }

    pub fn high_pass(&self) -> &[f64] {
        &self.high_pass
    }

    pub fn max_levels(&self) -> Option<usize> {
        self.max_levels
    }

    /// Depth used for a signal of length `n`.
    pub fn levels_for(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(KwfError::NotDyadic { len: n });
        }
        let full = n.trailing_zeros() as usize;
        match self.max_levels {
            None if n.is_power_of_two() => Ok(full),
            None => Err(KwfError::NotDyadic { len: n }),
            Some(j) if j <= full => Ok(j),
            Some(_) => Err(KwfError::NotDyadic { len: n }),
        }
    }

    fn check_perfect_reconstruction(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..8 {
            let x: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let back = idwt(&dwt(&x, self)?, self)?;
            let err = max_abs_diff(&x, &back);
            if err >= PR_TOLERANCE {
                return Err(KwfError::invalid(format!(
                    "filter `{}` fails perfect reconstruction (error {err:e})",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Approximation and detail coefficients of one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletDecomp {
    pub approx: Vec<f64>,
    /// Coarse to fine.
    pub details: Vec<Vec<f64>>,
    pub original_length: usize,
    pub dyadic_length: usize,
}

impl WaveletDecomp {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn coefficient_count(&self) -> usize {
        self.approx.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn energy(&self) -> f64 {
        self.approx.iter().map(|c| c * c).sum::<f64>()
            + self.details.iter().flatten().map(|c| c * c).sum::<f64>()
    }

    pub fn same_shape(&self, other: &WaveletDecomp) -> bool {
        self.dyadic_length == other.dyadic_length
            && self.approx.len() == other.approx.len()
            && self.details.len() == other.details.len()
            && self
                .details
                .iter()
                .zip(&other.details)
                .all(|(a, b)| a.len() == b.len())
    }

    /// Same shape, all coefficients zero.
    pub fn zeros_like(&self) -> WaveletDecomp {
        WaveletDecomp {
            approx: vec![0.0; self.approx.len()],
            details: self.details.iter().map(|d| vec![0.0; d.len()]).collect(),
            original_length: self.original_length,
            dyadic_length: self.dyadic_length,
        }
    }

    /// `self += weight * other`, coefficient-wise.
    pub fn add_scaled(&mut self, weight: f64, other: &WaveletDecomp) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.approx.iter_mut().zip(&other.approx) {
            *a += weight * b;
        }
        for (da, db) in self.details.iter_mut().zip(&other.details) {
            for (a, b) in da.iter_mut().zip(db) {
                *a += weight * b;
            }
        }
    }
}

fn analysis_step(x: &[f64], basis: &WaveletBasis) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (t, (h, g)) in basis.low_pass.iter().zip(&basis.high_pass).enumerate() {
            let v = x[(2 * k + t) % n];
            a += h * v;
            d += g * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
    (approx, detail)
}

fn synthesis_step(approx: &[f64], detail: &[f64], basis: &WaveletBasis) -> Vec<f64> {
    let n = approx.len() * 2;
    let mut x = vec![0.0; n];
    for k in 0..approx.len() {
        for (t, (h, g)) in basis.low_pass.iter().zip(&basis.high_pass).enumerate() {
            x[(2 * k + t) % n] += h * approx[k] + g * detail[k];
        }
    }
    x
}

/// Forward transform of a dyadic-length signal with periodic boundaries.
pub fn dwt(values: &[f64], basis: &WaveletBasis) -> Result<WaveletDecomp> {
    let n = values.len();
    let levels = basis.levels_for(n)?;
    let mut approx = values.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analysis_step(&approx, basis);
        approx = a;
        details.push(d);
    }
    details.reverse();
    Ok(WaveletDecomp {
        approx,
        details,
        original_length: n,
        dyadic_length: n,
    })
}

/// Inverse of [`dwt`].
pub fn idwt(decomp: &WaveletDecomp, basis: &WaveletBasis) -> Result<Vec<f64>> {
    let mut x = decomp.approx.clone();
    for d in &decomp.details {
        if d.len() != x.len() {
            return Err(KwfError::ShapeMismatch(format!(
                "detail level of length {} cannot follow approximation of length {}",
                d.len(),
                x.len()
            )));
        }
        x = synthesis_step(&x, d, basis);
    }
    if x.len() != decomp.dyadic_length {
        return Err(KwfError::ShapeMismatch(format!(
            "reconstructed {} samples, expected {}",
            x.len(),
            decomp.dyadic_length
        )));
    }
    Ok(x)
}

/// Smooth part (approximation only) and detail part (details only), both on
/// the dyadic grid. Their sum is the full reconstruction.
pub fn smooth_detail_split(
    decomp: &WaveletDecomp,
    basis: &WaveletBasis,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut smooth_only = decomp.zeros_like();
    smooth_only.approx.clone_from(&decomp.approx);
    let mut detail_only = decomp.clone();
    detail_only.approx.iter_mut().for_each(|c| *c = 0.0);
    Ok((idwt(&smooth_only, basis)?, idwt(&detail_only, basis)?))
}

fn interpolation_matrix(h: usize, n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, h);
    if h == 1 {
        a.fill(1.0);
        return a;
    }
    for j in 0..n {
        let s = if n == 1 {
            0.0
        } else {
            j as f64 * (h - 1) as f64 / (n - 1) as f64
        };
        let i0 = (s.floor() as usize).min(h - 2);
        let frac = s - i0 as f64;
        a[(j, i0)] += 1.0 - frac;
        a[(j, i0 + 1)] += frac;
    }
    a
}

/// Linear interpolation of `values` onto `n` equally spaced points spanning
/// the same interval. Both endpoints are kept.
pub fn resample_to_dyadic(values: &[f64], n: usize) -> Result<Vec<f64>> {
    Resampler::new(values.len(), n)?.to_dyadic(values)
}

/// Maps `n` dyadic-grid samples back to `h` points. This is the
/// least-squares left inverse of [`resample_to_dyadic`], so the round trip
/// reproduces the input.
pub fn resample_from_dyadic(values: &[f64], h: usize) -> Result<Vec<f64>> {
    Resampler::new(h, values.len())?.from_dyadic(values)
}

/// Precomputed linear maps between the `h`-point day grid and the `n`-point
/// dyadic grid.
#[derive(Debug, Clone)]
pub struct Resampler {
    h: usize,
    n: usize,
    up: Option<DMatrix<f64>>,
    down: Option<DMatrix<f64>>,
}

impl Resampler {
    pub fn new(h: usize, n: usize) -> Result<Self> {
        if h == 0 {
            return Err(KwfError::invalid("cannot resample an empty segment"));
        }
        if n < h {
            return Err(KwfError::invalid(format!(
                "dyadic length {n} is shorter than segment length {h}"
            )));
        }
        if h == n {
            return Ok(Resampler {
                h,
                n,
                up: None,
                down: None,
            });
        }
        let a = interpolation_matrix(h, n);
        let gram = a.transpose() * &a;
        let chol = gram
            .cholesky()
            .ok_or_else(|| KwfError::invalid("interpolation map is rank deficient"))?;
        let down = chol.solve(&a.transpose());
        Ok(Resampler {
            h,
            n,
            up: Some(a),
            down: Some(down),
        })
    }

    /// Smallest power of two not below `h`.
    pub fn for_length(h: usize) -> Result<Self> {
        Self::new(h, h.next_power_of_two())
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn to_dyadic(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.h {
            return Err(KwfError::ShapeMismatch(format!(
                "expected {} samples, got {}",
                self.h,
                values.len()
            )));
        }
        Ok(match &self.up {
            None => values.to_vec(),
            Some(a) => apply(a, values),
        })
    }

    pub fn from_dyadic(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.n {
            return Err(KwfError::ShapeMismatch(format!(
                "expected {} dyadic samples, got {}",
                self.n,
                values.len()
            )));
        }
        Ok(match &self.down {
            None => values.to_vec(),
            Some(p) => apply(p, values),
        })
    }
}

fn apply(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Resampling plus wavelet basis: the full path from a day of `h` samples to
/// its coefficients and back.
#[derive(Debug, Clone)]
pub struct SegmentTransform {
    basis: WaveletBasis,
    resampler: Resampler,
}

impl SegmentTransform {
    pub fn new(basis: WaveletBasis, h: usize) -> Result<Self> {
        let resampler = Resampler::for_length(h)?;
        basis.levels_for(resampler.n())?;
        Ok(SegmentTransform { basis, resampler })
    }

    pub fn basis(&self) -> &WaveletBasis {
        &self.basis
    }

    pub fn h(&self) -> usize {
        self.resampler.h()
    }

    pub fn dyadic_length(&self) -> usize {
        self.resampler.n()
    }

    pub fn analyze(&self, values: &[f64]) -> Result<WaveletDecomp> {
        let mut decomp = dwt(&self.resampler.to_dyadic(values)?, &self.basis)?;
        decomp.original_length = self.h();
        Ok(decomp)
    }

    pub fn synthesize(&self, decomp: &WaveletDecomp) -> Result<Vec<f64>> {
        self.resampler.from_dyadic(&idwt(decomp, &self.basis)?)
    }

    /// Smooth and detail parts on the `h`-point grid.
    pub fn split(&self, decomp: &WaveletDecomp) -> Result<(Vec<f64>, Vec<f64>)> {
        let (s, d) = smooth_detail_split(decomp, &self.basis)?;
        Ok((
            self.resampler.from_dyadic(&s)?,
            self.resampler.from_dyadic(&d)?,
        ))
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
