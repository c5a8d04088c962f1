use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{IntegrationResult, Kernel, MethodUsed};
use crate::error::{Error, Result};
use crate::exec::ordered_map;
use crate::space::BoxDomain;

/// Samples per RNG stream. Stream `c` (ChaCha `set_stream(c)`) draws samples
/// `c * BATCH .. (c + 1) * BATCH`, so the sample-to-draw mapping is fixed.
const BATCH: u64 = 4096;

/// Running sums for one batch: count, Σf, and Σ|f − mean|² (Welford).
#[derive(Clone, Copy)]
struct Moments {
    count: u64,
    sum: Complex64,
    mean: Complex64,
    m2: f64,
}

impl Moments {
    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let m2 = self.m2
            + other.m2
            + delta.norm_sqr() * (self.count as f64) * (other.count as f64) / count as f64;
        let sum = self.sum + other.sum;
        Moments { count, sum, mean: sum / count as f64, m2 }
    }
}

/// Uniform sampling over the unoriented box; returns mean × signed volume
/// and the standard error scaled by |volume|.
///
/// Draws landing exactly on the origin are redrawn for kernels singular there.
pub fn mc_integrate(kernel: &Kernel, domain: &BoxDomain, samples: u64, seed: u64) -> Result<IntegrationResult> {
    if samples < 100 {
        return Err(Error::InvalidConfig(format!("Monte Carlo needs at least 100 samples, got {samples}")));
    }
    kernel.validate(domain.dim())?;
    let volume = domain.signed_volume();
    let method_used = MethodUsed::MonteCarlo { samples, seed };
    if volume == 0.0 {
        return Ok(IntegrationResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            method_used,
            evaluations: 1,
            converged: true,
        });
    }
    let bounds = domain.unoriented();
    let (lo, hi) = (bounds.lower(), bounds.upper());
    let n = domain.dim();
    let singular = kernel.singular_at_origin();
    let batches = samples.div_ceil(BATCH);

    let partials = ordered_map(batches as usize, |c| {
        let c = c as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let count = BATCH.min(samples - c * BATCH);
        let mut point = vec![0.0; n];
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mean = Complex64::new(0.0, 0.0);
        let mut m2 = 0.0;
        for i in 0..count {
            loop {
                for j in 0..n {
                    let u: f64 = rng.random();
                    point[j] = lo[j] + u * (hi[j] - lo[j]);
                }
                if !(singular && point.iter().all(|&x| x == 0.0)) {
                    break;
                }
            }
            let v = kernel.eval(&point);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand { point });
            }
            sum += v;
            let delta = v - mean;
            mean += delta / (i + 1) as f64;
            m2 += (delta.conj() * (v - mean)).re;
        }
        Ok(Moments { count, sum, mean, m2 })
    });

    let mut total = Moments {
        count: 0,
        sum: Complex64::new(0.0, 0.0),
        mean: Complex64::new(0.0, 0.0),
        m2: 0.0,
    };
    for p in partials {
        total = total.merge(p?);
    }
    let mean = total.sum / samples as f64;
    let variance = (total.m2 / (samples - 1) as f64).max(0.0);
    Ok(IntegrationResult {
        value: mean * volume,
        error_estimate: (variance / samples as f64).sqrt() * volume.abs(),
        method_used,
        evaluations: samples,
        converged: true,
    })
}
