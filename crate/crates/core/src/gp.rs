//! Noise-free Gaussian-process surrogate with the squared-exponential
//! kernel `k(x, x') = exp(-|x - x'|^2 / theta)`.
//!
//! The length parameter is chosen by minimizing the profile negative log
//! likelihood `N log(sigma2_hat(theta)) + log det K(theta)` over a bounded
//! range, after which the mean level and process variance have closed
//! forms. Prediction is the usual kriging mean and variance; posterior
//! sample paths on a grid come from a pivoted low-rank factorization of
//! the posterior covariance so that fine grids stay tractable.

use crate::dataio::TrainingData;
use crate::linalg::{pivoted_cholesky, Cholesky, LowRankFactor};
use crate::rng::{derive_stream, Rng64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Diagonal stabilization added to the correlation matrix. Noise-free
/// interpolation makes K singular when samples nearly coincide; this is
/// the standard remedy and is accounted for in the interpolation
/// tolerances.
pub const DEFAULT_JITTER: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GpError {
    #[error("correlation matrix factorization failed at theta = {theta}")]
    Factorization { theta: f64 },
    #[error("degenerate constant-residual data: profile variance is zero")]
    DegenerateResidual,
    #[error("no theta in the search bounds admits a factorization")]
    AllThetaFailed,
    #[error("invalid kernel config: {0}")]
    BadConfig(String),
    #[error("grid covariance factorization failed (grid finer than numerically supported)")]
    GridFactorization,
}

/// Squared-exponential kernel settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Fixed length parameter; when set the likelihood search is skipped.
    #[serde(default)]
    pub theta: Option<f64>,
    /// Search bounds for theta; default `[1e-4 w^2, 1e2 w^2]` for domain
    /// width `w`.
    #[serde(default)]
    pub theta_search_bounds: Option<(f64, f64)>,
    /// Diagonal jitter, at most 1e-6.
    #[serde(default = "default_jitter")]
    pub jitter: f64,
}

fn default_jitter() -> f64 {
    DEFAULT_JITTER
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            theta: None,
            theta_search_bounds: None,
            jitter: DEFAULT_JITTER,
        }
    }
}

impl KernelConfig {
    fn validate(&self) -> Result<(), GpError> {
        if !(0.0..=1e-6).contains(&self.jitter) {
            return Err(GpError::BadConfig(format!(
                "jitter {} outside [0, 1e-6]",
                self.jitter
            )));
        }
        if let Some(t) = self.theta {
            if !(t > 0.0 && t.is_finite()) {
                return Err(GpError::BadConfig(format!("theta {t} must be positive")));
            }
        }
        if let Some((lo, hi)) = self.theta_search_bounds {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(GpError::BadConfig(format!(
                    "theta bounds ({lo}, {hi}) must be ordered and positive"
                )));
            }
        }
        Ok(())
    }
}

fn corr(x: f64, y: f64, theta: f64) -> f64 {
    let d = x - y;
    (-(d * d) / theta).exp()
}

/// Mean and variance of the surrogate at one input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    /// Clamped at zero after roundoff.
    pub variance: f64,
}

impl Prediction {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Fitted surrogate.
#[derive(Clone, Debug)]
pub struct GpModel {
    data: TrainingData,
    xs: Vec<f64>,
    beta_hat: f64,
    sigma2_hat: f64,
    theta_hat: f64,
    jitter: f64,
    chol: Cholesky,
    /// `K^{-1} (y - beta_hat 1)`
    alpha: Vec<f64>,
    degenerate: bool,
}

struct ProfileEval {
    nll: f64,
    beta: f64,
    sigma2: f64,
    chol: Cholesky,
    /// `K^{-1} y`
    k_inv_y: Vec<f64>,
    /// `K^{-1} 1`
    k_inv_one: Vec<f64>,
}

/// Solve `K x = b` with one step of iterative refinement; clustered
/// samples make K ill-conditioned and the refinement recovers the digits
/// the jitter costs.
fn refined_solve(chol: &Cholesky, k: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    chol.solve(&mut x);
    let mut residual = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for j in 0..n {
            s -= k[i * n + j] * x[j];
        }
        residual[i] = s;
    }
    chol.solve(&mut residual);
    for i in 0..n {
        x[i] += residual[i];
    }
    x
}

fn profile_eval(data: &TrainingData, theta: f64, jitter: f64) -> Result<ProfileEval, GpError> {
    let n = data.len();
    let xs: Vec<f64> = data.xs().collect();
    let ys: Vec<f64> = data.ys().collect();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] = corr(xs[i], xs[j], theta) + if i == j { jitter } else { 0.0 };
        }
    }
    let chol = Cholesky::factor(&k, n).map_err(|_| GpError::Factorization { theta })?;
    let u = refined_solve(&chol, &k, n, &ys);
    let v = refined_solve(&chol, &k, n, &vec![1.0; n]);
    let sum_u: f64 = u.iter().sum();
    let sum_v: f64 = v.iter().sum();
    let beta = sum_u / sum_v;
    let quad: f64 = ys.iter().zip(&u).map(|(y, u)| y * u).sum::<f64>() - beta * sum_u;
    let sigma2 = quad / n as f64;
    if !(sigma2 > 0.0) {
        return Err(GpError::DegenerateResidual);
    }
    let nll = n as f64 * sigma2.ln() + chol.log_det();
    Ok(ProfileEval {
        nll,
        beta,
        sigma2,
        chol,
        k_inv_y: u,
        k_inv_one: v,
    })
}

/// Profile negative log likelihood `N log(sigma2_hat) + log det K` at a
/// given length parameter.
pub fn neg_log_profile_likelihood(
    theta: f64,
    data: &TrainingData,
    jitter: f64,
) -> Result<f64, GpError> {
    assert!(theta > 0.0, "theta must be positive");
    Ok(profile_eval(data, theta, jitter)?.nll)
}

fn default_bounds(data: &TrainingData) -> (f64, f64) {
    let w2 = data.domain().width().powi(2);
    (1e-4 * w2, 1e2 * w2)
}

/// Fits the surrogate: length parameter by a 64-point log-grid scan plus
/// golden-section refinement (tolerance 1e-4 in log theta), then the
/// closed-form profile estimators.
pub fn fit(data: &TrainingData, config: &KernelConfig) -> Result<GpModel, GpError> {
    config.validate()?;
    let jitter = config.jitter;
    let xs: Vec<f64> = data.xs().collect();
    let ys: Vec<f64> = data.ys().collect();

    // All-equal outputs have zero profile variance at every theta; return
    // the flat model rather than erroring.
    if ys.windows(2).all(|w| w[0] == w[1]) {
        let (lo, hi) = config.theta_search_bounds.unwrap_or(default_bounds(data));
        let theta = config.theta.unwrap_or((lo * hi).sqrt());
        let n = data.len();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                k[i * n + j] = corr(xs[i], xs[j], theta) + if i == j { jitter } else { 0.0 };
            }
        }
        let chol = Cholesky::factor(&k, n).map_err(|_| GpError::Factorization { theta })?;
        return Ok(GpModel {
            data: data.clone(),
            xs,
            beta_hat: ys[0],
            sigma2_hat: 0.0,
            theta_hat: theta,
            jitter,
            chol,
            alpha: vec![0.0; n],
            degenerate: true,
        });
    }

    let theta_hat = if let Some(theta) = config.theta {
        theta
    } else {
        let (lo, hi) = config.theta_search_bounds.unwrap_or(default_bounds(data));
        if hi / lo < 100.0 {
            return Err(GpError::BadConfig(format!(
                "theta bounds ({lo}, {hi}) must span at least two orders of magnitude"
            )));
        }
        search_theta(data, lo, hi, jitter)?
    };

    let ev = profile_eval(data, theta_hat, jitter)?;
    let n = data.len();
    // The mean weights solve the noise-free system K0 alpha = y - beta,
    // in extended precision: the likelihood optimizer routinely lands at
    // near-singular K0 (condition ~ 1e13), where any f64 route misses the
    // interpolation tolerance. Falls back to the jittered solution if K0
    // is not positive definite even at that precision.
    let alpha = {
        let mut k0 = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                k0[i * n + j] = corr(xs[i], xs[j], theta_hat);
            }
        }
        let rhs: Vec<f64> = (0..n).map(|i| ys[i] - ev.beta).collect();
        crate::linalg::cholesky_solve_dd(&k0, n, &rhs, 1e-13).unwrap_or_else(|| {
            (0..n)
                .map(|i| ev.k_inv_y[i] - ev.beta * ev.k_inv_one[i])
                .collect()
        })
    };
    Ok(GpModel {
        data: data.clone(),
        xs,
        beta_hat: ev.beta,
        sigma2_hat: ev.sigma2,
        theta_hat,
        jitter,
        chol: ev.chol,
        alpha,
        degenerate: false,
    })
}

/// Coarse log-grid scan followed by golden-section refinement around the
/// best cell; returns the best theta seen anywhere, so the result is never
/// worse than the grid minimum.
fn search_theta(data: &TrainingData, lo: f64, hi: f64, jitter: f64) -> Result<f64, GpError> {
    const GRID: usize = 64;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let at = |t: f64| -> f64 {
        neg_log_profile_likelihood(t.exp(), data, jitter).unwrap_or(f64::INFINITY)
    };
    let mut best_t = f64::NAN;
    let mut best_f = f64::INFINITY;
    let mut best_idx = 0;
    for i in 0..GRID {
        let lt = llo + (lhi - llo) * i as f64 / (GRID - 1) as f64;
        let f = at(lt);
        if f < best_f {
            best_f = f;
            best_t = lt;
            best_idx = i;
        }
    }
    if !best_f.is_finite() {
        return Err(GpError::AllThetaFailed);
    }
    let step = (lhi - llo) / (GRID - 1) as f64;
    let mut a = llo + step * best_idx.saturating_sub(1) as f64;
    let mut b = (llo + step * (best_idx + 1) as f64).min(lhi);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = at(c);
    let mut fd = at(d);
    let consider = |t: f64, f: f64, best_t: &mut f64, best_f: &mut f64| {
        if f < *best_f {
            *best_f = f;
            *best_t = t;
        }
    };
    consider(c, fc, &mut best_t, &mut best_f);
    consider(d, fd, &mut best_t, &mut best_f);
    while b - a > 1e-4 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = at(c);
            consider(c, fc, &mut best_t, &mut best_f);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = at(d);
            consider(d, fd, &mut best_t, &mut best_f);
        }
    }
    Ok(best_t.exp())
}

impl GpModel {
    pub fn data(&self) -> &TrainingData {
        &self.data
    }

    pub fn beta_hat(&self) -> f64 {
        self.beta_hat
    }

    pub fn sigma2_hat(&self) -> f64 {
        self.sigma2_hat
    }

    pub fn theta_hat(&self) -> f64 {
        self.theta_hat
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    fn kvec(&self, x: f64) -> Vec<f64> {
        self.xs.iter().map(|&xn| corr(x, xn, self.theta_hat)).collect()
    }

    /// Kriging mean and variance at `x` (inside the data's domain).
    pub fn predict(&self, x: f64) -> Prediction {
        let k = self.kvec(x);
        let mean = self.beta_hat + k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>();
        let mut w = k;
        self.chol.solve_lower(&mut w);
        let q: f64 = w.iter().map(|v| v * v).sum();
        let raw = self.sigma2_hat * (1.0 - q);
        debug_assert!(
            raw >= -1e-8 * self.sigma2_hat.max(f64::MIN_POSITIVE),
            "variance excursion {raw} below clamp budget"
        );
        Prediction {
            mean,
            variance: raw.max(0.0),
        }
    }

    /// Posterior covariance between the surrogate values at two inputs.
    pub fn posterior_cov(&self, x1: f64, x2: f64) -> f64 {
        let mut w1 = self.kvec(x1);
        self.chol.solve_lower(&mut w1);
        let mut w2 = self.kvec(x2);
        self.chol.solve_lower(&mut w2);
        let dot: f64 = w1.iter().zip(&w2).map(|(a, b)| a * b).sum();
        self.sigma2_hat * (corr(x1, x2, self.theta_hat) - dot)
    }

    /// Factorization of the posterior covariance on `grid` for repeated
    /// path draws.
    pub fn posterior_factor(&self, grid: &[f64]) -> Result<PosteriorFactor, GpError> {
        let m = grid.len();
        let n = self.xs.len();
        let mut mu = vec![0.0; m];
        // Whitened cross-correlations, row per grid point.
        let mut w = vec![0.0; m * n];
        for (i, &g) in grid.iter().enumerate() {
            let k = self.kvec(g);
            mu[i] = self.beta_hat + k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>();
            let mut row = k;
            self.chol.solve_lower(&mut row);
            w[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        let s2 = self.sigma2_hat;
        let theta = self.theta_hat;
        let jitter = self.jitter;
        let diag: Vec<f64> = (0..m)
            .map(|i| {
                let q: f64 = w[i * n..(i + 1) * n].iter().map(|v| v * v).sum();
                (s2 * (1.0 - q)).max(0.0) + jitter
            })
            .collect();
        let max_diag = diag.iter().cloned().fold(0.0f64, f64::max);
        // The jitter floor is full-rank by construction and pivots clear
        // it one point at a time, so the stop tolerance must sit above it;
        // the truncated part under-disperses each point by at most `tol`.
        let tol = (1e-13 * max_diag).max(3.0 * jitter).max(1e-300);
        let factor = pivoted_cholesky(
            &diag,
            |j, out| {
                let wj = &w[j * n..(j + 1) * n];
                let gj = grid[j];
                for i in 0..m {
                    if i == j {
                        out[i] = diag[j];
                    } else {
                        let dot: f64 =
                            w[i * n..(i + 1) * n].iter().zip(wj).map(|(a, b)| a * b).sum();
                        out[i] = s2 * (corr(grid[i], gj, theta) - dot);
                    }
                }
            },
            tol,
            m.min(4096),
        )
        .map_err(|_| GpError::GridFactorization)?;
        if factor.rank() == m.min(4096) && factor.residual_diag.iter().any(|&d| d > tol) {
            return Err(GpError::GridFactorization);
        }
        Ok(PosteriorFactor { mu, factor })
    }

    /// `count` posterior sample paths on `grid`, deterministic in `seed`.
    /// Path `i` uses the derived stream `(seed, i)`.
    pub fn sample_posterior_paths(
        &self,
        grid: &[f64],
        count: usize,
        seed: u64,
    ) -> Result<Vec<Vec<f64>>, GpError> {
        assert!(count >= 1);
        let factor = self.posterior_factor(grid)?;
        Ok((0..count)
            .map(|i| {
                let mut out = vec![0.0; grid.len()];
                factor.draw_into(derive_stream(seed, i as u64), &mut out);
                out
            })
            .collect())
    }
}

/// Mean vector plus low-rank covariance factor for posterior draws.
pub struct PosteriorFactor {
    mu: Vec<f64>,
    factor: LowRankFactor,
}

impl PosteriorFactor {
    pub fn grid_len(&self) -> usize {
        self.mu.len()
    }

    pub fn rank(&self) -> usize {
        self.factor.rank()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mu
    }

    /// Writes one path drawn from the factored Gaussian into `out`.
    pub fn draw_into(&self, stream_seed: u64, out: &mut [f64]) {
        assert_eq!(out.len(), self.mu.len());
        out.copy_from_slice(&self.mu);
        let mut rng = Rng64::seed_from(stream_seed);
        for col in &self.factor.cols {
            let z = rng.next_normal();
            if z != 0.0 {
                for (o, &c) in out.iter_mut().zip(col.iter()) {
                    *o += z * c;
                }
            }
        }
    }
}
