use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_noise::LinearNoiseModel;
use crate::samplers::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Analytical,
    Empirical,
}

/// Power spectral density of predator fluctuations on a grid of angular
/// frequencies.
///
/// Values are the two-sided density (variance = integral over all real
/// `omega` divided by `2 pi`); only `omega > 0` is stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub kind: SpectrumKind,
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
    /// Standard error of the mean per frequency (empirical spectra only).
    pub std_error: Vec<f64>,
    pub realizations: usize,
}

impl SpectrumResult {
    /// Frequency and power of the largest value with `lo <= omega <= hi`.
    pub fn peak_in(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        self.omega
            .iter()
            .zip(&self.power)
            .filter(|(w, _)| (lo..=hi).contains(*w))
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(w, p)| (*w, *p))
    }

    /// Sum of the stored power times the frequency spacing.
    pub fn total_power(&self) -> f64 {
        if self.omega.len() < 2 {
            return self.power.iter().sum();
        }
        let dw = self.omega[1] - self.omega[0];
        self.power.iter().sum::<f64>() * dw
    }
}

/// Parameters of the closed-form spectrum
/// `P(w) = (Theta + Lambda w^2) / ((w^2 - Omega0^2)^2 + Gamma^2 w^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    pub theta: f64,
    pub lambda: f64,
    pub omega0_sq: f64,
    pub gamma: f64,
}

impl SpectralCoefficients {
    pub fn power(&self, w: f64) -> f64 {
        let w2 = w * w;
        (self.theta + self.lambda * w2) / ((w2 - self.omega0_sq).powi(2) + self.gamma * self.gamma * w2)
    }

    /// Frequency of the maximum of the denominator's resonance,
    /// `sqrt(Omega0^2 - Gamma^2 / 2)`, when it exists.
    pub fn resonance(&self) -> Option<f64> {
        let v = self.omega0_sq - self.gamma * self.gamma / 2.0;
        (v > 0.0).then(|| v.sqrt())
    }
}

/// Expectations over independent noises of variance `sigma^2`. The two
/// terms in `xi_2` combine before squaring.
pub fn spectral_coefficients(model: &LinearNoiseModel) -> Result<SpectralCoefficients> {
    let (psi, phi) = (model.psi, model.phi);
    let omega0_sq = psi[0][1] * psi[1][0].abs();
    if omega0_sq < 0.0 {
        return Err(Error::Unstable(format!("Psi_12 |Psi_21| = {omega0_sq} is negative")));
    }
    let s2 = model.sigma * model.sigma;
    let theta = s2
        * ((psi[0][1] * phi[1][0]).powi(2)
            + (psi[0][1] * phi[1][1] - psi[1][1] * phi[0][1]).powi(2)
            + (psi[0][1] * phi[1][2]).powi(2)
            + (psi[1][1] * phi[0][3]).powi(2));
    let lambda = s2 * (phi[0][1].powi(2) + phi[0][3].powi(2));
    Ok(SpectralCoefficients { theta, lambda, omega0_sq, gamma: psi[1][1].abs() })
}

pub fn analytical_spectrum(model: &LinearNoiseModel, omega: &[f64]) -> Result<SpectrumResult> {
    let c = spectral_coefficients(model)?;
    Ok(SpectrumResult {
        kind: SpectrumKind::Analytical,
        omega: omega.to_vec(),
        power: omega.iter().map(|&w| c.power(w)).collect(),
        std_error: Vec::new(),
        realizations: 0,
    })
}

/// Averaged periodogram of the predator density of cell 0.
pub fn empirical_spectrum(trajs: &[Trajectory], detrend: bool) -> Result<SpectrumResult> {
    empirical_spectrum_cell(trajs, 0, detrend)
}

/// Averaged periodogram `dt / n |DFT_k|^2` of the predator density of one
/// cell, at `omega_k = 2 pi k / (n dt)` for `k = 1 ..= n / 2`. With
/// `detrend` each series has its own mean removed first.
pub fn empirical_spectrum_cell(trajs: &[Trajectory], cell: usize, detrend: bool) -> Result<SpectrumResult> {
    let first = trajs.first().ok_or_else(|| Error::InvalidConfig("no trajectories".into()))?;
    let dt = first
        .uniform_step()
        .ok_or_else(|| Error::GridMismatch("spectrum needs a uniform time grid".into()))?;
    if cell >= first.n_cells() {
        return Err(Error::InvalidDimension(format!("cell {cell} out of range")));
    }
    for t in &trajs[1..] {
        first.same_grid(t)?;
    }
    let n = first.len();
    let half = n / 2;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut sum = vec![0.0; half];
    let mut sum_sq = vec![0.0; half];
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for t in trajs {
        let x = t.predator_series(cell);
        let mean = if detrend { x.iter().sum::<f64>() / n as f64 } else { 0.0 };
        for (b, v) in buf.iter_mut().zip(&x) {
            *b = Complex::new(v - mean, 0.0);
        }
        fft.process(&mut buf);
        for k in 1..=half {
            let p = dt / n as f64 * buf[k].norm_sqr();
            sum[k - 1] += p;
            sum_sq[k - 1] += p * p;
        }
    }
    let r = trajs.len() as f64;
    let power: Vec<f64> = sum.iter().map(|s| s / r).collect();
    let std_error = sum_sq
        .iter()
        .zip(&power)
        .map(|(sq, m)| if r > 1.0 { ((sq / r - m * m).max(0.0) * r / (r - 1.0) / r).sqrt() } else { 0.0 })
        .collect();
    Ok(SpectrumResult {
        kind: SpectrumKind::Empirical,
        omega: (1..=half).map(|k| 2.0 * std::f64::consts::PI * k as f64 / (n as f64 * dt)).collect(),
        power,
        std_error,
        realizations: trajs.len(),
    })
}

/// Exponential decay rate of an oscillation's envelope: least-squares slope
/// of `ln |x|` at the local maxima of `|x|`, negated.
pub fn envelope_decay_rate(times: &[f64], x: &[f64]) -> Result<f64> {
    let peaks: Vec<(f64, f64)> = (1..x.len().saturating_sub(1))
        .filter(|&i| x[i].abs() > x[i - 1].abs() && x[i].abs() >= x[i + 1].abs() && x[i] != 0.0)
        .map(|i| (times[i], x[i].abs().ln()))
        .collect();
    if peaks.len() < 3 {
        return Err(Error::Fit(format!("only {} envelope peaks", peaks.len())));
    }
    let n = peaks.len() as f64;
    let mt = peaks.iter().map(|p| p.0).sum::<f64>() / n;
    let my = peaks.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = peaks.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = peaks.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(-sxy / sxx)
}
