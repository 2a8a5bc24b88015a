//! Adaptive Dormand–Prince 5(4) integration of the master equation.

use std::io::Write;

use nalgebra::DMatrix;

use super::generator::LindbladGenerator;
use super::operators::C64;
use super::states::check_density_matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Output spacing in ns; `None` records only the endpoints.
    pub sample_interval: Option<f64>,
    pub max_step: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, sample_interval: None, max_step: f64::INFINITY }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// ns
    pub times: Vec<f64>,
    pub states: Vec<DMatrix<C64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &DMatrix<C64> {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn expectation(&self, op: &DMatrix<C64>) -> Vec<C64> {
        self.states.iter().map(|rho| (op * rho).trace()).collect()
    }

    /// CSV with `t_ns`, every population `P_k_n` in basis order, then
    /// `re_i_j`, `im_i_j` for each requested coherence `ρ_ij`.
    pub fn write_csv<W: Write>(&self, out: W, fock_dim: usize, coherences: &[(usize, usize)]) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let d = self.states.first().map_or(0, |r| r.nrows());
        let mut header = vec!["t_ns".to_string()];
        header.extend((0..d).map(|i| format!("P_{}_{}", i / fock_dim, i % fock_dim)));
        for &(i, j) in coherences {
            header.push(format!("re_{i}_{j}"));
            header.push(format!("im_{i}_{j}"));
        }
        w.write_record(&header)?;
        for (t, rho) in self.times.iter().zip(&self.states) {
            let mut row = vec![format!("{t:.16e}")];
            row.extend((0..d).map(|i| format!("{:.16e}", rho[(i, i)].re)));
            for &(i, j) in coherences {
                row.push(format!("{:.16e}", rho[(i, j)].re));
                row.push(format!("{:.16e}", rho[(i, j)].im));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

// Dormand–Prince tableau; the system is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

pub fn evolve(gen: &LindbladGenerator, rho0: &DMatrix<C64>, t_max: f64, opts: EvolveOptions) -> Result<Trajectory> {
    let d = gen.dim();
    check_density_matrix(rho0, d, 1e-10)?;
    let n = d * d;
    let mut y: Vec<C64> = rho0.as_slice().to_vec();
    let mut traj = Trajectory { times: vec![0.0], states: vec![rho0.clone()], accepted_steps: 0, rejected_steps: 0 };
    if t_max <= 0.0 {
        return Ok(traj);
    }
    let zero = C64::new(0.0, 0.0);
    let mut k: Vec<Vec<C64>> = vec![vec![zero; n]; 7];
    let mut stage = vec![zero; n];
    let mut y_new = vec![zero; n];

    gen.apply_vec(&y, &mut k[0]);
    let scale0 = y.iter().map(|v| v.norm()).fold(0.0, f64::max).max(opts.atol);
    let rate = k[0].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut h = if rate > 0.0 { (0.01 * scale0 / rate).min(opts.max_step) } else { opts.max_step.min(t_max) };
    let mut t = 0.0;
    let sample = opts.sample_interval.filter(|s| *s > 0.0);
    let mut next_sample_index = 1usize;

    while t < t_max {
        let target = match sample {
            Some(s) => (next_sample_index as f64 * s).min(t_max),
            None => t_max,
        };
        let step = h.min(target - t).min(opts.max_step);
        let landing = step >= target - t;
        if step <= 1e-14 * t.max(1.0) {
            return Err(Error::StepUnderflow { t, step });
        }

        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, a) in A[s][..s].iter().enumerate() {
                    if *a != 0.0 {
                        acc += k[j][i] * (*a * step);
                    }
                }
                stage[i] = acc;
            }
            gen.apply_vec(&stage, &mut k[s]);
        }
        // stage now holds the fifth-order solution (row 6 of A are its weights)
        y_new.copy_from_slice(&stage);
        let mut err = 0.0f64;
        for i in 0..n {
            let mut e = zero;
            for (j, w) in E.iter().enumerate() {
                if *w != 0.0 {
                    e += k[j][i] * *w;
                }
            }
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max((e * step).norm() / sc);
        }

        if err <= 1.0 {
            t = if landing { target } else { t + step };
            symmetrize(&mut y_new, d);
            std::mem::swap(&mut y, &mut y_new);
            gen.apply_vec(&y, &mut k[0]);
            traj.accepted_steps += 1;
            if landing && (sample.is_some() || t >= t_max) {
                traj.times.push(t);
                traj.states.push(DMatrix::from_column_slice(d, d, &y));
                next_sample_index += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !landing || factor < 1.0 {
                h = step * factor;
            }
        } else {
            traj.rejected_steps += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok(traj)
}

/// `ρ ← (ρ + ρ†)/2` on a column-major vector.
fn symmetrize(y: &mut [C64], d: usize) {
    for j in 0..d {
        y[j + j * d].im = 0.0;
        for i in 0..j {
            let avg = (y[i + j * d] + y[j + i * d].conj()) * 0.5;
            y[i + j * d] = avg;
            y[j + i * d] = avg.conj();
        }
    }
}

/// Frequency in GHz of a signal `≈ A e^{−i2πft}`: the signal is demodulated
/// at `reference`, and the unwrapped phase is fitted by linear regression.
pub fn demodulated_frequency(times: &[f64], signal: &[C64], reference: f64) -> f64 {
    let mut phases = Vec::with_capacity(times.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for (t, z) in times.iter().zip(signal) {
        let raw = (z * C64::from_polar(1.0, std::f64::consts::TAU * reference * t)).arg();
        if let Some(p) = prev {
            let mut delta = raw + offset - p;
            while delta > std::f64::consts::PI {
                offset -= std::f64::consts::TAU;
                delta -= std::f64::consts::TAU;
            }
            while delta < -std::f64::consts::PI {
                offset += std::f64::consts::TAU;
                delta += std::f64::consts::TAU;
            }
        }
        let phase = raw + offset;
        phases.push(phase);
        prev = Some(phase);
    }
    let n = times.len() as f64;
    let mt = times.iter().sum::<f64>() / n;
    let mp = phases.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, p) in times.iter().zip(&phases) {
        sxy += (t - mt) * (p - mp);
        sxx += (t - mt) * (t - mt);
    }
    reference - sxy / sxx / std::f64::consts::TAU
}
