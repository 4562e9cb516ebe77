//! Dormand–Prince 5(4) with Hairer's PI step control and 4th-order dense output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn norm(err: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = err.len() as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sk = atol + rtol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates y' = f(t, y) from `t0` to the last entry of `outputs` and calls
/// `emit(i, t_i, y(t_i))` for every requested output time, which must be
/// sorted and lie in [t0, t_end].
pub fn integrate<F, E>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    outputs: &[f64],
    opts: &OdeOptions,
    mut emit: E,
) -> Result<OdeStats>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    E: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    let n = y0.len();
    let t_end = match outputs.last() {
        Some(&t) => t,
        None => return Ok(OdeStats::default()),
    };
    let mut stats = OdeStats::default();
    let mut next_out = 0;
    let mut y = y0.to_vec();
    while next_out < outputs.len() && outputs[next_out] <= t0 {
        emit(next_out, outputs[next_out], &y)?;
        next_out += 1;
    }
    if next_out == outputs.len() {
        return Ok(stats);
    }

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut rcont = vec![[0.0; 5]; n];
    let mut out = vec![0.0; n];

    f(t0, &y, &mut k1);
    stats.evaluations += 1;

    let span = t_end - t0;
    let hmax = opts.max_step.min(span);
    let mut h = initial_step(&mut f, t0, &y, &k1, hmax, opts, &mut tmp, &mut y1);
    stats.evaluations += 1;
    let mut t = t0;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration { t_ps: t, reason: format!("exceeded {} steps", opts.max_steps) });
        }
        let last = t + 1.01 * h >= t_end;
        if last {
            h = t_end - t;
        }
        if h.abs() <= 1e-14 * t.abs().max(span) {
            return Err(Error::Integration { t_ps: t, reason: format!("step size underflow (h = {h:e})") });
        }

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t_end } else { t + h };
        f(t_new, &tmp, &mut k6);
        for i in 0..n {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t_new, &y1, &mut k7);
        stats.evaluations += 6;
        for i in 0..n {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = norm(&err, &y, &y1, opts.rtol, opts.atol);
        if !e.is_finite() {
            return Err(Error::Integration { t_ps: t, reason: "non-finite error estimate".into() });
        }

        let fac11 = e.powf(0.2 - BETA * 0.75);
        if e <= 1.0 {
            stats.accepted += 1;
            for i in 0..n {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[i] = [
                    y[i],
                    ydiff,
                    bspl,
                    ydiff - h * k7[i] - bspl,
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]),
                ];
            }
            while next_out < outputs.len() && outputs[next_out] <= t_new {
                let to = outputs[next_out];
                if to == t_new {
                    out.copy_from_slice(&y1);
                } else {
                    let th = (to - t) / h;
                    let th1 = 1.0 - th;
                    for i in 0..n {
                        let r = &rcont[i];
                        out[i] = r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
                    }
                }
                emit(next_out, to, &out)?;
                next_out += 1;
            }
            if last || next_out == outputs.len() {
                return Ok(stats);
            }
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            facold = e.max(1e-4);
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            let mut h_new = (h / fac).min(hmax);
            if last_rejected {
                h_new = h_new.min(h);
            }
            h = h_new;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    f: &mut F,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    hmax: f64,
    opts: &OdeOptions,
    y1: &mut [f64],
    f1: &mut [f64],
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len() as f64;
    let sk = |y: f64| opts.atol + opts.rtol * y.abs();
    let dnf = (f0.iter().zip(y0).map(|(d, y)| (d / sk(*y)).powi(2)).sum::<f64>() / n).sqrt();
    let dny = (y0.iter().map(|y| (y / sk(*y)).powi(2)).sum::<f64>() / n).sqrt();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * dny / dnf };
    h = h.min(hmax);
    for i in 0..y0.len() {
        y1[i] = y0[i] + h * f0[i];
    }
    f(t0 + h, y1, f1);
    let der2 = (f1.iter().zip(f0).zip(y0).map(|((a, b), y)| ((a - b) / sk(*y)).powi(2)).sum::<f64>() / n)
        .sqrt()
        / h;
    let der12 = dnf.max(der2);
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
    (100.0 * h).min(h1).min(hmax)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(rtol: f64) -> OdeOptions {
        OdeOptions { rtol, atol: rtol * 1e-2, max_step: f64::INFINITY, max_steps: 1_000_000 }
    }

    #[test]
    fn exponential_decay_with_dense_output() {
        let outs: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let mut got = vec![0.0; outs.len()];
        integrate(|_, y, dy| dy[0] = -y[0], 0.0, &[1.0], &outs, &opts(1e-10), |i, _, y| {
            got[i] = y[0];
            Ok(())
        })
        .unwrap();
        for (t, v) in outs.iter().zip(&got) {
            assert!((v - (-t).exp()).abs() < 1e-9, "t={t}: {v}");
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let outs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let mut max_err: f64 = 0.0;
        let stats = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            &outs,
            &opts(1e-11),
            |_, t, y| {
                max_err = max_err.max((y[0] - t.cos()).abs()).max((y[1] + t.sin()).abs());
                Ok(())
            },
        )
        .unwrap();
        assert!(max_err < 1e-9, "{max_err:e}");
        assert!(stats.accepted > 10);
    }

    #[test]
    fn error_tracks_tolerance() {
        let run = |rtol| {
            let mut last = 0.0;
            integrate(|t, y, dy| dy[0] = t.cos() * y[0], 0.0, &[1.0], &[10.0], &opts(rtol), |_, _, y| {
                last = y[0];
                Ok(())
            })
            .unwrap();
            (last - 10f64.sin().exp()).abs()
        };
        assert!(run(1e-6) < 1e-4);
        assert!(run(1e-11) < 1e-9);
    }

    #[test]
    fn emits_initial_point_and_respects_max_step() {
        let mut seen = Vec::new();
        let o = OdeOptions { max_step: 0.01, ..opts(1e-6) };
        let stats = integrate(|_, _, dy| dy[0] = 1.0, 0.0, &[0.0], &[0.0, 1.0], &o, |i, t, y| {
            seen.push((i, t, y[0]));
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 2);
        assert_eq!(seen[0], (0, 0.0, 0.0));
        assert!((seen[1].2 - 1.0).abs() < 1e-12);
        assert!(stats.accepted >= 100);
    }

    #[test]
    fn step_limit_reported() {
        let o = OdeOptions { max_steps: 5, max_step: 1e-3, ..opts(1e-8) };
        let r = integrate(|_, y, dy| dy[0] = -y[0], 0.0, &[1.0], &[1.0], &o, |_, _, _| Ok(()));
        assert!(matches!(r, Err(Error::Integration { .. })));
    }
}
