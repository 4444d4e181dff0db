//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use homecyber::attack_graph::AttackGraph;

/// Joint state law straight from the node and edge lists, indexed by mask
/// (bit `i` is node `i + 1`). No topological sorting: every factor is read
/// off the full state.
pub fn brute_joint(graph: &AttackGraph) -> Vec<f64> {
    let n = graph.nodes.len();
    (0..1u64 << n)
        .map(|mask| {
            let on = |id: u32| mask >> (id - 1) & 1 == 1;
            graph
                .nodes
                .iter()
                .map(|node| {
                    let p = match node.entry_prob {
                        Some(p) => p,
                        None => {
                            let miss: f64 = graph
                                .edges
                                .iter()
                                .filter(|e| e.dst == node.id && on(e.src))
                                .map(|e| 1.0 - e.cond_prob)
                                .product();
                            1.0 - miss
                        }
                    };
                    if on(node.id) {
                        p
                    } else {
                        1.0 - p
                    }
                })
                .product()
        })
        .collect()
}

pub fn brute_marginals(joint: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            joint
                .iter()
                .enumerate()
                .filter(|(m, _)| m >> i & 1 == 1)
                .map(|(_, p)| p)
                .sum()
        })
        .collect()
}

/// Mean absolute difference over ordered pairs `i != j`.
pub fn gmd_brute(xs: &[f64]) -> f64 {
    let n = xs.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (xs[i] - xs[j]).abs();
        }
    }
    s / (n * (n - 1)) as f64
}

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, eps / 2.0, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson over `[a, b]`, started from `panels` equal panels.
/// `rel` is relative to a coarse first estimate of the integral.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let coarse: f64 = (0..=panels).map(|k| f(a + k as f64 * h).abs()).sum::<f64>() * h;
    let eps = (rel * coarse).max(f64::MIN_POSITIVE);
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == panels { b } else { lo + h };
            let m = 0.5 * (lo + hi);
            let (flo, fhi, fm) = (f(lo), f(hi), f(m));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
            simpson_step(&f, lo, flo, hi, fhi, m, fm, whole, eps / panels as f64, 22)
        })
        .sum()
}

/// Reference family for the quadrature oracle.
#[derive(Debug, Clone, Copy)]
pub enum Law {
    Exponential(f64),
    Lognormal(f64, f64),
    Gamma(f64, f64),
}

/// `E[min((X - d)+, c)]` by integrating the payoff against the density.
/// Lognormal integrals run in log space; all others in x.
pub fn lev_quadrature(law: Law, d: f64, c: f64) -> f64 {
    let u = d + c;
    let payoff = |x: f64| (x - d).max(0.0).min(c);
    let eps = 1e-10;
    match law {
        Law::Exponential(rate) => {
            let hi = u.min(d + 60.0 / rate);
            let body = integrate(|x| (x - d) * rate * (-rate * x).exp(), d, hi, eps, 256);
            let tail = if u.is_finite() {
                c * integrate(|x| rate * (-rate * x).exp(), u, u + 60.0 / rate, eps, 256)
            } else {
                0.0
            };
            body + tail
        }
        Law::Lognormal(mu, sigma) => {
            let dens = |y: f64| {
                let z = (y - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            };
            let top = mu + 40.0 * sigma;
            let lo = if d > 0.0 { d.ln() } else { mu - 40.0 * sigma };
            let hi = if u.is_finite() { u.ln().min(top) } else { top };
            let body = integrate(|y| payoff(y.exp()) * dens(y), lo.min(hi), hi, eps, 512);
            let tail = if u.is_finite() && u.ln() < top {
                c * integrate(dens, u.ln(), top, eps, 512)
            } else {
                0.0
            };
            body + tail
        }
        Law::Gamma(alpha, beta) => {
            let lg = ln_gamma(alpha);
            let dens = |x: f64| {
                if x <= 0.0 {
                    return if alpha == 1.0 { beta } else { 0.0 };
                }
                (alpha * beta.ln() + (alpha - 1.0) * x.ln() - beta * x - lg).exp()
            };
            let (m, s) = (alpha / beta, alpha.sqrt() / beta);
            let far = m + 60.0 * s + 60.0 / beta;
            let start = d.max((m - 60.0 * s).max(0.0));
            let hi = u.min(far);
            let body = integrate(|x| (x - d) * dens(x), start.min(hi), hi, eps, 1024);
            let tail = if u < far {
                c * integrate(dens, u.max((m - 60.0 * s).max(0.0)), far, eps, 1024)
            } else {
                0.0
            };
            body + tail
        }
    }
}

/// Sample standard deviation with a two-pass mean.
pub fn sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
