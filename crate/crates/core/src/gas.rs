//! Dilute two-species gas: elastic collisions between particles whose
//! momenta are either collinear and proportional (entangled ensemble) or
//! independent Maxwell-Boltzmann draws (product ensemble).
//!
//! Units: `hbar = k_B = 1`. Momenta are plain `[f64; 3]`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::Stream;

pub type Vec3 = [f64; 3];

/// Events per reduction chunk. Fixed so that the summation order, and hence
/// every bit of the result, does not depend on the worker count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleLaw {
    /// `cos(theta)` uniform on `[-1, 1]`, azimuth uniform.
    #[default]
    Isotropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GasMode {
    Entangled,
    Product,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionSpec {
    pub m_a: f64,
    pub m_b: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub gamma: f64,
    #[serde(default = "one")]
    pub m_scale: f64,
    /// Weight events by relative speed. `None` picks the mode default: on
    /// for product ensembles, off for entangled ones.
    #[serde(default)]
    pub flux_weighting: Option<bool>,
    #[serde(default)]
    pub angle_law: AngleLaw,
}

impl CollisionSpec {
    pub fn new(m_a: f64, m_b: f64, t_a: f64, t_b: f64, gamma: f64) -> Self {
        Self { m_a, m_b, t_a, t_b, gamma, m_scale: 1.0, flux_weighting: None, angle_law: AngleLaw::Isotropic }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m_a", self.m_a),
            ("m_b", self.m_b),
            ("t_a", self.t_a),
            ("t_b", self.t_b),
            ("gamma", self.gamma),
            ("m_scale", self.m_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `sqrt(gamma T_a m_a / m_scale)`.
    pub fn alpha_a(&self) -> f64 {
        (self.gamma * self.t_a * self.m_a / self.m_scale).sqrt()
    }

    pub fn alpha_b(&self) -> f64 {
        (self.gamma * self.t_b * self.m_b / self.m_scale).sqrt()
    }

    /// `(m_a / m_b)(T_b / T_a)`; the hotter gas `a` gains energy in the
    /// entangled ensemble exactly when this exceeds 1.
    pub fn reversal_ratio(&self) -> f64 {
        (self.m_a / self.m_b) * (self.t_b / self.t_a)
    }

    pub fn flux_for(&self, mode: GasMode) -> bool {
        self.flux_weighting.unwrap_or(mode == GasMode::Product)
    }
}

/// `x = [m_a / (m_a + m_b)] [(alpha_a + alpha_b) / alpha_a]`.
pub fn x_parameter(spec: &CollisionSpec) -> f64 {
    let (aa, ab) = (spec.alpha_a(), spec.alpha_b());
    spec.m_a / (spec.m_a + spec.m_b) * ((aa + ab) / aa)
}

/// Fractional kinetic energy gain of particle `a`: `4x(x-1) sin^2(theta/2)`.
pub fn fractional_gain(x: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    4.0 * x * (x - 1.0) * s * s
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn kinetic_energy(p: &Vec3, m: f64) -> f64 {
    dot(p, p) / (2.0 * m)
}

/// Change in the relative momentum `q = (m_b p_a - m_a p_b) / M` when it is
/// rotated by polar angle `theta` and `azimuth` about its own direction.
///
/// Frame: `e1 = normalize(q_hat x z_hat)` (or `x_hat` when `q` is along
/// `z`), `e2 = q_hat x e1`. The polar part is written as
/// `-2 sin^2(theta/2)` rather than `cos(theta) - 1` to keep small angles
/// accurate.
fn relative_kick(p_a: &Vec3, p_b: &Vec3, m_a: f64, m_b: f64, theta: f64, azimuth: f64) -> Vec3 {
    let total = m_a + m_b;
    let q: Vec3 = std::array::from_fn(|i| (m_b * p_a[i] - m_a * p_b[i]) / total);
    let q_len = norm(&q);
    if q_len == 0.0 {
        return [0.0; 3];
    }
    let q_hat = scale(&q, 1.0 / q_len);
    let mut e1 = cross(&q_hat, &[0.0, 0.0, 1.0]);
    let e1_len = norm(&e1);
    e1 = if e1_len < 1e-8 { [1.0, 0.0, 0.0] } else { scale(&e1, 1.0 / e1_len) };
    // the fallback x_hat is perpendicular to q_hat only up to O(1e-8); project it
    let along = dot(&e1, &q_hat);
    e1 = std::array::from_fn(|i| e1[i] - along * q_hat[i]);
    e1 = scale(&e1, 1.0 / norm(&e1));
    let e2 = cross(&q_hat, &e1);

    let half = (0.5 * theta).sin();
    let polar = -2.0 * half * half;
    let (sp, cp) = azimuth.sin_cos();
    let st = theta.sin();
    std::array::from_fn(|i| q_len * (polar * q_hat[i] + st * (cp * e1[i] + sp * e2[i])))
}

/// Elastic collision: the total momentum is unchanged and the relative
/// momentum is rotated by `(theta, azimuth)`. Zero relative momentum leaves
/// both particles untouched.
pub fn collide(p_a: &Vec3, p_b: &Vec3, m_a: f64, m_b: f64, theta: f64, azimuth: f64) -> (Vec3, Vec3) {
    let dq = relative_kick(p_a, p_b, m_a, m_b, theta, azimuth);
    (std::array::from_fn(|i| p_a[i] + dq[i]), std::array::from_fn(|i| p_b[i] - dq[i]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub p_a: Vec3,
    pub p_b: Vec3,
    pub p_a_out: Vec3,
    pub p_b_out: Vec3,
    pub theta: f64,
    pub azimuth: f64,
    /// Kinetic energy gained by `a`.
    pub de_a: f64,
    pub weight: f64,
}

impl CollisionEvent {
    pub fn energy_a(&self, m_a: f64) -> f64 {
        kinetic_energy(&self.p_a, m_a)
    }

    /// `de_a / E_a`, zero when `a` starts at rest.
    pub fn fractional_gain(&self, m_a: f64) -> f64 {
        let e = self.energy_a(m_a);
        if e > 0.0 {
            self.de_a / e
        } else {
            0.0
        }
    }
}

fn build_event(p_a: Vec3, p_b: Vec3, spec: &CollisionSpec, theta: f64, azimuth: f64, flux: bool) -> CollisionEvent {
    let dq = relative_kick(&p_a, &p_b, spec.m_a, spec.m_b, theta, azimuth);
    let p_a_out: Vec3 = std::array::from_fn(|i| p_a[i] + dq[i]);
    let p_b_out: Vec3 = std::array::from_fn(|i| p_b[i] - dq[i]);
    // (p'^2 - p^2) / 2m written as dq.(2p + dq) / 2m: no cancellation
    let de_a = (0..3).map(|i| dq[i] * (2.0 * p_a[i] + dq[i])).sum::<f64>() / (2.0 * spec.m_a);
    let weight = if flux {
        let rel: Vec3 = std::array::from_fn(|i| p_a[i] / spec.m_a - p_b[i] / spec.m_b);
        norm(&rel)
    } else {
        1.0
    };
    CollisionEvent { p_a, p_b, p_a_out, p_b_out, theta, azimuth, de_a, weight }
}

fn draw_angles(spec: &CollisionSpec, rng: &mut Stream) -> (f64, f64) {
    match spec.angle_law {
        AngleLaw::Isotropic => {
            let cos_theta = rng.uniform_in(-1.0, 1.0);
            let azimuth = rng.uniform_in(0.0, 2.0 * PI);
            (cos_theta.clamp(-1.0, 1.0).acos(), azimuth)
        }
    }
}

fn gaussian3(rng: &mut Stream, sd: f64) -> Vec3 {
    let (a, b) = rng.normal_pair();
    let (c, _) = rng.normal_pair();
    [a * sd, b * sd, c * sd]
}

/// `k` isotropic Gaussian with per-component variance `m_scale / gamma`,
/// `p_a = alpha_a k`, `p_b = alpha_b k`. Consumes 6 words.
pub fn sample_entangled_event(spec: &CollisionSpec, rng: &mut Stream) -> CollisionEvent {
    let k = gaussian3(rng, (spec.m_scale / spec.gamma).sqrt());
    let (theta, azimuth) = draw_angles(spec, rng);
    build_event(
        scale(&k, spec.alpha_a()),
        scale(&k, spec.alpha_b()),
        spec,
        theta,
        azimuth,
        spec.flux_for(GasMode::Entangled),
    )
}

/// Independent Maxwell-Boltzmann momenta with per-component variance `m T`.
/// Consumes 10 words.
pub fn sample_product_event(spec: &CollisionSpec, rng: &mut Stream) -> CollisionEvent {
    let p_a = gaussian3(rng, (spec.m_a * spec.t_a).sqrt());
    let p_b = gaussian3(rng, (spec.m_b * spec.t_b).sqrt());
    let (theta, azimuth) = draw_angles(spec, rng);
    build_event(p_a, p_b, spec, theta, azimuth, spec.flux_for(GasMode::Product))
}

pub fn sample_event(spec: &CollisionSpec, mode: GasMode, rng: &mut Stream) -> CollisionEvent {
    match mode {
        GasMode::Entangled => sample_entangled_event(spec, rng),
        GasMode::Product => sample_product_event(spec, rng),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatDirection {
    HotterGains,
    HotterLoses,
    /// Equal temperatures, or a mean of exactly zero.
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasReport {
    pub mode: GasMode,
    pub n_samples: usize,
    pub seed: u64,
    pub flux_weighting: bool,
    pub mean_de_a: f64,
    pub stderr: f64,
    /// Entangled mode only.
    pub mean_fractional_gain: Option<f64>,
    pub fractional_gain_stderr: Option<f64>,
    /// `2x(x-1)`, the isotropic average of the closed-form gain.
    pub expected_mean_gain: Option<f64>,
    pub x: f64,
    pub reversal_ratio: f64,
    pub direction: HeatDirection,
    /// `mean_de_a / stderr`.
    pub z_score: f64,
}

/// Weighted sums for the mean and standard error of two per-event
/// observables.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    w: f64,
    w2: f64,
    // [sum w x, sum w^2 x, sum w^2 x^2] for de_a and for the gain
    de: [f64; 3],
    gain: [f64; 3],
}

impl Moments {
    fn push(&mut self, w: f64, de: f64, gain: f64) {
        self.n += 1;
        self.w += w;
        self.w2 += w * w;
        for (acc, x) in [(&mut self.de, de), (&mut self.gain, gain)] {
            acc[0] += w * x;
            acc[1] += w * w * x;
            acc[2] += w * w * x * x;
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        self.n += other.n;
        self.w += other.w;
        self.w2 += other.w2;
        for i in 0..3 {
            self.de[i] += other.de[i];
            self.gain[i] += other.gain[i];
        }
        self
    }

    /// Weighted mean `m = sum w x / sum w` and standard error
    /// `sqrt(n/(n-1) sum w^2 (x-m)^2) / sum w`.
    fn mean_stderr(&self, acc: &[f64; 3]) -> (f64, f64) {
        let m = acc[0] / self.w;
        let ss = (acc[2] - 2.0 * m * acc[1] + m * m * self.w2).max(0.0);
        let n = self.n as f64;
        (m, (n / (n - 1.0) * ss).sqrt() / self.w)
    }
}

/// Samples `n` events and reports the (weighted) mean energy gain of `a`.
/// Event `i` draws from stream `(seed, i)`; results are bit-identical for
/// any rayon pool size.
pub fn ensemble_heat(spec: &CollisionSpec, mode: GasMode, n: usize, seed: u64) -> Result<GasReport> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::InvalidSpec(format!("need at least 2 samples, got {n}")));
    }
    let chunks: Vec<Moments> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let ev = sample_event(spec, mode, &mut Stream::new(seed, i as u64));
                m.push(ev.weight, ev.de_a, ev.fractional_gain(spec.m_a));
            }
            m
        })
        .collect();
    let total = chunks.iter().fold(Moments::default(), |acc, m| acc.merge(m));

    let (mean_de_a, stderr) = total.mean_stderr(&total.de);
    let x = x_parameter(spec);
    let (mean_gain, gain_se, expected) = match mode {
        GasMode::Entangled => {
            let (g, se) = total.mean_stderr(&total.gain);
            let expected = match spec.angle_law {
                AngleLaw::Isotropic => 2.0 * x * (x - 1.0),
            };
            (Some(g), Some(se), Some(expected))
        }
        GasMode::Product => (None, None, None),
    };
    let a_is_hotter = spec.t_a > spec.t_b;
    let direction = if spec.t_a == spec.t_b || mean_de_a == 0.0 {
        HeatDirection::Neutral
    } else if (mean_de_a > 0.0) == a_is_hotter {
        HeatDirection::HotterGains
    } else {
        HeatDirection::HotterLoses
    };
    Ok(GasReport {
        mode,
        n_samples: n,
        seed,
        flux_weighting: spec.flux_for(mode),
        mean_de_a,
        stderr,
        mean_fractional_gain: mean_gain,
        fractional_gain_stderr: gain_se,
        expected_mean_gain: expected,
        x,
        reversal_ratio: spec.reversal_ratio(),
        direction,
        z_score: if stderr > 0.0 { mean_de_a / stderr } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> CollisionSpec {
        CollisionSpec::new(10.0, 1.0, 2.0, 1.0, 1.0)
    }

    fn total_energy(p_a: &Vec3, p_b: &Vec3, m_a: f64, m_b: f64) -> f64 {
        kinetic_energy(p_a, m_a) + kinetic_energy(p_b, m_b)
    }

    #[test]
    fn x_parameter_examples() {
        let s = demo();
        assert!((s.alpha_a() - 20f64.sqrt()).abs() < 1e-14);
        assert!((s.alpha_b() - 1.0).abs() < 1e-14);
        let x = x_parameter(&s);
        let oracle = 10.0 / 11.0 * (20f64.sqrt() + 1.0) / 20f64.sqrt();
        assert!((x - oracle).abs() < 1e-15);
        assert!((x - 1.11237).abs() < 1e-5);
        assert!((2.0 * x * (x - 1.0) - 0.25).abs() < 1e-3);
        assert!((x_parameter(&CollisionSpec::new(3.0, 3.0, 1.5, 1.5, 2.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_sign_matches_reversal_ratio() {
        let mut rng = Stream::new(80, 0);
        for _ in 0..1000 {
            let mut v = [0.0; 4];
            for e in &mut v {
                *e = (rng.uniform_in(-3.0, 3.0)).exp();
            }
            let s = CollisionSpec::new(v[0], v[1], v[2], v[3], rng.uniform_in(0.1, 5.0));
            let r = s.reversal_ratio() - 1.0;
            if r.abs() > 1e-9 {
                assert_eq!(x_parameter(&s) > 1.0, r > 0.0);
            }
        }
    }

    #[test]
    fn fractional_gain_examples() {
        assert_eq!(fractional_gain(1.0, 1.3), 0.0);
        assert_eq!(fractional_gain(0.0, 2.0), 0.0);
        assert_eq!(fractional_gain(1.7, 0.0), 0.0);
        assert!((fractional_gain(2.0, PI) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn collide_trivial_cases() {
        let (pa, pb) = ([1.0, 2.0, -0.5], [0.3, -1.0, 4.0]);
        let (a, b) = collide(&pa, &pb, 2.0, 3.0, 0.0, 1.1);
        assert_eq!((a, b), (pa, pb));
        // equal masses, head-on, backscatter: momenta swap
        let (a, b) = collide(&[0.0, 0.0, 1.5], &[0.0, 0.0, -0.5], 1.0, 1.0, PI, 0.4);
        for i in 0..3 {
            assert!((a[i] - [0.0, 0.0, -0.5][i]).abs() < 1e-15);
            assert!((b[i] - [0.0, 0.0, 1.5][i]).abs() < 1e-15);
        }
        // zero relative momentum
        let (a, b) = collide(&[2.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 2.0, 1.0, 1.0, 1.0);
        assert_eq!((a, b), ([2.0, 0.0, 0.0], [1.0, 0.0, 0.0]));
    }

    #[test]
    fn collide_conserves() {
        let mut rng = Stream::new(81, 0);
        for _ in 0..10_000 {
            let pa = gaussian3(&mut rng, 2.0);
            let pb = gaussian3(&mut rng, 0.5);
            let (ma, mb) = (rng.uniform_in(0.1, 10.0), rng.uniform_in(0.1, 10.0));
            let (th, az) = (rng.uniform_in(0.0, PI), rng.uniform_in(0.0, 2.0 * PI));
            let (a, b) = collide(&pa, &pb, ma, mb, th, az);
            let scale_p = norm(&pa) + norm(&pb);
            for i in 0..3 {
                assert!((a[i] + b[i] - pa[i] - pb[i]).abs() <= 1e-12 * scale_p);
            }
            let e0 = total_energy(&pa, &pb, ma, mb);
            assert!((total_energy(&a, &b, ma, mb) - e0).abs() <= 1e-12 * e0);
            // the relative momentum is turned by exactly theta
            let q0: Vec3 = std::array::from_fn(|i| (mb * pa[i] - ma * pb[i]) / (ma + mb));
            let q1: Vec3 = std::array::from_fn(|i| (mb * a[i] - ma * b[i]) / (ma + mb));
            let c = dot(&q0, &q1) / (norm(&q0) * norm(&q1));
            assert!((c - th.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn collide_along_z_uses_fallback_frame() {
        let (a, b) = collide(&[0.0, 0.0, 2.0], &[0.0, 0.0, 0.0], 1.0, 1.0, 0.5, 0.0);
        let e0 = total_energy(&[0.0, 0.0, 2.0], &[0.0; 3], 1.0, 1.0);
        assert!((total_energy(&a, &b, 1.0, 1.0) - e0).abs() < 1e-14);
        assert!(a[0].abs() > 0.0 && a[1] == 0.0);
    }

    #[test]
    fn entangled_events_follow_closed_form() {
        let s = demo();
        let x = x_parameter(&s);
        for i in 0..2000 {
            let ev = sample_entangled_event(&s, &mut Stream::new(82, i));
            let f = fractional_gain(x, ev.theta);
            let g = ev.fractional_gain(s.m_a);
            assert!((g - f).abs() <= 1e-10 * f.abs().max(f64::MIN_POSITIVE), "{g} vs {f}");
            if ev.theta > 0.0 {
                assert!(ev.de_a > 0.0);
            }
            assert_eq!(ev.weight, 1.0);
        }
    }

    #[test]
    fn entangled_marginal_temperature() {
        let s = demo();
        let n = 200_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for i in 0..n {
            let ev = sample_entangled_event(&s, &mut Stream::new(83, i));
            let e = ev.energy_a(s.m_a);
            sum += e;
            sum2 += e * e;
        }
        let mean = sum / n as f64;
        let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.5 * s.t_a).abs() < 3.0 * se, "{mean} vs {}", 1.5 * s.t_a);
    }

    #[test]
    fn ensemble_reversal_and_normal_flow() {
        let s = demo();
        let ent = ensemble_heat(&s, GasMode::Entangled, 100_000, 1).unwrap();
        let g = ent.mean_fractional_gain.unwrap();
        assert!((g - ent.expected_mean_gain.unwrap()).abs() < 3.0 * ent.fractional_gain_stderr.unwrap());
        assert!(ent.mean_de_a > 0.0 && ent.direction == HeatDirection::HotterGains);

        let prod = ensemble_heat(&s, GasMode::Product, 200_000, 1).unwrap();
        assert!(prod.flux_weighting);
        assert!(prod.mean_de_a < 0.0 && prod.direction == HeatDirection::HotterLoses);
        assert!(prod.z_score < -5.0, "z {}", prod.z_score);
    }

    #[test]
    fn symmetric_ensembles_are_neutral() {
        let s = CollisionSpec::new(2.0, 2.0, 1.3, 1.3, 1.0);
        let prod = ensemble_heat(&s, GasMode::Product, 100_000, 3).unwrap();
        assert!(prod.mean_de_a.abs() < 3.0 * prod.stderr);
        let ent = ensemble_heat(&s, GasMode::Entangled, 10_000, 3).unwrap();
        assert!(ent.mean_fractional_gain.unwrap().abs() < 1e-12);
    }

    #[test]
    fn ensemble_is_pool_independent() {
        let s = demo();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| ensemble_heat(&s, GasMode::Product, 20_000, 9).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.mean_de_a.to_bits(), b.mean_de_a.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn weighted_stderr_matches_direct_formula() {
        let data = [(1.0, 0.5), (2.0, -1.0), (0.5, 3.0), (1.5, 0.25)];
        let mut m = Moments::default();
        for &(w, x) in &data {
            m.push(w, x, 0.0);
        }
        let (mean, se) = m.mean_stderr(&m.de);
        let sw: f64 = data.iter().map(|d| d.0).sum();
        let direct_mean = data.iter().map(|d| d.0 * d.1).sum::<f64>() / sw;
        let ss: f64 = data.iter().map(|d| d.0 * d.0 * (d.1 - direct_mean).powi(2)).sum();
        assert!((mean - direct_mean).abs() < 1e-15);
        assert!((se - (4.0 / 3.0 * ss).sqrt() / sw).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let mut s = demo();
        s.t_a = 0.0;
        assert!(matches!(ensemble_heat(&s, GasMode::Product, 10, 0), Err(Error::InvalidSpec(_))));
        assert!(matches!(ensemble_heat(&demo(), GasMode::Product, 1, 0), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn flux_defaults_follow_mode() {
        let mut s = demo();
        assert_eq!(s.m_scale, 1.0);
        assert!(s.flux_for(GasMode::Product) && !s.flux_for(GasMode::Entangled));
        s.flux_weighting = Some(true);
        assert!(s.flux_for(GasMode::Entangled));
        assert!(sample_entangled_event(&s, &mut Stream::new(84, 0)).weight > 0.0);
    }
}
