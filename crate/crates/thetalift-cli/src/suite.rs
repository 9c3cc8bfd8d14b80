//! The identity suite: check definitions, configuration and the runner.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thetalift::arith::{htt, word_matrix, Letter, Mat2, UpperHalfPoint};
use thetalift::automorphic::{
    cusp_data, eval_maass, expected_widths, compute_i_cusp, petersson_quadrature,
    verify_up_identity, CoefficientSeries, IntegralPolicy, QuadraturePolicy, SeriesKind,
    TailModel,
};
use thetalift::finite_geom::{coset_containment_count, nilpotent_line_count, scaled, MatModP};
use thetalift::metaplectic::{cocycle_residual, eta_sum};
use thetalift::special::{
    bessel_k, v0_functional, w_h, whittaker_w, Envelope, SpectralParam,
};
use thetalift::theta::{
    fine_grid, multiplier_residual, published_grid, second_point, verify_identity, Identity,
    TruncationPolicy,
};
use thetalift::GroupSpec;
use thiserror::Error;

use crate::coeffs::{CoeffFile, IngestError};
use crate::report::{CheckRecord, ConfigEcho, Outcome, Timing, VerificationReport};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("the prime list is empty")]
    NoPrimes,
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("check `{0}` is exact and takes no tolerance")]
    ExactCheck(String),
    #[error("tolerance for `{check}` must be a nonnegative number, got `{value}`")]
    BadTolerance { check: String, value: String },
    #[error("tolerance override `{0}` is not of the form check=value")]
    BadOverride(String),
    #[error("THETALIFT_WORKERS = `{0}` is not a positive integer")]
    BadWorkers(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Group {
    Exact,
    Theta,
    Analytic,
    Parseval,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::Exact, Group::Theta, Group::Analytic, Group::Parseval];

    pub fn name(self) -> &'static str {
        match self {
            Group::Exact => "exact",
            Group::Theta => "theta",
            Group::Analytic => "analytic",
            Group::Parseval => "parseval",
        }
    }
}

/// Point grid and sample sizes. `Coarse` is quick; `Fine` uses the sample
/// sizes of the acceptance run and twice as many theta points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Grid {
    #[default]
    Coarse,
    Fine,
}

impl Grid {
    pub fn name(self) -> &'static str {
        match self {
            Grid::Coarse => "coarse",
            Grid::Fine => "fine",
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Sizes {
    line_random: usize,
    containment: usize,
    multiplier_words: usize,
    cocycle_pairs: usize,
    up_series: usize,
    parseval_series: usize,
    height_points: usize,
}

impl Grid {
    fn sizes(self) -> Sizes {
        match self {
            Grid::Coarse => Sizes {
                line_random: 10_000,
                containment: 1_000,
                multiplier_words: 40,
                cocycle_pairs: 200,
                up_series: 10,
                parseval_series: 2,
                height_points: 10_000,
            },
            Grid::Fine => Sizes {
                line_random: 100_000,
                containment: 10_000,
                multiplier_words: 200,
                cocycle_pairs: 1_000,
                up_series: 100,
                parseval_series: 20,
                height_points: 100_000,
            },
        }
    }

    fn theta_points(self) -> Vec<(UpperHalfPoint, UpperHalfPoint)> {
        match self {
            Grid::Coarse => published_grid(),
            Grid::Fine => fine_grid(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteConfig {
    pub groups: Vec<Group>,
    /// Replaces every check's own prime set when given.
    pub primes: Option<Vec<u64>>,
    pub tolerances: BTreeMap<String, f64>,
    pub grid: Grid,
    pub coeffs: Vec<PathBuf>,
    pub seed: u64,
    /// Restricts the run to these check ids; empty runs every check of the
    /// selected groups.
    pub checks: Vec<String>,
}

pub(crate) fn is_odd_prime(p: u64) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|q| q * q <= p).all(|q| p % q != 0)
}

fn odd_primes_up_to(n: u64) -> Vec<u64> {
    (3..=n).filter(|&p| is_odd_prime(p)).collect()
}

/// Parses `check=value`.
pub fn parse_override(s: &str) -> Result<(String, f64), ConfigError> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::BadOverride(s.into()))?;
    let val: f64 = v
        .trim()
        .parse()
        .map_err(|_| ConfigError::BadTolerance { check: k.into(), value: v.into() })?;
    if !(val >= 0.0) || !val.is_finite() {
        return Err(ConfigError::BadTolerance { check: k.into(), value: v.into() });
    }
    Ok((k.trim().to_string(), val))
}

/// Worker count from `THETALIFT_WORKERS`, if set.
pub fn workers_from_env() -> Result<Option<usize>, ConfigError> {
    match std::env::var("THETALIFT_WORKERS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::BadWorkers(v)),
        },
    }
}

struct Ctx<'a> {
    grid: Grid,
    seed: u64,
    primes: Option<&'a [u64]>,
    series: &'a [(String, CoefficientSeries)],
}

impl Ctx<'_> {
    fn primes_or(&self, default: Vec<u64>) -> Vec<u64> {
        self.primes.map(<[u64]>::to_vec).unwrap_or(default)
    }

    /// Independent stream per check so that selecting a subset of checks
    /// does not change any of them.
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

pub struct CheckDef {
    pub id: &'static str,
    pub anchor: &'static str,
    pub group: Group,
    /// `None` for exact checks.
    pub tolerance: Option<f64>,
    /// Only run when coefficient files are given.
    pub needs_coeffs: bool,
    run: fn(&Ctx) -> Outcome,
}

pub fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef {
            id: "finite_geom.line_count",
            anchor: "nilpotent line count: #{gB : x ∈ gLg⁻¹} is p+1 if x = 0, 1 if x ≠ 0 and tr x = det x = 0, else 0",
            group: Group::Exact,
            tolerance: None,
            needs_coeffs: false,
            run: line_count,
        },
        CheckDef {
            id: "finite_geom.coset_containment",
            anchor: "coset containment count: 0 unless tr α ∈ ℤ and det α ∈ p⁻¹ℤ, else 1 if α ∉ S and p+1 if α ∈ S",
            group: Group::Exact,
            tolerance: None,
            needs_coeffs: false,
            run: coset_containment,
        },
        CheckDef {
            id: "metaplectic.eta_sum",
            anchor: "cross-term vanishing: η(j) = ε_p (−j/p) and its sum over j = 1, …, p−1 vanishes",
            group: Group::Exact,
            tolerance: None,
            needs_coeffs: false,
            run: eta_sums,
        },
        CheckDef {
            id: "automorphic.cusp_table",
            anchor: "cusps of Γ₀(4/p): ∞, 1/2, 1, p/4, p/2, p with widths p, p, 4p, 1, 1, 4",
            group: Group::Exact,
            tolerance: None,
            needs_coeffs: false,
            run: cusp_table,
        },
        CheckDef {
            id: "arith.height",
            anchor: "height: htt(z) ≥ √3/2 for all z",
            group: Group::Exact,
            tolerance: None,
            needs_coeffs: false,
            run: height,
        },
        CheckDef {
            id: "metaplectic.multiplier",
            anchor: "theta multiplier: J(γ,z) = θ(γz)/θ(z) on Γ₀(4)",
            group: Group::Theta,
            tolerance: Some(1e-8),
            needs_coeffs: false,
            run: multiplier,
        },
        CheckDef {
            id: "metaplectic.cocycle",
            anchor: "theta multiplier cocycle: J(γ₁γ₂,z) = J(γ₁,γ₂z) J(γ₂,z)",
            group: Group::Theta,
            tolerance: Some(1e-12),
            needs_coeffs: false,
            run: cocycle,
        },
        CheckDef {
            id: "theta.pushforward",
            anchor: "pushforward identity: θ♯(w,z) = p θ(z)(p^{-1/2} Σ_j θ(w,(z+pj)/p²) + θ(w,z))",
            group: Group::Theta,
            tolerance: Some(1e-7),
            needs_coeffs: false,
            run: |c| theta_identity(c, Identity::Pushforward),
        },
        CheckDef {
            id: "theta.fricke",
            anchor: "Fricke relation: θ(R(p); w₁,w₂,−1/z) = p⁻¹ θ(R(1/p); w₁,w₂,z)",
            group: Group::Theta,
            tolerance: Some(1e-7),
            needs_coeffs: false,
            run: |c| theta_identity(c, Identity::Fricke),
        },
        CheckDef {
            id: "theta.mod4split",
            anchor: "mod-4 splitting: θ(R(1/p); w₁,w₂,z) = Σ_{j mod 4} θ(S(1/p); w₁,w₂,(z+pj)/4)",
            group: Group::Theta,
            tolerance: Some(1e-7),
            needs_coeffs: false,
            run: |c| theta_identity(c, Identity::Mod4Split),
        },
        CheckDef {
            id: "special.bridge",
            anchor: "Whittaker-Bessel bridge: W_{0,μ}(2y) = √(2y/π) K_μ(y)",
            group: Group::Analytic,
            tolerance: Some(1e-8),
            needs_coeffs: false,
            run: bridge,
        },
        CheckDef {
            id: "special.envelope",
            anchor: "Whittaker estimate: |W(y)| ≪ min(|y|^{1/2−ϑ/2}, |y|^{1/4} e^{−2π|y|})",
            group: Group::Analytic,
            tolerance: Some(0.01),
            needs_coeffs: false,
            run: envelope,
        },
        CheckDef {
            id: "special.v0_bracket",
            anchor: "V₀(u) ≍ log(1/u) for small u",
            group: Group::Analytic,
            tolerance: Some(0.0),
            needs_coeffs: false,
            run: v0_bracket,
        },
        CheckDef {
            id: "automorphic.volume",
            anchor: "volume of SL₂(ℤ)\\ℍ: ∫ dμ = π/3",
            group: Group::Analytic,
            tolerance: Some(1e-6),
            needs_coeffs: false,
            run: volume,
        },
        CheckDef {
            id: "automorphic.up_identity",
            anchor: "U_p identity: h♯(z) = p^{-1/2} Σ_k h((z−4pk)/p²) equals its coefficient expansion",
            group: Group::Parseval,
            tolerance: Some(1e-9),
            needs_coeffs: false,
            run: up_identity,
        },
        CheckDef {
            id: "automorphic.parseval",
            anchor: "Parseval evaluation of I(γ₁): box quadrature equals √p Σ_n |b(pn)|² |n|^{-1/2} V(nT/p) (relative)",
            group: Group::Parseval,
            tolerance: Some(1e-4),
            needs_coeffs: false,
            run: parseval,
        },
        CheckDef {
            id: "ingest.maass_modularity",
            anchor: "Maass form invariance: Ψ(−1/z) = Ψ(z) from the supplied λ(n) (relative)",
            group: Group::Analytic,
            tolerance: Some(1e-6),
            needs_coeffs: true,
            run: maass_modularity,
        },
        CheckDef {
            id: "ingest.up_identity",
            anchor: "U_p identity on the supplied b(n)",
            group: Group::Parseval,
            tolerance: Some(1e-9),
            needs_coeffs: true,
            run: ingested_up_identity,
        },
    ]
}

/// Validates the configuration and loads coefficient files.
fn prepare(config: &SuiteConfig) -> Result<Vec<(String, CoefficientSeries)>, ConfigError> {
    if let Some(ps) = &config.primes {
        if ps.is_empty() {
            return Err(ConfigError::NoPrimes);
        }
        if let Some(&bad) = ps.iter().find(|&&p| !is_odd_prime(p)) {
            return Err(ConfigError::NotOddPrime(bad));
        }
    }
    let defs = checks();
    if let Some(id) = config.checks.iter().find(|id| !defs.iter().any(|d| d.id == id.as_str())) {
        return Err(ConfigError::UnknownCheck(id.clone()));
    }
    for id in config.tolerances.keys() {
        match defs.iter().find(|d| d.id == id) {
            None => return Err(ConfigError::UnknownCheck(id.clone())),
            Some(d) if d.tolerance.is_none() => return Err(ConfigError::ExactCheck(id.clone())),
            Some(_) => {}
        }
    }
    config
        .coeffs
        .iter()
        .map(|p| Ok((p.display().to_string(), CoeffFile::read(p)?.to_series()?)))
        .collect()
}

/// Runs the selected groups (exact first) and assembles the report.
pub fn run_suite(config: &SuiteConfig) -> Result<(VerificationReport, Vec<Timing>), ConfigError> {
    let series = prepare(config)?;
    let ctx = Ctx { grid: config.grid, seed: config.seed, primes: config.primes.as_deref(), series: &series };
    let mut groups = if config.groups.is_empty() { Group::ALL.to_vec() } else { config.groups.clone() };
    groups.sort();
    groups.dedup();
    let defs: Vec<(usize, CheckDef)> = checks()
        .into_iter()
        .enumerate()
        .filter(|(_, d)| groups.contains(&d.group) && (!d.needs_coeffs || !series.is_empty()))
        .filter(|(_, d)| config.checks.is_empty() || config.checks.iter().any(|c| c == d.id))
        .collect();
    let mut records = Vec::new();
    let mut timings = Vec::new();
    for exact in [true, false] {
        let batch: Vec<&(usize, CheckDef)> = defs.iter().filter(|(_, d)| d.tolerance.is_none() == exact).collect();
        let results: Vec<(Outcome, f64)> = batch
            .par_iter()
            .map(|(_, d)| {
                let start = Instant::now();
                let out = (d.run)(&ctx);
                (out, start.elapsed().as_secs_f64())
            })
            .collect();
        for ((_, d), (outcome, secs)) in batch.into_iter().zip(results) {
            let tolerance = config.tolerances.get(d.id).copied().or(d.tolerance);
            let passed = outcome.failures == 0
                && outcome.cases > 0
                && match (tolerance, outcome.residual) {
                    (Some(tol), Some(r)) => r <= tol,
                    (Some(_), None) => false,
                    (None, _) => true,
                };
            timings.push(Timing { id: d.id, seconds: secs });
            records.push(CheckRecord {
                id: d.id,
                anchor: d.anchor,
                group: d.group.name(),
                exact,
                tolerance,
                passed,
                outcome,
            });
        }
    }
    let echo = ConfigEcho {
        groups: groups.iter().map(|g| g.name()).collect(),
        primes: config.primes.clone(),
        tolerances: config.tolerances.clone(),
        grid: config.grid.name(),
        coeffs: series.iter().map(|(p, _)| p.clone()).collect(),
        seed: config.seed,
        checks: config.checks.clone(),
    };
    Ok((VerificationReport::new(echo, records), timings))
}

pub fn random_gamma04(rng: &mut ChaCha8Rng, max_len: usize) -> Mat2 {
    let letters = [Letter::T, Letter::TInv, Letter::U, Letter::UInv];
    let len = rng.random_range(1..=max_len);
    let word: Vec<Letter> = (0..len).map(|_| letters[rng.random_range(0..4)]).collect();
    word_matrix(&word)
}

/// Uniform coefficients in `[-1, 1]` on every admissible `0 < |n| ≤ max_index`.
pub fn random_half_series(rng: &mut ChaCha8Rng, max_index: i64) -> CoefficientSeries {
    let coeffs: Vec<(i64, f64)> = (-max_index..=max_index)
        .filter(|n| *n != 0 && n.rem_euclid(4) <= 1)
        .map(|n| (n, rng.random_range(-1.0..1.0)))
        .collect();
    CoefficientSeries::half_integral(SpectralParam::default_maass(), coeffs)
        .expect("admissible indices only")
        .with_tail_model(TailModel::Vanishing)
}

fn primes_json(ps: &[u64]) -> serde_json::Value {
    json!(ps)
}

fn line_count(ctx: &Ctx) -> Outcome {
    let primes = ctx.primes_or(vec![3, 5, 7, 11, 13]);
    let mut out = Outcome::default();
    out.input("primes", primes_json(&primes));
    out.input("exhaustive_up_to", 7);
    out.input("random_samples", ctx.grid.sizes().line_random);
    let mut rng = ctx.rng(1);
    for &p in &primes {
        let pi = p as i64;
        let xs: Vec<[i64; 4]> = if p <= 7 {
            (0..pi.pow(4)).map(|k| [k % pi, k / pi % pi, k / pi / pi % pi, k / pi / pi / pi]).collect()
        } else {
            (0..ctx.grid.sizes().line_random).map(|_| std::array::from_fn(|_| rng.random_range(0..pi))).collect()
        };
        let results: Vec<Result<u64, String>> = xs
            .par_iter()
            .map(|m| {
                MatModP::new(m[0], m[1], m[2], m[3], p)
                    .and_then(|x| nilpotent_line_count(&x))
                    .map_err(|e| e.to_string())
            })
            .collect();
        let mut hist = [0u64; 3];
        for r in results {
            match r {
                Ok(n) => {
                    hist[if n == 0 { 0 } else if n == 1 { 1 } else { 2 }] += 1;
                    out.exact(true, String::new);
                }
                Err(e) => out.exact(false, || e),
            }
        }
        out.observe(&format!("p{p}"), json!({"zero": hist[0], "one": hist[1], "p_plus_one": hist[2]}));
    }
    out
}

/// A random element of `p⁻¹S` from coordinates in the basis
/// `{I, 2E12, 2E21, diag(1,-1)}`. With `admissible`, redrawn until
/// `tr α ∈ ℤ` and `det α ∈ p⁻¹ℤ`.
fn random_scaled_s(rng: &mut ChaCha8Rng, p: u64, admissible: bool) -> Mat2 {
    let r = 3 * p as i64;
    let pi = p as i64;
    loop {
        let [m, b, c, h]: [i64; 4] = std::array::from_fn(|_| rng.random_range(-r..=r));
        let e = [m + h, 2 * b, 2 * c, m - h];
        let tr = e[0] + e[3];
        let det = e[0] * e[3] - e[1] * e[2];
        if !admissible || (tr % pi == 0 && det % pi == 0) {
            return scaled(e, p);
        }
    }
}

fn coset_containment(ctx: &Ctx) -> Outcome {
    let primes = ctx.primes_or(vec![3, 5, 7]);
    let n = ctx.grid.sizes().containment;
    let mut out = Outcome::default();
    out.input("primes", primes_json(&primes));
    out.input("samples_per_prime", n);
    out.input("admissible_share", 0.5);
    let mut rng = ctx.rng(2);
    for &p in &primes {
        let alphas: Vec<Mat2> = (0..n).map(|k| random_scaled_s(&mut rng, p, k % 2 == 0)).collect();
        let results: Vec<Result<u64, String>> =
            alphas.par_iter().map(|a| coset_containment_count(a, p).map_err(|e| e.to_string())).collect();
        let mut hist = [0u64; 3];
        for r in results {
            match r {
                Ok(k) => {
                    hist[if k == 0 { 0 } else if k == 1 { 1 } else { 2 }] += 1;
                    out.exact(true, String::new);
                }
                Err(e) => out.exact(false, || e),
            }
        }
        out.observe(&format!("p{p}"), json!({"zero": hist[0], "one": hist[1], "p_plus_one": hist[2]}));
    }
    out
}

fn eta_sums(ctx: &Ctx) -> Outcome {
    let primes = ctx.primes_or(odd_primes_up_to(101));
    let mut out = Outcome::default();
    out.input("primes", primes_json(&primes));
    for &p in &primes {
        match eta_sum(p as i64) {
            Ok(s) => out.exact(s == (0, 0), || format!("p = {p}: Σ η(j) = {} + {}i", s.0, s.1)),
            Err(e) => out.error(format!("p = {p}: {e}")),
        }
    }
    out
}

fn cusp_table(ctx: &Ctx) -> Outcome {
    let primes = ctx.primes_or(odd_primes_up_to(31));
    let mut out = Outcome::default();
    out.input("primes", primes_json(&primes));
    for &p in &primes {
        match cusp_data(p) {
            Ok(data) => {
                let names: Vec<String> = data.iter().map(|d| d.cusp.to_string()).collect();
                let want = ["∞".to_string(), "1/2".into(), "1".into(), format!("{p}/4"), format!("{p}/2"), format!("{p}")];
                let widths: Vec<u64> = data.iter().map(|d| d.width).collect();
                let sum: u64 = widths.iter().sum();
                let ok = names == want && widths == expected_widths(p) && sum == 6 * (p + 1);
                out.exact(ok, || format!("p = {p}: cusps {names:?}, widths {widths:?}"));
            }
            Err(e) => out.error(format!("p = {p}: {e}")),
        }
    }
    out
}

fn height(ctx: &Ctx) -> Outcome {
    let n = ctx.grid.sizes().height_points;
    let mut out = Outcome::default();
    out.input("points", n);
    out.input("y_range", json!([1e-6, 10.0]));
    let mut rng = ctx.rng(3);
    let pts: Vec<UpperHalfPoint> = (0..n)
        .map(|_| UpperHalfPoint { x: rng.random_range(-3.0..3.0), y: 10f64.powf(rng.random_range(-6.0..1.0)) })
        .collect();
    let bound = 3f64.sqrt() / 2.0;
    let hs: Vec<Result<f64, String>> = pts.par_iter().map(|z| htt(z).map_err(|e| e.to_string())).collect();
    let mut min = f64::INFINITY;
    for (z, h) in pts.iter().zip(hs) {
        match h {
            Ok(h) => {
                min = min.min(h);
                out.exact(h >= bound, || format!("htt({z:?}) = {h}"));
            }
            Err(e) => out.error(e),
        }
    }
    out.observe("min_height", min);
    out
}

fn multiplier(ctx: &Ctx) -> Outcome {
    let n = ctx.grid.sizes().multiplier_words;
    let mut out = Outcome::default();
    out.input("words", n);
    out.input("max_word_length", 12);
    out.input("points", "z coordinates of the fixed grid");
    let mut rng = ctx.rng(4);
    let gs: Vec<Mat2> = (0..n).map(|_| random_gamma04(&mut rng, 12)).collect();
    let pol = TruncationPolicy::default();
    let res: Vec<Result<f64, String>> = gs
        .par_iter()
        .flat_map_iter(|g| {
            published_grid()
                .into_iter()
                .map(move |(_, z)| multiplier_residual(g, &z, &pol).map_err(|e| format!("{g}: {e}")))
        })
        .collect();
    for r in res {
        match r {
            Ok(r) => out.residual(r),
            Err(e) => out.error(e),
        }
    }
    out
}

fn cocycle(ctx: &Ctx) -> Outcome {
    let n = ctx.grid.sizes().cocycle_pairs;
    let mut out = Outcome::default();
    out.input("pairs", n);
    let mut rng = ctx.rng(5);
    for _ in 0..n {
        let (g1, g2) = (random_gamma04(&mut rng, 12), random_gamma04(&mut rng, 12));
        let z = UpperHalfPoint { x: rng.random_range(-0.5..0.5), y: rng.random_range(0.1..3.0) };
        match cocycle_residual(&g1, &g2, &z) {
            Ok(r) => out.residual(r),
            Err(e) => out.error(e),
        }
    }
    out
}

fn theta_identity(ctx: &Ctx, which: Identity) -> Outcome {
    let primes = ctx.primes_or(vec![3, 5]);
    let grid = ctx.grid.theta_points();
    let mut out = Outcome::default();
    out.input("primes", primes_json(&primes));
    out.input("points", grid.len());
    let pol = TruncationPolicy::default();
    out.input("target_abs_error", pol.target_abs_error);
    let jobs: Vec<(u64, UpperHalfPoint, UpperHalfPoint)> =
        primes.iter().flat_map(|&p| grid.iter().map(move |&(w, z)| (p, w, z))).collect();
    let res: Vec<Result<(f64, f64), String>> = jobs
        .par_iter()
        .map(|(p, w, z)| {
            verify_identity(which, *p, w, &second_point(w), z, &pol)
                .map(|c| (c.residual, c.tail))
                .map_err(|e| format!("p = {p}: {e}"))
        })
        .collect();
    let mut tail: f64 = 0.0;
    for r in res {
        match r {
            Ok((r, t)) => {
                out.residual(r);
                tail = tail.max(t);
            }
            Err(e) => out.error(e),
        }
    }
    out.observe("max_certified_tail", tail);
    out
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn bridge(_: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let nus = [0.7, thetalift::special::DEFAULT_T / 2.0];
    out.input("nu", json!(nus));
    out.input("y", "0.05·1.35^k, k = 0..19");
    for nu in nus {
        for k in 0..20 {
            let y = 0.05 * 1.35f64.powi(k);
            let w = whittaker_w(0.0, Complex64::new(0.0, nu), 2.0 * y);
            let b = bessel_k(SpectralParam::Real(nu), y);
            match (w, b) {
                (Ok(w), Ok(b)) => out.residual(rel(w, (2.0 * y / PI).sqrt() * b)),
                (Err(e), _) | (_, Err(e)) => out.error(e),
            }
        }
    }
    out
}

/// Excess of `|W|` over `C · min(|y|^{1/2-ϑ/2}, large shape)` on
/// `1e-6 ≤ |y| ≤ 10`, one constant `C` per sign calibrated at `|y| = 10`,
/// `ϑ = 0.49`.
fn envelope(_: &Ctx) -> Outcome {
    let t = SpectralParam::default_maass();
    let theta = 0.49;
    let mut out = Outcome::default();
    out.input("t", thetalift::special::DEFAULT_T);
    out.input("calibration_point", 10.0);
    out.input("vartheta", theta);
    out.input("y_range", json!([1e-6, 10.0]));
    let small = Envelope::Small(theta);
    for (sign, large, name) in [(1.0, Envelope::Large, "positive"), (-1.0, Envelope::LargeNegative, "negative")] {
        let run = || -> Result<(f64, f64), thetalift::special::SpecialError> {
            let c = w_h(t, sign * 10.0)?.abs() / large.shape(10.0);
            let mut worst: f64 = 0.0;
            for k in 0..=2000 {
                let y = 1e-6 * 1e7f64.powf(k as f64 / 2000.0);
                worst = worst.max(w_h(t, sign * y)?.abs() / (c * small.shape(y).min(large.shape(y))));
            }
            Ok((c, worst))
        };
        match run() {
            Ok((c, worst)) => {
                out.observe(name, json!({"constant": c, "max_ratio": worst}));
                out.residual((worst - 1.0).max(0.0));
            }
            Err(e) => out.error(e),
        }
    }
    out
}

/// Brackets for `V₀(±u)/log(1/u)` on `u ∈ [1e-8, 1e-2]`, fixed for the
/// shipped spectral parameter.
const V0_BRACKETS: [(f64, f64, f64); 2] = [(1.0, 1.5e-6, 2.5e-6), (-1.0, 3e-7, 5e-7)];

fn v0_bracket(_: &Ctx) -> Outcome {
    let t = SpectralParam::default_maass();
    let mut out = Outcome::default();
    out.input("t", thetalift::special::DEFAULT_T);
    out.input("u_range", json!([1e-8, 1e-2]));
    out.input("brackets", json!({"positive": [V0_BRACKETS[0].1, V0_BRACKETS[0].2], "negative": [V0_BRACKETS[1].1, V0_BRACKETS[1].2]}));
    let us: Vec<f64> = (0..=24).map(|k| 1e-8 * 1e6f64.powf(k as f64 / 24.0)).collect();
    for (sign, lo, hi) in V0_BRACKETS {
        let ratios: Vec<Result<f64, String>> = us
            .par_iter()
            .map(|&u| v0_functional(t, sign * u).map(|v| v / (1.0 / u).ln()).map_err(|e| e.to_string()))
            .collect();
        let (mut min, mut max) = (f64::INFINITY, 0.0f64);
        for r in ratios {
            match r {
                Ok(q) => {
                    min = min.min(q);
                    max = max.max(q);
                    // relative excursion outside the bracket
                    out.residual(((lo - q) / lo).max((q - hi) / hi).max(0.0));
                }
                Err(e) => out.error(e),
            }
        }
        out.observe(if sign > 0.0 { "positive" } else { "negative" }, json!([min, max]));
    }
    out
}

fn volume(_: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let pol = QuadraturePolicy::default();
    out.input("cutoff", pol.cutoff);
    let env = |_: f64| 1.0;
    match petersson_quadrature(|_| 1.0, Some(&env), GroupSpec::sl2z(), &pol) {
        Ok(v) => {
            out.observe("value", v.value);
            out.observe("tail_bound", v.tail_bound);
            out.residual((v.value - PI / 3.0).abs());
        }
        Err(e) => out.error(e),
    }
    out
}

fn up_identity(ctx: &Ctx) -> Outcome {
    let primes = ctx.primes_or(vec![3, 5, 7, 11]);
    let n = ctx.grid.sizes().up_series;
    let mut out = Outcome::default();
    out.input("primes", primes_json(&primes));
    out.input("series_per_prime", n);
    out.input("support", json!([20, 300]));
    out.input("points_per_series", 2);
    let mut rng = ctx.rng(6);
    let mut jobs = Vec::new();
    for &p in &primes {
        for _ in 0..n {
            let max = rng.random_range(20..=300);
            let s = random_half_series(&mut rng, max);
            let zs: Vec<UpperHalfPoint> = (0..2)
                .map(|_| UpperHalfPoint { x: rng.random_range(-2.0..2.0), y: rng.random_range(0.5..3.0) })
                .collect();
            jobs.push((p, s, zs));
        }
    }
    let res: Vec<Vec<Result<f64, String>>> = jobs
        .par_iter()
        .map(|(p, s, zs)| {
            zs.iter()
                .map(|z| verify_up_identity(s, *p, z).map(|c| c.residual).map_err(|e| format!("p = {p}: {e}")))
                .collect()
        })
        .collect();
    for r in res.into_iter().flatten() {
        match r {
            Ok(r) => out.residual(r),
            Err(e) => out.error(e),
        }
    }
    out
}

fn parseval(ctx: &Ctx) -> Outcome {
    let primes = ctx.primes_or(vec![5]);
    let n = ctx.grid.sizes().parseval_series;
    let height = 1.0;
    let mut out = Outcome::default();
    out.input("primes", primes_json(&primes));
    out.input("series_per_prime", n);
    out.input("support", 200);
    out.input("T", height);
    let pol = IntegralPolicy::default();
    let mut rng = ctx.rng(7);
    let jobs: Vec<(u64, CoefficientSeries)> =
        primes.iter().flat_map(|&p| (0..n).map(|_| (p, random_half_series(&mut rng, 200))).collect::<Vec<_>>()).collect();
    let res: Vec<Result<(f64, f64), String>> = jobs
        .par_iter()
        .map(|(p, s)| {
            let c = compute_i_cusp(s, *p, height, 1, &pol).map_err(|e| format!("p = {p}: {e}"))?;
            Ok((c.quadrature, c.formula.unwrap_or(f64::NAN)))
        })
        .collect();
    let mut worst_abs: f64 = 0.0;
    for r in res {
        match r {
            Ok((q, f)) => {
                worst_abs = worst_abs.max((q - f).abs());
                out.residual(rel(q, f));
            }
            Err(e) => out.error(e),
        }
    }
    out.observe("max_abs_difference", worst_abs);
    out
}

fn maass_modularity(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let zs = [(0.25, 0.9), (-0.1, 1.2), (0.4, 0.95), (0.05, 1.05)];
    out.input("points", json!(zs));
    let mut files = Vec::new();
    for (path, s) in ctx.series.iter().filter(|(_, s)| s.kind() == SeriesKind::MaassIntegral) {
        files.push(path.clone());
        for &(x, y) in &zs {
            let z = UpperHalfPoint { x, y };
            let sz = UpperHalfPoint::from_complex(-z.to_complex().inv()).expect("upper half plane is preserved");
            match (eval_maass(s, &z), eval_maass(s, &sz)) {
                (Ok(a), Ok(b)) => out.residual(rel(b, a)),
                (Err(e), _) | (_, Err(e)) => out.error(format!("{path}: {e}")),
            }
        }
    }
    out.input("files", json!(files));
    out
}

fn ingested_up_identity(ctx: &Ctx) -> Outcome {
    let primes = ctx.primes_or(vec![3, 5, 7, 11]);
    let mut out = Outcome::default();
    out.input("primes", primes_json(&primes));
    let zs = [(0.3, 2.0), (-0.7, 1.5), (1.1, 2.5)];
    out.input("points", json!(zs));
    let mut files = Vec::new();
    for (path, s) in ctx.series.iter().filter(|(_, s)| s.kind() == SeriesKind::HalfIntegral) {
        files.push(path.clone());
        for &p in &primes {
            for &(x, y) in &zs {
                match verify_up_identity(s, p, &UpperHalfPoint { x, y }) {
                    Ok(c) => out.residual(c.residual),
                    Err(e) => out.error(format!("{path}, p = {p}: {e}")),
                }
            }
        }
    }
    out.input("files", json!(files));
    out
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_primes() {
        let small: Vec<u64> = (0..40).filter(|&p| is_odd_prime(p)).collect();
        assert_eq!(small, [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert_eq!(odd_primes_up_to(101).len(), 25);
        assert!(!is_odd_prime(9) && !is_odd_prime(2) && is_odd_prime(101));
    }

    #[test]
    fn overrides() {
        assert_eq!(parse_override("theta.fricke=1e-9").unwrap(), ("theta.fricke".into(), 1e-9));
        assert!(matches!(parse_override("x"), Err(ConfigError::BadOverride(_))));
        for bad in ["a=-1", "a=inf", "a=NaN", "a="] {
            assert!(matches!(parse_override(bad), Err(ConfigError::BadTolerance { .. })), "{bad}");
        }
    }

    #[test]
    fn check_table_is_consistent() {
        let defs = checks();
        let mut ids: Vec<&str> = defs.iter().map(|d| d.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), defs.len());
        for d in &defs {
            assert_eq!(d.group == Group::Exact, d.tolerance.is_none(), "{}", d.id);
        }
    }

    #[test]
    fn random_alphas_lie_in_scaled_s() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [3, 5, 7] {
            for k in 0..50 {
                let a = random_scaled_s(&mut rng, p, k % 2 == 0);
                assert!(coset_containment_count(&a, p).is_ok());
            }
        }
    }
}
