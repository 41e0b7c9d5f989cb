//! Monte Carlo harness: two-arm multivariate normal scenario sampling,
//! marginal power and error-rate estimation, random graph generation, and a
//! brute-force subset-weight oracle for property tests.
//!
//! Replicates draw from independent RNG streams keyed by (seed, replicate
//! index), so they can run in any order or in parallel; all accumulation is
//! in exact integers and reports are bit-for-bit reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::config::ProcedureConfig;
use crate::dispatch::{run_procedure, ProcedureKind};
use crate::error::MtpError;
use crate::graph::TestingGraph;
use crate::pvalues::PValues;
use crate::subset::IndexSet;
use crate::weight::{rational_to_f64, Weight};
use crate::weighting::Weighting;

/// An additional test statistic independent of the two-arm endpoints,
/// normally distributed with unit-variance null reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtraStat {
    pub mean: f64,
    pub sd: f64,
}

/// A two-arm trial scenario: per-endpoint means and standard deviations for
/// the control and treatment arms, a common correlation `rho` across
/// endpoints, and a per-arm sample size `n` acting as a covariance scale
/// divisor. Endpoint statistics are z-scores of the mean difference;
/// `extra_stats` appends independent normal statistics after the endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub mu_control: Vec<f64>,
    pub mu_treatment: Vec<f64>,
    pub sd_control: Vec<f64>,
    pub sd_treatment: Vec<f64>,
    pub rho: f64,
    pub n: f64,
    pub extra_stats: Vec<ExtraStat>,
    pub n_reps: u64,
    pub seed: u64,
    pub procedure: ProcedureKind,
    pub config: ProcedureConfig,
}

impl SimulationSpec {
    /// Number of hypotheses: endpoints plus extra statistics.
    pub fn num_hypotheses(&self) -> usize {
        self.mu_control.len() + self.extra_stats.len()
    }

    pub fn validate(&self) -> Result<(), MtpError> {
        let d = self.mu_control.len();
        if self.mu_treatment.len() != d || self.sd_control.len() != d || self.sd_treatment.len() != d
        {
            return Err(MtpError::Usage(
                "mean and standard deviation vectors must have equal length".into(),
            ));
        }
        if d > 0 {
            // Positive definiteness of the equicorrelation matrix.
            let lower = if d > 1 { -1.0 / (d as f64 - 1.0) } else { -1.0 };
            if !(self.rho > lower && self.rho < 1.0) {
                return Err(MtpError::Usage(format!(
                    "correlation {} outside ({lower}, 1)",
                    self.rho
                )));
            }
        }
        if !(self.n > 0.0) {
            return Err(MtpError::Usage("sample size must be positive".into()));
        }
        if self.n_reps == 0 {
            return Err(MtpError::Usage("need at least one replication".into()));
        }
        if self.sd_control.iter().chain(&self.sd_treatment).any(|s| *s < 0.0)
            || self.extra_stats.iter().any(|e| e.sd < 0.0)
        {
            return Err(MtpError::Usage("standard deviations must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Draws one vector of equicorrelated standard normals using the closed-form
/// square root of the correlation matrix, `a*I + b*J` with `a = sqrt(1-rho)`.
fn equicorrelated(rng: &mut impl Rng, d: usize, rho: f64, normal: &Normal) -> Vec<f64> {
    let z: Vec<f64> = (0..d).map(|_| normal.inverse_cdf(uniform_open(rng))).collect();
    if rho == 0.0 || d == 0 {
        return z;
    }
    let a = (1.0 - rho).sqrt();
    let b = ((1.0 - rho + d as f64 * rho).sqrt() - a) / d as f64;
    let total: f64 = z.iter().sum();
    z.iter().map(|zi| a * zi + b * total).collect()
}

/// Uniform draw strictly inside (0, 1).
fn uniform_open(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 && u < 1.0 {
            return u;
        }
    }
}

fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Samples the test statistics and one-sided upper-tail p-values for one
/// replicate. Deterministic given `(spec.seed, replicate)`.
pub fn sample_test_statistics(spec: &SimulationSpec, replicate: u64) -> (Vec<f64>, Vec<f64>) {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = replicate_rng(spec.seed, replicate);
    let d = spec.mu_control.len();
    let scale = spec.n.sqrt();
    let z_control = equicorrelated(&mut rng, d, spec.rho, &normal);
    let z_treatment = equicorrelated(&mut rng, d, spec.rho, &normal);
    let mut stats = Vec::with_capacity(spec.num_hypotheses());
    for i in 0..d {
        let mean_c = spec.mu_control[i] + spec.sd_control[i] / scale * z_control[i];
        let mean_t = spec.mu_treatment[i] + spec.sd_treatment[i] / scale * z_treatment[i];
        let pooled_sd = ((spec.sd_control[i].powi(2) + spec.sd_treatment[i].powi(2)) / spec.n)
            .sqrt();
        stats.push((mean_t - mean_c) / pooled_sd);
    }
    for extra in &spec.extra_stats {
        stats.push(extra.mean + extra.sd * normal.inverse_cdf(uniform_open(&mut rng)));
    }
    let pvalues = stats.iter().map(|t| 1.0 - normal.cdf(*t)).collect();
    (stats, pvalues)
}

/// Estimated error rates for one configuration, relative to a truth labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRates {
    /// Estimated probability of at least `k` false rejections.
    pub kfwer: f64,
    pub kfwer_se: f64,
    /// Estimated tail probability of the false discovery proportion
    /// exceeding `gamma`.
    pub fdp_tail: f64,
    pub fdp_tail_se: f64,
    /// Estimated mean false discovery proportion.
    pub mean_fdp: f64,
    pub mean_fdp_se: f64,
    pub k: usize,
    pub gamma: f64,
}

/// Monte Carlo estimates: marginal rejection frequencies with binomial
/// standard errors, and error rates when a truth labeling was supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    pub n_reps: u64,
    pub marginal_counts: Vec<u64>,
    pub error_rates: Option<ErrorRates>,
}

impl PowerReport {
    pub fn marginal_power(&self, i: usize) -> f64 {
        self.marginal_counts[i] as f64 / self.n_reps as f64
    }

    pub fn marginal_se(&self, i: usize) -> f64 {
        let f = self.marginal_power(i);
        (f * (1.0 - f) / self.n_reps as f64).sqrt()
    }

    /// Comma-separated rendering, one row per hypothesis.
    pub fn to_csv(&self, labels: &[String]) -> String {
        let mut out = String::from("hypothesis,rejections,power,se\n");
        for (i, label) in labels.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{:.6},{:.6}\n",
                label,
                self.marginal_counts[i],
                self.marginal_power(i),
                self.marginal_se(i)
            ));
        }
        out
    }

    /// Aligned human-readable rendering.
    pub fn to_table(&self, labels: &[String]) -> String {
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(0).max(10);
        let mut out = format!(
            "{:width$}  {:>10}  {:>8}  {:>8}\n",
            "hypothesis", "rejections", "power", "se"
        );
        for (i, label) in labels.iter().enumerate() {
            out.push_str(&format!(
                "{:width$}  {:>10}  {:>8.4}  {:>8.4}\n",
                label,
                self.marginal_counts[i],
                self.marginal_power(i),
                self.marginal_se(i)
            ));
        }
        if let Some(e) = &self.error_rates {
            out.push_str(&format!(
                "\nP(V >= {}) = {:.4} (se {:.4})\nP(FDP > {}) = {:.4} (se {:.4})\nE[FDP] = {:.4} (se {:.4})\n",
                e.k, e.kfwer, e.kfwer_se, e.gamma, e.fdp_tail, e.fdp_tail_se, e.mean_fdp, e.mean_fdp_se
            ));
        }
        out
    }
}

fn binomial_se(count: u64, n: u64) -> f64 {
    let f = count as f64 / n as f64;
    (f * (1.0 - f) / n as f64).sqrt()
}

struct Tally {
    marginal: Vec<u64>,
    at_least_k: u64,
    fdp_exceeds: u64,
    // FDP scaled by lcm(1..=m) so sums stay exact integers.
    fdp_scaled_sum: u128,
    fdp_scaled_sq_sum: u128,
}

impl Tally {
    fn zero(m: usize) -> Self {
        Tally {
            marginal: vec![0; m],
            at_least_k: 0,
            fdp_exceeds: 0,
            fdp_scaled_sum: 0,
            fdp_scaled_sq_sum: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.marginal.iter_mut().zip(&other.marginal) {
            *a += b;
        }
        self.at_least_k += other.at_least_k;
        self.fdp_exceeds += other.fdp_exceeds;
        self.fdp_scaled_sum += other.fdp_scaled_sum;
        self.fdp_scaled_sq_sum += other.fdp_scaled_sq_sum;
        self
    }
}

fn lcm_upto(m: usize) -> u64 {
    (1..=m.max(1) as u64).fold(1, num_integer::lcm)
}

fn run_replicates(
    spec: &SimulationSpec,
    weighting: &dyn Weighting,
    nulls: Option<&[bool]>,
) -> Result<PowerReport, MtpError> {
    spec.validate()?;
    let m = spec.num_hypotheses();
    if m != weighting.num_hypotheses() {
        return Err(MtpError::Usage(format!(
            "scenario has {m} hypotheses but the weighting has {}",
            weighting.num_hypotheses()
        )));
    }
    if let Some(n) = nulls {
        if n.len() != m {
            return Err(MtpError::Usage("truth labels must cover every hypothesis".into()));
        }
    }
    let scale = lcm_upto(m);
    let gamma = rational_to_f64(&spec.config.gamma);
    let tally = (0..spec.n_reps)
        .into_par_iter()
        .map(|rep| -> Result<Tally, MtpError> {
            let (_, pvals) = sample_test_statistics(spec, rep);
            let p = PValues::from_f64s(&pvals);
            let run = run_procedure(spec.procedure, weighting, &p, &spec.config)?;
            let mut t = Tally::zero(m);
            for i in run.trace.rejected.iter() {
                t.marginal[i] = 1;
            }
            if let Some(null_mask) = nulls {
                let r = run.trace.num_rejected() as u64;
                let v = run
                    .trace
                    .rejected
                    .iter()
                    .filter(|&i| null_mask[i])
                    .count() as u64;
                if v >= spec.config.k as u64 {
                    t.at_least_k = 1;
                }
                let fdp_scaled = if r == 0 { 0 } else { v * scale / r };
                if r > 0
                    && BigRational::new(BigInt::from(v), BigInt::from(r)) > spec.config.gamma
                {
                    t.fdp_exceeds = 1;
                }
                t.fdp_scaled_sum = fdp_scaled as u128;
                t.fdp_scaled_sq_sum = (fdp_scaled as u128) * (fdp_scaled as u128);
            }
            Ok(t)
        })
        .try_reduce(|| Tally::zero(m), |a, b| Ok(a.merge(b)))?;
    let n = spec.n_reps;
    let error_rates = nulls.map(|_| {
        let mean_fdp = tally.fdp_scaled_sum as f64 / (scale as f64 * n as f64);
        let mean_sq = tally.fdp_scaled_sq_sum as f64 / ((scale as f64).powi(2) * n as f64);
        let var = (mean_sq - mean_fdp * mean_fdp).max(0.0);
        ErrorRates {
            kfwer: tally.at_least_k as f64 / n as f64,
            kfwer_se: binomial_se(tally.at_least_k, n),
            fdp_tail: tally.fdp_exceeds as f64 / n as f64,
            fdp_tail_se: binomial_se(tally.fdp_exceeds, n),
            mean_fdp,
            mean_fdp_se: (var / n as f64).sqrt(),
            k: spec.config.k,
            gamma,
        }
    });
    Ok(PowerReport {
        n_reps: n,
        marginal_counts: tally.marginal,
        error_rates,
    })
}

/// Estimates per-hypothesis rejection frequencies under the scenario.
pub fn estimate_marginal_power(
    spec: &SimulationSpec,
    weighting: &dyn Weighting,
) -> Result<PowerReport, MtpError> {
    run_replicates(spec, weighting, None)
}

/// Estimates error rates against a truth labeling; `nulls[i]` marks
/// hypothesis `i` as a true null, so rejecting it counts towards `V`.
pub fn estimate_error_rates(
    spec: &SimulationSpec,
    weighting: &dyn Weighting,
    nulls: &[bool],
) -> Result<PowerReport, MtpError> {
    run_replicates(spec, weighting, Some(nulls))
}

/// Shape of the random graphs produced by [`random_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphStyle {
    /// Random simplex weights and renormalized random rows, with `sparsity`
    /// the chance of dropping each edge.
    Random,
    /// The Holm graph: `w_i = 1/m`, `g_ij = 1/(m-1)`.
    Holm,
}

/// Generates a valid testing graph, deterministically from the seed.
pub fn random_graph(seed: u64, m: usize, sparsity: f64, style: GraphStyle) -> TestingGraph {
    let labels: Vec<String> = (1..=m).map(|i| format!("H{i}")).collect();
    if style == GraphStyle::Holm {
        let w = Weight::rational(BigRational::new(1.into(), BigInt::from(m)));
        let share = if m > 1 {
            Weight::rational(BigRational::new(1.into(), BigInt::from(m - 1)))
        } else {
            Weight::zero()
        };
        let mut transition = vec![vec![Weight::zero(); m]; m];
        for (i, row) in transition.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    *cell = share.clone();
                }
            }
        }
        return TestingGraph::new(labels, vec![w; m], transition, vec![]).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Initial weights: random nonnegative integers (zeroed with probability
    // 0.3) normalized onto the simplex.
    let mut raw: Vec<u64> = (0..m)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0
            } else {
                rng.gen_range(1..=100)
            }
        })
        .collect();
    if raw.iter().all(|&x| x == 0) {
        raw = vec![1; m];
    }
    let total: u64 = raw.iter().sum();
    let initial: Vec<Weight> = raw
        .iter()
        .map(|&x| Weight::rational(BigRational::new(BigInt::from(x), BigInt::from(total))))
        .collect();
    let mut transition = vec![vec![Weight::zero(); m]; m];
    for i in 0..m {
        let row: Vec<u64> = (0..m)
            .map(|j| {
                if j == i || rng.gen_bool(sparsity.clamp(0.0, 1.0)) {
                    0
                } else {
                    rng.gen_range(1..=100)
                }
            })
            .collect();
        let s: u64 = row.iter().sum();
        if s == 0 {
            continue;
        }
        for (j, &x) in row.iter().enumerate() {
            if x > 0 {
                transition[i][j] =
                    Weight::rational(BigRational::new(BigInt::from(x), BigInt::from(s)));
            }
        }
    }
    TestingGraph::new(labels, initial, transition, vec![]).unwrap()
}

/// Brute-force subset weights: removes the complement of `subset` in every
/// possible order and checks that all orders give the same weights. This is
/// the independent oracle the fast implementation is tested against.
pub fn oracle_subset_weights(
    graph: &TestingGraph,
    subset: IndexSet,
) -> Result<Vec<Weight>, MtpError> {
    let m = graph.num_hypotheses();
    let complement: Vec<usize> = IndexSet::full(m).difference(subset).iter().collect();
    if complement.len() > 8 {
        return Err(MtpError::Usage(
            "oracle only enumerates complements of size at most 8".into(),
        ));
    }
    if complement.is_empty() {
        return Ok(graph.initial_weights().to_vec());
    }
    let mut orders = Vec::new();
    permutations(&mut complement.clone(), 0, &mut orders);
    let mut agreed: Option<Vec<Weight>> = None;
    for order in orders {
        let mut state = graph.state();
        for j in order {
            state.remove_node(j)?;
        }
        let weights = state.weights().to_vec();
        match &agreed {
            None => agreed = Some(weights),
            Some(first) => {
                if first != &weights {
                    return Err(MtpError::Usage(
                        "removal orders disagree on subset weights".into(),
                    ));
                }
            }
        }
    }
    Ok(agreed.expect("at least one removal order"))
}

fn permutations(items: &mut [usize], start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.to_vec());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

/// Kolmogorov-Smirnov distance between a sample and the uniform
/// distribution on [0, 1].
pub fn ks_distance_uniform(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let upper = (i as f64 + 1.0) / n - x;
        let lower = x - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    d
}
