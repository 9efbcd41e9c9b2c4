use nalgebra::DMatrix;

use super::GraphSpec;
use crate::bounds::GaussianTarget;
use crate::util::{binomial, factorial};
use crate::{Error, Result};

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("edge probability {p} is outside [0, 1]")));
    }
    Ok(())
}

/// Number of copies of `pattern` in `K_n`.
pub fn copies_in_complete(n: usize, pattern: &GraphSpec) -> f64 {
    let v = pattern.vertex_count() as u64;
    binomial(n as u64, v) * factorial(v) / pattern.automorphism_count() as f64
}

/// `E[X_Γ] = C(n, v) v!/|aut Γ| p^e`.
pub fn expected_subgraph_count(n: usize, p: f64, pattern: &GraphSpec) -> Result<f64> {
    check_p(p)?;
    Ok(copies_in_complete(n, pattern) * p.powi(pattern.edge_count() as i32))
}

/// Leading term `2 n^{v_Γ+v_Φ−2}/(|aut Γ||aut Φ|) e_Γ e_Φ p^{e_Γ+e_Φ−1}(1−p)` of
/// `cov(X_Γ, X_Φ)`; the relative error is `O(1/n)`.
pub fn covariance_leading(g: &GraphSpec, h: &GraphSpec, n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    let nf = n as f64;
    let (eg, eh) = (g.edge_count() as f64, h.edge_count() as f64);
    Ok(2.0 * nf.powi((g.vertex_count() + h.vertex_count()) as i32 - 2)
        / (g.automorphism_count() * h.automorphism_count()) as f64
        * eg
        * eh
        * p.powi((g.edge_count() + h.edge_count()) as i32 - 1)
        * (1.0 - p))
}

/// Exact `cov(X_Γ, X_Φ)` in `G(n, p)`.
///
/// Pairs of copies sharing `i ≥ 1` edges contribute `p^{e_Γ+e_Φ−i}(1 − p^i)`.
/// One copy of Γ is pinned to the first `v_Γ` labels; copies of Φ are
/// enumerated by how many outside vertices they use. Cost grows like
/// `(v_Γ+v_Φ)^{v_Φ}`, fine for the small patterns this is meant for.
pub fn exact_subgraph_covariance(g: &GraphSpec, h: &GraphSpec, n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    let vg = g.vertex_count();
    let vh = h.vertex_count();
    if n < vg || n < vh {
        return Ok(0.0);
    }
    let e_sum = (g.edge_count() + h.edge_count()) as i32;
    let mut total = 0.0;
    for t in 0..=vh.saturating_sub(2).min(n - vg) {
        let hist = shared_edge_histogram(g, h, t);
        let weight = binomial((n - vg) as u64, t as u64);
        for (i, &count) in hist.iter().enumerate().skip(1) {
            if count > 0 {
                let pi = p.powi(i as i32);
                total += weight * count as f64 * p.powi(e_sum - i as i32) * (1.0 - pi);
            }
        }
    }
    Ok(copies_in_complete(n, g) * total / h.automorphism_count() as f64)
}

/// Injections of Φ into `[v_Γ + t]` hitting every label `≥ v_Γ`, bucketed by
/// the number of Φ-edges landing on edges of the pinned Γ.
fn shared_edge_histogram(g: &GraphSpec, h: &GraphSpec, t: usize) -> Vec<u64> {
    let vg = g.vertex_count();
    let total = vg + t;
    let mut hist = vec![0u64; h.edge_count() + 1];
    let mut image = vec![usize::MAX; h.vertex_count()];
    let mut used = vec![false; total];
    fn rec(
        g: &GraphSpec,
        h: &GraphSpec,
        depth: usize,
        outside_missing: usize,
        image: &mut [usize],
        used: &mut [bool],
        hist: &mut [u64],
    ) {
        let vg = g.vertex_count();
        let remaining = h.vertex_count() - depth;
        if outside_missing > remaining {
            return;
        }
        if remaining == 0 {
            let shared = h
                .edges()
                .iter()
                .filter(|&&(u, w)| {
                    let (a, b) = (image[u], image[w]);
                    a < vg && b < vg && g.adjacent(a, b)
                })
                .count();
            hist[shared] += 1;
            return;
        }
        for x in 0..used.len() {
            if used[x] {
                continue;
            }
            used[x] = true;
            image[depth] = x;
            let missing = outside_missing - usize::from(x >= vg);
            rec(g, h, depth + 1, missing, image, used, hist);
            used[x] = false;
        }
    }
    rec(g, h, 0, total - vg, &mut image, &mut used, &mut hist);
    hist
}

/// `σ_Γ = sqrt(2p(1−p)) e_Γ/|aut Γ| p^{e_Γ−1}`.
pub fn asymptotic_sigma(pattern: &GraphSpec, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((2.0 * p * (1.0 - p)).sqrt() * pattern.edge_count() as f64
        / pattern.automorphism_count() as f64
        * p.powi(pattern.edge_count() as i32 - 1))
}

/// Rank-one limit `Σ_ij = σ_iσ_j` of the normalized subgraph counts.
pub fn clt_target_subgraphs(patterns: &[GraphSpec], p: f64) -> Result<GaussianTarget> {
    let sigma = patterns
        .iter()
        .map(|g| asymptotic_sigma(g, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianTarget::rank_one(&sigma))
}

/// Exact covariance matrix of `n^{1−v_i}(X_{Γ_i} − E X_{Γ_i})`.
pub fn normalized_subgraph_covariance(patterns: &[GraphSpec], n: usize, p: f64) -> Result<DMatrix<f64>> {
    let d = patterns.len();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let scale = (n as f64).powi(2 - (patterns[i].vertex_count() + patterns[j].vertex_count()) as i32);
            let c = exact_subgraph_covariance(&patterns[i], &patterns[j], n, p)? * scale;
            m[(i, j)] = c;
            m[(j, i)] = c;
        }
    }
    Ok(m)
}

/// `p = θ/(n−1)`.
pub fn degree_probability(n: usize, theta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Validation("degree counts need n ≥ 2".into()));
    }
    if !(theta > 0.0 && theta < (n - 1) as f64) {
        return Err(Error::Validation(format!("θ = {theta} gives no valid edge probability")));
    }
    Ok(theta / (n - 1) as f64)
}

/// `E[V_i] = n C(n−1, i) p^i (1−p)^{n−1−i}`.
pub fn expected_degree_count(n: usize, p: f64, i: usize) -> Result<f64> {
    check_p(p)?;
    if i >= n {
        return Ok(0.0);
    }
    Ok(n as f64
        * binomial((n - 1) as u64, i as u64)
        * p.powi(i as i32)
        * (1.0 - p).powi((n - 1 - i) as i32))
}

/// Exact `cov(V_i, V_j)` at `p = θ/(n−1)`:
/// `(1/n) E[V_i]E[V_j]((i−θ)(j−θ)/(θ(1−θ/(n−1))) − 1) + 1{i=j} E[V_i]`.
pub fn degree_covariance(n: usize, theta: f64, i: usize, j: usize) -> Result<f64> {
    let p = degree_probability(n, theta)?;
    let (vi, vj) = (expected_degree_count(n, p, i)?, expected_degree_count(n, p, j)?);
    let (fi, fj) = (i as f64, j as f64);
    let mut c = vi * vj / n as f64 * ((fi - theta) * (fj - theta) / (theta * (1.0 - p)) - 1.0);
    if i == j {
        c += vi;
    }
    Ok(c)
}

/// Exact covariance matrix of `(V_i − E V_i)/sqrt(n)` over `degrees`.
pub fn normalized_degree_covariance(n: usize, theta: f64, degrees: &[usize]) -> Result<DMatrix<f64>> {
    let d = degrees.len();
    let mut m = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            m[(a, b)] = degree_covariance(n, theta, degrees[a], degrees[b])? / n as f64;
        }
    }
    Ok(m)
}

/// Limit covariance
/// `θ^{i+j}/(i! j!) e^{−2θ}((i−θ)(j−θ)/θ − 1) + 1{i=j} θ^i/i! e^{−θ}`.
pub fn degree_limit_sigma(theta: f64, i: usize, j: usize) -> f64 {
    let (fi, fj) = (i as f64, j as f64);
    let poisson = |k: usize| theta.powi(k as i32) / factorial(k as u64) * (-theta).exp();
    let mut s = poisson(i) * poisson(j) * ((fi - theta) * (fj - theta) / theta - 1.0);
    if i == j {
        s += poisson(i);
    }
    s
}

pub fn degree_limit_target(theta: f64, degrees: &[usize]) -> Result<GaussianTarget> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Validation(format!("θ = {theta} must lie in (0, 1)")));
    }
    let d = degrees.len();
    let sigma = DMatrix::from_fn(d, d, |a, b| degree_limit_sigma(theta, degrees[a], degrees[b]));
    GaussianTarget::new(sigma)
}
