//! Walks, self-avoiding walks, loops, and disjoint loop configurations on the
//! complete graph over the site set, with the combinatorial two-point
//! functions computed by direct summation.
//!
//! Enumerators are model-independent: a walk stepping through a zero coupling
//! is still enumerated, its weight is simply zero. Output order is length,
//! then lexicographic by vertex sequence, so golden tests are stable.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{CouplingModel, Covariance};
use crate::scalar::{RealScalar, Scalar};

/// A walk: vertex sequence x_0, ..., x_n with n >= 0; length is the number
/// of directed edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Walk {
    vertices: Vec<usize>,
}

impl Walk {
    pub fn new(vertices: Vec<usize>) -> Self {
        assert!(!vertices.is_empty(), "a walk has at least one vertex");
        Walk { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of steps |w| (vertex count minus one).
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Number of visits to `x`.
    pub fn visits(&self, x: usize) -> usize {
        self.vertices.iter().filter(|&&v| v == x).count()
    }

    /// Visit counts for all sites.
    pub fn visit_counts(&self, m: usize) -> Vec<usize> {
        let mut n = vec![0usize; m];
        for &v in &self.vertices {
            n[v] += 1;
        }
        n
    }
}

/// A self-avoiding walk: length >= 1 and interior vertices pairwise distinct
/// and disjoint from both endpoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SelfAvoidingWalk(Walk);

impl SelfAvoidingWalk {
    pub fn new(walk: Walk) -> Result<Self> {
        if walk.len() < 1 {
            return Err(Error::Hypothesis(
                "self-avoiding walk needs at least one step".into(),
            ));
        }
        let v = walk.vertices();
        let (a, b) = (v[0], v[v.len() - 1]);
        let mut seen = BTreeSet::new();
        for &x in &v[1..v.len() - 1] {
            if x == a || x == b || !seen.insert(x) {
                return Err(Error::Hypothesis(format!(
                    "interior vertex {x} repeats or touches an endpoint"
                )));
            }
        }
        Ok(SelfAvoidingWalk(walk))
    }

    pub fn walk(&self) -> &Walk {
        &self.0
    }
}

/// An unrooted directed cycle with pairwise-distinct vertices, stored as the
/// rotation starting at its minimal vertex (orientation preserved). Includes
/// the one-edge self-loop. The directed 2-cycle equals its own reversal as a
/// vertex sequence and is counted once.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Loop {
    vertices: Vec<usize>,
}

impl Loop {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Hypothesis("empty loop".into()));
        }
        let set: BTreeSet<usize> = vertices.iter().copied().collect();
        if set.len() != vertices.len() {
            return Err(Error::Hypothesis("loop vertices must be distinct".into()));
        }
        let min_pos = vertices
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| v)
            .map(|(i, _)| i)
            .unwrap();
        let mut canon = Vec::with_capacity(vertices.len());
        for k in 0..vertices.len() {
            canon.push(vertices[(min_pos + k) % vertices.len()]);
        }
        Ok(Loop { vertices: canon })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Length |gamma| = number of directed edges (1 for the self-loop).
    #[allow(clippy::len_without_is_empty)] // a loop has at least one edge
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_self_loop(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Directed edges, closing back to the first vertex.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// A set of pairwise vertex-disjoint loops.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LoopConfig {
    loops: BTreeSet<Loop>,
}

impl LoopConfig {
    pub fn new(loops: BTreeSet<Loop>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for l in &loops {
            for &v in l.vertices() {
                if !seen.insert(v) {
                    return Err(Error::Hypothesis(format!(
                        "loops share vertex {v}"
                    )));
                }
            }
        }
        Ok(LoopConfig { loops })
    }

    pub fn empty() -> Self {
        LoopConfig::default()
    }

    pub fn loops(&self) -> impl Iterator<Item = &Loop> {
        self.loops.iter()
    }

    pub fn n_loops(&self) -> usize {
        self.loops.len()
    }

    /// Total length |Gamma| summed over loops.
    pub fn total_len(&self) -> usize {
        self.loops.iter().map(Loop::len).sum()
    }

    pub fn has_self_loop(&self) -> bool {
        self.loops.iter().any(Loop::is_self_loop)
    }
}

/// All walks from `a` to `b` with at most `maxlen` steps, in
/// length-then-lexicographic order, over sites 0..m.
pub fn enumerate_walks_upto(m: usize, a: usize, b: usize, maxlen: usize) -> Vec<Walk> {
    assert!(a < m && b < m, "endpoints outside the site set");
    let mut out = Vec::new();
    for n in 0..=maxlen {
        if n == 0 {
            if a == b {
                out.push(Walk::new(vec![a]));
            }
            continue;
        }
        // interior sequences of length n-1 in lexicographic order
        let mut seq = vec![a];
        extend_walks(m, b, n, &mut seq, &mut out);
    }
    out
}

fn extend_walks(m: usize, b: usize, n: usize, seq: &mut Vec<usize>, out: &mut Vec<Walk>) {
    if seq.len() == n {
        seq.push(b);
        out.push(Walk::new(seq.clone()));
        seq.pop();
        return;
    }
    for x in 0..m {
        seq.push(x);
        extend_walks(m, b, n, seq, out);
        seq.pop();
    }
}

/// Walk weight J^w * prod_i 1/d_{w(i)} of the simple-random-walk series.
pub fn srw_weight<S: Scalar>(model: &CouplingModel<S>, walk: &Walk) -> Result<S> {
    let mut acc = S::one();
    for (x, y) in walk.edges() {
        acc = acc * model.j(x, y).clone();
    }
    for &x in walk.vertices() {
        let d_inv = model
            .d(x)
            .try_inv()
            .ok_or_else(|| Error::Hypothesis(format!("d_{x} = 0")))?;
        acc = acc * d_inv;
    }
    Ok(acc)
}

/// Walk weight C^w = product of covariance entries over directed edges.
pub fn cov_weight<S: Scalar>(cov: &Covariance<S>, walk: &Walk) -> S {
    let mut acc = S::one();
    for (x, y) in walk.edges() {
        acc = acc * cov.get(x, y).clone();
    }
    acc
}

/// Loop weight C^gamma over the loop's directed edges.
pub fn loop_weight<S: Scalar>(cov: &Covariance<S>, l: &Loop) -> S {
    let mut acc = S::one();
    for (x, y) in l.edges() {
        acc = acc * cov.get(x, y).clone();
    }
    acc
}

/// Configuration weight C^Gamma.
pub fn config_weight<S: Scalar>(cov: &Covariance<S>, config: &LoopConfig) -> S {
    let mut acc = S::one();
    for l in config.loops() {
        acc = acc * loop_weight(cov, l);
    }
    acc
}

/// Partial sum of the walk series sum_n (D^{-1} (J D^{-1})^n)_{a,b} through
/// |w| <= maxlen, with the geometric tail bound
/// (max_x |d_x|^{-1}) rho^{maxlen+1} / (1 - rho).
///
/// Requires diagonal dominance (rho < 1); the partial sum is guaranteed
/// within the tail bound of (D-J)^{-1}_{a,b}.
pub fn srw_two_point_series<S: Scalar>(
    model: &CouplingModel<S>,
    a: usize,
    b: usize,
    maxlen: usize,
) -> Result<(S, S::Real)> {
    let report = model.validate();
    let rho = report
        .rho
        .clone()
        .ok_or_else(|| Error::Hypothesis("some d_x = 0".into()))?;
    if !(rho < S::Real::one()) {
        return Err(Error::Hypothesis(format!(
            "diagonal dominance fails: rho = {rho}"
        )));
    }
    let m = model.size();
    let d_inv = Matrix::from_fn(m, m, |i, j| {
        if i == j {
            model.d(i).try_inv().expect("nonzero diagonal")
        } else {
            S::zero()
        }
    });
    let step = d_inv.mul(model.j_matrix()); // D^{-1} J
    // X_n = (D^{-1} J)^n D^{-1}
    let mut x_n = d_inv.clone();
    let mut partial = S::zero();
    for _ in 0..=maxlen {
        partial = partial + x_n.get(a, b).clone();
        x_n = step.mul(&x_n);
    }

    let mut max_dinv = S::Real::zero();
    for x in 0..m {
        let v = model.d(x).try_inv().expect("nonzero diagonal").abs_upper();
        if v > max_dinv {
            max_dinv = v;
        }
    }
    let tail = max_dinv * rho.powi(maxlen as u32 + 1) / (S::Real::one() - rho);
    Ok((partial, tail))
}

/// All self-avoiding walks from `a` to `b` whose interior vertices are drawn
/// without repetition from `interior` (which must avoid a and b). The
/// one-step walk (a, b) is always included, also when a = b.
pub fn enumerate_saws(a: usize, b: usize, interior: &BTreeSet<usize>) -> Vec<SelfAvoidingWalk> {
    assert!(
        !interior.contains(&a) && !interior.contains(&b),
        "interior set must avoid the endpoints"
    );
    let mut out = Vec::new();
    let sites: Vec<usize> = interior.iter().copied().collect();
    // group by length: k interior vertices -> length k+1
    for k in 0..=sites.len() {
        let mut seq = vec![a];
        let mut used = vec![false; sites.len()];
        extend_saws(b, k, &sites, &mut used, &mut seq, &mut out);
    }
    out
}

fn extend_saws(
    b: usize,
    k: usize,
    sites: &[usize],
    used: &mut [bool],
    seq: &mut Vec<usize>,
    out: &mut Vec<SelfAvoidingWalk>,
) {
    if seq.len() == k + 1 {
        seq.push(b);
        out.push(SelfAvoidingWalk::new(Walk::new(seq.clone())).expect("construction is valid"));
        seq.pop();
        return;
    }
    for (i, &x) in sites.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        seq.push(x);
        extend_saws(b, k, sites, used, seq, out);
        seq.pop();
        used[i] = false;
    }
}

/// All vertex-disjoint loop collections supported in `sites`, including the
/// empty configuration. Loop configurations are exactly the cycle
/// decompositions of permutations of subsets of `sites` (fixed points become
/// self-loops), which is the bijection behind the permanent expansion.
pub fn enumerate_loop_configs(sites: &BTreeSet<usize>) -> Vec<LoopConfig> {
    let sites: Vec<usize> = sites.iter().copied().collect();
    let n = sites.len();
    assert!(n <= 16, "loop-config enumeration is desk-scale only");
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| sites[i]).collect();
        let mut perm: Vec<usize> = (0..subset.len()).collect();
        permutations(&mut perm, 0, &mut |p| {
            out.push(config_from_permutation(&subset, p));
        });
    }
    out.sort();
    out
}

fn config_from_permutation(subset: &[usize], perm: &[usize]) -> LoopConfig {
    let mut seen = vec![false; subset.len()];
    let mut loops = BTreeSet::new();
    for start in 0..subset.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cycle.push(subset[cur]);
            cur = perm[cur];
        }
        loops.insert(Loop::new(cycle).expect("cycle vertices are distinct"));
    }
    LoopConfig::new(loops).expect("cycles of one permutation are disjoint")
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// G^saw_{a,b}: sum of C^w over all self-avoiding walks from a to b with
/// interior anywhere in the complement of {a, b}.
pub fn saw_two_point<S: Scalar>(cov: &Covariance<S>, a: usize, b: usize) -> S {
    let m = cov.size();
    let interior: BTreeSet<usize> = (0..m).filter(|&x| x != a && x != b).collect();
    let mut acc = S::zero();
    for saw in enumerate_saws(a, b, &interior) {
        acc = acc + cov_weight(cov, saw.walk());
    }
    acc
}

/// G^loop_{a,b}: sum over self-avoiding walks and disjoint loop
/// configurations on the complement of the walk's vertex set. With
/// `wick_ordered`, self-loops are excluded from the configurations.
pub fn loop_two_point<S: Scalar>(cov: &Covariance<S>, a: usize, b: usize, wick_ordered: bool) -> S {
    let m = cov.size();
    let interior: BTreeSet<usize> = (0..m).filter(|&x| x != a && x != b).collect();
    let mut acc = S::zero();
    for saw in enumerate_saws(a, b, &interior) {
        let walk_sites: BTreeSet<usize> = saw.walk().vertices().iter().copied().collect();
        let complement: BTreeSet<usize> = (0..m).filter(|x| !walk_sites.contains(x)).collect();
        let w = cov_weight(cov, saw.walk());
        let mut loop_sum = S::zero();
        for config in enumerate_loop_configs(&complement) {
            if wick_ordered && config.has_self_loop() {
                continue;
            }
            loop_sum = loop_sum + config_weight(cov, &config);
        }
        acc = acc + w * loop_sum;
    }
    acc
}
