use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

use super::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Edge-perspective degree distribution pair (lambda for variable nodes,
/// rho for check nodes), as (degree, fraction) lists.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pub lambda_coeffs: Vec<(usize, f64)>,
    pub rho_coeffs: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    pub fn new(lambda_coeffs: Vec<(usize, f64)>, rho_coeffs: Vec<(usize, f64)>) -> Result<Self> {
        for (name, coeffs) in [("lambda", &lambda_coeffs), ("rho", &rho_coeffs)] {
            if coeffs.is_empty() {
                return Err(Error::Construction(format!("{name}: empty distribution")));
            }
            if coeffs.iter().any(|&(d, f)| d < 1 || f <= 0.0) {
                return Err(Error::Construction(format!("{name}: invalid (degree, fraction)")));
            }
            let sum: f64 = coeffs.iter().map(|&(_, f)| f).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Construction(format!("{name}: fractions sum to {sum}")));
            }
        }
        Ok(DegreeDistribution { lambda_coeffs, rho_coeffs })
    }

    /// Rate-1/2 irregular ensemble optimized for diversity order 2.
    pub fn irregular_a() -> Self {
        DegreeDistribution::new(
            normalized(vec![(2, 0.270234), (3, 0.266315), (10, 0.463451)]),
            normalized(vec![(7, 0.566545), (8, 0.433455)]),
        )
        .expect("built-in distribution is valid")
    }

    /// Rate-1/2 irregular ensemble optimized for diversity order 4.
    /// The published coefficients are rounded (lambda sums to 0.999963);
    /// they are renormalized here to satisfy the distribution invariant.
    pub fn irregular_b() -> Self {
        DegreeDistribution::new(
            normalized(vec![(2, 0.285637), (3, 0.285602), (9, 0.428724)]),
            normalized(vec![(7, 0.998857), (8, 0.001143)]),
        )
        .expect("built-in distribution is valid")
    }

    /// Average inverse degree, 1 / sum(f_d / d) being the edges per node.
    fn edges_per_node(coeffs: &[(usize, f64)]) -> f64 {
        1.0 / coeffs.iter().map(|&(d, f)| f / d as f64).sum::<f64>()
    }
}

fn normalized(mut coeffs: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let sum: f64 = coeffs.iter().map(|&(_, f)| f).sum();
    for (_, f) in coeffs.iter_mut() {
        *f /= sum;
    }
    coeffs
}

/// Node-perspective degree list for `n_nodes` nodes: fractions f_d/d
/// normalized, rounded to integers summing to `n_nodes`.
fn node_degrees(coeffs: &[(usize, f64)], n_nodes: usize) -> Vec<usize> {
    let total_inv: f64 = coeffs.iter().map(|&(d, f)| f / d as f64).sum();
    let mut counts: Vec<(usize, usize, f64)> = coeffs
        .iter()
        .map(|&(d, f)| {
            let exact = n_nodes as f64 * (f / d as f64) / total_inv;
            (d, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let mut assigned: usize = counts.iter().map(|&(_, c, _)| c).sum();
    // largest-remainder rounding
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].2.partial_cmp(&counts[a].2).unwrap());
    let mut k = 0;
    while assigned < n_nodes {
        counts[order[k % order.len()]].1 += 1;
        assigned += 1;
        k += 1;
    }
    let mut degrees = Vec::with_capacity(n_nodes);
    for (d, c, _) in counts {
        degrees.extend(std::iter::repeat(d).take(c));
    }
    degrees
}

/// Progressive-edge-growth construction of an irregular Tanner graph. Edges
/// are placed one variable node at a time, each time connecting to a check
/// node outside (or failing that, on the last tier of) the BFS neighborhood
/// of the variable node, breaking ties by lowest check degree.
pub fn build_irregular(
    dist: &DegreeDistribution,
    n_bits: usize,
    n_checks: usize,
    seed: u64,
) -> Result<ParityCheckMatrix> {
    if n_bits == 0 || n_checks == 0 || n_checks >= n_bits {
        return Err(Error::Construction(format!(
            "invalid sizes: {n_bits} bits, {n_checks} checks"
        )));
    }
    let mut vn_deg = node_degrees(&dist.lambda_coeffs, n_bits);
    let cn_deg = node_degrees(&dist.rho_coeffs, n_checks);
    let ev: usize = vn_deg.iter().sum();
    let ec: usize = cn_deg.iter().sum();

    // Rounding residue: nudge variable degrees by one until edge counts
    // agree, keeping rho exact (its support is tested exactly; lambda has
    // 1% slack). Raising the lowest degrees / lowering the highest stays
    // within or adjacent to the declared support.
    let diff = ec as i64 - ev as i64;
    if diff.unsigned_abs() as usize > n_bits / 10 {
        return Err(Error::Construction(format!(
            "cannot match edge counts: {ev} variable-side vs {ec} check-side"
        )));
    }
    vn_deg.sort_unstable();
    if diff > 0 {
        for d in vn_deg.iter_mut().take(diff as usize) {
            *d += 1;
        }
    } else {
        for d in vn_deg.iter_mut().rev().take(diff.unsigned_abs() as usize) {
            if *d <= 2 {
                return Err(Error::Construction("edge-count residue underflows degrees".into()));
            }
            *d -= 1;
        }
    }

    // sanity against the declared distribution
    let target_epn = DegreeDistribution::edges_per_node(&dist.lambda_coeffs);
    let actual_epn = vn_deg.iter().sum::<usize>() as f64 / n_bits as f64;
    if (actual_epn - target_epn).abs() / target_epn > 0.02 {
        return Err(Error::Construction("variable degree rounding drifted".into()));
    }

    vn_deg.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cn_adj: Vec<Vec<u32>> = vec![Vec::new(); n_checks];
    let mut vn_adj: Vec<Vec<u32>> = vec![Vec::new(); n_bits];

    // visit order within a degree class randomized for symmetry
    let mut cn_order: Vec<u32> = (0..n_checks as u32).collect();
    cn_order.shuffle(&mut rng);
    // per-check degree capacity realizes rho exactly; checks with higher
    // targets are assigned at random positions
    let mut cap = vec![0usize; n_checks];
    for (slot, &c) in cn_order.iter().enumerate() {
        cap[c as usize] = cn_deg[slot];
    }

    let mut reached = vec![false; n_checks];
    let mut vn_seen = vec![false; n_bits];
    for v in 0..n_bits {
        for edge in 0..vn_deg[v] {
            let under_cap = |cn_adj: &[Vec<u32>], c: usize| cn_adj[c].len() < cap[c];
            let pick = if edge == 0 {
                lowest_degree_check(&cn_order, &cn_adj, |c| under_cap(&cn_adj, c))
                    .or_else(|| lowest_degree_check(&cn_order, &cn_adj, |_| true))
            } else {
                // BFS from v over the partial graph
                for r in reached.iter_mut() {
                    *r = false;
                }
                for s in vn_seen.iter_mut() {
                    *s = false;
                }
                let mut frontier: VecDeque<u32> = VecDeque::new();
                vn_seen[v] = true;
                let mut n_reached = 0usize;
                for &c in &vn_adj[v] {
                    reached[c as usize] = true;
                    n_reached += 1;
                    frontier.push_back(c);
                }
                let mut last_tier: Vec<u32> = frontier.iter().copied().collect();
                while !frontier.is_empty() && n_reached < n_checks {
                    let mut next: Vec<u32> = Vec::new();
                    for _ in 0..frontier.len() {
                        let c = frontier.pop_front().unwrap();
                        for &u in &cn_adj[c as usize] {
                            if !vn_seen[u as usize] {
                                vn_seen[u as usize] = true;
                                for &c2 in &vn_adj[u as usize] {
                                    if !reached[c2 as usize] {
                                        reached[c2 as usize] = true;
                                        n_reached += 1;
                                        next.push(c2);
                                    }
                                }
                            }
                        }
                    }
                    if next.is_empty() {
                        break;
                    }
                    frontier.extend(next.iter().copied());
                    last_tier = next;
                }
                if n_reached < n_checks {
                    lowest_degree_check(&cn_order, &cn_adj, |c| !reached[c] && under_cap(&cn_adj, c))
                        .or_else(|| lowest_degree_check(&cn_order, &cn_adj, |c| !reached[c]))
                } else {
                    // all reachable: take the farthest tier, preferring
                    // checks with spare capacity
                    let mut best: Option<u32> = None;
                    for &c in &last_tier {
                        if vn_adj[v].contains(&c) || !under_cap(&cn_adj, c as usize) {
                            continue;
                        }
                        if best.is_none()
                            || cn_adj[c as usize].len() < cn_adj[best.unwrap() as usize].len()
                        {
                            best = Some(c);
                        }
                    }
                    best.or_else(|| {
                        lowest_degree_check(&cn_order, &cn_adj, |c| {
                            !vn_adj[v].contains(&(c as u32)) && under_cap(&cn_adj, c)
                        })
                    })
                    .or_else(|| {
                        lowest_degree_check(&cn_order, &cn_adj, |c| !vn_adj[v].contains(&(c as u32)))
                    })
                }
            };
            let c = pick.ok_or_else(|| Error::Construction("PEG ran out of check nodes".into()))?;
            cn_adj[c as usize].push(v as u32);
            vn_adj[v].push(c);
        }
    }

    debug_assert_eq!(cn_adj.iter().map(Vec::len).sum::<usize>(), vn_deg.iter().sum::<usize>());

    let transmit = vec![true; n_bits];
    let col_proto: Vec<u32> = (0..n_bits as u32).collect();
    let rows = cn_adj;
    ParityCheckMatrix::from_adjacency(n_checks, n_bits, rows, transmit, col_proto, 1)
}

fn lowest_degree_check(
    order: &[u32],
    cn_adj: &[Vec<u32>],
    admissible: impl Fn(usize) -> bool,
) -> Option<u32> {
    let mut best: Option<u32> = None;
    for &c in order {
        if !admissible(c as usize) {
            continue;
        }
        match best {
            None => best = Some(c),
            Some(b) => {
                if cn_adj[c as usize].len() < cn_adj[b as usize].len() {
                    best = Some(c);
                }
            }
        }
    }
    best
}

/// Empirical edge-perspective fractions of a built graph, variable side.
pub fn empirical_lambda(h: &ParityCheckMatrix) -> Vec<(usize, f64)> {
    let mut by_degree: std::collections::BTreeMap<usize, usize> = Default::default();
    let mut edges = 0usize;
    for j in 0..h.n_cols() {
        let d = h.col(j).len();
        *by_degree.entry(d).or_default() += d;
        edges += d;
    }
    by_degree.into_iter().map(|(d, e)| (d, e as f64 / edges as f64)).collect()
}

pub fn empirical_rho(h: &ParityCheckMatrix) -> Vec<(usize, f64)> {
    let mut by_degree: std::collections::BTreeMap<usize, usize> = Default::default();
    let mut edges = 0usize;
    for i in 0..h.n_rows() {
        let d = h.row(i).len();
        *by_degree.entry(d).or_default() += d;
        edges += d;
    }
    by_degree.into_iter().map(|(d, e)| (d, e as f64 / edges as f64)).collect()
}
