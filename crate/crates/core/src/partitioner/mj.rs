//! Multi-jagged partitioning with exact weighted quantile cuts.
//!
//! The recursion visits dimensions round-robin. A node with target `t` parts
//! and `r` dimensions still to visit splits into `m = min(t, ceil(t^(1/r)))`
//! sections, so the last dimension finishes whatever remains. Each section
//! is cut independently of its siblings.

use super::Embedding;
use crate::error::{Error, Result};

/// Recursion tree of section counts. Leaves have `target == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MjPlan {
    pub target: usize,
    pub dim: usize,
    pub children: Vec<MjPlan>,
}

impl MjPlan {
    pub fn leaves(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(MjPlan::leaves).sum()
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(MjPlan::depth).max().unwrap_or(0)
    }

    /// Section count at this node.
    pub fn sections(&self) -> usize {
        self.children.len()
    }
}

/// Smallest `m` with `m^r >= t`, i.e. `ceil(t^(1/r))` without rounding error.
fn integer_root_ceil(t: usize, r: usize) -> usize {
    let mut m = 1usize;
    while m.checked_pow(r as u32).is_some_and(|p| p < t) {
        m += 1;
    }
    m
}

pub fn section_counts(k: usize, dims: usize) -> MjPlan {
    build(k.max(1), dims.max(1), 0)
}

fn build(target: usize, dims: usize, depth: usize) -> MjPlan {
    let dim = depth % dims;
    if target <= 1 {
        return MjPlan {
            target: 1,
            dim,
            children: Vec::new(),
        };
    }
    let remaining = dims.saturating_sub(depth).max(1);
    let m = target.min(integer_root_ceil(target, remaining));
    let (base, extra) = (target / m, target % m);
    let children = (0..m)
        .map(|c| build(base + usize::from(c < extra), dims, depth + 1))
        .collect();
    MjPlan {
        target,
        dim,
        children,
    }
}

/// Assigns each point to one of `k` parts. Within a node, points are ordered
/// by `(coordinate, id)` and cut where the running weight is closest to the
/// target share of each section; every section keeps at least as many points
/// as it has leaves.
pub fn mj_partition(emb: &Embedding, weights: &[f64], k: usize) -> Result<Vec<usize>> {
    let n = emb.num_points();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    if k == 0 || n < k {
        return Err(Error::InfeasibleParts { n, parts: k });
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidArgument("point weights must be positive".into()));
    }
    if emb.dims() == 0 {
        return Err(Error::InvalidArgument("embedding has no dimensions".into()));
    }
    let plan = section_counts(k, emb.dims());
    let mut assignment = vec![0usize; n];
    let points: Vec<usize> = (0..n).collect();
    split(&plan, emb, weights, points, 0, &mut assignment);
    Ok(assignment)
}

fn split(node: &MjPlan, emb: &Embedding, weights: &[f64], mut points: Vec<usize>, base: usize, out: &mut [usize]) {
    if node.children.is_empty() {
        for p in points {
            out[p] = base;
        }
        return;
    }
    let dim = node.dim;
    points.sort_by(|&a, &b| emb.coord(a, dim).total_cmp(&emb.coord(b, dim)).then(a.cmp(&b)));

    let len = points.len();
    let mut prefix = Vec::with_capacity(len + 1);
    prefix.push(0.0);
    for &p in &points {
        prefix.push(prefix.last().unwrap() + weights[p]);
    }
    let total = prefix[len];

    let leaves: Vec<usize> = node.children.iter().map(|c| c.target).collect();
    let mut after: usize = leaves.iter().sum();
    let mut cuts = vec![0usize];
    let mut done_leaves = 0usize;
    for &t in &leaves[..leaves.len() - 1] {
        done_leaves += t;
        after -= t;
        let goal = total * done_leaves as f64 / node.target as f64;
        let lo = cuts.last().unwrap() + t;
        let hi = len - after;
        // prefix is nondecreasing: find the first index reaching the goal,
        // then compare with its predecessor
        let mut s = lo + prefix[lo..=hi].partition_point(|&w| w < goal);
        s = s.min(hi);
        if s > lo && (goal - prefix[s - 1]) <= (prefix[s] - goal) {
            s -= 1;
        }
        cuts.push(s);
    }
    cuts.push(len);

    let mut offset = base;
    for (c, child) in node.children.iter().enumerate() {
        let section = points[cuts[c]..cuts[c + 1]].to_vec();
        split(child, emb, weights, section, offset, out);
        offset += child.target;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::Block;

    fn emb(n: usize, d: usize, data: &[f64]) -> Embedding {
        Embedding {
            coords: Block::from_row_slice(n, d, data),
            d: d + 1,
        }
    }

    #[test]
    fn plan_examples() {
        let p = section_counts(4, 2);
        assert_eq!(p.sections(), 2);
        assert!(p.children.iter().all(|c| c.sections() == 2 && c.dim == 1));
        assert_eq!(p.leaves(), 4);

        let p = section_counts(7, 2);
        assert_eq!(p.children.iter().map(|c| c.target).collect::<Vec<_>>(), vec![3, 2, 2]);
        assert_eq!(p.leaves(), 7);

        let p = section_counts(1, 3);
        assert!(p.children.is_empty());
        assert_eq!(p.leaves(), 1);
    }

    #[test]
    fn plan_has_exact_leaf_count() {
        for k in 1..200 {
            for d in 1..6 {
                let p = section_counts(k, d);
                assert_eq!(p.leaves(), k);
                assert!(p.depth() <= d + 1);
            }
        }
        // 8^(1/3) is exactly 2
        assert_eq!(section_counts(8, 3).sections(), 2);
    }

    #[test]
    fn square_corners_split_by_x() {
        let e = emb(4, 2, &[0., 0., 1., 0., 0., 1., 1., 1.]);
        let a = mj_partition(&e, &[1.0; 4], 2).unwrap();
        assert_eq!(a, vec![0, 1, 0, 1]);
    }

    #[test]
    fn three_collinear_points() {
        let e = emb(3, 1, &[2.0, 0.0, 1.0]);
        let a = mj_partition(&e, &[1.0; 3], 3).unwrap();
        assert_eq!(a, vec![2, 0, 1]);
    }

    #[test]
    fn infeasible_and_degenerate() {
        let e = emb(2, 1, &[0.0, 1.0]);
        assert!(matches!(mj_partition(&e, &[1.0; 2], 3), Err(Error::InfeasibleParts { n: 2, parts: 3 })));
        let flat = emb(6, 1, &[0.0; 6]);
        let a = mj_partition(&flat, &[1.0; 6], 3).unwrap();
        assert_eq!(a, vec![0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn weighted_cut_balances_weight() {
        let e = emb(4, 1, &[0.0, 1.0, 2.0, 3.0]);
        let a = mj_partition(&e, &[3.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(a, vec![0, 1, 1, 1]);
    }
}
