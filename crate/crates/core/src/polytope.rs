//! Newton polytopes with respect to the `t` variables, weighted Minkowski
//! sums, and the lattice condition that makes a tuple of Laurent polynomials
//! admissible.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::laurent::LaurentPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0} polytopes but {1} weights")]
    LengthMismatch(usize, usize),
    #[error("empty tuple")]
    EmptyTuple,
    #[error("tuple is not admissible: window ({i}, {j}) meets {q}Z^r outside the origin")]
    NotAdmissible { i: usize, j: usize, q: u64 },
}

/// Convex hull of a finite nonempty set of points of `Z^r`. Generators are
/// kept sorted and deduplicated; sums prune them to hull vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    generators: Vec<Vec<i64>>,
}

impl LatticePolytope {
    pub fn new(dim: usize, mut generators: Vec<Vec<i64>>) -> Result<Self, PolytopeError> {
        if generators.is_empty() {
            return Err(PolytopeError::ZeroPolynomial);
        }
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(PolytopeError::DimensionMismatch(dim, g.len()));
        }
        generators.sort();
        generators.dedup();
        Ok(LatticePolytope { dim, generators })
    }

    /// The closed interval `[lo, hi]` in dimension one.
    pub fn interval(lo: i64, hi: i64) -> Self {
        Self::new(1, vec![vec![lo], vec![hi]]).expect("nonempty")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// Componentwise minimum and maximum of the generators.
    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = self.generators[0].clone();
        let mut hi = lo.clone();
        for g in &self.generators {
            for k in 0..self.dim {
                lo[k] = lo[k].min(g[k]);
                hi[k] = hi[k].max(g[k]);
            }
        }
        (lo, hi)
    }

    /// Exact hull membership: closed form for intervals, exact linear
    /// programming otherwise.
    pub fn contains(&self, point: &[i64]) -> bool {
        if self.dim == 1 {
            let (lo, hi) = self.bounding_box();
            return lo[0] <= point[0] && point[0] <= hi[0];
        }
        self.contains_lp(point)
    }

    /// Hull membership via a phase-I simplex over the rationals, valid in
    /// every dimension.
    pub fn contains_lp(&self, point: &[i64]) -> bool {
        hull_contains(&self.generators, point)
    }

    /// Drops generators that lie in the hull of the others.
    fn prune(mut self) -> Self {
        if self.dim == 1 {
            let (lo, hi) = self.bounding_box();
            return LatticePolytope::interval(lo[0], hi[0]);
        }
        if self.dim == 2 {
            self.generators = convex_hull_2d(&self.generators);
            return self;
        }
        let mut k = 0;
        while k < self.generators.len() && self.generators.len() > 1 {
            let point = self.generators[k].clone();
            let others: Vec<Vec<i64>> = self
                .generators
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, g)| g.clone())
                .collect();
            if hull_contains(&others, &point) {
                self.generators.remove(k);
            } else {
                k += 1;
            }
        }
        self
    }

    /// Every generator of `other` lies in this hull.
    pub fn contains_polytope(&self, other: &LatticePolytope) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }

    pub fn scaled(&self, w: i64) -> LatticePolytope {
        let generators = self
            .generators
            .iter()
            .map(|g| g.iter().map(|&x| x * w).collect())
            .collect();
        LatticePolytope::new(self.dim, generators).expect("nonempty")
    }
}

/// Generators of the t-Newton polytope: the t-parts of the support.
pub fn newton_polytope_t(a: &LaurentPoly) -> Result<LatticePolytope, PolytopeError> {
    if a.is_zero() {
        return Err(PolytopeError::ZeroPolynomial);
    }
    LatticePolytope::new(a.context().t_vars, a.t_support())
}

/// `Σ w_k N_k`, pruned to hull vertices after each summand.
pub fn weighted_minkowski_sum(
    polys: &[LatticePolytope],
    weights: &[i64],
) -> Result<LatticePolytope, PolytopeError> {
    if polys.len() != weights.len() {
        return Err(PolytopeError::LengthMismatch(polys.len(), weights.len()));
    }
    let first = polys.first().ok_or(PolytopeError::EmptyTuple)?;
    let dim = first.dim;
    let mut acc = LatticePolytope::new(dim, vec![vec![0; dim]])?;
    for (poly, &w) in polys.iter().zip(weights) {
        if poly.dim != dim {
            return Err(PolytopeError::DimensionMismatch(dim, poly.dim));
        }
        let mut sums = Vec::with_capacity(acc.generators.len() * poly.generators.len());
        for a in &acc.generators {
            for b in &poly.generators {
                sums.push(a.iter().zip(b).map(|(x, y)| x + w * y).collect());
            }
        }
        acc = LatticePolytope::new(dim, sums)?.prune();
    }
    Ok(acc)
}

/// True iff the hull meets `qZ^r` exactly in the origin.
pub fn polytope_lattice_intersection_trivial(poly: &LatticePolytope, q: i64) -> bool {
    let origin = vec![0; poly.dim];
    if !poly.contains(&origin) {
        return false;
    }
    let (lo, hi) = poly.bounding_box();
    let ranges: Vec<(i64, i64)> = lo
        .iter()
        .zip(&hi)
        .map(|(&l, &h)| (l.div_euclid(q) + i64::from(l.rem_euclid(q) != 0), h.div_euclid(q)))
        .collect();
    let mut point: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|&(a, b)| a > b) {
        return true;
    }
    loop {
        if point.iter().any(|&c| c != 0) {
            let scaled: Vec<i64> = point.iter().map(|c| c * q).collect();
            if poly.contains(&scaled) {
                return false;
            }
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == point.len() {
                return true;
            }
            if point[k] < ranges[k].1 {
                point[k] += 1;
                break;
            }
            point[k] = ranges[k].0;
            k += 1;
        }
    }
}

/// Checks every window `(i, j)` of the tuple of Newton polytopes; the error
/// names the first failing window.
pub fn check_admissible_polytopes(polys: &[LatticePolytope], p: u64) -> Result<(), PolytopeError> {
    if polys.is_empty() {
        return Err(PolytopeError::EmptyTuple);
    }
    let p = p as i64;
    for i in 0..polys.len() {
        for j in i..polys.len() {
            let weights: Vec<i64> = (0..=(j - i) as u32).map(|e| p.pow(e)).collect();
            let sum = weighted_minkowski_sum(&polys[i..=j], &weights)?;
            let q = p.pow((j - i + 1) as u32);
            if !polytope_lattice_intersection_trivial(&sum, q) {
                return Err(PolytopeError::NotAdmissible { i, j, q: q as u64 });
            }
        }
    }
    Ok(())
}

pub fn check_admissible(tuple: &[LaurentPoly], p: u64) -> Result<(), PolytopeError> {
    let polys = tuple.iter().map(newton_polytope_t).collect::<Result<Vec<_>, _>>()?;
    check_admissible_polytopes(&polys, p)
}

pub fn is_admissible_tuple(tuple: &[LaurentPoly], p: u64) -> bool {
    check_admissible(tuple, p).is_ok()
}

/// Andrew's monotone chain; collinear points are dropped.
fn convex_hull_2d(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts.into_iter().map(|(x, y)| vec![x, y]).collect();
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i128 {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &pt in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
                hull.pop();
            }
            hull.push(pt);
        }
        hull.pop();
    }
    if hull.is_empty() {
        // all points collinear and equal endpoints collapsed
        return vec![vec![pts[0].0, pts[0].1], vec![pts[pts.len() - 1].0, pts[pts.len() - 1].1]];
    }
    hull.into_iter().map(|(x, y)| vec![x, y]).collect()
}

/// Phase-I simplex with Bland's rule: is `point` a convex combination of
/// `generators`?
fn hull_contains(generators: &[Vec<i64>], point: &[i64]) -> bool {
    let n = generators.len();
    if n == 0 {
        return false;
    }
    let r = point.len();
    let rows = r + 1;
    // Columns: n convex weights, then one artificial per row, then the rhs.
    let cols = n + rows + 1;
    let zero = BigRational::zero();
    let mut tab: Vec<Vec<BigRational>> = vec![vec![zero.clone(); cols]; rows];
    for i in 0..rows {
        let mut rhs = if i < r { BigInt::from(point[i]) } else { BigInt::one() };
        let mut sign = BigInt::one();
        if rhs.is_negative() {
            rhs = -rhs;
            sign = -sign;
        }
        for (k, g) in generators.iter().enumerate() {
            let a = if i < r { BigInt::from(g[i]) } else { BigInt::one() };
            tab[i][k] = BigRational::from_integer(a * &sign);
        }
        tab[i][n + i] = BigRational::one();
        tab[i][cols - 1] = BigRational::from_integer(rhs);
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();
    // Phase-I objective: minimise the sum of artificials; reduced costs
    // are minus the column sums over the rows.
    loop {
        let reduced = |j: usize, tab: &Vec<Vec<BigRational>>| -> BigRational {
            let in_art = j >= n && j < n + rows;
            let cost = if in_art { BigRational::one() } else { BigRational::zero() };
            let mut z = BigRational::zero();
            for (i, &b) in basis.iter().enumerate() {
                if b >= n && b < n + rows {
                    z += &tab[i][j];
                }
            }
            cost - z
        };
        let entering = (0..n + rows).find(|&j| !basis.contains(&j) && reduced(j, &tab).is_negative());
        let Some(e) = entering else { break };
        // ratio test, ties broken by smallest basis index (Bland)
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..rows {
            if tab[i][e].is_positive() {
                let ratio = &tab[i][cols - 1] / &tab[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((li, _)) = leave else { break };
        let pivot = tab[li][e].clone();
        for v in tab[li].iter_mut() {
            *v = &*v / &pivot;
        }
        let pivot_row = tab[li].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != li && !row[e].is_zero() {
                let f = row[e].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        basis[li] = e;
    }
    basis
        .iter()
        .enumerate()
        .all(|(i, &b)| b < n || b >= n + rows || tab[i][cols - 1].is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Context;

    fn lp(ctx: Context, s: &str) -> LaurentPoly {
        LaurentPoly::parse(ctx, s).unwrap()
    }

    #[test]
    fn newton_polytopes() {
        let c = Context::new(1, 1);
        let h = &lp(c, "t - 1") * &lp(c, "1 - z1*t^-1");
        let n = newton_polytope_t(&h).unwrap();
        assert_eq!(n.generators(), &[vec![-1], vec![0], vec![1]]);
        assert_eq!(newton_polytope_t(&lp(c, "5")).unwrap().generators(), &[vec![0]]);
        let n = newton_polytope_t(&lp(c, "t^2*z1 + t*z1^2")).unwrap();
        assert_eq!(n.bounding_box(), (vec![1], vec![2]));
        assert_eq!(newton_polytope_t(&LaurentPoly::zero(c)), Err(PolytopeError::ZeroPolynomial));
    }

    #[test]
    fn minkowski_examples() {
        let i = LatticePolytope::interval(-1, 1);
        let s = weighted_minkowski_sum(&[i.clone(), i.clone()], &[1, 3]).unwrap();
        assert_eq!(s, LatticePolytope::interval(-4, 4));
        let o = LatticePolytope::new(1, vec![vec![0]]).unwrap();
        assert_eq!(weighted_minkowski_sum(&[o], &[7]).unwrap().bounding_box(), (vec![0], vec![0]));
        let s = weighted_minkowski_sum(&[i.clone(), i.clone(), i], &[1, 3, 9]).unwrap();
        assert_eq!(s, LatticePolytope::interval(-13, 13));
        let sq = LatticePolytope::new(2, vec![vec![0, 0]]).unwrap();
        assert!(matches!(
            weighted_minkowski_sum(&[LatticePolytope::interval(0, 1), sq], &[1, 1]),
            Err(PolytopeError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn lattice_intersection_examples() {
        let p = LatticePolytope::interval(-13, 13);
        assert!(polytope_lattice_intersection_trivial(&p, 27));
        assert!(!polytope_lattice_intersection_trivial(&p, 9));
        assert!(!polytope_lattice_intersection_trivial(&LatticePolytope::interval(1, 2), 5));
    }

    #[test]
    fn two_dimensional_hull() {
        let square = LatticePolytope::new(
            2,
            vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1], vec![0, 0], vec![0, 1]],
        )
        .unwrap()
        .prune();
        assert_eq!(square.generators().len(), 4);
        assert!(square.contains(&[0, 1]));
        assert!(square.contains_lp(&[1, 0]));
        assert!(!square.contains(&[2, 0]));
        let tri = LatticePolytope::new(2, vec![vec![0, 0], vec![4, 0], vec![0, 4]]).unwrap();
        assert!(tri.contains(&[2, 2]));
        assert!(!tri.contains(&[3, 2]));
        assert!(polytope_lattice_intersection_trivial(&square, 2));
        assert!(!polytope_lattice_intersection_trivial(&tri, 2));
    }

    #[test]
    fn admissibility_examples() {
        let c = Context::new(1, 1);
        let h = &lp(c, "t - 1") * &lp(c, "1 - z1*t^-1");
        assert!(is_admissible_tuple(&[h.clone(), h.clone(), h.clone()], 3));
        assert!(!is_admissible_tuple(&[lp(c, "t^2")], 3));
        // t^-k * h for digits k in [-1, 1], as in the refined C-coefficient congruence
        let tuple = vec![h.clone(), &LaurentPoly::t_pow(c, 0, 1) * &h, h.clone()];
        assert!(is_admissible_tuple(&tuple, 3));
        assert_eq!(
            check_admissible(&[h.clone(), lp(c, "t^4")], 3),
            Err(PolytopeError::NotAdmissible { i: 0, j: 1, q: 9 })
        );
    }
}
