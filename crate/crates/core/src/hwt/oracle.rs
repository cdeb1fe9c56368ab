//! Classical oracles over the fixed-subalgebra root system: positive-root
//! generation from a Cartan matrix, the exact product dimension formula,
//! Freudenthal weight multiplicities, and character-subtraction branching.
//!
//! Everything here works in label coordinates (pairings against the simple
//! coroots) with exact rational arithmetic; nothing depends on the quantum
//! side beyond the q = 1 weight data handed in.

use crate::scalar::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Root-system data derived from an integer Cartan matrix.
pub struct RootSystem {
    pub cartan: Vec<Vec<i64>>,
    /// Positive roots in simple-root coordinates.
    pub positive_roots: Vec<Vec<i64>>,
    /// Symmetrizers with d_i a_ij = d_j a_ji.
    pub d: Vec<i64>,
}

impl RootSystem {
    pub fn new(cartan: Vec<Vec<i64>>) -> Self {
        let n = cartan.len();
        let d = symmetrize(&cartan);
        let mut roots: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut v = vec![0i64; n];
                v[i] = 1;
                v
            })
            .collect();
        let mut known: std::collections::BTreeSet<Vec<i64>> = roots.iter().cloned().collect();
        let mut frontier = roots.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for root in &frontier {
                for i in 0..n {
                    let mut p = 0i64;
                    let mut probe = root.clone();
                    loop {
                        probe[i] -= 1;
                        if known.contains(&probe) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let pairing: i64 = root
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| c * cartan[i][j])
                        .sum();
                    if p - pairing > 0 {
                        let mut up = root.clone();
                        up[i] += 1;
                        if known.insert(up.clone()) {
                            roots.push(up.clone());
                            next.push(up);
                        }
                    }
                }
            }
            frontier = next;
        }
        roots.sort();
        RootSystem {
            cartan,
            positive_roots: roots,
            d,
        }
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// Number of positive roots.
    pub fn num_positive(&self) -> usize {
        self.positive_roots.len()
    }

    /// Exact dimension of the irreducible with the given dominant labels,
    /// by the product formula over positive roots.
    pub fn weyl_dim(&self, labels: &[Rational]) -> Option<BigInt> {
        if labels.len() != self.rank() {
            return None;
        }
        for l in labels {
            if l.num.sign() == num_bigint::Sign::Minus {
                return None;
            }
        }
        let mut num = Rational::one();
        let mut den = Rational::one();
        for root in &self.positive_roots {
            // (lambda + rho, alpha) = sum_j c_j d_j (labels_j + 1);
            // (rho, alpha) = sum_j c_j d_j.
            let mut top = Rational::zero();
            let mut bot = Rational::zero();
            for (j, &c) in root.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let cd = Rational::from_int(c * self.d[j]);
                top = top.add(&cd.mul(&labels[j].add(&Rational::one())));
                bot = bot.add(&cd);
            }
            num = num.mul(&top);
            den = den.mul(&bot);
        }
        let q = num.div(&den);
        if q.is_integer() {
            Some(q.num)
        } else {
            None
        }
    }

    /// Weight multiplicities of the irreducible with dominant integer labels,
    /// as label-coordinate vectors, via the Freudenthal recursion.
    ///
    /// Candidates are processed in strict height order (simple-root descent)
    /// so that every weight strictly above the current one is already known;
    /// the shifted-norm inequality (mu + rho, mu + rho) <= (lambda + rho,
    /// lambda + rho) bounds the enumeration.
    pub fn weight_multiplicities(&self, labels: &[i64]) -> BTreeMap<Vec<Rational>, BigInt> {
        let n = self.rank();
        assert_eq!(labels.len(), n);
        let lambda = self.labels_to_roots(
            &labels
                .iter()
                .map(|&l| Rational::from_int(l))
                .collect::<Vec<_>>(),
        );
        let two_rho = self.two_rho_roots();
        let shifted_norm = |mu: &[Rational]| -> Rational {
            let v: Vec<Rational> = mu
                .iter()
                .zip(&two_rho)
                .map(|(m, r)| m.add(&r.div(&Rational::from_int(2))))
                .collect();
            self.form(&v, &v)
        };
        let bound = shifted_norm(&lambda);
        // Multiplicities including explicit zeros inside the ball, so upward
        // string lookups terminate correctly.
        let mut mults: BTreeMap<Vec<Rational>, BigInt> = BTreeMap::new();
        mults.insert(lambda.clone(), BigInt::one());
        let mut level: Vec<Vec<Rational>> = vec![lambda.clone()];
        while !level.is_empty() {
            let mut next: Vec<Vec<Rational>> = Vec::new();
            for mu in &level {
                for i in 0..n {
                    let mut cand = mu.clone();
                    cand[i] = cand[i].sub(&Rational::one());
                    if mults.contains_key(&cand) || next.contains(&cand) {
                        continue;
                    }
                    // Stay inside the cone below lambda.
                    let inside_cone = lambda
                        .iter()
                        .zip(&cand)
                        .all(|(l, c)| l.sub(c).num.sign() != num_bigint::Sign::Minus);
                    if !inside_cone {
                        continue;
                    }
                    let nrm = shifted_norm(&cand);
                    if nrm > bound {
                        continue;
                    }
                    next.push(cand);
                }
            }
            for cand in &next {
                let m = self.freudenthal(&lambda, cand, &mults);
                mults.insert(cand.clone(), m);
            }
            level = next;
        }
        mults
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(mu, m)| (self.roots_to_labels(&mu), m))
            .collect()
    }

    /// Freudenthal multiplicity of mu in V(lambda), both in root coordinates,
    /// given the multiplicities of everything strictly above mu.
    fn freudenthal(
        &self,
        lambda: &[Rational],
        mu: &[Rational],
        known: &BTreeMap<Vec<Rational>, BigInt>,
    ) -> BigInt {
        // Denominator: (lambda + rho, lambda + rho) - (mu + rho, mu + rho)
        //            = (lambda + mu + 2 rho, lambda - mu).
        let two_rho = self.two_rho_roots();
        let sum: Vec<Rational> = lambda
            .iter()
            .zip(mu)
            .zip(&two_rho)
            .map(|((l, m), r)| l.add(m).add(r))
            .collect();
        let diff: Vec<Rational> = lambda.iter().zip(mu).map(|(l, m)| l.sub(m)).collect();
        let denom = self.form(&sum, &diff);
        if denom.is_zero() {
            return BigInt::zero();
        }
        // Numerator: 2 sum_{alpha > 0} sum_{k >= 1} (mu + k alpha, alpha) mult(mu + k alpha).
        let mut acc = Rational::zero();
        for root in &self.positive_roots {
            let root_r: Vec<Rational> = root.iter().map(|&c| Rational::from_int(c)).collect();
            let mut k = 1i64;
            loop {
                let shifted: Vec<Rational> = mu
                    .iter()
                    .zip(&root_r)
                    .map(|(m, r)| m.add(&r.mul(&Rational::from_int(k))))
                    .collect();
                let Some(m) = known.get(&shifted) else {
                    // Outside the known support; the support is saturated
                    // upward, so no larger k contributes either.
                    break;
                };
                let pairing = self.form(&shifted, &root_r);
                acc = acc.add(&pairing.mul(&Rational::new(m.clone(), BigInt::one())));
                k += 1;
            }
        }
        let num = acc.mul(&Rational::from_int(2));
        let q = num.div(&denom);
        assert!(q.is_integer(), "Freudenthal recursion left the integers");
        q.num
    }

    /// Symmetric form on root coordinates: (x, y) = sum_i x_i d_i (C y)_i.
    fn form(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let n = self.rank();
        let mut acc = Rational::zero();
        for i in 0..n {
            let mut cy = Rational::zero();
            for j in 0..n {
                cy = cy.add(&y[j].mul(&Rational::from_int(self.cartan[i][j])));
            }
            acc = acc.add(&x[i].mul(&Rational::from_int(self.d[i])).mul(&cy));
        }
        acc
    }

    /// 2 rho in root coordinates (sum of positive roots).
    fn two_rho_roots(&self) -> Vec<Rational> {
        let n = self.rank();
        let mut acc = vec![Rational::zero(); n];
        for root in &self.positive_roots {
            for (a, &c) in acc.iter_mut().zip(root) {
                *a = a.add(&Rational::from_int(c));
            }
        }
        acc
    }

    /// Solve C^T-free conversion: labels_i = sum_j C_ij roots_j.
    fn labels_to_roots(&self, labels: &[Rational]) -> Vec<Rational> {
        // Solve C x = labels by exact Gaussian elimination on rationals.
        let n = self.rank();
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Rational::from_int(self.cartan[i][j]))
                    .collect()
            })
            .collect();
        let mut b = labels.to_vec();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .expect("Cartan matrix is invertible");
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = Rational::one().div(&a[col][col]);
            for j in 0..n {
                a[col][j] = a[col][j].mul(&inv);
            }
            b[col] = b[col].mul(&inv);
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
                    }
                    b[r] = b[r].sub(&f.mul(&b[col]));
                }
            }
        }
        b
    }

    fn roots_to_labels(&self, roots: &[Rational]) -> Vec<Rational> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..n {
                    acc = acc.add(&roots[j].mul(&Rational::from_int(self.cartan[i][j])));
                }
                acc
            })
            .collect()
    }
}

fn symmetrize(cartan: &[Vec<i64>]) -> Vec<i64> {
    let n = cartan.len();
    let mut d: Vec<Option<(i64, i64)>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some((1, 1));
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (ni, di) = d[i].unwrap();
            for j in 0..n {
                if i == j || cartan[i][j] == 0 || d[j].is_some() {
                    continue;
                }
                let num = ni * cartan[i][j];
                let den = di * cartan[j][i];
                let g = num_integer::gcd(num, den).max(1);
                d[j] = Some((num / g, den / g));
                stack.push(j);
            }
        }
    }
    let lcm_den = d
        .iter()
        .map(|x| x.unwrap().1.abs())
        .fold(1i64, num_integer::lcm);
    let mut out: Vec<i64> = d
        .iter()
        .map(|x| {
            let (num, den) = x.unwrap();
            num * (lcm_den / den)
        })
        .collect();
    let g = out.iter().fold(0i64, |acc, &x| num_integer::gcd(acc, x));
    if g > 1 {
        for x in out.iter_mut() {
            *x /= g;
        }
    }
    out
}

/// Branch a weight multiset into irreducible constituents by repeated
/// character subtraction. The input is the multiset of label-coordinate
/// weights at q = 1; the output maps dominant labels to multiplicities.
pub fn branch_by_characters(
    system: &RootSystem,
    weights: &[Vec<Rational>],
) -> Result<BTreeMap<Vec<Rational>, BigInt>, String> {
    let mut pool: BTreeMap<Vec<Rational>, BigInt> = BTreeMap::new();
    for w in weights {
        *pool.entry(w.clone()).or_insert_with(BigInt::zero) += 1;
    }
    let mut out: BTreeMap<Vec<Rational>, BigInt> = BTreeMap::new();
    loop {
        pool.retain(|_, m| !m.is_zero());
        if pool.is_empty() {
            return Ok(out);
        }
        // Highest weight: maximal by total height then lexicographic order.
        let (top, mult) = pool
            .iter()
            .max_by(|(a, _), (b, _)| {
                let ha = height(a);
                let hb = height(b);
                ha.cmp(&hb).then_with(|| a.cmp(b))
            })
            .map(|(k, v)| (k.clone(), v.clone()))
            .expect("nonempty pool");
        if mult.sign() == num_bigint::Sign::Minus {
            return Err(format!(
                "character subtraction went negative at weight {top:?}"
            ));
        }
        // Dominance and integrality of the would-be highest weight.
        let labels: Result<Vec<i64>, String> = top
            .iter()
            .map(|c| {
                if !c.is_integer() {
                    return Err(format!("non-integral candidate highest weight {top:?}"));
                }
                let v: i64 = c.num.clone().try_into().map_err(|_| "overflow".to_string())?;
                if v < 0 {
                    return Err(format!("non-dominant candidate highest weight {top:?}"));
                }
                Ok(v)
            })
            .collect();
        let labels = labels?;
        let character = system.weight_multiplicities(&labels);
        for (mu, m) in character {
            let slot = pool.entry(mu).or_insert_with(BigInt::zero);
            *slot -= m * &mult;
        }
        *out.entry(top).or_insert_with(BigInt::zero) += mult;
    }
}

fn height(w: &[Rational]) -> Rational {
    w.iter().fold(Rational::zero(), |acc, c| acc.add(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&c| Rational::from_int(c)).collect()
    }

    #[test]
    fn a1_dimensions() {
        let sys = RootSystem::new(vec![vec![2]]);
        assert_eq!(sys.num_positive(), 1);
        assert_eq!(sys.weyl_dim(&labels(&[0])), Some(BigInt::from(1)));
        assert_eq!(sys.weyl_dim(&labels(&[2])), Some(BigInt::from(3)));
        // Half-integer coroot value 1/2 on the B_1-normalized so_3 ladder:
        // dim = 2 n + 1 with label = 2n, so label 1 gives dim 2.
        assert_eq!(
            sys.weyl_dim(&[Rational::from_int(1)]),
            Some(BigInt::from(2))
        );
    }

    #[test]
    fn b2_and_c2_dimensions() {
        // Long-first presentation of the rank-two symplectic algebra.
        let c2 = RootSystem::new(vec![vec![2, -1], vec![-2, 2]]);
        assert_eq!(c2.num_positive(), 4);
        assert_eq!(c2.weyl_dim(&labels(&[0, 1])), Some(BigInt::from(4)));
        assert_eq!(c2.weyl_dim(&labels(&[1, 0])), Some(BigInt::from(5)));
        assert_eq!(c2.weyl_dim(&labels(&[0, 2])), Some(BigInt::from(10)));
        // so_5 with the short root last.
        let b2 = RootSystem::new(vec![vec![2, -1], vec![-2, 2]]);
        assert_eq!(b2.weyl_dim(&labels(&[0, 0])), Some(BigInt::from(1)));
    }

    #[test]
    fn a2_weight_multiplicities() {
        let a2 = RootSystem::new(vec![vec![2, -1], vec![-1, 2]]);
        // Adjoint of the rank-two special linear algebra: dim 8, zero weight
        // has multiplicity 2.
        let mults = a2.weight_multiplicities(&[1, 1]);
        let total: BigInt = mults.values().sum();
        assert_eq!(total, BigInt::from(8));
        assert_eq!(mults[&labels(&[0, 0])], BigInt::from(2));
    }

    #[test]
    fn branch_so3_adjoint_of_gl3() {
        // The so_3 weight multiset of the 8-dimensional module: two strings
        // of spins 1 and 2 in the 2n-label convention.
        let so3 = RootSystem::new(vec![vec![2]]);
        let weights: Vec<Vec<Rational>> = [-4i64, -2, -2, 0, 0, 2, 2, 4]
            .iter()
            .map(|&m| labels(&[m]))
            .collect();
        let out = branch_by_characters(&so3, &weights).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[&labels(&[2])], BigInt::from(1));
        assert_eq!(out[&labels(&[4])], BigInt::from(1));
    }
}
