//! Finite groups as multiplication tables.

use rand::Rng;

use super::{SctError, EXHAUSTIVE_ASSOC_ORDER, MAX_GROUP_ORDER};
use crate::rng::stream_rng;

/// A finite group given by its full multiplication table over element
/// indices `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validate a table: shape, identity law, two-sided inverses, and
    /// associativity (exhaustive up to order 64, spot-checked above).
    #[allow(clippy::needless_range_loop)]
    pub fn new(mul: Vec<Vec<usize>>, identity: usize) -> Result<Self, SctError> {
        let order = mul.len();
        if order == 0 || identity >= order {
            return Err(SctError::BadMulTable {
                order,
                detail: "empty table or identity out of range".into(),
            });
        }
        if order > MAX_GROUP_ORDER {
            return Err(SctError::GroupTooLarge {
                order,
                max: MAX_GROUP_ORDER,
            });
        }
        for (g, row) in mul.iter().enumerate() {
            if row.len() != order {
                return Err(SctError::BadMulTable {
                    order,
                    detail: format!("row {g} has length {}", row.len()),
                });
            }
            if let Some(&bad) = row.iter().find(|&&e| e >= order) {
                return Err(SctError::BadMulTable {
                    order,
                    detail: format!("row {g} contains out-of-range entry {bad}"),
                });
            }
        }
        for g in 0..order {
            if mul[identity][g] != g || mul[g][identity] != g {
                return Err(SctError::IdentityLawFails { g });
            }
        }
        let mut inverse = vec![usize::MAX; order];
        for g in 0..order {
            match (0..order).find(|&h| mul[g][h] == identity && mul[h][g] == identity) {
                Some(h) => inverse[g] = h,
                None => return Err(SctError::MissingInverse { g }),
            }
        }
        if order <= EXHAUSTIVE_ASSOC_ORDER {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                            return Err(SctError::NotAssociative { a, b, c });
                        }
                    }
                }
            }
        } else {
            let mut rng = stream_rng(order as u64, 0xA550C);
            for _ in 0..200_000 {
                let a = rng.random_range(0..order);
                let b = rng.random_range(0..order);
                let c = rng.random_range(0..order);
                if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                    return Err(SctError::NotAssociative { a, b, c });
                }
            }
        }
        Ok(FiniteGroup {
            mul,
            identity,
            inverse,
        })
    }

    /// The cyclic group of order `n`, written additively.
    pub fn cyclic(n: usize) -> Self {
        assert!((1..=MAX_GROUP_ORDER).contains(&n));
        let mul = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup::new(mul, 0).expect("cyclic table is a group")
    }

    /// Direct product; element `(a, b)` has index `a * |B| + b`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self, SctError> {
        let na = a.order();
        let nb = b.order();
        let order = na * nb;
        if order > MAX_GROUP_ORDER {
            return Err(SctError::GroupTooLarge {
                order,
                max: MAX_GROUP_ORDER,
            });
        }
        let idx = |x: usize, y: usize| x * nb + y;
        let mul = (0..order)
            .map(|g| {
                (0..order)
                    .map(|h| idx(a.mul(g / nb, h / nb), b.mul(g % nb, h % nb)))
                    .collect()
            })
            .collect();
        FiniteGroup::new(mul, idx(a.identity(), b.identity()))
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn mul_table(&self) -> &[Vec<usize>] {
        &self.mul
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_groups_are_valid() {
        for n in [1usize, 2, 3, 6, 12] {
            let g = FiniteGroup::cyclic(n);
            assert_eq!(g.order(), n);
            for a in 0..n {
                assert_eq!(g.mul(a, g.inverse(a)), g.identity());
            }
        }
    }

    #[test]
    fn direct_product_works() {
        let z2 = FiniteGroup::cyclic(2);
        let v4 = FiniteGroup::direct_product(&z2, &z2).unwrap();
        assert_eq!(v4.order(), 4);
        // Every element is its own inverse in (Z/2)^2.
        for g in 0..4 {
            assert_eq!(v4.inverse(g), g);
        }
    }

    #[test]
    fn bad_tables_are_rejected() {
        // Non-associative magma on 3 elements with an identity.
        let mul = vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 1]];
        let err = FiniteGroup::new(mul, 0).unwrap_err();
        assert!(matches!(
            err,
            SctError::NotAssociative { .. } | SctError::MissingInverse { .. }
        ));

        let mul = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::new(mul, 0).is_err());
    }

    #[test]
    fn large_order_sampled_associativity() {
        // (Z/11)^2 has order 121 > 64, exercising the sampled path.
        let z11 = FiniteGroup::cyclic(11);
        let g = FiniteGroup::direct_product(&z11, &z11).unwrap();
        assert_eq!(g.order(), 121);
    }
}
