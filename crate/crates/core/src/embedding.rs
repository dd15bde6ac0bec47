//! Set partitions as measures on the unit square.
//!
//! A partition of `1..=n` embeds as a subprobability on the triangle above
//! the diagonal: each arc `(i, j)` contributes mass `1/n` spread uniformly
//! over the grid square `[(i-1)/n, i/n] x [(j-1)/n, j/n]`. The relevant
//! partition statistics become integrals of this measure, computed here in
//! exact rational arithmetic, and convergence to the limit shape (uniform
//! mass `1/2` on the antidiagonal segment from `(0,1)` to `(1/2,1/2)`) is
//! quantified by a corner-CDF discrepancy.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::setpartition::{classify_arc_pair, ArcPairClass, SetPartition};

/// Exact rational type used for the functionals. `i128` comfortably covers
/// grid sizes up to a few thousand.
pub type Rat = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("cell ({i},{j}) is not strictly upper within 1..={n}")]
    CellOutOfRange { i: usize, j: usize, n: usize },
    #[error("two cells share row {i}")]
    RowReused { i: usize },
    #[error("two cells share column {j}")]
    ColumnReused { j: usize },
}

/// Grid measure with one mass-`1/n` cell per arc. Rows and columns hold at
/// most one cell each, which is exactly the subuniform-marginal property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMeasure {
    n: usize,
    cells: Vec<(usize, usize)>,
}

impl GridMeasure {
    pub fn new(n: usize, mut cells: Vec<(usize, usize)>) -> Result<Self, EmbeddingError> {
        assert!(n >= 1);
        cells.sort_unstable();
        let mut rows = vec![false; n + 1];
        let mut cols = vec![false; n + 1];
        for &(i, j) in &cells {
            if i == 0 || i >= j || j > n {
                return Err(EmbeddingError::CellOutOfRange { i, j, n });
            }
            if rows[i] {
                return Err(EmbeddingError::RowReused { i });
            }
            if cols[j] {
                return Err(EmbeddingError::ColumnReused { j });
            }
            rows[i] = true;
            cols[j] = true;
        }
        Ok(GridMeasure { n, cells })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    /// Total mass `d/n`.
    pub fn total_mass(&self) -> Rat {
        Rat::new(self.cells.len() as i128, self.n as i128)
    }

    /// First functional: the integral of `y - x`. Equals `dim / n^2`;
    /// computed both from the statistic and cell by cell, which must agree.
    pub fn i1(&self) -> Rat {
        let n2 = (self.n * self.n) as i128;
        let dim: i128 = self.cells.iter().map(|&(i, j)| (j - i) as i128).sum();
        let by_statistic = Rat::new(dim, n2);
        let by_cells = self
            .cells
            .iter()
            .map(|&(i, j)| Rat::new((j - i) as i128, n2))
            .fold(Rat::zero(), |acc, term| acc + term);
        assert_eq!(by_statistic, by_cells);
        by_statistic
    }

    /// Second functional: the pair integral of the indicator
    /// `x1 < x2 < y1 < y2`. Satisfies
    /// `n^2 I2 = crs + d/4 + adjacent/2`, used here directly; the four-case
    /// cell-pair table recomputes it independently in the tests.
    pub fn i2(&self) -> Rat {
        let d = self.cells.len();
        let mut crs = 0usize;
        let mut adjacent = 0usize;
        for (idx, &a) in self.cells.iter().enumerate() {
            for &b in &self.cells[idx + 1..] {
                match classify_arc_pair(a, b) {
                    ArcPairClass::Crossing => crs += 1,
                    ArcPairClass::Adjacent => adjacent += 1,
                    _ => {}
                }
            }
        }
        Rat::new(
            4 * crs as i128 + d as i128 + 2 * adjacent as i128,
            4 * (self.n * self.n) as i128,
        )
    }

    /// Entropy-style functional `1/2 - 2 I1 + I2`. Strictly positive for
    /// every grid measure; zero only for the limit shape itself.
    pub fn entropy(&self) -> Rat {
        Rat::new(1, 2) - Rat::new(2, 1) * self.i1() + self.i2()
    }

    /// All three functionals in one pass.
    pub fn functionals(&self) -> Functionals {
        let i1 = self.i1();
        let i2 = self.i2();
        Functionals {
            i1,
            i2,
            entropy: Rat::new(1, 2) - Rat::new(2, 1) * i1 + i2,
        }
    }

    /// Mass of the corner rectangle `[0, a] x [1-b, 1]`, exact.
    pub fn cdf(&self, a: Rat, b: Rat) -> Rat {
        let n = self.n as i128;
        let cell = Rat::new(1, n);
        let mut total = Rat::zero();
        for &(i, j) in &self.cells {
            let x_lo = Rat::new(i as i128 - 1, n);
            let y_hi = Rat::new(j as i128, n);
            let ox = (a - x_lo).min(cell).max(Rat::zero());
            let oy = (y_hi - (Rat::new(1, 1) - b)).min(cell).max(Rat::zero());
            total += Rat::new(n, 1) * ox * oy;
        }
        total
    }

    /// Corner-CDF discrepancy against the limit shape: the maximum of
    /// `|F(a,b) - min(a,b)|` over an evenly spaced lattice of `(a,b)` in
    /// `[0, 1/2]^2`, plus the mass defect `|mass - 1/2|`.
    pub fn discrepancy(&self, grid: usize) -> f64 {
        assert!(grid >= 2, "discrepancy needs a lattice of at least 2x2");
        let n = self.n as i128;
        let g2 = 2 * grid as i128; // lattice step is 1/(2 grid) = (1/grid) * 1/2
        // Work over the common denominator scale X = 2 * grid * n: every
        // lattice coordinate and cell boundary is an integer multiple of 1/X.
        let mut max_num: i128 = 0; // max |F - min(a,b)| * X^2
        let x_scale_sq = (g2 * n) * (g2 * n);
        let mut oy_scaled = vec![0i128; self.cells.len()];
        for t in 0..=grid as i128 {
            // b = t / (2 grid); 1 - b scales to (g2 - t) * n.
            let one_minus_b = (g2 - t) * n;
            for (slot, &(_, j)) in oy_scaled.iter_mut().zip(&self.cells) {
                let y_hi = j as i128 * g2;
                let y_lo = (j as i128 - 1) * g2;
                *slot = (y_hi - one_minus_b.max(y_lo)).max(0);
            }
            for s in 0..=grid as i128 {
                let a_scaled = s * n;
                let mut mass_num = 0i128; // F * X^2 / n
                for (&(i, _), &oy) in self.cells.iter().zip(&oy_scaled) {
                    if oy == 0 {
                        continue;
                    }
                    let x_lo = (i as i128 - 1) * g2;
                    let x_hi = i as i128 * g2;
                    let ox = (a_scaled.min(x_hi) - x_lo).max(0);
                    mass_num += ox * oy;
                }
                let f_scaled = n * mass_num;
                let target_scaled = s.min(t) * g2 * n * n;
                max_num = max_num.max((f_scaled - target_scaled).abs());
            }
        }
        let cdf_term = max_num as f64 / x_scale_sq as f64;
        let mass_term = (self.total_mass() - Rat::new(1, 2)).abs();
        cdf_term + mass_term.to_f64().unwrap()
    }

    /// Bin the measure into a `g x g` grid over the unit square by exact
    /// overlap mass. Row 0 of the result is the top of the square.
    #[allow(clippy::needless_range_loop)]
    pub fn heatmap(&self, g: usize) -> Vec<Vec<f64>> {
        assert!(g >= 1);
        let n = self.n as i128;
        let gi = g as i128;
        let mut bins = vec![vec![Rat::zero(); g]; g];
        for &(i, j) in &self.cells {
            let x_lo = Rat::new(i as i128 - 1, n);
            let x_hi = Rat::new(i as i128, n);
            let y_lo = Rat::new(j as i128 - 1, n);
            let y_hi = Rat::new(j as i128, n);
            let col_lo = ((i as i128 - 1) * gi / n) as usize;
            let col_hi = (((i as i128 * gi) + n - 1) / n - 1).max(0) as usize;
            let row_lo = ((j as i128 - 1) * gi / n) as usize;
            let row_hi = (((j as i128 * gi) + n - 1) / n - 1).max(0) as usize;
            for col in col_lo..=col_hi.min(g - 1) {
                let bx_lo = Rat::new(col as i128, gi);
                let bx_hi = Rat::new(col as i128 + 1, gi);
                let ox = (x_hi.min(bx_hi) - x_lo.max(bx_lo)).max(Rat::zero());
                if ox.is_zero() {
                    continue;
                }
                for row in row_lo..=row_hi.min(g - 1) {
                    let by_lo = Rat::new(row as i128, gi);
                    let by_hi = Rat::new(row as i128 + 1, gi);
                    let oy = (y_hi.min(by_hi) - y_lo.max(by_lo)).max(Rat::zero());
                    if oy.is_zero() {
                        continue;
                    }
                    // grid row 0 is the top: flip the y index.
                    bins[g - 1 - row][col] += Rat::new(n, 1) * ox * oy;
                }
            }
        }
        bins.into_iter()
            .map(|row| row.into_iter().map(|m| m.to_f64().unwrap()).collect())
            .collect()
    }
}

/// The integral functionals of a grid measure. For any measure coming
/// from a partition, `entropy > 0`, equivalently `i1 < 1/4 + i2/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Functionals {
    pub i1: Rat,
    pub i2: Rat,
    pub entropy: Rat,
}

/// Embed a set partition as its grid measure: one cell per arc.
pub fn embed(pi: &SetPartition) -> GridMeasure {
    GridMeasure {
        n: pi.n(),
        cells: pi.arcs().to_vec(),
    }
}

/// The limit shape: uniform mass `1/2` on the segment
/// `{(x, 1-x) : x in [0, 1/2]}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LimitShape;

impl LimitShape {
    /// Corner CDF: `min(a, b)` for `a, b` in `[0, 1/2]`, saturating beyond.
    pub fn cdf(&self, a: Rat, b: Rat) -> Rat {
        a.min(b).min(Rat::new(1, 2)).max(Rat::zero())
    }

    pub fn total_mass(&self) -> Rat {
        Rat::new(1, 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize, blocks: &[&[usize]]) -> SetPartition {
        let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        SetPartition::from_blocks(n, &blocks).unwrap()
    }

    fn figure_partition() -> SetPartition {
        part(9, &[&[1, 5, 7], &[2], &[3, 4, 9], &[6, 8]])
    }

    #[test]
    fn embed_mass() {
        assert_eq!(embed(&figure_partition()).total_mass(), Rat::new(5, 9));
        assert_eq!(
            embed(&SetPartition::singletons(4)).total_mass(),
            Rat::zero()
        );
        assert_eq!(embed(&part(2, &[&[1, 2]])).total_mass(), Rat::new(1, 2));
    }

    #[test]
    fn measure_validation() {
        assert!(GridMeasure::new(5, vec![(1, 3), (2, 4)]).is_ok());
        assert!(matches!(
            GridMeasure::new(5, vec![(3, 3)]),
            Err(EmbeddingError::CellOutOfRange { .. })
        ));
        assert!(matches!(
            GridMeasure::new(5, vec![(1, 3), (1, 4)]),
            Err(EmbeddingError::RowReused { i: 1 })
        ));
        assert!(matches!(
            GridMeasure::new(5, vec![(1, 4), (2, 4)]),
            Err(EmbeddingError::ColumnReused { j: 4 })
        ));
    }

    #[test]
    fn i1_examples() {
        assert_eq!(embed(&figure_partition()).i1(), Rat::new(14, 81));
        assert_eq!(embed(&SetPartition::singletons(5)).i1(), Rat::zero());
        for n in [2usize, 5, 9] {
            let single = SetPartition::from_arcs(n, &[(1, n)]).unwrap();
            assert_eq!(
                embed(&single).i1(),
                Rat::new(n as i128 - 1, (n * n) as i128)
            );
        }
    }

    #[test]
    fn i2_examples() {
        assert_eq!(embed(&part(4, &[&[1, 3], &[2, 4]])).i2(), Rat::new(3, 32));
        assert_eq!(embed(&SetPartition::singletons(3)).i2(), Rat::zero());
        assert_eq!(embed(&part(3, &[&[1, 2, 3]])).i2(), Rat::new(1, 9));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(
            embed(&SetPartition::singletons(6)).entropy(),
            Rat::new(1, 2)
        );
        assert_eq!(embed(&part(2, &[&[1, 2]])).entropy(), Rat::new(1, 16));
        // 1/2 - 28/81 + (2 + 5/4 + 1)/81 = 67/324
        assert_eq!(embed(&figure_partition()).entropy(), Rat::new(67, 324));
    }

    #[test]
    fn cdf_examples() {
        let m = embed(&figure_partition());
        assert_eq!(m.cdf(Rat::zero(), Rat::new(1, 2)), Rat::zero());
        for n in [3usize, 7] {
            let single = embed(&SetPartition::from_arcs(n, &[(1, n)]).unwrap());
            assert_eq!(
                single.cdf(Rat::new(1, 1), Rat::new(1, 1)),
                Rat::new(1, n as i128)
            );
        }
        // Cell (1,2) of n=2 lies in [0,1/2] x [1/2,1]: the corner rectangle
        // [0,1/2] x [1/2,1] captures all of its mass.
        let m = embed(&part(2, &[&[1, 2]]));
        assert_eq!(m.cdf(Rat::new(1, 2), Rat::new(1, 2)), Rat::new(1, 2));
        assert_eq!(m.cdf(Rat::new(1, 4), Rat::new(1, 2)), Rat::new(1, 4));
    }

    #[test]
    fn limit_shape_cdf() {
        let omega = LimitShape;
        assert_eq!(omega.cdf(Rat::new(1, 3), Rat::new(1, 4)), Rat::new(1, 4));
        assert_eq!(omega.cdf(Rat::new(1, 1), Rat::new(1, 1)), Rat::new(1, 2));
        assert_eq!(omega.total_mass(), Rat::new(1, 2));
    }

    #[test]
    fn discrepancy_of_empty_measure_is_large() {
        let m = embed(&SetPartition::singletons(10));
        assert!(m.discrepancy(10) >= 0.5);
    }

    #[test]
    fn discrepancy_of_comb_is_small() {
        // The comb {{1,n},{2,n-1},...} is the discrete limit shape.
        let n = 100;
        let blocks: Vec<Vec<usize>> = (1..=n / 2).map(|i| vec![i, n + 1 - i]).collect();
        let comb = SetPartition::from_blocks(n, &blocks).unwrap();
        let disc = embed(&comb).discrepancy(50);
        assert!(disc < 0.05, "disc={disc}");
    }

    #[test]
    fn discrepancy_matches_rational_cdf_route() {
        // The scaled-integer lattice evaluation must agree with the plain
        // rational cdf at every lattice point.
        let m = embed(&part(6, &[&[1, 4, 6], &[2, 5], &[3]]));
        let grid = 7usize;
        let mut expected_max = Rat::zero();
        for s in 0..=grid {
            for t in 0..=grid {
                let a = Rat::new(s as i128, 2 * grid as i128);
                let b = Rat::new(t as i128, 2 * grid as i128);
                let diff = (m.cdf(a, b) - a.min(b)).abs();
                expected_max = expected_max.max(diff);
            }
        }
        let expected = expected_max.to_f64().unwrap()
            + (m.total_mass() - Rat::new(1, 2)).abs().to_f64().unwrap();
        let got = m.discrepancy(grid);
        assert!((got - expected).abs() < 1e-15, "got={got} expected={expected}");
    }

    #[test]
    fn heatmap_conserves_mass() {
        let pi = figure_partition();
        let m = embed(&pi);
        for g in [1usize, 3, 9, 10] {
            let grid = m.heatmap(g);
            let total: f64 = grid.iter().flatten().sum();
            let expected = m.total_mass().to_f64().unwrap();
            assert!((total - expected).abs() < 1e-12, "g={g} total={total}");
        }
        // With g = n each cell lands in exactly one bin.
        let grid = m.heatmap(9);
        assert!((grid[0][3] - 1.0 / 9.0).abs() < 1e-12); // cell (4,9): top row
        assert!((grid[8][0] - 0.0).abs() < 1e-12);
    }
}
