//! Supercharacter theories and consistent subgroup embeddings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FiniteGroup, SctError, TOLERANCE};

/// A supercharacter theory: superclasses partitioning the group and a
/// square table of supercharacter values, one complex value per class.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperTheory {
    group: FiniteGroup,
    superclasses: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    characters: Vec<Vec<Complex64>>,
}

impl SuperTheory {
    /// Structural construction: superclasses must partition the elements
    /// and every character row must give one value per superclass. The
    /// orthogonality axioms are checked separately by [`Self::validate`],
    /// so deliberately broken tables can be built and then rejected.
    pub fn new(
        group: FiniteGroup,
        superclasses: Vec<Vec<usize>>,
        characters: Vec<Vec<Complex64>>,
    ) -> Result<Self, SctError> {
        let order = group.order();
        let mut class_of = vec![usize::MAX; order];
        for (idx, class) in superclasses.iter().enumerate() {
            if class.is_empty() {
                return Err(SctError::NotAPartition {
                    detail: format!("superclass {idx} is empty"),
                });
            }
            for &g in class {
                if g >= order {
                    return Err(SctError::NotAPartition {
                        detail: format!("superclass {idx} contains out-of-range element {g}"),
                    });
                }
                if class_of[g] != usize::MAX {
                    return Err(SctError::NotAPartition {
                        detail: format!("element {g} appears in two superclasses"),
                    });
                }
                class_of[g] = idx;
            }
        }
        if let Some(g) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(SctError::NotAPartition {
                detail: format!("element {g} is in no superclass"),
            });
        }
        for (row, values) in characters.iter().enumerate() {
            if values.len() != superclasses.len() {
                return Err(SctError::BadCharacterTable {
                    detail: format!(
                        "row {row} has {} values for {} superclasses",
                        values.len(),
                        superclasses.len()
                    ),
                });
            }
        }
        Ok(SuperTheory {
            group,
            superclasses,
            class_of,
            characters,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn superclasses(&self) -> &[Vec<usize>] {
        &self.superclasses
    }

    pub fn characters(&self) -> &[Vec<Complex64>] {
        &self.characters
    }

    pub fn num_classes(&self) -> usize {
        self.superclasses.len()
    }

    pub fn num_characters(&self) -> usize {
        self.characters.len()
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.superclasses[class].len()
    }

    pub fn identity_class(&self) -> usize {
        self.class_of[self.group.identity()]
    }

    /// Degree of a class function: its value on the identity's class.
    pub fn degree_of(&self, phi: &[Complex64]) -> Complex64 {
        phi[self.identity_class()]
    }

    pub fn degree(&self, row: usize) -> Complex64 {
        self.degree_of(&self.characters[row])
    }

    /// Frobenius product of two superclass functions:
    /// `(1/|G|) sum_K |K| phi(K) conj(psi(K))`.
    pub fn frobenius(&self, phi: &[Complex64], psi: &[Complex64]) -> Complex64 {
        assert_eq!(phi.len(), self.num_classes());
        assert_eq!(psi.len(), self.num_classes());
        let total: Complex64 = self
            .superclasses
            .iter()
            .enumerate()
            .map(|(k, class)| phi[k] * psi[k].conj() * class.len() as f64)
            .sum();
        total / self.group.order() as f64
    }

    /// `c(chi) = chi(1) / <chi, chi>`, a positive real for valid theories.
    pub fn c_of(&self, phi: &[Complex64]) -> Result<f64, SctError> {
        let self_product = self.frobenius(phi, phi);
        if self_product.norm() < TOLERANCE {
            return Err(SctError::ZeroSelfProduct { row: usize::MAX });
        }
        let c = self.degree_of(phi) / self_product;
        if c.im.abs() > TOLERANCE * (1.0 + c.re.abs()) {
            return Err(SctError::NotReal {
                value: (c.re, c.im),
            });
        }
        Ok(c.re)
    }

    /// Superplancherel mass of each supercharacter:
    /// `chi(1)^2 / (|G| <chi, chi>)`. Errors if the masses do not sum to 1
    /// within tolerance.
    pub fn spl(&self) -> Result<Vec<f64>, SctError> {
        let order = self.group.order() as f64;
        let mut masses = Vec::with_capacity(self.num_characters());
        for (row, chi) in self.characters.iter().enumerate() {
            let self_product = self.frobenius(chi, chi);
            if self_product.norm() < TOLERANCE {
                return Err(SctError::ZeroSelfProduct { row });
            }
            let deg = self.degree(row);
            let mass = deg * deg / (self_product * order);
            if mass.im.abs() > TOLERANCE * (1.0 + mass.re.abs()) {
                return Err(SctError::NotReal {
                    value: (mass.re, mass.im),
                });
            }
            masses.push(mass.re);
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > TOLERANCE {
            return Err(SctError::SplNotNormalized { sum });
        }
        Ok(masses)
    }

    /// Check the defining axioms at the table level: as many characters as
    /// superclasses, the identity alone in its superclass, pairwise
    /// orthogonal rows, and positive real self-products.
    pub fn validate(&self) -> Result<(), SctError> {
        if self.num_characters() != self.num_classes() {
            return Err(SctError::CountsMismatch {
                classes: self.num_classes(),
                characters: self.num_characters(),
            });
        }
        if self.class_size(self.identity_class()) != 1 {
            return Err(SctError::NoIdentitySingleton);
        }
        let mut norms = Vec::with_capacity(self.num_characters());
        for (row, chi) in self.characters.iter().enumerate() {
            let self_product = self.frobenius(chi, chi);
            if self_product.norm() < TOLERANCE {
                return Err(SctError::ZeroSelfProduct { row });
            }
            if self_product.re <= 0.0
                || self_product.im.abs() > TOLERANCE * self_product.re.abs()
            {
                return Err(SctError::SelfProductNotPositive {
                    row,
                    value: (self_product.re, self_product.im),
                });
            }
            norms.push(self_product.re.sqrt());
        }
        for row1 in 0..self.num_characters() {
            for row2 in row1 + 1..self.num_characters() {
                let product = self.frobenius(&self.characters[row1], &self.characters[row2]);
                let deviation = product.norm() / (norms[row1] * norms[row2]);
                if deviation > TOLERANCE {
                    return Err(SctError::RowsNotOrthogonal {
                        row1,
                        row2,
                        deviation,
                    });
                }
            }
        }
        Ok(())
    }

    /// Second-kind orthogonality: for superclasses `K1, K2`,
    /// `sum_chi (c(chi)/chi(1)) chi(K1) conj(chi(K2))` must be
    /// `|G|/|K1|` when `K1 = K2` and `0` otherwise.
    pub fn second_orthogonality(&self) -> Result<OrthReport, SctError> {
        let order = self.group.order() as f64;
        let ratios: Vec<Complex64> = self
            .characters
            .iter()
            .enumerate()
            .map(|(row, chi)| {
                let self_product = self.frobenius(chi, chi);
                if self_product.norm() < TOLERANCE {
                    return Err(SctError::ZeroSelfProduct { row });
                }
                // c(chi)/chi(1) = 1 / <chi, chi>.
                Ok(Complex64::new(1.0, 0.0) / self_product)
            })
            .collect::<Result<_, _>>()?;
        let mut max_deviation = 0.0f64;
        for k1 in 0..self.num_classes() {
            for k2 in 0..self.num_classes() {
                let sum: Complex64 = self
                    .characters
                    .iter()
                    .zip(&ratios)
                    .map(|(chi, ratio)| ratio * chi[k1] * chi[k2].conj())
                    .sum();
                let expected = if k1 == k2 {
                    Complex64::new(order / self.class_size(k1) as f64, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                max_deviation = max_deviation.max((sum - expected).norm());
            }
        }
        let tolerance = TOLERANCE * order;
        Ok(OrthReport {
            max_deviation,
            tolerance,
            pass: max_deviation <= tolerance,
        })
    }

    pub fn to_json_string(&self) -> String {
        let wire = TheoryWire {
            order: self.group.order(),
            mul: self.group.mul_table().to_vec(),
            identity: self.group.identity(),
            superclasses: self.superclasses.clone(),
            characters: self
                .characters
                .iter()
                .map(|row| row.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("wire form serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, SctError> {
        let wire: TheoryWire =
            serde_json::from_str(text).map_err(|e| SctError::Json(e.to_string()))?;
        wire.build()
    }
}

/// Outcome of a second-kind orthogonality check.
#[derive(Debug, Clone, Copy)]
pub struct OrthReport {
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Both sides of a Frobenius-reciprocity instance.
#[derive(Debug, Clone, Copy)]
pub struct ReciprocityReport {
    pub induced_side: Complex64,
    pub restricted_side: Complex64,
    pub pass: bool,
}

/// Row-stochastic transition matrix between the supercharacters of an
/// embedded theory (rows) and of the ambient theory (columns).
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }
}

/// A subgroup carrying its own supercharacter theory, embedded by an
/// injective homomorphism whose image respects the ambient superclasses.
#[derive(Debug, Clone)]
pub struct SubgroupEmbedding {
    pub sub: SuperTheory,
    /// `injection[h]` is the ambient element representing subgroup element `h`.
    pub injection: Vec<usize>,
}

impl SubgroupEmbedding {
    pub fn new(sub: SuperTheory, injection: Vec<usize>) -> Self {
        SubgroupEmbedding { sub, injection }
    }

    /// Check the embedding against an ambient theory: injective
    /// homomorphism, and every subgroup superclass mapped inside a single
    /// ambient superclass (consistency).
    pub fn validate_in(&self, parent: &SuperTheory) -> Result<(), SctError> {
        let sub_order = self.sub.group().order();
        let parent_order = parent.group().order();
        if self.injection.len() != sub_order {
            return Err(SctError::BadInjection {
                detail: format!(
                    "injection has {} entries for a subgroup of order {sub_order}",
                    self.injection.len()
                ),
            });
        }
        let mut seen = vec![false; parent_order];
        for &img in &self.injection {
            if img >= parent_order {
                return Err(SctError::BadInjection {
                    detail: format!("image {img} out of range"),
                });
            }
            if seen[img] {
                return Err(SctError::BadInjection {
                    detail: format!("image {img} repeated"),
                });
            }
            seen[img] = true;
        }
        if self.injection[self.sub.group().identity()] != parent.group().identity() {
            return Err(SctError::BadInjection {
                detail: "identity is not mapped to the identity".into(),
            });
        }
        for a in 0..sub_order {
            for b in 0..sub_order {
                let lhs = self.injection[self.sub.group().mul(a, b)];
                let rhs = parent
                    .group()
                    .mul(self.injection[a], self.injection[b]);
                if lhs != rhs {
                    return Err(SctError::NotHomomorphism { a, b });
                }
            }
        }
        for (idx, class) in self.sub.superclasses().iter().enumerate() {
            let target = parent.class_of(self.injection[class[0]]);
            if class
                .iter()
                .any(|&h| parent.class_of(self.injection[h]) != target)
            {
                return Err(SctError::Inconsistent { sub_class: idx });
            }
        }
        Ok(())
    }

    /// Superinduction of a subgroup superclass function to the ambient
    /// group: `SInd(phi)(K) = |G| / (|H| |K|) * sum_{k in K} phi0(k)`,
    /// where `phi0` vanishes off the image of the subgroup.
    pub fn superinduce(&self, parent: &SuperTheory, phi: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(phi.len(), self.sub.num_classes());
        let scale = parent.group().order() as f64 / self.sub.group().order() as f64;
        let mut sums = vec![Complex64::new(0.0, 0.0); parent.num_classes()];
        for (h, &img) in self.injection.iter().enumerate() {
            sums[parent.class_of(img)] += phi[self.sub.class_of(h)];
        }
        sums.iter()
            .enumerate()
            .map(|(k, &total)| total * scale / parent.class_size(k) as f64)
            .collect()
    }

    /// Restriction of an ambient superclass function to the subgroup. The
    /// result is a superclass function exactly when the embedding is
    /// consistent.
    pub fn restrict(&self, parent: &SuperTheory, psi: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(psi.len(), parent.num_classes());
        self.sub
            .superclasses()
            .iter()
            .map(|class| psi[parent.class_of(self.injection[class[0]])])
            .collect()
    }

    /// Evaluate both sides of Frobenius reciprocity,
    /// `<SInd phi, psi>_G = <phi, Res psi>_H`.
    pub fn reciprocity_check(
        &self,
        parent: &SuperTheory,
        phi: &[Complex64],
        psi: &[Complex64],
    ) -> ReciprocityReport {
        let induced_side = parent.frobenius(&self.superinduce(parent, phi), psi);
        let restricted_side = self.sub.frobenius(phi, &self.restrict(parent, psi));
        let pass = (induced_side - restricted_side).norm() <= TOLERANCE;
        ReciprocityReport {
            induced_side,
            restricted_side,
            pass,
        }
    }

    /// The transition measure between the subgroup supercharacters `gamma`
    /// (rows) and ambient supercharacters `chi` (columns):
    /// `(|H|/|G|) (chi(1)/gamma(1)) <SInd gamma, chi> / <chi, chi>`.
    pub fn transition(&self, parent: &SuperTheory) -> Result<TransitionMatrix, SctError> {
        let ratio = self.sub.group().order() as f64 / parent.group().order() as f64;
        let mut rows = Vec::with_capacity(self.sub.num_characters());
        for gamma in self.sub.characters() {
            let gamma_deg = self.sub.degree_of(gamma);
            if gamma_deg.norm() < TOLERANCE {
                return Err(SctError::ZeroSelfProduct { row: rows.len() });
            }
            let induced = self.superinduce(parent, gamma);
            let mut row = Vec::with_capacity(parent.num_characters());
            for chi in parent.characters() {
                let chi_self = parent.frobenius(chi, chi);
                if chi_self.norm() < TOLERANCE {
                    return Err(SctError::ZeroSelfProduct { row: row.len() });
                }
                let value = parent.frobenius(&induced, chi) * parent.degree_of(chi)
                    / (gamma_deg * chi_self)
                    * ratio;
                if value.im.abs() > TOLERANCE * (1.0 + value.re.abs()) {
                    return Err(SctError::NotReal {
                        value: (value.re, value.im),
                    });
                }
                row.push(value.re);
            }
            rows.push(row);
        }
        Ok(TransitionMatrix { rows })
    }

    pub fn to_json_string(&self) -> String {
        let wire = EmbeddingWire {
            order: self.sub.group().order(),
            mul: self.sub.group().mul_table().to_vec(),
            identity: self.sub.group().identity(),
            superclasses: self.sub.superclasses().to_vec(),
            characters: self
                .sub
                .characters()
                .iter()
                .map(|row| row.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
            injection: self.injection.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("wire form serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, SctError> {
        let wire: EmbeddingWire =
            serde_json::from_str(text).map_err(|e| SctError::Json(e.to_string()))?;
        let sub = TheoryWire {
            order: wire.order,
            mul: wire.mul,
            identity: wire.identity,
            superclasses: wire.superclasses,
            characters: wire.characters,
        }
        .build()?;
        Ok(SubgroupEmbedding {
            sub,
            injection: wire.injection,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TheoryWire {
    order: usize,
    mul: Vec<Vec<usize>>,
    identity: usize,
    superclasses: Vec<Vec<usize>>,
    characters: Vec<Vec<[f64; 2]>>,
}

impl TheoryWire {
    fn build(self) -> Result<SuperTheory, SctError> {
        if self.mul.len() != self.order {
            return Err(SctError::BadMulTable {
                order: self.order,
                detail: format!("declared order {} but {} rows", self.order, self.mul.len()),
            });
        }
        let group = FiniteGroup::new(self.mul, self.identity)?;
        let characters = self
            .characters
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        SuperTheory::new(group, self.superclasses, characters)
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingWire {
    order: usize,
    mul: Vec<Vec<usize>>,
    identity: usize,
    superclasses: Vec<Vec<usize>>,
    characters: Vec<Vec<[f64; 2]>>,
    injection: Vec<usize>,
}
