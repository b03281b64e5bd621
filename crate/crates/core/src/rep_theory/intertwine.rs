//! The intertwiner space between the two coset representations, the adapted
//! idempotent bases, and the four-parameter family of transplantation
//! matrices.

use super::chars::{CharacterTable, IrrepName};
use super::exact::{q, qr, QMat, Q};
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{coset_permutation, CosetAction, FiniteGroup, Subgroup};

/// Permutation representation of the generator set on eight cosets, as exact
/// 0/1 matrices. Column convention: matrix M has M[dest][src] = 1, so M acts
/// on coordinate vectors of functions-on-cosets from the left.
#[derive(Debug, Clone)]
pub struct PermRep {
    pub degree: usize,
    /// Generator element indices, parallel to `matrices`.
    pub generators: Vec<usize>,
    pub matrices: Vec<QMat>,
}

impl PermRep {
    pub fn from_action(action: &CosetAction) -> PermRep {
        PermRep {
            degree: action.coset_count,
            generators: action.generators.clone(),
            matrices: action.perms.iter().map(|p| QMat::permutation(p)).collect(),
        }
    }
}

/// Basis of the space of matrices A with A·P1(g) = P2(g)·A for every
/// generator g.
#[derive(Debug, Clone)]
pub struct IntertwinerBasis {
    pub dimension: usize,
    pub basis: Vec<QMat>,
}

pub fn intertwiner_space(p1: &PermRep, p2: &PermRep) -> Result<IntertwinerBasis> {
    if p1.degree != p2.degree || p1.matrices.len() != p2.matrices.len() {
        return Err(Error::Config(
            "coset representations have mismatched degrees or generator sets".to_string(),
        ));
    }
    let n = p1.degree;
    // Unknown A is n×n, flattened row-major: x[i*n + j] = A[i][j].
    // For each generator g: A·P1 − P2·A = 0 gives n² equations:
    //   Σ_k A[i][k]·P1[k][j] − Σ_k P2[i][k]·A[k][j] = 0.
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(p1.matrices.len() * n * n);
    for (m1, m2) in p1.matrices.iter().zip(&p2.matrices) {
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![Q::zero(); n * n];
                for k in 0..n {
                    row[i * n + k] += m1.at(k, j);
                    row[k * n + j] -= m2.at(i, k);
                }
                rows.push(row);
            }
        }
    }
    let system = QMat::from_rows(rows);
    let basis = system
        .nullspace()
        .into_iter()
        .map(|flat| QMat {
            rows: n,
            cols: n,
            data: flat,
        })
        .collect::<Vec<_>>();
    Ok(IntertwinerBasis {
        dimension: basis.len(),
        basis,
    })
}

/// The circulant-patterned transplantation matrix of the four-parameter
/// family, with first row (α, β, γ, δ, α, δ, γ, β).
#[derive(Debug, Clone)]
pub struct TransplantMatrix {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub d: Q,
    pub alpha: Q,
    pub beta: Q,
    pub gamma: Q,
    pub delta: Q,
    pub entries: QMat,
    pub singular: bool,
}

impl TransplantMatrix {
    /// Exact inverse; None when the singular flag is set.
    pub fn inverse(&self) -> Option<QMat> {
        if self.singular {
            None
        } else {
            Some(self.entries.inverse().expect("abcd != 0 implies invertible"))
        }
    }

    pub fn params(&self) -> (Q, Q, Q, Q) {
        (self.a, self.b, self.c, self.d)
    }
}

pub fn transplantation_matrix(a: Q, b: Q, c: Q, d: Q) -> TransplantMatrix {
    let alpha = (a + b + q(2) * c) * qr(1, 8);
    let beta = (a - b + q(4) * d) * qr(1, 8);
    let gamma = (a + b - q(2) * c) * qr(1, 8);
    let delta = (a - b - q(4) * d) * qr(1, 8);
    let symbol = [alpha, beta, gamma, delta, alpha, delta, gamma, beta];
    let mut entries = QMat::zeros(8, 8);
    for i in 0..8 {
        for j in 0..8 {
            *entries.at_mut(i, j) = symbol[(j + 8 - i) % 8];
        }
    }
    let singular = (a * b * c * d).is_zero();
    TransplantMatrix {
        a,
        b,
        c,
        d,
        alpha,
        beta,
        gamma,
        delta,
        entries,
        singular,
    }
}

/// Recover (a,b,c,d) from a matrix of the circulant pattern; None when the
/// matrix does not have the pattern.
pub fn transplant_params_of(m: &QMat) -> Option<(Q, Q, Q, Q)> {
    if m.rows != 8 || m.cols != 8 {
        return None;
    }
    let alpha = m.at(0, 0);
    let beta = m.at(0, 1);
    let gamma = m.at(0, 2);
    let delta = m.at(0, 3);
    let a = q(2) * (alpha + gamma) + q(2) * (beta + delta);
    let b = q(2) * (alpha + gamma) - q(2) * (beta + delta);
    let c = q(2) * (alpha - gamma);
    let d = beta - delta;
    let rebuilt = transplantation_matrix(a, b, c, d);
    if &rebuilt.entries == m {
        Some((a, b, c, d))
    } else {
        None
    }
}

/// The adapted basis of one coset representation: projections of the
/// coordinate vectors under the isotypic idempotents, in the published order
/// (trivial, sign, two vectors in the W+ block, four in the X block).
#[derive(Debug, Clone)]
pub struct IdempotentBasis {
    /// Basis vectors in coset coordinates, length 8 each.
    pub vectors: Vec<Vec<Q>>,
    /// Isotypic block of each vector.
    pub blocks: Vec<IrrepName>,
}

impl IdempotentBasis {
    /// Columns-as-vectors matrix, for changing coordinates.
    pub fn as_matrix(&self) -> QMat {
        let n = self.vectors[0].len();
        let mut m = QMat::zeros(n, self.vectors.len());
        for (j, v) in self.vectors.iter().enumerate() {
            for i in 0..n {
                *m.at_mut(i, j) = v[i];
            }
        }
        m
    }
}

/// Isotypic projection ε_V = (dim V / |G|) Σ_g χ_V(g⁻¹) P(g) on the coset
/// space of `subgroup`, using the given coset numbering.
pub fn isotypic_projection(
    group: &FiniteGroup,
    subgroup: &Subgroup,
    transversal: &[usize],
    table: &CharacterTable,
    name: IrrepName,
) -> Result<QMat> {
    let n = transversal.len();
    let mut acc = QMat::zeros(n, n);
    let row = table.row(name);
    for g in 0..group.order {
        let chi = row[table.class_of(group.inv(g))];
        if chi.is_zero() {
            continue;
        }
        let perm = coset_permutation(group, subgroup, g, Some(transversal));
        acc = acc.add(&QMat::permutation(&perm).scale(chi));
    }
    Ok(acc.scale(qr(name.dim() as i64, group.order as i64)))
}

/// The published adapted basis: idempotent images of coordinate vectors
/// u_0 (trivial), u_0 (sign), u_0 and u_1 (W+), u_0..u_3 (X).
pub fn idempotent_basis(
    group: &FiniteGroup,
    subgroup: &Subgroup,
    transversal: &[usize],
    table: &CharacterTable,
) -> Result<IdempotentBasis> {
    let sign = IrrepName::Linear {
        s: false,
        t: true,
        u: true,
    };
    let trivial = IrrepName::Linear {
        s: true,
        t: true,
        u: true,
    };
    let plan: Vec<(IrrepName, Vec<usize>)> = vec![
        (trivial, vec![0]),
        (sign, vec![0]),
        (IrrepName::WPlus, vec![0, 1]),
        (IrrepName::X, vec![0, 1, 2, 3]),
    ];
    let n = transversal.len();
    let mut vectors = Vec::new();
    let mut blocks = Vec::new();
    for (name, seeds) in plan {
        let eps = isotypic_projection(group, subgroup, transversal, table, name)?;
        // Idempotency is structural; check it once per block.
        if eps.matmul(&eps) != eps {
            return Err(Error::Config(format!(
                "projection for {} is not idempotent",
                name.label()
            )));
        }
        for seed in seeds {
            let mut unit = vec![Q::zero(); n];
            unit[seed] = Q::one();
            vectors.push(eps.apply(&unit));
            blocks.push(name);
        }
    }
    Ok(IdempotentBasis { vectors, blocks })
}

/// The corrected basis on the second coset space: identity on the one- and
/// two-dimensional blocks, and the fixed recombination of the X block that
/// diagonalizes every intertwiner.
pub fn h_basis(f: &IdempotentBasis) -> IdempotentBasis {
    assert_eq!(f.vectors.len(), 8);
    let lc = |coeffs: &[(i64, usize)]| -> Vec<Q> {
        let mut out = vec![Q::zero(); f.vectors[0].len()];
        for &(k, idx) in coeffs {
            for (o, v) in out.iter_mut().zip(&f.vectors[idx]) {
                *o += q(k) * v;
            }
        }
        out
    };
    let mut vectors: Vec<Vec<Q>> = f.vectors[0..4].to_vec();
    // Indices into f: f5..f8 live at 4..8.
    vectors.push(lc(&[(1, 5), (-1, 7)])); // h5 = f6 - f8
    vectors.push(lc(&[(1, 4), (1, 6)])); // h6 = f5 + f7
    vectors.push(lc(&[(1, 5), (1, 7)])); // h7 = f6 + f8
    vectors.push(lc(&[(-1, 4), (1, 6)])); // h8 = -f5 + f7
    IdempotentBasis {
        vectors,
        blocks: f.blocks.clone(),
    }
}

/// Build the intertwiner with parameters (a,b,c,d) by mapping e1 ↦ a·h1,
/// e2 ↦ b·h2, e3 ↦ c·h3, e4 ↦ c·h4, e_i ↦ d·h_i (i = 5..8), expressed in
/// coset coordinates. Cross-validates the closed-form circulant.
pub fn intertwiner_from_bases(
    e: &IdempotentBasis,
    h: &IdempotentBasis,
    a: Q,
    b: Q,
    c: Q,
    d: Q,
) -> Result<QMat> {
    let e_mat = e.as_matrix();
    let h_mat = h.as_matrix();
    let e_inv = e_mat
        .inverse()
        .ok_or_else(|| Error::Config("adapted basis is degenerate".to_string()))?;
    let mut diag = QMat::zeros(8, 8);
    for (i, &v) in [a, b, c, c, d, d, d, d].iter().enumerate() {
        *diag.at_mut(i, i) = v;
    }
    Ok(h_mat.matmul(&diag).matmul(&e_inv))
}
