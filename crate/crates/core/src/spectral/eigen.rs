//! Generalized symmetric eigensolvers for Kx = λMx: a dense path (Cholesky
//! reduction + cyclic Jacobi) for small problems and shift-invert subspace
//! iteration with a profile LDLᵀ factorization for the rest. Start vectors
//! come from a seeded ChaCha stream so every run is reproducible.

use super::sparse::{permute_symmetric, reverse_cuthill_mckee, Csr, SkylineLdl};
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DENSE_CUTOFF: usize = 160;
const MAX_ITERATIONS: usize = 300;

/// Cyclic Jacobi on a dense symmetric matrix; returns eigenvalues and the
/// orthogonal matrix of column eigenvectors, both sorted ascending.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let off = |m: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += m[i][j] * m[i][j];
            }
        }
        s
    };
    let scale: f64 = (0..n).map(|i| m[i][i].abs()).fold(1e-300, f64::max);
    for _sweep in 0..60 {
        if off(&m).sqrt() <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (values, vectors)
}

/// Dense lower Cholesky; fails on non-positive pivots.
fn dense_cholesky(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Singular(format!(
                        "mass matrix pivot {sum:e} at row {i}"
                    )));
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(l)
}

fn forward_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[i][k] * x[k];
        }
        x[i] /= l[i][i];
    }
    x
}

fn backward_solve_t(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    // Solves Lᵀ x = b.
    let n = l.len();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= l[k][i] * x[k];
        }
        x[i] /= l[i][i];
    }
    x
}

/// Dense generalized symmetric eigenproblem K x = λ M x via M = LLᵀ and
/// Jacobi on L⁻¹ K L⁻ᵀ. Returns all n pairs ascending, vectors as columns.
pub fn dense_generalized(k: &[Vec<f64>], m: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = k.len();
    let l = dense_cholesky(m)?;
    // X = L⁻¹ K (column by column of K, which is symmetric).
    let mut x = vec![vec![0.0; n]; n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| k[i][j]).collect();
        let s = forward_solve(&l, &col);
        for i in 0..n {
            x[i][j] = s[i];
        }
    }
    // C = X L⁻ᵀ = L⁻¹ K L⁻ᵀ: apply the forward solve to the rows of X.
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        let s = forward_solve(&l, &x[i]);
        c[i] = s;
    }
    // Symmetrize away roundoff before Jacobi.
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[i][j] + c[j][i]);
            c[i][j] = avg;
            c[j][i] = avg;
        }
    }
    let (values, w) = jacobi_eigen(&c);
    let mut vectors = vec![vec![0.0; n]; n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| w[i][j]).collect();
        let v = backward_solve_t(&l, &col);
        for i in 0..n {
            vectors[i][j] = v[i];
        }
    }
    Ok((values, vectors))
}

pub struct EigenSolution {
    pub values: Vec<f64>,
    /// Column vectors, one per eigenvalue, in the operator's dof space.
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub shift: f64,
}

fn m_inner(m: &Csr, x: &[f64], y: &[f64]) -> f64 {
    m.apply(y).iter().zip(x).map(|(a, b)| a * b).sum()
}

fn residual_norm(k: &Csr, m: &Csr, lambda: f64, x: &[f64]) -> f64 {
    let kx = k.apply(x);
    let mx = m.apply(x);
    let mut num = 0.0;
    for i in 0..x.len() {
        let r = kx[i] - lambda * mx[i];
        num += r * r;
    }
    let den = m_inner(m, x, x).max(1e-300).sqrt();
    num.sqrt() / den
}

/// Smallest `count` generalized eigenpairs of (K, M).
pub fn lowest_eigenpairs(
    k: &Csr,
    m: &Csr,
    count: usize,
    tol: f64,
    seed: u64,
) -> Result<EigenSolution> {
    let n = k.n;
    if count == 0 || count >= n {
        return Err(Error::Config(format!(
            "requested {count} eigenvalues of a {n}-dof operator"
        )));
    }
    if n <= DENSE_CUTOFF {
        let (values, vectors) = dense_generalized(&k.to_dense(), &m.to_dense())?;
        let mut vals = Vec::with_capacity(count);
        let mut vecs = Vec::with_capacity(count);
        let mut residuals = Vec::with_capacity(count);
        for j in 0..count {
            let col: Vec<f64> = (0..n).map(|i| vectors[i][j]).collect();
            residuals.push(residual_norm(k, m, values[j], &col));
            vals.push(values[j]);
            vecs.push(col);
        }
        return Ok(EigenSolution {
            values: vals,
            vectors: vecs,
            residuals,
            iterations: 0,
            shift: 0.0,
        });
    }

    // Shift-invert subspace iteration on (K + σM)⁻¹ M. The shift only has to
    // keep the factorization away from a singular K (pure-Neumann kernels);
    // it must stay far below the eigenvalues of interest or the iteration
    // ratio degrades, and the trace ratio is roughly the mean eigenvalue,
    // which is orders of magnitude above the low end of the spectrum.
    let trace_ratio = {
        let dk: f64 = k.diag().iter().sum();
        let dm: f64 = m.diag().iter().sum();
        (dk / dm).abs().max(1e-8)
    };
    let shift = 1e-6 * trace_ratio;
    let shifted = k.add_scaled(m, shift);
    let perm = reverse_cuthill_mckee(&shifted);
    let factor = SkylineLdl::factor(&permute_symmetric(&shifted, &perm))?;
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let solve = |b: &[f64]| -> Vec<f64> {
        let pb: Vec<f64> = perm.iter().map(|&old| b[old]).collect();
        let px = factor.solve(&pb);
        let mut x = vec![0.0; n];
        for old in 0..n {
            x[old] = px[inv[old]];
        }
        x
    };

    let block = (count + (count / 2).max(8)).min(n - 1).max(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.gen::<f64>() - 0.5).collect())
        .collect();

    let mut values = vec![0.0; block];
    let mut residuals = vec![f64::MAX; block];
    let mut iterations = 0;
    for iter in 1..=MAX_ITERATIONS {
        iterations = iter;
        // Power step through the shifted inverse.
        for col in basis.iter_mut() {
            *col = solve(&m.apply(col));
        }
        // M-orthonormalize (modified Gram-Schmidt, reseeding collapsed
        // directions deterministically).
        for j in 0..block {
            for i in 0..j {
                let proj = m_inner(m, &basis[i], &basis[j]);
                let (head, tail) = basis.split_at_mut(j);
                let bi = &head[i];
                for (t, b) in tail[0].iter_mut().zip(bi) {
                    *t -= proj * b;
                }
            }
            let mut norm = m_inner(m, &basis[j], &basis[j]).sqrt();
            if !norm.is_finite() || norm < 1e-140 {
                basis[j] = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
                norm = m_inner(m, &basis[j], &basis[j]).sqrt();
            }
            for t in basis[j].iter_mut() {
                *t /= norm;
            }
        }
        // Rayleigh–Ritz on the block.
        let mut kp = vec![vec![0.0; block]; block];
        let mut mp = vec![vec![0.0; block]; block];
        let k_basis: Vec<Vec<f64>> = basis.iter().map(|b| k.apply(b)).collect();
        let m_basis: Vec<Vec<f64>> = basis.iter().map(|b| m.apply(b)).collect();
        for i in 0..block {
            for j in 0..block {
                kp[i][j] = basis[i].iter().zip(&k_basis[j]).map(|(a, b)| a * b).sum();
                mp[i][j] = basis[i].iter().zip(&m_basis[j]).map(|(a, b)| a * b).sum();
            }
        }
        let (theta, w) = dense_generalized(&kp, &mp)?;
        let mut ritz: Vec<Vec<f64>> = Vec::with_capacity(block);
        for j in 0..block {
            let mut v = vec![0.0; n];
            for i in 0..block {
                let c = w[i][j];
                for (vt, bt) in v.iter_mut().zip(&basis[i]) {
                    *vt += c * bt;
                }
            }
            ritz.push(v);
        }
        values = theta;
        basis = ritz;
        for j in 0..count {
            residuals[j] = residual_norm(k, m, values[j], &basis[j]);
        }
        if residuals[..count].iter().all(|&r| r <= tol) {
            break;
        }
    }
    let worst = residuals[..count].iter().cloned().fold(0.0f64, f64::max);
    if worst > tol {
        return Err(Error::NoConvergence(format!(
            "worst residual {worst:e} after {iterations} iterations (tolerance {tol:e})"
        )));
    }
    basis.truncate(count);
    values.truncate(count);
    residuals.truncate(count);
    Ok(EigenSolution {
        values,
        vectors: basis,
        residuals,
        iterations,
        shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sparse::Triplets;

    fn path_laplacian(n: usize) -> Csr {
        let mut t = Triplets::new(n);
        for i in 0..n - 1 {
            t.add(i, i, 1.0);
            t.add(i + 1, i + 1, 1.0);
            t.add(i, i + 1, -1.0);
            t.add(i + 1, i, -1.0);
        }
        t.to_csr()
    }

    #[test]
    fn jacobi_diagonalizes_a_known_matrix() {
        let a = vec![
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ];
        let (vals, vecs) = jacobi_eigen(&a);
        let sqrt2 = std::f64::consts::SQRT_2;
        let expect = [2.0 - sqrt2, 2.0, 2.0 + sqrt2];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        // Orthonormal columns.
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|r| vecs[r][i] * vecs[r][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn path_graph_spectrum_is_exact() {
        // Free-ended path on 3 nodes: eigenvalues 0, 1, 3.
        let k = path_laplacian(3);
        let m = Csr::identity(3);
        let (vals, _) = dense_generalized(&k.to_dense(), &m.to_dense()).unwrap();
        assert!((vals[0] - 0.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_mass_scales_the_spectrum() {
        let k = path_laplacian(3);
        let m = Csr::diagonal(&[2.0, 2.0, 2.0]);
        let (vals, vecs) = dense_generalized(&k.to_dense(), &m.to_dense()).unwrap();
        for (v, e) in vals.iter().zip([0.0, 0.5, 1.5]) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
        // M-orthonormality of the returned vectors.
        for i in 0..3 {
            let col: Vec<f64> = (0..3).map(|r| vecs[r][i]).collect();
            assert!((m_inner(&m, &col, &col) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn subspace_iteration_matches_the_dense_path() {
        // Big enough to route past the dense cutoff.
        let n = 400;
        let k = path_laplacian(n);
        let m = Csr::identity(n);
        let sol = lowest_eigenpairs(&k, &m, 6, 1e-10, 7).unwrap();
        // Free path eigenvalues: 2 - 2cos(πj/n) = 4 sin²(πj/2n).
        for j in 0..6 {
            let exact = 4.0 * (std::f64::consts::PI * j as f64 / (2.0 * n as f64)).sin().powi(2);
            assert!(
                (sol.values[j] - exact).abs() < 1e-9,
                "j={j}: {} vs {exact}",
                sol.values[j]
            );
            assert!(sol.residuals[j] <= 1e-10);
        }
        assert!(sol.iterations > 0);
    }

    #[test]
    fn determinism_across_runs_and_seed_sensitivity() {
        let n = 300;
        let k = path_laplacian(n);
        let m = Csr::identity(n);
        let a = lowest_eigenpairs(&k, &m, 4, 1e-10, 42).unwrap();
        let b = lowest_eigenpairs(&k, &m, 4, 1e-10, 42).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
        let c = lowest_eigenpairs(&k, &m, 4, 1e-10, 43).unwrap();
        for (x, y) in a.values.iter().zip(&c.values) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn count_bounds_are_enforced() {
        let k = path_laplacian(5);
        let m = Csr::identity(5);
        assert!(lowest_eigenpairs(&k, &m, 5, 1e-10, 1).is_err());
        assert!(lowest_eigenpairs(&k, &m, 0, 1e-10, 1).is_err());
    }
}
