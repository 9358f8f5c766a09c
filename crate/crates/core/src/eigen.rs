//! Dense eigendecomposition of complex Hermitian matrices by cyclic
//! Jacobi rotations, with an explicit rotation budget and a residual
//! certificate computed against the original matrix.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("matrix is not square: {len} entries for dim {dim}")]
    NotSquare { len: usize, dim: usize },
    #[error("jacobi sweep did not converge within {rotations} rotations (off-norm {off_norm:e})")]
    ConvergenceFailure { rotations: usize, off_norm: f64 },
}

/// Eigenvalues ascending; `vectors` holds the matching eigenvectors as
/// columns of a row-major dim×dim array.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    vectors: Vec<Complex64>,
    dim: usize,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, idx: usize) -> Vec<Complex64> {
        (0..self.dim)
            .map(|k| self.vectors[k * self.dim + idx])
            .collect()
    }

    /// ‖A v − λ v‖₂ for the idx-th eigenpair, with A the original matrix.
    pub fn residual(&self, matrix: &[Complex64], idx: usize) -> f64 {
        let v = self.eigenvector(idx);
        let lambda = self.eigenvalues[idx];
        let mut norm_sq = 0.0f64;
        for k in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                acc += matrix[k * self.dim + j] * vj;
            }
            acc -= lambda * v[k];
            norm_sq += acc.norm_sqr();
        }
        norm_sq.sqrt()
    }
}

/// Budget of scalar rotations per matrix, relative to dim².
pub const ROTATION_BUDGET_FACTOR: usize = 100;

/// Cyclic Jacobi for a Hermitian matrix in row-major order.
pub fn eigen_hermitian(matrix: &[Complex64], dim: usize) -> Result<EigenDecomposition, EigenError> {
    if matrix.len() != dim * dim {
        return Err(EigenError::NotSquare {
            len: matrix.len(),
            dim,
        });
    }
    if dim == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            vectors: Vec::new(),
            dim,
        });
    }
    let mut a: Vec<Complex64> = matrix.to_vec();
    let mut v: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); dim * dim];
    for k in 0..dim {
        v[k * dim + k] = Complex64::new(1.0, 0.0);
    }
    let scale = a
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let target = 1e-14 * scale;
    let budget = ROTATION_BUDGET_FACTOR * dim * dim;
    let mut rotations = 0usize;

    loop {
        let mut off_max = 0.0f64;
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                let beta = apq.norm();
                off_max = off_max.max(beta);
                if beta <= target {
                    continue;
                }
                if rotations >= budget {
                    return Err(EigenError::ConvergenceFailure {
                        rotations,
                        off_norm: off_norm(&a, dim),
                    });
                }
                rotations += 1;
                let phase = apq / beta; // e^{iφ}
                let app = a[p * dim + p].re;
                let aqq = a[q * dim + q].re;
                let tau = (app - aqq) / (2.0 * beta);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_phase = phase * s; // s·e^{iφ}
                let s_phase_conj = s_phase.conj();

                for k in 0..dim {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    let new_akp = akp * c - akq * s_phase_conj;
                    let new_akq = akp * s_phase + akq * c;
                    a[k * dim + p] = new_akp;
                    a[k * dim + q] = new_akq;
                    a[p * dim + k] = new_akp.conj();
                    a[q * dim + k] = new_akq.conj();
                }
                let new_app = c * c * app - 2.0 * beta * s * c + s * s * aqq;
                let new_aqq = s * s * app + 2.0 * beta * s * c + c * c * aqq;
                a[p * dim + p] = Complex64::new(new_app, 0.0);
                a[q * dim + q] = Complex64::new(new_aqq, 0.0);
                a[p * dim + q] = Complex64::new(0.0, 0.0);
                a[q * dim + p] = Complex64::new(0.0, 0.0);

                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = vkp * c - vkq * s_phase_conj;
                    v[k * dim + q] = vkp * s_phase + vkq * c;
                }
            }
        }
        if off_max <= target {
            break;
        }
    }

    // sort ascending, permuting eigenvector columns along
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| a[i * dim + i].re.partial_cmp(&a[j * dim + j].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * dim + i].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        for k in 0..dim {
            vectors[k * dim + new_idx] = v[k * dim + old_idx];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
        dim,
    })
}

fn off_norm(a: &[Complex64], dim: usize) -> f64 {
    let mut s = 0.0f64;
    for p in 0..dim {
        for q in 0..dim {
            if p != q {
                s += a[p * dim + q].norm_sqr();
            }
        }
    }
    s.sqrt()
}
