use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::adapt::pool::OperatorPool;
use crate::error::{Error, Result};
use crate::pauli::{sparse_transition, Config, PauliSum, PauliTerm, SparseStateVec};
use crate::sim::StateVector;

/// `h = ⟨c|i[H, P]|c⟩ = −2 Im⟨c|H P|c⟩`.
pub fn subspace_gradient(h: &PauliSum, p: &PauliTerm, c: &SparseStateVec) -> Result<f64> {
    c.require_normalized()?;
    let pc = c.apply_term(p)?;
    Ok(-2.0 * sparse_transition(h, c, &pc)?.im)
}

/// Exact statevector analogue of [`subspace_gradient`].
pub fn exact_pool_gradient(h: &PauliSum, p: &PauliTerm, state: &StateVector) -> Result<f64> {
    if (state.norm_sqr() - 1.0).abs() > crate::pauli::NORM_TOL {
        return Err(Error::NotNormalized(state.norm_sqr()));
    }
    let ps = state.apply_pauli(p)?;
    Ok(-2.0 * state.transition(h, &ps)?.im)
}

/// `H|c⟩` restricted to its support, as a lookup table.
fn apply_sparse(h: &PauliSum, c: &SparseStateVec) -> HashMap<Config, Complex64> {
    let mut out = HashMap::new();
    for (cfg, amp) in c.iter() {
        h.for_each_image(cfg, |img, s| {
            *out.entry(img).or_insert(Complex64::new(0.0, 0.0)) += s * amp;
        });
    }
    out
}

/// Subspace gradients for every pool term, in pool order.
///
/// Uses `⟨c|H P|c⟩ = ⟨Hc|Pc⟩` with `H|c⟩` built once.
pub fn pool_gradients(h: &PauliSum, pool: &OperatorPool, c: &SparseStateVec) -> Result<Vec<f64>> {
    c.require_normalized()?;
    h.require_hermitian()?;
    if h.n_qubits() != pool.n_qubits() || c.n_qubits() != pool.n_qubits() {
        return Err(Error::QubitMismatch {
            left: pool.n_qubits(),
            right: h.n_qubits().max(c.n_qubits()),
        });
    }
    let hc = apply_sparse(h, c);
    let support: Vec<(Config, Complex64)> = c.iter().collect();
    Ok(pool
        .terms()
        .par_iter()
        .map(|p| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(cfg, amp) in &support {
                let (img, ph) = p.act(cfg);
                if let Some(v) = hc.get(&img) {
                    acc += v.conj() * ph.apply(amp);
                }
            }
            -2.0 * acc.im
        })
        .collect())
}

/// Index of the largest `|g|`, first index on ties, and its signed value.
pub fn select_max_abs(gradients: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &g) in gradients.iter().enumerate() {
        match best {
            Some((_, b)) if g.abs() <= b.abs() => {}
            _ => best = Some((i, g)),
        }
    }
    best
}

/// Chosen pool operator for one iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Selection {
    pub index: usize,
    pub gradient: f64,
    pub max_abs: f64,
}

/// Scans the pool and picks the operator with the largest `|h_j|`.
pub fn rank_and_select(h: &PauliSum, pool: &OperatorPool, c: &SparseStateVec) -> Result<Selection> {
    if pool.is_empty() {
        return Err(Error::InvalidArgument("operator pool is empty".into()));
    }
    let grads = pool_gradients(h, pool, c)?;
    let (index, gradient) = select_max_abs(&grads).expect("pool is non-empty");
    Ok(Selection {
        index,
        gradient,
        max_abs: gradient.abs(),
    })
}

/// Closed-form minimizer of `f(θ) = ⟨c|e^{−iθP} H e^{iθP}|c⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleOptimum {
    pub theta: f64,
    pub value: f64,
    /// `⟨c|H|c⟩`
    pub a: f64,
    /// `⟨c|PHP|c⟩`
    pub b: f64,
    /// `⟨c|i[H, P]|c⟩`
    pub g: f64,
}

impl AngleOptimum {
    /// `f(θ) = (a+b)/2 + ((a−b)/2) cos 2θ + (g/2) sin 2θ`.
    pub fn f(&self, theta: f64) -> f64 {
        let (s, c) = (2.0 * theta).sin_cos();
        0.5 * (self.a + self.b) + 0.5 * (self.a - self.b) * c + 0.5 * self.g * s
    }

    /// Minimizer of `f` for the given coefficients, in `(−π/2, π/2]`.
    pub fn from_coefficients(a: f64, b: f64, g: f64) -> Self {
        let d = a - b;
        let mut theta = if d == 0.0 && g == 0.0 {
            0.0
        } else {
            0.5 * (-g).atan2(-d)
        };
        if theta <= -FRAC_PI_2 + 1e-15 {
            theta += PI;
        }
        if theta == 0.0 {
            theta = 0.0;
        }
        let mut out = Self {
            theta,
            value: 0.0,
            a,
            b,
            g,
        };
        out.value = out.f(theta);
        out
    }
}

pub fn optimal_angle(h: &PauliSum, p: &PauliTerm, c: &SparseStateVec) -> Result<AngleOptimum> {
    c.require_normalized()?;
    let pc = c.apply_term(p)?;
    let a = sparse_transition(h, c, c)?.re;
    let b = sparse_transition(h, &pc, &pc)?.re;
    let g = -2.0 * sparse_transition(h, c, &pc)?.im;
    Ok(AngleOptimum::from_coefficients(a, b, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapt::pool::build_pool;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn t(n: usize, s: &str) -> PauliTerm {
        PauliTerm::parse_label(n, s).unwrap()
    }

    fn sum(n: usize, terms: &[(f64, &str)]) -> PauliSum {
        PauliSum::from_terms(n, terms.iter().map(|&(c, s)| (Complex64::new(c, 0.0), t(n, s)))).unwrap()
    }

    fn plus() -> SparseStateVec {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        SparseStateVec::new(1, [(0, a), (1, a)]).unwrap()
    }

    #[test]
    fn gradient_examples() {
        let h = sum(1, &[(1.0, "Z0")]);
        let y = t(1, "Y0");
        assert_abs_diff_eq!(subspace_gradient(&h, &y, &plus()).unwrap(), 2.0, epsilon = 1e-12);
        let zero = SparseStateVec::basis(1, 0).unwrap();
        assert_abs_diff_eq!(subspace_gradient(&h, &y, &zero).unwrap(), 0.0, epsilon = 1e-15);

        let h2 = sum(2, &[(0.7, "Z0 Z1"), (-0.2, "Z1")]);
        let c = SparseStateVec::new(2, [(0, Complex64::new(0.6, 0.0)), (3, Complex64::new(0.0, 0.8))]).unwrap();
        assert_eq!(subspace_gradient(&h2, &t(2, "Z0"), &c).unwrap(), 0.0);
    }

    #[test]
    fn exact_gradient_mirrors_subspace_gradient() {
        let h = sum(1, &[(1.0, "Z0")]);
        let y = t(1, "Y0");
        let sv = StateVector::from_sparse(&plus()).unwrap();
        assert_abs_diff_eq!(exact_pool_gradient(&h, &y, &sv).unwrap(), 2.0, epsilon = 1e-12);
        let sv0 = StateVector::basis(1, 0).unwrap();
        assert_abs_diff_eq!(exact_pool_gradient(&h, &y, &sv0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn select_examples() {
        assert_eq!(select_max_abs(&[0.0, 3.0, -3.0]), Some((1, 3.0)));
        assert_eq!(select_max_abs(&[0.0, 0.0]), Some((0, 0.0)));
        assert_eq!(select_max_abs(&[-0.5]), Some((0, -0.5)));
        assert_eq!(select_max_abs(&[]), None);
    }

    #[test]
    fn angle_examples() {
        let h = sum(1, &[(1.0, "Z0")]);
        let zero = SparseStateVec::basis(1, 0).unwrap();
        let opt = optimal_angle(&h, &t(1, "Y0"), &zero).unwrap();
        assert_eq!((opt.a, opt.b, opt.g), (1.0, -1.0, 0.0));
        assert_abs_diff_eq!(opt.theta, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(opt.value, -1.0, epsilon = 1e-15);

        let opt = AngleOptimum::from_coefficients(-1.0, 0.5, 0.0);
        assert_eq!(opt.theta, 0.0);
        assert!(opt.theta.is_sign_positive());
        assert_eq!(opt.value, -1.0);

        let opt = AngleOptimum::from_coefficients(0.3, 0.3, 0.0);
        assert_eq!(opt.theta, 0.0);
    }

    #[test]
    fn pool_gradients_agree_with_direct_formula() {
        let n = 4;
        let h = sum(
            n,
            &[(0.4, "Z0"), (-0.3, "Z1 Z2"), (0.25, "X0 X2"), (0.2, "Y1 Y3"), (0.15, "X0 Z1 X2"), (-0.1, "X0 X1 Y2 Y3")],
        );
        let c = SparseStateVec::new(
            n,
            [(0b0011, Complex64::new(0.8, 0.0)), (0b0110, Complex64::new(0.0, 0.36)), (0b1100, Complex64::new(0.48, 0.0))],
        )
        .unwrap();
        let pool = build_pool(n).unwrap();
        let fast = pool_gradients(&h, &pool, &c).unwrap();
        for (p, g) in pool.terms().iter().zip(&fast) {
            assert_abs_diff_eq!(*g, subspace_gradient(&h, p, &c).unwrap(), epsilon = 1e-12);
        }
    }
}
