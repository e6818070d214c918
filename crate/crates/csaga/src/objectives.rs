//! Component functions for the finite-sum objective
//! `f(x) = (1/n) Σ f_i(x)`: L2-regularized logistic and ridge losses over
//! a dataset, and explicit per-component quadratics for theory work, with
//! the strong-convexity/smoothness constants the rate analysis needs.

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::vecmath::{axpy_sparse, dot, DenseVec};

/// Maximum dimension for explicit quadratic problems; constants are found
/// by a direct symmetric eigensolve, which is a desk-scale activity.
pub const MAX_QUADRATIC_DIM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    Logistic,
    Ridge,
    QuadraticExplicit,
}

/// One explicit quadratic component
/// `f_i(x) = ½ xᵀA_i x − b_iᵀx + c_i` with symmetric `A_i`.
/// The constant `c_i` keeps function values meaningful (so e.g. a
/// component built from a center `z_i` reports `f_i(z_i) = 0`).
#[derive(Clone, Debug)]
pub struct QuadraticComponent {
    d: usize,
    mat: Vec<f64>, // row-major, symmetric
    b: Vec<f64>,
    c: f64,
}

impl QuadraticComponent {
    pub fn new(d: usize, mat: Vec<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        if mat.len() != d * d {
            return Err(Error::InvalidArgument(format!(
                "matrix has {} entries, expected {}",
                mat.len(),
                d * d
            )));
        }
        if b.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: b.len(),
            });
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let (u, v) = (mat[i * d + j], mat[j * d + i]);
                if (u - v).abs() > 1e-9 * (1.0 + u.abs().max(v.abs())) {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i},{j}): {u} vs {v}"
                    )));
                }
            }
        }
        Ok(QuadraticComponent { d, mat, b, c })
    }

    /// Component centered at `z`: `f(x) = ½ (x−z)ᵀA (x−z)`, expanded to
    /// the `(A, b, c)` form with `b = Az`, `c = ½ zᵀAz`.
    pub fn from_center(d: usize, mat: Vec<f64>, z: &[f64]) -> Result<Self> {
        if z.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: z.len(),
            });
        }
        let comp = QuadraticComponent::new(d, mat, vec![0.0; d], 0.0)?;
        let mut b = vec![0.0; d];
        comp.matvec(z, &mut b);
        let c = 0.5 * b.iter().zip(z).map(|(bi, zi)| bi * zi).sum::<f64>();
        QuadraticComponent::new(d, comp.mat, b, c)
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (row, o) in self.mat.chunks_exact(self.d).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(a, v)| a * v).sum();
        }
    }

    fn eigen_extremes(&self) -> (f64, f64) {
        let m = DMatrix::from_row_slice(self.d, self.d, &self.mat);
        let eig = m.symmetric_eigen();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &e in eig.eigenvalues.iter() {
            lo = lo.min(e);
            hi = hi.max(e);
        }
        (lo, hi)
    }
}

/// The reference solution `x⋆` and optimal value `f⋆` of a problem.
#[derive(Clone, Debug)]
pub struct Reference {
    pub x_star: DenseVec,
    pub f_star: f64,
}

/// The finite-sum objective: `n` components of one loss kind, sharing the
/// regularization weight `lambda`, together with the constants
/// `mu` (strong convexity), `L` (gradient Lipschitz, max over components),
/// and `kappa = L/mu`.
#[derive(Clone, Debug)]
pub struct FiniteSumProblem {
    kind: LossKind,
    dataset: Option<Dataset>,
    quads: Vec<QuadraticComponent>,
    lambda: f64,
    n: usize,
    d: usize,
    mu: f64,
    l: f64,
}

impl FiniteSumProblem {
    /// A GLM objective over a dataset:
    /// logistic `f_i(x) = log(1+exp(−y_i a_iᵀx)) + (λ/2)‖x‖²` or
    /// ridge `f_i(x) = ½(a_iᵀx − y_i)² + (λ/2)‖x‖²`.
    ///
    /// `lambda = 0` is accepted so plain benchmarking traces can run, but
    /// [`constants`](Self::constants) (and everything built on it) then
    /// reports a not-strongly-convex error.
    pub fn glm(kind: LossKind, dataset: Dataset, lambda: f64) -> Result<Self> {
        let coef = match kind {
            LossKind::Logistic => 0.25,
            LossKind::Ridge => 1.0,
            LossKind::QuadraticExplicit => {
                return Err(Error::InvalidArgument(
                    "quadratic_explicit problems are built with FiniteSumProblem::quadratic".into(),
                ))
            }
        };
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda {lambda} must be finite and >= 0"
            )));
        }
        if dataset.n() == 0 {
            return Err(Error::InvalidArgument("dataset has no samples".into()));
        }
        if dataset.d() == 0 {
            return Err(Error::InvalidArgument("dataset has dimension 0".into()));
        }
        if kind == LossKind::Logistic {
            for (i, s) in dataset.samples().iter().enumerate() {
                if s.label != 1.0 && s.label != -1.0 {
                    return Err(Error::InvalidArgument(format!(
                        "logistic loss needs labels in {{-1,+1}}, sample {i} has {}",
                        s.label
                    )));
                }
            }
        }
        let max_sq = dataset
            .samples()
            .iter()
            .map(|s| s.features.sq_norm())
            .fold(0.0f64, f64::max);
        let l = coef * max_sq + lambda;
        Ok(FiniteSumProblem {
            kind,
            n: dataset.n(),
            d: dataset.d(),
            dataset: Some(dataset),
            quads: Vec::new(),
            lambda,
            mu: lambda,
            l,
        })
    }

    /// An explicit quadratic objective. Every component must be strongly
    /// convex (minimum eigenvalue over all `A_i` strictly positive) or
    /// construction fails; `mu` and `L` come from a direct eigensolve.
    pub fn quadratic(quads: Vec<QuadraticComponent>) -> Result<Self> {
        let n = quads.len();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "quadratic problem needs at least one component".into(),
            ));
        }
        let d = quads[0].d;
        if d > MAX_QUADRATIC_DIM {
            return Err(Error::InvalidArgument(format!(
                "quadratic dimension {d} exceeds the desk-scale limit {MAX_QUADRATIC_DIM}"
            )));
        }
        let mut mu = f64::INFINITY;
        let mut l = f64::NEG_INFINITY;
        for q in &quads {
            if q.d != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: q.d,
                });
            }
            let (lo, hi) = q.eigen_extremes();
            mu = mu.min(lo);
            l = l.max(hi);
        }
        if mu <= 0.0 {
            return Err(Error::NotStronglyConvex { mu });
        }
        Ok(FiniteSumProblem {
            kind: LossKind::QuadraticExplicit,
            dataset: None,
            quads,
            lambda: 0.0,
            n,
            d,
            mu,
            l,
        })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_glm(&self) -> bool {
        matches!(self.kind, LossKind::Logistic | LossKind::Ridge)
    }

    pub fn dataset(&self) -> Option<&Dataset> {
        self.dataset.as_ref()
    }

    /// `(mu, L, kappa)`; errors when the problem is not strongly convex
    /// (GLM with `lambda = 0`).
    pub fn constants(&self) -> Result<(f64, f64, f64)> {
        if self.mu <= 0.0 {
            return Err(Error::NotStronglyConvex { mu: self.mu });
        }
        Ok((self.mu, self.l, self.l / self.mu))
    }

    /// Smoothness constant alone; defined even without strong convexity.
    pub fn smoothness(&self) -> f64 {
        self.l
    }

    pub fn component_gradient(&self, i: usize, x: &DenseVec) -> Result<DenseVec> {
        let mut out = DenseVec::zeros(self.d);
        self.component_gradient_into(i, x, &mut out)?;
        Ok(out)
    }

    /// `∇f_i(x)`, written into `out`.
    pub fn component_gradient_into(
        &self,
        i: usize,
        x: &DenseVec,
        out: &mut DenseVec,
    ) -> Result<()> {
        self.check_access(i, x)?;
        if out.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: out.len(),
            });
        }
        match self.kind {
            LossKind::Logistic | LossKind::Ridge => {
                for j in 0..self.d {
                    out[j] = self.lambda * x[j];
                }
                let (_, deriv) = self.component_loss_scalar(i, x)?;
                let s = &self.dataset.as_ref().unwrap().sample(i).features;
                axpy_sparse(deriv, s, out)?;
            }
            LossKind::QuadraticExplicit => {
                let q = &self.quads[i];
                q.matvec(x.as_slice(), out.as_mut_slice());
                for j in 0..self.d {
                    out[j] -= q.b[j];
                }
            }
        }
        Ok(())
    }

    /// For GLM losses: `inner = a_iᵀx` and the scalar derivative
    /// `deriv = ℓ′(inner)` of the unregularized loss, so the loss-part
    /// gradient is exactly `deriv · a_i`.
    pub fn component_loss_scalar(&self, i: usize, x: &DenseVec) -> Result<(f64, f64)> {
        self.check_access(i, x)?;
        let ds = self.dataset.as_ref().ok_or_else(|| {
            Error::Unsupported("component_loss_scalar applies to GLM losses only".into())
        })?;
        let s = ds.sample(i);
        let inner = dot(&s.features, x)?;
        let deriv = self.scalar_deriv(s.label, inner)?;
        Ok((inner, deriv))
    }

    /// The scalar loss derivative `ℓ′(inner)` given a label; the piece the
    /// just-in-time path stores per component.
    pub fn scalar_deriv(&self, label: f64, inner: f64) -> Result<f64> {
        match self.kind {
            LossKind::Logistic => Ok(-label * sigmoid(-label * inner)),
            LossKind::Ridge => Ok(inner - label),
            LossKind::QuadraticExplicit => Err(Error::Unsupported(
                "scalar derivatives apply to GLM losses only".into(),
            )),
        }
    }

    pub fn component_value(&self, i: usize, x: &DenseVec) -> Result<f64> {
        self.check_access(i, x)?;
        match self.kind {
            LossKind::Logistic => {
                let s = self.dataset.as_ref().unwrap().sample(i);
                let inner = dot(&s.features, x)?;
                Ok(ln1p_exp(-s.label * inner) + 0.5 * self.lambda * x.sq_norm())
            }
            LossKind::Ridge => {
                let s = self.dataset.as_ref().unwrap().sample(i);
                let r = dot(&s.features, x)? - s.label;
                Ok(0.5 * r * r + 0.5 * self.lambda * x.sq_norm())
            }
            LossKind::QuadraticExplicit => {
                let q = &self.quads[i];
                let mut ax = vec![0.0; self.d];
                q.matvec(x.as_slice(), &mut ax);
                let xax: f64 = ax.iter().zip(x.as_slice()).map(|(a, v)| a * v).sum();
                let bx: f64 = q.b.iter().zip(x.as_slice()).map(|(b, v)| b * v).sum();
                Ok(0.5 * xax - bx + q.c)
            }
        }
    }

    /// `f(x) = (1/n) Σ f_i(x)`.
    pub fn value(&self, x: &DenseVec) -> Result<f64> {
        if let Some(ds) = self.dataset.as_ref() {
            // shared regularizer hoisted out of the sum: O(nnz) per row
            // instead of O(d)
            self.check_access(0, x)?;
            let mut s = 0.0;
            for i in 0..self.n {
                let sample = ds.sample(i);
                let inner = dot(&sample.features, x)?;
                s += match self.kind {
                    LossKind::Logistic => ln1p_exp(-sample.label * inner),
                    LossKind::Ridge => {
                        let r = inner - sample.label;
                        0.5 * r * r
                    }
                    LossKind::QuadraticExplicit => unreachable!("quadratics hold no dataset"),
                };
            }
            return Ok(s / self.n as f64 + 0.5 * self.lambda * x.sq_norm());
        }
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.component_value(i, x)?;
        }
        Ok(s / self.n as f64)
    }

    pub fn full_gradient(&self, x: &DenseVec) -> Result<DenseVec> {
        let mut out = DenseVec::zeros(self.d);
        self.full_gradient_into(x, &mut out)?;
        Ok(out)
    }

    /// `∇f(x) = (1/n) Σ ∇f_i(x)`: components accumulated in index order,
    /// then scaled — the same summation shape the solvers use for their
    /// table averages, so the two agree bit-for-bit at initialization.
    pub fn full_gradient_into(&self, x: &DenseVec, out: &mut DenseVec) -> Result<()> {
        if out.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: out.len(),
            });
        }
        out.fill_zero();
        let mut g = DenseVec::zeros(self.d);
        for i in 0..self.n {
            self.component_gradient_into(i, x, &mut g)?;
            out.add_scaled(1.0, &g)?;
        }
        out.scale(1.0 / self.n as f64);
        Ok(())
    }

    /// Solve for `x⋆` and `f⋆`. Explicit quadratics use the mean linear
    /// system directly; GLM losses run full-gradient descent at stepsize
    /// `1/L` until `‖∇f‖ ≤ tol`.
    pub fn solve_reference(&self, tol: f64) -> Result<Reference> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance {tol} must be positive"
            )));
        }
        match self.kind {
            LossKind::QuadraticExplicit => {
                let d = self.d;
                let nf = self.n as f64;
                let mut mean_mat = DMatrix::zeros(d, d);
                let mut mean_b = DVector::zeros(d);
                for q in &self.quads {
                    for r in 0..d {
                        for c in 0..d {
                            mean_mat[(r, c)] += q.mat[r * d + c] / nf;
                        }
                        mean_b[r] += q.b[r] / nf;
                    }
                }
                let x = mean_mat.lu().solve(&mean_b).ok_or_else(|| {
                    Error::InvalidArgument("mean quadratic system is singular".into())
                })?;
                let x_star = DenseVec::from_vec(x.iter().copied().collect());
                let f_star = self.value(&x_star)?;
                Ok(Reference { x_star, f_star })
            }
            LossKind::Logistic | LossKind::Ridge => {
                const CAP: u64 = 2_000_000;
                let gamma = 1.0 / self.l;
                let mut x = DenseVec::zeros(self.d);
                let mut g = DenseVec::zeros(self.d);
                let mut iters = 0u64;
                loop {
                    self.full_gradient_into(&x, &mut g)?;
                    let gn = g.sq_norm().sqrt();
                    if gn <= tol {
                        let f_star = self.value(&x)?;
                        return Ok(Reference { x_star: x, f_star });
                    }
                    if iters >= CAP {
                        return Err(Error::NoConvergence {
                            grad_norm: gn,
                            iters,
                        });
                    }
                    x.add_scaled(-gamma, &g)?;
                    iters += 1;
                }
            }
        }
    }

    /// Deterministic byte encoding of the problem (loss kind, exact
    /// regularizer bits, and either the dataset's canonical bytes or the
    /// quadratic components' coefficient bits); the basis for reference-
    /// cache keys.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let kind = match self.kind {
            LossKind::Logistic => "logistic",
            LossKind::Ridge => "ridge",
            LossKind::QuadraticExplicit => "quadratic_explicit",
        };
        out.extend_from_slice(b"csagafs1\n");
        out.extend_from_slice(kind.as_bytes());
        out.push(b'\n');
        out.extend_from_slice(&self.lambda.to_bits().to_be_bytes());
        match &self.dataset {
            Some(ds) => out.extend_from_slice(&ds.canonical_bytes()),
            None => {
                for q in &self.quads {
                    out.extend_from_slice(&(q.d as u64).to_be_bytes());
                    for v in q.mat.iter().chain(q.b.iter()).chain(std::iter::once(&q.c)) {
                        out.extend_from_slice(&v.to_bits().to_be_bytes());
                    }
                }
            }
        }
        out
    }

    fn check_access(&self, i: usize, x: &DenseVec) -> Result<()> {
        if i >= self.n {
            return Err(Error::InvalidArgument(format!(
                "component index {i} out of range for n = {}",
                self.n
            )));
        }
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Logistic sigmoid with the usual overflow-safe branch.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow for large `t`.
fn ln1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{parse_libsvm, ParseOptions};
    use std::io::Cursor;

    fn glm_from(text: &str, kind: LossKind, lambda: f64) -> FiniteSumProblem {
        let ds = parse_libsvm(Cursor::new(text), &ParseOptions::default()).unwrap();
        FiniteSumProblem::glm(kind, ds, lambda).unwrap()
    }

    #[test]
    fn logistic_gradient_at_zero() {
        let p = glm_from("+1 1:1\n", LossKind::Logistic, 0.0);
        let g = p.component_gradient(0, &DenseVec::zeros(1)).unwrap();
        assert_eq!(g.as_slice(), &[-0.5]);
    }

    #[test]
    fn quadratic_identity_gradient_is_x() {
        let q = QuadraticComponent::new(2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0], 0.0).unwrap();
        let p = FiniteSumProblem::quadratic(vec![q]).unwrap();
        let x = DenseVec::from_vec(vec![3.0, -4.0]);
        let g = p.component_gradient(0, &x).unwrap();
        assert_eq!(g.as_slice(), x.as_slice());
    }

    #[test]
    fn ridge_zero_residual_zero_gradient() {
        let p = glm_from("1 1:1\n", LossKind::Ridge, 0.0);
        let g = p
            .component_gradient(0, &DenseVec::from_vec(vec![1.0]))
            .unwrap();
        assert_eq!(g.as_slice(), &[0.0]);
    }

    #[test]
    fn gradient_dimension_checked() {
        let p = glm_from("1 1:1\n", LossKind::Ridge, 0.0);
        assert!(p.component_gradient(0, &DenseVec::zeros(2)).is_err());
        assert!(p.component_gradient(5, &DenseVec::zeros(1)).is_err());
    }

    #[test]
    fn scalar_deriv_examples() {
        let p = glm_from("+1 1:1\n", LossKind::Logistic, 0.0);
        let (inner, deriv) = p.component_loss_scalar(0, &DenseVec::zeros(1)).unwrap();
        assert_eq!(inner, 0.0);
        assert_eq!(deriv, -0.5);
        let r = glm_from("1 1:1\n", LossKind::Ridge, 0.0);
        let (_, deriv) = r
            .component_loss_scalar(0, &DenseVec::from_vec(vec![1.0]))
            .unwrap();
        assert_eq!(deriv, 0.0);
        // saturated logistic: deriv tends to 0
        let (_, deriv) = p
            .component_loss_scalar(0, &DenseVec::from_vec(vec![1.0e3]))
            .unwrap();
        assert!(deriv.abs() < 1e-100, "{deriv}");
    }

    #[test]
    fn full_gradient_degenerate_single_component() {
        let p = glm_from("+1 1:2 2:1\n", LossKind::Logistic, 0.3);
        let x = DenseVec::from_vec(vec![0.4, -0.2]);
        let full = p.full_gradient(&x).unwrap();
        let comp = p.component_gradient(0, &x).unwrap();
        assert_eq!(full, comp);
    }

    #[test]
    fn full_gradient_averages_components() {
        // A_i = I, b_i given: ∇f(x) = x − mean(b)
        let d = 2;
        let eye = vec![1.0, 0.0, 0.0, 1.0];
        let bs = [[1.0, 2.0], [3.0, -4.0], [-1.0, 0.5]];
        let quads = bs
            .iter()
            .map(|b| QuadraticComponent::new(d, eye.clone(), b.to_vec(), 0.0).unwrap())
            .collect();
        let p = FiniteSumProblem::quadratic(quads).unwrap();
        let x = DenseVec::from_vec(vec![0.7, 0.9]);
        let g = p.full_gradient(&x).unwrap();
        let mean_b = [1.0, -0.5];
        for j in 0..d {
            assert!((g[j] - (x[j] - mean_b[j])).abs() < 1e-15);
        }
    }

    #[test]
    fn constants_logistic_formula() {
        let p = glm_from("+1 1:2\n-1 2:2\n", LossKind::Logistic, 0.1);
        let (mu, l, kappa) = p.constants().unwrap();
        assert_eq!(mu, 0.1);
        assert!((l - 1.1).abs() < 1e-15);
        assert!((kappa - 11.0).abs() < 1e-12);
    }

    #[test]
    fn constants_isotropic_quadratic() {
        let c = 2.5;
        let q = QuadraticComponent::new(2, vec![c, 0.0, 0.0, c], vec![0.0; 2], 0.0).unwrap();
        let p = FiniteSumProblem::quadratic(vec![q]).unwrap();
        let (mu, l, kappa) = p.constants().unwrap();
        assert!((mu - c).abs() < 1e-12);
        assert!((l - c).abs() < 1e-12);
        assert!((kappa - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constants_match_closed_form_eigensolve() {
        // independent oracle: analytic eigenvalues of a symmetric 3x3 via
        // the trigonometric solution of the characteristic cubic
        let mat = vec![
            4.0, 1.0, -0.5, //
            1.0, 3.0, 0.25, //
            -0.5, 0.25, 5.0,
        ];
        let q = QuadraticComponent::new(3, mat.clone(), vec![0.0; 3], 0.0).unwrap();
        let p = FiniteSumProblem::quadratic(vec![q]).unwrap();
        let (mu, l, _) = p.constants().unwrap();

        let (lo, hi) = sym3_eigen_extremes(&mat);
        assert!((mu - lo).abs() < 1e-9, "{mu} vs {lo}");
        assert!((l - hi).abs() < 1e-9, "{l} vs {hi}");
    }

    fn sym3_eigen_extremes(m: &[f64]) -> (f64, f64) {
        let (a, b, c) = (m[0], m[4], m[8]);
        let (d, e, f) = (m[1], m[2], m[5]);
        let q = (a + b + c) / 3.0;
        let p2 =
            (a - q).powi(2) + (b - q).powi(2) + (c - q).powi(2) + 2.0 * (d * d + e * e + f * f);
        let p = (p2 / 6.0).sqrt();
        let bm = [
            (a - q) / p,
            d / p,
            e / p,
            d / p,
            (b - q) / p,
            f / p,
            e / p,
            f / p,
            (c - q) / p,
        ];
        let det_b = bm[0] * (bm[4] * bm[8] - bm[5] * bm[7])
            - bm[1] * (bm[3] * bm[8] - bm[5] * bm[6])
            + bm[2] * (bm[3] * bm[7] - bm[4] * bm[6]);
        let r = (det_b / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        let e2 = 3.0 * q - e1 - e3;
        let lo = e1.min(e2).min(e3);
        let hi = e1.max(e2).max(e3);
        (lo, hi)
    }

    #[test]
    fn mu_zero_glm_constructs_but_constants_error() {
        let p = glm_from("+1 1:1\n", LossKind::Logistic, 0.0);
        assert!(matches!(
            p.constants(),
            Err(Error::NotStronglyConvex { .. })
        ));
        assert!(p.smoothness() > 0.0);
    }

    #[test]
    fn non_spd_quadratic_rejected() {
        let q = QuadraticComponent::new(1, vec![-1.0], vec![0.0], 0.0).unwrap();
        assert!(matches!(
            FiniteSumProblem::quadratic(vec![q]),
            Err(Error::NotStronglyConvex { .. })
        ));
    }

    #[test]
    fn reference_one_dimensional_centers() {
        // f_i = ½(x − b_i)², centers 1 and −1: x⋆ = 0, f⋆ = 0.5
        let mk = |z: f64| QuadraticComponent::from_center(1, vec![1.0], &[z]).unwrap();
        let p = FiniteSumProblem::quadratic(vec![mk(1.0), mk(-1.0)]).unwrap();
        let r = p.solve_reference(1e-12).unwrap();
        assert!(r.x_star[0].abs() < 1e-12);
        assert!((r.f_star - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reference_gradient_below_tolerance() {
        let text = "+1 1:1 3:0.5\n-1 2:1\n+1 1:0.25 2:0.5\n-1 3:1\n";
        let p = glm_from(text, LossKind::Logistic, 0.05);
        let tol = 1e-9;
        let r = p.solve_reference(tol).unwrap();
        let g = p.full_gradient(&r.x_star).unwrap();
        assert!(g.sq_norm().sqrt() <= tol);
    }

    #[test]
    fn reference_agrees_with_independent_long_run() {
        let text = "+1 1:1 3:0.5\n-1 2:1\n+1 1:0.25 2:0.5\n-1 3:1\n+1 2:0.75\n\
                    -1 1:0.5 3:0.25\n+1 3:1\n-1 2:0.3\n+1 1:0.8\n-1 1:0.1 2:0.9\n";
        let p = glm_from(text, LossKind::Logistic, 0.02);
        let r = p.solve_reference(1e-10).unwrap();

        // independent slow solver: half the stepsize, fixed long horizon
        let gamma = 0.5 / p.smoothness();
        let mut x = DenseVec::zeros(p.d());
        for _ in 0..200_000 {
            let g = p.full_gradient(&x).unwrap();
            x.add_scaled(-gamma, &g).unwrap();
        }
        let f_slow = p.value(&x).unwrap();
        assert!(
            (r.f_star - f_slow).abs() <= 1e-8,
            "{} vs {}",
            r.f_star,
            f_slow
        );
    }

    #[test]
    fn loss_part_gradient_reconstruction_is_exact() {
        let p = glm_from("+1 1:2 3:-1.5\n-1 2:0.5\n", LossKind::Logistic, 0.7);
        let x = DenseVec::from_vec(vec![0.3, -1.2, 0.8]);
        for i in 0..p.n() {
            let g = p.component_gradient(i, &x).unwrap();
            let (_, deriv) = p.component_loss_scalar(i, &x).unwrap();
            let mut expected = DenseVec::zeros(p.d());
            for j in 0..p.d() {
                expected[j] = p.lambda() * x[j];
            }
            axpy_sparse(
                deriv,
                &p.dataset().unwrap().sample(i).features,
                &mut expected,
            )
            .unwrap();
            assert_eq!(g, expected);
        }
    }

    #[test]
    fn logistic_rejects_non_binary_labels() {
        let ds = parse_libsvm(
            Cursor::new("2.5 1:1\n"),
            &ParseOptions {
                normalize_binary_labels: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(FiniteSumProblem::glm(LossKind::Logistic, ds, 0.1).is_err());
    }
}
