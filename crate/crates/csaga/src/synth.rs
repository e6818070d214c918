//! Synthetic problem generators: quadratic families with prescribed
//! conditioning for rate experiments, and sparse GLM datasets whose
//! feature-popularity profile mimics real sparse classification data.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::objectives::{sigmoid, FiniteSumProblem, QuadraticComponent};
use crate::rng::{stream_rng, STREAM_SYNTH};
use crate::vecmath::SparseVec;

/// A family of `n` random quadratic components whose joint constants hit
/// the targets: component 0 carries eigenvalues spanning `[mu, l]`
/// exactly (up to eigensolve rounding), the rest draw eigenvalues inside
/// the interval, and every component gets its own random orthogonal basis
/// and random center.
pub fn quadratic_family(
    n: usize,
    d: usize,
    mu: f64,
    l: f64,
    seed: u64,
) -> Result<FiniteSumProblem> {
    if n == 0 {
        return Err(Error::InvalidArgument("family needs n >= 1".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("family needs d >= 1".into()));
    }
    if !(mu > 0.0 && l >= mu && l.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < mu <= l finite, got mu = {mu}, l = {l}"
        )));
    }
    if d == 1 && mu != l {
        return Err(Error::InvalidArgument(
            "d = 1 admits a single eigenvalue; need mu = l".into(),
        ));
    }
    let mut rng = stream_rng(seed, STREAM_SYNTH);
    let mut quads = Vec::with_capacity(n);
    for i in 0..n {
        let eigs: Vec<f64> = if i == 0 {
            (0..d)
                .map(|k| {
                    if d == 1 {
                        mu
                    } else {
                        mu + (l - mu) * k as f64 / (d - 1) as f64
                    }
                })
                .collect()
        } else {
            (0..d).map(|_| rng.gen_range(mu..=l)).collect()
        };
        let q = random_orthogonal(d, &mut rng);
        let mut mat = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..=r {
                let mut s = 0.0;
                for k in 0..d {
                    s += q[(r, k)] * eigs[k] * q[(c, k)];
                }
                mat[r * d + c] = s;
                mat[c * d + r] = s;
            }
        }
        let z: Vec<f64> = (0..d)
            .map(|_| normal(&mut rng) / (d as f64).sqrt())
            .collect();
        quads.push(QuadraticComponent::from_center(d, mat, &z)?);
    }
    FiniteSumProblem::quadratic(quads)
}

/// A sparse binary-classification dataset with `nnz` nonzeros per row.
/// Feature popularity follows a Zipf profile (`P(feature j) ∝ 1/(j+1)`),
/// so rows share their heavy coordinates the way bag-of-words data does;
/// values are standard normal, and labels follow a logistic model on a
/// hidden weight vector.
pub fn sparse_glm_dataset(n: usize, d: usize, nnz: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "dataset needs n >= 1 and d >= 1".into(),
        ));
    }
    if nnz == 0 || nnz > d {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= nnz <= d, got nnz = {nnz}, d = {d}"
        )));
    }
    let mut rng = stream_rng(seed, STREAM_SYNTH);
    let w_true: Vec<f64> = (0..d)
        .map(|_| normal(&mut rng) / (d as f64).sqrt())
        .collect();
    let weights: Vec<f64> = (0..d).map(|j| 1.0 / (j + 1) as f64).collect();

    let mut samples = Vec::with_capacity(n);
    let mut keys = vec![0.0f64; d];
    for _ in 0..n {
        // weighted sampling without replacement (exponential-key trick):
        // the nnz largest values of ln(u_j)/w_j
        for j in 0..d {
            keys[j] = rng.gen::<f64>().ln() / weights[j];
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.select_nth_unstable_by(nnz - 1, |a, b| keys[*b].total_cmp(&keys[*a]));
        let mut idx: Vec<usize> = order[..nnz].to_vec();
        idx.sort_unstable();
        let val: Vec<f64> = idx.iter().map(|_| normal(&mut rng)).collect();

        let margin: f64 = idx.iter().zip(&val).map(|(&j, v)| v * w_true[j]).sum();
        let p_pos = sigmoid(4.0 * margin);
        let label = if rng.gen::<f64>() < p_pos { 1.0 } else { -1.0 };
        samples.push(Sample {
            features: SparseVec::new(d, idx, val)?,
            label,
        });
    }
    Dataset::new(samples, d)
}

fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| normal(rng));
    a.qr().q()
}

/// Standard normal via Box–Muller; resamples the (measure-zero) exact
/// zero so sparse values stay structurally nonzero.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        if z != 0.0 && z.is_finite() {
            return z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecmath::DenseVec;

    #[test]
    fn family_hits_target_constants() {
        let p = quadratic_family(5, 4, 1.0, 10.0, 7).unwrap();
        let (mu, l, kappa) = p.constants().unwrap();
        assert!((mu - 1.0).abs() < 1e-9, "{mu}");
        assert!((l - 10.0).abs() < 1e-9, "{l}");
        assert!((kappa - 10.0).abs() < 1e-8, "{kappa}");
    }

    #[test]
    fn family_kappa_one_any_dim() {
        let p = quadratic_family(3, 4, 2.0, 2.0, 1).unwrap();
        let (mu, l, _) = p.constants().unwrap();
        assert!((mu - 2.0).abs() < 1e-9);
        assert!((l - 2.0).abs() < 1e-9);
    }

    #[test]
    fn family_deterministic_per_seed() {
        let a = quadratic_family(4, 3, 1.0, 5.0, 42).unwrap();
        let b = quadratic_family(4, 3, 1.0, 5.0, 42).unwrap();
        let x = DenseVec::from_vec(vec![0.3, -1.1, 0.7]);
        for i in 0..4 {
            assert_eq!(
                a.component_gradient(i, &x).unwrap(),
                b.component_gradient(i, &x).unwrap()
            );
        }
        let c = quadratic_family(4, 3, 1.0, 5.0, 43).unwrap();
        assert_ne!(
            a.component_gradient(0, &x).unwrap(),
            c.component_gradient(0, &x).unwrap()
        );
    }

    #[test]
    fn family_reference_solvable() {
        let p = quadratic_family(6, 4, 0.5, 4.0, 11).unwrap();
        let r = p.solve_reference(1e-12).unwrap();
        let g = p.full_gradient(&r.x_star).unwrap();
        assert!(g.sq_norm().sqrt() < 1e-10);
    }

    #[test]
    fn family_rejects_bad_arguments() {
        assert!(quadratic_family(0, 4, 1.0, 2.0, 0).is_err());
        assert!(quadratic_family(3, 0, 1.0, 2.0, 0).is_err());
        assert!(quadratic_family(3, 4, 0.0, 2.0, 0).is_err());
        assert!(quadratic_family(3, 4, 3.0, 2.0, 0).is_err());
        assert!(quadratic_family(3, 1, 1.0, 2.0, 0).is_err());
    }

    #[test]
    fn sparse_dataset_shape_and_labels() {
        let ds = sparse_glm_dataset(50, 40, 5, 3).unwrap();
        assert_eq!(ds.n(), 50);
        assert_eq!(ds.d(), 40);
        for s in ds.samples() {
            assert_eq!(s.features.nnz(), 5);
            assert!(s.label == 1.0 || s.label == -1.0);
        }
    }

    #[test]
    fn sparse_dataset_deterministic_per_seed() {
        let a = sparse_glm_dataset(20, 30, 4, 9).unwrap();
        let b = sparse_glm_dataset(20, 30, 4, 9).unwrap();
        assert_eq!(a.canonical_bytes(), b.canonical_bytes());
        let c = sparse_glm_dataset(20, 30, 4, 10).unwrap();
        assert_ne!(a.canonical_bytes(), c.canonical_bytes());
    }

    #[test]
    fn sparse_dataset_popularity_skew() {
        let ds = sparse_glm_dataset(300, 50, 5, 1).unwrap();
        let mut counts = vec![0usize; 50];
        for s in ds.samples() {
            for (j, _) in s.features.iter() {
                counts[j] += 1;
            }
        }
        // Zipf profile: the head feature appears far more often than the tail
        assert!(
            counts[0] > 5 * counts[49].max(1),
            "{} vs {}",
            counts[0],
            counts[49]
        );
    }

    #[test]
    fn sparse_dataset_rejects_bad_arguments() {
        assert!(sparse_glm_dataset(0, 10, 2, 0).is_err());
        assert!(sparse_glm_dataset(5, 0, 2, 0).is_err());
        assert!(sparse_glm_dataset(5, 10, 0, 0).is_err());
        assert!(sparse_glm_dataset(5, 10, 11, 0).is_err());
    }

    #[test]
    fn normal_moments_sane() {
        let mut rng = stream_rng(0, STREAM_SYNTH);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = normal(&mut rng);
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.05, "{mean}");
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }
}
