//! Load a LIBSVM file, print its shape, and turn it into a regularized
//! logistic regression problem with explicit (μ, L) constants.
//!
//!     cargo run --example libsvm_stats [-- path/to/file.libsvm]

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use csaga::data::{parse_libsvm, stats, ParseOptions};
use csaga::{Error, FiniteSumProblem, LossKind, Result};

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/small.libsvm")
        });
    println!("reading {}", path.display());

    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    let opts = ParseOptions {
        normalize_binary_labels: true,
        dim_override: None,
    };
    let ds = parse_libsvm(BufReader::new(file), &opts)?;

    let st = stats(&ds)?;
    println!("rows            {}", st.n);
    println!("features        {}", st.d);
    println!("mean nnz / row  {:.2}", st.mean_nnz);
    println!("max row |a|^2   {:.4}", st.max_row_sq_norm);

    let lambda = 1e-2;
    let p = FiniteSumProblem::glm(LossKind::Logistic, ds, lambda)?;
    let (mu, l, kappa) = p.constants()?;
    println!();
    println!("logistic + (lambda/2)|x|^2 with lambda = {lambda}");
    println!("mu = {mu:.4e}  L = {l:.4e}  kappa = {kappa:.1}");

    let reference = p.solve_reference(1e-10)?;
    println!("f* = {:.12}", reference.f_star);
    Ok(())
}
