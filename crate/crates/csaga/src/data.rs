//! LIBSVM-format ingestion, subsampling, and dataset statistics.

use std::io::BufRead;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, STREAM_SUBSAMPLE};
use crate::vecmath::SparseVec;

/// One labeled row: a sparse feature vector and a real label
/// (±1 for classification losses, arbitrary real for regression).
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub features: SparseVec,
    pub label: f64,
}

/// An immutable collection of samples sharing one feature dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    d: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, d: usize) -> Result<Self> {
        for s in &samples {
            if s.features.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.features.dim(),
                });
            }
        }
        Ok(Dataset { samples, d })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &Sample {
        &self.samples[i]
    }

    /// Serialize back to LIBSVM text (1-based indices, shortest
    /// round-tripping float formatting).
    pub fn to_libsvm_string(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            out.push_str(&format!("{}", s.label));
            for (j, v) in s.features.iter() {
                out.push_str(&format!(" {}:{}", j + 1, v));
            }
            out.push('\n');
        }
        out
    }

    /// Deterministic byte serialization used for content-hash cache keys.
    /// Floats are written as exact bit patterns so the key never depends
    /// on formatting.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"csagads1\n");
        out.extend_from_slice(format!("{} {}\n", self.n(), self.d).as_bytes());
        for s in &self.samples {
            out.extend_from_slice(format!("{:016x}", s.label.to_bits()).as_bytes());
            for (j, v) in s.features.iter() {
                out.extend_from_slice(format!(" {}:{:016x}", j, v.to_bits()).as_bytes());
            }
            out.push(b'\n');
        }
        out
    }
}

/// Options for [`parse_libsvm`].
#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Map label tokens `+1`/`1` to +1.0 and `-1`/`0` to −1.0
    /// (the usual convention for binary classification files).
    pub normalize_binary_labels: bool,
    /// Use this dimension instead of (max observed index + 1). Must be at
    /// least the observed dimension.
    pub dim_override: Option<usize>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            normalize_binary_labels: true,
            dim_override: None,
        }
    }
}

/// Parse LIBSVM text: one `label idx:val idx:val …` row per line with
/// 1-based, strictly increasing indices. Blank lines and trailing
/// whitespace are tolerated; explicit zero values are dropped (zero is
/// implicit in the format). Errors name the offending line.
pub fn parse_libsvm(reader: impl BufRead, opts: &ParseOptions) -> Result<Dataset> {
    let mut rows: Vec<(f64, Vec<usize>, Vec<f64>)> = Vec::new();
    let mut max_dim = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let mut tokens = line.split_whitespace();
        let label_tok = match tokens.next() {
            None => continue, // blank line
            Some(t) => t,
        };
        let label =
            parse_label(label_tok, opts.normalize_binary_labels).ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("malformed label token {label_tok:?}"),
            })?;

        let mut idx = Vec::new();
        let mut val = Vec::new();
        let mut prev = 0usize; // 1-based; 0 means none seen yet
        for tok in tokens {
            let (i_str, v_str) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("malformed feature token {tok:?} (expected idx:val)"),
            })?;
            let i: usize = i_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("malformed index {i_str:?}"),
            })?;
            if i < 1 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("index {i} out of range (LIBSVM indices are 1-based)"),
                });
            }
            if i <= prev {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("indices not strictly increasing at {i}"),
                });
            }
            prev = i;
            let v: f64 = v_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("malformed value {v_str:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("non-finite value {v_str:?}"),
                });
            }
            if v != 0.0 {
                idx.push(i - 1);
                val.push(v);
            }
            max_dim = max_dim.max(i);
        }
        rows.push((label, idx, val));
    }

    let d = match opts.dim_override {
        Some(d) => {
            if d < max_dim {
                return Err(Error::InvalidArgument(format!(
                    "dimension override {d} is below observed dimension {max_dim}"
                )));
            }
            d
        }
        None => max_dim,
    };

    let samples = rows
        .into_iter()
        .map(|(label, idx, val)| {
            Ok(Sample {
                features: SparseVec::new(d, idx, val)?,
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(samples, d)
}

fn parse_label(tok: &str, normalize: bool) -> Option<f64> {
    if normalize {
        match tok {
            "+1" | "1" => return Some(1.0),
            "-1" | "0" => return Some(-1.0),
            _ => {}
        }
    }
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Draw `⌈fraction·n⌉` samples without replacement, deterministically in
/// `seed`; `fraction = 1` returns the dataset unchanged in original order.
/// The subsample keeps the parent dimension. The ceiling is guarded
/// against float noise so e.g. 0.07·100 yields 7 rows, not 8.
pub fn subsample(ds: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "subsample fraction {fraction} outside (0, 1]"
        )));
    }
    if fraction == 1.0 {
        return Ok(ds.clone());
    }
    let n = ds.n();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "cannot subsample an empty dataset".into(),
        ));
    }
    let m = ((fraction * n as f64) - 1e-9).ceil() as usize;
    let m = m.clamp(1, n);

    let mut rng = stream_rng(seed, STREAM_SUBSAMPLE);
    let mut pool: Vec<usize> = (0..n).collect();
    for t in 0..m {
        let j = rng.gen_range(t..n);
        pool.swap(t, j);
    }
    let mut picked = pool[..m].to_vec();
    picked.sort_unstable();
    let samples = picked.iter().map(|&i| ds.sample(i).clone()).collect();
    Dataset::new(samples, ds.d())
}

/// Summary statistics feeding smoothness-constant estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataStats {
    pub n: usize,
    pub d: usize,
    pub max_row_sq_norm: f64,
    pub mean_nnz: f64,
}

pub fn stats(ds: &Dataset) -> Result<DataStats> {
    if ds.n() == 0 {
        return Err(Error::InvalidArgument("stats of an empty dataset".into()));
    }
    let max_row_sq_norm = ds
        .samples()
        .iter()
        .map(|s| s.features.sq_norm())
        .fold(f64::NEG_INFINITY, f64::max);
    let total_nnz: usize = ds.samples().iter().map(|s| s.features.nnz()).sum();
    Ok(DataStats {
        n: ds.n(),
        d: ds.d(),
        max_row_sq_norm,
        mean_nnz: total_nnz as f64 / ds.n() as f64,
    })
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        let sample = (
            prop_oneof![Just(1.0f64), Just(-1.0f64)],
            proptest::collection::btree_set(0usize..30, 0..6),
            proptest::collection::vec((-1000i64..1000).prop_filter("nonzero", |v| *v != 0), 6),
        );
        proptest::collection::vec(sample, 1..20).prop_map(|rows| {
            let d = 30;
            let samples = rows
                .into_iter()
                .map(|(label, idx, raw)| {
                    let idx: Vec<usize> = idx.into_iter().collect();
                    let val: Vec<f64> = idx
                        .iter()
                        .enumerate()
                        .map(|(k, _)| raw[k] as f64 / 16.0)
                        .collect();
                    Sample {
                        features: SparseVec::new(d, idx, val).unwrap(),
                        label,
                    }
                })
                .collect();
            Dataset::new(samples, d).unwrap()
        })
    }

    proptest! {
        #[test]
        fn libsvm_roundtrip(ds in arb_dataset()) {
            let opts = ParseOptions { dim_override: Some(ds.d()), ..Default::default() };
            let text = ds.to_libsvm_string();
            let back = parse_libsvm(Cursor::new(text), &opts).unwrap();
            prop_assert_eq!(ds, back);
        }

        #[test]
        fn subsample_exact_distinct_count(
            ds in arb_dataset(),
            fraction in 0.01f64..1.0,
            seed in 0u64..1000,
        ) {
            let n = ds.n();
            let sub = subsample(&ds, fraction, seed).unwrap();
            let want = ((fraction * n as f64) - 1e-9).ceil().max(1.0) as usize;
            prop_assert_eq!(sub.n(), want.min(n));
        }
    }
}
