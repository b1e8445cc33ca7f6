use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use opmono::{decide, min_eigenvalue, random_hermitian, verify_certificate, FunctionSeed, HermitianMatrix};

pub const CSV_HEADER: &str = "seed,n,width,delta,t0,neg_eig,verified";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceRecord {
    pub seed: u64,
    pub n: usize,
    pub spectral_width: f64,
    pub delta: Option<f64>,
    pub t0: Option<f64>,
    pub neg_eig: Option<f64>,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub count: usize,
    pub verified_fraction: f64,
    pub min_delta: Option<f64>,
    pub median_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub function: String,
    pub instances: Vec<InstanceRecord>,
    pub aggregates: Aggregates,
}

impl BatchReport {
    pub fn all_verified(&self) -> bool {
        self.instances.iter().all(|r| r.verified)
    }
}

/// Random instance `index` of a batch: a GUE-style matrix with unit spread,
/// shifted so its smallest eigenvalue sits at `gamma + 1` when the domain is
/// bounded below.
pub fn instance_matrix(function: &FunctionSeed, n: usize, seed: u64) -> HermitianMatrix {
    let a = random_hermitian(n, seed, 1.0);
    if function.gamma().is_finite() {
        // Jacobi converges on every finite input of this size in practice;
        // fall back to the unshifted matrix and let `decide` report it.
        match min_eigenvalue(&a) {
            Ok(lo) => a.shift(function.gamma() + 1.0 - lo),
            Err(_) => a,
        }
    } else {
        a
    }
}

fn run_instance(function: &FunctionSeed, n: usize, seed: u64) -> InstanceRecord {
    let a = instance_matrix(function, n, seed);
    let mut record = InstanceRecord {
        seed,
        n,
        spectral_width: f64::NAN,
        delta: None,
        t0: None,
        neg_eig: None,
        verified: false,
        error: None,
    };
    match decide(function, &a) {
        Ok(verdict) => {
            record.spectral_width = verdict.spectral_width;
            match verdict.certificate {
                Some(cert) => {
                    record.verified = verify_certificate(function, &a, &cert).valid;
                    record.delta = Some(cert.delta);
                    record.t0 = Some(cert.t0);
                    record.neg_eig = Some(cert.neg_eig);
                }
                None => record.error = Some("numerically scalar instance".into()),
            }
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Runs `count` instances with seeds `base_seed, base_seed + 1, ...`.
/// Instances are evaluated in parallel; records keep instance order.
pub fn run_batch(function: &FunctionSeed, n: usize, count: usize, base_seed: u64) -> BatchReport {
    let instances: Vec<InstanceRecord> = (0..count as u64)
        .into_par_iter()
        .map(|i| run_instance(function, n, base_seed.wrapping_add(i)))
        .collect();

    let mut deltas: Vec<f64> = instances.iter().filter_map(|r| r.delta).collect();
    deltas.sort_by(f64::total_cmp);
    let median_delta = match deltas.len() {
        0 => None,
        k if k % 2 == 1 => Some(deltas[k / 2]),
        k => Some(0.5 * (deltas[k / 2 - 1] + deltas[k / 2])),
    };
    let verified = instances.iter().filter(|r| r.verified).count();
    let aggregates = Aggregates {
        count,
        verified_fraction: if count == 0 { 1.0 } else { verified as f64 / count as f64 },
        min_delta: deltas.first().copied(),
        median_delta,
    };
    BatchReport {
        function: function.to_string(),
        instances,
        aggregates,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv(report: &BatchReport, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &report.instances {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.seed,
            r.n,
            r.spectral_width,
            opt(r.delta),
            opt(r.t0),
            opt(r.neg_eig),
            r.verified
        )?;
    }
    Ok(())
}

pub fn emit_csv(report: &BatchReport, path: &std::path::Path) -> io::Result<()> {
    let mut buf = Vec::new();
    write_csv(report, &mut buf)?;
    std::fs::write(path, buf)
}
