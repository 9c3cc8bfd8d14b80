//! One-off evaluations of the cusp-integral quantities, printed as JSON.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thetalift::automorphic::{
    compute_i0, compute_i_cusp, compute_r, quad_moment_functional, AutomorphicError,
    CoefficientSeries, IntegralPolicy, QuadraturePolicy,
};
use thiserror::Error;

use crate::coeffs::{CoeffFile, IngestError};
use crate::suite::{is_odd_prime, random_half_series};

#[derive(Debug, Error)]
pub enum ComputeError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Automorphic(#[from] AutomorphicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    R,
    I0,
    ICusp,
    QuadMoment,
}

#[derive(Clone, Debug)]
pub struct ComputeRequest {
    pub quantity: Quantity,
    pub p: u64,
    pub height: f64,
    pub which: usize,
    pub c: f64,
    /// Coefficient file; a synthetic series from `seed` and `support` otherwise.
    pub coeffs: Option<PathBuf>,
    pub seed: u64,
    pub support: i64,
}

fn series_for(req: &ComputeRequest) -> Result<(CoefficientSeries, Value), ComputeError> {
    match &req.coeffs {
        Some(path) => {
            let s = CoeffFile::read(path)?.to_series()?;
            Ok((s, json!({"file": path.display().to_string()})))
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
            let s = random_half_series(&mut rng, req.support);
            Ok((s, json!({"synthetic": {"seed": req.seed, "support": req.support}})))
        }
    }
}

pub fn compute(req: &ComputeRequest) -> Result<Value, ComputeError> {
    if !is_odd_prime(req.p) {
        return Err(ComputeError::NotOddPrime(req.p));
    }
    let (s, source) = series_for(req)?;
    let p = req.p;
    Ok(match req.quantity {
        Quantity::R => json!({
            "quantity": "R", "series": source, "p": p, "T": req.height,
            "value": compute_r(&s, p, req.height)?,
        }),
        Quantity::I0 => json!({
            "quantity": "I0", "series": source, "p": p, "T": req.height,
            "value": compute_i0(&s, p, req.height, &QuadraturePolicy::default())?,
        }),
        Quantity::ICusp => {
            let r = compute_i_cusp(&s, p, req.height, req.which, &IntegralPolicy::default())?;
            json!({
                "quantity": "I_cusp", "series": source, "p": p, "T": req.height,
                "which": r.which, "width": r.width,
                "quadrature": r.quadrature, "quadrature_error": r.quadrature_error,
                "formula": r.formula,
            })
        }
        Quantity::QuadMoment => {
            let m = quad_moment_functional(&s, p, req.c)?;
            json!({
                "quantity": "quad_moment", "series": source, "p": p, "C": req.c,
                "log_weighted": m.log_weighted, "v0_weighted": m.v0_weighted,
                "chain_lower": m.chain_lower, "chain_holds": m.chain_holds,
                "constants": {"u0": m.constants.u0, "lower_pos": m.constants.lower_pos, "lower_neg": m.constants.lower_neg},
            })
        }
    })
}
