//! Builders and oracles for concrete families.

pub mod blowup;
pub mod bp;
pub mod elliptic;
pub mod p1;
pub mod toric;

use std::str::FromStr;

pub use blowup::{blowup_constant, build_p2_blowup_family, BlowupFamily};
pub use bp::{
    brieskorn_pham_analyze, hermite_basis, multiplicity_hilbert_samuel, quotient_chart_check, toric_log_discrepancy,
    BpReport, BrieskornPhamSpec, LcCheck, MonomialSemigroup,
};
pub use elliptic::{
    build_elliptic_model, discriminant, elliptic_faltings_height, faltings_height_from_periods, faltings_to_hk,
    hk_from_faltings, modular_discriminant, period_lattice, EllipticCurveData, PeriodLattice,
};
pub use p1::{build_p1_fs, build_p1_fs_with_primes, fs_k_squared, fs_l_k, fs_l_squared, P1Fs, P1_PRIMES};
pub use toric::{blowup_fan, blowup_oracle, oracle_c, BlowupOracle, ToricFan};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamiliesError {
    #[error("DuplicatePrime: {0} listed twice")]
    DuplicatePrime(u64),
    #[error("CoprimalityViolated: {0}")]
    CoprimalityViolated(String),
    #[error("OutsideCone: {0:?} is not in the cone")]
    OutsideCone(Vec<i64>),
    #[error("NotPrimitive: {0:?}")]
    NotPrimitive(Vec<i64>),
    #[error("InvalidCone: {0}")]
    InvalidCone(String),
    #[error("NonMinimalModel: coefficients give discriminant {computed}, Δ_min = {given}")]
    NonMinimalModel { computed: String, given: i64 },
    #[error("BadTau: {0} is not in the upper half plane")]
    BadTau(String),
    #[error("UnknownFamily: {0}")]
    UnknownFamily(String),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Height(#[from] heightnum::HeightError),
    #[error("{0}")]
    Isect(#[from] isect::IsectError),
    #[error("{0}")]
    Quantized(#[from] quantized::QuantizedError),
}

/// Family ids accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyId {
    P1Fs,
    P2Blowup,
    BrieskornPham,
    Elliptic,
}

impl FromStr for FamilyId {
    type Err = FamiliesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p1-fs" | "p1" => Ok(FamilyId::P1Fs),
            "p2-blowup" => Ok(FamilyId::P2Blowup),
            "brieskorn-pham" => Ok(FamilyId::BrieskornPham),
            "elliptic" => Ok(FamilyId::Elliptic),
            other => Err(FamiliesError::UnknownFamily(other.to_string())),
        }
    }
}
