//! Exact symbolic layer for isoparametric curvature identities.
//!
//! Everything here is computed over arbitrary-precision rationals: univariate
//! polynomials in a curvature symbol `K` ([`ratpoly::RatPoly`]), trigonometric
//! polynomials in a phase angle reduced modulo sin^2 = 1 - cos^2
//! ([`trig::TrigPoly`]/[`trig::TrigRational`]), the compatibility expression
//! built from a candidate pair (F, G) ([`eisenhart`]), and its
//! denominator-cleared normal form with exact root analysis ([`obstruction`]).

pub mod eisenhart;
pub mod obstruction;
pub mod ratpoly;
pub mod roots;
pub mod trig;

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    /// The cleared expression's denominator was not a rational multiple of a
    /// cosine power; the candidate data fall outside the supported family.
    DenominatorNotCosPower,
    /// A sine-odd or odd-cosine term survived reduction; the candidate data
    /// are not phase-reversal symmetric.
    OddSinePartSurvives,
    /// Root finding needs an irreducible factor of the given degree resolved,
    /// which exceeds the exact quadratic logic implemented here.
    RootsUnresolved(usize),
}

impl fmt::Display for SymbolicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicError::DenominatorNotCosPower => {
                write!(f, "denominator is not a rational multiple of a cosine power")
            }
            SymbolicError::OddSinePartSurvives => {
                write!(f, "reduction left an odd trigonometric part")
            }
            SymbolicError::RootsUnresolved(d) => {
                write!(f, "cannot resolve roots of an irreducible degree-{d} factor exactly")
            }
        }
    }
}

impl std::error::Error for SymbolicError {}
