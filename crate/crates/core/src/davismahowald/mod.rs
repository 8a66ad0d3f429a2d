//! The Davis–Mahowald machinery over A(1).

pub mod complex;
pub mod injective;
pub mod lifting;
pub mod polynomial;
pub mod spectral;

pub use complex::{build_dm_complex, DmComplex, DmStage, SummandType};
pub use injective::{build_injective, injective_generators, InjectiveResolution, InjectiveStage};
pub use lifting::{lift_check, sq4_solver, LiftEvidence, LiftOutcome, LiftVerdict, Sq4Result};
pub use polynomial::build_n;
pub use spectral::{
    d2, e1_page, e3_page, localized_ext, seagull_localized_ext, D2Map, D2Pair, DualQ0Homology, E1Record, E3Page,
    LocalizedE1, LocalizedExt,
};
