//! Work statistics of sudden quenches between random Hamiltonians drawn from
//! the Gaussian orthogonal, unitary and symplectic ensembles.

pub mod analytic;
pub mod config;
pub mod ensembles;
pub mod error;
pub mod histogram;
pub mod io;
pub mod quench;
pub mod spectra;
pub mod validate;
pub mod workstats;

pub use analytic::{g_beta0, g_betainf, g_ensemble, p_w_predicted, peak_width, PeakRegime, QuenchParams};
pub use ensembles::{sample_matrix, EnsembleSpec, HermitianMatrix, SymmetryClass};
pub use error::{Error, Result};
pub use quench::{ergodicity_study, run_ensemble, run_single_draw, QuenchExperiment};
pub use spectra::{eigendecompose, overlap_table, OverlapTable, SpectralData};
pub use workstats::{characteristic_single, work_atoms, CharacteristicCurve, WorkAtoms};
