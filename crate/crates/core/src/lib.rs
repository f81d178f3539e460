//! Spectral estimation of the small-jump density of a Lévy process from discrete increments.
//!
//! Increments `X_{jΔ} - X_{(j-1)Δ}` of a tempered stable Lévy process are split into a
//! small-jump part `Z_Δ` (jumps of size at most `ε`), a compound Poisson big-jump part and an
//! optional Brownian part.  The crate estimates the density `g_Δ` of `Z_Δ` by dividing the
//! empirical characteristic function by the known CF of the nuisance parts and inverting it
//! with a spectral cutoff `m`, which can be chosen by penalized contrast.
//!
//! The runnable programs in `examples/` are the primary tour of the API:
//!
//! | example | capability |
//! |---|---|
//! | `sample_increments` | seeded samplers and the sample CSV format |
//! | `characteristic_functions` | exact, empirical and deconvolved CFs |
//! | `estimate_density` | the three estimators against the benchmark |
//! | `adaptive_cutoff` | penalized contrast selection and its trace |
//! | `theoretical_bounds` | bias and variance bounds, the optimal cutoff |
//! | `monte_carlo_cell` | one Monte Carlo cell with risk summary |
//! | `reproduce_table` | a full table with reference values and z-scores |
//! | `rate_study` | risk against sample size at the oracle cutoff |
//! | `plot_data` | estimate and benchmark curves as CSV for plotting |
//!
//! ```
//! use smalljumps::prelude::*;
//!
//! let params = TemperedStableParams::stable(1.0, 1.0, 1.1).unwrap();
//! let config = ProcessConfig::jumps_only(params, 0.1, 500).unwrap();
//! let sample = sample_full_increments(&config, 7).unwrap();
//! let grid = XGrid::centered(0.0, 3.0, 257).unwrap();
//! let est = estimate_known_noise(&sample, 10.0, &grid).unwrap();
//! assert_eq!(est.values.len(), 257);
//! ```

pub mod charfn;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod models;
pub mod quadrature;
pub mod sampling;
pub mod selection;
pub mod special;

pub use error::{Error, Result};

/// Frequently used items.
pub mod prelude {
    pub use crate::charfn::{
        cf_big_jumps, cf_gaussian, cf_small_jumps, deconvolved_cf, empirical_cf, CfGrid, LevyExponent, ProcessCf,
    };
    pub use crate::error::{Error, Result};
    pub use crate::estimators::{
        benchmark_density, estimate_direct, estimate_gaussian_noise, estimate_known_noise, fourier_invert,
        relative_l2_error, theoretical_bounds, BoundReport, EstimatorKind, SpectralEstimate, XGrid,
    };
    pub use crate::experiments::{
        rate_study, reproduce_table, run_monte_carlo, CutoffMode, ExperimentSpec, MonteCarlo, RateStudySpec, RiskReport,
        TableId,
    };
    pub use crate::models::{
        big_jump_intensity, levy_density, orey_constants, small_jump_drift, ProcessConfig, TemperedStableParams,
    };
    pub use crate::sampling::{
        sample_big_jump_increments, sample_full_increments, sample_small_jump_increments, sample_stable_increments,
        sample_tempered_stable_increments, CpOptions, IncrementSample, Seed,
    };
    pub use crate::selection::{contrast, penalty, select_cutoff, CutoffGrid, SelectionPlan, SelectionTrace};
}
