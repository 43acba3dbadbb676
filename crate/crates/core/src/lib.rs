//! Monte Carlo engine and analysis tools for constrained volume-difference
//! site percolation on the periodic square lattice.
//!
//! Every site gets one attempt to open, in uniformly random order. A site
//! opens when the two largest distinct clusters touching it differ in volume
//! by at least `r`, or when it touches at most one cluster. With `r = 0` this
//! is ordinary site percolation.
//!
//! ```
//! use volperc::{Engine, ModelParams};
//!
//! let mut engine = Engine::new(ModelParams::new(32, 1).with_seed(7));
//! let record = engine.run_indexed(0);
//! assert!(record.final_stats.rho() > 0.9);
//! ```
//!
//! The layers are
//!
//! * [`lattice`]: torus geometry and the union-find forest with wrap
//!   detection,
//! * [`dynamics`]: the opening rule and single runs,
//! * [`ensemble`]: Q-curves, the binomial convolution and the scaling fits,
//! * [`oracle`]: brute-force references for testing,
//! * [`job`] and [`io`]: parallel sweeps and their text file formats.

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod job;
pub mod lattice;
pub mod oracle;

pub use dynamics::{
    adjacent_top2, attempt_open, final_stats, run_sweep, Attempt, AttemptSchedule, Engine, FinalStats, Mode,
    ModelParams, RunRecord,
};
pub use ensemble::{
    convolve, fit_nu, fit_tc, max_slope, mean_percolation_time, CanonicalCurve, FssFit, QCurve, StatsAccumulator,
};
pub use error::{Error, Result};
pub use lattice::{ClusterForest, Direction, Displacement, LatticeGeometry, WrapEvent};
