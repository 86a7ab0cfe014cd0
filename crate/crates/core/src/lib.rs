//! Gamma-index tests of local and global spatial association for
//! multivariate panel data.
//!
//! The local index at vertex `i` is `γ_i = Σ_j w_{ij} λ(y_i, y_j)` for a
//! binary weight graph `W` and a similarity `λ` (multivariate Moran, Geary
//! ℓ¹/ℓ², or binary sign association). P-values come from closed-form
//! bounds on the conditional permutation distribution; a Monte Carlo and an
//! exhaustive permutation engine are provided to check them.
//!
//! ```
//! use spgamma::{lisa, local_pvalues, PanelMatrix, Statistic, WeightGraph};
//!
//! let g = WeightGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
//! let y = PanelMatrix::from_rows(&[vec![1.0, 3.0, 2.0]]).unwrap();
//! let lv = lisa(&Statistic::Moran.kernel(), &y, &g).unwrap();
//! assert_eq!(lv.gamma, vec![-1.0, -1.0, 0.0]);
//! let report = local_pvalues(&lv, &g).unwrap();
//! assert!(report.p_raw.iter().all(|p| (0.0..=1.0).contains(p)));
//! ```

pub mod error;
pub mod fdr;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod lisa;
pub mod metrics;
pub mod panel;
pub mod permutation;
pub mod pvalue;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
pub use fdr::{bh_adjust, spatial_bh_adjust, FdrMode, SignificanceTable};
pub use graph::{GridSpec, WeightGraph};
pub use kernel::{similarity, GearyNorm, PreparedKernel, SimilarityKernel, Statistic};
pub use linalg::MetricMatrix;
pub use lisa::{gisa, lisa, GisaValue, LisaVector};
pub use metrics::AgreementTable;
pub use panel::PanelMatrix;
pub use permutation::{exact_local_pvalues, mc_global_pvalue, mc_local_pvalues};
pub use pvalue::{
    global_pvalue, local_pvalues, local_pvalues_with, BoundConfig, BoundKind, GlobalPValueReport,
    LocalPValueReport,
};
pub use sim::{power_curve, sample_grid_gaussian, PowerCurve, PowerMode, SimConfig};
pub use special::{reg_inc_beta, upper_reg_gamma};
