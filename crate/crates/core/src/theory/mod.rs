//! Distribution theory for the Rao and GLRT detectors.

pub mod imhof;
pub mod moments;
pub mod ncx2;
pub mod performance;
pub mod qfunc;
pub mod quadrature;

pub use imhof::{imhof_ccdf, ChiSquareTerm, WeightedChiSquareSpec};
pub use moments::{gaussian_moments, symmetric_eigen2, weighted_spec_from_moments, GaussianApprox};
pub use ncx2::{central_chi2_ccdf, noncentral_chi2_ccdf, noncentral_chi2_cdf};
pub use performance::{
    fim_infbit_block, fim_onebit_null, glrt_noncentrality, glrt_pd, glrt_pd_averaged, loss_db,
    lowsnr_noncentrality, rao_pd_imhof, rao_pd_imhof_averaged, rao_pd_lowsnr, rao_pd_lowsnr_averaged,
    rao_pfa, rao_threshold, sample_compensation_factor, RaoImhofModel,
};
pub use qfunc::{log_q, normal_pdf, q_function};
