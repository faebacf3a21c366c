//! Mordell-Tornheim series
//! `sum a_1(m_1)...a_r(m_r) / (m_1^{s_1}...m_r^{s_r} (m_1+...+m_r)^{s_{r+1}})`
//! and the constructions built on them.

mod coeffs;
mod conv;
mod direct;
mod fseries;
mod mb;
mod modified;
mod region;

pub use coeffs::{CoefficientSequence, Pole};
pub use direct::{
    mt_direct, mt_direct_with_budget, SeriesTruncation, DEFAULT_TERM_BUDGET, REGION_MARGIN,
};
pub use region::{in_convergence_region, MtPoint, RegionCheck, MAX_DEPTH};
pub use mb::{mb_window, mt_eval, mt_via_mb, mt_via_mb_continued, MbEvaluation, MtRoute, MtValue};
pub use conv::{convolved_coefficient, sigma_mt, sigma_mt_common, ConvolutionTable};
pub use fseries::{f_series, f_series_continued};
pub use modified::{big_g_modified, g_modified, modified_gamma_factor, ModifiedValue};
