//! Exact cover by 3-sets and the control instances built from it.
//!
//! Every builder turns a restricted exact-cover instance into a control
//! query whose answer is "yes" exactly when a cover exists. They double as a
//! corpus of adversarial instances for the solvers.

mod builders;
mod rx3c;

pub use builders::{
    build, build_greedyav_ccac, build_greedyav_ccdc, build_greedyav_dcac, build_greedyav_dcdc, build_phragmen_ccac,
    build_phragmen_ccdc, build_phragmen_dcac, build_phragmen_dcdc, Construction, Reduction,
};
pub use rx3c::{planted_cover, random_rx3c, random_without_cover, rx3c_has_exact_cover, Rx3cError, Rx3cInstance};
