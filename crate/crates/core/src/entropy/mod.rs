//! Perelman F- and W-functionals for the Setler system.
//!
//! Where a reference closed form exists it is reported next to an
//! independent quadrature and a Monte-Carlo estimate, with a flag when
//! the reference value and the quadrature disagree.

pub mod closed_form;
pub mod functional;
pub mod wfunc;

pub use closed_form::{
    closed_form_alpha, closed_form_delta, closed_form_r, closed_form_residual, ClosedFormParams, ClosedFormValue,
    ResidualReport, ResidualTarget,
};
pub use functional::{
    f_functional_gaussian, f_functional_gaussian_with, f_functional_perturbed, f_functional_perturbed_with,
    f_functional_quadratic, f_functional_quadratic_with, EntropySpec, FunctionalResult, GaussianProfile,
};
pub use wfunc::{entropy_growth_rate, pre_suppression_window, w_functional, w_series, WEvaluation};
