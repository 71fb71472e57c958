//! Permanents and the bounds around them: Ryser's formula, product
//! polynomials, capacity, the van der Waerden and Gurvits bounds, Brégman's
//! bound, monotone-column permanents and trace-power coefficients.

mod bounds;
mod capacity;
mod permanent;

pub use bounds::{
    bmv_coeffs, bregman_bound, gurvits_bound, mmcpt_check, mmcpt_poly, BmvReport, BregmanReport, GurvitsReport,
    MmcptCheck, MmcptReport, BMV_MAX_N, BMV_MAX_SIZE, BREGMAN_MAX_N, GURVITS_MAX_N, MMCPT_MAX_N, MMCPT_MULTI_MAX_N,
};
pub use capacity::{
    capacity, capacity_descent_pair, capacity_of_matrix, descent_factor, CapacityResult, DescentReport, LogPosynomial,
    ProductForm, DEFAULT_CAPACITY_TOL,
};
pub use permanent::{
    birkhoff_mixture, doubly_stochastic_check, permanent_naive, permanent_ryser, product_poly,
    sinkhorn_doubly_stochastic, vdw_bound, NAIVE_MAX_N, PRODUCT_POLY_MAX_N, RYSER_MAX_N,
};
