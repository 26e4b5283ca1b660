//! Assembly of the multi-patch dG bilinear form and load vector.
//!
//! With jump `[v] = v_left - v_right`, average `{w} = (w_left + w_right) / 2`
//! and `n` pointing from left to right (single traces on boundary faces):
//!
//! ```text
//! a_h(u, v) = sum_i alpha_i (grad u, grad v)_{Omega_i}
//!           - sum_F ({alpha grad u} . n, [v])_F
//!           - sum_F ({alpha grad v} . n, [u])_F                  (SIP only)
//!           + sum_F (mu alpha_l / h_l + mu alpha_r / h_r) ([u], [v])_F
//! l(v)      = (f, v) + sum_B (mu alpha / h) (u_D, v)_B
//!           - sum_B (alpha grad v . n, u_D)_B                     (SIP only)
//! ```
//!
//! Each interface is visited once. Element contributions are computed in
//! parallel but always reduced in (patch, element) order, so the assembled
//! matrix does not depend on the thread count.

mod config;
mod eval;
mod forms;
mod pattern;

pub use config::{DgConfig, Scheme};
pub use eval::{element_dofs, evaluate_basis, PointData};
pub use forms::{assemble, probe_coercivity, Assembler, DgSystem, DofMap, PatchField};
