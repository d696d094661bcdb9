//! Boundary relations and the classification of extensions of `H_0`.

mod extension;
mod field;
mod maximal;
mod relation;
mod triple;

pub use extension::{
    assemble_hr, assemble_hr_with, boundary_operator_top, classify_selfadjoint, default_lambda, hr_resolvent, hr_resolvent_with, m_operator, relation_constraint,
    ClassificationVerdict,
};
pub use field::{assemble_h01, boundary_operator, field, field_with, Field};
pub use maximal::{assemble_hm, green_form_defect, MaximalOperator};
pub use relation::LinearRelation;
pub use triple::{qbt_verify, qbt_verify_ibc, qbt_verify_robin};

#[cfg(test)]
mod tests;
