//! Dilation generators, commutator forms and the closed-form commutators.

mod analytic;
mod conjugate;
mod mourre;
mod quadrature;

pub use analytic::{
    analytic_commutator_apply, analytic_commutator_form, lattice_commutator_form,
    nested_second_commutator_form, second_commutator_apply, second_commutator_form,
    CommutatorFormula,
};
pub use conjugate::{
    apply_conjugate, apply_conjugate_with, commutator_expectation, commutator_form,
    commutator_form_op, ConjugateScope, ConjugateSpec, BOUNDARY_TOLERANCE, INTERIOR_FRACTION,
};
pub use mourre::{mourre_report, MourreOptions, MourreReport, MourreSample};
pub use quadrature::{continuum_edge, integrate, sqrt_lemma_eval};
