//! Entanglement witnesses and the hierarchy built on them.
//!
//! Hermitian operators on a bipartite space are sorted into separable
//! states, entangled states, entanglement witnesses and non-block-positive
//! operators. Entangled states are split by their best separable
//! approximation into a separable part and an optimal entangled remainder,
//! which labels their family; families and the finer preorder describe
//! which states detect more witnesses.

pub mod bsa;
pub mod ces;
pub mod error;
pub mod linops;
pub mod order;
pub mod product_search;
pub mod states;
pub mod witness;

pub use bsa::{
    best_product_subtraction, bsa_decompose, is_optimal_entangled, max_subtractable_weight,
    range_product_search, BsaOptions, BsaResult, OptimalityOptions, OptimalityReport, RangeSearch,
};
pub use ces::{is_ces, max_ces_dim, random_state_on, subspace_contains_product, Subspace};
pub use error::{Error, Result};
pub use linops::{eig_hermitian, hs_inner, kron, partial_transpose, pinv, pt, CMatrix, CVector, Dims, Hermitian, C64};
pub use order::{
    common_detected_witness, delta_hat, family_of, is_finer, lemma2_decompose, mixture_line_scan,
    same_family, CommonWitness, FamilyId, FinerOptions, FinerRelation, FinerVerdict,
};
pub use product_search::SearchOptions;
pub use states::{
    bell, bell_vector, eta, is_ppt, is_separable, make_density, mix, werner, Bell, DensityMatrix,
    ProductDecomposition, ProductVector, SeparabilityOptions, SeparabilityVerdict,
};
pub use witness::{
    classify, decompose_witness, higher_level_witness_for, is_block_positive, min_product_expectation,
    sample_detecting_witnesses, witness_for_state, Classification, ClassifyOptions, DecomposabilityVerdict,
    DecomposeOptions, HierarchyClass, ProductMinimum, WitnessSample,
};
