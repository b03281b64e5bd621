//! Exact representation theory of the order-32 group: character table,
//! explicit irreducible matrices, induced characters of the two index-8
//! subgroups, adapted idempotent bases, and the four-parameter family of
//! intertwining (transplantation) matrices between the coset modules.

mod chars;
mod exact;
mod intertwine;

pub use chars::{
    character_table, format_table, induced_character, irreducible_matrices, permutation_matrices,
    CharacterTable, ClassFunction, IrrepMatrices, IrrepName,
};
pub use exact::{denominator_lcm, q, qi, qr, QIMat, QMat, Q, QI};
pub use intertwine::{
    h_basis, idempotent_basis, intertwiner_from_bases, intertwiner_space, isotypic_projection,
    transplant_params_of, transplantation_matrix, IdempotentBasis, IntertwinerBasis, PermRep,
    TransplantMatrix,
};
