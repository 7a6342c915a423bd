//! Finite geometries, complexes of groups and presentations of
//! panel-regular lattices in affine buildings of types A2 and C2.
//!
//! The crate builds classical projective planes with their Singer cycles and
//! slanted symplectic quadrangles, assembles the complexes of groups whose
//! fundamental groups are the lattices, reads presentations off them, and
//! computes the finite invariants: first homology, kernels of difference
//! matrices, rational Betti numbers of quotients and level-2 Hjelmslev
//! planes.

pub mod cog;
pub mod ffield;
pub mod geometry;
pub mod group;
pub mod hjelmslev;
pub mod homology;
pub mod lattices;
pub mod presentation;
pub mod report;
pub mod singer;

pub use cog::{
    build_a2_complex, build_c2_one_panel_complex, build_c2_two_panel_complex,
    fundamental_group_presentation, local_development, lower_link, scwol_iso, upper_link,
    CogError, ComplexKind, ComplexOfGroups, Scwol, ScwolBuilder,
};
pub use ffield::{make_field, FieldElement, FieldError, FieldSpec, MAX_FIELD_ORDER};
pub use geometry::{verify_generalized_ngon, GeometryError, IncidenceStructure};
pub use group::{FiniteGroup, GroupError};
pub use hjelmslev::{
    choose_m, cmsz_counts, qp_discrimination, substructure_closure, HjelmslevError,
    HjelmslevPlane,
};
pub use homology::{
    h1_of_presentation, is_perfect, kernel_mod_n, rational_betti_from_quotient,
    smith_normal_form, AbelianGroupDescription, IntegerMatrix,
};
pub use lattices::{
    a2_cyclic_lattice, a2_general_lattice, building_graph_template, c2_one_panel_lattice,
    c2_two_panel_lattice, BuildingGraphTemplate, LatticeError, LatticeFamily, LatticeSpec,
};
pub use presentation::{Presentation, PresentationError, Word};
pub use report::{Status, VerificationReport};
pub use singer::{
    classical_plane, extract_difference_set, slanted_quadrangle, verify_planar_difference_set,
    LineLabel, OrderedDifferenceSet, SingerError, SingerPlane, SymplecticQuadrangleBundle,
};
