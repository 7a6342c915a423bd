//! Scwols, complexes of finite groups, links and local developments, and
//! builders for the A2 and C2 complexes.

mod builders;
mod complex;
mod iso;
mod links;
mod scwol;

use thiserror::Error;

use crate::group::GroupError;
use crate::homology::{smith_normal_form, AbelianGroupDescription, IntegerMatrix};
use crate::presentation::PresentationError;
use crate::singer::SingerError;

pub use builders::{
    build_a2_complex, build_c2_one_panel_complex, build_c2_two_panel_complex, ComplexKind,
};
pub use complex::{edge_generator_name, fundamental_group_presentation, ComplexOfGroups};
pub use iso::{scwol_iso, ScwolIsomorphism};
pub use links::{local_development, lower_link, upper_link};
pub use scwol::{Scwol, ScwolBuilder, ScwolEdge, ScwolError};

#[derive(Debug, Error)]
pub enum CogError {
    #[error("{groups} vertex groups for {vertices} vertices")]
    VertexCount { groups: usize, vertices: usize },
    #[error("{morphisms} morphisms for {edges} edges")]
    EdgeCount { morphisms: usize, edges: usize },
    #[error("generator `{0}` appears in two vertex groups")]
    DuplicateGenerator(String),
    #[error("morphism on edge `{0}` has the wrong shape")]
    BadMorphism(String),
    #[error("morphism on edge `{0}` is not a homomorphism")]
    NotHomomorphism(String),
    #[error("morphism on edge `{0}` is not injective")]
    NotInjective(String),
    #[error("twist on non-composable pair ({0}, {1})")]
    TwistNotComposable(usize, usize),
    #[error("twist word on ({0}, {1}) is not a word in the target group")]
    BadTwist(usize, usize),
    #[error("twist on ({0}, {1}) is incompatible with the morphisms")]
    Incompatible(usize, usize),
    #[error("cocycle condition fails on ({0}, {1}, {2})")]
    Cocycle(usize, usize, usize),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("not a maximal spanning tree: {0}")]
    NotASpanningTree(String),
    #[error("the upper link at `{0}` has dimension above one")]
    LinkTooDeep(String),
    #[error("difference set moduli {found:?} do not all equal {expected}")]
    ModulusMismatch { expected: u64, found: Vec<u64> },
    #[error("quadrangle orders {0} and {1} differ from q")]
    OrderMismatch(u64, u64),
    #[error("labelling is not a bijection onto the line representatives: {0}")]
    BadBijection(String),
    #[error(transparent)]
    Scwol(#[from] ScwolError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Singer(#[from] SingerError),
}

/// Integral homology of the geometric realisation of a scwol, one group per
/// degree `0..=dimension`.
///
/// The `k`-simplices are the chains `v_0 <- v_1 <- ... <- v_k` of composable
/// edges. Face `m` deletes `v_m`: the outer faces drop the first or last
/// edge, inner faces compose the two edges meeting at `v_m`.
pub fn scwol_homology(s: &Scwol) -> Vec<AbelianGroupDescription> {
    let dim = s.dimension();
    let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for k in 1..=dim {
        simplices.push(s.chains(k));
    }
    let size = |k: usize| {
        if k == 0 {
            s.num_vertices()
        } else {
            simplices[k].len()
        }
    };
    // boundary[k] maps C_k to C_{k-1}, as a (size(k-1) x size(k)) matrix.
    let mut ranks = vec![0usize; dim + 2];
    let mut torsion: Vec<Vec<num_bigint::BigInt>> = vec![Vec::new(); dim + 2];
    for k in 1..=dim {
        let index: std::collections::HashMap<&[usize], usize> = simplices[k - 1]
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_slice(), i))
            .collect();
        let mut m = IntegerMatrix::zeros(size(k - 1), size(k));
        for (col, chain) in simplices[k].iter().enumerate() {
            for face in 0..=k {
                let row = if k == 1 {
                    let e = chain[0];
                    if face == 0 {
                        s.terminal(e)
                    } else {
                        s.initial(e)
                    }
                } else {
                    let f: Vec<usize> = if face == 0 {
                        chain[1..].to_vec()
                    } else if face == k {
                        chain[..k - 1].to_vec()
                    } else {
                        let mut f = chain[..face - 1].to_vec();
                        f.push(s.compose(chain[face], chain[face - 1]).expect("composable chain"));
                        f.extend_from_slice(&chain[face + 1..]);
                        f
                    };
                    index[f.as_slice()]
                };
                let sign = if face % 2 == 0 { 1 } else { -1 };
                let v = m.get(row, col) + sign;
                m.set(row, col, v);
            }
        }
        let snf = smith_normal_form(&m);
        ranks[k] = snf.rank();
        torsion[k - 1] = snf
            .diagonal
            .iter()
            .filter(|d| **d > num_bigint::BigInt::from(1))
            .cloned()
            .collect();
    }
    (0..=dim)
        .map(|k| {
            let free = size(k) - ranks[k] - ranks[k + 1];
            AbelianGroupDescription::from_cyclic_orders(free, &torsion[k])
        })
        .collect()
}
