use std::collections::HashMap;

use super::complex::ComplexOfGroups;
use super::scwol::{Scwol, ScwolBuilder};
use super::CogError;

/// The upper link `Lk_v`: one vertex per pair (left coset of
/// `psi_a(G_{i(a)})` in `G_v`, edge `a` into `v`), and one edge per pair
/// (left coset `C` of `psi_ab(G_{i(b)})`, composable `(a, b)` with
/// `t(a) = v`), running from `(C, ab)` to the `psi_a`-coset containing
/// `g g_{a,b}^-1` for any `g` in `C`.
///
/// Only links of dimension at most one are produced; a composable triple
/// ending at `v` yields [`CogError::LinkTooDeep`].
pub fn upper_link(c: &ComplexOfGroups, v: usize) -> Result<Scwol, CogError> {
    let s = c.scwol();
    let gv = c.group(v);
    let incoming = s.edges_into(v);
    for &(a, b, _) in s.composable_pairs() {
        if s.terminal(a) == v && !s.edges_into(s.initial(b)).is_empty() {
            return Err(CogError::LinkTooDeep(s.vertex_name(v).to_string()));
        }
    }
    let mut builder = ScwolBuilder::new();
    // For each incoming edge a: the coset index of every element of G_v and
    // the vertex id of every coset.
    let mut coset_of: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut vertex_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut cosets_of_edge: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
    for &a in incoming {
        let cosets = gv.left_cosets(&c.psi_image(a));
        let mut idx = vec![0usize; gv.order()];
        for (k, coset) in cosets.iter().enumerate() {
            for &x in coset {
                idx[x] = k;
            }
            let id = builder.vertex(format!("{}#{}", s.edge(a).name, coset[0]));
            vertex_of.insert((a, k), id);
        }
        coset_of.insert(a, idx);
        cosets_of_edge.insert(a, cosets);
    }
    for &(a, b, ab) in s.composable_pairs() {
        if s.terminal(a) != v {
            continue;
        }
        let g_ab = gv.inv(c.twist(a, b));
        for (k, coset) in cosets_of_edge[&ab].iter().enumerate() {
            let g = coset[0];
            let source = vertex_of[&(ab, k)];
            let target_coset = coset_of[&a][gv.mul(g, g_ab)];
            let target = vertex_of[&(a, target_coset)];
            builder.edge(
                format!("{}|{}#{}", s.edge(a).name, s.edge(b).name, g),
                source,
                target,
            );
        }
    }
    Ok(builder.build()?)
}

/// The lower link `Lk^v`: vertices are the edges leaving `v`, edges the
/// composable pairs `(a, b)` with `i(b) = v`, running from `b` to `ab`.
pub fn lower_link(s: &Scwol, v: usize) -> Result<Scwol, CogError> {
    let mut builder = ScwolBuilder::new();
    let mut vertex_of = HashMap::new();
    for &a in s.edges_from(v) {
        vertex_of.insert(a, builder.vertex(s.edge(a).name.clone()));
    }
    let mut edge_of = HashMap::new();
    for &(a, b, ab) in s.composable_pairs() {
        if s.initial(b) != v {
            continue;
        }
        let id = builder.edge(
            format!("{}|{}", s.edge(a).name, s.edge(b).name),
            vertex_of[&b],
            vertex_of[&ab],
        );
        edge_of.insert((a, b), id);
    }
    // (a, bc) after (b, c) composes to (ab, c).
    for &(b, c, bc) in s.composable_pairs() {
        if s.initial(c) != v {
            continue;
        }
        for &(a, b2, ab) in s.composable_pairs() {
            if b2 == b {
                builder.compose(edge_of[&(a, bc)], edge_of[&(b, c)], edge_of[&(ab, c)]);
            }
        }
    }
    Ok(builder.build()?)
}

/// `Lk_v * {v} * Lk^v`, with join edges running from the upper link to `v`
/// and from `v` to the lower link.
pub fn local_development(c: &ComplexOfGroups, v: usize) -> Result<Scwol, CogError> {
    let upper = upper_link(c, v)?;
    let lower = lower_link(c.scwol(), v)?;
    let centre = Scwol::point(c.scwol().vertex_name(v));
    Ok(upper.join(&centre).join(&lower))
}
