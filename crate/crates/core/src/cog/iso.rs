use std::collections::HashMap;

use super::scwol::Scwol;

/// A scwol isomorphism as vertex and edge permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScwolIsomorphism {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl ScwolIsomorphism {
    /// Confirms that the maps are bijections commuting with `i`, `t` and
    /// composition.
    pub fn is_valid(&self, a: &Scwol, b: &Scwol) -> bool {
        let bij = |m: &[usize], n: usize| {
            let mut seen = vec![false; n];
            m.len() == n && m.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
        };
        if !bij(&self.vertices, b.num_vertices()) || !bij(&self.edges, b.num_edges()) {
            return false;
        }
        (0..a.num_edges()).all(|e| {
            let f = self.edges[e];
            b.initial(f) == self.vertices[a.initial(e)] && b.terminal(f) == self.vertices[a.terminal(e)]
        }) && a
            .composable_pairs()
            .iter()
            .all(|&(x, y, xy)| b.compose(self.edges[x], self.edges[y]) == Some(self.edges[xy]))
    }
}

fn multiplicities(s: &Scwol) -> HashMap<(usize, usize), Vec<usize>> {
    let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, e) in s.edges().iter().enumerate() {
        m.entry((e.source, e.target)).or_default().push(k);
    }
    m
}

/// Searches for an isomorphism by backtracking over vertices in
/// breadth-first order, pruning on in/out degree and edge multiplicities,
/// then matching parallel edges so that composition is respected.
pub fn scwol_iso(a: &Scwol, b: &Scwol) -> Option<ScwolIsomorphism> {
    if a.num_vertices() != b.num_vertices()
        || a.num_edges() != b.num_edges()
        || a.composable_pairs().len() != b.composable_pairs().len()
        || a.degree_profile() != b.degree_profile()
    {
        return None;
    }
    let n = a.num_vertices();
    let ma = multiplicities(a);
    let mb = multiplicities(b);
    let degree = |s: &Scwol, v: usize| (s.edges_into(v).len(), s.edges_from(v).len());

    // Most-constrained order: always take the vertex with the most already
    // ordered neighbours, so incidences are checked as early as possible.
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            a.edges_into(v)
                .iter()
                .map(|&e| a.initial(e))
                .chain(a.edges_from(v).iter().map(|&e| a.terminal(e)))
                .collect()
        })
        .collect();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut weight = vec![0usize; n];
    while order.len() < n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .expect("unplaced vertex");
        placed[v] = true;
        order.push(v);
        for &w in &neighbours[v] {
            weight[w] += 1;
        }
    }

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let count = |m: &HashMap<(usize, usize), Vec<usize>>, u: usize, v: usize| m.get(&(u, v)).map_or(0, Vec::len);

    fn search(
        depth: usize,
        order: &[usize],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        consistent: &dyn Fn(&[usize], usize, usize) -> bool,
        finish: &mut dyn FnMut(&[usize]) -> Option<Vec<usize>>,
    ) -> Option<Vec<usize>> {
        if depth == order.len() {
            return finish(map);
        }
        let v = order[depth];
        for w in 0..map.len() {
            if used[w] || !consistent(map, v, w) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if let Some(e) = search(depth + 1, order, map, used, consistent, finish) {
                return Some(e);
            }
            map[v] = usize::MAX;
            used[w] = false;
        }
        None
    }

    let consistent = |map: &[usize], v: usize, w: usize| {
        if degree(a, v) != degree(b, w) {
            return false;
        }
        for (u, &mu) in map.iter().enumerate() {
            if mu == usize::MAX {
                continue;
            }
            if count(&ma, u, v) != count(&mb, mu, w) || count(&ma, v, u) != count(&mb, w, mu) {
                return false;
            }
        }
        true
    };
    let mut finish = |map: &[usize]| match_edges(a, b, map, &ma, &mb);
    let edges = search(0, &order, &mut map, &mut used, &consistent, &mut finish)?;
    let iso = ScwolIsomorphism {
        vertices: map,
        edges,
    };
    debug_assert!(iso.is_valid(a, b));
    Some(iso)
}

/// Given a vertex bijection, assigns parallel edges so that composition is
/// preserved. Parallel classes are matched by backtracking.
fn match_edges(
    a: &Scwol,
    b: &Scwol,
    vmap: &[usize],
    ma: &HashMap<(usize, usize), Vec<usize>>,
    mb: &HashMap<(usize, usize), Vec<usize>>,
) -> Option<Vec<usize>> {
    let mut emap = vec![usize::MAX; a.num_edges()];
    let mut classes: Vec<(&Vec<usize>, &Vec<usize>)> = Vec::new();
    let mut keys: Vec<&(usize, usize)> = ma.keys().collect();
    keys.sort();
    for key in keys {
        let ea = &ma[key];
        let eb = mb.get(&(vmap[key.0], vmap[key.1]))?;
        if ea.len() != eb.len() {
            return None;
        }
        if ea.len() == 1 {
            emap[ea[0]] = eb[0];
        } else {
            classes.push((ea, eb));
        }
    }
    let check = |emap: &[usize]| {
        a.composable_pairs().iter().all(|&(x, y, xy)| {
            let (fx, fy, fxy) = (emap[x], emap[y], emap[xy]);
            fx == usize::MAX || fy == usize::MAX || fxy == usize::MAX || b.compose(fx, fy) == Some(fxy)
        })
    };
    if !check(&emap) {
        return None;
    }
    fn assign(
        ci: usize,
        classes: &[(&Vec<usize>, &Vec<usize>)],
        emap: &mut Vec<usize>,
        check: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if ci == classes.len() {
            return true;
        }
        let (ea, eb) = classes[ci];
        let mut used = vec![false; eb.len()];
        fn place(
            i: usize,
            ci: usize,
            ea: &[usize],
            eb: &[usize],
            used: &mut Vec<bool>,
            classes: &[(&Vec<usize>, &Vec<usize>)],
            emap: &mut Vec<usize>,
            check: &dyn Fn(&[usize]) -> bool,
        ) -> bool {
            if i == ea.len() {
                return assign(ci + 1, classes, emap, check);
            }
            for j in 0..eb.len() {
                if used[j] {
                    continue;
                }
                emap[ea[i]] = eb[j];
                used[j] = true;
                if check(emap) && place(i + 1, ci, ea, eb, used, classes, emap, check) {
                    return true;
                }
                used[j] = false;
                emap[ea[i]] = usize::MAX;
            }
            false
        }
        place(0, ci, ea, eb, &mut used, classes, emap, check)
    }
    assign(0, &classes, &mut emap, &check).then_some(emap)
}
