use std::path::Path;

use panel_lattices::ffield::prime_power;
use panel_lattices::hjelmslev::iota_report;
use panel_lattices::homology::a2_kernel_check;
use panel_lattices::homology::c2_h1_check;
use panel_lattices::singer::{canonical_base_flag, MAX_QUADRANGLE_ORDER};
use panel_lattices::*;
use serde_json::{json, Value};

use crate::{presentation_lines, CliError, CommandName, Report, RunConfig, Status};

const PLANE: &str = "projective plane with a regular Singer cycle";
const POLYGON: &str = "generalised polygon axioms";
const DIFFERENCE_SET: &str = "planar difference set of the Singer cycle";
const QUADRANGLE: &str = "slanted symplectic quadrangle with a regular Singer group";
const STABILISER: &str = "line stabilisers in the Singer group";
const LATTICE: &str = "lattice presentation";
const EXTRACTION: &str = "fundamental group of the complex of groups";
const HJELMSLEV: &str = "level-2 Hjelmslev plane";
const SPLITTING: &str = "projection and splitting of the Hjelmslev plane";
const SUBSTRUCTURE: &str = "four-point substructure of the Hjelmslev plane";
const H1: &str = "first homology of the lattice";
const BETTI: &str = "rational homology of the quotient complex";

pub(crate) fn dispatch(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    match cfg.command {
        CommandName::Plane => plane(cfg, rep),
        CommandName::Quadrangle => quadrangle(cfg, rep),
        CommandName::Lattice => {
            let family = cfg
                .family
                .ok_or_else(|| CliError::Invalid("lattice needs --family".into()))?;
            lattice(cfg, family, rep)
        }
        CommandName::Crosscheck => {
            for family in families(cfg) {
                crosscheck(cfg, family, rep)?;
            }
            Ok(())
        }
        CommandName::Hjelmslev => hjelmslev(cfg, rep),
        CommandName::Homology => {
            for family in families(cfg) {
                homology(cfg, family, rep)?;
            }
            Ok(())
        }
        CommandName::All => {
            plane(cfg, rep)?;
            if c2_supported(cfg.q) {
                quadrangle(cfg, rep)?;
            }
            for family in families(cfg) {
                lattice(cfg, family, rep)?;
                crosscheck(cfg, family, rep)?;
            }
            hjelmslev(cfg, rep)?;
            for family in families(cfg) {
                homology(cfg, family, rep)?;
            }
            Ok(())
        }
    }
}

/// The C2 lattices need a Singer group presentation and a non-degenerate
/// quadrangle.
fn c2_supported(q: u64) -> bool {
    q > 2 && q <= MAX_QUADRANGLE_ORDER && matches!(prime_power(q), Some((2, _)) | Some((_, 1)))
}

fn families(cfg: &RunConfig) -> Vec<LatticeFamily> {
    match cfg.family {
        Some(f) => vec![f],
        None if c2_supported(cfg.q) => vec![
            LatticeFamily::A2Cyclic,
            LatticeFamily::C2TwoPanel,
            LatticeFamily::C2OnePanel,
        ],
        None => vec![LatticeFamily::A2Cyclic],
    }
}

/// Writes `text` to the cache directory, or checks it against the cached copy.
fn cache_geometry(cfg: &RunConfig, name: &str, text: &str) -> Result<(), CliError> {
    let Some(dir) = &cfg.cache else {
        return Ok(());
    };
    std::fs::create_dir_all(dir)?;
    let path = Path::new(dir).join(name);
    match std::fs::read_to_string(&path) {
        Ok(cached) if cached == text => Ok(()),
        Ok(_) => Err(CliError::Cache(format!("{} differs from the built geometry", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(std::fs::write(&path, text)?),
        Err(e) => Err(e.into()),
    }
}

fn plane(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let q = cfg.q;
    let plane = classical_plane(q)?;
    cache_geometry(cfg, &format!("pg2-q{q}.txt"), &plane.structure().to_text())?;
    rep.data("plane.modulus", plane.cubic_field().modulus_string().into());
    rep.absorb("plane", PLANE, &plane.verify());
    let c = verify_generalized_ngon(plane.structure(), 3);
    rep.check(
        "plane.generalized-triangle",
        POLYGON,
        c.passed() && c.order == Some((q as usize, q as usize)),
        json!(format!("order {:?}", c.order)),
    );
    let (p, l) = canonical_base_flag(&plane);
    let d = extract_difference_set(&plane, p, l)?;
    rep.absorb("difference-set", DIFFERENCE_SET, &verify_planar_difference_set(&d));
    rep.data(
        "difference-set.value",
        json!({ "modulus": d.modulus(), "entries": d.entries(), "base_point": p, "base_line": l }),
    );
    Ok(())
}

fn quadrangle(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let q = cfg.q;
    let b = singer::slanted_quadrangle(q)?;
    cache_geometry(cfg, &format!("slanted-q{q}.txt"), &b.slanted().to_text())?;
    rep.absorb("quadrangle", QUADRANGLE, &b.verify());
    let c = verify_generalized_ngon(b.slanted(), 4);
    let want = (q as usize - 1, q as usize + 1);
    rep.check(
        "quadrangle.generalized-quadrangle",
        POLYGON,
        c.passed() && c.order == Some(want),
        json!(format!("order {:?}, want {want:?}", c.order)),
    );
    for (label, line) in b.representatives().iter().copied() {
        let brute = b.brute_force_stabilizer(line);
        let computed = b.line_stabilizer(line)?;
        rep.check(
            format!("stabiliser.{label}"),
            STABILISER,
            computed == brute,
            json!(format!("order {}", brute.len())),
        );
        if let Some(formula) = b.prime_formula_stabilizer(label) {
            rep.check(
                format!("stabiliser.{label}.formula"),
                STABILISER,
                formula == brute,
                Value::Null,
            );
        }
    }
    Ok(())
}

fn cyclic_general_inputs(
    q: u64,
    sets: &[OrderedDifferenceSet; 3],
) -> Result<([Presentation; 3], [Vec<Word>; 3]), CliError> {
    let n = (q * q + q + 1) as i64;
    let mut groups = Vec::new();
    let mut orderings = Vec::new();
    for (a, d) in sets.iter().enumerate() {
        groups.push(Presentation::new(vec![format!("s{}", a + 1)], vec![Word::power_of(0, n)])?);
        orderings.push(d.entries().iter().map(|&x| Word::power_of(0, x as i64)).collect());
    }
    Ok((
        groups.try_into().expect("three groups"),
        orderings.try_into().expect("three orderings"),
    ))
}

fn build_spec(cfg: &RunConfig, family: LatticeFamily) -> Result<LatticeSpec, CliError> {
    let q = cfg.q;
    Ok(match family {
        LatticeFamily::A2Cyclic => {
            let [a, b, c] = cfg.difference_sets()?;
            a2_cyclic_lattice(q, &a, &b, &c)?
        }
        LatticeFamily::A2General => {
            let sets = cfg.difference_sets()?;
            let (groups, orderings) = cyclic_general_inputs(q, &sets)?;
            a2_general_lattice(groups, orderings)?
        }
        LatticeFamily::C2TwoPanel => {
            let (l, l2) = cfg.bijections()?;
            c2_two_panel_lattice(q, &l, &l2)?
        }
        LatticeFamily::C2OnePanel => {
            let (l, l2) = cfg.bijections()?;
            c2_one_panel_lattice(q, &l, &l2)?
        }
    })
}

fn build_complex(cfg: &RunConfig, family: LatticeFamily) -> Result<ComplexOfGroups, CliError> {
    let q = cfg.q;
    Ok(match family {
        LatticeFamily::A2Cyclic | LatticeFamily::A2General => {
            let [a, b, c] = cfg.difference_sets()?;
            build_a2_complex(q, &a, &b, &c)?
        }
        LatticeFamily::C2TwoPanel | LatticeFamily::C2OnePanel => {
            let (l, l2) = cfg.bijections()?;
            let b = singer::slanted_quadrangle(q)?;
            if family == LatticeFamily::C2TwoPanel {
                build_c2_two_panel_complex(q, &b, &b, &l, &l2)?
            } else {
                build_c2_one_panel_complex(q, &b, &b, &l, &l2)?
            }
        }
    })
}

fn lattice(cfg: &RunConfig, family: LatticeFamily, rep: &mut Report) -> Result<(), CliError> {
    let spec = build_spec(cfg, family)?;
    let p = spec.presentation();
    rep.push(
        format!("{family}.presentation"),
        LATTICE,
        Status::Pass,
        json!(presentation_lines(p)),
    );
    rep.data(
        format!("{family}.counts"),
        json!({ "generators": p.generators().len(), "relators": p.relators().len(), "instantiates": spec.instantiates() }),
    );
    let template = building_graph_template(&spec);
    rep.data(format!("{family}.template"), json!(template.to_text()));
    Ok(())
}

fn crosscheck(cfg: &RunConfig, family: LatticeFamily, rep: &mut Report) -> Result<(), CliError> {
    let spec = build_spec(cfg, family)?;
    let complex = build_complex(cfg, family)?;
    let tree = complex
        .canonical_tree()
        .ok_or_else(|| CliError::Invalid("complex has no canonical tree".into()))?;
    let extracted = fundamental_group_presentation(&complex, tree)?;
    let same = extracted.equivalent_form(spec.presentation());
    rep.check(
        format!("{family}.extraction-matches-builder"),
        EXTRACTION,
        same,
        json!({ "generators": extracted.generators().len(), "relators": extracted.relators().len() }),
    );
    Ok(())
}

fn hjelmslev(cfg: &RunConfig, rep: &mut Report) -> Result<(), CliError> {
    let q = cfg.q;
    let [a, b, c] = cfg.difference_sets()?;
    let h = HjelmslevPlane::new(q, [&a, &b, &c])?;
    cache_geometry(cfg, &format!("hjelmslev-q{q}.txt"), &h.export()?)?;
    let size = (q * q * (q * q + q + 1)) as usize;
    rep.check(
        "hjelmslev.sizes",
        HJELMSLEV,
        h.points().len() == size && h.lines().len() == size,
        json!({ "points": h.points().len(), "lines": h.lines().len(), "expected": size }),
    );
    rep.absorb("hjelmslev.counts", HJELMSLEV, &cmsz_counts(&h));
    let m = choose_m(h.difference_set(), h.modulus())?;
    rep.absorb("hjelmslev.splitting", SPLITTING, &iota_report(&h, m)?);
    let disc = qp_discrimination(&h)?;
    rep.absorb("hjelmslev.substructure", SUBSTRUCTURE, &disc.report);
    rep.data(
        "hjelmslev.substructure.data",
        json!({
            "m": disc.m,
            "base_points": disc.base_points,
            "closure_points": disc.closure_points,
            "closure_lines": disc.closure_lines,
        }),
    );
    if let Some(conclusion) = &disc.conclusion {
        rep.push("hjelmslev.conclusion", SUBSTRUCTURE, Status::Asserted, json!(conclusion));
    }
    Ok(())
}

fn homology(cfg: &RunConfig, family: LatticeFamily, rep: &mut Report) -> Result<(), CliError> {
    let spec = build_spec(cfg, family)?;
    let h1 = h1_of_presentation(spec.presentation());
    rep.push(format!("{family}.h1"), H1, Status::Pass, json!(h1.to_string()));
    rep.data(format!("{family}.perfect"), json!(is_perfect(spec.presentation())));
    match family {
        LatticeFamily::A2Cyclic => rep.absorb(&format!("{family}.kernel"), H1, &a2_kernel_check(&spec)),
        LatticeFamily::C2OnePanel => rep.absorb(&format!("{family}.h1-check"), H1, &c2_h1_check(cfg.q, &spec)),
        _ => {}
    }
    let complex = build_complex(cfg, family)?;
    let betti = rational_betti_from_quotient(complex.scwol());
    let want = match family {
        LatticeFamily::A2Cyclic | LatticeFamily::A2General => vec![1, 0, cfg.q as usize],
        _ => vec![1, 0, 0],
    };
    rep.check(
        format!("{family}.quotient-betti"),
        BETTI,
        betti == want,
        json!({ "computed": betti, "expected": want }),
    );
    Ok(())
}
