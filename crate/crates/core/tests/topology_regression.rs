use choreo_core::algebra::point::to_complex;
use choreo_core::algebra::{binary_roots, restrict_to_line, HomPoly3};
use choreo_core::topology::{line_crossings, trace_real_locus, ComponentKind, DEFAULT_ON_CURVE_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn curves() -> Vec<(&'static str, HomPoly3, usize)> {
    vec![
        (
            "y^2 = x^3 - x",
            HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), 1.0)]).unwrap(),
            2,
        ),
        (
            "y^2 = x^3 + x",
            HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), -1.0)]).unwrap(),
            1,
        ),
        ("circle", HomPoly3::from_terms(2, &[((2, 0, 0), 1.0), ((0, 2, 0), 1.0), ((0, 0, 2), -1.0)]).unwrap(), 1),
    ]
}

#[test]
fn component_counts_survive_step_halving() {
    for (name, f, expected) in curves() {
        for step in [1e-3, 5e-4] {
            let topo = trace_real_locus(&f, step, DEFAULT_ON_CURVE_TOL).unwrap();
            assert_eq!(topo.components.len(), expected, "{name} at step {step}");
            let one_sided = topo.components.iter().filter(|c| c.kind == ComponentKind::OneSided).count();
            assert_eq!(one_sided, f.degree() % 2, "{name}");
        }
    }
}

fn real_roots(f: &HomPoly3, line: &[f64; 3]) -> usize {
    let (u, v) = choreo_core::algebra::point::line_frame(line);
    let form = restrict_to_line(f, &u, &v).unwrap();
    binary_roots(&form)
        .iter()
        .filter(|r| {
            let p = r.point.on_line(&to_complex(u), &to_complex(v));
            choreo_core::algebra::point::realness_defect(&p) < 1e-8
        })
        .map(|r| r.multiplicity)
        .sum()
}

#[test]
fn random_lines_cross_with_the_right_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (name, f, _) in curves() {
        let topo = trace_real_locus(&f, 1e-3, DEFAULT_ON_CURVE_TOL).unwrap();
        for i in 0..20 {
            let line = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let roots = real_roots(&f, &line);
            let crossings = line_crossings(&topo, &line);
            assert_eq!(roots % 2, f.degree() % 2, "{name}, line {i}");
            assert_eq!(crossings, roots, "{name}, line {i}: {line:?}");
        }
    }
}
