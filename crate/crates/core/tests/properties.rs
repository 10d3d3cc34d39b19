use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use platemix_core::forms::{quadrature, PlateMaterial};
use platemix_core::harness::canonical_mesh;
use platemix_core::harness::case::make_rm_case;
use platemix_core::harness::verify::{commuting_defect, BubbleField};
use platemix_core::mesh::{generate_square_hole_mesh, refine_uniform, validate, HoleBox};
use platemix_core::poly::Poly2;
use platemix_core::schemes::{assemble_scheme, SchemeKind};
use platemix_core::solver::solve_symmetric_indefinite;
use platemix_core::sparse::CsrMatrix;

/// Unit holes on the integer grid of `[0, side]^2`, kept off the outer
/// boundary and at least one cell apart.
fn domain() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (4usize..=6)
        .prop_flat_map(|side| {
            let cell = (1..side - 1, 1..side - 1);
            (Just(side), prop::collection::vec(cell, 1..=3))
        })
        .prop_map(|(side, cells)| {
            let mut kept: Vec<(usize, usize)> = Vec::new();
            for c in cells {
                if kept
                    .iter()
                    .all(|k| k.0.abs_diff(c.0) >= 2 || k.1.abs_diff(c.1) >= 2)
                {
                    kept.push(c);
                }
            }
            (side, kept)
        })
}

fn poly() -> impl Strategy<Value = Poly2> {
    prop::collection::vec((0usize..4, 0usize..4, -2.0f64..2.0), 1..6)
        .prop_map(|terms| Poly2::from_terms(&terms))
}

/// `[[K, B^T], [B, -C]]` with `K`, `C` symmetric positive definite.
fn quasi_definite(n: usize, m: usize, seed: u64) -> CsrMatrix {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = n + m;
    let mut a = vec![vec![0.0; size]; size];
    let mut spd = |off: usize, k: usize, sign: f64, a: &mut Vec<Vec<f64>>| {
        let g: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        for i in 0..k {
            for j in 0..k {
                let mut s: f64 = (0..k).map(|l| g[i][l] * g[j][l]).sum();
                if i == j {
                    s += 0.5;
                }
                a[off + i][off + j] = sign * s;
            }
        }
    };
    spd(0, n, 1.0, &mut a);
    spd(n, m, -1e-3, &mut a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for i in 0..m {
        for j in 0..n {
            if rng.gen_bool(0.4) {
                let v = rng.gen_range(-3.0..3.0);
                a[n + i][j] = v;
                a[j][n + i] = v;
            }
        }
    }
    CsrMatrix::from_dense(&a)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refinement_keeps_topology_and_area((side, cells) in domain(), refine in 0usize..3) {
        let holes: Vec<HoleBox> = cells
            .iter()
            .map(|&(i, j)| HoleBox::new(i as f64, j as f64, i as f64 + 1.0, j as f64 + 1.0))
            .collect();
        let mut m = generate_square_hole_mesh(side as f64, &holes, 1).unwrap();
        let area = (side * side - holes.len()) as f64;
        let t0 = m.n_triangles();
        for _ in 0..refine {
            m = refine_uniform(&m);
        }
        prop_assert!(validate(&m).is_ok());
        prop_assert_eq!(m.n_holes(), holes.len());
        let euler = m.n_vertices() as i64 - m.n_edges() as i64 + m.n_triangles() as i64;
        prop_assert_eq!(euler, 1 - holes.len() as i64);
        prop_assert_eq!(m.n_triangles(), t0 << (2 * refine));
        prop_assert!((m.total_area() - area).abs() <= 1e-12 * area);
        prop_assert!((0..m.n_triangles()).all(|k| m.signed_area(k) > 0.0));
        prop_assert_eq!(m.boundary_components().unwrap().len(), holes.len() + 1);
    }

    #[test]
    fn polynomial_algebra_matches_pointwise(
        p in poly(),
        q in poly(),
        o in (-2.0f64..2.0, -2.0f64..2.0),
        x in (-1.0f64..3.0, -1.0f64..3.0),
    ) {
        let (p, q) = (p.with_origin([o.0, o.1]), q.with_origin([o.0, o.1]));
        let (px, qx) = (p.eval(x.0, x.1), q.eval(x.0, x.1));
        let tol = 1e-10 * (1.0 + px.abs()) * (1.0 + qx.abs());
        prop_assert!(((&p * &q).eval(x.0, x.1) - px * qx).abs() <= tol);
        prop_assert!(((&p + &q).eval(x.0, x.1) - (px + qx)).abs() <= tol);
        // product rule
        let lhs = (&p * &q).dx().eval(x.0, x.1);
        let rhs = p.dx().eval(x.0, x.1) * qx + px * q.dx().eval(x.0, x.1);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()) * (1.0 + px.abs() + qx.abs()));
        prop_assert!(p.dx().dy() == p.dy().dx());
    }

    #[test]
    fn quadrature_is_exact_to_its_degree(degree in 1usize..=20, split in 0usize..=20) {
        let rule = quadrature(degree).unwrap();
        let a = split.min(degree);
        let b = degree - a;
        let got: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32))
            .sum();
        let want = 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2);
        prop_assert!((got - want).abs() <= 1e-13 * want.max(1e-300) + 1e-16, "{} vs {}", got, want);
    }

    #[test]
    fn solver_meets_residual_and_ignores_numbering(
        n in 3usize..25,
        m in 1usize..10,
        seed in any::<u64>(),
    ) {
        prop_assume!(m <= n);
        let a = quasi_definite(n, m, seed);
        let b: Vec<f64> = (0..n + m).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let r = solve_symmetric_indefinite(&a, &b, 1e-10).unwrap();
        prop_assert!(r.relative_residual <= 1e-10);

        let size = n + m;
        let perm: Vec<usize> = (0..size).map(|i| (i * 5 + seed as usize % size) % size).collect();
        prop_assume!({
            let mut s = perm.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == size
        });
        let pa = a.permute_symmetric(&perm);
        // old unknown i becomes unknown perm[i]
        let mut pb = vec![0.0; size];
        for i in 0..size {
            pb[perm[i]] = b[i];
        }
        let pr = solve_symmetric_indefinite(&pa, &pb, 1e-10).unwrap();
        let scale = r.solution.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        for i in 0..size {
            prop_assert!((pr.solution[perm[i]] - r.solution[i]).abs() <= 1e-8 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn assembled_systems_are_symmetric(
        kind in prop::sample::select(vec![
            SchemeKind::RmMixed,
            SchemeKind::RmMixedReduced,
            SchemeKind::RmPrimal,
            SchemeKind::KMixed,
            SchemeKind::KMixedReduced,
        ]),
        log_t in -4.0f64..0.0,
        poisson in 0.0f64..0.45,
    ) {
        let t = 10f64.powf(log_t);
        let material = PlateMaterial::new(1.0, poisson, t).unwrap();
        let case = make_rm_case(t, material).unwrap();
        let sys = assemble_scheme(&canonical_mesh(1).unwrap(), &case.problem(t), kind).unwrap();
        prop_assert!(sys.matrix.asymmetry() <= 1e-12 * sys.matrix.max_abs());
        prop_assert!(sys.rhs.iter().all(|v| v.is_finite()));
        let total: usize = sys.layout.iter().map(|f| f.len).sum();
        prop_assert_eq!(total, sys.n_unknowns());
    }

    #[test]
    fn interpolants_commute_for_random_fields(seed in any::<u64>()) {
        let mesh: Arc<_> = canonical_mesh(1).unwrap();
        let v = BubbleField::random(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        let (fortin, edge) = commuting_defect(&mesh, &v).unwrap();
        prop_assert!(fortin <= 1e-12 && edge <= 1e-12, "{} {}", fortin, edge);
    }
}
