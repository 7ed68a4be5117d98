//! Cross-module integration tests on the shipped fixtures: reduction
//! compatibility of the cubic, GL_9 equivariance, and independence of the
//! quotient projection from the choice of completion.

use std::path::PathBuf;

use trivector::coble::{self, CobleSystem};
use trivector::stability;
use trivector::{
    parse_trivector, sample_uniform, seeded_stream, FieldScalar, FieldSpec, Matrix, Multivector,
};

fn fixture(name: &str) -> Multivector {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing fixture {}: {e}", path.display()));
    parse_trivector(&text).unwrap()
}

#[test]
fn gamma_star_cubic_commutes_with_reduction_mod_7() {
    let gq = fixture("gamma_star.txt");
    let f7 = FieldSpec::prime(7).unwrap();
    let sys_q = CobleSystem::new(&gq).unwrap();
    let sys_7 = CobleSystem::new(&gq.map_spec(f7).unwrap()).unwrap();
    assert!(!sys_7.cubic().is_zero());
    assert_eq!(&sys_q.cubic().map_spec(f7).unwrap(), sys_7.cubic());
    assert!(sys_q.cross_checks().iter().all(|&b| b));
    assert!(sys_7.cross_checks().iter().all(|&b| b));
}

#[test]
fn cubic_is_gl9_equivariant_up_to_determinant() {
    // moving gamma by g multiplies the cubic by det(g) after the coordinate
    // substitution x -> g^T x
    let f7 = FieldSpec::prime(7).unwrap();
    let gamma = fixture("gamma_star.txt").map_spec(f7).unwrap();
    let sys = CobleSystem::new(&gamma).unwrap();
    let mut rng = seeded_stream(101);
    for _ in 0..3 {
        let g = loop {
            let m = Matrix::from_fn(f7, 9, 9, |_, _| sample_uniform(f7, &mut rng).unwrap());
            if m.rank() == 9 {
                break m;
            }
        };
        let det = g.det().unwrap();
        let moved = gamma.apply_linear(&g).unwrap();
        let sys_moved = CobleSystem::new(&moved).unwrap();
        let gt = g.transpose();
        for _ in 0..20 {
            let x: Vec<FieldScalar> =
                (0..9).map(|_| sample_uniform(f7, &mut rng).unwrap()).collect();
            let lhs = sys_moved.cubic().eval(&x).unwrap();
            let rhs = &det * &sys.cubic().eval(&gt.mul_vec(&x).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

/// Quotient of a trivector by u using an arbitrary completion basis
/// (columns of `b` are u followed by 8 completing vectors): rewrite in that
/// basis, drop terms containing the first vector, renumber the rest.
fn quotient_with_completion(g: &Multivector, b: &Matrix) -> Multivector {
    let rewritten = g.apply_linear(&b.inverse().unwrap()).unwrap();
    let spec = g.spec();
    let mut terms = Vec::new();
    for (mask, c) in rewritten.terms() {
        if mask & 1 != 0 {
            continue; // contains the u direction
        }
        let idx: Vec<usize> = (2..=9).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| i - 1).collect();
        terms.push((idx, c.clone()));
    }
    Multivector::from_terms(spec, 8, 3, terms).unwrap()
}

#[test]
fn quotient_projection_is_completion_independent_mod_gl8() {
    let f2 = FieldSpec::prime(2).unwrap();
    let one = FieldScalar::one(f2);
    let zero = FieldScalar::zero(f2);

    // u = e1 + e2 on a basis trivector: the canonical projection collapses it
    let e123 = Multivector::basis(f2, 9, &[1, 2, 3]).unwrap();
    let u: Vec<FieldScalar> = (0..9)
        .map(|i| if i < 2 { one.clone() } else { zero.clone() })
        .collect();
    let canonical = e123.quotient_project(&u).unwrap();
    assert!(canonical.is_zero());

    // three alternative legal completions of u, on the rich fixture: the
    // hyperdiscriminant of the quotient does not depend on the completion
    let gamma2 = fixture("gamma2_star.txt");
    let mut rng = seeded_stream(103);
    for trial in 0..3 {
        let u: Vec<FieldScalar> = loop {
            let v: Vec<FieldScalar> =
                (0..9).map(|_| sample_uniform(f2, &mut rng).unwrap()).collect();
            if v.iter().any(|c| !c.is_zero()) {
                break v;
            }
        };
        let reference = stability::hyperdisc2(&gamma2.quotient_project(&u).unwrap()).unwrap();
        let mut found = 0;
        while found < 3 {
            let b = Matrix::from_fn(f2, 9, 9, |i, j| {
                if j == 0 {
                    u[i].clone()
                } else {
                    sample_uniform(f2, &mut rng).unwrap()
                }
            });
            if b.rank() != 9 {
                continue;
            }
            let alt = quotient_with_completion(&gamma2, &b);
            let h = stability::hyperdisc2(&alt).unwrap();
            assert_eq!(h, reference, "completion changed the invariant (trial {trial})");
            found += 1;
        }
    }
}

#[test]
fn canonical_quotient_agrees_with_its_own_completion_matrix() {
    let f2 = FieldSpec::prime(2).unwrap();
    let gamma2 = fixture("gamma2_star.txt");
    let mut rng = seeded_stream(107);
    for _ in 0..10 {
        let u: Vec<FieldScalar> = loop {
            let v: Vec<FieldScalar> =
                (0..9).map(|_| sample_uniform(f2, &mut rng).unwrap()).collect();
            if v.iter().any(|c| !c.is_zero()) {
                break v;
            }
        };
        let piv = u.iter().position(|c| !c.is_zero()).unwrap();
        // canonical completion: u first, then the standard vectors at the
        // non-pivot positions in increasing order
        let rest: Vec<usize> = (0..9).filter(|&i| i != piv).collect();
        let b = Matrix::from_fn(f2, 9, 9, |i, j| {
            if j == 0 {
                u[i].clone()
            } else if i == rest[j - 1] {
                FieldScalar::one(f2)
            } else {
                FieldScalar::zero(f2)
            }
        });
        assert_eq!(
            gamma2.quotient_project(&u).unwrap(),
            quotient_with_completion(&gamma2, &b)
        );
    }
}

#[test]
fn smooth_point_lies_in_its_own_kernel() {
    let f5 = FieldSpec::prime(5).unwrap();
    let sys = CobleSystem::new(&fixture("gamma_star.txt").map_spec(f5).unwrap()).unwrap();
    for y in sys.smooth_points(5).unwrap() {
        let m = sys.family().evaluate(&y).unwrap();
        let prod = m.to_matrix().mul_vec(&y).unwrap();
        assert!(prod.iter().all(|c| c.is_zero()));
        let cert = sys.certificate(&y).unwrap();
        assert_eq!(cert.kernel.len(), 3);
    }
}

#[test]
fn gamma2_star_scan_is_clean() {
    let report = coble::scan_loci(&fixture("gamma2_star.txt"), 2, 1).unwrap();
    assert_eq!(report.points_total, 511);
    assert!(report.sing_mismatches.is_empty());
    assert!(report.cubic_rank_mismatches.is_empty());
    assert_eq!(report.rank2_count, 0);
}
