//! Cross-checks against an independent linear-algebra implementation.

use ghgeom::ghsurface::{closed_curvatures, gh_field};
use ghgeom::monge::{curvature_report, Orientation, ScalarField, StatePoint};
use ghgeom::numerics::{sym_pencil_eigen, SymMatrix3};
use nalgebra::{Matrix3, SymmetricEigen};
use proptest::prelude::*;

fn to_na(m: &SymMatrix3) -> Matrix3<f64> {
    let r = m.to_rows();
    Matrix3::from_fn(|i, j| r[i][j])
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Eigenvalues of `h v = λ g v` via `L⁻¹ h L⁻ᵀ` with `g = L Lᵀ`.
fn pencil_oracle(h: &SymMatrix3, g: &SymMatrix3) -> Vec<f64> {
    let l = to_na(g).cholesky().unwrap().l();
    let li = l.try_inverse().unwrap();
    let c = li * to_na(h) * li.transpose();
    let c = (c + c.transpose()) * 0.5;
    sorted_desc(SymmetricEigen::new(c).eigenvalues.iter().copied().collect())
}

fn sym(v: [f64; 6]) -> SymMatrix3 {
    SymMatrix3::from_rows(&[[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]])
}

#[test]
fn identity_metric_matches_symmetric_eigensolve() {
    let h = sym([1.0, -2.0, 0.5, 3.0, 0.25, -1.5]);
    let ours = sym_pencil_eigen(&h, &SymMatrix3::identity()).unwrap().roots();
    let oracle = pencil_oracle(&h, &SymMatrix3::identity());
    for (a, b) in ours.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-10, "{ours:?} vs {oracle:?}");
    }
}

#[test]
fn gh_principal_curvatures_match_oracle() {
    for x in [[0.0, 0.0, 0.0], [1.0, 0.3, -2.0], [-4.0, 1.0, 3.5], [10.0, 0.0, 10.0]] {
        let p = StatePoint::from(x);
        let r = curvature_report(&gh_field(), &p, Orientation::Downward).unwrap();
        let oracle = pencil_oracle(&r.forms.h, &r.forms.g);
        let closed = closed_curvatures(&p).principal();
        for i in 0..3 {
            assert!((r.principal()[i] - oracle[i]).abs() < 1e-12);
            assert!((closed[i] - oracle[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn shape_operator_eigenvalues_match() {
    let field = ScalarField::new(|x: &StatePoint| Ok((x.x1 * x.x2).sin() + x.x3 * x.x3 * x.x1));
    let p = StatePoint::new(0.4, -0.7, 1.1);
    let r = curvature_report(&field, &p, Orientation::Upward).unwrap();
    let s = Matrix3::from_fn(|i, j| r.shape_operator[i][j]);
    let eig = sorted_desc(s.complex_eigenvalues().iter().map(|c| c.re).collect());
    for i in 0..3 {
        assert!((r.principal()[i] - eig[i]).abs() < 1e-6, "{:?} vs {eig:?}", r.principal());
    }
}

proptest! {
    #[test]
    fn pencil_matches_oracle(
        h in prop::array::uniform6(-5.0f64..5.0),
        b in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let h = sym(h);
        let g = SymMatrix3::identity().add(&SymMatrix3::outer(&b, 1.0));
        let ours = sym_pencil_eigen(&h, &g).unwrap().roots();
        let oracle = pencil_oracle(&h, &g);
        let scale = 1.0 + oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..3 {
            prop_assert!((ours[i] - oracle[i]).abs() < 1e-8 * scale, "{:?} vs {:?}", ours, oracle);
        }
    }

    #[test]
    fn gaussian_curvature_product(x1 in -20.0f64..20.0, x2 in -5.0f64..5.0, x3 in -20.0f64..20.0) {
        let p = StatePoint::new(x1, x2, x3);
        let r = curvature_report(&gh_field(), &p, Orientation::Downward).unwrap();
        let a2 = 2.0 + x1 * x1 + x3 * x3;
        let l = r.principal();
        prop_assert!((l[0] * l[2] * a2 * a2 + 2.0).abs() < 1e-9);
        prop_assert!(l[1].abs() < 1e-12 * (l[0].abs() + l[2].abs()));
        prop_assert!((r.scalar * a2 * a2 + 4.0).abs() < 1e-9);
    }
}
