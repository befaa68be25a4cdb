use num_rational::BigRational;
use proptest::prelude::*;
use superint::distrib::DistributionExpansion;
use superint::grassmann::{Grassmann, SuperContext};
use superint::poly::{Monomial, Poly};

type D = DistributionExpansion<Poly>;

fn r(p: i64) -> BigRational {
    BigRational::from_integer(p.into())
}

fn poly(c: &[(i64, [u32; 2])]) -> Poly {
    Poly::from_terms(c.iter().map(|(k, e)| (Monomial::new(e.to_vec()), r(*k))))
}

fn even_blades(n: usize) -> Vec<u32> {
    (1u32..(1 << (2 * n))).filter(|b| b.count_ones() % 2 == 0).collect()
}

/// Random even polynomial superfunction over m = 2 with a nonconstant body.
fn phase(n: usize) -> impl Strategy<Value = Grassmann<Poly>> {
    let nb = even_blades(n).len();
    (
        1i64..4,
        -3i64..4,
        -5i64..5,
        prop::collection::vec((-3i64..4, 0u32..2, 0u32..2), nb),
    )
        .prop_map(move |(a, b, c, nil)| {
            let ctx = SuperContext::new(2, n).unwrap();
            let body = poly(&[(a, [2, 0]), (b, [0, 1]), (c, [0, 0])]);
            let mut g = Grassmann::scalar(ctx, body);
            for (blade, (k, e1, e2)) in even_blades(n).into_iter().zip(nil) {
                g.add_term(blade, poly(&[(k, [e1, e2])]));
            }
            g
        })
}

fn fact(j: usize) -> i64 {
    (1..=j as i64).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phase_power_collapses_to_delta(g in (0usize..3).prop_flat_map(phase), j in 0usize..4) {
        let dj = D::delta(&g, j).unwrap();
        let lhs = dj.multiply(&g.pow(j as u32));
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let rhs = D::delta(&g, 0).unwrap().map_coeffs(|c| c.scale_int(sign * fact(j)));
        prop_assert!(lhs.equivalent(&rhs));
        prop_assert!(dj.multiply(&g.pow(j as u32 + 1)).is_zero());
    }

    #[test]
    fn negate_phase_is_involution(g in phase(2), k in 0usize..3) {
        let d = D::delta(&g, k).unwrap();
        prop_assert!(d.negate_phase().negate_phase().coeff_eq(&d));
        let h = D::heaviside(&g, -1).unwrap();
        prop_assert!(h.negate_phase().negate_phase().coeff_eq(&h));
    }

    #[test]
    fn heaviside_ignores_positive_factor(g in phase(2), h0 in 1i64..5, hn in phase(2)) {
        // h = h0 + (nilpotent part of a random even superfunction)
        let ctx = g.ctx();
        let mut h = hn.nilpotent();
        h.add_term(0, Poly::constant(r(h0)));
        let hg = h.mul(&g);
        let lhs = D::heaviside(&hg, 1).unwrap().rebase(&r(h0), g.body()).unwrap();
        let rhs = D::heaviside(&g, 1).unwrap();
        prop_assert!(lhs.equivalent(&rhs));
        // δ(hg)·h = δ(g)
        let d = D::delta(&hg, 0).unwrap().rebase(&r(h0), g.body()).unwrap().multiply(&h);
        prop_assert!(d.equivalent(&D::delta(&g, 0).unwrap()));
        let _ = ctx;
    }
}
