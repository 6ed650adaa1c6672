//! Cross-cutting property checks: the ownership classifier against a
//! brute-force lattice search, Bernstein evaluation and derivatives against
//! an independent monomial expansion, and the fraction-free linear algebra
//! against naive rational elimination.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use proptest::prelude::*;

use ssfem::{
    classify, enumerate_indices, exact_rank, faces, family_profile, normal_directions, partition,
    poly_dim, solve_linear_system, verify_continuity, BaryPoint, BernsteinIndex, Direction, Face,
    Polynomial, Rational, SmoothnessProfile,
};

// ---- independent monomial oracle ------------------------------------------
// Polynomials as exponent-vector maps over cartesian x_1..x_n, built from
// scratch so they share no code with the library's Bernstein arithmetic.

type Monomials = BTreeMap<Vec<u32>, Rational>;

fn mono_add(acc: &mut Monomials, exps: Vec<u32>, c: Rational) {
    *acc.entry(exps).or_insert_with(Rational::zero) += c;
}

fn mono_mul(a: &Monomials, b: &Monomials) -> Monomials {
    let mut out = Monomials::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            mono_add(&mut out, exps, ca * cb);
        }
    }
    out
}

// λ_0 = 1 - x_1 - ... - x_n on the reference simplex; λ_i = x_i.
fn lambda_monomials(vertex: usize, n: usize) -> Monomials {
    let mut out = Monomials::new();
    if vertex == 0 {
        mono_add(&mut out, vec![0; n], Rational::one());
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            mono_add(&mut out, e, -Rational::one());
        }
    } else {
        let mut e = vec![0; n];
        e[vertex - 1] = 1;
        mono_add(&mut out, e, Rational::one());
    }
    out
}

fn factorial(v: u32) -> Rational {
    let mut f = Rational::one();
    for i in 2..=v as u64 {
        f *= Rational::from_integer(i.into());
    }
    f
}

fn bernstein_monomials(alpha: &BernsteinIndex) -> Monomials {
    let n = alpha.ambient_dim();
    let mut mult = factorial(alpha.degree());
    for &a in alpha.entries() {
        mult /= factorial(a);
    }
    let mut out = Monomials::new();
    mono_add(&mut out, vec![0; n], mult);
    for (v, &a) in alpha.entries().iter().enumerate() {
        let lam = lambda_monomials(v, n);
        for _ in 0..a {
            out = mono_mul(&out, &lam);
        }
    }
    out
}

fn mono_eval(m: &Monomials, x: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (exps, c) in m {
        let mut term = c.clone();
        for (e, xi) in exps.iter().zip(x) {
            term *= num_traits::pow(xi.clone(), *e as usize);
        }
        acc += term;
    }
    acc
}

fn mono_partial(m: &Monomials, var: usize) -> Monomials {
    let mut out = Monomials::new();
    for (exps, c) in m {
        if exps[var] == 0 {
            continue;
        }
        let mut e = exps.clone();
        e[var] -= 1;
        mono_add(&mut out, e, c * Rational::from_integer(exps[var].into()));
    }
    out
}

fn mono_directional(m: &Monomials, dir: &Direction) -> Monomials {
    let mut out = Monomials::new();
    for (i, &w) in dir.reference_coords().iter().enumerate() {
        if w == 0 {
            continue;
        }
        for (exps, c) in mono_partial(m, i) {
            mono_add(&mut out, exps, c * Rational::from_integer(w.into()));
        }
    }
    out
}

fn terms_to_monomials(terms: &[(BernsteinIndex, Rational)]) -> Monomials {
    let mut mono = Monomials::new();
    for (alpha, c) in terms {
        for (e, bc) in bernstein_monomials(alpha) {
            mono_add(&mut mono, e, bc * c);
        }
    }
    mono
}

// ---- strategies ------------------------------------------------------------

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=8).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn interior_point(n: usize) -> impl Strategy<Value = BaryPoint> {
    prop::collection::vec(1u32..=9, n + 1).prop_map(|parts| {
        let den: u32 = parts.iter().sum();
        BaryPoint::new(
            parts
                .iter()
                .map(|&p| Rational::new(p.into(), den.into()))
                .collect(),
        )
        .unwrap()
    })
}

fn direction_strategy(n: usize) -> impl Strategy<Value = Direction> {
    prop::collection::vec(-3i64..=3, n + 1).prop_map(|mut deltas| {
        let sum: i64 = deltas.iter().sum();
        deltas[0] -= sum;
        Direction::new(deltas).unwrap()
    })
}

fn coeff_list(n: usize, k: u32) -> impl Strategy<Value = Vec<(BernsteinIndex, Rational)>> {
    let indices = enumerate_indices(n, k).unwrap();
    let count = indices.len();
    prop::collection::vec((0..count, rational_strategy()), 1..=4).prop_map(move |terms| {
        let mut map: BTreeMap<BernsteinIndex, Rational> = BTreeMap::new();
        for (i, c) in terms {
            *map.entry(indices[i].clone()).or_insert_with(Rational::zero) += c;
        }
        map.into_iter().collect()
    })
}

type PolyCase = (usize, u32, Vec<(BernsteinIndex, Rational)>, BaryPoint);

fn poly_case() -> impl Strategy<Value = PolyCase> {
    (1usize..=3, 1u32..=4)
        .prop_flat_map(|(n, k)| (Just(n), Just(k), coeff_list(n, k), interior_point(n)))
}

fn small_family() -> impl Strategy<Value = SmoothnessProfile> {
    prop_oneof![
        Just((1usize, 1u32)),
        Just((1, 2)),
        Just((2, 1)),
        Just((2, 2)),
        Just((3, 1)),
        Just((3, 2)),
        Just((4, 1)),
        Just((4, 2)),
    ]
    .prop_map(|(n, m)| family_profile(n, m).unwrap())
}

// Strictly decreasing orders with a compatible degree, not restricted to the
// order-doubling family.
fn arbitrary_profile() -> impl Strategy<Value = SmoothnessProfile> {
    (1usize..=3)
        .prop_flat_map(|n| prop::collection::vec(0u32..=2, n))
        .prop_flat_map(|increments| {
            let n = increments.len();
            let mut orders = vec![0u32; n];
            orders[n - 1] = increments[n - 1];
            for d in (0..n - 1).rev() {
                orders[d] = orders[d + 1] + 1 + increments[d];
            }
            let r0 = orders[0];
            (2 * r0 + 1..=2 * r0 + 4)
                .prop_map(move |k| SmoothnessProfile::new(orders.clone(), k).unwrap())
        })
}

fn naive_rank(matrix: &[Vec<Rational>]) -> usize {
    let mut m = matrix.to_vec();
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in rank + 1..rows {
            let f = &m[r][col] / &pivot;
            for c in col..cols {
                let sub = &f * &m[rank][c];
                m[r][c] -= sub;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

// ---- properties -------------------------------------------------------------

proptest! {
    #[test]
    fn bernstein_eval_matches_monomial_expansion((n, k, terms, point) in poly_case()) {
        let p = Polynomial::from_coeffs(n, k, terms.iter().cloned().collect()).unwrap();
        let mono = terms_to_monomials(&terms);
        let x = point.coords()[1..].to_vec();
        prop_assert_eq!(p.eval(&point).unwrap(), mono_eval(&mono, &x));
    }

    #[test]
    fn directional_derivative_matches_monomial_oracle(
        ((n, k, terms, point), seed) in poly_case().prop_flat_map(|case| {
            let n = case.0;
            (Just(case), direction_strategy(n))
        })
    ) {
        let dir = seed;
        let p = Polynomial::from_coeffs(n, k, terms.iter().cloned().collect()).unwrap();
        let mono = terms_to_monomials(&terms);
        let derived = p.directional_derivative(&dir).unwrap();
        let mono_derived = mono_directional(&mono, &dir);
        let x = point.coords()[1..].to_vec();
        prop_assert_eq!(derived.eval(&point).unwrap(), mono_eval(&mono_derived, &x));
    }

    #[test]
    fn mixed_derivatives_commute_on_random_polynomials(
        ((n, k, terms, _), d1, d2) in poly_case().prop_flat_map(|case| {
            let n = case.0;
            (Just(case), direction_strategy(n), direction_strategy(n))
        })
    ) {
        let p = Polynomial::from_coeffs(n, k, terms.into_iter().collect()).unwrap();
        let a = p.directional_derivative(&d1).unwrap().directional_derivative(&d2).unwrap();
        let b = p.directional_derivative(&d2).unwrap().directional_derivative(&d1).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bernstein_basis_sums_to_one(
        (n, k, point) in (1usize..=3, 1u32..=5)
            .prop_flat_map(|(n, k)| (Just(n), Just(k), interior_point(n)))
    ) {
        let mut sum = Rational::zero();
        for alpha in enumerate_indices(n, k).unwrap() {
            sum += Polynomial::bernstein_basis(alpha).eval(&point).unwrap();
        }
        prop_assert_eq!(sum, Rational::one());
    }

    #[test]
    fn classifier_agrees_with_brute_force(
        (profile, entries) in small_family().prop_flat_map(|p| {
            let n = p.ambient_dim();
            let k = p.degree();
            let index = prop::collection::vec(0..=n, k as usize).prop_map(move |balls| {
                let mut e = vec![0u32; n + 1];
                for b in balls {
                    e[b] += 1;
                }
                e
            });
            (Just(p), index)
        })
    ) {
        let index = BernsteinIndex::new(entries.clone()).unwrap();
        let ownership = classify(&profile, &index).unwrap();

        let n = profile.ambient_dim();
        let k = profile.degree();
        let mut qualifying: Vec<Face> = Vec::new();
        for d in 0..n {
            for face in faces(n, d).unwrap() {
                let on: u32 = face.vertices().iter().map(|&v| entries[v]).sum();
                if k - on <= profile.order(d) {
                    qualifying.push(face);
                }
            }
        }
        qualifying.sort();
        match qualifying.first() {
            Some(face) => {
                prop_assert_eq!(&ownership.owner, face);
                let on: u32 = face.vertices().iter().map(|&v| entries[v]).sum();
                prop_assert_eq!(ownership.order, k - on);
            }
            None => {
                prop_assert!(ownership.owner.is_full_simplex());
                prop_assert_eq!(ownership.order, *entries.iter().min().unwrap());
            }
        }
    }

    #[test]
    fn rank_matches_naive_elimination(
        matrix in (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(rational_strategy(), c), r)
        })
    ) {
        prop_assert_eq!(exact_rank(&matrix), naive_rank(&matrix));
    }

    #[test]
    fn rank_sees_through_constructed_deficiency(
        matrix in (1usize..=2, 2usize..=4, 2usize..=4).prop_flat_map(|(rank, rows, cols)| {
            let base = prop::collection::vec(
                prop::collection::vec(rational_strategy(), cols), rank);
            let combos = prop::collection::vec(
                prop::collection::vec(-3i64..=3, rank), rows);
            (base, combos).prop_map(|(base, combos)| -> Vec<Vec<Rational>> {
                combos
                    .into_iter()
                    .map(|combo| {
                        (0..base[0].len())
                            .map(|j| {
                                combo
                                    .iter()
                                    .zip(&base)
                                    .map(|(&w, row)| Rational::from_integer(w.into()) * &row[j])
                                    .fold(Rational::zero(), |acc, t| acc + t)
                            })
                            .collect()
                    })
                    .collect()
            })
        })
    ) {
        let r = exact_rank(&matrix);
        prop_assert_eq!(r, naive_rank(&matrix));
        prop_assert!(r <= 2);
    }

    #[test]
    fn solve_round_trips_or_detects_singularity(
        (matrix, x) in (1usize..=4).prop_flat_map(|s| (
            prop::collection::vec(prop::collection::vec(rational_strategy(), s), s),
            prop::collection::vec(rational_strategy(), s),
        ))
    ) {
        let rhs: Vec<Rational> = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&x)
                    .map(|(a, xi)| a * xi)
                    .fold(Rational::zero(), |acc, t| acc + t)
            })
            .collect();
        match solve_linear_system(&matrix, &rhs).unwrap() {
            Some(solved) => prop_assert_eq!(&solved, &x),
            None => prop_assert!(exact_rank(&matrix) < matrix.len()),
        }
    }

    #[test]
    fn partition_is_total_for_arbitrary_profiles(profile in arbitrary_profile()) {
        let report = partition(&profile).unwrap();
        let n = profile.ambient_dim();
        prop_assert_eq!(report.grand_total(), &poly_dim(n, profile.degree()));
        let mut sum = ssfem::Count::zero();
        for t in report.per_dim_totals() {
            sum += t;
        }
        prop_assert_eq!(&sum, report.grand_total());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn quintic_triangle_continuity_for_any_seed(seed in any::<u64>()) {
        let report = verify_continuity(2, 1, seed, 3).unwrap();
        prop_assert!(report.passed(), "max jump {}", report.max_jump);
    }
}

#[test]
fn normal_directions_are_linearly_independent() {
    for n in 1..=4usize {
        for d in 0..n {
            for face in faces(n, d).unwrap() {
                let dirs = normal_directions(&face).unwrap();
                let matrix: Vec<Vec<Rational>> = dirs
                    .iter()
                    .map(|dir| {
                        dir.reference_coords()
                            .iter()
                            .map(|&w| Rational::from_integer(w.into()))
                            .collect()
                    })
                    .collect();
                assert_eq!(exact_rank(&matrix), n - d, "face {face:?} of the {n}-simplex");
            }
        }
    }
}

#[test]
fn quintic_line_elements_glue_two_derivatives_deep() {
    // The (1, 2) family member: degree 5 on a line, matching value, slope,
    // and curvature at the shared vertex.
    let report = verify_continuity(1, 2, 3, 2).unwrap();
    assert!(report.passed());
    assert_eq!(report.shared_dofs, 3);
    assert_eq!(report.checked_jumps, 3);
}
