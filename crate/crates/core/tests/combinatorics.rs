//! Composition enumeration, Bell polynomials, moment/cumulant conversion,
//! Stirling numbers, and cutoff moment sequences, checked against
//! independent recurrences and brute-force enumerations.

use gc_moments::combinatorics::{
    bell_polynomial, c_pq, compositions, cumulants_from_moments, moments_from_cumulants,
    stirling2, Composition, MomentSequence,
};
use gc_moments::rational::{binomial, factorial, int, rat, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Brute-force composition enumeration by recursion on the first part.
fn brute_compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for rest in brute_compositions(n - first, k - 1) {
            let mut parts = vec![first];
            parts.extend(rest);
            out.push(parts);
        }
    }
    out
}

#[test]
fn compositions_match_brute_force() {
    for n in 1..=9 {
        for k in 1..=n {
            let got: Vec<Vec<usize>> = compositions(n, k)
                .unwrap()
                .iter()
                .map(|c| c.parts().collect())
                .collect();
            assert_eq!(got, brute_compositions(n, k), "n={n} k={k}");
        }
    }
}

#[test]
fn compositions_count_is_binomial() {
    for n in 1..=12 {
        for k in 1..=n {
            let count = compositions(n, k).unwrap().len();
            assert_eq!(int(count as i64), binomial(n - 1, k - 1), "n={n} k={k}");
        }
    }
}

#[test]
fn compositions_rejects_bad_part_counts() {
    assert!(compositions(4, 0).is_err());
    assert!(compositions(4, 5).is_err());
}

#[test]
fn composition_accessors_are_consistent() {
    let cs = compositions(5, 3).unwrap();
    for c in &cs {
        assert_eq!(c.n(), 5);
        assert_eq!(c.k(), 3);
        assert_eq!(c.parts().sum::<usize>(), 5);
        assert!(c.parts().all(|p| p >= 1));
        let rebuilt = Composition::from_cuts(c.cuts().to_vec()).unwrap();
        assert_eq!(&rebuilt, c);
    }
    // Lexicographic order on the part vectors.
    let parts: Vec<Vec<usize>> = cs.iter().map(|c| c.parts().collect()).collect();
    let mut sorted = parts.clone();
    sorted.sort();
    assert_eq!(parts, sorted);
}

#[test]
fn partition_weight_counts_set_partitions() {
    // Summing n!/(k! Π p_l!) over compositions of n into k parts counts the
    // set partitions of {1..n} into k blocks, i.e. S(n,k).
    for n in 1..=8 {
        for k in 1..=n {
            let total: Rational = compositions(n, k)
                .unwrap()
                .iter()
                .map(|c| c.partition_weight())
                .sum();
            assert_eq!(total, stirling2(n, k), "n={n} k={k}");
        }
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn bell_polynomial_of_ones_gives_bell_numbers() {
    // B_{n+1} = Σ_k C(n,k) B_k, B_0 = 1.
    let mut bell = vec![Rational::one()];
    for n in 0..10 {
        let mut next = Rational::zero();
        for k in 0..=n {
            next += binomial(n, k) * &bell[k];
        }
        bell.push(next);
    }
    for n in 1..=10 {
        let ones = vec![Rational::one(); n];
        assert_eq!(bell_polynomial(&ones).unwrap(), bell[n], "n={n}");
    }
}

#[test]
fn bell_polynomial_low_orders_by_hand() {
    let x = [int(2), int(5), int(7)];
    // B_1 = x1, B_2 = x1^2 + x2, B_3 = x1^3 + 3 x1 x2 + x3.
    assert_eq!(bell_polynomial(&x[..1]).unwrap(), int(2));
    assert_eq!(bell_polynomial(&x[..2]).unwrap(), int(4 + 5));
    assert_eq!(bell_polynomial(&x).unwrap(), int(8 + 3 * 2 * 5 + 7));
}

#[test]
fn bell_polynomial_rejects_empty_input() {
    assert!(bell_polynomial::<Rational>(&[]).is_err());
}

#[test]
fn gaussian_cumulants_give_double_factorial_moments() {
    // κ = (0, σ², 0, 0, ...) has raw moments 0, σ², 0, 3σ⁴, 0, 15σ⁶.
    let sigma2 = rat(1, 4);
    let mut kappa = vec![Rational::zero(); 6];
    kappa[1] = sigma2.clone();
    let moments = moments_from_cumulants(&kappa).unwrap();
    let expect = [
        Rational::zero(),
        sigma2.clone(),
        Rational::zero(),
        int(3) * &sigma2 * &sigma2,
        Rational::zero(),
        int(15) * &sigma2 * &sigma2 * &sigma2,
    ];
    assert_eq!(moments, expect);
}

#[test]
fn poisson_moment_cumulant_pair() {
    // Poisson(μ) has all cumulants μ; its moments are Touchard polynomials,
    // E[N^n] = Σ_k S(n,k) μ^k.
    let mu = rat(7, 3);
    let kappa = vec![mu.clone(); 6];
    let moments = moments_from_cumulants(&kappa).unwrap();
    for n in 1..=6 {
        let touchard: Rational = (1..=n)
            .map(|k| {
                let mut p = stirling2(n, k);
                for _ in 0..k {
                    p *= &mu;
                }
                p
            })
            .sum();
        assert_eq!(moments[n - 1], touchard, "n={n}");
    }
    assert_eq!(cumulants_from_moments(&moments).unwrap(), kappa);
}

proptest! {
    #[test]
    fn composition_total_is_two_power(n in 1usize..=12) {
        let total: usize = (1..=n).map(|k| compositions(n, k).unwrap().len()).sum();
        prop_assert_eq!(total, 1 << (n - 1));
    }

    #[test]
    fn moment_cumulant_round_trip(
        nums in proptest::collection::vec(-20i64..=20, 1..=8),
        denoms in proptest::collection::vec(1i64..=9, 1..=8),
    ) {
        let len = nums.len().min(denoms.len());
        let kappa: Vec<Rational> =
            (0..len).map(|i| rat(nums[i], denoms[i])).collect();
        let moments = moments_from_cumulants(&kappa).unwrap();
        prop_assert_eq!(cumulants_from_moments(&moments).unwrap(), kappa);
        prop_assert_eq!(moments.len(), len);
    }

    #[test]
    fn uniform_c_pq_beta_identity(p in 0usize..=5, q in 0usize..=5) {
        // Uniform cutoff: E[(1−U)^p U^q] = p! q! / (p+q+1)!.
        let ms = MomentSequence::uniform(p + q);
        let lhs = c_pq(&ms, p, q).unwrap() * factorial(p + q + 1);
        prop_assert_eq!(lhs, factorial(p) * factorial(q));
    }
}

#[test]
fn stirling_table_and_recurrence() {
    // S(n+1,k) = k S(n,k) + S(n,k−1).
    for n in 0..=10 {
        for k in 1..=(n + 1) {
            let lhs = stirling2(n + 1, k);
            let rhs = int(k as i64) * stirling2(n, k) + stirling2(n, k - 1);
            assert_eq!(lhs, rhs, "n={n} k={k}");
        }
    }
    assert_eq!(stirling2(5, 2), int(15));
    assert_eq!(stirling2(6, 3), int(90));
    assert_eq!(stirling2(9, 9), int(1));
    for n in 1..=10 {
        assert_eq!(stirling2(n, n + 1), Rational::zero(), "n={n}");
        assert_eq!(stirling2(n, 1), Rational::one(), "n={n}");
    }
}

#[test]
fn deterministic_cutoff_c_pq_factorizes() {
    // Z ≡ c: E[(1−Z)^p Z^q] = (1−c)^p c^q.
    let c = rat(1, 2);
    let ms = MomentSequence::deterministic(&c, 12).unwrap();
    for p in 0..=6 {
        for q in 0..=6 {
            let mut expect = Rational::one();
            for _ in 0..p {
                expect *= Rational::one() - &c;
            }
            for _ in 0..q {
                expect *= &c;
            }
            assert_eq!(c_pq(&ms, p, q).unwrap(), expect, "p={p} q={q}");
        }
    }
}

#[test]
fn moment_sequence_validation() {
    assert!(MomentSequence::from_moments(vec![int(1), rat(1, 2), rat(1, 3)]).is_ok());
    // m_0 must be 1.
    assert!(MomentSequence::from_moments(vec![rat(1, 2)]).is_err());
    // Moments of a [0,1] variable cannot increase.
    assert!(MomentSequence::from_moments(vec![int(1), rat(1, 3), rat(1, 2)]).is_err());
    // Nor exceed 1 or drop below 0.
    assert!(MomentSequence::from_moments(vec![int(1), int(2)]).is_err());
    assert!(MomentSequence::from_moments(vec![int(1), rat(-1, 2)]).is_err());

    let ms = MomentSequence::uniform(3);
    assert_eq!(ms.max_order(), 3);
    assert_eq!(ms.moment(2).unwrap(), &rat(1, 3));
    assert!(ms.moment(4).is_err());

    // c_pq needs moments up to p+q.
    assert!(c_pq(&ms, 3, 1).is_err());
    assert!(c_pq(&ms, 2, 1).is_ok());
}
