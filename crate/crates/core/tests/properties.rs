mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;

use common::{big, random_fq_map, random_group, random_snc, rng};
use zetareg::abgroup::{chi, localize, FGAbGroup, FGMap, IntMatrix};
use zetareg::cli::{count_options, zeta_from_variety};
use zetareg::geometry::{BaseField, Variety, VarietySpec};
use zetareg::weight::{build_snc_complex, ss_pages, total_complex, weight_homology, DoubleComplexFG, Lambda};

/// Random product of elementary matrices.
fn unimodular(r: &mut impl Rng, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let i = r.gen_range(0..n);
        let j = (i + r.gen_range(1..n)) % n;
        let c = big(r.gen_range(-3..=3));
        for k in 0..n {
            let v = &m[(j, k)] * &c;
            m[(i, k)] += v;
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// A unimodular change of generators on free groups leaves χ unchanged.
    #[test]
    fn chi_ignores_presentation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let g = FGAbGroup::free(n);
        let f = random_fq_map(&mut r, &g, &g, 100);
        let u = unimodular(&mut r, n);
        let v = unimodular(&mut r, n);
        let conj = FGMap::new(g.clone(), g.clone(), u.mul(&f.matrix).mul(&v)).unwrap();
        prop_assert_eq!(chi(&conj).unwrap(), chi(&f).unwrap());
    }

    /// χ of a map of finite groups is `#B / #A`.
    #[test]
    fn chi_of_finite_groups(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_group(&mut r, 0, 3);
        let b = random_group(&mut r, 0, 3);
        let f = random_fq_map(&mut r, &a, &b, 100);
        let expected = num_rational::BigRational::new(b.torsion_order(), a.torsion_order());
        prop_assert_eq!(chi(&f).unwrap(), expected);
    }

    /// Weight homology with `p` inverted is the localization of the integral one.
    #[test]
    fn weight_homology_localizes(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let cfg = random_snc(&mut rng(seed));
        let over_z = weight_homology(&build_snc_complex(&cfg, Lambda::Z).unwrap());
        let over_l = weight_homology(&build_snc_complex(&cfg, Lambda::InvertP(p)).unwrap());
        let localized: Vec<FGAbGroup> = over_z.iter().map(|g| localize(g, p)).collect();
        prop_assert_eq!(over_l, localized);
    }

    /// Stacking a weight complex over itself with vertical maps `×n`: for
    /// `n = ±1` the columns are exact and the total complex is acyclic; in
    /// general `E1` sits in row 0 and the pages converge.
    #[test]
    fn stacked_weight_complex(seed in any::<u64>(), n in prop::sample::select(vec![-1i64, 1, 2, 3])) {
        let cfg = random_snc(&mut rng(seed));
        let w = build_snc_complex(&cfg, Lambda::Z).unwrap();
        let row = w.complex();
        let cols = (row.highest() + 1) as usize;
        let groups: Vec<Vec<FGAbGroup>> = (0..cols).map(|a| vec![row.group(a as i64); 2]).collect();
        let mut horizontal = BTreeMap::new();
        let mut vertical = BTreeMap::new();
        for a in 0..cols {
            if a > 0 {
                horizontal.insert((a, 0), row.diff(a as i64));
                horizontal.insert((a, 1), row.diff(a as i64));
            }
            vertical.insert((a, 1), FGMap::scalar(row.group(a as i64), n));
        }
        let dc = DoubleComplexFG::new(groups, horizontal, vertical).unwrap();
        let pages = ss_pages(&dc).unwrap();
        prop_assert!(pages.e1.iter().all(|c| c[1].is_zero()));
        prop_assert_ne!(pages.degenerate_convergence, Some(false));
        if n.abs() == 1 {
            prop_assert!(total_complex(&dc).unwrap().is_exact());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Counts of a product multiply, and agree with `#P^n(F_{q^k})`. Seven
    /// counts: `P^1 × P^1` has a denominator of degree four.
    #[test]
    fn product_counts_multiply(a in 0usize..=1, b in 0usize..=1, p in prop::sample::select(vec![2u64, 3])) {
        let base = BaseField::new(p, 1).unwrap();
        let spec = VarietySpec::product(VarietySpec::ProjectiveSpace { n: a }, VarietySpec::ProjectiveSpace { n: b });
        let prod = zeta_from_variety(&Variety::new(base, spec).unwrap(), 7, &count_options()).unwrap();
        let left = zeta_from_variety(&Variety::new(base, VarietySpec::ProjectiveSpace { n: a }).unwrap(), 7, &count_options()).unwrap();
        let right = zeta_from_variety(&Variety::new(base, VarietySpec::ProjectiveSpace { n: b }).unwrap(), 7, &count_options()).unwrap();
        for k in 0..7 {
            prop_assert_eq!(&prod.counts[k], &(&left.counts[k] * &right.counts[k]));
        }
        let q = BigInt::from(p);
        for (k, c) in prod.counts.iter().enumerate() {
            let qk = q.pow(k as u32 + 1);
            let pa: BigInt = (0..=a as u32).map(|i| qk.pow(i)).sum();
            let pb: BigInt = (0..=b as u32).map(|i| qk.pow(i)).sum();
            prop_assert_eq!(c, &(pa * pb));
        }
    }
}
