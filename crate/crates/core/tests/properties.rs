//! Property tests for the structural invariants: l4 bounds on the
//! unitary group, projection behavior, storage round-trips, and the
//! symmetries of the objective.

use num_complex::Complex;
use proptest::prelude::*;

use beamsparse_core::matkit::{
    l4_norm4, nearest_cp, project_unitary, random_cp, random_unitary, read_cmatrix,
    write_cmatrix, CMatrix,
};
use beamsparse_core::models::{sample_multipath, MultipathModel, SampleSet};
use beamsparse_core::objective::g_det;
use beamsparse_core::{Complex64, UnitaryMatrix};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// l4 of any unitary matrix lies in [1, N]; the bounds are attained
    /// by flat-modulus matrices and complex permutations.
    #[test]
    fn l4_within_unitary_bounds(n in 1usize..12, seed in any::<u64>()) {
        let a = random_unitary(n, seed).unwrap();
        let v = l4_norm4(a.matrix());
        prop_assert!(v >= 1.0 - 1e-9 && v <= n as f64 + 1e-9, "l4 = {v}");
    }

    /// Projection onto the unitary group is idempotent and absorbs
    /// positive diagonal scalings from either side.
    #[test]
    fn projection_idempotent_and_diagonal_absorbing(
        n in 2usize..8,
        seed in any::<u64>(),
        scales in proptest::collection::vec(0.05f64..4.0, 8),
    ) {
        let a = random_unitary(n, seed).unwrap();
        let p1 = project_unitary(a.matrix()).unwrap();
        let p2 = project_unitary(p1.matrix()).unwrap();
        prop_assert!(p1.matrix().frob_dist(p2.matrix()) < 1e-10);

        let d = CMatrix::from_fn(n, n, |i, k| {
            if i == k { Complex::new(scales[i], 0.0) } else { Complex::ZERO }
        });
        let left = project_unitary(&d.mul(a.matrix())).unwrap();
        let right = project_unitary(&a.matrix().mul(&d)).unwrap();
        prop_assert!(left.matrix().frob_dist(a.matrix()) < 1e-9);
        prop_assert!(right.matrix().frob_dist(a.matrix()) < 1e-9);
    }

    /// Binary storage round-trips bit-exactly for arbitrary finite
    /// entries.
    #[test]
    fn cmx1_round_trip_bit_exact(
        rows in 1usize..6,
        cols in 1usize..6,
        raw in proptest::collection::vec((-1e12f64..1e12, -1e12f64..1e12), 25),
    ) {
        let data: Vec<Complex64> = (0..rows * cols)
            .map(|i| Complex::new(raw[i % raw.len()].0, raw[i % raw.len()].1))
            .collect();
        let m = CMatrix::new(rows, cols, data).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.cmx1");
        write_cmatrix(&m, &path).unwrap();
        prop_assert_eq!(read_cmatrix(&path).unwrap(), m);
    }

    /// Composing the transform with a complex permutation leaves the
    /// dataset objective unchanged (row phases and order are invisible
    /// to entrywise moduli).
    #[test]
    fn g_det_invariant_under_cp_composition(
        n in 2usize..7,
        seed in any::<u64>(),
        cp_seed in any::<u64>(),
    ) {
        let a = random_unitary(n, seed).unwrap();
        let p = random_cp(n, cp_seed).unwrap();
        let model = MultipathModel::new(n, vec![Complex::ONE], seed ^ 0x9e37).unwrap();
        let y = sample_multipath(&model, 6).unwrap();
        let base = g_det(&a, &y).unwrap();
        let composed = UnitaryMatrix::new(p.matrix().mul(a.matrix())).unwrap();
        let rotated = g_det(&composed, &y).unwrap();
        prop_assert!((rotated - base).abs() <= 1e-12 * base.abs().max(1.0));
    }

    /// Splits are exhaustive and preserve every column bit-exactly.
    #[test]
    fn split_preserves_column_multiset(
        m in 3usize..24,
        frac in 0.1f64..0.9,
        seed in any::<u64>(),
    ) {
        let n_train = (frac * m as f64).round() as usize;
        prop_assume!(n_train > 0 && n_train < m);
        let model = MultipathModel::new(4, vec![Complex::ONE], seed).unwrap();
        let set = sample_multipath(&model, m).unwrap();
        let (tr, te) = set.split(frac, seed).unwrap();
        prop_assert_eq!(tr.len() + te.len(), m);

        let key = |s: &SampleSet, c: usize| -> Vec<(u64, u64)> {
            s.column(c).iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
        };
        let mut got: Vec<_> = (0..tr.len()).map(|c| key(&tr, c))
            .chain((0..te.len()).map(|c| key(&te, c))).collect();
        let mut want: Vec<_> = (0..m).map(|c| key(&set, c)).collect();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    /// The nearest-CP distance obeys the approximate-maximum bound
    /// distance² ≤ 2N·(1 − l4/N) whenever the premise ε < (1−1/√2)/N
    /// holds, and the matched rows then form a permutation.
    #[test]
    fn nearest_cp_respects_the_l4_bound(n in 2usize..7, seed in any::<u64>(), blend in 20.0f64..200.0) {
        let cp = random_cp(n, seed).unwrap();
        let noise = random_unitary(n, seed ^ 0xabcd).unwrap();
        let mixed = CMatrix::from_fn(n, n, |i, k| {
            cp.matrix()[(i, k)] * blend + noise.matrix()[(i, k)]
        });
        let w = project_unitary(&mixed).unwrap();
        let eps = 1.0 - l4_norm4(w.matrix()) / n as f64;
        prop_assume!(eps < (1.0 - std::f64::consts::FRAC_1_SQRT_2) / n as f64);
        let proj = nearest_cp(&w);
        prop_assert!(proj.is_permutation);
        prop_assert!(proj.distance_sq <= 2.0 * n as f64 * eps + 1e-12);
    }
}
