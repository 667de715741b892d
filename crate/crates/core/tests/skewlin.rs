use lambdamax::skewlin::{log_det, sqrt_det_skew, LogValue, SkewMatrix, SquareMatrix};
use proptest::prelude::*;

fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<f64>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, &v)| v).collect()).collect();
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * cofactor_det(&minor)
        })
        .sum()
}

/// Pfaffian as a signed sum over perfect matchings, expanding on the first
/// remaining index.
fn matching_pfaffian(a: &SkewMatrix, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    let first = idx[0];
    let rest = &idx[1..];
    rest.iter()
        .enumerate()
        .map(|(k, &j)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let remain: Vec<usize> = rest.iter().copied().filter(|&r| r != j).collect();
            sign * a.get(first, j) * matching_pfaffian(a, &remain)
        })
        .sum()
}

fn skew_from(order: usize, vals: &[f64]) -> SkewMatrix {
    let mut it = vals.iter().copied().cycle();
    let upper: Vec<f64> = (0..order * (order - 1) / 2).map(|_| it.next().unwrap()).collect();
    let mut k = 0;
    let mut table = vec![vec![0.0; order]; order];
    for i in 0..order {
        for j in i + 1..order {
            table[i][j] = upper[k];
            k += 1;
        }
    }
    SkewMatrix::from_upper(order, |i, j| table[i][j]).unwrap()
}

#[test]
fn spec_examples() {
    let id = log_det(&SquareMatrix::identity(5));
    assert_eq!((id.sign, id.log_abs), (1, 0.0));

    let c = -3.5;
    let two = SkewMatrix::from_upper(2, |_, _| c).unwrap();
    let d = log_det(two.as_square());
    assert_eq!(d.sign, 1);
    assert!((d.log_abs - 2.0 * c.abs().ln()).abs() < 1e-15);

    let block = SkewMatrix::from_upper(4, |i, j| if (i, j) == (0, 1) || (i, j) == (2, 3) { 1.0 } else { 0.0 }).unwrap();
    assert!((sqrt_det_skew(&block).unwrap().to_f64() - 1.0).abs() < 1e-15);
    let quarter = SkewMatrix::from_upper(2, |_, _| 0.25).unwrap();
    assert!((sqrt_det_skew(&quarter).unwrap().to_f64() - 0.25).abs() < 1e-16);
}

#[test]
fn random_six_by_six_against_cofactors() {
    let mut s = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    for _ in 0..50 {
        let rows: Vec<Vec<f64>> = (0..6).map(|_| (0..6).map(|_| next()).collect()).collect();
        let want = cofactor_det(&rows);
        let got = log_det(&SquareMatrix::from_rows(&rows).unwrap());
        assert_eq!(got.sign as f64, want.signum());
        assert!((got.log_abs - want.abs().ln()).abs() <= 1e-10 * want.abs().ln().abs().max(1.0));
    }
}

#[test]
fn eight_by_eight_against_matchings() {
    let vals: Vec<f64> = (0..28).map(|k| ((k * 37 % 23) as f64 - 11.0) / 7.0).collect();
    let a = skew_from(8, &vals);
    let pf = matching_pfaffian(&a, &(0..8).collect::<Vec<_>>());
    let got = sqrt_det_skew(&a).unwrap().to_f64();
    assert!((got - pf.abs()).abs() <= 1e-9 * pf.abs());
}

#[test]
fn skew_structure_is_validated() {
    let m = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
    let skew = SkewMatrix::new(m).unwrap();
    assert!(sqrt_det_skew(&skew).is_ok());
    assert!(SkewMatrix::new(SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()).is_err());
    assert!(SkewMatrix::new(SquareMatrix::zeros(3)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_squared_is_det(half in 1usize..=5, vals in prop::collection::vec(-2.0f64..2.0, 45)) {
        let order = 2 * half;
        let a = skew_from(order, &vals);
        let pf = matching_pfaffian(&a, &(0..order).collect::<Vec<_>>());
        let det = log_det(a.as_square());
        prop_assume!(pf.abs() > 1e-6);
        prop_assert_eq!(det.sign, 1);
        prop_assert!(((2.0 * pf.abs().ln()) - det.log_abs).abs() <= 1e-8 * det.log_abs.abs().max(1.0));
    }

    #[test]
    fn transpose_leaves_det_unchanged(n in 1usize..=7, vals in prop::collection::vec(-3.0f64..3.0, 49)) {
        let m = SquareMatrix::from_fn(n, |i, j| vals[i * 7 + j]);
        let (a, b) = (log_det(&m), log_det(&m.transpose()));
        prop_assert_eq!(a.sign, b.sign);
        prop_assert!((a.log_abs - b.log_abs).abs() <= 1e-12 * a.log_abs.abs().max(1.0) || a.sign == 0);
    }

    #[test]
    fn scaling_a_pair_scales_sqrt_det(half in 1usize..=4, k in 0usize..8, big in any::<bool>(), vals in prop::collection::vec(-2.0f64..2.0, 28)) {
        let order = 2 * half;
        let k = k % order;
        let c = if big { 2.0 } else { 1e-3 };
        let a = skew_from(order, &vals);
        let before = sqrt_det_skew(&a).unwrap();
        prop_assume!(!before.is_zero());
        let mut b = a.clone();
        b.scale_pair(k, c);
        let after = sqrt_det_skew(&b).unwrap();
        prop_assert!((after.log_abs - before.log_abs - c.ln()).abs() <= 1e-10 * before.log_abs.abs().max(1.0));
    }

    #[test]
    fn log_value_multiplication(x in -1e3f64..1e3, y in -1e3f64..1e3) {
        let p = LogValue::from_f64(x) * LogValue::from_f64(y);
        let want = x * y;
        prop_assert!((p.to_f64() - want).abs() <= 1e-13 * want.abs().max(1e-300));
        prop_assert_eq!(p.is_zero(), want == 0.0);
    }
}
