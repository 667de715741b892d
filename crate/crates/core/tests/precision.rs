use lambdamax::{EnsembleSpec, Precision};

const GENEROUS: Precision = Precision::Bits(1536);

fn check(e: EnsembleSpec) {
    for p in [0.01, 0.5, 0.99] {
        let x = e.approx_quantile(p).unwrap();
        let auto = e.exact_cdf(x).unwrap();
        let wide = e.exact_cdf_with(x, GENEROUS).unwrap();
        assert!((auto - wide).abs() <= 1e-14, "{e} at {x}: {auto} vs {wide}");
    }
}

#[test]
fn auto_precision_real_wishart() {
    check(EnsembleSpec::wishart_real(96, 96).unwrap());
    check(EnsembleSpec::wishart_real(24, 900).unwrap());
}

#[test]
fn auto_precision_complex_wishart() {
    check(EnsembleSpec::wishart_complex(80, 80).unwrap());
    check(EnsembleSpec::wishart_complex(16, 600).unwrap());
}

#[test]
fn auto_precision_gaussian() {
    check(EnsembleSpec::goe(128).unwrap());
    check(EnsembleSpec::gue(128).unwrap());
}

#[test]
fn narrow_precision_is_visibly_wrong() {
    let e = EnsembleSpec::wishart_real(96, 96).unwrap();
    let x = e.approx_quantile(0.5).unwrap();
    let wide = e.exact_cdf_with(x, GENEROUS).unwrap();
    let narrow = e.exact_cdf_with(x, Precision::Bits(64));
    assert!(narrow.map_or(true, |v| (v - wide).abs() > 1e-6));
}
