use fibdyn::measure::{
    conjecture_explorer, estimates_to_csv, interior_polydisk, kminus_positivity_check, mc_measure,
    polydisk_invariance_check, MeasureEstimate, SampleBox, SetSelector,
};
use fibdyn::{Error, ParamContext};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn interior_polydisk_examples() {
    let d = interior_polydisk(c(0.2)).unwrap();
    assert!(d.a == 0.5 && (d.margin - 0.05).abs() < 1e-15);
    assert_eq!(interior_polydisk(c(0.0)).unwrap().margin, 0.25);
    assert!(interior_polydisk(c(0.3)).is_none());
    let check = polydisk_invariance_check(c(0.2), 0.5, 10_000, 1, 100);
    assert!(check.passed() && check.max_norm <= 0.5, "{check:?}");
}

#[test]
fn positivity_example() {
    let r = kminus_positivity_check(-3.0, 2000, 1, 1000).unwrap();
    assert!(r.attracting && r.fraction() == 1.0);
    assert!((r.product_modulus - r.expected_product).abs() < 1e-6);
    assert!((r.expected_product - 0.767_591_879).abs() < 1e-6);
    assert!(kminus_positivity_check(-1.0, 10, 1, 10).is_err());
}

#[test]
fn estimate_formula_and_row() {
    let ctx = ParamContext::real(0.2);
    let b = SampleBox::Real([-0.4, 0.4, -0.4, 0.4]);
    let e = mc_measure(&ctx, SetSelector::Kplus, b, 4000, 9, 1000).unwrap();
    assert_eq!(e.hits, 4000);
    assert!((e.value - 0.64).abs() < 1e-12 && e.stderr == 0.0);
    let e = mc_measure(&ctx, SetSelector::Kplus, SampleBox::Real([-3.0, 3.0, -3.0, 3.0]), 4000, 9, 1000).unwrap();
    let p = e.hits as f64 / 4000.0;
    assert!((e.value - 36.0 * p).abs() < 1e-12);
    assert!((e.stderr - 36.0 * (p * (1.0 - p) / 4000.0).sqrt()).abs() < 1e-12);
    assert!(e.csv_row().starts_with("0.2,kplus,real:-3:3:-3:3,4000,1000,"));
    assert!(matches!(mc_measure(&ctx, SetSelector::K, b, 0, 1, 10), Err(Error::InvalidSpec(_))));
}

#[test]
fn explorer_examples() {
    let rows = conjecture_explorer(&[], SampleBox::Polydisk(1.0), 100, 1, 100).unwrap();
    assert!(rows.is_empty());
    assert_eq!(estimates_to_csv(&rows, false).trim(), MeasureEstimate::CSV_HEADER);

    let rows = conjecture_explorer(&[c(0.2)], SampleBox::Polydisk(1.0), 2000, 1, 500).unwrap();
    assert!(rows[0].set == SetSelector::Kplus && rows[0].value > 0.0);

    let b = SampleBox::Complex([-1.32, -1.28, -0.02, 0.02, -1.32, -1.28, -0.02, 0.02]);
    let rows = conjecture_explorer(&[c(-3.0)], b, 2000, 1, 500).unwrap();
    assert!(rows[1].set == SetSelector::Kminus && rows[1].value > 0.0, "{:?}", rows[1]);
    assert!(estimates_to_csv(&rows, true).starts_with("# EXPLORATORY"));
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let ctx = ParamContext::new(Complex64::new(-0.5, 0.1));
    let run = || mc_measure(&ctx, SetSelector::Kplus, SampleBox::Polydisk(1.5), 5000, 42, 300).unwrap();
    let one = in_pool(1, run);
    let many = in_pool(7, run);
    assert_eq!(one, many);
    assert_eq!(one.csv_row(), run().csv_row());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hits_do_not_grow_with_budget(seed in 0u64..1000, v in -1.0..0.25f64, budget in 2usize..200) {
        let ctx = ParamContext::real(v);
        for set in [SetSelector::Kplus, SetSelector::Kminus] {
            let b = SampleBox::Real([-2.0, 2.0, -2.0, 2.0]);
            let lo = mc_measure(&ctx, set, b, 2000, seed, budget).unwrap();
            let hi = mc_measure(&ctx, set, b, 2000, seed, 2 * budget).unwrap();
            prop_assert!(hi.hits <= lo.hits, "{set:?}: {} > {}", hi.hits, lo.hits);
        }
    }
}
