mod common;

use a1_core::module::{suspend, tensor};
use a1_core::structure::{classify, realize, seagull};
use a1_core::{A1Module, Execution};
use proptest::prelude::*;

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relations_hold(seed in seeds()) {
        let m = common::random_small_module(&mut common::rng(seed));
        prop_assert_eq!(common::check_relations(&m), Ok(()));
        prop_assert!(m.check_relations(Execution::Sequential).is_ok());
    }

    #[test]
    fn sq2_kernel_lemma(seed in seeds()) {
        let m = common::random_flock(&mut common::rng(seed));
        prop_assert_eq!(common::check_sq2_kernel_lemma(&m), Ok(()));
    }

    #[test]
    fn sq1_vanishes_on_bottom(seed in seeds()) {
        let m = common::random_connective_reduced(&mut common::rng(seed));
        prop_assert_eq!(common::check_sq1_bottom_lemma(&m), Ok(()));
    }

    #[test]
    fn d2_is_independent_of_representatives(seed in seeds()) {
        let mut rng = common::rng(seed);
        let m = common::random_small_module(&mut rng);
        prop_assert_eq!(common::check_d2_independence(&m, &mut rng), Ok(()));
    }

    #[test]
    fn tensor_to_f2_is_symmetric(seed in seeds()) {
        let mut rng = common::rng(seed);
        let n = common::random_small_module(&mut rng);
        let m = common::random_small_module(&mut rng);
        prop_assert_eq!(common::check_tensor_symmetry(&n, &m), Ok(()));
    }

    #[test]
    fn classify_inverts_realize(seed in seeds()) {
        let mut rng = common::rng(seed);
        let d = common::random_descriptor(&mut rng, 5, -4, 16, true);
        let m = common::random_automorphism(&realize(&d).unwrap(), &mut rng);
        prop_assert_eq!(classify(&m).unwrap().descriptor, d);
    }

    #[test]
    fn parallel_matches_sequential(seed in seeds()) {
        let mut rng = common::rng(seed);
        let a = common::random_small_module(&mut rng);
        let b = common::random_small_module(&mut rng);
        let s = a1_core::module::tensor_with(&a, &b, Execution::Sequential);
        let p = a1_core::module::tensor_with(&a, &b, Execution::Parallel);
        prop_assert_eq!(s, p);
    }
}

#[test]
fn derived_relations() {
    assert_eq!(common::check_algebra_relations(), Ok(()));
}

// The symmetry check is only meaningful when maps to F2 exist.
#[test]
fn symmetry_has_content() {
    let y = seagull(1);
    let dual = suspend(&y, -5);
    assert!(tensor(&y, &dual).dim(0) > 0);
    assert_eq!(common::check_tensor_symmetry(&y, &dual), Ok(()));
    assert_eq!(common::check_tensor_symmetry(&seagull(2), &suspend(&seagull(2), -9)), Ok(()));
    assert_eq!(common::check_tensor_symmetry(&A1Module::free(), &suspend(&y, -6)), Ok(()));
}

#[test]
fn checks_reject_bad_input() {
    // A(1) is not Q0-local and has Sq1 != 0 in degree 0; ΣΥ1 is not based at 0.
    assert!(common::check_sq1_bottom_lemma(&A1Module::free()).is_err());
    assert!(common::check_sq1_bottom_lemma(&suspend(&seagull(1), 1)).is_err());
}
