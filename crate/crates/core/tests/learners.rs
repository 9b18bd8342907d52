use fscale_core::exec::rng;
use fscale_core::learners::{default_feature_names, Classifier, ClassifierKind, Dataset, ForestParams, Hyper, Objective};
use proptest::prelude::*;
use rand::Rng;

fn random_design(seed: u64, n: usize, d: usize) -> (Vec<f64>, Vec<i8>) {
    let mut r = rng(seed);
    let x = (0..n * d).map(|_| r.random_range(-3.0..3.0)).collect();
    let y = (0..n).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    (x, y)
}

#[test]
fn logistic_gradient_matches_central_differences() {
    let (x, y) = random_design(1, 80, 5);
    let obj = Objective { x: &x, y: &y, d: 5, l2: 0.05 };
    let mut r = rng(2);
    for _ in 0..10 {
        let theta: Vec<f64> = (0..6).map(|_| r.random_range(-2.0..2.0)).collect();
        let (value, grad) = obj.value_and_gradient(&theta);
        assert!((value - obj.value(&theta)).abs() < 1e-12);
        let h = 1e-5;
        let mut err = 0.0;
        let mut norm = 0.0;
        for j in 0..6 {
            let (mut a, mut b) = (theta.clone(), theta.clone());
            a[j] += h;
            b[j] -= h;
            let fd = (obj.value(&a) - obj.value(&b)) / (2.0 * h);
            err += (grad[j] - fd).powi(2);
            norm += grad[j] * grad[j];
        }
        assert!(err.sqrt() / norm.sqrt() < 1e-5);
    }
}

#[test]
fn hessian_matches_gradient_differences() {
    let (x, y) = random_design(3, 50, 3);
    let obj = Objective { x: &x, y: &y, d: 3, l2: 0.1 };
    let theta = [0.3, -0.7, 1.1, 0.2];
    let h = obj.hessian(&theta);
    let eps = 1e-6;
    for j in 0..4 {
        let (mut a, mut b) = (theta.to_vec(), theta.to_vec());
        a[j] += eps;
        b[j] -= eps;
        let (_, ga) = obj.value_and_gradient(&a);
        let (_, gb) = obj.value_and_gradient(&b);
        for i in 0..4 {
            let fd = (ga[i] - gb[i]) / (2.0 * eps);
            // The intercept diagonal carries a 1e-10 ridge.
            assert!((h[i * 4 + j] - fd).abs() < 1e-6, "H[{i}][{j}] = {} vs {fd}", h[i * 4 + j]);
        }
    }
}

fn unpruned() -> Hyper {
    let mut hyper = Hyper::default();
    hyper.cart.min_leaf = 1;
    hyper.cart.max_depth = None;
    hyper
}

#[test]
fn cart_fits_consistent_data_exactly() {
    let mut r = rng(4);
    let rows: Vec<Vec<f64>> = (0..300).map(|_| (0..4).map(|_| r.random::<f64>()).collect()).collect();
    let y: Vec<i8> = (0..300).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    let data = Dataset::new(rows, y, default_feature_names(4)).unwrap();
    let cart = Classifier::fit(ClassifierKind::Cart, &data, &unpruned(), 0).unwrap();
    for i in 0..data.len() {
        assert_eq!(cart.predict(data.row(i)).unwrap(), data.label(i));
    }
}

#[test]
fn single_unbagged_tree_forest_is_cart() {
    let mut r = rng(5);
    let rows: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| r.random::<f64>()).collect()).collect();
    let y: Vec<i8> = rows.iter().map(|x| if x[0] + x[2] > 1.0 { 1 } else { -1 }).collect();
    let data = Dataset::new(rows, y, default_feature_names(3)).unwrap();
    let mut hyper = unpruned();
    hyper.rforest = ForestParams {
        n_trees: 1,
        max_features: Some(3),
        bootstrap: false,
        max_depth: None,
        min_leaf: 1,
    };
    let cart = Classifier::fit(ClassifierKind::Cart, &data, &hyper, 0).unwrap();
    let forest = Classifier::fit(ClassifierKind::Rforest, &data, &hyper, 99).unwrap();
    let (Classifier::Cart(tree), Classifier::Rforest(f)) = (&cart, &forest) else {
        panic!("unexpected kinds");
    };
    assert_eq!(f.trees.len(), 1);
    assert_eq!(&f.trees[0], tree);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn probabilities_stay_in_unit_interval(
        seed in any::<u64>(),
        probe in prop::collection::vec(-1e6f64..1e6, 3),
    ) {
        let mut r = rng(seed);
        let rows: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| r.random_range(-5.0..5.0)).collect()).collect();
        let mut y: Vec<i8> = (0..40).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
        y[0] = 1;
        y[1] = -1;
        let data = Dataset::new(rows, y, default_feature_names(3)).unwrap();
        for kind in ClassifierKind::ALL {
            let c = Classifier::fit(kind, &data, &Hyper::default(), seed).unwrap();
            let p = c.predict_proba(&probe).unwrap();
            prop_assert!((0.0..=1.0).contains(&p), "{kind}: {p}");
            let w = c.feature_weights();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9 || w.iter().all(|&x| x == 0.0));
        }
    }
}
