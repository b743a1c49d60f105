mod common;

use crossbar_sim::data;
use crossbar_sim::device::{DeviceModel, UpdateMode};
use crossbar_sim::experiment::{run_experiment_on, ExperimentConfig};
use crossbar_sim::nn::{
    load_checkpoint, save_checkpoint, sigmoid, softmax, train_step, Mlp, OptimizerState,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{data_path, ToyProblem, TOY_SHAPES};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn softmax_is_a_distribution(z in prop::collection::vec(-350.0..350.0f64, 1..12)) {
        // logit gaps stay below 700, where e^-gap is still a normal f64
        let s = softmax(&z);
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(s.iter().all(|p| *p > 0.0));
    }

    #[test]
    fn sigmoid_is_monotone_and_open(a in -36.0..36.0f64, b in -36.0..36.0f64) {
        // beyond |x| ≈ 36.7, 1 − S(x) is below half an ulp of 1
        let (sa, sb) = (sigmoid(a), sigmoid(b));
        prop_assert!(sa > 0.0 && sa < 1.0);
        if a < b {
            prop_assert!(sa <= sb);
        }
    }

    #[test]
    fn backprop_matches_finite_differences(seed in any::<u64>(), shape in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ToyProblem::random(&mut rng, TOY_SHAPES[shape]);
        let err = p.max_gradient_error(1e-5);
        prop_assert!(err <= 1e-5, "relative error {}", err);
    }

    #[test]
    fn adam_steps_are_bounded_for_steady_gradient_scale(
        seed in any::<u64>(),
        scale in 1e-4..10.0f64,
        steps in 1usize..300,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = 0.01;
        let mut opt = OptimizerState::adam(eta).unwrap();
        for _ in 0..steps {
            opt.begin_step();
            let g: Vec<f64> = (0..4).map(|_| if rng.random::<bool>() { scale } else { -scale }).collect();
            for s in opt.adam_delta(0, &g) {
                prop_assert!(s.abs() <= eta * (1.0 + 10.0 * 1e-8), "step {}", s);
            }
        }
    }
}

#[test]
fn shifted_softmax_is_unchanged() {
    // logits that stay exact after adding 1000
    let z = [0.5, -1.25, 2.0, 0.0];
    let shifted: Vec<f64> = z.iter().map(|v| v + 1000.0).collect();
    for (a, b) in softmax(&z).iter().zip(softmax(&shifted)) {
        assert!((a - b).abs() <= 1e-14);
    }
}

#[test]
fn hidden_bias_gradient_is_the_hidden_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = ToyProblem::random(&mut rng, [1, 2, 2]);
    let net = Mlp::from_parts(&p.specs, &p.weights, p.biases.clone(), 2.0, &DeviceModel::numeric()).unwrap();
    let grads = net.backward(&net.forward(&p.x).unwrap(), &p.y).unwrap();
    let h = 1e-5;
    for i in 0..2 {
        let mut plus = p.biases.clone();
        let mut minus = p.biases.clone();
        plus[0][i] += h;
        minus[0][i] -= h;
        let fd = (p.cost(&p.weights, &plus) - p.cost(&p.weights, &minus)) / (2.0 * h);
        assert!((grads[0].delta[i] - fd).abs() <= 1e-10, "{} vs {fd}", grads[0].delta[i]);
    }
}

#[test]
fn numeric_training_loss_descends() {
    let ds = data::load_wdbc(data_path()).unwrap();
    let mut cfg = ExperimentConfig::preset("taox", UpdateMode::Numeric);
    cfg.epochs = 6;
    cfg.eta = Some(0.01);
    let result = run_experiment_on(&cfg, &ds).unwrap();
    let loss = &result.train_loss;
    let descents = loss.windows(2).filter(|w| w[1] <= w[0]).count();
    assert!(descents >= 4, "{loss:?}");
}

#[test]
fn checkpoint_of_trained_net_reloads_bitwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let device = DeviceModel::numeric();
    let mut net = Mlp::new(&Mlp::classifier_specs(), 2.0, &device, &mut rng).unwrap();
    let mut opt = OptimizerState::sgd(0.1).unwrap();
    let xs: Vec<Vec<f64>> = (0..20).map(|_| (0..30).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    for (k, x) in xs.iter().enumerate() {
        let y = if k % 2 == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
        train_step(&mut net, &mut opt, x, &y, 1, &mut rng).unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.txt");
    save_checkpoint(&net, &path).unwrap();
    let back = load_checkpoint(&path, &device).unwrap();
    for x in &xs {
        let a = net.predict(x).unwrap();
        let b = back.predict(x).unwrap();
        assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
