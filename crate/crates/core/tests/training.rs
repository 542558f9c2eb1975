use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use volnet::network::{Architecture, Network, Topology};
use volnet::train::{self, Algorithm, StopReason, TrainConfig, TrainerSpec};
use volnet::Matrix;

fn noisy_task(n: usize, seed: u64) -> (Matrix, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..n * 2).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y: Vec<f64> = x
        .chunks(2)
        .map(|r| (1.5 * r[0]).sin() * 0.6 + 0.3 * r[1] + rng.random_range(-0.2..0.2))
        .collect();
    (Matrix::from_vec(n, 2, x), Matrix::from_vec(n, 1, y))
}

#[test]
fn every_algorithm_is_deterministic() {
    let (x, y) = noisy_task(40, 1);
    let config = TrainConfig {
        max_epochs: 30,
        ..TrainConfig::default()
    };
    for alg in Algorithm::ALL {
        let net = Network::init(Topology::new(Architecture::Cffn, 2, 4, 1).unwrap(), 77);
        let a = train::train(&net, &TrainerSpec::new(alg), &config, (&x, &y), None).unwrap();
        let b = train::train(&net, &TrainerSpec::new(alg), &config, (&x, &y), None).unwrap();
        assert_eq!(a, b, "{alg}");
    }
}

#[test]
fn every_algorithm_fits_the_linear_task_with_a_cascade_net() {
    let xs: Vec<f64> = (0..50).map(|i| -1.0 + 2.0 * i as f64 / 49.0).collect();
    let x = Matrix::from_vec(50, 1, xs.clone());
    let y = Matrix::from_vec(50, 1, xs.iter().map(|v| 0.8 * v).collect());
    let config = TrainConfig {
        max_epochs: 200,
        goal: 1e-4,
        patience: 0,
        min_grad: 0.0,
        seed: 0,
    };
    for alg in Algorithm::ALL {
        let net = Network::init(Topology::new(Architecture::Cffn, 1, 3, 1).unwrap(), 2);
        let (trained, record) = train::train(&net, &TrainerSpec::new(alg), &config, (&x, &y), None).unwrap();
        let loss = trained.batch_loss(&x, &y).unwrap();
        assert!(loss < 1e-3, "{alg}: {loss} after {} epochs ({})", record.epochs_run, record.stop_reason);
    }
}

#[test]
fn early_stopping_returns_the_validation_minimum() {
    let (x, y) = noisy_task(30, 2);
    let (vx, vy) = noisy_task(30, 3);
    let config = TrainConfig {
        max_epochs: 500,
        goal: 0.0,
        patience: 4,
        min_grad: 0.0,
        seed: 0,
    };
    let net = Network::init(Topology::new(Architecture::Mlff, 2, 25, 1).unwrap(), 5);
    let (trained, record) = train::train(&net, &TrainerSpec::new(Algorithm::Lm), &config, (&x, &y), Some((&vx, &vy))).unwrap();
    assert_eq!(record.stop_reason, StopReason::EarlyStop);
    let curve = &record.validation_loss_curve;
    let best = curve.iter().copied().fold(f64::INFINITY, f64::min);
    let best_epoch = curve.iter().position(|&v| v == best).unwrap();
    // the run ends exactly `patience` epochs after the minimum
    assert_eq!(curve.len(), best_epoch + 1 + 4);
    assert_eq!(trained.batch_loss(&vx, &vy).unwrap(), best);
    assert_eq!(record.train_loss_curve.len(), record.epochs_run);
}

#[test]
fn patience_zero_runs_the_full_budget() {
    let (x, y) = noisy_task(30, 4);
    let (vx, vy) = noisy_task(30, 5);
    let config = TrainConfig {
        max_epochs: 25,
        goal: 0.0,
        patience: 0,
        min_grad: 0.0,
        seed: 0,
    };
    let net = Network::init(Topology::new(Architecture::Mlff, 2, 6, 1).unwrap(), 5);
    let (_, record) = train::train(&net, &TrainerSpec::new(Algorithm::Rprop), &config, (&x, &y), Some((&vx, &vy))).unwrap();
    assert_eq!((record.epochs_run, record.stop_reason), (25, StopReason::MaxEpochs));
}

#[test]
fn goal_met_before_training_runs_zero_epochs() {
    let x = Matrix::from_rows(&[[0.5], [-0.5]]);
    let net = Network::init(Topology::new(Architecture::Mlff, 1, 2, 1).unwrap(), 1);
    let y = net.predict(&x).unwrap();
    let (_, record) = train::train(&net, &TrainerSpec::new(Algorithm::Bfgs), &TrainConfig::default(), (&x, &y), None).unwrap();
    assert_eq!((record.epochs_run, record.stop_reason), (0, StopReason::GoalMet));
}

#[test]
fn diverging_learning_rate_is_reported() {
    let (x, y) = noisy_task(20, 6);
    let mut spec = TrainerSpec::new(Algorithm::Rprop);
    spec.hyper.rprop.delta0 = 1e300;
    spec.hyper.rprop.delta_max = 1e308;
    spec.hyper.rprop.inc = 1e10;
    let net = Network::init(Topology::new(Architecture::Cffn, 2, 3, 1).unwrap(), 9);
    let err = train::train(&net, &spec, &TrainConfig::default(), (&x, &y), None);
    assert!(matches!(err, Err(train::TrainError::NumericalDivergence { .. })), "{err:?}");
}
