use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use volnet::network::{self, Architecture, Network, Topology};
use volnet::Matrix;

fn zero_biases(net: &mut Network) {
    let b = net.blocks_mut();
    b.b_h.fill(0.0);
    b.b_o.fill(0.0);
}

proptest! {
    #[test]
    fn bias_free_networks_are_odd(seed in any::<u64>(), x in prop::collection::vec(-4.0f64..4.0, 3)) {
        for arch in Architecture::ALL {
            let mut net = Network::init(Topology::new(arch, 3, 4, 2).unwrap(), seed);
            zero_biases(&mut net);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let a = net.forward(&x).unwrap().output;
            let b = net.forward(&neg).unwrap().output;
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u + v).abs() <= 1e-15 * (1.0 + u.abs()));
            }
        }
    }

    #[test]
    fn outputs_are_bounded_by_weights(seed in any::<u64>(), x in prop::collection::vec(-1e6f64..1e6, 2)) {
        // tanh saturates, so an MLFF output never exceeds Σ|w_ho| + |b_o|
        let net = Network::init(Topology::new(Architecture::Mlff, 2, 3, 1).unwrap(), seed);
        let bound: f64 = net.w_ho().iter().map(|w| w.abs()).sum::<f64>() + net.b_o()[0].abs();
        prop_assert!(net.forward(&x).unwrap().output[0].abs() <= bound + 1e-12);
    }
}

#[test]
fn gradient_matches_finite_differences_on_wider_nets() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for arch in Architecture::ALL {
        let t = Topology::new(arch, 4, 9, 3).unwrap();
        let net = Network::init(t, rng.random());
        let x = Matrix::from_vec(6, 4, (0..24).map(|_| rng.random_range(-2.0..2.0)).collect());
        let y = Matrix::from_vec(6, 3, (0..18).map(|_| rng.random_range(-1.0..1.0)).collect());
        let g = net.gradient(&x, &y).unwrap();
        let h = 1e-6;
        for k in 0..t.param_count() {
            let mut p = net.to_params();
            p[k] += h;
            let up = network::batch_loss(&t, &p, &x, &y).unwrap();
            p[k] -= 2.0 * h;
            let down = network::batch_loss(&t, &p, &x, &y).unwrap();
            let fd = (up - down) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-8, "{arch} param {k}: {fd} vs {}", g[k]);
        }
    }
}

#[test]
fn jacobian_rows_match_forward_differences() {
    let t = Topology::new(Architecture::Cffn, 3, 4, 2).unwrap();
    let net = Network::init(t, 21);
    let x = Matrix::from_rows(&[[0.1, -0.5, 0.9], [1.2, 0.3, -0.7]]);
    let j = net.jacobian(&x).unwrap();
    assert_eq!((j.rows(), j.cols()), (4, t.param_count()));
    let base = net.predict(&x).unwrap();
    let h = 1e-7;
    for k in 0..t.param_count() {
        let mut p = net.to_params();
        p[k] += h;
        let moved = network::predict(&t, &p, &x).unwrap();
        for s in 0..2 {
            for o in 0..2 {
                let fd = (moved[(s, o)] - base[(s, o)]) / h;
                assert!((fd - j[(s * 2 + o, k)]).abs() < 1e-5);
            }
        }
    }
}

#[test]
fn saved_network_predicts_identically() {
    let net = Network::init(Topology::new(Architecture::Cffn, 7, 20, 2).unwrap(), 8);
    let back = Network::from_text(&net.to_text()).unwrap();
    let x = Matrix::from_vec(3, 7, (0..21).map(|i| i as f64 / 10.0 - 1.0).collect());
    assert_eq!(back.predict(&x).unwrap(), net.predict(&x).unwrap());
    assert_eq!(back.seed(), 8);
}
