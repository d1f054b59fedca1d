use pbnet::network::{alpha_constant, lemma4_weight_sum, perron_vector, NetworkError};
use pbnet::{Adjacency, CombinationMatrix, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn residual(network: &Network) -> f64 {
    let n = network.len();
    let v = network.perron();
    (0..n)
        .map(|l| ((0..n).map(|k| network.weight(l, k) * v[k]).sum::<f64>() - v[l]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn averaging_rule_constants_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let n = rng.random_range(2..=20);
        let lambda = rng.random_range(0.01..0.99);
        let adj = Adjacency::random_strongly_connected(n, 0.3, &mut rng).unwrap();
        let network = Network::averaging(&adj, lambda).unwrap();
        assert!((network.alpha() - 1.0).abs() < 1e-9, "alpha {}", network.alpha());
        assert!((network.lemma4_weight_sum() - lambda).abs() < 1e-9);
        assert!(residual(&network) < 1e-10);
        let v = network.perron();
        assert!(v.iter().all(|x| *x > 0.0));
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn columns_sum_to_one() {
    for adj in [Adjacency::ring(7), Adjacency::star(5), Adjacency::complete(4)] {
        let network = Network::averaging(&adj, 0.4).unwrap();
        for k in 0..network.len() {
            let total: f64 = (0..network.len()).map(|l| network.weight(l, k)).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!((network.weight(k, k) - 0.4).abs() < 1e-15);
        }
    }
}

#[test]
fn star_perron_vector_favours_hub() {
    let network = Network::averaging(&Adjacency::star(6), 0.5).unwrap();
    let v = network.perron();
    assert!(v[0] > v[1]);
    assert!((v[1] - v[5]).abs() < 1e-12);
}

#[test]
fn general_matrix_constants() {
    // Column-stochastic, not produced by the averaging rule.
    let rows = vec![vec![0.5, 0.2, 0.3], vec![0.3, 0.6, 0.1], vec![0.2, 0.2, 0.6]];
    let matrix = CombinationMatrix::from_rows(&rows).unwrap();
    let v = perron_vector(&matrix).unwrap();
    let alpha = alpha_constant(&matrix, &v).unwrap();
    let lem4 = lemma4_weight_sum(&matrix, &v).unwrap();
    let mut expected_alpha = 0.0;
    let mut expected_lem4 = 0.0;
    for l in 0..3 {
        for n in (0..3).filter(|&n| n != l) {
            let (a, ann) = (rows[n][l], rows[n][n]);
            expected_alpha += v[l] * a / (1.0 - ann);
            expected_lem4 += v[l] * a * ann / (1.0 - ann);
        }
    }
    assert!((alpha - expected_alpha).abs() < 1e-12);
    assert!((lem4 - expected_lem4).abs() < 1e-12);
    let network = Network::from_matrix(matrix).unwrap();
    assert!(residual(&network) < 1e-10);
}

#[test]
fn invalid_networks_are_rejected() {
    assert!(matches!(
        Network::averaging(&Adjacency::ring(4), 0.0),
        Err(NetworkError::InvalidLambda(_))
    ));
    assert!(matches!(
        Network::averaging(&Adjacency::ring(4), 1.5),
        Err(NetworkError::InvalidLambda(_))
    ));
    let bad = CombinationMatrix::from_rows(&[vec![0.5, 0.5], vec![0.4, 0.5]]).unwrap();
    assert!(matches!(
        Network::from_matrix(bad),
        Err(NetworkError::NotLeftStochastic { .. })
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(Adjacency::random_strongly_connected(5, 0.0, &mut rng).is_err());
}
