use hexaug::classifier::{argmax, evaluate, forward_logits, loss_and_grad, softmax, LinearModel};
use hexaug::EmbeddingDataset;
use proptest::prelude::*;

fn model_strategy(k: usize, d: usize) -> impl Strategy<Value = LinearModel> {
    (
        proptest::collection::vec(-5.0f64..5.0, k * d),
        proptest::collection::vec(-5.0f64..5.0, k),
    )
        .prop_map(move |(weights, bias)| LinearModel {
            k,
            d,
            weights,
            bias,
        })
}

proptest! {
    #[test]
    fn softmax_is_a_distribution(logits in proptest::collection::vec(-1e4f64..1e4, 1..12)) {
        let p = softmax(&logits);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
        prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert_eq!(argmax(&p), argmax(&logits));
    }

    #[test]
    fn random_model_probabilities_normalize(m in model_strategy(4, 3), x in proptest::collection::vec(-10f32..10.0, 3)) {
        let z = forward_logits(&m, &x).unwrap();
        prop_assert!((softmax(&z).iter().sum::<f64>() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn accuracy_matches_argmax_count(
        m in model_strategy(3, 2),
        rows in proptest::collection::vec((0u32..3, -3f32..3.0, -3f32..3.0), 1..40),
    ) {
        let labels: Vec<u32> = rows.iter().map(|r| r.0).collect();
        let vectors: Vec<f32> = rows.iter().flat_map(|r| [r.1, r.2]).collect();
        let ds = EmbeddingDataset::new(2, 3, labels, vectors).unwrap();
        let hits = rows.iter().filter(|r| {
            let z: Vec<f64> = (0..3).map(|c| m.bias[c] + m.weights[c * 2] * r.1 as f64 + m.weights[c * 2 + 1] * r.2 as f64).collect();
            let mut best = 0;
            for c in 1..3 { if z[c] > z[best] { best = c; } }
            best == r.0 as usize
        }).count();
        let e = evaluate(&m, &ds, None).unwrap();
        prop_assert_eq!(e.correct, hits);
        prop_assert!((e.accuracy - 100.0 * hits as f64 / rows.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_zero_l2_bias_sums_to_zero(m in model_strategy(3, 2), y in 0u32..3) {
        // Softmax probabilities minus one-hot sum to zero over classes.
        let ds = EmbeddingDataset::new(2, 3, vec![y], vec![0.5, -1.5]).unwrap();
        let (_, g) = loss_and_grad(&m, &ds, 0.0).unwrap();
        prop_assert!(g.bias.iter().sum::<f64>().abs() < 1e-12);
    }
}

#[test]
fn perfect_model_scores_100() {
    let mut m = LinearModel::zeros(3, 3);
    for c in 0..3 {
        m.weights[c * 3 + c] = 1.0;
    }
    let ds = EmbeddingDataset::new(
        3,
        3,
        vec![0, 1, 2],
        vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    assert_eq!(evaluate(&m, &ds, None).unwrap().accuracy, 100.0);
}

#[test]
fn checkpoint_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.lmd");
    let mut m = LinearModel::zeros(2, 3);
    m.weights = vec![1.5, -2.0, 0.25, 0.0, 4.0, -0.5];
    m.bias = vec![0.125, -8.0];
    m.save(&path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap()[..4], *b"LMD1");
    assert_eq!(LinearModel::load(&path).unwrap(), m);
}
