use homlab::{BracketJson, TensorJson};
use homlab_core::CurvatureDerivative;
use proptest::prelude::*;

type Entries = (usize, usize, Vec<(usize, usize, usize, f64)>);

fn entries() -> impl Strategy<Value = Entries> {
    (0usize..=1, 2usize..=4).prop_flat_map(|(q, m)| {
        let n = q + m;
        let key = (0..n, 0..n, 0..n).prop_filter("i < j", |(i, j, _)| i < j);
        let value = (-10.0f64..10.0).prop_filter("nonzero", |v| *v != 0.0);
        prop::collection::btree_map(key, value, 0..8).prop_map(move |map| {
            let list = map.into_iter().map(|((i, j, k), v)| (i, j, k, v)).collect();
            (q, m, list)
        })
    })
}

fn tensor() -> impl Strategy<Value = CurvatureDerivative> {
    (0usize..=2, 2usize..=4).prop_flat_map(|(k, m)| {
        let len = m.pow(k as u32) * (m * (m - 1) / 2).pow(2);
        prop::collection::vec(-1e3f64..1e3, len)
            .prop_map(move |data| CurvatureDerivative::from_data(k, m, data).unwrap())
    })
}

proptest! {
    #[test]
    fn bracket_json_round_trips((q, m, coeff) in entries()) {
        let json = BracketJson { q, m, coeff };
        let b = json.to_bracket().unwrap();
        for &(i, j, k, v) in &json.coeff {
            prop_assert_eq!(b.get(i, j, k), v);
            prop_assert_eq!(b.get(j, i, k), -v);
        }
        let text = serde_json::to_string(&BracketJson::from_bracket(&b)).unwrap();
        let back: BracketJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_bracket().unwrap(), b);
    }

    #[test]
    fn tensor_json_round_trips(t in tensor()) {
        let json = TensorJson::from_tensor(&t);
        prop_assert_eq!(json.shape.len(), t.order() + 4);
        let text = serde_json::to_string(&json).unwrap();
        let back: TensorJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_tensor(0.0).unwrap(), t);
    }

    #[test]
    fn dense_tensor_norm_matches(t in tensor()) {
        // the dense array lists each pair coordinate four times
        let json = TensorJson::from_tensor(&t);
        let dense: f64 = json.data.iter().map(|v| v * v).sum();
        prop_assert!((dense.sqrt() - 2.0 * t.norm() / 2f64.sqrt()).abs() <= 1e-9 * dense.sqrt().max(1.0));
    }
}
