use aetomo::grid::{make_grid, ScalarField};
use aetomo::internal_data::{add_noise, ForwardModel, InternalData, Permittivity};
use aetomo::inversion::{landweber_run, project_q, LandweberConfig, StopReason};
use aetomo::io::{make_phantom, Inclusion, PhantomSpec, Shape};
use aetomo::linearization::Pairing;
use aetomo::Execution;
use proptest::prelude::*;

fn small_truth() -> Permittivity {
    let spec = PhantomSpec {
        inclusions: vec![Inclusion {
            shape: Shape::Disk { cx: 0.45, cy: 0.55, r: 0.2 },
            contrast: 1.7,
        }],
        blur_radius: 1.5,
        margin: 3,
        lambda_bound: 4.0,
    };
    make_phantom(&spec, make_grid(31).unwrap()).unwrap()
}

fn config(iterations: usize, pairing: Pairing) -> LandweberConfig {
    LandweberConfig {
        max_iterations: iterations,
        margin: 3,
        pairing,
        ..LandweberConfig::default()
    }
}

#[test]
fn execution_modes_agree_bitwise() {
    let truth = small_truth();
    let g = *truth.grid();
    let run = |e: Execution| {
        let m = ForwardModel::unit_illumination(g).unwrap().with_execution(e);
        let data = InternalData::synthesize(&m, &truth, &[2.0, 5.0, 8.0], 0.01, 3).unwrap();
        landweber_run(&m, &data, &config(8, Pairing::L2), Some(&truth)).unwrap()
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}

#[test]
fn reconstruction_improves_with_either_pairing() {
    let truth = small_truth();
    let m = ForwardModel::unit_illumination(*truth.grid()).unwrap();
    let data = InternalData::synthesize(&m, &truth, &[3.0, 6.0], 0.0, 0).unwrap();
    for pairing in [Pairing::L2, Pairing::Sobolev { alpha: 1e-3 }] {
        let t = landweber_run(&m, &data, &config(25, pairing), Some(&truth)).unwrap();
        let first = t.records[0].rel_err_l2.unwrap();
        let last = t.records.last().unwrap().rel_err_l2.unwrap();
        assert!(last < 0.8 * first, "{pairing:?}: {first} -> {last}");
        assert!(t.records.windows(2).all(|w| w[1].j <= w[0].j));
        assert!(matches!(t.stop_reason, StopReason::MaxIterations | StopReason::Stagnated));
    }
}

#[test]
fn noise_is_seeded() {
    let g = make_grid(21).unwrap();
    let psi = ScalarField::from_fn(g, |x, y| x - y);
    let a = add_noise(&psi, 0.05, 11).unwrap();
    assert_eq!(a, add_noise(&psi, 0.05, 11).unwrap());
    assert_ne!(a, add_noise(&psi, 0.05, 12).unwrap());
    let rel = a.sub(&psi).norm_l2() / psi.norm_l2();
    assert!((rel - 0.05).abs() < 1e-9, "{rel}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Projection lands in the admissible set and is idempotent.
    #[test]
    fn projection_is_idempotent(vals in prop::collection::vec(-3.0f64..9.0, 121), lambda in 1.5f64..6.0) {
        let g = make_grid(11).unwrap();
        let p = project_q(&ScalarField::new(g, vals).unwrap(), lambda, 2).unwrap();
        let again = project_q(p.field(), lambda, 2).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert!(p.field().values().iter().all(|&v| v >= 1.0 / lambda && v <= lambda));
    }
}
