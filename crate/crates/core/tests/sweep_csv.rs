use proptest::prelude::*;
use qtele::sweep::{
    canonical, format_sig12, parse_csv, reevaluate, run, to_csv_string, Grid, InputState, Mode, SweepSpec, UNIT_SLACK,
};

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn small(mode: Mode, state: InputState) -> SweepSpec {
    let mut s = SweepSpec::defaults(mode, state);
    if mode != Mode::Negativity {
        s.grid.steps = 11;
    }
    s
}

#[test]
fn output_independent_of_thread_count() {
    for (mode, state) in [
        (Mode::Ideal, InputState::Cat),
        (Mode::Noisy, InputState::Coherent),
        (Mode::Negativity, InputState::Coherent),
    ] {
        let spec = small(mode, state);
        let one = with_threads(1, || to_csv_string(&run(&spec).unwrap()));
        let many = with_threads(4, || to_csv_string(&run(&spec).unwrap()));
        assert_eq!(one, many);
        assert!(!one.contains('\r'));
    }
}

#[test]
fn emitted_values_in_range() {
    for state in [
        InputState::Coherent,
        InputState::Cat,
        InputState::Squeezed,
        InputState::Tmsv,
    ] {
        for r in run(&SweepSpec::defaults(Mode::Ideal, state)).unwrap() {
            assert!((0.0..=1.0 + UNIT_SLACK).contains(&r.fidelity), "{r:?}");
            assert!((0.0..=1.0 + UNIT_SLACK).contains(&r.success_prob), "{r:?}");
        }
    }
    for r in run(&SweepSpec::defaults(Mode::Noisy, InputState::Coherent)).unwrap() {
        assert!((0.0..=1.0 + UNIT_SLACK).contains(&r.fidelity), "{r:?}");
        assert!((0.0..=1.0 + UNIT_SLACK).contains(&r.success_prob), "{r:?}");
    }
}

#[test]
fn negativity_bit_equals_depolarizing() {
    let rows = run(&SweepSpec::defaults(Mode::Negativity, InputState::Coherent)).unwrap();
    let col = |name: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.noise_kind.map(|k| k.name()) == Some(name))
            .map(|r| r.fidelity)
            .collect()
    };
    let (bit, depol) = (col("bit_flip"), col("depolarizing"));
    assert_eq!(bit.len(), depol.len());
    for (b, d) in bit.iter().zip(&depol) {
        assert!((b - d).abs() < 1e-9);
    }
}

#[test]
fn qutrit_rows_dominate_qubit_rows() {
    let mut s = SweepSpec::defaults(Mode::Ideal, InputState::Coherent);
    s.grid = Grid::new(0.01, 1.5, 150);
    let rows = run(&s).unwrap();
    let pick = |dim, n| rows.iter().filter(move |r| r.channel_dim == dim && r.arms == n);
    for (q3, q2) in pick(3, 3).zip(pick(2, 10)) {
        assert_eq!(q3.param, q2.param);
        assert!(q3.fidelity >= q2.fidelity - 1e-9);
        assert!(q3.success_prob >= q2.success_prob - 1e-9);
    }
}

proptest! {
    #[test]
    fn sig12_round_trip_is_stable(x in -1e6f64..1e6) {
        let s = format_sig12(x);
        prop_assert_eq!(format_sig12(s.parse().unwrap()), s.clone());
        prop_assert!((canonical(x) - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }

    #[test]
    fn parsed_rows_reevaluate_exactly(lo in 0.0f64..1.5, width in 0.0f64..1.5, steps in 1usize..6) {
        let mut s = SweepSpec::defaults(Mode::Ideal, InputState::Coherent);
        s.grid = Grid::new(lo, lo + width, steps);
        let text = to_csv_string(&run(&s).unwrap());
        for row in parse_csv(&text).unwrap() {
            let again = reevaluate(Mode::Ideal, InputState::Coherent, &row).unwrap();
            prop_assert_eq!(again.to_csv_line(), row.to_csv_line());
        }
    }
}
