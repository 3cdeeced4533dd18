use predprey::model::{
    apply_event, build_stoichiometry, build_stoichiometry_heterogeneous, build_stoichiometry_homogeneous, propensities,
    transition_rates_heterogeneous, Cell, Direction, Lattice, LatticeState, ModelParams,
};
use proptest::prelude::*;

fn lattice_strategy() -> impl Strategy<Value = Lattice> {
    prop_oneof![
        Just(Lattice::WellMixed),
        (2usize..8).prop_map(|cells| Lattice::Line { cells }),
        (1usize..4, 1usize..4).prop_map(|(nx, ny)| Lattice::Grid { nx, ny }),
    ]
}

fn state_on(lattice: Lattice) -> impl Strategy<Value = LatticeState> {
    (2u32..30).prop_flat_map(move |nc| {
        prop::collection::vec((0..=nc, 0..=nc), lattice.n_cells()).prop_map(move |pairs| {
            let cells = pairs
                .into_iter()
                .map(|(a, b)| {
                    let b = b.min(nc - a);
                    Cell::new(a, b, nc - a - b)
                })
                .collect();
            LatticeState::new(lattice, nc, cells).unwrap()
        })
    })
}

fn state_strategy() -> impl Strategy<Value = LatticeState> {
    lattice_strategy().prop_flat_map(state_on)
}

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(
        |(b, p1, p2, d1, d2, m, x, y)| {
            let (q1, q2) = (x * 0.6, y * 0.4);
            ModelParams { b_r: b, p1_r: p1, p2_r: p2, d1_r: d1, d2_r: d2, m1_r: m, m2_r: m, mu: x, q1, q2, ..ModelParams::default() }
        },
    )
}

#[test]
fn stoichiometry_rows_sum_to_zero() {
    let v = build_stoichiometry_homogeneous();
    assert!((0..v.n_rows()).all(|i| v.row_sum(i) == 0));
    for mc in [1, 2, 5, 10] {
        let v = build_stoichiometry_heterogeneous(mc).unwrap();
        assert_eq!(v.n_rows(), 13 * mc);
        assert!((0..v.n_rows()).all(|i| v.row_sum(i) == 0), "Mc = {mc}");
    }
    let v = build_stoichiometry(Lattice::Grid { nx: 3, ny: 2 }).unwrap();
    assert!((0..v.n_rows()).all(|i| v.row_sum(i) == 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn events_conserve_every_cell(state in state_strategy(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..40)) {
        let v = build_stoichiometry(state.lattice()).unwrap();
        let mut s = state;
        for pick in picks {
            if let Ok(next) = apply_event(&s, &v, pick.index(v.n_rows())) {
                s = next;
            }
            prop_assert!(s.cells().iter().all(|c| c.total() == s.capacity() as u64));
        }
    }

    #[test]
    fn rates_are_non_negative(state in state_strategy(), p in params_strategy()) {
        let mut a = vec![0.0; state.lattice().n_channels()];
        propensities(&state, &p, &mut a).unwrap();
        prop_assert!(a.iter().all(|&x| x >= 0.0 && x.is_finite()));
    }

    #[test]
    fn positive_rates_lead_to_feasible_states(state in state_strategy(), p in params_strategy()) {
        let v = build_stoichiometry(state.lattice()).unwrap();
        let mut a = vec![0.0; state.lattice().n_channels()];
        propensities(&state, &p, &mut a).unwrap();
        for (j, &aj) in a.iter().enumerate() {
            if aj > 0.0 {
                prop_assert!(apply_event(&state, &v, j).is_ok(), "channel {} infeasible", j);
            }
        }
    }

    #[test]
    fn empty_state_is_absorbing(lattice in lattice_strategy(), nc in 2u32..50, p in params_strategy()) {
        let s = LatticeState::uniform(lattice, nc, 0, 0).unwrap();
        let mut a = vec![0.0; lattice.n_channels()];
        propensities(&s, &p, &mut a).unwrap();
        prop_assert!(a.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn exchange_with_missing_neighbours_is_zero(state in state_strategy(), p in params_strategy()) {
        let lattice = state.lattice();
        let mc = lattice.n_cells();
        let r = transition_rates_heterogeneous(&state, &p).unwrap();
        for (k, &dir) in lattice.directions().iter().enumerate() {
            for l in 0..mc {
                if lattice.neighbor(l, dir).is_none() {
                    for i in 0..4 {
                        prop_assert_eq!(r[(5 + 4 * k + i) * mc + l], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_permutes_rates(state in (2usize..8).prop_flat_map(|cells| state_on(Lattice::Line { cells })), p in params_strategy()) {
        let mc = state.n_cells();
        let mirrored_cells: Vec<Cell> = state.cells().iter().rev().copied().collect();
        let mirrored = LatticeState::new(state.lattice(), state.capacity(), mirrored_cells).unwrap();
        let r = transition_rates_heterogeneous(&state, &p).unwrap();
        let m = transition_rates_heterogeneous(&mirrored, &p).unwrap();
        let dirs = state.lattice().directions();
        let west = dirs.iter().position(|&d| d == Direction::West).unwrap();
        let east = dirs.iter().position(|&d| d == Direction::East).unwrap();
        let family = |f: usize| match f {
            0..=4 => f,
            _ => {
                let (k, i) = ((f - 5) / 4, (f - 5) % 4);
                let k2 = if k == west { east } else { west };
                5 + 4 * k2 + i
            }
        };
        for f in 0..13 {
            for l in 0..mc {
                let (x, y) = (r[f * mc + l], m[family(f) * mc + (mc - 1 - l)]);
                prop_assert!((x - y).abs() <= 1e-15 * x.abs().max(1.0), "family {} cell {}: {} vs {}", f, l, x, y);
            }
        }
    }
}
