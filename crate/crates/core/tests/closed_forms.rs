use biocircuit_core::models::*;
use biocircuit_core::ode::{find_equilibria, integrate, simulate_to_steady_state, IntegratorConfig};
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = f64> {
    (-1.0f64..1.0).prop_map(|e| 10f64.powf(e))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

fn settle<S: biocircuit_core::OdeSystem>(sys: &S, n: usize) -> Vec<f64> {
    let ss = simulate_to_steady_state(sys, &vec![0.0; n], &IntegratorConfig::default()).unwrap();
    ss.equilibrium().unwrap().point.clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn plant_closed_form(alpha in rate(), beta in rate(), delta in rate(), gamma in rate(),
                         h in 0.0f64..3.0, r in 0.0f64..3.0, d1 in rate(), d2 in rate()) {
        let p = PlantParams { alpha, beta, delta, gamma, ..Default::default() };
        let dist = DisturbanceInputs {
            h_grn: Signal::constant(h), r: Signal::constant(r),
            d1: Signal::constant(d1), d2: Signal::constant(d2),
        };
        let sys = build_plant(p, dist).unwrap();
        let x = settle(&sys, 2);
        let cf = sys.steady_state().unwrap();
        prop_assert!(rel(x[0], cf[0]) < 1e-6 && rel(x[1], cf[1]) < 1e-6);
    }

    #[test]
    fn ffwd_closed_form(ab in rate(), db in rate(), bb in rate(), gb in rate(), g in rate(),
                        alpha in rate(), beta in rate(), delta in rate(), gamma in rate(),
                        d1 in rate(), d2 in rate(), micro in any::<bool>()) {
        let f = FfwdParams {
            alpha_bar: ab, delta_bar: db, beta_bar: bb, gamma_bar: gb, g, alpha, beta, delta, gamma,
            variant: if micro { FfwdVariant::MicroRna } else { FfwdVariant::Ern },
        };
        let dist = DisturbanceInputs { d1: Signal::constant(d1), d2: Signal::constant(d2), ..Default::default() };
        let sys = build_ffwd(f, dist).unwrap();
        let n = sys.output_index() + 1;
        let x = settle(&sys, n);
        let cf = ffwd_steady_state(&f, d1, d2).state();
        for (a, b) in x.iter().zip(&cf) {
            prop_assert!(rel(*a, *b) < 1e-6, "{:?} vs {:?}", x, cf);
        }
    }

    #[test]
    fn repro_closed_form(gain in rate(), alpha in rate(), beta in rate(), c in rate(), delta in rate(),
                         delta_bar in rate(), kappa in rate(), gamma in rate(), d in rate(), h in 0.0f64..5.0) {
        let r = ReproParams { gain, alpha, beta, c, delta, delta_bar, kappa, gamma, d };
        let sys = build_repro(r, ReproMode::Standalone { h: Signal::constant(h) }, None).unwrap();
        let x = settle(&sys, 3);
        let s = repro_steady_state(&r, h);
        prop_assert!(rel(x[0], s.m) < 1e-6 && rel(x[1], s.mu) < 1e-6 && rel(x[2], s.x) < 1e-6);
    }

    #[test]
    fn states_stay_nonnegative(alpha in rate(), delta in rate(), gamma in rate(),
                               h1 in 0.0f64..2.0, h2 in 0.0f64..2.0, d1 in rate(), g in rate()) {
        let cfg = IntegratorConfig::default();
        let dist = DisturbanceInputs {
            h_grn: Signal::Steps(Schedule::new(vec![(0.0, h1), (3.0, h2)]).unwrap()),
            d1: Signal::step(1.0, 2.0, d1),
            ..Default::default()
        };
        let plant = build_plant(PlantParams { alpha, delta, gamma, ..Default::default() }, dist.clone()).unwrap();
        let ffwd = build_ffwd(FfwdParams { g, delta, ..Default::default() }, dist).unwrap();
        let a = integrate(&plant, &[0.0; 2], (0.0, 10.0), &cfg).unwrap();
        let b = integrate(&ffwd, &[0.0; 4], (0.0, 10.0), &cfg).unwrap();
        for s in a.states().chain(b.states()) {
            prop_assert!(s.iter().all(|v| *v >= -cfg.atol));
        }
    }
}

#[test]
fn ffwd_and_repro_match_equilibrium_finder() {
    // 20 deterministic draws each from a small LCG so the check is reproducible.
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut draw = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        10f64.powf(((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0)
    };
    for _ in 0..20 {
        let f = FfwdParams {
            alpha_bar: draw(), delta_bar: draw(), beta_bar: draw(), gamma_bar: draw(), g: draw(),
            alpha: draw(), beta: draw(), delta: draw(), gamma: draw(), variant: FfwdVariant::Ern,
        };
        let (d1, d2) = (draw(), draw());
        let model = Model::Ffwd {
            params: f,
            inputs: DisturbanceInputs { d1: Signal::constant(d1), d2: Signal::constant(d2), ..Default::default() },
        };
        let sys = model.build().unwrap();
        let eqs = find_equilibria(&sys, &model.search_box(), 32).unwrap();
        assert_eq!(eqs.len(), 1);
        let cf = ffwd_steady_state(&f, d1, d2).state();
        for (a, b) in eqs[0].point.iter().zip(&cf) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{a} vs {b}");
        }

        let r = ReproParams {
            gain: draw(), alpha: draw(), beta: draw(), c: draw(), delta: draw(),
            delta_bar: draw(), kappa: draw(), gamma: draw(), d: draw(),
        };
        let h = draw();
        let model = Model::Repro { params: r, mode: ReproMode::Standalone { h: Signal::constant(h) }, t_off: None };
        let sys = model.build().unwrap();
        let eqs = find_equilibria(&sys, &model.search_box(), 32).unwrap();
        assert_eq!(eqs.len(), 1);
        let s = repro_steady_state(&r, h);
        for (a, b) in eqs[0].point.iter().zip([s.m, s.mu, s.x]) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}
