use num_complex::Complex64 as C64;
use proptest::prelude::*;

use stschmidt::analysis::nonseparability;
use stschmidt::biphoton::{build_wavefunction, marginal_intensity, PumpLowGain};
use stschmidt::config::RunConfig;
use stschmidt::container::{Container, Record};
use stschmidt::dispersion::{delta_kz, effective_pump_index, omega_from_wavelength, CrystalConfig, SellmeierSet};
use stschmidt::grid::GridSpec;
use stschmidt::highgain::sinhc;
use stschmidt::presets;
use stschmidt::schmidt::{decompose, Truncation};

const LP: f64 = 355e-9;

fn small_grid(nq: usize, nw: usize, m: usize, q_max: f64, half: f64) -> GridSpec {
    GridSpec::new(nq, nw, m, q_max, omega_from_wavelength(LP) / 2.0, half).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mismatch_is_exchange_invariant(
        qp in 0.0..3e5f64, qs in 0.0..3e5f64, qi in 0.0..3e5f64,
        ds in -3e14..3e14f64, di in -3e14..3e14f64, theta in 25.0..40.0f64,
    ) {
        let c = CrystalConfig::bbo(theta, 2e-3);
        let w0 = omega_from_wavelength(LP) / 2.0;
        let a = delta_kz(qp, qs, qi, w0 + ds, w0 + di, &c, LP).unwrap();
        let b = delta_kz(qp, qi, qs, w0 + di, w0 + ds, &c, LP).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pump_index_is_monotone_between_endpoints(t1 in 0.0..1.5707f64, t2 in 0.0..1.5707f64, lam in 0.25..1.1f64) {
        let set = SellmeierSet::bbo();
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        let (a, b) = (effective_pump_index(lo, lam, &set).unwrap(), effective_pump_index(hi, lam, &set).unwrap());
        let no = effective_pump_index(0.0, lam, &set).unwrap();
        let ne = effective_pump_index(std::f64::consts::FRAC_PI_2, lam, &set).unwrap();
        prop_assert!(b <= a);
        prop_assert!(a <= no && b >= ne);
    }

    #[test]
    fn nonseparability_is_at_least_one(re in prop::collection::vec(-1.0..1.0f64, 48), im in prop::collection::vec(-1.0..1.0f64, 48)) {
        let g = GridSpec::new(6, 8, 1, 1e5, 2.6e15, 1e14).unwrap();
        let mode: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
        prop_assume!(mode.iter().any(|z| z.norm() > 1e-3));
        let c = nonseparability(&mode, &g).unwrap();
        prop_assert!(c >= 1.0 - 1e-12 && c <= 6.0 + 1e-12);
    }

    #[test]
    fn sinhc_is_continuous_at_the_series_switch(phase in 0.0..std::f64::consts::TAU, length in 1e-4..1e-2f64) {
        let below = C64::from_polar(0.999_999e-4 / length, phase);
        let above = C64::from_polar(1.000_001e-4 / length, phase);
        let (a, b) = (sinhc(below, length), sinhc(above, length));
        prop_assert!((a - b).abs() / length < 1e-9);
    }

    #[test]
    fn container_round_trips(
        records in prop::collection::vec((
            "[a-z:=,0-9]{0,12}",
            prop::collection::vec(any::<f64>(), 0..20),
            any::<bool>(),
        ), 0..6)
    ) {
        let mut c = Container::new();
        for (name, data, complex) in records {
            let r = if complex && data.len() >= 2 {
                let z: Vec<C64> = data.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
                Record::complex(name, &[z.len()], &z).unwrap()
            } else {
                Record::real(name, &[data.len()], data).unwrap()
            };
            c.push(r);
        }
        let bytes = c.to_bytes();
        prop_assert_eq!(Container::from_bytes(&bytes).unwrap().to_bytes(), bytes);
    }

    #[test]
    fn config_hash_survives_serialization(w_p in 1e-6..1e-3f64, dl in 1e-11..5e-9f64, len in 1e-4..1e-2f64, n in 2usize..40) {
        let mut s = presets::oracle_desk();
        s.pump.w_p = w_p;
        s.pump.delta_lambda_p = dl;
        s.crystal.length = len;
        s.grid.n_q = n;
        let cfg = RunConfig::from_low_gain(&s);
        let again = RunConfig::from_toml(&cfg.to_toml(), &[]).unwrap();
        prop_assert_eq!(again.hash(), cfg.hash());
        prop_assert_eq!(again.to_toml(), cfg.to_toml());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn built_states_are_even_and_exchange_symmetric(
        nq in 2usize..6, nw in 1usize..6, m in 1usize..10,
        w_p in 5e-6..60e-6f64, dl in 0.2e-9..6e-9f64, theta in 32.0..34.0f64,
    ) {
        let pump = PumpLowGain { lambda_p0: LP, w_p, delta_lambda_p: dl };
        let psi = build_wavefunction(&small_grid(nq, nw, m, 2e5, 2e14), &pump, &CrystalConfig::bbo(theta, 2e-3)).unwrap();
        prop_assert_eq!(psi.evenness_defect(), 0.0);
        prop_assert_eq!(psi.exchange_defect(), 0.0);
        let w = psi.grid().weights();
        let total: f64 = marginal_intensity(&psi).iter().zip(&w).map(|(i, w)| i * w).sum::<f64>() * std::f64::consts::TAU;
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_ignores_global_scale(scale in 1e-3..1e3f64, phase in 0.0..std::f64::consts::TAU, w_p in 5e-6..30e-6f64) {
        let pump = PumpLowGain { lambda_p0: LP, w_p, delta_lambda_p: 2e-9 };
        let psi = build_wavefunction(&small_grid(6, 6, 8, 2e5, 2e14), &pump, &CrystalConfig::bbo(32.914, 2e-3)).unwrap();
        let t = Truncation { l_max: 3, m_max: 100, tol: 1e-8 };
        let a = decompose(&psi, &t).unwrap().result;
        let b = decompose(&psi.scaled(C64::from_polar(scale, phase)), &t).unwrap().result;
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!((x.lambda - y.lambda).abs() < 1e-12);
        }
        prop_assert!((a.k - b.k).abs() < 1e-9 * a.k);
    }
}
