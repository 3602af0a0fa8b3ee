use std::f64::consts::PI;

use hypercube_pst::circuit::{coupling_matrix, inverse_capacitance_diagonal, resummed_coupling_matrix, CircuitParams};
use hypercube_pst::decoherence::{
    average_fidelity, closed_form_coherence, closed_form_rho00, fidelity_lower_bound, g_n, integrate_master_equation,
    time_grid, DecoherenceParams, MasterSolver,
};
use hypercube_pst::disorder::{sample_disordered_coupling, trial_rng};
use hypercube_pst::dynamics::{
    analytic_corner_amplitude, peak_transfer_near, propagate, sweep_hamiltonian, transfer_time, EffectiveHamiltonian,
    TransferSpec,
};
use hypercube_pst::linalg::{ChebyshevPropagator, SpectralPropagator};
use hypercube_pst::oracle::{FullSpaceSimulator, FullSpaceState};
use hypercube_pst::topology::{hypercube_adjacency, subcube_between, tau_factor, Hypercube};
use hypercube_pst::NodeLabel;
use num_complex::Complex64;
use proptest::prelude::*;

const W0: f64 = 2.0 * PI * 5e9;
const NS: f64 = 1e-9;

fn state() -> impl Strategy<Value = (Complex64, Complex64)> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-zero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| {
            let n = (a * a + b * b + c * c + d * d).sqrt();
            (Complex64::new(a / n, b / n), Complex64::new(c / n, d / n))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjacency_spectrum(d in 1u32..=8) {
        let adj = hypercube_adjacency(d).unwrap();
        let mut ev: Vec<f64> = SpectralPropagator::new(adj.into_matrix()).eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let mut want = Vec::new();
        for (value, mult) in Hypercube::new(d).unwrap().spectrum().into_iter().rev() {
            want.extend(std::iter::repeat(value as f64).take(mult as usize));
        }
        prop_assert_eq!(want.len(), 1 << d);
        for (e, w) in ev.iter().zip(&want) {
            prop_assert!((e - w).abs() < 1e-9);
        }
    }

    #[test]
    fn tau_factors_sum_to_adjacency(d in 1u32..=8) {
        let adj = hypercube_adjacency(d).unwrap();
        let mut sum = adj.matrix() * 0.0;
        for j in 1..=d {
            sum += tau_factor(d, j).unwrap();
        }
        prop_assert_eq!(&sum, adj.matrix());
    }

    #[test]
    fn bipartite(d in 1u32..=8) {
        let adj = hypercube_adjacency(d).unwrap();
        let n = 1usize << d;
        for x in 0..n {
            for y in 0..n {
                if x.count_ones() % 2 == y.count_ones() % 2 {
                    prop_assert_eq!(adj.get(x, y), 0);
                }
            }
        }
    }

    #[test]
    fn subcube_matches_brute_force(d in 1u32..=8, a in any::<u32>(), b in any::<u32>()) {
        let mask = (1u32 << d) - 1;
        let (a, b) = (NodeLabel::new(d, a & mask).unwrap(), NodeLabel::new(d, b & mask).unwrap());
        let sub = subcube_between(a, b).unwrap();
        let free = a.value() ^ b.value();
        let brute: Vec<u32> = (0..=mask).filter(|x| (x ^ a.value()) & !free == 0).collect();
        let got: Vec<u32> = sub.nodes().iter().map(|x| x.value()).collect();
        prop_assert_eq!(got, brute);
    }

    #[test]
    fn inverse_capacitance_uniform(d in 1u32..=8, cc in 1e-15..200e-15f64, cx in 1e-12..10e-12f64) {
        let p = CircuitParams::uniform(d, cx, cc, 21e-6, 0.0).unwrap();
        let inv = inverse_capacitance_diagonal(&p).unwrap();
        for v in &inv {
            prop_assert!(((v - inv[0]) / inv[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_error_shrinks_by_zeta_d_squared(d in 1u32..=5, zd in 0.01..0.1f64, order in 2u32..=3) {
        let zeta = zd / f64::from(d);
        let n = 1usize << d;
        let omega = vec![1.0; n];
        let exact = resummed_coupling_matrix(&omega, zeta, &hypercube_adjacency(d).unwrap()).unwrap();
        let err = |o| (coupling_matrix(&omega, zeta, d, o).unwrap().to_dense() - &exact).amax();
        let (e1, e2) = (err(order), err(2 * order));
        prop_assert!(e2 <= e1 * zd * zd * (1.0 + 1e-9) + 1e-16, "e1={e1} e2={e2}");
    }

    #[test]
    fn coupling_symmetric(d in 1u32..=6, seed in any::<u64>(), order in 1u32..=3) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let omega: Vec<f64> = (0..1usize << d).map(|_| rand::Rng::gen_range(&mut rng, 0.5..2.0)).collect();
        let c = coupling_matrix(&omega, 0.01, d, order).unwrap();
        prop_assert_eq!(c.entries.max_asymmetry(), 0.0);
    }

    #[test]
    fn propagation_unitary(d in 1u32..=7, zeta in 0.001..0.02f64, order in 1u32..=3, t in 0.0..200e-9f64, src in any::<u32>()) {
        let h = EffectiveHamiltonian::uniform(d, W0, zeta, order).unwrap();
        let f = propagate(&h, NodeLabel::new(d, src & ((1 << d) - 1)).unwrap(), t).unwrap();
        prop_assert!((f.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn analytic_agreement(d in 1u32..=8, zeta in 0.002..0.02f64, s in 0.0..2.0f64) {
        let t = s * transfer_time(zeta, W0).unwrap();
        let h = EffectiveHamiltonian::uniform(d, W0, zeta, 1).unwrap();
        let f = propagate(&h, NodeLabel::origin(d).unwrap(), t).unwrap();
        prop_assert!((f[(1 << d) - 1] - analytic_corner_amplitude(d, zeta, W0, t)).norm() < 1e-9);
    }

    #[test]
    fn column_and_node_space_agree(d in 1u32..=8, zeta in 0.002..0.02f64, s in 0.0..2.0f64, corrected in any::<bool>()) {
        let t = s * transfer_time(zeta, W0).unwrap();
        let node = sweep_hamiltonian(d, W0, zeta, 3, corrected).unwrap();
        let rows = node.omega_diag().to_vec();
        let freqs: Vec<f64> = (0..1usize << d).map(|x| rows[x.count_ones() as usize]).collect();
        let full = EffectiveHamiltonian::node_space(d, freqs, zeta, 3).unwrap();
        let a = full.propagator().element((1 << d) - 1, 0, t);
        let b = node.propagator().element(d as usize, 0, t);
        prop_assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn correction_never_hurts(d in 1u32..=12, zeta in 0.001..0.02f64) {
        let spec = TransferSpec::corner(d).unwrap();
        let t = transfer_time(zeta, W0).unwrap();
        let unc = 1.0 - peak_transfer_near(&sweep_hamiltonian(d, W0, zeta, 3, false).unwrap(), &spec, t).unwrap().fidelity;
        let cor = 1.0 - peak_transfer_near(&sweep_hamiltonian(d, W0, zeta, 3, true).unwrap(), &spec, t).unwrap().fidelity;
        prop_assert!(cor <= unc + 1e-12, "corrected {cor} uncorrected {unc}");
    }

    #[test]
    fn revival_period(d in 1u32..=8, zeta in 0.002..0.02f64, s in 0.0..2.0f64) {
        let big_t = transfer_time(zeta, W0).unwrap();
        let h = EffectiveHamiltonian::uniform(d, W0, zeta, 1).unwrap();
        let p = h.propagator();
        let b = (1usize << d) - 1;
        prop_assert!((p.element(b, 0, s * big_t).norm() - p.element(b, 0, s * big_t + 2.0 * big_t).norm()).abs() < 1e-9);
    }

    #[test]
    fn rho00_and_coherence_closed_forms(d in 1u32..=3, zeta in 0.002..0.02f64, (alpha, beta) in state(),
                                        t1 in 20.0..500.0f64, t_phi in 20.0..500.0f64) {
        let dec = DecoherenceParams::new(t1 * NS, t_phi * NS).unwrap();
        let h = EffectiveHamiltonian::uniform(d, W0, zeta, 1).unwrap();
        let spec = TransferSpec::new(NodeLabel::origin(d).unwrap(), NodeLabel::antipode(d).unwrap(), alpha, beta).unwrap();
        let grid = time_grid(2.0 * transfer_time(zeta, W0).unwrap(), 6);
        for s in integrate_master_equation(&h, &spec, dec, &grid, MasterSolver::default()).unwrap() {
            prop_assert!((s.rho00 - closed_form_rho00(s.time, beta, dec.t1())).abs() < 1e-9);
            let cf = closed_form_coherence(s.time, d, zeta, W0, alpha, beta, dec.t2());
            prop_assert!((s.coherence((1 << d) - 1) - cf).norm() < 1e-6);
        }
    }

    #[test]
    fn g_n_non_negative(d in 1u32..=12, t in 0.0..100.0f64, t_phi in 1.0..1000.0f64) {
        for n in 0..=d {
            prop_assert!(g_n(n, t, d, t_phi).unwrap() >= 0.0);
        }
    }

    #[test]
    fn bound_below_average(d in 1u32..=10, zeta in 0.002..0.02f64, t1 in 20.0..1000.0f64, t_phi in 20.0..1000.0f64) {
        let dec = DecoherenceParams::new(t1 * NS, t_phi * NS).unwrap();
        let t = transfer_time(zeta, W0).unwrap();
        let avg = average_fidelity(d, zeta, W0, dec).unwrap();
        let bound = fidelity_lower_bound(t, dec.t1(), dec.t2()).unwrap();
        prop_assert!(bound <= avg + 1e-12 && avg <= 1.0 + 1e-12);
    }

    #[test]
    fn disordered_coupling_symmetric_and_unitary(d in 2u32..=8, rel in 0.0..0.9f64, seed in any::<u64>()) {
        let c = sample_disordered_coupling(d, 0.005, rel * 0.005, W0, &mut trial_rng(seed, 0)).unwrap();
        prop_assert_eq!(c.entries.max_asymmetry(), 0.0);
        let mut e = vec![Complex64::new(0.0, 0.0); 1 << d];
        e[0] = Complex64::new(1.0, 0.0);
        let f = ChebyshevPropagator::new(&c.entries).apply(&e, transfer_time(0.005, W0).unwrap());
        prop_assert!((f.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oracle_conserves_number_and_energy(d in 1u32..=3, seed in any::<u64>(), (alpha, beta) in state(), t in 0.0..500.0f64) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let n = 1usize << d;
        let omega: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0.9..1.1)).collect();
        let c = coupling_matrix(&omega, 0.02, d, 3).unwrap();
        let sim = FullSpaceSimulator::new(d, &omega, &c).unwrap();
        let a = NodeLabel::new(d, rand::Rng::gen_range(&mut rng, 0..n as u32)).unwrap();
        let spec = TransferSpec::excitation(a, a).unwrap();
        let psi0 = FullSpaceState::from_spec(&spec).unwrap();
        let psi = sim.evolve(&psi0, t).unwrap();
        prop_assert!(psi.excitation_statistics().1.abs() < 1e-18);
        let mixed = TransferSpec::new(a, a, alpha, beta).unwrap();
        let m0 = FullSpaceState::from_spec(&mixed).unwrap();
        let mt = sim.evolve(&m0, t).unwrap();
        let (e0, et) = (m0.energy(sim.hamiltonian()), mt.energy(sim.hamiltonian()));
        prop_assert!((e0 - et).abs() <= 1e-10 * e0.abs().max(1.0));
        prop_assert!((mt.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn first_maximum_at_transfer_time() {
    for d in [1u32, 3, 6, 10] {
        let zeta = 0.005;
        let big_t = transfer_time(zeta, W0).unwrap();
        let h = EffectiveHamiltonian::uniform(d, W0, zeta, 1).unwrap();
        let p = h.propagator();
        let steps = 400;
        let dt = 2.0 * big_t / steps as f64;
        let values: Vec<f64> = (1..=steps).map(|k| p.element((1 << d) - 1, 0, k as f64 * dt).norm()).collect();
        let first_max = (0..steps).find(|&k| k + 1 == steps || values[k + 1] < values[k] - 1e-12).unwrap();
        let t_max = (first_max + 1) as f64 * dt;
        assert!((t_max - big_t).abs() <= dt, "d={d}");
    }
}

#[test]
fn hypercube_rows_and_counts() {
    for d in 1..=12 {
        let cube = Hypercube::new(d).unwrap();
        let rows = cube.row_sizes();
        assert_eq!(rows.iter().sum::<u64>(), 1 << d);
        assert_eq!(cube.edges().count() as u64, u64::from(d) << (d - 1));
    }
}
