use std::collections::BTreeMap;

use pglab_core::device::{self, DeviceParams};
use pglab_core::gating::{self, TuningWord};
use pglab_core::library::default_library;
use pglab_core::netlist::{generate_multiplier4x4, Circuit, GateInstance};
use pglab_core::rail::{solve_rail_voltages, RailNetwork};
use pglab_core::tech::Technology;
use pglab_core::timing::{fit_delay_model, longest_path};
use pglab_core::flow;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 200,
        ..ProptestConfig::default()
    }
}

/// Gate `i` reads nets from the primary inputs and earlier gates.
#[derive(Debug, Clone)]
struct DagSpec {
    n_pi: usize,
    gates: Vec<(bool, usize, usize)>,
    extra_outputs: Vec<usize>,
}

fn dag_spec() -> impl Strategy<Value = DagSpec> {
    (1usize..=5, 1usize..=40).prop_flat_map(|(n_pi, n)| {
        let gates = (0..n)
            .map(|i| (any::<bool>(), 0..n_pi + i, 0..n_pi + i))
            .collect::<Vec<_>>();
        (Just(n_pi), gates, proptest::collection::vec(0..n, 0..4)).prop_map(|(n_pi, gates, extra_outputs)| DagSpec {
            n_pi,
            gates,
            extra_outputs,
        })
    })
}

fn net_name(n_pi: usize, k: usize) -> String {
    if k < n_pi {
        format!("i{k}")
    } else {
        format!("n{:02}", k - n_pi)
    }
}

fn build(spec: &DagSpec) -> Circuit {
    let mut gates = Vec::new();
    let mut used = vec![false; spec.gates.len()];
    for (i, &(two, a, b)) in spec.gates.iter().enumerate() {
        let out = format!("n{i:02}");
        let (cell, inputs) = if two {
            ("AND2", vec![net_name(spec.n_pi, a), net_name(spec.n_pi, b)])
        } else {
            ("BUF", vec![net_name(spec.n_pi, a)])
        };
        for k in [a, b].iter().take(inputs.len()) {
            if *k >= spec.n_pi {
                used[*k - spec.n_pi] = true;
            }
        }
        let refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
        gates.push(GateInstance::new(&format!("g{i:02}"), cell, &refs, &[&out]));
    }
    let mut outputs: Vec<String> = (0..spec.gates.len())
        .filter(|&i| !used[i] || spec.extra_outputs.contains(&i))
        .map(|i| format!("n{i:02}"))
        .collect();
    outputs.sort();
    let pis = (0..spec.n_pi).map(|k| format!("i{k}")).collect();
    Circuit::new(default_library(), gates, pis, outputs).unwrap()
}

/// Every gate-to-output path, starting at gates without gate fanin.
fn all_paths(c: &Circuit) -> Vec<Vec<usize>> {
    fn walk(c: &Circuit, g: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        cur.push(g);
        if c.drives_output(g) {
            out.push(cur.clone());
        }
        for &s in c.fanout(g) {
            walk(c, s, cur, out);
        }
        cur.pop();
    }
    let mut out = Vec::new();
    for g in 0..c.len() {
        if c.fanin(g).is_empty() {
            walk(c, g, &mut Vec::new(), &mut out);
        }
    }
    out
}

fn path_delay(p: &[usize], d: &[f64]) -> f64 {
    p.iter().map(|&g| d[g]).sum()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn sta_matches_path_enumeration(spec in dag_spec(), seed in proptest::collection::vec(1e-12f64..1e-10, 40)) {
        let c = build(&spec);
        let delays: Vec<f64> = (0..c.len()).map(|g| seed[g]).collect();
        let tr = longest_path(&c, &delays).unwrap();
        let best = all_paths(&c).iter().map(|p| path_delay(p, &delays)).fold(0.0, f64::max);
        prop_assert!(((tr.d0 - best) / best).abs() < 1e-12);
        let idx: Vec<usize> = tr.critical_path.iter().map(|id| c.gate_index(id).unwrap()).collect();
        prop_assert!(((path_delay(&idx, &delays) - best) / best).abs() < 1e-12);
    }

    #[test]
    fn sta_tie_break_is_lexicographic(spec in dag_spec(), seed in proptest::collection::vec(1u8..4, 40)) {
        let c = build(&spec);
        let delays: Vec<f64> = (0..c.len()).map(|g| f64::from(seed[g])).collect();
        let tr = longest_path(&c, &delays).unwrap();
        let paths = all_paths(&c);
        let best = paths.iter().map(|p| path_delay(p, &delays)).fold(0.0, f64::max);
        let expected = paths
            .iter()
            .filter(|p| path_delay(p, &delays) == best)
            .map(|p| p.iter().map(|&g| c.gates()[g].id.clone()).collect::<Vec<_>>())
            .min()
            .unwrap();
        prop_assert_eq!(tr.d0, best);
        prop_assert_eq!(tr.critical_path, expected);
    }

    #[test]
    fn vst_decreases_with_width(i in 1e-5f64..5e-3, w in 50e-9f64..2e-6, grow in 1.01f64..4.0, alpha in 1.0f64..2.0) {
        let mut tech = Technology::default();
        tech.device.alpha = alpha;
        let r = |w: f64| gating::SleepTransistor::fixed(w, tech.st_length).on_resistance(&tech).unwrap();
        let narrow = gating::solve_vst(i, r(w), &tech.device, tech.vth_logic).unwrap();
        let wide = gating::solve_vst(i, r(w * grow), &tech.device, tech.vth_logic).unwrap();
        prop_assert!(wide < narrow);
    }

    #[test]
    fn vst_increases_with_current(i in 1e-5f64..5e-3, r in 1.0f64..500.0, grow in 1.01f64..4.0, alpha in 1.0f64..2.0) {
        let p = DeviceParams {
            alpha,
            ..DeviceParams::default()
        };
        let lo = gating::solve_vst(i, r, &p, 0.2).unwrap();
        let hi = gating::solve_vst(i * grow, r, &p, 0.2).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn gated_delay_monotone_in_drop(d in 1e-12f64..1e-9, v1 in 0.0f64..0.6, v2 in 0.0f64..0.6, alpha in 1.0f64..2.0) {
        let p = DeviceParams {
            alpha,
            ..DeviceParams::default()
        };
        let vth = 0.3;
        let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        let a = device::gated_delay(d, lo, &p, vth).unwrap();
        let b = device::gated_delay(d, hi, &p, vth).unwrap();
        prop_assert!(a >= d);
        prop_assert!(b >= a);
        if hi > lo {
            prop_assert!(b > a);
        }
    }

    #[test]
    fn rail_matches_dense_elimination(
        r in 1.0f64..1e4,
        nodes in proptest::collection::vec((1e-4f64..1.0, 0.0f64..1e-2), 1..=10),
    ) {
        let g: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let i: Vec<f64> = nodes.iter().map(|n| n.1).collect();
        let net = RailNetwork::new(r, g.clone(), i.clone()).unwrap();
        let sol = solve_rail_voltages(&net).unwrap();
        let oracle = dense_solve(r, &g, &i);
        let scale = oracle.iter().copied().fold(0.0, f64::max);
        for (a, b) in sol.v.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9 * scale.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn rail_monotone_in_conductance_and_current(
        r in 1.0f64..1e3,
        nodes in proptest::collection::vec((1e-3f64..1.0, 1e-5f64..1e-2), 1..=10),
        which in 0usize..10,
        grow in 1.05f64..3.0,
    ) {
        let g: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let i: Vec<f64> = nodes.iter().map(|n| n.1).collect();
        let k = which % g.len();
        let base = solve_rail_voltages(&RailNetwork::new(r, g.clone(), i.clone()).unwrap()).unwrap();
        let mut g2 = g.clone();
        g2[k] *= grow;
        let stiffer = solve_rail_voltages(&RailNetwork::new(r, g2, i.clone()).unwrap()).unwrap();
        let mut i2 = i.clone();
        i2[k] *= grow;
        let heavier = solve_rail_voltages(&RailNetwork::new(r, g, i2).unwrap()).unwrap();
        for n in 0..base.v.len() {
            prop_assert!(stiffer.v[n] <= base.v[n] * (1.0 + 1e-12));
            prop_assert!(heavier.v[n] >= base.v[n] * (1.0 - 1e-12));
        }
        prop_assert!(stiffer.v[k] < base.v[k]);
        prop_assert!(heavier.v[k] > base.v[k]);
    }

}

fn dense_solve(r: f64, g: &[f64], i: &[f64]) -> Vec<f64> {
    let n = g.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    for k in 0..n {
        a[k][k] += g[k];
        a[k][n] = i[k];
        if k + 1 < n {
            a[k][k] += 1.0 / r;
            a[k + 1][k + 1] += 1.0 / r;
            a[k][k + 1] -= 1.0 / r;
            a[k + 1][k] -= 1.0 / r;
        }
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    (0..n).map(|k| a[k][n] / a[k][k]).collect()
}

#[derive(Debug, Clone)]
struct TechVariation {
    w_unit: f64,
    i_peak_scale: f64,
    nc_width: f64,
    kappa_scale: f64,
}

fn tech_variation() -> impl Strategy<Value = TechVariation> {
    (90e-9f64..300e-9, 0.3f64..1.5, 200e-9f64..600e-9, 0.1f64..3.0).prop_map(|(w_unit, i_peak_scale, nc_width, kappa_scale)| {
        TechVariation {
            w_unit,
            i_peak_scale,
            nc_width,
            kappa_scale,
        }
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn sweep_trends_follow_effective_width(v in tech_variation()) {
        let mut tech = Technology {
            w_unit: v.w_unit,
            i_peak_scale: v.i_peak_scale,
            nc_width: v.nc_width,
            ..Technology::default()
        };
        tech.power.st_cap_per_width *= v.kappa_scale;
        let c = generate_multiplier4x4(&default_library()).unwrap();
        let rows = flow::sweep(&c, &tech).unwrap();
        prop_assert_eq!(rows.len(), 16);
        prop_assert!(!rows[0].feasible);
        let mut feasible: Vec<_> = rows.iter().filter(|r| r.feasible).collect();
        prop_assert_eq!(feasible.len(), 15);
        feasible.sort_by(|a, b| a.eff_width.total_cmp(&b.eff_width));
        let mut by_width: BTreeMap<u64, (f64, f64, f64)> = BTreeMap::new();
        for r in &feasible {
            let key = (r.eff_width / tech.w_unit).round() as u64;
            let val = (r.vgnd1.unwrap(), r.delay.unwrap(), r.avg_power.unwrap());
            if let Some(prev) = by_width.insert(key, val) {
                prop_assert_eq!(prev, val, "words of equal width differ");
            }
        }
        let vals: Vec<_> = by_width.values().collect();
        for pair in vals.windows(2) {
            prop_assert!(pair[1].0 < pair[0].0, "vgnd1 not decreasing");
            prop_assert!(pair[1].1 < pair[0].1, "delay not decreasing");
            prop_assert!(pair[1].2 > pair[0].2, "power not increasing");
        }
    }

    #[test]
    fn gated_delay_never_below_ungated(w in 100e-9f64..2e-6, scale in 0.2f64..1.2) {
        let tech = Technology {
            i_peak_scale: scale,
            ..Technology::default()
        };
        let c = generate_multiplier4x4(&default_library()).unwrap();
        let d0 = pglab_core::timing::critical_path(&c, &tech.device, tech.vth_logic).unwrap().d0;
        let mut plan = gating::single_st_plan(&c, w, &tech).unwrap();
        gating::solve_plan_drops(&mut plan, &tech).unwrap();
        let t = gating::plan_timing(&c, &plan, &tech).unwrap();
        prop_assert!(t.d0 >= d0);
    }
}

#[test]
fn fit_invariant_under_row_order() {
    let rows = [
        (0.250, 3.4112e-10),
        (0.173, 2.9149e-10),
        (0.134, 2.7531e-10),
        (0.108, 2.6676e-10),
        (0.089, 2.6052e-10),
    ];
    let a = fit_delay_model(&rows, 2.3836e-10, 1.0).unwrap();
    let mut shuffled = rows.to_vec();
    for _ in 0..rows.len() {
        shuffled.rotate_left(1);
        assert_eq!(fit_delay_model(&shuffled, 2.3836e-10, 1.0).unwrap(), a);
    }
    shuffled.reverse();
    assert_eq!(fit_delay_model(&shuffled, 2.3836e-10, 1.0).unwrap(), a);
    shuffled.swap(0, 3);
    assert_eq!(fit_delay_model(&shuffled, 2.3836e-10, 1.0).unwrap(), a);
}

#[test]
fn tunable_words_cover_eq_widths() {
    for bits in 0u8..16 {
        let word = TuningWord::new(bits).unwrap();
        let n: u32 = (0..4).filter(|&i| bits >> i & 1 == 1).map(|i| i + 1).sum();
        let w = gating::tunable_effective_width(word, 135e-9);
        assert!((w - f64::from(n) * 135e-9).abs() < 1e-21);
    }
}
