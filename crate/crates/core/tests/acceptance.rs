//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use phavforge::camera::{
    apply_impulse, initial_state, mechanical_energy, step, tp_spring_force, Anchor, CameraRig, CameraState, Impulse,
    SpringParams, SUBSTEP_S,
};
use phavforge::codec::{depth_decode, depth_encode, flow_decode, flow_encode};
use phavforge::cooltsn::{
    build_minibatch_plan, multitask_loss, multitask_loss_gradient, ClassSpace, HeadWeights, LossInput, Source,
};
use phavforge::distributions::triangular_sample_wrapped;
use phavforge::palette::SemanticPalette;
use phavforge::rng::SeedPath;
use phavforge::scenario::{
    CameraBehavior, DayPhase, Environment, Generator, Recipe, Variation, Weather, CLOCK_MODULUS_H,
};
use phavforge::stats::aggregate_stats;

type Outcome = (bool, String);
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn sample_many(gen: &Generator, seed: u64, n: u64) -> Vec<Recipe> {
    (0..n)
        .into_par_iter()
        .map(|i| gen.sample_recipe(seed, i).expect("recipe samples"))
        .collect()
}

fn freq<K: Ord>(items: impl Iterator<Item = K>, n: usize) -> BTreeMap<K, f64> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0.0) += 1.0 / n as f64;
    }
    m
}

fn max_dev<K: Ord>(f: &BTreeMap<K, f64>, expected: &[(K, f64)]) -> f64 {
    expected
        .iter()
        .map(|(k, p)| (f.get(k).copied().unwrap_or(0.0) - p).abs())
        .fold(0.0, f64::max)
}

fn distribution_fidelity(gen: &Generator) -> Outcome {
    let t0 = Instant::now();
    let recipes = sample_many(gen, 101, 100_000);
    let secs = t0.elapsed().as_secs_f64();
    let n = recipes.len();
    let w = freq(recipes.iter().map(|r| r.weather), n);
    let d = freq(recipes.iter().map(|r| r.day_phase), n);
    let v = freq(recipes.iter().map(|r| r.variation), n);
    let dw = max_dev(&w, &Weather::ALL.iter().map(|x| (*x, 0.25)).collect::<Vec<_>>());
    let third = 1.0 / 3.0;
    let dd = max_dev(
        &d,
        &[
            (DayPhase::Dawn, third),
            (DayPhase::Day, third),
            (DayPhase::Dusk, third),
            (DayPhase::Night, 0.0),
        ],
    );
    let dv = max_dev(&v, &Variation::ALL.iter().map(|x| (*x, 0.2)).collect::<Vec<_>>());
    let ok = dw <= 0.01 && dd <= 0.01 && dv <= 0.01 && secs < 30.0;
    (
        ok,
        format!("n={n}, max |dev| weather {dw:.4}, day {dd:.4}, variation {dv:.4} (tol 0.01); {secs:.1}s (< 30s)"),
    )
}

fn in_support(a: f64, b: f64, x: f64) -> bool {
    if (0.0..24.0).contains(&x) {
        if a <= b {
            a <= x && x <= b
        } else {
            x >= a || x <= b
        }
    } else {
        false
    }
}

fn clock_support(gen: &Generator) -> Outcome {
    let recipes = sample_many(gen, 202, 100_000);
    let clock = &gen.config().clock;
    let outside = recipes
        .iter()
        .filter(|r| {
            let p = clock.for_phase(r.day_phase);
            !in_support(p.a, p.b, r.clock_h)
        })
        .count();
    // mode of the day-phase histogram in quarter-hour bins
    let mut rng = SeedPath::root(203).stream();
    let mut bins = vec![0u32; 96];
    for _ in 0..100_000 {
        let t = triangular_sample_wrapped(&mut rng, clock.day, CLOCK_MODULUS_H).unwrap();
        bins[(t * 4.0) as usize] += 1;
    }
    let (peak, _) = bins.iter().enumerate().max_by_key(|(_, c)| **c).unwrap();
    let mode_h = (peak as f64 + 0.5) / 4.0;
    let ok = outside == 0 && (mode_h - 13.0).abs() <= 0.5;
    (
        ok,
        format!(
            "{outside} of {} clock times outside support; day mode {mode_h:.3}h (13 +/- 0.5)",
            recipes.len()
        ),
    )
}

fn dataset_plan(gen: &Generator) -> Outcome {
    let total = 39_982;
    let plan = gen.plan_dataset(1000, total).unwrap();
    let min = plan.iter().map(|(_, n)| *n).min().unwrap();
    let sum: usize = plan.iter().map(|(_, n)| *n).sum();
    let mean = sum as f64 / plan.len() as f64;
    let actions = gen.planned_actions(1000, total).unwrap();
    let t0 = Instant::now();
    let recipes: Vec<Recipe> = actions
        .par_iter()
        .enumerate()
        .map(|(i, a)| gen.sample_recipe_for_action(77, i as u64, a).unwrap())
        .collect();
    let secs = t0.elapsed().as_secs_f64();
    let stats = aggregate_stats(&recipes).unwrap();
    let expected_frames: u64 = recipes.iter().map(|r| (30.0 * r.duration_s).round() as u64).sum();
    let mean_dur = recipes.iter().map(|r| r.duration_s).sum::<f64>() / recipes.len() as f64;
    let cfg = gen.config();
    let dur_ok =
        mean_dur >= cfg.t_min_s && mean_dur <= cfg.t_max_s && (mean_dur - cfg.t_mod_s).abs() <= 0.2 * cfg.t_mod_s;
    let ok = plan.len() == 35
        && sum == total
        && min >= 1000
        && (mean - 1142.3).abs() <= 0.1
        && stats.clips as usize == total
        && stats.frames == expected_frames
        && dur_ok
        && secs < 300.0;
    (
        ok,
        format!(
            "{} classes, min {min}, mean {mean:.2} (1142.3 +/- 0.1); generated {} in {secs:.1}s (< 300s); \
             frames {} vs oracle {expected_frames}; mean duration {mean_dur:.3}s (T_mod {} +/- 20%)",
            plan.len(),
            recipes.len(),
            stats.frames,
            cfg.t_mod_s
        ),
    )
}

fn constraint_sweep(gen: &Generator) -> Outcome {
    let recipes = sample_many(gen, 404, 10_000);
    let cfg = gen.config();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut hit = |rule: &'static str, bad: bool| {
        *counts.entry(rule).or_insert(0) += bad as usize;
    };
    for r in &recipes {
        let action = gen.taxonomy().get(&r.action).unwrap();
        let clip = gen.manifest().get(&r.base_motion).unwrap();
        hit(
            "indoors=>house",
            r.camera == CameraBehavior::Indoors && r.environment != Environment::House,
        );
        hit(
            "closeup=>brush hair",
            r.camera == CameraBehavior::Closeup && r.action != "brush hair",
        );
        hit("night-free", r.day_phase == DayPhase::Night);
        hit(
            "L_s bounds",
            !(r.duration_s >= cfg.t_min_s && r.duration_s <= cfg.t_max_s.min(clip.duration_s)),
        );
        hit("blend<=2", r.variation_plan.blend_sources.len() > 2);
        let touched = r
            .variation_plan
            .perturbation
            .keys()
            .chain(r.variation_plan.blend_map.keys());
        hit(
            "critical-muscle",
            touched.into_iter().any(|m| action.critical_muscles.contains(m)),
        );
        hit("validate_recipe", !gen.validate_recipe(r).is_empty());
    }
    let total: usize = counts.values().sum();
    let detail = counts
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ");
    (total == 0, format!("{} recipes; violations {detail}", recipes.len()))
}

fn one_d_rig() -> CameraRig {
    CameraRig {
        behavior: CameraBehavior::Static,
        camera_mass: 1.0,
        camera_drag: 0.0,
        target_mass: 1.0,
        target_drag: 0.0,
        spring_ct: SpringParams {
            stiffness: 0.0,
            damping: 0.0,
            rest_length: 0.0,
        },
        spring_tp: SpringParams {
            stiffness: 1.0,
            damping: 2.0,
            rest_length: 0.0,
        },
        min_distance_m: 0.0,
        impulse: Impulse {
            direction: [1.0, 0.0, 0.0],
            magnitude: 0.0,
        },
        pinned: true,
        approach_direction: [1.0, 0.0, 0.0],
    }
}

fn camera_physics(gen: &Generator) -> Outcome {
    // unit mass, k = 1, c = 2 released from x0 = 1: x(t) = (1 + t) e^{-t}
    let rig = one_d_rig();
    let mut s = CameraState {
        camera_pos: [0.0, 5.0, 0.0],
        camera_vel: [0.0; 3],
        target_pos: [1.0, 0.0, 0.0],
        target_vel: [0.0; 3],
    };
    let anchor = Anchor::at_rest([0.0; 3]);
    let steps = (5.0 / SUBSTEP_S).round() as usize;
    let mut err_1d: f64 = 0.0;
    for i in 1..=steps {
        s = step(&s, &rig, &anchor, SUBSTEP_S);
        let t = i as f64 * SUBSTEP_S;
        err_1d = err_1d.max((s.target_pos[0] - (1.0 + t) * (-t).exp()).abs());
    }

    // energy along stationary-protagonist runs of sampled rigs and the
    // stiffest, lightest, least damped corner of the configured ranges
    let mut rigs: Vec<CameraRig> = (0..200)
        .map(|i| gen.sample_recipe(505, i).unwrap().camera_rig)
        .collect();
    let r = &gen.config().camera;
    for b in [CameraBehavior::Kite, CameraBehavior::Closeup, CameraBehavior::Indoors] {
        let br = r.for_behavior(b);
        for md in [0.0, 1.0, 2.0] {
            rigs.push(CameraRig {
                behavior: b,
                camera_mass: br.camera_mass.lo,
                camera_drag: br.camera_drag.lo,
                target_mass: br.target_mass.lo,
                target_drag: br.target_drag.lo,
                spring_ct: SpringParams {
                    stiffness: br.stiffness.hi,
                    damping: br.damping.lo,
                    rest_length: br.ct_rest_length.lo,
                },
                spring_tp: SpringParams {
                    stiffness: br.stiffness.hi,
                    damping: br.damping.lo,
                    rest_length: md,
                },
                min_distance_m: md,
                impulse: Impulse {
                    direction: [0.0, 0.6, 0.8],
                    magnitude: br.impulse.hi,
                },
                pinned: false,
                approach_direction: [1.0, 0.0, 0.0],
            });
        }
    }
    let p = [0.0; 3];
    let mut worst_rise = f64::NEG_INFINITY;
    for rig in &rigs {
        let mut st = initial_state(rig, p);
        apply_impulse(&mut st, rig);
        let mut e = mechanical_energy(&st, rig, p);
        for _ in 0..1500 {
            st = step(&st, rig, &Anchor::at_rest(p), SUBSTEP_S);
            let e2 = mechanical_energy(&st, rig, p);
            worst_rise = worst_rise.max(e2 - e);
            e = e2;
        }
    }

    // dead zone: random target states strictly inside min_distance
    let mut rng = SeedPath::root(506).stream();
    let mut nonzero = 0;
    for i in 0..10_000 {
        let md = [1.0, 2.0][i % 2];
        let rig = CameraRig {
            min_distance_m: md,
            spring_tp: SpringParams {
                stiffness: rng.random_range(1.0..50.0),
                damping: rng.random_range(0.0..10.0),
                rest_length: md,
            },
            ..one_d_rig()
        };
        let dir: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
        let r = md * rng.random::<f64>() * 0.999;
        let state = CameraState {
            camera_pos: [0.0, 5.0, 0.0],
            camera_vel: [0.0; 3],
            target_pos: dir.map(|x| x / n * r),
            target_vel: [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), 0.0],
        };
        let anchor = Anchor {
            position: [0.0; 3],
            velocity: [rng.random_range(-2.0..2.0), 0.0, rng.random_range(-2.0..2.0)],
        };
        if tp_spring_force(&rig, &state, &anchor) != [0.0; 3] {
            nonzero += 1;
        }
    }
    let ok = err_1d <= 1e-3 && worst_rise <= 1e-9 && nonzero == 0;
    (
        ok,
        format!(
            "1-D max error {err_1d:.2e} m over 5s (<= 1e-3); worst per-step energy rise {worst_rise:.2e} over {} rigs \
             (<= 1e-9); dead-zone nonzero forces {nonzero}/10000",
            rigs.len()
        ),
    )
}

fn finite_difference_error(rng: &mut impl Rng, classes: ClassSpace) -> f64 {
    let source = if rng.random::<bool>() {
        Source::Real
    } else {
        Source::Virtual
    };
    let size = classes.head(source).len();
    let mut input = LossInput {
        consensus: (0..classes.total()).map(|_| rng.random_range(-3.0..3.0)).collect(),
        label: rng.random_range(0..size),
        source,
        classes,
        weights: HeadWeights::default(),
    };
    let grad = multitask_loss_gradient(&input).unwrap();
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for (i, g) in grad.iter().enumerate() {
        let x = input.consensus[i];
        input.consensus[i] = x + h;
        let up = multitask_loss(&input).unwrap();
        input.consensus[i] = x - h;
        let down = multitask_loss(&input).unwrap();
        input.consensus[i] = x;
        let fd = (up - down) / (2.0 * h);
        let scale = g.abs().max(fd.abs());
        if scale > 0.0 {
            worst = worst.max((g - fd).abs() / scale);
        }
    }
    worst
}

fn cooltsn_math() -> Outcome {
    let classes = ClassSpace::new(101, 35);
    let mut rng = SeedPath::root(606).stream();
    let fd_err = (0..100)
        .map(|_| finite_difference_error(&mut rng, classes))
        .fold(0.0, f64::max);

    let mut uniform_err: f64 = 0.0;
    for source in [Source::Real, Source::Virtual] {
        for level in [-5.0, 0.0, 2.5, 40.0] {
            let input = LossInput {
                consensus: vec![level; classes.total()],
                label: 3,
                source,
                classes,
                weights: HeadWeights {
                    real: 1.0,
                    virtual_: 1.0,
                },
            };
            let n = classes.head(source).len() as f64;
            uniform_err = uniform_err.max((multitask_loss(&input).unwrap() - n.ln()).abs());
        }
    }

    let mut bad_blocks = 0;
    for i in 0..200 {
        let real = 176 + rng.random_range(0..5000);
        let syn = 80 + rng.random_range(0..5000);
        let plan = build_minibatch_plan(&mut SeedPath::root(607).child("batch", i).stream(), real, syn).unwrap();
        let mut seen_r = std::collections::BTreeSet::new();
        let mut seen_s = std::collections::BTreeSet::new();
        for b in &plan.blocks {
            let dup = !b.real.iter().all(|x| seen_r.insert(*x)) || !b.synthetic.iter().all(|x| seen_s.insert(*x));
            if b.real.len() != 22 || b.synthetic.len() != 10 || dup {
                bad_blocks += 1;
            }
        }
        if plan.blocks.len() != 8 {
            bad_blocks += 1;
        }
    }
    let ok = fd_err < 1e-4 && uniform_err <= 1e-9 && bad_blocks == 0;
    (
        ok,
        format!(
            "max relative FD error {fd_err:.2e} over 100 inputs (< 1e-4); uniform-logit |loss - ln|C_z|| \
             {uniform_err:.1e} (<= 1e-9); malformed blocks {bad_blocks} in 200 plans"
        ),
    )
}

fn codecs() -> Outcome {
    let mut depth_err: f64 = 0.0;
    for k in 0..=655_350 {
        let d = k as f64 / 1000.0;
        depth_err = depth_err.max((depth_decode(depth_encode(d).unwrap()) - d).abs());
    }
    // a floating-point representation margin on the 0.005 m half step
    let depth_ok = depth_err <= 0.005 + 1e-9;
    let anchors = depth_encode(0.01).unwrap() == 1 && depth_encode(655.35).unwrap() == 65_535;

    let mut flow_ok = true;
    let mut flow_worst: f64 = 0.0;
    for dim in [224u32, 256, 340, 1280, 1920] {
        let dmax = dim as f64;
        let tol = dmax / 65_535.0;
        for k in 0..=20_000 {
            let u = -dmax + 2.0 * dmax * k as f64 / 20_000.0;
            let e = (flow_decode(flow_encode(u, dim).unwrap(), dim).unwrap() - u).abs();
            flow_worst = flow_worst.max(e / tol);
            flow_ok &= e <= tol * (1.0 + 1e-9);
        }
    }

    let palette = SemanticPalette::default();
    let colors: std::collections::BTreeSet<[u8; 3]> = palette.entries().iter().map(|e| e.rgb()).collect();
    let bijective = palette.len() == 63
        && colors.len() == 63
        && palette
            .entries()
            .iter()
            .all(|e| palette.inverse(e.rgb()).unwrap() == e.class && palette.lookup(&e.class).unwrap() == e.rgb());
    let spots = palette.lookup("Road").unwrap() == [100, 60, 100] && palette.lookup("Head").unwrap() == [220, 20, 60];
    let ok = depth_ok && anchors && flow_ok && bijective && spots;
    (
        ok,
        format!(
            "depth max error {depth_err:.6} m (<= 0.005); encode(0.01)=1 and encode(655.35)=65535: {anchors}; \
             flow worst error {flow_worst:.9} of D/65535; palette {} classes bijective: {bijective}; \
             Road/Head spot checks: {spots}",
            palette.len()
        ),
    )
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_phavforge"))
            .args([
                "sample",
                "--seed",
                "2024",
                "--count",
                "3500",
                "--per-class-min",
                "100",
                "--out",
            ])
            .arg(&out)
            .env("PHAVFORGE_JOBS", jobs)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        dir_bytes(&out)
    };
    let a = run("jobs1", "1");
    let b = run("jobs8", "8");
    let c = run("jobs3", "3");
    let ok = a.len() == 3500 && a == b && a == c;
    (
        ok,
        format!(
            "{} files; --jobs 1 vs 8 identical: {}; 1 vs 3 identical: {}",
            a.len(),
            a == b,
            a == c
        ),
    )
}

fn main() {
    let gen = Generator::with_defaults().expect("default generator");
    let criteria: Vec<Criterion> = vec![
        ("distribution fidelity", Box::new(|| distribution_fidelity(&gen))),
        ("clock-time support", Box::new(|| clock_support(&gen))),
        ("dataset plan reproduction", Box::new(|| dataset_plan(&gen))),
        ("constraint soundness sweep", Box::new(|| constraint_sweep(&gen))),
        ("camera physics", Box::new(|| camera_physics(&gen))),
        ("two-head loss math", Box::new(cooltsn_math)),
        ("codecs and palette", Box::new(codecs)),
        ("determinism across --jobs", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += !ok as usize;
        println!("{} [{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
