use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use starres_core::discord::{
    bell_diagonal_quantifier, discord_free_op, discord_quantifier, discord_theory, on_free_section, to_uv, DiscordOp,
};
use starres_core::games::{coalition_utility, harsanyi_dividend, shapley_value, simulate_gi_game};
use starres_core::markov::{self, critical_value, focus_channel, markov_quantifier, on_free_segment, segment_argmin};
use starres_core::numerics::{project_onto_polytope, RealVector};
use starres_core::quantum_rep::{fano_positivity, PauliHalfMixture, TwoQubitFano};
use starres_core::srt_core::{g_monotone, relative_error_factor, robustness, validate_fortress, FortressReport};
use starres_core::total_corr::{
    face_distance, on_auxiliary_face, tc_free_op, tc_membership, tc_quantifier, tc_theory, JointDistribution, Party,
    TC_CRITICAL,
};
use starres_core::unistochastic::{
    self as nu, nu_conic_contraction, nu_quantifier, nu_shrink, triangle_distance, CirculantBistochastic, Triangle,
    NU_CRITICAL,
};
use starres_core::{ConvexSection, Metric, StarTheory};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Geometry,
    Discord,
    Totalcorr,
    Unisto,
    Markov,
    Games,
    All,
}

#[derive(Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<RealVector>,
}

#[derive(Serialize)]
pub struct Summary {
    pub passed: bool,
    pub seed: u64,
    pub checks: Vec<Check>,
}

const FORTRESS_SAMPLES: usize = 2000;
const DRAWS: usize = 200;

struct Ctx {
    suite: &'static str,
    seed: u64,
    checks: Vec<Check>,
}

impl Ctx {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { suite: self.suite, name, passed, detail, counterexample: None });
    }

    fn fortress(&mut self, name: &'static str, report: FortressReport) {
        let counterexample = report.counterexamples.first().map(|c| c.point.clone());
        let detail = match report.counterexamples.first() {
            Some(c) => format!("failures {:?}; condition {}: {}", report.failures, c.condition, c.detail),
            None => format!("failures {:?} over {} samples", report.failures, report.samples),
        };
        self.checks.push(Check { suite: self.suite, name, passed: report.passed, detail, counterexample });
    }
}

fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn random_state(rng: &mut ChaCha8Rng) -> TwoQubitFano {
    loop {
        let mut v = || rng.gen_range(-1.0..1.0);
        let s = TwoQubitFano::diagonal([0.6 * v(), 0.6 * v(), 0.6 * v()], [0.4 * v(), 0.4 * v(), 0.4 * v()], [v(), v(), v()]);
        if fano_positivity(&s) {
            return s;
        }
    }
}

/// Runs the selected suites. `broken_fixture` drops a cone from the geometry
/// fixture so its fortress check must fail.
pub fn run(suite: Suite, seed: u64, broken_fixture: bool) -> Result<Summary, CliError> {
    let all = [Suite::Geometry, Suite::Discord, Suite::Totalcorr, Suite::Unisto, Suite::Markov, Suite::Games];
    let selected: Vec<Suite> = if suite == Suite::All { all.to_vec() } else { vec![suite] };
    let mut checks = Vec::new();
    for s in selected {
        let mut ctx = Ctx { suite: "", seed, checks: Vec::new() };
        match s {
            Suite::Geometry => geometry(&mut ctx, broken_fixture)?,
            Suite::Discord => discord(&mut ctx)?,
            Suite::Totalcorr => totalcorr(&mut ctx)?,
            Suite::Unisto => unisto(&mut ctx)?,
            Suite::Markov => markov_suite(&mut ctx)?,
            Suite::Games => games(&mut ctx)?,
            Suite::All => unreachable!(),
        }
        checks.extend(ctx.checks);
    }
    Ok(Summary { passed: checks.iter().all(|c| c.passed), seed, checks })
}

fn geometry(ctx: &mut Ctx, broken: bool) -> Result<(), CliError> {
    ctx.suite = "geometry";
    let fixture: StarTheory = if broken {
        markov::shared_theory().without_domain(0)?
    } else {
        markov::shared_theory().clone()
    };
    ctx.fortress("fixture fortress", validate_fortress(&fixture, &on_free_segment, FORTRESS_SAMPLES, ctx.seed));

    // Square section [−a, a]² in the ambient square [−1, 1]²: R((x, 0)) = (x − a)/(1 + a).
    let ambient: Vec<RealVector> = vec![vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]];
    let mut rng = ctx.rng(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a: f64 = rng.gen_range(0.1..0.8);
        let x: f64 = rng.gen_range(a..1.0);
        let square = ConvexSection::polytope("square", ambient.iter().map(|v| v.iter().map(|c| c * a).collect()).collect(), Metric::L2)?;
        worst = worst.max((robustness(&[x, 0.0], &square, &ambient)? - (x - a) / (1.0 + a)).abs());
    }
    ctx.push("robustness closed form", worst <= 1e-8, format!("max error {worst:.2e}"));

    let f = relative_error_factor(3)?;
    ctx.push("error factor", (f - 1.0 / 3f64.sqrt()).abs() <= 1e-12, format!("sigma = 3 gives {f}"));
    Ok(())
}

fn discord(ctx: &mut Ctx) -> Result<(), CliError> {
    ctx.suite = "discord";
    let theory = discord_theory([0.0; 3])?;
    let free = |p: &[f64]| on_free_section(&theory, p);
    ctx.fortress("fortress", validate_fortress(&theory, &free, FORTRESS_SAMPLES, ctx.seed));

    let mut rng = ctx.rng(2);
    let (mut worst_closed, mut worst_mono) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..DRAWS {
        let t = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if let Ok(q) = bell_diagonal_quantifier(t) {
            worst_closed = worst_closed.max((q - discord_quantifier(&TwoQubitFano::bell_diagonal(t))?.value).abs());
        }
        let s = random_state(&mut rng);
        let t = discord_theory(s.y)?;
        let g = discord_quantifier(&s)?.value;
        for op in [DiscordOp::Dephase12, DiscordOp::Stochastic3, DiscordOp::Depolarize] {
            let image = to_uv(&discord_free_op(&s, op, rng.gen())?)?.to_vector();
            let after = g_monotone(&image, &t)?.value;
            worst_mono = worst_mono.max(after - g);
        }
    }
    ctx.push("closed form", worst_closed <= 1e-10, format!("max deviation {worst_closed:.2e}"));
    ctx.push("monotonicity", worst_mono <= 1e-9, format!("largest increase {worst_mono:.2e}"));
    Ok(())
}

fn totalcorr(ctx: &mut Ctx) -> Result<(), CliError> {
    ctx.suite = "totalcorr";
    let theory = tc_theory(2, 2)?;
    let free = |p: &[f64]| JointDistribution::from_flat(2, 2, p).is_ok_and(|j| on_auxiliary_face(&j).unwrap_or(false));
    ctx.fortress("fortress", validate_fortress(&theory, &free, FORTRESS_SAMPLES, ctx.seed));

    let mut best = 0.0f64;
    for i in 0..=40 {
        for j in 0..=40 {
            for k in 0..10 {
                let (x, y) = (i as f64 / 40.0, j as f64 / 40.0);
                let p = JointDistribution::noisy_product(&[x, 1.0 - x], &[y, 1.0 - y], k as f64 / 10.0)?;
                best = best.max(tc_quantifier(&p)?.value);
            }
        }
    }
    ctx.push("critical constant", (best - TC_CRITICAL).abs() <= 1e-9, format!("free-grid max {best:.12}"));

    let mut rng = ctx.rng(3);
    let (mut worst_face, mut worst_mono, mut left_free) = (0.0f64, f64::NEG_INFINITY, 0);
    for _ in 0..DRAWS {
        let p = JointDistribution::from_flat(2, 2, &dirichlet(&mut rng, 4))?;
        for (party, idx) in [(Party::A, 0), (Party::A, 1), (Party::B, 0), (Party::B, 1)] {
            let mut verts: Vec<RealVector> = (0..2)
                .map(|k| {
                    let cell = if party == Party::A { idx * 2 + k } else { k * 2 + idx };
                    (0..4).map(|c| if c == cell { 1.0 } else { 0.0 }).collect()
                })
                .collect();
            verts.push(vec![0.25; 4]);
            let lp = project_onto_polytope(&p.flat(), &verts, Metric::Tv)?.1;
            worst_face = worst_face.max((lp - face_distance(&p, party, idx)?).abs());
        }
        let (la, lb) = ([rng.gen(), rng.gen()], [rng.gen(), rng.gen()]);
        worst_mono = worst_mono.max(tc_quantifier(&tc_free_op(&p, &la, &lb)?)?.value - tc_quantifier(&p)?.value);
        let x: f64 = rng.gen();
        let y: f64 = rng.gen();
        let q = JointDistribution::noisy_product(&[x, 1.0 - x], &[y, 1.0 - y], rng.gen())?;
        if tc_membership(&tc_free_op(&q, &la, &lb)?, 1e-6).is_none() {
            left_free += 1;
        }
    }
    ctx.push("face distances", worst_face <= 1e-6, format!("max deviation from projection {worst_face:.2e}"));
    ctx.push("monotonicity", worst_mono <= 1e-9, format!("largest increase {worst_mono:.2e}"));
    ctx.push("free op preserves free set", left_free == 0, format!("{left_free}/{DRAWS} images left the free set"));
    Ok(())
}

fn unisto(ctx: &mut Ctx) -> Result<(), CliError> {
    ctx.suite = "unisto";
    let tangent = nu_quantifier(&CirculantBistochastic::tangent_point()).value;
    ctx.push("critical constant", (tangent - NU_CRITICAL).abs() <= 1e-9, format!("tangent point value {tangent:.12}"));

    let theory = nu::shared_theory();
    ctx.fortress("fortress", validate_fortress(theory, &nu::on_free_triangle, FORTRESS_SAMPLES, ctx.seed));

    let mut rng = ctx.rng(4);
    let (mut worst_face, mut worst_mono) = (0.0f64, f64::NEG_INFINITY);
    let f1: Vec<RealVector> = vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.5, 0.0, 0.5]];
    let f2: Vec<RealVector> = vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0], vec![0.5, 0.0, 0.5, 0.0]];
    for _ in 0..DRAWS {
        let w = dirichlet(&mut rng, 4);
        let b = CirculantBistochastic::new([w[0], w[1], w[2], w[3]])?;
        for (which, verts) in [(Triangle::F1, &f1), (Triangle::F2, &f2)] {
            let lp = project_onto_polytope(&w, verts, Metric::L1)?.1;
            worst_face = worst_face.max((lp - triangle_distance(&b, which)).abs());
        }
        let g = nu_quantifier(&b).value;
        let shrunk = nu_quantifier(&nu_shrink(&b, rng.gen())?).value;
        let contracted = nu_quantifier(&nu_conic_contraction(&b, rng.gen(), rng.gen())?).value;
        worst_mono = worst_mono.max(shrunk.max(contracted) - g);
    }
    ctx.push("triangle distances", worst_face <= 1e-6, format!("max deviation from projection {worst_face:.2e}"));
    ctx.push("monotonicity", worst_mono <= 1e-9, format!("largest increase {worst_mono:.2e}"));
    Ok(())
}

fn markov_suite(ctx: &mut Ctx) -> Result<(), CliError> {
    ctx.suite = "markov";
    let crit = critical_value();
    let mut worst = 0.0f64;
    for k in 1..=3 {
        let focus = focus_channel(k)?;
        for j in (1..=3).filter(|&j| j != k) {
            worst = worst.max((segment_argmin(&focus, j)?.1 - crit).abs());
        }
    }
    ctx.push("critical constant", worst <= 1e-9, format!("focus-to-adjacent-segment deviation {worst:.2e}"));
    ctx.fortress("fortress", validate_fortress(markov::shared_theory(), &on_free_segment, FORTRESS_SAMPLES, ctx.seed));

    let mut rng = ctx.rng(5);
    let mut worst_mono = f64::NEG_INFINITY;
    for _ in 0..DRAWS {
        let w = dirichlet(&mut rng, 3);
        let m = PauliHalfMixture::from_weights([w[0], w[1], w[2]])?;
        let g = markov_quantifier(&m)?.value;
        let after = markov_quantifier(&markov::conic_contraction(&m, rng.gen(), rng.gen())?)?.value;
        worst_mono = worst_mono.max(after - g);
    }
    ctx.push("monotonicity", worst_mono <= 1e-9, format!("largest increase {worst_mono:.2e}"));
    Ok(())
}

fn games(ctx: &mut Ctx) -> Result<(), CliError> {
    ctx.suite = "games";
    let mut rng = ctx.rng(6);
    let (mut worst_div, mut worst_eff) = (0.0f64, 0.0f64);
    for _ in 0..DRAWS {
        let n = rng.gen_range(1..=8);
        let rs: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        worst_div = worst_div.max((harsanyi_dividend(&rs)? - rs.iter().product::<f64>()).abs());
        let total = (0..n).map(|i| shapley_value(&rs, i)).sum::<Result<f64, _>>()?;
        worst_eff = worst_eff.max((total - coalition_utility(&rs)?).abs());
    }
    ctx.push("dividend identity", worst_div <= 1e-12, format!("max error {worst_div:.2e}"));
    ctx.push("Shapley efficiency", worst_eff <= 1e-10, format!("max error {worst_eff:.2e}"));

    let mut worst_z = 0.0f64;
    for k in 0..4 {
        let ls: Vec<f64> = (0..=k).map(|_| rng.gen()).collect();
        let sim = simulate_gi_game(&ls, 200_000, ctx.seed.wrapping_add(k as u64))?;
        let sigma = (sim.analytic * (1.0 - sim.analytic) / sim.trials as f64).sqrt();
        worst_z = worst_z.max((sim.empirical - sim.analytic).abs() / sigma);
    }
    ctx.push("XOR game identity", worst_z <= 3.0, format!("worst deviation {worst_z:.2}σ"));
    Ok(())
}
