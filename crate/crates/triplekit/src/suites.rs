//! Self-test suites, one per acceptance criterion.
//!
//! Residual limits are stated for the default tolerance and scale linearly
//! with `tol_abs`, so a tighter tolerance tightens every suite.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use triplekit_core::grids::{orthogonal_closure, rectangular_grid, verify_rectangular_grid, RectGrid};
use triplekit_core::linalg::{c, max_abs, op_norm, CMatrix, CVector, C64, I, ONE, ZERO};
use triplekit_core::linear_map::{Branch, RealLinearMap};
use triplekit_core::reconstruction::{
    additive_tuples, check_preservation, make_oracle, phase_map_report, reconstruct, reconstruct_atomic, recipe_map,
    Config, PreservationMode, Recipe, TripotentOracle, ViolationClass,
};
use triplekit_core::sampling::random_tripotent;
use triplekit_core::spin::{lorentz_boost, matrix_rep, polar_tripotent_part, spin_determinant, spin_state, Axis};
use triplekit_core::tripotent::{is_quadrangle, is_trangle, is_tripotent, peirce, Peirce, Tolerance};
use triplekit_core::{factors::random_element_with, norm, triple_product, Element, Factor};

type CoreResult<T> = triplekit_core::Result<T>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Verification samples per reconstruction.
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, tol_abs: 1e-9, tol_rel: 1e-9, samples: 300 }
    }
}

impl RunConfig {
    pub fn tolerance(&self) -> CoreResult<Tolerance> {
        Tolerance::new(self.tol_abs, self.tol_rel)
    }

    /// Factor applied to every residual limit.
    pub fn scale(&self) -> f64 {
        self.tol_abs / 1e-9
    }

    pub fn suite_seed(&self, id: usize) -> u64 {
        let mut z = self.seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: Option<f64>,
    pub limit: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn max(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { label: label.into(), value: Some(value), limit: Some(limit), pass: value <= limit }
    }

    pub fn flag(label: impl Into<String>, pass: bool) -> Self {
        Check { label: label.into(), value: None, limit: None, pass }
    }

    /// `got` out of `total`, passing when all of them succeed.
    pub fn all(label: impl Into<String>, got: usize, total: usize) -> Self {
        Check {
            label: format!("{} ({got}/{total})", label.into()),
            value: None,
            limit: None,
            pass: got == total && total > 0,
        }
    }

    pub fn line(&self) -> String {
        let mark = if self.pass { "ok" } else { "FAILED" };
        match (self.value, self.limit) {
            (Some(v), Some(l)) => format!("{}: {v:.3e} <= {l:.1e} {mark}", self.label),
            _ => format!("{}: {mark}", self.label),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<Check>,
    /// Error that aborted the suite.
    pub error: Option<String>,
}

impl SuiteOutcome {
    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "pass": self.pass(),
            "error": self.error,
            "checks": self.checks.iter().map(|c| json!({
                "label": c.label,
                "value": c.value,
                "limit": c.limit,
                "pass": c.pass,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Suite ids, names and runtime budgets.
pub const SUITES: [(usize, &str, Option<u64>); 9] = [
    (1, "triple axiom (c)", Some(5)),
    (2, "Peirce decomposition", Some(10)),
    (3, "spin model transport", None),
    (4, "Lorentz invariance", None),
    (5, "reconstruction round trips", Some(60)),
    (6, "atomic routing", None),
    (7, "preservation checker", None),
    (8, "phase-map laws", None),
    (9, "grid axioms", None),
];

pub fn suite_name(id: usize) -> &'static str {
    SUITES.iter().find(|s| s.0 == id).map_or("unknown", |s| s.1)
}

pub fn budget(id: usize) -> Option<Duration> {
    SUITES.iter().find(|s| s.0 == id).and_then(|s| s.2).map(Duration::from_secs)
}

pub fn run_suite(id: usize, cfg: &RunConfig) -> SuiteOutcome {
    let mut checks = Vec::new();
    let res = cfg.tolerance().and_then(|tol| {
        let ctx = Ctx { cfg, tol, scale: cfg.scale(), seed: cfg.suite_seed(id) };
        match id {
            1 => axiom_c(&ctx, &mut checks),
            2 => peirce_suite(&ctx, &mut checks),
            3 => spin_model(&ctx, &mut checks),
            4 => lorentz(&ctx, &mut checks),
            5 => round_trips(&ctx, &mut checks),
            6 => atomic(&ctx, &mut checks),
            7 => preservation(&ctx, &mut checks),
            8 => phase_laws(&ctx, &mut checks),
            9 => grid_axioms(&ctx, &mut checks),
            _ => Err(triplekit_core::Error::Precondition(format!("no suite {id}"))),
        }
    });
    SuiteOutcome { id, name: suite_name(id), checks, error: res.err().map(|e| e.to_string()) }
}

pub fn run_timed(id: usize, cfg: &RunConfig) -> (SuiteOutcome, Duration) {
    let start = Instant::now();
    let out = run_suite(id, cfg);
    (out, start.elapsed())
}

pub fn run_all(cfg: &RunConfig) -> Vec<(SuiteOutcome, Duration)> {
    SUITES.iter().map(|s| run_timed(s.0, cfg)).collect()
}

/// Summary without timings, so equal configs give byte-identical output.
pub fn summary_value(cfg: &RunConfig, outcomes: &[SuiteOutcome]) -> Value {
    json!({
        "config": {
            "seed": cfg.seed,
            "tol_abs": cfg.tol_abs,
            "tol_rel": cfg.tol_rel,
            "samples": cfg.samples,
        },
        "pass": outcomes.iter().all(SuiteOutcome::pass),
        "suites": outcomes.iter().map(SuiteOutcome::to_value).collect::<Vec<_>>(),
    })
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    tol: Tolerance,
    scale: f64,
    seed: u64,
}

impl Ctx<'_> {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    fn limit(&self, base: f64) -> f64 {
        base * self.scale
    }
}

fn axiom_kinds() -> Vec<Factor> {
    let mut v = vec![Factor::Rect { m: 2, n: 3 }, Factor::Skew { n: 4 }, Factor::Herm { n: 3 }];
    v.extend((3..=6).map(|d| Factor::Spin { d }));
    v
}

fn axiom_c(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    for (k, f) in axiom_kinds().into_iter().enumerate() {
        let mut rng = ctx.rng(k as u64);
        let mut worst = 0.0_f64;
        for _ in 0..1000 {
            let a = random_element_with(&f, &mut rng)?;
            let n3 = norm(&a).powi(3);
            let cube = norm(&triple_product(&a, &a, &a)?);
            worst = worst.max((cube - n3).abs() / n3);
        }
        checks.push(Check::max(format!("{f}: |‖{{a,a,a}}‖ - ‖a‖³| / ‖a‖³"), worst, ctx.limit(1e-9)));
    }
    Ok(())
}

fn peirce_suite(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    for (k, f) in axiom_kinds().into_iter().enumerate() {
        let mut rng = ctx.rng(k as u64);
        let (mut sum, mut agree, mut vanish) = (0.0_f64, 0.0_f64, 0.0_f64);
        for _ in 0..200 {
            let e = random_tripotent(&f, &mut rng)?;
            let p = peirce(&e, ctx.tol)?;
            let x = random_element_with(&f, &mut rng)?;
            let sx = norm(&x).max(1.0);
            let mut total = Element::zero(&f);
            let mut closed = Element::zero(&f);
            for k in Peirce::ALL {
                let pe = p.project(k, &x)?;
                let pc = p.project_closed(k, &x)?;
                agree = agree.max(norm(&(&pe - &pc)) / sx);
                total = &total + &pe;
                closed = &closed + &pc;
            }
            sum = sum.max(norm(&(&total - &x)) / sx).max(norm(&(&closed - &x)) / sx);
            let a = p.project(Peirce::Two, &random_element_with(&f, &mut rng)?)?;
            let b = p.project(Peirce::Zero, &random_element_with(&f, &mut rng)?)?;
            let z = random_element_with(&f, &mut rng)?;
            let s = (norm(&a) * norm(&b) * norm(&z)).max(1.0);
            vanish = vanish.max(norm(&triple_product(&a, &b, &z)?) / s);
        }
        checks.push(Check::max(format!("{f}: P0 + P1 + P2 - Id"), sum, ctx.limit(1e-10)));
        checks.push(Check::max(format!("{f}: closed form vs eigenprojection"), agree, ctx.limit(1e-9)));
        checks.push(Check::max(format!("{f}: {{E2, E0, E}}"), vanish, ctx.limit(1e-9)));
    }
    Ok(())
}

fn det2(m: &CMatrix) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn m2(a: C64, b: C64, c_: C64, d: C64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, c_, d])
}

/// `v v*` for the unit vector `v / |v|`.
fn projector(v: [C64; 2]) -> CMatrix {
    let n2 = v[0].norm_sqr() + v[1].norm_sqr();
    CMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj() / n2)
}

fn spin_model(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    let f = Factor::Spin { d: 4 };
    let mut rng = ctx.rng(0);
    let (mut dn, mut dd) = (0.0_f64, 0.0_f64);
    for _ in 0..1000 {
        let x = random_element_with(&f, &mut rng)?;
        let xm = matrix_rep(&x)?;
        let on = op_norm(&xm);
        dn = dn.max((norm(&x) - on).abs() / on);
        dd = dd.max((spin_determinant(&x)? - det2(&xm)).norm() / (on * on));
    }
    checks.push(Check::max("norm vs operator norm of the matrix model", dn, ctx.limit(1e-9)));
    checks.push(Check::max("determinant vs 2x2 determinant", dd, ctx.limit(1e-9)));

    let h = c(0.5, 0.0);
    let hi = c(0.0, 0.5);
    let displayed = [
        ("P_x+", m2(h, h, h, h)),
        ("P_x-", m2(h, -h, -h, h)),
        ("P_y+", m2(h, hi, -hi, h)),
        ("P_y-", m2(h, -hi, hi, h)),
        ("P_z+", m2(ONE, ZERO, ZERO, ZERO)),
        ("P_z-", m2(ZERO, ZERO, ZERO, ONE)),
    ];
    let kets = [
        [ONE, ONE],
        [ONE, -ONE],
        [ONE, I],
        [ONE, -I],
        [ONE, ZERO],
        [ZERO, ONE],
    ];
    let mut states = Vec::new();
    for (k, ket) in kets.iter().enumerate() {
        let mut b = [0.0; 3];
        b[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
        let s = matrix_rep(&spin_state(b, ctx.tol)?)?;
        let d = max_abs(&(&s - projector(*ket)));
        checks.push(Check::max(format!("{}: spin_state vs projection onto its ket", displayed[k].0), d, ctx.limit(1e-12)));
        states.push(s);
    }
    // The displayed y matrices carry each other's labels.
    for (k, label) in [(0, "P_x+"), (1, "P_x-"), (4, "P_z+"), (5, "P_z-"), (2, "P_y+ (as displayed P_y-)"), (3, "P_y- (as displayed P_y+)")] {
        let shown = match k {
            2 => &displayed[3].1,
            3 => &displayed[2].1,
            _ => &displayed[k].1,
        };
        checks.push(Check::max(format!("{label}: displayed matrix"), max_abs(&(&states[k] - shown)), ctx.limit(1e-12)));
    }
    let matched = displayed
        .iter()
        .filter(|(_, d)| states.iter().any(|s| max_abs(&(s - d)) <= ctx.limit(1e-12)))
        .count();
    checks.push(Check::all("displayed matrices reproduced as a set", matched, 6));
    Ok(())
}

fn lorentz(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    let f = Factor::Spin { d: 4 };
    let mut rng = ctx.rng(0);
    let mut worst = 0.0_f64;
    for _ in 0..300 {
        let x = random_element_with(&f, &mut rng)?;
        let chi = rng.random_range(-3.0..=3.0);
        let axis = Axis::from_index(rng.random_range(1..=3))?;
        let y = lorentz_boost(&x, chi, axis)?;
        worst = worst.max((spin_determinant(&y)? - spin_determinant(&x)?).norm());
    }
    checks.push(Check::max("|det(boost x) - det x|", worst, ctx.limit(1e-9)));

    let id = Element::basis(&f, 0)?;
    let pz = spin_state([0.0, 0.0, 1.0], ctx.tol)?;
    for (label, x) in [("identity", id), ("P_z+", pz)] {
        let y = lorentz_boost(&x, 0.5, Axis::Z)?;
        checks.push(Check::flag(format!("boosted {label} is not a tripotent"), !is_tripotent(&y, ctx.tol)));
        let p = polar_tripotent_part(&y, ctx.tol)?;
        checks.push(Check::flag(format!("polar part of boosted {label} is a tripotent"), is_tripotent(&p, ctx.tol)));
        checks.push(Check::max(format!("polar part of boosted {label} vs {label}"), norm(&(&p - &x)), ctx.limit(1e-9)));
    }
    Ok(())
}

fn branch_of(antilinear: bool) -> Branch {
    if antilinear {
        Branch::Antilinear
    } else {
        Branch::Linear
    }
}

fn reconstruction_config(ctx: &Ctx, seed: u64) -> Config {
    Config { tol: ctx.tol, samples: ctx.cfg.samples, seed }
}

/// Largest coefficient distance between two maps with the same domain.
fn map_distance(a: &RealLinearMap, b: &RealLinearMap) -> f64 {
    let part = |x: Option<&CMatrix>, y: Option<&CMatrix>| match (x, y) {
        (Some(x), Some(y)) => max_abs(&(x - y)),
        (Some(x), None) | (None, Some(x)) => max_abs(x),
        (None, None) => 0.0,
    };
    if a.target() != b.target() {
        return f64::INFINITY;
    }
    part(a.linear_part(), b.linear_part()).max(part(a.antilinear_part(), b.antilinear_part()))
}

fn round_trips(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    let mut cases: Vec<Factor> = (3..=6).map(|d| Factor::Spin { d }).collect();
    cases.extend([(2, 2), (2, 3), (3, 3), (3, 4)].map(|(m, n)| Factor::Rect { m, n }));
    let (mut total, mut branch_ok, mut square, mut form_ok, mut samples_ok) = (0, 0, 0, 0, 0);
    let (mut residual, mut distance) = (0.0_f64, 0.0_f64);
    let mut failures = Vec::new();
    for (ci, f) in cases.iter().enumerate() {
        let mut rng = ctx.rng(ci as u64);
        for k in 0..25 {
            let antilinear = k % 2 == 1;
            let transpose = (k / 2) % 2 == 1;
            let recipe = match f {
                Factor::Spin { .. } => Recipe::Spin {
                    lambda0: C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
                    rotation_seed: rng.random(),
                    antilinear,
                },
                _ => Recipe::Rect { seed: Some(rng.random()), transpose, antilinear },
            };
            total += 1;
            let truth = recipe_map(f, &recipe)?;
            let phi = TripotentOracle::from_map(truth.clone()).with_tolerance(ctx.tol);
            let report = match reconstruct(&phi, &reconstruction_config(ctx, rng.random())) {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("{f} case {k}: {e}"));
                    continue;
                }
            };
            branch_ok += usize::from(report.branch() == Some(branch_of(antilinear)));
            samples_ok += usize::from(report.n_samples() >= 300);
            residual = residual.max(report.max_residual());
            distance = distance.max(map_distance(&report.map, &truth));
            if let Factor::Rect { m, n } = f {
                if m == n {
                    square += 1;
                    let want = 1 + u8::from(antilinear) + 2 * u8::from(transpose);
                    form_ok += usize::from(report.blocks[0].form.as_ref().map(|s| s.form) == Some(want));
                }
            }
        }
    }
    checks.push(Check::all("reconstructions completed", total - failures.len(), total));
    checks.push(Check::all("branch detected", branch_ok, total));
    checks.push(Check::all("at least 300 verification samples", samples_ok, total));
    checks.push(Check::max("max residual against the oracle", residual, ctx.limit(1e-8)));
    checks.push(Check::max("coefficient distance to the ground truth", distance, ctx.limit(1e-8)));
    checks.push(Check::all("square automorphism form recovered", form_ok, square));
    if let Some(first) = failures.first() {
        checks.push(Check::flag(format!("first failure: {first}"), false));
    }
    Ok(())
}

fn permutations3() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

fn atomic(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    let domain = Factor::sum(vec![Factor::Spin { d: 3 }, Factor::Rect { m: 2, n: 2 }, Factor::Spin { d: 4 }])?;
    let mut rng = ctx.rng(0);
    let (mut sigma_ok, mut branches_ok, mut routed_ok, mut n) = (0, 0, 0, 0);
    let mut residual = 0.0_f64;
    for (k, sigma) in permutations3().into_iter().enumerate() {
        // Alternate the branch pattern so every run mixes linear and antilinear blocks.
        let anti = if k % 2 == 0 { [false, true, true] } else { [true, false, true] };
        let spin = |rng: &mut ChaCha8Rng, a: bool| Recipe::Spin {
            lambda0: C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
            rotation_seed: rng.random(),
            antilinear: a,
        };
        let components = vec![
            spin(&mut rng, anti[0]),
            Recipe::Rect { seed: Some(rng.random()), transpose: rng.random(), antilinear: anti[1] },
            spin(&mut rng, anti[2]),
        ];
        let phi = make_oracle(&domain, &Recipe::Sum { components, sigma: sigma.to_vec() })?.with_tolerance(ctx.tol);
        let report = reconstruct_atomic(&phi, &reconstruction_config(ctx, rng.random()))?;
        n += 1;
        sigma_ok += usize::from(report.sigma == sigma);
        branches_ok += usize::from(report.branches() == anti.map(branch_of).to_vec());
        routed_ok += usize::from(report.blocks.iter().enumerate().all(|(i, b)| b.source == i && b.dest == sigma[i]));
        for b in &report.blocks {
            residual = residual.max(b.residual);
        }
        residual = residual.max(report.max_residual());
    }
    checks.push(Check::all("σ recovered", sigma_ok, n));
    checks.push(Check::all("per-block branches recovered", branches_ok, n));
    checks.push(Check::all("blocks routed along σ", routed_ok, n));
    checks.push(Check::max("per-block residual", residual, ctx.limit(1e-8)));
    Ok(())
}

fn spin_vector(d: usize, entries: &[(usize, C64)]) -> CoreResult<Element> {
    let mut v = CVector::zeros(d);
    for &(k, z) in entries {
        v[k] = z;
    }
    Element::from_vector(Factor::Spin { d }, v)
}

/// `0`, `e0`, `e1` and the minimal tripotents `½(e0 ± i e_k)`, `½(e1 ± i e_k)`.
fn spin_family() -> CoreResult<Vec<Element>> {
    let d = 4;
    let h = c(0.5, 0.0);
    let hi = c(0.0, 0.5);
    let mut out = vec![Element::zero(&Factor::Spin { d }), spin_vector(d, &[(0, ONE)])?, spin_vector(d, &[(1, ONE)])?];
    for k in 1..4 {
        out.push(spin_vector(d, &[(0, h), (k, hi)])?);
        out.push(spin_vector(d, &[(0, h), (k, -hi)])?);
    }
    for k in 2..4 {
        out.push(spin_vector(d, &[(1, h), (k, hi)])?);
        out.push(spin_vector(d, &[(1, h), (k, -hi)])?);
    }
    Ok(out)
}

fn unit(f: &Factor, i: usize, j: usize) -> CoreResult<Element> {
    let (m, n) = f.matrix_shape().expect("matrix factor");
    let mut a = CMatrix::zeros(m, n);
    a[(i, j)] = ONE;
    Element::from_matrix(f.clone(), a)
}

fn preservation(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    let mut rng = ctx.rng(0);
    let r33 = Factor::Rect { m: 3, n: 3 };
    let r23 = Factor::Rect { m: 2, n: 3 };
    let s4 = Factor::Spin { d: 4 };
    let grid33 = orthogonal_closure(rectangular_grid(3, 3)?.cells(), ctx.tol)?;
    let grid23 = orthogonal_closure(rectangular_grid(2, 3)?.cells(), ctx.tol)?;
    let spin = spin_family()?;
    let mut spin_recipe = |a: bool| Recipe::Spin {
        lambda0: C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
        rotation_seed: rng.random(),
        antilinear: a,
    };
    let spin_recipes = [spin_recipe(false), spin_recipe(true)];
    let cases: Vec<(&str, &Vec<Element>, &Factor, Vec<Recipe>)> = vec![
        (
            "rectangular_grid(3,3) closure",
            &grid33,
            &r33,
            vec![
                Recipe::Identity,
                Recipe::Conjugation,
                Recipe::Rect { seed: Some(rng.random()), transpose: false, antilinear: false },
                Recipe::Rect { seed: Some(rng.random()), transpose: true, antilinear: true },
            ],
        ),
        (
            "rectangular_grid(2,3) closure",
            &grid23,
            &r23,
            vec![Recipe::Rect { seed: Some(rng.random()), transpose: true, antilinear: false }],
        ),
        ("spin(4) state family", &spin, &s4, spin_recipes.to_vec()),
    ];
    for (label, family, f, recipes) in cases {
        let tuples = additive_tuples(family, ctx.tol)?;
        let (mut violations, mut backward, mut additive, mut runs) = (0, 0, 0, 0);
        for recipe in &recipes {
            let phi = make_oracle(f, recipe)?.with_tolerance(ctx.tol);
            for mode in [PreservationMode::Full, PreservationMode::OrderOnly] {
                let r = check_preservation(family, &tuples, &phi, ctx.tol, mode)?;
                violations += r.violations.len();
                runs += 1;
                backward += usize::from(r.orthogonality_backward_confirmed > 0);
                additive += usize::from(r.additivity_confirmed == tuples.len() && !tuples.is_empty());
            }
        }
        checks.push(Check::flag(format!("{label} ({} members): zero violations", family.len()), violations == 0 && family.len() <= 64));
        checks.push(Check::all(format!("{label}: orthogonality confirmed in both directions"), backward, runs));
        checks.push(Check::all(format!("{label}: additivity over {} tuples", tuples.len()), additive, runs));
    }

    let r22 = Factor::Rect { m: 2, n: 2 };
    let small = |f: &Factor| -> CoreResult<Vec<Element>> {
        let (e11, e22) = (unit(f, 0, 0)?, unit(f, 1, 1)?);
        Ok(vec![Element::zero(f), e11.clone(), e22.clone(), &e11 + &e22])
    };
    let f22 = small(&r22)?;
    let f33 = small(&r33)?;
    let e33 = unit(&r33, 2, 2)?;
    let tables: [(&str, &Vec<Element>, Vec<Element>, ViolationClass); 3] = [
        (
            "E11 and E11 + E22 swapped",
            &f22,
            vec![f22[0].clone(), f22[3].clone(), f22[2].clone(), f22[1].clone()],
            ViolationClass::Order,
        ),
        (
            "E22 sent to E12",
            &f22,
            vec![f22[0].clone(), f22[1].clone(), unit(&r22, 0, 1)?, f22[3].clone()],
            ViolationClass::OrthogonalityForward,
        ),
        (
            "E11 + E22 sent to E11 + E22 + E33",
            &f33,
            vec![f33[0].clone(), f33[1].clone(), f33[2].clone(), &f33[3] + &e33],
            ViolationClass::Additivity,
        ),
    ];
    for (label, family, images, class) in tables {
        let f = family[0].factor().clone();
        let entries = family.iter().cloned().zip(images).collect();
        let phi = TripotentOracle::table(f.clone(), f, entries, ctx.tol)?;
        let tuples = additive_tuples(family, ctx.tol)?;
        let r = check_preservation(family, &tuples, &phi, ctx.tol, PreservationMode::Full)?;
        checks.push(Check::flag(format!("table \"{label}\" rejected as {}", class.name()), r.has(class)));
    }
    Ok(())
}

fn phase_laws(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    let mut rng = ctx.rng(0);
    let mut lambda0 = || C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
    let cases = [
        (Factor::Rect { m: 3, n: 3 }, Recipe::Identity),
        (Factor::Spin { d: 5 }, Recipe::Conjugation),
        (Factor::Spin { d: 4 }, Recipe::Spin { lambda0: lambda0(), rotation_seed: 3, antilinear: false }),
        (Factor::Spin { d: 6 }, Recipe::Spin { lambda0: lambda0(), rotation_seed: 4, antilinear: true }),
        (Factor::Rect { m: 2, n: 3 }, Recipe::Rect { seed: Some(5), transpose: false, antilinear: true }),
        (Factor::Rect { m: 3, n: 3 }, Recipe::Rect { seed: Some(6), transpose: true, antilinear: false }),
        (Factor::Rect { m: 2, n: 4 }, Recipe::Rect { seed: Some(7), transpose: true, antilinear: true }),
    ];
    let (mut mult, mut conj, mut minus, mut cross) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let (mut fi_ok, mut n) = (0, 0);
    for (k, (f, recipe)) in cases.iter().enumerate() {
        let phi = make_oracle(f, recipe)?.with_tolerance(ctx.tol);
        let mut r = ctx.rng(100 + k as u64);
        let u = random_tripotent(f, &mut r)?;
        let w = random_tripotent(f, &mut r)?;
        let rep = phase_map_report(&phi, &u, Some(&w), 100, r.random(), ctx.tol)?;
        mult = mult.max(rep.multiplicativity);
        conj = conj.max(rep.conjugation);
        minus = minus.max(rep.minus_one);
        cross = cross.max(rep.cross);
        let want = match phi.ground_truth().and_then(RealLinearMap::branch) {
            Some(Branch::Antilinear) => -I,
            _ => I,
        };
        fi_ok += usize::from((rep.f_i - want).norm() <= ctx.limit(1e-9));
        n += 1;
    }
    checks.push(Check::max("multiplicativity f(λμ) = f(λ)f(μ)", mult, ctx.limit(1e-9)));
    checks.push(Check::max("conjugation symmetry f(conj λ) = conj f(λ)", conj, ctx.limit(1e-9)));
    checks.push(Check::max("f(-1) = -1", minus, ctx.limit(1e-9)));
    checks.push(Check::max("agreement across two tripotents", cross, ctx.limit(1e-9)));
    checks.push(Check::all("f(i) matches the branch", fi_ok, n));
    Ok(())
}

fn image_grid(grid: &RectGrid, phi: &TripotentOracle) -> CoreResult<RectGrid> {
    grid.with_cells(grid.cells().iter().map(|x| phi.apply(x)).collect::<CoreResult<_>>()?)
}

fn grid_axioms(ctx: &Ctx, checks: &mut Vec<Check>) -> CoreResult<()> {
    let grid = rectangular_grid(3, 4)?;
    let base = verify_rectangular_grid(&grid, ctx.tol);
    checks.push(Check::flag(format!("rectangular_grid(3,4): {} checks, zero violations", base.checks), base.ok && base.violations.is_empty()));

    let f = grid.factor().clone();
    let mut rng = ctx.rng(0);
    let mut recipes = vec![Recipe::Identity, Recipe::Conjugation];
    for _ in 0..2 {
        for (transpose, antilinear) in [(false, false), (false, true), (true, false), (true, true)] {
            recipes.push(Recipe::Rect { seed: Some(rng.random()), transpose, antilinear });
        }
    }
    let (e11, e12, e21, e22) = (unit(&f, 0, 0)?, unit(&f, 0, 1)?, unit(&f, 1, 0)?, unit(&f, 1, 1)?);
    let u = &e12 + &e21;
    let quad = is_quadrangle(&e11, &e12, &e22, &e21, ctx.tol)?;
    let tri = is_trangle(&e11, &u, &e22, ctx.tol)?;
    let (mut grids_ok, mut quads, mut tris) = (0, 0, 0);
    for recipe in &recipes {
        let phi = make_oracle(&f, recipe)?.with_tolerance(ctx.tol);
        let r = verify_rectangular_grid(&image_grid(&grid, &phi)?, ctx.tol);
        grids_ok += usize::from(r.ok && r.violations.is_empty());
        let p = |x: &Element| phi.apply(x);
        quads += usize::from(is_quadrangle(&p(&e11)?, &p(&e12)?, &p(&e22)?, &p(&e21)?, ctx.tol)?);
        tris += usize::from(is_trangle(&p(&e11)?, &p(&u)?, &p(&e22)?, ctx.tol)?);
    }
    checks.push(Check::all("grid images under generated oracles", grids_ok, recipes.len()));
    checks.push(Check::flag("canonical quadrangle (E11, E12, E22, E21)", quad));
    checks.push(Check::flag("canonical trangle (E11, E12 + E21, E22)", tri));
    checks.push(Check::all("quadrangle images", quads, recipes.len()));
    checks.push(Check::all("trangle images", tris, recipes.len()));
    Ok(())
}
