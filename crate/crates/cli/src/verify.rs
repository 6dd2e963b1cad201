//! `verify <suite>`: randomized property checks with worst-case reporting.

use cz_mech_core::constitutive::{
    apply, compose, invert, is_well_defined, planar_rotation, IsoMap2, IsoMap3, IsoMapSym2, IsoMapSym3, IsotropicMap,
};
use cz_mech_core::continuum::{lemma1_residual, Bounds, TensorField};
use cz_mech_core::dynamics::{
    integrate_mass_point, multiphase_step, nbody_simulate, simulate_rigid_body, MassPoint, MassPointState,
    MultiphaseState, NbodyConfig, RigidBodyModel, RigidBodyState,
};
use cz_mech_core::frames::{
    compose as compose_placements, factorizations, generators, integrate_rotation, wrench_transform, FrameVelocity,
    Placement, Rotation,
};
use cz_mech_core::linalg::{max_abs, norm, orthogonality_residual};
use cz_mech_core::measures::{continuity_residual, transport_derivative, Grid, MassDistribution, PointMass};
use cz_mech_core::screw::{alternant, reduction_matrix_4d, screw_total, skew, Slider};
use nalgebra::{Matrix2, Matrix3, Matrix4, Matrix6, SMatrix, SVector, Vector2, Vector3, Vector4, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::simulate::num;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Screw,
    Galilean,
    Constitutive,
    Lemma1,
    Transport,
    Dynamics,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Screw => "screw",
            Suite::Galilean => "galilean",
            Suite::Constitutive => "constitutive",
            Suite::Lemma1 => "lemma1",
            Suite::Transport => "transport",
            Suite::Dynamics => "dynamics",
            Suite::All => "all",
        }
    }

    pub const MEMBERS: [Suite; 6] =
        [Suite::Screw, Suite::Galilean, Suite::Constitutive, Suite::Lemma1, Suite::Transport, Suite::Dynamics];
}

/// Worst residual of one property over all trials.
#[derive(Clone, Debug)]
pub struct Property {
    pub name: String,
    pub tolerance: f64,
    pub max_residual: f64,
    pub counterexample: Option<String>,
}

impl Property {
    fn new(name: &str, tolerance: f64) -> Self {
        Self { name: name.to_string(), tolerance, max_residual: 0.0, counterexample: None }
    }

    /// Records `residual`; the input is serialized only when it is the worst so far.
    fn observe(&mut self, residual: f64, input: impl FnOnce() -> Vec<f64>) {
        let worse = residual > self.max_residual || residual.is_nan();
        if worse && !self.max_residual.is_nan() {
            self.max_residual = residual;
            self.counterexample = Some(serde_json::to_string(&input()).expect("finite floats serialize"));
        }
    }

    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

pub struct SuiteReport {
    pub suite: &'static str,
    pub trials: usize,
    pub seed: u64,
    pub properties: Vec<Property>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(Property::passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!("suite {} trials {} seed {}\n", self.suite, self.trials, self.seed);
        for p in &self.properties {
            let flag = if p.passed() { "PASS" } else { "FAIL" };
            out += &format!(
                "  {} max_residual {} tolerance {} {}\n",
                p.name,
                num(p.max_residual),
                num(p.tolerance),
                flag
            );
            if !p.passed() {
                if let Some(c) = &p.counterexample {
                    out += &format!("    counterexample {c}\n");
                }
            }
        }
        out += &format!("suite {} {}\n", self.suite, if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

fn rv3(rng: &mut ChaCha8Rng, s: f64) -> Vector3<f64> {
    Vector3::new(rng.random_range(-s..s), rng.random_range(-s..s), rng.random_range(-s..s))
}

fn rmat<const R: usize, const C: usize>(rng: &mut ChaCha8Rng, s: f64) -> SMatrix<f64, R, C> {
    SMatrix::from_fn(|_, _| rng.random_range(-s..s))
}

fn rrot(rng: &mut ChaCha8Rng) -> Rotation<f64> {
    let mut axis = rv3(rng, 1.0);
    while norm(&axis) < 1e-3 {
        axis = rv3(rng, 1.0);
    }
    Rotation::about_axis(&(axis / norm(&axis)), rng.random_range(-3.0..3.0))
}

fn flat<const R: usize, const C: usize>(parts: &[&SMatrix<f64, R, C>]) -> Vec<f64> {
    parts.iter().flat_map(|m| m.iter().copied()).collect()
}

/// Runs one suite (not `All`) with tolerances multiplied by `eps_scale`.
pub fn run_suite(suite: Suite, trials: usize, seed: u64, eps_scale: f64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (suite as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut properties = match suite {
        Suite::Screw => screw(&mut rng, trials),
        Suite::Galilean => galilean(&mut rng, trials),
        Suite::Constitutive => constitutive(&mut rng, trials),
        Suite::Lemma1 => lemma1(&mut rng, trials),
        Suite::Transport => transport(&mut rng, trials),
        Suite::Dynamics => dynamics(&mut rng, trials),
        Suite::All => unreachable!("expanded by the caller"),
    };
    for p in &mut properties {
        p.tolerance *= eps_scale;
    }
    SuiteReport { suite: suite.name(), trials, seed, properties }
}

fn screw(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Property> {
    let mut two_path = Property::new("reduction_two_path", 1e-12);
    let mut split = Property::new("torque_split", 1e-12);
    let mut shift = Property::new("total_shift", 1e-12);
    let mut alt4 = Property::new("alternant_4d", 1e-15);
    let mut alt2 = Property::new("alternant_2d", 1e-15);
    for _ in 0..trials {
        let (p, q, b, x, y) = (rv3(rng, 2.0), rv3(rng, 2.0), rv3(rng, 5.0), rv3(rng, 5.0), rv3(rng, 5.0));
        let s = Slider::<f64, 3>::new(p, q, b);
        let direct = s.reduce(&y);
        let via = s.reduce(&x).shifted_to(&y);
        let scale = 1.0 + norm(&direct.q);
        two_path.observe(direct.max_abs_diff(&via) / scale, || flat(&[&p, &q, &b, &x, &y]));

        let items: Vec<(f64, Slider<f64, 3>)> =
            (0..4).map(|_| (rng.random_range(0.1..2.0), Slider::new(rv3(rng, 2.0), rv3(rng, 2.0), rv3(rng, 5.0)))).collect();
        let tot = screw_total(&items, &y);
        let mut intrinsic = Vector3::zeros();
        let mut resultant = Vector3::zeros();
        for (w, s) in &items {
            intrinsic += s.q * *w;
            resultant += (s.base - y).cross(&s.p) * *w;
        }
        let scale = 1.0 + norm(&tot.total.q);
        let r = norm(&(tot.intrinsic_torque - intrinsic)).max(norm(&(tot.resultant_torque - resultant)));
        let r = r.max(norm(&(tot.total.q - intrinsic - resultant)));
        split.observe(r / scale, || flat(&[&y]));
        let z = x;
        let at_z = screw_total(&items, &z).total;
        let expected = at_z.q + (z - y).cross(&at_z.p);
        shift.observe(norm(&(tot.total.q - expected)) / scale, || flat(&[&y, &z]));

        let r4 = Vector4::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let p4 = Vector4::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let m = Matrix4::from_fn(|i, j| p4[i] * r4[j] - r4[i] * p4[j]);
        let expected = SVector::<f64, 8>::from_column_slice(&[m[(2, 1)], m[(0, 2)], m[(1, 0)], 0.0, m[(0, 3)], m[(1, 3)], m[(2, 3)], 0.0]);
        let got = reduction_matrix_4d(&r4) * p4;
        alt4.observe(max_abs(&(got - expected)), || flat(&[&r4, &p4]));

        let (r2, p2) = (Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)), Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let got = alternant::<f64, 2>(&r2, &p2).0;
        let m = p2 * r2.transpose() - r2 * p2.transpose();
        alt2.observe((got - m[(1, 0)]).abs(), || flat(&[&r2, &p2]));
    }
    vec![two_path, split, shift, alt4, alt2]
}

fn l6(p: &Placement<f64>) -> Matrix6<f64> {
    wrench_transform(p).matrix
}

fn galilean(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Property> {
    let mut closure = Property::new("closure", 1e-11);
    let mut inverse = Property::new("inverse", 1e-11);
    let mut factor = Property::new("factorizations", 1e-11);
    let mut gen_phi = Property::new("generator_phi", 1e-6);
    let mut gen_psi = Property::new("generator_psi", 1e-6);
    let mut poisson = Property::new("poisson_closed_form", 1e-9);
    let mut ortho = Property::new("poisson_orthogonality", 1e-12);
    for trial in 0..trials {
        let a = Placement::new(rrot(rng), rv3(rng, 3.0));
        let b = Placement::new(rrot(rng), rv3(rng, 3.0));
        let (la, lb) = (l6(&a), l6(&b));
        let scale = max_abs(&la).max(1.0) * max_abs(&lb).max(1.0);
        closure.observe(max_abs(&(l6(&compose_placements(&a, &b)) - la * lb)) / scale, || flat(&[a.c(), b.c()]));
        inverse.observe(max_abs(&(la * l6(&a.invert()) - Matrix6::identity())) / scale, || flat(&[a.c()]));
        let (f1, f2) = factorizations(&a);
        factor.observe(max_abs(&(f1 - f2)) / max_abs(&la).max(1.0), || flat(&[a.c()]));

        // C(t) = C0 R_k(αt), d(t) = d0 + v t + ½ a t²
        let c0 = rrot(rng);
        let mut k = rv3(rng, 1.0);
        k /= norm(&k).max(1e-3);
        let alpha = rng.random_range(-2.0..2.0);
        let (d0, v, acc) = (rv3(rng, 2.0), rv3(rng, 1.0), rv3(rng, 1.0));
        let at = |t: f64| Placement::new(c0.then(&Rotation::about_axis(&k, alpha * t)), d0 + v * t + acc * (0.5 * t * t));
        let t = rng.random_range(-1.0..1.0);
        let h = 1e-4;
        let fd = (l6(&at(t + h)) - l6(&at(t - h))) / (2.0 * h);
        let pl = at(t);
        let c = *pl.c();
        let vel = FrameVelocity::in_moving(c.transpose() * (v + acc * t), k * alpha);
        let g = generators(&pl, &vel);
        let l = l6(&pl);
        let sc = max_abs(&fd).max(1.0);
        gen_phi.observe(max_abs(&(fd - l * g.phi_wr)) / sc, || vec![t, alpha]);
        gen_psi.observe(max_abs(&(fd - g.psi_wr * l)) / sc, || vec![t, alpha]);

        if trial < 20 {
            let w = rv3(rng, 2.0);
            let traj = integrate_rotation(&Rotation::identity(), |_| w, 1e-3, 1000).expect("finite rates");
            let wn = norm(&w);
            let exact = if wn > 0.0 { Rotation::about_axis(&(w / wn), wn) } else { Rotation::identity() };
            poisson.observe(max_abs(&(traj[1000].matrix() - exact.matrix())), || flat(&[&w]));
            let worst = traj.iter().fold(0.0f64, |m, r| m.max(orthogonality_residual(r.matrix())));
            ortho.observe(worst, || flat(&[&w]));
        }
    }
    vec![closure, inverse, factor, gen_phi, gen_psi, poisson, ortho]
}

fn check_case<M, const N: usize>(
    rng: &mut ChaCha8Rng,
    trials: usize,
    label: &str,
    sample: impl Fn(&mut ChaCha8Rng) -> M,
    singular: impl Fn(&mut ChaCha8Rng) -> M,
    argument: impl Fn(&mut ChaCha8Rng) -> SMatrix<f64, N, N>,
    rotation: impl Fn(&mut ChaCha8Rng) -> SMatrix<f64, N, N>,
) -> Vec<Property>
where
    M: IsotropicMap<f64, N>,
{
    let mut comp = Property::new(&format!("{label}_compose"), 1e-11);
    let mut inv = Property::new(&format!("{label}_inverse"), 1e-11);
    let mut iso = Property::new(&format!("{label}_isotropy"), 1e-11);
    let mut class = Property::new(&format!("{label}_classification"), 0.0);
    for _ in 0..trials {
        let (p, q) = (sample(rng), sample(rng));
        let pq = compose(&q, &p);
        for _ in 0..5 {
            let z = argument(rng);
            let two = apply(&q, &apply(&p, &z).expect("valid argument")).expect("valid argument");
            let one = apply(&pq, &z).expect("valid argument");
            comp.observe(max_abs(&(one - two)) / max_abs(&two).max(1.0), || p.coefficients().into_iter().chain(q.coefficients()).collect());
            let c = rotation(rng);
            let lhs = apply(&p, &(c * z * c.transpose())).expect("valid argument");
            let rhs = c * apply(&p, &z).expect("valid argument") * c.transpose();
            iso.observe(max_abs(&(lhs - rhs)) / max_abs(&rhs).max(1.0), || p.coefficients());
        }
        if let Ok(pi) = invert(&p) {
            let z = argument(rng);
            let back = apply(&pi, &apply(&p, &z).expect("valid argument")).expect("valid argument");
            let id = compose(&pi, &p).coefficients();
            let e = M::identity().coefficients();
            let coeff = id.iter().zip(&e).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            inv.observe((max_abs(&(back - z)) / max_abs(&z).max(1.0)).max(coeff), || p.coefficients());
        }
        let s = singular(rng);
        let wrong = (is_well_defined(&s).ok as u8 as f64) + (!is_well_defined(&p).ok as u8 as f64);
        class.observe(wrong, || s.coefficients().into_iter().chain(p.coefficients()).collect());
    }
    vec![comp, inv, iso, class]
}

fn u(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-1.0..1.0)
}

/// Keeps a value away from zero so that random maps are comfortably regular.
fn away(rng: &mut ChaCha8Rng) -> f64 {
    let x: f64 = rng.random_range(0.5..1.5);
    if rng.random_bool(0.5) {
        x
    } else {
        -x
    }
}

fn sym<const N: usize>(m: SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    (m + m.transpose()) * 0.5
}

fn constitutive(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Property> {
    let rot3 = |r: &mut ChaCha8Rng| *rrot(r).matrix();
    let rot2 = |r: &mut ChaCha8Rng| planar_rotation(r.random_range(-3.0..3.0));
    let mut out = check_case(
        rng,
        trials,
        "iso3",
        |r| {
            let p2 = away(r) * 2.0;
            IsoMap3::new(u(r), 0.3 * u(r), p2, 0.3 * u(r))
        },
        |r| {
            let (p2, p3) = (away(r), u(r));
            match r.random_range(0..3) {
                0 => IsoMap3::new(u(r), -(p2 + p3) / 3.0, p2, p3),
                1 => IsoMap3::new(u(r), u(r), p2, -p2),
                _ => IsoMap3::new(u(r), u(r), p2, p2),
            }
        },
        |r| rmat::<3, 3>(r, 1.0),
        rot3,
    );
    out.extend(check_case(
        rng,
        trials,
        "sym3",
        |r| IsoMapSym3::new(u(r), 0.3 * u(r), away(r) * 2.0),
        |r| {
            if r.random_bool(0.5) {
                IsoMapSym3::new(u(r), u(r), 0.0)
            } else {
                let p2 = away(r);
                IsoMapSym3::new(u(r), -p2 / 3.0, p2)
            }
        },
        |r| sym(rmat::<3, 3>(r, 1.0)),
        rot3,
    ));
    out.extend(check_case(
        rng,
        trials,
        "iso2",
        |r| IsoMap2::new(u(r), u(r), 0.2 * u(r), 0.2 * u(r), away(r) * 2.0, 0.2 * u(r), 0.2 * u(r), 0.2 * u(r)),
        |r| {
            if r.random_bool(0.5) {
                let (p3, p5) = (u(r), u(r));
                IsoMap2::new(u(r), u(r), u(r), u(r), p3, -p3, p5, p5)
            } else {
                // (2p1+p3+p4)(p3−p4) + (2p2+p5−p6)(p5+p6) = 0, solved for p1
                let (p2, p3, p4, p5, p6) = (u(r), away(r), u(r) * 0.3, u(r), u(r));
                let p1 = (-(2.0 * p2 + p5 - p6) * (p5 + p6) / (p3 - p4) - p3 - p4) / 2.0;
                IsoMap2::new(u(r), u(r), p1, p2, p3, p4, p5, p6)
            }
        },
        |r| rmat::<2, 2>(r, 1.0),
        rot2,
    ));
    out.extend(check_case(
        rng,
        trials,
        "sym2",
        |r| IsoMapSym2::new(u(r), 0.3 * u(r), away(r) * 2.0, u(r)),
        |r| {
            if r.random_bool(0.5) {
                let p2 = away(r);
                IsoMapSym2::new(u(r), -p2 / 2.0, p2, u(r))
            } else {
                IsoMapSym2::new(u(r), away(r), 0.0, 0.0)
            }
        },
        |r| sym(rmat::<2, 2>(r, 1.0)),
        rot2,
    ));
    let mut ident = Property::new("planar_identities", 0.0);
    let it = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    for _ in 0..trials {
        let z = Matrix2::new(u(rng), u(rng), u(rng), u(rng));
        let tr = |m: &Matrix2<f64>| m[(0, 0)] + m[(1, 1)];
        let e1 = it * z.transpose() - (it * z - Matrix2::identity() * tr(&(it * z)));
        let e2 = it * z * it - (z.transpose() - Matrix2::identity() * tr(&z));
        let e3 = tr(&(it * z.transpose())) + tr(&(it * z));
        ident.observe(max_abs(&e1).max(max_abs(&e2)).max(e3.abs()), || flat(&[&z]));
    }
    out.push(ident);
    out
}

fn lemma1(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Property> {
    let mut order = Property::new("pointwise_order_deviation", 0.2);
    let mut integral = Property::new("integral_relative", 1e-3);
    let mut tau = Property::new("constant_antisymmetric", 1e-12);
    let bounds = Bounds::new(Vector3::new(-0.5, -0.5, -0.5), Vector3::new(0.5, 0.5, 0.5)).expect("ordered corners");
    for _ in 0..trials.min(25) {
        let a: Matrix3<f64> = rmat(rng, 1.0);
        let b: Matrix3<f64> = rmat(rng, 1.0);
        let k = rv3(rng, 2.0);
        let y = rv3(rng, 1.0);
        let field = TensorField::new(move |x: &Vector3<f64>| a * x.dot(&k).sin() + b * (x[0] * x[1]));
        let rep = lemma1_residual(&field, &y, &bounds, &[0.2, 0.1]).expect("resolution is adequate");
        let p = rep.pointwise.order.unwrap_or(0.0);
        order.observe((p - 2.0).abs(), || flat(&[&a, &b]));
        let rel = norm(&(rep.flux - rep.volume)) / norm(&rep.flux).max(1e-3);
        integral.observe(rel, || flat(&[&a, &b]));

        let w = rv3(rng, 1.0);
        let c = TensorField::new(move |_: &Vector3<f64>| skew(&w));
        let rep = lemma1_residual(&c, &y, &bounds, &[0.25]).expect("resolution is adequate");
        let exact = w * (-2.0 * bounds.volume());
        tau.observe(norm(&(rep.flux - exact)) / norm(&exact).max(1e-12), || flat(&[&w]));
    }
    vec![order, integral, tau]
}

fn transport(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Property> {
    let mut cont = Property::new("continuity_order_deviation", 0.2);
    let mut drift = Property::new("mass_drift", 1e-12);
    let mut pp = Property::new("pp_transport", 1e-8);
    for _ in 0..trials.min(25) {
        let alpha = rng.random_range(0.1..1.0);
        let rho0 = rng.random_range(0.5..2.0);
        let t = rng.random_range(0.0..1.0);
        let s = |t: f64| 1.0 + alpha * t;
        let res = |n: usize| {
            let grid = Grid { lo: Vector3::new(-1.0, -1.0, -1.0), hi: Vector3::new(1.0, 1.0, 1.0), n };
            continuity_residual(&grid, t, |t, _| rho0 / s(t).powi(3), |t, x| x * (alpha / s(t)), |_, _| 0.0)
                .expect("grid is large enough")
        };
        let (coarse, fine) = (res(17), res(33));
        let order: f64 = (coarse.max_abs / fine.max_abs).log2();
        cont.observe((order - 2.0).abs(), || vec![alpha, rho0, t]);

        let d0 = MassDistribution::midpoint_box(Vector3::new(-1.0, -1.0, -1.0), Vector3::new(1.0, 1.0, 1.0), 4, rho0, 0.0)
            .expect("valid box");
        let m0: f64 = d0.nodes().map(|n| n.mass()).sum();
        let moved: f64 = d0.ac_nodes().iter().map(|n| (n.w * s(t).powi(3)) * (rho0 / s(t).powi(3))).sum();
        drift.observe((moved - m0).abs() / m0, || vec![alpha, rho0, t]);

        let n = 4;
        let pts: Vec<PointMass<f64>> = (0..n)
            .map(|_| PointMass { x: rv3(rng, 1.0), m: rng.random_range(0.5..2.0), nu: rng.random_range(-0.2..0.2) })
            .collect();
        let freq: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let t0 = 0.3;
        let f = |t: f64| freq.iter().map(|w| (w * t).sin()).collect::<Vec<_>>();
        let fd: Vec<f64> = freq.iter().map(|w| w * (w * t0).cos()).collect();
        let d = MassDistribution::points(pts.clone()).expect("valid points");
        let analytic = transport_derivative(&d, &f(t0), &fd).expect("lengths match");
        let total = |t: f64| -> f64 { pts.iter().zip(f(t)).map(|(p, fv)| (p.m + p.nu * (t - t0)) * fv).sum() };
        let h = 1e-5;
        let numeric = (total(t0 + h) - total(t0 - h)) / (2.0 * h);
        pp.observe((analytic - numeric).abs(), || pts.iter().flat_map(|p| [p.m, p.nu]).collect());
    }
    vec![cont, drift, pp]
}

fn dynamics(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Property> {
    let mut energy = Property::new("rigid_energy_drift", 1e-9);
    let mut momentum = Property::new("rigid_momentum_drift", 1e-9);
    let mut tsiolkovsky = Property::new("tsiolkovsky", 1e-9);
    let mut nbody = Property::new("nbody_momentum", 1e-12);
    let mut multi = Property::new("multiphase_identities", 1e-14);
    for trial in 0..trials {
        if trial < 10 {
            let j = Matrix3::from_diagonal(&Vector3::new(rng.random_range(1.0..3.0), rng.random_range(1.0..3.0), rng.random_range(1.0..3.0)));
            let model = RigidBodyModel::from_mass_properties(rng.random_range(0.5..2.0), &rv3(rng, 0.3), &j).expect("regular body");
            let mut vel = Vector6::zeros();
            vel.fixed_rows_mut::<3>(0).copy_from(&rv3(rng, 1.0));
            vel.fixed_rows_mut::<3>(3).copy_from(&rv3(rng, 2.0));
            let s0 = RigidBodyState { placement: Placement::new(rrot(rng), rv3(rng, 1.0)), velocity: vel };
            let traj = simulate_rigid_body(&model, |_, _| Vector6::zeros(), s0, 1e-3, 500).expect("stable step");
            let (e0, l0) = (traj[0].kinetic_energy, traj[0].momentum);
            let de = traj.iter().fold(0.0f64, |m, s| m.max((s.kinetic_energy - e0).abs())) / e0;
            let dl = traj.iter().fold(0.0f64, |m, s| m.max(norm(&(s.momentum - l0)))) / norm(&l0);
            energy.observe(de, || vel.iter().copied().collect());
            momentum.observe(dl, || vel.iter().copied().collect());

            let (k, c, m0) = (rng.random_range(0.1..1.0), rng.random_range(0.5..3.0), rng.random_range(1.0..5.0));
            let e = rv3(rng, 1.0).normalize();
            let p = MassPoint {
                force: Box::new(|_, _| Vector3::zeros()),
                mass_rate: Box::new(move |_, s: &MassPointState<f64>| -k * s.m),
                gain_velocity: Box::new(move |_, s: &MassPointState<f64>| s.v - e * c),
                m_min: 1e-6,
            };
            let s0 = MassPointState { x: Vector3::zeros(), v: Vector3::zeros(), m: m0 };
            let traj = integrate_mass_point(&p, s0, 1e-3, 1000).expect("mass stays positive");
            let end = traj[1000];
            let exact = e * (c * (m0 / end.m).ln());
            tsiolkovsky.observe(norm(&(end.v - exact)), || vec![k, c, m0]);
        }
        if trial < 20 {
            let pts: Vec<PointMass<f64>> = (0..3)
                .map(|i| PointMass { x: rv3(rng, 0.5) + Vector3::new(3.0 * i as f64, 0.0, 0.0), m: rng.random_range(0.5..2.0), nu: 0.0 })
                .collect();
            let vels: Vec<Vector3<f64>> = (0..3).map(|_| rv3(rng, 0.5)).collect();
            let cfg = NbodyConfig { gamma: 1.0, min_distance: 1e-3, h: 1e-3, steps: 200 };
            let traj = nbody_simulate(&pts, &vels, &cfg).expect("bodies stay apart");
            let scale: f64 = pts.iter().zip(&vels).map(|(p, v)| p.m * norm(v)).sum::<f64>().max(1.0);
            let p0 = traj[0].momentum;
            let dp = traj.iter().fold(0.0f64, |m, s| m.max(norm(&(s.momentum - p0)))) / scale;
            nbody.observe(dp, || pts.iter().flat_map(|p| [p.x[0], p.x[1], p.x[2], p.m]).collect());
        }
        let n = 3;
        let state = MultiphaseState {
            rho: (0..n).map(|_| rng.random_range(0.5..2.0)).collect(),
            offsets: (0..n).map(|_| rv3(rng, 0.5)).collect(),
            rates: vec![rng.random_range(0.0..0.2), rng.random_range(0.0..0.2)],
            stoichiometry: (0..n).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect(),
        };
        let step = multiphase_step(&state, rng.random_range(-0.5..0.5), 1e-2).expect("densities stay positive");
        let scale = state.total_density().max(state.inertia_invariant()).max(1.0);
        multi.observe(step.total_residual.max(step.inertia_residual) / scale, || state.rho.clone());
    }
    vec![energy, momentum, tsiolkovsky, nbody, multi]
}
