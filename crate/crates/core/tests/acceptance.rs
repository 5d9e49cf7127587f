//! End-to-end acceptance run on the two reference curves. Prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::time::Instant;

use cyclic_thomae::abeljacobi::{riemann_constant_residual, theta_scale, AbelMap};
use cyclic_thomae::kernels::{
    canonical_bidifferential, cramer_decomposition_check, gz_coefficient, q_quadratic, szego_eval,
};
use cyclic_thomae::periods::{dtau_fd, dtau_rauch, integrate_on_cycle, QuadSettings};
use cyclic_thomae::surface::SurfacePoint;
use cyclic_thomae::thomae::{
    linear_deformation, order_one_vectors, verify_constancy, verify_derivative_identity,
    verify_first_derivatives, verify_nonvanishing,
};
use cyclic_thomae::divisors::n3_partition_rule;
use cyclic_thomae::{enumerate_admissible, Curve, ThomaeData};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn t1() -> Curve {
    Curve::new(2, vec![1; 4], vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], c(0.5, -1.0))
}

fn t2() -> Curve {
    Curve::new(3, vec![1, 1, 2, 2], vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(3.0, 0.0)], c(0.5, -1.0))
}

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, notes: Vec::new() }
    }
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

// ------------------------------------------------------------------ oracles

fn agm(mut a: Complex64, mut b: Complex64) -> Complex64 {
    for _ in 0..60 {
        let (na, nb) = ((a + b) / 2.0, (a * b).sqrt());
        a = na;
        b = if (nb - a).norm() <= (-nb - a).norm() { nb } else { -nb };
    }
    a
}

/// Move τ into the standard fundamental domain.
fn reduce_tau(mut t: Complex64) -> Complex64 {
    for _ in 0..200 {
        t -= t.re.round();
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -1.0 / t;
        } else {
            break;
        }
    }
    t
}

fn j_invariant(tau: Complex64) -> Complex64 {
    let t = reduce_tau(tau);
    let q = (c(0.0, 2.0 * std::f64::consts::PI) * t).exp();
    let mut e4 = c(1.0, 0.0);
    let mut delta = q;
    let mut qn = c(1.0, 0.0);
    for n in 1..80u32 {
        qn *= q;
        let sigma3: f64 = (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powi(3)).sum();
        e4 += qn * 240.0 * sigma3;
        delta *= (c(1.0, 0.0) - qn).powi(24);
    }
    e4 * e4 * e4 / delta
}

fn admissible_brute_force(n: u32, r: &[u32]) -> Vec<Vec<u32>> {
    let m = r.len();
    let half = m as u32 * (n - 1) / 2;
    let mut out = Vec::new();
    for code in 0..n.pow(m as u32) {
        let beta: Vec<u32> = (0..m).map(|i| code / n.pow((m - 1 - i) as u32) % n).collect();
        if (0..n).all(|k| beta.iter().zip(r).map(|(b, ri)| (b + k * ri) % n).sum::<u32>() == half) {
            out.push(beta);
        }
    }
    out
}

fn random_regular(spec: &Curve, rng: &mut ChaCha8Rng) -> Complex64 {
    let sep = spec.min_separation();
    loop {
        let x = c(rng.random_range(-1.0..4.5), rng.random_range(-1.5..2.0));
        if spec.lambda.iter().all(|l| (x - l).norm() > 0.25 * sep) {
            return x;
        }
    }
}

/// Coefficients `c_1, c_2` of `F(P,Q)(x2 - x1)` in powers of `x1 - x2`, by a
/// discrete Fourier fit of `szego_eval` on a circle around `x2`.
fn szego_coefficients(spec: &Curve, beta: &[u32], x2: Complex64, sheet: u32) -> (Complex64, Complex64) {
    let rho = 0.2 * spec.lambda.iter().map(|l| (x2 - l).norm()).fold(f64::INFINITY, f64::min);
    let k = 48;
    let (mut c1, mut c2) = (c(0.0, 0.0), c(0.0, 0.0));
    for j in 0..k {
        let d = Complex64::from_polar(rho, std::f64::consts::TAU * (j as f64 + 0.5) / k as f64);
        let f = szego_eval(spec, beta, (x2 + d, sheet), (x2, sheet)).unwrap() * (-d);
        c1 += f / d;
        c2 += f / (d * d);
    }
    (c1 / k as f64, c2 / k as f64)
}

// ------------------------------------------------------------------ criteria

fn combinatorics() -> Outcome {
    let spec = Curve::new(3, vec![1; 6], (0..6).map(|i| c(i as f64, 0.0)).collect(), c(0.5, -1.0));
    let got: Vec<Vec<u32>> = enumerate_admissible(&spec).unwrap().into_iter().map(|b| b.beta).collect();
    let brute = admissible_brute_force(3, &[1; 6]);
    let twice = got.iter().all(|b| (0..3).all(|v| b.iter().filter(|&&x| x == v).count() == 2));
    let rule = got.iter().all(|b| n3_partition_rule(&spec, b).unwrap());
    Outcome::new(
        got.len() == 90 && got == brute && twice && rule,
        format!("{} vectors, brute force {}, residues twice {twice}, partition rule {rule}", got.len(), brute.len()),
    )
}

fn differential_count() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    let mut done = 0;
    while done < 100 {
        let n = [2u32, 3, 5, 7][rng.random_range(0..4)];
        let m = rng.random_range(3..=10usize);
        let mut r: Vec<u32> = (0..m).map(|_| rng.random_range(1..n)).collect();
        let s: u32 = r[..m - 1].iter().sum();
        r[m - 1] = (n - s % n) % n;
        if r[m - 1] == 0 {
            continue;
        }
        let spec = Curve::new(n, r, (0..m).map(|i| c(i as f64, 0.0)).collect(), c(0.5, -1.0));
        let rd = spec.validate().unwrap();
        let sum: u32 = (1..n).map(|l| rd.d(l)).sum();
        if 2 * sum != (n - 1) * (m as u32 - 2) {
            bad += 1;
        }
        done += 1;
    }
    Outcome::new(bad == 0, format!("{done} random specs, {bad} mismatches"))
}

fn period_sanity(data: &[(&str, &ThomaeData)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, d) in data {
        let pd = &d.periods;
        let sym = pd.symmetry_defect() / pd.tau.max_abs();
        let bil = pd.bilinear_defect() / (pd.a.max_abs() * pd.b.max_abs());
        let im = pd.tau.im();
        let min_eig = cyclic_thomae::linalg::min_eigenvalue(&im);
        pass &= sym < 1e-8 && bil < 1e-8 && min_eig > 0.0;
        parts.push(format!("{name}: sym {sym:.1e} bilinear {bil:.1e} min eig Im tau {min_eig:.3}"));
    }
    Outcome::new(pass, parts.join("; "))
}

fn elliptic(d: &ThomaeData) -> Outcome {
    let tau = d.periods.tau[(0, 0)];
    let e: Vec<f64> = d.spec.lambda.iter().map(|l| l.re).collect();
    let k2 = (e[2] - e[1]) * (e[3] - e[0]) / ((e[2] - e[0]) * (e[3] - e[1]));
    let k = c(k2.sqrt(), 0.0);
    let kp = c((1.0 - k2).sqrt(), 0.0);
    let tau_agm = c(0.0, 1.0) * agm(c(1.0, 0.0), k) / agm(c(1.0, 0.0), kp);
    let l = c(k2, 0.0);
    let j_cross = (l * l - l + 1.0).powi(3) * 256.0 / (l * l * (l - 1.0) * (l - 1.0));
    let (j1, j2) = (j_invariant(tau), j_invariant(tau_agm));
    let r1 = (j1 - j2).norm() / j2.norm();
    let r2 = (j2 - j_cross).norm() / j_cross.norm();
    Outcome::new(r1 < 1e-6 && r2 < 1e-6, format!("j(tau) {j1:.6} vs AGM {j2:.6} (rel {r1:.1e}); AGM vs cross-ratio rel {r2:.1e}"))
}

fn riemann(data: &[(&str, &ThomaeData)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, d) in data {
        let rc = &d.riemann;
        let margin = rc.second / rc.best.max(f64::MIN_POSITIVE);
        let abel = AbelMap::new(&d.spec, &d.periods, d.quad.clone()).unwrap();
        let res = riemann_constant_residual(&abel, &rc.k.z, 20, 1234, d.theta_tol).unwrap();
        let scale = theta_scale(&d.periods.tau, 20, 99, d.theta_tol).unwrap();
        pass &= margin >= 10.0 && res < 1e-6 * scale;
        parts.push(format!("{name}: margin {margin:.1e}, fresh residual {:.1e} x scale", res / scale));
    }
    Outcome::new(pass, parts.join("; "))
}

fn nonvanishing(d: &ThomaeData) -> Outcome {
    let adm = enumerate_admissible(&d.spec).unwrap();
    let worst_adm = adm
        .iter()
        .map(|b| verify_nonvanishing(d, &b.beta, 20, 5).unwrap().ratio())
        .fold(f64::INFINITY, f64::min);
    let order1 = order_one_vectors(&d.spec).unwrap();
    let worst_o1 = order1
        .iter()
        .take(5)
        .map(|b| verify_nonvanishing(d, b, 20, 5).unwrap().ratio())
        .fold(0.0, f64::max);
    Outcome::new(
        worst_adm > 1e-6 && worst_o1 < 1e-6 && order1.len() >= 5,
        format!("{} admissible, min ratio {worst_adm:.2e}; {} order-1 tested, max ratio {worst_o1:.1e}", adm.len(), order1.len().min(5)),
    )
}

fn first_derivatives(data: &[(&str, &ThomaeData)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, d) in data {
        for b in enumerate_admissible(&d.spec).unwrap() {
            worst = worst.max(verify_first_derivatives(d, &b.beta).unwrap());
            count += 1;
        }
    }
    Outcome::new(worst < 1e-6, format!("{count} vectors, max gradient ratio {worst:.1e}"))
}

fn szego(data: &[(&str, &ThomaeData)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut lin, mut quad, mut quad_c): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (_, d) in data {
        let spec = &d.spec;
        for _ in 0..5 {
            let x2 = random_regular(spec, &mut rng);
            let sheet = rng.random_range(0..spec.n);
            let scale: f64 = spec.lambda.iter().map(|l| 1.0 / (x2 - l).norm()).sum();
            for b in enumerate_admissible(spec).unwrap() {
                let (c1, c2) = szego_coefficients(spec, &b.beta, x2, sheet);
                let stated = q_quadratic(spec, &b.beta, x2, false);
                let centered = q_quadratic(spec, &b.beta, x2, true);
                lin = lin.max(c1.norm() / scale);
                quad = quad.max((c2 - stated).norm() / c2.norm().max(stated.norm()));
                quad_c = quad_c.max((c2 - centered).norm() / c2.norm().max(centered.norm()));
            }
        }
    }
    let mut o = Outcome::new(
        lin < 1e-8 && quad < 1e-8,
        format!("max linear {lin:.1e} x scale; quadratic vs q-formula rel {quad:.2e}"),
    );
    o.notes.push(format!("quadratic vs q - (N-1)^2/(4N): rel {quad_c:.1e}"));
    o
}

fn bidifferential(data: &[(&str, &ThomaeData)]) -> Outcome {
    let (mut aper, mut sym, mut diag, mut gz, mut gz_lit): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (_, d) in data {
        let spec = &d.spec;
        let om = canonical_bidifferential(spec, &d.basis, &d.periods).unwrap();
        for _ in 0..3 {
            let y = SurfacePoint::regular(spec, random_regular(spec, &mut rng), rng.random_range(0..spec.n)).unwrap();
            let x = SurfacePoint::regular(spec, random_regular(spec, &mut rng), rng.random_range(0..spec.n)).unwrap();
            for cyc in &d.basis.a {
                let v = integrate_on_cycle(spec, &d.basis, cyc, &d.quad, &mut |p| om.eval(p, &y)).unwrap();
                aper = aper.max(v.norm());
            }
            sym = sym.max((om.eval(&x, &y) - om.eval(&y, &x)).norm());
            let s = y.s[1].arg();
            let near = (0..spec.n)
                .map(|k| SurfacePoint::regular(spec, y.z + c(1e-5, -0.7e-5), k).unwrap())
                .min_by(|a, b| (a.s[1].arg() - s).abs().total_cmp(&(b.s[1].arg() - s).abs()))
                .unwrap();
            let dz = near.z - y.z;
            diag = diag.max((om.eval(&near, &y) * dz * dz - 1.0).norm());
        }
        for i in 0..spec.m() {
            let g = gz_coefficient(&om, i, 64).unwrap();
            let dlog = d.periods.dlog_det_jacobi(i);
            let expect = g.gamma_term - dlog * spec.n as f64;
            gz = gz.max((g.value - expect).norm() / expect.norm());
            let literal = g.gamma_term - d.periods.det_c.ln() * spec.n as f64;
            gz_lit = gz_lit.max((g.value - literal).norm() / literal.norm());
        }
    }
    let mut o = Outcome::new(
        aper < 1e-8 && sym < 1e-8 && diag < 1e-8 && gz < 1e-6,
        format!("a-periods {aper:.1e}, symmetry {sym:.1e}, diagonal {diag:.1e}, G_z rel {gz:.1e}"),
    );
    o.notes.push(format!("G_z against -N sum gamma/(li-lj) - N log det C without the derivative: rel {gz_lit:.1e}"));
    o
}

fn cramer(data: &[(&str, &ThomaeData)]) -> Outcome {
    let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
    for (_, d) in data {
        for i in 0..d.spec.m() {
            for l in 1..d.spec.n {
                let (a, b) = cramer_decomposition_check(&d.spec, &d.periods, i, l).unwrap().residuals();
                r1 = r1.max(a);
                r2 = r2.max(b);
            }
        }
    }
    Outcome::new(r1 < 1e-8 && r2 < 1e-8, format!("det B = det C rel {r1:.1e}; det B_l = sum det C_v rel {r2:.1e}"))
}

fn variational(data: &[(&str, &ThomaeData)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, d) in data {
        for i in 0..d.spec.m() {
            let an = dtau_rauch(&d.spec, &d.periods, i);
            let fd = dtau_fd(&d.spec, &d.basis, i, 1e-4 * d.spec.scale(), &QuadSettings::default()).unwrap();
            let g = an.rows;
            let mut diff: f64 = 0.0;
            for j in 0..g {
                for k in 0..g {
                    diff = diff.max((an[(j, k)] - fd[j][k]).norm());
                }
            }
            worst = worst.max(diff / an.max_abs());
        }
    }
    Outcome::new(worst < 1e-4, format!("max rel difference {worst:.1e}"))
}

fn derivative_identity(data: &[(&str, &ThomaeData)]) -> Outcome {
    let (mut stated, mut centered, mut heat): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (_, d) in data {
        for b in enumerate_admissible(&d.spec).unwrap() {
            for i in 0..d.spec.m() {
                let r = verify_derivative_identity(d, &b.beta, i, 1e-5).unwrap();
                stated = stated.max(r.residual());
                centered = centered.max(r.residual_centered());
                heat = heat.max(r.heat_residual());
            }
        }
    }
    let mut o = Outcome::new(stated < 1e-4, format!("max rel residual {stated:.2e}"));
    o.notes.push(format!("with q - (N-1)^2/(4N): {centered:.1e}; heat equation vs finite differences: {heat:.1e}"));
    o
}

fn constancy(d1: &ThomaeData, d2: &ThomaeData) -> Outcome {
    let p1 = linear_deformation(&d1.spec, 3, c(5.0, 0.0), 10);
    let p2 = linear_deformation(&d2.spec, 2, c(0.0, 1.4), 10);
    let [s1, c1] = verify_constancy(d1, &[0, 0, 1, 1], &p1).unwrap();
    let [s2, c2] = verify_constancy(d2, &[0, 1, 1, 2], &p2).unwrap();
    let drift = s1.drift().max(s2.drift());
    let mut o = Outcome::new(drift < 1e-4, format!("drift T1 {:.2e}, T2 {:.2e}", s1.drift(), s2.drift()));
    o.notes.push(format!(
        "unordered pairs with q - (N-1)^2/(4N): drift T1 {:.1e}, T2 {:.1e}",
        c1.drift(),
        c2.drift()
    ));
    o
}

fn main() {
    let start = Instant::now();
    let q = QuadSettings::default();
    let d1 = ThomaeData::new(&t1(), q.clone(), 1e-14, 11).expect("T1 setup");
    let d2 = ThomaeData::new(&t2(), q, 1e-14, 11).expect("T2 setup");
    println!("setup (bases, periods, Riemann constants): {:.2} s", start.elapsed().as_secs_f64());
    let both = [("T1", &d1), ("T2", &d2)];

    let checks: Vec<(u32, &str, f64, Check)> = vec![
        (1, "combinatorics oracle", 1.0, Box::new(combinatorics)),
        (2, "genus and differential count", 1.0, Box::new(differential_count)),
        (3, "period sanity", 60.0, Box::new(|| period_sanity(&both))),
        (4, "elliptic cross-check", 10.0, Box::new(|| elliptic(&d1))),
        (5, "Riemann constant", 240.0, Box::new(|| riemann(&both))),
        (6, "non-vanishing", 120.0, Box::new(|| nonvanishing(&d2))),
        (7, "first-derivative vanishing", 60.0, Box::new(|| first_derivatives(&both))),
        (8, "Szegő expansion", 60.0, Box::new(|| szego(&both))),
        (9, "canonical bidifferential", 120.0, Box::new(|| bidifferential(&both))),
        (10, "determinant identities", 10.0, Box::new(|| cramer(&both))),
        (11, "variational formula", 120.0, Box::new(|| variational(&both))),
        (12, "Thomae derivative identity", 300.0, Box::new(|| derivative_identity(&both))),
        (13, "alpha constancy", 300.0, Box::new(|| constancy(&d1, &d2))),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, check) in &checks {
        let t = Instant::now();
        let o = check();
        let secs = t.elapsed().as_secs_f64();
        let pass = o.pass && secs < *budget;
        let budget_note = if secs < *budget { String::new() } else { format!(" over the {budget} s budget") };
        println!(
            "{} {id:>2} {name}: {} ({secs:.2} s{budget_note})",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
        for n in &o.notes {
            println!("        {n}");
        }
        if !pass {
            failed.push(*id);
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed.len(), checks.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
