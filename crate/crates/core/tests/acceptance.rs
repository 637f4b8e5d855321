//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when a criterion fails outside its recorded deviation.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nonlocal_core::oracles::{series_diffusion_with, sine_coefficients, InitialProfile};
use nonlocal_core::spectral::{asymptotic_eigenvalue, asymptotic_remainder, spectral_eigenvalue};
use nonlocal_core::{
    apply, assemble, assemble_fractional, assemble_peridynamic, assemble_regional,
    eigenvalues, evolve, exact_frac_lap_poly, gamma, peridynamic_convergence, q1_correction,
    q2_correction, sample, solve_poisson, DenseMatrix, EvolutionSpec, FractionalOrder, Grid1D,
    Horizon, OperatorKind,
};

const TABLE_ALPHAS: [f64; 4] = [0.5, 1.0, 1.5, 1.95];
const TABLE_KS: [usize; 4] = [1, 2, 3, 5];

/// Reference eigenvalues, `[k][kind s/h/r][alpha]`.
const REFERENCE: [[[f64; 4]; 3]; 4] = [
    [
        [1.2533, 1.5708, 1.9687, 2.4123],
        [0.9702, 1.1578, 1.5976, 2.3520],
        [0.0038, 0.1135, 0.8088, 2.2444],
    ],
    [
        [1.7725, 3.1416, 5.5683, 9.3206],
        [1.6016, 2.7549, 5.0600, 9.2082],
        [0.4593, 1.2026, 3.6509, 8.9854],
    ],
    [
        [2.1708, 4.7124, 10.230, 20.550],
        [2.0289, 4.3171, 9.5948, 20.384],
        [0.8626, 2.5760, 7.7500, 20.049],
    ],
    [
        [2.8025, 7.8540, 22.011, 55.645],
        [2.6949, 7.4607, 21.191, 55.374],
        [1.5149, 5.5171, 18.670, 54.820],
    ],
];

/// Reference entries this discretisation is known to miss, with the largest
/// accepted miss. Anything else failing counts as a regression.
const KNOWN_TABLE_MISSES: [(&str, f64, usize, f64); 1] = [("r", 1.0, 3, 6e-3)];

struct Outcome {
    pass: bool,
    /// Failing but inside a recorded deviation.
    waived: bool,
    detail: String,
}

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn grid(n: usize) -> Grid1D {
    Grid1D::new(1.0, n).unwrap()
}

type Spectra = BTreeMap<(char, u64), Vec<f64>>;

fn key(kind: char, a: f64) -> (char, u64) {
    (kind, a.to_bits())
}

fn spectra_4096() -> Spectra {
    let g = grid(4096);
    let mut out = Spectra::new();
    for a in TABLE_ALPHAS {
        out.insert(key('h', a), eigenvalues(&assemble_fractional(&g, order(a)).unwrap()).unwrap());
        out.insert(key('r', a), eigenvalues(&assemble_regional(&g, order(a)).unwrap()).unwrap());
    }
    out
}

fn criterion_1(spectra: &Spectra) -> Outcome {
    let mut misses = Vec::new();
    let mut unexpected = false;
    let mut worst_analytic: f64 = 0.0;
    for (ki, &k) in TABLE_KS.iter().enumerate() {
        let tol = if k <= 3 { 5e-3 } else { 1e-2 };
        for (ai, &a) in TABLE_ALPHAS.iter().enumerate() {
            let ls = spectral_eigenvalue(order(a), k, 1.0);
            worst_analytic = worst_analytic.max((ls - (k as f64 * PI / 2.0).powf(a)).abs());
            let computed = [ls, spectra[&key('h', a)][k - 1], spectra[&key('r', a)][k - 1]];
            for (si, tag) in ["s", "h", "r"].iter().enumerate() {
                let err = (computed[si] - REFERENCE[ki][si][ai]).abs();
                if err > tol {
                    let known = KNOWN_TABLE_MISSES
                        .iter()
                        .any(|&(t, ka, kk, lim)| t == *tag && ka == a && kk == k && err <= lim);
                    unexpected |= !known;
                    misses.push(format!(
                        "{tag} a={a} k={k}: {:.5} vs {} (err {err:.2e})",
                        computed[si], REFERENCE[ki][si][ai]
                    ));
                }
            }
        }
    }
    unexpected |= worst_analytic > 1e-10;
    let pass = misses.is_empty() && !unexpected;
    let detail = if misses.is_empty() {
        format!("48 entries within tolerance, spectral formula err {worst_analytic:.1e}")
    } else {
        format!("{} of 48 entries outside tolerance: {}", misses.len(), misses.join("; "))
    };
    Outcome { pass, waived: !pass && !unexpected, detail }
}

fn criterion_2() -> Outcome {
    let g = grid(256);
    let mut worst: f64 = 0.0;
    let mut worst_diff_form: f64 = 0.0;
    for a in [0.3, 1.0, 1.7] {
        let o = order(a);
        let h = assemble_fractional(&g, o).unwrap();
        let r = assemble_regional(&g, o).unwrap();
        let q1: Vec<f64> = g.interior().iter().map(|&x| q1_correction(o, 1.0, x).unwrap()).collect();
        let n = g.n_interior();
        let shifted = DenseMatrix::from_fn(n, |i, j| r.entries().get(i, j) + if i == j { q1[i] } else { 0.0 });
        worst = worst.max(h.entries().max_abs_diff(&shifted));
        for i in 0..n {
            let d = h.entries().get(i, i) - r.entries().get(i, i) - q1[i];
            worst_diff_form = worst_diff_form.max(d.abs() / h.entries().get(i, i));
        }

        let horizon = Horizon::new(4.0).unwrap();
        let p = assemble_peridynamic(&g, o, horizon).unwrap();
        let q2 = q2_correction(o, horizon).unwrap();
        let want = 2.0 * nonlocal_core::norm_const(o).unwrap() / (a * 4f64.powf(a));
        worst = worst.max((q2 - want).abs());
        let lowered =
            DenseMatrix::from_fn(n, |i, j| h.entries().get(i, j) - if i == j { q2 } else { 0.0 });
        worst = worst.max(p.entries().max_abs_diff(&lowered));
    }
    Outcome {
        pass: worst <= 1e-14,
        waived: false,
        detail: format!(
            "max |A_h - A_r - diag(Q1)|, |A_h - A_p - Q2 I| = {worst:.1e}; relative diagonal residual {worst_diff_form:.1e}"
        ),
    }
}

fn poly_error(n: usize, a: f64, q: u32) -> f64 {
    let g = grid(n);
    let o = order(a);
    let u = sample(&g, |x| (1.0 - x * x).max(0.0).powf(q as f64 + 0.5 * a)).unwrap();
    let v = apply(&assemble_fractional(&g, o).unwrap(), &u).unwrap();
    g.interior()
        .iter()
        .zip(v.values())
        .filter(|(x, _)| x.abs() <= 0.9)
        .map(|(&x, y)| (y - exact_frac_lap_poly(o, q, x).unwrap()).abs())
        .fold(0.0, f64::max)
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [0.5, 1.0, 1.5] {
        for q in [1u32, 2] {
            let coarse = poly_error(1024, a, q);
            let fine = poly_error(2048, a, q);
            pass &= fine <= 5e-3 && fine < coarse;
            parts.push(format!("a={a} q={q}: {fine:.1e} (N=1024 {coarse:.1e})"));
        }
    }
    Outcome { pass, waived: false, detail: parts.join("; ") }
}

fn criterion_4() -> Outcome {
    let g = grid(1024);
    let o = order(1.0);
    let f = sample(&g, |_| 1.0).unwrap();
    let u = solve_poisson(&assemble_fractional(&g, o).unwrap(), &f).unwrap();
    let g2 = gamma(2.0).unwrap();
    let (mut all, mut inner): (f64, f64) = (0.0, 0.0);
    for (&x, v) in g.interior().iter().zip(u.values()) {
        let e = (v - (1.0 - x * x).sqrt() / g2).abs();
        all = all.max(e);
        if x.abs() <= 0.8 {
            inner = inner.max(e);
        }
    }
    Outcome {
        pass: all <= 5e-2 && inner <= 1e-2,
        waived: false,
        detail: format!("max err {all:.2e}, on |x| <= 0.8 {inner:.2e}"),
    }
}

fn criterion_5() -> Outcome {
    let g = grid(1024);
    let f = sample(&g, |_| 1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [1.0, 1.5] {
        let pc = peridynamic_convergence(&g, order(a), &[4.0, 8.0, 16.0, 32.0], &f).unwrap();
        pass &= (pc.slope + a).abs() <= 0.1;
        parts.push(format!("a={a}: slope {:.4}", pc.slope));
    }
    Outcome { pass, waived: false, detail: parts.join("; ") }
}

fn criterion_6(spectra: &Spectra) -> Outcome {
    let g = grid(2048);
    let mut ordering = true;
    for a in [0.2, 0.5, 1.0, 1.5, 1.8] {
        let lh = eigenvalues(&assemble_fractional(&g, order(a)).unwrap()).unwrap();
        let lr = eigenvalues(&assemble_regional(&g, order(a)).unwrap()).unwrap();
        for k in 1..=20 {
            let ls = spectral_eigenvalue(order(a), k, 1.0);
            ordering &= lr[k - 1] < lh[k - 1] && lh[k - 1] < ls;
        }
    }
    let mut bounds = true;
    for a in TABLE_ALPHAS {
        let lh = &spectra[&key('h', a)];
        for k in 1..=10 {
            let upper = spectral_eigenvalue(order(a), k, 1.0);
            bounds &= 0.5 * upper <= lh[k - 1] && lh[k - 1] <= upper;
        }
    }
    let o = order(1.5);
    let asym_err = (spectra[&key('h', 1.5)][9] - asymptotic_eigenvalue(o, 10, 1.0)).abs();
    let asym_tol = 2.0 * asymptotic_remainder(o, 10);
    Outcome {
        pass: ordering && bounds && asym_err <= asym_tol,
        waived: false,
        detail: format!(
            "ordering r<h<s k<=20: {ordering}; bounds k<=10: {bounds}; asymptotic a=1.5 k=10 err {asym_err:.2e} (tol {asym_tol:.2e})"
        ),
    }
}

fn criterion_7() -> Outcome {
    let a = 1.999;
    let g = grid(1024);
    let target = PI * PI / 4.0;
    let f = sample(&g, |_| 1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in OperatorKind::ALL {
        let horizon = (kind == OperatorKind::Peridynamic).then(|| Horizon::new(4.0).unwrap());
        let op = assemble(kind, &g, order(a), horizon).unwrap();
        let u = solve_poisson(&op, &f).unwrap();
        let err = g
            .interior()
            .iter()
            .zip(u.values())
            .map(|(x, v)| (v - 0.5 * (1.0 - x * x)).abs())
            .fold(0.0, f64::max)
            / 0.5;
        let l1 = eigenvalues(&op).unwrap()[0];
        let rel = (l1 / target - 1.0).abs();
        pass &= err <= 0.02 && rel <= 0.01;
        parts.push(format!("{kind}: poisson {:.2}%, lambda1 {l1:.4}", 100.0 * err));
    }
    Outcome { pass, waived: false, detail: parts.join("; ") }
}

fn criterion_8() -> Outcome {
    let g = grid(1024);
    let o = order(1.0);
    let u0 = sample(&g, |x| InitialProfile::Step.eval(x)).unwrap();
    let spec = EvolutionSpec::new(u0, vec![0.5], 0.0).unwrap();
    let op = assemble(OperatorKind::Spectral, &g, o, None).unwrap();
    let u = evolve(&op, &spec).unwrap().remove(0);
    let coef = sine_coefficients(InitialProfile::Step, 2000).unwrap();
    let err = g
        .interior()
        .iter()
        .zip(u.values())
        .map(|(&x, v)| (v - series_diffusion_with(o, x, 0.5, &coef, 0.0)).abs())
        .fold(0.0, f64::max);
    Outcome { pass: err <= 2e-3, waived: false, detail: format!("max err {err:.2e}") }
}

fn criterion_9() -> Outcome {
    let n = 256;
    let g1 = Grid1D::new(1.0, n).unwrap();
    let g2 = Grid1D::new(2.0, n).unwrap();
    let mut worst: f64 = 0.0;
    for a in [0.3, 1.0, 1.7] {
        let s = 2f64.powf(-a);
        for kind in OperatorKind::ALL {
            let (h1, h2) = match kind {
                OperatorKind::Peridynamic => {
                    (Some(Horizon::new(0.5).unwrap()), Some(Horizon::new(1.0).unwrap()))
                }
                _ => (None, None),
            };
            let a1 = assemble(kind, &g1, order(a), h1).unwrap();
            let a2 = assemble(kind, &g2, order(a), h2).unwrap();
            for i in 0..a1.dim() {
                for j in 0..a1.dim() {
                    let x = s * a1.entries().get(i, j);
                    let d = (a2.entries().get(i, j) - x).abs() / x.abs().max(1.0);
                    worst = worst.max(d);
                }
            }
        }
    }
    Outcome {
        pass: worst <= 1e-14,
        waived: false,
        detail: format!("max entrywise |A(l=2) - 2^-a A(l=1)| / max(1, |A|) = {worst:.1e}"),
    }
}

fn main() -> ExitCode {
    // Accept and ignore libtest flags passed by `cargo test`.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str())) {
        return ExitCode::SUCCESS;
    }

    let t0 = Instant::now();
    let spectra = spectra_4096();
    let setup = t0.elapsed().as_secs_f64();

    let criteria: Vec<(u8, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "reference eigenvalues at N=4096", Box::new(|| criterion_1(&spectra))),
        (2, "exact shift identities", Box::new(criterion_2)),
        (3, "closed-form action on polynomial profiles", Box::new(criterion_3)),
        (4, "fractional Poisson exact solution", Box::new(criterion_4)),
        (5, "peridynamic convergence rate", Box::new(criterion_5)),
        (6, "spectral ordering, bounds and asymptotics", Box::new(|| criterion_6(&spectra))),
        (7, "alpha -> 2 collapse", Box::new(criterion_7)),
        (8, "series and matrix evolution agree", Box::new(criterion_8)),
        (9, "exact discrete kappa-scaling", Box::new(criterion_9)),
    ];
    println!("acceptance suite (shared N=4096 spectra computed in {setup:.1}s)");
    let mut failed = false;
    for (id, name, run) in criteria {
        let t = Instant::now();
        let o = run();
        let status = match (o.pass, o.waived) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known deviation)",
            (false, false) => "FAIL",
        };
        failed |= !o.pass && !o.waived;
        println!(
            "criterion {id}: {status}: {name}: {} [{:.1}s]",
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
