//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ibs_core::montecarlo::{chunk_rng, McConfig};
use ibs_core::risk::M0_CAP;
use ibs_core::special_fn::{binom_pmf, log_gamma, negbin_cdf, negbin_pmf, reg_lower_gamma, y_rho};
use ibs_core::{
    asymptotic_risk_at, asymptotic_risk_closed, asymptotic_risk_quadrature, degradation,
    empirical_risk, exact_risk, exact_risk_series, guaranteed_risk, minimax_ratio_il,
    minimax_ratio_ll, omega_il, omega_il_residual, omega_star_il, omega_star_ll, proposed_il, umvu,
    EstimatorSpec, LossSpec, RiskMethod,
};
use rand::Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn planner_example() -> Check {
    let start = Instant::now();
    let out = ok(Command::new(env!("CARGO_BIN_EXE_ibs"))
        .args(["plan", "--loss", "il:a=1,b=1", "--target", "0.1"])
        .output())?;
    let elapsed = start.elapsed();
    ensure!(
        out.status.success(),
        "plan exited with {:?}",
        out.status.code()
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure!(
        stdout.starts_with("n=75 "),
        "plan printed '{}'",
        stdout.trim()
    );
    let loss = ok(LossSpec::inverse_linear(1.0, 1.0))?;
    let r74 = ok(guaranteed_risk(&loss, 74))?;
    let r75 = ok(guaranteed_risk(&loss, 75))?;
    ensure!(r74 > 0.1 && 0.1 >= r75, "R_bar(74)={r74}, R_bar(75)={r75}");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "n=75, R_bar(74)={r74:.6} > 0.1 >= R_bar(75)={r75:.6}, {elapsed:.2?}"
    ))
}

fn degradation_bounds() -> Check {
    let start = Instant::now();
    let ll = ok(LossSpec::linear_linear(1.0, 1.0))?;
    let il = ok(LossSpec::inverse_linear(1.0, 1.0))?;
    let (mut worst_ll, mut worst_il) = (0f64, 0f64);
    for x in log_grid(7.0, 1000.0, 30) {
        let n = x.round() as u64;
        let dl = ok(degradation(&ll, n))?.degradation;
        let di = ok(degradation(&il, n))?.degradation;
        ensure!(dl <= 1.01, "linear-linear degradation {dl} at n={n}");
        ensure!(di <= 1.001, "inverse-linear degradation {di} at n={n}");
        worst_ll = worst_ll.max(dl);
        worst_il = worst_il.max(di);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "max ll={worst_ll:.6}, max il={worst_il:.6}, {elapsed:.2?}"
    ))
}

fn within_cap(spec: &EstimatorSpec, p: f64) -> bool {
    spec.omega() / p - spec.d() <= M0_CAP as f64
}

fn inequality_suite(inverse: bool, limit: Duration) -> Check {
    let start = Instant::now();
    let mut checked = 0;
    let mut min_margin = f64::INFINITY;
    for &n in &[2u64, 3, 5, 10, 25, 75] {
        for &r in &[0.1, 1.0, 10.0] {
            let (loss, specs) = if inverse {
                let loss = ok(LossSpec::inverse_linear(r, 1.0))?;
                let lo = ok(omega_il(n, r, 1.0))? - n as f64;
                let specs = vec![
                    ok(proposed_il(n, &loss, Some(lo)))?,
                    ok(proposed_il(n, &loss, Some(0.0)))?,
                ];
                (loss, specs)
            } else {
                (ok(LossSpec::linear_linear(r, 1.0))?, vec![ok(umvu(n))?])
            };
            for spec in &specs {
                let bound = ok(asymptotic_risk_closed(&loss, spec))?.value;
                for p in log_grid(1e-4, 0.99, 20) {
                    if !within_cap(spec, p) {
                        continue;
                    }
                    let v = ok(exact_risk(&loss, spec, p))?.value;
                    let margin = bound - v;
                    ensure!(
                        margin > 1e-12,
                        "n={n} a/b={r} d={} p={p}: R={v}, limit={bound}",
                        spec.d()
                    );
                    min_margin = min_margin.min(margin);
                    checked += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < limit, "took {elapsed:?}");
    Ok(format!(
        "{checked} points, smallest margin {min_margin:.3e}, {elapsed:.2?}"
    ))
}

fn omega_il_bracket() -> Check {
    let mut worst = 0f64;
    for n in 2u64..=500 {
        for r in log_grid(1e-3, 1e3, 25) {
            let w = ok(omega_il(n, r, 1.0))?;
            ensure!(
                w > (n - 1) as f64 && w < n as f64,
                "omega_il={w} at n={n}, a/b={r}"
            );
            let res = omega_il_residual(n, r, 1.0, w).abs();
            ensure!(res <= 1e-10, "residual {res} at n={n}, a/b={r}");
            worst = worst.max(res);
        }
    }
    Ok(format!("12475 pairs, max residual {worst:.3e}"))
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let ll = ok(LossSpec::linear_linear(1.0, 1.0))?;
    let il = ok(LossSpec::inverse_linear(1.0, 1.0))?;
    let mut worst_z = 0f64;
    for (i, &(n, p)) in [(2u64, 0.5), (5, 0.1), (10, 0.3)].iter().enumerate() {
        let spec = ok(umvu(n))?;
        let closed = ok(exact_risk(&ll, &spec, p))?;
        let series = ok(exact_risk_series(&ll, &spec, p))?;
        ensure!(
            closed.method == RiskMethod::ClosedForm,
            "closed form not used at n={n}"
        );
        ensure!(
            (closed.value - series.value).abs() <= 1e-10,
            "closed {} vs series {} at n={n} p={p}",
            closed.value,
            series.value
        );
        let cfg = ok(McConfig::new(p, 1_000_000, 20_240 + i as u64))?;
        let mc = ok(empirical_risk(&ll, &spec, &cfg))?;
        let z = (mc.mean_loss - closed.value).abs() / mc.std_error;
        ensure!(
            z <= 4.0,
            "ll Monte Carlo {} vs {} ({z:.2} se) at n={n} p={p}",
            mc.mean_loss,
            closed.value
        );
        worst_z = worst_z.max(z);

        let spec = ok(proposed_il(n, &il, None))?;
        let series = ok(exact_risk(&il, &spec, p))?;
        let cfg = ok(McConfig::new(p, 1_000_000, 40_480 + i as u64))?;
        let mc = ok(empirical_risk(&il, &spec, &cfg))?;
        let z = (mc.mean_loss - series.value).abs() / mc.std_error;
        ensure!(
            z <= 4.0,
            "il Monte Carlo {} vs {} ({z:.2} se) at n={n} p={p}",
            mc.mean_loss,
            series.value
        );
        worst_z = worst_z.max(z);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!(
        "largest Monte Carlo deviation {worst_z:.2} se, {elapsed:.2?}"
    ))
}

fn quadrature_vs_closed() -> Check {
    let mut rng = chunk_rng(7, 0);
    let mut worst = 0f64;
    for _ in 0..20 {
        let n: u64 = rng.random_range(2..=50);
        let omega = (n - 1) as f64 + rng.random::<f64>();
        let a = rng.random_range(0.0..5.0);
        let b = rng.random_range(0.01..5.0);
        let loss = if rng.random::<bool>() {
            ok(LossSpec::inverse_linear(a, b))?
        } else {
            ok(LossSpec::linear_linear(a, b))?
        };
        let q = ok(asymptotic_risk_quadrature(&loss, omega, n))?;
        let c = ok(asymptotic_risk_at(&loss, n, omega))?;
        let diff = (q.value - c).abs();
        ensure!(
            diff <= 1e-8,
            "{loss} n={n} omega={omega}: quadrature {} vs {c}",
            q.value
        );
        worst = worst.max(diff);
    }
    Ok(format!("20 tuples, max difference {worst:.3e}"))
}

fn minimax_consistency() -> Check {
    let (mut w_ll, mut w_il, mut w_deg) = (0f64, 0f64, 0f64);
    for n in 2u64..=50 {
        let r = ok(minimax_ratio_ll(n))?;
        let e = (ok(omega_star_ll(n, r, 1.0))? - (n - 1) as f64).abs();
        ensure!(e <= 1e-9, "ll omega* off by {e} at n={n}");
        let d =
            (ok(degradation(&ok(LossSpec::linear_linear(r, 1.0))?, n))?.degradation - 1.0).abs();
        ensure!(d <= 1e-8, "ll degradation off by {d} at n={n}");
        w_ll = w_ll.max(e);
        w_deg = w_deg.max(d);

        let r = ok(minimax_ratio_il(n))?;
        let e = (ok(omega_star_il(n, r, 1.0))? - ok(omega_il(n, r, 1.0))?).abs();
        ensure!(e <= 1e-8, "il omega* off by {e} at n={n}");
        let d =
            (ok(degradation(&ok(LossSpec::inverse_linear(r, 1.0))?, n))?.degradation - 1.0).abs();
        ensure!(d <= 1e-8, "il degradation off by {d} at n={n}");
        w_il = w_il.max(e);
        w_deg = w_deg.max(d);
    }
    Ok(format!(
        "max |omega* gap| ll={w_ll:.2e} il={w_il:.2e}, max |degradation-1|={w_deg:.2e}"
    ))
}

fn asymptote_and_shape() -> Check {
    let gap = ok(omega_star_ll(1000, 1.0, 1.0))? - 1000.0;
    ensure!(
        (gap + 4.0 / 3.0).abs() <= 0.02,
        "omega* - n = {gap} at n=1000"
    );
    let mut lowest_off_peak = f64::INFINITY;
    for &n in &[2u64, 3, 7, 30, 100, 1000] {
        let peaks = [ok(minimax_ratio_ll(n))?, ok(minimax_ratio_il(n))?];
        for (k, peak) in peaks.iter().enumerate() {
            for r in log_grid(1e-2, 1e2, 41) {
                let loss = if k == 0 {
                    LossSpec::linear_linear(r, 1.0)
                } else {
                    LossSpec::inverse_linear(r, 1.0)
                };
                let d = ok(degradation(&ok(loss)?, n))?.degradation;
                ensure!(d >= 1.0 - 1e-10, "degradation {d} < 1 at n={n}, a/b={r}");
                if (r / peak).ln().abs() > 0.05 {
                    ensure!(
                        d > 1.0 + 1e-9,
                        "degradation {d} is 1 away from the minimax ratio at n={n}, a/b={r}"
                    );
                    lowest_off_peak = lowest_off_peak.min(d - 1.0);
                }
            }
        }
    }
    Ok(format!(
        "omega*-n={gap:.4} at n=1000, min off-peak excess {lowest_off_peak:.3e}"
    ))
}

fn identity_suites() -> Check {
    let mut count = 0u64;
    for n in 2u64..=20 {
        for m in n..=n + 50 {
            for k in 1..=19 {
                let p = k as f64 * 0.05;
                let f1 = ok(negbin_pmf(n - 1, p, m - 1))?;
                let f2 = (n - 1) as f64 * ok(negbin_pmf(n, p, m))? / ((m - 1) as f64 * p);
                ensure!(
                    (f1 - f2).abs() <= 1e-12 * f1,
                    "pmf identity at n={n} m={m} p={p}"
                );
                let c1 = ok(negbin_cdf(n - 1, p, m - 1))?;
                let c2 = ok(negbin_cdf(n, p, m))? + (1.0 - p) * ok(binom_pmf(m - 1, p, n - 1))?;
                ensure!(
                    (c1 - c2).abs() <= 1e-12,
                    "cdf identity at n={n} m={m} p={p}"
                );
                count += 2;
            }
        }
    }
    for t in 2u32..=50 {
        let t = t as f64;
        for k in 1..=600 {
            let u = k as f64 * 0.1;
            let lhs = ok(reg_lower_gamma(t - 1.0, u))? - ok(reg_lower_gamma(t, u))?;
            let rhs = ((t - 1.0) * u.ln() - u - ok(log_gamma(t))?).exp();
            ensure!(
                (lhs - rhs).abs() <= 1e-12,
                "gamma recurrence at t={t} u={u}"
            );
            count += 1;
        }
    }
    for rho in [2u64, 5, 10] {
        let r = rho as f64;
        let fact: f64 = (1..rho).map(|k| k as f64).product();
        for wi in 0..=4 {
            let omega = r - 1.0 + wi as f64 / 4.0;
            let limit = omega.powf(r - 1.0) * (-omega).exp() / fact;
            for di in 0..=4 {
                let delta = -r * di as f64 / 4.0;
                let mut prev = f64::NEG_INFINITY;
                for mu in rho..=rho + 200 {
                    let mu = mu as f64;
                    if mu <= omega - delta - 1.0 {
                        continue;
                    }
                    let y = ok(y_rho(rho, mu, omega / (mu + delta + 1.0)))?;
                    ensure!(
                        y > prev && y < limit,
                        "Y not increasing below its limit at rho={rho} mu={mu}"
                    );
                    prev = y;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} identity and monotonicity checks"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("planner reproduces n=75", planner_example),
        ("degradation within 1% / 0.1%", degradation_bounds),
        ("exact risk below limit, linear-linear", || {
            inequality_suite(false, Duration::from_secs(30))
        }),
        ("exact risk below limit, inverse-linear", || {
            inequality_suite(true, Duration::from_secs(60))
        }),
        ("omega_il bracket and residual", omega_il_bracket),
        (
            "closed form, series and Monte Carlo agree",
            oracle_equivalence,
        ),
        ("quadrature matches closed form", quadrature_vs_closed),
        ("minimax ratio consistency", minimax_consistency),
        (
            "omega* asymptote and degradation shape",
            asymptote_and_shape,
        ),
        ("special-function identities", identity_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
