//! Crank–Nicolson time stepping with implicit-Euler startup, solved by
//! Jacobi-preconditioned conjugate gradients.

use crate::error::{invalid, Error, Result};

use super::operator::HeatOperator;

const RELATIVE_TOLERANCE: f64 = 1e-12;

/// Solves `(I − c A) x = rhs`, starting from the value already in `x`.
pub(crate) fn solve_shifted(op: &HeatOperator, c: f64, rhs: &[f64], x: &mut [f64]) -> Result<usize> {
    let n = rhs.len();
    let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_b == 0.0 {
        x.fill(0.0);
        return Ok(0);
    }
    let precond: Vec<f64> = op.diagonal().iter().map(|&d| 1.0 / (1.0 - c * d)).collect();
    let mut r = vec![0.0; n];
    op.apply_shifted(c, x, &mut r);
    let mut rr = 0.0;
    let mut rz = 0.0;
    let mut z = vec![0.0; n];
    for k in 0..n {
        r[k] = rhs[k] - r[k];
        z[k] = precond[k] * r[k];
        rr += r[k] * r[k];
        rz += r[k] * z[k];
    }
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let max_iter = 1000 + 20 * (n as f64).sqrt() as usize;
    let target = (RELATIVE_TOLERANCE * norm_b).powi(2);
    for it in 0..max_iter {
        if rr <= target {
            return Ok(it);
        }
        let pq = op.apply_shifted(c, &p, &mut q);
        let alpha = rz / pq;
        let mut rz_new = 0.0;
        rr = 0.0;
        for k in 0..n {
            x[k] += alpha * p[k];
            let rk = r[k] - alpha * q[k];
            r[k] = rk;
            let zk = precond[k] * rk;
            rz_new += rk * zk;
            rr += rk * rk;
            z[k] = zk;
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::SolverDiverged { residual: rr.sqrt() / norm_b, iterations: max_iter })
}

/// Largest factor any mode may carry out of the startup and the Crank–Nicolson steps
/// after it. Crank–Nicolson flips and barely damps modes with `λ dt ≫ 2`, so whatever
/// the startup leaves of them shows up as over- and undershoot.
const STARTUP_DAMPING: f64 = 1e-10;
const MAX_STARTUP_SUBSTEPS: usize = 64;

/// Implicit-Euler startup: `span` leading steps are replaced by `substeps` equal
/// implicit-Euler steps.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Startup {
    span: usize,
    substeps: usize,
}

/// Worst excess over the exact decay among the modes Crank–Nicolson flips (`μ = λ dt / 2 ≥ 1`,
/// up to `μ_max`) after implicit Euler over `span` steps in `substeps` pieces and `rest`
/// Crank–Nicolson steps.
fn startup_residual(span: usize, substeps: usize, rest: usize, mu_max: f64) -> f64 {
    if mu_max < 1.0 {
        return 0.0;
    }
    let hi = mu_max.ln();
    (0..=400)
        .map(|i| (hi * i as f64 / 400.0).exp())
        .map(|mu| {
            let euler = (1.0 + 2.0 * mu * span as f64 / substeps as f64).powi(-(substeps as i32));
            let scheme = euler * ((mu - 1.0) / (mu + 1.0)).abs().powi(rest as i32);
            (scheme - (-2.0 * mu * (span + rest) as f64).exp()).max(0.0)
        })
        .fold(0.0, f64::max)
}

fn plan_startup(op: &HeatOperator, dt: f64, n_steps: usize) -> Startup {
    // Gershgorin: the spectrum of A lies within twice the largest diagonal entry.
    let mu_max = op.diagonal().iter().fold(0.0_f64, |m, d| m.max(d.abs())) * dt;
    let mut best = (f64::INFINITY, Startup { span: n_steps, substeps: MAX_STARTUP_SUBSTEPS });
    for span in 1..=n_steps {
        for substeps in (2..=MAX_STARTUP_SUBSTEPS).step_by(2) {
            let r = startup_residual(span, substeps, n_steps - span, mu_max);
            if r <= STARTUP_DAMPING {
                return Startup { span, substeps };
            }
            if r < best.0 {
                best = (r, Startup { span, substeps });
            }
        }
    }
    best.1
}

/// Evolves `u_t = A u + b g` in place over `n_steps` equal steps of length `dt`.
/// With `startup`, the leading steps are taken by implicit Euler, see [`plan_startup`].
pub(crate) fn march(
    op: &HeatOperator,
    u: &mut [f64],
    g: f64,
    dt: f64,
    n_steps: usize,
    startup: bool,
) -> Result<()> {
    if !(dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let n = u.len();
    let c = 0.5 * dt;
    let b = op.boundary_weights();
    let mut rhs = vec![0.0; n];
    let mut au = vec![0.0; n];
    let mut first = 0;
    if startup && n_steps > 0 {
        let plan = plan_startup(op, dt, n_steps);
        let sub = dt * plan.span as f64 / plan.substeps as f64;
        for _ in 0..plan.substeps {
            for i in 0..n {
                rhs[i] = u[i] + sub * b[i] * g;
            }
            solve_shifted(op, sub, &rhs, u)?;
        }
        first = plan.span;
    }
    for _ in first..n_steps {
        op.apply(u, &mut au);
        for k in 0..n {
            rhs[k] = u[k] + c * au[k] + dt * b[k] * g;
        }
        solve_shifted(op, c, &rhs, u)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::nodal::DomainMask;

    fn square_op(n: usize) -> HeatOperator {
        let mask = DomainMask::from_cells(GridSpec::rectangle(1.0, 1.0, n).unwrap(), |_, _| true);
        HeatOperator::new(&mask.region(1).unwrap()).unwrap()
    }

    #[test]
    fn resolved_steps_keep_the_short_startup() {
        let op = square_op(32);
        let h2 = (1.0f64 / 32.0).powi(2);
        assert_eq!(plan_startup(&op, 0.1 * h2, 40), Startup { span: 1, substeps: 2 });
    }

    #[test]
    fn coarse_steps_get_a_longer_startup() {
        let op = square_op(12);
        let plan = plan_startup(&op, 0.1, 10);
        assert!(plan.span > 1 || plan.substeps > 2, "{plan:?}");
        let mu_max = op.diagonal().iter().fold(0.0_f64, |m, d| m.max(d.abs())) * 0.1;
        let chosen = startup_residual(plan.span, plan.substeps, 10 - plan.span, mu_max);
        assert!(chosen < 1e-3 * startup_residual(1, 2, 9, mu_max), "{chosen}");
        assert!(chosen <= 1e-8, "{chosen}");
    }

    #[test]
    fn coarse_march_stays_below_the_boundary_value() {
        let op = square_op(12);
        let mut u = vec![0.0; op.len()];
        march(&op, &mut u, 1.0, 0.1, 10, true).unwrap();
        assert!(u.iter().all(|&v| v <= 1.0 + 1e-10), "{:?}", u.iter().fold(0.0_f64, |m, &v| m.max(v)));
    }
}
