//! Eight optimizers on the two-variable Rosenbrock function. The trajectory is
//! the starting point followed by the iterate after every outer iteration
//! (for the simplex methods: the best vertex).

use super::{bad_data, ZooError};
use crate::types::{InstanceData, ProblemInstance, PsTraj, Solution, StartPoint, StartValue, TrajMeta};

pub const DEFAULT_BUDGET: usize = 200;
const GRAD_TOL: f64 = 1e-8;
const BOX: f64 = 10.0;

pub fn rosenbrock(p: [f64; 2]) -> f64 {
    let [x, y] = p;
    (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
}

pub fn rosenbrock_grad(p: [f64; 2]) -> [f64; 2] {
    let [x, y] = p;
    [-2.0 * (1.0 - x) - 400.0 * x * (y - x * x), 200.0 * (y - x * x)]
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn axpy(a: f64, x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
    [y[0] + a * x[0], y[1] + a * x[1]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    /// Maximum number of outer iterations.
    pub budget: usize,
    /// Step size override for the first-order methods.
    pub lr: Option<f64>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            budget: DEFAULT_BUDGET,
            lr: None,
        }
    }
}

/// Records iterates and enforces the stopping and divergence rules.
struct Trace {
    points: Vec<[f64; 2]>,
    budget: usize,
}

enum Next {
    Continue,
    Stop,
}

impl Trace {
    fn new(x0: [f64; 2], budget: usize) -> Self {
        Trace {
            points: vec![x0],
            budget,
        }
    }

    fn done(&self, x: [f64; 2]) -> bool {
        self.points.len() > self.budget || norm(rosenbrock_grad(x)) < GRAD_TOL
    }

    fn push(&mut self, x: [f64; 2]) -> Result<Next, Vec<[f64; 2]>> {
        if !(x[0].abs() <= BOX && x[1].abs() <= BOX) {
            return Err(std::mem::take(&mut self.points));
        }
        self.points.push(x);
        Ok(if self.done(x) { Next::Stop } else { Next::Continue })
    }
}

type Outcome = Result<Vec<[f64; 2]>, Vec<[f64; 2]>>;

macro_rules! record {
    ($trace:expr, $x:expr) => {
        match $trace.push($x)? {
            Next::Stop => return Ok($trace.points),
            Next::Continue => {}
        }
    };
}

fn sgd(x0: [f64; 2], lr: f64, budget: usize) -> Outcome {
    let mut t = Trace::new(x0, budget);
    let mut x = x0;
    while !t.done(x) {
        x = axpy(-lr, rosenbrock_grad(x), x);
        record!(t, x);
    }
    Ok(t.points)
}

fn momentum(x0: [f64; 2], lr: f64, budget: usize) -> Outcome {
    let beta = 0.9;
    let mut t = Trace::new(x0, budget);
    let (mut x, mut v) = (x0, [0.0; 2]);
    while !t.done(x) {
        let g = rosenbrock_grad(x);
        v = [beta * v[0] - lr * g[0], beta * v[1] - lr * g[1]];
        x = axpy(1.0, v, x);
        record!(t, x);
    }
    Ok(t.points)
}

fn adam(x0: [f64; 2], lr: f64, budget: usize) -> Outcome {
    let (b1, b2, eps) = (0.9, 0.999, 1e-8);
    let mut t = Trace::new(x0, budget);
    let (mut x, mut m, mut v) = (x0, [0.0; 2], [0.0; 2]);
    let mut k = 0;
    while !t.done(x) {
        k += 1;
        let g = rosenbrock_grad(x);
        for i in 0..2 {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let mh = m[i] / (1.0 - b1.powi(k));
            let vh = v[i] / (1.0 - b2.powi(k));
            x[i] -= lr * mh / (vh.sqrt() + eps);
        }
        record!(t, x);
    }
    Ok(t.points)
}

/// Backtracking until the Armijo condition holds; `None` when the step
/// collapses without progress.
fn backtrack(x: [f64; 2], fx: f64, g: [f64; 2], p: [f64; 2]) -> Option<f64> {
    let slope = dot(g, p);
    let mut a = 1.0;
    while a > 1e-16 {
        if rosenbrock(axpy(a, p, x)) <= fx + 1e-4 * a * slope {
            return Some(a);
        }
        a *= 0.5;
    }
    None
}

/// Step length satisfying the strong Wolfe conditions (bracketing then bisection zoom).
fn strong_wolfe(x: [f64; 2], fx: f64, g: [f64; 2], p: [f64; 2], a0: f64) -> Option<f64> {
    let (c1, c2) = (1e-4, 0.1);
    let d0 = dot(g, p);
    let phi = |a: f64| rosenbrock(axpy(a, p, x));
    let dphi = |a: f64| dot(rosenbrock_grad(axpy(a, p, x)), p);
    let zoom = |mut lo: f64, mut hi: f64| -> Option<f64> {
        for _ in 0..60 {
            let a = 0.5 * (lo + hi);
            let fa = phi(a);
            if fa > fx + c1 * a * d0 || fa >= phi(lo) {
                hi = a;
            } else {
                let da = dphi(a);
                if da.abs() <= -c2 * d0 {
                    return Some(a);
                }
                if da * (hi - lo) >= 0.0 {
                    hi = lo;
                }
                lo = a;
            }
            if (hi - lo).abs() < 1e-16 {
                break;
            }
        }
        let a = 0.5 * (lo + hi);
        (phi(a) < fx).then_some(a)
    };
    let (mut prev, mut fprev) = (0.0, fx);
    let mut a = a0;
    for i in 0..40 {
        let fa = phi(a);
        if fa > fx + c1 * a * d0 || (i > 0 && fa >= fprev) {
            return zoom(prev, a);
        }
        let da = dphi(a);
        if da.abs() <= -c2 * d0 {
            return Some(a);
        }
        if da >= 0.0 {
            return zoom(a, prev);
        }
        prev = a;
        fprev = fa;
        a *= 2.0;
    }
    Some(prev).filter(|&a| a > 0.0)
}

/// Nonlinear conjugate gradients, Polak–Ribière with nonnegative beta.
fn cg(x0: [f64; 2], budget: usize) -> Outcome {
    let mut t = Trace::new(x0, budget);
    let mut x = x0;
    let mut g = rosenbrock_grad(x);
    let mut p = [-g[0], -g[1]];
    let mut a_prev: Option<(f64, f64)> = None;
    while !t.done(x) {
        if dot(g, p) >= 0.0 {
            p = [-g[0], -g[1]];
        }
        let a0 = match a_prev {
            Some((a, slope)) => (a * slope / dot(g, p)).clamp(1e-8, 1.0),
            None => (1.0 / norm(g)).min(1.0),
        };
        let Some(a) = strong_wolfe(x, rosenbrock(x), g, p, a0) else {
            break;
        };
        a_prev = Some((a, dot(g, p)));
        x = axpy(a, p, x);
        let g_new = rosenbrock_grad(x);
        let beta = (dot(g_new, [g_new[0] - g[0], g_new[1] - g[1]]) / dot(g, g)).max(0.0);
        p = axpy(beta, p, [-g_new[0], -g_new[1]]);
        g = g_new;
        record!(t, x);
    }
    Ok(t.points)
}

/// BFGS on the inverse Hessian with Armijo backtracking.
fn bfgs(x0: [f64; 2], budget: usize) -> Outcome {
    let mut t = Trace::new(x0, budget);
    let mut x = x0;
    let mut g = rosenbrock_grad(x);
    let mut h = [[1.0, 0.0], [0.0, 1.0]];
    let mut first = true;
    while !t.done(x) {
        let mut p = [-(h[0][0] * g[0] + h[0][1] * g[1]), -(h[1][0] * g[0] + h[1][1] * g[1])];
        if dot(p, g) >= 0.0 {
            h = [[1.0, 0.0], [0.0, 1.0]];
            p = [-g[0], -g[1]];
        }
        let Some(a) = backtrack(x, rosenbrock(x), g, p) else {
            break;
        };
        let x_new = axpy(a, p, x);
        let g_new = rosenbrock_grad(x_new);
        let s = [x_new[0] - x[0], x_new[1] - x[1]];
        let y = [g_new[0] - g[0], g_new[1] - g[1]];
        let sy = dot(s, y);
        if sy > 1e-12 {
            if first {
                let scale = sy / dot(y, y);
                h = [[scale, 0.0], [0.0, scale]];
                first = false;
            }
            let rho = 1.0 / sy;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            let mut a_m = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    a_m[i][j] = f64::from(u8::from(i == j)) - rho * s[i] * y[j];
                }
            }
            let mut tmp = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    tmp[i][j] = (0..2).map(|k| a_m[i][k] * h[k][j]).sum();
                }
            }
            let mut next = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] = (0..2).map(|k| tmp[i][k] * a_m[j][k]).sum::<f64>() + rho * s[i] * s[j];
                }
            }
            h = next;
        }
        x = x_new;
        g = g_new;
        record!(t, x);
    }
    Ok(t.points)
}

/// Limited-memory BFGS (memory 5) with a strong Wolfe line search.
fn lbfgs(x0: [f64; 2], budget: usize) -> Outcome {
    const M: usize = 5;
    let mut t = Trace::new(x0, budget);
    let mut x = x0;
    let mut g = rosenbrock_grad(x);
    let mut mem: std::collections::VecDeque<([f64; 2], [f64; 2], f64)> = Default::default();
    while !t.done(x) {
        let mut q = g;
        let mut alphas = Vec::with_capacity(mem.len());
        for &(s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, q);
            q = axpy(-a, y, q);
            alphas.push(a);
        }
        let gamma = mem.back().map_or(1.0, |&(s, y, _)| dot(s, y) / dot(y, y));
        let mut r = [gamma * q[0], gamma * q[1]];
        for (&(s, y, rho), &a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, r);
            r = axpy(a - b, s, r);
        }
        let mut p = [-r[0], -r[1]];
        if dot(p, g) >= 0.0 {
            mem.clear();
            p = [-g[0], -g[1]];
        }
        let a0 = if mem.is_empty() { (1.0 / norm(g)).min(1.0) } else { 1.0 };
        let Some(a) = strong_wolfe(x, rosenbrock(x), g, p, a0) else {
            break;
        };
        let x_new = axpy(a, p, x);
        let g_new = rosenbrock_grad(x_new);
        let s = [x_new[0] - x[0], x_new[1] - x[1]];
        let y = [g_new[0] - g[0], g_new[1] - g[1]];
        let sy = dot(s, y);
        if sy > 1e-12 {
            if mem.len() == M {
                mem.pop_front();
            }
            mem.push_back((s, y, 1.0 / sy));
        }
        x = x_new;
        g = g_new;
        record!(t, x);
    }
    Ok(t.points)
}

struct SimplexParams {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

fn nelder_mead(x0: [f64; 2], budget: usize, initial: [[f64; 2]; 3], prm: SimplexParams) -> Outcome {
    let mut t = Trace::new(x0, budget);
    if t.done(x0) {
        return Ok(t.points);
    }
    let mut v: Vec<([f64; 2], f64)> = initial.iter().map(|&p| (p, rosenbrock(p))).collect();
    loop {
        v.sort_by(|a, b| a.1.total_cmp(&b.1));
        let worst = v[2].0;
        let c = [(v[0].0[0] + v[1].0[0]) / 2.0, (v[0].0[1] + v[1].0[1]) / 2.0];
        let along = |k: f64| [c[0] + k * (worst[0] - c[0]), c[1] + k * (worst[1] - c[1])];
        let xr = along(-prm.reflect);
        let fr = rosenbrock(xr);
        if fr < v[0].1 {
            let xe = along(-prm.reflect * prm.expand);
            let fe = rosenbrock(xe);
            v[2] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < v[1].1 {
            v[2] = (xr, fr);
        } else {
            let (xc, fc, ok) = if fr < v[2].1 {
                let xc = along(-prm.reflect * prm.contract);
                let fc = rosenbrock(xc);
                (xc, fc, fc <= fr)
            } else {
                let xc = along(prm.contract);
                let fc = rosenbrock(xc);
                (xc, fc, fc < v[2].1)
            };
            if ok {
                v[2] = (xc, fc);
            } else {
                let best = v[0].0;
                for vert in v.iter_mut().skip(1) {
                    let p = [
                        best[0] + prm.shrink * (vert.0[0] - best[0]),
                        best[1] + prm.shrink * (vert.0[1] - best[1]),
                    ];
                    *vert = (p, rosenbrock(p));
                }
            }
        }
        let best = v.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("three vertices").0;
        record!(t, best);
    }
}

fn scaled_simplex(x0: [f64; 2]) -> [[f64; 2]; 3] {
    let bump = |v: f64| if v == 0.0 { 0.00025 } else { v * 1.05 };
    [x0, [bump(x0[0]), x0[1]], [x0[0], bump(x0[1])]]
}

fn offset_simplex(x0: [f64; 2]) -> [[f64; 2]; 3] {
    [x0, [x0[0] + 0.1, x0[1]], [x0[0], x0[1] + 0.1]]
}

fn dispatch(id: &str, x0: [f64; 2], s: &OptimizerSettings) -> Option<Outcome> {
    let b = s.budget;
    Some(match id {
        "sgd" => sgd(x0, s.lr.unwrap_or(1e-3), b),
        "momentum" => momentum(x0, s.lr.unwrap_or(1e-3), b),
        "adam" => adam(x0, s.lr.unwrap_or(0.02), b),
        "cg" => cg(x0, b),
        "quasi_newton" => bfgs(x0, b),
        "lbfgs_like" => lbfgs(x0, b),
        "nelder_mead" => nelder_mead(
            x0,
            b,
            scaled_simplex(x0),
            SimplexParams {
                reflect: 1.0,
                expand: 2.0,
                contract: 0.5,
                shrink: 0.5,
            },
        ),
        "nelder_mead_adaptive" => {
            // Dimension-adaptive coefficients; in two dimensions they equal the
            // classic ones, so the variants differ by their initial simplex.
            let n = 2.0;
            nelder_mead(
                x0,
                b,
                offset_simplex(x0),
                SimplexParams {
                    reflect: 1.0,
                    expand: 1.0 + 2.0 / n,
                    contract: 0.75 - 1.0 / (2.0 * n),
                    shrink: 1.0 - 1.0 / n,
                },
            )
        }
        _ => return None,
    })
}

fn to_traj(points: Vec<[f64; 2]>, meta: TrajMeta) -> PsTraj {
    PsTraj {
        steps: points
            .into_iter()
            .map(|p| Solution {
                payload: crate::types::Payload::RealVec(p.to_vec()),
            })
            .collect(),
        meta,
    }
}

/// Runs one optimizer from `start` for at most `settings.budget` iterations.
///
/// The seed is recorded in the trajectory metadata; every optimizer here is
/// deterministic.
pub fn run_optimizer(id: &str, start: &[f64], settings: &OptimizerSettings, seed: u64) -> Result<PsTraj, ZooError> {
    let x0: [f64; 2] = start
        .try_into()
        .map_err(|_| ZooError::BadInstance(format!("start must be 2-dimensional, got {}", start.len())))?;
    if !x0.iter().all(|v| v.is_finite() && v.abs() <= BOX) {
        return Err(ZooError::BadInstance("start outside [-10, 10]^2".into()));
    }
    let meta = TrajMeta {
        algorithm_id: id.to_string(),
        instance_id: "rosenbrock".into(),
        start_id: format!("({}, {})", x0[0], x0[1]),
        seed,
    };
    match dispatch(id, x0, settings).ok_or_else(|| ZooError::UnknownAlgorithm(id.to_string()))? {
        Ok(points) => Ok(to_traj(points, meta)),
        Err(partial) => Err(ZooError::DivergedIterate {
            partial: Box::new(to_traj(partial, meta)),
        }),
    }
}

pub(super) fn run_zoo(id: &str, inst: &ProblemInstance, start: &StartPoint, seed: u64) -> Result<Vec<Solution>, ZooError> {
    let InstanceData::Rosenbrock { lo, hi } = inst.data else {
        return Err(bad_data(inst));
    };
    let StartValue::Point(p) = &start.value else {
        return Err(ZooError::BadStart(start.id.clone()));
    };
    if p.len() != 2 || p.iter().any(|v| !(lo..=hi).contains(v)) {
        return Err(ZooError::BadStart(start.id.clone()));
    }
    run_optimizer(id, p, &OptimizerSettings::default(), seed).map(|t| t.steps)
}

pub(super) const SGD: &str = r#"
def sgd(f, grad, x, lr=1e-3, steps=200):
    for _ in range(steps):
        g = grad(x)
        if norm(g) < 1e-8:
            break
        x = x - lr * g
        yield x
"#;

pub(super) const MOMENTUM: &str = r#"
def momentum(f, grad, x, lr=1e-3, beta=0.9, steps=200):
    v = zeros_like(x)
    for _ in range(steps):
        g = grad(x)
        if norm(g) < 1e-8:
            break
        v = beta * v - lr * g
        x = x + v
        yield x
"#;

pub(super) const ADAM: &str = r#"
def adam(f, grad, x, lr=0.02, b1=0.9, b2=0.999, eps=1e-8, steps=200):
    m = v = zeros_like(x)
    for t in range(1, steps + 1):
        g = grad(x)
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        x = x - lr * (m / (1 - b1 ** t)) / (sqrt(v / (1 - b2 ** t)) + eps)
        yield x
"#;

pub(super) const CG: &str = r#"
def conjugate_gradient(f, grad, x, steps=200):
    g = grad(x)
    d = -g
    for _ in range(steps):
        if dot(g, d) >= 0:
            d = -g
        alpha = line_search_strong_wolfe(f, grad, x, d, c1=1e-4, c2=0.1)
        x = x + alpha * d
        g_new = grad(x)
        beta = max(0, dot(g_new, g_new - g) / dot(g, g))
        d = -g_new + beta * d
        g = g_new
        yield x
"#;

pub(super) const QUASI_NEWTON: &str = r#"
def bfgs(f, grad, x, steps=200):
    H = eye(2)
    g = grad(x)
    for _ in range(steps):
        p = -H @ g
        alpha = backtracking(f, x, g, p, c=1e-4, shrink=0.5)
        s = alpha * p
        y = grad(x + s) - g
        rho = 1 / dot(s, y)
        H = (I - rho * outer(s, y)) @ H @ (I - rho * outer(y, s)) + rho * outer(s, s)
        x, g = x + s, g + y
        yield x
"#;

pub(super) const LBFGS: &str = r#"
def lbfgs(f, grad, x, m=5, steps=200):
    history = deque(maxlen=m)
    g = grad(x)
    for _ in range(steps):
        q = g.copy()
        coeffs = []
        for s, y in reversed(history):
            a = dot(s, q) / dot(y, s)
            q -= a * y
            coeffs.append(a)
        if history:
            s, y = history[-1]
            q *= dot(s, y) / dot(y, y)
        for (s, y), a in zip(history, reversed(coeffs)):
            q += (a - dot(y, q) / dot(y, s)) * s
        step = backtracking(f, x, g, -q)
        history.append((step * -q, grad(x - step * q) - g))
        x = x - step * q
        g = grad(x)
        yield x
"#;

pub(super) const NELDER_MEAD: &str = r#"
def nelder_mead(f, x0, steps=200):
    simplex = [x0] + [x0 + 0.05 * x0[i] * e(i) for i in range(2)]
    for _ in range(steps):
        simplex.sort(key=f)
        best, mid, worst = simplex
        c = (best + mid) / 2
        xr = c + (c - worst)
        if f(xr) < f(best):
            xe = c + 2 * (c - worst)
            simplex[2] = xe if f(xe) < f(xr) else xr
        elif f(xr) < f(mid):
            simplex[2] = xr
        else:
            xc = c + 0.5 * (xr - c) if f(xr) < f(worst) else c + 0.5 * (worst - c)
            if f(xc) < min(f(xr), f(worst)):
                simplex[2] = xc
            else:
                simplex = [best + 0.5 * (v - best) for v in simplex]
        yield min(simplex, key=f)
"#;

pub(super) const NELDER_MEAD_ADAPTIVE: &str = r#"
def nelder_mead_adaptive(f, x0, steps=200):
    n = len(x0)
    alpha, gamma, rho, sigma = 1, 1 + 2 / n, 0.75 - 1 / (2 * n), 1 - 1 / n
    vertices = [x0] + [x0 + 0.1 * unit(n, i) for i in range(n)]
    for _ in range(steps):
        vertices = sorted(vertices, key=f)
        centroid = mean(vertices[:-1])
        reflected = centroid + alpha * (centroid - vertices[-1])
        if f(reflected) < f(vertices[0]):
            expanded = centroid + gamma * (reflected - centroid)
            vertices[-1] = min(expanded, reflected, key=f)
        elif f(reflected) < f(vertices[-2]):
            vertices[-1] = reflected
        else:
            contracted = contract(centroid, reflected, vertices[-1], rho)
            if contracted is None:
                vertices = [vertices[0] + sigma * (v - vertices[0]) for v in vertices]
            else:
                vertices[-1] = contracted
        yield vertices[0]
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::OPTIMIZER_IDS;

    fn pts(t: &PsTraj) -> Vec<[f64; 2]> {
        t.steps.iter().map(|s| s.as_real().unwrap().try_into().unwrap()).collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for p in [[-1.2, 1.0], [0.5, -0.5], [2.0, 3.0]] {
            let g = rosenbrock_grad(p);
            let h = 1e-6;
            let fx = (rosenbrock([p[0] + h, p[1]]) - rosenbrock([p[0] - h, p[1]])) / (2.0 * h);
            let fy = (rosenbrock([p[0], p[1] + h]) - rosenbrock([p[0], p[1] - h])) / (2.0 * h);
            assert!((g[0] - fx).abs() < 1e-4 * (1.0 + fx.abs()));
            assert!((g[1] - fy).abs() < 1e-4 * (1.0 + fy.abs()));
        }
    }

    #[test]
    fn optimum_start_gives_single_step() {
        for id in OPTIMIZER_IDS {
            let t = run_optimizer(id, &[1.0, 1.0], &OptimizerSettings::default(), 0).unwrap();
            assert_eq!(pts(&t), vec![[1.0, 1.0]], "{id}");
        }
    }

    #[test]
    fn zero_learning_rate_is_constant() {
        let s = OptimizerSettings {
            budget: 10,
            lr: Some(0.0),
        };
        let t = run_optimizer("sgd", &[0.0, 0.0], &s, 0).unwrap();
        assert_eq!(t.len(), 11);
        assert!(pts(&t).iter().all(|p| *p == [0.0, 0.0]));
    }

    #[test]
    fn budgets_respected_and_progress_made() {
        for id in OPTIMIZER_IDS {
            for x0 in [[-1.2, 1.0], [0.5, -0.5]] {
                let t = run_optimizer(id, &x0, &OptimizerSettings::default(), 0).unwrap();
                assert!(t.len() <= DEFAULT_BUDGET + 1);
                let p = pts(&t);
                assert!(rosenbrock(*p.last().unwrap()) < rosenbrock(x0), "{id} from {x0:?}");
            }
        }
    }

    #[test]
    fn second_order_methods_converge() {
        for id in ["cg", "quasi_newton", "lbfgs_like"] {
            let t = run_optimizer(id, &[-1.2, 1.0], &OptimizerSettings::default(), 0).unwrap();
            let last = *pts(&t).last().unwrap();
            assert!((last[0] - 1.0).abs() < 1e-4 && (last[1] - 1.0).abs() < 1e-4, "{id}: {last:?}");
        }
    }

    #[test]
    fn divergence_is_flagged_with_partial_trajectory() {
        let s = OptimizerSettings {
            budget: 50,
            lr: Some(0.05),
        };
        match run_optimizer("sgd", &[-1.2, 1.0], &s, 0) {
            Err(ZooError::DivergedIterate { partial }) => {
                assert!(!partial.is_empty());
                assert!(pts(&partial).iter().all(|p| p[0].abs() <= 10.0 && p[1].abs() <= 10.0));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
