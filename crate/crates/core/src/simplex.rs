//! Nelder–Mead direct search over a fixed-dimension box. Points the objective
//! rejects are reported as `+inf` and are never accepted into the simplex
//! unless every alternative is also rejected.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iters: usize,
    /// Stop once the spread of values across the simplex is below this.
    pub ftol: f64,
    /// ...and every vertex is within this distance of the best one.
    pub xtol: f64,
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_iters: 500, ftol: 1e-13, xtol: 1e-10, initial_step: 0.05 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexResult<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iters: usize,
    pub evals: usize,
}

pub fn minimize<const N: usize>(
    mut f: impl FnMut(&[f64; N]) -> f64,
    x0: [f64; N],
    opts: &SimplexOptions,
) -> SimplexResult<N> {
    let mut evals = 0usize;
    let mut eval = |x: &[f64; N], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<[f64; N]> = Vec::with_capacity(N + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(N + 1);
    let v0 = eval(&x0, &mut evals);
    pts.push(x0);
    vals.push(v0);
    for i in 0..N {
        let mut step = opts.initial_step;
        let mut chosen = None;
        for _ in 0..12 {
            for sign in [1.0, -1.0] {
                let mut x = x0;
                x[i] += sign * step;
                let v = eval(&x, &mut evals);
                if v.is_finite() {
                    chosen = Some((x, v));
                    break;
                }
            }
            if chosen.is_some() {
                break;
            }
            step *= 0.5;
        }
        let (x, v) = chosen.unwrap_or_else(|| {
            let mut x = x0;
            x[i] += step;
            (x, f64::INFINITY)
        });
        pts.push(x);
        vals.push(v);
    }

    let mut iters = 0;
    while iters < opts.max_iters {
        iters += 1;
        let mut order: Vec<usize> = (0..=N).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i]).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[N] - vals[0];
        let size = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.ftol && size <= opts.xtol {
            break;
        }

        let mut centroid = [0.0; N];
        for p in &pts[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let along = |t: f64| -> [f64; N] {
            let mut x = [0.0; N];
            for k in 0..N {
                x[k] = centroid[k] + t * (pts[N][k] - centroid[k]);
            }
            x
        };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[N] = xe;
                vals[N] = fe;
            } else {
                pts[N] = xr;
                vals[N] = fr;
            }
            continue;
        }
        if fr < vals[N - 1] {
            pts[N] = xr;
            vals[N] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[N] {
            let x = along(-0.5);
            (x, eval(&x, &mut evals))
        } else {
            let x = along(0.5);
            (x, eval(&x, &mut evals))
        };
        if fc < vals[N].min(fr) {
            pts[N] = xc;
            vals[N] = fc;
            continue;
        }
        // shrink toward the best vertex
        let best = pts[0];
        for j in 1..=N {
            for k in 0..N {
                pts[j][k] = best[k] + 0.5 * (pts[j][k] - best[k]);
            }
            vals[j] = eval(&pts[j], &mut evals);
        }
    }

    let (bi, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    SimplexResult { x: pts[bi], value: vals[bi], iters, evals }
}
