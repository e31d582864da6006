//! Derivative-free maximization by a block-sequential principal-axis
//! scheme: within each parameter block the direction set starts from the
//! coordinate axes, each direction is line-maximized with Brent's method,
//! and the net displacement replaces the direction of largest gain.

/// One objective evaluation, in call order.
#[derive(Debug, Clone, Copy)]
pub struct EvalRecord {
    pub index: usize,
    pub value: f64,
    /// False when the candidate violated a constraint and received the
    /// rejection value.
    pub feasible: bool,
}

/// Optimizer trajectory and outcome.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub best_parameters: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    /// Every evaluation in order.
    pub history: Vec<EvalRecord>,
    /// Running best value indexed by evaluation count: monotone
    /// non-decreasing by construction.
    pub best_trace: Vec<(usize, f64)>,
}

/// Objective wrapper counting evaluations and tracking the best candidate.
struct Tracker<'a, F> {
    f: &'a mut F,
    budget: usize,
    state: OptimizerState,
}

impl<'a, F: FnMut(&[f64]) -> (f64, bool)> Tracker<'a, F> {
    fn new(f: &'a mut F, budget: usize, x0: &[f64]) -> Self {
        Tracker {
            f,
            budget,
            state: OptimizerState {
                best_parameters: x0.to_vec(),
                best_value: f64::NEG_INFINITY,
                evaluations: 0,
                history: Vec::new(),
                best_trace: Vec::new(),
            },
        }
    }

    fn exhausted(&self) -> bool {
        self.state.evaluations >= self.budget
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let (value, feasible) = (self.f)(x);
        let idx = self.state.evaluations;
        self.state.evaluations += 1;
        self.state.history.push(EvalRecord {
            index: idx,
            value,
            feasible,
        });
        if value > self.state.best_value {
            self.state.best_value = value;
            self.state.best_parameters = x.to_vec();
        }
        self.state.best_trace.push((idx, self.state.best_value));
        value
    }
}

/// Feasible step range along direction `d` from `x` within the box bounds.
fn step_range(x: &[f64], d: &[f64], lower: &[f64], upper: &[f64]) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..x.len() {
        if d[i].abs() < 1e-300 {
            continue;
        }
        let a = (lower[i] - x[i]) / d[i];
        let b = (upper[i] - x[i]) / d[i];
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        lo = lo.max(a);
        hi = hi.min(b);
    }
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}

/// Brent line maximization of f(x + t·d) over t ∈ [lo, hi].
///
/// Returns the best step found (possibly 0) and its value.
fn line_maximize<F: FnMut(&[f64]) -> (f64, bool)>(
    tracker: &mut Tracker<F>,
    x: &[f64],
    d: &[f64],
    lo: f64,
    hi: f64,
    f_at_zero: f64,
) -> (f64, f64) {
    if hi - lo < 1e-14 || tracker.exhausted() {
        return (0.0, f_at_zero);
    }
    let probe = |t: f64, tracker: &mut Tracker<F>| -> f64 {
        if t == 0.0 {
            return f_at_zero;
        }
        let candidate: Vec<f64> = x.iter().zip(d).map(|(&xi, &di)| xi + t * di).collect();
        tracker.eval(&candidate)
    };
    // coarse bracket: five probes across the feasible segment plus t = 0
    let mut ts: Vec<f64> = (0..5)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 5.0)
        .collect();
    ts.push(0.0);
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    let mut best = (0.0, f_at_zero);
    let mut values = Vec::with_capacity(ts.len());
    for &t in &ts {
        if tracker.exhausted() {
            return best;
        }
        let v = probe(t, tracker);
        values.push(v);
        if v > best.1 {
            best = (t, v);
        }
    }
    // bracket around the best coarse sample
    let k = ts.iter().position(|&t| t == best.0).unwrap();
    let mut a = if k == 0 { lo } else { ts[k - 1] };
    let mut b = if k + 1 == ts.len() { hi } else { ts[k + 1] };
    if a >= b {
        return best;
    }
    // Brent on the bracketed maximum (minimize the negative)
    let gold = 0.3819660112501051;
    let mut xm = best.0.clamp(a, b);
    let mut w = xm;
    let mut v = xm;
    let mut fx = -best.1;
    let mut fw = fx;
    let mut fv = fx;
    let mut e: f64 = 0.0;
    let mut dstep = 0.0;
    for _ in 0..30 {
        if tracker.exhausted() {
            break;
        }
        let mid = 0.5 * (a + b);
        let tol1 = 1e-10 * xm.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (xm - mid).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut parabolic = false;
        if e.abs() > tol1 {
            let r = (xm - w) * (fx - fv);
            let q0 = (xm - v) * (fx - fw);
            let mut p = (xm - v) * q0 - (xm - w) * r;
            let mut q = 2.0 * (q0 - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - xm) && p < q * (b - xm) {
                e = dstep;
                dstep = p / q;
                parabolic = true;
            }
        }
        if !parabolic {
            e = if xm < mid { b - xm } else { a - xm };
            dstep = gold * e;
        }
        let u = if dstep.abs() >= tol1 {
            xm + dstep
        } else {
            xm + tol1.copysign(dstep)
        };
        let fu = -probe(u, tracker);
        if -fu > best.1 {
            best = (u, -fu);
        }
        if fu <= fx {
            if u >= xm {
                a = xm;
            } else {
                b = xm;
            }
            v = w;
            fv = fw;
            w = xm;
            fw = fx;
            xm = u;
            fx = fu;
        } else {
            if u < xm {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == xm {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == xm || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    best
}

/// Block-sequential principal-axis maximization of `f` under box bounds.
///
/// `f` returns (value, feasible); infeasible candidates are expected to
/// carry the rejection value already. `blocks` lists coordinate indices
/// visited in order, cycling until the budget is exhausted or a full cycle
/// improves the best value by less than `tol` relatively.
pub fn principal_axis_maximize<F: FnMut(&[f64]) -> (f64, bool)>(
    mut f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    blocks: &[Vec<usize>],
    budget: usize,
    tol: f64,
) -> OptimizerState {
    let n = x0.len();
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);
    let mut tracker = Tracker::new(&mut f, budget.max(1), x0);
    let mut x = x0.to_vec();
    let mut fx = tracker.eval(&x);

    'outer: loop {
        let cycle_start_best = tracker.state.best_value;
        for block in blocks.iter().filter(|b| !b.is_empty()) {
            // fresh coordinate-axis directions for this block visit
            let mut directions: Vec<Vec<f64>> = block
                .iter()
                .map(|&i| {
                    let mut d = vec![0.0; n];
                    // scale the axis to the coordinate's box size so the
                    // line parameter is dimensionless
                    d[i] = (upper[i] - lower[i]).max(1e-12);
                    d
                })
                .collect();
            for _sweep in 0..2 {
                if tracker.exhausted() {
                    break 'outer;
                }
                let x_sweep_start = x.clone();
                let f_sweep_start = fx;
                let mut biggest_gain = 0.0;
                let mut biggest_idx = 0;
                for (di, d) in directions.iter().enumerate() {
                    if tracker.exhausted() {
                        break;
                    }
                    let (t_lo, t_hi) = step_range(&x, d, lower, upper);
                    let (t, ft) = line_maximize(&mut tracker, &x, d, t_lo, t_hi, fx);
                    if ft > fx {
                        if ft - fx > biggest_gain {
                            biggest_gain = ft - fx;
                            biggest_idx = di;
                        }
                        for i in 0..n {
                            x[i] = (x[i] + t * d[i]).clamp(lower[i], upper[i]);
                        }
                        fx = ft;
                    }
                }
                // principal-axis update: net displacement replaces the
                // direction of largest gain
                let disp: Vec<f64> = x.iter().zip(&x_sweep_start).map(|(&a, &b)| a - b).collect();
                let norm = disp.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1e-14 && directions.len() > 1 {
                    directions[biggest_idx] = disp;
                    let d = directions[biggest_idx].clone();
                    let (t_lo, t_hi) = step_range(&x, &d, lower, upper);
                    let (t, ft) = line_maximize(&mut tracker, &x, &d, t_lo, t_hi, fx);
                    if ft > fx {
                        for i in 0..n {
                            x[i] = (x[i] + t * d[i]).clamp(lower[i], upper[i]);
                        }
                        fx = ft;
                    }
                }
                let sweep_gain = fx - f_sweep_start;
                if sweep_gain <= tol * (fx.abs() + 1e-30) {
                    break;
                }
            }
        }
        let cycle_gain = tracker.state.best_value - cycle_start_best;
        if tracker.exhausted() || cycle_gain <= tol * (tracker.state.best_value.abs() + 1e-30) {
            break;
        }
    }
    tracker.state
}
