//! Independent reference implementations used as test oracles, plus input
//! generators. Shared with the acceptance suite.
#![allow(dead_code)]

use mgp_core::dataset::Dataset;
use mgp_core::model::{fit_individual, FitSettings};
use mgp_core::program::random_program;
use mgp_core::rng::{seeded, EngineRng};
use mgp_core::{Individual, Matrix, Program};
use rand::Rng;

pub fn uniform_rows(n: usize, d: usize, lo: f64, hi: f64, rng: &mut EngineRng) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(lo..hi)).collect()).collect()
}

/// `n × d` uniform attributes in [-2, 2] with a smooth nonlinear target plus noise.
pub fn random_dataset(n: usize, d: usize, seed: u64) -> Dataset<f64> {
    let mut rng = seeded(seed);
    let rows = uniform_rows(n, d, -2.0, 2.0, &mut rng);
    let y = rows
        .iter()
        .map(|r| r[0] * r[0] + (r[d - 1] * 1.3).sin() + 0.1 * rng.gen_range(-1.0..1.0))
        .collect();
    Dataset::from_rows(&rows, y).unwrap()
}

pub fn randomize_weights(p: &mut Program<f64>, rng: &mut EngineRng) {
    let w: Vec<f64> = (0..p.n_weights()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    p.set_weights(&w);
}

pub fn random_individual(m: usize, depth: usize, d: usize, rng: &mut EngineRng) -> Individual<f64> {
    Individual::new((0..m).map(|_| random_program(depth, d, rng)).collect())
}

pub fn fitted_random_individual(m: usize, depth: usize, ds: &Dataset<f64>, rng: &mut EngineRng) -> Individual<f64> {
    let ind = random_individual(m, depth, ds.n_attributes(), rng);
    fit_individual(&ind, ds, &FitSettings::default()).unwrap().individual
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Ridge with unpenalized intercept: `(ZᵀZ + λI) β = Zᵀ(y − ȳ)`, intercept `ȳ`
/// (columns of `z` are assumed centered).
pub fn ridge_oracle(z: &Matrix<f64>, y: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let m = z.cols();
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - ybar).collect();
    let mut a = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = (0..z.rows()).map(|r| z.get(r, i) * z.get(r, j)).sum();
        }
        a[i][i] += lambda;
        rhs[i] = (0..z.rows()).map(|r| z.get(r, i) * yc[r]).sum();
    }
    (gauss_solve(a, rhs), ybar)
}

pub fn naive_mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn naive_std(v: &[f64]) -> f64 {
    let m = naive_mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// A column counts as constant when its population std is at most
/// `sqrt(eps) · max|x|`.
pub fn naive_constant(v: &[f64]) -> bool {
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    !(naive_std(v) > f64::EPSILON.sqrt() * scale)
}

pub fn naive_abs_corr(a: &[f64], b: &[f64]) -> Option<f64> {
    if naive_constant(a) || naive_constant(b) {
        return None;
    }
    let (ma, mb) = (naive_mean(a), naive_mean(b));
    let n = a.len() as f64;
    let cov = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
    Some((cov / (naive_std(a) * naive_std(b))).abs().min(1.0))
}

/// Lowest index whose score is within 1e-12 of the largest.
pub fn first_within_tie(scores: &[Option<f64>]) -> Option<usize> {
    let top = scores.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    scores.iter().position(|s| matches!(s, Some(v) if *v >= top - 1e-12))
}

/// Residual of `p1` with feature `drop` removed, computed from scratch.
pub fn naive_residual(p1: &Individual<f64>, ds: &Dataset<f64>, drop: usize) -> Vec<f64> {
    let mut r: Vec<f64> = ds.y().iter().map(|y| y - p1.intercept).collect();
    for (i, p) in p1.programs.iter().enumerate() {
        if i == drop {
            continue;
        }
        let out = p.evaluate(ds).unwrap();
        if naive_constant(&out) {
            continue;
        }
        let (mu, sd) = (naive_mean(&out), naive_std(&out));
        for (rv, v) in r.iter_mut().zip(&out) {
            *rv -= p1.coefficients[i] * (v - mu) / sd;
        }
    }
    r
}

/// Exhaustive scan of `p2` for the feature most correlated with `p1`'s
/// residual without feature `drop`.
pub fn res_xo_oracle(p1: &Individual<f64>, p2: &Individual<f64>, ds: &Dataset<f64>, drop: usize) -> Option<usize> {
    let r = naive_residual(p1, ds, drop);
    let scores: Vec<Option<f64>> = p2
        .programs
        .iter()
        .map(|p| naive_abs_corr(&p.evaluate(ds).unwrap(), &r))
        .collect();
    first_within_tie(&scores)
}

/// Greedy forward-stagewise loop written out plainly. Returns
/// `(parent, index)` pairs, parent 0 for `p1` and 1 for `p2`.
pub fn stage_xo_oracle(p1: &Individual<f64>, p2: &Individual<f64>, ds: &Dataset<f64>) -> Vec<(u8, usize)> {
    let target = p1.programs.len();
    let mut pool: Vec<((u8, usize), Vec<f64>)> = Vec::new();
    for (tag, ind) in [(0u8, p1), (1u8, p2)] {
        for (i, p) in ind.programs.iter().enumerate() {
            let out = p.evaluate(ds).unwrap();
            if naive_constant(&out) {
                continue;
            }
            let mu = naive_mean(&out);
            pool.push(((tag, i), out.iter().map(|v| v - mu).collect()));
        }
    }
    let ybar = naive_mean(ds.y());
    let mut r: Vec<f64> = ds.y().iter().map(|v| v - ybar).collect();
    let mut chosen: Vec<(u8, usize)> = Vec::new();
    while chosen.len() < target && !pool.is_empty() {
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let pick = if norm < 1e-12 {
            None
        } else {
            let scores: Vec<Option<f64>> = pool.iter().map(|(_, f)| naive_abs_corr(f, &r)).collect();
            first_within_tie(&scores)
        };
        let Some(k) = pick else {
            while chosen.len() < target && !pool.is_empty() {
                chosen.push(pool.remove(0).0);
            }
            break;
        };
        let (tag, f) = pool.remove(k);
        let b = f.iter().zip(&r).map(|(a, c)| a * c).sum::<f64>() / f.iter().map(|a| a * a).sum::<f64>();
        for (rv, fv) in r.iter_mut().zip(&f) {
            *rv -= b * fv;
        }
        pool.retain(|(_, g)| *g != f);
        chosen.push(tag);
    }
    let mut i = 0;
    while chosen.len() < target {
        if !chosen.contains(&(0, i)) {
            chosen.push((0, i));
        }
        i += 1;
    }
    chosen
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn mad(v: &[f64]) -> f64 {
    fn med(v: &[f64]) -> f64 {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        if n % 2 == 1 {
            s[n / 2]
        } else {
            (s[n / 2 - 1] + s[n / 2]) / 2.0
        }
    }
    let m = med(v);
    med(&v.iter().map(|x| (x - m).abs()).collect::<Vec<_>>())
}

/// Exact ε-lexicase selection probabilities by enumerating every case order.
pub fn lexicase_probabilities(errors: &[Vec<f64>]) -> Vec<f64> {
    let members = errors.len();
    let cases = errors[0].len();
    let eps: Vec<f64> = (0..cases)
        .map(|c| mad(&errors.iter().map(|e| e[c]).collect::<Vec<_>>()))
        .collect();
    let orders = permutations(cases);
    let mut prob = vec![0.0; members];
    for order in &orders {
        let mut alive: Vec<usize> = (0..members).collect();
        for &c in order {
            if alive.len() == 1 {
                break;
            }
            let best = alive.iter().map(|&m| errors[m][c]).fold(f64::INFINITY, f64::min);
            alive.retain(|&m| errors[m][c] <= best + eps[c]);
        }
        for &m in &alive {
            prob[m] += 1.0 / (alive.len() as f64 * orders.len() as f64);
        }
    }
    prob
}

/// Central finite difference of every program output with respect to weight `k`.
pub fn central_difference(p: &Program<f64>, ds: &Dataset<f64>, k: usize, h: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let w = p.weights();
    let eval = |delta: f64| {
        let mut q = p.clone();
        let mut ww = w.clone();
        ww[k] += delta;
        q.set_weights(&ww);
        q.evaluate(ds).unwrap()
    };
    (eval(h), eval(0.0), eval(-h))
}

/// Compares every Jacobian entry of `p` against central differences with
/// step `h`. Returns the relative errors of the entries compared and the
/// number skipped because the difference quotient is unreliable there: a
/// kink or clamp inside `[w - h, w + h]` (forward and backward quotients
/// disagree) or curvature large enough that halving the step moves the
/// central quotient by more than 1e-6 relative.
pub fn gradient_vs_fd(p: &Program<f64>, ds: &Dataset<f64>, h: f64) -> (Vec<f64>, usize) {
    let jac = p.gradient(ds).unwrap();
    let (mut rels, mut skipped) = (Vec::new(), 0);
    for k in 0..p.n_weights() {
        let (plus, mid, minus) = central_difference(p, ds, k, h);
        let (plus2, _, minus2) = central_difference(p, ds, k, h / 2.0);
        for r in 0..ds.n_rows() {
            let fwd = (plus[r] - mid[r]) / h;
            let bwd = (mid[r] - minus[r]) / h;
            let fd = (plus[r] - minus[r]) / (2.0 * h);
            let fd2 = (plus2[r] - minus2[r]) / h;
            let scale = fwd.abs().max(bwd.abs()).max(1.0);
            if (fwd - bwd).abs() > 1e-3 * scale || (fd - fd2).abs() > 1e-6 * scale {
                skipped += 1;
                continue;
            }
            let analytic = jac.get(r, k);
            rels.push((analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1.0));
        }
    }
    (rels, skipped)
}
