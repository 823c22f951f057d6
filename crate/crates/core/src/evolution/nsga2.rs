use std::cmp::Ordering;

/// `a` dominates `b` when it is no worse on every objective and strictly
/// better on one (all objectives minimized).
pub fn dominates(a: &[f64; 2], b: &[f64; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

/// Fast non-dominated sort; fronts in rank order, members in index order.
pub fn fast_non_dominated_sort(objs: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let n = objs.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dom_count = vec![0usize; n];
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            if dominates(&objs[p], &objs[q]) {
                dominated_by_me[p].push(q);
            } else if dominates(&objs[q], &objs[p]) {
                dom_count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dom_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by_me[p] {
                dom_count[q] -= 1;
                if dom_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of `front` (same order as `front`).
/// Boundary members get infinity.
pub fn crowding_distance(objs: &[[f64; 2]], front: &[usize]) -> Vec<f64> {
    let len = front.len();
    let mut dist = vec![0.0; len];
    if len <= 2 {
        return vec![f64::INFINITY; len];
    }
    for k in 0..2 {
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| objs[front[a]][k].total_cmp(&objs[front[b]][k]).then(a.cmp(&b)));
        let lo = objs[front[order[0]]][k];
        let hi = objs[front[order[len - 1]]][k];
        dist[order[0]] = f64::INFINITY;
        dist[order[len - 1]] = f64::INFINITY;
        let span = hi - lo;
        if !(span > 0.0) || !span.is_finite() {
            continue;
        }
        for w in 1..len - 1 {
            let prev = objs[front[order[w - 1]]][k];
            let next = objs[front[order[w + 1]]][k];
            dist[order[w]] += (next - prev) / span;
        }
    }
    dist
}

/// Indices of the `target` survivors: whole fronts in rank order, then the
/// boundary front by decreasing crowding distance (ties by index).
pub fn nsga2_select(objs: &[[f64; 2]], target: usize) -> Vec<usize> {
    assert!(objs.len() >= target, "cannot select {target} from {}", objs.len());
    let mut out = Vec::with_capacity(target);
    for front in fast_non_dominated_sort(objs) {
        if out.len() + front.len() <= target {
            out.extend_from_slice(&front);
            if out.len() == target {
                break;
            }
            continue;
        }
        let dist = crowding_distance(objs, &front);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            dist[b]
                .partial_cmp(&dist[a])
                .unwrap_or(Ordering::Equal)
                .then(front[a].cmp(&front[b]))
        });
        let missing = target - out.len();
        out.extend(order.into_iter().take(missing).map(|i| front[i]));
        break;
    }
    out
}
