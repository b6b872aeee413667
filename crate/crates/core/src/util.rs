/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of compatible (Facilitator pair, Divider multiset) positions
/// on `n` vertices with `k` Divider agents.
pub fn position_count_estimate(n: usize, k: usize) -> u128 {
    let n = n as u128;
    let k = k as u128;
    let coincident = n.saturating_mul(binomial((n + k).saturating_sub(2), k));
    let distinct = binomial(n, 2).saturating_mul(binomial((n + k).saturating_sub(3), k));
    coincident.saturating_add(distinct)
}

/// All sorted `k`-multisets over `0..n`, in lexicographic order.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, k, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}
