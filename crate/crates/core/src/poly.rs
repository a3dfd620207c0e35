//! Real roots of low-degree polynomials (ascending coefficients).

fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &k)| i as f64 * k).collect()
}

fn trim(c: &[f64]) -> &[f64] {
    let scale = c.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
    if scale == 0.0 {
        return &c[..0];
    }
    let mut n = c.len();
    while n > 0 && c[n - 1].abs() <= 1e-14 * scale {
        n -= 1;
    }
    &c[..n]
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All real roots, sorted ascending. Roots of even multiplicity may be
/// reported only when they coincide with a critical point exactly.
pub(crate) fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let c = trim(coeffs);
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![-c[0] / c[1]],
        _ => {
            let lead = c[c.len() - 1];
            // Cauchy bound on root magnitude.
            let bound = 1.0 + c[..c.len() - 1].iter().fold(0.0_f64, |m, k| m.max((k / lead).abs()));
            let mut knots = vec![-bound];
            knots.extend(real_roots(&derivative(c)).into_iter().filter(|x| x.abs() < bound));
            knots.push(bound);
            let mut roots: Vec<f64> = Vec::new();
            for pair in knots.windows(2) {
                let (lo, hi) = (pair[0], pair[1]);
                let (flo, fhi) = (eval(c, lo), eval(c, hi));
                let r = if flo == 0.0 {
                    Some(lo)
                } else if fhi == 0.0 {
                    Some(hi)
                } else if (flo < 0.0) != (fhi < 0.0) {
                    Some(bisect(c, lo, hi))
                } else {
                    None
                };
                if let Some(r) = r {
                    if roots.last().is_none_or(|&l| (r - l).abs() > 1e-12 * (1.0 + r.abs())) {
                        roots.push(r);
                    }
                }
            }
            roots
        }
    }
}

/// Product of two ascending-coefficient polynomials.
pub(crate) fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub(crate) fn sub(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0))
        .collect()
}
