//! Volume of bounded H-polytopes `{z : A z ≤ b}` by Lasserre's facet
//! recursion.

const EPS: f64 = 1e-12;

/// Normalizes rows, drops trivial ones and keeps the tightest of parallel
/// duplicates. Returns `None` when a trivial row is infeasible.
fn clean(a: &[Vec<f64>], b: &[f64]) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (ai, &bi) in a.iter().zip(b) {
        let norm = ai.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < EPS {
            if bi < -EPS {
                return None;
            }
            continue;
        }
        let u: Vec<f64> = ai.iter().map(|x| x / norm).collect();
        let c = bi / norm;
        match rows
            .iter_mut()
            .find(|(v, _)| v.iter().zip(&u).all(|(p, q)| (p - q).abs() < 1e-10))
        {
            Some(existing) => existing.1 = existing.1.min(c),
            None => rows.push((u, c)),
        }
    }
    Some(rows.into_iter().unzip())
}

/// `m`-dimensional volume of `{z ∈ R^m : A z ≤ b}`; the set must be bounded.
pub fn volume(a: &[Vec<f64>], b: &[f64], m: usize) -> f64 {
    if m == 0 {
        return if b.iter().all(|&x| x >= -EPS) { 1.0 } else { 0.0 };
    }
    let Some((a, b)) = clean(a, b) else { return 0.0 };
    if m == 1 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (ai, bi) in a.iter().zip(&b) {
            let x = bi / ai[0];
            if ai[0] > 0.0 {
                hi = hi.min(x);
            } else {
                lo = lo.max(x);
            }
        }
        return (hi - lo).max(0.0);
    }
    let mut total = 0.0;
    for i in 0..a.len() {
        if b[i].abs() < 1e-300 {
            // Facets through the origin contribute nothing.
            continue;
        }
        let k = (0..m)
            .max_by(|&x, &y| a[i][x].abs().total_cmp(&a[i][y].abs()))
            .unwrap();
        let aik = a[i][k];
        // Substitute z_k = (b_i − Σ_{l≠k} a_il z_l)/a_ik into the other rows.
        let mut sub_a = Vec::with_capacity(a.len() - 1);
        let mut sub_b = Vec::with_capacity(a.len() - 1);
        for j in 0..a.len() {
            if j == i {
                continue;
            }
            let f = a[j][k] / aik;
            let row: Vec<f64> = (0..m).filter(|&l| l != k).map(|l| a[j][l] - f * a[i][l]).collect();
            sub_a.push(row);
            sub_b.push(b[j] - f * b[i]);
        }
        let facet = volume(&sub_a, &sub_b, m - 1);
        total += b[i] / aik.abs() * facet;
    }
    (total / m as f64).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(lo: &[f64], hi: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let m = lo.len();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            a.push(e.clone());
            b.push(hi[i]);
            e[i] = -1.0;
            a.push(e);
            b.push(-lo[i]);
        }
        (a, b)
    }

    #[test]
    fn boxes_and_simplex() {
        let (a, b) = cube(&[-1.0, 0.5, 0.0], &[2.0, 1.0, 4.0]);
        assert!((volume(&a, &b, 3) - 3.0 * 0.5 * 4.0).abs() < 1e-12);
        // Offset box not containing the origin.
        let (a, b) = cube(&[3.0, 5.0], &[4.0, 7.5]);
        assert!((volume(&a, &b, 2) - 2.5).abs() < 1e-12);
        // x, y ≥ 0, x + y ≤ 1.
        let a = vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]];
        assert!((volume(&a, &[0.0, 0.0, 1.0], 2) - 0.5).abs() < 1e-12);
        // Duplicate constraints must not be double counted.
        let a = vec![vec![1.0], vec![2.0], vec![-1.0]];
        assert!((volume(&a, &[1.0, 2.0, 1.0], 1) - 2.0).abs() < 1e-12);
        let (mut a, mut b) = cube(&[-1.0, -1.0], &[1.0, 1.0]);
        a.push(vec![1.0, 0.0]);
        b.push(1.0);
        assert!((volume(&a, &b, 2) - 4.0).abs() < 1e-12);
        // Empty.
        let (a, b) = cube(&[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(volume(&a, &b, 2), 0.0);
    }

    #[test]
    fn rotated_square_slice() {
        // Square of area 1 rotated by 45°.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = vec![vec![s, s], vec![-s, -s], vec![s, -s], vec![-s, s]];
        assert!((volume(&a, &[0.5, 0.5, 0.5, 0.5], 2) - 1.0).abs() < 1e-12);
    }
}
