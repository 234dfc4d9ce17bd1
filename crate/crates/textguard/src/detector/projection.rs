//! Deterministic two-component linear projection of representation
//! matrices: variance-maximizing directions found by power iteration with a
//! fixed starting vector, so identical inputs always plot identically.

/// Project rows of `matrix` onto their top two principal directions.
/// Returns one `[x, y]` per row. Degenerate inputs (fewer than 2 rows or
/// zero variance) project to the origin.
pub fn project_2d(matrix: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let n = matrix.len();
    if n == 0 {
        return Vec::new();
    }
    let dim = matrix[0].len();
    if n < 2 || dim == 0 {
        return vec![[0.0, 0.0]; n];
    }

    // center
    let mut mean = vec![0.0; dim];
    for row in matrix {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| row.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    let first = principal_direction(&centered, None);
    let second = principal_direction(&centered, Some(&first));

    centered
        .iter()
        .map(|row| [dot(row, &first), dot(row, &second)])
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Power iteration on the (implicit) covariance, orthogonalized against
/// `exclude` when given. Fixed deterministic start vector.
fn principal_direction(centered: &[Vec<f64>], exclude: Option<&[f64]>) -> Vec<f64> {
    let dim = centered[0].len();
    // deterministic non-degenerate start
    let mut v: Vec<f64> = (0..dim)
        .map(|i| {
            let mut z = (i as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            ((z >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .collect();
    if let Some(e) = exclude {
        let proj = dot(&v, e);
        for (x, ev) in v.iter_mut().zip(e) {
            *x -= proj * ev;
        }
    }
    if normalize(&mut v) == 0.0 {
        v[0] = 1.0;
    }

    for _ in 0..100 {
        // w = (X^T X) v computed as sum of rows weighted by row.v
        let mut w = vec![0.0; dim];
        for row in centered {
            let coeff = dot(row, &v);
            for (wi, xi) in w.iter_mut().zip(row) {
                *wi += coeff * xi;
            }
        }
        if let Some(e) = exclude {
            let proj = dot(&w, e);
            for (x, ev) in w.iter_mut().zip(e) {
                *x -= proj * ev;
            }
        }
        if normalize(&mut w) == 0.0 {
            break;
        }
        v = w;
    }

    // sign convention: largest-magnitude entry positive
    let lead = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    if v[lead] < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_identical_points() {
        let m = vec![
            vec![1.0, 0.0, 2.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 2.0],
        ];
        let p = project_2d(&m);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0], p[2]);
        assert_eq!(project_2d(&m), p);
    }

    #[test]
    fn captures_dominant_axis() {
        // variance lives along the first coordinate
        let m: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![i as f64 * 10.0, (i % 2) as f64 * 0.1, 0.0])
            .collect();
        let p = project_2d(&m);
        // first component spreads much more than second
        let spread =
            |axis: usize| -> f64 {
                let vals: Vec<f64> = p.iter().map(|q| q[axis]).collect();
                let max = vals.iter().cloned().fold(f64::MIN, f64::max);
                let min = vals.iter().cloned().fold(f64::MAX, f64::min);
                max - min
            };
        assert!(spread(0) > 10.0 * spread(1));
    }

    #[test]
    fn handles_degenerate_inputs() {
        assert!(project_2d(&[]).is_empty());
        assert_eq!(project_2d(&[vec![1.0, 2.0]]), vec![[0.0, 0.0]]);
        let constant = vec![vec![3.0, 3.0], vec![3.0, 3.0]];
        let p = project_2d(&constant);
        assert_eq!(p, vec![[0.0, 0.0], [0.0, 0.0]]);
    }
}
