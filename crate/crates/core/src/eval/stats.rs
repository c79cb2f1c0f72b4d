use ndarray::ArrayView1;

use crate::error::{Error, Result};

/// Fractional ranks (1-based); tied values share the mean of their span.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation; `None` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Config(format!(
            "spearman inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientItems {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite input".into()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::UndefinedCorrelation("an input has zero rank variance".into()))
}

/// Cosine similarity and whether a zero norm forced the result to 0.
pub fn cosine_checked(u: ArrayView1<f64>, v: ArrayView1<f64>) -> (f64, bool) {
    assert_eq!(u.len(), v.len(), "cosine of vectors with different lengths");
    let nu = u.dot(&u).sqrt();
    let nv = v.dot(&v).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return (0.0, true);
    }
    ((u.dot(&v) / (nu * nv)).clamp(-1.0, 1.0), false)
}

/// `u.v / (|u| |v|)`, or 0 when either vector is zero.
pub fn cosine(u: ArrayView1<f64>, v: ArrayView1<f64>) -> f64 {
    cosine_checked(u, v).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn monotone_and_reversed() {
        assert_relative_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_relative_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 3.0]), [1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]), [2.0, 2.0, 2.0]);
        // ranks [1, 2.5, 2.5, 4] vs [1, 2, 3, 4]: sxy = 4.5, sxx = 4.5, syy = 5
        let expected = 4.5 / (4.5f64.sqrt() * 5f64.sqrt());
        assert_relative_eq!(spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap(), expected, epsilon = 1e-15);
        assert_relative_eq!(expected, 0.948_683_298_050_513_8, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(spearman(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(spearman(&[1.0], &[1.0]), Err(Error::InsufficientItems { .. })));
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn cosine_basics() {
        let u = array![1.0, 2.0, -0.5];
        let v = array![0.3, -1.0, 4.0];
        assert_relative_eq!(cosine(u.view(), u.view()), 1.0, epsilon = 1e-15);
        assert_eq!(cosine(array![1.0, 0.0].view(), array![0.0, 3.0].view()), 0.0);
        let u2 = &u * 2.0;
        assert_relative_eq!(cosine(u2.view(), v.view()), cosine(u.view(), v.view()), epsilon = 1e-15);
        assert_eq!(cosine_checked(array![0.0, 0.0].view(), v.slice(ndarray::s![..2])), (0.0, true));
    }

    fn seq() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((-5i32..5).prop_map(f64::from), 3..30)
    }

    proptest! {
        #[test]
        fn symmetric_and_self_one(x in seq(), y in seq()) {
            let n = x.len().min(y.len());
            let (x, y) = (&x[..n], &y[..n]);
            match (spearman(x, y), spearman(y, x)) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12 && (-1.0..=1.0).contains(&a)),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "asymmetric failure"),
            }
            if let Ok(r) = spearman(x, x) {
                prop_assert!((r - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn invariant_under_monotone_maps(x in seq(), y in seq()) {
            let n = x.len().min(y.len());
            let (x, y) = (&x[..n], &y[..n]);
            let fx: Vec<f64> = x.iter().map(|v| (v / 3.0).exp() + 7.0).collect();
            let gy: Vec<f64> = y.iter().map(|v| v.powi(3) - 2.0).collect();
            if let (Ok(a), Ok(b)) = (spearman(x, y), spearman(&fx, &gy)) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
