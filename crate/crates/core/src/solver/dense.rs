/// Column-major dense square matrix inverse by Gauss–Jordan elimination with partial pivoting.
/// Returns `None` if a pivot falls below `tiny`.
pub(crate) fn invert(m: usize, mut a: Vec<f64>, tiny: f64) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), m * m);
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    // a[c * m + r] is row r, column c.
    for k in 0..m {
        let mut piv = k;
        let mut best = a[k * m + k].abs();
        for r in k + 1..m {
            let v = a[k * m + r].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < tiny {
            return None;
        }
        if piv != k {
            for c in 0..m {
                a.swap(c * m + k, c * m + piv);
                inv.swap(c * m + k, c * m + piv);
            }
        }
        let p = a[k * m + k];
        for c in 0..m {
            a[c * m + k] /= p;
            inv[c * m + k] /= p;
        }
        let factors: Vec<f64> = (0..m).map(|r| a[k * m + r]).collect();
        for c in 0..m {
            let ak = a[c * m + k];
            let ik = inv[c * m + k];
            if ak == 0.0 && ik == 0.0 {
                continue;
            }
            for (r, &f) in factors.iter().enumerate() {
                if r == k || f == 0.0 {
                    continue;
                }
                a[c * m + r] -= f * ak;
                inv[c * m + r] -= f * ik;
            }
        }
    }
    Some(inv)
}
