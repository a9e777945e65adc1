use crate::arith::{is_squarefree, jacobi};

/// True for fundamental discriminants other than 1.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Kronecker symbol `(D/n)` for `n >= 1`.
pub fn kronecker_symbol(d: i64, n: u64) -> i32 {
    assert!(n >= 1, "kronecker symbol needs n >= 1");
    let mut m = n;
    let mut result = 1;
    while m % 2 == 0 {
        m /= 2;
        result *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    if m > 1 {
        result *= jacobi(d, m);
    }
    result
}
