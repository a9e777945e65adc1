//! Even-index Bernoulli numbers as exact rationals.

/// `(numerator, denominator)` of B_2, B_4, ..., B_32.
pub const BERNOULLI_EVEN: [(i64, i64); 16] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
    (-236364091, 2730),
    (8553103, 6),
    (-23749461029, 870),
    (8615841276005, 14322),
    (-7709321041217, 510),
];

/// B_{2k} as a float, `1 <= k <= 16`.
pub fn bernoulli_2k(k: usize) -> f64 {
    let (n, d) = BERNOULLI_EVEN[k - 1];
    n as f64 / d as f64
}

/// B_{2k} / (2k)!, the Euler–Maclaurin coefficients.
pub fn em_coefficient(k: usize) -> f64 {
    let fact: f64 = (1..=2 * k).map(|i| i as f64).product();
    bernoulli_2k(k) / fact
}
