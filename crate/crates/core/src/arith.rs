//! Small-integer number theory used throughout the crate: primality,
//! factorization, modular powers and roots, Jacobi symbols.

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut f = 17u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Primes `<= limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Prime factorization as `(p, e)` pairs with ascending `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    factorize(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Exponent of the prime `p` in `n` (`n != 0`).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer to `[0, m)`.
pub fn residue(n: i64, m: u64) -> u64 {
    n.rem_euclid(m as i64) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Multiplicative order of `a` modulo `m` (`gcd(a, m) = 1`).
pub fn mult_order(a: u64, m: u64) -> u64 {
    let phi = euler_phi(m);
    let mut order = phi;
    for (p, _) in factorize(phi) {
        while order % p == 0 && mod_pow(a, order / p, m) == 1 {
            order /= p;
        }
    }
    order
}

/// Smallest primitive root modulo an odd prime power `p^e`.
pub fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    debug_assert!(p > 2 && is_prime(p));
    let m = p.pow(e);
    let phi = euler_phi(m);
    let factors = factorize(phi);
    (2..m)
        .find(|&g| {
            g % p != 0 && factors.iter().all(|&(q, _)| mod_pow(g, phi / q, m) != 1)
        })
        .expect("odd prime powers have primitive roots")
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = residue(a, n);
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Square root of `a` modulo an odd prime `p` by Tonelli–Shanks; `None` for
/// non-residues. Returns the smaller of the two roots.
pub fn sqrt_mod_prime(a: i64, p: u64) -> Option<u64> {
    let a = residue(a, p);
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if jacobi(a as i64, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| jacobi(z as i64, p) == -1)
        .expect("a non-residue exists for odd p");
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mod_mul(t2, t2, p);
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mod_mul(b, b, p);
        t = mod_mul(t, c, p);
        r = mod_mul(r, b, p);
    }
    Some(r.min(p - r))
}

/// Chinese remaindering of `x ≡ a (mod m)` and `x ≡ b (mod n)` for coprime moduli.
pub fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    let inv = mod_inv(m % n, n).expect("moduli must be coprime");
    let k = mod_mul((b + n - a % n) % n, inv, n);
    (a as u128 + m as u128 * k as u128) as u64 % (m * n)
}
