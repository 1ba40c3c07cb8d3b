//! Small-integer number theory: factoring by trial division, square roots
//! modulo composite moduli, and sieves.

use std::collections::BTreeSet;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut p = 3u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

/// Prime factorization `[(p, e)]` in increasing order of `p`; empty for `n ≤ 1`.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
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

/// Positive divisors of `n`, unsorted.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Tonelli–Shanks for an odd prime `p` and a quadratic residue `a ≢ 0`.
fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// All `x ∈ [0, p^e)` with `x² ≡ a (mod p^e)`.
fn sqrt_mod_prime_power(a: u64, p: u64, e: u32) -> Vec<u64> {
    let pe = p.pow(e);
    let a = a % pe;
    if p != 2 && !a.is_multiple_of(p) {
        // Unique Hensel lift of each of the two roots mod p.
        let Some(r) = tonelli_shanks(a, p) else {
            return Vec::new();
        };
        let mut roots = Vec::new();
        for start in [r, p - r] {
            let mut x = start;
            let mut modulus = p;
            for _ in 1..e {
                modulus *= p;
                let fx = (mul_mod(x, x, modulus) + modulus - a % modulus) % modulus;
                let step = mul_mod(fx, inv_mod((2 * x) % modulus, modulus), modulus);
                x = (x + modulus - step) % modulus;
            }
            roots.push(x);
        }
        roots.sort_unstable();
        roots.dedup();
        return roots;
    }
    // p = 2 or p | a: lift digit by digit through every residue.
    let mut roots: Vec<u64> = (0..p).filter(|&x| (x * x) % p == a % p).collect();
    let mut modulus = p;
    for _ in 1..e {
        let next = modulus * p;
        let target = a % next;
        let mut lifted = Vec::new();
        for &r in &roots {
            for t in 0..p {
                let x = r + t * modulus;
                if mul_mod(x, x, next) == target {
                    lifted.push(x);
                }
            }
        }
        roots = lifted;
        modulus = next;
        if roots.is_empty() {
            break;
        }
    }
    roots
}

/// All `x ∈ [0, m)` with `x² ≡ a (mod m)`, sorted; CRT over the prime-power factors of `m`.
pub fn sqrt_mod(a: i64, m: u64) -> Vec<u64> {
    assert!(m >= 1);
    if m == 1 {
        return vec![0];
    }
    let a = a.rem_euclid(m as i64) as u64;
    let mut acc: Vec<u64> = vec![0];
    let mut acc_mod = 1u64;
    for (p, e) in factor(m) {
        let pe = p.pow(e);
        let local = sqrt_mod_prime_power(a, p, e);
        if local.is_empty() {
            return Vec::new();
        }
        let inv = inv_mod(acc_mod % pe, pe);
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for &x in &acc {
            for &y in &local {
                // z ≡ x (mod acc_mod), z ≡ y (mod pe)
                let k = mul_mod((y + pe - x % pe) % pe, inv, pe);
                next.push(x + acc_mod * k);
            }
        }
        acc = next;
        acc_mod *= pe;
    }
    acc.sort_unstable();
    acc
}

/// `primes[i]` is true when `i` is prime, for `i ≤ limit`.
pub fn prime_sieve(limit: usize) -> Vec<bool> {
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    if limit >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
}

/// `flags[n]` is true when `n` is squarefree, for `1 ≤ n ≤ limit` (`flags[0]` is false).
pub fn squarefree_sieve(limit: usize) -> Vec<bool> {
    let mut flags = vec![true; limit + 1];
    flags[0] = false;
    let mut k = 2usize;
    while k * k <= limit {
        let sq = k * k;
        let mut j = sq;
        while j <= limit {
            flags[j] = false;
            j += sq;
        }
        k += 1;
    }
    flags
}

/// Residues of squares modulo `m`.
pub fn squares_mod(m: u64) -> BTreeSet<u64> {
    (0..m).map(|x| mul_mod(x, x, m)).collect()
}
