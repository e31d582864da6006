//! Exact Wigner 3j symbols.
//!
//! The Racah single-sum formula is evaluated with exact integer arithmetic:
//! factorials are kept as prime-exponent vectors, the alternating series is
//! accumulated over its least common denominator with a small arbitrary-size
//! integer, and only the final assembly rounds to `f64`. The exact path
//! covers all angular momenta up to j = 60; beyond that a log-factorial
//! floating evaluation takes over.
//!
//! Values are memoized behind a canonical key derived from the Regge square,
//! so all 72 Regge symmetries (column permutations, m-negation, transpose)
//! share one cache entry.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// Angular-momentum key in doubled-integer encoding: `dj = 2j`, `dm = 2m`,
/// so half-integers are representable exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngularKey {
    pub dj1: i32,
    pub dj2: i32,
    pub dj3: i32,
    pub dm1: i32,
    pub dm2: i32,
    pub dm3: i32,
}

impl AngularKey {
    pub fn from_doubled(dj1: i32, dj2: i32, dj3: i32, dm1: i32, dm2: i32, dm3: i32) -> Self {
        AngularKey {
            dj1,
            dj2,
            dj3,
            dm1,
            dm2,
            dm3,
        }
    }

    /// Key with integer quantum numbers.
    pub fn from_ints(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> Self {
        Self::from_doubled(2 * j1, 2 * j2, 2 * j3, 2 * m1, 2 * m2, 2 * m3)
    }

    /// Doubled-integer encoding consistency: j ≥ 0, |m| ≤ j and j ± m integer.
    pub fn is_consistent(&self) -> bool {
        let ok = |dj: i32, dm: i32| dj >= 0 && dm.abs() <= dj && (dj + dm) % 2 == 0;
        ok(self.dj1, self.dm1) && ok(self.dj2, self.dm2) && ok(self.dj3, self.dm3)
    }

    pub fn triangle_ok(&self) -> bool {
        self.dj3 >= (self.dj1 - self.dj2).abs()
            && self.dj3 <= self.dj1 + self.dj2
            && (self.dj1 + self.dj2 + self.dj3) % 2 == 0
    }

    pub fn m_sum_zero(&self) -> bool {
        self.dm1 + self.dm2 + self.dm3 == 0
    }
}

/// Largest j (in doubled units) handled by the exact integer path.
const MAX_EXACT_DJ: i32 = 120;

/// Largest factorial argument reachable on the exact path: j1+j2+j3+1.
const MAX_FACT_ARG: usize = 181;

// ---------------------------------------------------------------------------
// Prime-exponent bookkeeping
// ---------------------------------------------------------------------------

struct PrimeTables {
    primes: Vec<u64>,
    /// fact_exps[n][k] = exponent of primes[k] in n!
    fact_exps: Vec<Vec<i32>>,
}

fn prime_tables() -> &'static PrimeTables {
    static TABLES: OnceLock<PrimeTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let limit = MAX_FACT_ARG;
        let mut is_prime = vec![true; limit + 1];
        is_prime[0] = false;
        if limit >= 1 {
            is_prime[1] = false;
        }
        for p in 2..=limit {
            if is_prime[p] {
                let mut q = p * p;
                while q <= limit {
                    is_prime[q] = false;
                    q += p;
                }
            }
        }
        let primes: Vec<u64> = (2..=limit)
            .filter(|&p| is_prime[p])
            .map(|p| p as u64)
            .collect();
        let np = primes.len();
        let mut fact_exps = vec![vec![0i32; np]; limit + 1];
        for n in 2..=limit {
            let prev = fact_exps[n - 1].clone();
            let row = &mut fact_exps[n];
            *row = prev;
            let mut rem = n as u64;
            for (k, &p) in primes.iter().enumerate() {
                while rem % p == 0 {
                    row[k] += 1;
                    rem /= p;
                }
                if rem == 1 {
                    break;
                }
            }
        }
        PrimeTables { primes, fact_exps }
    })
}

// ---------------------------------------------------------------------------
// Minimal unsigned big integer (little-endian u64 limbs)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct BigUint {
    limbs: Vec<u64>,
}

impl BigUint {
    fn zero() -> Self {
        BigUint { limbs: vec![] }
    }

    fn one() -> Self {
        BigUint { limbs: vec![1] }
    }

    fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    fn normalize(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    fn mul_u64(&mut self, m: u64) {
        if m == 0 {
            self.limbs.clear();
            return;
        }
        let mut carry = 0u128;
        for limb in &mut self.limbs {
            let prod = *limb as u128 * m as u128 + carry;
            *limb = prod as u64;
            carry = prod >> 64;
        }
        if carry > 0 {
            self.limbs.push(carry as u64);
        }
    }

    fn add_assign(&mut self, other: &BigUint) {
        let n = self.limbs.len().max(other.limbs.len());
        self.limbs.resize(n, 0);
        let mut carry = 0u128;
        for i in 0..n {
            let b = other.limbs.get(i).copied().unwrap_or(0);
            let sum = self.limbs[i] as u128 + b as u128 + carry;
            self.limbs[i] = sum as u64;
            carry = sum >> 64;
        }
        if carry > 0 {
            self.limbs.push(carry as u64);
        }
    }

    /// self - other, requiring self >= other.
    fn sub(&self, other: &BigUint) -> BigUint {
        debug_assert!(self.cmp_big(other) != std::cmp::Ordering::Less);
        let mut out = self.clone();
        let mut borrow = 0i128;
        for i in 0..out.limbs.len() {
            let b = other.limbs.get(i).copied().unwrap_or(0);
            let diff = out.limbs[i] as i128 - b as i128 - borrow;
            if diff < 0 {
                out.limbs[i] = (diff + (1i128 << 64)) as u64;
                borrow = 1;
            } else {
                out.limbs[i] = diff as u64;
                borrow = 0;
            }
        }
        debug_assert_eq!(borrow, 0);
        out.normalize();
        out
    }

    fn cmp_big(&self, other: &BigUint) -> std::cmp::Ordering {
        if self.limbs.len() != other.limbs.len() {
            return self.limbs.len().cmp(&other.limbs.len());
        }
        for i in (0..self.limbs.len()).rev() {
            if self.limbs[i] != other.limbs[i] {
                return self.limbs[i].cmp(&other.limbs[i]);
            }
        }
        std::cmp::Ordering::Equal
    }

    /// (mantissa, exponent) with value = mantissa · 2^exponent; mantissa uses
    /// the top 128 bits, so the conversion is exact to f64 precision.
    fn to_f64_exp(&self) -> (f64, i64) {
        if self.is_zero() {
            return (0.0, 0);
        }
        let n = self.limbs.len();
        let mut mant = self.limbs[n - 1] as f64;
        let mut exp = (n as i64 - 1) * 64;
        if n >= 2 {
            mant = mant * 18446744073709551616.0 + self.limbs[n - 2] as f64;
            exp -= 64;
        }
        if n >= 3 {
            // third limb only affects sub-ulp rounding of the mantissa pair
            mant += self.limbs[n - 3] as f64 / 18446744073709551616.0;
        }
        (mant, exp)
    }
}

/// Multiply (mant, exp) by p^k, renormalizing to keep mant in f64 range.
fn mul_pow(mant: &mut f64, exp: &mut i64, p: f64, k: i32) {
    let mut remaining = k;
    let step = (500.0 / p.log2()).floor().max(1.0) as i32;
    while remaining > 0 {
        let take = remaining.min(step);
        *mant *= p.powi(take);
        remaining -= take;
        renorm(mant, exp);
    }
    let mut remaining = -k;
    while remaining > 0 {
        let take = remaining.min(step);
        *mant /= p.powi(take);
        remaining -= take;
        renorm(mant, exp);
    }
}

fn renorm(mant: &mut f64, exp: &mut i64) {
    if *mant == 0.0 {
        return;
    }
    let e = mant.abs().log2().floor() as i64;
    if e.abs() > 200 {
        *mant = libm::ldexp(*mant, (-e) as i32);
        *exp += e;
    }
}

// ---------------------------------------------------------------------------
// Racah evaluation
// ---------------------------------------------------------------------------

/// Wigner 3j symbol without memoization. Selection-rule failures and
/// inconsistent encodings return 0.
pub fn wigner3j_uncached(key: AngularKey) -> f64 {
    if !key.is_consistent() || !key.triangle_ok() || !key.m_sum_zero() {
        return 0.0;
    }
    if key.dj1.max(key.dj2).max(key.dj3) <= MAX_EXACT_DJ {
        racah_exact(key)
    } else {
        racah_log(key)
    }
}

/// Halved value of a doubled-integer combination known to be even.
fn half(d: i32) -> i32 {
    debug_assert!(d % 2 == 0);
    d / 2
}

fn racah_exact(key: AngularKey) -> f64 {
    let tables = prime_tables();
    let np = tables.primes.len();

    let (dj1, dj2, dj3, dm1, dm2, dm3) = (key.dj1, key.dj2, key.dj3, key.dm1, key.dm2, key.dm3);

    // Factorial arguments of the square-root part (all integers here).
    let tri = [
        half(dj1 + dj2 - dj3),
        half(dj1 - dj2 + dj3),
        half(-dj1 + dj2 + dj3),
    ];
    let jm = [
        half(dj1 + dm1),
        half(dj1 - dm1),
        half(dj2 + dm2),
        half(dj2 - dm2),
        half(dj3 + dm3),
        half(dj3 - dm3),
    ];
    let jsum1 = half(dj1 + dj2 + dj3) + 1;

    // Exponent vector of the rational under the square root.
    let mut root_exps = vec![0i32; np];
    for &a in tri.iter().chain(jm.iter()) {
        for k in 0..np {
            root_exps[k] += tables.fact_exps[a as usize][k];
        }
    }
    for k in 0..np {
        root_exps[k] -= tables.fact_exps[jsum1 as usize][k];
    }

    // Series bounds.
    let t_min = 0.max(half(dj2 - dj3 - dm1)).max(half(dj1 - dj3 + dm2));
    let t_max = half(dj1 + dj2 - dj3)
        .min(half(dj1 - dm1))
        .min(half(dj2 + dm2));
    if t_min > t_max {
        return 0.0;
    }

    // Denominator factorial arguments per term.
    let denom_args = |t: i32| -> [i32; 6] {
        [
            t,
            half(dj1 + dj2 - dj3) - t,
            half(dj1 - dm1) - t,
            half(dj2 + dm2) - t,
            half(dj3 - dj2 + dm1) + t,
            half(dj3 - dj1 - dm2) + t,
        ]
    };

    // Least common denominator: per-prime max exponent over the terms.
    let mut lcm_exps = vec![0i32; np];
    let mut term_exps: Vec<Vec<i32>> = Vec::with_capacity((t_max - t_min + 1) as usize);
    for t in t_min..=t_max {
        let mut e = vec![0i32; np];
        for &a in denom_args(t).iter() {
            debug_assert!(a >= 0);
            for k in 0..np {
                e[k] += tables.fact_exps[a as usize][k];
            }
        }
        for k in 0..np {
            lcm_exps[k] = lcm_exps[k].max(e[k]);
        }
        term_exps.push(e);
    }

    // Alternating sum of exact integer numerators lcm/denom_t.
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for (i, t) in (t_min..=t_max).enumerate() {
        let mut numer = BigUint::one();
        for k in 0..np {
            let e = lcm_exps[k] - term_exps[i][k];
            for _ in 0..e {
                numer.mul_u64(tables.primes[k]);
            }
        }
        if t % 2 == 0 {
            pos.add_assign(&numer);
        } else {
            neg.add_assign(&numer);
        }
    }
    let (series_sign, series_mag) = match pos.cmp_big(&neg) {
        std::cmp::Ordering::Less => (-1.0, neg.sub(&pos)),
        std::cmp::Ordering::Equal => return 0.0,
        std::cmp::Ordering::Greater => (1.0, pos.sub(&neg)),
    };

    // Assemble sign · sqrt(root) · series / lcm in mantissa/exponent form.
    let phase = half(dj1 - dj2 - dm3);
    let prefactor_sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };

    let (mut mant, mut exp) = series_mag.to_f64_exp();
    // sqrt of the prime-power rational
    let mut rm = 1.0f64;
    let mut re = 0i64;
    for k in 0..np {
        if root_exps[k] != 0 {
            mul_pow(&mut rm, &mut re, tables.primes[k] as f64, root_exps[k]);
        }
    }
    if re % 2 != 0 {
        rm *= 2.0;
        re -= 1;
    }
    mant *= rm.sqrt();
    exp += re / 2;
    renorm(&mut mant, &mut exp);
    // divide by the lcm
    for k in 0..np {
        if lcm_exps[k] != 0 {
            mul_pow(&mut mant, &mut exp, tables.primes[k] as f64, -lcm_exps[k]);
        }
    }

    prefactor_sign * series_sign * libm::ldexp(mant, exp.clamp(-2000, 2000) as i32)
}

/// Log-factorial evaluation for angular momenta beyond the exact range.
fn racah_log(key: AngularKey) -> f64 {
    let (dj1, dj2, dj3, dm1, dm2, dm3) = (key.dj1, key.dj2, key.dj3, key.dm1, key.dm2, key.dm3);
    let lnf = |n: i32| -> f64 { libm::lgamma(n as f64 + 1.0) };

    let ln_root = 0.5
        * (lnf(half(dj1 + dj2 - dj3))
            + lnf(half(dj1 - dj2 + dj3))
            + lnf(half(-dj1 + dj2 + dj3))
            + lnf(half(dj1 + dm1))
            + lnf(half(dj1 - dm1))
            + lnf(half(dj2 + dm2))
            + lnf(half(dj2 - dm2))
            + lnf(half(dj3 + dm3))
            + lnf(half(dj3 - dm3))
            - lnf(half(dj1 + dj2 + dj3) + 1));

    let t_min = 0.max(half(dj2 - dj3 - dm1)).max(half(dj1 - dj3 + dm2));
    let t_max = half(dj1 + dj2 - dj3)
        .min(half(dj1 - dm1))
        .min(half(dj2 + dm2));
    if t_min > t_max {
        return 0.0;
    }

    let ln_term = |t: i32| -> f64 {
        -(lnf(t)
            + lnf(half(dj1 + dj2 - dj3) - t)
            + lnf(half(dj1 - dm1) - t)
            + lnf(half(dj2 + dm2) - t)
            + lnf(half(dj3 - dj2 + dm1) + t)
            + lnf(half(dj3 - dj1 - dm2) + t))
    };
    let ln_max = (t_min..=t_max)
        .map(ln_term)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for t in t_min..=t_max {
        let mag = (ln_term(t) - ln_max).exp();
        sum += if t % 2 == 0 { mag } else { -mag };
    }
    let phase = half(dj1 - dj2 - dm3);
    let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * sum * (ln_root + ln_max).exp()
}

// ---------------------------------------------------------------------------
// Regge canonicalization and memoization
// ---------------------------------------------------------------------------

/// Regge square of the symbol, in halved (integer) units.
fn regge_square(key: AngularKey) -> [[i32; 3]; 3] {
    [
        [
            half(-key.dj1 + key.dj2 + key.dj3),
            half(key.dj1 - key.dj2 + key.dj3),
            half(key.dj1 + key.dj2 - key.dj3),
        ],
        [
            half(key.dj1 - key.dm1),
            half(key.dj2 - key.dm2),
            half(key.dj3 - key.dm3),
        ],
        [
            half(key.dj1 + key.dm1),
            half(key.dj2 + key.dm2),
            half(key.dj3 + key.dm3),
        ],
    ]
}

const PERMS: [([usize; 3], bool); 6] = [
    ([0, 1, 2], false),
    ([0, 2, 1], true),
    ([1, 0, 2], true),
    ([1, 2, 0], false),
    ([2, 0, 1], false),
    ([2, 1, 0], true),
];

/// Canonical representative of the Regge square under row/column permutations
/// and transposition, together with the sign relating it to the input.
///
/// Odd row or column permutations carry the factor (-1)^{j1+j2+j3};
/// transposition carries none.
fn canonical_regge(key: AngularKey) -> ([i32; 9], f64) {
    let s = regge_square(key);
    let j_sum = half(key.dj1 + key.dj2 + key.dj3);
    let odd_sign = if j_sum % 2 == 0 { 1.0 } else { -1.0 };

    let mut best: Option<([i32; 9], f64)> = None;
    for transpose in [false, true] {
        let base = if transpose {
            [
                [s[0][0], s[1][0], s[2][0]],
                [s[0][1], s[1][1], s[2][1]],
                [s[0][2], s[1][2], s[2][2]],
            ]
        } else {
            s
        };
        for (rp, rodd) in PERMS.iter() {
            for (cp, codd) in PERMS.iter() {
                let mut flat = [0i32; 9];
                for r in 0..3 {
                    for c in 0..3 {
                        flat[3 * r + c] = base[rp[r]][cp[c]];
                    }
                }
                let sign = if *rodd != *codd { odd_sign } else { 1.0 };
                match &best {
                    Some((bf, _)) if flat >= *bf => {}
                    _ => best = Some((flat, sign)),
                }
            }
        }
    }
    best.unwrap()
}

/// Memoization table for 3j values keyed by canonical Regge square.
///
/// Concurrent reads are lock-free with respect to each other; inserts take
/// the write lock, so readers observe either an absent key or the final
/// value.
pub struct Wigner3jCache {
    map: RwLock<HashMap<[i32; 9], f64>>,
}

impl Wigner3jCache {
    pub fn new() -> Self {
        Wigner3jCache {
            map: RwLock::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: AngularKey) -> f64 {
        if !key.is_consistent() || !key.triangle_ok() || !key.m_sum_zero() {
            return 0.0;
        }
        let (canon, sign) = canonical_regge(key);
        if let Some(&v) = self.map.read().unwrap().get(&canon) {
            return sign * v;
        }
        // Compute the canonical symbol itself so the cached value is shared
        // exactly by every symmetry-related key.
        let canon_key = key_from_regge(&canon);
        let value = wigner3j_uncached(canon_key);
        self.map.write().unwrap().insert(canon, value);
        sign * value
    }
}

impl Default for Wigner3jCache {
    fn default() -> Self {
        Self::new()
    }
}

/// Reconstruct an `AngularKey` from a flattened Regge square.
fn key_from_regge(flat: &[i32; 9]) -> AngularKey {
    // Column sums give 2j_i in halved units; rows 2,3 give j∓m.
    let dj1 = flat[3] + flat[6];
    let dj2 = flat[4] + flat[7];
    let dj3 = flat[5] + flat[8];
    AngularKey {
        dj1,
        dj2,
        dj3,
        dm1: flat[6] - flat[3],
        dm2: flat[7] - flat[4],
        dm3: flat[8] - flat[5],
    }
}

fn global_cache() -> &'static Wigner3jCache {
    static CACHE: OnceLock<Wigner3jCache> = OnceLock::new();
    CACHE.get_or_init(Wigner3jCache::new)
}

/// Memoized Wigner 3j symbol.
pub fn wigner3j(key: AngularKey) -> f64 {
    global_cache().get(key)
}

/// Memoized Wigner 3j symbol with integer quantum numbers.
pub fn wigner3j_int(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    wigner3j(AngularKey::from_ints(j1, j2, j3, m1, m2, m3))
}
