mod arith;
mod hecke;
mod kloosterman;
mod tau;

pub use arith::{
    divisor_count3, divisors, factorize, gcd, is_prime, mod_inverse, moebius, primes_up_to, smallest_prime_factors,
};
pub use hecke::{integrality_witness, sym2_prime, sym2_prime_power, CoefficientTable};
pub(crate) use kloosterman::kloosterman_with_roots;
pub use kloosterman::{
    additive_character, kloosterman, kloosterman_complex, ramanujan_sum, roots_of_unity, TwistParams,
};
pub use tau::tau_table;
