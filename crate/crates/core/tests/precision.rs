use proptest::prelude::*;
use voronoi_core::precision::{
    bit_identical, digamma, gamma::bernoulli_even, log_gamma, Context, ExtComplex, ExtReal, TestFunction,
};

const EULER: &str = "0.577215664901532860606512090082402431042159335939923598805767";

fn c(ctx: &Context, re: &str, im: &str) -> ExtComplex {
    ExtComplex::new(ctx.parse(re).unwrap(), ctx.parse(im).unwrap())
}

fn rel(a: &ExtComplex, b: &ExtComplex, ctx: &Context) -> f64 {
    let d = (a - b).abs(ctx);
    let m = b.abs(ctx);
    if m.is_zero() {
        d.to_f64()
    } else {
        (d / m).to_f64()
    }
}

#[test]
fn bernoulli_small() {
    let b = bernoulli_even(6);
    let want = ["1/6", "-1/30", "1/42", "-1/30", "5/66", "-691/2730"];
    for (v, w) in b.iter().zip(want) {
        assert_eq!(v.to_string(), w);
    }
}

#[test]
fn log_gamma_trivial_points() {
    let ctx = Context::new(160).unwrap();
    let one = ExtComplex::one(&ctx);
    let v = log_gamma(&one, &ctx).unwrap();
    assert!(v.re.abs().log2_abs() < -150.0 && v.im.is_zero() || v.im.abs().log2_abs() < -150.0);

    let half = ExtComplex::from_real(ctx.ratio(1, 2), &ctx);
    let v = log_gamma(&half, &ctx).unwrap();
    let want = ctx.pi().ln(&ctx).ldexp(-1);
    assert!(((&v.re - &want).abs().log2_abs()) < -150.0);
}

#[test]
fn log_gamma_matches_reference_digits() {
    let ctx = Context::new(192).unwrap();
    let cases = [
        (
            ("3", "4"),
            (
                "-1.75662678460378411053060418162327578515670660706134450161976",
                "4.74266443803465792819488940755002274088830335171164611359052",
            ),
        ),
        (
            ("-2.5", "0.75"),
            (
                "-1.63622708390979734520078082765744653420225275194440002986444",
                "-8.58993329840503094407474381183657103748539273142011309814064",
            ),
        ),
        (
            ("0.1", "-30"),
            (
                "-47.5654235556991727128749249796300226485233862918413694062563",
                "-71.4063250634621394344045083842451185706612375477160522666423",
            ),
        ),
    ];
    for ((zr, zi), (wr, wi)) in cases {
        let z = c(&ctx, zr, zi);
        let w = c(&ctx, wr, wi);
        let v = log_gamma(&z, &ctx).unwrap();
        let e = rel(&v, &w, &ctx);
        assert!(e < 1e-55, "z = {zr}+{zi}i: {v:?} rel {e:e}");
    }
}

#[test]
fn log_gamma_duplication_at_3_plus_4i() {
    let ctx = Context::new(160).unwrap();
    let z = c(&ctx, "3", "4");
    let z2 = z.mul_i64(2);
    let lhs = log_gamma(&z2, &ctx).unwrap();
    let ln2 = ctx.ln2();
    let half = ctx.ratio(1, 2);
    let rhs = &(&z2.add_real(&-&half).scale(&ln2) + &log_gamma(&z, &ctx).unwrap())
        + &log_gamma(&z.add_real(&half), &ctx).unwrap();
    let rhs = rhs.add_real(&-(ctx.pi().ldexp(1).ln(&ctx).ldexp(-1)));
    assert!(rel(&lhs, &rhs, &ctx) < 1e-44);
}

#[test]
fn poles_are_signalled() {
    let ctx = Context::new(128).unwrap();
    for k in [0, -1, -7] {
        let z = ExtComplex::from_real(ctx.int(k), &ctx);
        assert!(log_gamma(&z, &ctx).is_err());
        assert!(digamma(&z, &ctx).is_err());
    }
}

#[test]
fn digamma_special_values() {
    let ctx = Context::new(192).unwrap();
    let gamma = ctx.parse(EULER).unwrap();
    let tol = -185.0;
    let psi1 = digamma(&ExtComplex::one(&ctx), &ctx).unwrap();
    assert!((&psi1.re + &gamma).abs().log2_abs() < tol);
    let psi2 = digamma(&ExtComplex::from_real(ctx.int(2), &ctx), &ctx).unwrap();
    assert!((&psi2.re - &(ctx.one() - &gamma)).abs().log2_abs() < tol);
    let psih = digamma(&ExtComplex::from_real(ctx.ratio(1, 2), &ctx), &ctx).unwrap();
    let want = -(&gamma + &ctx.ln2().ldexp(1));
    assert!((&psih.re - &want).abs().log2_abs() < tol);
    assert!((&ctx.euler_gamma() - &gamma).abs().log2_abs() < tol);

    let z = c(&ctx, "0.3", "2");
    let w = c(
        &ctx,
        "0.687523593749103971649752998902713145225724309214619879417318",
        "1.67273021105662863841265724958663144835259618372502207026887",
    );
    assert!(rel(&digamma(&z, &ctx).unwrap(), &w, &ctx) < 1e-55);
}

#[test]
fn mellin_examples() {
    let ctx = Context::new(160).unwrap();
    let sqrt_pi = ctx.pi().sqrt(&ctx);
    let f = TestFunction::new(0, sqrt_pi.clone()).unwrap();
    let v = f.mellin(&ExtComplex::from_real(ctx.int(2), &ctx), &ctx).unwrap();
    assert!((&v.re - &ctx.ratio(1, 2)).abs().log2_abs() < -150.0);

    let f = TestFunction::new(0, ctx.one()).unwrap();
    let v = f.mellin(&ExtComplex::one(&ctx), &ctx).unwrap();
    assert!((&v.re - &ctx.ratio(1, 2)).abs().log2_abs() < -150.0);

    // ½ π^{-3/2} Γ(3/2) = 1/(4π)
    let f = TestFunction::new(2, ctx.one()).unwrap();
    let v = f.mellin(&ExtComplex::one(&ctx), &ctx).unwrap();
    let want = (ctx.pi().mul_i64(4)).recip();
    assert!((&v.re - &want).abs().log2_abs() < -150.0);

    let s = ExtComplex::from_real(ctx.int(-4), &ctx);
    assert!(f.mellin(&s, &ctx).is_err());
}

#[test]
fn eval_examples() {
    let ctx = Context::new(160).unwrap();
    let e_pi = (-ctx.pi()).exp(&ctx);
    let f = TestFunction::new(0, ctx.one()).unwrap();
    assert!((f.eval(&ctx.one(), &ctx) - &e_pi).abs().log2_abs() < -155.0);
    let v = f.eval(&ctx.int(5), &ctx);
    let want = (-(ctx.pi().mul_i64(25))).exp(&ctx);
    assert!(((&v - &want) / &want).abs().log2_abs() < -150.0);
    let f = TestFunction::new(2, ctx.int(2)).unwrap();
    let v = f.eval(&ctx.int(2), &ctx);
    assert!((&v - &e_pi.mul_i64(4)).abs().log2_abs() < -150.0);
    assert!(TestFunction::new(3, ctx.one()).is_err());
    assert!(TestFunction::new(2, ctx.zero()).is_err());
}

#[test]
fn peak_normalization() {
    let ctx = Context::new(128).unwrap();
    let f = TestFunction::peak_normalized(12, ctx.int(8), &ctx).unwrap();
    let x0 = f.peak_location(&ctx);
    assert!((f.eval(&x0, &ctx) - ctx.one()).abs().log2_abs() < -120.0);
    let eps = ctx.ratio(1, 1000);
    assert!(f.eval(&(&x0 + &eps), &ctx) < ctx.one());
    assert!(f.eval(&(&x0 - &eps), &ctx) < ctx.one());
}

/// Mellin integral by tanh-sinh-free trapezoid in u = ln x, which is
/// spectrally accurate for these integrands.
fn mellin_by_quadrature(f: &TestFunction, s: &ExtComplex, ctx: &Context) -> ExtComplex {
    let h = ctx.ratio(1, 32);
    let mut acc = ExtComplex::zero(ctx);
    for k in -1600i64..=400 {
        let u = h.mul_i64(k);
        let x = u.exp(ctx);
        let fx = f.eval(&x, ctx);
        // x^s = e^{s u}
        let xs = s.scale(&u).exp(ctx);
        acc = &acc + &xs.scale(&fx);
    }
    acc.scale(&h)
}

#[test]
fn mellin_matches_quadrature() {
    let ctx = Context::new(128).unwrap();
    let mut seed = 7u64;
    let mut next = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    for i in 0..20 {
        let m = [0u32, 2, 4][i % 3];
        let f = TestFunction::new(m, ctx.from_f64(0.5 + 2.0 * next())).unwrap();
        let s = ExtComplex::from_f64(1.0 + 2.0 * next(), 4.0 * next() - 2.0, &ctx);
        let a = f.mellin(&s, &ctx).unwrap();
        let b = mellin_by_quadrature(&f, &s, &ctx);
        assert!(rel(&a, &b, &ctx) < 1e-20, "point {i}: {a:?} vs {b:?}");
    }
}

fn rand_z(re: f64, im: f64, ctx: &Context) -> ExtComplex {
    ExtComplex::from_f64(re, im, ctx)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflection(re in -6.0f64..6.0, im in prop_oneof![-8.0f64..-0.05, 0.05f64..8.0]) {
        let ctx = Context::new(160).unwrap();
        let z = rand_z(re, im, &ctx);
        let one_minus = &ExtComplex::one(&ctx) - &z;
        let g = (&log_gamma(&z, &ctx).unwrap() + &log_gamma(&one_minus, &ctx).unwrap()).exp(&ctx);
        // sin(πz) = sin(πa)cosh(πb) + i cos(πa)sinh(πb)
        let pa = &z.re * &ctx.pi();
        let pb = &z.im * &ctx.pi();
        let eb = pb.exp(&ctx);
        let ebi = eb.recip();
        let cosh = (&eb + &ebi).ldexp(-1);
        let sinh = (&eb - &ebi).ldexp(-1);
        let sin = ExtComplex::new(pa.sin(&ctx) * cosh, pa.cos(&ctx) * sinh);
        let prod = (&g * &sin).scale(&ctx.pi().recip());
        let err = (&prod - &ExtComplex::one(&ctx)).abs(&ctx).to_f64();
        prop_assert!(err < 1e-40, "z={re}+{im}i err={err:e}");
    }

    #[test]
    fn recurrence(re in -20.0f64..20.0, im in prop_oneof![-30.0f64..-0.01, 0.01f64..30.0]) {
        let ctx = Context::new(160).unwrap();
        let z = rand_z(re, im, &ctx);
        let z1 = z.add_real(&ctx.one());
        let q = (&log_gamma(&z1, &ctx).unwrap() - &log_gamma(&z, &ctx).unwrap()).exp(&ctx);
        prop_assert!(rel(&q, &z, &ctx) < 1e-40);
        // principal branch: imaginary parts differ by arg z exactly
        let d = &log_gamma(&z1, &ctx).unwrap() - &log_gamma(&z, &ctx).unwrap();
        let a = z.arg(&ctx);
        prop_assert!((&d.im - &a).abs().to_f64() < 1e-40);
    }

    #[test]
    fn deterministic(re in -5.0f64..5.0, im in 0.1f64..5.0) {
        let ctx = Context::new(160).unwrap();
        let z = rand_z(re, im, &ctx);
        let a = log_gamma(&z, &ctx).unwrap();
        let b = log_gamma(&z, &Context::new(160).unwrap()).unwrap();
        prop_assert!(bit_identical(&a.re, &b.re) && bit_identical(&a.im, &b.im));
    }

    #[test]
    fn decimal_round_trip(v in -1e30f64..1e30) {
        let ctx = Context::new(160).unwrap();
        let x = ctx.from_f64(v) / ctx.int(3);
        let s = x.to_decimal(&ctx);
        let y: ExtReal = ctx.parse(&s).unwrap();
        prop_assert!(x == y || ((&x - &y) / &x).abs().log2_abs() < -155.0);
    }
}
