//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use chanwit::channels::{action_distance, choi_of_channel, kraus_of_choi};
use chanwit::linalg::{self, cr, kron, max_abs_diff, CMatrix, CVector};
use chanwit::oracle::{self, chebyshev_check, random_unitary, OptimizerConfig};
use chanwit::schmidt::{complementary_decompose, fourier_me_basis, norm1, norm2, norm_inf};
use chanwit::witness::{
    bounds_flip, bounds_product, flip_type_observable, stationarity_certificate, unitality_test,
    verdict, white_noise_threshold, VerdictFlag,
};
use chanwit::{DensityOperator, PureState};
use common::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Maximal-value argmax residuals collected across oracle-based criteria.
#[derive(Default)]
struct Residuals(Vec<f64>);

impl Residuals {
    fn record(&mut self, l: &CMatrix, res: &oracle::OptResult) {
        let psi = PureState::from_vector(res.argmax.state_vector()).unwrap();
        self.0.push(stationarity_certificate(l, &psi).unwrap().residual);
    }
}

fn choi_round_trip() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut r = rng(1);
    for d in 2..=4 {
        for _ in 0..20 {
            let terms = r.random_range(1..=d * d);
            let ch = random_general(d, terms, &mut r);
            let back = kraus_of_choi(&choi_of_channel(&ch).unwrap()).unwrap();
            let scale = ch.terms().iter().map(|t| t.weight * t.op.norm_squared()).sum::<f64>();
            worst = worst.max(action_distance(&ch, &back).unwrap() / scale.max(1.0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-9 && secs < 10.0, format!("max action error {worst:.2e}, {secs:.2}s"))
}

fn ru_unitality() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let d = 1 + i % 4;
        let n = 1 + r.random_range(0..6);
        let (a, b) = unitality_test(&choi_of_channel(&random_ru(d, n, &mut r)).unwrap().state);
        worst = worst.max(a).max(b);
    }
    outcome(worst < 1e-12, format!("max partial-trace deviation {worst:.2e}"))
}

fn product_bounds(res_log: &mut Residuals) -> Outcome {
    let mut r = rng(3);
    let (mut me_err, mut sep_err): (f64, f64) = (0.0, 0.0);
    for d in 2..=3 {
        for i in 0..20 {
            let (a, b) = (random_psd(d, &mut r), random_psd(d, &mut r));
            let l = kron(&a, &b);
            let bounds = bounds_product(&a, &b).unwrap();
            let cfg = OptimizerConfig::with_seed(100 * d as u64 + i);
            let me = oracle::optimize_me(&l, &cfg).unwrap();
            let sep = oracle::optimize_sep(&l, &cfg).unwrap();
            res_log.record(&l, &me);
            me_err = me_err
                .max((me.best_value - bounds.gme_max).abs())
                .max((me.worst_value - bounds.gme_min).abs());
            sep_err = sep_err
                .max((sep.best_value - bounds.gs_max).abs())
                .max((sep.worst_value - bounds.gs_min).abs());
        }
    }
    outcome(
        me_err < 1e-6 && sep_err < 1e-8,
        format!("ME error {me_err:.2e}, separable error {sep_err:.2e}"),
    )
}

fn flip_bounds(res_log: &mut Residuals) -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        for i in 0..5 {
            let (a, b) = (ginibre(d, &mut r), ginibre(d, &mut r));
            let l = flip_type_observable(&a, &b).unwrap();
            let bounds = bounds_flip(&a, &b).unwrap();
            let me = oracle::optimize_me(&l, &OptimizerConfig::with_seed(200 * d as u64 + i)).unwrap();
            res_log.record(&l, &me);
            let eigs = linalg::eigvalsh(&l);
            let scale = 1.0 + bounds.g_max.abs();
            for (got, want) in [
                (eigs[eigs.len() - 1], bounds.g_max),
                (eigs[0], bounds.g_min),
                (me.best_value, bounds.gme_max),
                (me.worst_value, bounds.gme_min),
            ] {
                worst = worst.max((got - want).abs() / scale);
            }
        }
    }
    let id = linalg::identity(3);
    let b3 = bounds_flip(&id, &id).unwrap();
    let me3 = oracle::optimize_me(&linalg::flip(3), &OptimizerConfig::default()).unwrap();
    let d3 = (b3.gme_min + 1.0 / 3.0).abs().max((me3.worst_value + 1.0 / 3.0).abs());
    outcome(
        worst < 1e-6 && d3 < 1e-6,
        format!("max relative error {worst:.2e}; d=3 identity gME_min error {d3:.2e}"),
    )
}

fn rank_one_bounds(res_log: &mut Residuals) -> Outcome {
    let (mut me_err, mut sep_err): (f64, f64) = (0.0, 0.0);
    for d in 2..=4 {
        for i in 0..50u64 {
            let seed = 1000 * d as u64 + i;
            let psi = random_pure(d, seed);
            let sigma = chanwit::schmidt::schmidt_decompose(&psi).unwrap().sigma;
            let l = psi.projector();
            let cfg = OptimizerConfig { seed, restarts: 8, ..OptimizerConfig::default() };
            let me = oracle::optimize_me(&l, &cfg).unwrap();
            let sep = oracle::optimize_sep(&l, &cfg).unwrap();
            res_log.record(&l, &me);
            me_err = me_err.max((me.best_value - norm1(&sigma).powi(2) / d as f64).abs());
            sep_err = sep_err.max((sep.best_value - norm_inf(&sigma).powi(2)).abs());
        }
    }
    outcome(
        me_err < 1e-6 && sep_err < 1e-8,
        format!("ME max error {me_err:.2e}, separable max error {sep_err:.2e}"),
    )
}

fn white_noise() -> Outcome {
    let v = CVector::from_vec(vec![cr(0.8f64.sqrt()), cr(0.0), cr(0.0), cr(0.2f64.sqrt())]);
    let psi = PureState::from_vector(v).unwrap();
    let p = white_noise_threshold(&psi).unwrap();
    let bounds = chanwit::witness::bounds_rank_one(&psi, &OptimizerConfig::default()).unwrap();
    let l = psi.projector();
    let above = verdict(&l, &DensityOperator::with_white_noise(&psi, p + 0.01).unwrap(), &bounds).unwrap();
    let below = verdict(&l, &DensityOperator::with_white_noise(&psi, p - 0.01).unwrap(), &bounds).unwrap();
    let ok = (p - 13.0 / 15.0).abs() < 1e-12
        && above.has(VerdictFlag::NotMeMixture)
        && above.has(VerdictFlag::Entangled)
        && below.flags.len() <= 1;
    outcome(
        ok,
        format!("p* = {p:.12}, flags above {:?}, below {:?}", above.flags, below.flags),
    )
}

fn complementary_schmidt() -> Outcome {
    let mut r = rng(7);
    let (mut rec, mut n2, mut ninf, mut n1): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut first_n1_failure = None;
    for d in 1..=8 {
        for i in 0..100u64 {
            let sigma = random_sigma(d, &mut r);
            let ua = random_unitary(d, r.random());
            let ub = random_unitary(d, r.random());
            let mut v = CVector::zeros(d * d);
            for (n, s) in sigma.iter().enumerate() {
                v += linalg::kron_vec(&ua.column(n).into_owned(), &ub.column(n).into_owned()) * cr(*s);
            }
            let psi = PureState::from_vector(v).unwrap();
            let c = complementary_decompose(&psi).unwrap();
            rec = rec.max(linalg::max_abs_diff_vec(&c.reconstruct(), psi.amplitudes()));
            let sd = (d as f64).sqrt();
            n2 = n2.max((norm2(&c.tau) - norm2(&c.sigma)).abs());
            ninf = ninf.max((norm_inf(&c.tau) - norm1(&c.sigma) / sd).abs());
            let e1 = (norm1(&c.tau) - sd * norm_inf(&c.sigma)).abs();
            if e1 >= 1e-12 && first_n1_failure.is_none() {
                first_n1_failure = Some((d, i, norm1(&c.tau), sd * norm_inf(&c.sigma)));
            }
            n1 = n1.max(e1);
        }
    }
    let mut detail = format!(
        "reconstruction {rec:.2e}; |tau|_2 vs |sigma|_2 {n2:.2e}; |tau|_inf vs |sigma|_1/sqrt(d) {ninf:.2e}; \
         |tau|_1 vs sqrt(d)|sigma|_inf {n1:.2e}"
    );
    if let Some((d, i, lhs, rhs)) = first_n1_failure {
        detail += &format!(" (first violation d={d} sample {i}: {lhs:.6} vs {rhs:.6})");
    }
    outcome(rec < 1e-12 && n2 < 1e-12 && ninf < 1e-12 && n1 < 1e-12, detail)
}

fn fourier_basis() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 1..=5 {
        let basis = fourier_me_basis(d);
        let n = d * d;
        let gram = CMatrix::from_fn(n, n, |i, j| basis[i].dotc(&basis[j]));
        worst = worst.max(max_abs_diff(&gram, &linalg::identity(n)));
        let sum = basis.iter().fold(CMatrix::zeros(n, n), |acc, v| acc + linalg::outer(v, v));
        worst = worst.max(max_abs_diff(&sum, &linalg::identity(n)));
    }
    let s = FRAC_1_SQRT_2;
    let bell = [
        [s, 0.0, 0.0, s],
        [0.0, s, s, 0.0],
        [s, 0.0, 0.0, -s],
        [0.0, s, -s, 0.0],
    ];
    let basis = fourier_me_basis(2);
    let mut bell_err: f64 = 0.0;
    for (k, b) in bell.iter().enumerate() {
        let bv = CVector::from_iterator(4, b.iter().map(|&x| cr(x)));
        bell_err = bell_err.max((bv.dotc(&basis[k]).norm() - 1.0).abs());
    }
    outcome(
        worst < 1e-12 && bell_err < 1e-12,
        format!("orthonormality/completeness {worst:.2e}, d=2 Bell overlap error {bell_err:.2e}"),
    )
}

fn chebyshev() -> Outcome {
    let mut r = rng(9);
    let mut violations = 0usize;
    let mut identity_err: f64 = 0.0;
    for d in 2..=6 {
        for i in 0..1000u64 {
            let mut a: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
            let mut b: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            let u = random_unitary(d, 50_000 * d as u64 + i);
            let check = chebyshev_check(&a, &b, &u).unwrap();
            violations += usize::from(!check.holds) + usize::from(!check.lower_holds);
            let at_id = chebyshev_check(&a, &b, &linalg::identity(d)).unwrap();
            identity_err = identity_err.max((at_id.lhs - at_id.rhs).abs());
        }
    }
    outcome(
        violations == 0 && identity_err < 1e-12,
        format!("{violations} violations in 5000 unitaries, equality error at U=I {identity_err:.2e}"),
    )
}

fn stationarity(res_log: &Residuals) -> Outcome {
    let argmax_worst = res_log.0.iter().copied().fold(0.0, f64::max);
    let mut r = rng(10);
    let d = 3;
    let l = random_hermitian(d * d, &mut r);
    let mut random: Vec<f64> = (0..100u64)
        .map(|i| {
            let psi = PureState::from_vector(oracle::me_state(&random_unitary(d, 77_000 + i))).unwrap();
            stationarity_certificate(&l, &psi).unwrap().residual
        })
        .collect();
    random.sort_by(f64::total_cmp);
    let median = 0.5 * (random[49] + random[50]);
    outcome(
        argmax_worst < 1e-6 && median > 1e-3,
        format!(
            "max argmax residual {argmax_worst:.2e} over {} runs, random ME median residual {median:.2e}",
            res_log.0.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut residuals = Residuals::default();
    let results = vec![
        ("1 Choi round trip", choi_round_trip()),
        ("2 RU unitality", ru_unitality()),
        ("3 product bounds", product_bounds(&mut residuals)),
        ("4 flip bounds", flip_bounds(&mut residuals)),
        ("5 rank-one bounds", rank_one_bounds(&mut residuals)),
        ("6 white-noise threshold", white_noise()),
        ("7 complementary Schmidt", complementary_schmidt()),
        ("8 Fourier ME basis", fourier_basis()),
        ("9 generalized Chebyshev", chebyshev()),
    ];
    let s10 = stationarity(&residuals);
    let mut failed = 0;
    for (name, o) in results.iter().chain(std::iter::once(&("10 stationarity", s10))) {
        println!("{} [{name}] {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    let secs = start.elapsed().as_secs_f64();
    println!("acceptance: {} of 10 criteria passed in {secs:.1}s", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
