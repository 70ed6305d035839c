#![allow(dead_code)]

use chanwit::channels::{make_rp, make_ru, KrausChannel, KrausTerm};
use chanwit::linalg::{c, CMatrix, CVector};
use chanwit::oracle::{random_unitary, random_vector};
use chanwit::{ChannelTag, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = ginibre(d, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

pub fn random_psd(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = ginibre(d, rng);
    &g * g.adjoint()
}

pub fn random_probabilities(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Unit, non-negative, descending Schmidt vector.
pub fn random_sigma(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut s: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
    let n = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    s.iter_mut().for_each(|x| *x /= n);
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn random_pure(d: usize, seed: u64) -> PureState {
    PureState::from_vector(random_vector(d * d, seed)).unwrap()
}

pub fn random_ru(d: usize, terms: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    let probs = random_probabilities(terms, rng);
    let us = (0..terms).map(|_| random_unitary(d, rng.random())).collect();
    make_ru(&probs, us).unwrap()
}

pub fn random_rp(d: usize, terms: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    let probs = random_probabilities(terms, rng);
    let pairs: Vec<(CVector, CVector)> = (0..terms)
        .map(|_| (random_vector(d, rng.random()), random_vector(d, rng.random())))
        .collect();
    make_rp(&probs, &pairs).unwrap()
}

pub fn random_general(d: usize, terms: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    let terms = (0..terms)
        .map(|_| KrausTerm {
            weight: rng.random_range(0.1..1.0),
            op: ginibre(d, rng),
        })
        .collect();
    KrausChannel::new(d, terms, ChannelTag::General).unwrap()
}
