//! Finite ensembles of parallel universes.
//!
//! An ensemble starts as `M` identical universes. Each step splits every class
//! of identical histories exactly in the proportions of a kernel, so class
//! structure only ever refines and the Shannon entropy of the class
//! distribution never decreases.
//!
//! Sampling draws single-observer histories from a seeded ChaCha8 generator.
//! Draws are cut into fixed-size shards, shard `s` using stream `s` of the
//! seed, so parallel and sequential runs produce identical counts.

use std::collections::BTreeMap;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{Kernel, OutcomeLabel};

/// Draws per sampling shard.
pub const SHARD_DRAWS: u64 = 1 << 16;

/// One outcome label per completed step.
pub type History = Vec<OutcomeLabel>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ensemble {
    classes: BTreeMap<History, u64>,
    size: u64,
    steps: usize,
}

impl Ensemble {
    /// `m` universes with empty histories.
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "ensemble size must be at least 1".into(),
            ));
        }
        Ok(Ensemble {
            classes: BTreeMap::from([(Vec::new(), m)]),
            size: m,
            steps: 0,
        })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &BTreeMap<History, u64> {
        &self.classes
    }

    /// Splits every class exactly in kernel proportions.
    pub fn step(&self, kernel: &Kernel) -> Result<Ensemble> {
        let total = kernel_total_u64(kernel)?;
        let mut classes = BTreeMap::new();
        for (history, &size) in &self.classes {
            if size % total != 0 {
                return Err(self.indivisible(history, size, total));
            }
            let unit = size / total;
            for (label, count) in kernel.counts() {
                let count = u64::try_from(count).expect("count at most total");
                let mut h = history.clone();
                h.push(label.clone());
                classes.insert(h, unit * count);
            }
        }
        Ok(Ensemble {
            classes,
            size: self.size,
            steps: self.steps + 1,
        })
    }

    fn indivisible(&self, history: &History, size: u64, total: u64) -> Error {
        let g = self.classes.values().fold(0u64, |acc, &s| acc.gcd(&s));
        let factor = BigUint::from(total / total.gcd(&g));
        let class = if history.is_empty() {
            "<initial>".to_string()
        } else {
            history
                .iter()
                .map(OutcomeLabel::to_wire)
                .collect::<Vec<_>>()
                .join("/")
        };
        Error::IndivisibleEnsemble {
            class,
            size,
            total: total.to_string(),
            suggested: (BigUint::from(self.size) * factor).to_string(),
        }
    }

    /// Every universe independently draws its next outcome.
    pub fn step_stochastic<R: Rng + ?Sized>(
        &self,
        kernel: &Kernel,
        rng: &mut R,
    ) -> Result<Ensemble> {
        let sampler = Sampler::new(kernel);
        let mut classes = BTreeMap::new();
        for (history, &size) in &self.classes {
            for _ in 0..size {
                let label = sampler.draw(rng);
                let mut h = history.clone();
                h.push(label.clone());
                *classes.entry(h).or_insert(0) += 1;
            }
        }
        Ok(Ensemble {
            classes,
            size: self.size,
            steps: self.steps + 1,
        })
    }

    /// Shannon entropy of the class distribution, in bits.
    pub fn history_entropy(&self) -> f64 {
        shannon_entropy_bits(self.classes.values().copied())
    }

    /// Class sizes keyed by the concatenated history label, for comparison
    /// with tensor powers of the step kernel.
    pub fn as_kernel(&self) -> Result<Kernel> {
        if self.steps == 0 {
            return Err(Error::InvalidArgument("ensemble has no history yet".into()));
        }
        Kernel::from_counts(self.classes.iter().map(|(h, &n)| {
            let label = h[1..].iter().fold(h[0].clone(), |acc, l| acc.concat(l));
            (label, BigUint::from(n))
        }))
    }
}

fn kernel_total_u64(kernel: &Kernel) -> Result<u64> {
    u64::try_from(kernel.total()).map_err(|_| {
        Error::InvalidArgument(format!("kernel total {} exceeds 64 bits", kernel.total()))
    })
}

/// −Σ (nᵢ/M) log₂(nᵢ/M) over nonzero class sizes.
pub fn shannon_entropy_bits(sizes: impl IntoIterator<Item = u64>) -> f64 {
    let sizes: Vec<u64> = sizes.into_iter().filter(|&n| n > 0).collect();
    let m: u64 = sizes.iter().sum();
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    let h: f64 = sizes
        .iter()
        .map(|&n| {
            let p = n as f64 / m;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Draws kernel outcomes with probability count/total.
struct Sampler<'a> {
    labels: Vec<&'a OutcomeLabel>,
    cumulative: Vec<BigUint>,
    small: Option<(Vec<u64>, u64)>,
    total: BigUint,
}

impl<'a> Sampler<'a> {
    fn new(kernel: &'a Kernel) -> Self {
        let mut acc = BigUint::default();
        let mut labels = Vec::with_capacity(kernel.len());
        let mut cumulative = Vec::with_capacity(kernel.len());
        for (l, c) in kernel.counts() {
            acc += c;
            labels.push(l);
            cumulative.push(acc.clone());
        }
        let small = u64::try_from(kernel.total()).ok().map(|t| {
            let cum = cumulative
                .iter()
                .map(|c| u64::try_from(c).expect("below total"))
                .collect();
            (cum, t)
        });
        Sampler {
            labels,
            cumulative,
            small,
            total: kernel.total().clone(),
        }
    }

    fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.small {
            Some((cum, total)) => {
                let u = rng.gen_range(0..*total);
                cum.partition_point(|&c| c <= u)
            }
            None => {
                let u = rng.gen_biguint_below(&self.total);
                self.cumulative.partition_point(|c| c <= &u)
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &'a OutcomeLabel {
        self.labels[self.draw_index(rng)]
    }
}

/// Empirical outcome counts from `n` seeded draws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub n: u64,
    pub seed: u64,
    /// Every kernel outcome, including those never drawn.
    pub counts: BTreeMap<OutcomeLabel, u64>,
}

impl SampleReport {
    pub fn frequency(&self, label: &OutcomeLabel) -> f64 {
        self.counts.get(label).copied().unwrap_or(0) as f64 / self.n as f64
    }

    /// Largest |frequency − exact probability| over the kernel's outcomes.
    pub fn max_deviation(&self, kernel: &Kernel) -> f64 {
        kernel
            .distribution()
            .iter()
            .map(|(l, p)| (self.frequency(l) - p.to_f64()).abs())
            .fold(0.0, f64::max)
    }
}

fn shard_counts(sampler: &Sampler<'_>, seed: u64, shard: u64, draws: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    let mut counts = vec![0u64; sampler.labels.len()];
    for _ in 0..draws {
        counts[sampler.draw_index(&mut rng)] += 1;
    }
    counts
}

fn sample_with(kernel: &Kernel, n: u64, seed: u64, parallel: bool) -> Result<SampleReport> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample size must be at least 1".into(),
        ));
    }
    let sampler = Sampler::new(kernel);
    let shards = n.div_ceil(SHARD_DRAWS);
    let draws = |s: u64| SHARD_DRAWS.min(n - s * SHARD_DRAWS);
    let per_shard: Vec<Vec<u64>> = if parallel {
        (0..shards)
            .into_par_iter()
            .map(|s| shard_counts(&sampler, seed, s, draws(s)))
            .collect()
    } else {
        (0..shards)
            .map(|s| shard_counts(&sampler, seed, s, draws(s)))
            .collect()
    };
    let mut totals = vec![0u64; sampler.labels.len()];
    for shard in per_shard {
        for (t, c) in totals.iter_mut().zip(shard) {
            *t += c;
        }
    }
    let counts = sampler
        .labels
        .iter()
        .map(|l| (*l).clone())
        .zip(totals)
        .collect();
    Ok(SampleReport { n, seed, counts })
}

/// `n` independent draws from `kernel`, reproducible for a given seed.
pub fn sample_frequencies(kernel: &Kernel, n: u64, seed: u64) -> Result<SampleReport> {
    sample_with(kernel, n, seed, true)
}

/// Single-threaded reference for [`sample_frequencies`]; same output.
pub fn sample_frequencies_sequential(kernel: &Kernel, n: u64, seed: u64) -> Result<SampleReport> {
    sample_with(kernel, n, seed, false)
}

/// Entropy after each of `steps` deterministic steps, starting with step 0.
pub fn arrow_of_time(kernel: &Kernel, m: u64, steps: usize) -> Result<Vec<ArrowRow>> {
    let mut ens = Ensemble::new(m)?;
    let mut rows = vec![ArrowRow::of(&ens)];
    for _ in 0..steps {
        ens = ens.step(kernel)?;
        rows.push(ArrowRow::of(&ens));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowRow {
    pub step: usize,
    pub entropy_bits: f64,
    pub num_classes: usize,
}

impl ArrowRow {
    fn of(ens: &Ensemble) -> Self {
        ArrowRow {
            step: ens.steps(),
            entropy_bits: ens.history_entropy(),
            num_classes: ens.num_classes(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_ab() -> Kernel {
        Kernel::from_pairs([("Au.Bu", 3), ("Au.Bd", 1), ("Ad.Bu", 1), ("Ad.Bd", 3)]).unwrap()
    }

    fn sizes(e: &Ensemble) -> Vec<u64> {
        e.classes().values().copied().collect()
    }

    #[test]
    fn init_examples() {
        for m in [8, 1, 1024] {
            let e = Ensemble::new(m).unwrap();
            assert_eq!(e.size(), m);
            assert_eq!(e.num_classes(), 1);
            assert_eq!(e.history_entropy(), 0.0);
        }
        assert!(Ensemble::new(0).is_err());
    }

    #[test]
    fn step_examples() {
        let e = Ensemble::new(8).unwrap().step(&k_ab()).unwrap();
        // classes in label order: AdBd, AdBu, AuBd, AuBu
        assert_eq!(sizes(&e), [3, 1, 1, 3]);

        let e = Ensemble::new(64)
            .unwrap()
            .step(&k_ab())
            .unwrap()
            .step(&k_ab())
            .unwrap();
        assert_eq!(sizes(&e), [9, 3, 3, 9, 3, 1, 1, 3, 3, 1, 1, 3, 9, 3, 3, 9]);
        assert!(e.classes().keys().all(|h| h.len() == 2));
        assert_eq!(e.as_kernel().unwrap(), k_ab().tensor(&k_ab()));

        let certain = Kernel::from_pairs([("X", 1)]).unwrap();
        let e = Ensemble::new(5).unwrap().step(&certain).unwrap();
        assert_eq!(sizes(&e), [5]);
        assert_eq!(e.history_entropy(), 0.0);
    }

    #[test]
    fn indivisible_class_reports_least_size() {
        let err = Ensemble::new(12).unwrap().step(&k_ab()).unwrap_err();
        match err {
            Error::IndivisibleEnsemble {
                size, suggested, ..
            } => {
                assert_eq!(size, 12);
                assert_eq!(suggested, "24");
            }
            e => panic!("unexpected {e:?}"),
        }
        let once = Ensemble::new(8).unwrap().step(&k_ab()).unwrap();
        match once.step(&k_ab()).unwrap_err() {
            Error::IndivisibleEnsemble { suggested, .. } => assert_eq!(suggested, "64"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn entropy_examples() {
        let e = Ensemble::new(8).unwrap().step(&k_ab()).unwrap();
        // closed form: H = 3 - (3/4) log2 3
        let h = 3.0 - 0.75 * 3f64.log2();
        assert!((e.history_entropy() - h).abs() < 1e-12);
        assert!((e.history_entropy() - 1.8113).abs() < 1e-4);
        let coin = Kernel::from_pairs([("H", 1), ("T", 1)]).unwrap();
        assert_eq!(
            Ensemble::new(8)
                .unwrap()
                .step(&coin)
                .unwrap()
                .history_entropy(),
            1.0
        );
    }

    #[test]
    fn sampling_is_reproducible_and_shard_independent() {
        let a = sample_frequencies(&k_ab(), 200_000, 7).unwrap();
        let b = sample_frequencies(&k_ab(), 200_000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a,
            sample_frequencies_sequential(&k_ab(), 200_000, 7).unwrap()
        );
        assert_eq!(a.counts.values().sum::<u64>(), 200_000);
        assert_ne!(a, sample_frequencies(&k_ab(), 200_000, 8).unwrap());
    }

    #[test]
    fn certain_outcome_has_frequency_one() {
        let k = Kernel::from_pairs([("X", 1)]).unwrap();
        let s = sample_frequencies(&k, 1234, 1).unwrap();
        assert_eq!(s.frequency(&"X".parse().unwrap()), 1.0);
        assert!(sample_frequencies(&k, 0, 1).is_err());
    }

    #[test]
    fn huge_totals_sample_through_bigints() {
        let mut big = BigUint::from(1u32);
        for _ in 0..2 {
            big *= BigUint::from(u64::MAX);
        }
        let k = Kernel::from_counts([
            ("a".parse().unwrap(), big.clone()),
            ("b".parse().unwrap(), big + 1u32),
        ])
        .unwrap();
        assert!(u64::try_from(k.total()).is_err());
        let s = sample_frequencies(&k, 20_000, 3).unwrap();
        assert!(s.max_deviation(&k) < 0.02);
    }

    #[test]
    fn stochastic_step_conserves_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = Ensemble::new(100)
            .unwrap()
            .step_stochastic(&k_ab(), &mut rng)
            .unwrap();
        assert_eq!(e.classes().values().sum::<u64>(), 100);
        assert_eq!(e.steps(), 1);
    }

    #[test]
    fn arrow_rows() {
        let rows = arrow_of_time(&k_ab(), 1024, 3).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].entropy_bits, 0.0);
        assert_eq!(rows[3].num_classes, 64);
    }
}
