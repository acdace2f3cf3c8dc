//! Singlet-pair spin measurements computed by sequential collapse.
//!
//! Alice and Bob each measure one electron of a singlet pair with spin
//! filters at integer angles. Whoever measures first finds Up or Down with
//! probability 1/2; the partner electron is then collapsed to the opposite
//! direction and the second measurement finds Up with probability
//! cos²((collapsed − filter)/2). The joint distribution comes out the same in
//! either order even though the in-flight spin differs.
//!
//! Outcome tokens are filter-relative: `Au` means Alice found spin along her
//! filter, `Ad` along the reversed filter; likewise `Bu`/`Bd` for Bob.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::{Kernel, OutcomeLabel};
use crate::rational::{
    half_angle_cos2_exact, half_angle_cos2_f64, is_exact_half_angle, rational_approx, AngleDeg,
    Rational,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn suffix(self) -> char {
        match self {
            Spin::Up => 'u',
            Spin::Down => 'd',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn initial(self) -> char {
        match self {
            Party::Alice => 'A',
            Party::Bob => 'B',
        }
    }

    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "Alice",
            Party::Bob => "Bob",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasurementOrder {
    AliceFirst,
    BobFirst,
}

impl MeasurementOrder {
    pub fn first(self) -> Party {
        match self {
            MeasurementOrder::AliceFirst => Party::Alice,
            MeasurementOrder::BobFirst => Party::Bob,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Approx { max_denominator: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinOutcome {
    pub alice: Spin,
    pub bob: Spin,
}

impl SpinOutcome {
    pub const ALL: [SpinOutcome; 4] = [
        SpinOutcome {
            alice: Spin::Up,
            bob: Spin::Up,
        },
        SpinOutcome {
            alice: Spin::Up,
            bob: Spin::Down,
        },
        SpinOutcome {
            alice: Spin::Down,
            bob: Spin::Up,
        },
        SpinOutcome {
            alice: Spin::Down,
            bob: Spin::Down,
        },
    ];

    pub fn spin_of(&self, party: Party) -> Spin {
        match party {
            Party::Alice => self.alice,
            Party::Bob => self.bob,
        }
    }

    fn from_parties(first: Party, first_spin: Spin, second_spin: Spin) -> Self {
        match first {
            Party::Alice => SpinOutcome {
                alice: first_spin,
                bob: second_spin,
            },
            Party::Bob => SpinOutcome {
                alice: second_spin,
                bob: first_spin,
            },
        }
    }

    pub fn label(&self) -> OutcomeLabel {
        OutcomeLabel::new([
            spin_token(Party::Alice, self.alice),
            spin_token(Party::Bob, self.bob),
        ])
        .expect("fixed tokens are valid")
    }

    pub fn from_label(label: &OutcomeLabel) -> Option<Self> {
        SpinOutcome::ALL.into_iter().find(|o| &o.label() == label)
    }

    pub fn is_match(&self) -> bool {
        self.alice == self.bob
    }
}

impl fmt::Display for SpinOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Outcome token such as `Au` or `Bd`.
pub fn spin_token(party: Party, spin: Spin) -> String {
    format!("{}{}", party.initial(), spin.suffix())
}

/// A validated two-filter experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExperimentConfig {
    alice_angle: AngleDeg,
    bob_angle: AngleDeg,
    order: MeasurementOrder,
    mode: Mode,
}

impl ExperimentConfig {
    pub fn new(
        alice_angle: impl Into<AngleDeg>,
        bob_angle: impl Into<AngleDeg>,
        order: MeasurementOrder,
        mode: Mode,
    ) -> Result<Self> {
        let alice_angle = alice_angle.into();
        let bob_angle = bob_angle.into();
        match mode {
            Mode::Exact => {
                let delta = alice_angle.diff(bob_angle);
                if !is_exact_half_angle(delta) {
                    return Err(Error::NotExactlyRepresentable(delta.degrees()));
                }
            }
            Mode::Approx { max_denominator: 0 } => {
                return Err(Error::InvalidArgument(
                    "max_denominator must be at least 1".into(),
                ))
            }
            Mode::Approx { .. } => {}
        }
        Ok(ExperimentConfig {
            alice_angle,
            bob_angle,
            order,
            mode,
        })
    }

    pub fn alice_angle(&self) -> AngleDeg {
        self.alice_angle
    }

    pub fn bob_angle(&self) -> AngleDeg {
        self.bob_angle
    }

    pub fn order(&self) -> MeasurementOrder {
        self.order
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_order(&self, order: MeasurementOrder) -> Self {
        ExperimentConfig { order, ..*self }
    }

    pub fn filter(&self, party: Party) -> AngleDeg {
        match party {
            Party::Alice => self.alice_angle,
            Party::Bob => self.bob_angle,
        }
    }
}

/// Spin direction of the partner electron after the first measurement.
pub fn intermediate_state(config: &ExperimentConfig, first_outcome: Spin) -> AngleDeg {
    let filter = config.filter(config.order.first());
    match first_outcome {
        Spin::Up => filter.opposite(),
        Spin::Down => filter,
    }
}

/// Joint distribution from one collapse sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Collapse {
    pub config: ExperimentConfig,
    /// All four outcomes, including those with probability zero.
    pub distribution: BTreeMap<SpinOutcome, Rational>,
    /// Kernel over the outcomes with nonzero probability.
    pub kernel: Kernel,
    /// In approximate mode, the largest |approximation − cos²| over the
    /// conditional probabilities used.
    pub approx_error: Option<f64>,
    /// In-flight spin after the first measurer finds Up and Down respectively.
    pub in_flight: [AngleDeg; 2],
}

impl Collapse {
    pub fn probability(&self, outcome: SpinOutcome) -> &Rational {
        &self.distribution[&outcome]
    }

    pub fn marginal(&self, party: Party, spin: Spin) -> Rational {
        self.distribution
            .iter()
            .filter(|(o, _)| o.spin_of(party) == spin)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn match_probability(&self) -> Rational {
        self.distribution
            .iter()
            .filter(|(o, _)| o.is_match())
            .map(|(_, p)| p)
            .sum()
    }
}

fn conditional_up(delta: AngleDeg, mode: Mode, worst: &mut f64) -> Result<Rational> {
    match mode {
        Mode::Exact => half_angle_cos2_exact(delta),
        Mode::Approx { max_denominator } => {
            let real = half_angle_cos2_f64(delta);
            let approx = rational_approx(real, max_denominator)?;
            *worst = worst.max((approx.to_f64() - real).abs());
            Ok(approx)
        }
    }
}

/// Sequential-collapse joint distribution for one measurement order.
pub fn collapse_joint(config: &ExperimentConfig) -> Result<Collapse> {
    let first = config.order.first();
    let second = first.other();
    let second_filter = config.filter(second);
    let half = Rational::new(1, 2)?;
    let mut worst = 0.0_f64;

    let mut distribution = BTreeMap::new();
    for first_spin in Spin::BOTH {
        let collapsed = intermediate_state(config, first_spin);
        let up = conditional_up(collapsed.diff(second_filter), config.mode, &mut worst)?;
        let down = Rational::one() - &up;
        for (second_spin, cond) in [(Spin::Up, up), (Spin::Down, down)] {
            let outcome = SpinOutcome::from_parties(first, first_spin, second_spin);
            distribution.insert(outcome, &half * &cond);
        }
    }

    let positive: BTreeMap<OutcomeLabel, Rational> = distribution
        .iter()
        .filter(|(_, p)| p.is_positive())
        .map(|(o, p)| (o.label(), p.clone()))
        .collect();
    let kernel = Kernel::from_probs(&positive)?;

    Ok(Collapse {
        config: *config,
        distribution,
        kernel,
        approx_error: matches!(config.mode, Mode::Approx { .. }).then_some(worst),
        in_flight: [
            intermediate_state(config, Spin::Up),
            intermediate_state(config, Spin::Down),
        ],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderInvariance {
    pub agree: bool,
    pub alice_first: Collapse,
    pub bob_first: Collapse,
}

/// Computes the joint both ways and compares the canonical kernels.
pub fn order_invariance_check(
    alice_angle: impl Into<AngleDeg>,
    bob_angle: impl Into<AngleDeg>,
    mode: Mode,
) -> Result<OrderInvariance> {
    let config = ExperimentConfig::new(alice_angle, bob_angle, MeasurementOrder::AliceFirst, mode)?;
    let alice_first = collapse_joint(&config)?;
    let bob_first = collapse_joint(&config.with_order(MeasurementOrder::BobFirst))?;
    let agree = alice_first.kernel == bob_first.kernel
        && alice_first.distribution == bob_first.distribution;
    Ok(OrderInvariance {
        agree,
        alice_first,
        bob_first,
    })
}

/// The singlet joint kernel for the given filters (exact mode).
pub fn singlet_kernel(alice_angle: i64, bob_angle: i64) -> Result<Kernel> {
    let config = ExperimentConfig::new(
        alice_angle,
        bob_angle,
        MeasurementOrder::AliceFirst,
        Mode::Exact,
    )?;
    Ok(collapse_joint(&config)?.kernel)
}
