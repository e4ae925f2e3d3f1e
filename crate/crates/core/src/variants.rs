//! Ideal sifting rates and mutual information for encodings built from the
//! COW hardware, without an eavesdropper and without dark counts.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{BoundsError, Result};
use crate::optim::{maximize_scalar, ScalarSearch};
use crate::quantum::binary_entropy;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VariantId {
    /// One bit per pulse: non-empty means 1.
    ZChannel,
    OriginalCow,
    Cowm1Style,
    /// Random train paired a posteriori by Alice.
    RandomTrainAPosteriori,
    /// Bob announces the pairing.
    BobChooses,
}

impl VariantId {
    pub const ALL: [VariantId; 5] = [
        VariantId::ZChannel,
        VariantId::OriginalCow,
        VariantId::Cowm1Style,
        VariantId::RandomTrainAPosteriori,
        VariantId::BobChooses,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantId::ZChannel => "Z_CHANNEL",
            VariantId::OriginalCow => "ORIGINAL_COW",
            VariantId::Cowm1Style => "COWM1_STYLE",
            VariantId::RandomTrainAPosteriori => "RANDOM_TRAIN_A_POSTERIORI",
            VariantId::BobChooses => "BOB_CHOOSES",
        }
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantId {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase().replace('-', "_");
        VariantId::ALL
            .into_iter()
            .find(|v| v.name() == upper)
            .ok_or_else(|| BoundsError::InvalidConfig(format!("unknown variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VariantSpec<T> {
    pub id: VariantId,
    /// Fraction of non-empty pulses; used by `ZChannel` only.
    pub q: Option<T>,
    /// Extra fraction of announced no-click slots; used by `ZChannel` only.
    pub f0: Option<T>,
}

impl<T: Real> VariantSpec<T> {
    pub fn new(id: VariantId) -> Self {
        Self { id, q: None, f0: None }
    }

    pub fn z_channel(q: T) -> Self {
        Self {
            id: VariantId::ZChannel,
            q: Some(q),
            f0: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.id == VariantId::ZChannel {
            if let Some(q) = self.q {
                if !(q > T::zero() && q < T::one()) {
                    return Err(BoundsError::Domain(format!("q = {q} outside (0, 1)")));
                }
            }
            if let Some(f0) = self.f0 {
                if !(f0 >= T::zero() && f0 <= T::one()) {
                    return Err(BoundsError::Domain(format!("f0 = {f0}")));
                }
            }
        } else if self.q.is_some() || self.f0.is_some() {
            return Err(BoundsError::InvalidConfig(format!(
                "q and f0 apply to {} only, not {}",
                VariantId::ZChannel,
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZChannelRate<T> {
    /// Mutual information per pulse.
    pub i_ab: T,
    /// Key rate per pulse; equal to `i_ab` since every pulse is kept.
    pub rate: T,
}

/// `I_AB = h(q x) - q h(x)` with `x = mu t eta` the click probability of a
/// non-empty pulse.
pub fn z_channel_rate<T: Real>(q: T, mu: T, t: T, eta: T) -> Result<ZChannelRate<T>> {
    if !(q >= T::zero() && q <= T::one()) {
        return Err(BoundsError::Domain(format!("q = {q}")));
    }
    let x = mu * t * eta;
    if !(x >= T::zero() && x <= T::one()) {
        return Err(BoundsError::Domain(format!("mu t eta = {x}")));
    }
    let i_ab = (binary_entropy(q * x)? - q * binary_entropy(x)?).max(T::zero());
    Ok(ZChannelRate { i_ab, rate: i_ab })
}

/// `-q log2(q)`, the small-`x` slope of `I_AB / x`.
pub fn z_channel_slope<T: Real>(q: T) -> T {
    if q <= T::zero() {
        return T::zero();
    }
    -q * q.log2()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZChannelOptimum {
    pub q: f64,
    pub rate: f64,
    pub saturated: bool,
}

/// Fraction of non-empty pulses maximising the exact Z-channel rate.
pub fn optimize_z_channel(mu: f64, t: f64, eta: f64, search: &ScalarSearch) -> Result<ZChannelOptimum> {
    z_channel_rate(0.5, mu, t, eta)?;
    let r = maximize_scalar(
        |q| z_channel_rate(q, mu, t, eta).map(|z| z.rate).unwrap_or(f64::NEG_INFINITY),
        1e-6,
        1.0 - 1e-6,
        search,
    )?;
    Ok(ZChannelOptimum {
        q: r.x,
        rate: r.f,
        saturated: r.saturated,
    })
}

/// Sifted bits per time slot in the `mu t << 1` limit.
pub fn variant_sifting_rate<T: Real>(spec: &VariantSpec<T>, mu: T, t: T, eta: T) -> Result<T> {
    spec.validate()?;
    let x = mu * t * eta;
    let quarter = T::c(0.25);
    Ok(match spec.id {
        VariantId::ZChannel => match spec.f0 {
            None => T::one(),
            Some(f0) => {
                let q = spec.q.ok_or_else(|| {
                    BoundsError::InvalidConfig("f0 sifting needs the pulse fraction q".into())
                })?;
                (q * x + f0).min(T::one())
            }
        },
        VariantId::OriginalCow | VariantId::Cowm1Style => T::half() * x,
        VariantId::RandomTrainAPosteriori | VariantId::BobChooses => quarter * x,
    })
}

/// Ideal key rate `r_s I_AB` per time slot.
pub fn variant_ideal_rate<T: Real>(spec: &VariantSpec<T>, mu: T, t: T, eta: T) -> Result<T> {
    spec.validate()?;
    match spec.id {
        VariantId::ZChannel => {
            let q = spec
                .q
                .ok_or_else(|| BoundsError::InvalidConfig("Z channel needs q".into()))?;
            if spec.f0.is_some() {
                return Err(BoundsError::InvalidConfig(
                    "mutual information after f0 sifting is not modelled".into(),
                ));
            }
            Ok(z_channel_rate(q, mu, t, eta)?.rate)
        }
        _ => variant_sifting_rate(spec, mu, t, eta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn z_channel_asymptote() {
        let q = (-1.0f64).exp();
        let x = 1e-4;
        let r = z_channel_rate(q, x, 1.0, 1.0).unwrap();
        let ratio = r.rate / x;
        assert!((ratio - 0.5307).abs() < 0.01, "{ratio}");
        assert!((z_channel_slope(q) - q / std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn z_channel_edges() {
        for q in [0.0f64, 1.0] {
            assert!(z_channel_rate(q, 1e-3, 1.0, 1.0).unwrap().i_ab.abs() < 1e-15);
        }
        assert!(z_channel_rate(1.2f64, 1e-3, 1.0, 1.0).is_err());
    }

    #[test]
    fn slope_argmax() {
        let r = maximize_scalar(z_channel_slope::<f64>, 1e-6, 1.0 - 1e-6, &ScalarSearch {
            grid_points: 200,
            log_spaced: false,
            tol: 1e-9,
        })
        .unwrap();
        assert!((r.x - (-1.0f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn exact_argmax_near_inverse_e() {
        let s = ScalarSearch {
            grid_points: 200,
            log_spaced: false,
            tol: 1e-9,
        };
        let opt = optimize_z_channel(1e-4, 1.0, 1.0, &s).unwrap();
        assert!((opt.q - (-1.0f64).exp()).abs() < 1e-3, "{}", opt.q);
    }

    #[test]
    fn sifting_rates() {
        let (mu, t, eta) = (0.5f64, 0.01, 0.1);
        let x = mu * t * eta;
        let rs = |id| variant_sifting_rate(&VariantSpec::new(id), mu, t, eta).unwrap();
        assert_eq!(rs(VariantId::ZChannel), 1.0);
        assert!((rs(VariantId::OriginalCow) - x / 2.0).abs() < 1e-18);
        assert!((rs(VariantId::Cowm1Style) - x / 2.0).abs() < 1e-18);
        assert!((rs(VariantId::RandomTrainAPosteriori) - x / 4.0).abs() < 1e-18);
        assert!((rs(VariantId::BobChooses) - x / 4.0).abs() < 1e-18);
        let spec = VariantSpec {
            id: VariantId::ZChannel,
            q: Some(0.3),
            f0: Some(0.01),
        };
        assert!((variant_sifting_rate(&spec, mu, t, eta).unwrap() - (0.3 * x + 0.01)).abs() < 1e-15);
        let bad = VariantSpec {
            id: VariantId::OriginalCow,
            q: Some(0.3),
            f0: None,
        };
        assert!(variant_sifting_rate(&bad, mu, t, eta).is_err());
    }

    #[test]
    fn parse_ids() {
        for id in VariantId::ALL {
            assert_eq!(id.name().parse::<VariantId>().unwrap(), id);
        }
        assert_eq!("bob-chooses".parse::<VariantId>().unwrap(), VariantId::BobChooses);
        assert!("dps".parse::<VariantId>().is_err());
    }

    proptest! {
        #[test]
        fn sifting_order(x in 1e-9f64..0.999) {
            let rs = |id| variant_sifting_rate(&VariantSpec::new(id), x, 1.0, 1.0).unwrap();
            prop_assert!(rs(VariantId::ZChannel) >= rs(VariantId::OriginalCow));
            prop_assert!(rs(VariantId::OriginalCow) >= rs(VariantId::RandomTrainAPosteriori));
        }

        #[test]
        fn z_channel_below_capacity(q in 0.01f64..0.99, x in 1e-6f64..0.5) {
            let r = z_channel_rate(q, x, 1.0, 1.0).unwrap();
            prop_assert!(r.i_ab >= 0.0 && r.i_ab <= 1.0);
        }
    }
}
