//! Channel and device model, protocol metadata, and the Devetak–Winter rate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};
use crate::quantum::binary_entropy;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "COW")]
    Cow,
    #[serde(rename = "COWm1")]
    CowM1,
    #[serde(rename = "COWm2")]
    CowM2,
    #[serde(rename = "DPS")]
    Dps,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [Protocol::Cow, Protocol::CowM1, Protocol::CowM2, Protocol::Dps];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Cow => "COW",
            Protocol::CowM1 => "COWm1",
            Protocol::CowM2 => "COWm2",
            Protocol::Dps => "DPS",
        }
    }

    pub fn is_cow_family(self) -> bool {
        !matches!(self, Protocol::Dps)
    }

    /// Attack analysed in the long-distance limit for this protocol.
    pub fn default_attack(self) -> Attack {
        match self {
            Protocol::CowM2 => Attack::OnePulse,
            _ => Attack::TwoPulse,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = BoundsError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cow" => Ok(Protocol::Cow),
            "cowm1" => Ok(Protocol::CowM1),
            "cowm2" => Ok(Protocol::CowM2),
            "dps" => Ok(Protocol::Dps),
            _ => Err(BoundsError::InvalidConfig(format!("unknown protocol '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Attack {
    #[serde(rename = "BSA")]
    Bsa,
    #[serde(rename = "1PA")]
    OnePulse,
    #[serde(rename = "2PA")]
    TwoPulse,
}

impl Attack {
    pub fn name(self) -> &'static str {
        match self {
            Attack::Bsa => "BSA",
            Attack::OnePulse => "1PA",
            Attack::TwoPulse => "2PA",
        }
    }
}

impl fmt::Display for Attack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attack {
    type Err = BoundsError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bsa" => Ok(Attack::Bsa),
            "1pa" => Ok(Attack::OnePulse),
            "2pa" => Ok(Attack::TwoPulse),
            _ => Err(BoundsError::InvalidConfig(format!("unknown attack '{s}'"))),
        }
    }
}

/// Who fixes the pulse pairing in the modified COW protocols.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairingBy {
    #[default]
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel<T> {
    pub loss_db_per_km: T,
    pub eta: T,
    pub trusted_device: bool,
}

impl<T: Real> Default for ChannelModel<T> {
    fn default() -> Self {
        Self {
            loss_db_per_km: T::c(0.25),
            eta: T::c(0.1),
            trusted_device: true,
        }
    }
}

impl<T: Real> ChannelModel<T> {
    pub fn new(loss_db_per_km: T, eta: T, trusted_device: bool) -> Result<Self> {
        if !(loss_db_per_km >= T::zero()) {
            return Err(BoundsError::InvalidConfig(format!(
                "loss {loss_db_per_km} dB/km"
            )));
        }
        if !(eta > T::zero() && eta <= T::one()) {
            return Err(BoundsError::InvalidConfig(format!(
                "detector efficiency {eta}"
            )));
        }
        Ok(Self {
            loss_db_per_km,
            eta,
            trusted_device,
        })
    }

    /// `(t, eta)` as seen by the rate formulas. With an untrusted detector
    /// the efficiency is absorbed into the line: `eta -> 1`, `t -> t eta`.
    pub fn effective(&self, t: T) -> (T, T) {
        if self.trusted_device {
            (t, self.eta)
        } else {
            (t * self.eta, T::one())
        }
    }
}

/// Fibre transmission `10^(-loss d / 10)`.
pub fn transmission<T: Real>(distance_km: T, model: &ChannelModel<T>) -> Result<T> {
    if !(distance_km >= T::zero()) {
        return Err(BoundsError::Domain(format!("distance {distance_km} km")));
    }
    Ok(T::c(10.0).powf(-model.loss_db_per_km * distance_km / T::c(10.0)))
}

/// `1 - exp(-mu t eta)`.
pub fn detection_probability<T: Real>(mu: T, t: T, eta: T) -> T {
    -(-(mu * t * eta)).exp_m1()
}

/// `r_sift (1 - h(Q) - chi)`; negative values are returned unchanged.
pub fn devetak_winter_rate<T: Real>(r_sift: T, q: T, chi: T) -> Result<T> {
    Ok(r_sift * (T::one() - binary_entropy(q)? - chi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig<T> {
    pub protocol: Protocol,
    pub mu: T,
    pub q: T,
    pub v: T,
    /// Stored for completeness; every rate is computed with no decoys.
    pub decoy_fraction: T,
    pub pairing_by: PairingBy,
}

impl<T: Real> ProtocolConfig<T> {
    /// COW-family configuration with independent `Q` and `V`.
    pub fn cow(protocol: Protocol, mu: T, q: T, v: T) -> Result<Self> {
        if !protocol.is_cow_family() {
            return Err(BoundsError::InvalidConfig(
                "DPS ties Q to V; use ProtocolConfig::dps".into(),
            ));
        }
        let cfg = Self {
            protocol,
            mu,
            q,
            v,
            decoy_fraction: T::zero(),
            pairing_by: PairingBy::Alice,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// DPS configuration; the error rate is fixed to `(1 - V)/2`.
    pub fn dps(mu: T, v: T) -> Result<Self> {
        let cfg = Self {
            protocol: Protocol::Dps,
            mu,
            q: (T::one() - v) * T::half(),
            v,
            decoy_fraction: T::zero(),
            pairing_by: PairingBy::Alice,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_pairing(mut self, pairing_by: PairingBy) -> Self {
        self.pairing_by = pairing_by;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > T::zero() && self.mu.is_finite()) {
            return Err(BoundsError::InvalidConfig(format!("mean photon number {}", self.mu)));
        }
        if !(self.q >= T::zero() && self.q < T::half()) {
            return Err(BoundsError::InvalidConfig(format!("QBER {}", self.q)));
        }
        if !(self.v >= T::zero() && self.v <= T::one()) {
            return Err(BoundsError::InvalidConfig(format!("visibility {}", self.v)));
        }
        if self.protocol == Protocol::Dps
            && (self.q - (T::one() - self.v) * T::half()).abs() > T::c(T::PROB_SLACK)
        {
            return Err(BoundsError::InvalidConfig(format!(
                "DPS requires Q = (1 - V)/2, got Q = {} and V = {}",
                self.q, self.v
            )));
        }
        Ok(())
    }
}

/// Coefficient `k` with `r_sift ~ k mu t eta` in the small-`mu t` limit.
pub fn sifting_factor<T: Real>(protocol: Protocol, pairing_by: PairingBy) -> T {
    match (protocol, pairing_by) {
        (Protocol::Dps, _) => T::one(),
        (Protocol::Cow, _) | (_, PairingBy::Alice) => T::half(),
        (_, PairingBy::Bob) => T::c(0.25),
    }
}

/// Sifted bits per time slot.
pub fn sifting_rate<T: Real>(config: &ProtocolConfig<T>, t: T, eta: T) -> T {
    sifting_factor::<T>(config.protocol, config.pairing_by) * detection_probability(config.mu, t, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transmission_examples() {
        let m = ChannelModel::<f64>::default();
        assert_eq!(transmission(0.0, &m).unwrap(), 1.0);
        assert!((transmission(40.0, &m).unwrap() - 0.1).abs() < 1e-15);
        assert!((transmission(50.0, &m).unwrap() - 10f64.powf(-1.25)).abs() < 1e-15);
        assert!((transmission(50.0, &m).unwrap() - 0.05623).abs() < 1e-5);
        assert!(transmission(-1.0, &m).is_err());
    }

    #[test]
    fn detection_examples() {
        assert_eq!(detection_probability(0.5, 0.0, 0.1), 0.0);
        let p = detection_probability(0.4583, 0.05623, 0.1);
        assert!((p - (1.0 - (-0.4583f64 * 0.05623 * 0.1).exp())).abs() < 1e-15);
        assert!((p - 0.002574).abs() < 1e-6);
        assert!((detection_probability(1e3f64, 1.0, 1.0) - 1.0).abs() < 1e-15);
        let x: f64 = 1e-5;
        assert!((detection_probability(1.0, x, 1.0) - x).abs() < x * x);
    }

    #[test]
    fn devetak_winter_examples() {
        assert_eq!(devetak_winter_rate(0.3, 0.0, 0.0).unwrap(), 0.3);
        for q in [0.0, 0.1, 0.4] {
            assert!(devetak_winter_rate(0.3, q, 1.0).unwrap() <= 0.0);
        }
        let t_eta = 1e-4;
        let mu: f64 = 0.4583;
        let chi = 0.6884;
        let r = devetak_winter_rate(0.5 * mu * t_eta, 0.0, chi).unwrap();
        assert!((r / t_eta - 0.0714).abs() < 1e-3);
    }

    #[test]
    fn sifting_examples() {
        let dps = ProtocolConfig::dps(0.3f64, 0.98).unwrap();
        let x: f64 = 1e-7;
        assert!((sifting_rate(&dps, x, 1.0) / (0.3 * x) - 1.0).abs() < 1e-6);
        let cow = ProtocolConfig::cow(Protocol::Cow, 0.4583, 0.0, 1.0).unwrap();
        let expected = 0.5 * (1.0 - (-0.4583f64 * 0.005623).exp());
        assert!((sifting_rate(&cow, 0.05623, 0.1) - expected).abs() < 1e-15);
        let m2 = ProtocolConfig::cow(Protocol::CowM2, 0.2f64, 0.0, 1.0)
            .unwrap()
            .with_pairing(PairingBy::Bob);
        assert!((sifting_rate(&m2, 0.05, 0.1) - 0.25 * detection_probability(0.2, 0.05, 0.1)).abs() < 1e-18);
        // Bob's pairing has no effect on original COW.
        let cow_bob = cow.with_pairing(PairingBy::Bob);
        assert_eq!(sifting_rate(&cow_bob, 0.05, 0.1), sifting_rate(&cow, 0.05, 0.1));
    }

    #[test]
    fn dps_coupling_enforced() {
        let c = ProtocolConfig::dps(0.2f64, 0.9).unwrap();
        assert!((c.q - 0.05).abs() < 1e-15);
        let mut bad = c;
        bad.q = 0.01;
        assert!(bad.validate().is_err());
        assert!(ProtocolConfig::cow(Protocol::Dps, 0.2, 0.05, 0.9).is_err());
        assert!(ProtocolConfig::cow(Protocol::Cow, 0.2, 0.5, 0.9).is_err());
        assert!(ProtocolConfig::cow(Protocol::Cow, 0.0, 0.0, 0.9).is_err());
    }

    #[test]
    fn untrusted_substitution() {
        let m = ChannelModel::new(0.25, 0.1, false).unwrap();
        assert_eq!(m.effective(0.2), (0.2 * 0.1, 1.0));
        assert!(ChannelModel::new(0.25, 0.0, true).is_err());
        assert!(ChannelModel::new(-0.1, 0.5, true).is_err());
    }

    #[test]
    fn names_round_trip() {
        for p in Protocol::ALL {
            assert_eq!(p.name().parse::<Protocol>().unwrap(), p);
        }
        for a in [Attack::Bsa, Attack::OnePulse, Attack::TwoPulse] {
            assert_eq!(a.name().parse::<Attack>().unwrap(), a);
        }
    }

    proptest! {
        #[test]
        fn transmission_multiplicative(a in 0.0f64..200.0, b in 0.0f64..200.0) {
            let m = ChannelModel::<f64>::default();
            let lhs = transmission(a + b, &m).unwrap();
            let rhs = transmission(a, &m).unwrap() * transmission(b, &m).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(1e-300) + 1e-300);
            prop_assert!(transmission(a + 1.0, &m).unwrap() < transmission(a, &m).unwrap());
        }

        #[test]
        fn devetak_winter_monotone(q in 0.0f64..0.49, dq in 0.0f64..0.01, chi in 0.0f64..1.0, dchi in 0.0f64..0.1) {
            let r = devetak_winter_rate(0.1, q, chi).unwrap();
            prop_assert!(devetak_winter_rate(0.1, q + dq, chi).unwrap() <= r + 1e-15);
            prop_assert!(devetak_winter_rate(0.1, q, chi + dchi).unwrap() <= r + 1e-15);
        }
    }
}
