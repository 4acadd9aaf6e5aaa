//! Scene composition vocabulary: the categorical domains of the generator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

macro_rules! label_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $label)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($label => Ok($name::$variant),)+
                    _ => Err(format!(concat!("unknown ", stringify!($name), " '{}'"), s)),
                }
            }
        }
    };
}

label_enum!(
    Weather {
        Clear => "clear",
        Overcast => "overcast",
        Rain => "rain",
        Fog => "fog",
    }
);

label_enum!(
    /// Period of the day.
    DayPhase {
        Dawn => "dawn",
        Day => "day",
        Dusk => "dusk",
        Night => "night",
    }
);

label_enum!(
    /// Motion variation mode applied on top of the base motion.
    Variation {
        None => "none",
        RandomPerturbation => "random_perturbation",
        Weakening => "weakening",
        Objects => "objects",
        Blend => "blend",
    }
);

label_enum!(
    CameraBehavior {
        Kite => "kite",
        Closeup => "closeup",
        Indoors => "indoors",
        Static => "static",
    }
);

label_enum!(
    Environment {
        Simple => "simple",
        Urban => "urban",
        Green => "green",
        Middle => "middle",
        Lake => "lake",
        Stadium => "stadium",
        House => "house",
    }
);

impl Environment {
    pub fn is_indoor(self) -> bool {
        matches!(self, Environment::House)
    }
}

pub const HUMAN_MODEL_COUNT: u8 = 20;

/// Artist-designed human model, numbered `1..=20`. Serialized as `model_07`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HumanModel(u8);

impl HumanModel {
    pub fn new(number: u8) -> Option<Self> {
        (1..=HUMAN_MODEL_COUNT).contains(&number).then_some(Self(number))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = HumanModel> {
        (1..=HUMAN_MODEL_COUNT).map(HumanModel)
    }
}

impl fmt::Display for HumanModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model_{:02}", self.0)
    }
}

impl FromStr for HumanModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix("model_")
            .and_then(|n| n.parse::<u8>().ok())
            .and_then(HumanModel::new)
            .ok_or_else(|| format!("unknown human model '{s}'"))
    }
}

impl Serialize for HumanModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HumanModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_sizes() {
        assert_eq!(Weather::ALL.len(), 4);
        assert_eq!(DayPhase::ALL.len(), 4);
        assert_eq!(Variation::ALL.len(), 5);
        assert_eq!(CameraBehavior::ALL.len(), 4);
        assert_eq!(Environment::ALL.len(), 7);
        assert_eq!(HumanModel::all().count(), 20);
    }

    #[test]
    fn human_model_labels() {
        let m: HumanModel = "model_07".parse().unwrap();
        assert_eq!(m.number(), 7);
        assert_eq!(m.to_string(), "model_07");
        assert!("model_21".parse::<HumanModel>().is_err());
        assert!("model_00".parse::<HumanModel>().is_err());
    }

    #[test]
    fn labels_round_trip() {
        for v in Variation::ALL {
            assert_eq!(v.as_str().parse::<Variation>().unwrap(), *v);
        }
        assert_eq!(serde_json::to_string(&CameraBehavior::Static).unwrap(), "\"static\"");
    }
}
