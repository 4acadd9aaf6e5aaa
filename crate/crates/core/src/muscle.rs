use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The 15 movable ragdoll body parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuscleId {
    Head,
    Chest,
    Hips,
    LeftUpperArm,
    LeftLowerArm,
    LeftHand,
    RightUpperArm,
    RightLowerArm,
    RightHand,
    LeftUpperLeg,
    LeftLowerLeg,
    LeftFoot,
    RightUpperLeg,
    RightLowerLeg,
    RightFoot,
}

impl MuscleId {
    pub const ALL: [MuscleId; 15] = [
        MuscleId::Head,
        MuscleId::Chest,
        MuscleId::Hips,
        MuscleId::LeftUpperArm,
        MuscleId::LeftLowerArm,
        MuscleId::LeftHand,
        MuscleId::RightUpperArm,
        MuscleId::RightLowerArm,
        MuscleId::RightHand,
        MuscleId::LeftUpperLeg,
        MuscleId::LeftLowerLeg,
        MuscleId::LeftFoot,
        MuscleId::RightUpperLeg,
        MuscleId::RightLowerLeg,
        MuscleId::RightFoot,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MuscleId::Head => "head",
            MuscleId::Chest => "chest",
            MuscleId::Hips => "hips",
            MuscleId::LeftUpperArm => "left_upper_arm",
            MuscleId::LeftLowerArm => "left_lower_arm",
            MuscleId::LeftHand => "left_hand",
            MuscleId::RightUpperArm => "right_upper_arm",
            MuscleId::RightLowerArm => "right_lower_arm",
            MuscleId::RightHand => "right_hand",
            MuscleId::LeftUpperLeg => "left_upper_leg",
            MuscleId::LeftLowerLeg => "left_lower_leg",
            MuscleId::LeftFoot => "left_foot",
            MuscleId::RightUpperLeg => "right_upper_leg",
            MuscleId::RightLowerLeg => "right_lower_leg",
            MuscleId::RightFoot => "right_foot",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MuscleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MuscleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MuscleId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown muscle '{s}'"))
    }
}
