//! Domain types shared across the pipeline: emotion labels, weight vectors,
//! region codes and tweet records.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown emotion label `{0}`")]
    UnknownLabel(String),
    #[error("unknown region code `{0}`")]
    UnknownRegion(String),
}

/// One of the six output labels.
///
/// The declaration order of the five emotional labels is the tie-break
/// priority used by [`argmax_label`] and the slot order of [`EmotionVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Emotion {
    Happy,
    Sad,
    Angry,
    Surprise,
    Fear,
    Neutral,
}

impl Emotion {
    /// All six labels, emotional ones first.
    pub const ALL: [Emotion; 6] = [
        Emotion::Happy,
        Emotion::Sad,
        Emotion::Angry,
        Emotion::Surprise,
        Emotion::Fear,
        Emotion::Neutral,
    ];

    /// The five labels that carry weight.
    pub const EMOTIONAL: [Emotion; 5] = [
        Emotion::Happy,
        Emotion::Sad,
        Emotion::Angry,
        Emotion::Surprise,
        Emotion::Fear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Happy => "happy",
            Emotion::Sad => "sad",
            Emotion::Angry => "angry",
            Emotion::Surprise => "surprise",
            Emotion::Fear => "fear",
            Emotion::Neutral => "neutral",
        }
    }

    /// Position in [`Emotion::ALL`]; for emotional labels this is also the
    /// slot in an [`EmotionVector`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_emotional(self) -> bool {
        self != Emotion::Neutral
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Case-insensitive parse of the six label names.
pub fn parse_emotion(label: &str) -> Result<Emotion, ModelError> {
    Emotion::ALL
        .into_iter()
        .find(|e| e.name().eq_ignore_ascii_case(label))
        .ok_or_else(|| ModelError::UnknownLabel(label.to_string()))
}

impl FromStr for Emotion {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_emotion(s)
    }
}

impl Serialize for Emotion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Emotion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_emotion(&s).map_err(serde::de::Error::custom)
    }
}

/// Nonnegative frequency mass over the five emotional labels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmotionVector([f64; 5]);

impl EmotionVector {
    pub const fn zero() -> Self {
        EmotionVector([0.0; 5])
    }

    /// Builds a vector from weights in label order
    /// (happy, sad, angry, surprise, fear).
    ///
    /// # Panics
    ///
    /// Panics if any weight is negative or NaN.
    pub fn from_weights(weights: [f64; 5]) -> Self {
        assert!(
            weights.iter().all(|w| *w >= 0.0),
            "emotion weights must be nonnegative: {weights:?}"
        );
        EmotionVector(weights)
    }

    /// Weight of an emotional label; neutral always reads as 0.
    pub fn get(&self, emotion: Emotion) -> f64 {
        match emotion {
            Emotion::Neutral => 0.0,
            e => self.0[e.index()],
        }
    }

    /// Adds `weight` to `emotion`. Adding to neutral is a no-op.
    pub fn add_weight(&mut self, emotion: Emotion, weight: f64) {
        debug_assert!(weight >= 0.0);
        if emotion.is_emotional() {
            self.0[emotion.index()] += weight;
        }
    }

    pub fn weights(&self) -> [f64; 5] {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|w| *w == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        EmotionVector(self.0.map(|w| w * factor))
    }

    /// Colon-separated weights in label order, e.g. `1:0:0:0:0`.
    pub fn to_colon_string(&self) -> String {
        self.0
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(":")
    }
}

impl Add for EmotionVector {
    type Output = EmotionVector;

    fn add(mut self, rhs: EmotionVector) -> EmotionVector {
        self += rhs;
        self
    }
}

impl AddAssign for EmotionVector {
    fn add_assign(&mut self, rhs: EmotionVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Serialize for EmotionVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(5))?;
        for e in Emotion::EMOTIONAL {
            map.serialize_entry(e.name(), &self.get(e))?;
        }
        map.end()
    }
}

/// Neutral for the zero vector, else the emotional label with the largest
/// weight. Equal maxima resolve to the label declared first.
pub fn argmax_label(v: &EmotionVector) -> Emotion {
    if v.is_zero() {
        return Emotion::Neutral;
    }
    let mut best = Emotion::Happy;
    for e in Emotion::EMOTIONAL {
        if v.get(e) > v.get(best) {
            best = e;
        }
    }
    best
}

const REGION_CODES: [&str; 36] = [
    "beijing",
    "tianjin",
    "hebei",
    "shanxi",
    "neimenggu",
    "liaoning",
    "jilin",
    "heilongjiang",
    "shanghai",
    "jiangsu",
    "zhejiang",
    "anhui",
    "fujian",
    "jiangxi",
    "shandong",
    "henan",
    "hubei",
    "hunan",
    "guangdong",
    "guangxi",
    "hainan",
    "chongqing",
    "sichuan",
    "guizhou",
    "yunnan",
    "xizang",
    "shaanxi",
    "gansu",
    "qinghai",
    "ningxia",
    "xinjiang",
    "taiwan",
    "hongkong",
    "macau",
    "abroad",
    "other",
];

const PROVINCE_COUNT: usize = 34;

/// One of the 36 canonical regions: 34 province-level divisions plus
/// `abroad` and `other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionCode(u8);

impl RegionCode {
    pub const ABROAD: RegionCode = RegionCode(34);
    pub const OTHER: RegionCode = RegionCode(35);

    pub fn all() -> impl Iterator<Item = RegionCode> {
        (0..REGION_CODES.len() as u8).map(RegionCode)
    }

    /// The 34 province-level divisions (no `abroad`, no `other`).
    pub fn provinces() -> impl Iterator<Item = RegionCode> {
        (0..PROVINCE_COUNT as u8).map(RegionCode)
    }

    pub fn code(self) -> &'static str {
        REGION_CODES[self.0 as usize]
    }

    pub fn is_province(self) -> bool {
        (self.0 as usize) < PROVINCE_COUNT
    }

    /// Stable small integer, used by the snapshot format.
    pub fn ordinal(self) -> u8 {
        self.0
    }

    pub fn from_ordinal(ordinal: u8) -> Option<RegionCode> {
        ((ordinal as usize) < REGION_CODES.len()).then_some(RegionCode(ordinal))
    }
}

pub fn parse_region(code: &str) -> Result<RegionCode, ModelError> {
    REGION_CODES
        .iter()
        .position(|c| *c == code)
        .map(|i| RegionCode(i as u8))
        .ok_or_else(|| ModelError::UnknownRegion(code.to_string()))
}

impl FromStr for RegionCode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_region(s)
    }
}

impl fmt::Display for RegionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for RegionCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for RegionCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_region(&s).map_err(serde::de::Error::custom)
    }
}

/// An ingested microblog post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    /// Epoch seconds, UTC.
    pub created_at: i64,
    /// Region the author registered in.
    pub user_region: RegionCode,
    /// Region the post was tagged with, if any.
    pub geo_region: Option<RegionCode>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifiedTweet {
    pub tweet: Tweet,
    pub label: Emotion,
    pub vector: EmotionVector,
    pub region: RegionCode,
}
