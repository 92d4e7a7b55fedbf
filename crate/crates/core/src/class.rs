//! Entity class inventory and IOB tags.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The ten legal-norm analysis classes plus the synthetic conflict class `X`.
///
/// Variant order is alphabetical by German name, which is also the row order
/// used by the comparison tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityClass {
    Aktion,
    Bedingung,
    Datenfeld,
    Dokument,
    #[serde(alias = "Ergebnisempfänger")]
    Ergebnisempfaenger,
    Frist,
    Handlungsgrundlage,
    Hauptakteur,
    Mitwirkender,
    Signalwort,
    /// Conflicting annotations. Only produced by pessimistic consolidation.
    X,
}

impl EntityClass {
    pub const ALL: [EntityClass; 11] = [
        EntityClass::Aktion,
        EntityClass::Bedingung,
        EntityClass::Datenfeld,
        EntityClass::Dokument,
        EntityClass::Ergebnisempfaenger,
        EntityClass::Frist,
        EntityClass::Handlungsgrundlage,
        EntityClass::Hauptakteur,
        EntityClass::Mitwirkender,
        EntityClass::Signalwort,
        EntityClass::X,
    ];

    /// The ten annotation classes, excluding `X`.
    pub const REAL: [EntityClass; 10] = [
        EntityClass::Aktion,
        EntityClass::Bedingung,
        EntityClass::Datenfeld,
        EntityClass::Dokument,
        EntityClass::Ergebnisempfaenger,
        EntityClass::Frist,
        EntityClass::Handlungsgrundlage,
        EntityClass::Hauptakteur,
        EntityClass::Mitwirkender,
        EntityClass::Signalwort,
    ];

    /// Identifier used in tag strings and file names.
    pub fn name(self) -> &'static str {
        match self {
            EntityClass::Aktion => "Aktion",
            EntityClass::Bedingung => "Bedingung",
            EntityClass::Datenfeld => "Datenfeld",
            EntityClass::Dokument => "Dokument",
            EntityClass::Ergebnisempfaenger => "Ergebnisempfaenger",
            EntityClass::Frist => "Frist",
            EntityClass::Handlungsgrundlage => "Handlungsgrundlage",
            EntityClass::Hauptakteur => "Hauptakteur",
            EntityClass::Mitwirkender => "Mitwirkender",
            EntityClass::Signalwort => "Signalwort",
            EntityClass::X => "X",
        }
    }

    /// German display label.
    pub fn german_label(self) -> &'static str {
        match self {
            EntityClass::Ergebnisempfaenger => "Ergebnisempfänger",
            other => other.name(),
        }
    }

    /// English display label, worded as in the published comparison tables.
    pub fn english_label(self) -> &'static str {
        match self {
            EntityClass::Aktion => "Action",
            EntityClass::Bedingung => "Condition",
            EntityClass::Datenfeld => "Data field",
            EntityClass::Dokument => "Document",
            EntityClass::Ergebnisempfaenger => "Recipient of service",
            EntityClass::Frist => "Deadline",
            EntityClass::Handlungsgrundlage => "Legal grounds for action",
            EntityClass::Hauptakteur => "Main actor",
            EntityClass::Mitwirkender => "Contributor",
            EntityClass::Signalwort => "Signaling word",
            EntityClass::X => "Conflict",
        }
    }

    pub fn is_conflict(self) -> bool {
        self == EntityClass::X
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown entity class `{0}`")]
pub struct UnknownClass(pub String);

impl FromStr for EntityClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "Ergebnisempfänger" {
            return Ok(EntityClass::Ergebnisempfaenger);
        }
        EntityClass::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}

/// A CoNLL-2002 style IOB tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IobTag {
    Outside,
    Begin(EntityClass),
    Inside(EntityClass),
}

impl IobTag {
    pub fn class(self) -> Option<EntityClass> {
        match self {
            IobTag::Outside => None,
            IobTag::Begin(c) | IobTag::Inside(c) => Some(c),
        }
    }

    pub fn is_outside(self) -> bool {
        matches!(self, IobTag::Outside)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TagParseError {
    #[error("malformed IOB tag `{0}`")]
    Malformed(String),
    #[error("unknown class in tag `{0}`")]
    UnknownClass(String),
}

impl FromStr for IobTag {
    type Err = TagParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "O" {
            return Ok(IobTag::Outside);
        }
        let (prefix, class) = s
            .split_once('-')
            .ok_or_else(|| TagParseError::Malformed(s.to_string()))?;
        if class.is_empty() {
            return Err(TagParseError::Malformed(s.to_string()));
        }
        let class: EntityClass = class.parse().map_err(|_| TagParseError::UnknownClass(s.to_string()))?;
        match prefix {
            "B" => Ok(IobTag::Begin(class)),
            "I" => Ok(IobTag::Inside(class)),
            _ => Err(TagParseError::Malformed(s.to_string())),
        }
    }
}

impl fmt::Display for IobTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IobTag::Outside => f.write_str("O"),
            IobTag::Begin(c) => write!(f, "B-{c}"),
            IobTag::Inside(c) => write!(f, "I-{c}"),
        }
    }
}
