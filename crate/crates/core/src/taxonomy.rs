//! The fourteen pivotal properties and the robust strategies each one enables.
//!
//! The knowledge base is compiled in from `data/taxonomy.json` and parsed
//! once. Strategies that appear under several properties (matched
//! case-insensitively) are merged into one record listing every enabling
//! property.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::Error;

const TAXONOMY_JSON: &str = include_str!("../data/taxonomy.json");

/// Number of catalogued properties.
pub const PROPERTY_COUNT: usize = 14;

/// Table row number of a pivotal property, always in `1..=14`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct PropertyId(u8);

impl PropertyId {
    pub fn new(id: i64) -> Result<Self, Error> {
        if (1..=PROPERTY_COUNT as i64).contains(&id) {
            Ok(PropertyId(id as u8))
        } else {
            Err(Error::UnknownProperty(id))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// All ids in table order.
    pub fn all() -> impl Iterator<Item = PropertyId> {
        (1..=PROPERTY_COUNT as u8).map(PropertyId)
    }

    fn index(self) -> usize {
        usize::from(self.0) - 1
    }
}

impl TryFrom<i64> for PropertyId {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        PropertyId::new(value)
    }
}

impl From<PropertyId> for u8 {
    fn from(id: PropertyId) -> u8 {
        id.0
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cluster {
    DecisionContext,
    ActionEventSpace,
}

impl fmt::Display for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cluster::DecisionContext => "decision-context",
            Cluster::ActionEventSpace => "action-event-space",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PivotalProperty {
    pub id: PropertyId,
    pub name: String,
    pub cluster: Cluster,
    pub definition: String,
    pub epistemic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strategy {
    /// Lowercase-hyphenated form of the name.
    pub id: String,
    pub name: String,
    /// Ascending property ids.
    pub enabling_properties: Vec<PropertyId>,
}

impl Strategy {
    pub fn first_enabling_property(&self) -> PropertyId {
        self.enabling_properties[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    pub properties: Vec<PivotalProperty>,
    pub strategies: Vec<Strategy>,
    /// For each property (by index), its strategies in table cell order.
    #[serde(skip)]
    by_property: Vec<Vec<usize>>,
}

impl Catalog {
    pub fn property(&self, id: PropertyId) -> &PivotalProperty {
        &self.properties[id.index()]
    }

    /// Strategies enabled by `id`, in the order the table lists them.
    pub fn strategies_for(&self, id: PropertyId) -> impl Iterator<Item = &Strategy> {
        self.by_property[id.index()].iter().map(|&i| &self.strategies[i])
    }

    pub fn strategy(&self, slug: &str) -> Option<&Strategy> {
        self.strategies.iter().find(|s| s.id == slug)
    }

    /// Canonical JSON export of the whole knowledge base.
    pub fn to_json(&self) -> String {
        crate::io::to_canonical_json(self)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    properties: Vec<RawProperty>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProperty {
    id: i64,
    name: String,
    cluster: Cluster,
    epistemic: bool,
    definition: String,
    strategies: Vec<String>,
}

/// The static knowledge base.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| build(TAXONOMY_JSON))
}

/// Strategies enabled by a raw property id.
pub fn strategies_for(property_id: i64) -> Result<Vec<&'static Strategy>, Error> {
    let id = PropertyId::new(property_id)?;
    Ok(catalog().strategies_for(id).collect())
}

pub fn slugify(name: &str) -> String {
    let mut slug = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_alphanumeric() {
            slug.extend(c.to_lowercase());
        } else if !slug.is_empty() && !slug.ends_with('-') {
            slug.push('-');
        }
    }
    while slug.ends_with('-') {
        slug.pop();
    }
    slug
}

fn build(json: &str) -> Catalog {
    let raw: RawCatalog = serde_json::from_str(json).expect("embedded taxonomy is well-formed");
    let mut properties = Vec::with_capacity(raw.properties.len());
    let mut strategies: Vec<Strategy> = Vec::new();
    let mut by_folded: BTreeMap<String, usize> = BTreeMap::new();
    let mut by_property = Vec::with_capacity(raw.properties.len());

    for (row, p) in raw.properties.into_iter().enumerate() {
        let id = PropertyId::new(p.id).expect("embedded property id in range");
        assert_eq!(id.index(), row, "taxonomy rows out of order");
        let mut cell = Vec::with_capacity(p.strategies.len());
        for name in p.strategies {
            let idx = *by_folded.entry(name.to_lowercase()).or_insert_with(|| {
                strategies.push(Strategy {
                    id: slugify(&name),
                    name: name.clone(),
                    enabling_properties: Vec::new(),
                });
                strategies.len() - 1
            });
            strategies[idx].enabling_properties.push(id);
            cell.push(idx);
        }
        by_property.push(cell);
        properties.push(PivotalProperty {
            id,
            name: p.name,
            cluster: p.cluster,
            definition: p.definition,
            epistemic: p.epistemic,
        });
    }
    assert_eq!(properties.len(), PROPERTY_COUNT);

    Catalog {
        properties,
        strategies,
        by_property,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    #[test]
    fn fourteen_properties_in_row_order() {
        let cat = catalog();
        assert_eq!(cat.properties.len(), 14);
        for (i, p) in cat.properties.iter().enumerate() {
            assert_eq!(usize::from(p.id.get()), i + 1);
            assert!(!p.name.is_empty() && !p.definition.is_empty());
        }
        assert_eq!(cat.property(PropertyId::new(7).unwrap()).name, "Indexable outcomes");
    }

    #[test]
    fn exactly_nine_and_ten_are_epistemic() {
        let epistemic: Vec<u8> = catalog()
            .properties
            .iter()
            .filter(|p| p.epistemic)
            .map(|p| p.id.get())
            .collect();
        assert_eq!(epistemic, vec![9, 10]);
    }

    #[test]
    fn catalog_is_stable() {
        assert_eq!(catalog().to_json(), build(TAXONOMY_JSON).to_json());
        assert!(std::ptr::eq(catalog(), catalog()));
    }

    #[test]
    fn row_six_strategies() {
        let names: Vec<_> = strategies_for(6).unwrap().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "Robust design",
                "Resilience planning",
                "Dedicated response unit",
                "Optionality",
                "Evolutionary architecture"
            ]
        );
    }

    #[test]
    fn row_eight_strategies() {
        let names: Vec<_> = strategies_for(8).unwrap().iter().map(|s| s.name.as_str()).collect();
        assert!(names.contains(&"Risk contracts"));
        assert!(names.contains(&"Insurance & financial instruments"));
    }

    #[test]
    fn out_of_range_ids_are_rejected() {
        for id in [0, 15, -1, 1000] {
            assert!(matches!(strategies_for(id), Err(Error::UnknownProperty(x)) if x == id));
        }
    }

    #[test]
    fn strategy_invariants() {
        let cat = catalog();
        let mut folded = BTreeSet::new();
        let mut covered = BTreeSet::new();
        for s in &cat.strategies {
            assert!(!s.enabling_properties.is_empty());
            assert!(folded.insert(s.name.to_lowercase()), "duplicate {}", s.name);
            covered.extend(s.enabling_properties.iter().copied());
        }
        assert_eq!(covered.len(), 14);

        let mut union = BTreeSet::new();
        for id in PropertyId::all() {
            let list: Vec<_> = cat.strategies_for(id).collect();
            assert!(!list.is_empty());
            for s in list {
                assert!(s.enabling_properties.contains(&id));
                union.insert(s.id.clone());
            }
        }
        let all: BTreeSet<_> = cat.strategies.iter().map(|s| s.id.clone()).collect();
        assert_eq!(union, all);
    }

    #[test]
    fn trial_and_error_is_shared_by_rows_two_and_twelve() {
        let s = catalog().strategy("trial-and-error").unwrap();
        let ids: Vec<u8> = s.enabling_properties.iter().map(|p| p.get()).collect();
        assert_eq!(ids, vec![2, 12]);
    }

    #[test]
    fn slugs() {
        assert_eq!(
            slugify("Insurance & financial instruments"),
            "insurance-financial-instruments"
        );
        assert_eq!(
            slugify("System models (mathematical, computational, predictive)"),
            "system-models-mathematical-computational-predictive"
        );
        assert_eq!(slugify("Misdirection/Deception"), "misdirection-deception");
    }
}
