//! Seeded generator for a historical-style corpus with exact element and
//! property totals.
//!
//! `nodes` counts entity and paragraph nodes together. Relationships are
//! spread over paragraphs in contiguous blocks, each with a template
//! sentence `<A> <verb> <B> in <place>.`; a paragraph's text is the
//! concatenation of its sentences. Property totals use the counting
//! convention of [`crate::graph::DistributionReport`] and are met by padding,
//! in order: entity `source_paragraph`, paragraph metadata, then filler
//! properties dealt round-robin over entities and relationships.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::graph::{GraphBuilder, NodeSpec, Properties, PropertyGraph, RelationshipSpec, Scalar, SOURCE_PARAGRAPH_KEY};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelWeight {
    pub labels: Vec<String>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationshipTypeSpec {
    pub name: String,
    pub category: String,
    /// Verb phrase used in generated sentences.
    pub verb: String,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub nodes: usize,
    pub relationships: usize,
    pub properties: usize,
    /// Paragraph nodes among `nodes`; defaults to a tenth of them.
    pub paragraphs: Option<usize>,
    pub seed: u64,
    pub labels: Vec<LabelWeight>,
    pub relationship_types: Vec<RelationshipTypeSpec>,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        let labels = [
            (&["Person"][..], 0.30),
            (&["Person", "Religious"][..], 0.25),
            (&["Place"][..], 0.15),
            (&["Organisation"][..], 0.10),
            (&["Religious"][..], 0.10),
            (&["Judicial"][..], 0.10),
        ]
        .iter()
        .map(|(l, w)| LabelWeight { labels: l.iter().map(|s| s.to_string()).collect(), weight: *w })
        .collect();
        let relationship_types = [
            ("SPEAKS_WITH", "communication", "speaks with"),
            ("ACCUSES", "accusation", "accuses"),
            ("DENOUNCES", "accusation", "denounces"),
            ("DEFENDS", "support", "defends"),
            ("FAMILY_OF", "kinship", "is kin to"),
            ("MEMBER_OF", "affiliation", "belongs with"),
            ("LOCATED_IN", "location", "resides near"),
            ("VISITS", "movement", "visits"),
            ("INTERROGATES", "judicial", "interrogates"),
            ("SENTENCES", "judicial", "sentences"),
        ]
        .iter()
        .map(|(n, c, v)| RelationshipTypeSpec {
            name: n.to_string(),
            category: c.to_string(),
            verb: v.to_string(),
            weight: 1.0,
        })
        .collect();
        SyntheticConfig {
            nodes: 600,
            relationships: 3000,
            properties: 13000,
            paragraphs: None,
            seed: 42,
            labels,
            relationship_types,
        }
    }
}

impl SyntheticConfig {
    /// Parses a TOML config; omitted keys take their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self, IngestError> {
        toml::from_str(text).map_err(|e| IngestError::InvalidConfig(e.to_string()))
    }

    pub fn paragraph_count(&self) -> usize {
        let wanted = self.paragraphs.unwrap_or(self.nodes / 10);
        if self.relationships > 0 && self.nodes >= 2 {
            wanted.clamp(1, self.nodes - 1)
        } else {
            wanted.min(self.nodes)
        }
    }

    fn check(&self) -> Result<(), IngestError> {
        let bad = |w: f64| !(w.is_finite() && w > 0.0);
        if self.labels.iter().any(|l| bad(l.weight) || l.labels.is_empty()) {
            return Err(IngestError::InvalidConfig("label weights must be positive and name a label".into()));
        }
        if self.relationship_types.iter().any(|t| bad(t.weight) || t.name.is_empty()) {
            return Err(IngestError::InvalidConfig("relationship type weights must be positive".into()));
        }
        Ok(())
    }
}

/// Largest-remainder apportionment of `total` over `weights`.
pub fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())).then(a.cmp(&b)));
    let short = total - counts.iter().sum::<usize>();
    for &i in order.iter().cycle().take(short) {
        counts[i] += 1;
    }
    counts
}

const GIVEN: &[&str] = &[
    "Pedro",
    "Juan",
    "María",
    "Isabel",
    "Francisco",
    "Catalina",
    "Diego",
    "Ana",
    "Luis",
    "Leonor",
    "Antonio",
    "Beatriz",
    "Gonzalo",
    "Inés",
    "Alonso",
    "Juana",
    "Hernando",
    "Elvira",
    "Cristóbal",
    "Mencía",
    "Rodrigo",
    "Teresa",
    "Martín",
    "Constanza",
    "Gaspar",
    "Francisca",
    "Lorenzo",
    "Violante",
    "Sebastián",
    "Blanca",
];
const FAMILY: &[&str] = &[
    "de Cañas",
    "de Rojas",
    "Ponce de León",
    "de Vivero",
    "de Herrera",
    "de Sotelo",
    "de Castilla",
    "de Ulloa",
    "de Enríquez",
    "de Miranda",
    "de Salcedo",
    "de Vargas",
    "de Mendoza",
    "de Guzmán",
    "de Toledo",
    "de Padilla",
    "de Zúñiga",
    "de Acuña",
    "de Osorio",
    "de Bazán",
    "de Tovar",
    "de Quiñones",
    "de Velasco",
    "de Arellano",
    "de Ocampo",
    "de Villegas",
    "de Cisneros",
    "de Ribera",
    "de Sandoval",
];
const PLACES: &[&str] = &[
    "Valladolid",
    "Sevilla",
    "Toledo",
    "Zamora",
    "Palencia",
    "Salamanca",
    "Logroño",
    "Pedrosa",
    "Medina",
    "Toro",
    "Burgos",
    "Ávila",
    "Segovia",
    "Cuenca",
    "Llerena",
    "Granada",
    "Córdoba",
    "Murcia",
    "Calahorra",
    "Astorga",
    "León",
    "Soria",
    "Osma",
    "Plasencia",
    "Coria",
    "Jaén",
    "Écija",
    "Carmona",
    "Baeza",
    "Úbeda",
];
const ORG_KINDS: &[&str] = &["Cofradía", "Colegio", "Convento", "Monasterio", "Hermandad", "Cabildo", "Audiencia"];
const JUDICIAL: &[&str] = &["Inquisidor", "Fiscal", "Licenciado", "Notario", "Alguacil", "Relator"];
const PARAGRAPH_TYPES: &[&str] = &["testimony", "accusation", "sentence", "letter", "inventory"];

struct NameGen {
    used: HashSet<String>,
}

impl NameGen {
    fn person(&self, rng: &mut ChaCha8Rng) -> String {
        format!("{} {}", GIVEN.choose(rng).unwrap(), FAMILY.choose(rng).unwrap())
    }

    fn candidate(&self, labels: &[String], rng: &mut ChaCha8Rng) -> String {
        let has = |l: &str| labels.iter().any(|x| x == l);
        if has("Place") {
            PLACES.choose(rng).unwrap().to_string()
        } else if has("Organisation") {
            format!("{} de {}", ORG_KINDS.choose(rng).unwrap(), PLACES.choose(rng).unwrap())
        } else if has("Judicial") {
            format!("{} {}", JUDICIAL.choose(rng).unwrap(), self.person(rng))
        } else if has("Religious") {
            format!("Fray {}", self.person(rng))
        } else {
            self.person(rng)
        }
    }

    fn fresh(&mut self, labels: &[String], rng: &mut ChaCha8Rng) -> String {
        for _ in 0..16 {
            let name = self.candidate(labels, rng);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
        let base = self.candidate(labels, rng);
        let name = (2..).map(|n| format!("{base} {n}")).find(|n| !self.used.contains(n)).unwrap();
        self.used.insert(name.clone());
        name
    }
}

fn pick_weighted(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

fn filler(slot: usize, relationship: bool, rng: &mut ChaCha8Rng) -> (String, Scalar) {
    let entity_keys = ["birth_year", "occupation", "origin", "mentions"];
    let rel_keys = ["year", "confidence", "folio_ref", "witnessed"];
    let keys = if relationship { &rel_keys } else { &entity_keys };
    let key = match keys.get(slot) {
        Some(k) => k.to_string(),
        None => format!("note_{}", slot - keys.len() + 1),
    };
    let value = match key.as_str() {
        "birth_year" => Scalar::Int(rng.random_range(1480..1540)),
        "year" => Scalar::Int(rng.random_range(1520..1600)),
        "mentions" => Scalar::Int(rng.random_range(1..40)),
        "confidence" => Scalar::Float((rng.random_range(50..100) as f64) / 100.0),
        "witnessed" => Scalar::Bool(rng.random()),
        "occupation" => {
            Scalar::Text(["merchant", "cleric", "notary", "weaver", "physician"].choose(rng).unwrap().to_string())
        }
        "origin" | "folio_ref" => Scalar::Text(PLACES.choose(rng).unwrap().to_string()),
        _ => Scalar::Text(format!("annotation {}", rng.random_range(1..1000))),
    };
    (key, value)
}

struct DraftEntity {
    name: String,
    labels: Vec<String>,
    properties: Properties,
}

struct DraftRel {
    source: usize,
    target: usize,
    kind: usize,
    paragraph: usize,
    sentence: String,
    properties: Properties,
}

/// Generates a graph whose `stats()` totals equal the configured targets.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<PropertyGraph, IngestError> {
    config.check()?;
    let paragraphs = config.paragraph_count();
    let entities = config.nodes - paragraphs;
    if config.relationships > 0 && (entities == 0 || paragraphs == 0) {
        return Err(IngestError::UnachievableTargets(
            "relationships need at least one entity and one paragraph".into(),
        ));
    }
    if config.relationships > 0 && config.relationship_types.is_empty() {
        return Err(IngestError::UnachievableTargets("no relationship types configured".into()));
    }
    if entities > 0 && config.labels.is_empty() {
        return Err(IngestError::UnachievableTargets("no label weights configured".into()));
    }
    let base = 2 * entities + paragraphs + 3 * config.relationships;
    if config.properties < base {
        return Err(IngestError::UnachievableTargets(format!(
            "{} properties requested but the elements alone carry {base}",
            config.properties
        )));
    }
    if config.properties > base && entities + config.relationships == 0 && config.properties - base > 4 * paragraphs {
        return Err(IngestError::UnachievableTargets("no element can hold the requested properties".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights: Vec<f64> = config.labels.iter().map(|l| l.weight).collect();
    let mut names = NameGen { used: HashSet::new() };
    let mut drafts: Vec<DraftEntity> = Vec::with_capacity(entities);
    for (combo, count) in config.labels.iter().zip(apportion(entities, &weights)) {
        for _ in 0..count {
            let name = names.fresh(&combo.labels, &mut rng);
            drafts.push(DraftEntity { name, labels: combo.labels.clone(), properties: Properties::new() });
        }
    }
    let places: Vec<usize> = (0..drafts.len()).filter(|&i| drafts[i].labels.iter().any(|l| l == "Place")).collect();

    let type_weights: Vec<f64> = config.relationship_types.iter().map(|t| t.weight).collect();
    let mut rels: Vec<DraftRel> = Vec::with_capacity(config.relationships);
    for i in 0..config.relationships {
        let kind = pick_weighted(&mut rng, &type_weights);
        let source = rng.random_range(0..entities);
        let target = if entities > 1 { (source + rng.random_range(1..entities)) % entities } else { source };
        let spec = &config.relationship_types[kind];
        let mut sentence = format!("{} {} {}", drafts[source].name, spec.verb, drafts[target].name);
        if let Some(&place) = places.choose(&mut rng) {
            sentence.push_str(&format!(" in {}", drafts[place].name));
        }
        sentence.push('.');
        let paragraph = i * paragraphs / config.relationships;
        rels.push(DraftRel { source, target, kind, paragraph, sentence, properties: Properties::new() });
    }

    let mut texts: Vec<Vec<&str>> = vec![Vec::new(); paragraphs];
    let mut first_seen: Vec<Option<usize>> = vec![None; entities];
    for r in &rels {
        texts[r.paragraph].push(&r.sentence);
        for e in [r.source, r.target] {
            first_seen[e].get_or_insert(r.paragraph);
        }
    }
    let paragraph_texts: Vec<String> = texts
        .iter()
        .enumerate()
        .map(
            |(i, s)| {
                if s.is_empty() {
                    format!("Folio {} carries no recorded interactions.", i + 1)
                } else {
                    s.join(" ")
                }
            },
        )
        .collect();

    let mut paragraph_meta: Vec<Properties> = vec![Properties::new(); paragraphs];
    let mut remaining = config.properties - base;

    for (i, draft) in drafts.iter_mut().enumerate() {
        if remaining == 0 || paragraphs == 0 {
            break;
        }
        let p = first_seen[i].unwrap_or(i % paragraphs);
        draft.properties.insert(SOURCE_PARAGRAPH_KEY.into(), Scalar::Text(format!("p{}", p + 1)));
        remaining -= 1;
    }
    let meta_keys = ["paragraph_id", "paragraph_type", "archival_source", "folio"];
    'meta: for key in meta_keys {
        for (i, meta) in paragraph_meta.iter_mut().enumerate() {
            if remaining == 0 {
                break 'meta;
            }
            let value = match key {
                "paragraph_id" => Scalar::Text(format!("P-{:04}", i + 1)),
                "paragraph_type" => Scalar::Text(PARAGRAPH_TYPES.choose(&mut rng).unwrap().to_string()),
                "archival_source" => Scalar::Text(format!("AHN, Inquisición, leg. {}", rng.random_range(100..999))),
                _ => Scalar::Text(format!("fol. {}{}", rng.random_range(1..300), ["r", "v"].choose(&mut rng).unwrap())),
            };
            meta.insert(key.into(), value);
            remaining -= 1;
        }
    }
    let holders = entities + config.relationships;
    let mut slot = 0;
    while remaining > 0 {
        for h in 0..holders {
            if remaining == 0 {
                break;
            }
            let (props, is_rel) = if h < entities {
                (&mut drafts[h].properties, false)
            } else {
                (&mut rels[h - entities].properties, true)
            };
            let (key, value) = filler(slot, is_rel, &mut rng);
            props.insert(key, value);
            remaining -= 1;
        }
        slot += 1;
    }

    let mut builder = GraphBuilder::new();
    let err = |e: crate::graph::GraphError| IngestError::InvariantViolation(e.to_string());
    for (i, (text, meta)) in paragraph_texts.into_iter().zip(paragraph_meta).enumerate() {
        builder.add_node(NodeSpec::Paragraph { id: Some(format!("p{}", i + 1)), text, metadata: meta }).map_err(err)?;
    }
    let mut ids = Vec::with_capacity(entities);
    for d in drafts {
        ids.push(
            builder
                .add_node(NodeSpec::Entity { id: None, name: d.name, labels: d.labels, properties: d.properties })
                .map_err(err)?,
        );
    }
    for r in rels {
        let spec = &config.relationship_types[r.kind];
        let mut rs = RelationshipSpec::new(&ids[r.source], &ids[r.target], &spec.name)
            .category(&spec.category)
            .sentence(r.sentence)
            .paragraph(format!("p{}", r.paragraph + 1));
        for (k, v) in r.properties {
            rs = rs.with_property(k, v);
        }
        builder.add_relationship(rs).map_err(err)?;
    }
    Ok(builder.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apportion_is_exact() {
        assert_eq!(apportion(10, &[0.5, 0.25, 0.25]), vec![5, 3, 2]);
        assert_eq!(apportion(7, &[1.0, 1.0, 1.0]), vec![3, 2, 2]);
        assert_eq!(apportion(0, &[1.0]), vec![0]);
    }

    #[test]
    fn empty_targets_give_empty_graph() {
        let cfg = SyntheticConfig { nodes: 0, relationships: 0, properties: 0, ..SyntheticConfig::default() };
        assert!(generate_synthetic(&cfg).unwrap().is_empty());
    }

    #[test]
    fn too_few_properties_is_unachievable() {
        let cfg = SyntheticConfig { properties: 100, ..SyntheticConfig::default() };
        assert!(matches!(generate_synthetic(&cfg), Err(IngestError::UnachievableTargets(_))));
    }

    #[test]
    fn small_config_hits_targets() {
        let cfg = SyntheticConfig { nodes: 30, relationships: 80, properties: 400, ..SyntheticConfig::default() };
        let stats = generate_synthetic(&cfg).unwrap().stats();
        assert_eq!((stats.total_nodes, stats.total_relationships, stats.total_properties), (30, 80, 400));
    }
}
