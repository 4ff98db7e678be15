//! JSON document form of a [`BayesianNetwork`].
//!
//! ```json
//! {"schema": {"labelVar": "...", "questions": [...]},
//!  "nodes": [{"name": "A", "levels": ["0","1"], "parents": [], "cptRows": [[0.4, 0.6]]}]}
//! ```
//!
//! `cptRows` lists one row per parent configuration, last parent fastest.

use serde::{Deserialize, Serialize};

use super::{BayesianNetwork, Cpt, Dag, NetworkError, SurveySchema, DESERIALIZE_ROW_TOLERANCE};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct NodeDocument {
    name: String,
    levels: Vec<String>,
    parents: Vec<String>,
    cpt_rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct NetworkDocument {
    schema: SurveySchema,
    nodes: Vec<NodeDocument>,
}

impl BayesianNetwork {
    pub fn to_json(&self) -> String {
        let schema = self.schema();
        let nodes = self
            .cpts()
            .iter()
            .enumerate()
            .map(|(v, cpt)| NodeDocument {
                name: cpt.variable().to_string(),
                levels: schema.question(v).levels.clone(),
                parents: cpt.parents().to_vec(),
                cpt_rows: cpt.rows().map(<[f64]>::to_vec).collect(),
            })
            .collect();
        let doc = NetworkDocument {
            schema: schema.clone(),
            nodes,
        };
        serde_json::to_string_pretty(&doc).expect("network serializes")
    }

    pub fn from_json(document: &str) -> Result<Self, NetworkError> {
        let doc: NetworkDocument = serde_json::from_str(document)
            .map_err(|e| NetworkError::MalformedDocument(e.to_string()))?;
        let schema = doc.schema;
        let names: Vec<&str> = doc.nodes.iter().map(|n| n.name.as_str()).collect();
        if names != schema.names() {
            return Err(NetworkError::NodeMismatch(
                "node list must follow the schema order".into(),
            ));
        }
        let mut edges = Vec::new();
        for node in &doc.nodes {
            for p in &node.parents {
                edges.push((p.as_str(), node.name.as_str()));
            }
        }
        let dag = Dag::new(&names, &edges)?;
        let mut cpts = Vec::with_capacity(doc.nodes.len());
        for (v, node) in doc.nodes.iter().enumerate() {
            if node.levels != schema.question(v).levels {
                return Err(NetworkError::NodeMismatch(format!(
                    "levels of `{}` differ from the schema",
                    node.name
                )));
            }
            let parents = node
                .parents
                .iter()
                .map(|p| {
                    let idx = schema
                        .index_of(p)
                        .ok_or_else(|| NetworkError::UnknownNode(p.clone()))?;
                    Ok((p.clone(), schema.cardinality(idx)))
                })
                .collect::<Result<Vec<_>, NetworkError>>()?;
            cpts.push(Cpt::with_tolerance(
                &node.name,
                node.levels.len(),
                parents,
                node.cpt_rows.clone(),
                DESERIALIZE_ROW_TOLERANCE,
                true,
            )?);
        }
        BayesianNetwork::new(schema, dag, cpts)
    }
}
