//! Proof JSON. Component names in a node refer to the preorder numbering of
//! that node's conclusion text. In compact mode only the root carries its
//! conclusion and every premise is rebuilt from its parent.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{apply_backward, reindex, Address, Proof, RuleId, RuleInstance, Side};
use crate::formula::Character;
use crate::grammar::Logic;
use crate::sequent::{Name, NestedSequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JsonMode {
    Full,
    Compact,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofJsonError {
    #[error("malformed proof JSON: {0}")]
    Malformed(String),
    #[error("conclusion text: {0}")]
    Sequent(String),
    #[error("cannot normalize proof for compact output: {0}")]
    Normalize(String),
}

#[derive(Serialize, Deserialize)]
struct PrincipalJson {
    side: String,
    index: usize,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    rule: String,
    at: String,
    #[serde(default)]
    principal: Option<PrincipalJson>,
    #[serde(default)]
    character: Option<String>,
    #[serde(default)]
    target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<String>>,
    #[serde(default)]
    conclusion: Option<String>,
    #[serde(default)]
    premises: Vec<NodeJson>,
}

pub fn proof_to_json(p: &Proof, mode: JsonMode, logic: &Logic) -> Result<Value, ProofJsonError> {
    let node = match mode {
        JsonMode::Full => save(p, true, true),
        JsonMode::Compact => {
            let q = p.normalize_to(&p.conclusion, logic).map_err(|e| ProofJsonError::Normalize(e.to_string()))?;
            save(&q, true, false)
        }
    };
    Ok(serde_json::to_value(node).expect("proof nodes serialize"))
}

fn save(p: &Proof, here: bool, below: bool) -> NodeJson {
    let (conc, map) = p.conclusion.renumbered();
    let inst = p.rule.renamed(&map);
    NodeJson {
        rule: inst.rule.as_str().to_string(),
        at: inst.at.to_string(),
        principal: inst.principal.map(|a| PrincipalJson {
            side: match a.side {
                Side::Ant => "ant".into(),
                Side::Out => "out".into(),
            },
            index: a.index,
        }),
        character: inst.character.as_ref().map(Character::to_string),
        target: inst.target.map(|n| n.to_string()),
        witness: inst.witness.as_ref().map(|w| w.iter().map(Character::to_string).collect()),
        conclusion: here.then(|| conc.to_string()),
        premises: p.premises.iter().map(|q| save(q, below, below)).collect(),
    }
}

pub fn proof_from_json(v: &Value, logic: &Logic) -> Result<Proof, ProofJsonError> {
    let node: NodeJson = serde_json::from_value(v.clone()).map_err(|e| ProofJsonError::Malformed(e.to_string()))?;
    load(&node, None, logic)
}

fn name(s: &str) -> Result<Name, ProofJsonError> {
    Name::parse(s).ok_or_else(|| ProofJsonError::Malformed(format!("bad component name `{s}`")))
}

fn instance(node: &NodeJson) -> Result<RuleInstance, ProofJsonError> {
    let rule = RuleId::parse(&node.rule).ok_or_else(|| ProofJsonError::Malformed(format!("unknown rule `{}`", node.rule)))?;
    let principal = match &node.principal {
        None => None,
        Some(p) => Some(match p.side.as_str() {
            "ant" => Address::ant(p.index),
            "out" => Address { side: Side::Out, index: p.index },
            other => return Err(ProofJsonError::Malformed(format!("bad side `{other}`"))),
        }),
    };
    let character = match &node.character {
        None => None,
        Some(c) => Some(Character::parse(c).map_err(|e| ProofJsonError::Malformed(e.to_string()))?),
    };
    let witness = match &node.witness {
        None => None,
        Some(w) => Some(
            w.iter()
                .map(|c| Character::parse(c).map_err(|e| ProofJsonError::Malformed(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    Ok(RuleInstance {
        rule,
        at: name(&node.at)?,
        principal,
        target: node.target.as_deref().map(name).transpose()?,
        character,
        witness,
    })
}

fn load(node: &NodeJson, expected: Option<&NestedSequent>, logic: &Logic) -> Result<Proof, ProofJsonError> {
    let conc = match (&node.conclusion, expected) {
        (Some(t), _) => NestedSequent::parse(t).map_err(|e| ProofJsonError::Sequent(e.to_string()))?,
        (None, Some(e)) => e.renumbered().0,
        (None, None) => return Err(ProofJsonError::Malformed("node without conclusion".into())),
    };
    let inst = instance(node)?;
    let target = expected.cloned().unwrap_or_else(|| conc.clone());
    let Some(map) = conc.iso_map(&target) else {
        // Kept as written; the checker reports the mismatch at the parent.
        let premises = node.premises.iter().map(|q| load(q, None, logic)).collect::<Result<_, _>>()?;
        return Ok(Proof { conclusion: conc, rule: inst, premises });
    };
    let aligned = reindex(&inst, &conc, &target, &map).and_then(|i| apply_backward(&target, &i, logic).map(|ps| (i, ps)));
    match aligned {
        Ok((i, ps)) if ps.len() == node.premises.len() => {
            let premises = node.premises.iter().zip(&ps).map(|(q, e)| load(q, Some(e), logic)).collect::<Result<_, _>>()?;
            Ok(Proof { conclusion: target, rule: i, premises })
        }
        _ => {
            let premises = node.premises.iter().map(|q| load(q, None, logic)).collect::<Result<_, _>>()?;
            Ok(Proof { conclusion: target, rule: inst.renamed(&map), premises })
        }
    }
}
