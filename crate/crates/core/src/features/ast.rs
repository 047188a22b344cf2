//! Tree 3-grams: vertical `kind(parent) -> kind(child) -> kind(grandchild)`
//! chains, counted per seed.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{chain_key, extract_sparse, FeatureKind, FeatureVector, KeyedCounts};
use crate::corpus::{Corpus, SeedProgram};
use crate::error::{Error, Result};
use crate::registry::DimensionRegistry;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstNode {
    pub kind: String,
    #[serde(default)]
    pub children: Vec<AstNode>,
}

impl AstNode {
    pub fn leaf(kind: impl Into<String>) -> Self {
        AstNode {
            kind: kind.into(),
            children: Vec::new(),
        }
    }

    pub fn new(kind: impl Into<String>, children: Vec<AstNode>) -> Self {
        AstNode {
            kind: kind.into(),
            children,
        }
    }

    /// Pre-order traversal without recursion.
    pub fn preorder(&self) -> impl Iterator<Item = &AstNode> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    pub fn size(&self) -> usize {
        self.preorder().count()
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        match self.preorder().find(|n| n.kind.is_empty()) {
            Some(_) => Err("node with empty kind".into()),
            None => Ok(()),
        }
    }

    pub fn from_json(seed: &str, text: &str) -> Result<Self> {
        let node: AstNode = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("AST of seed {seed:?}"), e))?;
        node.validate()
            .map_err(|m| Error::parse(format!("AST of seed {seed:?}"), m))?;
        Ok(node)
    }
}

/// Vertical 3-gram counts in pre-order first-occurrence order.
pub fn ast_chains(root: &AstNode) -> KeyedCounts {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut out: KeyedCounts = Vec::new();
    for parent in root.preorder() {
        for child in &parent.children {
            for grandchild in &child.children {
                let key = chain_key(&parent.kind, &child.kind, &grandchild.kind);
                match index.get(&key) {
                    Some(&i) => out[i].1 += 1.0,
                    None => {
                        index.insert(key.clone(), out.len());
                        out.push((key, 1.0));
                    }
                }
            }
        }
    }
    out
}

/// The seed's AST: the serialized tree if present, else the built-in frontend.
pub fn seed_ast(seed: &SeedProgram) -> Result<AstNode> {
    if let Some(side) = &seed.ast {
        return AstNode::from_json(&seed.id, &side.text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(side.describe(&seed.id, "AST"), message),
            other => other,
        });
    }
    match &seed.source_text {
        Some(_) => super::frontend::build_frontend_repr(seed).map(|(ast, _)| ast),
        None => Err(Error::MissingRepresentation {
            seed: seed.id.clone(),
            repr: "AST (no ast file and no source text)",
        }),
    }
}

pub fn ast_3gram_vectors(corpus: &Corpus) -> Result<(DimensionRegistry, Vec<FeatureVector>)> {
    extract_sparse(corpus, FeatureKind::Ast3Gram, |seed| {
        seed_ast(seed).map(|ast| ast_chains(&ast))
    })
}
