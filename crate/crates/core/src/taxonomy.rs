//! Component class hierarchy.
//!
//! Symbolic descriptor values are nodes of a rooted tree. Two labels are
//! compared through the depth of their lowest common ancestor, using the
//! Wu–Palmer ratio `2·depth(lca) / (depth(a) + depth(b))`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct Node {
    name: String,
    parent: Option<usize>,
    depth: usize,
}

/// A rooted, single-inheritance tree of component classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Taxonomy {
    nodes: Vec<Node>,
    index: BTreeMap<String, usize>,
}

impl Taxonomy {
    /// Builds a taxonomy from `(name, parent)` records given in any order.
    /// Exactly one record must have no parent.
    pub fn from_records<I, S>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Option<S>)>,
        S: Into<String>,
    {
        let records: Vec<(String, Option<String>)> = records
            .into_iter()
            .map(|(n, p)| (n.into(), p.map(Into::into)))
            .collect();

        let mut position = BTreeMap::new();
        for (i, (name, _)) in records.iter().enumerate() {
            if position.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidTaxonomy(format!("duplicate node `{name}`")));
            }
        }
        let roots: Vec<&str> = records
            .iter()
            .filter(|(_, p)| p.is_none())
            .map(|(n, _)| n.as_str())
            .collect();
        match roots.len() {
            0 if records.is_empty() => {
                return Err(Error::InvalidTaxonomy("taxonomy has no nodes".into()))
            }
            0 => return Err(Error::InvalidTaxonomy("no root node".into())),
            1 => {}
            _ => {
                return Err(Error::InvalidTaxonomy(format!(
                    "multiple roots: {}",
                    roots.join(", ")
                )))
            }
        }
        for (name, parent) in &records {
            if let Some(p) = parent {
                if !position.contains_key(p) {
                    return Err(Error::InvalidTaxonomy(format!(
                        "node `{name}` has unknown parent `{p}`"
                    )));
                }
            }
        }

        // Breadth-first from the root so parents always precede children.
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); records.len()];
        let mut root = 0;
        for (i, (_, parent)) in records.iter().enumerate() {
            match parent {
                Some(p) => children[position[p]].push(i),
                None => root = i,
            }
        }
        let mut nodes = Vec::with_capacity(records.len());
        let mut index = BTreeMap::new();
        let mut queue = std::collections::VecDeque::from([(root, None, 0usize)]);
        while let Some((rec, parent, depth)) = queue.pop_front() {
            let id = nodes.len();
            nodes.push(Node {
                name: records[rec].0.clone(),
                parent,
                depth,
            });
            index.insert(records[rec].0.clone(), id);
            for &c in &children[rec] {
                queue.push_back((c, Some(id), depth + 1));
            }
        }
        if nodes.len() != records.len() {
            return Err(Error::InvalidTaxonomy(
                "cycle detected: some nodes are unreachable from the root".into(),
            ));
        }
        Ok(Self { nodes, index })
    }

    pub fn root(&self) -> &str {
        &self.nodes[0].name
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn depth(&self, name: &str) -> Result<usize> {
        Ok(self.nodes[self.lookup(name)?].depth)
    }

    pub fn parent(&self, name: &str) -> Result<Option<&str>> {
        let node = &self.nodes[self.lookup(name)?];
        Ok(node.parent.map(|p| self.nodes[p].name.as_str()))
    }

    /// `(name, parent)` records in breadth-first order from the root.
    pub fn records(&self) -> impl Iterator<Item = (&str, Option<&str>)> + '_ {
        self.nodes.iter().map(|n| {
            (
                n.name.as_str(),
                n.parent.map(|p| self.nodes[p].name.as_str()),
            )
        })
    }

    fn lookup(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    fn lca_index(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent.expect("non-root has a parent");
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent.expect("non-root has a parent");
        }
        while a != b {
            a = self.nodes[a].parent.expect("non-root has a parent");
            b = self.nodes[b].parent.expect("non-root has a parent");
        }
        a
    }

    /// Deepest node that is an ancestor-or-self of both labels.
    pub fn lowest_common_ancestor(&self, a: &str, b: &str) -> Result<&str> {
        let (ia, ib) = (self.lookup(a)?, self.lookup(b)?);
        Ok(&self.nodes[self.lca_index(ia, ib)].name)
    }

    /// Wu–Palmer similarity of two labels, in `[0, 1]`.
    pub fn value_similarity(&self, a: &str, b: &str) -> Result<f64> {
        let (ia, ib) = (self.lookup(a)?, self.lookup(b)?);
        if ia == ib {
            return Ok(1.0);
        }
        let lca = self.nodes[self.lca_index(ia, ib)].depth;
        let total = self.nodes[ia].depth + self.nodes[ib].depth;
        Ok((2 * lca) as f64 / total as f64)
    }
}
