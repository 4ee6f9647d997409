//! Rooted trees with node heights, UPGMA reconstruction, clade cuts and Newick I/O.
//!
//! Heights are measured in years before the reference date. A branch length is
//! the parent height minus the child height. Trees built by [`upgma`] are
//! binary and ultrametric; trees read with [`Phylogeny::from_newick`] may have
//! polytomies and unequal root-to-leaf depths, in which case leaf heights are
//! measured from the deepest leaf.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::chronology::TimeMatrix;
use crate::condensed::Condensed;
use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub label: Option<String>,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub height: f64,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phylogeny {
    nodes: Vec<Node>,
    root: NodeId,
}

/// Incremental construction of a [`Phylogeny`] from the leaves up.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, label: impl Into<String>) -> NodeId {
        self.leaf_at(label, 0.0)
    }

    pub fn leaf_at(&mut self, label: impl Into<String>, height: f64) -> NodeId {
        self.nodes.push(Node {
            label: Some(label.into()),
            children: Vec::new(),
            parent: None,
            height,
        });
        self.nodes.len() - 1
    }

    pub fn internal(&mut self, children: Vec<NodeId>, height: f64) -> NodeId {
        let id = self.nodes.len();
        for &c in &children {
            assert!(self.nodes[c].parent.is_none(), "node {c} already has a parent");
            self.nodes[c].parent = Some(id);
        }
        self.nodes.push(Node {
            label: None,
            children,
            parent: None,
            height,
        });
        id
    }

    pub fn finish(self, root: NodeId) -> Result<Phylogeny> {
        let tree = Phylogeny {
            nodes: self.nodes,
            root,
        };
        tree.validate()?;
        Ok(tree)
    }
}

impl Phylogeny {
    fn validate(&self) -> Result<()> {
        if self.nodes[self.root].parent.is_some() {
            return Err(Error::InvalidInput("root has a parent".into()));
        }
        let mut seen = HashSet::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.is_leaf() {
                let label = node
                    .label
                    .as_deref()
                    .filter(|l| !l.is_empty())
                    .ok_or_else(|| Error::InvalidInput("unlabelled leaf".into()))?;
                if !seen.insert(label) {
                    return Err(Error::InvalidInput(format!("leaf label `{label}` repeated")));
                }
            }
            for &c in &node.children {
                if self.nodes[c].height > node.height {
                    return Err(Error::InvalidInput(format!(
                        "child height {} above parent height {}",
                        self.nodes[c].height, node.height
                    )));
                }
                stack.push(c);
            }
        }
        Ok(())
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn height(&self, id: NodeId) -> f64 {
        self.nodes[id].height
    }

    pub fn root_height(&self) -> f64 {
        self.height(self.root)
    }

    /// Zero for the root.
    pub fn branch_length(&self, id: NodeId) -> f64 {
        match self.nodes[id].parent {
            Some(p) => self.nodes[p].height - self.nodes[id].height,
            None => 0.0,
        }
    }

    /// Nodes reachable from the root in preorder, children in stored order.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev());
        }
        out
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.preorder()
            .into_iter()
            .filter(|&id| self.nodes[id].is_leaf())
            .collect()
    }

    pub fn leaf_labels(&self) -> BTreeSet<String> {
        self.leaves()
            .into_iter()
            .filter_map(|id| self.nodes[id].label.clone())
            .collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    pub fn find_leaf(&self, label: &str) -> Option<NodeId> {
        self.leaves()
            .into_iter()
            .find(|&id| self.nodes[id].label.as_deref() == Some(label))
    }

    /// Leaf labels below `id`.
    pub fn clade(&self, id: NodeId) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node.is_leaf() {
                out.extend(node.label.clone());
            }
            stack.extend(&node.children);
        }
        out
    }

    /// Every internal node's leaf set with its height.
    pub fn clusters(&self) -> BTreeMap<BTreeSet<String>, f64> {
        self.preorder()
            .into_iter()
            .filter(|&id| !self.nodes[id].is_leaf())
            .map(|id| (self.clade(id), self.nodes[id].height))
            .collect()
    }

    /// True when every leaf sits within `tol` of height zero.
    pub fn is_ultrametric(&self, tol: f64) -> bool {
        self.leaves()
            .into_iter()
            .all(|id| self.nodes[id].height.abs() <= tol)
    }

    /// Copy with every height multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Phylogeny {
        let mut out = self.clone();
        for node in &mut out.nodes {
            node.height *= factor;
        }
        out
    }

    fn mrca(&self, a: NodeId, b: NodeId) -> NodeId {
        let mut ancestors = HashSet::new();
        let mut cur = Some(a);
        while let Some(id) = cur {
            ancestors.insert(id);
            cur = self.nodes[id].parent;
        }
        let mut cur = b;
        while !ancestors.contains(&cur) {
            cur = self.nodes[cur].parent.expect("nodes share a root");
        }
        cur
    }

    /// Path length through the tree between every pair of leaves, rows in `labels` order.
    pub fn patristic(&self, labels: &[String]) -> Result<Condensed<f64>> {
        let ids: Vec<NodeId> = labels
            .iter()
            .map(|l| self.find_leaf(l).ok_or_else(|| Error::UnknownLabel(l.clone())))
            .collect::<Result<_>>()?;
        Condensed::from_fn(labels.to_vec(), |i, j| {
            let m = self.height(self.mrca(ids[i], ids[j]));
            (m - self.height(ids[i])) + (m - self.height(ids[j]))
        })
    }

    fn min_labels(&self) -> Vec<String> {
        let mut min: Vec<Option<String>> = vec![None; self.nodes.len()];
        for &id in self.preorder().iter().rev() {
            let node = &self.nodes[id];
            min[id] = if node.is_leaf() {
                node.label.clone()
            } else {
                node.children.iter().filter_map(|&c| min[c].clone()).min()
            };
        }
        min.into_iter().map(Option::unwrap_or_default).collect()
    }

    fn write_newick(&self, annotations: Option<&HashMap<String, usize>>) -> String {
        let min = self.min_labels();
        let mut out = String::new();
        self.write_node(self.root, &min, annotations, &mut out);
        out.push(';');
        out
    }

    fn write_node(
        &self,
        id: NodeId,
        min: &[String],
        annotations: Option<&HashMap<String, usize>>,
        out: &mut String,
    ) {
        let node = &self.nodes[id];
        if !node.is_leaf() {
            let mut children = node.children.clone();
            children.sort_by(|&a, &b| min[a].cmp(&min[b]));
            out.push('(');
            for (k, &c) in children.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                self.write_node(c, min, annotations, out);
            }
            out.push(')');
        }
        if let Some(label) = &node.label {
            out.push_str(&quote_label(label));
            if let Some(group) = annotations.and_then(|a| a.get(label)) {
                let _ = write!(out, "[&group={group}]");
            }
        }
        if let Some(parent) = node.parent {
            // differences of rounded heights, so every root-to-leaf path sums
            // to the rounded root height
            let length = centi(self.height(parent)) - centi(node.height);
            let _ = write!(out, ":{}.{:02}", length / 100, length % 100);
        }
    }

    /// Newick with branch lengths in years (two decimals). Children are ordered
    /// by their smallest leaf label. Lengths are differences of node heights
    /// rounded to two decimals.
    pub fn to_newick(&self) -> String {
        self.write_newick(None)
    }

    /// Newick with a `[&group=k]` comment after each leaf listed in `groups`.
    pub fn to_newick_annotated(&self, groups: &HashMap<String, usize>) -> String {
        self.write_newick(Some(groups))
    }

    pub fn from_newick(text: &str) -> Result<Phylogeny> {
        NewickParser::new(text).parse()
    }
}

/// Height in hundredths of a year.
fn centi(height: f64) -> i64 {
    (height * 100.0).round() as i64
}

fn quote_label(label: &str) -> String {
    const RESERVED: &[char] = &['(', ')', '[', ']', '\'', ':', ';', ','];
    if label.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_owned()
    }
}

struct NewickParser<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

struct RawNode {
    label: Option<String>,
    length: Option<f64>,
    children: Vec<RawNode>,
}

impl<'a> NewickParser<'a> {
    fn new(src: &'a str) -> Self {
        NewickParser {
            chars: src.chars().collect(),
            pos: 0,
            _src: src,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: 1 + self.chars[..self.pos.min(self.chars.len())]
                .iter()
                .filter(|&&c| c == '\n')
                .count(),
            message: format!("newick, offset {}: {}", self.pos, message.into()),
        }
    }

    fn skip_ws(&mut self) -> Result<()> {
        loop {
            match self.chars.get(self.pos) {
                Some(c) if c.is_whitespace() => self.pos += 1,
                Some('[') => {
                    while self.chars.get(self.pos) != Some(&']') {
                        if self.pos >= self.chars.len() {
                            return Err(self.err("unterminated comment"));
                        }
                        self.pos += 1;
                    }
                    self.pos += 1;
                }
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<char>> {
        self.skip_ws()?;
        Ok(self.chars.get(self.pos).copied())
    }

    fn parse(mut self) -> Result<Phylogeny> {
        let raw = self.subtree()?;
        if self.peek()? != Some(';') {
            return Err(self.err("expected `;`"));
        }
        self.pos += 1;
        if self.peek()?.is_some() {
            return Err(self.err("trailing characters after `;`"));
        }
        build_from_raw(raw).map_err(|e| match e {
            Error::InvalidInput(m) => Error::Parse {
                line: 1,
                message: format!("newick: {m}"),
            },
            other => other,
        })
    }

    fn subtree(&mut self) -> Result<RawNode> {
        let mut children = Vec::new();
        if self.peek()? == Some('(') {
            self.pos += 1;
            loop {
                children.push(self.subtree()?);
                match self.peek()? {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected `,` or `)`")),
                }
            }
        }
        let label = self.label()?;
        let length = if self.peek()? == Some(':') {
            self.pos += 1;
            Some(self.number()?)
        } else {
            None
        };
        if children.is_empty() && label.is_none() {
            return Err(self.err("leaf without a label"));
        }
        Ok(RawNode {
            label,
            length,
            children,
        })
    }

    fn label(&mut self) -> Result<Option<String>> {
        match self.peek()? {
            Some('\'') => {
                self.pos += 1;
                let mut s = String::new();
                loop {
                    match self.chars.get(self.pos) {
                        None => return Err(self.err("unterminated quoted label")),
                        Some('\'') if self.chars.get(self.pos + 1) == Some(&'\'') => {
                            s.push('\'');
                            self.pos += 2;
                        }
                        Some('\'') => {
                            self.pos += 1;
                            return Ok(Some(s));
                        }
                        Some(&c) => {
                            s.push(c);
                            self.pos += 1;
                        }
                    }
                }
            }
            _ => {
                let start = self.pos;
                while let Some(&c) = self.chars.get(self.pos) {
                    if c.is_whitespace() || "()[]':;,".contains(c) {
                        break;
                    }
                    self.pos += 1;
                }
                Ok((self.pos > start).then(|| self.chars[start..self.pos].iter().collect()))
            }
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws()?;
        let start = self.pos;
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() || "+-.eE".contains(c) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let v: f64 = text
            .parse()
            .map_err(|_| self.err(format!("bad branch length `{text}`")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(self.err(format!("branch length `{text}` must be finite and non-negative")));
        }
        Ok(v)
    }
}

fn build_from_raw(root: RawNode) -> Result<Phylogeny> {
    // depth of every node, then heights measured from the deepest leaf
    let mut flat: Vec<(Option<String>, Option<usize>, f64)> = Vec::new();
    let mut stack: Vec<(RawNode, Option<usize>, f64)> = vec![(root, None, 0.0)];
    let mut children_of: Vec<Vec<usize>> = Vec::new();
    while let Some((node, parent, parent_depth)) = stack.pop() {
        let depth = match (parent, node.length) {
            (None, _) => 0.0,
            (Some(_), Some(len)) => parent_depth + len,
            (Some(_), None) => {
                return Err(Error::InvalidInput(format!(
                    "branch length missing above `{}`",
                    node.label.as_deref().unwrap_or("internal node")
                )))
            }
        };
        let id = flat.len();
        flat.push((node.label, parent, depth));
        children_of.push(Vec::new());
        if let Some(p) = parent {
            children_of[p].push(id);
        }
        for child in node.children.into_iter().rev() {
            stack.push((child, Some(id), depth));
        }
    }
    let max_depth = flat.iter().map(|n| n.2).fold(0.0, f64::max);
    let nodes = flat
        .into_iter()
        .zip(children_of)
        .map(|((label, parent, depth), children)| Node {
            label,
            children,
            parent,
            height: max_depth - depth,
        })
        .collect();
    let tree = Phylogeny { nodes, root: 0 };
    tree.validate()?;
    Ok(tree)
}

/// Average-linkage agglomerative clustering.
///
/// The input holds pairwise separation times; a merge at linkage `d` creates a
/// node at height `d / 2`. Ties in linkage are broken by the pair of cluster
/// keys (smallest leaf label of each cluster) in lexicographic order, and the
/// size-weighted update always combines the two merged clusters in key order,
/// so the result does not depend on the order of the input rows.
pub fn upgma(tm: &TimeMatrix) -> Result<Phylogeny> {
    upgma_condensed(tm.as_condensed())
}

pub fn upgma_condensed(m: &Condensed<f64>) -> Result<Phylogeny> {
    let n = m.order();
    if n < 2 {
        return Err(Error::InvalidInput(format!("UPGMA needs at least 2 taxa, got {n}")));
    }
    if let Some((i, j, v)) = m.pairs().find(|&(_, _, v)| v.is_nan() || v < 0.0) {
        return Err(Error::InvalidInput(format!(
            "entry {v} between `{}` and `{}` is not a non-negative number",
            m.labels()[i],
            m.labels()[j]
        )));
    }

    struct Cluster {
        node: NodeId,
        size: usize,
        key: String,
    }

    let mut builder = TreeBuilder::new();
    let mut clusters: Vec<Option<Cluster>> = m
        .labels()
        .iter()
        .map(|l| {
            Some(Cluster {
                node: builder.leaf(l.clone()),
                size: 1,
                key: l.clone(),
            })
        })
        .collect();
    let mut dist = vec![0.0f64; n * n];
    for (i, j, v) in m.pairs() {
        dist[i * n + j] = v;
        dist[j * n + i] = v;
    }

    let mut root = 0;
    for _ in 1..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            let Some(ci) = &clusters[i] else { continue };
            for j in i + 1..n {
                let Some(cj) = &clusters[j] else { continue };
                let d = dist[i * n + j];
                let better = match best {
                    None => true,
                    Some((bd, bi, bj)) => {
                        let key = |k: usize| clusters[k].as_ref().unwrap().key.as_str();
                        d < bd || (d == bd && ordered(&ci.key, &cj.key) < ordered(key(bi), key(bj)))
                    }
                };
                if better {
                    best = Some((d, i, j));
                }
            }
        }
        let (d, i, j) = best.expect("at least two active clusters");
        let a = clusters[i].take().unwrap();
        let b = clusters[j].take().unwrap();
        // first/second by key, so the update is independent of row order
        let (first, second) = if a.key <= b.key { (&a, &b) } else { (&b, &a) };
        let (fi, si) = if a.key <= b.key { (i, j) } else { (j, i) };
        let node = builder.internal(vec![first.node, second.node], d / 2.0);
        let total = (first.size + second.size) as f64;
        for k in 0..n {
            if clusters[k].is_none() {
                continue;
            }
            let v = (first.size as f64 * dist[fi * n + k] + second.size as f64 * dist[si * n + k])
                / total;
            dist[i * n + k] = v;
            dist[k * n + i] = v;
        }
        clusters[i] = Some(Cluster {
            node,
            size: first.size + second.size,
            key: first.key.clone(),
        });
        root = node;
    }
    builder.finish(root)
}

fn ordered<'s>(a: &'s str, b: &'s str) -> (&'s str, &'s str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn tie_tolerance(h: f64) -> f64 {
    1e-9 * h.abs().max(1.0)
}

/// Splits the tree into exactly `count` clades by undoing the `count - 1`
/// highest merges. Clades are returned ordered by their smallest label.
pub fn partitions_at_depth(tree: &Phylogeny, count: usize) -> Result<Vec<BTreeSet<String>>> {
    let n = tree.leaf_count();
    if count == 0 || count > n {
        return Err(Error::Range(format!(
            "clade count {count} outside 1..={n}"
        )));
    }
    let mut open: Vec<NodeId> = vec![tree.root()];
    while open.len() < count {
        // highest internal node still intact
        let (pos, &id) = open
            .iter()
            .enumerate()
            .filter(|(_, &id)| !tree.node(id).is_leaf())
            .max_by(|a, b| tree.height(*a.1).total_cmp(&tree.height(*b.1)))
            .expect("count <= leaf count");
        open.swap_remove(pos);
        open.extend(tree.node(id).children.iter().copied());
        if open.len() > count {
            return Err(Error::Range(format!(
                "a multifurcation at height {} skips over {count} clades",
                tree.height(id)
            )));
        }
        if open.len() == count {
            let h = tree.height(id);
            let mut tied: Vec<f64> = open
                .iter()
                .filter(|&&o| !tree.node(o).is_leaf())
                .map(|&o| tree.height(o))
                .filter(|&o| (o - h).abs() <= tie_tolerance(h))
                .collect();
            if !tied.is_empty() {
                tied.insert(0, h);
                return Err(Error::AmbiguousCut {
                    count,
                    heights: tied,
                });
            }
        }
    }
    let mut parts: Vec<BTreeSet<String>> = open.into_iter().map(|id| tree.clade(id)).collect();
    parts.sort();
    Ok(parts)
}

/// Group index (1-based, clades ordered by smallest label) for every leaf.
pub fn group_assignments(tree: &Phylogeny, count: usize) -> Result<HashMap<String, usize>> {
    Ok(partitions_at_depth(tree, count)?
        .into_iter()
        .enumerate()
        .flat_map(|(k, set)| set.into_iter().map(move |l| (l, k + 1)))
        .collect())
}
