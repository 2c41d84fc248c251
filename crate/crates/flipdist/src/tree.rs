//! Binary trees, rotations, and the dual-tree bijection with triangulations.
//!
//! A triangulation of the `n`-gon maps to a binary tree with `n - 2`
//! internal nodes. The side `(0, n-1)` is the root; a node for edge `(a, b)`
//! whose triangle has apex `c` gets `(a, c)` as left child and `(c, b)` as
//! right child. Polygon sides `(i, i+1)` are the external leaves, numbered
//! by `i`, which is also their in-order position.

use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::convex::{Edge, Triangulation, VertexId};
use crate::distance::{self, DistanceError};

/// A child slot: another internal node or an external leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Child {
    Internal(usize),
    External(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node {0} is the root and cannot be rotated")]
    IsRoot(usize),
    #[error("node {0} is not an internal node")]
    NotInternal(usize),
    #[error("trees have {0} and {1} internal nodes")]
    SizeMismatch(usize, usize),
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// A rooted binary tree with `m` internal nodes and `m + 1` leaves.
///
/// Node ids are stable under rotation. Equality and hashing compare shape
/// only, so two trees built in different ways are equal iff they have the
/// same preorder serialization.
#[derive(Debug, Clone)]
pub struct BinaryTree {
    left: Vec<Child>,
    right: Vec<Child>,
    root: usize,
}

impl BinaryTree {
    /// Builds a tree from child arrays, checking that it is a single rooted
    /// tree using every internal node and leaves `0..=m` exactly once.
    pub fn from_children(left: Vec<Child>, right: Vec<Child>, root: usize) -> Result<Self, TreeError> {
        let m = left.len();
        if m == 0 || right.len() != m || root >= m {
            return Err(TreeError::Malformed("child arrays do not describe a tree".into()));
        }
        let mut seen_internal = vec![false; m];
        let mut seen_leaf = vec![false; m + 1];
        let mut stack = vec![root];
        seen_internal[root] = true;
        while let Some(v) = stack.pop() {
            for c in [left[v], right[v]] {
                match c {
                    Child::Internal(u) => {
                        if u >= m || seen_internal[u] {
                            return Err(TreeError::Malformed(format!(
                                "internal node {u} reached twice or out of range"
                            )));
                        }
                        seen_internal[u] = true;
                        stack.push(u);
                    }
                    Child::External(l) => {
                        if l > m || seen_leaf[l] {
                            return Err(TreeError::Malformed(format!("leaf {l} reached twice or out of range")));
                        }
                        seen_leaf[l] = true;
                    }
                }
            }
        }
        if seen_internal.iter().any(|s| !s) || seen_leaf.iter().any(|s| !s) {
            return Err(TreeError::Malformed("tree is not connected".into()));
        }
        Ok(BinaryTree { left, right, root })
    }

    pub fn internal_count(&self) -> usize {
        self.left.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn left(&self, v: usize) -> Child {
        self.left[v]
    }

    pub fn right(&self, v: usize) -> Child {
        self.right[v]
    }

    /// Parent of internal node `v`, or `None` for the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        (0..self.internal_count()).find(|&p| self.left[p] == Child::Internal(v) || self.right[p] == Child::Internal(v))
    }

    /// Rotates internal node `node` above its parent.
    ///
    /// If `node` is the left child of `p`, `p` becomes its right child, `node`
    /// keeps its left subtree, `p` keeps its right subtree, and `node`'s old
    /// right subtree becomes `p`'s left subtree. The right-child case is the
    /// mirror image.
    pub fn rotate(&self, node: usize) -> Result<BinaryTree, TreeError> {
        if node >= self.internal_count() {
            return Err(TreeError::NotInternal(node));
        }
        let p = self.parent(node).ok_or(TreeError::IsRoot(node))?;
        let grand = self.parent(p);
        let mut t = self.clone();
        if self.left[p] == Child::Internal(node) {
            t.left[p] = self.right[node];
            t.right[node] = Child::Internal(p);
        } else {
            t.right[p] = self.left[node];
            t.left[node] = Child::Internal(p);
        }
        match grand {
            None => t.root = node,
            Some(g) => {
                if t.left[g] == Child::Internal(p) {
                    t.left[g] = Child::Internal(node);
                } else {
                    t.right[g] = Child::Internal(node);
                }
            }
        }
        Ok(t)
    }

    /// Every tree reachable by one rotation, paired with the rotated node.
    pub fn rotation_neighbors(&self) -> Vec<(usize, BinaryTree)> {
        (0..self.internal_count())
            .filter(|&v| v != self.root)
            .map(|v| (v, self.rotate(v).expect("non-root internal node")))
            .collect()
    }

    /// Preorder serialization, `I` for internal and `E` for external nodes.
    pub fn to_preorder(&self) -> String {
        let mut tokens = Vec::with_capacity(2 * self.internal_count() + 1);
        self.preorder_tokens(Child::Internal(self.root), &mut tokens);
        tokens.join(" ")
    }

    fn preorder_tokens(&self, c: Child, out: &mut Vec<&'static str>) {
        match c {
            Child::External(_) => out.push("E"),
            Child::Internal(v) => {
                out.push("I");
                self.preorder_tokens(self.left[v], out);
                self.preorder_tokens(self.right[v], out);
            }
        }
    }

    /// Parses a preorder token string. Internal nodes are numbered in
    /// preorder, leaves in in-order.
    pub fn from_preorder(s: &str) -> Result<BinaryTree, TreeError> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut pos = 0;
        let mut leaves = 0;
        let root = parse_node(&tokens, &mut pos, &mut left, &mut right, &mut leaves)?;
        if pos != tokens.len() {
            return Err(TreeError::Malformed(format!("trailing tokens after position {pos}")));
        }
        match root {
            Child::Internal(r) => BinaryTree::from_children(left, right, r),
            Child::External(_) => Err(TreeError::Malformed("tree needs at least one internal node".into())),
        }
    }

    /// Leaf interval `(lo, hi)` spanned by each internal node, counting
    /// leaves by in-order position.
    fn spans(&self) -> Vec<(usize, usize)> {
        let mut spans = vec![(0, 0); self.internal_count()];
        let mut next_leaf = 0;
        self.fill_spans(Child::Internal(self.root), &mut spans, &mut next_leaf);
        spans
    }

    fn fill_spans(&self, c: Child, spans: &mut [(usize, usize)], next_leaf: &mut usize) -> (usize, usize) {
        match c {
            Child::External(_) => {
                let l = *next_leaf;
                *next_leaf += 1;
                (l, l)
            }
            Child::Internal(v) => {
                let (lo, _) = self.fill_spans(self.left[v], spans, next_leaf);
                let (_, hi) = self.fill_spans(self.right[v], spans, next_leaf);
                spans[v] = (lo, hi);
                (lo, hi)
            }
        }
    }

    /// The polygon edge dual to internal node `v`.
    pub fn edge_of(&self, v: usize) -> Edge {
        let (lo, hi) = self.spans()[v];
        Edge::new(lo, hi + 1)
    }
}

fn parse_node(
    tokens: &[&str],
    pos: &mut usize,
    left: &mut Vec<Child>,
    right: &mut Vec<Child>,
    leaves: &mut usize,
) -> Result<Child, TreeError> {
    let tok = tokens.get(*pos).ok_or_else(|| TreeError::Malformed("unexpected end of preorder".into()))?;
    *pos += 1;
    match *tok {
        "E" => {
            *leaves += 1;
            Ok(Child::External(*leaves - 1))
        }
        "I" => {
            let id = left.len();
            left.push(Child::External(usize::MAX));
            right.push(Child::External(usize::MAX));
            let l = parse_node(tokens, pos, left, right, leaves)?;
            let r = parse_node(tokens, pos, left, right, leaves)?;
            left[id] = l;
            right[id] = r;
            Ok(Child::Internal(id))
        }
        other => Err(TreeError::Malformed(format!("unknown token {other:?}"))),
    }
}

impl PartialEq for BinaryTree {
    fn eq(&self, other: &Self) -> bool {
        self.to_preorder() == other.to_preorder()
    }
}

impl Eq for BinaryTree {}

impl Hash for BinaryTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.to_preorder().hash(state);
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_preorder())
    }
}

/// The dual binary tree of `t`, rooted at side `(0, n-1)`.
pub fn tree_from_triangulation(t: &Triangulation) -> BinaryTree {
    let adj = t.adjacency();
    let m = t.n() - 2;
    let mut left = Vec::with_capacity(m);
    let mut right = Vec::with_capacity(m);
    build_node(&adj, 0, t.n() - 1, &mut left, &mut right);
    BinaryTree { left, right, root: 0 }
}

fn build_node(adj: &[Vec<VertexId>], a: VertexId, b: VertexId, left: &mut Vec<Child>, right: &mut Vec<Child>) -> Child {
    if b == a + 1 {
        return Child::External(a);
    }
    let id = left.len();
    left.push(Child::External(usize::MAX));
    right.push(Child::External(usize::MAX));
    let c = adj[a].iter().copied().filter(|&v| v > a && v < b).max().expect("triangle over (a, b)");
    let l = build_node(adj, a, c, left, right);
    let r = build_node(adj, c, b, left, right);
    left[id] = l;
    right[id] = r;
    Child::Internal(id)
}

/// Inverse of [`tree_from_triangulation`]: the `(m + 2)`-gon whose diagonals
/// are the non-root internal nodes.
pub fn triangulation_from_tree(b: &BinaryTree) -> Triangulation {
    let n = b.internal_count() + 2;
    let spans = b.spans();
    let diagonals = (0..b.internal_count()).filter(|&v| v != b.root).map(|v| Edge::new(spans[v].0, spans[v].1 + 1));
    Triangulation::new(n, diagonals).expect("spans of a binary tree are laminar")
}

/// Rotation distance, computed as the flip distance of the dual
/// triangulations.
pub fn rotation_distance(b1: &BinaryTree, b2: &BinaryTree) -> Result<usize, TreeError> {
    if b1.internal_count() != b2.internal_count() {
        return Err(TreeError::SizeMismatch(b1.internal_count(), b2.internal_count()));
    }
    let (d, _) = distance::exact_distance(&triangulation_from_tree(b1), &triangulation_from_tree(b2))?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::enumerate;
    use std::collections::HashSet;

    #[test]
    fn single_node_cannot_rotate() {
        let t = BinaryTree::from_preorder("I E E").unwrap();
        assert_eq!(t.rotate(0), Err(TreeError::IsRoot(0)));
        assert_eq!(t.rotate(3), Err(TreeError::NotInternal(3)));
    }

    #[test]
    fn two_nodes_rotate_to_other_shape() {
        let t = BinaryTree::from_preorder("I I E E E").unwrap();
        let r = t.rotate(1).unwrap();
        assert_eq!(r.to_preorder(), "I E I E E");
    }

    #[test]
    fn rotation_round_trip_on_chain() {
        let t = BinaryTree::from_preorder("I I I E E E E").unwrap();
        for v in [1, 2] {
            let r = t.rotate(v).unwrap();
            let p = t.parent(v).unwrap();
            assert_eq!(r.rotate(p).unwrap(), t);
        }
    }

    #[test]
    fn preorder_rejects_garbage() {
        assert!(BinaryTree::from_preorder("E").is_err());
        assert!(BinaryTree::from_preorder("I E").is_err());
        assert!(BinaryTree::from_preorder("I E E E").is_err());
        assert!(BinaryTree::from_preorder("I E X").is_err());
    }

    #[test]
    fn triangle_maps_to_single_node() {
        let t = Triangulation::new(3, []).unwrap();
        let b = tree_from_triangulation(&t);
        assert_eq!(b.internal_count(), 1);
        assert_eq!(triangulation_from_tree(&b), t);
    }

    #[test]
    fn hexagon_bijection() {
        let all = enumerate(6).unwrap();
        let trees: HashSet<BinaryTree> = all.iter().map(tree_from_triangulation).collect();
        assert_eq!(trees.len(), 14);
        for t in &all {
            assert_eq!(&triangulation_from_tree(&tree_from_triangulation(t)), t);
        }
    }

    #[test]
    fn node_edges_match_diagonals() {
        let t = Triangulation::from_pairs(6, &[(0, 2), (2, 5), (3, 5)]).unwrap();
        let b = tree_from_triangulation(&t);
        let mut edges: Vec<Edge> = (0..b.internal_count()).map(|v| b.edge_of(v)).collect();
        edges.sort();
        assert_eq!(edges, vec![Edge::new(0, 2), Edge::new(0, 5), Edge::new(2, 5), Edge::new(3, 5)]);
    }

    #[test]
    fn distances_of_small_trees() {
        let a = BinaryTree::from_preorder("I I E E E").unwrap();
        let b = BinaryTree::from_preorder("I E I E E").unwrap();
        assert_eq!(rotation_distance(&a, &a).unwrap(), 0);
        assert_eq!(rotation_distance(&a, &b).unwrap(), 1);
        let c = BinaryTree::from_preorder("I E E").unwrap();
        assert_eq!(rotation_distance(&a, &c), Err(TreeError::SizeMismatch(2, 1)));
    }
}
