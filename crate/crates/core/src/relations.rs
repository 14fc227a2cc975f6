//! Qualitative spatial relations between tabletop objects.
//!
//! Every relation decomposes into one order constraint per table axis plus an
//! optional stacking constraint. Pure horizontal relations (`LeftOf`,
//! `RightOf`) fix a strict order on x and *equality* on y, so
//! `below(X, Y) ∧ right(X, Y)` is contradictory: y-equality against a
//! strict y-order. Consistency is decided per axis by collapsing equalities
//! with union-find and looking for a strict edge inside a class or a cycle
//! between classes.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point2, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    LeftOf,
    RightOf,
    Above,
    Below,
    AboveLeft,
    AboveRight,
    BelowLeft,
    BelowRight,
    OnTopOf,
    CenterOfTable,
}

impl RelationKind {
    pub const ALL: [RelationKind; 10] = [
        RelationKind::LeftOf,
        RelationKind::RightOf,
        RelationKind::Above,
        RelationKind::Below,
        RelationKind::AboveLeft,
        RelationKind::AboveRight,
        RelationKind::BelowLeft,
        RelationKind::BelowRight,
        RelationKind::OnTopOf,
        RelationKind::CenterOfTable,
    ];

    /// English phrase used in prompts and `Place` lines.
    pub fn phrase(self) -> &'static str {
        match self {
            RelationKind::LeftOf => "to the left of",
            RelationKind::RightOf => "to the right of",
            RelationKind::Above => "above",
            RelationKind::Below => "below",
            RelationKind::AboveLeft => "above and to the left of",
            RelationKind::AboveRight => "above and to the right of",
            RelationKind::BelowLeft => "below and to the left of",
            RelationKind::BelowRight => "below and to the right of",
            RelationKind::OnTopOf => "on top of",
            RelationKind::CenterOfTable => "in the center of table",
        }
    }

    pub fn needs_anchor(self) -> bool {
        self != RelationKind::CenterOfTable
    }

    /// Unit direction from anchor to subject on the table plane, `None` for
    /// kinds that do not offset the subject.
    pub fn direction(self) -> Option<(f64, f64)> {
        let d = core::f64::consts::FRAC_1_SQRT_2;
        Some(match self {
            RelationKind::LeftOf => (-1.0, 0.0),
            RelationKind::RightOf => (1.0, 0.0),
            RelationKind::Above => (0.0, 1.0),
            RelationKind::Below => (0.0, -1.0),
            RelationKind::AboveLeft => (-d, d),
            RelationKind::AboveRight => (d, d),
            RelationKind::BelowLeft => (-d, -d),
            RelationKind::BelowRight => (d, -d),
            RelationKind::OnTopOf | RelationKind::CenterOfTable => return None,
        })
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phrase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub subject: String,
    pub kind: RelationKind,
    /// Absent for [`RelationKind::CenterOfTable`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
}

impl Relation {
    pub fn new(subject: &str, kind: RelationKind, anchor: &str) -> Self {
        Self { subject: subject.into(), kind, anchor: Some(anchor.into()) }
    }

    pub fn center(subject: &str) -> Self {
        Self { subject: subject.into(), kind: RelationKind::CenterOfTable, anchor: None }
    }

    pub fn anchor(&self) -> Option<&str> {
        self.anchor.as_deref()
    }

    pub fn check_well_formed(&self) -> Result<(), RelationError> {
        match (&self.anchor, self.kind.needs_anchor()) {
            (None, true) => Err(RelationError::MissingAnchor(self.subject.clone())),
            (Some(_), false) => Err(RelationError::UnexpectedAnchor(self.subject.clone())),
            (Some(a), true) if *a == self.subject => Err(RelationError::SelfRelation(a.clone())),
            _ => Ok(()),
        }
    }

    /// Renders as a `Place` line, the format the language model is asked for.
    pub fn place_line(&self) -> String {
        match &self.anchor {
            Some(a) => format!("Place {} {} {}.", self.subject, self.kind.phrase(), a),
            None => format!("Place {} {}.", self.subject, self.kind.phrase()),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.anchor {
            Some(a) => write!(f, "{} {} {}", self.subject, self.kind.phrase(), a),
            None => write!(f, "{} {}", self.subject, self.kind.phrase()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("relation on {0:?} needs an anchor")]
    MissingAnchor(String),
    #[error("center relation on {0:?} takes no anchor")]
    UnexpectedAnchor(String),
    #[error("{0:?} cannot be related to itself")]
    SelfRelation(String),
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("stacking relations form a cycle through {0:?}")]
    CyclicStacking(String),
}

/// Relations over a named set of objects.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RelationSet {
    /// Object names; the constructors keep them sorted and deduplicated.
    pub objects: Vec<String>,
    pub relations: Vec<Relation>,
}

impl RelationSet {
    /// Builds a set whose objects are exactly the names the relations mention.
    pub fn from_relations(relations: Vec<Relation>) -> Result<Self, RelationError> {
        let mut objects = BTreeSet::new();
        for r in &relations {
            objects.insert(r.subject.clone());
            if let Some(a) = &r.anchor {
                objects.insert(a.clone());
            }
        }
        Self::with_objects(objects, relations)
    }

    /// Builds a set over an explicit object list; every relation must stay
    /// inside it.
    pub fn with_objects(
        objects: impl IntoIterator<Item = String>,
        relations: Vec<Relation>,
    ) -> Result<Self, RelationError> {
        let objects: BTreeSet<String> = objects.into_iter().collect();
        let set = Self { objects: objects.into_iter().collect(), relations };
        set.check_well_formed()?;
        Ok(set)
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn contains_object(&self, name: &str) -> bool {
        self.objects.iter().any(|o| o == name)
    }

    /// Well-formed relations over known names.
    ///
    /// Two different kinds on one ordered pair always contradict each other
    /// on some axis, so the one-relation-per-pair rule is left to
    /// [`check_consistency`], which reports such pairs as conflicts.
    pub fn check_well_formed(&self) -> Result<(), RelationError> {
        for r in &self.relations {
            r.check_well_formed()?;
            for name in core::iter::once(r.subject.as_str()).chain(r.anchor()) {
                if !self.contains_object(name) {
                    return Err(RelationError::UnknownObject(name.into()));
                }
            }
        }
        Ok(())
    }

    /// Every relation rendered as a `Place` line, one per line.
    pub fn to_place_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            out.push_str(&r.place_line());
            out.push('\n');
        }
        out
    }
}

/// Order of the subject's coordinate relative to the anchor's on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisOrder {
    Less,
    Equal,
    Greater,
    Free,
}

/// What the anchor side of a decomposed relation refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target<'a> {
    Object(&'a str),
    TableOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisConstraints<'a> {
    pub target: Target<'a>,
    pub x: AxisOrder,
    pub y: AxisOrder,
    /// Subject rests on top of the target.
    pub stacked: bool,
}

/// Splits a relation into its per-axis primitives.
pub fn decompose(r: &Relation) -> AxisConstraints<'_> {
    use AxisOrder::*;
    let (x, y, stacked) = match r.kind {
        RelationKind::LeftOf => (Less, Equal, false),
        RelationKind::RightOf => (Greater, Equal, false),
        RelationKind::Above => (Equal, Greater, false),
        RelationKind::Below => (Equal, Less, false),
        RelationKind::AboveLeft => (Less, Greater, false),
        RelationKind::AboveRight => (Greater, Greater, false),
        RelationKind::BelowLeft => (Less, Less, false),
        RelationKind::BelowRight => (Greater, Less, false),
        RelationKind::OnTopOf => (Equal, Equal, true),
        RelationKind::CenterOfTable => (Equal, Equal, false),
    };
    let target = match r.anchor() {
        Some(a) => Target::Object(a),
        None => Target::TableOrigin,
    };
    AxisConstraints { target, x, y, stacked }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Stack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConflictKind {
    /// A strict order between two objects that other relations force equal.
    EqualityClash,
    /// Strict orders that chain back to their start.
    StrictCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub axis: Axis,
    pub kind: ConflictKind,
    /// Indices into the checked set's relations, ascending.
    pub relations: Vec<usize>,
}

impl Conflict {
    /// Human-readable explanation, numbering relations from 1.
    pub fn explain(&self, set: &RelationSet) -> String {
        let axis = match self.axis {
            Axis::X => "x-axis",
            Axis::Y => "y-axis",
            Axis::Stack => "stacking",
        };
        let what = match self.kind {
            ConflictKind::EqualityClash => "strict order between objects forced equal",
            ConflictKind::StrictCycle => "cyclic strict order",
        };
        let mut s = format!("{axis} conflict ({what}):");
        for &i in &self.relations {
            s.push_str(&format!("\n  step {}: {}", i + 1, set.relations[i]));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyVerdict {
    conflict: Option<Conflict>,
}

impl ConsistencyVerdict {
    pub fn consistent() -> Self {
        Self { conflict: None }
    }

    pub fn inconsistent(conflict: Conflict) -> Self {
        Self { conflict: Some(conflict) }
    }

    pub fn is_consistent(&self) -> bool {
        self.conflict.is_none()
    }

    pub fn conflict(&self) -> Option<&Conflict> {
        self.conflict.as_ref()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Edge `lo -> hi` meaning value(lo) < value(hi), labelled with its relation.
#[derive(Clone, Copy)]
struct Edge {
    lo: usize,
    hi: usize,
    rel: usize,
}

struct AxisGraph {
    equal: Vec<Edge>,
    strict: Vec<Edge>,
}

/// Shortest path in an undirected labelled graph, returning edge labels.
fn equality_path(n: usize, edges: &[Edge], from: usize, to: usize) -> Vec<usize> {
    if from == to {
        return Vec::new();
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.lo].push((e.hi, e.rel));
        adj[e.hi].push((e.lo, e.rel));
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &(v, rel) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                prev[v] = Some((u, rel));
                queue.push_back(v);
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = to;
    while let Some((p, rel)) = prev[cur] {
        out.push(rel);
        cur = p;
    }
    out
}

fn check_axis(n: usize, g: &AxisGraph, axis: Axis) -> Option<Conflict> {
    let mut uf = UnionFind::new(n);
    for e in &g.equal {
        uf.union(e.lo, e.hi);
    }

    // Strict edge inside one equality class.
    for e in &g.strict {
        if uf.find(e.lo) == uf.find(e.hi) {
            let mut rels = equality_path(n, &g.equal, e.lo, e.hi);
            rels.push(e.rel);
            return Some(finish(axis, ConflictKind::EqualityClash, rels));
        }
    }

    // Shortest cycle in the class graph: for each strict edge u->v, the
    // shortest class path v ~> u closes it.
    let class: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, e) in g.strict.iter().enumerate() {
        out[class[e.lo]].push((class[e.hi], k));
    }
    let mut best: Option<Vec<usize>> = None;
    for (k0, e0) in g.strict.iter().enumerate() {
        let (start, goal) = (class[e0.hi], class[e0.lo]);
        let mut prev: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        let mut found = start == goal;
        while let Some(u) = queue.pop_front() {
            if u == goal {
                found = true;
                break;
            }
            for &(v, k) in &out[u] {
                if seen.insert(v) {
                    prev.insert(v, (u, k));
                    queue.push_back(v);
                }
            }
        }
        if !found {
            continue;
        }
        let mut cycle = vec![k0];
        let mut cur = goal;
        while cur != start {
            let (p, k) = prev[&cur];
            cycle.push(k);
            cur = p;
        }
        if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
            best = Some(cycle);
        }
    }
    let cycle = best?;

    // Strict edges of the cycle plus the equalities that join consecutive
    // edge endpoints inside each class.
    let mut rels = Vec::new();
    let ordered: Vec<Edge> = {
        // walk edges in chain order starting from the closing edge
        let mut chain = vec![g.strict[cycle[0]]];
        let rest: Vec<Edge> = cycle[1..].iter().rev().map(|&k| g.strict[k]).collect();
        chain.extend(rest);
        chain
    };
    for (i, e) in ordered.iter().enumerate() {
        rels.push(e.rel);
        let next = ordered[(i + 1) % ordered.len()];
        rels.extend(equality_path(n, &g.equal, e.hi, next.lo));
    }
    Some(finish(axis, ConflictKind::StrictCycle, rels))
}

fn finish(axis: Axis, kind: ConflictKind, mut rels: Vec<usize>) -> Conflict {
    rels.sort_unstable();
    rels.dedup();
    Conflict { axis, kind, relations: rels }
}

/// Decides whether some placement satisfies every relation.
///
/// Axes are independent, so the set is consistent iff the x constraints,
/// the y constraints and the stacking graph are each satisfiable. The
/// returned conflict lists the relations that together cannot hold.
pub fn check_consistency(rs: &RelationSet) -> Result<ConsistencyVerdict, RelationError> {
    rs.check_well_formed()?;
    let index: BTreeMap<&str, usize> = rs.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    let origin = rs.objects.len();
    let n = origin + 1;

    let mut x = AxisGraph { equal: Vec::new(), strict: Vec::new() };
    let mut y = AxisGraph { equal: Vec::new(), strict: Vec::new() };
    let mut stack = AxisGraph { equal: Vec::new(), strict: Vec::new() };
    for (rel, r) in rs.relations.iter().enumerate() {
        let c = decompose(r);
        let s = index[r.subject.as_str()];
        let t = match c.target {
            Target::Object(a) => index[a],
            Target::TableOrigin => origin,
        };
        for (order, g) in [(c.x, &mut x), (c.y, &mut y)] {
            match order {
                AxisOrder::Less => g.strict.push(Edge { lo: s, hi: t, rel }),
                AxisOrder::Greater => g.strict.push(Edge { lo: t, hi: s, rel }),
                AxisOrder::Equal => g.equal.push(Edge { lo: s, hi: t, rel }),
                AxisOrder::Free => {}
            }
        }
        if c.stacked {
            stack.strict.push(Edge { lo: t, hi: s, rel });
        }
    }

    for (g, axis) in [(&x, Axis::X), (&y, Axis::Y), (&stack, Axis::Stack)] {
        if let Some(conflict) = check_axis(n, g, axis) {
            return Ok(ConsistencyVerdict::inconsistent(conflict));
        }
    }
    Ok(ConsistencyVerdict::consistent())
}

/// Stack bases before the objects resting on them; otherwise lexicographic.
pub fn placement_order(rs: &RelationSet) -> Result<Vec<String>, RelationError> {
    let mut indegree: BTreeMap<&str, usize> = rs.objects.iter().map(|o| (o.as_str(), 0)).collect();
    let mut above: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in rs.relations.iter().filter(|r| r.kind == RelationKind::OnTopOf) {
        let base = r.anchor().ok_or_else(|| RelationError::MissingAnchor(r.subject.clone()))?;
        for name in [r.subject.as_str(), base] {
            if !indegree.contains_key(name) {
                return Err(RelationError::UnknownObject(name.into()));
            }
        }
        *indegree.get_mut(r.subject.as_str()).unwrap() += 1;
        above.entry(base).or_default().push(r.subject.as_str());
    }
    let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&o, _)| o).collect();
    let mut order = Vec::with_capacity(rs.objects.len());
    while let Some(next) = ready.pop_first() {
        order.push(String::from(next));
        for &top in above.get(next).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indegree.get_mut(top).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.insert(top);
            }
        }
    }
    if order.len() != rs.objects.len() {
        let stuck = indegree.iter().find(|(_, &d)| d > 0).map(|(&o, _)| o).unwrap_or_default();
        return Err(RelationError::CyclicStacking(stuck.into()));
    }
    Ok(order)
}

/// Stack level of every object: 0 on the table, base level + 1 when stacked.
pub fn stack_levels(rs: &RelationSet) -> Result<BTreeMap<String, u32>, RelationError> {
    let order = placement_order(rs)?;
    let mut level: BTreeMap<String, u32> = order.iter().map(|o| (o.clone(), 0)).collect();
    for name in &order {
        for r in rs.relations.iter().filter(|r| r.kind == RelationKind::OnTopOf && &r.subject == name) {
            let base = level[r.anchor().unwrap()];
            let l = level.get_mut(name).unwrap();
            *l = (*l).max(base + 1);
        }
    }
    Ok(level)
}

fn axis_ok(order: AxisOrder, subject: f64, anchor: f64, band: f64) -> bool {
    match order {
        AxisOrder::Less => subject < anchor,
        AxisOrder::Greater => subject > anchor,
        AxisOrder::Equal => (subject - anchor).abs() <= band,
        AxisOrder::Free => true,
    }
}

/// Geometric test of a relation on table-frame positions. Strict orders need
/// strict inequality; equalities hold within `band`. For
/// [`RelationKind::CenterOfTable`] the anchor position is ignored and the
/// table origin is used.
pub fn satisfied(r: &Relation, subject: Point2, anchor: Point2, band: f64) -> bool {
    let c = decompose(r);
    let anchor = match c.target {
        Target::Object(_) => anchor,
        Target::TableOrigin => Point2::ORIGIN,
    };
    axis_ok(c.x, subject.x, anchor.x, band) && axis_ok(c.y, subject.y, anchor.y, band)
}

/// Default equality band for a pair: half the larger footprint extent.
pub fn default_band(a: &Shape, b: Option<&Shape>) -> f64 {
    0.5 * b.map_or(a.max_extent(), |b| a.max_extent().max(b.max_extent()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use RelationKind::*;

    fn set(rels: Vec<Relation>) -> RelationSet {
        RelationSet::from_relations(rels).unwrap()
    }

    pub(crate) fn six_step_example() -> RelationSet {
        set(vec![
            Relation::center("fruit bowl"),
            Relation::new("butter knife", AboveRight, "fruit bowl"),
            Relation::new("dinner fork", LeftOf, "butter knife"),
            Relation::new("dinner knife", RightOf, "butter knife"),
            Relation::new("fruit bowl", RightOf, "dinner fork"),
            Relation::new("water cup", BelowLeft, "dinner knife"),
        ])
    }

    #[test]
    fn decompose_primitives() {
        let r = Relation::new("fork", LeftOf, "knife");
        let c = decompose(&r);
        assert_eq!((c.x, c.y, c.stacked), (AxisOrder::Less, AxisOrder::Equal, false));
        assert_eq!(c.target, Target::Object("knife"));
        let r = Relation::new("bread", OnTopOf, "plate");
        let c = decompose(&r);
        assert_eq!((c.x, c.y, c.stacked), (AxisOrder::Equal, AxisOrder::Equal, true));
        let r = Relation::center("plate");
        let c = decompose(&r);
        assert_eq!((c.x, c.y, c.target), (AxisOrder::Equal, AxisOrder::Equal, Target::TableOrigin));
        let r = Relation::new("cup", AboveRight, "plate");
        let c = decompose(&r);
        assert_eq!((c.x, c.y), (AxisOrder::Greater, AxisOrder::Greater));
    }

    #[test]
    fn six_step_example_is_inconsistent_on_y() {
        let rs = six_step_example();
        let v = check_consistency(&rs).unwrap();
        let c = v.conflict().expect("conflict");
        assert_eq!(c.axis, Axis::Y);
        assert_eq!(c.kind, ConflictKind::EqualityClash);
        // steps 2, 3 and 5 (0-based 1, 2, 4)
        assert_eq!(c.relations, vec![1, 2, 4]);
        let text = c.explain(&rs);
        assert!(text.contains("step 2:") && text.contains("step 3:") && text.contains("step 5:"));
    }

    #[test]
    fn below_and_right_is_inconsistent() {
        let rs = set(vec![Relation::new("x", Below, "y"), Relation::new("x", RightOf, "y")]);
        let c = check_consistency(&rs).unwrap().conflict().cloned().unwrap();
        assert_eq!((c.axis, c.relations), (Axis::X, vec![0, 1]));
        // same rule through the inverse direction
        let rs = set(vec![Relation::new("x", Below, "y"), Relation::new("y", LeftOf, "x")]);
        let v = check_consistency(&rs).unwrap();
        assert_eq!(v.conflict().unwrap().axis, Axis::X);
    }

    #[test]
    fn empty_is_consistent() {
        assert!(check_consistency(&RelationSet::default()).unwrap().is_consistent());
    }

    #[test]
    fn fork_left_knife_right_consistent() {
        let rs = set(vec![Relation::new("fork", LeftOf, "plate"), Relation::new("knife", RightOf, "plate")]);
        assert!(check_consistency(&rs).unwrap().is_consistent());
    }

    #[test]
    fn strict_cycle_reports_all_edges() {
        let rs = set(vec![
            Relation::new("a", LeftOf, "b"),
            Relation::new("b", BelowLeft, "c"),
            Relation::new("c", AboveLeft, "a"),
        ]);
        let c = check_consistency(&rs).unwrap().conflict().cloned().unwrap();
        assert_eq!(c.axis, Axis::X);
        assert_eq!(c.kind, ConflictKind::StrictCycle);
        assert_eq!(c.relations, vec![0, 1, 2]);
    }

    #[test]
    fn stacking_cycle() {
        let rs = set(vec![Relation::new("a", OnTopOf, "b"), Relation::new("b", OnTopOf, "a")]);
        let c = check_consistency(&rs).unwrap().conflict().cloned().unwrap();
        assert_eq!(c.axis, Axis::Stack);
        assert_eq!(placement_order(&rs), Err(RelationError::CyclicStacking("a".into())));
    }

    #[test]
    fn unknown_object_is_an_error() {
        let rs = RelationSet { objects: vec!["a".into()], relations: vec![Relation::new("a", LeftOf, "b")] };
        assert_eq!(check_consistency(&rs), Err(RelationError::UnknownObject("b".into())));
    }

    #[test]
    fn placement_order_examples() {
        let rs = set(vec![Relation::new("bread", OnTopOf, "plate")]);
        assert_eq!(placement_order(&rs).unwrap(), vec!["plate", "bread"]);
        let rs = RelationSet::with_objects(["plate".into(), "knife".into(), "fork".into()], vec![]).unwrap();
        assert_eq!(placement_order(&rs).unwrap(), vec!["fork", "knife", "plate"]);
        let rs = set(vec![Relation::new("lid", OnTopOf, "mug"), Relation::new("mug", OnTopOf, "mat")]);
        assert_eq!(placement_order(&rs).unwrap(), vec!["mat", "mug", "lid"]);
        let levels = stack_levels(&rs).unwrap();
        assert_eq!((levels["mat"], levels["mug"], levels["lid"]), (0, 1, 2));
    }

    #[test]
    fn satisfied_examples() {
        let r = Relation::new("fork", LeftOf, "knife");
        assert!(satisfied(&r, Point2::new(-0.10, 0.0), Point2::new(0.10, 0.01), 0.05));
        assert!(!satisfied(&r, Point2::new(-0.10, 0.08), Point2::new(0.10, 0.0), 0.05));
        let r = Relation::new("cup", Below, "knife");
        for band in [0.0, 0.05, 1.0] {
            assert!(satisfied(&r, Point2::new(0.0, -0.15), Point2::ORIGIN, band));
        }
        let r = Relation::center("plate");
        assert!(satisfied(&r, Point2::new(0.01, -0.01), Point2::new(5.0, 5.0), 0.02));
    }

    #[test]
    fn place_lines_render() {
        assert_eq!(
            Relation::new("butter knife", AboveRight, "fruit bowl").place_line(),
            "Place butter knife above and to the right of fruit bowl."
        );
        assert_eq!(Relation::center("fruit bowl").place_line(), "Place fruit bowl in the center of table.");
    }

    #[test]
    fn well_formedness() {
        assert_eq!(Relation::new("a", LeftOf, "a").check_well_formed(), Err(RelationError::SelfRelation("a".into())));
        let r = Relation { subject: "a".into(), kind: LeftOf, anchor: None };
        assert_eq!(r.check_well_formed(), Err(RelationError::MissingAnchor("a".into())));
    }
}
