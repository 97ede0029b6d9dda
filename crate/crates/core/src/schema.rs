//! Joint taxonomy: names, alias weights, kinematic tree, torso and leg groups.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Number of joints in the default quadruped taxonomy.
pub const JOINT_COUNT: usize = 20;

/// The four leg chains, ordered front-left, front-right, back-left, back-right.
pub const LEG_NAMES: [&str; 4] = ["front_left", "front_right", "back_left", "back_right"];

/// Joint taxonomy of the skeleton: which joints exist, how they are wired
/// into a kinematic tree, which are torso vs. leg joints, and the alias
/// blend weights used for multimodal heatmap targets.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonSchema {
    pub joint_names: Vec<String>,
    /// Row-stochastic J x J alias blend weights.
    pub alias_weights: Vec<Vec<f64>>,
    /// Unordered joint pairs connected by a bone, stored with j < k.
    pub bones: Vec<(usize, usize)>,
    pub torso_joints: Vec<usize>,
    /// Four leg chains, each ordered root-side to extremity.
    pub legs: BTreeMap<String, Vec<usize>>,
}

/// Serialized schema document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    joints: Vec<String>,
    /// Off-identity alias entries as (joint, alias, weight) triples.
    aliases: Vec<(usize, usize, f64)>,
    bones: Vec<(usize, usize)>,
    torso: Vec<usize>,
    legs: BTreeMap<String, Vec<usize>>,
}

impl SkeletonSchema {
    /// The default 20-joint quadruped: spine, neck/head chain, tail, and
    /// four three-joint legs. Leg joints alias their left/right mirror.
    pub fn default_quadruped() -> Self {
        let joint_names: Vec<String> = [
            "spine_mid",    // 0, root
            "spine_front",  // 1
            "spine_rear",   // 2
            "neck",         // 3
            "head",         // 4
            "nose",         // 5
            "tail_base",    // 6
            "tail_tip",     // 7
            "fl_shoulder",  // 8
            "fl_knee",      // 9
            "fl_foot",      // 10
            "fr_shoulder",  // 11
            "fr_knee",      // 12
            "fr_foot",      // 13
            "bl_hip",       // 14
            "bl_knee",      // 15
            "bl_foot",      // 16
            "br_hip",       // 17
            "br_knee",      // 18
            "br_foot",      // 19
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();

        let bones = vec![
            (0, 1),
            (0, 2),
            (1, 3),
            (3, 4),
            (4, 5),
            (2, 6),
            (6, 7),
            (1, 8),
            (8, 9),
            (9, 10),
            (1, 11),
            (11, 12),
            (12, 13),
            (2, 14),
            (14, 15),
            (15, 16),
            (2, 17),
            (17, 18),
            (18, 19),
        ];

        let mut legs = BTreeMap::new();
        legs.insert("front_left".to_string(), vec![8, 9, 10]);
        legs.insert("front_right".to_string(), vec![11, 12, 13]);
        legs.insert("back_left".to_string(), vec![14, 15, 16]);
        legs.insert("back_right".to_string(), vec![17, 18, 19]);

        let j = joint_names.len();
        let mut alias_weights = vec![vec![0.0; j]; j];
        for (row, w) in alias_weights.iter_mut().enumerate() {
            w[row] = 1.0;
        }
        // Leg joints blend 0.75 onto themselves and 0.25 onto their
        // left/right mirror.
        for (a, b) in [(8, 11), (9, 12), (10, 13), (14, 17), (15, 18), (16, 19)] {
            for (x, y) in [(a, b), (b, a)] {
                alias_weights[x][x] = 0.75;
                alias_weights[x][y] = 0.25;
            }
        }

        SkeletonSchema {
            joint_names,
            alias_weights,
            bones,
            torso_joints: vec![0, 1, 2, 3, 6],
            legs,
        }
    }

    pub fn joint_count(&self) -> usize {
        self.joint_names.len()
    }

    pub fn bone_count(&self) -> usize {
        self.bones.len()
    }

    /// Index of the joint a leg joint aliases with, if any.
    pub fn alias_of(&self, joint: usize) -> Option<usize> {
        self.alias_weights[joint]
            .iter()
            .enumerate()
            .find(|&(k, &w)| k != joint && w > 0.0)
            .map(|(k, _)| k)
    }

    /// All joints belonging to some leg chain.
    pub fn leg_joints(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.legs.values().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn is_leg_joint(&self, joint: usize) -> bool {
        self.legs.values().any(|leg| leg.contains(&joint))
    }

    /// Children of each joint in the tree rooted at joint 0.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let j = self.joint_count();
        let mut adj = vec![Vec::new(); j];
        for &(a, b) in &self.bones {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut children = vec![Vec::new(); j];
        let mut seen = vec![false; j];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for &c in &adj[p] {
                if !seen[c] {
                    seen[c] = true;
                    children[p].push(c);
                    stack.push(c);
                }
            }
        }
        for ch in &mut children {
            ch.sort_unstable();
        }
        children
    }

    /// Joints with at least one child; only these carry pose angles.
    pub fn internal_joints(&self) -> Vec<usize> {
        self.children()
            .iter()
            .enumerate()
            .filter(|(_, ch)| !ch.is_empty())
            .map(|(j, _)| j)
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut aliases = Vec::new();
        for (j, row) in self.alias_weights.iter().enumerate() {
            for (k, &w) in row.iter().enumerate() {
                if w > 0.0 && !(j == k && (w - 1.0).abs() < 1e-12) {
                    aliases.push((j, k, w));
                }
            }
        }
        serde_json::to_value(SchemaDoc {
            joints: self.joint_names.clone(),
            aliases,
            bones: self.bones.clone(),
            torso: self.torso_joints.clone(),
            legs: self.legs.clone(),
        })
        .expect("schema serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: SchemaDoc = serde_json::from_value(value.clone())?;
        let j = doc.joints.len();
        let mut alias_weights = vec![vec![0.0; j]; j];
        for (row, w) in alias_weights.iter_mut().enumerate() {
            w[row] = 1.0;
        }
        for (a, b, w) in doc.aliases {
            if a >= j || b >= j {
                return Err(Error::InvalidArgument(format!(
                    "alias entry ({a},{b}) out of range for {j} joints"
                )));
            }
            if a == b {
                alias_weights[a][a] = w;
            } else {
                alias_weights[a][b] = w;
                alias_weights[a][a] = 1.0 - w;
            }
        }
        Ok(SkeletonSchema {
            joint_names: doc.joints,
            alias_weights,
            bones: doc.bones,
            torso_joints: doc.torso,
            legs: doc.legs,
        })
    }
}

/// Checks every schema invariant, returning human-readable violations.
/// An empty list means the schema is well formed.
pub fn validate_schema(schema: &SkeletonSchema) -> Vec<String> {
    let mut violations = Vec::new();
    let j = schema.joint_count();

    if schema.alias_weights.len() != j || schema.alias_weights.iter().any(|r| r.len() != j) {
        violations.push(format!("alias_weights is not {j}x{j}"));
        return violations;
    }

    for (row, weights) in schema.alias_weights.iter().enumerate() {
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            violations.push(format!(
                "alias row for joint {} ({}) sums to {}, expected 1",
                row, schema.joint_names[row], sum
            ));
        }
        if weights.iter().any(|&w| w < 0.0) {
            violations.push(format!("alias row for joint {row} has a negative weight"));
        }
    }

    for joint in 0..j {
        let own = schema.alias_weights[joint][joint];
        if schema.is_leg_joint(joint) {
            if (own - 0.75).abs() > 1e-9 {
                violations.push(format!(
                    "leg joint {} ({}) has self weight {}, expected 0.75",
                    joint, schema.joint_names[joint], own
                ));
            }
            match schema.alias_of(joint) {
                Some(alias) => {
                    let w = schema.alias_weights[joint][alias];
                    if (w - 0.25).abs() > 1e-9 {
                        violations.push(format!(
                            "leg joint {joint} alias weight is {w}, expected 0.25"
                        ));
                    }
                }
                None => violations.push(format!("leg joint {joint} has no alias")),
            }
        } else if (own - 1.0).abs() > 1e-9 {
            violations.push(format!(
                "non-leg joint {} ({}) has self weight {}, expected 1",
                joint, schema.joint_names[joint], own
            ));
        }
    }

    // The kinematic tree must be connected and acyclic over all J joints.
    if schema.bones.len() + 1 != j {
        violations.push(format!(
            "kinematic tree has {} bones, expected {} for {} joints",
            schema.bones.len(),
            j - 1,
            j
        ));
    }
    let mut parent: Vec<usize> = (0..j).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut has_cycle = false;
    for &(a, b) in &schema.bones {
        if a >= j || b >= j {
            violations.push(format!("bone ({a},{b}) references a joint out of range"));
            continue;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            has_cycle = true;
        } else {
            parent[ra] = rb;
        }
    }
    if has_cycle {
        violations.push("kinematic tree has cycle".to_string());
    }
    let root = find(&mut parent, 0);
    if (0..j).any(|x| find(&mut parent, x) != root) {
        violations.push("kinematic tree is not connected".to_string());
    }

    if schema.torso_joints.is_empty() {
        violations.push("torso_joints is empty".to_string());
    }
    let extremities: Vec<usize> = schema
        .legs
        .values()
        .filter_map(|leg| leg.last().copied())
        .collect();
    for &t in &schema.torso_joints {
        if extremities.contains(&t) {
            violations.push(format!("torso joint {t} is a leg extremity"));
        }
    }
    if schema.legs.len() != 4 {
        violations.push(format!("expected 4 legs, found {}", schema.legs.len()));
    }

    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schema_is_valid() {
        let schema = SkeletonSchema::default_quadruped();
        assert_eq!(schema.joint_count(), JOINT_COUNT);
        assert_eq!(schema.bone_count(), JOINT_COUNT - 1);
        assert!(validate_schema(&schema).is_empty());
    }

    #[test]
    fn bad_alias_row_is_reported() {
        let mut schema = SkeletonSchema::default_quadruped();
        schema.alias_weights[4][4] = 1.1;
        let violations = validate_schema(&schema);
        assert_eq!(violations.len(), 2, "{violations:?}"); // row sum + self weight
        assert!(violations[0].contains("head"));
    }

    #[test]
    fn cycle_is_reported() {
        let mut schema = SkeletonSchema::default_quadruped();
        schema.bones[0] = (9, 10); // duplicate edge forms a cycle, disconnects 1
        let violations = validate_schema(&schema);
        assert!(violations.iter().any(|v| v == "kinematic tree has cycle"));
    }

    #[test]
    fn alias_lookup() {
        let schema = SkeletonSchema::default_quadruped();
        assert_eq!(schema.alias_of(9), Some(12));
        assert_eq!(schema.alias_of(12), Some(9));
        assert_eq!(schema.alias_of(4), None);
    }

    #[test]
    fn internal_joints_exclude_extremities() {
        let schema = SkeletonSchema::default_quadruped();
        let internal = schema.internal_joints();
        assert_eq!(internal.len(), 14);
        for leaf in [5, 7, 10, 13, 16, 19] {
            assert!(!internal.contains(&leaf));
        }
    }

    #[test]
    fn schema_json_round_trip() {
        let schema = SkeletonSchema::default_quadruped();
        let json = schema.to_json();
        let back = SkeletonSchema::from_json(&json).unwrap();
        assert_eq!(schema, back);
    }
}
