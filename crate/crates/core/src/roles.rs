//! Local role of every node, decided by comparing its centrality with its neighbours'.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::centrality::CentralityVector;
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Local peak: no neighbour scores higher and at least one scores lower.
    Hub,
    Inner,
    /// Local trough with degree ≥ 2.
    Boundary,
    Leaf,
    /// Scores exactly like every neighbour.
    Isolated,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Hub => "hub",
            Role::Inner => "inner",
            Role::Boundary => "boundary",
            Role::Leaf => "leaf",
            Role::Isolated => "isolated",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleCounts {
    pub hub: usize,
    pub boundary: usize,
    pub isolated: usize,
    pub leaf: usize,
    pub inner: usize,
}

impl RoleCounts {
    pub fn total(&self) -> usize {
        self.hub + self.boundary + self.isolated + self.leaf + self.inner
    }

    fn bump(&mut self, role: Role) {
        match role {
            Role::Hub => self.hub += 1,
            Role::Inner => self.inner += 1,
            Role::Boundary => self.boundary += 1,
            Role::Leaf => self.leaf += 1,
            Role::Isolated => self.isolated += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleAssignment {
    roles: Vec<Role>,
    hubs: Vec<NodeId>,
    counts: RoleCounts,
}

impl RoleAssignment {
    pub fn role(&self, node: NodeId) -> Role {
        self.roles[node as usize]
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// Hubs in ascending node order; hub `k` seeds end-community `k`.
    pub fn hubs(&self) -> &[NodeId] {
        &self.hubs
    }

    pub fn counts(&self) -> RoleCounts {
        self.counts
    }

    /// `node_id,role` lines with a header, using external ids.
    pub fn to_csv(&self, g: &Graph) -> String {
        let mut out = String::from("node_id,role\n");
        for (i, role) in self.roles.iter().enumerate() {
            out.push_str(g.label(i as NodeId));
            out.push(',');
            out.push_str(role.as_str());
            out.push('\n');
        }
        out
    }
}

fn classify_node(g: &Graph, c: &CentralityVector, i: NodeId) -> Role {
    let (mut above, mut below) = (0usize, 0usize);
    for &j in g.neighbors(i) {
        match c.compare(i, j) {
            Ordering::Greater => below += 1,
            Ordering::Less => above += 1,
            Ordering::Equal => {}
        }
    }
    let degree = g.degree(i);
    if above == 0 && below > 0 {
        Role::Hub
    } else if above == 0 && below == 0 {
        Role::Isolated
    } else if degree == 1 {
        Role::Leaf
    } else if above == degree {
        Role::Boundary
    } else {
        Role::Inner
    }
}

pub fn classify_roles(g: &Graph, c: &CentralityVector) -> RoleAssignment {
    let roles: Vec<Role> = g.nodes().map(|i| classify_node(g, c, i)).collect();
    let mut counts = RoleCounts::default();
    let mut hubs = Vec::new();
    for (i, &role) in roles.iter().enumerate() {
        counts.bump(role);
        if role == Role::Hub {
            hubs.push(i as NodeId);
        }
    }
    RoleAssignment { roles, hubs, counts }
}
