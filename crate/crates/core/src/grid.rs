//! Typed data model for the hybrid AC/DC network, market zones and
//! candidate assets, plus structural validation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electrical side of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Ac,
    Dc,
}

/// Network a branch belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Ac,
    Dc,
}

/// Whether an asset is already in service or a candidate for investment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssetStatus {
    Existing,
    Candidate,
}

/// Generation technology, following the merit-order classes of the test
/// case. Candidate offshore wind plants get their own class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenClass {
    Pv,
    Hydro,
    OnshoreWind,
    OffshoreWind,
    OtherRes,
    GasCcgt,
    Nuclear,
    GasOcgt,
    Coal,
    PumpStorage,
    PowerToGas,
    OtherNonRes,
    LightOil,
    HeavyOil,
    ShaleOil,
    Owpp,
}

/// Aggregation buckets used for the re-dispatch cost breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RedispatchClass {
    Res,
    Ccgt,
    Ocgt,
    Rest,
    Voll,
}

impl GenClass {
    /// True for technologies with no fuel cost to avoid when regulating
    /// down. Their avoided variable cost in re-dispatch is zero.
    pub fn is_res(self) -> bool {
        matches!(
            self,
            GenClass::Pv
                | GenClass::Hydro
                | GenClass::OnshoreWind
                | GenClass::OffshoreWind
                | GenClass::OtherRes
                | GenClass::Owpp
        )
    }

    /// Bucket used when reporting re-dispatch cost shares.
    pub fn redispatch_class(self) -> RedispatchClass {
        match self {
            _ if self.is_res() => RedispatchClass::Res,
            GenClass::GasCcgt => RedispatchClass::Ccgt,
            GenClass::GasOcgt => RedispatchClass::Ocgt,
            _ => RedispatchClass::Rest,
        }
    }
}

/// Network node. AC nodes may host generators, demands and storage; DC
/// nodes carry only converter endpoints and DC branches.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Market zone label (the home/EEZ zone; regimes may remap it).
    pub zone_id: String,
    pub latitude: f64,
    pub longitude: f64,
    /// Maximum expansion capacity of a candidate converter at this node, MW.
    #[serde(default)]
    pub converter_cap_limit: f64,
    /// Maximum expansion capacity of candidate offshore wind, MW.
    #[serde(default)]
    pub owpp_cap_limit: f64,
    /// Maximum expansion capacity of candidate storage, MWh.
    #[serde(default)]
    pub storage_cap_limit: f64,
}

/// Transmission branch, existing or candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Branch {
    pub id: String,
    pub from: String,
    pub to: String,
    pub network: NetworkKind,
    pub status: AssetStatus,
    /// Susceptance, AC branches only (flow = b/tau * angle difference).
    #[serde(default)]
    pub susceptance: Option<f64>,
    /// Transformer ratio, AC branches only; 1 when no transformer.
    #[serde(default = "one")]
    pub transformer_ratio: f64,
    /// Thermal capacity, MW.
    pub capacity_mw: f64,
    /// Lump-sum investment cost, currency. Candidates only.
    #[serde(default)]
    pub investment_cost: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// Generator, existing or a candidate offshore wind plant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub node: String,
    pub status: AssetStatus,
    pub class: GenClass,
    /// Marginal cost / bid, currency per MWh.
    pub marginal_cost: f64,
    /// Existing: installed capacity. Candidate: expansion limit. MW.
    pub capacity_mw: f64,
    /// Unit investment cost, currency per MW. Candidates only.
    #[serde(default)]
    pub unit_investment: f64,
    /// Availability profile key; `None` means constant 1.
    #[serde(default)]
    pub profile_key: Option<String>,
}

/// Demand with a DSR tranche and a lost-load slack.
///
/// `dsr_limit_mw` bounds the price-responsive tranche; anything shed
/// beyond it is lost load valued at `voll` in the planning objective.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Demand {
    pub id: String,
    pub node: String,
    /// Consumer bid price, currency per MWh.
    pub bid_price: f64,
    /// Demand profile key (values in MW).
    pub profile_key: String,
    pub dsr_price: f64,
    /// Maximum demand-side response, MW.
    #[serde(default)]
    pub dsr_limit_mw: f64,
    pub voll: f64,
    /// Cap applied to reported prices during lost-load hours.
    pub price_cap: f64,
}

/// Storage unit, existing or candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StorageUnit {
    pub id: String,
    pub node: String,
    pub status: AssetStatus,
    /// Existing: rating. Candidate: expansion limit. MWh.
    pub energy_cap_mwh: f64,
    /// Unit investment cost, currency per MWh. Candidates only.
    #[serde(default)]
    pub unit_investment: f64,
    /// Charge efficiency, in (0, 1].
    pub charge_eff: f64,
    /// Discharge efficiency, in (0, 1].
    pub discharge_eff: f64,
    /// Self-discharge per hour, in [0, 1).
    pub self_discharge: f64,
    /// Maximum charge rate as a fraction of the rating per hour.
    pub charge_rate: f64,
    /// Maximum discharge rate as a fraction of the rating per hour.
    pub discharge_rate: f64,
}

/// AC/DC converter attaching an AC node to a DC node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Converter {
    pub id: String,
    pub ac_node: String,
    pub dc_node: String,
    pub status: AssetStatus,
    /// Existing: AC-side rating. Candidate: expansion limit. MW.
    pub capacity_mw: f64,
    /// Unit investment cost, currency per MW. Candidates only.
    #[serde(default)]
    pub unit_investment: f64,
    /// Loss factor, in [0, 1).
    pub loss_factor: f64,
}

/// The complete hybrid AC/DC network.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub branches: Vec<Branch>,
    pub converters: Vec<Converter>,
    pub generators: Vec<Generator>,
    pub demands: Vec<Demand>,
    pub storage: Vec<StorageUnit>,
}

impl Network {
    /// Index of a node by id.
    pub fn node_index(&self, id: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n.id == id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn node(&self, id: &str) -> Result<&Node> {
        self.node_index(id).map(|i| &self.nodes[i])
    }

    /// AC and DC neighbor sets of a node.
    ///
    /// AC neighbors are the far ends of AC branches (existing or
    /// candidate) incident to the node; DC neighbors are the DC sides of
    /// converters attached to it.
    pub fn neighbors(&self, id: &str) -> Result<(BTreeSet<String>, BTreeSet<String>)> {
        self.node_index(id)?;
        let mut ac = BTreeSet::new();
        let mut dc = BTreeSet::new();
        for b in &self.branches {
            if b.network != NetworkKind::Ac {
                continue;
            }
            if b.from == id {
                ac.insert(b.to.clone());
            } else if b.to == id {
                ac.insert(b.from.clone());
            }
        }
        for c in &self.converters {
            if c.ac_node == id {
                dc.insert(c.dc_node.clone());
            }
        }
        Ok((ac, dc))
    }

    /// Home zone map as declared on the nodes.
    pub fn home_zone_map(&self) -> BTreeMap<String, String> {
        self.nodes
            .iter()
            .map(|n| (n.id.clone(), n.zone_id.clone()))
            .collect()
    }
}

/// One validation finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Stable machine-readable code, e.g. `candidate-missing-cost`.
    pub code: String,
    /// Offending entity id.
    pub entity: String,
    pub message: String,
}

/// Outcome of [`validate_network`]. Empty iff the network is well formed.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, code: &str, entity: &str, message: String) {
        self.violations.push(Violation {
            code: code.to_string(),
            entity: entity.to_string(),
            message,
        });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for v in &self.violations {
            writeln!(f, "[{}] {}: {}", v.code, v.entity, v.message)?;
        }
        Ok(())
    }
}

/// Structural validation of a network. Pure and idempotent; returns a
/// report rather than failing on the first finding.
pub fn validate_network(net: &Network) -> ValidationReport {
    let mut report = ValidationReport::default();
    let kind_of: BTreeMap<&str, NodeKind> =
        net.nodes.iter().map(|n| (n.id.as_str(), n.kind)).collect();

    let mut seen = BTreeSet::new();
    for n in &net.nodes {
        if !seen.insert(n.id.as_str()) {
            report.push("duplicate-node", &n.id, "node id appears twice".into());
        }
        if n.converter_cap_limit < 0.0 || n.owpp_cap_limit < 0.0 || n.storage_cap_limit < 0.0 {
            report.push("negative-limit", &n.id, "capacity limits must be >= 0".into());
        }
    }

    let mut ids = BTreeSet::new();
    for b in &net.branches {
        if !ids.insert(b.id.as_str()) {
            report.push("duplicate-branch", &b.id, "branch id appears twice".into());
        }
        let ends = [kind_of.get(b.from.as_str()), kind_of.get(b.to.as_str())];
        if ends.iter().any(|k| k.is_none()) {
            report.push("dangling-endpoint", &b.id, "branch endpoint is not a node".into());
            continue;
        }
        let expect = match b.network {
            NetworkKind::Ac => NodeKind::Ac,
            NetworkKind::Dc => NodeKind::Dc,
        };
        if ends.iter().any(|k| *k.unwrap() != expect) {
            report.push(
                "endpoint-kind-mismatch",
                &b.id,
                format!("{:?} branch must connect {:?} nodes", b.network, expect),
            );
        }
        if b.network == NetworkKind::Ac && b.susceptance.is_none() {
            report.push("ac-missing-susceptance", &b.id, "AC branch without susceptance".into());
        }
        if b.transformer_ratio <= 0.0 {
            report.push("bad-transformer-ratio", &b.id, "transformer ratio must be > 0".into());
        }
        if b.capacity_mw <= 0.0 {
            report.push("bad-capacity", &b.id, "branch capacity must be > 0".into());
        }
        if b.status == AssetStatus::Candidate && b.investment_cost.is_none() {
            report.push("candidate-missing-cost", &b.id, "candidate branch without investment cost".into());
        }
    }

    ids.clear();
    for c in &net.converters {
        if !ids.insert(c.id.as_str()) {
            report.push("duplicate-converter", &c.id, "converter id appears twice".into());
        }
        match (kind_of.get(c.ac_node.as_str()), kind_of.get(c.dc_node.as_str())) {
            (Some(NodeKind::Ac), Some(NodeKind::Dc)) => {}
            (None, _) | (_, None) => {
                report.push("dangling-endpoint", &c.id, "converter endpoint is not a node".into());
            }
            _ => {
                report.push(
                    "endpoint-kind-mismatch",
                    &c.id,
                    "converter must attach an AC node to a DC node".into(),
                );
            }
        }
        if !(0.0..1.0).contains(&c.loss_factor) {
            report.push("bad-loss-factor", &c.id, "loss factor must be in [0, 1)".into());
        }
        if c.capacity_mw < 0.0 {
            report.push("bad-capacity", &c.id, "converter capacity must be >= 0".into());
        }
    }

    ids.clear();
    for g in &net.generators {
        if !ids.insert(g.id.as_str()) {
            report.push("duplicate-generator", &g.id, "generator id appears twice".into());
        }
        match kind_of.get(g.node.as_str()) {
            None => report.push("dangling-endpoint", &g.id, "generator node does not exist".into()),
            Some(NodeKind::Dc) => {
                report.push("generator-on-dc-node", &g.id, "generator on DC node".into())
            }
            Some(NodeKind::Ac) => {}
        }
        if g.capacity_mw < 0.0 {
            report.push("bad-capacity", &g.id, "generator capacity must be >= 0".into());
        }
        if g.status == AssetStatus::Candidate && g.marginal_cost != 0.0 {
            report.push(
                "candidate-nonzero-cost",
                &g.id,
                "candidate generators are OWPPs with zero marginal cost".into(),
            );
        }
    }

    ids.clear();
    for d in &net.demands {
        if !ids.insert(d.id.as_str()) {
            report.push("duplicate-demand", &d.id, "demand id appears twice".into());
        }
        match kind_of.get(d.node.as_str()) {
            None => report.push("dangling-endpoint", &d.id, "demand node does not exist".into()),
            Some(NodeKind::Dc) => report.push("demand-on-dc-node", &d.id, "demand on DC node".into()),
            Some(NodeKind::Ac) => {}
        }
        if !(0.0 <= d.dsr_price && d.dsr_price <= d.voll) {
            report.push("bad-dsr-price", &d.id, "requires 0 <= dsr_price <= voll".into());
        }
        if d.dsr_limit_mw < 0.0 {
            report.push("bad-dsr-limit", &d.id, "DSR limit must be >= 0".into());
        }
    }

    ids.clear();
    for s in &net.storage {
        if !ids.insert(s.id.as_str()) {
            report.push("duplicate-storage", &s.id, "storage id appears twice".into());
        }
        match kind_of.get(s.node.as_str()) {
            None => report.push("dangling-endpoint", &s.id, "storage node does not exist".into()),
            Some(NodeKind::Dc) => report.push("storage-on-dc-node", &s.id, "storage on DC node".into()),
            Some(NodeKind::Ac) => {}
        }
        if !(s.charge_eff > 0.0 && s.charge_eff <= 1.0 && s.discharge_eff > 0.0 && s.discharge_eff <= 1.0)
        {
            report.push("bad-efficiency", &s.id, "efficiencies must be in (0, 1]".into());
        }
        if !(0.0..1.0).contains(&s.self_discharge) {
            report.push("bad-self-discharge", &s.id, "self-discharge must be in [0, 1)".into());
        }
        if s.charge_rate <= 0.0 || s.discharge_rate <= 0.0 {
            report.push("bad-rate", &s.id, "charge/discharge rates must be > 0".into());
        }
        if s.energy_cap_mwh < 0.0 {
            report.push("bad-capacity", &s.id, "storage capacity must be >= 0".into());
        }
    }

    report
}

/// Classification of an edge relative to a zone partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeClass {
    InterZonal,
    IntraZonal,
}

/// A partition of the nodes into disjoint market zones, with the derived
/// inter/intra-zonal branch classification.
#[derive(Debug, Clone)]
pub struct ZonePartition {
    zone_of: BTreeMap<String, String>,
    zones: BTreeMap<String, Vec<String>>,
    /// Classification of `Network::branches` by position.
    branch_class: Vec<EdgeClass>,
    /// Classification of `Network::converters` by position (a converter
    /// crosses zones when its AC and DC nodes are mapped differently).
    converter_class: Vec<EdgeClass>,
}

impl ZonePartition {
    pub fn zone_of(&self, node: &str) -> Option<&str> {
        self.zone_of.get(node).map(String::as_str)
    }

    /// Zones in deterministic (sorted) order.
    pub fn zones(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.zones.iter().map(|(z, ns)| (z.as_str(), ns.as_slice()))
    }

    pub fn zone_ids(&self) -> Vec<String> {
        self.zones.keys().cloned().collect()
    }

    pub fn branch_class(&self, branch_pos: usize) -> EdgeClass {
        self.branch_class[branch_pos]
    }

    pub fn converter_class(&self, conv_pos: usize) -> EdgeClass {
        self.converter_class[conv_pos]
    }

    pub fn num_zones(&self) -> usize {
        self.zones.len()
    }
}

/// Partition the network into market zones.
///
/// Every edge is inter-zonal iff its endpoints map to different zones.
pub fn partition_zones(net: &Network, zone_map: &BTreeMap<String, String>) -> Result<ZonePartition> {
    let mut zones: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for n in &net.nodes {
        let z = zone_map
            .get(&n.id)
            .ok_or_else(|| Error::MissingZone(n.id.clone()))?;
        zones.entry(z.clone()).or_default().push(n.id.clone());
    }
    let zone_of: BTreeMap<String, String> = net
        .nodes
        .iter()
        .map(|n| (n.id.clone(), zone_map[&n.id].clone()))
        .collect();

    let classify = |a: &str, b: &str| {
        if zone_of[a] == zone_of[b] {
            EdgeClass::IntraZonal
        } else {
            EdgeClass::InterZonal
        }
    };
    let branch_class = net
        .branches
        .iter()
        .map(|b| classify(&b.from, &b.to))
        .collect();
    let converter_class = net
        .converters
        .iter()
        .map(|c| classify(&c.ac_node, &c.dc_node))
        .collect();

    Ok(ZonePartition {
        zone_of,
        zones,
        branch_class,
        converter_class,
    })
}

/// Partition with every node in one common zone.
pub fn single_zone(net: &Network) -> ZonePartition {
    let map = net
        .nodes
        .iter()
        .map(|n| (n.id.clone(), "all".to_string()))
        .collect();
    partition_zones(net, &map).expect("complete map")
}

/// Partition with every node in its own zone (the nOBZ limit).
pub fn singleton_zones(net: &Network) -> ZonePartition {
    let map = net
        .nodes
        .iter()
        .map(|n| (n.id.clone(), n.id.clone()))
        .collect();
    partition_zones(net, &map).expect("complete map")
}

/// Partition by the nodes' declared home zones (the HMD for the built-in
/// case, where offshore nodes carry their EEZ country as `zone_id`).
pub fn home_zones(net: &Network) -> ZonePartition {
    let map = net.home_zone_map();
    partition_zones(net, &map).expect("complete map")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node_net() -> Network {
        Network {
            nodes: vec![
                Node {
                    id: "m".into(),
                    kind: NodeKind::Ac,
                    zone_id: "A".into(),
                    latitude: 0.0,
                    longitude: 0.0,
                    converter_cap_limit: 0.0,
                    owpp_cap_limit: 0.0,
                    storage_cap_limit: 0.0,
                },
                Node {
                    id: "n".into(),
                    kind: NodeKind::Ac,
                    zone_id: "A".into(),
                    latitude: 0.0,
                    longitude: 1.0,
                    converter_cap_limit: 0.0,
                    owpp_cap_limit: 0.0,
                    storage_cap_limit: 0.0,
                },
            ],
            branches: vec![Branch {
                id: "mn".into(),
                from: "m".into(),
                to: "n".into(),
                network: NetworkKind::Ac,
                status: AssetStatus::Existing,
                susceptance: Some(10.0),
                transformer_ratio: 1.0,
                capacity_mw: 4.0,
                investment_cost: None,
            }],
            ..Default::default()
        }
    }

    #[test]
    fn well_formed_two_node_network_passes() {
        let report = validate_network(&two_node_net());
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn candidate_without_cost_is_flagged() {
        let mut net = two_node_net();
        net.branches[0].status = AssetStatus::Candidate;
        let report = validate_network(&net);
        assert!(report.violations.iter().any(|v| v.code == "candidate-missing-cost"));
    }

    #[test]
    fn demand_on_dc_node_is_flagged() {
        let mut net = two_node_net();
        net.nodes.push(Node {
            id: "e".into(),
            kind: NodeKind::Dc,
            zone_id: "A".into(),
            latitude: 0.0,
            longitude: 0.5,
            converter_cap_limit: 0.0,
            owpp_cap_limit: 0.0,
            storage_cap_limit: 0.0,
        });
        net.demands.push(Demand {
            id: "d".into(),
            node: "e".into(),
            bid_price: 150.0,
            profile_key: "load".into(),
            dsr_price: 119.0,
            dsr_limit_mw: 0.0,
            voll: 5000.0,
            price_cap: 180.0,
        });
        let report = validate_network(&net);
        assert!(report.violations.iter().any(|v| v.code == "demand-on-dc-node"));
    }

    #[test]
    fn validation_is_idempotent() {
        let mut net = two_node_net();
        net.branches[0].susceptance = None;
        let a = validate_network(&net);
        let b = validate_network(&net);
        assert_eq!(a.violations, b.violations);
        assert!(!a.is_ok());
    }

    #[test]
    fn single_zone_makes_all_edges_intra() {
        let net = two_node_net();
        let p = single_zone(&net);
        assert_eq!(p.branch_class(0), EdgeClass::IntraZonal);
        assert_eq!(p.num_zones(), 1);
    }

    #[test]
    fn singleton_zones_make_all_edges_inter() {
        let net = two_node_net();
        let p = singleton_zones(&net);
        assert_eq!(p.branch_class(0), EdgeClass::InterZonal);
        assert_eq!(p.num_zones(), 2);
    }

    #[test]
    fn neighbors_of_isolated_node_are_empty() {
        let mut net = two_node_net();
        net.branches.clear();
        let (ac, dc) = net.neighbors("m").unwrap();
        assert!(ac.is_empty() && dc.is_empty());
    }

    #[test]
    fn unknown_node_is_an_error() {
        assert!(two_node_net().neighbors("zz").is_err());
    }
}
