use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::mds::MdsCode;
use crate::error::{Error, Result};
use crate::incidence::FrCode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeState {
    /// Packet index to packet bytes, exactly the points of this node's block.
    Alive(BTreeMap<usize, Vec<u8>>),
    Failed,
}

/// One packet copied verbatim from a helper during repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub packet: usize,
    pub helper: usize,
    pub target: usize,
    pub bytes: usize,
}

impl fmt::Display for Transfer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "packet {}: node {} -> node {} ({} B)",
            self.packet, self.helper, self.target, self.bytes
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reconstruction {
    Recovered(Vec<u8>),
    /// Fewer distinct packets than the MDS dimension.
    Insufficient { distinct: usize, needed: usize },
}

/// Nodes holding replicated MDS-coded packets laid out by an FR code.
#[derive(Debug, Clone)]
pub struct StorageSystem {
    code: FrCode,
    mds: MdsCode,
    packet_len: usize,
    nodes: Vec<NodeState>,
}

impl StorageSystem {
    /// Splits `file` into `m` source packets, encodes them to `v` coded
    /// packets and stores packet `j` on every node whose block contains `j`.
    /// The file length must be a multiple of `m`.
    pub fn encode_and_place(code: &FrCode, file: &[u8], m: usize) -> Result<Self> {
        let v = code.params().v;
        if m == 0 || m > v {
            return Err(Error::Argument(format!("file size M = {m} must be in 1..={v}")));
        }
        if !file.len().is_multiple_of(m) {
            return Err(Error::Argument(format!(
                "file length {} is not a multiple of M = {m}; pad it first",
                file.len()
            )));
        }
        let mds = MdsCode::new(v, m)?;
        let packet_len = file.len() / m;
        let source: Vec<Vec<u8>> = if packet_len == 0 {
            vec![Vec::new(); m]
        } else {
            file.chunks(packet_len).map(<[u8]>::to_vec).collect()
        };
        let coded = mds.encode(&source);
        let nodes = code
            .structure()
            .blocks()
            .iter()
            .map(|row| NodeState::Alive(row.iter().map(|p| (p, coded[p].clone())).collect()))
            .collect();
        Ok(StorageSystem {
            code: code.clone(),
            mds,
            packet_len,
            nodes,
        })
    }

    pub fn code(&self) -> &FrCode {
        &self.code
    }

    pub fn mds(&self) -> &MdsCode {
        &self.mds
    }

    pub fn file_size(&self) -> usize {
        self.mds.dimension()
    }

    pub fn packet_len(&self) -> usize {
        self.packet_len
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, i: usize) -> Option<&NodeState> {
        self.nodes.get(i)
    }

    pub fn is_alive(&self, i: usize) -> bool {
        matches!(self.nodes.get(i), Some(NodeState::Alive(_)))
    }

    pub fn failed_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| !self.is_alive(i)).collect()
    }

    /// Alive nodes holding `packet`, ascending.
    pub fn live_holders(&self, packet: usize) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n {
                NodeState::Alive(pk) if pk.contains_key(&packet) => Some(i),
                _ => None,
            })
            .collect()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.nodes.len() {
            return Err(Error::Argument(format!(
                "node {i} does not exist ({} nodes)",
                self.nodes.len()
            )));
        }
        Ok(())
    }

    /// Marks node `i` failed, refusing if that would leave some packet with
    /// no live replica. A refused failure leaves the system unchanged.
    pub fn fail_node(&mut self, i: usize) -> Result<()> {
        self.check_index(i)?;
        let NodeState::Alive(packets) = &self.nodes[i] else {
            return Err(Error::NodeState(i, "already failed"));
        };
        if let Some(&packet) = packets
            .keys()
            .find(|&&p| self.live_holders(p).iter().all(|&h| h == i))
        {
            return Err(Error::ToleranceExceeded { node: i, packet });
        }
        self.nodes[i] = NodeState::Failed;
        Ok(())
    }

    /// Restores failed node `i` by copying each of its packets from the
    /// lowest-index live holder. No arithmetic is done on the helpers.
    pub fn repair_node(&mut self, i: usize) -> Result<Vec<Transfer>> {
        self.check_index(i)?;
        if self.is_alive(i) {
            return Err(Error::NodeState(i, "not failed"));
        }
        let mut restored = BTreeMap::new();
        let mut log = Vec::new();
        for packet in self.code.structure().block(i).iter() {
            let helper = *self
                .live_holders(packet)
                .first()
                .ok_or(Error::Unrecoverable { node: i, packet })?;
            let NodeState::Alive(held) = &self.nodes[helper] else {
                unreachable!("live holder is alive")
            };
            let bytes = held[&packet].clone();
            log.push(Transfer {
                packet,
                helper,
                target: i,
                bytes: bytes.len(),
            });
            restored.insert(packet, bytes);
        }
        self.nodes[i] = NodeState::Alive(restored);
        Ok(log)
    }

    /// Distinct packets held by `nodes`, ascending by packet index.
    pub fn gather(&self, nodes: &[usize]) -> Result<BTreeMap<usize, &[u8]>> {
        let mut out = BTreeMap::new();
        for &i in nodes {
            self.check_index(i)?;
            let NodeState::Alive(held) = &self.nodes[i] else {
                return Err(Error::NodeState(i, "failed; cannot read from it"));
            };
            for (&p, bytes) in held {
                out.entry(p).or_insert(bytes.as_slice());
            }
        }
        Ok(out)
    }

    /// Decodes the file from the lowest-indexed `M` distinct packets found on
    /// `nodes`, or reports how many distinct packets were available.
    pub fn reconstruct_from(&self, nodes: &[usize]) -> Result<Reconstruction> {
        let gathered = self.gather(nodes)?;
        let needed = self.mds.dimension();
        if gathered.len() < needed {
            return Ok(Reconstruction::Insufficient {
                distinct: gathered.len(),
                needed,
            });
        }
        let chosen: Vec<(usize, &[u8])> = gathered.into_iter().take(needed).collect();
        let source = self.mds.decode(&chosen)?;
        Ok(Reconstruction::Recovered(source.concat()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::fixtures;
    use crate::incidence::validate_fr;

    fn example2() -> FrCode {
        validate_fr(&fixtures::example2()).unwrap()
    }

    fn example3() -> FrCode {
        validate_fr(&fixtures::example3_petersen()).unwrap()
    }

    fn file(len: usize) -> Vec<u8> {
        (0..len).map(|i| (i * 37 + 11) as u8).collect()
    }

    #[test]
    fn placement_follows_incidence() {
        let sys = StorageSystem::encode_and_place(&example2(), &file(7), 7).unwrap();
        for i in 0..5 {
            let NodeState::Alive(held) = sys.node(i).unwrap() else { panic!() };
            let expect: Vec<usize> = fixtures::example2().block(i).iter().collect();
            assert_eq!(held.keys().copied().collect::<Vec<_>>(), expect);
        }
        // Replicas are identical.
        for p in 0..10 {
            let holders = sys.live_holders(p);
            assert_eq!(holders.len(), 2);
            let g = sys.gather(&holders[..1]).unwrap()[&p].to_vec();
            assert_eq!(sys.gather(&holders[1..]).unwrap()[&p], g.as_slice());
        }
    }

    #[test]
    fn any_two_nodes_hold_seven_packets() {
        let sys = StorageSystem::encode_and_place(&example2(), &file(7), 7).unwrap();
        for a in 0..5 {
            for b in a + 1..5 {
                assert!(sys.gather(&[a, b]).unwrap().len() >= 7);
                assert_eq!(
                    sys.reconstruct_from(&[a, b]).unwrap(),
                    Reconstruction::Recovered(file(7))
                );
            }
        }
    }

    #[test]
    fn placement_errors() {
        assert!(StorageSystem::encode_and_place(&example2(), &file(7), 11).is_err());
        assert!(StorageSystem::encode_and_place(&example2(), &file(7), 0).is_err());
        assert!(StorageSystem::encode_and_place(&example2(), &file(8), 7).is_err());
    }

    #[test]
    fn full_file_size_needs_all_points() {
        let sys = StorageSystem::encode_and_place(&example2(), &file(20), 10).unwrap();
        assert_eq!(
            sys.reconstruct_from(&[0, 1, 2]).unwrap(),
            Reconstruction::Insufficient { distinct: 9, needed: 10 }
        );
        assert_eq!(
            sys.reconstruct_from(&[0, 1, 2, 3, 4]).unwrap(),
            Reconstruction::Recovered(file(20))
        );
    }

    #[test]
    fn failure_tolerance() {
        let mut sys = StorageSystem::encode_and_place(&example2(), &file(7), 7).unwrap();
        sys.fail_node(0).unwrap();
        for p in 0..10 {
            assert!(!sys.live_holders(p).is_empty());
        }
        // Every pair of K_5 vertices shares an edge.
        assert_eq!(
            sys.fail_node(1),
            Err(Error::ToleranceExceeded { node: 1, packet: 0 })
        );
        assert!(sys.is_alive(1));
        assert_eq!(sys.fail_node(0), Err(Error::NodeState(0, "already failed")));
    }

    #[test]
    fn example3_tolerates_any_two_failures() {
        let base = StorageSystem::encode_and_place(&example3(), &file(12), 6).unwrap();
        for a in 0..15 {
            for b in a + 1..15 {
                let mut sys = base.clone();
                sys.fail_node(a).unwrap();
                sys.fail_node(b).unwrap();
            }
        }
    }

    #[test]
    fn repair_example2_node0_uses_four_helpers() {
        let mut sys = StorageSystem::encode_and_place(&example2(), &file(70), 7).unwrap();
        let before = sys.node(0).unwrap().clone();
        sys.fail_node(0).unwrap();
        assert_eq!(sys.repair_node(1), Err(Error::NodeState(1, "not failed")));
        let log = sys.repair_node(0).unwrap();
        assert_eq!(log.len(), 4);
        let helpers: Vec<usize> = log.iter().map(|t| t.helper).collect();
        assert_eq!(helpers, vec![1, 2, 3, 4]);
        assert!(log.iter().all(|t| t.bytes == 10 && t.target == 0));
        assert_eq!(sys.node(0).unwrap(), &before);
        assert_eq!(log[0].to_string(), "packet 0: node 1 -> node 0 (10 B)");
    }

    #[test]
    fn repair_example3_moves_two_packets() {
        let mut sys = StorageSystem::encode_and_place(&example3(), &file(60), 6).unwrap();
        let before = sys.node(7).unwrap().clone();
        sys.fail_node(7).unwrap();
        let log = sys.repair_node(7).unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(sys.node(7).unwrap(), &before);
    }

    #[test]
    fn witness_rows_reconstruct_example3() {
        let sys = StorageSystem::encode_and_place(&example3(), &file(600), 6).unwrap();
        let witness = [0, 1, 2, 3, 4, 9];
        assert_eq!(sys.gather(&witness).unwrap().len(), 6);
        assert_eq!(
            sys.reconstruct_from(&witness).unwrap(),
            Reconstruction::Recovered(file(600))
        );
    }

    #[test]
    fn insufficient_pair_for_m8() {
        let sys = StorageSystem::encode_and_place(&example2(), &file(16), 8).unwrap();
        assert_eq!(
            sys.reconstruct_from(&[0, 1]).unwrap(),
            Reconstruction::Insufficient { distinct: 7, needed: 8 }
        );
    }

    #[test]
    fn reading_failed_node_is_an_error() {
        let mut sys = StorageSystem::encode_and_place(&example2(), &file(7), 7).unwrap();
        sys.fail_node(3).unwrap();
        assert!(matches!(sys.reconstruct_from(&[3, 4]), Err(Error::NodeState(3, _))));
        assert!(matches!(sys.reconstruct_from(&[9]), Err(Error::Argument(_))));
    }

    #[test]
    fn empty_file() {
        let sys = StorageSystem::encode_and_place(&example2(), &[], 4).unwrap();
        assert_eq!(
            sys.reconstruct_from(&[0]).unwrap(),
            Reconstruction::Recovered(Vec::new())
        );
    }
}
