/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_SCENARIO_H
#define IAB_SCENARIO_H

#include "iab/config.h"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace iab {

enum class NodeKind
{
  Mbs,
  Sbs,
  Ue
};

enum Band : unsigned
{
  kSub6 = 1u,
  kMmWave = 2u,
  kThz = 4u
};

struct Vec3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance (const Vec3& a, const Vec3& b);

struct Node
{
  int id = 0;
  NodeKind kind = NodeKind::Ue;
  Vec3 position;
  int rf_chains = 1;
  unsigned bands = kSub6 | kMmWave | kThz;
};

struct WeightedEdge
{
  int a;
  int b;
  double weight;
};

class InfeasibleTopology : public std::runtime_error
{
public:
  InfeasibleTopology (const std::string& what, std::vector<int> unreachable)
    : std::runtime_error (what),
      m_unreachable (std::move (unreachable))
  {
  }

  const std::vector<int>& unreachable () const { return m_unreachable; }

private:
  std::vector<int> m_unreachable;
};

/// Rooted tree over BS ids. `parent` maps every non-root member to its parent.
struct BackhaulTree
{
  int root = 0;
  std::vector<int> members;
  std::map<int, int> parent;
  std::map<std::pair<int, int>, double> edge_weight;

  bool contains (int id) const;
  std::vector<int> children (int id) const;
  /// Number of SBSs from `id` up to the root, `id` included; 0 for the root.
  int depth (int id) const;
  bool is_leaf (int id) const { return id != root && children (id).empty (); }
  double total_weight () const;
};

/// Kruskal over `edges`; the result is oriented away from `root`.
BackhaulTree build_spanning_tree (const std::vector<int>& bs_ids, int root,
                                  const std::vector<WeightedEdge>& edges);

struct PruneResult
{
  BackhaulTree tree;
  std::vector<int> pruned;
};

PruneResult prune_tree (const BackhaulTree& tree, int max_sbs_per_path = 3);

enum class RelayCase
{
  Case1 = 1,
  Case2 = 2,
  Case3 = 3
};

/// SBSs from the non-relay leaf toward the MBS.
struct TransmissionPath
{
  RelayCase kind;
  std::vector<int> sbs_chain;

  int leaf () const { return sbs_chain.front (); }
  int top () const { return sbs_chain.back (); }
};

struct PathSets
{
  std::vector<TransmissionPath> pl1;
  std::vector<TransmissionPath> pl2;
  std::vector<TransmissionPath> pl3;

  std::size_t total () const { return pl1.size () + pl2.size () + pl3.size (); }
  /// Every path ordered by leaf id.
  std::vector<TransmissionPath> all () const;
};

PathSets classify_paths (const BackhaulTree& tree);

double commitment_bound (double t_max_thd, int hops);

/// Edge metric used for the backhaul tree: free-space loss in dB at `carrier_hz`.
double link_weight (const Node& a, const Node& b, double carrier_hz);

struct Scenario
{
  std::vector<Node> nodes;
  int mbs = 0;
  BackhaulTree tree;
  PathSets paths;
  std::vector<int> pruned_sbs;
  std::vector<int> dropped_ues;
  // UE id -> serving SBS id (only UEs of surviving SBSs).
  std::map<int, int> serving;

  const Node& node (int id) const { return nodes.at (id); }
  std::vector<int> sbs_ids () const;
  std::vector<int> ue_ids () const;
  /// UEs served by `sbs`, ascending.
  std::vector<int> ues_of (int sbs) const;
};

/// Places nodes per `cfg`, builds and prunes the tree, classifies paths and
/// associates every UE with its nearest surviving SBS.
Scenario build_scenario (const ScenarioConfig& cfg, double mm_carrier_hz, std::uint64_t seed);

/// Same, from explicit nodes (id order must match vector order, MBS first).
Scenario assemble_scenario (std::vector<Node> nodes, double mm_carrier_hz, int max_sbs_per_path);

} // namespace iab

#endif
