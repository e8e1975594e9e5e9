/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/scenario.h"

#include "iab/radio.h"
#include "iab/rng.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <set>

namespace iab {

double
distance (const Vec3& a, const Vec3& b)
{
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt (dx * dx + dy * dy + dz * dz);
}

bool
BackhaulTree::contains (int id) const
{
  return std::find (members.begin (), members.end (), id) != members.end ();
}

std::vector<int>
BackhaulTree::children (int id) const
{
  std::vector<int> out;
  for (const auto& [child, par] : parent)
    {
      if (par == id)
        {
          out.push_back (child);
        }
    }
  return out;
}

int
BackhaulTree::depth (int id) const
{
  int d = 0;
  int cur = id;
  while (cur != root)
    {
      auto it = parent.find (cur);
      if (it == parent.end ())
        {
          throw std::invalid_argument ("node " + std::to_string (id) + " is not in the tree");
        }
      cur = it->second;
      ++d;
    }
  return d;
}

double
BackhaulTree::total_weight () const
{
  double w = 0.0;
  for (const auto& [child, par] : parent)
    {
      auto it = edge_weight.find ({std::min (child, par), std::max (child, par)});
      if (it != edge_weight.end ())
        {
          w += it->second;
        }
    }
  return w;
}

namespace {

struct DisjointSet
{
  std::map<int, int> up;

  int find (int x)
  {
    int r = x;
    while (up[r] != r)
      {
        r = up[r];
      }
    while (up[x] != r)
      {
        int next = up[x];
        up[x] = r;
        x = next;
      }
    return r;
  }

  bool unite (int a, int b)
  {
    a = find (a);
    b = find (b);
    if (a == b)
      {
        return false;
      }
    if (b < a)
      {
        std::swap (a, b);
      }
    up[b] = a;
    return true;
  }
};

} // namespace

BackhaulTree
build_spanning_tree (const std::vector<int>& bs_ids, int root, const std::vector<WeightedEdge>& edges)
{
  if (std::find (bs_ids.begin (), bs_ids.end (), root) == bs_ids.end ())
    {
      throw std::invalid_argument ("root is not among the BS ids");
    }
  for (const auto& e : edges)
    {
      if (!std::isfinite (e.weight) || e.weight < 0.0)
        {
          throw std::invalid_argument ("edge weights must be finite and non-negative");
        }
    }
  std::vector<WeightedEdge> sorted = edges;
  std::stable_sort (sorted.begin (), sorted.end (), [] (const WeightedEdge& a, const WeightedEdge& b) {
    if (a.weight != b.weight)
      {
        return a.weight < b.weight;
      }
    const auto ka = std::minmax (a.a, a.b);
    const auto kb = std::minmax (b.a, b.b);
    return ka < kb;
  });

  DisjointSet ds;
  for (int id : bs_ids)
    {
      ds.up[id] = id;
    }
  std::map<int, std::vector<std::pair<int, double>>> adj;
  for (const auto& e : sorted)
    {
      if (!ds.up.count (e.a) || !ds.up.count (e.b))
        {
          throw std::invalid_argument ("edge references an unknown BS");
        }
      if (ds.unite (e.a, e.b))
        {
          adj[e.a].push_back ({e.b, e.weight});
          adj[e.b].push_back ({e.a, e.weight});
        }
    }

  BackhaulTree tree;
  tree.root = root;
  std::set<int> seen{root};
  std::queue<int> frontier;
  frontier.push (root);
  tree.members.push_back (root);
  while (!frontier.empty ())
    {
      int cur = frontier.front ();
      frontier.pop ();
      auto nbrs = adj[cur];
      std::sort (nbrs.begin (), nbrs.end ());
      for (const auto& [nb, w] : nbrs)
        {
          if (seen.insert (nb).second)
            {
              tree.parent[nb] = cur;
              tree.edge_weight[{std::min (cur, nb), std::max (cur, nb)}] = w;
              tree.members.push_back (nb);
              frontier.push (nb);
            }
        }
    }
  std::vector<int> unreachable;
  for (int id : bs_ids)
    {
      if (!seen.count (id))
        {
          unreachable.push_back (id);
        }
    }
  if (!unreachable.empty ())
    {
      std::string msg = "backhaul graph is disconnected; unreachable:";
      for (int id : unreachable)
        {
          msg += " " + std::to_string (id);
        }
      throw InfeasibleTopology (msg, unreachable);
    }
  std::sort (tree.members.begin (), tree.members.end ());
  return tree;
}

PruneResult
prune_tree (const BackhaulTree& tree, int max_sbs_per_path)
{
  if (max_sbs_per_path < 1)
    {
      throw std::invalid_argument ("max_sbs_per_path must be at least 1");
    }
  std::vector<std::pair<int, int>> doomed;  // (depth, id)
  for (int id : tree.members)
    {
      const int d = tree.depth (id);
      if (d > max_sbs_per_path)
        {
          doomed.push_back ({d, id});
        }
    }
  std::sort (doomed.begin (), doomed.end (), std::greater<> ());

  PruneResult out;
  out.tree = tree;
  for (const auto& [d, id] : doomed)
    {
      out.pruned.push_back (id);
      auto par = out.tree.parent.find (id);
      if (par != out.tree.parent.end ())
        {
          out.tree.edge_weight.erase ({std::min (id, par->second), std::max (id, par->second)});
          out.tree.parent.erase (par);
        }
      out.tree.members.erase (std::remove (out.tree.members.begin (), out.tree.members.end (), id),
                              out.tree.members.end ());
    }
  return out;
}

std::vector<TransmissionPath>
PathSets::all () const
{
  std::vector<TransmissionPath> out;
  out.insert (out.end (), pl1.begin (), pl1.end ());
  out.insert (out.end (), pl2.begin (), pl2.end ());
  out.insert (out.end (), pl3.begin (), pl3.end ());
  std::sort (out.begin (), out.end (),
             [] (const TransmissionPath& a, const TransmissionPath& b) { return a.leaf () < b.leaf (); });
  return out;
}

PathSets
classify_paths (const BackhaulTree& tree)
{
  PathSets sets;
  for (int id : tree.members)
    {
      if (!tree.is_leaf (id))
        {
          continue;
        }
      TransmissionPath path;
      int cur = id;
      while (cur != tree.root)
        {
          path.sbs_chain.push_back (cur);
          cur = tree.parent.at (cur);
        }
      switch (path.sbs_chain.size ())
        {
        case 1:
          path.kind = RelayCase::Case1;
          sets.pl1.push_back (path);
          break;
        case 2:
          path.kind = RelayCase::Case2;
          sets.pl2.push_back (path);
          break;
        case 3:
          path.kind = RelayCase::Case3;
          sets.pl3.push_back (path);
          break;
        default:
          throw std::invalid_argument ("path with more than 3 SBSs; prune the tree first");
        }
    }
  return sets;
}

double
commitment_bound (double t_max_thd, int hops)
{
  if (hops < 1)
    {
      throw std::invalid_argument ("hop count must be at least 1");
    }
  return t_max_thd / hops;
}

double
link_weight (const Node& a, const Node& b, double carrier_hz)
{
  return free_space_loss_db (carrier_hz, distance (a.position, b.position));
}

std::vector<int>
Scenario::sbs_ids () const
{
  std::vector<int> out;
  for (const auto& n : nodes)
    {
      if (n.kind == NodeKind::Sbs)
        {
          out.push_back (n.id);
        }
    }
  return out;
}

std::vector<int>
Scenario::ue_ids () const
{
  std::vector<int> out;
  for (const auto& n : nodes)
    {
      if (n.kind == NodeKind::Ue)
        {
          out.push_back (n.id);
        }
    }
  return out;
}

std::vector<int>
Scenario::ues_of (int sbs) const
{
  std::vector<int> out;
  for (const auto& [ue, s] : serving)
    {
      if (s == sbs)
        {
          out.push_back (ue);
        }
    }
  return out;
}

Scenario
assemble_scenario (std::vector<Node> nodes, double mm_carrier_hz, int max_sbs_per_path)
{
  Scenario sc;
  sc.nodes = std::move (nodes);
  int mbs_count = 0;
  for (std::size_t i = 0; i < sc.nodes.size (); ++i)
    {
      if (sc.nodes[i].id != static_cast<int> (i))
        {
          throw std::invalid_argument ("node ids must equal their index");
        }
      if (sc.nodes[i].kind == NodeKind::Mbs)
        {
          sc.mbs = sc.nodes[i].id;
          ++mbs_count;
        }
    }
  if (mbs_count != 1)
    {
      throw std::invalid_argument ("scenario needs exactly one MBS");
    }

  std::vector<int> bs;
  for (const auto& n : sc.nodes)
    {
      if (n.kind != NodeKind::Ue)
        {
          bs.push_back (n.id);
        }
    }
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < bs.size (); ++i)
    {
      for (std::size_t j = i + 1; j < bs.size (); ++j)
        {
          edges.push_back ({bs[i], bs[j], link_weight (sc.node (bs[i]), sc.node (bs[j]), mm_carrier_hz)});
        }
    }
  BackhaulTree full = build_spanning_tree (bs, sc.mbs, edges);
  PruneResult pruned = prune_tree (full, max_sbs_per_path);
  sc.tree = pruned.tree;
  sc.pruned_sbs = pruned.pruned;
  std::sort (sc.pruned_sbs.begin (), sc.pruned_sbs.end ());
  sc.paths = classify_paths (sc.tree);

  const std::vector<int> sbs = sc.sbs_ids ();
  for (const auto& n : sc.nodes)
    {
      if (n.kind != NodeKind::Ue || sbs.empty ())
        {
          continue;
        }
      int best = sbs.front ();
      double best_d = distance (n.position, sc.node (best).position);
      for (int s : sbs)
        {
          const double d = distance (n.position, sc.node (s).position);
          if (d < best_d)
            {
              best = s;
              best_d = d;
            }
        }
      if (sc.tree.contains (best))
        {
          sc.serving[n.id] = best;
        }
      else
        {
          sc.dropped_ues.push_back (n.id);
        }
    }
  return sc;
}

namespace {

bool
clear_of (const Position& p, const std::vector<Node>& nodes, double sep)
{
  for (const auto& n : nodes)
    {
      if (n.kind == NodeKind::Ue)
        {
          continue;
        }
      if (std::hypot (p.x - n.position.x, p.y - n.position.y) < sep)
        {
          return false;
        }
    }
  return true;
}

} // namespace

Scenario
build_scenario (const ScenarioConfig& cfg, double mm_carrier_hz, std::uint64_t seed)
{
  std::vector<Node> nodes;
  Node mbs;
  mbs.id = 0;
  mbs.kind = NodeKind::Mbs;
  mbs.position = {cfg.mbs_position.x, cfg.mbs_position.y, cfg.mbs_height};
  mbs.rf_chains = cfg.rf_chains;
  nodes.push_back (mbs);

  std::vector<Position> sbs_xy;
  if (cfg.layout == "fig3")
    {
      const double angles[3] = {90.0, 210.0, 330.0};
      for (double r : {cfg.inner_radius, cfg.outer_radius})
        {
          for (double a : angles)
            {
              sbs_xy.push_back ({cfg.mbs_position.x + r * std::cos (deg_to_rad (a)),
                                 cfg.mbs_position.y + r * std::sin (deg_to_rad (a))});
            }
        }
    }
  else if (cfg.layout == "explicit")
    {
      sbs_xy = cfg.sbs_positions;
    }
  else if (cfg.layout == "random")
    {
      Rng rng (derive_seed (seed, 1));
      std::vector<Node> placed = nodes;
      while (static_cast<int> (sbs_xy.size ()) < cfg.n_sbs)
        {
          Position p{rng.uniform (0.0, cfg.area), rng.uniform (0.0, cfg.area)};
          if (clear_of (p, placed, cfg.min_separation))
            {
              Node tmp;
              tmp.kind = NodeKind::Sbs;
              tmp.position = {p.x, p.y, cfg.sbs_height};
              placed.push_back (tmp);
              sbs_xy.push_back (p);
            }
        }
    }
  else
    {
      throw std::invalid_argument ("unknown layout '" + cfg.layout + "'");
    }

  for (const auto& p : sbs_xy)
    {
      Node n;
      n.id = static_cast<int> (nodes.size ());
      n.kind = NodeKind::Sbs;
      n.position = {p.x, p.y, cfg.sbs_height};
      n.rf_chains = cfg.rf_chains;
      nodes.push_back (n);
    }

  if (!cfg.ue_positions.empty ())
    {
      for (const auto& p : cfg.ue_positions)
        {
          Node n;
          n.id = static_cast<int> (nodes.size ());
          n.kind = NodeKind::Ue;
          n.position = {p.x, p.y, cfg.ue_height};
          nodes.push_back (n);
        }
    }
  else
    {
      // Sequential draws: the first n UEs of a seed do not depend on the total count.
      Rng rng (derive_seed (seed, 2));
      int placed = 0;
      while (placed < cfg.n_ues)
        {
          Position p{rng.uniform (0.0, cfg.area), rng.uniform (0.0, cfg.area)};
          if (!clear_of (p, nodes, cfg.min_separation))
            {
              continue;
            }
          Node n;
          n.id = static_cast<int> (nodes.size ());
          n.kind = NodeKind::Ue;
          n.position = {p.x, p.y, cfg.ue_height};
          nodes.push_back (n);
          ++placed;
        }
    }
  return assemble_scenario (std::move (nodes), mm_carrier_hz, cfg.max_sbs_per_path);
}

} // namespace iab
