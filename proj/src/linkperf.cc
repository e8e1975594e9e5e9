/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/linkperf.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace iab {

double
sinr (double signal_psd, const InterferenceBreakdown& interf, const ChannelParams& params, bool thz_link)
{
  double denom = interf.ra + interf.bh + params.bandwidth_hz * params.noise_psd;
  if (thz_link)
    {
      denom += interf.thz;
    }
  return params.bandwidth_hz * signal_psd / denom;
}

double
link_throughput (const std::vector<std::pair<double, double>>& width_sinr, double bandwidth_hz)
{
  double acc = 0.0;
  for (const auto& [w, s] : width_sinr)
    {
      acc += w * std::log2 (1.0 + s);
    }
  return bandwidth_hz * acc;
}

InterferenceRule
parse_interference_rule (const std::string& s)
{
  if (s == "equation")
    {
      return InterferenceRule::Equation;
    }
  if (s == "prose")
    {
      return InterferenceRule::Prose;
    }
  throw std::invalid_argument ("interference_rule must be 'equation' or 'prose', got '" + s + "'");
}

namespace {

double
beamwidth_of (const Node& n, const RadioConfig& radio)
{
  switch (n.kind)
    {
    case NodeKind::Mbs:
      return deg_to_rad (radio.beam_mbs_deg);
    case NodeKind::Sbs:
      return deg_to_rad (radio.beam_sbs_deg);
    default:
      return deg_to_rad (radio.beam_ue_deg);
    }
}

double
offset_angle (const Vec3& from, const Vec3& boresight_to, const Vec3& target)
{
  const double ax = boresight_to.x - from.x, ay = boresight_to.y - from.y, az = boresight_to.z - from.z;
  const double bx = target.x - from.x, by = target.y - from.y, bz = target.z - from.z;
  const double na = std::sqrt (ax * ax + ay * ay + az * az);
  const double nb = std::sqrt (bx * bx + by * by + bz * bz);
  if (na == 0.0 || nb == 0.0)
    {
      return 0.0;
    }
  const double c = std::clamp ((ax * bx + ay * by + az * bz) / (na * nb), -1.0, 1.0);
  return std::acos (c);
}

int
hop_blocks (int tier, const RadioConfig& radio)
{
  if (tier == 1)
    {
      return 1;
    }
  return tier == 2 ? radio.blocks_case2 : radio.blocks_case3;
}

} // namespace

LinkModel::LinkModel (const Scenario& sc, const Layout& layout, const RadioConfig& radio)
  : m_rfcCandidates (layout.rfc_candidates ()),
    m_z (layout.z ()),
    m_rule (parse_interference_rule (radio.interference_rule))
{
  const double n0 = dbm_to_watt (radio.noise_dbm_hz);
  m_mm = ChannelParams{radio.mmwave.carrier_hz, radio.mmwave.block_bandwidth_hz, radio.mmwave.absorption_per_m, n0};
  m_thz = ChannelParams{radio.thz.carrier_hz, radio.thz.block_bandwidth_hz, radio.thz.absorption_per_m, n0};

  m_sbsIds = layout.sbs ();
  int max_id = static_cast<int> (sc.nodes.size ());
  m_sbsIndex.assign (max_id, -1);
  for (std::size_t k = 0; k < m_sbsIds.size (); ++k)
    {
      m_sbsIndex[m_sbsIds[k]] = static_cast<int> (k);
      m_rfcVar.push_back (layout.rfc_var (m_sbsIds[k]));
      const auto& path = layout.paths ()[layout.path_index_of (m_sbsIds[k])];
      m_gammaVar.push_back (layout.gamma_var (path.leaf ()));
    }

  for (std::size_t p = 0; p < layout.paths ().size (); ++p)
    {
      const auto& chain = layout.paths ()[p].sbs_chain;
      for (std::size_t j = 0; j < chain.size (); ++j)
        {
          const int s = chain[j];
          const int tier = static_cast<int> (j) + 1;
          const bool thz_access = tier == 3 && radio.use_thz;
          const Window access_window = (tier == 1 || thz_access) ? Window::A : Window::B;
          for (int u : layout.ues_of (s))
            {
              m_links.push_back (Transmission{u, s, thz_access, false, LinkKind::Access, access_window, s,
                                              layout.ue_power_var (u), 1, static_cast<int> (p), tier, u});
              m_links.push_back (Transmission{s, u, thz_access, true, LinkKind::Access, access_window, s,
                                              layout.sbs_dl_var (s, u), 1, static_cast<int> (p), tier, u});
            }
          const int parent = layout.parent_of (s);
          const Window hop_window = tier == 2 ? Window::A : Window::B;
          const int blocks = hop_blocks (tier, radio);
          const int dl_var = parent == layout.mbs () ? layout.mbs_var (s) : layout.sbs_dl_var (parent, s);
          m_links.push_back (Transmission{s, parent, false, false, LinkKind::Hop, hop_window, s,
                                          layout.sbs_ul_var (s), blocks, static_cast<int> (p), tier, -1});
          m_links.push_back (Transmission{parent, s, false, true, LinkKind::Hop, hop_window, s, dl_var, blocks,
                                          static_cast<int> (p), tier, -1});
        }
    }
  // Fixed summation order: by transmitter, then receiver.
  std::stable_sort (m_links.begin (), m_links.end (), [] (const Transmission& a, const Transmission& b) {
    return a.tx != b.tx ? a.tx < b.tx : a.rx < b.rx;
  });

  const std::size_t n = m_links.size ();
  for (const auto& l : m_links)
    {
      m_grid.push_back (layout.grid_for (l.power_var));
      m_linkSbs.push_back (m_sbsIndex[l.sbs]);
      m_linkDownlink.push_back (l.downlink);
      m_linkWindowA.push_back (l.window == Window::A);
    }
  m_selfGain.assign (n, 0.0);
  m_coupling.assign (n * n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    {
      const Transmission& lv = m_links[v];
      const Node& vtx = sc.node (lv.tx);
      const Node& vrx = sc.node (lv.rx);
      const ChannelParams& ch = channel (lv.thz);
      const BeamPattern ptx = BeamPattern::make (beamwidth_of (vtx, radio), radio.side_lobe);
      const BeamPattern prx = BeamPattern::make (beamwidth_of (vrx, radio), radio.side_lobe);
      const PathLoss own = path_losses (ch, distance (vtx.position, vrx.position));
      m_selfGain[v] = aligned_gain_product (ptx, prx) / own.total ();

      for (std::size_t w = 0; w < n; ++w)
        {
          const Transmission& lw = m_links[w];
          if (w == v || lw.thz != lv.thz)
            {
              continue;
            }
          if (lw.tx == lv.tx || lw.tx == lv.rx || lw.rx == lv.tx || lw.rx == lv.rx)
            {
              continue;
            }
          const Node& wtx = sc.node (lw.tx);
          const Node& wrx = sc.node (lw.rx);
          const BeamPattern wpat = BeamPattern::make (beamwidth_of (wtx, radio), radio.side_lobe);
          const double gt = beam_gain (wpat, offset_angle (wtx.position, wrx.position, vrx.position));
          const double gr = beam_gain (prx, offset_angle (vrx.position, vtx.position, wtx.position));
          const PathLoss loss = path_losses (ch, distance (wtx.position, vrx.position));
          m_coupling[w * n + v] = gt * gr / loss.total ();
        }
    }
  m_couplingInto.assign (n * n, 0.0);
  for (std::size_t w = 0; w < n; ++w)
    {
      for (std::size_t v = 0; v < n; ++v)
        {
          m_couplingInto[v * n + w] = m_coupling[w * n + v];
        }
    }
}

int
LinkModel::sbs_index (int sbs) const
{
  if (sbs < 0 || sbs >= static_cast<int> (m_sbsIndex.size ()) || m_sbsIndex[sbs] < 0)
    {
      throw std::invalid_argument ("SBS " + std::to_string (sbs) + " is not scheduled");
    }
  return m_sbsIndex[sbs];
}

double
LinkModel::power (const Allocation& a, int v) const
{
  return m_grid[v].watts (a.x[m_links[v].power_var]);
}

bool
LinkModel::downlink_at (const Allocation& a, int sbs_idx, int tau) const
{
  return rfc_pattern (m_rfcCandidates[a.x[m_rfcVar[sbs_idx]]]).downlink[tau];
}

DurationOrdering
LinkModel::ordering (const Allocation& a) const
{
  std::vector<int> nums (m_sbsIds.size ());
  for (std::size_t k = 0; k < m_sbsIds.size (); ++k)
    {
      nums[k] = a.x[m_gammaVar[k]] + 1;
    }
  return DurationOrdering (nums, m_z);
}

bool
LinkModel::active (int v, const Allocation& a, const DurationOrdering& ord, int tau, int segment) const
{
  const Transmission& l = m_links[v];
  const int k = m_linkSbs[v];
  if (downlink_at (a, k, tau) != l.downlink)
    {
      return false;
    }
  const int r = ord.rank (k);
  return l.window == Window::A ? segment <= r : segment > r;
}

bool
LinkModel::counts_against (int w, int v, const Allocation& a, const DurationOrdering& ord, int tau,
                           int segment) const
{
  if (w == v || coupling (w, v) == 0.0)
    {
      return false;
    }
  const Transmission& lw = m_links[w];
  const int k = m_linkSbs[w];
  if (downlink_at (a, k, tau) != lw.downlink)
    {
      return false;
    }
  if (m_rule == InterferenceRule::Prose && m_links[v].kind == LinkKind::Hop && lw.window == Window::B)
    {
      return ord.rank (k) > segment;
    }
  return active (w, a, ord, tau, segment);
}

InterferenceBreakdown
LinkModel::interference (int v, const Allocation& a, int tau, int segment) const
{
  const DurationOrdering ord = ordering (a);
  if (segment < 1 || segment > ord.segments ())
    {
      throw std::out_of_range ("segment index outside [1, M+1]");
    }
  InterferenceBreakdown out;
  for (int w = 0; w < size (); ++w)
    {
      if (!counts_against (w, v, a, ord, tau, segment))
        {
          continue;
        }
      const double p = power (a, w) * coupling (w, v);
      if (m_links[w].thz)
        {
          out.thz += p;
        }
      else if (m_links[w].kind == LinkKind::Access)
        {
          out.ra += p;
        }
      else
        {
          out.bh += p;
        }
    }
  return out;
}

double
LinkModel::link_sinr (int v, const Allocation& a, int tau, int segment) const
{
  const ChannelParams& ch = channel (m_links[v].thz);
  const double psd = power (a, v) * self_gain (v) / ch.bandwidth_hz;
  return sinr (psd, interference (v, a, tau, segment), ch, m_links[v].thz);
}

std::vector<double>
LinkModel::throughputs (const Allocation& a) const
{
  const int n = size ();
  const int m = static_cast<int> (m_sbsIds.size ());
  const DurationOrdering ord = ordering (a);
  const bool prose = m_rule == InterferenceRule::Prose;

  std::vector<double> p (n), signal (n), noise (n);
  for (int v = 0; v < n; ++v)
    {
      p[v] = power (a, v);
      signal[v] = p[v] * m_selfGain[v];
      const ChannelParams& ch = channel (m_links[v].thz);
      noise[v] = ch.bandwidth_hz * ch.noise_psd;
    }
  std::vector<std::vector<unsigned char>> dl (m, std::vector<unsigned char> (kSubframes));
  for (int k = 0; k < m; ++k)
    {
      const Rfc& rfc = rfc_pattern (m_rfcCandidates[a.x[m_rfcVar[k]]]);
      for (int tau = 0; tau < kSubframes; ++tau)
        {
          dl[k][tau] = rfc.downlink[tau];
        }
    }
  // Subframes with the same direction pattern share their per-segment sums.
  std::vector<std::vector<unsigned char>> keys;
  std::vector<std::vector<double>> cached;
  std::vector<double> acc (n, 0.0);
  std::vector<int> act;
  act.reserve (n);
  std::vector<unsigned char> key (m);
  for (int tau = 0; tau < kSubframes; ++tau)
    {
      for (int k = 0; k < m; ++k)
        {
          key[k] = dl[k][tau];
        }
      std::size_t hit = 0;
      while (hit < keys.size () && keys[hit] != key)
        {
          ++hit;
        }
      if (hit == keys.size ())
        {
          std::vector<double> sums (n, 0.0);
          for (int i = 1; i <= ord.segments (); ++i)
            {
              const int slots = ord.segment_slots (i);
              if (slots == 0)
                {
                  continue;
                }
              const double width = static_cast<double> (slots) / ord.z ();
              act.clear ();
              for (int v = 0; v < n; ++v)
                {
                  const int k = m_linkSbs[v];
                  if (key[k] != m_linkDownlink[v])
                    {
                      continue;
                    }
                  const int r = ord.rank (k);
                  if (m_linkWindowA[v] ? i <= r : i > r)
                    {
                      act.push_back (v);
                    }
                }
              for (int v : act)
                {
                  if (signal[v] == 0.0)
                    {
                      continue;
                    }
                  double interf = 0.0;
                  if (prose && m_links[v].kind == LinkKind::Hop)
                    {
                      for (int w = 0; w < n; ++w)
                        {
                          if (counts_against (w, v, a, ord, tau, i))
                            {
                              interf += p[w] * coupling (w, v);
                            }
                        }
                    }
                  else
                    {
                      const double* row = &m_couplingInto[static_cast<std::size_t> (v) * n];
                      for (int w : act)
                        {
                          interf += p[w] * row[w];
                        }
                    }
                  sums[v] += width * std::log2 (1.0 + signal[v] / (interf + noise[v]));
                }
            }
          keys.push_back (key);
          cached.push_back (std::move (sums));
        }
      const std::vector<double>& sums = cached[hit];
      for (int v = 0; v < n; ++v)
        {
          acc[v] += sums[v];
        }
    }
  std::vector<double> out (n);
  for (int v = 0; v < n; ++v)
    {
      out[v] = m_links[v].blocks * channel (m_links[v].thz).bandwidth_hz * acc[v] / kSubframes;
    }
  return out;
}

std::vector<std::vector<LinkSample>>
LinkModel::trace (const Allocation& a) const
{
  const DurationOrdering ord = ordering (a);
  std::vector<std::vector<LinkSample>> out (size ());
  for (int v = 0; v < size (); ++v)
    {
      for (int tau = 0; tau < kSubframes; ++tau)
        {
          for (int i = 1; i <= ord.segments (); ++i)
            {
              if (ord.segment_slots (i) == 0 || !active (v, a, ord, tau, i))
                {
                  continue;
                }
              LinkSample s;
              s.tau = tau;
              s.segment = i;
              s.width = ord.segment_width (i);
              s.interference = interference (v, a, tau, i);
              const ChannelParams& ch = channel (m_links[v].thz);
              s.sinr = sinr (power (a, v) * self_gain (v) / ch.bandwidth_hz, s.interference, ch, m_links[v].thz);
              out[v].push_back (s);
            }
        }
    }
  return out;
}

} // namespace iab
