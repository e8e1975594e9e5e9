/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_RADIO_H
#define IAB_RADIO_H

#include <cstddef>

namespace iab {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kPi = 3.14159265358979323846;

double dbm_to_watt (double dbm);
double watt_to_dbm (double watt);
double deg_to_rad (double deg);

/**
 * Sectored antenna pattern: a flat main lobe of width `beamwidth` radians and
 * a constant side-lobe gain. The main-lobe gain is chosen so that the pattern
 * integrates to 2*pi over the azimuth circle.
 */
struct BeamPattern
{
  double beamwidth;
  double side_lobe;

  /// Throws std::invalid_argument unless 0 < beamwidth <= 2*pi and 0 < side_lobe < 1.
  static BeamPattern make (double beamwidth, double side_lobe);
};

/// Gain at angular offset `offset` from the boresight.
double beam_gain (const BeamPattern& pattern, double offset);

double main_lobe_gain (const BeamPattern& pattern);

/// Tx/Rx gain product of a link whose two beams point at each other.
double aligned_gain_product (const BeamPattern& tx, const BeamPattern& rx);

struct ChannelParams
{
  double carrier_hz;
  double bandwidth_hz;
  double absorption_per_m;
  double noise_psd;          // W/Hz
};

struct PathLoss
{
  double absorption;         // e^{K d}
  double spreading;          // (4 pi d f / c)^2

  double total () const { return absorption * spreading; }
};

/// Molecular absorption and free-space spreading loss at distance `distance_m`.
PathLoss path_losses (const ChannelParams& params, double distance_m);

double free_space_loss_db (double carrier_hz, double distance_m);

/// Received PSD (W/Hz) of a transmission with PSD `tx_psd` over a channel.
double received_psd (double tx_psd, double gain_product, double absorption_loss,
                     double spreading_loss);

/**
 * Evenly spaced transmit powers {0, p/L, ..., p}. Strategies hold the level
 * index; Watts are derived on demand so set membership stays exact.
 */
class PowerGrid
{
public:
  PowerGrid () = default;
  PowerGrid (double p_max, int levels);

  int levels () const { return m_levels; }
  std::size_t size () const { return static_cast<std::size_t> (m_levels) + 1; }
  double p_max () const { return m_pMax; }
  double step () const { return m_pMax / m_levels; }
  bool contains (int level) const { return level >= 0 && level <= m_levels; }
  double watts (int level) const;

private:
  double m_pMax = 1.0;
  int m_levels = 1;
};

PowerGrid power_grid (double p_max, int levels);

} // namespace iab

#endif
