/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/radio.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iab {

double
dbm_to_watt (double dbm)
{
  return std::pow (10.0, (dbm - 30.0) / 10.0);
}

double
watt_to_dbm (double watt)
{
  return 10.0 * std::log10 (watt) + 30.0;
}

double
deg_to_rad (double deg)
{
  return deg * kPi / 180.0;
}

BeamPattern
BeamPattern::make (double beamwidth, double side_lobe)
{
  if (!(beamwidth > 0.0) || beamwidth > 2.0 * kPi + 1e-12)
    {
      throw std::invalid_argument ("beamwidth must lie in (0, 2pi], got " + std::to_string (beamwidth));
    }
  if (!(side_lobe > 0.0) || !(side_lobe < 1.0))
    {
      throw std::invalid_argument ("side lobe gain must lie in (0, 1), got " + std::to_string (side_lobe));
    }
  return BeamPattern{beamwidth, side_lobe};
}

double
main_lobe_gain (const BeamPattern& pattern)
{
  const double twoPi = 2.0 * kPi;
  return (twoPi - (twoPi - pattern.beamwidth) * pattern.side_lobe) / pattern.beamwidth;
}

double
beam_gain (const BeamPattern& pattern, double offset)
{
  if (std::abs (offset) <= pattern.beamwidth / 2.0)
    {
      return main_lobe_gain (pattern);
    }
  return pattern.side_lobe;
}

double
aligned_gain_product (const BeamPattern& tx, const BeamPattern& rx)
{
  return main_lobe_gain (tx) * main_lobe_gain (rx);
}

PathLoss
path_losses (const ChannelParams& params, double distance_m)
{
  if (!(distance_m > 0.0))
    {
      throw std::invalid_argument ("link distance must be positive");
    }
  const double ratio = 4.0 * kPi * distance_m * params.carrier_hz / kSpeedOfLight;
  return PathLoss{std::exp (params.absorption_per_m * distance_m), ratio * ratio};
}

double
free_space_loss_db (double carrier_hz, double distance_m)
{
  const double ratio = 4.0 * kPi * distance_m * carrier_hz / kSpeedOfLight;
  return 20.0 * std::log10 (ratio);
}

double
received_psd (double tx_psd, double gain_product, double absorption_loss, double spreading_loss)
{
  return tx_psd * gain_product / (absorption_loss * spreading_loss);
}

PowerGrid::PowerGrid (double p_max, int levels)
  : m_pMax (p_max),
    m_levels (levels)
{
  if (!(p_max > 0.0))
    {
      throw std::invalid_argument ("maximum power must be positive");
    }
  if (levels < 1)
    {
      throw std::invalid_argument ("power grid needs at least one level");
    }
}

double
PowerGrid::watts (int level) const
{
  if (!contains (level))
    {
      throw std::out_of_range ("power level " + std::to_string (level) + " outside grid");
    }
  return m_pMax * level / m_levels;
}

PowerGrid
power_grid (double p_max, int levels)
{
  return PowerGrid (p_max, levels);
}

} // namespace iab
