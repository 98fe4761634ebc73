#include "nrmap/grid.hpp"

#include "nrmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nrmap {

Numerology::Numerology(unsigned mu, CyclicPrefix cp) : mu_(mu), cp_(cp)
{
  if (mu > 4) {
    throw config_error("numerology mu must be in 0..4, got " + std::to_string(mu));
  }
  if (cp == CyclicPrefix::extended && mu != 2) {
    throw config_error("extended cyclic prefix is only supported for mu=2 (60 kHz)");
  }
}

Carrier::Carrier(CarrierConfig cfg) : cfg_(cfg)
{
  if (cfg_.n_crb == 0 || cfg_.n_crb > max_carrier_rbs) {
    throw config_error("carrier size must be 1.." + std::to_string(max_carrier_rbs) + " RBs");
  }
}

void Carrier::add_bwp(const BwpConfig& bwp)
{
  if (bwp.id >= max_bwps_per_direction) {
    throw config_error("BWP id must be 0..3");
  }
  if (bwp.size_rb == 0 || bwp.crb_end() > cfg_.n_crb) {
    throw config_error("BWP " + std::to_string(bwp.id) + " does not fit inside the carrier");
  }
  if (!(bwp.numerology == cfg_.numerology)) {
    throw config_error("BWP numerology differs from the carrier resource grid");
  }
  const auto same_dir = std::count_if(bwps_.begin(), bwps_.end(), [&](const BwpConfig& b) {
    return b.direction == bwp.direction;
  });
  if (same_dir >= static_cast<long>(max_bwps_per_direction)) {
    throw config_error("at most 4 BWPs per direction");
  }
  if (find_bwp(bwp.direction, bwp.id) != nullptr) {
    throw config_error("duplicate BWP id " + std::to_string(bwp.id));
  }
  bwps_.push_back(bwp);
  const auto dir = static_cast<std::size_t>(bwp.direction);
  if (!has_active_[dir]) {
    activate(bwp.direction, bwp.id);
  }
}

const BwpConfig* Carrier::find_bwp(Direction dir, unsigned id) const
{
  auto it = std::find_if(
      bwps_.begin(), bwps_.end(), [&](const BwpConfig& b) { return b.direction == dir && b.id == id; });
  return it == bwps_.end() ? nullptr : &*it;
}

const BwpConfig& Carrier::bwp(Direction dir, unsigned id) const
{
  const auto* b = find_bwp(dir, id);
  if (b == nullptr) {
    throw config_error("unknown BWP id " + std::to_string(id));
  }
  return *b;
}

void Carrier::activate(Direction dir, unsigned id)
{
  if (find_bwp(dir, id) == nullptr) {
    throw config_error("cannot activate unknown BWP id " + std::to_string(id));
  }
  (dir == Direction::downlink ? active_.active_dl : active_.active_ul) = id;
  has_active_[static_cast<std::size_t>(dir)]                           = true;
}

unsigned vrb_to_crb(unsigned vrb, const BwpConfig& bwp)
{
  if (vrb >= bwp.size_rb) {
    throw range_error("VRB " + std::to_string(vrb) + " outside BWP of " + std::to_string(bwp.size_rb) + " RBs");
  }
  return bwp.crb_start + vrb;
}

unsigned slot_count(double duration_ms, const Numerology& numerology)
{
  if (!(duration_ms >= 0.0) || std::floor(duration_ms) != duration_ms) {
    throw config_error("duration must be a whole number of 1 ms subframes");
  }
  return static_cast<unsigned>(duration_ms) * numerology.slots_per_subframe();
}

} // namespace nrmap
