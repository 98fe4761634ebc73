#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace nrmap {

constexpr unsigned max_carrier_rbs       = 275;
constexpr unsigned max_bwps_per_direction = 4;
constexpr unsigned subframes_per_frame    = 10;

enum class CyclicPrefix { normal, extended };
enum class Direction { downlink, uplink };

/// Subcarrier spacing configuration mu (SCS = 15 * 2^mu kHz).
class Numerology {
public:
  /// Extended CP is only accepted for mu = 2. Throws config_error otherwise.
  explicit Numerology(unsigned mu, CyclicPrefix cp = CyclicPrefix::normal);

  unsigned     mu() const { return mu_; }
  CyclicPrefix cp() const { return cp_; }
  unsigned     scs_khz() const { return 15U << mu_; }
  unsigned     slots_per_subframe() const { return 1U << mu_; }
  unsigned     symbols_per_slot() const { return cp_ == CyclicPrefix::normal ? 14U : 12U; }

  friend bool operator==(const Numerology&, const Numerology&) = default;

private:
  unsigned     mu_;
  CyclicPrefix cp_;
};

struct CarrierConfig {
  unsigned   n_crb;
  Numerology numerology;

  unsigned frame_slots() const { return subframes_per_frame * numerology.slots_per_subframe(); }
};

struct BwpConfig {
  unsigned   id = 0;
  unsigned   crb_start = 0;
  unsigned   size_rb = 0;
  Direction  direction = Direction::downlink;
  Numerology numerology{0};
  /// Reporting tag only: BWP sits in shared (as opposed to licensed) spectrum.
  bool shared = false;

  unsigned crb_end() const { return crb_start + size_rb; }
  bool     contains_crb(unsigned crb) const { return crb >= crb_start && crb < crb_end(); }

  friend bool operator==(const BwpConfig&, const BwpConfig&) = default;
};

/// Absolute (slot, common resource block) coordinate of one grid cell.
struct CellCoord {
  unsigned slot = 0;
  unsigned crb  = 0;

  friend auto operator<=>(const CellCoord&, const CellCoord&) = default;
};

struct ActiveBwpState {
  unsigned active_dl = 0;
  unsigned active_ul = 0;

  unsigned active(Direction d) const { return d == Direction::downlink ? active_dl : active_ul; }
};

/// A carrier with its registered bandwidth parts and the currently active pair.
class Carrier {
public:
  explicit Carrier(CarrierConfig cfg);

  const CarrierConfig& config() const { return cfg_; }

  /// Registers a BWP. Rejects out-of-carrier geometry, duplicate ids and a fifth BWP per direction.
  void add_bwp(const BwpConfig& bwp);

  const std::vector<BwpConfig>& bwps() const { return bwps_; }
  const BwpConfig&              bwp(Direction dir, unsigned id) const;
  const BwpConfig*              find_bwp(Direction dir, unsigned id) const;

  /// Makes `id` the active BWP of its direction, replacing the previous one.
  void                  activate(Direction dir, unsigned id);
  const ActiveBwpState& active() const { return active_; }
  const BwpConfig&      active_bwp(Direction dir) const { return bwp(dir, active_.active(dir)); }

private:
  CarrierConfig          cfg_;
  std::vector<BwpConfig> bwps_;
  ActiveBwpState         active_;
  std::array<bool, 2>    has_active_{false, false};
};

/// BWP-relative VRB index to absolute CRB index (non-interleaved coordinate transform).
unsigned vrb_to_crb(unsigned vrb, const BwpConfig& bwp);

/// Number of slots in `duration_ms`; the duration must be a whole number of subframes.
unsigned slot_count(double duration_ms, const Numerology& numerology);

} // namespace nrmap
