#pragma once

#include "nrmap/grid.hpp"
#include "nrmap/vpmap.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace nrmap {

struct UeProfile {
  unsigned      ue_id                = 0;
  unsigned      demand_rbs           = 0;
  unsigned      latency_budget_slots = 0;
  bool          time_sensitive       = false;
  std::uint16_t rnti                 = 0;
};

/// Slot -> grants scheduled in that slot, in packing order.
using ScheduleEpoch = std::map<unsigned, std::vector<VrbAllocation>>;

struct RoundRobinOptions {
  unsigned   first_slot   = 1;
  unsigned   ues_per_slot = 1;
  SymbolSpan symbols      = {0, 14};
};

/// Cyclic first-fit scheduler: `ues_per_slot` UEs per TTI for `tti_count` TTIs, each grant contiguous and
/// packed back-to-back from VRB 0. Throws grant_error when demands do not fit the BWP.
ScheduleEpoch schedule_round_robin(const std::vector<UeProfile>& ues,
                                   const BwpConfig&              bwp,
                                   unsigned                      tti_count,
                                   const RoundRobinOptions&      opts = {});

} // namespace nrmap
