#include "nrmap/sched.hpp"

#include "nrmap/errors.hpp"

#include <algorithm>
#include <string>

namespace nrmap {

ScheduleEpoch schedule_round_robin(const std::vector<UeProfile>& ues,
                                   const BwpConfig&              bwp,
                                   unsigned                      tti_count,
                                   const RoundRobinOptions&      opts)
{
  ScheduleEpoch epoch;
  if (ues.empty() || tti_count == 0) {
    return epoch;
  }
  if (opts.ues_per_slot == 0) {
    throw config_error("at least one UE per slot");
  }
  for (const auto& ue : ues) {
    if (ue.demand_rbs == 0 || ue.demand_rbs > bwp.size_rb) {
      throw grant_error("UE " + std::to_string(ue.ue_id) + " demands " + std::to_string(ue.demand_rbs) +
                        " RBs in a BWP of " + std::to_string(bwp.size_rb));
    }
  }

  const auto per_slot = std::min<std::size_t>(opts.ues_per_slot, ues.size());
  std::size_t next    = 0;
  for (unsigned t = 0; t < tti_count; ++t) {
    const unsigned slot   = opts.first_slot + t;
    unsigned       cursor = 0;
    auto&          grants = epoch[slot];
    for (std::size_t k = 0; k < per_slot; ++k) {
      const auto& ue = ues[next];
      next           = (next + 1) % ues.size();
      if (cursor + ue.demand_rbs > bwp.size_rb) {
        throw grant_error("slot " + std::to_string(slot) + ": co-scheduled demands exceed the BWP");
      }
      VrbAllocation a;
      a.ue_id                = ue.ue_id;
      a.slot                 = slot;
      a.bwp_id               = bwp.id;
      a.direction            = bwp.direction;
      a.rb_start             = cursor;
      a.l_rbs                = ue.demand_rbs;
      a.symbols              = opts.symbols;
      a.latency_budget_slots = ue.latency_budget_slots;
      a.time_sensitive       = ue.time_sensitive;
      grants.push_back(a);
      cursor += ue.demand_rbs;
    }
  }
  return epoch;
}

} // namespace nrmap
