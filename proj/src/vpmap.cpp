#include "nrmap/vpmap.hpp"

#include "nrmap/errors.hpp"
#include "nrmap/fdra.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace nrmap {

std::string_view to_string(MappingKind k)
{
  switch (k) {
    case MappingKind::direct:
      return "direct";
    case MappingKind::time_shift:
      return "time_shift";
    case MappingKind::time_freq_shift:
      return "time_freq_shift";
    case MappingKind::bwp_shift:
      return "bwp_shift";
  }
  return "?";
}

void MappingDirective::validate() const
{
  switch (kind) {
    case MappingKind::direct:
      if (delay_slots != 0 || target_bwp || new_rb_start) {
        throw constraint_error("direct mapping carries no delay or retarget");
      }
      break;
    case MappingKind::time_shift:
      if (delay_slots == 0 || target_bwp || new_rb_start) {
        throw constraint_error("time shift needs a positive delay and no retarget");
      }
      break;
    case MappingKind::time_freq_shift:
      if (delay_slots == 0 || target_bwp || !new_rb_start) {
        throw constraint_error("time/frequency shift needs a positive delay and a new start");
      }
      break;
    case MappingKind::bwp_shift:
      if (delay_slots != 0 || !target_bwp || new_rb_start) {
        throw constraint_error("BWP shift carries no delay and needs a target BWP");
      }
      break;
  }
}

unsigned PhysicalAssignment::first_crb() const
{
  if (cells.empty()) {
    return 0;
  }
  return std::min_element(cells.begin(), cells.end(), [](const CellCoord& a, const CellCoord& b) {
           return a.crb < b.crb;
         })->crb;
}

CqiMap::CqiMap(unsigned default_cqi, double alpha) : default_cqi_(default_cqi), alpha_(alpha)
{
  if (default_cqi > 15) {
    throw config_error("CQI must be 0..15");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw config_error("CQI smoothing factor must be in (0, 1]");
  }
}

void CqiMap::set(unsigned ue, unsigned slot, unsigned crb, unsigned cqi)
{
  if (cqi > 15) {
    throw range_error("CQI must be 0..15, got " + std::to_string(cqi));
  }
  values_[{ue, crb, slot}] = cqi;
}

void CqiMap::set_range(unsigned ue, unsigned slot, IndexRange crbs, unsigned cqi)
{
  for (unsigned c = crbs.first; c <= crbs.last; ++c) {
    set(ue, slot, c, cqi);
  }
}

std::optional<unsigned> CqiMap::observed(unsigned ue, unsigned slot, unsigned crb) const
{
  auto it = values_.find({ue, crb, slot});
  if (it == values_.end()) {
    return std::nullopt;
  }
  return it->second;
}

double CqiMap::estimate(unsigned ue, unsigned slot, unsigned crb) const
{
  if (auto v = observed(ue, slot, crb)) {
    return *v;
  }
  auto       it  = values_.lower_bound({ue, crb, 0U});
  const auto end = values_.lower_bound({ue, crb, slot});
  if (it == end) {
    return default_cqi_;
  }
  double ema = it->second;
  for (++it; it != end; ++it) {
    ema = alpha_ * it->second + (1.0 - alpha_) * ema;
  }
  return ema;
}

namespace {

void check_alloc(const VrbAllocation& alloc, const BwpConfig& bwp)
{
  if (alloc.bwp_id != bwp.id || alloc.direction != bwp.direction) {
    throw config_error("allocation refers to BWP " + std::to_string(alloc.bwp_id) + ", got BWP " +
                       std::to_string(bwp.id));
  }
  if (alloc.l_rbs == 0 || alloc.rb_start >= bwp.size_rb || alloc.l_rbs > bwp.size_rb - alloc.rb_start) {
    throw range_error("grant VRBs " + std::to_string(alloc.rb_start) + "+" + std::to_string(alloc.l_rbs) +
                      " outside BWP of " + std::to_string(bwp.size_rb) + " RBs");
  }
}

PhysicalAssignment make_assignment(const VrbAllocation& alloc, unsigned bwp_id, MappingDirective via)
{
  PhysicalAssignment pa;
  pa.ue_id   = alloc.ue_id;
  pa.bwp_id  = bwp_id;
  pa.symbols = alloc.symbols;
  pa.via     = via;
  pa.cells.reserve(alloc.l_rbs);
  return pa;
}

void check_delay(const VrbAllocation& alloc, unsigned d, const ShiftLimits& limits)
{
  if (d == 0) {
    throw constraint_error("shifted mappings need a delay of at least one slot");
  }
  if (d > limits.buffer_slots) {
    throw buffer_error("delay of " + std::to_string(d) + " slots exceeds the " +
                       std::to_string(limits.buffer_slots) + "-slot transmit buffer");
  }
  if (alloc.slot + d >= limits.horizon) {
    throw buffer_error("delayed slot " + std::to_string(alloc.slot + d) + " beyond simulation horizon " +
                       std::to_string(limits.horizon));
  }
}

bool cell_free(const CellCoord& c, const CellSet& occupied, const std::vector<ProtectionWindow>& protections)
{
  return occupied.count(c) == 0 && !is_protected(c, protections);
}

bool all_free(const std::vector<CellCoord>&        cells,
              const CellSet&                       occupied,
              const std::vector<ProtectionWindow>& protections)
{
  return std::all_of(cells.begin(), cells.end(), [&](const CellCoord& c) { return cell_free(c, occupied, protections); });
}

std::vector<CellCoord> base_cells(const VrbAllocation& alloc, const BwpConfig& bwp, std::optional<unsigned> bundle_l)
{
  return bundle_l ? map_interleaved(alloc, bwp, *bundle_l).cells : map_noninterleaved(alloc, bwp).cells;
}

std::vector<CellCoord> translated(std::vector<CellCoord> cells, unsigned d)
{
  for (auto& c : cells) {
    c.slot += d;
  }
  return cells;
}

} // namespace

bool is_protected(const CellCoord& c, const std::vector<ProtectionWindow>& protections)
{
  return std::any_of(protections.begin(), protections.end(), [&](const ProtectionWindow& w) { return w.covers(c); });
}

PhysicalAssignment map_noninterleaved(const VrbAllocation& alloc, const BwpConfig& bwp)
{
  check_alloc(alloc, bwp);
  auto pa = make_assignment(alloc, bwp.id, {});
  for (unsigned v = alloc.rb_start; v < alloc.rb_start + alloc.l_rbs; ++v) {
    pa.cells.push_back({alloc.slot, vrb_to_crb(v, bwp)});
  }
  return pa;
}

PhysicalAssignment map_direct(const VrbAllocation& alloc, const BwpConfig& bwp)
{
  return map_noninterleaved(alloc, bwp);
}

unsigned interleaver_bundle_count(const BwpConfig& bwp, unsigned bundle_l)
{
  if (bundle_l != 2 && bundle_l != 4) {
    throw config_error("VRB bundle size must be 2 or 4");
  }
  return rbg_partition(bwp, bundle_l).n_rbg();
}

unsigned interleave_bundle(unsigned j, unsigned n_bundle)
{
  if (j >= n_bundle) {
    throw range_error("bundle index out of range");
  }
  if (j == n_bundle - 1) {
    return j;
  }
  constexpr unsigned rows = 2;
  const unsigned     cols = n_bundle / rows;
  const unsigned     r    = j % rows;
  const unsigned     c    = j / rows;
  return r * cols + c;
}

namespace {

class Interleaver {
public:
  Interleaver(const BwpConfig& bwp, unsigned bundle_l)
  {
    if (bundle_l != 2 && bundle_l != 4) {
      throw config_error("VRB bundle size must be 2 or 4");
    }
    const auto part = rbg_partition(bwp, bundle_l);
    const auto n    = part.n_rbg();
    std::vector<unsigned> first(n + 1, 0);
    for (unsigned j = 0; j < n; ++j) {
      first[j + 1] = first[j] + part.sizes[j];
    }
    prb_of_vrb_.resize(bwp.size_rb);
    for (unsigned j = 0; j < n; ++j) {
      const unsigned f = interleave_bundle(j, n);
      for (unsigned k = 0; k < part.sizes[j]; ++k) {
        prb_of_vrb_[first[j] + k] = first[f] + k;
      }
    }
  }

  unsigned operator()(unsigned vrb) const { return prb_of_vrb_.at(vrb); }

private:
  std::vector<unsigned> prb_of_vrb_;
};

} // namespace

unsigned vrb_to_prb_interleaved(unsigned vrb, const BwpConfig& bwp, unsigned bundle_l)
{
  if (vrb >= bwp.size_rb) {
    throw range_error("VRB outside BWP");
  }
  return Interleaver(bwp, bundle_l)(vrb);
}

PhysicalAssignment map_interleaved(const VrbAllocation& alloc, const BwpConfig& bwp, unsigned bundle_l)
{
  if (alloc.alloc_type != AllocationType::type1) {
    throw constraint_error("interleaved VRB-to-PRB mapping is only defined for allocation type 1");
  }
  check_alloc(alloc, bwp);
  const Interleaver il(bwp, bundle_l);
  auto              pa = make_assignment(alloc, bwp.id, {});
  for (unsigned v = alloc.rb_start; v < alloc.rb_start + alloc.l_rbs; ++v) {
    pa.cells.push_back({alloc.slot, bwp.crb_start + il(v)});
  }
  std::sort(pa.cells.begin(), pa.cells.end());
  return pa;
}

PhysicalAssignment map_time_shift(const VrbAllocation&    alloc,
                                  const BwpConfig&        bwp,
                                  unsigned                d,
                                  const ShiftLimits&      limits,
                                  std::optional<unsigned> interleave_bundle_l)
{
  check_delay(alloc, d, limits);
  auto pa   = make_assignment(alloc, bwp.id, {MappingKind::time_shift, d, std::nullopt, std::nullopt});
  pa.cells  = translated(base_cells(alloc, bwp, interleave_bundle_l), d);
  pa.events = {{SignalingEvent::Kind::shift_notification, alloc.ue_id, alloc.slot + d, bwp.id, d}};
  return pa;
}

std::optional<unsigned> find_reallocation_block(const VrbAllocation&                 alloc,
                                                const BwpConfig&                     bwp,
                                                unsigned                             target_slot,
                                                const CqiMap&                        cqi,
                                                const CellSet&                       occupied,
                                                const std::vector<ProtectionWindow>& protections)
{
  check_alloc(alloc, bwp);
  const unsigned    len = alloc.l_rbs;
  std::vector<char> free(bwp.size_rb);
  std::vector<double> score(bwp.size_rb);
  for (unsigned p = 0; p < bwp.size_rb; ++p) {
    const CellCoord c{target_slot, bwp.crb_start + p};
    free[p]  = cell_free(c, occupied, protections) ? 1 : 0;
    score[p] = cqi.estimate(alloc.ue_id, target_slot, c.crb);
  }

  std::optional<unsigned> best;
  double                  best_sum = 0.0;
  for (unsigned s = 0; s + len <= bwp.size_rb; ++s) {
    bool   ok  = true;
    double sum = 0.0;
    for (unsigned k = 0; k < len && ok; ++k) {
      ok = free[s + k] != 0;
      sum += score[s + k];
    }
    if (ok && (!best || sum > best_sum)) {
      best     = s;
      best_sum = sum;
    }
  }
  return best;
}

PhysicalAssignment map_time_freq_shift(const VrbAllocation&                 alloc,
                                       const BwpConfig&                     bwp,
                                       unsigned                             d,
                                       const CqiMap&                        cqi,
                                       const CellSet&                       occupied,
                                       const std::vector<ProtectionWindow>& protections,
                                       const ShiftLimits&                   limits)
{
  check_delay(alloc, d, limits);
  const unsigned target = alloc.slot + d;
  const auto     start  = find_reallocation_block(alloc, bwp, target, cqi, occupied, protections);
  if (!start) {
    throw reallocation_failure("no free block of " + std::to_string(alloc.l_rbs) + " RBs in slot " +
                               std::to_string(target));
  }
  auto pa = make_assignment(alloc, bwp.id, {MappingKind::time_freq_shift, d, std::nullopt, *start});
  for (unsigned k = 0; k < alloc.l_rbs; ++k) {
    pa.cells.push_back({target, bwp.crb_start + *start + k});
  }
  pa.events = {{SignalingEvent::Kind::shift_notification, alloc.ue_id, target, bwp.id, d}};
  return pa;
}

PhysicalAssignment map_bwp_shift(const VrbAllocation&                 alloc,
                                 const BwpConfig&                     target,
                                 const CellSet&                       occupied,
                                 const std::vector<ProtectionWindow>& protections)
{
  if (target.direction != alloc.direction) {
    throw constraint_error("target BWP has the wrong link direction");
  }
  if (target.id == alloc.bwp_id) {
    throw constraint_error("BWP shift needs a BWP other than the source");
  }
  if (alloc.l_rbs == 0 || alloc.rb_start + alloc.l_rbs > target.size_rb) {
    throw capacity_error("grant of VRBs " + std::to_string(alloc.rb_start) + "+" + std::to_string(alloc.l_rbs) +
                         " does not fit BWP " + std::to_string(target.id) + " of " +
                         std::to_string(target.size_rb) + " RBs");
  }
  auto pa = make_assignment(alloc, target.id, {MappingKind::bwp_shift, 0, target.id, std::nullopt});
  for (unsigned v = alloc.rb_start; v < alloc.rb_start + alloc.l_rbs; ++v) {
    const CellCoord c{alloc.slot, target.crb_start + v};
    if (!cell_free(c, occupied, protections)) {
      throw conflict_error("BWP " + std::to_string(target.id) + " CRB " + std::to_string(c.crb) + " busy in slot " +
                           std::to_string(c.slot));
    }
    pa.cells.push_back(c);
  }
  pa.events = {{SignalingEvent::Kind::bwp_activation, alloc.ue_id, alloc.slot, target.id, 0}};
  return pa;
}

const BwpConfig& MappingContext::bwp_of(const VrbAllocation& alloc) const
{
  auto it = std::find_if(bwps.begin(), bwps.end(), [&](const BwpConfig& b) {
    return b.id == alloc.bwp_id && b.direction == alloc.direction;
  });
  if (it == bwps.end()) {
    throw config_error("allocation refers to unknown BWP " + std::to_string(alloc.bwp_id));
  }
  return *it;
}

namespace {

std::optional<MappingDirective> try_direct(const VrbAllocation& alloc, const MappingContext& ctx)
{
  const auto cells = base_cells(alloc, ctx.bwp_of(alloc), ctx.interleave_bundle_l);
  if (all_free(cells, ctx.occupancy, ctx.protections)) {
    return MappingDirective{};
  }
  return std::nullopt;
}

std::optional<MappingDirective> try_bwp_shift(const VrbAllocation& alloc, const MappingContext& ctx)
{
  std::vector<const BwpConfig*> candidates;
  for (const auto& b : ctx.bwps) {
    if (b.direction == alloc.direction && b.id != alloc.bwp_id) {
      candidates.push_back(&b);
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* b : candidates) {
    if (alloc.rb_start + alloc.l_rbs > b->size_rb) {
      continue;
    }
    bool ok = true;
    for (unsigned v = alloc.rb_start; v < alloc.rb_start + alloc.l_rbs && ok; ++v) {
      ok = cell_free({alloc.slot, b->crb_start + v}, ctx.occupancy, ctx.protections);
    }
    if (ok) {
      return MappingDirective{MappingKind::bwp_shift, 0, b->id, std::nullopt};
    }
  }
  return std::nullopt;
}

std::optional<MappingDirective> try_delay(const VrbAllocation& alloc, const MappingContext& ctx)
{
  const auto&    bwp   = ctx.bwp_of(alloc);
  const unsigned max_d = std::min({alloc.latency_budget_slots, ctx.d_max, ctx.limits.buffer_slots});
  const auto     base  = base_cells(alloc, bwp, ctx.interleave_bundle_l);
  for (unsigned d = 1; d <= max_d; ++d) {
    if (alloc.slot + d >= ctx.limits.horizon) {
      break;
    }
    if (all_free(translated(base, d), ctx.occupancy, ctx.protections)) {
      return MappingDirective{MappingKind::time_shift, d, std::nullopt, std::nullopt};
    }
    if (auto s = find_reallocation_block(alloc, bwp, alloc.slot + d, ctx.cqi, ctx.occupancy, ctx.protections)) {
      return MappingDirective{MappingKind::time_freq_shift, d, std::nullopt, *s};
    }
  }
  return std::nullopt;
}

} // namespace

Selection DefaultPolicy::select(const VrbAllocation& alloc, const MappingContext& ctx) const
{
  if (auto d = try_direct(alloc, ctx)) {
    return *d;
  }
  if (alloc.time_sensitive || alloc.latency_budget_slots == 0) {
    if (auto d = try_bwp_shift(alloc, ctx)) {
      return *d;
    }
    return RescheduleRequired{"UE " + std::to_string(alloc.ue_id) + " slot " + std::to_string(alloc.slot) +
                              ": no delay tolerated and no free BWP"};
  }
  if (auto d = try_delay(alloc, ctx)) {
    return *d;
  }
  if (auto d = try_bwp_shift(alloc, ctx)) {
    return *d;
  }
  return RescheduleRequired{"UE " + std::to_string(alloc.ue_id) + " slot " + std::to_string(alloc.slot) +
                            ": no feasible placement within the latency budget"};
}

Selection BwpFirstPolicy::select(const VrbAllocation& alloc, const MappingContext& ctx) const
{
  if (auto d = try_direct(alloc, ctx)) {
    return *d;
  }
  if (auto d = try_bwp_shift(alloc, ctx)) {
    return *d;
  }
  if (!alloc.time_sensitive && alloc.latency_budget_slots > 0) {
    if (auto d = try_delay(alloc, ctx)) {
      return *d;
    }
  }
  return RescheduleRequired{"UE " + std::to_string(alloc.ue_id) + " slot " + std::to_string(alloc.slot) +
                            ": no feasible placement"};
}

std::unique_ptr<MappingPolicy> make_policy(std::string_view name)
{
  if (name == "default") {
    return std::make_unique<DefaultPolicy>();
  }
  if (name == "bwp-first") {
    return std::make_unique<BwpFirstPolicy>();
  }
  throw config_error("unknown mapping policy '" + std::string(name) + "'");
}

Selection select_mapping(const VrbAllocation& alloc, const MappingContext& ctx)
{
  return DefaultPolicy{}.select(alloc, ctx);
}

PhysicalAssignment apply_directive(const VrbAllocation& alloc, const MappingDirective& d, const MappingContext& ctx)
{
  d.validate();
  const auto& bwp = ctx.bwp_of(alloc);
  switch (d.kind) {
    case MappingKind::direct: {
      auto pa = ctx.interleave_bundle_l ? map_interleaved(alloc, bwp, *ctx.interleave_bundle_l)
                                        : map_direct(alloc, bwp);
      pa.via  = d;
      return pa;
    }
    case MappingKind::time_shift:
      return map_time_shift(alloc, bwp, d.delay_slots, ctx.limits, ctx.interleave_bundle_l);
    case MappingKind::time_freq_shift: {
      auto pa = map_time_freq_shift(alloc, bwp, d.delay_slots, ctx.cqi, ctx.occupancy, ctx.protections, ctx.limits);
      if (pa.via.new_rb_start != d.new_rb_start) {
        throw conflict_error("time/frequency shift block differs from the selected one");
      }
      return pa;
    }
    case MappingKind::bwp_shift: {
      const auto* target = [&]() -> const BwpConfig* {
        for (const auto& b : ctx.bwps) {
          if (b.id == *d.target_bwp && b.direction == alloc.direction) {
            return &b;
          }
        }
        return nullptr;
      }();
      if (target == nullptr) {
        throw config_error("unknown target BWP " + std::to_string(*d.target_bwp));
      }
      return map_bwp_shift(alloc, *target, ctx.occupancy, ctx.protections);
    }
  }
  throw constraint_error("unknown mapping kind");
}

ViolationReport verify_assignment(const std::vector<PhysicalAssignment>& assignments,
                                  const std::vector<ProtectionWindow>&   protections)
{
  ViolationReport             report;
  std::map<CellCoord, unsigned> owner;
  for (const auto& a : assignments) {
    for (const auto& c : a.cells) {
      auto w = std::find_if(protections.begin(), protections.end(), [&](const auto& p) { return p.covers(c); });
      if (w != protections.end()) {
        report.protection.push_back({a.ue_id, c, w->label});
      }
      auto [it, inserted] = owner.emplace(c, a.ue_id);
      if (!inserted) {
        report.overlap.push_back({it->second, a.ue_id, c});
      }
    }
  }
  return report;
}

} // namespace nrmap
