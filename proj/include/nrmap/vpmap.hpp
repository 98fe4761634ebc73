#pragma once

#include "nrmap/grid.hpp"
#include "nrmap/tdra.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace nrmap {

enum class AllocationType { type0, type1 };

/// Inclusive index range [first, last].
struct IndexRange {
  unsigned first = 0;
  unsigned last  = 0;

  bool     contains(unsigned v) const { return v >= first && v <= last; }
  unsigned size() const { return last - first + 1; }

  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Contiguous VRB grant produced by the MAC scheduler for one UE in one slot.
struct VrbAllocation {
  unsigned       ue_id                = 0;
  unsigned       slot                 = 0;
  unsigned       bwp_id               = 0;
  Direction      direction            = Direction::downlink;
  unsigned       rb_start             = 0;
  unsigned       l_rbs                = 0;
  SymbolSpan     symbols              = {};
  unsigned       latency_budget_slots = 0;
  bool           time_sensitive       = false;
  AllocationType alloc_type           = AllocationType::type1;

  friend bool operator==(const VrbAllocation&, const VrbAllocation&) = default;
};

/// Time-frequency region reserved for a passive system, in absolute slot/CRB coordinates.
struct ProtectionWindow {
  IndexRange  slots;
  IndexRange  crbs;
  std::string label;

  bool covers(const CellCoord& c) const { return slots.contains(c.slot) && crbs.contains(c.crb); }
};

enum class MappingKind { direct, time_shift, time_freq_shift, bwp_shift };

std::string_view to_string(MappingKind k);

struct MappingDirective {
  MappingKind kind        = MappingKind::direct;
  unsigned    delay_slots = 0;
  /// Set for bwp_shift only.
  std::optional<unsigned> target_bwp;
  /// BWP-relative PRB start, set for time_freq_shift only.
  std::optional<unsigned> new_rb_start;

  /// Throws constraint_error when the fields contradict the kind.
  void validate() const;

  friend bool operator==(const MappingDirective&, const MappingDirective&) = default;
};

struct SignalingEvent {
  enum class Kind { bwp_activation, shift_notification };

  Kind     kind        = Kind::shift_notification;
  unsigned ue_id       = 0;
  unsigned slot        = 0;
  unsigned bwp_id      = 0;
  unsigned delay_slots = 0;

  friend bool operator==(const SignalingEvent&, const SignalingEvent&) = default;
};

struct PhysicalAssignment {
  unsigned                    ue_id  = 0;
  unsigned                    bwp_id = 0;
  std::vector<CellCoord>      cells;
  SymbolSpan                  symbols;
  MappingDirective            via;
  std::vector<SignalingEvent> events;

  unsigned slot() const { return cells.empty() ? 0 : cells.front().slot; }
  unsigned first_crb() const;
};

using CellSet = std::set<CellCoord>;

/// Per (UE, slot, CRB) channel quality. Slots without a report are predicted from the UE's earlier reports on
/// the same CRB with an exponential moving average; CRBs never reported fall back to `default_cqi`.
class CqiMap {
public:
  explicit CqiMap(unsigned default_cqi = 0, double alpha = 0.5);

  void set(unsigned ue, unsigned slot, unsigned crb, unsigned cqi);
  void set_range(unsigned ue, unsigned slot, IndexRange crbs, unsigned cqi);

  std::optional<unsigned> observed(unsigned ue, unsigned slot, unsigned crb) const;
  double                  estimate(unsigned ue, unsigned slot, unsigned crb) const;

  unsigned default_cqi() const { return default_cqi_; }
  double   alpha() const { return alpha_; }
  bool     empty() const { return values_.empty(); }

private:
  // keyed (ue, crb, slot) so a CRB's history is contiguous
  std::map<std::tuple<unsigned, unsigned, unsigned>, unsigned> values_;
  unsigned                                                     default_cqi_;
  double                                                       alpha_;
};

/// Limits on how far a transmission may be delayed.
struct ShiftLimits {
  unsigned horizon      = 0;
  unsigned buffer_slots = 8;
};

// Standard VRB-to-PRB mappings.

PhysicalAssignment map_noninterleaved(const VrbAllocation& alloc, const BwpConfig& bwp);

unsigned interleaver_bundle_count(const BwpConfig& bwp, unsigned bundle_l);
/// Row-column bundle permutation with R = 2; the last bundle maps to itself.
unsigned interleave_bundle(unsigned j, unsigned n_bundle);
/// BWP-relative PRB carrying BWP-relative VRB `vrb` under interleaved mapping.
unsigned vrb_to_prb_interleaved(unsigned vrb, const BwpConfig& bwp, unsigned bundle_l);

PhysicalAssignment map_interleaved(const VrbAllocation& alloc, const BwpConfig& bwp, unsigned bundle_l);

// Mapping types 1..4.

PhysicalAssignment map_direct(const VrbAllocation& alloc, const BwpConfig& bwp);

PhysicalAssignment map_time_shift(const VrbAllocation&           alloc,
                                  const BwpConfig&               bwp,
                                  unsigned                       d,
                                  const ShiftLimits&             limits,
                                  std::optional<unsigned>        interleave_bundle_l = std::nullopt);

PhysicalAssignment map_time_freq_shift(const VrbAllocation&                 alloc,
                                       const BwpConfig&                     bwp,
                                       unsigned                             d,
                                       const CqiMap&                        cqi,
                                       const CellSet&                       occupied,
                                       const std::vector<ProtectionWindow>& protections,
                                       const ShiftLimits&                   limits);

PhysicalAssignment map_bwp_shift(const VrbAllocation&                 alloc,
                                 const BwpConfig&                     target,
                                 const CellSet&                       occupied,
                                 const std::vector<ProtectionWindow>& protections);

/// Best free contiguous block for a time/frequency reallocation: highest mean CQI, ties to the lowest start.
/// Returns the BWP-relative start, or nullopt when no block is free.
std::optional<unsigned> find_reallocation_block(const VrbAllocation&                 alloc,
                                                const BwpConfig&                     bwp,
                                                unsigned                             target_slot,
                                                const CqiMap&                        cqi,
                                                const CellSet&                       occupied,
                                                const std::vector<ProtectionWindow>& protections);

// Selection.

struct MappingContext {
  const std::vector<BwpConfig>&        bwps;
  const std::vector<ProtectionWindow>& protections;
  const CqiMap&                        cqi;
  const CellSet&                       occupancy;
  ShiftLimits                          limits;
  unsigned                             d_max = 8;
  /// Bundle size when the direct mapping uses the interleaver.
  std::optional<unsigned> interleave_bundle_l;

  const BwpConfig& bwp_of(const VrbAllocation& alloc) const;
};

struct RescheduleRequired {
  std::string reason;

  friend bool operator==(const RescheduleRequired&, const RescheduleRequired&) = default;
};

using Selection = std::variant<MappingDirective, RescheduleRequired>;

class MappingPolicy {
public:
  virtual ~MappingPolicy() = default;

  virtual std::string_view name() const                                                    = 0;
  virtual Selection        select(const VrbAllocation& alloc, const MappingContext& ctx) const = 0;
};

/// direct -> (time-sensitive: BWP shift) -> minimal delay (time shift, then time/frequency shift) -> BWP shift.
class DefaultPolicy final : public MappingPolicy {
public:
  std::string_view name() const override { return "default"; }
  Selection        select(const VrbAllocation& alloc, const MappingContext& ctx) const override;
};

/// direct -> BWP shift -> minimal delay. Trades spectrum for latency first.
class BwpFirstPolicy final : public MappingPolicy {
public:
  std::string_view name() const override { return "bwp-first"; }
  Selection        select(const VrbAllocation& alloc, const MappingContext& ctx) const override;
};

/// Throws config_error for an unknown name.
std::unique_ptr<MappingPolicy> make_policy(std::string_view name);

Selection select_mapping(const VrbAllocation& alloc, const MappingContext& ctx);

/// Materializes a directive into physical cells.
PhysicalAssignment apply_directive(const VrbAllocation& alloc, const MappingDirective& d, const MappingContext& ctx);

// Verification.

struct ProtectionViolation {
  unsigned    ue_id = 0;
  CellCoord   cell;
  std::string label;
};

struct OverlapViolation {
  unsigned  ue_a = 0;
  unsigned  ue_b = 0;
  CellCoord cell;
};

struct ViolationReport {
  std::vector<ProtectionViolation> protection;
  std::vector<OverlapViolation>    overlap;

  bool        empty() const { return protection.empty() && overlap.empty(); }
  std::size_t count() const { return protection.size() + overlap.size(); }
};

ViolationReport verify_assignment(const std::vector<PhysicalAssignment>&  assignments,
                                  const std::vector<ProtectionWindow>&    protections);

bool is_protected(const CellCoord& c, const std::vector<ProtectionWindow>& protections);

} // namespace nrmap
