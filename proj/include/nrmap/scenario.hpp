#pragma once

#include "nrmap/dci.hpp"
#include "nrmap/grid.hpp"
#include "nrmap/sched.hpp"
#include "nrmap/tdra.hpp"
#include "nrmap/vpmap.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nrmap {

constexpr std::string_view scenario_schema = "nrmap-scenario/1";

struct CqiTrace {
  unsigned   ue   = 0;
  unsigned   slot = 0;
  IndexRange crbs;
  unsigned   cqi  = 0;
};

struct PolicyParams {
  std::string             name         = "default";
  unsigned                d_max        = 8;
  unsigned                buffer_slots = 8;
  /// Set to 2 or 4 to map the direct candidate through the VRB interleaver.
  std::optional<unsigned> bundle_l;
  AllocationType          alloc_type = AllocationType::type1;
  unsigned                rbg_size   = 4;
};

struct Scenario {
  std::string                   name;
  CarrierConfig                 carrier{0, Numerology{0}};
  std::vector<BwpConfig>        bwps;
  Direction                     direction = Direction::downlink;
  /// BWP in which the scheduler grants VRBs.
  unsigned                      home_bwp = 0;
  std::vector<UeProfile>        ues;
  std::vector<ProtectionWindow> protections;
  PolicyParams                  policy;
  RoundRobinOptions             schedule;
  unsigned                      tti_count = 0;
  unsigned                      horizon   = 0;
  TdraTable                     tdra;
  unsigned                      default_cqi = 7;
  double                        cqi_alpha   = 0.5;
  std::vector<CqiTrace>         cqi_traces;
  /// Draw a synthetic CQI for every (UE, slot, CRB) from `seed`.
  bool          random_cqi = false;
  std::uint64_t seed       = 0;

  /// Throws config_error when references do not resolve or limits are violated.
  void validate() const;
};

/// Parses and validates a scenario document. Throws config_error.
Scenario parse_scenario(std::string_view json_text);
/// Throws io_error when the file cannot be read, config_error when its content is invalid.
Scenario load_scenario(const std::filesystem::path& path);

/// The TDRA table used when a scenario does not list one: a full-slot type A row followed by the
/// K0 rows of TdraTable::default_table().
TdraTable scenario_default_tdra();

struct GrantOutcome {
  VrbAllocation                     grant;
  std::optional<MappingDirective>   directive;
  std::optional<PhysicalAssignment> assignment;
  std::string                       reschedule_reason;
  unsigned                          added_latency    = 0;
  unsigned                          displacement_rbs = 0;
  unsigned                          dci_bits         = 0;
  std::string                       dci_hex;

  bool rescheduled() const { return !assignment.has_value(); }
};

struct UeSummary {
  unsigned ue_id              = 0;
  unsigned grants             = 0;
  unsigned rescheduled        = 0;
  unsigned total_latency      = 0;
  unsigned max_latency        = 0;
  unsigned total_displacement = 0;
  unsigned max_buffered       = 0;
};

struct CellState {
  enum class Kind : std::uint8_t { idle, protection, ue, violation };

  Kind     kind  = Kind::idle;
  unsigned ue_id = 0;

  friend bool operator==(const CellState&, const CellState&) = default;
};

struct RunReport {
  std::string                   scenario;
  std::string                   policy;
  unsigned                      horizon = 0;
  unsigned                      n_crb   = 0;
  std::vector<ProtectionWindow> protections;
  std::vector<GrantOutcome>     outcomes;
  std::vector<SignalingEvent>   events;
  std::vector<UeSummary>        per_ue;
  unsigned                      signaling_bits = 0;
  ViolationReport               violations;
  /// snapshots[slot][crb]
  std::vector<std::vector<CellState>> snapshots;

  std::size_t reschedule_count() const;
  bool        ok() const { return violations.empty() && reschedule_count() == 0; }
  std::vector<PhysicalAssignment> assignments() const;
};

/// Schedules, maps every grant with the named policy (scenario policy when empty), applies and verifies.
RunReport run_scenario(const Scenario& scenario, std::string_view policy_override = {});

/// Per-cell occupancy derived from the report's assignments and protection windows.
std::vector<std::vector<CellState>> grid_snapshots(const RunReport& report);

enum class RenderFormat { text, csv, svg };

/// Throws usage_error for anything other than "text", "csv" or "svg".
RenderFormat parse_render_format(std::string_view name);
std::string_view extension(RenderFormat f);

std::string render_grid(const RunReport& report, RenderFormat format);

/// Machine-readable summary of a run.
std::string report_to_json(const RunReport& report);

} // namespace nrmap
