#include "nrmap/scenario.hpp"

#include "nrmap/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace nrmap {

using nlohmann::json;

namespace {

Direction parse_direction(const std::string& s)
{
  if (s == "DL" || s == "dl" || s == "downlink") {
    return Direction::downlink;
  }
  if (s == "UL" || s == "ul" || s == "uplink") {
    return Direction::uplink;
  }
  throw config_error("direction must be DL or UL, got '" + s + "'");
}

IndexRange parse_range(const json& j, const char* what)
{
  if (!j.is_array() || j.size() != 2) {
    throw config_error(std::string(what) + " must be a [first, last] pair");
  }
  IndexRange r{j[0].get<unsigned>(), j[1].get<unsigned>()};
  if (r.first > r.last) {
    throw config_error(std::string(what) + " range is reversed");
  }
  return r;
}

std::uint16_t parse_rnti(const json& j)
{
  std::uint64_t v = 0;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    std::size_t used = 0;
    v = std::stoull(s, &used, 0);
    if (used != s.size()) {
      throw config_error("bad RNTI '" + s + "'");
    }
  } else {
    v = j.get<std::uint64_t>();
  }
  if (v == 0 || v > 0xFFFF) {
    throw config_error("RNTI must be 1..0xFFFF");
  }
  return static_cast<std::uint16_t>(v);
}

PdschMappingType parse_mapping_type(const std::string& s)
{
  if (s == "A" || s == "a") {
    return PdschMappingType::a;
  }
  if (s == "B" || s == "b") {
    return PdschMappingType::b;
  }
  throw config_error("mapping_type must be A or B");
}

Scenario from_json(const json& j)
{
  Scenario sc;
  if (j.value("schema", std::string{}) != scenario_schema) {
    throw config_error("scenario schema must be \"" + std::string(scenario_schema) + "\"");
  }
  sc.name = j.value("name", std::string{"scenario"});

  const auto& car = j.at("carrier");
  const auto  cp  = car.value("cp", std::string{"normal"}) == "extended" ? CyclicPrefix::extended : CyclicPrefix::normal;
  sc.carrier      = CarrierConfig{car.at("n_crb").get<unsigned>(), Numerology{car.value("mu", 0U), cp}};
  sc.direction    = parse_direction(j.value("direction", std::string{"DL"}));

  for (const auto& b : j.at("bwps")) {
    BwpConfig bwp;
    bwp.id         = b.at("id").get<unsigned>();
    bwp.crb_start  = b.at("crb_start").get<unsigned>();
    bwp.size_rb    = b.at("size_rb").get<unsigned>();
    bwp.direction  = sc.direction;
    bwp.numerology = sc.carrier.numerology;
    bwp.shared     = b.value("shared", false);
    sc.bwps.push_back(bwp);
  }
  sc.home_bwp = j.value("home_bwp", sc.bwps.empty() ? 0U : sc.bwps.front().id);

  for (const auto& u : j.at("ues")) {
    UeProfile ue;
    ue.ue_id                = u.at("id").get<unsigned>();
    ue.demand_rbs           = u.at("demand_rbs").get<unsigned>();
    ue.latency_budget_slots = u.value("latency_budget_slots", 0U);
    ue.time_sensitive       = u.value("time_sensitive", false);
    ue.rnti                 = u.contains("rnti") ? parse_rnti(u.at("rnti")) : static_cast<std::uint16_t>(0x4600 + ue.ue_id);
    sc.ues.push_back(ue);
  }

  for (const auto& p : j.value("protections", json::array())) {
    sc.protections.push_back(
        {parse_range(p.at("slots"), "protection slots"), parse_range(p.at("crbs"), "protection crbs"),
         p.value("label", std::string{"passive"})});
  }

  const auto sched          = j.value("schedule", json::object());
  sc.schedule.first_slot    = sched.value("first_slot", 1U);
  sc.schedule.ues_per_slot  = sched.value("ues_per_slot", 1U);
  sc.tti_count              = sched.value("tti_count", static_cast<unsigned>(sc.ues.size()));
  if (sched.contains("symbols")) {
    sc.schedule.symbols = {sched["symbols"].at("start").get<unsigned>(), sched["symbols"].at("length").get<unsigned>()};
  }
  sc.horizon = j.at("horizon").get<unsigned>();

  const auto pol         = j.value("policy", json::object());
  sc.policy.name         = pol.value("name", std::string{"default"});
  sc.policy.d_max        = pol.value("d_max", 8U);
  sc.policy.buffer_slots = pol.value("buffer_slots", 8U);
  if (pol.contains("bundle_l") && !pol["bundle_l"].is_null()) {
    sc.policy.bundle_l = pol["bundle_l"].get<unsigned>();
  }
  const auto at = pol.value("alloc_type", 1U);
  if (at > 1) {
    throw config_error("alloc_type must be 0 or 1");
  }
  sc.policy.alloc_type = at == 0 ? AllocationType::type0 : AllocationType::type1;
  sc.policy.rbg_size   = pol.value("rbg_size", 4U);

  if (j.contains("tdra")) {
    for (const auto& r : j["tdra"]) {
      sc.tdra.add_row({r.value("k_offset", 0U),
                       sliv_encode(r.at("start").get<unsigned>(), r.at("length").get<unsigned>()),
                       parse_mapping_type(r.value("mapping_type", std::string{"A"}))});
    }
  } else {
    sc.tdra = scenario_default_tdra();
  }

  const auto cqi = j.value("cqi", json::object());
  sc.default_cqi = cqi.value("default", 7U);
  sc.cqi_alpha   = cqi.value("alpha", 0.5);
  sc.random_cqi  = cqi.value("random", false);
  for (const auto& t : cqi.value("traces", json::array())) {
    sc.cqi_traces.push_back({t.at("ue").get<unsigned>(), t.at("slot").get<unsigned>(),
                             parse_range(t.at("crbs"), "cqi crbs"), t.at("cqi").get<unsigned>()});
  }
  sc.seed = j.value("seed", std::uint64_t{0});
  return sc;
}

const BwpConfig& find_bwp(const std::vector<BwpConfig>& bwps, unsigned id)
{
  auto it = std::find_if(bwps.begin(), bwps.end(), [&](const BwpConfig& b) { return b.id == id; });
  if (it == bwps.end()) {
    throw config_error("unknown BWP id " + std::to_string(id));
  }
  return *it;
}

} // namespace

TdraTable scenario_default_tdra()
{
  TdraTable t;
  t.add_row({0, sliv_encode(0, 14), PdschMappingType::a});
  const auto k0_rows = TdraTable::default_table();
  for (const auto& r : k0_rows.rows()) {
    t.add_row(r);
  }
  return t;
}

void Scenario::validate() const
{
  Carrier car(carrier);
  if (bwps.empty()) {
    throw config_error("scenario has no BWPs");
  }
  for (const auto& b : bwps) {
    if (b.direction != direction) {
      throw config_error("all BWPs must use the scenario link direction");
    }
    car.add_bwp(b);
  }
  const auto& home = find_bwp(bwps, home_bwp);
  if (ues.empty()) {
    throw config_error("scenario has no UEs");
  }
  std::set<unsigned> ids;
  for (const auto& u : ues) {
    if (!ids.insert(u.ue_id).second) {
      throw config_error("duplicate UE id " + std::to_string(u.ue_id));
    }
    if (u.demand_rbs == 0 || u.demand_rbs > home.size_rb) {
      throw config_error("UE " + std::to_string(u.ue_id) + " demand does not fit its BWP");
    }
  }
  if (tti_count == 0) {
    throw config_error("tti_count must be positive");
  }
  if (horizon <= schedule.first_slot + tti_count - 1) {
    throw config_error("horizon must extend past the last scheduled slot");
  }
  for (const auto& p : protections) {
    if (p.slots.last >= horizon) {
      throw config_error("protection '" + p.label + "' extends past the horizon");
    }
    if (p.crbs.last >= carrier.n_crb) {
      throw config_error("protection '" + p.label + "' extends past the carrier");
    }
  }
  make_policy(policy.name);
  if (policy.bundle_l) {
    if (*policy.bundle_l != 2 && *policy.bundle_l != 4) {
      throw config_error("bundle_l must be 2 or 4");
    }
    if (policy.alloc_type != AllocationType::type1 || direction != Direction::downlink) {
      throw config_error("interleaved mapping needs downlink allocation type 1");
    }
  }
  rbg_partition(home, policy.rbg_size);
  for (const auto& t : cqi_traces) {
    if (ids.count(t.ue) == 0) {
      throw config_error("CQI trace for unknown UE " + std::to_string(t.ue));
    }
    if (t.cqi > 15) {
      throw config_error("CQI must be 0..15");
    }
    if (t.crbs.last >= carrier.n_crb) {
      throw config_error("CQI trace outside the carrier");
    }
  }
  if (default_cqi > 15) {
    throw config_error("CQI must be 0..15");
  }
  const bool have_row = std::any_of(tdra.rows().begin(), tdra.rows().end(), [&](const TdraRow& r) {
    return r.k_offset == 0 && r.symbols() == schedule.symbols;
  });
  if (!have_row) {
    throw config_error("TDRA table has no K0=0 row for the scheduled symbols");
  }
}

Scenario parse_scenario(std::string_view json_text)
{
  Scenario sc;
  try {
    sc = from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw config_error(std::string("scenario: ") + e.what());
  } catch (const range_error& e) {
    throw config_error(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("scenario: ") + e.what());
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot read scenario file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::size_t RunReport::reschedule_count() const
{
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const GrantOutcome& o) { return o.rescheduled(); }));
}

std::vector<PhysicalAssignment> RunReport::assignments() const
{
  std::vector<PhysicalAssignment> out;
  for (const auto& o : outcomes) {
    if (o.assignment) {
      out.push_back(*o.assignment);
    }
  }
  return out;
}

namespace {

CqiMap build_cqi(const Scenario& sc)
{
  CqiMap cqi(sc.default_cqi, sc.cqi_alpha);
  if (sc.random_cqi) {
    std::mt19937_64                         rng(sc.seed);
    std::uniform_int_distribution<unsigned> dist(0, 15);
    for (const auto& ue : sc.ues) {
      for (unsigned slot = 0; slot < sc.horizon; ++slot) {
        for (unsigned crb = 0; crb < sc.carrier.n_crb; ++crb) {
          cqi.set(ue.ue_id, slot, crb, dist(rng));
        }
      }
    }
  }
  for (const auto& t : sc.cqi_traces) {
    cqi.set_range(t.ue, t.slot, t.crbs, t.cqi);
  }
  return cqi;
}

unsigned tdra_index_for(const TdraTable& t, const SymbolSpan& symbols)
{
  for (unsigned m = 0; m < t.size(); ++m) {
    if (t.row(m).k_offset == 0 && t.row(m).symbols() == symbols) {
      return m;
    }
  }
  throw config_error("no TDRA row for the scheduled symbols");
}

DciMessage grant_dci(const Scenario&           sc,
                     const VrbAllocation&      grant,
                     const PhysicalAssignment& pa,
                     std::uint16_t             rnti)
{
  const auto& bwp = find_bwp(sc.bwps, pa.bwp_id);
  DciConfig   cfg;
  cfg.bwp      = bwp;
  cfg.rbg_size = sc.policy.rbg_size;
  cfg.resource_allocation = sc.policy.alloc_type == AllocationType::type0 ? ResourceAllocationConfig::dynamic_switch
                                                                          : ResourceAllocationConfig::type1;

  VrbAllocation signalled = grant;
  signalled.bwp_id        = pa.bwp_id;
  if (pa.via.new_rb_start) {
    signalled.rb_start = *pa.via.new_rb_start;
  }
  const auto format = sc.direction == Direction::downlink ? DciFormat::f1_1 : DciFormat::f0_1;

  DciContent c;
  c.format        = format;
  c.tdra_index    = tdra_index_for(sc.tdra, grant.symbols);
  c.bwp_indicator = pa.bwp_id;
  c.vrb_to_prb_interleaved =
      sc.policy.bundle_l.has_value() &&
      (pa.via.kind == MappingKind::direct || pa.via.kind == MappingKind::time_shift);
  if (sc.policy.alloc_type == AllocationType::type0) {
    try {
      c.frequency = frequency_assignment_for(signalled, format, AllocationType::type0, cfg);
    } catch (const encode_error&) {
      // block not aligned to RBGs: dynamic switch falls back to type 1
      c.frequency = frequency_assignment_for(signalled, format, AllocationType::type1, cfg);
    }
  } else {
    c.frequency = frequency_assignment_for(signalled, format, AllocationType::type1, cfg);
  }
  return build_dci(c, cfg, rnti);
}

} // namespace

std::vector<std::vector<CellState>> grid_snapshots(const RunReport& r)
{
  std::vector<std::vector<CellState>> grid(r.horizon, std::vector<CellState>(r.n_crb));
  for (unsigned s = 0; s < r.horizon; ++s) {
    for (unsigned c = 0; c < r.n_crb; ++c) {
      if (is_protected({s, c}, r.protections)) {
        grid[s][c].kind = CellState::Kind::protection;
      }
    }
  }
  for (const auto& o : r.outcomes) {
    if (!o.assignment) {
      continue;
    }
    for (const auto& cell : o.assignment->cells) {
      if (cell.slot >= r.horizon || cell.crb >= r.n_crb) {
        continue;
      }
      auto& st = grid[cell.slot][cell.crb];
      if (st.kind == CellState::Kind::idle) {
        st = {CellState::Kind::ue, o.grant.ue_id};
      } else {
        st = {CellState::Kind::violation, o.grant.ue_id};
      }
    }
  }
  return grid;
}

RunReport run_scenario(const Scenario& sc, std::string_view policy_override)
{
  sc.validate();
  const auto policy = make_policy(policy_override.empty() ? std::string_view(sc.policy.name) : policy_override);
  const auto& home  = find_bwp(sc.bwps, sc.home_bwp);
  const auto  epoch = schedule_round_robin(sc.ues, home, sc.tti_count, sc.schedule);
  const auto  cqi   = build_cqi(sc);

  RunReport report;
  report.scenario    = sc.name;
  report.policy      = std::string(policy->name());
  report.horizon     = sc.horizon;
  report.n_crb       = sc.carrier.n_crb;
  report.protections = sc.protections;

  std::map<unsigned, UeSummary>                      summary;
  std::map<unsigned, std::uint16_t>                  rnti;
  std::map<unsigned, unsigned>                       active_bwp;
  std::map<unsigned, std::deque<PhysicalAssignment>> buffers;
  for (const auto& ue : sc.ues) {
    summary[ue.ue_id].ue_id = ue.ue_id;
    rnti[ue.ue_id]          = ue.rnti;
    active_bwp[ue.ue_id]    = sc.home_bwp;
  }

  CellSet occupancy;
  for (unsigned slot = 0; slot < sc.horizon; ++slot) {
    for (auto& [ue, queue] : buffers) {
      while (!queue.empty() && queue.front().slot() <= slot) {
        queue.pop_front();
      }
    }
    auto it = epoch.find(slot);
    if (it == epoch.end()) {
      continue;
    }
    for (const auto& grant : it->second) {
      const MappingContext ctx{sc.bwps,
                               sc.protections,
                               cqi,
                               occupancy,
                               {sc.horizon, sc.policy.buffer_slots},
                               sc.policy.d_max,
                               sc.policy.bundle_l};
      GrantOutcome out;
      out.grant = grant;
      auto& ue  = summary[grant.ue_id];
      ++ue.grants;

      const auto sel = policy->select(grant, ctx);
      if (const auto* rr = std::get_if<RescheduleRequired>(&sel)) {
        out.reschedule_reason = rr->reason;
        ++ue.rescheduled;
        report.outcomes.push_back(std::move(out));
        continue;
      }
      const auto& directive = std::get<MappingDirective>(sel);
      auto        pa        = apply_directive(grant, directive, ctx);

      const auto direct = ctx.interleave_bundle_l ? map_interleaved(grant, home, *ctx.interleave_bundle_l)
                                                  : map_direct(grant, home);
      out.directive        = directive;
      out.added_latency    = directive.delay_slots;
      const auto a         = pa.first_crb();
      const auto b         = direct.first_crb();
      out.displacement_rbs = a > b ? a - b : b - a;

      if (pa.bwp_id != active_bwp[grant.ue_id]) {
        if (directive.kind != MappingKind::bwp_shift) {
          pa.events.push_back({SignalingEvent::Kind::bwp_activation, grant.ue_id, pa.slot(), pa.bwp_id, 0});
        }
        active_bwp[grant.ue_id] = pa.bwp_id;
      }
      for (const auto& c : pa.cells) {
        occupancy.insert(c);
      }
      if (directive.delay_slots > 0) {
        auto& q = buffers[grant.ue_id];
        q.push_back(pa);
        ue.max_buffered = std::max(ue.max_buffered, static_cast<unsigned>(q.size()));
      }

      const auto dci = grant_dci(sc, grant, pa, rnti[grant.ue_id]);
      out.dci_bits   = static_cast<unsigned>(dci.bits().size());
      out.dci_hex    = dci.to_hex();
      report.signaling_bits += out.dci_bits;

      ue.total_latency += out.added_latency;
      ue.max_latency = std::max(ue.max_latency, out.added_latency);
      ue.total_displacement += out.displacement_rbs;

      report.events.insert(report.events.end(), pa.events.begin(), pa.events.end());
      out.assignment = std::move(pa);
      report.outcomes.push_back(std::move(out));
    }
  }

  for (const auto& [id, s] : summary) {
    report.per_ue.push_back(s);
  }
  report.violations = verify_assignment(report.assignments(), sc.protections);
  report.snapshots  = grid_snapshots(report);
  return report;
}

std::string report_to_json(const RunReport& r)
{
  json j;
  j["scenario"]       = r.scenario;
  j["policy"]         = r.policy;
  j["horizon"]        = r.horizon;
  j["n_crb"]          = r.n_crb;
  j["signaling_bits"] = r.signaling_bits;
  j["violations"]     = r.violations.count();
  j["reschedules"]    = r.reschedule_count();
  j["grants"]         = json::array();
  for (const auto& o : r.outcomes) {
    json g;
    g["ue"]       = o.grant.ue_id;
    g["slot"]     = o.grant.slot;
    g["rb_start"] = o.grant.rb_start;
    g["l_rbs"]    = o.grant.l_rbs;
    if (o.assignment) {
      const auto& d         = *o.directive;
      g["mapping"]          = std::string(to_string(d.kind));
      g["delay_slots"]      = d.delay_slots;
      g["physical_slot"]    = o.assignment->slot();
      g["physical_bwp"]     = o.assignment->bwp_id;
      g["first_crb"]        = o.assignment->first_crb();
      g["added_latency"]    = o.added_latency;
      g["displacement_rbs"] = o.displacement_rbs;
      g["dci_bits"]         = o.dci_bits;
      g["dci"]              = o.dci_hex;
    } else {
      g["mapping"]    = "reschedule_required";
      g["reason"]     = o.reschedule_reason;
    }
    j["grants"].push_back(g);
  }
  j["ues"] = json::array();
  for (const auto& u : r.per_ue) {
    j["ues"].push_back({{"ue", u.ue_id},
                        {"grants", u.grants},
                        {"rescheduled", u.rescheduled},
                        {"total_latency", u.total_latency},
                        {"max_latency", u.max_latency},
                        {"total_displacement", u.total_displacement},
                        {"max_buffered", u.max_buffered}});
  }
  j["events"] = json::array();
  for (const auto& e : r.events) {
    j["events"].push_back({{"kind", e.kind == SignalingEvent::Kind::bwp_activation ? "bwp_activation" : "shift"},
                           {"ue", e.ue_id},
                           {"slot", e.slot},
                           {"bwp", e.bwp_id},
                           {"delay", e.delay_slots}});
  }
  return j.dump(2) + "\n";
}

} // namespace nrmap
