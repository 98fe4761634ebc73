#include "nrmap/errors.hpp"
#include "nrmap/scenario.hpp"
#include "nrmap/sched.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

using namespace nrmap;
using nlohmann::json;

namespace {

json three_ue_doc()
{
  json ues = json::array();
  for (unsigned i = 1; i <= 3; ++i) {
    ues.push_back({{"id", i}, {"demand_rbs", 50}, {"latency_budget_slots", 3}});
  }
  return {{"schema", "nrmap-scenario/1"},
          {"name", "t"},
          {"carrier", {{"n_crb", 100}, {"mu", 1}}},
          {"bwps", {{{"id", 0}, {"crb_start", 0}, {"size_rb", 50}}, {{"id", 1}, {"crb_start", 50}, {"size_rb", 50}}}},
          {"ues", ues},
          {"protections", {{{"slots", {1, 3}}, {"crbs", {0, 49}}}}},
          {"horizon", 10}};
}

} // namespace

TEST(RoundRobin, CyclesAndPacks)
{
  const BwpConfig bwp{0, 0, 50};
  const std::vector<UeProfile> ues{{1, 20, 3, false, 1}, {2, 20, 3, false, 2}, {3, 20, 3, false, 3}};
  const auto ep = schedule_round_robin(ues, bwp, 4, {1, 2, {0, 14}});
  ASSERT_EQ(ep.size(), 4U);
  const auto& s1 = ep.at(1);
  ASSERT_EQ(s1.size(), 2U);
  EXPECT_EQ(s1[0].ue_id, 1U);
  EXPECT_EQ(s1[0].rb_start, 0U);
  EXPECT_EQ(s1[1].ue_id, 2U);
  EXPECT_EQ(s1[1].rb_start, 20U);
  EXPECT_EQ(ep.at(2)[0].ue_id, 3U);
  EXPECT_EQ(ep.at(2)[1].ue_id, 1U);
  EXPECT_EQ(ep.at(4).back().slot, 4U);
  EXPECT_THROW(schedule_round_robin(ues, bwp, 1, {1, 3, {0, 14}}), grant_error);
  EXPECT_THROW(schedule_round_robin({{1, 60, 0, false, 1}}, bwp, 1), grant_error);
}

TEST(Scenario, ParsesAndRuns)
{
  const auto sc = parse_scenario(three_ue_doc().dump());
  EXPECT_EQ(sc.bwps.size(), 2U);
  EXPECT_EQ(sc.tti_count, 3U);
  const auto r = run_scenario(sc);
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.outcomes.size(), 3U);
  for (unsigned i = 0; i < 3; ++i) {
    const auto& o = r.outcomes[i];
    EXPECT_EQ(o.directive->kind, MappingKind::time_shift);
    EXPECT_EQ(o.assignment->slot(), 4U + i);
    EXPECT_EQ(o.added_latency, 3U);
    EXPECT_EQ(o.dci_bits, 65U);
  }
}

TEST(Scenario, PolicyOverride)
{
  const auto r = run_scenario(parse_scenario(three_ue_doc().dump()), "bwp-first");
  EXPECT_EQ(r.policy, "bwp-first");
  for (const auto& o : r.outcomes) {
    EXPECT_EQ(o.directive->kind, MappingKind::bwp_shift);
    EXPECT_EQ(o.added_latency, 0U);
  }
  EXPECT_FALSE(r.events.empty());
}

TEST(Scenario, InfeasibleReportsReschedule)
{
  auto doc           = three_ue_doc();
  doc["protections"] = {{{"slots", {0, 9}}, {"crbs", {0, 99}}}};
  const auto r       = run_scenario(parse_scenario(doc.dump()));
  EXPECT_EQ(r.reschedule_count(), 3U);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_FALSE(r.ok());
}

TEST(Scenario, RejectsBadDocuments)
{
  auto doc      = three_ue_doc();
  doc["schema"] = "other/1";
  EXPECT_THROW(parse_scenario(doc.dump()), config_error);
  doc = three_ue_doc();
  doc["bwps"][1]["size_rb"] = 60;
  EXPECT_THROW(parse_scenario(doc.dump()), config_error);
  EXPECT_THROW(parse_scenario("{not json"), config_error);
  EXPECT_THROW(load_scenario("/nonexistent/x.json"), io_error);
}

TEST(Render, FormatsAreDeterministic)
{
  const auto sc = parse_scenario(three_ue_doc().dump());
  const auto a  = run_scenario(sc);
  const auto b  = run_scenario(sc);
  for (auto f : {RenderFormat::text, RenderFormat::csv, RenderFormat::svg}) {
    EXPECT_EQ(render_grid(a, f), render_grid(b, f));
  }
  const auto csv = render_grid(a, RenderFormat::csv);
  EXPECT_EQ(csv.rfind("slot,crb,state,ue,label\n", 0), 0U);
  EXPECT_NE(csv.find("4,0,ue,1,\n"), std::string::npos);
  EXPECT_NE(csv.find("1,0,protected,,passive\n"), std::string::npos);
  EXPECT_THROW(parse_render_format("png"), usage_error);
  const auto rep = json::parse(report_to_json(a));
  EXPECT_EQ(rep["grants"].size(), 3U);
}

TEST(Scenario, RandomCqiFollowsSeed)
{
  auto doc     = three_ue_doc();
  doc["ues"]   = {{{"id", 1}, {"demand_rbs", 20}, {"latency_budget_slots", 3}},
                  {{"id", 2}, {"demand_rbs", 20}, {"latency_budget_slots", 3}}};
  doc["schedule"] = {{"tti_count", 2}};
  doc["protections"].push_back({{"slots", {4, 5}}, {"crbs", {0, 19}}});
  doc["cqi"]   = {{"random", true}};
  doc["seed"]  = 42;
  const auto a = run_scenario(parse_scenario(doc.dump()));
  const auto b = run_scenario(parse_scenario(doc.dump()));
  EXPECT_EQ(render_grid(a, RenderFormat::csv), render_grid(b, RenderFormat::csv));
  EXPECT_TRUE(a.violations.empty());
}
