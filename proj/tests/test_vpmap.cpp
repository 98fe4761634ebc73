#include "oracles.hpp"

#include "nrmap/errors.hpp"
#include "nrmap/vpmap.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace nrmap;

namespace {

const BwpConfig bwp0{0, 0, 50};
const BwpConfig bwp1{1, 50, 50};

VrbAllocation grant(unsigned ue, unsigned slot, unsigned start, unsigned len, unsigned budget = 3)
{
  VrbAllocation a;
  a.ue_id                = ue;
  a.slot                 = slot;
  a.bwp_id               = 0;
  a.rb_start             = start;
  a.l_rbs                = len;
  a.latency_budget_slots = budget;
  return a;
}

CellSet cell_set(const PhysicalAssignment& pa)
{
  return {pa.cells.begin(), pa.cells.end()};
}

CellSet block(unsigned slot, unsigned first_crb, unsigned count)
{
  CellSet s;
  for (unsigned k = 0; k < count; ++k) {
    s.insert({slot, first_crb + k});
  }
  return s;
}

ProtectionWindow window(unsigned s0, unsigned s1, unsigned c0, unsigned c1)
{
  return {{s0, s1}, {c0, c1}, "radar"};
}

} // namespace

TEST(Direct, IsIdentityOnCrbGrid)
{
  auto a   = grant(1, 2, 5, 10);
  a.bwp_id = 1;
  const auto pa = map_direct(a, bwp1);
  EXPECT_EQ(cell_set(pa), block(2, 55, 10));
  EXPECT_EQ(pa.first_crb(), 55U);
  EXPECT_THROW(map_direct(grant(1, 2, 45, 10), bwp0), range_error);
  EXPECT_THROW(map_direct(grant(1, 2, 0, 10), bwp1), config_error);
}

TEST(Interleaver, FrozenBundles)
{
  EXPECT_EQ(interleaver_bundle_count(bwp0, 2), 25U);
  EXPECT_EQ(interleave_bundle(0, 25), 0U);
  EXPECT_EQ(interleave_bundle(1, 25), 12U);
  EXPECT_EQ(interleave_bundle(2, 25), 1U);
  EXPECT_EQ(interleave_bundle(23, 25), 23U);
  EXPECT_EQ(interleave_bundle(24, 25), 24U);
  EXPECT_EQ(vrb_to_prb_interleaved(2, bwp0, 2), 24U);
  EXPECT_EQ(vrb_to_prb_interleaved(3, bwp0, 2), 25U);
}

TEST(Interleaver, MatchesMatrixOracle)
{
  for (unsigned n = 1; n <= 140; ++n) {
    const auto f = oracle::interleaver_table(n);
    for (unsigned j = 0; j < n; ++j) {
      ASSERT_EQ(interleave_bundle(j, n), f[j]) << "n=" << n << " j=" << j;
    }
  }
}

TEST(Interleaver, UnevenBundlesKeepSizes)
{
  const BwpConfig b{0, 3, 30};
  const auto      sizes = oracle::bundle_sizes(3, 30, 4);
  std::vector<unsigned> first(sizes.size() + 1, 0);
  std::partial_sum(sizes.begin(), sizes.end(), first.begin() + 1);
  const auto f = oracle::interleaver_table(static_cast<unsigned>(sizes.size()));
  for (unsigned j = 0; j < sizes.size(); ++j) {
    for (unsigned k = 0; k < sizes[j]; ++k) {
      ASSERT_EQ(vrb_to_prb_interleaved(first[j] + k, b, 4), first[f[j]] + k);
    }
  }
}

TEST(Interleaver, RequiresTypeOne)
{
  auto a       = grant(1, 1, 0, 4);
  a.alloc_type = AllocationType::type0;
  EXPECT_THROW(map_interleaved(a, bwp0, 2), constraint_error);
  EXPECT_THROW(map_interleaved(grant(1, 1, 0, 4), bwp0, 3), config_error);
}

TEST(TimeShift, TranslatesBySlots)
{
  const ShiftLimits lim{20, 8};
  const auto        a  = grant(1, 2, 7, 9);
  const auto        pa = map_time_shift(a, bwp0, 3, lim);
  CellSet           expect;
  for (const auto& c : map_direct(a, bwp0).cells) {
    expect.insert({c.slot + 3, c.crb});
  }
  EXPECT_EQ(cell_set(pa), expect);
  ASSERT_EQ(pa.events.size(), 1U);
  EXPECT_EQ(pa.events[0].delay_slots, 3U);
  EXPECT_THROW(map_time_shift(a, bwp0, 0, lim), constraint_error);
  EXPECT_THROW(map_time_shift(a, bwp0, 9, lim), buffer_error);
  EXPECT_THROW(map_time_shift(a, bwp0, 5, {7, 8}), buffer_error);
}

TEST(TimeFreqShift, PicksHighestCqiBlock)
{
  CqiMap cqi(7);
  cqi.set_range(1, 4, {30, 49}, 12);
  const ShiftLimits lim{10, 8};
  const auto        pa = map_time_freq_shift(grant(1, 1, 0, 20), bwp0, 3, cqi, {}, {window(4, 6, 0, 19)}, lim);
  EXPECT_EQ(cell_set(pa), block(4, 30, 20));
  EXPECT_EQ(pa.via.new_rb_start, 30U);
}

TEST(TimeFreqShift, TiesGoToLowestStart)
{
  CqiMap cqi(7);
  const auto pa = map_time_freq_shift(grant(1, 1, 0, 10), bwp0, 1, cqi, block(2, 0, 5), {}, {10, 8});
  EXPECT_EQ(pa.first_crb(), 5U);
}

TEST(TimeFreqShift, BlockMatchesBruteForce)
{
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    CqiMap  cqi(rng() % 16);
    CellSet busy;
    for (unsigned c = 0; c < 50; ++c) {
      if (rng() % 5 == 0) {
        busy.insert({2, c});
      }
      if (rng() % 3 == 0) {
        cqi.set(1, 2, c, rng() % 16);
      }
    }
    const unsigned len = 1 + rng() % 12;
    const auto     a   = grant(1, 1, 0, len);
    // brute force over every start with integer sums
    std::optional<unsigned> want;
    long                    best = -1;
    for (unsigned s = 0; s + len <= 50; ++s) {
      long sum = 0;
      bool ok  = true;
      for (unsigned k = 0; k < len; ++k) {
        ok = ok && busy.count({2, s + k}) == 0;
        sum += cqi.observed(1, 2, s + k).value_or(cqi.default_cqi());
      }
      if (ok && sum > best) {
        best = sum;
        want = s;
      }
    }
    ASSERT_EQ(find_reallocation_block(a, bwp0, 2, cqi, busy, {}), want);
  }
}

TEST(TimeFreqShift, FailsWithoutFreeBlock)
{
  CqiMap cqi(7);
  EXPECT_THROW(map_time_freq_shift(grant(1, 1, 0, 20), bwp0, 1, cqi, {}, {window(2, 2, 10, 40)}, {10, 8}),
               reallocation_failure);
}

TEST(Cqi, EstimateFallsBackToEma)
{
  CqiMap cqi(5, 0.5);
  cqi.set(1, 1, 3, 8);
  cqi.set(1, 2, 3, 12);
  EXPECT_DOUBLE_EQ(cqi.estimate(1, 2, 3), 12.0);
  EXPECT_DOUBLE_EQ(cqi.estimate(1, 5, 3), 10.0);
  EXPECT_DOUBLE_EQ(cqi.estimate(1, 1, 4), 5.0);
  EXPECT_DOUBLE_EQ(cqi.estimate(2, 5, 3), 5.0);
  EXPECT_THROW(cqi.set(1, 1, 1, 16), range_error);
}

TEST(BwpShift, ReanchorsWithoutDelay)
{
  const auto a  = grant(2, 3, 4, 20);
  const auto pa = map_bwp_shift(a, bwp1, {}, {window(3, 3, 0, 49)});
  EXPECT_EQ(cell_set(pa), block(3, 54, 20));
  EXPECT_EQ(pa.bwp_id, 1U);
  EXPECT_EQ(pa.via.delay_slots, 0U);
  ASSERT_EQ(pa.events.size(), 1U);
  EXPECT_EQ(pa.events[0].kind, SignalingEvent::Kind::bwp_activation);
  EXPECT_THROW(map_bwp_shift(a, bwp0, {}, {}), constraint_error);
  EXPECT_THROW(map_bwp_shift(a, BwpConfig{1, 50, 10}, {}, {}), capacity_error);
  EXPECT_THROW(map_bwp_shift(a, bwp1, {}, {window(3, 3, 60, 60)}), conflict_error);
  EXPECT_THROW(map_bwp_shift(a, BwpConfig{1, 50, 50, Direction::uplink}, {}, {}), constraint_error);
}

TEST(Directive, Validation)
{
  EXPECT_NO_THROW(MappingDirective{}.validate());
  EXPECT_THROW((MappingDirective{MappingKind::direct, 2}).validate(), constraint_error);
  EXPECT_THROW((MappingDirective{MappingKind::time_shift, 0}).validate(), constraint_error);
  EXPECT_THROW((MappingDirective{MappingKind::bwp_shift, 0}).validate(), constraint_error);
  EXPECT_THROW((MappingDirective{MappingKind::time_freq_shift, 1}).validate(), constraint_error);
}

class PolicyTest : public ::testing::Test {
protected:
  std::vector<BwpConfig>        bwps{bwp0, bwp1};
  std::vector<ProtectionWindow> prot;
  CqiMap                        cqi{7};
  CellSet                       occ;

  MappingContext ctx() const { return {bwps, prot, cqi, occ, {12, 8}, 8, std::nullopt}; }
};

TEST_F(PolicyTest, DirectWhenFree)
{
  const auto sel = select_mapping(grant(1, 1, 0, 50), ctx());
  ASSERT_TRUE(std::holds_alternative<MappingDirective>(sel));
  EXPECT_EQ(std::get<MappingDirective>(sel).kind, MappingKind::direct);
}

TEST_F(PolicyTest, SmallestDelayFirst)
{
  prot = {window(1, 3, 0, 49)};
  const auto sel = select_mapping(grant(1, 1, 0, 50), ctx());
  ASSERT_TRUE(std::holds_alternative<MappingDirective>(sel));
  EXPECT_EQ(std::get<MappingDirective>(sel), (MappingDirective{MappingKind::time_shift, 3}));
}

TEST_F(PolicyTest, BudgetExhaustedFallsBackToBwpShift)
{
  prot = {window(1, 3, 0, 49)};
  const auto sel = select_mapping(grant(1, 1, 0, 50, 2), ctx());
  EXPECT_EQ(std::get<MappingDirective>(sel), (MappingDirective{MappingKind::bwp_shift, 0, 1U}));
}

TEST_F(PolicyTest, TimeSensitiveSkipsDelay)
{
  prot   = {window(1, 1, 0, 49)};
  auto a = grant(1, 1, 0, 50, 5);
  a.time_sensitive = true;
  EXPECT_EQ(std::get<MappingDirective>(select_mapping(a, ctx())).kind, MappingKind::bwp_shift);
  prot.push_back(window(1, 1, 50, 99));
  EXPECT_TRUE(std::holds_alternative<RescheduleRequired>(select_mapping(a, ctx())));
}

TEST_F(PolicyTest, BwpFirstPrefersSpectrum)
{
  prot = {window(1, 3, 0, 49)};
  const auto p   = make_policy("bwp-first");
  const auto sel = p->select(grant(1, 1, 0, 50), ctx());
  EXPECT_EQ(std::get<MappingDirective>(sel).kind, MappingKind::bwp_shift);
  EXPECT_THROW(make_policy("nope"), config_error);
}

TEST_F(PolicyTest, HorizonBoundsDelay)
{
  prot     = {window(9, 11, 0, 99)};
  auto sel = select_mapping(grant(1, 9, 0, 50, 8), ctx());
  EXPECT_TRUE(std::holds_alternative<RescheduleRequired>(sel));
}

TEST_F(PolicyTest, AppliedDirectivesNeverViolate)
{
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    prot.clear();
    occ.clear();
    const unsigned n_win = rng() % 4;
    for (unsigned w = 0; w < n_win; ++w) {
      const unsigned s0 = rng() % 10;
      const unsigned c0 = rng() % 100;
      prot.push_back(window(s0, s0 + rng() % 3, c0, std::min(99U, c0 + static_cast<unsigned>(rng() % 60))));
    }
    std::vector<PhysicalAssignment> done;
    for (unsigned slot = 0; slot < 6; ++slot) {
      const unsigned len = 1 + rng() % 50;
      auto           a   = grant(slot + 1, slot, rng() % (51 - len), len, rng() % 5);
      const auto     sel = select_mapping(a, ctx());
      if (std::holds_alternative<RescheduleRequired>(sel)) {
        continue;
      }
      auto pa = apply_directive(a, std::get<MappingDirective>(sel), ctx());
      occ.insert(pa.cells.begin(), pa.cells.end());
      done.push_back(std::move(pa));
    }
    ASSERT_TRUE(verify_assignment(done, prot).empty());
  }
}

TEST(Verifier, ReportsEachBadCellOnce)
{
  PhysicalAssignment a;
  a.ue_id = 1;
  a.cells = {{1, 5}, {1, 6}};
  PhysicalAssignment b;
  b.ue_id = 2;
  b.cells = {{1, 6}};
  const auto r = verify_assignment({a, b}, {window(1, 1, 5, 5), window(1, 1, 0, 10)});
  EXPECT_EQ(r.protection.size(), 3U);
  EXPECT_EQ(r.overlap.size(), 1U);
  EXPECT_EQ(r.overlap[0].ue_a, 1U);
  EXPECT_EQ(r.overlap[0].ue_b, 2U);
}
