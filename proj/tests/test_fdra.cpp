#include "oracles.hpp"

#include "nrmap/errors.hpp"
#include "nrmap/fdra.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nrmap;

TEST(RbgPartition, ThirtyOneRbsAtCrbTen)
{
  const auto part = rbg_partition(10, 31, 4);
  EXPECT_EQ(part.n_rbg(), 9U);
  EXPECT_EQ(part.sizes, (std::vector<unsigned>{2, 4, 4, 4, 4, 4, 4, 4, 1}));
  EXPECT_EQ(part.first_vrb(0), 0U);
  EXPECT_EQ(part.first_vrb(1), 2U);
  EXPECT_EQ(part.first_vrb(8), 30U);
}

TEST(RbgPartition, MatchesPerCrbOracle)
{
  for (unsigned p : {1U, 2U, 4U, 8U, 16U}) {
    for (unsigned start = 0; start < 20; ++start) {
      for (unsigned size = 1; start + size <= 275; size += 7) {
        ASSERT_EQ(rbg_partition(start, size, p).sizes, oracle::rbg_sizes(start, size, p))
            << "P=" << p << " start=" << start << " size=" << size;
      }
    }
  }
}

TEST(RbgPartition, RejectsUnsupportedP)
{
  EXPECT_THROW(rbg_partition(0, 50, 3), config_error);
  EXPECT_THROW(rbg_partition(0, 0, 4), config_error);
}

TEST(Type0, NineBitBitmap)
{
  const auto part = rbg_partition(10, 31, 4);
  const auto bm   = BitString::from_string("101101010");
  EXPECT_EQ(decode_type0_rbgs(bm, part), (std::set<unsigned>{0, 2, 3, 5, 7}));
  const auto vrbs = decode_type0(bm, part);
  EXPECT_EQ(vrbs.size(), 18U);
  EXPECT_EQ(vrbs, oracle::type0_vrbs("101101010", part.sizes));
  EXPECT_EQ(encode_type0({0, 2, 3, 5, 7}, part), bm);
}

TEST(Type0, RandomSubsetsRoundTrip)
{
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const unsigned start = rng() % 40;
    const unsigned size  = 1 + rng() % (275 - start);
    const unsigned p     = 1U << (rng() % 5);
    const auto     part  = rbg_partition(start, size, p);
    std::set<unsigned> rbgs;
    std::string        bitmap;
    for (unsigned g = 0; g < part.n_rbg(); ++g) {
      const bool on = (rng() & 1) != 0;
      bitmap.push_back(on ? '1' : '0');
      if (on) {
        rbgs.insert(g);
      }
    }
    const auto bm = encode_type0(rbgs, part);
    ASSERT_EQ(bm.to_string(), bitmap);
    ASSERT_EQ(decode_type0_rbgs(bm, part), rbgs);
    ASSERT_EQ(decode_type0(bm, part), oracle::type0_vrbs(bitmap, part.sizes));
  }
}

TEST(Type0, RejectsWrongWidthAndIndex)
{
  const auto part = rbg_partition(0, 50, 4);
  EXPECT_THROW(decode_type0(BitString(12), part), format_error);
  EXPECT_THROW(encode_type0({13}, part), range_error);
}

TEST(Riv, FrozenValues)
{
  EXPECT_EQ(riv_encode(4, 15, 31), 438U);
  EXPECT_EQ(riv_encode(2, 5, 9), 38U);
  EXPECT_EQ(riv_encode(1, 8, 10), 38U);
  EXPECT_EQ(riv_encode(4, 15, 50), 704U);
  EXPECT_EQ(riv_decode(438, 31), (Type1Grant{4, 15, 438}));
}

TEST(Riv, BijectionAgainstEnumeration)
{
  for (unsigned n = 1; n <= 100; ++n) {
    const auto table = oracle::riv_table(n);
    ASSERT_EQ(table.size(), riv_count(n));
    ASSERT_EQ(table.rbegin()->first, riv_count(n) - 1) << "image is not [0, N(N+1)/2) for N=" << n;
    for (const auto& [riv, sl] : table) {
      ASSERT_EQ(riv_encode(sl.first, sl.second, n), riv);
      const auto g = riv_decode(riv, n);
      ASSERT_EQ(g.rb_start, sl.first);
      ASSERT_EQ(g.l_rbs, sl.second);
    }
  }
}

TEST(Riv, RejectsOutOfDomain)
{
  EXPECT_THROW(riv_encode(0, 0, 10), range_error);
  EXPECT_THROW(riv_encode(5, 6, 10), range_error);
  EXPECT_THROW(riv_decode(55, 10), decode_error);
  EXPECT_THROW(riv_decode(0, 0), decode_error);
}

TEST(Riv, FieldBits)
{
  EXPECT_EQ(type1_field_bits(31), 9U);
  EXPECT_EQ(type1_field_bits(50), 11U);
  EXPECT_EQ(type1_field_bits(1), 0U);
  for (unsigned n = 1; n <= 275; ++n) {
    ASSERT_EQ(type1_field_bits(n), oracle::ceil_log2(riv_count(n))) << n;
  }
}

TEST(Riv, RbgSpanToVrbs)
{
  const auto part = rbg_partition(10, 31, 4);
  EXPECT_EQ(rbg_span_to_vrbs(0, 1, part), (VrbSpan{0, 2}));
  EXPECT_EQ(rbg_span_to_vrbs(1, 3, part), (VrbSpan{2, 12}));
  EXPECT_EQ(rbg_span_to_vrbs(7, 2, part), (VrbSpan{26, 5}));
  EXPECT_THROW(rbg_span_to_vrbs(8, 2, part), range_error);
}

TEST(Type2, FieldWidths)
{
  EXPECT_EQ(type2_field_bits(30, 2), 7U);
  EXPECT_EQ(type2_field_bits(15, 4), 10U);
  EXPECT_EQ(type2_field_bits(15, 1), 6U);
  EXPECT_EQ(type2_field_bits(30, 1), 5U);
  EXPECT_THROW(make_interlace_config(60, 1), config_error);
}

TEST(Type2, InterlaceMembers)
{
  const BwpConfig bwp{0, 3, 20, Direction::uplink};
  const auto      cfg = make_interlace_config(30, 1);
  EXPECT_EQ(interlace_members(0, cfg, bwp), (std::vector<unsigned>{5, 10, 15, 20}));
  EXPECT_EQ(interlace_members(3, cfg, bwp), (std::vector<unsigned>{3, 8, 13, 18}));
}

TEST(Type2, RoundTripAllAssignments)
{
  for (unsigned scs : {15U, 30U}) {
    for (unsigned n_sets = 1; n_sets <= 5; ++n_sets) {
      const auto cfg = make_interlace_config(scs, n_sets);
      for (unsigned first = 0; first < n_sets; ++first) {
        for (unsigned count = 1; first + count <= n_sets; ++count) {
          if (scs == 15) {
            for (unsigned m0 = 0; m0 < 10; ++m0) {
              for (unsigned l = 1; m0 + l <= 10; ++l) {
                Type2Assignment a;
                for (unsigned m = m0; m < m0 + l; ++m) {
                  a.interlaces.push_back(m);
                }
                a.rbset_start = first;
                a.rbset_count = count;
                const auto f  = encode_type2(a, cfg);
                ASSERT_EQ(f.size(), type2_field_bits(scs, n_sets));
                ASSERT_EQ(decode_type2(f, cfg), a);
              }
            }
          } else {
            for (unsigned mask = 1; mask < 32; ++mask) {
              Type2Assignment a;
              for (unsigned m = 0; m < 5; ++m) {
                if ((mask >> (4 - m)) & 1U) {
                  a.interlaces.push_back(m);
                }
              }
              a.rbset_start = first;
              a.rbset_count = count;
              const auto f  = encode_type2(a, cfg);
              ASSERT_EQ(f.read(0, 5), mask);
              ASSERT_EQ(decode_type2(f, cfg), a);
            }
          }
        }
      }
    }
  }
}
