#pragma once

#include "nrmap/bits.hpp"
#include "nrmap/grid.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace nrmap {

/// Resource block groups of a BWP. Interior groups have the nominal size; the first and last may be shorter
/// because groups are aligned to the common RB grid.
struct RbgPartition {
  unsigned              nominal_p = 1;
  std::vector<unsigned> sizes;

  unsigned n_rbg() const { return static_cast<unsigned>(sizes.size()); }
  /// BWP-relative index of the first VRB of group `rbg`.
  unsigned first_vrb(unsigned rbg) const;

  friend bool operator==(const RbgPartition&, const RbgPartition&) = default;
};

/// Nominal RBG size P must be one of {1, 2, 4, 8, 16}.
RbgPartition rbg_partition(const BwpConfig& bwp, unsigned p);
RbgPartition rbg_partition(unsigned crb_start, unsigned size_rb, unsigned p);

// Type 0 (RBG bitmap, MSB = RBG 0).
BitString             encode_type0(const std::set<unsigned>& allocated_rbgs, const RbgPartition& partition);
std::set<unsigned>    decode_type0_rbgs(const BitString& bitmap, const RbgPartition& partition);
std::vector<unsigned> decode_type0(const BitString& bitmap, const RbgPartition& partition);

// Type 1 (RIV).
struct Type1Grant {
  unsigned rb_start = 0;
  unsigned l_rbs    = 0;
  unsigned riv      = 0;

  friend bool operator==(const Type1Grant&, const Type1Grant&) = default;
};

/// Number of valid (start, length) pairs for a BWP of `n_size` allocation units.
constexpr std::uint64_t riv_count(unsigned n_size)
{
  return static_cast<std::uint64_t>(n_size) * (n_size + 1) / 2;
}

unsigned   riv_encode(unsigned rb_start, unsigned l_rbs, unsigned n_size);
Type1Grant riv_decode(unsigned riv, unsigned n_size);

/// ceil(log2(n (n+1) / 2)), the width of a RIV field over `n_size` units.
unsigned type1_field_bits(unsigned n_size);

/// VRB span [first, first + count) covered by `rbg_count` contiguous RBGs starting at `rbg_start`
/// (Type 1 with RBG granularity, DCI 0_2/1_2).
struct VrbSpan {
  unsigned first = 0;
  unsigned count = 0;

  friend bool operator==(const VrbSpan&, const VrbSpan&) = default;
};
VrbSpan rbg_span_to_vrbs(unsigned rbg_start, unsigned rbg_count, const RbgPartition& partition);

// Type 2 (uplink interlaces).
struct InterlaceConfig {
  unsigned scs_khz      = 15;
  unsigned m_interlaces = 10;
  unsigned n_rbsets     = 1;

  unsigned y_bits() const { return type1_field_bits(n_rbsets); }
};

/// M = 10 for 15 kHz, M = 5 for 30 kHz; other SCS throw config_error.
InterlaceConfig make_interlace_config(unsigned scs_khz, unsigned n_rbsets);

/// CRBs {m, M+m, 2M+m, ...} that fall inside the BWP.
std::vector<unsigned> interlace_members(unsigned m, const InterlaceConfig& cfg, const BwpConfig& bwp);

unsigned type2_field_bits(unsigned scs_khz, unsigned n_rbsets);

struct Type2Assignment {
  /// Sorted interlace indices. Must be contiguous for 15 kHz.
  std::vector<unsigned> interlaces;
  unsigned              rbset_start = 0;
  unsigned              rbset_count = 1;

  friend bool operator==(const Type2Assignment&, const Type2Assignment&) = default;
};

BitString       encode_type2(const Type2Assignment& a, const InterlaceConfig& cfg);
Type2Assignment decode_type2(const BitString& field, const InterlaceConfig& cfg);

} // namespace nrmap
