#include "nrmap/fdra.hpp"

#include "nrmap/errors.hpp"

#include <bit>
#include <numeric>
#include <string>

namespace nrmap {

namespace {

bool valid_rbg_size(unsigned p)
{
  return p == 1 || p == 2 || p == 4 || p == 8 || p == 16;
}

unsigned ceil_log2(std::uint64_t x)
{
  return x <= 1 ? 0U : static_cast<unsigned>(std::bit_width(x - 1));
}

} // namespace

unsigned RbgPartition::first_vrb(unsigned rbg) const
{
  if (rbg > sizes.size()) {
    throw range_error("RBG index out of range");
  }
  return std::accumulate(sizes.begin(), sizes.begin() + rbg, 0U);
}

RbgPartition rbg_partition(unsigned crb_start, unsigned size_rb, unsigned p)
{
  if (!valid_rbg_size(p)) {
    throw config_error("RBG size must be 1, 2, 4, 8 or 16, got " + std::to_string(p));
  }
  if (size_rb == 0) {
    throw config_error("empty BWP");
  }
  RbgPartition part;
  part.nominal_p = p;

  const unsigned lead   = crb_start % p;
  const unsigned n_rbg  = (size_rb + lead + p - 1) / p;
  const unsigned tail   = (crb_start + size_rb) % p;
  const unsigned first  = p - lead;
  const unsigned last   = tail == 0 ? p : tail;
  part.sizes.assign(n_rbg, p);
  if (n_rbg == 1) {
    part.sizes[0] = size_rb;
  } else {
    part.sizes.front() = first;
    part.sizes.back()  = last;
  }
  return part;
}

RbgPartition rbg_partition(const BwpConfig& bwp, unsigned p)
{
  return rbg_partition(bwp.crb_start, bwp.size_rb, p);
}

BitString encode_type0(const std::set<unsigned>& allocated_rbgs, const RbgPartition& partition)
{
  BitString bitmap(partition.n_rbg());
  for (unsigned rbg : allocated_rbgs) {
    if (rbg >= partition.n_rbg()) {
      throw range_error("RBG " + std::to_string(rbg) + " outside partition of " +
                        std::to_string(partition.n_rbg()));
    }
    bitmap.set(rbg, true);
  }
  return bitmap;
}

std::set<unsigned> decode_type0_rbgs(const BitString& bitmap, const RbgPartition& partition)
{
  if (bitmap.size() != partition.n_rbg()) {
    throw format_error("type 0 bitmap has " + std::to_string(bitmap.size()) + " bits, expected " +
                       std::to_string(partition.n_rbg()));
  }
  std::set<unsigned> rbgs;
  for (unsigned i = 0; i < bitmap.size(); ++i) {
    if (bitmap[i]) {
      rbgs.insert(i);
    }
  }
  return rbgs;
}

std::vector<unsigned> decode_type0(const BitString& bitmap, const RbgPartition& partition)
{
  std::vector<unsigned> vrbs;
  unsigned              first = 0;
  const auto            rbgs  = decode_type0_rbgs(bitmap, partition);
  for (unsigned i = 0; i < partition.n_rbg(); ++i) {
    if (rbgs.count(i) != 0) {
      for (unsigned k = 0; k < partition.sizes[i]; ++k) {
        vrbs.push_back(first + k);
      }
    }
    first += partition.sizes[i];
  }
  return vrbs;
}

unsigned riv_encode(unsigned rb_start, unsigned l_rbs, unsigned n_size)
{
  if (n_size == 0 || rb_start >= n_size || l_rbs < 1 || l_rbs > n_size - rb_start) {
    throw range_error("invalid RIV pair start=" + std::to_string(rb_start) + " length=" + std::to_string(l_rbs) +
                      " for N=" + std::to_string(n_size));
  }
  if (l_rbs - 1 <= n_size / 2) {
    return n_size * (l_rbs - 1) + rb_start;
  }
  return n_size * (n_size - l_rbs + 1) + (n_size - 1 - rb_start);
}

Type1Grant riv_decode(unsigned riv, unsigned n_size)
{
  if (n_size == 0 || riv >= riv_count(n_size)) {
    throw decode_error("RIV " + std::to_string(riv) + " out of range for N=" + std::to_string(n_size));
  }
  const unsigned q = riv / n_size;
  const unsigned r = riv % n_size;
  Type1Grant     g;
  g.riv = riv;
  if (q + r < n_size) {
    g.l_rbs    = q + 1;
    g.rb_start = r;
  } else {
    g.l_rbs    = n_size - q + 1;
    g.rb_start = n_size - 1 - r;
  }
  if (riv_encode(g.rb_start, g.l_rbs, n_size) != riv) {
    throw decode_error("RIV " + std::to_string(riv) + " is not in the encoder image");
  }
  return g;
}

unsigned type1_field_bits(unsigned n_size)
{
  if (n_size == 0) {
    throw config_error("allocation size must be at least 1");
  }
  return ceil_log2(riv_count(n_size));
}

VrbSpan rbg_span_to_vrbs(unsigned rbg_start, unsigned rbg_count, const RbgPartition& partition)
{
  if (rbg_count == 0 || rbg_start + rbg_count > partition.n_rbg()) {
    throw range_error("RBG span outside partition");
  }
  const unsigned first = partition.first_vrb(rbg_start);
  return {first, partition.first_vrb(rbg_start + rbg_count) - first};
}

InterlaceConfig make_interlace_config(unsigned scs_khz, unsigned n_rbsets)
{
  if (scs_khz != 15 && scs_khz != 30) {
    throw config_error("interlaced allocation requires 15 or 30 kHz SCS, got " + std::to_string(scs_khz));
  }
  if (n_rbsets == 0) {
    throw config_error("at least one RB set is required");
  }
  return {scs_khz, scs_khz == 15 ? 10U : 5U, n_rbsets};
}

std::vector<unsigned> interlace_members(unsigned m, const InterlaceConfig& cfg, const BwpConfig& bwp)
{
  if (m >= cfg.m_interlaces) {
    throw range_error("interlace " + std::to_string(m) + " >= M=" + std::to_string(cfg.m_interlaces));
  }
  std::vector<unsigned> crbs;
  const unsigned        lead  = bwp.crb_start % cfg.m_interlaces;
  unsigned              first = bwp.crb_start - lead + m;
  if (first < bwp.crb_start) {
    first += cfg.m_interlaces;
  }
  for (unsigned crb = first; crb < bwp.crb_end(); crb += cfg.m_interlaces) {
    crbs.push_back(crb);
  }
  return crbs;
}

unsigned type2_field_bits(unsigned scs_khz, unsigned n_rbsets)
{
  const auto cfg = make_interlace_config(scs_khz, n_rbsets);
  return (scs_khz == 15 ? 6U : 5U) + cfg.y_bits();
}

BitString encode_type2(const Type2Assignment& a, const InterlaceConfig& cfg)
{
  if (a.interlaces.empty()) {
    throw range_error("type 2 assignment without interlaces");
  }
  for (std::size_t i = 0; i < a.interlaces.size(); ++i) {
    if (a.interlaces[i] >= cfg.m_interlaces || (i > 0 && a.interlaces[i] <= a.interlaces[i - 1])) {
      throw range_error("interlace list must be sorted, unique and below M");
    }
  }
  BitString field;
  if (cfg.scs_khz == 15) {
    const unsigned start = a.interlaces.front();
    const auto     count = static_cast<unsigned>(a.interlaces.size());
    if (a.interlaces.back() != start + count - 1) {
      throw range_error("15 kHz interlace assignment must be contiguous");
    }
    field.append(riv_encode(start, count, cfg.m_interlaces), 6);
  } else {
    BitString bitmap(cfg.m_interlaces);
    for (unsigned m : a.interlaces) {
      bitmap.set(m, true);
    }
    field.append(bitmap);
  }
  const unsigned y = cfg.y_bits();
  field.append(riv_encode(a.rbset_start, a.rbset_count, cfg.n_rbsets), y);
  return field;
}

Type2Assignment decode_type2(const BitString& field, const InterlaceConfig& cfg)
{
  const unsigned head = cfg.scs_khz == 15 ? 6U : 5U;
  if (field.size() != head + cfg.y_bits()) {
    throw format_error("type 2 field has wrong width");
  }
  Type2Assignment a;
  if (cfg.scs_khz == 15) {
    const auto g = riv_decode(static_cast<unsigned>(field.read(0, 6)), cfg.m_interlaces);
    for (unsigned k = 0; k < g.l_rbs; ++k) {
      a.interlaces.push_back(g.rb_start + k);
    }
  } else {
    for (unsigned m = 0; m < cfg.m_interlaces; ++m) {
      if (field[m]) {
        a.interlaces.push_back(m);
      }
    }
    if (a.interlaces.empty()) {
      throw decode_error("type 2 bitmap allocates no interlace");
    }
  }
  const auto sets = riv_decode(static_cast<unsigned>(field.read(head, cfg.y_bits())), cfg.n_rbsets);
  a.rbset_start   = sets.rb_start;
  a.rbset_count   = sets.l_rbs;
  return a;
}

} // namespace nrmap
