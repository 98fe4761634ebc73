#include "nrmap/tdra.hpp"

#include "nrmap/errors.hpp"

#include <string>

namespace nrmap {

unsigned sliv_encode(unsigned start, unsigned length)
{
  constexpr unsigned n = symbols_per_slot_normal;
  if (start >= n || length < 1 || start + length > n) {
    throw range_error("invalid symbol allocation S=" + std::to_string(start) + " L=" + std::to_string(length));
  }
  if (length - 1 <= n / 2) {
    return n * (length - 1) + start;
  }
  return n * (n - length + 1) + (n - 1 - start);
}

SymbolSpan sliv_decode(unsigned sliv)
{
  constexpr unsigned n = symbols_per_slot_normal;
  if (sliv >= sliv_count) {
    throw decode_error("SLIV " + std::to_string(sliv) + " outside the encoder image");
  }
  const unsigned q = sliv / n;
  const unsigned r = sliv % n;
  SymbolSpan     span;
  if (q + r < n) {
    span = {r, q + 1};
  } else {
    span = {n - 1 - r, n - q + 1};
  }
  if (sliv_encode(span.start, span.length) != sliv) {
    throw decode_error("SLIV " + std::to_string(sliv) + " outside the encoder image");
  }
  return span;
}

TdraTable::TdraTable(std::vector<TdraRow> rows)
{
  for (const auto& r : rows) {
    add_row(r);
  }
}

void TdraTable::add_row(const TdraRow& row)
{
  if (rows_.size() >= tdra_max_rows) {
    throw config_error("TDRA table holds at most 16 rows");
  }
  SymbolSpan span;
  try {
    span = row.symbols();
  } catch (const decode_error& e) {
    throw config_error(std::string("TDRA row: ") + e.what());
  }
  if (row.mapping_type == PdschMappingType::a && span.start > 3) {
    throw config_error("mapping type A rows must start in symbols 0..3");
  }
  rows_.push_back(row);
}

const TdraRow& TdraTable::row(unsigned m) const
{
  if (m >= rows_.size()) {
    throw range_error("TDRA index " + std::to_string(m) + " beyond table of " + std::to_string(rows_.size()));
  }
  return rows_[m];
}

TdraTable TdraTable::default_table()
{
  return TdraTable({{0, sliv_encode(7, 6), PdschMappingType::b}, {1, sliv_encode(7, 6), PdschMappingType::b}});
}

std::uint64_t resolve_data_slot(std::uint64_t pdcch_slot, unsigned k_offset, unsigned mu_pdcch, unsigned mu_data)
{
  return ((pdcch_slot << mu_data) >> mu_pdcch) + k_offset;
}

namespace {

void expand_one(const TddPattern& p, unsigned nsym, std::vector<SymbolClass>& out)
{
  if (p.periodicity_slots == 0) {
    throw config_error("TDD periodicity must be at least one slot");
  }
  if (p.dl_slots + p.ul_slots > p.periodicity_slots) {
    throw config_error("TDD pattern has more full DL/UL slots than its period");
  }
  if (p.dl_symbols >= nsym || p.ul_symbols >= nsym) {
    throw config_error("partial-slot symbol counts must be below the slot length");
  }
  const unsigned free_slots = p.periodicity_slots - p.dl_slots - p.ul_slots;
  if ((p.dl_symbols > 0 || p.ul_symbols > 0) && free_slots == 0) {
    throw config_error("no boundary slot left for partial DL/UL symbols");
  }
  if (free_slots == 1 && p.dl_symbols + p.ul_symbols > nsym) {
    throw config_error("DL and UL symbols claim the same symbol of the boundary slot");
  }

  const std::size_t base = out.size();
  out.resize(base + static_cast<std::size_t>(p.periodicity_slots) * nsym, SymbolClass::flexible);
  auto cell = [&](unsigned slot, unsigned sym) -> SymbolClass& { return out[base + slot * nsym + sym]; };

  for (unsigned s = 0; s < p.dl_slots; ++s) {
    for (unsigned k = 0; k < nsym; ++k) {
      cell(s, k) = SymbolClass::downlink;
    }
  }
  for (unsigned k = 0; k < p.dl_symbols; ++k) {
    cell(p.dl_slots, k) = SymbolClass::downlink;
  }
  const unsigned first_ul = p.periodicity_slots - p.ul_slots;
  for (unsigned s = first_ul; s < p.periodicity_slots; ++s) {
    for (unsigned k = 0; k < nsym; ++k) {
      cell(s, k) = SymbolClass::uplink;
    }
  }
  for (unsigned k = 0; k < p.ul_symbols; ++k) {
    cell(first_ul - 1, nsym - 1 - k) = SymbolClass::uplink;
  }
}

} // namespace

SlotFormatGrid expand_tdd(const TddPattern& pattern, const std::optional<TddPattern>& second, unsigned symbols_per_slot)
{
  if (symbols_per_slot != 12 && symbols_per_slot != 14) {
    throw config_error("slots carry 12 or 14 symbols");
  }
  SlotFormatGrid grid;
  grid.symbols_per_slot = symbols_per_slot;
  expand_one(pattern, symbols_per_slot, grid.symbols);
  if (second) {
    expand_one(*second, symbols_per_slot, grid.symbols);
  }
  return grid;
}

SlotFormatGrid apply_dedicated_overrides(const SlotFormatGrid& base, const std::vector<SlotOverride>& overrides)
{
  SlotFormatGrid out  = base;
  const unsigned nsym = base.symbols_per_slot;
  auto           put  = [&](unsigned slot, unsigned sym, SymbolClass c) {
    auto& cur = out.at(slot, sym);
    if (cur != SymbolClass::flexible && cur != c) {
      throw constraint_error("slot " + std::to_string(slot) + " symbol " + std::to_string(sym) +
                             " is already fixed by the common configuration");
    }
    cur = c;
  };

  for (const auto& o : overrides) {
    if (o.slot >= base.n_slots()) {
      throw range_error("override slot " + std::to_string(o.slot) + " beyond the period");
    }
    switch (o.kind) {
      case SlotOverride::Kind::all_downlink:
      case SlotOverride::Kind::all_uplink: {
        const auto c = o.kind == SlotOverride::Kind::all_downlink ? SymbolClass::downlink : SymbolClass::uplink;
        for (unsigned k = 0; k < nsym; ++k) {
          put(o.slot, k, c);
        }
        break;
      }
      case SlotOverride::Kind::explicit_symbols:
        if (o.n_dl + o.n_ul > nsym) {
          throw config_error("explicit override claims more symbols than the slot holds");
        }
        for (unsigned k = 0; k < o.n_dl; ++k) {
          put(o.slot, k, SymbolClass::downlink);
        }
        for (unsigned k = 0; k < o.n_ul; ++k) {
          put(o.slot, nsym - 1 - k, SymbolClass::uplink);
        }
        break;
    }
  }
  return out;
}

} // namespace nrmap
