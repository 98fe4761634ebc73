#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace nrmap {

constexpr unsigned symbols_per_slot_normal = 14;
constexpr unsigned sliv_count              = 105;
constexpr unsigned tdra_max_rows           = 16;
constexpr unsigned tdra_field_bits         = 4;

struct SymbolSpan {
  unsigned start  = 0;
  unsigned length = 14;

  friend bool operator==(const SymbolSpan&, const SymbolSpan&) = default;
};

unsigned   sliv_encode(unsigned start, unsigned length);
SymbolSpan sliv_decode(unsigned sliv);

/// PDSCH/PUSCH mapping type. Type A allocations must start in symbols 0..3; type B anywhere.
enum class PdschMappingType { a, b };

struct TdraRow {
  /// K0 for downlink, K2 for uplink.
  unsigned         k_offset     = 0;
  unsigned         sliv         = 0;
  PdschMappingType mapping_type = PdschMappingType::a;

  SymbolSpan symbols() const { return sliv_decode(sliv); }

  friend bool operator==(const TdraRow&, const TdraRow&) = default;
};

/// Time-domain allocation lookup table; a 4-bit DCI value m selects row m+1 (index m here).
class TdraTable {
public:
  TdraTable() = default;
  explicit TdraTable(std::vector<TdraRow> rows);

  /// Validates and appends a row. Throws config_error for a 17th row or an invalid row.
  void add_row(const TdraRow& row);

  const TdraRow&              row(unsigned m) const;
  const std::vector<TdraRow>& rows() const { return rows_; }
  std::size_t                 size() const { return rows_.size(); }

  /// Same-slot and next-slot rows: K0 in {0, 1}, S=7, L=6, mapping type B.
  static TdraTable default_table();

private:
  std::vector<TdraRow> rows_;
};

/// Slot carrying the data: floor(pdcch_slot * 2^mu_data / 2^mu_pdcch) + k_offset.
std::uint64_t resolve_data_slot(std::uint64_t pdcch_slot, unsigned k_offset, unsigned mu_pdcch, unsigned mu_data);

// TDD slot-format patterns.

enum class SymbolClass : std::uint8_t { downlink, uplink, flexible };

struct TddPattern {
  unsigned periodicity_slots = 0;
  unsigned dl_slots          = 0;
  unsigned dl_symbols        = 0;
  unsigned ul_slots          = 0;
  unsigned ul_symbols        = 0;
};

/// Per-slot, per-symbol classification over one configuration period.
struct SlotFormatGrid {
  unsigned                 symbols_per_slot = symbols_per_slot_normal;
  std::vector<SymbolClass> symbols;

  unsigned    n_slots() const { return static_cast<unsigned>(symbols.size() / symbols_per_slot); }
  SymbolClass at(unsigned slot, unsigned symbol) const { return symbols.at(slot * symbols_per_slot + symbol); }
  SymbolClass& at(unsigned slot, unsigned symbol) { return symbols.at(slot * symbols_per_slot + symbol); }

  friend bool operator==(const SlotFormatGrid&, const SlotFormatGrid&) = default;
};

SlotFormatGrid expand_tdd(const TddPattern&                pattern,
                          const std::optional<TddPattern>& second           = std::nullopt,
                          unsigned                         symbols_per_slot = symbols_per_slot_normal);

/// UE-specific directive for one slot of the period.
struct SlotOverride {
  enum class Kind { all_downlink, all_uplink, explicit_symbols };

  unsigned slot = 0;
  Kind     kind = Kind::all_downlink;
  /// For explicit_symbols: leading DL symbols and trailing UL symbols; the rest stays flexible.
  unsigned n_dl = 0;
  unsigned n_ul = 0;
};

/// Applies overrides on flexible symbols only. Changing a DL or UL symbol throws constraint_error.
SlotFormatGrid apply_dedicated_overrides(const SlotFormatGrid& base, const std::vector<SlotOverride>& overrides);

} // namespace nrmap
