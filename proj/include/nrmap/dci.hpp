#pragma once

#include "nrmap/bits.hpp"
#include "nrmap/fdra.hpp"
#include "nrmap/grid.hpp"
#include "nrmap/vpmap.hpp"

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nrmap {

enum class DciFormat {
  f0_0,
  f0_1,
  f0_2,
  f1_0,
  f1_1,
  f1_2,
  f2_0,
  f2_1,
  f2_2,
  f2_3,
  f2_4,
  f2_5,
  f2_6,
  f3_0,
  f3_1,
};

struct DciFormatInfo {
  DciFormat        format;
  std::string_view id;
  std::string_view usage;
  /// Scheduling formats with a modeled field layout; the rest are registry entries only.
  bool field_modeled;
};

std::span<const DciFormatInfo> dci_registry();
const DciFormatInfo&           dci_format_info(DciFormat f);
std::string_view               to_string(DciFormat f);
/// Accepts "1_1", "1-1" or "11". Throws config_error otherwise.
DciFormat parse_dci_format(std::string_view id);

bool is_uplink(DciFormat f);

/// RRC resourceAllocation setting that shapes the frequency-domain field.
enum class ResourceAllocationConfig { type0, type1, dynamic_switch };

struct DciConfig {
  BwpConfig                bwp;
  /// Nominal RBG size for type 0.
  unsigned rbg_size = 4;
  ResourceAllocationConfig resource_allocation = ResourceAllocationConfig::type1;
  /// Type 1 allocation unit in RBs for formats 0_2/1_2 (1 when not configured).
  unsigned type1_granularity = 1;
  /// useInterlacePUCCH-PUSCH: uplink formats 0_0/0_1 use type 2.
  bool     interlaced = false;
  unsigned n_rbsets   = 1;
};

struct Type0Assignment {
  std::set<unsigned> rbgs;

  friend bool operator==(const Type0Assignment&, const Type0Assignment&) = default;
};

/// Contiguous allocation, in RBs (RBG units for formats 0_2/1_2).
struct Type1Assignment {
  unsigned start  = 0;
  unsigned length = 1;

  friend bool operator==(const Type1Assignment&, const Type1Assignment&) = default;
};

using FrequencyAssignment = std::variant<Type0Assignment, Type1Assignment, Type2Assignment>;

/// Decoded scheduling content of a DCI 0_x / 1_x message.
struct DciContent {
  DciFormat           format = DciFormat::f1_1;
  FrequencyAssignment frequency = Type1Assignment{};
  unsigned            tdra_index             = 0;
  unsigned            bwp_indicator          = 0;
  bool                vrb_to_prb_interleaved = false;
  bool                frequency_hopping      = false;
  unsigned            mcs                    = 0;
  bool                ndi                    = false;
  unsigned            rv                     = 0;
  unsigned            harq_process           = 0;
  unsigned            dai                    = 0;
  unsigned            tpc                    = 1;
  unsigned            pucch_resource         = 0;
  unsigned            harq_feedback_timing   = 0;

  friend bool operator==(const DciContent&, const DciContent&) = default;
};

struct DciField {
  std::string name;
  BitString   bits;

  unsigned      width() const { return static_cast<unsigned>(bits.size()); }
  std::uint64_t value() const { return bits.read(0, width()); }

  friend bool operator==(const DciField&, const DciField&) = default;
};

struct DciMessage {
  DciFormat             format = DciFormat::f1_1;
  std::vector<DciField> fields;
  BitString             payload;
  /// CRC-24C of the payload with the low 16 bits XOR-ed with the RNTI.
  std::uint32_t crc24 = 0;

  /// Payload followed by the 24 masked CRC bits.
  BitString   bits() const;
  std::string to_hex() const { return bits().to_hex(); }
};

/// Width of the frequency-domain resource assignment field.
unsigned frequency_field_bits(DciFormat f, const DciConfig& cfg);
/// Fields (zero-valued) in transmission order.
std::vector<DciField> dci_layout(DciFormat f, const DciConfig& cfg);
unsigned              dci_payload_bits(DciFormat f, const DciConfig& cfg);

std::uint32_t crc24c(const BitString& payload);
std::uint32_t crc24_mask(const BitString& payload, std::uint16_t rnti);

/// Packs `content` into a DCI. Throws encode_error when the content does not fit the configured layout.
DciMessage build_dci(const DciContent& content, const DciConfig& cfg, std::uint16_t rnti);

/// CRC check failed for this RNTI: the message is not addressed to the UE.
struct NotAddressed {
  friend bool operator==(const NotAddressed&, const NotAddressed&) = default;
};

using ParseResult = std::variant<DciContent, NotAddressed>;

/// Parses payload + CRC bits. Throws format_error on a width or layout mismatch.
ParseResult parse_dci(const BitString& bits, DciFormat format, const DciConfig& cfg, std::uint16_t rnti);

/// Frequency assignment describing `grant` in the requested allocation type. Type 0 requires the grant to
/// cover whole RBGs; x_2 formats express type 1 in RBG units of the configured granularity.
FrequencyAssignment frequency_assignment_for(const VrbAllocation& grant,
                                             DciFormat            format,
                                             AllocationType       type,
                                             const DciConfig&     cfg);

/// Scheduling DCI for a downlink grant (formats 1_0/1_1/1_2).
DciMessage build_dci_1x(const VrbAllocation& grant,
                        DciFormat            format,
                        AllocationType       type,
                        const DciConfig&     cfg,
                        unsigned             tdra_index,
                        unsigned             bwp_indicator,
                        std::uint16_t        rnti);

} // namespace nrmap
