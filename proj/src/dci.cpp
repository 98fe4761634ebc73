#include "nrmap/dci.hpp"

#include "nrmap/errors.hpp"
#include "nrmap/tdra.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace nrmap {

namespace {

constexpr std::array<DciFormatInfo, 15> registry = {{
    {DciFormat::f0_0, "0_0", "Scheduling of PUSCH in one cell", true},
    {DciFormat::f0_1, "0_1", "Scheduling of PUSCH in one cell", true},
    {DciFormat::f0_2, "0_2", "Scheduling of PUSCH in one cell", true},
    {DciFormat::f1_0, "1_0", "Scheduling of PDSCH in one cell", true},
    {DciFormat::f1_1, "1_1", "Scheduling of PDSCH in one cell", true},
    {DciFormat::f1_2, "1_2", "Scheduling of PDSCH in one cell", true},
    {DciFormat::f2_0, "2_0", "Notifying a group of UEs of the slot format", false},
    {DciFormat::f2_1,
     "2_1",
     "Notifying a group of UEs of the PRB(s) and OFDM symbol(s) where the UE may assume no transmission is "
     "intended for it",
     false},
    {DciFormat::f2_2, "2_2", "Transmission of TPC commands for PUCCH and PUSCH", false},
    {DciFormat::f2_3, "2_3", "Transmission of a group of TPC commands for SRS transmissions by one or more UEs", false},
    {DciFormat::f2_4,
     "2_4",
     "Notifying a group of UEs of the PRB(s) and OFDM symbol(s) where the UE cancels the corresponding UL "
     "transmission",
     false},
    {DciFormat::f2_5, "2_5", "Notifying the availability of soft resources", false},
    {DciFormat::f2_6, "2_6", "Notifying power saving information outside DRX Active Time for one or more UEs", false},
    {DciFormat::f3_0, "3_0", "Scheduling of NR sidelink in one cell", false},
    {DciFormat::f3_1, "3_1", "Scheduling of LTE sidelink in one cell", false},
}};

constexpr std::uint32_t crc24c_poly = 0xB2B117;
constexpr std::uint32_t crc24_mask_bits = 0xFFFFFF;

constexpr std::array<std::uint32_t, 256> make_crc_table()
{
  std::array<std::uint32_t, 256> t{};
  for (std::uint32_t b = 0; b < 256; ++b) {
    std::uint32_t crc = b << 16;
    for (int k = 0; k < 8; ++k) {
      crc = (crc & 0x800000) ? ((crc << 1) ^ crc24c_poly) : (crc << 1);
    }
    t[b] = crc & crc24_mask_bits;
  }
  return t;
}

constexpr auto crc_table = make_crc_table();

bool is_fallback(DciFormat f)
{
  return f == DciFormat::f0_0 || f == DciFormat::f1_0;
}

bool is_x2(DciFormat f)
{
  return f == DciFormat::f0_2 || f == DciFormat::f1_2;
}

/// Frequency-domain field geometry for one (format, config) pair.
struct FreqLayout {
  bool            type0_ok = false;
  bool            type1_ok = false;
  bool            type2    = false;
  bool            selector = false;
  unsigned        type0_bits  = 0;
  unsigned        type1_units = 0;
  unsigned        type1_bits  = 0;
  unsigned        width       = 0;
  RbgPartition    rbgs;
  InterlaceConfig interlace;
};

FreqLayout freq_layout(DciFormat f, const DciConfig& cfg)
{
  const auto& info = dci_format_info(f);
  if (!info.field_modeled) {
    throw config_error("DCI format " + std::string(info.id) + " has no modeled field layout");
  }
  if ((cfg.bwp.direction == Direction::uplink) != is_uplink(f)) {
    throw config_error("DCI format " + std::string(info.id) + " does not match the BWP link direction");
  }
  FreqLayout l;
  const unsigned n = cfg.bwp.size_rb;
  if (cfg.interlaced && (f == DciFormat::f0_0 || f == DciFormat::f0_1)) {
    l.type2     = true;
    l.interlace = make_interlace_config(cfg.bwp.numerology.scs_khz(), cfg.n_rbsets);
    l.width     = type2_field_bits(l.interlace.scs_khz, cfg.n_rbsets);
    return l;
  }
  if (is_fallback(f)) {
    l.type1_ok = true;
  } else {
    l.type0_ok = cfg.resource_allocation != ResourceAllocationConfig::type1;
    l.type1_ok = cfg.resource_allocation != ResourceAllocationConfig::type0;
    l.selector = cfg.resource_allocation == ResourceAllocationConfig::dynamic_switch;
  }
  if (l.type0_ok) {
    l.rbgs       = rbg_partition(cfg.bwp, cfg.rbg_size);
    l.type0_bits = l.rbgs.n_rbg();
  }
  if (l.type1_ok) {
    l.type1_units = is_x2(f) && cfg.type1_granularity > 1 ? rbg_partition(cfg.bwp, cfg.type1_granularity).n_rbg() : n;
    l.type1_bits  = type1_field_bits(l.type1_units);
  }
  l.width = std::max(l.type0_ok ? l.type0_bits : 0U, l.type1_ok ? l.type1_bits : 0U) + (l.selector ? 1U : 0U);
  return l;
}

BitString encode_frequency(const FrequencyAssignment& fa, const FreqLayout& l)
{
  BitString body;
  bool      is_type1 = false;
  if (const auto* t0 = std::get_if<Type0Assignment>(&fa)) {
    if (!l.type0_ok) {
      throw encode_error("type 0 allocation not allowed by this DCI configuration");
    }
    try {
      body = encode_type0(t0->rbgs, l.rbgs);
    } catch (const range_error& e) {
      throw encode_error(e.what());
    }
  } else if (const auto* t1 = std::get_if<Type1Assignment>(&fa)) {
    if (!l.type1_ok) {
      throw encode_error("type 1 allocation not allowed by this DCI configuration");
    }
    try {
      body.append(riv_encode(t1->start, t1->length, l.type1_units), l.type1_bits);
    } catch (const range_error& e) {
      throw encode_error(e.what());
    }
    is_type1 = true;
  } else {
    if (!l.type2) {
      throw encode_error("type 2 allocation not allowed by this DCI configuration");
    }
    try {
      body = encode_type2(std::get<Type2Assignment>(fa), l.interlace);
    } catch (const range_error& e) {
      throw encode_error(e.what());
    }
  }

  BitString field;
  if (l.selector) {
    field.push_back(is_type1);
  }
  const auto pad = l.width - field.size() - body.size();
  for (std::size_t i = 0; i < pad; ++i) {
    field.push_back(false);
  }
  field.append(body);
  return field;
}

FrequencyAssignment decode_frequency(const BitString& field, const FreqLayout& l)
{
  if (l.type2) {
    return decode_type2(field, l.interlace);
  }
  std::size_t pos      = 0;
  bool        is_type1 = l.type1_ok;
  if (l.selector) {
    is_type1 = field[0];
    pos      = 1;
  }
  const unsigned body_bits = is_type1 ? l.type1_bits : l.type0_bits;
  for (std::size_t i = pos; i < field.size() - body_bits; ++i) {
    if (field[i]) {
      throw format_error("non-zero padding in the frequency-domain assignment");
    }
  }
  const auto body = field.slice(field.size() - body_bits, body_bits);
  if (is_type1) {
    const auto g = riv_decode(static_cast<unsigned>(body.read(0, body_bits)), l.type1_units);
    return Type1Assignment{g.rb_start, g.l_rbs};
  }
  return Type0Assignment{decode_type0_rbgs(body, l.rbgs)};
}

struct FieldSpec {
  const char* name;
  unsigned    width;
};

std::vector<FieldSpec> field_specs(DciFormat f, const FreqLayout& l)
{
  const bool uplink = is_uplink(f);
  const bool hop_or_vrb = l.type1_ok && !l.type2;
  std::vector<FieldSpec> s;
  s.push_back({"identifier", 1});
  if (!is_fallback(f)) {
    s.push_back({"bwp_indicator", 2});
  }
  s.push_back({"frequency_domain_assignment", l.width});
  s.push_back({"time_domain_assignment", tdra_field_bits});
  if (hop_or_vrb) {
    s.push_back({uplink ? "frequency_hopping" : "vrb_to_prb_mapping", 1});
  }
  s.push_back({"mcs", 5});
  s.push_back({"ndi", 1});
  s.push_back({"rv", 2});
  s.push_back({"harq_process", 4});
  if (!uplink || f == DciFormat::f0_1) {
    s.push_back({"dai", 2});
  }
  s.push_back({"tpc", 2});
  if (!uplink) {
    s.push_back({"pucch_resource", 3});
    s.push_back({"harq_feedback_timing", 3});
  }
  return s;
}

std::uint64_t content_value(const DciContent& c, std::string_view name, bool uplink)
{
  if (name == "identifier") {
    return uplink ? 0 : 1;
  }
  if (name == "bwp_indicator") {
    return c.bwp_indicator;
  }
  if (name == "time_domain_assignment") {
    return c.tdra_index;
  }
  if (name == "frequency_hopping") {
    return c.frequency_hopping;
  }
  if (name == "vrb_to_prb_mapping") {
    return c.vrb_to_prb_interleaved;
  }
  if (name == "mcs") {
    return c.mcs;
  }
  if (name == "ndi") {
    return c.ndi;
  }
  if (name == "rv") {
    return c.rv;
  }
  if (name == "harq_process") {
    return c.harq_process;
  }
  if (name == "dai") {
    return c.dai;
  }
  if (name == "tpc") {
    return c.tpc;
  }
  if (name == "pucch_resource") {
    return c.pucch_resource;
  }
  if (name == "harq_feedback_timing") {
    return c.harq_feedback_timing;
  }
  throw encode_error("unknown DCI field " + std::string(name));
}

void store_value(DciContent& c, std::string_view name, std::uint64_t v)
{
  const auto u = static_cast<unsigned>(v);
  if (name == "bwp_indicator") {
    c.bwp_indicator = u;
  } else if (name == "time_domain_assignment") {
    c.tdra_index = u;
  } else if (name == "frequency_hopping") {
    c.frequency_hopping = v != 0;
  } else if (name == "vrb_to_prb_mapping") {
    c.vrb_to_prb_interleaved = v != 0;
  } else if (name == "mcs") {
    c.mcs = u;
  } else if (name == "ndi") {
    c.ndi = v != 0;
  } else if (name == "rv") {
    c.rv = u;
  } else if (name == "harq_process") {
    c.harq_process = u;
  } else if (name == "dai") {
    c.dai = u;
  } else if (name == "tpc") {
    c.tpc = u;
  } else if (name == "pucch_resource") {
    c.pucch_resource = u;
  } else if (name == "harq_feedback_timing") {
    c.harq_feedback_timing = u;
  }
}

/// Content fields that have no slot in the layout must stay at their defaults.
void check_absent_fields(const DciContent& c, const std::vector<FieldSpec>& specs)
{
  auto has = [&](std::string_view n) {
    return std::any_of(specs.begin(), specs.end(), [&](const FieldSpec& s) { return n == s.name; });
  };
  const DciContent defaults;
  auto             reject = [](const char* n) {
    throw encode_error(std::string("field '") + n + "' is not present in this DCI layout");
  };
  if (!has("bwp_indicator") && c.bwp_indicator != defaults.bwp_indicator) {
    reject("bwp_indicator");
  }
  if (!has("frequency_hopping") && c.frequency_hopping) {
    reject("frequency_hopping");
  }
  if (!has("vrb_to_prb_mapping") && c.vrb_to_prb_interleaved) {
    reject("vrb_to_prb_mapping");
  }
  if (!has("dai") && c.dai != defaults.dai) {
    reject("dai");
  }
  if (!has("pucch_resource") && c.pucch_resource != defaults.pucch_resource) {
    reject("pucch_resource");
  }
  if (!has("harq_feedback_timing") && c.harq_feedback_timing != defaults.harq_feedback_timing) {
    reject("harq_feedback_timing");
  }
}

} // namespace

std::span<const DciFormatInfo> dci_registry()
{
  return registry;
}

const DciFormatInfo& dci_format_info(DciFormat f)
{
  for (const auto& info : registry) {
    if (info.format == f) {
      return info;
    }
  }
  throw config_error("unknown DCI format");
}

std::string_view to_string(DciFormat f)
{
  return dci_format_info(f).id;
}

DciFormat parse_dci_format(std::string_view id)
{
  std::string norm;
  for (char c : id) {
    if (c >= '0' && c <= '9') {
      norm.push_back(c);
    } else if (c != '_' && c != '-') {
      throw config_error("bad DCI format id '" + std::string(id) + "'");
    }
  }
  for (const auto& info : registry) {
    if (norm.size() == 2 && info.id[0] == norm[0] && info.id[2] == norm[1]) {
      return info.format;
    }
  }
  throw config_error("unknown DCI format '" + std::string(id) + "'");
}

bool is_uplink(DciFormat f)
{
  return f == DciFormat::f0_0 || f == DciFormat::f0_1 || f == DciFormat::f0_2;
}

BitString DciMessage::bits() const
{
  BitString b = payload;
  b.append(crc24, 24);
  return b;
}

unsigned frequency_field_bits(DciFormat f, const DciConfig& cfg)
{
  return freq_layout(f, cfg).width;
}

std::vector<DciField> dci_layout(DciFormat f, const DciConfig& cfg)
{
  std::vector<DciField> out;
  for (const auto& s : field_specs(f, freq_layout(f, cfg))) {
    out.push_back({s.name, BitString(s.width)});
  }
  return out;
}

unsigned dci_payload_bits(DciFormat f, const DciConfig& cfg)
{
  unsigned total = 0;
  for (const auto& s : field_specs(f, freq_layout(f, cfg))) {
    total += s.width;
  }
  return total;
}

std::uint32_t crc24c(const BitString& payload)
{
  std::uint32_t     crc   = 0;
  const std::size_t bytes = payload.size() / 8;
  for (std::size_t i = 0; i < bytes; ++i) {
    const auto byte = static_cast<std::uint32_t>(payload.read(i * 8, 8));
    crc             = ((crc << 8) ^ crc_table[((crc >> 16) ^ byte) & 0xFF]) & crc24_mask_bits;
  }
  for (std::size_t i = bytes * 8; i < payload.size(); ++i) {
    crc ^= static_cast<std::uint32_t>(payload[i]) << 23;
    crc = ((crc & 0x800000) ? ((crc << 1) ^ crc24c_poly) : (crc << 1)) & crc24_mask_bits;
  }
  return crc;
}

std::uint32_t crc24_mask(const BitString& payload, std::uint16_t rnti)
{
  return crc24c(payload) ^ rnti;
}

DciMessage build_dci(const DciContent& content, const DciConfig& cfg, std::uint16_t rnti)
{
  const auto l     = freq_layout(content.format, cfg);
  const auto specs = field_specs(content.format, l);
  check_absent_fields(content, specs);
  const bool uplink = is_uplink(content.format);

  DciMessage msg;
  msg.format = content.format;
  for (const auto& s : specs) {
    DciField field{s.name, {}};
    if (std::string_view(s.name) == "frequency_domain_assignment") {
      field.bits = encode_frequency(content.frequency, l);
    } else {
      try {
        field.bits.append(content_value(content, s.name, uplink), s.width);
      } catch (const range_error&) {
        throw encode_error(std::string("value of '") + s.name + "' does not fit " + std::to_string(s.width) +
                           " bits");
      }
    }
    msg.payload.append(field.bits);
    msg.fields.push_back(std::move(field));
  }
  msg.crc24 = crc24_mask(msg.payload, rnti);
  return msg;
}

ParseResult parse_dci(const BitString& bits, DciFormat format, const DciConfig& cfg, std::uint16_t rnti)
{
  const auto l     = freq_layout(format, cfg);
  const auto specs = field_specs(format, l);
  unsigned   width = 0;
  for (const auto& s : specs) {
    width += s.width;
  }
  if (bits.size() != width + 24U) {
    throw format_error("DCI " + std::string(to_string(format)) + " expects " + std::to_string(width + 24) +
                       " bits, got " + std::to_string(bits.size()));
  }
  const auto payload = bits.slice(0, width);
  const auto crc     = static_cast<std::uint32_t>(bits.read(width, 24));
  if (crc != crc24_mask(payload, rnti)) {
    return NotAddressed{};
  }

  DciContent  c;
  c.format = format;
  std::size_t pos = 0;
  for (const auto& s : specs) {
    const std::string_view name = s.name;
    if (name == "frequency_domain_assignment") {
      c.frequency = decode_frequency(payload.slice(pos, s.width), l);
    } else if (name == "identifier") {
      if (payload.read(pos, 1) != (is_uplink(format) ? 0U : 1U)) {
        throw format_error("DCI format identifier does not match " + std::string(to_string(format)));
      }
    } else {
      store_value(c, name, payload.read(pos, s.width));
    }
    pos += s.width;
  }
  return c;
}

FrequencyAssignment frequency_assignment_for(const VrbAllocation& grant,
                                             DciFormat            format,
                                             AllocationType       type,
                                             const DciConfig&     cfg)
{
  if (grant.l_rbs == 0 || grant.rb_start + grant.l_rbs > cfg.bwp.size_rb) {
    throw encode_error("grant does not fit the active BWP");
  }
  auto to_units = [&](const RbgPartition& part) {
    // grant must start and end on group boundaries
    unsigned pos = 0;
    std::optional<unsigned> start;
    for (unsigned g = 0; g < part.n_rbg(); ++g) {
      if (pos == grant.rb_start) {
        start = g;
      }
      pos += part.sizes[g];
      if (start && pos == grant.rb_start + grant.l_rbs) {
        return std::pair<unsigned, unsigned>{*start, g - *start + 1};
      }
    }
    throw encode_error("grant is not aligned to resource block groups");
  };

  if (type == AllocationType::type0) {
    const auto [g0, count] = to_units(rbg_partition(cfg.bwp, cfg.rbg_size));
    Type0Assignment a;
    for (unsigned g = g0; g < g0 + count; ++g) {
      a.rbgs.insert(g);
    }
    return a;
  }
  if (is_x2(format) && cfg.type1_granularity > 1) {
    const auto [g0, count] = to_units(rbg_partition(cfg.bwp, cfg.type1_granularity));
    return Type1Assignment{g0, count};
  }
  return Type1Assignment{grant.rb_start, grant.l_rbs};
}

DciMessage build_dci_1x(const VrbAllocation& grant,
                        DciFormat            format,
                        AllocationType       type,
                        const DciConfig&     cfg,
                        unsigned             tdra_index,
                        unsigned             bwp_indicator,
                        std::uint16_t        rnti)
{
  if (format != DciFormat::f1_0 && format != DciFormat::f1_1 && format != DciFormat::f1_2) {
    throw encode_error("build_dci_1x only builds formats 1_0, 1_1 and 1_2");
  }
  DciContent c;
  c.format        = format;
  c.frequency     = frequency_assignment_for(grant, format, type, cfg);
  c.tdra_index    = tdra_index;
  c.bwp_indicator = format == DciFormat::f1_0 ? 0 : bwp_indicator;
  return build_dci(c, cfg, rnti);
}

} // namespace nrmap
