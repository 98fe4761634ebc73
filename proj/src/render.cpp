#include "nrmap/errors.hpp"
#include "nrmap/scenario.hpp"

#include <algorithm>
#include <sstream>

namespace nrmap {

namespace {

char ue_glyph(unsigned ue)
{
  static constexpr char glyphs[] = "123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  if (ue >= 1 && ue < sizeof(glyphs)) {
    return glyphs[ue - 1];
  }
  return '*';
}

std::string protection_label(const RunReport& r, unsigned slot, unsigned crb)
{
  for (const auto& w : r.protections) {
    if (w.covers({slot, crb})) {
      return w.label;
    }
  }
  return {};
}

std::string_view state_name(CellState::Kind k)
{
  switch (k) {
    case CellState::Kind::idle:
      return "idle";
    case CellState::Kind::protection:
      return "protected";
    case CellState::Kind::ue:
      return "ue";
    case CellState::Kind::violation:
      return "violation";
  }
  return "?";
}

std::string render_text(const RunReport& r)
{
  std::ostringstream os;
  os << "# scenario " << r.scenario << " policy " << r.policy << " (" << r.horizon << " slots x " << r.n_crb
     << " CRBs)\n";
  os << "# . idle  # protected  1-9/A-Z UE  ! violation\n";
  for (unsigned s = 0; s < r.snapshots.size(); ++s) {
    os << "slot " << (s < 10 ? "  " : s < 100 ? " " : "") << s << " |";
    for (const auto& cell : r.snapshots[s]) {
      switch (cell.kind) {
        case CellState::Kind::idle:
          os << '.';
          break;
        case CellState::Kind::protection:
          os << '#';
          break;
        case CellState::Kind::ue:
          os << ue_glyph(cell.ue_id);
          break;
        case CellState::Kind::violation:
          os << '!';
          break;
      }
    }
    os << "|\n";
  }
  return os.str();
}

std::string render_csv(const RunReport& r)
{
  std::ostringstream os;
  os << "slot,crb,state,ue,label\n";
  for (unsigned s = 0; s < r.snapshots.size(); ++s) {
    for (unsigned c = 0; c < r.snapshots[s].size(); ++c) {
      const auto& cell = r.snapshots[s][c];
      os << s << ',' << c << ',' << state_name(cell.kind) << ',';
      if (cell.kind == CellState::Kind::ue || cell.kind == CellState::Kind::violation) {
        os << cell.ue_id;
      }
      os << ',' << protection_label(r, s, c) << '\n';
    }
  }
  return os.str();
}

std::string render_svg(const RunReport& r)
{
  constexpr unsigned cw = 24;
  constexpr unsigned ch = 4;
  constexpr unsigned margin = 40;
  static constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const unsigned width  = margin + r.horizon * cw + 10;
  const unsigned height = margin + r.n_crb * ch + 10;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<title>" << r.scenario << " (" << r.policy << ")</title>\n";
  os << "<rect x=\"" << margin << "\" y=\"10\" width=\"" << r.horizon * cw << "\" height=\"" << r.n_crb * ch
     << "\" fill=\"#ffffff\" stroke=\"#000000\"/>\n";
  for (unsigned s = 0; s < r.snapshots.size(); ++s) {
    os << "<text x=\"" << margin + s * cw + cw / 2 << "\" y=\"" << height - 2
       << "\" font-size=\"10\" text-anchor=\"middle\">" << s << "</text>\n";
    for (unsigned c = 0; c < r.snapshots[s].size(); ++c) {
      const auto& cell = r.snapshots[s][c];
      if (cell.kind == CellState::Kind::idle) {
        continue;
      }
      const char* fill = "#cccccc";
      if (cell.kind == CellState::Kind::ue) {
        fill = palette[(cell.ue_id + 9) % 10];
      } else if (cell.kind == CellState::Kind::violation) {
        fill = "#000000";
      }
      // CRB 0 at the bottom
      const unsigned y = 10 + (r.n_crb - 1 - c) * ch;
      os << "<rect x=\"" << margin + s * cw << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch
         << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  os << "<text x=\"2\" y=\"20\" font-size=\"10\">CRB " << r.n_crb - 1 << "</text>\n";
  os << "<text x=\"2\" y=\"" << 10 + r.n_crb * ch << "\" font-size=\"10\">CRB 0</text>\n";
  os << "</svg>\n";
  return os.str();
}

} // namespace

RenderFormat parse_render_format(std::string_view name)
{
  if (name == "text") {
    return RenderFormat::text;
  }
  if (name == "csv") {
    return RenderFormat::csv;
  }
  if (name == "svg") {
    return RenderFormat::svg;
  }
  throw usage_error("unknown render format '" + std::string(name) + "' (text, csv or svg)");
}

std::string_view extension(RenderFormat f)
{
  switch (f) {
    case RenderFormat::text:
      return "txt";
    case RenderFormat::csv:
      return "csv";
    case RenderFormat::svg:
      return "svg";
  }
  return "out";
}

std::string render_grid(const RunReport& report, RenderFormat format)
{
  if (report.snapshots.empty() && report.horizon > 0) {
    auto filled      = report;
    filled.snapshots = grid_snapshots(report);
    return render_grid(filled, format);
  }
  switch (format) {
    case RenderFormat::text:
      return render_text(report);
    case RenderFormat::csv:
      return render_csv(report);
    case RenderFormat::svg:
      return render_svg(report);
  }
  throw usage_error("unknown render format");
}

} // namespace nrmap
