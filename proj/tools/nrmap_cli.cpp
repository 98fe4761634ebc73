// nrmap: scenario runner and standalone NR resource-allocation codecs.

#include "nrmap/dci.hpp"
#include "nrmap/errors.hpp"
#include "nrmap/fdra.hpp"
#include "nrmap/scenario.hpp"
#include "nrmap/tdra.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace nrmap;

namespace {

constexpr int exit_ok         = 0;
constexpr int exit_config     = 2;
constexpr int exit_infeasible = 3;
constexpr int exit_io         = 4;

constexpr const char* out_dir_env = "NRMAP_OUT_DIR";

struct RunOptions {
  std::vector<std::string> scenarios;
  std::string              render;
  std::string              out_dir;
  std::string              policy;
  std::optional<std::uint64_t> seed;
  bool                     write_report = false;
  unsigned                 jobs         = 1;
};

void write_file(const fs::path& path, const std::string& content)
{
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) {
    throw io_error("cannot write " + path.string());
  }
}

std::string summarize(const RunReport& r)
{
  std::ostringstream os;
  os << "scenario " << r.scenario << " (policy " << r.policy << ")\n";
  for (const auto& o : r.outcomes) {
    os << "  UE " << o.grant.ue_id << " slot " << o.grant.slot << " VRB " << o.grant.rb_start << "+" << o.grant.l_rbs
       << " -> ";
    if (!o.assignment) {
      os << "RESCHEDULE_REQUIRED (" << o.reschedule_reason << ")\n";
      continue;
    }
    const auto& a = *o.assignment;
    os << to_string(o.directive->kind);
    if (o.directive->delay_slots > 0) {
      os << " d=" << o.directive->delay_slots;
    }
    os << " slot " << a.slot() << " BWP " << a.bwp_id << " CRB " << a.first_crb() << ".."
       << a.first_crb() + a.cells.size() - 1 << " latency " << o.added_latency << " displacement "
       << o.displacement_rbs << " dci " << o.dci_bits << " bits\n";
  }
  os << "  signaling " << r.signaling_bits << " bits, violations " << r.violations.count() << ", reschedules "
     << r.reschedule_count() << "\n";
  return os.str();
}

struct RunResult {
  int         code = exit_ok;
  std::string text;
};

RunResult run_one(const std::string& file, const RunOptions& opt)
{
  RunResult res;
  try {
    auto sc = load_scenario(file);
    if (opt.seed) {
      sc.seed = *opt.seed;
    }
    const auto report = run_scenario(sc, opt.policy == "default" ? std::string_view{} : opt.policy);
    res.text          = summarize(report);

    fs::path out_dir = opt.out_dir;
    if (out_dir.empty()) {
      const char* env = std::getenv(out_dir_env);
      out_dir         = env != nullptr ? env : ".";
    }
    const auto stem = fs::path(file).stem().string();
    if (!opt.render.empty()) {
      const auto fmt  = parse_render_format(opt.render);
      const auto path = out_dir / (stem + "." + std::string(extension(fmt)));
      write_file(path, render_grid(report, fmt));
      res.text += "  wrote " + path.string() + "\n";
    }
    if (opt.write_report) {
      const auto path = out_dir / (stem + ".report.json");
      write_file(path, report_to_json(report));
      res.text += "  wrote " + path.string() + "\n";
    }
    if (!report.violations.empty()) {
      res.text += "  error: verifier reported violations\n";
      res.code = exit_infeasible;
    } else if (report.reschedule_count() > 0) {
      res.code = exit_infeasible;
    }
  } catch (const io_error& e) {
    res.text = std::string("error: ") + e.what() + "\n";
    res.code = exit_io;
  } catch (const error& e) {
    res.text = std::string("error: ") + e.what() + "\n";
    res.code = exit_config;
  }
  return res;
}

int run_command(const RunOptions& opt)
{
  if (opt.policy != "default") {
    make_policy(opt.policy);
  }
  if (!opt.render.empty()) {
    parse_render_format(opt.render);
  }
  std::vector<RunResult> results(opt.scenarios.size());
  if (opt.jobs <= 1 || opt.scenarios.size() <= 1) {
    for (std::size_t i = 0; i < opt.scenarios.size(); ++i) {
      results[i] = run_one(opt.scenarios[i], opt);
    }
  } else {
    for (std::size_t base = 0; base < opt.scenarios.size(); base += opt.jobs) {
      std::vector<std::future<RunResult>> batch;
      for (std::size_t i = base; i < std::min(opt.scenarios.size(), base + opt.jobs); ++i) {
        batch.push_back(std::async(std::launch::async, run_one, opt.scenarios[i], std::cref(opt)));
      }
      for (std::size_t k = 0; k < batch.size(); ++k) {
        results[base + k] = batch[k].get();
      }
    }
  }
  int code = exit_ok;
  for (const auto& r : results) {
    std::cout << r.text;
    code = std::max(code, r.code);
  }
  return code;
}

struct DciOptions {
  std::string format = "1_1";
  unsigned    bwp_start   = 0;
  unsigned    bwp_size    = 0;
  unsigned    mu          = 0;
  std::string rnti        = "0x4601";
  std::string ra          = "type1";
  unsigned    rbg_size    = 4;
  unsigned    granularity = 1;
  bool        interlaced  = false;
  unsigned    n_rbsets    = 1;
  // content
  int                   type = -1;
  unsigned              start  = 0;
  unsigned              length = 1;
  std::vector<unsigned> rbgs;
  std::vector<unsigned> interlaces;
  unsigned              tdra    = 0;
  unsigned              bwp_id  = 0;
  unsigned              mcs     = 0;
  bool                  interleaved = false;
  std::string           hex;
};

std::uint16_t parse_rnti_arg(const std::string& s)
{
  std::size_t used = 0;
  const auto  v    = std::stoul(s, &used, 0);
  if (used != s.size() || v > 0xFFFF) {
    throw usage_error("RNTI must be a 16-bit value");
  }
  return static_cast<std::uint16_t>(v);
}

DciConfig dci_config(const DciOptions& o, DciFormat f)
{
  DciConfig cfg;
  cfg.bwp.crb_start  = o.bwp_start;
  cfg.bwp.size_rb    = o.bwp_size;
  cfg.bwp.numerology = Numerology{o.mu};
  cfg.bwp.direction  = is_uplink(f) ? Direction::uplink : Direction::downlink;
  cfg.rbg_size       = o.rbg_size;
  if (o.ra == "type0") {
    cfg.resource_allocation = ResourceAllocationConfig::type0;
  } else if (o.ra == "type1") {
    cfg.resource_allocation = ResourceAllocationConfig::type1;
  } else if (o.ra == "dynamic") {
    cfg.resource_allocation = ResourceAllocationConfig::dynamic_switch;
  } else {
    throw usage_error("--ra must be type0, type1 or dynamic");
  }
  cfg.type1_granularity = o.granularity;
  cfg.interlaced        = o.interlaced;
  cfg.n_rbsets          = o.n_rbsets;
  if (o.bwp_size == 0) {
    throw usage_error("--bwp-size is required");
  }
  return cfg;
}

void print_content(const DciContent& c)
{
  std::cout << "format " << to_string(c.format) << "\n";
  if (const auto* t0 = std::get_if<Type0Assignment>(&c.frequency)) {
    std::cout << "frequency type0 rbgs";
    for (auto g : t0->rbgs) {
      std::cout << ' ' << g;
    }
    std::cout << "\n";
  } else if (const auto* t1 = std::get_if<Type1Assignment>(&c.frequency)) {
    std::cout << "frequency type1 start " << t1->start << " length " << t1->length << "\n";
  } else {
    const auto& t2 = std::get<Type2Assignment>(c.frequency);
    std::cout << "frequency type2 interlaces";
    for (auto m : t2.interlaces) {
      std::cout << ' ' << m;
    }
    std::cout << " rbsets " << t2.rbset_start << "+" << t2.rbset_count << "\n";
  }
  std::cout << "tdra " << c.tdra_index << "\nbwp_indicator " << c.bwp_indicator << "\nvrb_to_prb_interleaved "
            << c.vrb_to_prb_interleaved << "\nmcs " << c.mcs << "\n";
}

int dci_build(const DciOptions& o)
{
  const auto format = parse_dci_format(o.format);
  const auto cfg    = dci_config(o, format);
  DciContent c;
  c.format                 = format;
  c.tdra_index             = o.tdra;
  c.bwp_indicator          = o.bwp_id;
  c.mcs                    = o.mcs;
  c.vrb_to_prb_interleaved = o.interleaved;
  const int type = o.type >= 0 ? o.type : (cfg.resource_allocation == ResourceAllocationConfig::type0 ? 0 : 1);
  if (!o.interlaces.empty()) {
    c.frequency = Type2Assignment{o.interlaces, o.start, o.length};
  } else if (type == 0) {
    c.frequency = Type0Assignment{{o.rbgs.begin(), o.rbgs.end()}};
  } else {
    c.frequency = Type1Assignment{o.start, o.length};
  }
  const auto msg = build_dci(c, cfg, parse_rnti_arg(o.rnti));
  for (const auto& f : msg.fields) {
    std::cout << f.name << " " << f.bits.to_string() << "\n";
  }
  BitString crc;
  crc.append(msg.crc24, 24);
  std::cout << "crc " << crc.to_string() << "\n";
  std::cout << "hex " << msg.to_hex() << "\n";
  return exit_ok;
}

int dci_parse(const DciOptions& o)
{
  const auto format = parse_dci_format(o.format);
  const auto cfg    = dci_config(o, format);
  const auto res    = parse_dci(BitString::from_hex(o.hex), format, cfg, parse_rnti_arg(o.rnti));
  if (std::holds_alternative<NotAddressed>(res)) {
    std::cout << "not-addressed\n";
    return exit_ok;
  }
  print_content(std::get<DciContent>(res));
  return exit_ok;
}

void add_dci_config_options(CLI::App* cmd, DciOptions& o)
{
  cmd->add_option("--format", o.format, "DCI format (0_0, 0_1, 0_2, 1_0, 1_1, 1_2)")->capture_default_str();
  cmd->add_option("--bwp-start", o.bwp_start, "BWP first CRB");
  cmd->add_option("--bwp-size", o.bwp_size, "BWP size in RBs")->required();
  cmd->add_option("--mu", o.mu, "numerology");
  cmd->add_option("--rnti", o.rnti, "RNTI (decimal or 0x hex)")->capture_default_str();
  cmd->add_option("--ra", o.ra, "resource allocation: type0, type1 or dynamic")->capture_default_str();
  cmd->add_option("--rbg-size", o.rbg_size, "nominal RBG size for type 0");
  cmd->add_option("--granularity", o.granularity, "type 1 RBG granularity for formats 0_2/1_2");
  cmd->add_flag("--interlaced", o.interlaced, "uplink interlaced allocation (type 2)");
  cmd->add_option("--rbsets", o.n_rbsets, "RB sets in the BWP (type 2)");
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"NR virtual-to-physical resource mapping engine"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto*      run = app.add_subcommand("run", "run scenario file(s)");
  run->add_option("scenario", run_opt.scenarios, "scenario JSON file(s)")->required();
  run->add_option("--render", run_opt.render, "write the grid as text, csv or svg");
  run->add_option("--out", run_opt.out_dir, "output directory (default $NRMAP_OUT_DIR or .)");
  run->add_option("--policy", run_opt.policy, "mapping policy: default or bwp-first")->default_val("default");
  run->add_option("--seed", run_opt.seed, "seed for synthetic CQI");
  run->add_flag("--report", run_opt.write_report, "also write <scenario>.report.json");
  run->add_option("--jobs", run_opt.jobs, "run scenario files concurrently")->default_val(1U);

  auto* codec = app.add_subcommand("codec", "standalone codecs");
  codec->require_subcommand(1);

  unsigned start = 0, length = 1, n = 0, value = 0;
  auto*    riv = codec->add_subcommand("riv", "resource indication value");
  riv->require_subcommand(1);
  auto* riv_enc = riv->add_subcommand("encode", "start/length -> RIV");
  riv_enc->add_option("--start", start)->required();
  riv_enc->add_option("--length", length)->required();
  riv_enc->add_option("--n", n, "BWP size in allocation units")->required();
  auto* riv_dec = riv->add_subcommand("decode", "RIV -> start/length");
  riv_dec->add_option("--riv", value)->required();
  riv_dec->add_option("--n", n, "BWP size in allocation units")->required();

  auto* sliv = codec->add_subcommand("sliv", "start and length indicator value");
  sliv->require_subcommand(1);
  auto* sliv_enc = sliv->add_subcommand("encode", "start/length -> SLIV");
  sliv_enc->add_option("--start", start)->required();
  sliv_enc->add_option("--length", length)->required();
  auto* sliv_dec = sliv->add_subcommand("decode", "SLIV -> start/length");
  sliv_dec->add_option("--sliv", value)->required();

  DciOptions dci_opt;
  auto*      dci = codec->add_subcommand("dci", "DCI assembly and parsing");
  dci->require_subcommand(1);
  auto* dci_b = dci->add_subcommand("build", "assemble a DCI and print its fields and hex form");
  add_dci_config_options(dci_b, dci_opt);
  dci_b->add_option("--type", dci_opt.type, "allocation type 0 or 1");
  dci_b->add_option("--start", dci_opt.start, "type 1 start (type 2: first RB set)");
  dci_b->add_option("--length", dci_opt.length, "type 1 length (type 2: RB set count)");
  dci_b->add_option("--rbgs", dci_opt.rbgs, "type 0 RBG indices")->delimiter(',');
  dci_b->add_option("--interlaces", dci_opt.interlaces, "type 2 interlace indices")->delimiter(',');
  dci_b->add_option("--tdra", dci_opt.tdra, "time-domain row index 0..15");
  dci_b->add_option("--bwp-id", dci_opt.bwp_id, "BWP indicator 0..3");
  dci_b->add_option("--mcs", dci_opt.mcs, "MCS index");
  dci_b->add_flag("--interleaved", dci_opt.interleaved, "set the VRB-to-PRB mapping flag");
  auto* dci_p = dci->add_subcommand("parse", "parse a hex DCI for an RNTI");
  add_dci_config_options(dci_p, dci_opt);
  dci_p->add_option("--hex", dci_opt.hex, "<nbits>:<hex> as printed by build")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  try {
    if (run->parsed()) {
      return run_command(run_opt);
    }
    if (riv_enc->parsed()) {
      std::cout << riv_encode(start, length, n) << "\n";
    } else if (riv_dec->parsed()) {
      const auto g = riv_decode(value, n);
      std::cout << "start " << g.rb_start << " length " << g.l_rbs << "\n";
    } else if (sliv_enc->parsed()) {
      std::cout << sliv_encode(start, length) << "\n";
    } else if (sliv_dec->parsed()) {
      const auto s = sliv_decode(value);
      std::cout << "start " << s.start << " length " << s.length << "\n";
    } else if (dci_b->parsed()) {
      return dci_build(dci_opt);
    } else if (dci_p->parsed()) {
      return dci_parse(dci_opt);
    }
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }
  return exit_ok;
}
