#include "cstar/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "cstar/covering.hpp"
#include "cstar/errors.hpp"
#include "cstar/map.hpp"
#include "cstar/modulus.hpp"
#include "cstar/partition.hpp"
#include "cstar/programs.hpp"
#include "cstar/raster.hpp"
#include "cstar/realize.hpp"

namespace cstar::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kMapGrammar =
    "map grammar:\n"
    "  arnold(<alpha>, <beta>)                  z e^{i alpha} e^{beta (z - 1/z)/2}\n"
    "  n=<int>; g=<poly>; h=<poly>[; rot=<angle>]\n"
    "  <poly> is a sum of terms <coef>z^k (g) or <coef>w^k (h), k >= 1;\n"
    "  <coef> is a real number, (re,im), or omitted for 1.\n"
    "  example: n=0; g=1z; h=-1w   is exp(z - 1/z)\n";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) {
    throw UsageError(what + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_real(tok, what));
  return out;
}

std::optional<double> parse_auto(const std::string& text, const std::string& what) {
  if (trim(text) == "auto") return std::nullopt;
  return parse_real(text, what);
}

std::string num(double x) { return format_double(x); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + num(v[k]);
  return s;
}

// Outputs of one run plus the manifest that reproduces them.
class RunOutputs {
 public:
  RunOutputs(std::string subcommand, std::string dir) : subcommand_(std::move(subcommand)), dir_(std::move(dir)) {}

  void set(const std::string& key, const std::string& value) {
    for (auto& kv : config_) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    config_.emplace_back(key, value);
  }

  void write(const std::string& name, const std::string& bytes) {
    std::filesystem::create_directories(dir_);
    const auto path = std::filesystem::path(dir_) / name;
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
    files_.emplace_back(name, sha256_hex(bytes));
    std::cout << "wrote " << path.string() << "\n";
  }

  void finish() {
    std::string m = "# cstar run manifest\nsubcommand = " + subcommand_ + "\n";
    for (const auto& [k, v] : config_) m += k + " = " + v + "\n";
    for (const auto& [f, h] : files_) m += "sha256." + f + " = " + h + "\n";
    std::filesystem::create_directories(dir_);
    std::ofstream out(std::filesystem::path(dir_) / (subcommand_ + ".manifest"), std::ios::binary);
    out << m;
    if (!out) throw std::runtime_error("cannot write manifest");
  }

 private:
  std::string subcommand_;
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::vector<std::pair<std::string, std::string>> files_;
};

// Flat "key = value" lines; '#' starts a comment. Values fill options that
// were not given on the command line; a value for an option whose exclusive
// partner was given on the command line is ignored.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::set<std::string> seen;
  std::vector<CLI::Option*> from_file;
  std::set<const CLI::Option*> on_command_line;
  for (const CLI::Option* o : sub->get_options()) {
    if (o->count() > 0) on_command_line.insert(o);
  }
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') quoted = !quoted;
      if (line[k] == '#' && !quoted) {
        line.resize(k);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!seen.insert(key).second) throw UsageError(path + ": duplicate key '" + key + "'");
    if (key.rfind("sha256.", 0) == 0) continue;
    if (key == "subcommand") {
      if (value != sub->get_name()) throw UsageError(path + ": written for subcommand '" + value + "'");
      continue;
    }
    CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (on_command_line.count(opt)) continue;
    bool partner = false;
    for (CLI::Option* other : opt->get_excludes()) partner |= on_command_line.count(other) > 0;
    if (partner) continue;
    opt->add_result(value);
    opt->run_callback();
    from_file.push_back(opt);
  }
  for (CLI::Option* a : from_file) {
    for (CLI::Option* b : a->get_excludes()) {
      if (std::find(from_file.begin(), from_file.end(), b) != from_file.end()) {
        throw UsageError(path + ": '" + a->get_name(false, true) + "' and '" + b->get_name(false, true) +
                         "' cannot both be set");
      }
    }
  }
}

template <class F>
void parallel_for(int n, int threads, F&& body) {
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < n; k = next++) body(k);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min(threads, n); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

struct Common {
  std::string map;
  std::string config;
  std::string out_dir = ".";
  std::string threads;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--map", c.map, "map specification (see grammar)");
  sub->add_option("--config", c.config, "flat key = value file supplying defaults");
  sub->add_option("--out-dir", c.out_dir, "directory for outputs and the run manifest")->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads (fallback: CSTAR_THREADS)");
}

int resolve_threads(const Common& c) {
  std::string t = c.threads;
  if (t.empty()) {
    const char* env = std::getenv("CSTAR_THREADS");
    t = env ? env : "1";
  }
  const double v = parse_real(t, "threads");
  if (v < 1 || v > 1024 || v != std::floor(v)) throw UsageError("threads must be an integer in 1..1024");
  return static_cast<int>(v);
}

CStarMap load_map(const Common& c, RunOutputs& out) {
  if (c.map.empty()) throw UsageError("--map is required");
  CStarMap map = parse_map(c.map);
  out.set("map", c.map);
  return map;
}

json cert_json(const CoveringCertificate& c) {
  json j;
  j["from"] = c.from_index;
  j["to"] = c.to_index;
  j["length_check"] = {{"value", c.length_check.value}, {"delta", c.length_check.delta}, {"pass", c.length_check.pass}};
  j["z1"] = {{"L", c.z1.L}, {"theta", c.z1.theta}};
  j["z2"] = {{"L", c.z2.L}, {"theta", c.z2.theta}};
  j["log_f_z1"] = c.log_f_z1;
  j["log_f_z2"] = c.log_f_z2;
  j["straddle_pass"] = c.straddle_pass;
  j["doubling_pass"] = c.doubling_pass;
  j["pass"] = c.pass();
  if (c.oracle) {
    j["oracle"] = {{"targets_tested", c.oracle->targets_tested},
                   {"min_preimage_count", c.oracle->min_preimage_count},
                   {"inconclusive", c.oracle->inconclusive},
                   {"pass", c.oracle->pass()}};
  }
  return j;
}

json annulus_json(const CoveringAnnulus& a) {
  return {{"index", a.index}, {"core", a.core_log_r}, {"inner", a.inner_log_r}, {"outer", a.outer_log_r}};
}

struct ResolvedRadii {
  std::optional<double> plus, minus;  // explicit values
  Thresholds thresholds;
  bool scanned = false;
};

ResolvedRadii resolve_radii(const CStarMap& map, const std::string& plus, const std::string& minus) {
  ResolvedRadii r;
  r.plus = parse_auto(plus, "log-r-plus");
  r.minus = parse_auto(minus, "log-r-minus");
  if (!r.plus || !r.minus) {
    r.thresholds = find_thresholds(map, default_threshold_grid(map));
    r.scanned = true;
  }
  return r;
}

// ---------------------------------------------------------------- modulus

struct ModulusArgs {
  std::string log_r, radii, eps = "none", tol = "1e-10";
};

int cmd_modulus(const Common& c, const ModulusArgs& a) {
  RunOutputs out("modulus", c.out_dir);
  const CStarMap map = load_map(c, out);
  std::vector<double> ts;
  if (!a.log_r.empty()) {
    ts = parse_list(a.log_r, "log-r");
  } else if (!a.radii.empty()) {
    for (double r : parse_list(a.radii, "radii")) {
      if (!(r > 0.0)) throw UsageError("radii must be positive");
      ts.push_back(std::log(r));
    }
  } else {
    throw UsageError("one of --log-r or --radii is required");
  }
  const double tol = parse_real(a.tol, "tol");
  out.set("log-r", join(ts));
  out.set("tol", num(tol));
  std::string csv;
  if (trim(a.eps) != "none") {
    const double eps = parse_real(a.eps, "eps");
    out.set("eps", num(eps));
    csv = export_modulus_csv(map, ts, eps, tol);
  } else {
    csv = "log_r,log_M,theta_max,log_m,theta_min,n_probes\n";
    for (double t : ts) {
      const ModulusSample s = sample_modulus(map, t, tol);
      csv += num(t) + "," + num(s.log_M) + "," + num(s.theta_max) + "," + num(s.log_m) + "," + num(s.theta_min) +
             "," + std::to_string(s.n_probes) + "\n";
    }
  }
  out.write("modulus.csv", csv);
  out.finish();
  return 0;
}

// -------------------------------------------------------------- partition

struct PartitionArgs {
  std::string log_R_plus = "auto", log_R_minus = "auto", depth = "6";
};

int cmd_partition(const Common& c, const PartitionArgs& a) {
  RunOutputs out("partition", c.out_dir);
  const CStarMap map = load_map(c, out);
  const ResolvedRadii rr = resolve_radii(map, a.log_R_plus, a.log_R_minus);
  const double plus = rr.plus.value_or(rr.thresholds.log_R_plus);
  const double minus = rr.minus.value_or(rr.thresholds.log_R_minus);
  const int depth = static_cast<int>(parse_real(a.depth, "depth"));
  const AnnularPartition p = build_partition(map, plus, minus, depth);
  out.set("log-r-plus", num(plus));
  out.set("log-r-minus", num(minus));
  out.set("depth", std::to_string(depth));
  json j;
  j["map"] = format_map(map);
  j["log_R_plus"] = plus;
  j["log_R_minus"] = minus;
  if (rr.scanned) {
    j["thresholds"] = {{"log_R_f", rr.thresholds.log_R_f},
                       {"log_R_plus", rr.thresholds.log_R_plus},
                       {"log_R_minus", rr.thresholds.log_R_minus},
                       {"tested_min", rr.thresholds.tested_min},
                       {"tested_max", rr.thresholds.tested_max}};
  }
  j["upper"] = p.upper;
  j["lower"] = p.lower;
  j["truncation"] = {{"upper", to_string(p.upper_truncation)}, {"lower", to_string(p.lower_truncation)}};
  std::cout << "log_R_plus = " << num(plus) << ", log_R_minus = " << num(minus) << ", levels +" << p.depth_plus()
            << " / -" << p.depth_minus() << "\n";
  out.write("partition.json", j.dump(2) + "\n");
  out.finish();
  return 0;
}

// --------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string input, budget = "64", theta_escape = "50", depth = "8", log_R_plus = "auto", log_R_minus = "auto";
};

int cmd_classify(const Common& c, const ClassifyArgs& a) {
  RunOutputs out("classify", c.out_dir);
  const CStarMap map = load_map(c, out);
  if (a.input.empty()) throw UsageError("--input is required");
  std::ifstream in(a.input);
  if (!in) throw UsageError("cannot read '" + a.input + "'");
  std::string line;
  std::vector<LogPoint> seeds;
  int col_L = -1, col_t = -1;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cells.push_back(trim(tok));
    if (col_L < 0) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k] == "L") col_L = static_cast<int>(k);
        if (cells[k] == "theta") col_t = static_cast<int>(k);
      }
      if (col_L < 0 || col_t < 0) throw UsageError(a.input + ": header must name columns L and theta");
      continue;
    }
    if (static_cast<int>(cells.size()) <= std::max(col_L, col_t)) {
      throw UsageError(a.input + ":" + std::to_string(lineno) + ": missing column");
    }
    seeds.emplace_back(parse_real(cells[col_L], "L"), parse_real(cells[col_t], "theta"));
  }

  ClassifyOptions opt;
  opt.budget = static_cast<int>(parse_real(a.budget, "budget"));
  opt.theta_escape = parse_real(a.theta_escape, "theta-escape");
  const ResolvedRadii rr = resolve_radii(map, a.log_R_plus, a.log_R_minus);
  const double plus = rr.plus.value_or(rr.thresholds.log_R_plus);
  const double minus = rr.minus.value_or(rr.thresholds.log_R_minus);
  const int depth = static_cast<int>(parse_real(a.depth, "depth"));
  const AnnularPartition p = build_partition(map, plus, minus, depth);
  const int threads = resolve_threads(c);
  out.set("input", a.input);
  out.set("budget", std::to_string(opt.budget));
  out.set("theta-escape", num(opt.theta_escape));
  out.set("log-r-plus", num(plus));
  out.set("log-r-minus", num(minus));
  out.set("depth", std::to_string(depth));
  out.set("threads", std::to_string(threads));

  std::vector<std::string> rows(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), threads, [&](int k) {
    const OrbitRecord rec = classify_orbit(map, seeds[k], opt, &p);
    std::string ann;
    for (std::size_t i = 0; i < rec.annular_indices.size(); ++i) ann += (i ? ";" : "") + std::to_string(rec.annular_indices[i]);
    rows[k] = num(seeds[k].L) + "," + num(seeds[k].theta) + "," + to_string(rec.verdict) + "," +
              std::to_string(rec.checked_depth()) + "," + symbols_to_string(rec.essential_symbols) + "," + ann + "\n";
  });
  std::string csv = "L,theta,verdict,checked_depth,essential_prefix,annular_prefix\n";
  for (const auto& r : rows) csv += r;
  out.write("classify.csv", csv);
  out.finish();
  return 0;
}

// -------------------------------------------------------------- construct

struct ConstructArgs {
  std::string itinerary, eps, delta, depth = "4", grid = "16", margin = "0.1", tol = "1e-13",
                                     oracle_targets = "16", seed = std::to_string(kDefaultSeed),
                                     log_R_plus = "auto", log_R_minus = "auto", log_R0 = "auto",
                                     max_cells = "400000";
};

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const std::string t = trim(s);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) throw UsageError("seed must be an unsigned integer");
  return v;
}

int cmd_construct(const Common& c, const ConstructArgs& a) {
  RunOutputs out("construct", c.out_dir);
  const CStarMap map = load_map(c, out);
  if (a.itinerary.empty()) throw UsageError("--itinerary is required");
  double delta = kDefaultDelta, eps;
  if (!a.eps.empty()) {
    eps = parse_real(a.eps, "eps");
  } else {
    if (!a.delta.empty()) delta = parse_real(a.delta, "delta");
    eps = choose_eps(delta);
  }
  const int depth = static_cast<int>(parse_real(a.depth, "depth"));
  if (depth < 0) throw UsageError("depth must be non-negative");
  RealizeOptions ro;
  ro.grid = static_cast<int>(parse_real(a.grid, "grid"));
  ro.margin = parse_real(a.margin, "margin");
  ro.tol = parse_real(a.tol, "tol");
  ro.max_cells = static_cast<long>(parse_real(a.max_cells, "max-cells"));
  const int targets = static_cast<int>(parse_real(a.oracle_targets, "oracle-targets"));
  const std::uint64_t seed = parse_seed(a.seed);
  const ProgramSpec spec = parse_program(a.itinerary);

  out.set("itinerary", a.itinerary);
  if (!a.eps.empty()) {
    out.set("eps", num(eps));
  } else {
    out.set("delta", num(delta));
  }
  out.set("depth", std::to_string(depth));
  out.set("grid", std::to_string(ro.grid));
  out.set("margin", num(ro.margin));
  out.set("tol", num(ro.tol));
  out.set("max-cells", std::to_string(ro.max_cells));
  out.set("oracle-targets", std::to_string(targets));
  out.set("seed", std::to_string(seed));

  json j;
  j["map"] = format_map(map);
  j["eps"] = eps;
  j["delta"] = delta;
  std::vector<int> path;
  std::vector<CoveringAnnulus> annuli;
  bool horizon_cut = false;

  if (!spec.essential.empty()) {
    const EssentialItinerary e = EssentialItinerary::parse(spec.essential);
    const auto r0 = parse_auto(a.log_R0, "log-r0");
    const MixedAnnuli mixed = [&] {
      if (r0) return mixed_fast_annuli(map, e, eps, *r0, depth);
      const Thresholds th = find_thresholds(map, default_threshold_grid(map));
      const double start = e.at(0) == Symbol::infinity ? th.log_R_plus : -th.log_R_minus;
      return scan_mixed_annuli(map, e, eps, depth, start);
    }();
    out.set("log-r0", num(mixed.log_R0));
    j["essential_itinerary"] = e.to_string();
    j["log_R0"] = mixed.log_R0;
    json steps = json::array();
    for (const MixedStep& s : mixed.steps) {
      steps.push_back({{"n", s.n}, {"symbol", std::string(1, symbol_char(s.symbol))}, {"log_R", s.log_R},
                       {"bound", s.bound}, {"inequality_pass", s.inequality_pass}, {"contained", s.contained}});
    }
    j["mixed_steps"] = steps;
    j["annuli"] = json::array();
    for (const auto& an : mixed.annuli) j["annuli"].push_back(annulus_json(an));
    annuli = mixed.annuli;
    for (const auto& an : mixed.annuli) path.push_back(an.index);
  } else {
    // The covering table is built for every index the program touches. When
    // an index lies beyond the horizon the itinerary is cut before it.
    std::vector<int> needed;
    std::vector<int> cut;
    if (spec.kind == ProgramKind::slow) {
      for (long long n = 1; n <= spec.numbers.at(0); ++n) needed.push_back(static_cast<int>(n));
    } else {
      const AnnularItinerary it = build_program(spec, map, CoveringAnnuli{});
      for (int v : it.prefix) needed.push_back(v);
      for (int v : it.cycle) needed.push_back(v);
      cut = it.take(static_cast<std::size_t>(depth) + 1);
    }
    const ResolvedRadii rr = resolve_radii(map, a.log_R_plus, a.log_R_minus);
    CoveringSetup setup;
    for (;;) {
      try {
        setup = select_covering(map, eps, needed, rr.plus, rr.minus, rr.thresholds.log_R_plus,
                                rr.thresholds.log_R_minus);
        break;
      } catch (const HorizonExceeded&) {
        if (spec.kind == ProgramKind::slow) {
          if (needed.size() <= 1) throw;
          needed.pop_back();
        } else {
          if (cut.size() <= 1) throw;
          cut.pop_back();
          needed = cut;
          horizon_cut = true;
        }
      }
    }
    out.set("log-r-plus", num(setup.log_R_plus));
    out.set("log-r-minus", num(setup.log_R_minus));
    j["log_R_plus"] = setup.log_R_plus;
    j["log_R_minus"] = setup.log_R_minus;
    const AnnularItinerary program = build_program(spec, map, setup.annuli);
    for (int v : horizon_cut ? cut : program.prefix) {
      if (!setup.annuli.find(v)) throw Unrealizable("B_" + std::to_string(v) + " is not available");
    }
    const CoverageTable table = coverage_table(map, setup.annuli, delta);
    validate_program(horizon_cut ? custom_program(cut) : program, table);
    j["program"] = {{"kind", to_string(program.kind)}, {"sequence", program.to_string()},
                    {"truncated", program.truncated}};
    if (!program.dwell.empty()) {
      json dw = json::array();
      for (const Dwell& d : program.dwell) {
        json x = {{"index", d.index}, {"threshold", d.threshold}, {"count_approx", d.count_approx},
                  {"emitted", d.emitted}};
        x["count"] = d.count ? json(*d.count) : json(nullptr);
        x["leave_at"] = d.leave_at ? json(*d.leave_at) : json(nullptr);
        dw.push_back(x);
      }
      j["program"]["dwell"] = dw;
    }
    j["annuli"] = json::array();
    for (const auto& an : setup.annuli.annuli) j["annuli"].push_back(annulus_json(an));
    annuli = setup.annuli.annuli;
    path = horizon_cut ? cut : program.take(static_cast<std::size_t>(depth) + 1);
    j["program"]["horizon_cut"] = horizon_cut;
  }

  const ConstructResult res = construct_orbit(map, annuli, path, delta, targets, seed, ro);
  const RealizedOrbit& orbit = res.orbit;
  j["itinerary"] = orbit.itinerary;
  j["point"] = {{"L", orbit.point.L}, {"theta", orbit.point.theta}};
  j["verified_depth"] = orbit.verified_depth;
  j["truncated"] = orbit.truncated || horizon_cut;
  json o = json::array();
  for (std::size_t k = 0; k < orbit.check.orbit.size(); ++k) {
    o.push_back({{"L", orbit.check.orbit[k].L},
                 {"theta", orbit.check.orbit[k].theta},
                 {"symbol", std::string(1, symbol_char(symbol_of(orbit.check.orbit[k].L)))},
                 {"band_depth", orbit.check.band_depth[k]}});
  }
  j["orbit"] = o;
  j["cells_examined"] = orbit.cells_examined;
  j["certificates"] = json::array();
  for (const auto& cert : res.certificates) j["certificates"].push_back(cert_json(cert));
  std::cout << "point L = " << num(orbit.point.L) << ", theta = " << num(orbit.point.theta)
            << ", verified depth " << orbit.verified_depth << "\n";
  out.write("construct.json", j.dump(2) + "\n");
  out.finish();
  return 0;
}

// ----------------------------------------------------------------- render

struct RenderArgs {
  std::string L_min = "-6", L_max = "6", theta_min = num(-kPi), theta_max = num(kPi), width = "256",
              height = "256", budget = "64", palette = "0", prefix_length = "6", theta_escape = "50",
              pixel_cap = std::to_string(kDefaultPixelCap), probe = "escapes_to_infinity";
};

int cmd_render(const Common& c, const RenderArgs& a) {
  RunOutputs out("render", c.out_dir);
  const CStarMap map = load_map(c, out);
  RenderWindow w;
  w.L_min = parse_real(a.L_min, "l-min");
  w.L_max = parse_real(a.L_max, "l-max");
  w.theta_min = parse_real(a.theta_min, "theta-min");
  w.theta_max = parse_real(a.theta_max, "theta-max");
  w.width = static_cast<int>(parse_real(a.width, "width"));
  w.height = static_cast<int>(parse_real(a.height, "height"));
  w.budget = static_cast<int>(parse_real(a.budget, "budget"));
  w.palette_id = static_cast<int>(parse_real(a.palette, "palette"));
  RenderOptions ro;
  ro.prefix_length = static_cast<int>(parse_real(a.prefix_length, "prefix-length"));
  ro.theta_escape = parse_real(a.theta_escape, "theta-escape");
  ro.pixel_cap = static_cast<long long>(parse_real(a.pixel_cap, "pixel-cap"));
  ro.threads = resolve_threads(c);
  std::optional<Verdict> probe;
  if (trim(a.probe) != "none") probe = verdict_from_string(trim(a.probe));

  out.set("l-min", num(w.L_min));
  out.set("l-max", num(w.L_max));
  out.set("theta-min", num(w.theta_min));
  out.set("theta-max", num(w.theta_max));
  out.set("width", std::to_string(w.width));
  out.set("height", std::to_string(w.height));
  out.set("budget", std::to_string(w.budget));
  out.set("palette", std::to_string(w.palette_id));
  out.set("prefix-length", std::to_string(ro.prefix_length));
  out.set("theta-escape", num(ro.theta_escape));
  out.set("pixel-cap", std::to_string(ro.pixel_cap));
  out.set("probe", probe ? to_string(*probe) : "none");
  out.set("threads", std::to_string(ro.threads));

  const ClassGrid grid = render_classification(map, w, ro);
  out.write("render.ppm", encode_ppm(grid));
  out.write("legend.csv", legend_csv(grid));
  if (probe) {
    const ComponentReport rep = component_probe(grid, [&](const LegendEntry& e) { return e.verdict == *probe; });
    json j;
    j["map"] = format_map(map);
    j["filter"] = to_string(*probe);
    j["heuristic"] = true;
    j["components"] = rep.components.size();
    j["touching_L_max"] = rep.touching_L_max();
    j["touching_L_min"] = rep.touching_L_min();
    j["touching_both"] = rep.touching_both();
    json list = json::array();
    for (const Component& comp : rep.components) {
      list.push_back({{"pixels", comp.pixels}, {"first_row", comp.first_row}, {"first_col", comp.first_col},
                      {"touches_L_min", comp.touches_L_min}, {"touches_L_max", comp.touches_L_max}});
    }
    j["component_list"] = list;
    std::cout << rep.components.size() << " " << to_string(*probe) << " components, " << rep.touching_L_max()
              << " touching L_max\n";
    out.write("components.json", j.dump(2) + "\n");
  }
  out.finish();
  return 0;
}

// ---------------------------------------------------------- verify-lemmas

struct VerifyArgs {
  std::string radii = "2,4,8", k = "1.5,2,3", eps_grid, relaxed_eps = "0.1", relaxed_log_r = "none",
              relaxed_depth = "6", tol = "1e-9";
};

int cmd_verify(const Common& c, const VerifyArgs& a) {
  RunOutputs out("verify-lemmas", c.out_dir);
  const CStarMap map = load_map(c, out);
  const auto radii = parse_list(a.radii, "radii");
  const auto ks = parse_list(a.k, "k");
  const auto eps_grid = parse_list(a.eps_grid, "eps-grid");
  const double tol = parse_real(a.tol, "tol");
  out.set("radii", join(radii));
  out.set("k", join(ks));
  out.set("eps-grid", join(eps_grid));
  out.set("tol", num(tol));
  const GrowthReport rep = verify_growth_properties(map, radii, ks, eps_grid, tol);
  json j;
  j["map"] = format_map(map);
  j["log_R_f"] = rep.log_R_f ? json(*rep.log_R_f) : json(nullptr);
  json checks = json::array();
  for (const PropertyCheck& pc : rep.checks) {
    checks.push_back({{"name", pc.name}, {"status", to_string(pc.status)}, {"worst_margin", pc.worst_margin},
                      {"samples", pc.samples}, {"detail", pc.detail}});
    std::cout << pc.name << ": " << to_string(pc.status) << " (worst margin " << num(pc.worst_margin) << ", "
              << pc.samples << " samples)\n";
  }
  j["checks"] = checks;
  bool ok = rep.passed();
  if (trim(a.relaxed_log_r) != "none") {
    const double eps = parse_real(a.relaxed_eps, "relaxed-eps");
    const double t = parse_real(a.relaxed_log_r, "relaxed-log-r");
    const int depth = static_cast<int>(parse_real(a.relaxed_depth, "relaxed-depth"));
    out.set("relaxed-eps", num(eps));
    out.set("relaxed-log-r", num(t));
    out.set("relaxed-depth", std::to_string(depth));
    const RelaxedIterateReport rr = verify_relaxed_iterates(map, eps, t, depth);
    auto steps = [](const std::vector<RelaxedIterateStep>& v) {
      json s = json::array();
      for (const auto& x : v) s.push_back({{"n", x.n}, {"lhs", x.lhs}, {"rhs", x.rhs}, {"pass", x.pass}});
      return s;
    };
    j["relaxed_iterates"] = {{"eps", eps},
                             {"log_r", t},
                             {"verdict", rr.verdict},
                             {"truncated", rr.truncated},
                             {"checked_depth", rr.checked_depth},
                             {"upper", steps(rr.upper)},
                             {"lower", steps(rr.lower)}};
    std::cout << "relaxed_iterates: " << (rr.verdict ? "pass" : "fail") << " (checked depth " << rr.checked_depth
              << (rr.truncated ? ", truncated at the horizon" : "") << ")\n";
    ok = ok && rr.verdict;
  }
  j["passed"] = ok;
  out.write("verify-lemmas.json", j.dump(2) + "\n");
  out.finish();
  if (!ok) throw VerificationFailed("a growth property check failed");
  return 0;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int k = 0; k < len; ++k) {
    s += hex[md[k] >> 4];
    s += hex[md[k] & 15];
  }
  return s;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Escaping-set explorer for transcendental self-maps of the punctured plane"};
  app.name(args.empty() ? "cstar" : args[0]);
  app.require_subcommand(1);
  app.footer(kMapGrammar);

  Common common;
  ModulusArgs mod;
  PartitionArgs part;
  ClassifyArgs cls;
  ConstructArgs con;
  RenderArgs ren;
  VerifyArgs ver;

  auto* s_mod = app.add_subcommand("modulus", "max/min modulus table (CSV)");
  add_common(s_mod, common);
  auto* o_logr = s_mod->add_option("--log-r", mod.log_r, "comma list of log-radii");
  auto* o_radii = s_mod->add_option("--radii", mod.radii, "comma list of radii");
  o_logr->excludes(o_radii);
  s_mod->add_option("--eps", mod.eps, "add log mu and log nu columns for this eps")->capture_default_str();
  s_mod->add_option("--tol", mod.tol)->capture_default_str();

  auto* s_part = app.add_subcommand("partition", "annular partition boundaries (JSON)");
  add_common(s_part, common);
  s_part->add_option("--log-r-plus", part.log_R_plus, "log R+ or auto")->capture_default_str();
  s_part->add_option("--log-r-minus", part.log_R_minus, "log R- or auto")->capture_default_str();
  s_part->add_option("--depth", part.depth)->capture_default_str();

  auto* s_cls = app.add_subcommand("classify", "classify seed orbits from a CSV of L,theta");
  add_common(s_cls, common);
  s_cls->add_option("--input", cls.input, "CSV with columns L, theta");
  s_cls->add_option("--budget", cls.budget)->capture_default_str();
  s_cls->add_option("--theta-escape", cls.theta_escape)->capture_default_str();
  s_cls->add_option("--depth", cls.depth, "partition depth for annular indices")->capture_default_str();
  s_cls->add_option("--log-r-plus", cls.log_R_plus)->capture_default_str();
  s_cls->add_option("--log-r-minus", cls.log_R_minus)->capture_default_str();

  auto* s_con = app.add_subcommand("construct", "realize a point with a prescribed itinerary (JSON)");
  add_common(s_con, common);
  s_con->add_option("--itinerary", con.itinerary,
                    "comma list of annulus indices, or fast:<s>,<n> periodic:<w..> bounded:<a>,<n>[,<bits>] "
                    "unbounded:<base>,<n> slow:<levels>,<cap> essential:<e>");
  auto* o_eps = s_con->add_option("--eps", con.eps, "annulus half-width parameter");
  auto* o_delta = s_con->add_option("--delta", con.delta, "hyperbolic length bound (default 2 pi^2)");
  o_eps->excludes(o_delta);
  s_con->add_option("--depth", con.depth, "number of transitions to realize")->capture_default_str();
  s_con->add_option("--grid", con.grid)->capture_default_str();
  s_con->add_option("--margin", con.margin)->capture_default_str();
  s_con->add_option("--tol", con.tol)->capture_default_str();
  s_con->add_option("--max-cells", con.max_cells)->capture_default_str();
  s_con->add_option("--oracle-targets", con.oracle_targets)->capture_default_str();
  s_con->add_option("--seed", con.seed)->capture_default_str();
  s_con->add_option("--log-r-plus", con.log_R_plus)->capture_default_str();
  s_con->add_option("--log-r-minus", con.log_R_minus)->capture_default_str();
  s_con->add_option("--log-r0", con.log_R0, "start radius for essential itineraries")->capture_default_str();

  auto* s_ren = app.add_subcommand("render", "classification image over a log-polar window (PPM)");
  add_common(s_ren, common);
  s_ren->add_option("--l-min", ren.L_min)->capture_default_str();
  s_ren->add_option("--l-max", ren.L_max)->capture_default_str();
  s_ren->add_option("--theta-min", ren.theta_min)->capture_default_str();
  s_ren->add_option("--theta-max", ren.theta_max)->capture_default_str();
  s_ren->add_option("--width", ren.width)->capture_default_str();
  s_ren->add_option("--height", ren.height)->capture_default_str();
  s_ren->add_option("--budget", ren.budget)->capture_default_str();
  s_ren->add_option("--palette", ren.palette)->capture_default_str();
  s_ren->add_option("--prefix-length", ren.prefix_length)->capture_default_str();
  s_ren->add_option("--theta-escape", ren.theta_escape)->capture_default_str();
  s_ren->add_option("--pixel-cap", ren.pixel_cap)->capture_default_str();
  s_ren->add_option("--probe", ren.probe, "verdict for the component probe, or none")->capture_default_str();

  auto* s_ver = app.add_subcommand("verify-lemmas", "growth properties of M and m (JSON)");
  add_common(s_ver, common);
  s_ver->add_option("--radii", ver.radii, "comma list of radii")->capture_default_str();
  s_ver->add_option("--k", ver.k, "comma list of exponents")->capture_default_str();
  s_ver->add_option("--eps-grid", ver.eps_grid, "comma list of eps for the relaxed dominance check");
  s_ver->add_option("--relaxed-eps", ver.relaxed_eps)->capture_default_str();
  s_ver->add_option("--relaxed-log-r", ver.relaxed_log_r, "log r for the relaxed iterate check, or none")
      ->capture_default_str();
  s_ver->add_option("--relaxed-depth", ver.relaxed_depth)->capture_default_str();
  s_ver->add_option("--tol", ver.tol)->capture_default_str();

  auto usage = [&](const std::string& msg) {
    if (!msg.empty()) std::cerr << "error: " << msg << "\n";
    std::cerr << app.help();
    return 1;
  };

  if (args.size() <= 1) return usage("a subcommand is required");
  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!common.config.empty()) apply_config(sub, common.config);
    const std::string name = sub->get_name();
    if (name == "modulus") return cmd_modulus(common, mod);
    if (name == "partition") return cmd_partition(common, part);
    if (name == "classify") return cmd_classify(common, cls);
    if (name == "construct") return cmd_construct(common, con);
    if (name == "render") return cmd_render(common, ren);
    return cmd_verify(common, ver);
  } catch (const UsageError& e) {
    return usage(e.what());
  } catch (const CLI::ParseError& e) {
    return usage(e.what());
  } catch (const ParseError& e) {
    return usage(e.what());
  } catch (const InvalidParameter& e) {
    return usage(e.what());
  } catch (const PixelCapExceeded& e) {
    return usage(e.what());
  } catch (const NoCellSurvives& e) {
    std::cerr << "construction failed: " << e.what() << "\n";
    return 2;
  } catch (const Unrealizable& e) {
    std::cerr << "construction failed: " << e.what() << "\n";
    return 2;
  } catch (const ChainViolation& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 3;
  } catch (const InequalityViolation& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 3;
  } catch (const VerificationFailed& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 3;
  } catch (const OracleInconclusive& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 3;
  } catch (const HorizonExceeded& e) {
    std::cerr << "horizon: " << e.what() << "\n";
    return 4;
  } catch (const NonFinite& e) {
    std::cerr << "horizon: " << e.what() << "\n";
    return 4;
  } catch (const ThresholdNotFound& e) {
    std::cerr << "threshold: " << e.what() << "\n";
    return 4;
  } catch (const NotExpanding& e) {
    std::cerr << "threshold: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace cstar::cli
