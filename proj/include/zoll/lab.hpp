#pragma once

// The zoll_lab command line: subcommands, settings schemas, output layout.
//
//   zoll_lab <subcommand> [--config FILE] [--out DIR] [--seed N] [--threads N]
//                         [--tag TAG] [--p P] [--Ns LIST] [--set KEY=VALUE]...
//
// Every subcommand writes <out>/<report>.csv and .json per report plus
// <out>/<subcommand>.manifest.json. Exit status: 0 when every check passes,
// 2 when a check fails, 1 on any error. The output directory defaults to
// $ZOLL_OUT, then "zoll_out".

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zoll/config.hpp"
#include "zoll/report.hpp"
#include "zoll/runs/estimate_runs.hpp"
#include "zoll/runs/solver_runs.hpp"
#include "zoll/runs/sum_runs.hpp"
#include "zoll/runs/variation_runs.hpp"
#include "zoll/trajectory_io.hpp"

namespace zoll::lab {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate", "picard", "lipschitz", "expsum", "circle",
                                              "strichartz", "trilinear", "decay", "vnorm", "report"};
  return names;
}

/// Tags the default suite is expected to emit.
inline const std::vector<std::string>& suite_tags() {
  static const std::vector<std::string> tags{
      "eq:l2",      "eq:e",          "eq:int-nls",   "eq:duhamel",   "eq:six-est",     "thm:main-tech",
      "eq:lp",      "app:divisor",   "eq:l4",        "eq:lem318-alt", "eq:outsidemj",  "eq:distr",
      "eq:str",     "eq:str-up",     "eq:tri-sogge", "eq:lin-tri-str", "eq:crude",     "eq:tri-str-u2",
      "eq:spec",    "eq:spec-sp",    "eq:decay",     "def:uv",       "lem:mod_sp"};
  return tags;
}

namespace detail {

using P = ParamType;

inline std::vector<ParamSpec> solver_schema(const std::string& K, const std::string& h1) {
  return {{"K", P::integer, K, "degree cutoff"},
          {"dt", P::real, "1e-3", "time step"},
          {"T", P::real, "1", "horizon"},
          {"sign", P::integer, "1", "+1 defocusing, -1 focusing"},
          {"truncate", P::boolean, "true", "dealiased nonlinear step"},
          {"h1", P::real, h1, "H^1 norm of the initial data"},
          {"margin", P::real, "1.2", "spectral margin of the data below K"}};
}

inline std::vector<ParamSpec> schema_for(const std::string& cmd) {
  std::vector<ParamSpec> s;
  if (cmd == "simulate") {
    s = solver_schema("64", "0.1");
    s.insert(s.end(), {{"store_every", P::integer, "100", "steps between stored frames"},
                       {"max_mass_drift", P::real, "1e-6", "abort threshold"},
                       {"mass_tol", P::real, "1e-10", "relative mass drift limit"},
                       {"energy_tol", P::real, "1e-5", "relative energy drift limit"},
                       {"order_check", P::boolean, "false", "also run at dt/2 and judge the drift ratio"},
                       {"order_low", P::real, "3", "lower limit of the drift ratio"},
                       {"order_high", P::real, "5", "upper limit of the drift ratio"},
                       {"save_trajectory", P::boolean, "true", "write trajectory.ztr and its sidecar"},
                       {"resume_from", P::text, "", "trajectory stem to resume"},
                       {"resume_frame", P::integer, "-1", "frame to resume from (-1 = last)"}});
  } else if (cmd == "picard") {
    s = solver_schema("64", "0.05");
    s.insert(s.end(), {{"iterations", P::integer, "6", "Picard iterations"},
                       {"checked_ratios", P::integer, "5", "ratios that must stay below ratio_limit"},
                       {"ratio_limit", P::real, "0.5", "contraction limit"},
                       {"y1", P::boolean, "true", "report Y^1 distances"},
                       {"compare", P::boolean, "true", "compare the limit with the split-step solution"},
                       {"agreement_tol", P::real, "1e-6", "sup-H^1 agreement limit"}});
  } else if (cmd == "lipschitz") {
    s = solver_schema("64", "0.1");
    s.insert(s.end(), {{"pairs", P::integer, "20", "random data pairs"},
                       {"ratio_limit", P::real, "2", "Lipschitz ratio limit"}});
  } else if (cmd == "expsum") {
    s = {{"p", P::integer, "6", "even exponent"},
         {"Ns", P::int_list, "8,16,...,512", "window lengths"},
         {"families", P::text_list, "constant,random_phase,gaussian", "coefficient families"},
         {"bs", P::int_list, "0,1000,1000000", "window starts"},
         {"trials", P::integer, "1", "trials per random family and b"},
         {"alpha", P::integer, "0", "frequency shift"},
         {"slack", P::real, "0.1", "allowed excess over the predicted exponent"}};
  } else if (cmd == "circle") {
    s = {{"k_max", P::integer, "10000", "divisor check range"},
         {"l4_Ns", P::int_list, "8,16,...,512", ""},
         {"l4_families", P::text_list, "constant,random_phase,gaussian", ""},
         {"l4_bs", P::int_list, "0,1000,1000000", ""},
         {"l4_trials", P::integer, "1", ""},
         {"l4_slope_limit", P::real, "0.1", ""},
         {"major_Ns", P::int_list, "16,32,...,256", ""},
         {"major_bs", P::int_list, "0,37", ""},
         {"q_max", P::integer, "32", ""},
         {"offsets", P::real_list, "0,0.1,-0.3,0.5,0.9,-0.99", "t - a/q in units of 1/(qN)"},
         {"major_slope_limit", P::real, "0.1", ""},
         {"minor_Ns", P::int_list, "16,32,...,128", ""},
         {"minor_bs", P::int_list, "0,1,37", ""},
         {"nu", P::real, "0.5", "major-arc exponent"},
         {"minor_grid_factor", P::integer, "16", ""},
         {"level_Ns", P::int_list, "16,32,...,128", ""},
         {"level_count", P::integer, "9", ""},
         {"level_grid_factor", P::integer, "64", ""},
         {"mc_samples", P::integer, "100000", ""},
         {"level_exponent", P::real, "0.05", ""}};
  } else if (cmd == "strichartz") {
    s = {{"p", P::real, "6", "space-time exponent (> 4)"},
         {"Ns", P::int_list, "4,8,...,256", "dyadic blocks"},
         {"trials", P::integer, "32", "random data per block"},
         {"real_data", P::boolean, "true", "real Gaussian coefficients"},
         {"flow", P::text, "laplacian", "laplacian or modified"},
         {"slack", P::real, "0.1", "allowed excess over the predicted exponent"},
         {"atom_Ns", P::int_list, "4,8,...,64", "blocks for the atom sweep"},
         {"atom_pieces", P::integer, "4", ""},
         {"atom_trials", P::integer, "4", ""}};
  } else if (cmd == "trilinear") {
    s = {{"n1s", P::int_list, "8,16,...,128", "cluster sweep"},
         {"eps", P::real, "0.1", ""},
         {"slope_limit", P::real, "0.05", ""},
         {"block_Ns", P::int_list, "1,2,...,16", "dyadic blocks for the block estimates"},
         {"delta", P::real, "0.25", ""},
         {"eta", P::real, "0.1", ""},
         {"trials", P::integer, "4", ""},
         {"flow", P::text, "modified", ""},
         {"tau", P::real, "1", ""},
         {"crude_trials", P::integer, "4", ""},
         {"phase_degree_max", P::integer, "64", ""},
         {"phase_tol", P::real, "1e-12", ""},
         {"scan_pairs", P::text_list, "16:4,32:8,64:8", "N1:N2 block pairs"},
         {"scan_T", P::real, "1", ""},
         {"scan_min_sep", P::integer, "10", ""},
         {"spectrum_degree_max", P::integer, "256", ""}};
  } else if (cmd == "decay") {
    s = {{"n0_max", P::integer, "20", ""}, {"tol", P::real, "1e-12", ""}};
  } else if (cmd == "vnorm") {
    s = {{"paths", P::integer, "200", ""},
         {"max_pieces", P::integer, "12", ""},
         {"cutoff", P::integer, "3", ""},
         {"ps", P::real_list, "1,1.5,2,3,4,6", ""},
         {"dp_tol", P::real, "0", "allowed relative difference to the exhaustive search"},
         {"atoms", P::integer, "50", ""},
         {"bracket_tol", P::real, "1e-14", ""},
         {"phase_degree_max", P::integer, "256", ""},
         {"phase_times", P::integer, "100", ""},
         {"phase_tol", P::real, "1e-14", ""}};
  } else if (cmd == "report") {
    s = {{"input", P::text, "", "directory to scan (default: the output directory)"},
         {"require_tags", P::text_list, "", "tags that must appear (default: the suite tags)"}};
  } else {
    throw ConfigError("unknown subcommand '" + cmd + "'");
  }
  return s;
}

inline std::vector<ParamSpec> general_schema() {
  return {{"seed", P::integer, "1", "master seed"}, {"threads", P::integer, "1", "worker threads"}};
}

inline SolverConfig solver_config(const ParamSet& p, std::uint64_t seed) {
  SolverConfig c;
  c.K = p.integer("K");
  c.dt = p.real("dt");
  c.T = p.real("T");
  c.sign = static_cast<int>(p.integer("sign"));
  c.truncate = p.boolean("truncate");
  c.seed = seed;
  c.validate();
  return c;
}

inline std::vector<CoeffFamily> families(const std::vector<std::string>& names) {
  std::vector<CoeffFamily> out;
  for (const auto& n : names) out.push_back(coeff_family_from_string(n));
  return out;
}

/// A report producer and the tags it emits.
struct Part {
  std::vector<std::string> tags;
  std::function<std::vector<Report>()> run;
};

struct Outcome {
  std::vector<Report> reports;
  std::vector<std::filesystem::path> extra_outputs;
};

inline int positive_int(const ParamSet& p, const std::string& key) {
  const auto v = p.integer(key);
  if (v < 1 || v > 1'000'000'000) throw ConfigError(p.where(key) + ": '" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

inline std::vector<Part> parts_for(const std::string& cmd, const ParamSet& p, std::uint64_t seed, unsigned threads,
                                   const std::filesystem::path& out, Outcome& outcome) {
  std::vector<Part> parts;
  if (cmd == "simulate") {
    parts.push_back({{"eq:l2", "eq:e"}, [&p, seed, out, &outcome] {
                       SimulateSettings s;
                       s.cfg = solver_config(p, seed);
                       s.cfg.store_every = positive_int(p, "store_every");
                       s.cfg.max_mass_drift = p.real("max_mass_drift");
                       s.h1 = p.real("h1");
                       s.margin = p.real("margin");
                       s.mass_tol = p.real("mass_tol");
                       s.energy_tol = p.real("energy_tol");
                       s.order_check = p.boolean("order_check");
                       s.order_low = p.real("order_low");
                       s.order_high = p.real("order_high");
                       Trajectory tr;
                       const auto from = p.text("resume_from");
                       if (!from.empty()) {
                         const Trajectory stored = load_trajectory(from);
                         const auto f = p.integer("resume_frame");
                         const auto frame = f < 0 ? stored.times.size() - 1 : static_cast<std::size_t>(f);
                         tr = resume(stored, frame, s.cfg.T);
                       } else {
                         tr = evolve(s.cfg, simulate_data(s));
                       }
                       Report r = conservation_report(tr, s);
                       if (!from.empty()) r.param("resume_from", from);
                       if (s.order_check) {
                         if (!from.empty()) throw ConfigError("order_check cannot be combined with resume_from");
                         add_order_study(r, splitting_order(s.cfg, simulate_data(s)), s);
                       }
                       if (p.boolean("save_trajectory")) {
                         std::filesystem::create_directories(out);
                         save_trajectory(out / "trajectory", tr);
                         outcome.extra_outputs.push_back(out / "trajectory.ztr");
                         outcome.extra_outputs.push_back(out / "trajectory.json");
                       }
                       return std::vector<Report>{r};
                     }});
  } else if (cmd == "picard") {
    parts.push_back({{"eq:int-nls", "eq:six-est", "eq:duhamel"}, [&p, seed] {
                       PicardSettings s;
                       s.cfg = solver_config(p, seed);
                       s.h1 = p.real("h1");
                       s.margin = p.real("margin");
                       s.iterations = positive_int(p, "iterations");
                       s.checked_ratios = static_cast<int>(p.integer("checked_ratios"));
                       s.ratio_limit = p.real("ratio_limit");
                       s.y1 = p.boolean("y1");
                       s.compare = p.boolean("compare");
                       s.agreement_tol = p.real("agreement_tol");
                       return std::vector<Report>{run_picard(s)};
                     }});
  } else if (cmd == "lipschitz") {
    parts.push_back({{"thm:main-tech"}, [&p, seed] {
                       LipschitzSettings s;
                       s.cfg = solver_config(p, seed);
                       s.h1 = p.real("h1");
                       s.margin = p.real("margin");
                       s.pairs = positive_int(p, "pairs");
                       s.ratio_limit = p.real("ratio_limit");
                       return std::vector<Report>{run_lipschitz(s)};
                     }});
  } else if (cmd == "expsum") {
    parts.push_back({{"eq:lp"}, [&p, seed, threads] {
                       ExpsumSettings s;
                       s.lp.p = static_cast<int>(p.integer("p"));
                       s.lp.Ns = p.int_list("Ns");
                       s.lp.families = families(p.text_list("families"));
                       s.lp.bs = p.int_list("bs");
                       s.lp.trials = positive_int(p, "trials");
                       s.lp.alpha = p.integer("alpha");
                       s.lp.seed = seed;
                       s.lp.threads = threads;
                       s.slack = p.real("slack");
                       return std::vector<Report>{run_expsum(s)};
                     }});
  } else if (cmd == "circle") {
    auto settings = [&p, seed, threads] {
      CircleSettings s;
      s.k_max = p.integer("k_max");
      s.l4_Ns = p.int_list("l4_Ns");
      s.l4_families = families(p.text_list("l4_families"));
      s.l4_bs = p.int_list("l4_bs");
      s.l4_trials = positive_int(p, "l4_trials");
      s.l4_slope_limit = p.real("l4_slope_limit");
      s.major_Ns = p.int_list("major_Ns");
      s.major_bs = p.int_list("major_bs");
      s.q_max = p.integer("q_max");
      s.offsets = p.real_list("offsets");
      s.major_slope_limit = p.real("major_slope_limit");
      s.minor_Ns = p.int_list("minor_Ns");
      s.minor_bs = p.int_list("minor_bs");
      s.nu = p.real("nu");
      s.minor_grid_factor = p.integer("minor_grid_factor");
      s.level_Ns = p.int_list("level_Ns");
      s.level_count = positive_int(p, "level_count");
      s.level_grid_factor = p.integer("level_grid_factor");
      s.mc_samples = p.integer("mc_samples");
      s.level_exponent = p.real("level_exponent");
      s.seed = seed;
      s.threads = threads;
      return s;
    };
    parts.push_back({{"app:divisor"}, [settings] { return std::vector<Report>{run_divisor_check(settings())}; }});
    parts.push_back({{"eq:l4"}, [settings] { return std::vector<Report>{run_l4_check(settings())}; }});
    parts.push_back({{"eq:lem318-alt", "eq:outsidemj"}, [settings] {
                       const auto s = settings();
                       auto major = run_major_arcs(s);
                       auto minor = run_minor_arcs(s, major.footer_value("major_constant"));
                       return std::vector<Report>{major, minor};
                     }});
    parts.push_back({{"eq:distr"}, [settings] { return std::vector<Report>{run_superlevel(settings())}; }});
  } else if (cmd == "strichartz") {
    auto settings = [&p, seed, threads] {
      StrichartzSettings s;
      s.opt.p = p.real("p");
      s.opt.Ns = p.int_list("Ns");
      s.opt.trials = positive_int(p, "trials");
      s.opt.real_data = p.boolean("real_data");
      s.opt.flow = flow_from_string(p.text("flow"));
      s.opt.seed = seed;
      s.opt.threads = threads;
      s.slack = p.real("slack");
      s.atom_Ns = p.int_list("atom_Ns");
      s.atom_pieces = positive_int(p, "atom_pieces");
      s.atom_trials = positive_int(p, "atom_trials");
      return s;
    };
    parts.push_back({{"eq:str"}, [settings] { return std::vector<Report>{run_strichartz(settings())}; }});
    parts.push_back({{"eq:str-up"}, [settings] { return std::vector<Report>{run_strichartz_atoms(settings())}; }});
  } else if (cmd == "trilinear") {
    auto settings = [&p, seed, threads] {
      TrilinearSettings s;
      s.n1s = p.int_list("n1s");
      s.eps = p.real("eps");
      s.slope_limit = p.real("slope_limit");
      s.block_Ns = p.int_list("block_Ns");
      s.lin.delta = p.real("delta");
      s.lin.eta = p.real("eta");
      s.lin.trials = positive_int(p, "trials");
      s.lin.flow = flow_from_string(p.text("flow"));
      s.lin.seed = seed;
      s.tau = p.real("tau");
      s.crude_trials = positive_int(p, "crude_trials");
      s.phase_degree_max = p.integer("phase_degree_max");
      s.phase_tol = p.real("phase_tol");
      s.scan_pairs.clear();
      for (const auto& pair : p.text_list("scan_pairs")) {
        const auto colon = pair.find(':');
        const auto a = colon == std::string::npos ? std::nullopt : parse_int(pair.substr(0, colon));
        const auto b = colon == std::string::npos ? std::nullopt : parse_int(pair.substr(colon + 1));
        if (!a || !b) throw ConfigError(p.where("scan_pairs") + ": expected N1:N2, got '" + pair + "'");
        s.scan_pairs.push_back({*a, *b});
      }
      s.scan_T = p.real("scan_T");
      s.scan_min_sep = p.integer("scan_min_sep");
      s.spectrum_degree_max = p.integer("spectrum_degree_max");
      s.threads = threads;
      return s;
    };
    parts.push_back({{"eq:tri-sogge"}, [settings] { return std::vector<Report>{run_trilinear_cluster(settings())}; }});
    parts.push_back({{"eq:lin-tri-str", "eq:crude"},
                     [settings] { return std::vector<Report>{run_trilinear_blocks(settings())}; }});
    parts.push_back({{"eq:tri-str-u2"}, [settings] { return std::vector<Report>{run_orthogonality(settings())}; }});
    parts.push_back({{"eq:spec", "eq:spec-sp"}, [settings] { return std::vector<Report>{run_spectrum(settings())}; }});
  } else if (cmd == "decay") {
    parts.push_back({{"eq:decay"}, [&p] {
                       DecaySettings s;
                       s.n0_max = p.integer("n0_max");
                       s.tol = p.real("tol");
                       return std::vector<Report>{run_decay(s)};
                     }});
  } else if (cmd == "vnorm") {
    auto settings = [&p, seed] {
      VnormSettings s;
      s.paths = positive_int(p, "paths");
      s.max_pieces = p.integer("max_pieces");
      if (s.max_pieces < 1 || s.max_pieces > 20) throw ConfigError(p.where("max_pieces") + ": must lie in 1..20");
      s.cutoff = p.integer("cutoff");
      s.ps = p.real_list("ps");
      s.dp_tol = p.real("dp_tol");
      s.atoms = positive_int(p, "atoms");
      s.bracket_tol = p.real("bracket_tol");
      s.phase_degree_max = p.integer("phase_degree_max");
      s.phase_times = positive_int(p, "phase_times");
      s.phase_tol = p.real("phase_tol");
      s.seed = seed;
      return s;
    };
    parts.push_back({{"def:uv"}, [settings] {
                       const auto s = settings();
                       return std::vector<Report>{run_vnorm_dp(s), run_vnorm_bracket(s)};
                     }});
    parts.push_back({{"lem:mod_sp"}, [settings] { return std::vector<Report>{run_flow_phase(settings())}; }});
  }
  return parts;
}

inline std::vector<std::string> split_tags(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& t : zoll::detail::split_list(s)) {
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

/// Scans a directory for report JSON files and judges suite coverage.
inline Report summarize(const std::filesystem::path& dir, const std::vector<std::string>& required,
                        const std::string& tag_filter) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  Report r;
  r.id = "summary";
  r.tag = "suite";
  r.columns = {"pass", "rows", "failed_checks"};
  std::set<std::string> seen;
  double failed = 0.0;
  for (const auto& f : files) {
    nlohmann::json j;
    try {
      std::ifstream is(f);
      j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception&) {
      continue;
    }
    if (!j.is_object() || !j.contains("experiment") || !j.contains("checks") || j.value("schema", 0) != 1) continue;
    if (j["experiment"] == "summary") continue;
    std::set<std::string> tags;
    for (const auto& t : split_tags(j.value("tag", ""))) tags.insert(t);
    for (const auto& row : j["rows"]) {
      for (const auto& t : split_tags(row.value("tag", ""))) tags.insert(t);
    }
    if (!tag_filter.empty() && !tags.count(tag_filter)) continue;
    seen.insert(tags.begin(), tags.end());
    double bad = 0.0;
    for (const auto& c : j["checks"]) bad += c.value("pass", false) ? 0.0 : 1.0;
    failed += bad > 0 ? 1.0 : 0.0;
    r.add_row(j.value("tag", ""), {bad == 0 ? 1.0 : 0.0, static_cast<double>(j["rows"].size()), bad});
    r.notes.push_back(j["experiment"].get<std::string>() + ": " + fs::relative(f, dir).string());
  }
  double missing = 0.0;
  for (const auto& t : required) {
    if (!tag_filter.empty() && t != tag_filter) continue;
    if (!seen.count(t)) {
      missing += 1.0;
      r.notes.push_back("missing tag " + t);
    }
  }
  r.param("input", dir.string());
  if (!tag_filter.empty()) r.param("tag", tag_filter);
  r.footer = {{"reports", static_cast<double>(r.rows.size())}, {"failed_reports", failed}, {"missing_tags", missing}};
  r.checks.push_back(make_check("reports", static_cast<double>(r.rows.size()), ">=", 1.0));
  r.checks.push_back(make_check("failed_reports", failed, "==", 0.0));
  r.checks.push_back(make_check("missing_tags", missing, "==", 0.0));
  return r;
}

}  // namespace detail

struct Flags {
  std::string config, out, tag, seed, threads, p, Ns;
  std::vector<std::string> sets;
};

/// Runs one subcommand; returns the exit status.
inline int run(const std::string& cmd, const Flags& flags, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const auto started = std::chrono::system_clock::now();
  try {
    ParamSet general(detail::general_schema());
    ParamSet params(detail::schema_for(cmd));
    if (!flags.config.empty()) {
      const ConfigFile cf = load_config(flags.config);
      for (const auto& sec : cf.sections) {
        if (sec.name.empty()) {
          for (const auto& e : sec.entries) (general.known(e.key) ? general : params).set(e.key, e.value, e.where);
        } else if (sec.name == "general") {
          general.apply(sec);
        } else if (sec.name == cmd) {
          params.apply(sec);
        } else if (std::find(subcommands().begin(), subcommands().end(), sec.name) != subcommands().end()) {
          ParamSet other(detail::schema_for(sec.name));  // validated, not used
          other.apply(sec);
        } else {
          throw ConfigError(sec.where + ": unknown section [" + sec.name + "]");
        }
      }
    }
    if (!flags.seed.empty()) general.set("seed", flags.seed, "--seed");
    if (!flags.threads.empty()) general.set("threads", flags.threads, "--threads");
    if (!flags.p.empty()) params.set("p", flags.p, "--p");
    if (!flags.Ns.empty()) params.set("Ns", flags.Ns, "--Ns");
    for (const auto& kv : flags.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set " + kv + ": expected KEY=VALUE");
      params.set(kv.substr(0, eq), kv.substr(eq + 1), "--set " + kv.substr(0, eq));
    }
    const auto seed_v = general.integer("seed");
    const auto threads_v = general.integer("threads");
    if (seed_v < 0) throw ConfigError(general.where("seed") + ": seed must be >= 0");
    if (threads_v < 0 || threads_v > 1024) throw ConfigError(general.where("threads") + ": threads must lie in 0..1024");
    const auto seed = static_cast<std::uint64_t>(seed_v);
    const auto threads = static_cast<unsigned>(threads_v);

    fs::path out_dir = flags.out;
    if (out_dir.empty()) {
      const char* env = std::getenv("ZOLL_OUT");
      out_dir = env != nullptr && *env != '\0' ? env : "zoll_out";
    }

    detail::Outcome outcome;
    if (cmd == "report") {
      const auto input = params.text("input");
      auto required = params.text_list("require_tags");
      if (required.empty()) required = suite_tags();
      outcome.reports.push_back(detail::summarize(input.empty() ? out_dir : fs::path(input), required, flags.tag));
    } else {
      const auto parts = detail::parts_for(cmd, params, seed, threads, out_dir, outcome);
      bool any = false;
      for (const auto& part : parts) {
        if (!flags.tag.empty() && std::find(part.tags.begin(), part.tags.end(), flags.tag) == part.tags.end()) continue;
        any = true;
        for (auto& r : part.run()) outcome.reports.push_back(std::move(r));
      }
      if (!any) throw ConfigError("--tag " + flags.tag + ": '" + cmd + "' emits no such tag");
    }

    Manifest m;
    m.id = cmd;
    for (const auto& r : outcome.reports) m.tag += (m.tag.empty() ? "" : ";") + r.tag;
    m.params = general.items();
    for (const auto& kv : params.items()) m.params.push_back(kv);
    if (!flags.tag.empty()) m.params.emplace_back("tag", flags.tag);
    m.seed = seed;
    bool pass = true;
    for (const auto& r : outcome.reports) {
      for (const auto& path : write_report(out_dir, r.id, r)) m.outputs.push_back(path.string());
      pass = pass && r.pass();
      out << r.id << " [" << r.tag << "] " << (r.pass() ? "pass" : "FAIL");
      for (const auto& c : r.checks) {
        if (!c.pass) out << "  " << c.name << "=" << format_number(c.value) << " (" << c.relation << " " << format_number(c.limit) << ")";
      }
      out << '\n';
    }
    for (const auto& path : outcome.extra_outputs) m.outputs.push_back(path.string());
    const auto finished = std::chrono::system_clock::now();
    m.started = utc_timestamp(started);
    m.finished = utc_timestamp(finished);
    m.wall_seconds = std::chrono::duration<double>(finished - started).count();
    m.exit_status = pass ? 0 : 2;
    write_text_file(out_dir / (cmd + ".manifest.json"), to_json(m).dump(2) + "\n");
    return m.exit_status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

/// Entry point; `args` excludes the program name.
inline int cli_main(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical laboratory for the quintic NLS on the 3-sphere", "zoll_lab"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& name : subcommands()) {
    auto* sc = app.add_subcommand(name, name == "report" ? "summarize reports and tag coverage" : "run the " + name + " experiments");
    sc->add_option("--config", flags.config, "settings file (key = value sections, or JSON)");
    sc->add_option("--out", flags.out, "output directory");
    sc->add_option("--seed", flags.seed, "master seed");
    sc->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
    sc->add_option("--tag", flags.tag, "run only the parts that emit this tag");
    sc->add_option("--p", flags.p, "exponent p");
    sc->add_option("--Ns", flags.Ns, "sizes, e.g. 8,16,...,512");
    sc->add_option("--set", flags.sets, "override one setting, KEY=VALUE")->allow_extra_args(false);
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  for (const auto* sc : app.get_subcommands()) return run(sc->get_name(), flags, out, err);
  return 1;
}

}  // namespace zoll::lab
