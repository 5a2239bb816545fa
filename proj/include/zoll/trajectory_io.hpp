#pragma once

// Trajectory and step-path persistence.
//
// A trajectory is stored as <stem>.ztr plus a JSON sidecar <stem>.json.
// The .ztr file is little-endian and columnar:
//   bytes 0..7   magic "ZOLLTR01"
//   u32          format version (1)
//   u32          reserved (0)
//   i64          cutoff K
//   u64          frame count F
//   F x f64      times
//   F x i64      step indices
//   F*(K+1) f64  real parts, frame-major
//   F*(K+1) f64  imaginary parts, frame-major
// The sidecar holds the solver config and the per-step mass, energy and
// truncation loss. Any stored frame can seed a resumed run.
//
// A step path is stored as <stem>.json (breakpoints, flow, field file per
// piece) next to one binary field file per piece.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "zoll/flow.hpp"
#include "zoll/solver.hpp"
#include "zoll/variation.hpp"
#include "zoll/zonal_io.hpp"

namespace zoll {

namespace detail {
inline constexpr char kTrajectoryMagic[8] = {'Z', 'O', 'L', 'L', 'T', 'R', '0', '1'};

inline void write_json_file(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed: " + p.string());
}

inline nlohmann::json read_json_file(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("cannot open " + p.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(p.string() + ": " + e.what());
  }
}

// JSON has no infinities; the open end of a path is written as "inf".
inline nlohmann::json time_to_json(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return t;
}
inline double time_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j == "inf") return INFINITY;
    if (j == "-inf") return -INFINITY;
    throw std::runtime_error("path json: bad time value " + j.dump());
  }
  return j.get<double>();
}
}  // namespace detail

inline nlohmann::json to_json(const SolverConfig& c) {
  return {{"K", c.K},
          {"M", 3 * c.K + 1},
          {"dt", c.dt},
          {"T", c.T},
          {"sign", c.sign},
          {"truncate", c.truncate},
          {"seed", c.seed},
          {"max_mass_drift", c.max_mass_drift},
          {"store_every", c.store_every},
          {"scheme", {{"alpha", 4}, {"E", 1}}}};
}

inline SolverConfig solver_config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  c.K = j.at("K").get<std::int64_t>();
  c.dt = j.at("dt").get<double>();
  c.T = j.at("T").get<double>();
  c.sign = j.at("sign").get<int>();
  c.truncate = j.at("truncate").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_mass_drift = j.at("max_mass_drift").get<double>();
  c.store_every = j.at("store_every").get<std::int64_t>();
  c.validate();
  return c;
}

/// Step index of a stored frame.
inline std::int64_t frame_step(const Trajectory& tr, std::size_t frame) {
  return static_cast<std::int64_t>(std::llround(tr.times.at(frame) / tr.config.dt));
}

inline void save_trajectory(const std::filesystem::path& stem, const Trajectory& tr) {
  if (tr.times.size() != tr.states.size() || tr.times.empty()) {
    throw std::invalid_argument("save_trajectory: need matching, nonempty times and states");
  }
  const std::int64_t K = tr.config.K;
  for (const auto& s : tr.states) {
    if (s.cutoff() != K) throw std::invalid_argument("save_trajectory: state cutoff differs from config K");
  }
  auto data = stem;
  data += ".ztr";
  {
    std::ofstream os(data, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + data.string() + " for writing");
    os.write(detail::kTrajectoryMagic, 8);
    detail::put<std::uint32_t>(os, 1);
    detail::put<std::uint32_t>(os, 0);
    detail::put<std::int64_t>(os, K);
    detail::put<std::uint64_t>(os, tr.times.size());
    for (double t : tr.times) detail::put<double>(os, t);
    for (std::size_t f = 0; f < tr.times.size(); ++f) detail::put<std::int64_t>(os, frame_step(tr, f));
    for (const auto& s : tr.states) {
      for (const auto& c : s.coeffs) detail::put<double>(os, c.real());
    }
    for (const auto& s : tr.states) {
      for (const auto& c : s.coeffs) detail::put<double>(os, c.imag());
    }
    if (!os) throw std::runtime_error("write failed: " + data.string());
  }
  nlohmann::json j;
  j["schema"] = 1;
  j["data"] = data.filename().string();
  j["config"] = to_json(tr.config);
  j["first_step"] = frame_step(tr, 0);
  j["frames"] = tr.times.size();
  j["mass"] = tr.mass;
  j["energy"] = tr.energy;
  j["truncation_loss"] = tr.truncation_loss;
  j["mass_drift"] = tr.mass.empty() ? 0.0 : tr.mass_drift();
  j["energy_drift"] = tr.energy.empty() ? 0.0 : tr.energy_drift();
  auto side = stem;
  side += ".json";
  detail::write_json_file(side, j);
}

inline Trajectory load_trajectory(const std::filesystem::path& stem) {
  auto side = stem;
  side += ".json";
  const auto j = detail::read_json_file(side);
  if (j.value("schema", 0) != 1) throw std::runtime_error(side.string() + ": unsupported schema");
  Trajectory tr;
  tr.config = solver_config_from_json(j.at("config"));
  tr.mass = j.at("mass").get<std::vector<double>>();
  tr.energy = j.at("energy").get<std::vector<double>>();
  tr.truncation_loss = j.at("truncation_loss").get<std::vector<double>>();

  const auto data = side.parent_path() / j.at("data").get<std::string>();
  std::ifstream is(data, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + data.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, detail::kTrajectoryMagic, 8) != 0) {
    throw std::runtime_error(data.string() + ": bad magic");
  }
  if (detail::get<std::uint32_t>(is) != 1) throw std::runtime_error(data.string() + ": unsupported version");
  (void)detail::get<std::uint32_t>(is);
  const auto K = detail::get<std::int64_t>(is);
  const auto F = detail::get<std::uint64_t>(is);
  if (K != tr.config.K) throw std::runtime_error(data.string() + ": cutoff disagrees with sidecar");
  if (F == 0 || F != j.at("frames").get<std::uint64_t>()) {
    throw std::runtime_error(data.string() + ": frame count disagrees with sidecar");
  }
  const auto n = static_cast<std::size_t>(K + 1);
  tr.times.resize(F);
  for (auto& t : tr.times) t = detail::get<double>(is);
  for (std::uint64_t f = 0; f < F; ++f) {
    if (detail::get<std::int64_t>(is) != frame_step(tr, f)) {
      throw std::runtime_error(data.string() + ": step column disagrees with times");
    }
  }
  std::vector<double> re(F * n), im(F * n);
  for (auto& x : re) x = detail::get<double>(is);
  for (auto& x : im) x = detail::get<double>(is);
  tr.states.reserve(F);
  for (std::uint64_t f = 0; f < F; ++f) {
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = {re[f * n + k], im[f * n + k]};
    tr.states.emplace_back(std::move(c));
  }
  return tr;
}

/// Continues a trajectory from a stored frame to the config horizon (or a new
/// one). The result covers the whole run: entries up to the frame are kept and
/// the rest are recomputed, so it matches an uninterrupted run bit for bit.
inline Trajectory resume(const Trajectory& tr, std::size_t frame, std::optional<double> horizon = {}) {
  if (frame >= tr.states.size()) throw std::out_of_range("resume: no such frame");
  SolverConfig cfg = tr.config;
  if (horizon) cfg.T = *horizon;
  const std::int64_t first = frame_step(tr, 0);
  const std::int64_t step = frame_step(tr, frame);
  if (step > cfg.steps()) throw std::invalid_argument("resume: frame lies beyond the horizon");
  const auto kept = static_cast<std::size_t>(step - first);
  if (tr.mass.size() <= kept) throw std::runtime_error("resume: per-step log shorter than the frame index");

  Trajectory cont = evolve(cfg, tr.states[frame], step);
  Trajectory out;
  out.config = cfg;
  out.times.assign(tr.times.begin(), tr.times.begin() + static_cast<std::ptrdiff_t>(frame));
  out.states.assign(tr.states.begin(), tr.states.begin() + static_cast<std::ptrdiff_t>(frame));
  out.times.insert(out.times.end(), cont.times.begin(), cont.times.end());
  out.states.insert(out.states.end(), cont.states.begin(), cont.states.end());
  auto splice = [kept](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> v(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(kept));
    v.insert(v.end(), b.begin(), b.end());
    return v;
  };
  out.mass = splice(tr.mass, cont.mass);
  out.energy = splice(tr.energy, cont.energy);
  out.truncation_loss = splice(tr.truncation_loss, cont.truncation_loss);
  // the first continuation entry re-records the frame itself with zero loss
  out.truncation_loss[kept] = tr.truncation_loss[kept];
  return out;
}

inline void save_path(const std::filesystem::path& stem, const StepPath& path) {
  path.validate();
  nlohmann::json j;
  j["schema"] = 1;
  j["times"] = nlohmann::json::array();
  for (double t : path.times) j["times"].push_back(detail::time_to_json(t));
  j["evolving"] = path.evolving ? nlohmann::json(to_string(*path.evolving)) : nlohmann::json(nullptr);
  j["pieces"] = nlohmann::json::array();
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    std::ostringstream name;
    name << stem.filename().string() << ".piece" << std::setw(4) << std::setfill('0') << i << ".zf";
    save_field((stem.parent_path() / name.str()).string(), path.values[i]);
    j["pieces"].push_back({{"index", i}, {"field", name.str()}});
  }
  auto side = stem;
  side += ".json";
  detail::write_json_file(side, j);
}

inline StepPath load_path(const std::filesystem::path& stem) {
  auto side = stem;
  side += ".json";
  const auto j = detail::read_json_file(side);
  if (j.value("schema", 0) != 1) throw std::runtime_error(side.string() + ": unsupported schema");
  StepPath p;
  for (const auto& t : j.at("times")) p.times.push_back(detail::time_from_json(t));
  if (!j.at("evolving").is_null()) p.evolving = flow_from_string(j.at("evolving").get<std::string>());
  for (const auto& piece : j.at("pieces")) {
    p.values.push_back(load_field((side.parent_path() / piece.at("field").get<std::string>()).string()));
  }
  p.validate();
  return p;
}

}  // namespace zoll
