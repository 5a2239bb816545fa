// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [DIR]    also writes every report under DIR

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "zoll/report.hpp"
#include "zoll/runs/estimate_runs.hpp"
#include "zoll/runs/solver_runs.hpp"
#include "zoll/runs/sum_runs.hpp"
#include "zoll/runs/variation_runs.hpp"

namespace {

using namespace zoll;
using Clock = std::chrono::steady_clock;

std::string out_dir;
int failures = 0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string describe(const Check& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s=%.4g%s%.4g", c.name.c_str(), c.value, c.relation.c_str(), c.limit);
  return buf;
}

struct Line {
  std::vector<Check> checks;

  void from(const Report& r, const std::vector<std::string>& names = {}) {
    if (!out_dir.empty()) write_report(out_dir, r.id, r);
    for (const auto& c : r.checks) {
      if (names.empty() || std::find(names.begin(), names.end(), c.name) != names.end()) checks.push_back(c);
    }
  }
  void runtime(double s, double limit) { checks.push_back(make_check("runtime_s", s, "<", limit)); }

  void print(const std::string& id, const std::string& what) const {
    bool ok = !checks.empty();
    for (const auto& c : checks) ok = ok && c.pass;
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << id << "  " << what << " :";
    for (const auto& c : checks) std::cout << ' ' << describe(c);
    std::cout << std::endl;
  }
};

void criterion(const std::string& id, const std::string& what, const std::function<void(Line&)>& body) {
  Line line;
  try {
    body(line);
  } catch (const std::exception& e) {
    line.checks.push_back(make_check(std::string("exception: ") + e.what(), 1.0, "==", 0.0));
  }
  line.print(id, what);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) out_dir = argv[1];
  const auto start = Clock::now();

  SimulateSettings sim;  // defocusing, K = 64, H^1 = 0.1, dt = 1e-3, T = 1
  criterion("1", "conservation", [&](Line& l) {
    const auto t0 = Clock::now();
    const auto res = run_simulate(sim);
    l.runtime(seconds_since(t0), 60.0);
    l.from(res.report);
  });

  criterion("2", "splitting order", [&](Line& l) {
    SimulateSettings s = sim;
    s.order_check = true;
    l.from(run_simulate(s).report, {"order_ratio_low", "order_ratio_high"});
  });

  criterion("3", "picard contraction", [&](Line& l) {
    const auto t0 = Clock::now();
    const auto r = run_picard(PicardSettings{});
    l.runtime(seconds_since(t0), 120.0);
    l.from(r);
  });

  criterion("4", "lipschitz flow map", [&](Line& l) { l.from(run_lipschitz(LipschitzSettings{})); });

  criterion("5", "exponential sums p=6,8", [&](Line& l) {
    const auto t0 = Clock::now();
    for (int p : {6, 8}) {
      ExpsumSettings s;
      s.lp.p = p;
      Report r = run_expsum(s);
      r.id += "-p" + std::to_string(p);
      for (auto& c : r.checks) c.name += "_p" + std::to_string(p);
      l.from(r);
    }
    l.runtime(seconds_since(t0), 120.0);
  });

  const CircleSettings circle;
  criterion("6", "windowed L4", [&](Line& l) { l.from(run_l4_check(circle)); });
  criterion("7a", "divisor counts", [&](Line& l) { l.from(run_divisor_check(circle)); });
  double major_constant = INFINITY;
  criterion("7b", "major arcs", [&](Line& l) {
    const auto r = run_major_arcs(circle);
    major_constant = r.footer_value("major_constant");
    l.from(r);
  });
  criterion("7c", "minor arcs", [&](Line& l) { l.from(run_minor_arcs(circle, major_constant)); });
  criterion("7d", "superlevel sets", [&](Line& l) { l.from(run_superlevel(circle)); });

  criterion("8", "strichartz p=6", [&](Line& l) {
    const auto t0 = Clock::now();
    const auto r = run_strichartz(StrichartzSettings{});
    l.runtime(seconds_since(t0), 180.0);
    l.from(r);
  });

  const TrilinearSettings tri;
  criterion("9", "trilinear cluster", [&](Line& l) { l.from(run_trilinear_cluster(tri)); });
  criterion("10", "almost-orthogonality", [&](Line& l) { l.from(run_orthogonality(tri)); });
  criterion("11", "quadruple integral decay", [&](Line& l) { l.from(run_decay(DecaySettings{})); });

  const VnormSettings vn;
  criterion("12", "variation norms", [&](Line& l) {
    l.from(run_vnorm_dp(vn));
    l.from(run_vnorm_bracket(vn));
  });
  criterion("13", "modified flow phase", [&](Line& l) { l.from(run_flow_phase(vn)); });

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << " ("
            << seconds_since(start) << " s)" << std::endl;
  return failures == 0 ? 0 : 1;
}
