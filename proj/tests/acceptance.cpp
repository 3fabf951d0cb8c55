// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "granular/aco.hpp"
#include "granular/fcm.hpp"
#include "granular/nfis.hpp"
#include "granular/orchestrator.hpp"
#include "granular/rst.hpp"
#include "granular/vcc.hpp"

using namespace gran;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string trace_of(const RunReport& r) {
  std::ostringstream out;
  write_trace(out, r);
  return out.str();
}

// 1. Rough-set containment.
Outcome rough_sets() {
  Outcome o;
  Rng rng(101);
  for (int trial = 0; trial < 500 && o.ok; ++trial) {
    const int n = rng.between(1, 30);
    const int attrs = rng.between(1, 4);
    const int codes = rng.between(1, 4);
    InformationSystem is;
    for (int a = 0; a < attrs; ++a) is.condition_attrs.push_back("a" + std::to_string(a));
    is.decision_attr = "d";
    for (int i = 0; i < n; ++i) {
      std::vector<int> obj;
      for (int a = 0; a <= attrs; ++a) obj.push_back(rng.between(0, codes - 1));
      is.objects.push_back(obj);
    }
    std::vector<std::size_t> subset;
    for (int a = 0; a < attrs; ++a) {
      if (rng.uniform() < 0.5) subset.push_back(static_cast<std::size_t>(a));
    }
    if (subset.empty()) subset.push_back(0);

    // Pairwise-equality oracle.
    Partition brute;
    std::vector<bool> used(is.size(), false);
    for (std::size_t i = 0; i < is.size(); ++i) {
      if (used[i]) continue;
      Block b;
      for (std::size_t j = i; j < is.size(); ++j) {
        bool same = true;
        for (auto a : subset) same = same && is.objects[i][a] == is.objects[j][a];
        if (same) {
          b.push_back(j);
          used[j] = true;
        }
      }
      brute.push_back(b);
    }
    o.require(indiscernibility(is, subset) == brute, "indiscernibility differs from the pairwise oracle");

    std::set<int> decisions;
    for (std::size_t i = 0; i < is.size(); ++i) decisions.insert(is.decision(i));
    for (int d : decisions) {
      const auto ap = approximate(is, subset, d);
      std::vector<std::size_t> ext;
      for (std::size_t i = 0; i < is.size(); ++i) {
        if (is.decision(i) == d) ext.push_back(i);
      }
      o.require(std::includes(ext.begin(), ext.end(), ap.lower.begin(), ap.lower.end()), "lower not in extension");
      o.require(std::includes(ap.upper.begin(), ap.upper.end(), ext.begin(), ext.end()), "extension not in upper");
      o.require(ap.gamma >= 0.0 && ap.gamma <= 1.0, "gamma outside [0,1]");
    }
  }
  return o;
}

// 2. Fuzzy c-means.
Outcome fuzzy_c_means() {
  Outcome o;
  Rng rng(202);
  for (int trial = 0; trial < 100 && o.ok; ++trial) {
    const int n = rng.between(8, 60);
    const int dim = rng.between(1, 4);
    std::vector<Vector> pts;
    for (int i = 0; i < n; ++i) {
      Vector p;
      for (int d = 0; d < dim; ++d) p.push_back(rng.uniform(-3, 3));
      pts.push_back(p);
    }
    FcmOptions opts;
    opts.clusters = rng.between(2, 5);
    opts.fuzzifier = rng.uniform(1.5, 3.0);
    opts.seed = static_cast<std::uint64_t>(trial);
    double last = 1e300;
    fcm_cluster(pts, opts, [&](const FuzzyPartition& p) {
      for (Eigen::Index k = 0; k < p.memberships.cols(); ++k) {
        o.require(std::abs(p.memberships.col(k).sum() - 1.0) <= 1e-9, "membership column does not sum to 1");
      }
      o.require(p.objective <= last * (1.0 + 1e-12), "objective increased");
      last = p.objective;
    });

    opts.clusters = 1;
    const auto one = fcm_cluster(pts, opts);
    for (int d = 0; d < dim; ++d) {
      double s = 0.0;
      for (const auto& p : pts) s += p[static_cast<std::size_t>(d)];
      o.require(one.prototypes[0][static_cast<std::size_t>(d)] == s / n, "c=1 prototype is not the centroid");
    }
  }
  return o;
}

// 3. Collaboration switched off.
Outcome decoupling() {
  Outcome o;
  Rng rng(303);
  for (int trial = 0; trial < 10 && o.ok; ++trial) {
    std::vector<SiteState> sites;
    FcmOptions opts;
    opts.clusters = rng.between(2, 4);
    opts.max_iter = 1;
    for (int s = 0; s < 2; ++s) {
      std::vector<Vector> rows;
      const int n = rng.between(15, 40);
      for (int i = 0; i < n; ++i) rows.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
      opts.seed = static_cast<std::uint64_t>(10 * trial + s);
      sites.push_back(make_site(s, rows, opts));
    }
    const int sweeps = 400;
    const auto out = vcc_iterate(sites, CollaborationMatrix{Eigen::MatrixXd::Zero(2, 2)}, sweeps);
    for (std::size_t s = 0; s < 2; ++s) {
      FcmOptions ref_opts = opts;
      ref_opts.tol = 0.0;
      ref_opts.max_iter = sweeps;
      const auto ref = fcm_from(sites[s].inputs, sites[s].partition.memberships, ref_opts);
      // Match clusters by prototype, since alignment may relabel them.
      for (std::size_t k = 0; k < ref.prototypes.size(); ++k) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < ref.prototypes.size(); ++j) {
          if (squared_distance(ref.prototypes[k], out[s].partition.prototypes[j]) <
              squared_distance(ref.prototypes[k], out[s].partition.prototypes[best])) {
            best = j;
          }
        }
        for (std::size_t d = 0; d < ref.prototypes[k].size(); ++d) {
          o.require(std::abs(ref.prototypes[k][d] - out[s].partition.prototypes[best][d]) <= 1e-9,
                    "prototype differs from independent FCM");
        }
        const double gap = (ref.memberships.row(static_cast<Eigen::Index>(k)) -
                            out[s].partition.memberships.row(static_cast<Eigen::Index>(best)))
                               .cwiseAbs()
                               .maxCoeff();
        o.require(gap <= 1e-9, "memberships differ from independent FCM");
      }
    }
  }
  return o;
}

// 4. Pheromone algebra.
Outcome pheromone() {
  Outcome o;
  AcoParams params;
  params.rho = 0.15;
  params.tau0 = 3.0;
  params.tau_cap = 1e9;
  auto s = init_pheromone(3, params);
  const double d = 0.4;
  Eigen::MatrixXd dep = Eigen::MatrixXd::Constant(3, 3, d);
  const double fixed = d / params.rho;
  for (int k = 1; k <= 50; ++k) {
    s = update_pheromone(s, dep);
    const double expect = std::pow(1.0 - params.rho, k) * std::abs(params.tau0 - fixed);
    o.require(std::abs(std::abs(s.tau(0, 1) - fixed) - expect) <= 1e-9, "geometric error law broken");
  }
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    Vector e;
    const int p = rng.between(2, 6);
    for (int i = 0; i < p; ++i) e.push_back(rng.uniform(0, 2));
    if (trial % 10 == 0) e[1] = e[0];
    const auto n = normalize_errors(e);
    double total = 0.0;
    for (double v : n) total += v;
    o.require(std::abs(total - 1.0) <= 1e-12, "normalized errors do not sum to 1");
    const double cap = 100.0;
    const auto m = delta_pheromone(n, cap);
    o.require(m == m.transpose(), "deposit not symmetric");
    o.require(m.maxCoeff() <= cap, "deposit above cap");
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
          if (i == j || i == k) continue;
          const double gj = std::abs(n[static_cast<std::size_t>(i)] - n[static_cast<std::size_t>(j)]);
          const double gk = std::abs(n[static_cast<std::size_t>(i)] - n[static_cast<std::size_t>(k)]);
          if (gj < gk) o.require(m(i, j) >= m(i, k), "deposit not anti-monotone in the error gap");
        }
      }
    }
  }
  return o;
}

// 5. Premise gradients and the least-squares pass.
Outcome gradients() {
  Outcome o;
  Rng rng(505);
  for (int trial = 0; trial < 20 && o.ok; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.between(1, 3));
    std::vector<int> mfs;
    for (std::size_t i = 0; i < n; ++i) mfs.push_back(rng.between(1, 3));
    std::vector<Vector> rows;
    for (int r = 0; r < 30; ++r) {
      Vector row;
      for (std::size_t i = 0; i <= n; ++i) row.push_back(rng.uniform(0, 1));
      rows.push_back(row);
    }
    GranularityLevel level;
    level.mfs_per_input = mfs;
    auto rb = init_tsk(rows, level);
    for (auto& input : rb.mfs) {
      for (auto& mf : input) {
        mf.center += rng.uniform(-0.1, 0.1);
        mf.width *= rng.uniform(0.7, 1.4);
      }
    }
    for (auto& rule : rb.rules) {
      for (auto& a : rule.coeffs) a = rng.uniform(-2, 2);
    }
    const TrainingSet data{rows};
    const double before = sse(rb, data);
    o.require(sse(fit_consequents_lse(rb, data).base, data) <= before * (1.0 + 1e-12), "LSE raised the SSE");

    const auto g = premise_gradient(rb, data);
    const auto p = premise_parameters(rb);
    // Inputs with a single MF cancel out of the normalized strengths, so
    // their premise gradient is exactly zero and differencing sees only noise.
    std::vector<bool> single;
    for (int m : mfs) single.insert(single.end(), 2 * static_cast<std::size_t>(m), m == 1);
    const double h = 1e-6;
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto up = p;
      auto down = p;
      up[k] += h;
      down[k] -= h;
      const double fd =
          (mse(with_premise_parameters(rb, up), data) - mse(with_premise_parameters(rb, down), data)) / (2 * h);
      if (single[k]) {
        o.require(std::abs(g[k]) < 1e-12 && std::abs(fd) < 1e-8, "single-MF gradient is not zero");
        continue;
      }
      const double scale = std::max(std::abs(fd), std::abs(g[k]));
      o.require(scale > 0.0 && std::abs(fd - g[k]) / scale < 1e-4, "gradient differs from central differences");
    }
  }
  return o;
}

// 6. SONFIS on a noisy sine.
Outcome sonfis() {
  Outcome o;
  const auto data = fixtures::sine(200, 0.02, 7);
  RunConfig cfg;
  cfg.variant = Variant::kSonfis;
  cfg.error_target = 0.05;
  const auto a = run(cfg, data);
  o.require(a.termination == Termination::kConverged, "did not converge");
  o.require(a.final_test_error() <= 0.05, "test RMSE above 0.05");
  int last = 0;
  for (const auto& rec : a.records) {
    const int cells = rec.grids[0].first * rec.grids[0].second;
    o.require(cells >= last, "grid size decreased");
    last = cells;
  }
  const auto b = run(cfg, data);
  o.require(a.records.size() == b.records.size(), "rerun has a different length");
  for (std::size_t i = 0; i < std::min(a.records.size(), b.records.size()); ++i) {
    o.require(std::abs(a.records[i].test_error - b.records[i].test_error) <= 1e-9, "rerun diverged");
    o.require(std::abs(a.records[i].train_error - b.records[i].train_error) <= 1e-9, "rerun diverged");
  }
  o.require(trace_of(a) == trace_of(b), "rerun trace differs");
  char buf[96];
  std::snprintf(buf, sizeof buf, "test_rmse=%.4g iterations=%zu final_grid=%dx%d", a.final_test_error(),
                a.records.size(), a.records.back().grids[0].first, a.records.back().grids[0].second);
  if (o.ok) o.detail = buf;
  return o;
}

// 7. SORST on separable and XOR data.
Outcome sorst() {
  Outcome o;
  RunConfig r;
  r.variant = Variant::kSorstR;
  const auto sep = run(r, fixtures::separable(200));
  o.require(sep.final_test_error() == 0.0 && !sep.unclassifiable, "sorst-r did not reach zero error");

  RunConfig as;
  as.variant = Variant::kSorstAs;
  as.rst_bins = {1};
  const auto x = run(as, fixtures::xor_pattern(200));
  o.require(x.termination == Termination::kConverged && x.final_test_error() == 0.0, "sorst-as did not separate XOR");
  for (const auto& rec : x.records) {
    const bool separated = rec.test_error == 0.0;
    if (separated) o.require(rec.bins[0] >= 2 && rec.bins[1] >= 2, "separated before reaching 2 bins per axis");
  }
  std::string trail;
  for (const auto& rec : x.records) trail += (trail.empty() ? "" : " ") + std::to_string(rec.bins[0]) + ";" +
                                             std::to_string(rec.bins[1]);
  if (o.ok) o.detail = "xor bins " + trail;
  return o;
}

// 8. Collaborative loop accounting.
Outcome sovcc() {
  Outcome o;
  RunConfig cfg;
  cfg.variant = Variant::kSovcc;
  cfg.aco.t_star = 2;
  cfg.k_star = 1;
  cfg.clusters = 2;
  cfg.c_star = 2;
  cfg.aco.xi = 1e-12;
  const auto data = fixtures::sine(200, 0.02, 7);
  const auto r = run(cfg, data);
  // Per cycle: t* passes with t*-1 pheromone updates; k*+1 cycles, c fixed.
  const int expected_passes = cfg.aco.t_star * (cfg.k_star + 1);
  o.require(r.step4_passes == expected_passes, "Step-4 pass count differs from the flow count");
  o.require(r.pheromone_updates == (cfg.aco.t_star - 1) * (cfg.k_star + 1), "pheromone update count wrong");
  int aco_rows = 0;
  for (const auto& rec : r.records) aco_rows += rec.event == "aco";
  o.require(aco_rows == r.pheromone_updates, "trace Step-5 rows do not match the update count");

  cfg.equal_sites = true;
  const auto twins = run(cfg, data);
  for (const auto& rec : twins.records) {
    o.require(std::abs(rec.deltas[0] - rec.deltas[1]) <= 1e-9, "twin sites disagree");
  }
  if (o.ok) o.detail = "passes=" + std::to_string(r.step4_passes) + " updates=" + std::to_string(r.pheromone_updates);
  return o;
}

// 9. Byte-identical traces on re-run.
Outcome determinism() {
  Outcome o;
  const std::filesystem::path dir = std::filesystem::path(GRANULAR_TEST_TMP) / "acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<Variant, Dataset>> cases = {
      {Variant::kSonfis, fixtures::sine(200)},     {Variant::kSorstR, fixtures::separable(200)},
      {Variant::kSorstAs, fixtures::xor_pattern(200)}, {Variant::kESonfis, fixtures::sine(120)},
      {Variant::kSovcc, fixtures::sine(200)},
  };
  for (const auto& [variant, data] : cases) {
    RunConfig cfg;
    cfg.variant = variant;
    cfg.seed = 42;
    if (variant == Variant::kESonfis) {
      cfg.ga_population = 6;
      cfg.ga_generations = 3;
    }
    std::string texts[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto path = dir / (std::string(to_string(variant)) + "_" + std::to_string(rep) + ".csv");
      {
        std::ofstream f(path, std::ios::binary);
        write_trace(f, run(cfg, data));
      }
      texts[rep] = fixtures::slurp(path);
    }
    o.require(!texts[0].empty() && texts[0] == texts[1], std::string(to_string(variant)) + " trace differs");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "rough-set containment", 10, rough_sets},
      {2, "fuzzy c-means invariants", 10, fuzzy_c_means},
      {3, "collaboration decoupling", 10, decoupling},
      {4, "pheromone algebra", 1, pheromone},
      {5, "premise gradients", 30, gradients},
      {6, "sonfis end-to-end", 60, sonfis},
      {7, "sorst end-to-end", 60, sorst},
      {8, "sovcc loop accounting", 120, sovcc},
      {9, "determinism", 600, determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.budget_s) {
      out.ok = false;
      out.detail += " (over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget)";
    }
    all = all && out.ok;
    std::printf("%s %d %s %.2fs%s%s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                out.detail.empty() ? "" : "  ", out.detail.c_str());
  }
  return all ? 0 : 1;
}
