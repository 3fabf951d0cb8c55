#include "granular/orchestrator.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "granular/aco.hpp"
#include "granular/error.hpp"
#include "granular/fcm.hpp"
#include "granular/nfis.hpp"
#include "granular/rng.hpp"
#include "granular/rst.hpp"
#include "granular/som.hpp"
#include "granular/textio.hpp"
#include "granular/vcc.hpp"

namespace gran {

namespace {

// Sub-seed tags.
enum : std::uint64_t {
  kSeedSplit = 1,
  kSeedGrid = 2,
  kSeedGrowth = 3,
  kSeedGa = 4,
  kSeedShape = 5,
  kSeedSiteGrid = 6,
  kSeedFcm = 7,
  kSeedBeta = 8,
};

struct Prepared {
  Dataset train_raw;
  Dataset test_raw;
  Dataset train;
  Dataset test;
  Normalization norm;
};

Prepared prepare(const RunConfig& cfg, const Dataset& data) {
  cfg.validate();
  data.validate();
  if (data.n_inputs() == 0) throw ParameterError("data needs at least one input column");
  const Dataset raw = data.normalization ? denormalize(data) : data;
  auto sp = run_split(cfg, raw);
  Prepared p;
  p.norm = fit_normalization(sp.train, cfg.normalize);
  p.train = apply_normalization(sp.train, p.norm);
  p.test = apply_normalization(sp.test, p.norm);
  p.train_raw = std::move(sp.train);
  p.test_raw = std::move(sp.test);
  return p;
}

std::vector<int> broadcast(const std::vector<int>& values, std::size_t n, const char* key) {
  if (values.size() == 1) return std::vector<int>(n, values.front());
  if (values.size() == n) return values;
  throw ParameterError(std::string(key) + " needs 1 or " + std::to_string(n) + " entries, got " +
                       std::to_string(values.size()));
}

Model base_model(ModelKind kind, const Prepared& p) {
  Model m;
  m.kind = kind;
  m.input_names = p.train.input_names;
  m.output_name = p.train.output_name;
  m.normalization = p.norm;
  return m;
}

Dataset as_dataset(const std::vector<Vector>& rows, const Dataset& like) {
  Dataset d;
  d.rows = rows;
  d.input_names = like.input_names;
  d.output_name = like.output_name;
  return d;
}

void score(IterationRecord& rec, const Model& m, const Prepared& p) {
  rec.train_error = evaluate(m, p.train_raw).error;
  rec.test_error = evaluate(m, p.test_raw).error;
  rec.rules = static_cast<int>(m.rule_count());
}

// ---------------------------------------------------------------------------
// Neuro-fuzzy pass shared by SONFIS and E-SONFIS.

struct NfisPass {
  SomGrid grid;
  TskRuleBase base;
  int granules = 0;
};

NfisPass nfis_pass(const RunConfig& cfg, const SomGrid& untrained, const Dataset& train,
                   std::vector<int> mfs) {
  NfisPass out;
  out.grid = train_som(untrained, train.rows, cfg.som_epochs, cfg.som_lr, cfg.som_radius);
  const auto g = extract_granules(out.grid, train.rows);
  out.granules = static_cast<int>(g.size());

  const bool centers = cfg.nfis_data == NfisData::kCenters;
  const std::vector<Vector>& rows = centers ? g.centers : train.rows;
  Vector weights;
  if (centers && cfg.nfis_weighted) weights.assign(g.occupancy.begin(), g.occupancy.end());

  // More MFs than distinct coordinates cannot be placed.
  for (std::size_t i = 0; i < mfs.size(); ++i) {
    std::set<double> distinct;
    for (const auto& r : rows) distinct.insert(r[i]);
    mfs[i] = std::min(mfs[i], static_cast<int>(distinct.size()));
  }
  GranularityLevel level{mfs, cfg.nfis_max_rules, cfg.error_target};
  const auto rb = init_tsk(rows, level);
  const TrainingSet ts{rows, weights};
  out.base = train_hybrid(rb, ts, cfg.nfis_epochs, cfg.nfis_lr, cfg.nfis_gd_steps).base;
  return out;
}

Model nfis_model(const Prepared& p, const NfisPass& pass) {
  Model m = base_model(ModelKind::kNfis, p);
  m.grid = pass.grid;
  m.tsk = pass.base;
  return m;
}

// ---------------------------------------------------------------------------
// Collaborative clustering helpers.

struct SiteGranulation {
  std::vector<std::pair<int, int>> shapes;
  std::vector<CrispGranules> granules;
};

SiteGranulation granulate_sites(const RunConfig& cfg, const Dataset& train, int k) {
  SiteGranulation out;
  Rng shape_rng(mix_seed(cfg.seed, kSeedShape + static_cast<std::uint64_t>(k)));
  std::pair<int, int> shared;
  if (cfg.equal_sites) {
    shared.first = shape_rng.between(cfg.site_min_side, cfg.site_max_side);
    shared.second = shape_rng.between(cfg.site_min_side, cfg.site_max_side);
  }
  const auto round_seed = mix_seed(cfg.seed, kSeedSiteGrid + static_cast<std::uint64_t>(k));
  for (int i = 0; i < cfg.sites; ++i) {
    std::pair<int, int> shape = shared;
    if (!cfg.equal_sites) {
      shape.first = shape_rng.between(cfg.site_min_side, cfg.site_max_side);
      shape.second = shape_rng.between(cfg.site_min_side, cfg.site_max_side);
    }
    const auto seed = mix_seed(round_seed, cfg.equal_sites ? 0 : static_cast<std::uint64_t>(i));
    auto grid = init_grid(shape.first, shape.second, static_cast<int>(train.width()), cfg.som_init, seed,
                          train.rows, 1);
    grid = train_som(grid, train.rows, cfg.som_epochs, cfg.som_lr, cfg.som_radius);
    out.shapes.push_back(shape);
    out.granules.push_back(extract_granules(grid, train.rows));
  }
  return out;
}

std::vector<SiteState> cluster_sites(const RunConfig& cfg, const SiteGranulation& g, int k, int c) {
  std::vector<SiteState> sites;
  const auto round_seed =
      mix_seed(cfg.seed, kSeedFcm + 1000 * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(c));
  for (int i = 0; i < cfg.sites; ++i) {
    FcmOptions opts;
    opts.clusters = c;
    opts.fuzzifier = kVccFuzzifier;
    opts.tol = cfg.fcm_tol;
    opts.max_iter = cfg.fcm_max_iter;
    opts.seed = mix_seed(round_seed, cfg.equal_sites ? 0 : static_cast<std::uint64_t>(i));
    sites.push_back(make_site(i, g.granules[static_cast<std::size_t>(i)], opts));
  }
  return sites;
}

CollaborationMatrix start_beta(const RunConfig& cfg, int restart) {
  auto beta = init_beta(cfg.sites, mix_seed(cfg.seed, kSeedBeta + static_cast<std::uint64_t>(restart)),
                        cfg.aco.beta_max);
  if (cfg.equal_sites) {
    // Twin sites need a symmetric start to stay twins.
    for (Eigen::Index i = 0; i < beta.beta.rows(); ++i) {
      for (Eigen::Index j = 0; j < i; ++j) beta.beta(i, j) = beta.beta(j, i);
    }
  }
  return beta;
}

int smallest_granulation(const SiteGranulation& g) {
  std::size_t n = g.granules.front().size();
  for (const auto& x : g.granules) n = std::min(n, x.size());
  return static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// Trace formatting.

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += f(v[i]);
  }
  return s;
}

std::string join_matrix(const Eigen::MatrixXd& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!s.empty()) s += ';';
      s += textio::fmt(m(i, j));
    }
  }
  return s;
}

}  // namespace

SplitPair run_split(const RunConfig& cfg, const Dataset& raw) {
  return split(raw, cfg.ratio, mix_seed(cfg.seed, kSeedSplit));
}

RestartAction close_open_restart(RestartMode mode, int k, int c, int k_star, int c_star) {
  const bool can_regranulate = k < k_star;
  const bool can_grow_c = c < c_star;
  if (mode == RestartMode::kCloseOpen) {
    if (can_regranulate) return RestartAction::kRegranulate;
    if (can_grow_c) return RestartAction::kIncreaseC;
  } else {
    if (can_grow_c) return RestartAction::kIncreaseC;
    if (can_regranulate) return RestartAction::kRegranulate;
  }
  return RestartAction::kStop;
}

RunReport run_sonfis(const RunConfig& cfg, const Dataset& data) {
  if (cfg.variant != Variant::kSonfis) throw ParameterError("run_sonfis needs variant sonfis");
  const auto p = prepare(cfg, data);
  const auto mfs = broadcast(cfg.nfis_mfs, p.train.n_inputs(), "nfis_mfs");
  RunReport report;
  report.config = cfg;

  GrowthPolicy policy;
  policy.kind = cfg.growth;
  policy.step = cfg.growth_step;
  policy.max_neurons = cfg.max_neurons;
  policy.seed = mix_seed(cfg.seed, kSeedGrowth);

  SomGrid grid = init_grid(cfg.som_rows, cfg.som_cols, static_cast<int>(p.train.width()), cfg.som_init,
                           mix_seed(cfg.seed, kSeedGrid), p.train.rows, 1);
  report.termination = Termination::kIterationLimit;
  for (int it = 1; it <= cfg.max_outer_iters; ++it) {
    const auto pass = nfis_pass(cfg, grid, p.train, mfs);
    report.model = nfis_model(p, pass);

    IterationRecord rec;
    rec.iteration = it;
    rec.grids = {{pass.grid.rows, pass.grid.cols}};
    rec.granules = {pass.granules};
    // Close-open check: errors always come from the real rows, not the granules.
    score(rec, report.model, p);

    if (rec.test_error <= cfg.error_target) {
      rec.event = "converged";
      report.termination = Termination::kConverged;
      report.records.push_back(std::move(rec));
      break;
    }
    if (it == cfg.max_outer_iters) {
      rec.event = "iteration-limit";
      report.records.push_back(std::move(rec));
      break;
    }
    auto grown = grow(grid, policy, rec.test_error, cfg.error_target);
    if (grown.status != GrowStatus::kGrown) {
      rec.event = "growth-exhausted";
      report.termination = Termination::kGrowthExhausted;
      report.records.push_back(std::move(rec));
      break;
    }
    rec.event = "grow";
    report.records.push_back(std::move(rec));
    grid = std::move(grown.grid);
  }
  return report;
}

RunReport run_sorst(const RunConfig& cfg, const Dataset& data) {
  const bool random_growth = cfg.variant == Variant::kSorstR;
  if (!random_growth && cfg.variant != Variant::kSorstAs) {
    throw ParameterError("run_sorst needs variant sorst-r or sorst-as");
  }
  const auto p = prepare(cfg, data);
  const auto n = p.train.n_inputs();
  auto bins = broadcast(cfg.rst_bins, n, "rst_bins");
  for (int& b : bins) b = std::min(b, cfg.rst_max_bins);
  RunReport report;
  report.config = cfg;

  StrengthPolicy strength;
  strength.threshold = cfg.strength_threshold;
  strength.adaptive = random_growth && cfg.strength_adaptive;
  strength.step = cfg.strength_step;
  strength.min = cfg.strength_min;
  strength.max = cfg.strength_max;

  GrowthPolicy policy;
  policy.kind = random_growth ? GrowthKind::kRandom : GrowthKind::kRegular;
  policy.step = cfg.growth_step;
  policy.max_neurons = cfg.max_neurons;
  policy.seed = mix_seed(cfg.seed, kSeedGrowth);

  SomGrid grid = init_grid(cfg.som_rows, cfg.som_cols, static_cast<int>(p.train.width()), cfg.som_init,
                           mix_seed(cfg.seed, kSeedGrid), p.train.rows, 1);
  bool stale = true;
  report.termination = Termination::kIterationLimit;
  for (int it = 1; it <= cfg.max_outer_iters; ++it) {
    if (stale) {
      grid = train_som(grid, p.train.rows, cfg.som_epochs, cfg.som_lr, cfg.som_radius);
      stale = false;
    }
    const auto g = extract_granules(grid, p.train.rows);
    auto all_bins = bins;
    all_bins.push_back(cfg.rst_decision_bins);
    const auto cuts = compute_cuts(p.train, all_bins, cfg.rst_strategy);
    const auto is = apply_cuts(as_dataset(g.centers, p.train), cuts);
    const auto induced = induce_rules(is, strength);

    Model m = base_model(ModelKind::kRst, p);
    m.grid = grid;
    m.cuts = cuts;
    m.rules = induced.rules;
    report.model = m;

    IterationRecord rec;
    rec.iteration = it;
    rec.grids = {{grid.rows, grid.cols}};
    rec.granules = {static_cast<int>(g.size())};
    rec.threshold = strength.threshold;
    rec.bins = bins;
    score(rec, m, p);

    if (induced.rules.empty()) {
      if (strength.adaptive && strength.threshold > strength.min && it < cfg.max_outer_iters) {
        strength.threshold = std::max(strength.min, strength.threshold - strength.step);
        rec.event = "lower-threshold";
        report.records.push_back(std::move(rec));
        continue;
      }
      rec.event = "unclassifiable";
      report.unclassifiable = true;
      report.termination = Termination::kIterationLimit;
      report.records.push_back(std::move(rec));
      break;
    }
    if (rec.test_error <= cfg.error_target) {
      rec.event = "converged";
      report.termination = Termination::kConverged;
      report.records.push_back(std::move(rec));
      break;
    }
    if (it == cfg.max_outer_iters) {
      rec.event = "iteration-limit";
      report.records.push_back(std::move(rec));
      break;
    }

    if (random_growth) {
      auto grown = grow(grid, policy);
      if (grown.status != GrowStatus::kGrown) {
        rec.event = "growth-exhausted";
        report.termination = Termination::kGrowthExhausted;
        report.records.push_back(std::move(rec));
        break;
      }
      grid = std::move(grown.grid);
      stale = true;
      if (strength.adaptive) strength = adapt_strength(strength, rec.test_error, cfg.error_target);
      rec.event = "grow";
    } else {
      const auto next = adapt_scaling(bins, rec.test_error, cfg.error_target, cfg.rst_max_bins,
                                      boundary_contributions(is));
      bool grew = false;
      if (cfg.sorst_as_grow) {
        auto grown = grow(grid, policy, rec.test_error, cfg.error_target);
        if (grown.status == GrowStatus::kGrown) {
          grid = std::move(grown.grid);
          stale = true;
          grew = true;
        }
      }
      if (next == bins && !grew) {
        rec.event = "growth-exhausted";
        report.termination = Termination::kGrowthExhausted;
        report.records.push_back(std::move(rec));
        break;
      }
      bins = next;
      rec.event = "rescale";
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

RunReport run_esonfis(const RunConfig& cfg, const Dataset& data) {
  if (cfg.variant != Variant::kESonfis) throw ParameterError("run_esonfis needs variant e-sonfis");
  if (cfg.ga_population < 2) throw ParameterError("ga_population must be >= 2");
  const auto p = prepare(cfg, data);
  const auto n = p.train.n_inputs();
  RunReport report;
  report.config = cfg;

  const std::size_t genes = 2 + n;
  auto upper = [&](std::size_t gene) {
    return gene == 0 ? cfg.ga_max_rows : gene == 1 ? cfg.ga_max_cols : cfg.ga_max_mfs;
  };
  using Chromosome = std::vector<int>;

  struct Eval {
    double fitness = -1e300;
    bool valid = false;
    IterationRecord rec;
    Model model;
  };
  std::map<Chromosome, Eval> cache;
  auto evaluate_chromosome = [&](const Chromosome& ch) -> const Eval& {
    if (auto it = cache.find(ch); it != cache.end()) return it->second;
    Eval e;
    try {
      const auto grid = init_grid(ch[0], ch[1], static_cast<int>(p.train.width()), cfg.som_init,
                                  mix_seed(cfg.seed, kSeedGrid), p.train.rows, 1);
      const auto pass = nfis_pass(cfg, grid, p.train, Chromosome(ch.begin() + 2, ch.end()));
      e.model = nfis_model(p, pass);
      e.rec.grids = {{ch[0], ch[1]}};
      e.rec.granules = {pass.granules};
      score(e.rec, e.model, p);
      e.fitness = -e.rec.test_error - cfg.ga_rule_penalty * e.rec.rules;
      e.valid = true;
    } catch (const Error&) {
      // Infeasible chromosome (e.g. too many rules); keeps the worst fitness.
    }
    return cache.emplace(ch, std::move(e)).first->second;
  };

  Rng rng(mix_seed(cfg.seed, kSeedGa));
  auto random_gene = [&](std::size_t gene) { return rng.between(1, upper(gene)); };

  std::vector<Chromosome> population;
  {
    Chromosome first{cfg.som_rows, cfg.som_cols};
    for (int m : broadcast(cfg.nfis_mfs, n, "nfis_mfs")) first.push_back(m);
    for (std::size_t g = 0; g < genes; ++g) first[g] = std::clamp(first[g], 1, upper(g));
    population.push_back(first);
  }
  while (static_cast<int>(population.size()) < cfg.ga_population) {
    Chromosome ch(genes);
    for (std::size_t g = 0; g < genes; ++g) ch[g] = random_gene(g);
    population.push_back(std::move(ch));
  }

  auto tournament = [&](const std::vector<Chromosome>& pop) -> const Chromosome& {
    std::size_t best = static_cast<std::size_t>(rng.below(pop.size()));
    for (int r = 1; r < cfg.ga_tournament; ++r) {
      const auto cand = static_cast<std::size_t>(rng.below(pop.size()));
      if (evaluate_chromosome(pop[cand]).fitness > evaluate_chromosome(pop[best]).fitness) best = cand;
    }
    return pop[best];
  };

  Chromosome best;
  double best_fitness = -1e301;
  for (int gen = 0; gen < cfg.ga_generations; ++gen) {
    if (gen > 0) {
      std::vector<Chromosome> next{best};
      while (static_cast<int>(next.size()) < cfg.ga_population) {
        Chromosome a = tournament(population);
        Chromosome b = tournament(population);
        if (rng.uniform() < cfg.ga_crossover) {
          const auto cut = static_cast<std::size_t>(rng.between(1, static_cast<int>(genes) - 1));
          for (std::size_t g = cut; g < genes; ++g) std::swap(a[g], b[g]);
        }
        for (auto* child : {&a, &b}) {
          for (std::size_t g = 0; g < genes; ++g) {
            if (rng.uniform() < cfg.ga_mutation) (*child)[g] = random_gene(g);
          }
        }
        next.push_back(std::move(a));
        if (static_cast<int>(next.size()) < cfg.ga_population) next.push_back(std::move(b));
      }
      population = std::move(next);
    }
    for (const auto& ch : population) {
      const auto& e = evaluate_chromosome(ch);
      if (e.fitness > best_fitness) {
        best_fitness = e.fitness;
        best = ch;
      }
    }
    const auto& e = evaluate_chromosome(best);
    if (!e.valid) throw ParameterError("no feasible chromosome in the search space");
    IterationRecord rec = e.rec;
    rec.iteration = gen;
    rec.event = "generation";
    report.records.push_back(std::move(rec));
  }

  const auto& winner = evaluate_chromosome(best);
  report.model = winner.model;
  report.best_chromosome = best;
  report.termination = winner.rec.test_error <= cfg.error_target ? Termination::kConverged
                                                                 : Termination::kIterationLimit;
  report.records.back().event = to_string(report.termination);
  return report;
}

RunReport run_sovcc(const RunConfig& cfg, const Dataset& data) {
  if (cfg.variant != Variant::kSovcc) throw ParameterError("run_sovcc needs variant sovcc");
  if (cfg.sites < 2) throw ParameterError("collaboration needs at least 2 sites");
  const auto p = prepare(cfg, data);
  RunReport report;
  report.config = cfg;

  const long long pass_limit = static_cast<long long>(cfg.max_outer_iters) * (cfg.k_star + 1) *
                               (cfg.c_star + 1);
  int k = 0;
  int c = cfg.clusters;
  int restarts = 0;

  // Step 2: crisp granules per site; Step 3: fuzzy clustering per site.
  auto granulation = granulate_sites(cfg, p.train, k);
  int c_cap = std::min(cfg.c_star, smallest_granulation(granulation));
  c = std::min(c, c_cap);
  auto sites = cluster_sites(cfg, granulation, k, c);
  auto beta = start_beta(cfg, restarts);
  auto pheromone = init_pheromone(cfg.sites, cfg.aco);

  report.termination = Termination::kIterationLimit;
  for (;;) {
    if (report.step4_passes >= pass_limit) throw InternalError("collaboration loop exceeded its pass bound");

    // Step 4: collaborate, extract local rules, score each site.
    sites = vcc_iterate(std::move(sites), beta, cfg.vcc_sweeps);
    Vector deltas;
    Model m = base_model(ModelKind::kVcc, p);
    for (auto& s : sites) {
      auto fit = extract_linear_rules(s);
      s.linear_rules = std::move(fit.rules);
      s.rank_deficient = fit.rank_deficient;
      s.delta_eps = site_error(s, p.test);
      deltas.push_back(s.delta_eps);
      m.sites.push_back(SiteModel{s.linear_rules, {}});
    }
    ++report.step4_passes;
    report.model = m;

    IterationRecord rec;
    rec.iteration = report.step4_passes;
    rec.k = k;
    rec.c = c;
    rec.t = pheromone.t;
    rec.grids = granulation.shapes;
    for (const auto& g : granulation.granules) rec.granules.push_back(static_cast<int>(g.size()));
    rec.deltas = deltas;
    rec.tau = pheromone.tau;
    rec.beta = beta.beta;
    score(rec, m, p);

    if (converged(deltas, cfg.aco.xi)) {
      rec.event = "converged";
      report.termination = Termination::kConverged;
      report.records.push_back(std::move(rec));
      break;
    }

    // Step 5: one pheromone update per pass until the cycle holds t* passes.
    if (pheromone.t + 1 < cfg.aco.t_star) {
      const auto shares = normalize_errors(deltas);
      pheromone = update_pheromone(pheromone, delta_pheromone(shares, cfg.aco.dtau_cap));
      beta = beta_from_pheromone(pheromone);
      ++report.pheromone_updates;
      rec.event = "aco";
      report.records.push_back(std::move(rec));
      continue;
    }

    const auto action = close_open_restart(cfg.restart, k, c, cfg.k_star, c_cap);
    rec.event = to_string(action);
    report.records.push_back(std::move(rec));
    if (action == RestartAction::kStop) {
      report.termination = Termination::kIterationLimit;
      break;
    }
    if (action == RestartAction::kRegranulate) {
      ++k;
      granulation = granulate_sites(cfg, p.train, k);
      c_cap = std::min(cfg.c_star, smallest_granulation(granulation));
      c = std::min(c, c_cap);
    } else {
      ++c;
    }
    sites = cluster_sites(cfg, granulation, k, c);
    ++restarts;
    beta = start_beta(cfg, restarts);
    pheromone = init_pheromone(cfg.sites, cfg.aco);
  }

  // Rough-set rules over each site's granules.
  auto all_bins = broadcast(cfg.rst_bins, p.train.n_inputs(), "rst_bins");
  all_bins.push_back(cfg.rst_decision_bins);
  report.model.cuts = compute_cuts(p.train, all_bins, cfg.rst_strategy);
  StrengthPolicy strength;
  strength.threshold = cfg.strength_threshold;
  strength.min = cfg.strength_min;
  strength.max = cfg.strength_max;
  for (std::size_t i = 0; i < report.model.sites.size(); ++i) {
    const auto is = apply_cuts(as_dataset(granulation.granules[i].centers, p.train), report.model.cuts);
    report.model.sites[i].rough_rules = induce_rules(is, strength).rules;
  }
  return report;
}

RunReport run(const RunConfig& cfg, const Dataset& data) {
  switch (cfg.variant) {
    case Variant::kSonfis: return run_sonfis(cfg, data);
    case Variant::kSorstR:
    case Variant::kSorstAs: return run_sorst(cfg, data);
    case Variant::kESonfis: return run_esonfis(cfg, data);
    case Variant::kSovcc: return run_sovcc(cfg, data);
  }
  throw InternalError("unknown variant");
}

void write_trace(std::ostream& out, const RunReport& report) {
  using textio::fmt;
  write_config(out, report.config, true);
  out << "iteration,event,k,c,t,grid,granules,rules,train_error,test_error,threshold,bins,"
         "delta_eps,tau,beta\n";
  for (const auto& r : report.records) {
    out << r.iteration << ',' << r.event << ',' << r.k << ',' << r.c << ',' << r.t << ','
        << join(r.grids, [](const auto& g) { return std::to_string(g.first) + "x" + std::to_string(g.second); })
        << ',' << join(r.granules, [](int g) { return std::to_string(g); }) << ',' << r.rules << ','
        << fmt(r.train_error) << ',' << fmt(r.test_error) << ','
        << (r.threshold >= 0.0 ? fmt(r.threshold) : std::string()) << ','
        << join(r.bins, [](int b) { return std::to_string(b); }) << ','
        << join(r.deltas, [](double d) { return fmt(d); }) << ',' << join_matrix(r.tau) << ','
        << join_matrix(r.beta) << '\n';
  }
  out << "# termination=" << to_string(report.termination) << '\n';
  out << "# iterations=" << report.records.size() << '\n';
  out << "# final_train_error=" << fmt(report.final_train_error()) << '\n';
  out << "# final_test_error=" << fmt(report.final_test_error()) << '\n';
  out << "# rules=" << report.model.rule_count() << '\n';
  out << "# unclassifiable=" << (report.unclassifiable ? "true" : "false") << '\n';
  if (report.config.variant == Variant::kSovcc) {
    out << "# step4_passes=" << report.step4_passes << '\n';
    out << "# pheromone_updates=" << report.pheromone_updates << '\n';
  }
  if (!report.best_chromosome.empty()) {
    out << "# best_chromosome=" << join(report.best_chromosome, [](int g) { return std::to_string(g); })
        << '\n';
  }
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kGrowthExhausted: return "growth-exhausted";
    case Termination::kIterationLimit: return "iteration-limit";
  }
  return "?";
}

const char* to_string(RestartAction a) {
  switch (a) {
    case RestartAction::kRegranulate: return "regranulate";
    case RestartAction::kIncreaseC: return "increase-c";
    case RestartAction::kStop: return "stop";
  }
  return "?";
}

}  // namespace gran
