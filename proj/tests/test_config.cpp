#include <doctest.h>

#include <set>
#include <sstream>

#include "granular/config.hpp"
#include "granular/error.hpp"

using namespace gran;

TEST_CASE("every key round-trips through a dump") {
  RunConfig cfg;
  set_config_value(cfg, "variant", "sovcc");
  set_config_value(cfg, "som_grid", "3x4");
  set_config_value(cfg, "nfis_mfs", "2,3");
  set_config_value(cfg, "aco_rho", "0.25");
  set_config_value(cfg, "restart", "open-close");
  set_config_value(cfg, "equal_sites", "true");
  std::stringstream buf;
  write_config(buf, cfg);
  RunConfig back;
  apply_config_text(back, buf);
  CHECK(dump_config(back) == dump_config(cfg));
  CHECK(back.som_rows == 3);
  CHECK(back.som_cols == 4);
  CHECK(back.nfis_mfs == std::vector<int>{2, 3});
  CHECK(back.aco.rho == 0.25);
  CHECK(back.restart == RestartMode::kOpenClose);

  const auto defaults = dump_config(RunConfig{});
  CHECK(defaults.size() == config_keys().size());
  std::set<std::string> names;
  for (const auto& k : config_keys()) {
    names.insert(k.name);
    CHECK_FALSE(k.doc.empty());
    // Each dumped value is accepted back for its own key.
    RunConfig probe;
    CHECK_NOTHROW(set_config_value(probe, k.name, get_config_value(RunConfig{}, k.name)));
  }
  CHECK(names.size() == config_keys().size());
}

TEST_CASE("unknown keys and bad values are rejected") {
  RunConfig cfg;
  CHECK_THROWS_AS(set_config_value(cfg, "no_such_key", "1"), ParameterError);
  CHECK_THROWS_AS(set_config_value(cfg, "seed", "abc"), ParameterError);
  CHECK_THROWS_AS(set_config_value(cfg, "variant", "mamdani"), ParameterError);
  CHECK_THROWS_AS(set_config_value(cfg, "som_grid", "3by4"), ParameterError);
  CHECK_THROWS_AS(set_config_value(cfg, "equal_sites", "maybe"), ParameterError);
  CHECK(is_sweepable("som_grid"));
  CHECK_FALSE(is_sweepable("variant"));
  CHECK_FALSE(is_sweepable("data"));
}

TEST_CASE("config text handles comments and reports the failing line") {
  std::istringstream ok("# header\n\nseed = 9   # trailing\nratio=0.5\n");
  RunConfig cfg;
  apply_config_text(cfg, ok);
  CHECK(cfg.seed == 9);
  CHECK(cfg.ratio == 0.5);

  std::istringstream bad("seed=1\nnot a pair\n");
  try {
    apply_config_text(cfg, bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream unknown("seed=1\nbogus=3\n");
  CHECK_THROWS_AS(apply_config_text(cfg, unknown), ParseError);
  CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent/granular.cfg"), Error);
}

TEST_CASE("commented headers prefix every line") {
  std::ostringstream out;
  write_config(out, RunConfig{}, true);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("# ", 0) == 0);
    ++lines;
  }
  CHECK(lines == static_cast<int>(config_keys().size()));
}

TEST_CASE("validation ranges") {
  CHECK_NOTHROW(RunConfig{}.validate());
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ParameterError);
  };
  bad([](RunConfig& c) { c.ratio = 1.0; });
  bad([](RunConfig& c) { c.error_target = 0.0; });
  bad([](RunConfig& c) { c.max_outer_iters = 0; });
  bad([](RunConfig& c) { c.sites = 1; });
  bad([](RunConfig& c) { c.c_star = 1; c.clusters = 2; });
  bad([](RunConfig& c) { c.aco.rho = 0.0; });
  bad([](RunConfig& c) { c.strength_threshold = 0.9; });
  bad([](RunConfig& c) { c.som_rows = 0; });
  bad([](RunConfig& c) { c.variant = Variant::kSovcc; c.aco.t_star = 50; });
}

TEST_CASE("variant names") {
  for (auto v : {Variant::kSonfis, Variant::kSorstR, Variant::kSorstAs, Variant::kESonfis, Variant::kSovcc}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK_THROWS_AS(parse_variant("anfis"), ParameterError);
}
