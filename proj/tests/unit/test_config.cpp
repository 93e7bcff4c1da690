#include "qac/config.hpp"
#include "qac/sweep.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace qac;

TEST(Config, ParsesFlatKeyValues) {
  const auto cfg = RunConfig::parse("# sweep\nseed = 42\n  tau = 1, 2 ,3   # inline\nmode = \"clamped\"\n\n");
  EXPECT_EQ(cfg.unsigned_integer("seed", 0), 42u);
  EXPECT_EQ(cfg.list("tau", ""), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(cfg.require("mode"), "clamped");
  EXPECT_EQ(cfg.get("missing", "x"), "x");
  EXPECT_THROW(cfg.require("missing"), std::invalid_argument);
  EXPECT_THROW(RunConfig::parse("seed 42\n"), parse_error);
  EXPECT_THROW(RunConfig::parse(" = 3\n"), parse_error);
}

TEST(Config, TypedAccessors) {
  RunConfig cfg;
  cfg.set("a", "2.5");
  cfg.set("b", "x");
  cfg.set("c", "true");
  cfg.set("d", "-3");
  EXPECT_EQ(cfg.number("a", 0), 2.5);
  EXPECT_THROW(cfg.number("b", 0), std::invalid_argument);
  EXPECT_THROW(cfg.integer("a", 0), std::invalid_argument);
  EXPECT_TRUE(cfg.flag("c", false));
  EXPECT_THROW(cfg.flag("b", false), std::invalid_argument);
  EXPECT_EQ(cfg.integer("d", 0), -3);
  EXPECT_THROW(cfg.unsigned_integer("d", 0), std::invalid_argument);
  EXPECT_EQ(cfg.number("zz", 7.0), 7.0);
}

TEST(Config, Grids) {
  EXPECT_EQ(RunConfig::parse_list("linspace(0, 2, 5)"), (std::vector<double>{0, 0.5, 1, 1.5, 2}));
  const auto lg = RunConfig::parse_list("logspace(0.1, 100, 4)");
  ASSERT_EQ(lg.size(), 4u);
  EXPECT_EQ(lg.front(), 0.1);
  EXPECT_NEAR(lg[1], 1.0, 1e-12);
  EXPECT_NEAR(lg[2], 10.0, 1e-12);
  EXPECT_EQ(lg.back(), 100.0);
  EXPECT_EQ(RunConfig::parse_list("linspace(0, 2, 41)").size(), 41u);
  EXPECT_THROW(RunConfig::parse_list("logspace(0, 1, 3)"), std::invalid_argument);
  EXPECT_THROW(RunConfig::parse_list("linspace(0, 1)"), std::invalid_argument);
  EXPECT_THROW(RunConfig::parse_list("1, two"), std::invalid_argument);
}

TEST(Config, CanonicalFormAndHash) {
  const auto a = RunConfig::parse("b = 2\na = 1\n");
  const auto b = RunConfig::parse("a=1\n# comment\nb=2");
  EXPECT_EQ(a.canonical(), "a = 1\nb = 2\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash(), hex64(fnv1a64("a = 1\nb = 2\n")));
  auto c = a;
  c.set("b", "3");
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Config, EmbeddedHeaderRoundTrip) {
  RunConfig cfg;
  cfg.set("seed", "5");
  cfg.set("tau", "logspace(0.1, 100, 13)");
  std::ostringstream os;
  for (const auto& line : cfg.header_lines("title"))
    os << "# " << line << '\n';
  os << "tau,mean_P\n1,0.5\n";
  const auto back = RunConfig::parse(os.str());
  EXPECT_EQ(back.values(), cfg.values());
  EXPECT_NE(os.str().find("# config_hash: " + cfg.hash()), std::string::npos);
}

TEST(SweepConfig, DefaultsAndValidation) {
  RunConfig user;
  user.set("seed", "9");
  user.set("n_real", "10");
  const auto cfg = resolve_sweep_config("tau", user);
  EXPECT_EQ(cfg.require("kind"), "tau");
  EXPECT_EQ(cfg.require("n_real"), "10");
  EXPECT_EQ(cfg.require("mode"), "clamped");
  EXPECT_EQ(cfg.list("tau", "").size(), 13u);
  EXPECT_EQ(resolve_sweep_config("amplitude", user).list("W_h", "").size(), 41u);

  EXPECT_THROW(resolve_sweep_config("tau", RunConfig{}), std::invalid_argument); // no seed
  auto unknown = user;
  unknown.set("bogus", "1");
  EXPECT_THROW(resolve_sweep_config("tau", unknown), std::invalid_argument);
  auto wrong_kind = user;
  wrong_kind.set("kind", "density");
  EXPECT_THROW(resolve_sweep_config("tau", wrong_kind), std::invalid_argument);
  EXPECT_THROW(resolve_sweep_config("nope", user), std::invalid_argument);
}

TEST(SweepConfig, RerunFromOutputIsByteIdentical) {
  RunConfig user;
  user.set("seed", "3");
  user.set("n_real", "6");
  user.set("tau", "0.5, 2");
  std::ostringstream first;
  run_sweep(resolve_sweep_config("tau", user), first);
  std::ostringstream second;
  run_sweep(resolve_sweep_config("tau", RunConfig::parse(first.str())), second, {3, {}});
  EXPECT_EQ(first.str(), second.str());
}
