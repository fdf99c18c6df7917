#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "normsim/errors.hpp"
#include "normsim/metrics.hpp"
#include "normsim/rng.hpp"

using namespace normsim;

TEST_CASE("monoculture fraction: anchors and permutation invariance") {
  CHECK(monoculture_fraction(384, 0, 0) == 1.0);
  CHECK(monoculture_fraction(128, 128, 128) == doctest::Approx(1.0 / 3.0));
  CHECK(monoculture_fraction(200, 100, 84) == doctest::Approx(200.0 / 384.0));
  // Invariant under color permutation.
  CHECK(monoculture_fraction(10, 20, 70) == monoculture_fraction(70, 10, 20));
  CHECK(monoculture_fraction(10, 20, 70) == monoculture_fraction(20, 70, 10));
}

TEST_CASE("inverted minimal fraction: anchors, symmetry, both-zero convention") {
  CHECK(inverted_minimal_fraction(0, 200) == 1.0);
  CHECK(inverted_minimal_fraction(100, 100) == 0.5);
  CHECK(inverted_minimal_fraction(30, 90) == doctest::Approx(0.75));
  CHECK(inverted_minimal_fraction(30, 90) == inverted_minimal_fraction(90, 30));
  CHECK_THROWS_AS(inverted_minimal_fraction(0, 0), BothZero);
  bool flag = false;
  CHECK(inverted_minimal_fraction(0, 0, &flag) == 1.0);
  CHECK(flag);
  inverted_minimal_fraction(1, 2, &flag);
  CHECK_FALSE(flag);
}

TEST_CASE("episode metrics: second-half monoculture mean, whole-episode inverted mean") {
  EpisodeStats s;
  s.kind = EnvKind::AllelopathicHarvest;
  // First half balanced, second half dominated.
  for (int t = 0; t < 10; ++t) s.berry_counts.push_back({10, 10, 10});
  for (int t = 0; t < 10; ++t) s.berry_counts.push_back({30, 0, 0});
  CHECK(s.monoculture_second_half_mean() == doctest::Approx(1.0));

  EpisodeStats c;
  c.kind = EnvKind::CleanUp;
  c.pollution_counts.push_back({100, 100});
  c.pollution_counts.push_back({0, 200});
  CHECK(c.inverted_minimal_mean() == doctest::Approx(0.75));
}

TEST_CASE("collective return sums extrinsic only") {
  EpisodeStats s;
  s.extrinsic_return = {1.0, -10.0, 4.0};
  s.pseudo_return = {100.0, 100.0, 100.0};
  CHECK(s.collective_return() == doctest::Approx(-5.0));
}

TEST_CASE("teaching signals: equal rates give zero, known rates recover the contrast") {
  EpisodeStats s;
  s.kind = EnvKind::AllelopathicHarvest;
  s.berry_counts.push_back({300, 40, 8});  // dominant red, second green
  // Equal smoothed rates across colors -> both signals zero.
  for (int c = 0; c < 4; ++c) {
    s.hits_by_color[c] = 9;
    s.agent_steps_by_color[c] = 999;
  }
  const TeachingSignals zero = teaching_signals(s);
  CHECK(zero.signal1 == doctest::Approx(0.0));
  CHECK(zero.signal2 == doctest::Approx(0.0));

  // Gray zapped at 0.01/step, dominant at 0.001/step over 1e5 agent-steps:
  // signal1 recovers ln 10.
  s.hits_by_color = {1000, 100, 9, 9};
  s.agent_steps_by_color = {100000, 100000, 999, 999};
  const TeachingSignals t = teaching_signals(s);
  CHECK(t.signal1 == doctest::Approx(std::log(10.0)).epsilon(0.01));

  // No gray steps at all: the smoothed prior keeps it finite.
  s.hits_by_color[0] = 0;
  s.agent_steps_by_color[0] = 0;
  const TeachingSignals safe = teaching_signals(s);
  CHECK(std::isfinite(safe.signal1));
}

TEST_CASE("teaching signals on synthetic generative logs recover the log-rate difference") {
  // Draw hits from known Bernoulli rates and check the estimator within
  // 3 standard errors of the true log contrast.
  RngStream rng(77);
  const double rate_gray = 8e-3, rate_dom = 1e-3;
  const long steps = 200000;
  EpisodeStats s;
  s.kind = EnvKind::AllelopathicHarvest;
  s.berry_counts.push_back({300, 40, 8});
  long hits_gray = 0, hits_dom = 0;
  for (long k = 0; k < steps; ++k) {
    hits_gray += rng.bernoulli(rate_gray) ? 1 : 0;
    hits_dom += rng.bernoulli(rate_dom) ? 1 : 0;
  }
  s.hits_by_color = {hits_gray, hits_dom, 1, 1};
  s.agent_steps_by_color = {steps, steps, 100, 100};
  const TeachingSignals t = teaching_signals(s);
  // Delta-method s.e. of the log-rate difference from Bernoulli draws.
  const double se = std::sqrt((1 - rate_gray) / (steps * rate_gray) +
                              (1 - rate_dom) / (steps * rate_dom));
  CHECK(std::abs(t.signal1 - std::log(rate_gray / rate_dom)) < 3 * se + 0.02);
}

TEST_CASE("teaching signals pick dominance from cleaned types in CSP") {
  EpisodeStats s;
  s.kind = EnvKind::CleanUp;
  s.pollution_counts.push_back({50, 50});
  s.cleans_by_type = {10, 90};  // type 2 dominant -> green dominant
  s.hits_by_color = {50, 5, 20, 0};
  s.agent_steps_by_color = {1000, 1000, 1000, 10};
  const TeachingSignals t = teaching_signals(s);
  const double p_gray = 51.0 / 1002.0, p_green = 21.0 / 1002.0, p_red = 6.0 / 1002.0;
  CHECK(t.signal1 == doctest::Approx(std::log(p_gray) - std::log(p_green)));
  CHECK(t.signal2 == doctest::Approx(std::log(p_red) - std::log(p_green)));
}

TEST_CASE("simplex samples: corners, center, stride arithmetic") {
  EpisodeStats s;
  s.kind = EnvKind::AllelopathicHarvest;
  for (int t = 0; t < 2000; ++t) s.berry_counts.push_back({40, 0, 0});
  auto samples = simplex_samples(s, 100);
  CHECK(samples.size() == 20);
  CHECK(samples[0] == std::array<double, 3>{1.0, 0.0, 0.0});

  EpisodeStats c;
  c.kind = EnvKind::AllelopathicHarvest;
  c.berry_counts.push_back({16, 16, 16});
  const auto center = simplex_samples(c, 1);
  CHECK(center[0][0] == doctest::Approx(1.0 / 3.0));
  CHECK(center[0][1] == doctest::Approx(1.0 / 3.0));
  CHECK(center[0][2] == doctest::Approx(1.0 / 3.0));
}
