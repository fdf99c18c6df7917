#include "normsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "normsim/errors.hpp"

namespace normsim {

double monoculture_fraction(int r, int g, int b) {
  const int total = r + g + b;
  if (total <= 0) throw std::invalid_argument("monoculture_fraction: empty site set");
  return static_cast<double>(std::max({r, g, b})) / total;
}

double inverted_minimal_fraction(int d1, int d2, bool* both_zero) {
  if (d1 + d2 == 0) {
    if (both_zero == nullptr) throw BothZero("inverted_minimal_fraction: d1 = d2 = 0");
    *both_zero = true;
    return 1.0;
  }
  if (both_zero != nullptr) *both_zero = false;
  return 1.0 - static_cast<double>(std::min(d1, d2)) / (d1 + d2);
}

double EpisodeStats::collective_return() const {
  double total = 0.0;
  for (double r : extrinsic_return) total += r;
  return total;
}

double EpisodeStats::monoculture_second_half_mean() const {
  const size_t n = berry_counts.size();
  if (n == 0) return 0.0;
  double sum = 0.0;
  size_t count = 0;
  for (size_t t = n / 2; t < n; ++t) {
    sum += monoculture_fraction(berry_counts[t][0], berry_counts[t][1], berry_counts[t][2]);
    ++count;
  }
  return sum / static_cast<double>(count);
}

double EpisodeStats::inverted_minimal_mean() const {
  if (pollution_counts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : pollution_counts) {
    bool both_zero = false;
    sum += inverted_minimal_fraction(d[0], d[1], &both_zero);
  }
  return sum / static_cast<double>(pollution_counts.size());
}

namespace {

double smoothed_log_rate(const EpisodeStats& s, DisplayColor color) {
  const int c = static_cast<int>(color);
  return std::log((s.hits_by_color[c] + 1.0) / (s.agent_steps_by_color[c] + 2.0));
}

}  // namespace

TeachingSignals teaching_signals(const EpisodeStats& stats) {
  DisplayColor dominant, second;
  if (stats.kind == EnvKind::AllelopathicHarvest) {
    // Dominance by end-of-episode berry counts.
    const auto& end = stats.berry_counts.back();
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return end[a] > end[b]; });
    dominant = static_cast<DisplayColor>(order[0] + 1);
    second = static_cast<DisplayColor>(order[1] + 1);
  } else {
    // Dominance by cleaned-type counts; type 1 tints red, type 2 green.
    const bool one_dominant = stats.cleans_by_type[0] >= stats.cleans_by_type[1];
    dominant = one_dominant ? DisplayColor::Red : DisplayColor::Green;
    second = one_dominant ? DisplayColor::Green : DisplayColor::Red;
  }
  TeachingSignals out;
  const double dom = smoothed_log_rate(stats, dominant);
  out.signal1 = smoothed_log_rate(stats, DisplayColor::Gray) - dom;
  out.signal2 = smoothed_log_rate(stats, second) - dom;
  return out;
}

std::vector<std::array<double, 3>> simplex_samples(const EpisodeStats& stats, int stride) {
  std::vector<std::array<double, 3>> out;
  for (size_t t = 0; t < stats.berry_counts.size(); t += static_cast<size_t>(stride)) {
    const auto& c = stats.berry_counts[t];
    const double total = c[0] + c[1] + c[2];
    if (total <= 0) continue;
    out.push_back({c[0] / total, c[1] / total, c[2] / total});
  }
  return out;
}

}  // namespace normsim
