#include "normsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "normsim/csvio.hpp"
#include "normsim/maps.hpp"
#include "normsim/errors.hpp"
#include "normsim/svgplot.hpp"
#include "normsim/trainer.hpp"
#include "normsim/version.hpp"

namespace normsim {

namespace fs = std::filesystem;

std::string resolve_run_dir(const ExperimentConfig& cfg) {
  std::string dir = cfg.output_dir;
  if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && root[0] != '\0')
    dir = std::string(root) + "/" + fs::path(dir).filename().string();
  return dir;
}

namespace {

std::string seed_dir_of(const std::string& run_dir, uint64_t seed) {
  return run_dir + "/seed_" + std::to_string(seed);
}

std::vector<uint64_t> run_seeds(const std::string& run_dir) {
  const CsvTable t = read_csv(run_dir + "/seeds.csv");
  std::vector<uint64_t> out;
  for (const auto& row : t.rows) out.push_back(std::stoull(row[0]));
  return out;
}

struct SeriesSet {
  std::vector<std::vector<double>> x, y;  // per seed
};

// Reads one column per seed from episodes.csv, row-aligned by file order.
SeriesSet read_episode_series(const std::string& run_dir, const std::vector<uint64_t>& seeds,
                              const std::string& column) {
  SeriesSet set;
  for (uint64_t s : seeds) {
    const CsvTable t = read_csv(seed_dir_of(run_dir, s) + "/episodes.csv");
    const int ci = t.column(column), xi = t.column("env_step_start");
    if (ci < 0 || xi < 0) throw std::runtime_error("episodes.csv: missing column " + column);
    std::vector<std::pair<double, double>> rows;
    for (const auto& r : t.rows)
      rows.emplace_back(std::stod(r[xi]), std::stod(r[ci]));
    std::sort(rows.begin(), rows.end());
    std::vector<double> x, y;
    for (auto& [a, b] : rows) {
      x.push_back(a);
      y.push_back(b);
    }
    set.x.push_back(std::move(x));
    set.y.push_back(std::move(y));
  }
  return set;
}

void write_aggregate(const std::string& path, const SeriesSet& set,
                     const std::vector<uint64_t>& seeds) {
  size_t rows = SIZE_MAX;
  for (const auto& y : set.y) rows = std::min(rows, y.size());
  if (rows == SIZE_MAX) rows = 0;
  std::vector<std::string> header = {"env_step", "mean", "std"};
  for (uint64_t s : seeds) header.push_back("seed_" + std::to_string(s));
  CsvWriter out(path, header);
  for (size_t r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (const auto& y : set.y) mean += y[r];
    mean /= static_cast<double>(set.y.size());
    double var = 0.0;
    for (const auto& y : set.y) var += (y[r] - mean) * (y[r] - mean);
    const double sd = set.y.size() > 1 ? std::sqrt(var / (set.y.size() - 1)) : 0.0;
    std::vector<std::string> row = {format_double(set.x[0][r]), format_double(mean),
                                    format_double(sd)};
    for (const auto& y : set.y) row.push_back(format_double(y[r]));
    out.row(row);
  }
}

}  // namespace

void aggregate_run(const std::string& run_dir) {
  const auto seeds = run_seeds(run_dir);
  for (const auto& [file, column] :
       std::vector<std::pair<std::string, std::string>>{{"aggregate_returns.csv",
                                                         "collective_return"},
                                                        {"aggregate_metric.csv", "env_metric"},
                                                        {"aggregate_zaps.csv", "zap_actions"}}) {
    const SeriesSet set = read_episode_series(run_dir, seeds, column);
    write_aggregate(run_dir + "/" + file, set, seeds);
  }
  // Balanced accuracy: mean over agents per env_step, then across seeds.
  bool have_acc = true;
  SeriesSet acc;
  for (uint64_t s : seeds) {
    const std::string path = seed_dir_of(run_dir, s) + "/balanced_accuracy.csv";
    if (!fs::exists(path)) {
      have_acc = false;
      break;
    }
    const CsvTable t = read_csv(path);
    const int xi = t.column("env_step"), vi = t.column("balanced_accuracy");
    std::map<double, std::pair<double, int>> bins;
    for (const auto& r : t.rows) {
      auto& [sum, count] = bins[std::stod(r[xi])];
      sum += std::stod(r[vi]);
      count++;
    }
    std::vector<double> x, y;
    for (const auto& [step, agg] : bins) {
      x.push_back(step);
      y.push_back(agg.first / agg.second);
    }
    acc.x.push_back(std::move(x));
    acc.y.push_back(std::move(y));
  }
  if (have_acc && !acc.x.empty())
    write_aggregate(run_dir + "/aggregate_balanced_accuracy.csv", acc, seeds);
}

std::string run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.resolve_and_validate();
  const std::string run_dir = resolve_run_dir(cfg);
  fs::create_directories(run_dir);
  {
    std::ofstream m(run_dir + "/manifest.txt");
    m << "engine_version=" << kEngineVersion << "\n";
    m << "config_hash=" << cfg.hash() << "\n";
    std::ofstream c(run_dir + "/config.txt");
    c << cfg.canonical();
    CsvWriter seeds_csv(run_dir + "/seeds.csv", {"seed"});
    for (uint64_t s : cfg.seeds) seeds_csv.row({std::to_string(s)});
  }

  // Seeds are independent workers; run them across hardware threads.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const size_t parallel = std::min<size_t>(hw, cfg.seeds.size());
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  for (size_t p = 0; p < parallel; ++p) {
    pool.emplace_back([&]() {
      while (true) {
        const size_t k = next.fetch_add(1);
        if (k >= cfg.seeds.size()) return;
        try {
          run_seed(cfg, cfg.seeds[k], seed_dir_of(run_dir, cfg.seeds[k]));
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  aggregate_run(run_dir);
  return run_dir;
}

int validate_run(const std::string& run_dir) {
  const ExperimentConfig cfg = load_config_file(run_dir + "/config.txt");
  const auto seeds = run_seeds(run_dir);
  int mismatches = 0;
  for (uint64_t s : seeds) {
    const std::string sdir = seed_dir_of(run_dir, s);
    const ExperimentConfig seed_cfg = load_config_file(sdir + "/config.txt");
    if (seed_cfg.hash() != cfg.hash()) {
      mismatches++;
      continue;
    }
    // Index recorded rows.
    const CsvTable episodes = read_csv(sdir + "/episodes.csv");
    const CsvTable teaching = read_csv(sdir + "/teaching_signals.csv");
    std::map<std::pair<int, int>, std::vector<std::string>> ep_rows, teach_rows;
    for (const auto& r : episodes.rows)
      ep_rows[{std::stoi(r[1]), std::stoi(r[0])}] = r;  // (worker, episode)
    for (const auto& r : teaching.rows) teach_rows[{std::stoi(r[1]), std::stoi(r[0])}] = r;
    std::map<std::string, std::vector<std::string>> simplex_rows;
    const bool is_ah = map_asset(cfg.environment).kind == EnvKind::AllelopathicHarvest;
    if (is_ah) {
      const CsvTable simplex = read_csv(sdir + "/simplex.csv");
      for (const auto& r : simplex.rows)
        simplex_rows[r[0] + "," + r[1] + "," + r[2] + "," + r[3]] = r;
    }

    if (!fs::exists(sdir + "/replays")) continue;
    for (const auto& entry : fs::directory_iterator(sdir + "/replays")) {
      EpisodeStats stats;
      try {
        stats = resimulate_replay(cfg, entry.path().string());
      } catch (const ReplayError&) {
        mismatches++;
        continue;
      }
      const auto key = std::make_pair(stats.worker, stats.episode_index);
      const auto it = ep_rows.find(key);
      if (it == ep_rows.end() || it->second != episode_csv_row(stats)) mismatches++;
      const auto jt = teach_rows.find(key);
      if (jt == teach_rows.end() || jt->second != teaching_csv_row(stats)) mismatches++;
      if (is_ah) {
        for (const auto& row : simplex_csv_rows(stats, cfg.metric_stride)) {
          const std::string k = row[0] + "," + row[1] + "," + row[2] + "," + row[3];
          if (simplex_rows.find(k) == simplex_rows.end()) mismatches++;
        }
      }
    }
  }
  return mismatches;
}

void emit_plots(const std::string& run_dir) {
  std::ofstream report(run_dir + "/emission_report.txt");
  const auto seeds = run_seeds(run_dir);
  static constexpr const char* kSeedColors[] = {"#88a",  "#8a8", "#a88", "#8aa", "#a8a",
                                                "#aa8",  "#99c", "#9c9", "#c99", "#9cc"};

  auto line_plot_from_aggregate = [&](const std::string& csv, const std::string& svg,
                                      const std::string& title, const std::string& ylabel) {
    const std::string path = run_dir + "/" + csv;
    if (!fs::exists(path)) {
      report << "skipped " << svg << ": missing " << csv << "\n";
      return;
    }
    const CsvTable t = read_csv(path);
    if (t.rows.empty()) {
      report << "skipped " << svg << ": empty " << csv << "\n";
      return;
    }
    std::vector<PlotSeries> series;
    for (size_t k = 3; k < t.header.size(); ++k) {
      PlotSeries s;
      s.color = kSeedColors[(k - 3) % 10];
      s.opacity = 0.6;
      for (const auto& r : t.rows) {
        s.x.push_back(std::stod(r[0]));
        s.y.push_back(std::stod(r[k]));
      }
      series.push_back(std::move(s));
    }
    PlotSeries mean;
    mean.thick = true;
    mean.color = "#b33";
    for (const auto& r : t.rows) {
      mean.x.push_back(std::stod(r[0]));
      mean.y.push_back(std::stod(r[1]));
    }
    series.push_back(std::move(mean));
    write_line_plot(run_dir + "/" + svg, title, "environment steps", ylabel, series);
    report << "wrote " << svg << "\n";
  };

  line_plot_from_aggregate("aggregate_returns.csv", "collective_return.svg",
                           "Collective return", "collective return");
  line_plot_from_aggregate("aggregate_metric.csv", "env_metric.svg",
                           "Environment metric", "metric");
  line_plot_from_aggregate("aggregate_zaps.csv", "zaps.svg", "Zaps per episode", "zap actions");
  line_plot_from_aggregate("aggregate_balanced_accuracy.csv", "balanced_accuracy.svg",
                           "Classifier balanced accuracy", "balanced accuracy");

  // Teaching signals: mean per episode rank across seeds.
  {
    bool ok = true;
    std::vector<std::vector<double>> sig1, sig2;
    for (uint64_t s : seeds) {
      const std::string path = run_dir + "/seed_" + std::to_string(s) + "/teaching_signals.csv";
      if (!fs::exists(path)) {
        ok = false;
        break;
      }
      const CsvTable t = read_csv(path);
      std::vector<double> a, b;
      for (const auto& r : t.rows) {
        a.push_back(std::stod(r[2]));
        b.push_back(std::stod(r[3]));
      }
      sig1.push_back(std::move(a));
      sig2.push_back(std::move(b));
    }
    if (ok && !sig1.empty()) {
      size_t rows = SIZE_MAX;
      for (const auto& v : sig1) rows = std::min(rows, v.size());
      PlotSeries m1, m2;
      m1.thick = m2.thick = true;
      m1.color = "#b33";
      m2.color = "#33b";
      for (size_t r = 0; r < rows; ++r) {
        double a = 0, b = 0;
        for (size_t k = 0; k < sig1.size(); ++k) {
          a += sig1[k][r];
          b += sig2[k][r];
        }
        m1.x.push_back(static_cast<double>(r));
        m1.y.push_back(a / sig1.size());
        m2.x.push_back(static_cast<double>(r));
        m2.y.push_back(b / sig2.size());
      }
      write_line_plot(run_dir + "/teaching_signals.svg", "Teaching signals (1 red, 2 blue)",
                      "episode", "log-likelihood difference", {m1, m2});
      report << "wrote teaching_signals.svg\n";
    } else {
      report << "skipped teaching_signals.svg: missing teaching_signals.csv\n";
    }
  }

  // Simplex scatter, early vs late windows (AH runs only).
  {
    std::vector<TernarySample> early, late;
    double max_step = 0.0;
    bool any = false;
    for (uint64_t s : seeds) {
      const std::string path = run_dir + "/seed_" + std::to_string(s) + "/simplex.csv";
      if (!fs::exists(path)) continue;
      any = true;
      const CsvTable t = read_csv(path);
      for (const auto& r : t.rows) max_step = std::max(max_step, std::stod(r[0]));
    }
    if (any && max_step > 0) {
      for (uint64_t s : seeds) {
        const std::string path = run_dir + "/seed_" + std::to_string(s) + "/simplex.csv";
        if (!fs::exists(path)) continue;
        const CsvTable t = read_csv(path);
        for (const auto& r : t.rows) {
          const double step = std::stod(r[0]);
          TernarySample sample{{std::stod(r[1]), std::stod(r[2]), std::stod(r[3])},
                               step / max_step};
          // Fig-style windows: first 40% of training vs the remainder.
          (step <= 0.4 * max_step ? early : late).push_back(sample);
        }
      }
      write_ternary_plot(run_dir + "/simplex_early.svg", "Berry shares, first 40% of training",
                         early);
      write_ternary_plot(run_dir + "/simplex_late.svg", "Berry shares, last 60% of training",
                         late);
      report << "wrote simplex_early.svg\nwrote simplex_late.svg\n";
    } else {
      report << "skipped simplex plots: missing simplex.csv\n";
    }
  }
}

}  // namespace normsim
