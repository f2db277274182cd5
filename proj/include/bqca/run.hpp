#ifndef BQCA_RUN_HPP
#define BQCA_RUN_HPP

// Experiment runner: executes a parsed config and emits the requested
// output files plus a run manifest.  Reruns of the same config produce
// bit-identical data files; the manifest additionally records wall time.

#include "bqca/config.hpp"
#include "bqca/metrics.hpp"
#include "bqca/version.hpp"

#include <chrono>
#include <filesystem>

namespace bqca {

struct RunOptions {
  bool emit_schedule = false;
};

struct RunResult {
  std::vector<std::filesystem::path> files;
};

namespace run_detail {

inline Eigen::Vector2cd token_state(char c) {
  switch (c) {
    case '0': return {1, 0};
    case '1': return {0, 1};
    case '+': return Eigen::Vector2cd{1, 1} / std::sqrt(2.0);
    default: return Eigen::Vector2cd{1, -1} / std::sqrt(2.0);
  }
}

inline PureState initial_pure(const ExperimentConfig& cfg) {
  std::vector<Eigen::Vector2cd> sites(cfg.n, Eigen::Vector2cd{1, 0});
  if (const auto* t = std::get_if<InitialTokens>(&cfg.initial)) {
    for (int j = 0; j < cfg.n; ++j) sites[j] = token_state(t->tokens[j]);
  } else {
    const auto& seed = std::get<InitialSeed>(cfg.initial);
    sites[seed.site] = seed.state;
  }
  return init_product(cfg.n, sites);
}

struct Recorder {
  const ExperimentConfig& cfg;
  std::vector<Eigen::VectorXd> p1_rows, entropy_rows;
  std::vector<double> r_series, mixedness_series, tangle_series;
  std::vector<std::vector<int>> schmidt_rows;

  bool wants(OutputKind k) const {
    return std::find(cfg.outputs.begin(), cfg.outputs.end(), k) != cfg.outputs.end();
  }

  void record(const PureState& s) {
    if (wants(OutputKind::P1Diagram) || wants(OutputKind::EntropyDiagram)) {
      SiteProfiles p = site_profiles(s);
      p1_rows.push_back(p.p1);
      entropy_rows.push_back(p.entropy);
    }
    if (wants(OutputKind::RSeries)) r_series.push_back(measure_R(s));
    if (wants(OutputKind::TangleSeries)) tangle_series.push_back(average_pair_tangle(s));
    if (wants(OutputKind::SchmidtHistogram)) schmidt_rows.push_back(schmidt_histogram(s));
  }

  void record(const DensityMatrix& r) {
    if (wants(OutputKind::P1Diagram) || wants(OutputKind::EntropyDiagram)) {
      SiteProfiles p = site_profiles(r);
      p1_rows.push_back(p.p1);
      entropy_rows.push_back(p.entropy);
    }
    if (wants(OutputKind::MixednessSeries)) mixedness_series.push_back(mixedness(r));
    if (wants(OutputKind::TangleSeries)) tangle_series.push_back(average_pair_tangle(r));
  }

  //! Schmidt ranks over all bipartitions containing site 0, binned by rank.
  static std::vector<int> schmidt_histogram_of(const PureState& s) {
    int n = s.n;
    std::vector<int> hist(size_t{1} << (n / 2), 0);
    for (long bits = 1; bits < (1L << (n - 1)); ++bits) {
      std::vector<int> subset{0};
      for (int j = 1; j < n; ++j) {
        if ((bits >> (j - 1)) & 1) subset.push_back(j);
      }
      if (static_cast<int>(subset.size()) == n) continue;
      int rank = schmidt_rank(s, subset);
      if (rank >= 1 && rank <= static_cast<int>(hist.size())) ++hist[rank - 1];
    }
    return hist;
  }
  std::vector<int> schmidt_histogram(const PureState& s) { return schmidt_histogram_of(s); }
};

inline Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows) {
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) m.row(r) = rows[r];
  return m;
}

inline std::optional<PulseSchedule> program_schedule(const ExperimentConfig& cfg) {
  if (const auto* rp = std::get_if<RuleProgram>(&cfg.program)) {
    return compile_step(rp->rule);
  }
  if (const auto* sp = std::get_if<SequencePreset>(&cfg.program)) {
    return sequence_by_name(sp->name, cfg.n).schedule;
  }
  return std::nullopt;
}

}  // namespace run_detail

inline RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                     const RunOptions& opt = {}) {
  namespace fs = std::filesystem;
  auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);

  run_detail::Recorder rec{cfg};

  if (cfg.engine == Engine::Pure) {
    PureState s = run_detail::initial_pure(cfg);
    rec.record(s);
    if (const auto* rp = std::get_if<RuleProgram>(&cfg.program)) {
      for (int t = 0; t < cfg.steps; ++t) {
        step(s, rp->rule, cfg.boundary);
        rec.record(s);
      }
    } else if (const auto* sp = std::get_if<SequencePreset>(&cfg.program)) {
      SequenceProgram prog = sequence_by_name(sp->name, cfg.n);
      execute(prog, s, [&rec](int, const PureState& st) { rec.record(st); });
    }
  } else {
    DensityMatrix rho = DensityMatrix::from_pure(run_detail::initial_pure(cfg));
    rec.record(rho);
    if (const auto* cp = std::get_if<ChannelProgram>(&cfg.program)) {
      for (int t = 0; t < cfg.steps; ++t) {
        channel_step(rho, cp->channel, cfg.boundary);
        rec.record(rho);
      }
    } else if (const auto* rp = std::get_if<RuleProgram>(&cfg.program)) {
      NeighborhoodChannel lifted = unitary_channel(rp->rule);
      for (int t = 0; t < cfg.steps; ++t) {
        channel_step(rho, lifted, cfg.boundary);
        rec.record(rho);
      }
    }
  }

  RunResult result;
  auto emit = [&](const std::string& name, auto writer) {
    fs::path p = out_dir / name;
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    writer(os);
    result.files.push_back(p);
  };

  bool want_schedule = rec.wants(OutputKind::Schedule) || opt.emit_schedule;
  for (OutputKind k : cfg.outputs) {
    switch (k) {
      case OutputKind::P1Diagram:
        emit("p1.csv",
             [&](std::ostream& os) { write_diagram_csv(run_detail::stack_rows(rec.p1_rows), os); });
        emit("p1.pgm",
             [&](std::ostream& os) { write_diagram_pgm(run_detail::stack_rows(rec.p1_rows), os); });
        break;
      case OutputKind::EntropyDiagram:
        emit("entropy.csv", [&](std::ostream& os) {
          write_diagram_csv(run_detail::stack_rows(rec.entropy_rows), os);
        });
        emit("entropy.pgm", [&](std::ostream& os) {
          write_diagram_pgm(run_detail::stack_rows(rec.entropy_rows), os);
        });
        break;
      case OutputKind::RSeries:
        emit("r_series.csv", [&](std::ostream& os) { write_series_csv(rec.r_series, os); });
        break;
      case OutputKind::MixednessSeries:
        emit("mixedness_series.csv",
             [&](std::ostream& os) { write_series_csv(rec.mixedness_series, os); });
        break;
      case OutputKind::TangleSeries:
        emit("tangle_series.csv",
             [&](std::ostream& os) { write_series_csv(rec.tangle_series, os); });
        break;
      case OutputKind::SchmidtHistogram:
        emit("schmidt_histogram.csv", [&](std::ostream& os) {
          size_t ranks = rec.schmidt_rows.empty() ? 0 : rec.schmidt_rows[0].size();
          os << "step";
          for (size_t r = 1; r <= ranks; ++r) os << ",rank_" << r;
          os << "\n";
          for (size_t t = 0; t < rec.schmidt_rows.size(); ++t) {
            os << t;
            for (int c : rec.schmidt_rows[t]) os << "," << c;
            os << "\n";
          }
        });
        break;
      case OutputKind::Schedule:
        break;  // handled below so --emit-schedule shares the same path
    }
  }
  if (want_schedule) {
    auto sch = run_detail::program_schedule(cfg);
    if (!sch) {
      throw ConfigError("outputs", "schedules are only defined for rule and sequence programs");
    }
    emit("schedule.json",
         [&](std::ostream& os) { os << schedule_to_json(*sch).dump(2) << "\n"; });
  }

  auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  nlohmann::json manifest{{"config_hash", fnv1a_hex(cfg.source.dump())},
                          {"version", kVersion},
                          {"wall_time_ms", wall_ms},
                          {"outputs", nlohmann::json::array()}};
  for (const auto& f : result.files) manifest["outputs"].push_back(f.filename().string());
  {
    std::ofstream os(out_dir / "manifest.json");
    os << manifest.dump(2) << "\n";
    result.files.push_back(out_dir / "manifest.json");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Canned experiment configs for the space-time and metric figures.
// ---------------------------------------------------------------------------

inline std::vector<std::pair<std::string, nlohmann::json>> figure_configs() {
  using nlohmann::json;
  auto fixed00 = json{{"fixed", {{"sigma_l", 0}, {"sigma_r", 0}}}};
  auto diagrams = json::array({"p1-diagram", "entropy-diagram"});
  std::vector<std::pair<std::string, json>> out;

  out.emplace_back("fig1_transport", json{{"n", 14},
                                          {"boundary", fixed00},
                                          {"initial", {{"seed", {{"site", 0}, {"state", "+"}}}}},
                                          {"engine", "pure"},
                                          {"program", {{"sequence", {{"preset", "transport"}}}}},
                                          {"outputs", diagrams}});
  out.emplace_back("fig2_swap", json{{"n", 14},
                                     {"boundary", fixed00},
                                     {"initial", {{"tokens", "1000000000000+"}}},
                                     {"engine", "pure"},
                                     {"program", {{"sequence", {{"preset", "swap"}}}}},
                                     {"outputs", diagrams}});
  out.emplace_back("fig3a_bell", json{{"n", 14},
                                      {"boundary", fixed00},
                                      {"initial", {{"seed", {{"site", 6}, {"state", "+"}}}}},
                                      {"engine", "pure"},
                                      {"program", {{"sequence", {{"preset", "bell"}}}}},
                                      {"outputs", diagrams}});
  out.emplace_back("fig3b_ghz", json{{"n", 14},
                                     {"boundary", fixed00},
                                     {"initial", {{"seed", {{"site", 6}, {"state", "+"}}}}},
                                     {"engine", "pure"},
                                     {"program", {{"sequence", {{"preset", "ghz"}}}}},
                                     {"outputs", diagrams}});
  const char* fig4_names[3] = {"fig4a_left_one", "fig4b_right_one", "fig4c_both_ones"};
  const char* fig4_tokens[3] = {"1000000000", "0000000001", "1000000001"};
  for (int i = 0; i < 3; ++i) {
    out.emplace_back(fig4_names[i],
                     json{{"n", 10},
                          {"boundary", fixed00},
                          {"initial", {{"tokens", fig4_tokens[i]}}},
                          {"engine", "pure"},
                          {"program", {{"rule", {{"preset", "M1"}}}}},
                          {"steps", 13},
                          {"outputs", json::array({"p1-diagram"})}});
  }
  out.emplace_back("fig5a_m1", json{{"n", 10},
                                    {"boundary", fixed00},
                                    {"initial", {{"tokens", "+00000000+"}}},
                                    {"engine", "pure"},
                                    {"program", {{"rule", {{"preset", "M1"}}}}},
                                    {"steps", 143},
                                    {"outputs", diagrams}});
  out.emplace_back("fig5b_m2", json{{"n", 10},
                                    {"boundary", fixed00},
                                    {"initial", {{"tokens", "+00000000+"}}},
                                    {"engine", "pure"},
                                    {"program", {{"rule", {{"preset", "M2"}}}}},
                                    {"steps", 150},
                                    {"outputs", diagrams}});
  for (const char* preset : {"M1", "M2"}) {
    out.emplace_back(std::string("fig6_") + (preset[1] == '1' ? "m1" : "m2"),
                     json{{"n", 10},
                          {"boundary", fixed00},
                          {"initial", {{"tokens", "+00000000+"}}},
                          {"engine", "pure"},
                          {"program", {{"rule", {{"preset", preset}}}}},
                          {"steps", 150},
                          {"outputs", json::array({"R-series", "schmidt-histogram"})}});
  }
  for (double p : {0.5, 1.0}) {
    out.emplace_back(p == 0.5 ? "fig8_p05" : "fig8_p10",
                     json{{"n", 6},
                          {"boundary", fixed00},
                          {"initial", {{"tokens", "++++++"}}},
                          {"engine", "density"},
                          {"program", {{"channel", {{"preset", "mixed"}, {"p", p}}}}},
                          {"steps", 30},
                          {"outputs", json::array({"mixedness-series", "tangle-series"})}});
  }
  return out;
}

}  // namespace bqca

#endif
