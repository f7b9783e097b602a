#include "qfolio/commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "qfolio/error.hpp"
#include "qfolio/expert_eval.hpp"
#include "qfolio/kernels.hpp"
#include "qfolio/manifest.hpp"
#include "qfolio/market_data.hpp"
#include "qfolio/oracle.hpp"
#include "qfolio/qubo.hpp"

namespace qfolio::cli {

namespace fs = std::filesystem;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Data: return kExitData;
    case ErrorKind::Internal: return kExitInternal;
  }
  return kExitInternal;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(kind_of(e.code()));
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream text;
  text << f.rdbuf();
  return nlohmann::json::parse(text.str());
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LoadedProblem {
  std::vector<PriceSeries> series;
  MarketSnapshot snapshot;
  QuboProblem problem;
};

LoadedProblem load_problem(const ExperimentManifest& m) {
  LoadedProblem lp;
  lp.series = load_prices(m.prices_path(), m.universe, m.data_window);
  lp.snapshot = compute_snapshot(lp.series);
  lp.problem = build_qubo(lp.snapshot, m.q, m.resolved_alpha(), m.budget);
  return lp;
}

fs::path result_path(const fs::path& experiment_dir, const RunMetadata& meta) {
  return experiment_dir / std::string(to_string(meta.family)) / std::to_string(meta.depth) /
         std::to_string(meta.seed) / "result.json";
}

std::string convergence_csv(const std::vector<RunResult>& runs) {
  std::string out = "family,depth,seed,t,cost\n";
  for (const auto& r : runs)
    for (const auto& e : r.trace.evaluations)
      out += std::string(to_string(r.metadata.family)) + "," + std::to_string(r.metadata.depth) + "," +
             std::to_string(r.metadata.seed) + "," + std::to_string(e.t) + "," + g17(e.cost) + "\n";
  return out;
}

// Final-histogram probabilities averaged over the seeds of each (family, depth).
std::string histogram_csv(const std::vector<RunResult>& runs) {
  std::map<std::pair<AnsatzFamily, std::size_t>, std::pair<std::map<std::uint64_t, double>, std::size_t>> groups;
  std::vector<std::pair<AnsatzFamily, std::size_t>> order;
  std::size_t n = 0;
  for (const auto& r : runs) {
    const auto key = std::make_pair(r.metadata.family, r.metadata.depth);
    if (!groups.contains(key)) order.push_back(key);
    auto& [probs, count] = groups[key];
    for (const auto& [bits, c] : r.trace.final_histogram.counts) probs[bits] += r.trace.final_histogram.probability(bits);
    ++count;
    n = r.metadata.n;
  }
  std::string out = "family,depth,bitstring,probability\n";
  for (const auto& key : order) {
    const auto& [probs, count] = groups[key];
    for (const auto& [bits, p] : probs)
      out += std::string(to_string(key.first)) + "," + std::to_string(key.second) + "," + Bitstring(n, bits).str() +
             "," + g17(p / static_cast<double>(count)) + "\n";
  }
  return out;
}

std::vector<RunResult> collect_results(const fs::path& run_dir) {
  std::vector<RunResult> runs;
  if (!fs::is_directory(run_dir)) throw Error(ErrorCode::Io, run_dir.string() + " is not a directory");
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(run_dir))
    if (entry.is_regular_file() && entry.path().filename() == "result.json") paths.push_back(entry.path());
  if (paths.empty()) throw Error(ErrorCode::Io, "no result.json files under " + run_dir.string());
  for (const auto& p : paths) runs.push_back(run_result_from_json(read_json(p)));
  std::sort(runs.begin(), runs.end(), [](const RunResult& a, const RunResult& b) {
    return std::tie(a.metadata.family, a.metadata.depth, a.metadata.seed) <
           std::tie(b.metadata.family, b.metadata.depth, b.metadata.seed);
  });
  return runs;
}

ExperimentManifest manifest_from_run_dir(const fs::path& run_dir) {
  const auto path = run_dir / "run_manifest.json";
  if (!fs::exists(path)) throw Error(ErrorCode::Io, "missing " + path.string());
  const auto j = read_json(path);
  return parse_manifest(j.at("manifest"), run_dir);
}

}  // namespace

std::optional<std::int64_t> parse_seed_offset(const char* text) {
  if (!text || !*text) return std::int64_t{0};
  std::int64_t v = 0;
  const std::string_view s(text);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_tickers(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto token = text.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) out.emplace_back(token);
    start = end + 1;
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 initialisation failed");
  char buf[1 << 16];
  while (f.read(buf, sizeof buf) || f.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(f.gcount()));
    if (!f) break;
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  static constexpr char kHex[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

int cmd_optimize(const OptimizeOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto m = load_manifest(options.manifest);
    if (options.cost_mode) m.optimizer.cost_mode = *options.cost_mode;
    if (options.shots) m.optimizer.shots = *options.shots;
    if (options.out) m.output_dir = *options.out;
    m.validate();

    if (options.dump_config) {
      out << to_json(m).dump(2) << "\n";
      return kExitOk;
    }

    std::vector<std::uint64_t> seeds;
    for (auto s : m.seeds) seeds.push_back(s + static_cast<std::uint64_t>(options.seed_offset));

    const auto loaded = load_problem(m);
    GridOptions grid;
    grid.jobs = options.jobs.value_or(1);
    const auto runs = run_experiment_grid(loaded.problem, m.families, m.depths, seeds, m.optimizer, grid);

    const auto dir = m.experiment_dir();
    nlohmann::json run_list = nlohmann::json::array();
    for (const auto& r : runs) {
      const auto path = result_path(dir, r.metadata);
      write_text(path, to_json(r, options.full_trace).dump(2) + "\n");
      run_list.push_back(fs::relative(path, dir).generic_string());
    }
    write_text(dir / "convergence.csv", convergence_csv(runs));
    write_text(dir / "histogram.csv", histogram_csv(runs));

    nlohmann::json oracle = nullptr;
    if (loaded.problem.n <= kMaxOracleQubits) oracle = solve_exact(loaded.problem);
    nlohmann::json run_manifest{
        {"manifest", to_json(m)},
        {"seed_offset", options.seed_offset},
        {"effective_seeds", seeds},
        {"data",
         {{"path", fs::absolute(m.prices_path()).lexically_normal().string()},
          {"sha256", sha256_file(m.prices_path())},
          {"first_date", loaded.snapshot.dates.front().iso()},
          {"last_date", loaded.snapshot.dates.back().iso()},
          {"observations", loaded.snapshot.dates.size()},
          {"convention", loaded.snapshot.convention}}},
        {"problem", loaded.problem},
        {"oracle", oracle},
        {"kernels", kernels::active().name},
        {"runs", run_list}};
    write_text(dir / "run_manifest.json", run_manifest.dump(2) + "\n");

    out << "wrote " << runs.size() << " runs to " << dir.string() << "\n";
    return kExitOk;
  });
}

int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto m = load_manifest(options.manifest);
    if (options.out) m.output_dir = *options.out;
    m.validate();
    if (m.universe.size() > kMaxOracleQubits)
      throw Error(ErrorCode::TooLarge, std::to_string(m.universe.size()) + " assets exceed the exhaustive bound of " +
                                           std::to_string(kMaxOracleQubits));
    const auto loaded = load_problem(m);
    const auto result = solve_exact(loaded.problem);

    nlohmann::json j = result;
    j["n"] = loaded.problem.n;
    j["scanned"] = std::uint64_t{1} << loaded.problem.n;
    j["budget"] = m.budget;
    j["tickers"] = m.universe;
    if (result.feasible_best) {
      std::vector<std::string> picked;
      for (std::size_t i = 0; i < m.universe.size(); ++i)
        if (result.feasible_best->bits[i]) picked.push_back(m.universe[i]);
      j["feasible_best_tickers"] = picked;
    }
    write_text(m.experiment_dir() / "oracle.json", j.dump(2) + "\n");
    out << j.dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_backtest(const BacktestOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto runs = collect_results(options.run_dir);
    const auto m = manifest_from_run_dir(options.run_dir);
    const auto window = options.future_window ? options.future_window : m.future_window;
    if (!window) throw Error(ErrorCode::InvalidConfig, "no future window in the manifest or on the command line");

    const auto future = load_prices(m.prices_path(), m.universe, *window);
    const auto loaded = load_problem(m);
    FeasibilityOptions feas;
    feas.negative_trend_threshold = options.negative_trend_threshold;
    for (const auto& s : loaded.series) feas.trailing_returns.emplace(s.ticker, period_return(s));

    std::vector<Portfolio> portfolios;
    for (const auto& r : runs) {
      const auto& top = r.top().bits;
      if (top.popcount() == 0) continue;
      portfolios.push_back(Portfolio::from_selection(
          m.universe, top, PortfolioSource::run(r.metadata.family, r.metadata.depth, r.metadata.seed)));
    }
    for (const auto& set : m.manual_portfolios) portfolios.push_back(Portfolio::from_tickers(m.universe, set));
    for (const auto& set : options.manual) portfolios.push_back(Portfolio::from_tickers(m.universe, set));

    const auto report = backtest(portfolios, future, *window);
    OracleResult oracle;
    if (loaded.problem.n <= kMaxOracleQubits) oracle = solve_exact(loaded.problem);
    const auto summary = feasibility_summary(report, oracle, runs, m.universe, feas);

    const auto dir = options.out.value_or(options.run_dir);
    const auto md = to_markdown(report, &summary);
    write_text(dir / "backtest.md", md);
    write_text(dir / "backtest.json",
               nlohmann::json{{"report", to_json(report)}, {"feasibility", to_json(summary)}}.dump(2) + "\n");
    out << md;
    return kExitOk;
  });
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto runs = collect_results(options.run_dir);
    double offset = 0.0;
    if (const auto path = options.run_dir / "run_manifest.json"; fs::exists(path))
      offset = read_json(path).at("problem").at("offset").get<double>();

    struct Row {
      AnsatzFamily family;
      std::size_t depth;
      std::size_t runs = 0;
      double sum_best = 0.0;
      double min_best = 0.0;
      std::size_t matches = 0;
      std::size_t with_truth = 0;
    };
    std::vector<Row> rows;
    for (const auto& r : runs) {
      if (rows.empty() || rows.back().family != r.metadata.family || rows.back().depth != r.metadata.depth)
        rows.push_back({r.metadata.family, r.metadata.depth});
      auto& row = rows.back();
      const double best = r.trace.best_cost + offset;
      row.min_best = row.runs == 0 ? best : std::min(row.min_best, best);
      row.sum_best += best;
      ++row.runs;
      if (r.ground_truth) {
        ++row.with_truth;
        if (r.top().bits == r.ground_truth->bits) ++row.matches;
      }
    }

    std::ostringstream md;
    nlohmann::json rows_json = nlohmann::json::array();
    md << "| Family | Depth | Runs | Mean best cost | Min best cost | Top = ground truth |\n"
          "|---|---:|---:|---:|---:|---:|\n";
    for (const auto& row : rows) {
      const double mean = row.sum_best / static_cast<double>(row.runs);
      char line[256];
      std::snprintf(line, sizeof line, "| %s | %zu | %zu | %.6f | %.6f | %s |\n",
                    std::string(to_string(row.family)).c_str(), row.depth, row.runs, mean, row.min_best,
                    row.with_truth ? (std::to_string(row.matches) + "/" + std::to_string(row.with_truth)).c_str()
                                   : "-");
      md << line;
      rows_json.push_back({{"family", to_string(row.family)},
                           {"depth", row.depth},
                           {"runs", row.runs},
                           {"mean_best_cost", mean},
                           {"min_best_cost", row.min_best},
                           {"ground_truth_matches", row.matches},
                           {"runs_with_ground_truth", row.with_truth}});
    }
    write_text(options.run_dir / "report.md", md.str());
    write_text(options.run_dir / "report.json", nlohmann::json{{"offset", offset}, {"rows", rows_json}}.dump(2) + "\n");
    out << md.str();
    return kExitOk;
  });
}

}  // namespace qfolio::cli
