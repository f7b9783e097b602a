#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "qfolio/commands.hpp"
#include "qfolio/date.hpp"

namespace cli = qfolio::cli;

int main(int argc, char** argv) {
  CLI::App app{"Portfolio selection with simulated variational quantum circuits"};
  app.require_subcommand(1);

  cli::OptimizeOptions opt;
  std::string cost_mode;
  auto* optimize = app.add_subcommand("optimize", "Run the ansatz x depth x seed grid from a manifest");
  optimize->add_option("--manifest", opt.manifest, "Experiment manifest (JSON)")->required();
  optimize->add_option("--jobs", opt.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  optimize->add_option("--cost-mode", cost_mode, "exact or sampled")->check(CLI::IsMember({"exact", "sampled"}));
  optimize->add_option("--shots", opt.shots, "Shots per sampled evaluation and for final histograms");
  optimize->add_option("--out", opt.out, "Output root (overrides output_dir)");
  optimize->add_flag("--dump-config", opt.dump_config, "Print the resolved manifest and exit");
  optimize->add_flag("--full-trace", opt.full_trace, "Store theta for every evaluation");

  cli::OracleOptions orc;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive ground truth for a manifest's QUBO");
  oracle->add_option("--manifest", orc.manifest, "Experiment manifest (JSON)")->required();
  oracle->add_option("--out", orc.out, "Output root (overrides output_dir)");

  cli::BacktestOptions bt;
  std::string future;
  std::vector<std::string> manual;
  auto* backtest = app.add_subcommand("backtest", "Score selected portfolios on a later window");
  backtest->add_option("--run-dir", bt.run_dir, "Experiment directory written by optimize")->required();
  backtest->add_option("--future-window", future, "YYYY-MM-DD:YYYY-MM-DD (default: manifest future_window)");
  backtest->add_option("--manual", manual, "Extra portfolio as comma-separated tickers (repeatable)");
  backtest->add_option("--out", bt.out, "Report directory (default: run dir)");
  backtest->add_option("--negative-trend", bt.negative_trend_threshold, "Trailing return flag threshold in %");

  cli::ReportOptions rep;
  auto* report = app.add_subcommand("report", "Summarise a run directory per family and depth");
  report->add_option("--run-dir", rep.run_dir, "Experiment directory written by optimize")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  if (optimize->parsed()) {
    if (!cost_mode.empty()) opt.cost_mode = qfolio::parse_cost_mode(cost_mode);
    const auto offset = cli::parse_seed_offset(std::getenv("QFOLIO_SEED_OFFSET"));
    if (!offset) {
      std::cerr << "error: QFOLIO_SEED_OFFSET must be an integer\n";
      return cli::kExitConfig;
    }
    opt.seed_offset = *offset;
    return cli::cmd_optimize(opt, std::cout, std::cerr);
  }
  if (oracle->parsed()) return cli::cmd_oracle(orc, std::cout, std::cerr);
  if (backtest->parsed()) {
    if (!future.empty()) {
      bt.future_window = qfolio::parse_range(future);
      if (!bt.future_window) {
        std::cerr << "error: --future-window must be YYYY-MM-DD:YYYY-MM-DD\n";
        return cli::kExitConfig;
      }
    }
    for (const auto& m : manual) bt.manual.push_back(cli::split_tickers(m));
    return cli::cmd_backtest(bt, std::cout, std::cerr);
  }
  return cli::cmd_report(rep, std::cout, std::cerr);
}
