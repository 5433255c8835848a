#include <CLI11.hpp>

#include <iostream>

#include "slotzero/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"slotzero: Gumbel search over a slot-based graph world model"};
  app.require_subcommand(1);

  sz::cli::TrainOptions train;
  std::string train_config, train_out, train_resume;
  std::uint64_t train_seed = 0;
  auto* t = app.add_subcommand("train", "train an agent from a YAML run config");
  t->add_option("--config", train_config, "run config (YAML)");
  auto* seed_opt = t->add_option("--seed", train_seed, "override the run seed");
  t->add_option("--out", train_out, "output directory (relative paths honour SLOTZERO_OUTPUT_ROOT)");
  t->add_option("--set", train.overrides, "override a key, e.g. --set trainer.gamma=0.95");
  t->add_option("--resume", train_resume, "continue from a checkpoint");
  t->add_flag("--quiet", train.quiet, "suppress per-evaluation progress lines");

  sz::cli::EvalOptions eval;
  std::string eval_ckpt;
  std::uint64_t eval_seed = 0;
  auto* e = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
  e->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  e->add_option("--episodes", eval.episodes, "episode count")->capture_default_str();
  auto* eval_seed_opt = e->add_option("--seed", eval_seed, "episode seed");

  bool fast = false;
  auto* v = app.add_subcommand("verify", "run the oracle suite");
  v->add_flag("--fast", fast, "smaller trial counts");

  sz::cli::PlotOptions plot;
  std::string plot_metrics, plot_out;
  auto* p = app.add_subcommand("plot", "learning curves (SVG) and a summary table from metrics.csv");
  p->add_option("--metrics", plot_metrics, "metrics CSV")->required();
  p->add_option("--out", plot_out, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? sz::cli::kExitOk : sz::cli::kExitUsage;
  }

  if (t->parsed()) {
    if (!train_config.empty()) train.config = train_config;
    if (!train_out.empty()) train.out = train_out;
    if (!train_resume.empty()) train.resume = train_resume;
    if (seed_opt->count() > 0) train.seed = train_seed;
    return sz::cli::cmd_train(train, std::cout, std::cerr);
  }
  if (e->parsed()) {
    eval.checkpoint = eval_ckpt;
    if (eval_seed_opt->count() > 0) eval.seed = eval_seed;
    return sz::cli::cmd_eval(eval, std::cout, std::cerr);
  }
  if (v->parsed()) return sz::cli::cmd_verify(fast, std::cout, std::cerr);
  plot.metrics = plot_metrics;
  plot.out = plot_out;
  return sz::cli::cmd_plot(plot, std::cout, std::cerr);
}
