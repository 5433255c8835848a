#include "slotzero/cli/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "slotzero/cli/checkpoint.hpp"
#include "slotzero/cli/config.hpp"
#include "slotzero/cli/metrics.hpp"
#include "slotzero/cli/plot.hpp"
#include "slotzero/planner/search.hpp"
#include "slotzero/trainer/run.hpp"
#include "slotzero/util/seed.hpp"
#include "slotzero/verify/suite.hpp"

namespace sz::cli {

namespace fs = std::filesystem;

fs::path resolve_output_dir(const std::string& dir) {
  fs::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
      return fs::path(root) / p;
    }
  }
  return p;
}

namespace {

std::string checkpoint_name(std::int64_t env_steps) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "step_%09lld.ckpt", static_cast<long long>(env_steps));
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  trainer::RunConfig config;
  std::optional<Checkpoint> resume;
  try {
    if (o.resume) {
      if (!fs::exists(*o.resume)) {
        err << "train: checkpoint not found: " << o.resume->string() << "\n";
        return kExitUsage;
      }
      resume = load_checkpoint(*o.resume);
      config = resume->config;
      if (o.config) {
        const auto given = load_config(*o.config);
        if (serialize_config(given) != serialize_config(config)) {
          err << "train: --config differs from the configuration stored in the checkpoint\n";
          return kExitUsage;
        }
      }
    } else {
      if (!o.config) {
        err << "train: --config is required\n";
        return kExitUsage;
      }
      if (!fs::exists(*o.config)) {
        err << "train: config not found: " << o.config->string() << "\n";
        return kExitUsage;
      }
      config = load_config(*o.config);
    }
    if (o.seed) config.seed = *o.seed;
    if (o.out) config.output_dir = *o.out;
    for (const auto& s : o.overrides) apply_override(config, s);
    config = trainer::finalize(config);
  } catch (const std::exception& e) {
    err << "train: " << e.what() << "\n";
    return kExitUsage;
  }
  if (resume && resume->config.seed != config.seed) {
    err << "train: cannot change the seed of a resumed run\n";
    return kExitUsage;
  }

  const fs::path dir = resolve_output_dir(config.output_dir);
  try {
    fs::create_directories(dir / "checkpoints");
    std::ofstream(dir / "config.yaml", std::ios::trunc) << serialize_config(config);

    trainer::Trainer run = resume ? trainer::Trainer(config, std::move(resume->state))
                                  : trainer::Trainer(config);
    trainer::TrainingHooks hooks;
    hooks.checkpoint = [&](const trainer::TrainingState& s) {
      const bool final = run.finished();
      save_checkpoint(dir / "checkpoints" / (final ? std::string("final.ckpt") : checkpoint_name(s.env_steps)),
                      config, s);
      write_metrics(dir / "metrics.csv", s.metrics);
    };
    hooks.row = [&](const trainer::MetricsRow& r) {
      if (o.quiet || r.kind != trainer::RowKind::eval) return;
      out << "env_steps " << r.env_steps << "  iteration " << r.iteration << "  success "
          << fixed(r.eval_success, 3) << "  return " << fixed(r.eval_return_mean) << " +/- "
          << fixed(r.eval_return_std) << "\n";
      out.flush();
    };
    run.run(hooks);
    out << "trained " << run.state().env_steps << " env steps, " << run.state().iteration
        << " updates, " << run.state().faults << " faults -> " << dir.string() << "\n";
  } catch (const model::NumericFault& e) {
    err << "train: numeric fault: " << e.what() << "\n";
    return kExitNumericFault;
  } catch (const planner::SearchFault& e) {
    err << "train: numeric fault: " << e.what() << "\n";
    return kExitNumericFault;
  } catch (const std::exception& e) {
    err << "train: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  if (!fs::exists(o.checkpoint)) {
    err << "eval: checkpoint not found: " << o.checkpoint.string() << "\n";
    return kExitUsage;
  }
  if (o.episodes < 1) {
    err << "eval: --episodes must be >= 1\n";
    return kExitUsage;
  }
  try {
    const Checkpoint ck = load_checkpoint(o.checkpoint);
    const std::uint64_t seed = o.seed ? *o.seed : derive_seed(ck.config.seed, {0xe7a1});
    const auto agent = trainer::evaluate(ck.state.params, ck.config, o.episodes, seed);
    const auto random = trainer::random_policy_baseline(ck.config, o.episodes, seed);
    out << "episodes        " << agent.episodes << "\n";
    out << "success_rate    " << fixed(agent.success_rate) << "\n";
    out << "return_mean     " << fixed(agent.return_mean) << " +/- " << fixed(agent.return_std) << "\n";
    out << "random_success  " << fixed(random.success_rate) << "\n";
    out << "random_return   " << fixed(random.return_mean) << " +/- " << fixed(random.return_std) << "\n";
  } catch (const model::NumericFault& e) {
    err << "eval: numeric fault: " << e.what() << "\n";
    return kExitNumericFault;
  } catch (const planner::SearchFault& e) {
    err << "eval: numeric fault: " << e.what() << "\n";
    return kExitNumericFault;
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_verify(bool fast, std::ostream& out, std::ostream& err) {
  try {
    const auto report = verify::run_suite(fast);
    out << report.to_text();
    return report.passed() ? kExitOk : kExitVerifyFailed;
  } catch (const std::exception& e) {
    err << "verify: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
}

int cmd_plot(const PlotOptions& o, std::ostream& out, std::ostream& err) {
  if (!fs::exists(o.metrics)) {
    err << "plot: metrics file not found: " << o.metrics.string() << "\n";
    return kExitUsage;
  }
  try {
    const auto rows = read_metrics(o.metrics);
    if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
    std::ofstream svg(o.out, std::ios::trunc);
    if (!svg) {
      err << "plot: cannot write " << o.out.string() << "\n";
      return kExitUsage;
    }
    svg << render_learning_curve_svg(rows);
    out << summary_table(rows);
  } catch (const std::exception& e) {
    err << "plot: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace sz::cli
