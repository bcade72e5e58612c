// Copyright 2026 The qyao-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "qyao/adversary.hpp"
#include "qyao/config.hpp"

namespace {

using nlohmann::json;
using namespace qyao;

constexpr int kExitAccept = 0;
constexpr int kExitAbort = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  int jobs = 1;
  std::optional<std::string> mode;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file, or builtin:NAME")->required();
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--trials", c.trials, "number of trials or samples");
  cmd->add_option("--jobs", c.jobs, "parallel workers")->check(CLI::Range(1, 256));
  cmd->add_option("--mode", c.mode, "interactive or noninteractive");
  cmd->add_option("--out", c.out, "directory for record files");
}

config::ExperimentConfig load(const Common& c) {
  auto cfg = config::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) {
    if (*c.trials == 0) throw config::ConfigError("trials must be at least 1");
    cfg.trials = *c.trials;
    cfg.blindness_samples = *c.trials;
  }
  if (c.mode) {
    try {
      cfg.mode = protocol::parse_mode(*c.mode);
    } catch (const protocol::ProtocolError& e) {
      throw config::ConfigError(e.what());
    }
  }
  return cfg;
}

/// Single writer for every record a command emits.
class Records {
 public:
  Records(const std::string& dir, const std::string& file) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    file_.open(std::filesystem::path(dir) / file);
    if (!file_) throw config::ConfigError("cannot write to " + dir);
  }
  void emit(const json& record) {
    const std::string line = record.dump();
    std::cout << line << '\n';
    if (file_.is_open()) file_ << line << '\n';
  }

 private:
  std::ofstream file_;
};

adversary::Scenario scenario_for_runs(const config::ExperimentConfig& cfg) {
  auto sc = config::make_scenario(cfg);
  if (sc.setup.pattern.base.outputs().empty())
    throw config::ConfigError("pattern '" + cfg.name + "' has no outputs; only the blindness command applies");
  return sc;
}

template <class Fn>
void parallel_for(std::uint64_t n, int jobs, Fn fn) {
  jobs = static_cast<int>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(jobs, n)));
  if (jobs == 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t i = w; i < n; i += jobs) fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

int cmd_run(const Common& opts) {
  const auto cfg = load(opts);
  auto sc = scenario_for_runs(cfg);
  sc.options.record_messages = !opts.out.empty();
  const adversary::AttackStrategy strategy = cfg.strategy.value_or(adversary::AttackStrategy{});
  const Eigen::VectorXcd ideal = adversary::ideal_output(sc, strategy);

  struct Done {
    adversary::TrialOutcome outcome;
    std::string transcript;
  };
  std::vector<Done> done(cfg.trials);
  parallel_for(cfg.trials, opts.jobs, [&](std::uint64_t i) {
    const std::uint64_t seed = trial_seed(cfg.seed, i);
    auto dev = adversary::make_deviation(strategy, sc.setup, make_stream(seed, Stream::adversary));
    const auto r = protocol::run_qyao(sc.setup, sc.client_input, sc.server_input, seed, sc.options, dev.get());
    Done d;
    d.outcome.verdict = r.verdict;
    if (r.verdict.accepted) {
      d.outcome.fidelity = qsim::fidelity(*r.output, ideal);
      d.outcome.cls = d.outcome.fidelity >= adversary::kCorrectFidelity ? adversary::TrialClass::accept_correct
                                                                         : adversary::TrialClass::accept_corrupt;
    }
    if (sc.options.record_messages) d.transcript = protocol::to_jsonl(r.transcript);
    done[i] = std::move(d);
  });

  Records records(opts.out, "run.jsonl");
  std::ofstream transcripts;
  if (!opts.out.empty()) transcripts.open(std::filesystem::path(opts.out) / "transcript.jsonl");
  adversary::TrialStats stats;
  double min_fidelity = 1.0;
  for (std::uint64_t i = 0; i < cfg.trials; ++i) {
    const auto& o = done[i].outcome;
    stats.add(o.cls);
    json rec{{"kind", "trial"},
             {"trial", i},
             {"seed", trial_seed(cfg.seed, i)},
             {"accepted", o.verdict.accepted},
             {"class", adversary::trial_class_name(o.cls)},
             {"failed_traps", o.verdict.failed_traps},
             {"failed_flags", o.verdict.failed_flags}};
    if (o.verdict.accepted) {
      rec["fidelity"] = o.fidelity;
      min_fidelity = std::min(min_fidelity, o.fidelity);
    }
    records.emit(rec);
    if (transcripts.is_open()) {
      transcripts << json{{"kind", "Trial"}, {"trial", i}, {"seed", trial_seed(cfg.seed, i)}}.dump() << '\n';
      transcripts << done[i].transcript;
    }
  }
  records.emit({{"kind", "summary"},
                {"config", cfg.name},
                {"mode", protocol::mode_name(cfg.mode)},
                {"strategy", strategy.name},
                {"trials", stats.trials},
                {"accepted", stats.trials - stats.aborts},
                {"aborted", stats.aborts},
                {"accept_corrupt", stats.accept_corrupt},
                {"min_fidelity", stats.aborts == stats.trials ? json(nullptr) : json(min_fidelity)}});
  return stats.aborts == 0 ? kExitAccept : kExitAbort;
}

int cmd_attack(const Common& opts) {
  const auto cfg = load(opts);
  if (!cfg.strategy) throw config::ConfigError("the attack command needs a strategy");
  auto sc = scenario_for_runs(cfg);
  sc.options.record_messages = false;
  const auto stats = adversary::estimate_detection(*cfg.strategy, sc, cfg.trials, cfg.seed, opts.jobs);
  const double eps = std::pow(8.0 / 9.0, cfg.d);
  const double sigma = std::sqrt(eps * (1 - eps) / static_cast<double>(stats.trials));
  Records records(opts.out, "stats.jsonl");
  records.emit({{"kind", "stats"},
                {"config", cfg.name},
                {"mode", protocol::mode_name(cfg.mode)},
                {"seed", cfg.seed},
                {"strategy", adversary::to_json(*cfg.strategy)},
                {"white_box", adversary::is_white_box(*cfg.strategy)},
                {"stats", adversary::to_json(stats)},
                {"d", cfg.d},
                {"epsilon", eps},
                {"bound_3sigma", eps + 3 * sigma},
                {"within_bound", stats.corrupt_rate() <= eps + 3 * sigma}});
  return kExitAccept;
}

int cmd_blindness(const Common& opts) {
  const auto cfg = load(opts);
  const auto a = config::make_scenario(cfg);
  const auto b = config::alternative_scenario(cfg);
  std::string mode = cfg.blindness_mode;
  if (mode == "auto") mode = a.setup.dtg.base().size() == 1 ? "exact" : "montecarlo";
  adversary::BlindnessReport rep;
  try {
    rep = mode == "exact" ? adversary::blindness_exact(a, b)
                          : adversary::blindness_montecarlo(a, b, cfg.blindness_samples, cfg.seed, opts.jobs);
  } catch (const adversary::AdversaryError& e) {
    throw config::ConfigError(e.what());
  }
  json rec = adversary::to_json(rep);
  rec["kind"] = "blindness";
  rec["config"] = cfg.name;
  if (mode == "exact") {
    rec["threshold"] = 1e-6;
    rec["indistinguishable"] = rep.distance <= 1e-6;
  } else {
    rec["seed"] = cfg.seed;
    rec["threshold"] = 5.0;
    rec["indistinguishable"] = rep.max_z <= 5.0;
  }
  Records records(opts.out, "blindness.jsonl");
  records.emit(rec);
  return kExitAccept;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure two-party quantum computation simulator"};
  app.require_subcommand(1);
  Common run_opts, attack_opts, blind_opts;
  auto* run = app.add_subcommand("run", "execute the protocol and report verdicts");
  add_common(run, run_opts);
  auto* attack = app.add_subcommand("attack", "estimate detection rates of a strategy");
  add_common(attack, attack_opts);
  auto* blind = app.add_subcommand("blindness", "compare the server's view of two client setups");
  add_common(blind, blind_opts);
  auto* list = app.add_subcommand("builtins", "list builtin configurations and strategies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& n : config::builtin_names()) std::cout << "config " << n << '\n';
      for (const auto& n : config::builtin_strategy_names()) std::cout << "strategy " << n << '\n';
      return 0;
    }
    if (run->parsed()) return cmd_run(run_opts);
    if (attack->parsed()) return cmd_attack(attack_opts);
    return cmd_blindness(blind_opts);
  } catch (const config::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
