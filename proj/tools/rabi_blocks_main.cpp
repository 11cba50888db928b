// rabi-blocks verify|simulate|compare [--preset NAME | --config PATH] [--out DIR] [--jobs K]

#include "rabi_blocks.h"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace {

struct Job {
  bool preset;
  std::string source;
};

struct Result {
  int code = 0;
  std::string report;
  std::string error;
};

int exit_code(rb_status st) {
  switch (st) {
  case RB_OK: return 0;
  case RB_FAIL: return 1;
  case RB_CONFIG:
  case RB_TRUNCATION:
  case RB_INVALID: return 2;
  case RB_UNSUPPORTED: return 3;
  case RB_IO: return 4;
  default: return 5;
  }
}

Result run_one(const std::string &command, const Job &job, const std::string &out_dir) {
  Result r;
  rb_scenario *s = nullptr;
  rb_status st = job.preset ? rb_scenario_from_preset(job.source.c_str(), &s)
                            : rb_scenario_from_file(job.source.c_str(), &s);
  if (st != RB_OK) {
    r.code = exit_code(st);
    r.error = job.source + ": " + rb_last_error();
    return r;
  }
  char *report = nullptr;
  if (command == "verify")
    st = rb_verify(s, out_dir.c_str(), &report);
  else if (command == "simulate")
    st = rb_simulate(s, out_dir.c_str(), &report);
  else
    st = rb_compare(s, out_dir.c_str(), &report);
  r.code = exit_code(st);
  if (report) {
    r.report = report;
    rb_string_free(report);
  }
  if (st != RB_OK && st != RB_FAIL && st != RB_UNSUPPORTED)
    r.error = job.source + ": " + rb_last_error();
  rb_scenario_free(s);
  return r;
}

std::string preset_list() {
  char *names = nullptr;
  if (rb_preset_names(&names) != RB_OK)
    return {};
  std::string out = names;
  rb_string_free(names);
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Rabi-model block simulator: verify symmetry blocks, simulate, compare with closed forms"};
  app.require_subcommand(1, 1);

  std::vector<std::string> presets, configs;
  std::string out_dir;
  unsigned jobs = 1;

  for (const char *name : {"verify", "simulate", "compare"}) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--preset", presets, "Built-in scenario (repeatable): " + preset_list());
    sub->add_option("--config", configs, "Scenario JSON file (repeatable)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (default $RABI_BLOCKS_OUT or ./out)");
    sub->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::vector<Job> work;
  for (const auto &p : presets)
    work.push_back({true, p});
  for (const auto &c : configs)
    work.push_back({false, c});
  if (work.empty()) {
    std::cerr << "rabi-blocks " << command << ": give --preset NAME or --config PATH\n";
    return 2;
  }
  if (out_dir.empty()) {
    const char *env = std::getenv("RABI_BLOCKS_OUT");
    out_dir = env && *env ? env : "out";
  }

  std::vector<Result> results(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < work.size();)
      results[i] = run_one(command, work[i], out_dir);
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(work.size()));
  for (unsigned k = 1; k < n; ++k)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();

  int code = 0;
  for (const auto &r : results) {
    if (!r.report.empty())
      std::cout << r.report << "\n";
    if (!r.error.empty())
      std::cerr << "rabi-blocks " << command << ": " << r.error << "\n";
    code = std::max(code, r.code);
  }
  return code;
}
