#include "rabi_blocks.h"

#include "rabi/commands.hpp"
#include "rabi/symmetry.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct rb_scenario {
  rabi::scenario::ScenarioConfig cfg;
};

struct rb_operator {
  rabi::Operator op;
};

namespace {

thread_local std::string g_last_error;

rb_status set_error(rb_status st, const std::string &msg) {
  g_last_error = msg;
  return st;
}

char *dup_string(const std::string &s) {
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (!p)
    throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F> rb_status guarded(F &&f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const rabi::ConfigError &e) {
    return set_error(RB_CONFIG, e.what());
  } catch (const rabi::TruncationError &e) {
    return set_error(RB_TRUNCATION, e.what());
  } catch (const rabi::UnsupportedError &e) {
    return set_error(RB_UNSUPPORTED, e.what());
  } catch (const rabi::IoError &e) {
    return set_error(RB_IO, e.what());
  } catch (const rabi::Error &e) {
    return set_error(RB_INVALID, e.what());
  } catch (const std::bad_alloc &) {
    return set_error(RB_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return set_error(RB_INTERNAL, e.what());
  }
}

rb_status make_scenario(rabi::scenario::ScenarioConfig cfg, rb_scenario **out) {
  *out = new rb_scenario{std::move(cfg)};
  return RB_OK;
}

rb_status run_command(rabi::commands::Outcome (*cmd)(const rabi::scenario::ScenarioConfig &,
                                                       const std::filesystem::path &),
                      const rb_scenario *s, const char *out_dir, char **report) {
  if (!s || !out_dir)
    return set_error(RB_INVALID, "null scenario or output directory");
  return guarded([&] {
    const auto res = cmd(s->cfg, out_dir);
    if (report)
      *report = dup_string(res.report);
    if (res.exit_code == rabi::commands::kUnsupported)
      g_last_error = "no closed form for this scenario";
    return static_cast<rb_status>(res.exit_code);
  });
}

} // namespace

extern "C" {

const char *rb_version(void) { return "0.1.0"; }

const char *rb_last_error(void) { return g_last_error.c_str(); }

void rb_string_free(char *s) { std::free(s); }

rb_status rb_preset_names(char **out) {
  if (!out)
    return set_error(RB_INVALID, "null output pointer");
  return guarded([&] {
    std::string all;
    for (const auto &n : rabi::scenario::preset_names())
      all += n + "\n";
    *out = dup_string(all);
    return RB_OK;
  });
}

rb_status rb_scenario_from_preset(const char *name, rb_scenario **out) {
  if (!name || !out)
    return set_error(RB_INVALID, "null argument");
  return guarded([&] { return make_scenario(rabi::scenario::load_preset(name), out); });
}

rb_status rb_scenario_from_file(const char *path, rb_scenario **out) {
  if (!path || !out)
    return set_error(RB_INVALID, "null argument");
  return guarded([&] { return make_scenario(rabi::scenario::load_file(path), out); });
}

rb_status rb_scenario_from_json(const char *text, rb_scenario **out) {
  if (!text || !out)
    return set_error(RB_INVALID, "null argument");
  return guarded([&] { return make_scenario(rabi::scenario::from_json_text(text), out); });
}

void rb_scenario_free(rb_scenario *s) { delete s; }

rb_status rb_scenario_to_json(const rb_scenario *s, char **out) {
  if (!s || !out)
    return set_error(RB_INVALID, "null argument");
  return guarded([&] {
    *out = dup_string(rabi::scenario::to_json_text(s->cfg));
    return RB_OK;
  });
}

const char *rb_scenario_name(const rb_scenario *s) { return s ? s->cfg.name.c_str() : ""; }

rb_status rb_verify(const rb_scenario *s, const char *out_dir, char **report) {
  return run_command(&rabi::commands::verify, s, out_dir, report);
}

rb_status rb_simulate(const rb_scenario *s, const char *out_dir, char **report) {
  return run_command(&rabi::commands::simulate, s, out_dir, report);
}

rb_status rb_compare(const rb_scenario *s, const char *out_dir, char **report) {
  return run_command(&rabi::commands::compare, s, out_dir, report);
}

rb_status rb_scenario_hamiltonian(const rb_scenario *s, rb_operator **out) {
  if (!s || !out)
    return set_error(RB_INVALID, "null argument");
  return guarded([&] {
    auto run = rabi::scenario::prepare(s->cfg);
    *out = new rb_operator{std::move(run.hamiltonian)};
    return RB_OK;
  });
}

size_t rb_operator_dim(const rb_operator *op) { return op ? static_cast<size_t>(op->op.matrix().rows()) : 0; }

rb_status rb_operator_entry(const rb_operator *op, size_t row, size_t col, double *re, double *im) {
  if (!op || !re || !im)
    return set_error(RB_INVALID, "null argument");
  const auto n = static_cast<size_t>(op->op.matrix().rows());
  if (row >= n || col >= n)
    return set_error(RB_INVALID, "operator index out of range");
  const auto v = op->op.matrix()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  *re = v.real();
  *im = v.imag();
  return RB_OK;
}

rb_status rb_commutator_norm(const rb_operator *a, const rb_operator *b, double *out) {
  if (!a || !b || !out)
    return set_error(RB_INVALID, "null argument");
  return guarded([&] {
    *out = rabi::symmetry::commutator_norm(a->op, b->op);
    return RB_OK;
  });
}

void rb_operator_free(rb_operator *op) { delete op; }

} // extern "C"
