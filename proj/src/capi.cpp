#include "ivxv_sim.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "ivxv/analysis.hpp"
#include "ivxv/attack.hpp"
#include "ivxv/audit.hpp"
#include "ivxv/ceremony.hpp"
#include "ivxv/error.hpp"

struct ivxv_distribution {
  ivxv::BehaviorDistribution value;
};
struct ivxv_policy {
  ivxv::ManipulationPolicy value;
};
struct ivxv_config {
  ivxv::ElectionConfig value;
};
struct ivxv_election {
  ivxv::ElectionConfig config;
  ivxv::ElectionResult result;
};

namespace {

thread_local std::string last_error;

ivxv_status status_of(ivxv::ErrorCode code) { return static_cast<ivxv_status>(static_cast<int>(code) + 1); }

template <typename F>
ivxv_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return IVXV_OK;
  } catch (const ivxv::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return IVXV_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return IVXV_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) ivxv::fail(ivxv::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const char* reason_cstr(ivxv::FailureReason r) { return ivxv::to_string(r).data(); }

void fill_replay(const ivxv::ReplayResult& r, ivxv_replay_report* out) {
  out->matches = r.matches() ? 1 : 0;
  out->recomputed_valid = r.recomputed.valid ? 1 : 0;
  out->recomputed_reason = reason_cstr(r.recomputed.reason);
  out->recorded_valid = r.recorded.valid ? 1 : 0;
  out->recorded_reason = reason_cstr(r.recorded.reason);
}

ivxv::json summary(const ivxv_election& e) {
  ivxv::json voters = ivxv::json::array();
  for (const auto& v : e.result.voters) {
    voters.push_back({{"voter", v.voter},
                      {"intent", v.intent},
                      {"script", v.script},
                      {"executed", v.executed},
                      {"corrupted", v.corrupted},
                      {"complained", v.complained},
                      {"final_manipulated", v.final_manipulated}});
  }
  return {{"sid", e.config.sid},
          {"seed", e.config.seed},
          {"verdict", ivxv::to_json(e.result.verdict)},
          {"tally", ivxv::to_json(e.result.tally)},
          {"pk", ivxv::to_json(e.result.pk.h)},
          {"voters", std::move(voters)}};
}

}  // namespace

extern "C" {

const char* ivxv_version(void) { return IVXV_VERSION_STRING; }
const char* ivxv_last_error(void) { return last_error.c_str(); }

const char* ivxv_status_name(ivxv_status status) {
  if (status == IVXV_OK) return "ok";
  if (status >= IVXV_E_INVALID_ARGUMENT && status <= IVXV_E_PROTOCOL) {
    return ivxv::to_string(static_cast<ivxv::ErrorCode>(status - 1)).data();
  }
  return "internal";
}

void ivxv_string_free(char* s) { std::free(s); }

ivxv_status ivxv_distribution_default(ivxv_distribution** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ivxv_distribution{ivxv::BehaviorDistribution::estonia_aggregate()};
  });
}

ivxv_status ivxv_distribution_parse(const char* csv, ivxv_distribution** out) {
  return guarded([&] {
    require(csv, "csv");
    require(out, "out");
    *out = new ivxv_distribution{ivxv::BehaviorDistribution::parse_csv(csv)};
  });
}

ivxv_status ivxv_distribution_load(const char* path, ivxv_distribution** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    if (std::strcmp(path, "default") == 0) {
      *out = new ivxv_distribution{ivxv::BehaviorDistribution::estonia_aggregate()};
    } else {
      *out = new ivxv_distribution{ivxv::BehaviorDistribution::load_csv(path)};
    }
  });
}

ivxv_status ivxv_distribution_csv(const ivxv_distribution* d, char** out) {
  return guarded([&] {
    require(d, "distribution");
    require(out, "out");
    *out = duplicate(d->value.to_csv());
  });
}

void ivxv_distribution_free(ivxv_distribution* d) { delete d; }

ivxv_status ivxv_policy_resolve(const char* name_or_path, ivxv_policy** out) {
  return guarded([&] {
    require(name_or_path, "policy");
    require(out, "out");
    *out = new ivxv_policy{ivxv::ManipulationPolicy::resolve(name_or_path)};
  });
}

ivxv_status ivxv_policy_parse(const char* csv, ivxv_policy** out) {
  return guarded([&] {
    require(csv, "csv");
    require(out, "out");
    *out = new ivxv_policy{ivxv::ManipulationPolicy::parse_csv(csv)};
  });
}

ivxv_status ivxv_policy_name(const ivxv_policy* p, char** out) {
  return guarded([&] {
    require(p, "policy");
    require(out, "out");
    *out = duplicate(p->value.name());
  });
}

ivxv_status ivxv_policy_csv(const ivxv_policy* p, char** out) {
  return guarded([&] {
    require(p, "policy");
    require(out, "out");
    *out = duplicate(p->value.to_csv());
  });
}

void ivxv_policy_free(ivxv_policy* p) { delete p; }

ivxv_status ivxv_outcome_probabilities(const ivxv_policy* p, const ivxv_distribution* d, ivxv_outcomes* out) {
  return guarded([&] {
    require(p, "policy");
    require(d, "distribution");
    require(out, "out");
    const auto o = ivxv::outcome_probabilities(p->value, d->value);
    *out = ivxv_outcomes{o.success, o.caught, o.silent_fail};
  });
}

ivxv_status ivxv_analytic_success(const ivxv_policy* p, const ivxv_distribution* d, double* out) {
  return guarded([&] {
    require(p, "policy");
    require(d, "distribution");
    require(out, "out");
    *out = ivxv::analytic_success(p->value, d->value);
  });
}

ivxv_status ivxv_optimal_policy(const ivxv_distribution* d, unsigned max_len, ivxv_policy** policy, double* success,
                                uint64_t* examined) {
  return guarded([&] {
    require(d, "distribution");
    auto best = ivxv::optimal_policy(d->value, max_len);
    if (success != nullptr) *success = best.success;
    if (examined != nullptr) *examined = best.policies_examined;
    if (policy != nullptr) *policy = new ivxv_policy{std::move(best.policy)};
  });
}

ivxv_status ivxv_monte_carlo_success(const ivxv_policy* p, const ivxv_distribution* d, uint64_t trials, uint64_t seed,
                                     double* estimate, double* standard_error) {
  return guarded([&] {
    require(p, "policy");
    require(d, "distribution");
    const auto e = ivxv::monte_carlo_success(p->value, d->value, trials, seed);
    if (estimate != nullptr) *estimate = e.estimate;
    if (standard_error != nullptr) *standard_error = e.standard_error;
  });
}

ivxv_status ivxv_undetected_probability(double p, uint64_t k, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = ivxv::undetected_probability(p, k);
  });
}

ivxv_status ivxv_detection_probability(double p, uint64_t k, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = ivxv::detection_probability(p, k);
  });
}

ivxv_status ivxv_config_load(const char* path, ivxv_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ivxv_config{ivxv::load_config(path)};
  });
}

ivxv_status ivxv_config_parse(const char* json_text, const char* base_dir, ivxv_config** out) {
  return guarded([&] {
    require(json_text, "json");
    require(out, "out");
    ivxv::json j;
    try {
      j = ivxv::json::parse(json_text);
    } catch (const ivxv::json::exception& e) {
      ivxv::fail(ivxv::ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
    }
    *out = new ivxv_config{ivxv::parse_config(j, base_dir != nullptr ? base_dir : "")};
  });
}

ivxv_status ivxv_config_set_seed(ivxv_config* c, uint64_t seed) {
  return guarded([&] {
    require(c, "config");
    c->value.seed = seed;
  });
}

ivxv_status ivxv_config_seed(const ivxv_config* c, uint64_t* out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    *out = c->value.seed;
  });
}

ivxv_status ivxv_config_json(const ivxv_config* c, char** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    *out = duplicate(ivxv::to_json(c->value).dump());
  });
}

void ivxv_config_free(ivxv_config* c) { delete c; }

ivxv_status ivxv_election_run(const ivxv_config* c, ivxv_election** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    *out = new ivxv_election{c->value, ivxv::run_election(c->value)};
  });
}

ivxv_status ivxv_election_verdict(const ivxv_election* e, int* valid, const char** reason) {
  return guarded([&] {
    require(e, "election");
    if (valid != nullptr) *valid = e->result.verdict.valid ? 1 : 0;
    if (reason != nullptr) *reason = reason_cstr(e->result.verdict.reason);
  });
}

ivxv_status ivxv_election_tally_json(const ivxv_election* e, char** out) {
  return guarded([&] {
    require(e, "election");
    require(out, "out");
    *out = duplicate(ivxv::to_json(e->result.tally).dump());
  });
}

ivxv_status ivxv_election_summary_json(const ivxv_election* e, char** out) {
  return guarded([&] {
    require(e, "election");
    require(out, "out");
    *out = duplicate(summary(*e).dump(2) + "\n");
  });
}

ivxv_status ivxv_election_transcript(const ivxv_election* e, char** out) {
  return guarded([&] {
    require(e, "election");
    require(out, "out");
    *out = duplicate(e->result.transcript.to_jsonl());
  });
}

ivxv_status ivxv_election_write_transcript(const ivxv_election* e, const char* path) {
  return guarded([&] {
    require(e, "election");
    require(path, "path");
    e->result.transcript.write(path);
  });
}

void ivxv_election_free(ivxv_election* e) { delete e; }

ivxv_status ivxv_replay_file(const char* path, ivxv_replay_report* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    fill_replay(ivxv::replay(ivxv::Transcript::read(path)), out);
  });
}

ivxv_status ivxv_replay_text(const char* jsonl, ivxv_replay_report* out) {
  return guarded([&] {
    require(jsonl, "transcript");
    require(out, "out");
    fill_replay(ivxv::replay(ivxv::Transcript::parse_jsonl(jsonl)), out);
  });
}

ivxv_status ivxv_attack(const ivxv_config* c, const ivxv_policy* p, uint64_t k, uint64_t trials,
                        ivxv_attack_report* out) {
  return guarded([&] {
    require(c, "config");
    require(p, "policy");
    require(out, "out");
    const auto r = ivxv::end_to_end_attack(c->value, p->value, k, trials);
    *out = ivxv_attack_report{r.k,      r.p,          r.analytic_undetected, r.empirical_detected, r.standard_error,
                              r.trials, r.detections, r.surviving_manipulations};
  });
}

}  // extern "C"
