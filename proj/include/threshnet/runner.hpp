#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "threshnet/error.hpp"
#include "threshnet/random.hpp"
#include "threshnet/stats.hpp"

namespace threshnet {

/// A named scalar statistic computed from one exclusively-owned stream. The
/// replicate index is passed along for experiments that record side outputs.
struct Experiment {
  std::string name;
  nlohmann::json config = nlohmann::json::object();
  std::function<double(RandomStream&, std::uint64_t)> replicate;
};

struct GofResult {
  std::string name;
  double statistic = 0.0;
  double p_value = 0.0;  // NaN when only a statistic is reported
  friend bool operator==(const GofResult&, const GofResult&) = default;
};

struct ReplicateReport {
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::uint64_t replicates = 0;
  std::vector<double> samples;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  std::optional<GofResult> gof;
  nlohmann::json extras = nlohmann::json::object();
  std::optional<std::string> samples_path;
};

inline nlohmann::json to_json(const ReplicateReport& r) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["R"] = r.replicates;
  j["mean"] = r.mean;
  j["variance"] = r.variance;
  j["stderr"] = r.std_error;
  if (r.gof) {
    j["gof"] = {{"name", r.gof->name}, {"stat", r.gof->statistic}};
    j["gof"]["pvalue"] = std::isnan(r.gof->p_value) ? nlohmann::json(nullptr) : nlohmann::json(r.gof->p_value);
  } else {
    j["gof"] = nullptr;
  }
  if (!r.extras.empty()) j["extras"] = r.extras;
  if (r.samples_path) {
    j["samples_path"] = *r.samples_path;
  } else {
    j["samples"] = r.samples;
  }
  return j;
}

inline ReplicateReport report_from_json(const nlohmann::json& j) {
  ReplicateReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.config = j.at("config");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.replicates = j.at("R").get<std::uint64_t>();
  r.mean = j.at("mean").get<double>();
  r.variance = j.at("variance").get<double>();
  r.std_error = j.at("stderr").get<double>();
  if (const auto& g = j.at("gof"); !g.is_null()) {
    GofResult gof{g.at("name").get<std::string>(), g.at("stat").get<double>(), std::nan("")};
    if (!g.at("pvalue").is_null()) gof.p_value = g.at("pvalue").get<double>();
    r.gof = gof;
  }
  if (j.contains("extras")) r.extras = j.at("extras");
  if (j.contains("samples")) r.samples = j.at("samples").get<std::vector<double>>();
  if (j.contains("samples_path")) r.samples_path = j.at("samples_path").get<std::string>();
  return r;
}

/// Worker count: THRESHNET_THREADS if set and positive, else hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("THRESHNET_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs R replicates. Replicate i draws from RandomStream(derive_seed(seed, i)),
/// so samples do not depend on the thread count or scheduling.
inline ReplicateReport run_replicates(const Experiment& exp, std::uint64_t replicates, std::uint64_t master_seed,
                                      unsigned threads = 0) {
  if (replicates == 0) throw DomainError("run_replicates needs R >= 1");
  if (!exp.replicate) throw UsageError("experiment '" + exp.name + "' has no replicate function");
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, replicates));

  ReplicateReport rep;
  rep.experiment = exp.name;
  rep.config = exp.config;
  rep.seed = master_seed;
  rep.replicates = replicates;
  rep.samples.assign(replicates, 0.0);

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= replicates) return;
      try {
        auto stream = RandomStream::for_replicate(master_seed, i);
        rep.samples[i] = exp.replicate(stream, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(replicates);
        return;
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  const auto m = stats::moments(rep.samples);
  rep.mean = m.mean;
  rep.variance = m.variance;
  rep.std_error = m.std_error;
  return rep;
}

}  // namespace threshnet
