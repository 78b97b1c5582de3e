#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "pimllm/cost.hpp"
#include "pimllm/engine.hpp"
#include "pimllm/workload.hpp"

namespace pimllm::metrics {

inline constexpr double kDefaultBatteryJoules = 18000.0;
inline constexpr double kDefaultTokensPerWord = 1.5;

// All throws below are std::domain_error on a zero latency or energy.
double tokens_per_second(const CostResult& cost);
double tokens_per_joule(const CostResult& cost);
double words_per_battery(const CostResult& cost, double battery_joules = kDefaultBatteryJoules,
                         double tokens_per_word = kDefaultTokensPerWord);

struct Throughput {
    double gops = 0.0;
    double gops_per_watt = 0.0;
};

/// ops_per_token = ops_per_mac * (low + high MACs).
Throughput gops_and_gops_per_watt(const workload::OpGraph& graph, const CostResult& cost,
                                  double ops_per_mac = 2.0);

struct SimReport {
    std::string model;
    std::int64_t context_len = 0;
    engine::ArchMode mode = engine::ArchMode::Hybrid;
    double tokens_per_s = 0.0;
    double tokens_per_joule = 0.0;
    double words_per_battery = 0.0;
    double gops = 0.0;
    double gops_per_watt = 0.0;
    double speedup_vs_tpu = 0.0;
    std::map<Category, double> breakdown;
};

/// Derives every figure of merit for one simulated step. `baseline_latency_s`
/// is the TpuOnly latency of the same model and context length.
SimReport make_report(const workload::ModelSpec& model, engine::ArchMode mode,
                      const CostResult& cost, double baseline_latency_s, const SystemSpec& system);

} // namespace pimllm::metrics
