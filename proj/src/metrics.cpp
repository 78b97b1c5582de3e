#include "pimllm/metrics.hpp"

#include <stdexcept>

namespace pimllm::metrics {

namespace {

double require_positive(double value, const char* what) {
    if (!(value > 0.0)) {
        throw std::domain_error(std::string(what) + " must be > 0");
    }
    return value;
}

} // namespace

double tokens_per_second(const CostResult& cost) {
    return 1.0 / require_positive(cost.total_latency(), "total latency");
}

double tokens_per_joule(const CostResult& cost) {
    return 1.0 / require_positive(cost.total_energy(), "total energy");
}

double words_per_battery(const CostResult& cost, double battery_joules, double tokens_per_word) {
    require_positive(tokens_per_word, "tokens_per_word");
    return battery_joules * tokens_per_joule(cost) / tokens_per_word;
}

Throughput gops_and_gops_per_watt(const workload::OpGraph& graph, const CostResult& cost,
                                  double ops_per_mac) {
    const auto macs = workload::mac_counts(graph);
    const double ops = ops_per_mac * static_cast<double>(macs.total());
    Throughput t;
    t.gops = ops / (require_positive(cost.total_latency(), "total latency") * 1e9);
    t.gops_per_watt = ops / (require_positive(cost.total_energy(), "total energy") * 1e9);
    return t;
}

SimReport make_report(const workload::ModelSpec& model, engine::ArchMode mode,
                      const CostResult& cost, double baseline_latency_s, const SystemSpec& system) {
    SimReport r;
    r.model = model.name;
    r.context_len = model.context_len;
    r.mode = mode;
    r.tokens_per_s = tokens_per_second(cost);
    r.tokens_per_joule = tokens_per_joule(cost);
    r.words_per_battery = words_per_battery(cost, system.battery_joules, system.tokens_per_word);
    const auto tp = gops_and_gops_per_watt(workload::build_op_graph(model), cost, system.ops_per_mac);
    r.gops = tp.gops;
    r.gops_per_watt = tp.gops_per_watt;
    r.speedup_vs_tpu = baseline_latency_s / cost.total_latency();
    r.breakdown = engine::breakdown_percentages(cost);
    return r;
}

} // namespace pimllm::metrics
