#include "pimllm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace pimllm::sweep {

RunRecord run_one(const workload::ModelSpec& model, const HardwareSpec& hw, engine::ArchMode mode) {
    RunRecord rec;
    rec.dataflow = hw.tpu.dataflow;
    rec.cost = engine::simulate_token(model, hw, mode);
    const double baseline = mode == engine::ArchMode::TpuOnly
                                ? rec.cost.total_latency()
                                : engine::simulate_token(model, hw, engine::ArchMode::TpuOnly)
                                      .total_latency();
    rec.report = metrics::make_report(model, mode, rec.cost, baseline, hw.system);
    return rec;
}

std::vector<RunRecord> run_sweep(const std::vector<workload::ModelSpec>& models,
                                 const HardwareSpec& hw, const std::vector<std::int64_t>& ctx_lens,
                                 const std::vector<engine::ArchMode>& modes, unsigned threads) {
    if (models.empty() || ctx_lens.empty() || modes.empty()) {
        throw std::invalid_argument("run_sweep: models, context lengths and modes must be nonempty");
    }

    struct Task {
        workload::ModelSpec model;
        engine::ArchMode mode;
    };
    std::vector<Task> tasks;
    for (const auto& m : models) {
        for (auto l : ctx_lens) {
            for (auto mode : modes) {
                auto model = m;
                model.context_len = l;
                tasks.push_back({model, mode});
            }
        }
    }

    std::vector<RunRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::size_t error_index = tasks.size();
    std::string error_text;

    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) return;
            try {
                records[i] = run_one(tasks[i].model, hw, tasks[i].mode);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                failed = true;
                // Report the earliest failing tuple so the message is reproducible.
                if (i < error_index) {
                    error_index = i;
                    error_text = e.what();
                }
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    if (failed) {
        const auto& t = tasks[error_index];
        throw std::runtime_error("sweep failed at (model=" + t.model.name +
                                 ", l=" + std::to_string(t.model.context_len) +
                                 ", mode=" + std::string(engine::to_string(t.mode)) +
                                 "): " + error_text);
    }
    return records;
}

std::vector<DataflowRow> compare_dataflows(workload::ModelSpec model, const HardwareSpec& hw,
                                           std::int64_t context_len) {
    model.context_len = context_len;
    std::vector<DataflowRow> rows;
    for (auto df : {systolic::Dataflow::OS, systolic::Dataflow::WS, systolic::Dataflow::IS}) {
        auto tpu = hw.tpu;
        tpu.dataflow = df;
        const auto cost = engine::tpu_only_tile_cost(model, tpu);
        rows.push_back({df, cost.compute_cycles, cost.stall_cycles,
                        cost.sram_reads_bytes + cost.sram_writes_bytes});
    }
    return rows;
}

} // namespace pimllm::sweep
