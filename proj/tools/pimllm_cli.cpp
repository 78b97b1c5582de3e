// pimllm: command-line front end for the hybrid PIM + systolic-array simulator.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pimllm/config.hpp"
#include "pimllm/engine.hpp"
#include "pimllm/metrics.hpp"
#include "pimllm/report.hpp"
#include "pimllm/sweep.hpp"
#include "pimllm/workload.hpp"

namespace {

using namespace pimllm;

struct Options {
    std::vector<std::string> models;
    std::string hw_path;
    std::string zoo_dir = config::default_zoo_dir().string();
    std::vector<std::int64_t> ctx;
    std::vector<std::string> modes;
    std::string out;
    std::string format = "csv";
    unsigned threads = 0;
    bool quiet = false;
};

void log_defaults(const std::vector<config::DefaultedField>& defaults, const Options& opt) {
    if (opt.quiet) return;
    for (const auto& d : defaults) {
        std::cerr << "default " << d.key << " = " << d.value << " [" << config::to_string(d.provenance)
                  << "]\n";
    }
}

HardwareSpec load_hardware(const Options& opt) {
    config::HardwareConfig cfg = opt.hw_path.empty() ? config::parse_hardware_text("")
                                                     : config::parse_hardware_file(opt.hw_path);
    log_defaults(cfg.defaults, opt);
    return cfg.hw;
}

std::vector<workload::ModelSpec> load_models(const Options& opt) {
    const auto names = opt.models.empty() ? config::zoo_model_names() : opt.models;
    std::vector<workload::ModelSpec> models;
    for (const auto& name : names) {
        auto cfg = config::parse_model_file(config::resolve_model_path(name, opt.zoo_dir));
        log_defaults(cfg.defaults, opt);
        models.push_back(cfg.model);
    }
    return models;
}

std::vector<std::int64_t> context_lengths(const Options& opt) {
    return opt.ctx.empty() ? config::kDefaultContextLengths : opt.ctx;
}

std::vector<engine::ArchMode> modes(const Options& opt, std::vector<engine::ArchMode> fallback) {
    if (opt.modes.empty()) return fallback;
    std::vector<engine::ArchMode> out;
    for (const auto& m : opt.modes) out.push_back(engine::parse_mode(m));
    return out;
}

void warn_capacity(const workload::ModelSpec& model, const HardwareSpec& hw) {
    const auto cap = engine::pim_capacity(model, hw.pim);
    if (!cap.fits()) {
        std::cerr << "warning: " << model.name << " needs " << cap.crossbars_needed
                  << " crossbars but the PIM provides " << cap.crossbars_available
                  << "; latency assumes all weights resident\n";
    }
}

void print_report(const sweep::RunRecord& rec, std::ostream& os) {
    const auto& r = rec.report;
    os << "model              " << r.model << "\n"
       << "context_len        " << r.context_len << "\n"
       << "mode               " << engine::to_string(r.mode) << "\n"
       << "dataflow           " << systolic::to_string(rec.dataflow) << "\n"
       << "latency_s          " << report::format_number(rec.cost.total_latency()) << "\n"
       << "energy_j           " << report::format_number(rec.cost.total_energy()) << "\n"
       << "tokens_per_s       " << report::format_number(r.tokens_per_s) << "\n"
       << "tokens_per_joule   " << report::format_number(r.tokens_per_joule) << "\n"
       << "words_per_battery  " << report::format_number(r.words_per_battery) << "\n"
       << "gops               " << report::format_number(r.gops) << "\n"
       << "gops_per_watt      " << report::format_number(r.gops_per_watt) << "\n"
       << "speedup_vs_tpu     " << report::format_number(r.speedup_vs_tpu) << "\n"
       << "breakdown (% of latency)\n";
    for (auto c : kAllCategories) {
        char line[128];
        std::snprintf(line, sizeof line, "  %-16s %10.4f\n", std::string(to_string(c)).c_str(),
                      r.breakdown.at(c));
        os << line;
    }
    os << "note: cost parameters marked placeholder are uncalibrated\n";
}

int cmd_simulate(const Options& opt) {
    if (opt.models.size() > 1 || opt.ctx.size() > 1 || opt.modes.size() > 1) {
        throw std::invalid_argument("simulate takes a single --model, --ctx and --mode");
    }
    if (opt.models.empty()) throw std::invalid_argument("simulate requires --model");
    const auto hw = load_hardware(opt);
    auto model = load_models(opt).front();
    if (!opt.ctx.empty()) model.context_len = opt.ctx.front();
    warn_capacity(model, hw);
    const auto mode = modes(opt, {engine::ArchMode::Hybrid}).front();
    print_report(sweep::run_one(model, hw, mode), std::cout);
    return 0;
}

int cmd_sweep(const Options& opt) {
    const auto hw = load_hardware(opt);
    const auto models = load_models(opt);
    for (const auto& m : models) warn_capacity(m, hw);
    const auto records =
        sweep::run_sweep(models, hw, context_lengths(opt),
                         modes(opt, {engine::ArchMode::Hybrid, engine::ArchMode::TpuOnly}),
                         opt.threads);
    const auto format = report::parse_format(opt.format);
    if (opt.out.empty()) {
        std::cout << (format == report::Format::CSV ? report::to_csv(records)
                                                    : report::to_json(records));
    } else {
        report::emit(records, format, opt.out);
        if (!opt.quiet) std::cerr << "wrote " << records.size() << " records to " << opt.out << "\n";
    }
    return 0;
}

int cmd_dataflows(const Options& opt) {
    const auto hw = load_hardware(opt);
    const auto models = load_models(opt);
    const auto ctx = opt.ctx.empty() ? std::vector<std::int64_t>{128} : opt.ctx;
    std::cout << "model,context_len,dataflow,compute_cycles,stall_cycles,total_cycles,sram_bytes,"
                 "lowest\n";
    for (const auto& model : models) {
        for (auto l : ctx) {
            const auto rows = sweep::compare_dataflows(model, hw, l);
            std::int64_t best = rows.front().total_cycles();
            for (const auto& r : rows) best = std::min(best, r.total_cycles());
            for (const auto& r : rows) {
                std::cout << model.name << ',' << l << ',' << systolic::to_string(r.dataflow) << ','
                          << r.compute_cycles << ',' << r.stall_cycles << ',' << r.total_cycles()
                          << ',' << r.sram_bytes << ',' << (r.total_cycles() == best ? "yes" : "no")
                          << '\n';
            }
        }
    }
    std::cout << "# expected: OS lowest for decode-phase MVMs on a 32x32 array\n";
    return 0;
}

int cmd_breakdown(const Options& opt) {
    const auto hw = load_hardware(opt);
    const auto models = load_models(opt);
    const auto ctx = context_lengths(opt);
    const auto mode_list = modes(opt, {engine::ArchMode::Hybrid});
    std::cout << "model,context_len,mode";
    for (auto c : kAllCategories) std::cout << ',' << to_string(c) << "_pct";
    std::cout << '\n';
    for (const auto& m : models) {
        for (auto l : ctx) {
            for (auto mode : mode_list) {
                auto model = m;
                model.context_len = l;
                const auto shares =
                    engine::breakdown_percentages(engine::simulate_token(model, hw, mode));
                std::cout << model.name << ',' << l << ',' << engine::to_string(mode);
                for (auto c : kAllCategories) std::cout << ',' << report::format_number(shares.at(c));
                std::cout << '\n';
            }
        }
    }
    return 0;
}

int cmd_fractions(const Options& opt) {
    const auto models = load_models(opt);
    const auto ctx = context_lengths(opt);
    std::cout << "model,context_len,low_macs,high_macs,low_fraction\n";
    for (const auto& m : models) {
        for (auto l : ctx) {
            auto model = m;
            model.context_len = l;
            const auto counts = workload::mac_counts(workload::build_op_graph(model));
            std::cout << model.name << ',' << l << ',' << counts.low << ',' << counts.high << ','
                      << report::format_number(counts.low_fraction()) << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid analog-PIM + systolic-array decode-step simulator for 1-bit LLMs"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub, bool multi) {
        if (multi) {
            sub->add_option("--model", opt.models, "bundled model name or model config path (repeatable)");
            sub->add_option("--ctx", opt.ctx, "context length(s)")->check(CLI::PositiveNumber);
            sub->add_option("--mode", opt.modes, "Hybrid or TpuOnly (repeatable)");
        } else {
            sub->add_option("--model", opt.models, "bundled model name or model config path")
                ->expected(1);
            sub->add_option("--ctx", opt.ctx, "context length")->expected(1)->check(CLI::PositiveNumber);
            sub->add_option("--mode", opt.modes, "Hybrid or TpuOnly")->expected(1);
        }
        sub->add_option("--hw", opt.hw_path, "hardware config file (defaults when omitted)");
        sub->add_option("--zoo", opt.zoo_dir, "directory of bundled model configs");
        sub->add_flag("--quiet", opt.quiet, "suppress defaulted-field log");
    };

    auto* simulate = app.add_subcommand("simulate", "simulate one (model, context, mode) tuple");
    add_common(simulate, false);

    auto* sweep_cmd = app.add_subcommand("sweep", "simulate a grid and write CSV/JSON records");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--out", opt.out, "output file (stdout when omitted)");
    sweep_cmd->add_option("--format", opt.format, "csv or json");
    sweep_cmd->add_option("--threads", opt.threads, "worker threads (0 = all cores)");

    auto* dataflows = app.add_subcommand("dataflows", "TpuOnly cycles per OS/WS/IS dataflow");
    add_common(dataflows, true);

    auto* breakdown = app.add_subcommand("breakdown", "latency share per hardware component");
    add_common(breakdown, true);

    auto* fractions = app.add_subcommand("fractions", "share of low-precision MACs");
    add_common(fractions, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(opt);
        if (sweep_cmd->parsed()) return cmd_sweep(opt);
        if (dataflows->parsed()) return cmd_dataflows(opt);
        if (breakdown->parsed()) return cmd_breakdown(opt);
        if (fractions->parsed()) return cmd_fractions(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
