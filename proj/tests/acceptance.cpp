// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "pimllm/config.hpp"
#include "pimllm/engine.hpp"
#include "pimllm/pim.hpp"
#include "pimllm/report.hpp"
#include "pimllm/sweep.hpp"
#include "pimllm/systolic.hpp"
#include "pimllm/workload.hpp"

using namespace pimllm;

namespace {

// Tolerances and budgets.
constexpr double kRelTol = 1e-12;
constexpr double kPctTol = 1e-9;
constexpr double kFractionBudgetS = 1.0;
constexpr double kOracleBudgetS = 60.0;
constexpr double kCrossbarBudgetS = 30.0;
constexpr double kSweepBudgetS = 10.0;
constexpr int kOracleCases = 200;
constexpr int kCrossbarCases = 200;
constexpr std::int64_t kMaxArrayDim = 64;

const std::vector<engine::ArchMode> kModes = {engine::ArchMode::Hybrid, engine::ArchMode::TpuOnly};

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome low_precision_fraction() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    auto opt13 = config::parse_model_file(config::resolve_model_path("opt-1.3b")).model;
    auto opt67 = config::parse_model_file(config::resolve_model_path("opt-6.7b")).model;
    opt13.context_len = 4096;
    opt67.context_len = 128;

    const auto c13 = workload::mac_counts(workload::build_op_graph(opt13));
    if (c13.low_fraction() != 0.75 || workload::low_precision_fraction(opt13) != 0.75) {
        o.fail("OPT-1.3B l=4096 fraction " + fmt("%.17g", c13.low_fraction()));
    }

    const auto c67 = workload::mac_counts(workload::build_op_graph(opt67));
    const auto ref = oracle::brute_force_macs(opt67.d, opt67.h, opt67.d_ff, opt67.n_layers, opt67.context_len);
    const double f = c67.low_fraction();
    if (!(f > 0.99)) o.fail("OPT-6.7B l=128 fraction " + fmt("%.17g", f) + " not > 0.99");
    if (c67.low != ref.low || c67.high != ref.high || f != oracle::fraction(ref) ||
        workload::low_precision_fraction(opt67) != oracle::fraction(ref)) {
        o.fail("OPT-6.7B fraction differs from brute-force oracle");
    }
    const double t = seconds_since(t0);
    if (t >= kFractionBudgetS) o.fail("took " + fmt("%.3f s", t));
    if (o.pass) o.detail = "OPT-1.3B@4096 = 0.75, OPT-6.7B@128 = " + fmt("%.10f", f) + ", " + fmt("%.3f s", t);
    return o;
}

systolic::TPUSpec array(std::int64_t r, std::int64_t c, systolic::Dataflow df) {
    systolic::TPUSpec hw;
    hw.rows = r;
    hw.cols = c;
    hw.dataflow = df;
    return hw;
}

Outcome systolic_oracle() {
    using systolic::Dataflow;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::int64_t> dim(1, kMaxArrayDim), mult(1, 3), free_dim(1, 96);
    std::uniform_int_distribution<int> pick_df(0, 2);
    const Dataflow dfs[] = {Dataflow::OS, Dataflow::WS, Dataflow::IS};

    int full = 0, partial = 0;
    while (full < kOracleCases && o.pass) {
        const auto hw = array(dim(rng), dim(rng), dfs[pick_df(rng)]);
        systolic::GemmShape s{free_dim(rng), free_dim(rng), free_dim(rng)};
        const auto a = hw.rows * mult(rng), b = hw.cols * mult(rng);
        switch (hw.dataflow) {
        case Dataflow::OS: s.m = a; s.n = b; break;
        case Dataflow::WS: s.k = a; s.n = b; break;
        case Dataflow::IS: s.m = a; s.k = b; break;
        }
        if (s.macs() > systolic::kOracleMacLimit) continue;
        const auto sim = systolic::cycle_accurate_sim(s, hw);
        if (sim.cost.compute_cycles != systolic::analytic_cycles(s, hw).compute_cycles ||
            sim.macs_executed != s.macs()) {
            o.fail("full-fold mismatch at " + std::string(systolic::to_string(hw.dataflow)));
        }
        ++full;
    }
    std::uniform_int_distribution<std::int64_t> pdim(2, kMaxArrayDim), any(1, 200);
    while (partial < kOracleCases && o.pass) {
        const auto hw = array(pdim(rng), pdim(rng), dfs[pick_df(rng)]);
        const systolic::GemmShape s{any(rng), any(rng), any(rng)};
        if (s.macs() > systolic::kOracleMacLimit) continue;
        const bool aligned = [&] {
            switch (hw.dataflow) {
            case Dataflow::OS: return s.m % hw.rows == 0 && s.n % hw.cols == 0;
            case Dataflow::WS: return s.k % hw.rows == 0 && s.n % hw.cols == 0;
            case Dataflow::IS: return s.m % hw.rows == 0 && s.k % hw.cols == 0;
            }
            return true;
        }();
        if (aligned) continue;
        const auto sim = systolic::cycle_accurate_sim(s, hw);
        const auto ana = systolic::analytic_cycles(s, hw).compute_cycles;
        if (!(sim.cost.compute_cycles <= ana && ana <= sim.cost.compute_cycles + hw.rows + hw.cols) ||
            sim.macs_executed != s.macs()) {
            o.fail("partial-fold bound violated at " + std::string(systolic::to_string(hw.dataflow)));
        }
        ++partial;
    }
    const double t = seconds_since(t0);
    if (t >= kOracleBudgetS) o.fail("took " + fmt("%.3f s", t));
    if (o.pass) {
        o.detail = std::to_string(full) + " full-fold cases exact, " + std::to_string(partial) +
                   " partial-fold cases within R+C, " + fmt("%.3f s", t);
    }
    return o;
}

Outcome crossbar_functional() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::int64_t> dim(1, 1024);
    const std::int64_t sizes[] = {4, 16, 256};
    int quantized_checked = 0;
    for (int i = 0; i < kCrossbarCases && o.pass; ++i) {
        pim::PIMSpec hw;
        hw.xbar_rows = hw.xbar_cols = sizes[i % 3];
        hw.adcs_per_xbar = std::min<std::int64_t>(32, hw.xbar_cols);
        // Every tenth case uses the full 1024 x 1024 extent.
        const auto rows = i % 10 == 0 ? 1024 : dim(rng);
        const auto cols = i % 10 == 0 ? 1024 : dim(rng);
        const auto w = oracle::random_ternary(rng, rows * cols);
        const auto x = oracle::random_int8(rng, rows);
        const pim::TernaryMatrix m(rows, cols, w);
        const auto ideal = pim::functional_mvm(m, x, hw, pim::AdcMode::Ideal);
        if (ideal != oracle::reference_mvm(w, rows, cols, x)) {
            o.fail("Ideal mismatch, xbar " + std::to_string(hw.xbar_rows));
        }
        if (oracle::max_phase_sum(w, rows, cols, x, hw.xbar_rows, hw.act_bits) <= 127) {
            ++quantized_checked;
            if (pim::functional_mvm(m, x, hw, pim::AdcMode::Quantized) != ideal) {
                o.fail("Quantized differs from Ideal although sums fit");
            }
        }
    }
    const double t = seconds_since(t0);
    if (quantized_checked == 0) o.fail("no case exercised Quantized mode");
    if (t >= kCrossbarBudgetS) o.fail("took " + fmt("%.3f s", t));
    if (o.pass) {
        o.detail = std::to_string(kCrossbarCases) + " MVMs exact, " + std::to_string(quantized_checked) +
                   " Quantized==Ideal, " + fmt("%.3f s", t);
    }
    return o;
}

struct SweepData {
    std::vector<sweep::RunRecord> records;
    double seconds = 0.0;
};

SweepData run_full_sweep() {
    const auto t0 = std::chrono::steady_clock::now();
    SweepData d;
    d.records = sweep::run_sweep(config::load_zoo(), config::parse_hardware_text("").hw,
                                 config::kDefaultContextLengths, kModes);
    d.seconds = seconds_since(t0);
    return d;
}

Outcome amdahl_trend(const SweepData& sweep) {
    Outcome o;
    const HardwareSpec hw;
    double s_gpt = 0.0, s_opt = 0.0;
    for (const auto& m : config::load_zoo()) {
        double prev = INFINITY;
        for (auto l : config::kDefaultContextLengths) {
            const double s = engine::speedup(m, hw, l);
            if (!(s > 1.0)) o.fail(m.name + " speedup " + fmt("%.4g", s) + " at l=" + std::to_string(l));
            if (!(s < prev)) o.fail(m.name + " speedup not decreasing at l=" + std::to_string(l));
            prev = s;
            if (l == 128 && m.name == "gpt-355m") s_gpt = s;
            if (l == 128 && m.name == "opt-6.7b") s_opt = s;
        }
    }
    if (!(s_opt > s_gpt)) o.fail("speedup(opt-6.7b) <= speedup(gpt-355m) at l=128");
    if (sweep.records.size() != 84) o.fail("sweep produced " + std::to_string(sweep.records.size()) + " records");
    if (sweep.seconds >= kSweepBudgetS) o.fail("sweep took " + fmt("%.3f s", sweep.seconds));
    if (o.pass) {
        o.detail = "l=128 speedup gpt-355m " + fmt("%.3g", s_gpt) + "x < opt-6.7b " + fmt("%.3g", s_opt) +
                   "x, 84-run sweep " + fmt("%.3f s", sweep.seconds);
    }
    return o;
}

Outcome breakdown_trend(const SweepData& sweep) {
    Outcome o;
    for (const auto& rec : sweep.records) {
        double sum = 0.0;
        for (const auto& [cat, pct] : rec.report.breakdown) sum += pct;
        if (std::abs(sum - 100.0) > kPctTol) o.fail(rec.report.model + " breakdown sums to " + fmt("%.15g", sum));
    }
    for (const auto& a : sweep.records) {
        if (a.report.mode != engine::ArchMode::Hybrid || a.report.context_len != 128) continue;
        for (const auto& b : sweep.records) {
            if (b.report.mode == engine::ArchMode::Hybrid && b.report.context_len == 4096 &&
                b.report.model == a.report.model &&
                !(b.report.breakdown.at(Category::Systolic) > a.report.breakdown.at(Category::Systolic))) {
                o.fail(a.report.model + " Systolic share does not grow from l=128 to l=4096");
            }
        }
    }
    if (o.pass) o.detail = "Systolic share grows for all 7 models; all 84 vectors sum to 100";
    return o;
}

Outcome words_identity(const SweepData& sweep) {
    Outcome o;
    for (const auto& rec : sweep.records) {
        const double expected = 18000.0 * rec.report.tokens_per_joule / 1.5;
        if (!rel_close(rec.report.words_per_battery, expected, kRelTol)) {
            o.fail(rec.report.model + " words_per_battery off by more than 1e-12");
        }
    }
    if (o.pass) o.detail = "84 records";
    return o;
}

Outcome accounting(const SweepData& sweep) {
    Outcome o;
    for (const auto& rec : sweep.records) {
        double lat = 0.0, en = 0.0;
        for (auto c : kAllCategories) {
            lat += rec.cost.latency(c);
            en += rec.cost.energy(c);
        }
        if (!rel_close(rec.cost.total_latency(), lat, kRelTol) || !rel_close(rec.cost.total_energy(), en, kRelTol)) {
            o.fail(rec.report.model + " totals differ from category sums");
        }
        const double power = rec.cost.total_energy() / rec.cost.total_latency();
        if (!rel_close(rec.report.gops / rec.report.gops_per_watt, power, kRelTol)) {
            o.fail(rec.report.model + " gops/gops_per_watt differs from average power");
        }
    }
    if (o.pass) o.detail = "84 records";
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "pimllm_acceptance";
    std::filesystem::create_directories(dir);
    for (auto fmt_kind : {report::Format::CSV, report::Format::JSON}) {
        const auto ext = fmt_kind == report::Format::CSV ? ".csv" : ".json";
        const auto a = dir / (std::string("run1") + ext);
        const auto b = dir / (std::string("run2") + ext);
        report::emit(run_full_sweep().records, fmt_kind, a);
        report::emit(run_full_sweep().records, fmt_kind, b);
        const auto sa = slurp(a);
        if (sa.empty() || sa != slurp(b)) o.fail(std::string(ext) + " artifacts differ");
    }
    std::filesystem::remove_all(dir);
    if (o.pass) o.detail = "CSV and JSON byte-identical across two runs";
    return o;
}

} // namespace

int main() {
    int failures = 0;
    auto report_line = [&](int id, const char* name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };

    report_line(1, "low-precision fraction", low_precision_fraction);
    report_line(2, "systolic oracle equivalence", systolic_oracle);
    report_line(3, "crossbar functional correctness", crossbar_functional);

    SweepData sweep;
    try {
        sweep = run_full_sweep();
    } catch (const std::exception& e) {
        std::printf("sweep failed: %s\n", e.what());
    }
    report_line(4, "speedup trend", [&] { return amdahl_trend(sweep); });
    report_line(5, "breakdown trend", [&] { return breakdown_trend(sweep); });
    report_line(6, "words-per-battery identity", [&] { return words_identity(sweep); });
    report_line(7, "accounting identities", [&] { return accounting(sweep); });
    report_line(8, "determinism", determinism);

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
