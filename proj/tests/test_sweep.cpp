#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pimllm/config.hpp"
#include "pimllm/report.hpp"
#include "pimllm/sweep.hpp"

using namespace pimllm;

namespace {

const std::vector<engine::ArchMode> kModes = {engine::ArchMode::Hybrid, engine::ArchMode::TpuOnly};

std::vector<sweep::RunRecord> full_sweep(unsigned threads = 0) {
    return sweep::run_sweep(config::load_zoo(), HardwareSpec{}, config::kDefaultContextLengths, kModes,
                            threads);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("full sweep shape and order", "[sweep]") {
    const auto records = full_sweep();
    REQUIRE(records.size() == 84);
    const auto& names = config::zoo_model_names();
    std::size_t i = 0;
    for (const auto& name : names) {
        for (auto l : config::kDefaultContextLengths) {
            for (auto mode : kModes) {
                CHECK(records[i].report.model == name);
                CHECK(records[i].report.context_len == l);
                CHECK(records[i].report.mode == mode);
                ++i;
            }
        }
    }
}

TEST_CASE("parallel and serial sweeps agree", "[sweep]") {
    const auto serial = full_sweep(1);
    const auto parallel = full_sweep(8);
    CHECK(report::to_csv(serial) == report::to_csv(parallel));
    CHECK(report::to_json(serial) == report::to_json(parallel));
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].cost == parallel[i].cost);
}

TEST_CASE("single tuple equals direct simulation", "[sweep]") {
    auto m = config::load_zoo()[3];
    m.context_len = 512;
    const HardwareSpec hw;
    const auto recs = sweep::run_sweep({m}, hw, {512}, {engine::ArchMode::Hybrid});
    REQUIRE(recs.size() == 1);
    const auto direct = engine::simulate_token(m, hw, engine::ArchMode::Hybrid);
    CHECK(recs[0].cost == direct);
    const auto base = engine::simulate_token(m, hw, engine::ArchMode::TpuOnly).total_latency();
    const auto rep = metrics::make_report(m, engine::ArchMode::Hybrid, direct, base, hw.system);
    CHECK(recs[0].report.tokens_per_joule == rep.tokens_per_joule);
    CHECK(recs[0].report.speedup_vs_tpu == rep.speedup_vs_tpu);
}

TEST_CASE("sweep errors name the tuple", "[sweep]") {
    workload::ModelSpec bad{"broken", 4, 1, 4, 1, 1};
    HardwareSpec hw;
    hw.tpu.freq_hz = 0.0;
    CHECK_THROWS_WITH(sweep::run_sweep({bad}, hw, {64}, {engine::ArchMode::Hybrid}),
                      Catch::Matchers::ContainsSubstring("model=broken, l=64, mode=Hybrid"));
    CHECK_THROWS_AS(sweep::run_sweep({}, HardwareSpec{}, {128}, kModes), std::invalid_argument);
}

TEST_CASE("CSV emission", "[report]") {
    const auto records = full_sweep();
    const auto csv = report::to_csv(records);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');
    const auto rows = report::parse_csv(csv);
    REQUIRE(rows.size() == 85);
    CHECK(rows[0] == report::run_record_columns());
    CHECK(rows[0][0] == "schema_version");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == rows[0].size());
        CHECK(rows[i][0] == "1");
    }

    const auto path = std::filesystem::temp_directory_path() / "pimllm_sweep.csv";
    report::emit(records, report::Format::CSV, path);
    CHECK(slurp(path) == csv);
    std::size_t lines = 0;
    for (char ch : slurp(path)) lines += ch == '\n';
    CHECK(lines == 85);
    std::filesystem::remove(path);
}

TEST_CASE("round trip at printed precision", "[report]") {
    const auto records = full_sweep();
    const auto rows = report::parse_csv(report::to_csv(records));
    const auto& cols = rows[0];
    auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto& row = rows[i + 1];
        CHECK(row[col("model")] == r.report.model);
        CHECK(std::stoll(row[col("context_len")]) == r.report.context_len);
        CHECK(row[col("mode")] == engine::to_string(r.report.mode));
        CHECK(row[col("dataflow")] == "OS");
        CHECK(std::strtod(row[col("latency_s")].c_str(), nullptr) ==
              Catch::Approx(r.cost.total_latency()).epsilon(1e-5));
        CHECK(std::strtod(row[col("tokens_per_joule")].c_str(), nullptr) ==
              Catch::Approx(r.report.tokens_per_joule).epsilon(1e-5));
        CHECK(std::strtod(row[col("energy_j_ADC")].c_str(), nullptr) ==
              Catch::Approx(r.cost.energy(Category::ADC)).epsilon(1e-5));
        CHECK(row[col("gops")] == report::format_number(r.report.gops));
    }
}

TEST_CASE("CSV and JSON carry the same values", "[report]") {
    const auto records = full_sweep();
    const auto rows = report::parse_csv(report::to_csv(records));
    const auto doc = nlohmann::ordered_json::parse(report::to_json(records));
    REQUIRE(doc.size() == records.size());
    const auto& cols = rows[0];
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& obj = doc[i];
        REQUIRE(obj.size() == cols.size());
        std::size_t j = 0;
        for (const auto& [key, value] : obj.items()) {
            CHECK(key == cols[j]);
            const auto& cell = rows[i + 1][j];
            if (value.is_string()) {
                CHECK(value.get<std::string>() == cell);
            } else if (value.is_number_integer()) {
                CHECK(std::to_string(value.get<std::int64_t>()) == cell);
            } else {
                CHECK(report::format_number(value.get<double>()) == cell);
            }
            ++j;
        }
    }
}

TEST_CASE("reruns are byte-identical", "[report]") {
    const auto dir = std::filesystem::temp_directory_path();
    for (auto fmt : {report::Format::CSV, report::Format::JSON}) {
        const auto a = dir / "pimllm_a.out";
        const auto b = dir / "pimllm_b.out";
        report::emit(full_sweep(), fmt, a);
        report::emit(full_sweep(), fmt, b);
        CHECK(slurp(a) == slurp(b));
        std::filesystem::remove(a);
        std::filesystem::remove(b);
    }
}

TEST_CASE("emit errors", "[report]") {
    CHECK_THROWS_AS(report::emit({}, report::Format::CSV, "/tmp/pimllm_never.csv"), std::invalid_argument);
    CHECK_THROWS_AS(report::emit(full_sweep(), report::Format::CSV, "/nonexistent/dir/out.csv"),
                    std::runtime_error);
    CHECK_THROWS_AS(report::parse_format("xml"), std::invalid_argument);
}

TEST_CASE("CSV quoting", "[report]") {
    auto m = config::load_zoo()[0];
    m.name = "gpt, \"small\"";
    const auto recs = sweep::run_sweep({m}, HardwareSpec{}, {128}, {engine::ArchMode::Hybrid});
    const auto csv = report::to_csv(recs);
    CHECK(csv.find("\"gpt, \"\"small\"\"\"") != std::string::npos);
    const auto rows = report::parse_csv(csv);
    CHECK(rows[1][1] == m.name);
    CHECK(report::parse_csv("a,\"b\nc\",d\n")[0][1] == "b\nc");
    CHECK_THROWS_AS(report::parse_csv("a,\"b"), std::invalid_argument);
}

TEST_CASE("dataflow comparison", "[sweep]") {
    const HardwareSpec hw;
    const workload::ModelSpec unit{"unit", 1, 1, 1, 1, 1};
    const auto u = sweep::compare_dataflows(unit, hw, 1);
    REQUIRE(u.size() == 3);
    for (const auto& row : u) CHECK(row.total_cycles() > 0);

    for (const auto& m : config::load_zoo()) {
        const auto rows = sweep::compare_dataflows(m, hw, 256);
        CHECK(rows[0].dataflow == systolic::Dataflow::OS);
        auto model = m;
        model.context_len = 256;
        CHECK(rows[0].total_cycles() == engine::tpu_only_systolic_cycles(model, hw.tpu));
        for (const auto& row : rows) {
            CHECK(row.stall_cycles >= 0);
            CHECK(row.sram_bytes > 0);
        }
    }

    // A starved SRAM port shows up in the stall column.
    auto narrow = hw;
    narrow.tpu.sram_bw_bytes_per_cycle = 1;
    const auto starved = sweep::compare_dataflows(config::load_zoo()[0], narrow, 128);
    for (const auto& row : starved) CHECK(row.stall_cycles > 0);
}
