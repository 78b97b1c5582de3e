#include "pimllm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#ifndef PIMLLM_ZOO_DIR
#define PIMLLM_ZOO_DIR "configs/models"
#endif

namespace pimllm::config {

using nlohmann::json;

std::string_view to_string(Provenance provenance) {
    switch (provenance) {
    case Provenance::Published: return "published";
    case Provenance::Convention: return "convention";
    case Provenance::Placeholder: return "placeholder (uncalibrated)";
    }
    return "?";
}

namespace {

std::string format_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Reads the keys of one JSON object section and records what was defaulted.
class SectionReader {
public:
    SectionReader(const json* section, std::string name, std::vector<DefaultedField>& log)
        : section_(section), name_(std::move(name)), log_(log) {
        if (section_ && !section_->is_object()) {
            throw ConfigError("section '" + name_ + "' must be an object");
        }
    }

    void integer(const char* key, std::int64_t& target, Provenance tag) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer()) {
                throw ConfigError(path(key) + ": expected an integer");
            }
            target = v->get<std::int64_t>();
        } else {
            defaulted(key, std::to_string(target), tag);
        }
    }

    void integer(const char* key, int& target, Provenance tag) {
        std::int64_t wide = target;
        integer(key, wide, tag);
        target = static_cast<int>(wide);
    }

    void integer(const char* key, std::uint64_t& target, Provenance tag) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
                throw ConfigError(path(key) + ": expected a non-negative integer");
            }
            target = v->get<std::uint64_t>();
        } else {
            defaulted(key, std::to_string(target), tag);
        }
    }

    void real(const char* key, double& target, Provenance tag) {
        if (const auto* v = find(key)) {
            if (!v->is_number()) {
                throw ConfigError(path(key) + ": expected a number");
            }
            target = v->get<double>();
        } else {
            defaulted(key, format_value(target), tag);
        }
    }

    void text(const char* key, std::string& target, Provenance tag) {
        if (const auto* v = find(key)) {
            if (!v->is_string()) {
                throw ConfigError(path(key) + ": expected a string");
            }
            target = v->get<std::string>();
        } else {
            defaulted(key, target, tag);
        }
    }

    // Nested object; absent means every field inside is defaulted.
    SectionReader child(const char* key) {
        seen_.insert(key);
        const json* sub = nullptr;
        if (section_ && section_->contains(key)) {
            sub = &(*section_)[key];
        }
        return SectionReader(sub, path(key), log_);
    }

    void reject_unknown() const {
        if (!section_) return;
        for (const auto& [key, value] : section_->items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(path(key.c_str()) + ": unknown key");
            }
        }
    }

    bool present(const char* key) const { return section_ && section_->contains(key); }

private:
    const json* find(const char* key) {
        seen_.insert(key);
        if (section_ && section_->contains(key)) {
            return &(*section_)[key];
        }
        return nullptr;
    }

    void defaulted(const char* key, std::string value, Provenance tag) {
        log_.push_back(DefaultedField{path(key), std::move(value), tag});
    }

    std::string path(const char* key) const { return name_ + "." + key; }

    const json* section_;
    std::string name_;
    std::vector<DefaultedField>& log_;
    std::set<std::string> seen_;
};

json parse_document(std::string_view text, const std::string& what) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        return json::object();
    }
    try {
        auto doc = json::parse(text);
        if (!doc.is_object()) {
            throw ConfigError(what + ": top level must be an object");
        }
        return doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": malformed document: " + e.what());
    }
}

void reject_unknown_sections(const json& doc, std::initializer_list<std::string_view> allowed,
                             const std::string& what) {
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) {
            throw ConfigError(what + ": unknown section '" + key + "'");
        }
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void read_tpu(SectionReader r, systolic::TPUSpec& tpu) {
    constexpr auto P = Provenance::Published;
    constexpr auto X = Provenance::Placeholder;
    r.integer("rows", tpu.rows, P);
    r.integer("cols", tpu.cols, P);
    r.real("freq_hz", tpu.freq_hz, P);
    std::string dataflow{systolic::to_string(tpu.dataflow)};
    r.text("dataflow", dataflow, P);
    try {
        tpu.dataflow = systolic::parse_dataflow(dataflow);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("tpu.dataflow: ") + e.what());
    }
    {
        // 8 MiB total; the input/weight/output split is ours.
        auto sram = r.child("sram_bytes");
        sram.integer("input", tpu.sram.input, X);
        sram.integer("weight", tpu.sram.weight, X);
        sram.integer("output", tpu.sram.output, X);
        sram.reject_unknown();
    }
    r.integer("sram_bw_bytes_per_cycle", tpu.sram_bw_bytes_per_cycle, X);
    r.real("dram_bw_bytes_per_cycle", tpu.dram_bw_bytes_per_cycle, X);
    r.real("mac_energy_pj", tpu.mac_energy_pj, X);
    r.real("sram_energy_pj_per_byte", tpu.sram_energy_pj_per_byte, X);
    r.real("dram_energy_pj_per_byte", tpu.dram_energy_pj_per_byte, X);
    r.real("nfu_cycles_per_element", tpu.nfu_cycles_per_element, Provenance::Convention);
    r.reject_unknown();
}

void read_pim(SectionReader r, pim::PIMSpec& p) {
    constexpr auto P = Provenance::Published;
    constexpr auto X = Provenance::Placeholder;
    r.integer("xbar_rows", p.xbar_rows, P);
    r.integer("xbar_cols", p.xbar_cols, P);
    r.integer("adc_bits", p.adc_bits, P);
    r.integer("act_bits", p.act_bits, P);
    r.integer("adcs_per_xbar", p.adcs_per_xbar, X);
    r.real("t_dac_ns", p.t_dac_ns, X);
    r.real("t_xbar_ns", p.t_xbar_ns, X);
    r.real("t_adc_ns", p.t_adc_ns, X);
    r.real("e_dac_pj", p.e_dac_pj, X);
    r.real("e_xbar_pj_per_row", p.e_xbar_pj_per_row, X);
    r.real("e_adc_pj", p.e_adc_pj, X);
    r.integer("xbars_per_pe", p.xbars_per_pe, X);
    r.integer("pes_per_tile", p.pes_per_tile, X);
    r.integer("tiles_per_bank", p.tiles_per_bank, X);
    r.integer("banks", p.banks, X);
    r.real("noc_bw_bytes_per_ns", p.noc_bw_bytes_per_ns, X);
    r.real("noc_energy_pj_per_byte", p.noc_energy_pj_per_byte, X);
    r.real("buffer_bw_bytes_per_ns", p.buffer_bw_bytes_per_ns, X);
    r.real("buffer_energy_pj_per_byte", p.buffer_energy_pj_per_byte, X);
    r.real("peripheral_ns_per_element", p.peripheral_ns_per_element, Provenance::Convention);
    r.real("peripheral_pj_per_element", p.peripheral_pj_per_element, Provenance::Convention);
    r.reject_unknown();
}

void read_system(SectionReader r, SystemSpec& s) {
    r.real("battery_joules", s.battery_joules, Provenance::Published);
    r.real("tokens_per_word", s.tokens_per_word, Provenance::Published);
    r.real("lpddr_bw_bytes_per_ns", s.lpddr_bw_bytes_per_ns, Provenance::Placeholder);
    r.real("lpddr_energy_pj_per_byte", s.lpddr_energy_pj_per_byte, Provenance::Placeholder);
    r.real("ops_per_mac", s.ops_per_mac, Provenance::Convention);
    r.reject_unknown();
}

template <typename Fn>
void rethrow_invariant(Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

} // namespace

ModelConfig parse_model_text(std::string_view text, std::string_view fallback_name) {
    const auto doc = parse_document(text, "model config");
    reject_unknown_sections(doc, {"model"}, "model config");
    if (!doc.contains("model")) {
        throw ConfigError("model config: missing section 'model'");
    }

    ModelConfig cfg;
    auto& m = cfg.model;
    m.name = std::string(fallback_name);
    m.context_len = 128;
    SectionReader r(&doc["model"], "model", cfg.defaults);
    for (const char* required : {"d", "h", "d_ff", "n_layers"}) {
        if (!r.present(required)) {
            throw ConfigError(std::string("model.") + required + ": required field missing");
        }
    }
    r.text("name", m.name, Provenance::Convention);
    r.integer("d", m.d, Provenance::Published);
    r.integer("h", m.h, Provenance::Published);
    r.integer("d_ff", m.d_ff, Provenance::Published);
    r.integer("n_layers", m.n_layers, Provenance::Published);
    r.integer("context_len", m.context_len, Provenance::Published);
    r.reject_unknown();
    rethrow_invariant([&] { workload::validate(m); });
    return cfg;
}

HardwareConfig parse_hardware_text(std::string_view text) {
    const auto doc = parse_document(text, "hardware config");
    reject_unknown_sections(doc, {"tpu", "pim", "system"}, "hardware config");

    HardwareConfig cfg;
    auto section = [&](const char* name) -> const json* {
        return doc.contains(name) ? &doc[name] : nullptr;
    };
    read_tpu(SectionReader(section("tpu"), "tpu", cfg.defaults), cfg.hw.tpu);
    read_pim(SectionReader(section("pim"), "pim", cfg.defaults), cfg.hw.pim);
    read_system(SectionReader(section("system"), "system", cfg.defaults), cfg.hw.system);
    rethrow_invariant([&] { validate(cfg.hw); });
    return cfg;
}

ModelConfig parse_model_file(const std::filesystem::path& path) {
    try {
        return parse_model_text(read_file(path), path.stem().string());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

HardwareConfig parse_hardware_file(const std::filesystem::path& path) {
    try {
        return parse_hardware_text(read_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ParsedConfigs parse_configs(const std::filesystem::path& model_path,
                            const std::filesystem::path& hw_path) {
    auto model = parse_model_file(model_path);
    auto hw = parse_hardware_file(hw_path);
    ParsedConfigs out{std::move(model.model), hw.hw, std::move(model.defaults)};
    out.defaults.insert(out.defaults.end(), hw.defaults.begin(), hw.defaults.end());
    return out;
}

std::vector<DefaultedField> hardware_defaults() {
    return parse_hardware_text("").defaults;
}

std::filesystem::path default_zoo_dir() { return PIMLLM_ZOO_DIR; }

const std::vector<std::string>& zoo_model_names() {
    static const std::vector<std::string> names = {
        "gpt-355m", "gpt-774m", "gpt-1.5b", "opt-1.3b", "opt-2.7b", "opt-6.7b", "llama-7b",
    };
    return names;
}

std::filesystem::path resolve_model_path(const std::string& name_or_path,
                                         const std::filesystem::path& zoo_dir) {
    const std::filesystem::path direct(name_or_path);
    if (std::filesystem::is_regular_file(direct)) {
        return direct;
    }
    const auto zoo = zoo_dir / (name_or_path + ".json");
    if (std::filesystem::is_regular_file(zoo)) {
        return zoo;
    }
    throw ConfigError("model '" + name_or_path + "' is neither a file nor a bundled model in " +
                      zoo_dir.string());
}

std::vector<workload::ModelSpec> load_zoo(const std::filesystem::path& zoo_dir) {
    std::vector<workload::ModelSpec> models;
    for (const auto& name : zoo_model_names()) {
        models.push_back(parse_model_file(zoo_dir / (name + ".json")).model);
    }
    return models;
}

} // namespace pimllm::config
