#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pimllm/hardware.hpp"
#include "pimllm/workload.hpp"

namespace pimllm::config {

/// Missing file, malformed document, unknown key, wrong type or violated invariant.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Provenance {
    Published,   // value published for the architecture
    Convention,  // modelling convention, not a measured quantity
    Placeholder, // uncalibrated stand-in
};

std::string_view to_string(Provenance provenance);

/// A field that was absent from the input and took its default.
struct DefaultedField {
    std::string key; // dotted path, e.g. "pim.t_adc_ns"
    std::string value;
    Provenance provenance = Provenance::Placeholder;
};

struct ModelConfig {
    workload::ModelSpec model;
    std::vector<DefaultedField> defaults;
};

struct HardwareConfig {
    HardwareSpec hw;
    std::vector<DefaultedField> defaults;
};

struct ParsedConfigs {
    workload::ModelSpec model;
    HardwareSpec hw;
    std::vector<DefaultedField> defaults;
};

/// JSON documents. A model file holds one object `model` with keys
/// name, d, h, d_ff, n_layers and optional context_len. A hardware file holds
/// optional objects `tpu`, `pim` and `system`; an empty file means all defaults.
/// Unknown keys are errors.
ModelConfig parse_model_text(std::string_view text, std::string_view fallback_name = "model");
HardwareConfig parse_hardware_text(std::string_view text);

ModelConfig parse_model_file(const std::filesystem::path& path);
HardwareConfig parse_hardware_file(const std::filesystem::path& path);

ParsedConfigs parse_configs(const std::filesystem::path& model_path,
                            const std::filesystem::path& hw_path);

/// Defaults of every hardware field, with provenance, as parsing an empty file reports them.
std::vector<DefaultedField> hardware_defaults();

/// Directory holding the bundled model configurations.
std::filesystem::path default_zoo_dir();

/// Bundled model names in table order (smallest GPT first, LLaMA last).
const std::vector<std::string>& zoo_model_names();

/// `name_or_path` if it is an existing file, otherwise `<zoo_dir>/<name>.json`.
std::filesystem::path resolve_model_path(const std::string& name_or_path,
                                         const std::filesystem::path& zoo_dir = default_zoo_dir());

std::vector<workload::ModelSpec> load_zoo(const std::filesystem::path& zoo_dir = default_zoo_dir());

inline const std::vector<std::int64_t> kDefaultContextLengths = {128, 256, 512, 1024, 2048, 4096};

} // namespace pimllm::config
