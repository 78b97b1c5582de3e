#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace pimllm {

enum class Category : std::size_t {
    Systolic,
    Xbar,
    DAC,
    ADC,
    Peripheral,
    Communication,
    Buffer,
};

inline constexpr std::size_t kCategoryCount = 7;

inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::Systolic,   Category::Xbar,          Category::DAC,    Category::ADC,
    Category::Peripheral, Category::Communication, Category::Buffer,
};

std::string_view to_string(Category category);

/// Latency (s) and energy (J) of one decode step, split by hardware component.
/// Totals are always recomputed from the categories.
class CostResult {
public:
    void add(Category category, double latency_s, double energy_j);
    void add_latency(Category category, double latency_s) { add(category, latency_s, 0.0); }
    void add_energy(Category category, double energy_j) { add(category, 0.0, energy_j); }

    CostResult& operator+=(const CostResult& other);

    double latency(Category category) const { return latency_[index(category)]; }
    double energy(Category category) const { return energy_[index(category)]; }

    double total_latency() const;
    double total_energy() const;

    bool operator==(const CostResult&) const = default;

private:
    static constexpr std::size_t index(Category c) { return static_cast<std::size_t>(c); }

    std::array<double, kCategoryCount> latency_{};
    std::array<double, kCategoryCount> energy_{};
};

} // namespace pimllm
