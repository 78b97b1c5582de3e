#include "pimllm/cost.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pimllm {

std::string_view to_string(Category category) {
    switch (category) {
    case Category::Systolic: return "Systolic";
    case Category::Xbar: return "Xbar";
    case Category::DAC: return "DAC";
    case Category::ADC: return "ADC";
    case Category::Peripheral: return "Peripheral";
    case Category::Communication: return "Communication";
    case Category::Buffer: return "Buffer";
    }
    return "?";
}

void CostResult::add(Category category, double latency_s, double energy_j) {
    if (!(latency_s >= 0.0) || !(energy_j >= 0.0) || !std::isfinite(latency_s) ||
        !std::isfinite(energy_j)) {
        throw std::invalid_argument("negative or non-finite cost for category " +
                                    std::string(to_string(category)));
    }
    latency_[index(category)] += latency_s;
    energy_[index(category)] += energy_j;
}

CostResult& CostResult::operator+=(const CostResult& other) {
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        latency_[i] += other.latency_[i];
        energy_[i] += other.energy_[i];
    }
    return *this;
}

double CostResult::total_latency() const {
    double sum = 0.0;
    for (double v : latency_) sum += v;
    return sum;
}

double CostResult::total_energy() const {
    double sum = 0.0;
    for (double v : energy_) sum += v;
    return sum;
}

} // namespace pimllm
