#pragma once

#include "pimllm/pim.hpp"
#include "pimllm/systolic.hpp"

namespace pimllm {

struct SystemSpec {
    double battery_joules = 18000.0; // 5 Wh
    double tokens_per_word = 1.5;
    double lpddr_bw_bytes_per_ns = 12.8;
    double lpddr_energy_pj_per_byte = 20.0;
    double ops_per_mac = 2.0; // GOPS convention: multiply + add
};

struct HardwareSpec {
    systolic::TPUSpec tpu;
    pim::PIMSpec pim;
    SystemSpec system;
};

void validate(const SystemSpec& system);
void validate(const HardwareSpec& hw);

} // namespace pimllm
