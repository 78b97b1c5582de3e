#include "pimllm/systolic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimllm::systolic {

std::string_view to_string(Dataflow dataflow) {
    switch (dataflow) {
    case Dataflow::OS: return "OS";
    case Dataflow::WS: return "WS";
    case Dataflow::IS: return "IS";
    }
    return "?";
}

Dataflow parse_dataflow(std::string_view text) {
    if (text == "OS") return Dataflow::OS;
    if (text == "WS") return Dataflow::WS;
    if (text == "IS") return Dataflow::IS;
    throw std::invalid_argument("unknown dataflow '" + std::string(text) + "' (expected OS, WS or IS)");
}

void validate(const TPUSpec& hw) {
    if (hw.rows < 1 || hw.cols < 1) {
        throw std::invalid_argument("tpu: rows and cols must be >= 1");
    }
    if (!(hw.freq_hz > 0.0)) {
        throw std::invalid_argument("tpu: freq_hz must be > 0");
    }
    if (hw.sram_bw_bytes_per_cycle < 1) {
        throw std::invalid_argument("tpu: sram_bw_bytes_per_cycle must be >= 1");
    }
    if (!(hw.dram_bw_bytes_per_cycle > 0.0)) {
        throw std::invalid_argument("tpu: dram_bw_bytes_per_cycle must be > 0");
    }
    if (hw.mac_energy_pj < 0.0 || hw.sram_energy_pj_per_byte < 0.0 ||
        hw.dram_energy_pj_per_byte < 0.0 || hw.nfu_cycles_per_element < 0.0) {
        throw std::invalid_argument("tpu: energies and nfu_cycles_per_element must be >= 0");
    }
}

GemmShape tpu_gemm(const workload::MatMulOp& op) {
    return GemmShape{op.n, op.k, op.m};
}

TileCost& TileCost::operator+=(const TileCost& other) {
    compute_cycles += other.compute_cycles;
    stall_cycles += other.stall_cycles;
    sram_reads_bytes += other.sram_reads_bytes;
    sram_writes_bytes += other.sram_writes_bytes;
    dram_reads_bytes += other.dram_reads_bytes;
    return *this;
}

namespace {

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

void check_shape(const GemmShape& s) {
    if (s.m < 1 || s.k < 1 || s.n < 1) {
        throw std::invalid_argument("gemm dimensions must be >= 1 (M=" + std::to_string(s.m) +
                                    ", K=" + std::to_string(s.k) + ", N=" + std::to_string(s.n) +
                                    ")");
    }
}

std::int64_t stall_for(std::int64_t traffic_bytes, std::int64_t compute, const TPUSpec& hw) {
    const auto transfer = ceil_div(traffic_bytes, hw.sram_bw_bytes_per_cycle);
    return std::max<std::int64_t>(0, transfer - compute);
}

} // namespace

std::int64_t fold_count(const GemmShape& s, const TPUSpec& hw) {
    switch (hw.dataflow) {
    case Dataflow::OS: return ceil_div(s.m, hw.rows) * ceil_div(s.n, hw.cols);
    case Dataflow::WS: return ceil_div(s.k, hw.rows) * ceil_div(s.n, hw.cols);
    case Dataflow::IS: return ceil_div(s.m, hw.rows) * ceil_div(s.k, hw.cols);
    }
    return 0;
}

TileCost analytic_cycles(const GemmShape& s, const TPUSpec& hw) {
    check_shape(s);
    validate(hw);
    const auto R = hw.rows;
    const auto C = hw.cols;
    const auto folds = fold_count(s, hw);
    const auto mn = s.m * s.n;

    TileCost cost;
    switch (hw.dataflow) {
    case Dataflow::OS:
        cost.compute_cycles = folds * (s.k + R + C - 2);
        cost.sram_reads_bytes = ceil_div(s.n, C) * s.m * s.k + ceil_div(s.m, R) * s.k * s.n;
        cost.sram_writes_bytes = mn;
        break;
    case Dataflow::WS: {
        const auto k_folds = ceil_div(s.k, R);
        cost.compute_cycles = folds * (R + s.m + R + C - 2);
        cost.sram_reads_bytes = s.k * s.n + ceil_div(s.n, C) * s.m * s.k + (k_folds - 1) * mn;
        cost.sram_writes_bytes = k_folds * mn;
        break;
    }
    case Dataflow::IS: {
        const auto k_folds = ceil_div(s.k, C);
        cost.compute_cycles = folds * (C + s.n + R + C - 2);
        cost.sram_reads_bytes = s.m * s.k + ceil_div(s.m, R) * s.k * s.n + (k_folds - 1) * mn;
        cost.sram_writes_bytes = k_folds * mn;
        break;
    }
    }
    cost.dram_reads_bytes = s.m * s.k + s.k * s.n;
    cost.stall_cycles =
        stall_for(cost.sram_reads_bytes + cost.sram_writes_bytes, cost.compute_cycles, hw);
    return cost;
}

// ---------------------------------------------------------------------------
// Cycle-stepped oracle

namespace {

struct Token {
    bool present = false;
    bool valid = false;
    std::int64_t value = 0;
    std::int64_t index = 0; // output row/column carried by partial sums
};

class Grid {
public:
    Grid(std::int64_t rows, std::int64_t cols)
        : cols_(cols), cells_(static_cast<std::size_t>(rows * cols)) {}

    Token& at(std::int64_t r, std::int64_t c) {
        return cells_[static_cast<std::size_t>(r * cols_ + c)];
    }
    const Token& at(std::int64_t r, std::int64_t c) const {
        return cells_[static_cast<std::size_t>(r * cols_ + c)];
    }
private:
    std::int64_t cols_;
    std::vector<Token> cells_;
};

class Matrix {
public:
    Matrix(std::int64_t rows, std::int64_t cols)
        : cols_(cols), data_(static_cast<std::size_t>(rows * cols), 0) {}

    std::int64_t& operator()(std::int64_t r, std::int64_t c) {
        return data_[static_cast<std::size_t>(r * cols_ + c)];
    }
    std::int64_t operator()(std::int64_t r, std::int64_t c) const {
        return data_[static_cast<std::size_t>(r * cols_ + c)];
    }
    bool operator==(const Matrix&) const = default;

private:
    std::int64_t cols_;
    std::vector<std::int64_t> data_;
};

// Deterministic int8-range operand fill; the values only serve the internal product check.
Matrix make_operand(std::int64_t rows, std::int64_t cols, std::uint32_t seed) {
    Matrix mat(rows, cols);
    std::uint32_t state = seed * 2654435761u + 12345u;
    for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t c = 0; c < cols; ++c) {
            state = state * 1664525u + 1013904223u;
            mat(r, c) = static_cast<std::int64_t>((state >> 24) & 0xff) - 128;
        }
    }
    return mat;
}

struct OracleState {
    const GemmShape& shape;
    const TPUSpec& hw;
    Matrix a;
    Matrix b;
    Matrix out;
    std::vector<bool> touched; // output element already holds a partial sum
    std::int64_t now = 0;      // cycles elapsed before the current fold
    std::int64_t last_mac = 0; // 1-based cycle of the most recent MAC
    std::uint64_t macs = 0;
    std::int64_t reads = 0;
    std::int64_t writes = 0;

    OracleState(const GemmShape& s, const TPUSpec& h)
        : shape(s), hw(h), a(make_operand(s.m, s.k, 1)), b(make_operand(s.k, s.n, 2)),
          out(s.m, s.n), touched(static_cast<std::size_t>(s.m * s.n), false) {}

    void mac(std::int64_t fold_cycle) {
        ++macs;
        last_mac = now + fold_cycle + 1;
    }

    // Partial sums leaving the array are accumulated in output SRAM.
    void retire(std::int64_t row, std::int64_t col, std::int64_t value) {
        const auto slot = static_cast<std::size_t>(row * shape.n + col);
        if (touched[slot]) {
            ++reads;
        }
        touched[slot] = true;
        out(row, col) += value;
        ++writes;
    }
};

// Outputs pinned in PEs; A flows right, B flows down.
void run_os_fold(OracleState& st, std::int64_t m0, std::int64_t n0) {
    const auto R = st.hw.rows;
    const auto C = st.hw.cols;
    const auto K = st.shape.k;
    const auto mr = std::min(R, st.shape.m - m0);
    const auto nc = std::min(C, st.shape.n - n0);

    Grid a_reg(R, C), b_reg(R, C), a_next(R, C), b_next(R, C);
    std::vector<std::int64_t> acc(static_cast<std::size_t>(R * C), 0);

    std::int64_t t = 0;
    std::int64_t last_active = -1;
    for (;; ++t) {
        bool active = false;
        for (std::int64_t i = 0; i < R; ++i) {
            for (std::int64_t j = 0; j < C; ++j) {
                Token a_in;
                Token b_in;
                if (j == 0) {
                    const auto k = t - i;
                    if (k >= 0 && k < K) {
                        a_in = Token{true, i < mr, i < mr ? st.a(m0 + i, k) : 0, 0};
                        if (a_in.valid) ++st.reads;
                    }
                } else {
                    a_in = a_reg.at(i, j - 1);
                }
                if (i == 0) {
                    const auto k = t - j;
                    if (k >= 0 && k < K) {
                        b_in = Token{true, j < nc, j < nc ? st.b(k, n0 + j) : 0, 0};
                        if (b_in.valid) ++st.reads;
                    }
                } else {
                    b_in = b_reg.at(i - 1, j);
                }
                if (a_in.present != b_in.present) {
                    throw std::logic_error("oracle: OS operand skew mismatch");
                }
                if (a_in.present) {
                    active = true;
                    if (a_in.valid && b_in.valid) {
                        acc[static_cast<std::size_t>(i * C + j)] += a_in.value * b_in.value;
                        st.mac(t);
                    }
                }
                a_next.at(i, j) = a_in;
                b_next.at(i, j) = b_in;
            }
        }
        std::swap(a_reg, a_next);
        std::swap(b_reg, b_next);
        if (active) {
            last_active = t;
        } else {
            break;
        }
    }

    for (std::int64_t i = 0; i < mr; ++i) {
        for (std::int64_t j = 0; j < nc; ++j) {
            st.retire(m0 + i, n0 + j, acc[static_cast<std::size_t>(i * C + j)]);
        }
    }
    st.now += last_active + 1;
}

// B block pinned (rows = k, cols = n); A flows right, partial sums flow down.
void run_ws_fold(OracleState& st, std::int64_t k0, std::int64_t n0) {
    const auto R = st.hw.rows;
    const auto C = st.hw.cols;
    const auto M = st.shape.m;
    const auto kr = std::min(R, st.shape.k - k0);
    const auto nc = std::min(C, st.shape.n - n0);

    // Preload: weights shift down the columns for R cycles.
    Grid w(R, C), w_next(R, C);
    for (std::int64_t p = 0; p < R; ++p) {
        const auto row = R - 1 - p;
        for (std::int64_t i = R - 1; i >= 0; --i) {
            for (std::int64_t j = 0; j < C; ++j) {
                if (i > 0) {
                    w_next.at(i, j) = w.at(i - 1, j);
                } else {
                    const bool valid = row < kr && j < nc;
                    w_next.at(0, j) = Token{true, valid, valid ? st.b(k0 + row, n0 + j) : 0, 0};
                    if (valid) ++st.reads;
                }
            }
        }
        std::swap(w, w_next);
    }
    st.now += R;

    Grid a_reg(R, C), p_reg(R, C), a_next(R, C), p_next(R, C);
    std::int64_t last_active = -1;
    for (std::int64_t t = 0;; ++t) {
        bool active = false;
        for (std::int64_t i = 0; i < R; ++i) {
            for (std::int64_t j = 0; j < C; ++j) {
                Token a_in;
                Token p_in;
                if (j == 0) {
                    const auto m = t - i;
                    if (m >= 0 && m < M) {
                        a_in = Token{true, i < kr, i < kr ? st.a(m, k0 + i) : 0, m};
                        if (a_in.valid) ++st.reads;
                    }
                } else {
                    a_in = a_reg.at(i, j - 1);
                }
                if (i == 0) {
                    const auto m = t - j;
                    if (m >= 0 && m < M) {
                        p_in = Token{true, j < nc, 0, m};
                    }
                } else {
                    p_in = p_reg.at(i - 1, j);
                }
                if (a_in.present != p_in.present || a_in.index != p_in.index) {
                    throw std::logic_error("oracle: WS operand skew mismatch");
                }
                if (p_in.present) {
                    active = true;
                    const auto& weight = w.at(i, j);
                    if (a_in.valid && p_in.valid && weight.valid) {
                        p_in.value += a_in.value * weight.value;
                        st.mac(t);
                    }
                    if (i == R - 1 && p_in.valid) {
                        st.retire(p_in.index, n0 + j, p_in.value);
                    }
                }
                a_next.at(i, j) = a_in;
                p_next.at(i, j) = p_in;
            }
        }
        std::swap(a_reg, a_next);
        std::swap(p_reg, p_next);
        if (active) {
            last_active = t;
        } else {
            break;
        }
    }
    st.now += last_active + 1;
}

// A block pinned (rows = m, cols = k); B flows down, partial sums flow right.
void run_is_fold(OracleState& st, std::int64_t m0, std::int64_t k0) {
    const auto R = st.hw.rows;
    const auto C = st.hw.cols;
    const auto N = st.shape.n;
    const auto mr = std::min(R, st.shape.m - m0);
    const auto kc = std::min(C, st.shape.k - k0);

    // Preload: inputs shift right along the rows for C cycles.
    Grid s(R, C), s_next(R, C);
    for (std::int64_t p = 0; p < C; ++p) {
        const auto col = C - 1 - p;
        for (std::int64_t i = 0; i < R; ++i) {
            for (std::int64_t j = C - 1; j >= 0; --j) {
                if (j > 0) {
                    s_next.at(i, j) = s.at(i, j - 1);
                } else {
                    const bool valid = i < mr && col < kc;
                    s_next.at(i, 0) = Token{true, valid, valid ? st.a(m0 + i, k0 + col) : 0, 0};
                    if (valid) ++st.reads;
                }
            }
        }
        std::swap(s, s_next);
    }
    st.now += C;

    Grid b_reg(R, C), p_reg(R, C), b_next(R, C), p_next(R, C);
    std::int64_t last_active = -1;
    for (std::int64_t t = 0;; ++t) {
        bool active = false;
        for (std::int64_t i = 0; i < R; ++i) {
            for (std::int64_t j = 0; j < C; ++j) {
                Token b_in;
                Token p_in;
                if (i == 0) {
                    const auto n = t - j;
                    if (n >= 0 && n < N) {
                        b_in = Token{true, j < kc, j < kc ? st.b(k0 + j, n) : 0, n};
                        if (b_in.valid) ++st.reads;
                    }
                } else {
                    b_in = b_reg.at(i - 1, j);
                }
                if (j == 0) {
                    const auto n = t - i;
                    if (n >= 0 && n < N) {
                        p_in = Token{true, i < mr, 0, n};
                    }
                } else {
                    p_in = p_reg.at(i, j - 1);
                }
                if (b_in.present != p_in.present || b_in.index != p_in.index) {
                    throw std::logic_error("oracle: IS operand skew mismatch");
                }
                if (p_in.present) {
                    active = true;
                    const auto& input = s.at(i, j);
                    if (b_in.valid && p_in.valid && input.valid) {
                        p_in.value += input.value * b_in.value;
                        st.mac(t);
                    }
                    if (j == C - 1 && p_in.valid) {
                        st.retire(m0 + i, p_in.index, p_in.value);
                    }
                }
                b_next.at(i, j) = b_in;
                p_next.at(i, j) = p_in;
            }
        }
        std::swap(b_reg, b_next);
        std::swap(p_reg, p_next);
        if (active) {
            last_active = t;
        } else {
            break;
        }
    }
    st.now += last_active + 1;
}

Matrix reference_product(const Matrix& a, const Matrix& b, const GemmShape& s) {
    Matrix out(s.m, s.n);
    for (std::int64_t i = 0; i < s.m; ++i) {
        for (std::int64_t k = 0; k < s.k; ++k) {
            const auto av = a(i, k);
            for (std::int64_t j = 0; j < s.n; ++j) {
                out(i, j) += av * b(k, j);
            }
        }
    }
    return out;
}

} // namespace

CycleSimResult cycle_accurate_sim(const GemmShape& s, const TPUSpec& hw) {
    check_shape(s);
    validate(hw);
    if (s.macs() > kOracleMacLimit) {
        throw std::length_error("cycle_accurate_sim: " + std::to_string(s.macs()) +
                                " MACs exceeds the oracle limit of " +
                                std::to_string(kOracleMacLimit));
    }

    OracleState st(s, hw);
    const auto R = hw.rows;
    const auto C = hw.cols;
    switch (hw.dataflow) {
    case Dataflow::OS:
        for (std::int64_t m0 = 0; m0 < s.m; m0 += R)
            for (std::int64_t n0 = 0; n0 < s.n; n0 += C) run_os_fold(st, m0, n0);
        break;
    case Dataflow::WS:
        for (std::int64_t n0 = 0; n0 < s.n; n0 += C)
            for (std::int64_t k0 = 0; k0 < s.k; k0 += R) run_ws_fold(st, k0, n0);
        break;
    case Dataflow::IS:
        for (std::int64_t m0 = 0; m0 < s.m; m0 += R)
            for (std::int64_t k0 = 0; k0 < s.k; k0 += C) run_is_fold(st, m0, k0);
        break;
    }

    if (st.macs != s.macs()) {
        throw std::logic_error("oracle executed " + std::to_string(st.macs) + " MACs, expected " +
                               std::to_string(s.macs()));
    }
    if (!(st.out == reference_product(st.a, st.b, s))) {
        throw std::logic_error("oracle product differs from reference matmul");
    }

    CycleSimResult result;
    result.macs_executed = st.macs;
    result.cost.compute_cycles = st.last_mac;
    result.cost.sram_reads_bytes = st.reads;
    result.cost.sram_writes_bytes = st.writes;
    result.cost.dram_reads_bytes = s.m * s.k + s.k * s.n;
    result.cost.stall_cycles =
        stall_for(st.reads + st.writes, result.cost.compute_cycles, hw);
    return result;
}

TileEnergy tile_energy(const TileCost& cost, std::uint64_t macs, const TPUSpec& hw) {
    TileEnergy e;
    e.mac_pj = hw.mac_energy_pj * static_cast<double>(macs);
    e.sram_pj = hw.sram_energy_pj_per_byte *
                static_cast<double>(cost.sram_reads_bytes + cost.sram_writes_bytes);
    e.dram_pj = hw.dram_energy_pj_per_byte * static_cast<double>(cost.dram_reads_bytes);
    return e;
}

AttentionCost attention_block_cost(std::span<const workload::Op> layer_ops, const TPUSpec& hw) {
    using workload::MatMulOp;
    using workload::MatMulRole;
    using workload::NonlinearKind;
    using workload::NonlinearOp;

    AttentionCost result;
    double nfu_elements = 0.0;
    for (const auto& op : layer_ops) {
        if (const auto* mm = std::get_if<MatMulOp>(&op)) {
            if (workload::is_projection(mm->role)) {
                throw std::invalid_argument("attention_block_cost: projection op " +
                                            std::string(workload::to_string(mm->role)) +
                                            " does not belong on the attention path");
            }
            auto cost = analytic_cycles(tpu_gemm(*mm), hw);
            // K/V live in weight SRAM; nothing is streamed from DRAM.
            cost.dram_reads_bytes = 0;
            result.tile += cost;
            result.macs += mm->macs();
        } else {
            const auto& nl = std::get<NonlinearOp>(op);
            if (nl.kind != NonlinearKind::Softmax) {
                throw std::invalid_argument("attention_block_cost: unexpected nonlinear op " +
                                            std::string(workload::to_string(nl.kind)));
            }
            nfu_elements += static_cast<double>(nl.element_count);
        }
    }
    result.tile.compute_cycles +=
        static_cast<std::int64_t>(std::ceil(hw.nfu_cycles_per_element * nfu_elements));
    return result;
}

} // namespace pimllm::systolic
