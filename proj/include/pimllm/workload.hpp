#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pimllm::workload {

/// Hyperparameters of a decoder-only transformer plus the decode-step
/// context length. `context_len` counts the current token.
struct ModelSpec {
    std::string name;
    std::int64_t d = 1;           // embedding dimension
    std::int64_t h = 1;           // attention heads
    std::int64_t d_ff = 1;        // feed-forward dimension
    std::int64_t n_layers = 1;    // decoder blocks
    std::int64_t context_len = 1; // cached K/V rows, current token included

    std::int64_t head_dim() const { return d / h; }
};

/// Throws std::invalid_argument when a field is < 1 or d is not divisible by h.
void validate(const ModelSpec& model);

enum class MatMulRole {
    ProjQ,
    ProjK,
    ProjV,
    ProjX,
    FFIntermediate,
    FFOutput,
    AttnScore,
    AttnContext,
};

enum class Precision { W1A8, W8A8 };

std::string_view to_string(MatMulRole role);
std::string_view to_string(Precision precision);

/// True for the weight-to-activation MatMuls (projections and FF).
constexpr bool is_projection(MatMulRole role) {
    return role != MatMulRole::AttnScore && role != MatMulRole::AttnContext;
}

constexpr Precision precision_of(MatMulRole role) {
    return is_projection(role) ? Precision::W1A8 : Precision::W8A8;
}

/// (m x k) . (k x n). During decode n is always 1.
struct MatMulOp {
    MatMulRole role = MatMulRole::ProjQ;
    std::int64_t m = 1;
    std::int64_t k = 1;
    std::int64_t n = 1;
    Precision precision = Precision::W1A8;
    std::optional<std::int64_t> head_index;
    std::int64_t layer_index = 0;

    std::uint64_t macs() const {
        return static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(k) *
               static_cast<std::uint64_t>(n);
    }
};

enum class NonlinearKind { Softmax, GELU, LayerNorm };
enum class Placement { TPU_NFU, PIM_Post };

std::string_view to_string(NonlinearKind kind);

constexpr Placement placement_of(NonlinearKind kind) {
    return kind == NonlinearKind::Softmax ? Placement::TPU_NFU : Placement::PIM_Post;
}

struct NonlinearOp {
    NonlinearKind kind = NonlinearKind::Softmax;
    std::int64_t element_count = 0;
    std::int64_t layer_index = 0;
    Placement placement = Placement::TPU_NFU;
};

using Op = std::variant<MatMulOp, NonlinearOp>;

/// Every operation of one decode step, layer by layer in execution order.
struct OpGraph {
    ModelSpec model;
    std::vector<Op> ops;

    std::vector<MatMulOp> matmuls() const;
    std::vector<NonlinearOp> nonlinears() const;
    /// Ops of one decoder layer, in order.
    std::vector<Op> layer(std::int64_t layer_index) const;
};

/// Builds the per-token operation list. Per layer:
/// Q/K/V projections, h score MVMs, softmax, h context MVMs, X projection,
/// LayerNorm, FF intermediate, GELU, FF output, LayerNorm.
OpGraph build_op_graph(const ModelSpec& model);

struct MacCounts {
    std::uint64_t low = 0;  // W1A8
    std::uint64_t high = 0; // W8A8

    std::uint64_t total() const { return low + high; }
    double low_fraction() const {
        return static_cast<double>(low) / static_cast<double>(low + high);
    }
};

MacCounts mac_counts(const OpGraph& graph);

/// Closed form (4d^2 + 2 d d_ff) / (4d^2 + 2 d d_ff + 2 l d); independent of n_layers.
double low_precision_fraction(const ModelSpec& model);

} // namespace pimllm::workload
