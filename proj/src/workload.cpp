#include "pimllm/workload.hpp"

#include <stdexcept>

namespace pimllm::workload {

void validate(const ModelSpec& model) {
    auto require_positive = [&](std::int64_t value, const char* field) {
        if (value < 1) {
            throw std::invalid_argument("model '" + model.name + "': " + field +
                                        " must be >= 1, got " + std::to_string(value));
        }
    };
    require_positive(model.d, "d");
    require_positive(model.h, "h");
    require_positive(model.d_ff, "d_ff");
    require_positive(model.n_layers, "n_layers");
    require_positive(model.context_len, "context_len");
    if (model.d % model.h != 0) {
        throw std::invalid_argument("model '" + model.name + "': d not divisible by h (d=" +
                                    std::to_string(model.d) + ", h=" + std::to_string(model.h) +
                                    ")");
    }
}

std::string_view to_string(MatMulRole role) {
    switch (role) {
    case MatMulRole::ProjQ: return "ProjQ";
    case MatMulRole::ProjK: return "ProjK";
    case MatMulRole::ProjV: return "ProjV";
    case MatMulRole::ProjX: return "ProjX";
    case MatMulRole::FFIntermediate: return "FFIntermediate";
    case MatMulRole::FFOutput: return "FFOutput";
    case MatMulRole::AttnScore: return "AttnScore";
    case MatMulRole::AttnContext: return "AttnContext";
    }
    return "?";
}

std::string_view to_string(Precision precision) {
    return precision == Precision::W1A8 ? "W1A8" : "W8A8";
}

std::string_view to_string(NonlinearKind kind) {
    switch (kind) {
    case NonlinearKind::Softmax: return "Softmax";
    case NonlinearKind::GELU: return "GELU";
    case NonlinearKind::LayerNorm: return "LayerNorm";
    }
    return "?";
}

std::vector<MatMulOp> OpGraph::matmuls() const {
    std::vector<MatMulOp> out;
    for (const auto& op : ops) {
        if (const auto* mm = std::get_if<MatMulOp>(&op)) {
            out.push_back(*mm);
        }
    }
    return out;
}

std::vector<NonlinearOp> OpGraph::nonlinears() const {
    std::vector<NonlinearOp> out;
    for (const auto& op : ops) {
        if (const auto* nl = std::get_if<NonlinearOp>(&op)) {
            out.push_back(*nl);
        }
    }
    return out;
}

std::vector<Op> OpGraph::layer(std::int64_t layer_index) const {
    std::vector<Op> out;
    for (const auto& op : ops) {
        const auto idx = std::visit([](const auto& o) { return o.layer_index; }, op);
        if (idx == layer_index) {
            out.push_back(op);
        }
    }
    return out;
}

namespace {

MatMulOp matmul(MatMulRole role, std::int64_t m, std::int64_t k, std::int64_t layer,
                std::optional<std::int64_t> head = std::nullopt) {
    return MatMulOp{role, m, k, 1, precision_of(role), head, layer};
}

NonlinearOp nonlinear(NonlinearKind kind, std::int64_t elements, std::int64_t layer) {
    return NonlinearOp{kind, elements, layer, placement_of(kind)};
}

} // namespace

OpGraph build_op_graph(const ModelSpec& model) {
    validate(model);

    const auto d = model.d;
    const auto h = model.h;
    const auto dh = model.head_dim();
    const auto l = model.context_len;

    OpGraph graph{model, {}};
    graph.ops.reserve(static_cast<std::size_t>(model.n_layers * (10 + 2 * h)));

    for (std::int64_t layer = 0; layer < model.n_layers; ++layer) {
        auto& ops = graph.ops;
        ops.emplace_back(matmul(MatMulRole::ProjQ, d, d, layer));
        ops.emplace_back(matmul(MatMulRole::ProjK, d, d, layer));
        ops.emplace_back(matmul(MatMulRole::ProjV, d, d, layer));
        for (std::int64_t head = 0; head < h; ++head) {
            // (l x d/h) . (d/h x 1): cached keys against the query slice
            ops.emplace_back(matmul(MatMulRole::AttnScore, l, dh, layer, head));
        }
        ops.emplace_back(nonlinear(NonlinearKind::Softmax, h * l, layer));
        for (std::int64_t head = 0; head < h; ++head) {
            // (d/h x l) . (l x 1): cached values against the score vector
            ops.emplace_back(matmul(MatMulRole::AttnContext, dh, l, layer, head));
        }
        ops.emplace_back(matmul(MatMulRole::ProjX, d, d, layer));
        ops.emplace_back(nonlinear(NonlinearKind::LayerNorm, d, layer));
        ops.emplace_back(matmul(MatMulRole::FFIntermediate, model.d_ff, d, layer));
        ops.emplace_back(nonlinear(NonlinearKind::GELU, model.d_ff, layer));
        ops.emplace_back(matmul(MatMulRole::FFOutput, d, model.d_ff, layer));
        ops.emplace_back(nonlinear(NonlinearKind::LayerNorm, d, layer));
    }
    return graph;
}

MacCounts mac_counts(const OpGraph& graph) {
    MacCounts counts;
    for (const auto& op : graph.ops) {
        if (const auto* mm = std::get_if<MatMulOp>(&op)) {
            (mm->precision == Precision::W1A8 ? counts.low : counts.high) += mm->macs();
        }
    }
    return counts;
}

double low_precision_fraction(const ModelSpec& model) {
    validate(model);
    const auto d = static_cast<std::uint64_t>(model.d);
    const auto d_ff = static_cast<std::uint64_t>(model.d_ff);
    const auto l = static_cast<std::uint64_t>(model.context_len);
    const std::uint64_t low = 4 * d * d + 2 * d * d_ff;
    const std::uint64_t high = 2 * l * d;
    return static_cast<double>(low) / static_cast<double>(low + high);
}

} // namespace pimllm::workload
