#include "sqlgrad/autodiff.hpp"

#include <sstream>

namespace sqlgrad {

NodeId GradientProgram::var(const std::string& name) const {
    if (auto it = forward_vars.find(name); it != forward_vars.end()) return it->second;
    for (const auto& [n, id] : backward_vars)
        if (n == name) return id;
    throw Error("gradient program: unknown variable '" + name + "'");
}

namespace {

/// Marks nodes whose subtree contains at least one Param. Seeds are only
/// propagated into param-bearing subtrees, keeping the graph free of dead
/// derivative expressions.
std::vector<bool> param_reachability(const ExprGraph& g) {
    std::vector<bool> has(g.size(), false);
    for (NodeId id : g.topo_order()) {
        const ExprNode& n = g.node(id);
        if (n.kind == OpKind::Param)
            has[id.index] = true;
        else if (!n.is_leaf()) {
            bool h = has[n.lhs.index];
            if (n.is_binary()) h = h || has[n.rhs.index];
            has[id.index] = h;
        }
    }
    return has;
}

struct Deriver {
    ExprGraph& g;
    const std::vector<bool>& has_param;
    std::map<NodeId, NodeId>* trace = nullptr;
    std::map<std::string, NodeId> grads;

    void accumulate(const std::string& param, NodeId seed) {
        auto it = grads.find(param);
        if (it == grads.end())
            grads.emplace(param, seed);
        else
            it->second = g.add(it->second, seed);
    }

    void walk(NodeId z, NodeId seed) {
        if (!(g.shape(seed) == g.shape(z)))
            throw Error("derive: seed shape does not match node shape");
        if (trace) trace->emplace(z, seed);
        const ExprNode n = g.node(z);
        switch (n.kind) {
            case OpKind::Input:
                return;
            case OpKind::Param:
                accumulate(n.name, seed);
                return;
            case OpKind::Add:
                if (has_param[n.lhs.index]) walk(n.lhs, seed);
                if (has_param[n.rhs.index]) walk(n.rhs, seed);
                return;
            case OpKind::Sub:
                if (has_param[n.lhs.index]) walk(n.lhs, seed);
                if (has_param[n.rhs.index]) walk(n.rhs, g.scalar_mul(-1.0, seed));
                return;
            case OpKind::Hadamard:
                if (has_param[n.lhs.index]) walk(n.lhs, g.hadamard(seed, n.rhs));
                if (has_param[n.rhs.index]) walk(n.rhs, g.hadamard(seed, n.lhs));
                return;
            case OpKind::MatMul:
                // d/dX = seed * Y^T, d/dY = X^T * seed; the right-child rule
                // keeps the gradient in the parameter's own shape.
                if (has_param[n.lhs.index]) walk(n.lhs, g.matmul(seed, g.transpose(n.rhs)));
                if (has_param[n.rhs.index]) walk(n.rhs, g.matmul(g.transpose(n.lhs), seed));
                return;
            case OpKind::Transpose:
                if (has_param[n.lhs.index]) walk(n.lhs, g.transpose(seed));
                return;
            case OpKind::ScalarMul:
                if (has_param[n.lhs.index]) walk(n.lhs, g.scalar_mul(n.scalar, seed));
                return;
            case OpKind::Map: {
                if (!has_param[n.lhs.index]) return;
                switch (n.fn) {
                    case MapFn::Sigmoid:
                        // sig'(x) in terms of the forward value: a * (1 - a).
                        walk(n.lhs, g.hadamard(g.hadamard(seed, z), g.map(MapFn::OneMinus, z)));
                        return;
                    case MapFn::Square:
                        walk(n.lhs, g.hadamard(seed, g.scalar_mul(2.0, n.lhs)));
                        return;
                    case MapFn::OneMinus:
                        walk(n.lhs, g.scalar_mul(-1.0, seed));
                        return;
                    case MapFn::Identity:
                        walk(n.lhs, seed);
                        return;
                }
                return;
            }
        }
        throw Error("derive: unknown node kind");
    }
};

} // namespace

std::map<std::string, NodeId> derive(ExprGraph& graph, NodeId root, NodeId seed,
                                     std::map<NodeId, NodeId>* seed_trace) {
    if (!graph.shapes_inferred()) throw Error("derive: shapes must be inferred first");
    auto reach = param_reachability(graph);
    Deriver d{graph, reach, seed_trace, {}};
    if (reach[root.index]) d.walk(root, seed);
    return d.grads;
}

GradientProgram build_mlp_loss(ExprGraph& graph, int input_dim, int hidden_dim, int output_dim,
                               int num_rows) {
    if (input_dim < 1 || hidden_dim < 1 || output_dim < 1 || num_rows < 1)
        throw Error("build_mlp_loss: all dimensions must be >= 1");
    NodeId x = graph.input("x", Shape{num_rows, input_dim});
    NodeId y = graph.input("y_ones", Shape{num_rows, output_dim});
    NodeId w_xh = graph.param("w_xh", Shape{input_dim, hidden_dim});
    NodeId w_ho = graph.param("w_ho", Shape{hidden_dim, output_dim});

    NodeId a_xh = graph.map(MapFn::Sigmoid, graph.matmul(x, w_xh));
    NodeId a_ho = graph.map(MapFn::Sigmoid, graph.matmul(a_xh, w_ho));
    NodeId loss = graph.map(MapFn::Square, graph.sub(a_ho, y));
    graph.infer_shapes();

    GradientProgram p;
    p.loss = loss;
    p.forward_vars = {{"a_xh", a_xh}, {"a_ho", a_ho}};
    p.param_order = {"w_xh", "w_ho"};
    return p;
}

void gradients_mlp(ExprGraph& graph, GradientProgram& program) {
    NodeId a_xh = program.forward_vars.at("a_xh");
    NodeId a_ho = program.forward_vars.at("a_ho");
    NodeId y = graph.leaves().at("y_ones");
    NodeId z2 = graph.node(a_ho).lhs;  // MatMul(a_xh, w_ho)
    NodeId z1 = graph.node(a_xh).lhs;  // MatMul(x, w_xh)

    // The squared-error derivative chain applied to a seed of ones collapses
    // to 2*(a_ho - y_ones); backpropagation starts below the Square with
    // that value as the initial seed.
    NodeId l_ho = graph.scalar_mul(2.0, graph.sub(a_ho, y));
    std::map<NodeId, NodeId> seeds;
    auto grads = derive(graph, a_ho, l_ho, &seeds);

    // The named backward vars are the seeds the differentiator propagated:
    // d_ho into the outer MatMul, l_xh into a_xh, d_xh into the inner MatMul.
    program.backward_vars = {{"l_ho", canonicalize(graph, l_ho)},
                             {"d_ho", canonicalize(graph, seeds.at(z2))},
                             {"l_xh", canonicalize(graph, seeds.at(a_xh))},
                             {"d_xh", canonicalize(graph, seeds.at(z1))}};
    program.grads.clear();
    for (auto& [param, expr] : grads) program.grads[param] = canonicalize(graph, expr);
}

namespace {

struct Canonicalizer {
    ExprGraph& g;
    std::map<std::uint32_t, NodeId> memo;

    bool same_node(NodeId a, NodeId b) { return a == b; }

    NodeId rebuild(const ExprNode& n, NodeId lhs, NodeId rhs) {
        ExprNode copy = n;
        copy.lhs = lhs;
        copy.rhs = rhs;
        return g.add_node(copy);
    }

    NodeId canon(NodeId id) {
        if (auto it = memo.find(id.index); it != memo.end()) return it->second;
        const ExprNode n = g.node(id);
        NodeId result = id;
        if (!n.is_leaf()) {
            NodeId lhs = canon(n.lhs);
            NodeId rhs = n.is_binary() ? canon(n.rhs) : NodeId{};
            NodeId cur = (lhs == n.lhs && (!n.is_binary() || rhs == n.rhs))
                             ? id
                             : rebuild(n, lhs, rhs);
            result = rewrite(cur);
        }
        memo.emplace(id.index, result);
        return result;
    }

    /// Applies local rules until none fires.
    NodeId rewrite(NodeId id) {
        while (true) {
            const ExprNode n = g.node(id);
            if (n.kind == OpKind::Map && n.fn == MapFn::Identity) {
                id = n.lhs;
                continue;
            }
            if (n.kind == OpKind::Transpose && g.node(n.lhs).kind == OpKind::Transpose) {
                id = g.node(n.lhs).lhs;
                continue;
            }
            if (n.kind == OpKind::ScalarMul && g.node(n.lhs).kind == OpKind::ScalarMul) {
                const ExprNode& inner = g.node(n.lhs);
                id = g.scalar_mul(n.scalar * inner.scalar, inner.lhs);
                continue;
            }
            if (n.kind == OpKind::Add && g.node(n.rhs).kind == OpKind::ScalarMul &&
                g.node(n.rhs).scalar == -1.0) {
                id = g.sub(n.lhs, g.node(n.rhs).lhs);
                continue;
            }
            return id;
        }
    }
};

} // namespace

NodeId canonicalize(ExprGraph& graph, NodeId node) {
    if (!graph.shapes_inferred()) throw Error("canonicalize: shapes must be inferred first");
    Canonicalizer c{graph, {}};
    return c.canon(node);
}

std::string format_expr(const ExprGraph& graph, NodeId node,
                        const std::map<NodeId, std::string>& names) {
    const ExprNode& n = graph.node(node);
    auto sub = [&](NodeId c) {
        if (auto it = names.find(c); it != names.end()) return it->second;
        return format_expr(graph, c, names);
    };
    switch (n.kind) {
        case OpKind::Input:
        case OpKind::Param:
            return n.name;
        case OpKind::ScalarMul:
            return "ScalarMul(" + format_double(n.scalar) + ", " + sub(n.lhs) + ")";
        case OpKind::Map:
            return std::string("Map(") + map_fn_name(n.fn) + ", " + sub(n.lhs) + ")";
        case OpKind::Transpose:
            return "Transpose(" + sub(n.lhs) + ")";
        default:
            return std::string(op_kind_name(n.kind)) + "(" + sub(n.lhs) + ", " + sub(n.rhs) + ")";
    }
}

std::string format_program(ExprGraph& graph, const GradientProgram& program) {
    std::map<NodeId, std::string> names;
    for (const auto& [name, id] : program.forward_vars) names[canonicalize(graph, id)] = name;
    for (const auto& [name, id] : program.backward_vars) names[canonicalize(graph, id)] = name;

    std::ostringstream out;
    auto line = [&](const std::string& prefix, const std::string& name, NodeId id) {
        NodeId c = canonicalize(graph, id);
        auto scoped = names;
        scoped.erase(c);  // a variable must not print as its own definition
        out << prefix << " " << name << " = " << format_expr(graph, c, scoped) << "\n";
    };
    for (const std::string& name : {"a_xh", "a_ho"})
        if (program.forward_vars.count(name)) line("forward", name, program.forward_vars.at(name));
    for (const auto& [name, id] : program.backward_vars) line("backward", name, id);
    for (const auto& param : program.param_order)
        if (program.grads.count(param)) line("grad", param, program.grads.at(param));
    return out.str();
}

} // namespace sqlgrad
