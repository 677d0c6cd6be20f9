#pragma once

#include <map>
#include <string>
#include <vector>

#include "sqlgrad/dense_matrix.hpp"
#include "sqlgrad/exprgraph.hpp"
#include "sqlgrad/rel_matrix.hpp"

namespace sqlgrad {

/// Operation adapters let one evaluator drive either engine.
struct DenseOps {
    using Matrix = DenseMatrix;
    Matrix matmul(const Matrix& a, const Matrix& b) { return sqlgrad::matmul(a, b); }
    Matrix hadamard(const Matrix& a, const Matrix& b) { return sqlgrad::hadamard(a, b); }
    Matrix add(const Matrix& a, const Matrix& b) { return sqlgrad::add(a, b); }
    Matrix sub(const Matrix& a, const Matrix& b) { return sqlgrad::sub(a, b); }
    Matrix scalar_mul(double c, const Matrix& a) { return sqlgrad::scalar_mul(c, a); }
    Matrix transpose(const Matrix& a) { return sqlgrad::transpose(a); }
    Matrix map(const Matrix& a, MapFn fn) { return map_fn(a, fn); }
};

struct RelOps {
    using Matrix = RelMatrix;
    TupleStats& stats;
    Matrix matmul(const Matrix& a, const Matrix& b) { return sqlgrad::matmul(a, b, stats); }
    Matrix hadamard(const Matrix& a, const Matrix& b) { return sqlgrad::hadamard(a, b, stats); }
    Matrix add(const Matrix& a, const Matrix& b) { return sqlgrad::add(a, b, stats); }
    Matrix sub(const Matrix& a, const Matrix& b) { return sqlgrad::sub(a, b, stats); }
    Matrix scalar_mul(double c, const Matrix& a) { return sqlgrad::scalar_mul(c, a, stats); }
    Matrix transpose(const Matrix& a) { return sqlgrad::transpose(a); }
    Matrix map(const Matrix& a, MapFn fn) { return map_fn(a, fn, stats); }
};

/// Evaluates every node once, in topological (insertion) order, so shared
/// subexpressions are computed a single time. Returns one matrix per node,
/// indexed by NodeId. `eval_count` (when given) receives the number of
/// node computations performed, which equals graph.size().
template <typename Ops>
std::vector<typename Ops::Matrix> evaluate_graph(
    const ExprGraph& graph, const std::map<std::string, typename Ops::Matrix>& bindings, Ops ops,
    std::size_t* eval_count = nullptr) {
    using Matrix = typename Ops::Matrix;
    if (!graph.shapes_inferred()) throw Error("evaluate: shapes must be inferred first");
    std::vector<Matrix> values;
    values.reserve(graph.size());
    std::size_t computed = 0;
    for (NodeId id : graph.topo_order()) {
        const ExprNode& n = graph.node(id);
        ++computed;
        switch (n.kind) {
            case OpKind::Input:
            case OpKind::Param: {
                auto it = bindings.find(n.name);
                if (it == bindings.end()) throw Error("evaluate: unbound leaf '" + n.name + "'");
                if (!(it->second.shape() == graph.shape(id)))
                    throw Error("evaluate: binding for '" + n.name + "' has the wrong shape");
                values.push_back(it->second);
                break;
            }
            case OpKind::Add:
                values.push_back(ops.add(values[n.lhs.index], values[n.rhs.index]));
                break;
            case OpKind::Sub:
                values.push_back(ops.sub(values[n.lhs.index], values[n.rhs.index]));
                break;
            case OpKind::Hadamard:
                values.push_back(ops.hadamard(values[n.lhs.index], values[n.rhs.index]));
                break;
            case OpKind::MatMul:
                values.push_back(ops.matmul(values[n.lhs.index], values[n.rhs.index]));
                break;
            case OpKind::Transpose:
                values.push_back(ops.transpose(values[n.lhs.index]));
                break;
            case OpKind::ScalarMul:
                values.push_back(ops.scalar_mul(n.scalar, values[n.lhs.index]));
                break;
            case OpKind::Map:
                values.push_back(ops.map(values[n.lhs.index], n.fn));
                break;
        }
    }
    if (eval_count) *eval_count = computed;
    return values;
}

/// Dense-engine forward evaluation of a whole graph.
inline std::vector<DenseMatrix> evaluate(const ExprGraph& graph,
                                         const std::map<std::string, DenseMatrix>& bindings,
                                         std::size_t* eval_count = nullptr) {
    return evaluate_graph(graph, bindings, DenseOps{}, eval_count);
}

} // namespace sqlgrad
