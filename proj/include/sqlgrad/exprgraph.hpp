#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlgrad/types.hpp"

namespace sqlgrad {

/// Elementwise functions applicable through a Map node. The set is closed:
/// every entry needs a derivative rule in the differentiator.
enum class MapFn { Sigmoid, Square, OneMinus, Identity };

enum class OpKind {
    Input,     // named data leaf
    Param,     // named trainable leaf
    Add,
    Sub,
    Hadamard,  // elementwise product
    MatMul,
    Transpose,
    ScalarMul, // constant * matrix, elementwise
    Map,       // MapFn applied elementwise
};

struct ExprNode {
    OpKind kind;
    std::string name;              // Input/Param only
    NodeId lhs{};                  // first child (unused for leaves)
    NodeId rhs{};                  // second child (binary kinds only)
    double scalar = 0.0;           // ScalarMul constant
    MapFn fn = MapFn::Identity;    // Map function

    static ExprNode input(std::string name);
    static ExprNode param(std::string name);
    static ExprNode add(NodeId l, NodeId r) { return {OpKind::Add, {}, l, r, 0.0, MapFn::Identity}; }
    static ExprNode sub(NodeId l, NodeId r) { return {OpKind::Sub, {}, l, r, 0.0, MapFn::Identity}; }
    static ExprNode hadamard(NodeId l, NodeId r) { return {OpKind::Hadamard, {}, l, r, 0.0, MapFn::Identity}; }
    static ExprNode matmul(NodeId l, NodeId r) { return {OpKind::MatMul, {}, l, r, 0.0, MapFn::Identity}; }
    static ExprNode transpose(NodeId x) { return {OpKind::Transpose, {}, x, {}, 0.0, MapFn::Identity}; }
    static ExprNode scalar_mul(double c, NodeId x) { return {OpKind::ScalarMul, {}, x, {}, c, MapFn::Identity}; }
    static ExprNode map(MapFn f, NodeId x) { return {OpKind::Map, {}, x, {}, 0.0, f}; }

    bool is_leaf() const { return kind == OpKind::Input || kind == OpKind::Param; }
    bool is_binary() const {
        return kind == OpKind::Add || kind == OpKind::Sub || kind == OpKind::Hadamard ||
               kind == OpKind::MatMul;
    }
};

const char* op_kind_name(OpKind k);
const char* map_fn_name(MapFn f);

/// Append-only matrix-expression DAG. Children always have lower ids than
/// their parents, so the insertion order is a topological order. Once built
/// (and shapes inferred) the graph is immutable-by-convention and safe for
/// concurrent reads; nodes appended later never invalidate earlier ids.
class ExprGraph {
public:
    /// With dedup enabled, adding a node structurally identical to an
    /// existing one returns the existing id instead of appending.
    explicit ExprGraph(bool dedup = false) : dedup_(dedup) {}

    NodeId add_node(ExprNode node);

    // Leaf helpers. The Shape overloads declare the leaf shape up front so
    // later additions get shapes immediately.
    NodeId input(const std::string& name);
    NodeId input(const std::string& name, Shape shape);
    NodeId param(const std::string& name);
    NodeId param(const std::string& name, Shape shape);

    NodeId add(NodeId l, NodeId r) { return add_node(ExprNode::add(l, r)); }
    NodeId sub(NodeId l, NodeId r) { return add_node(ExprNode::sub(l, r)); }
    NodeId hadamard(NodeId l, NodeId r) { return add_node(ExprNode::hadamard(l, r)); }
    NodeId matmul(NodeId l, NodeId r) { return add_node(ExprNode::matmul(l, r)); }
    NodeId transpose(NodeId x) { return add_node(ExprNode::transpose(x)); }
    NodeId scalar_mul(double c, NodeId x) { return add_node(ExprNode::scalar_mul(c, x)); }
    NodeId map(MapFn f, NodeId x) { return add_node(ExprNode::map(f, x)); }

    const ExprNode& node(NodeId id) const;
    std::size_t size() const { return nodes_.size(); }
    const std::map<std::string, NodeId>& leaves() const { return leaves_; }

    /// Fills the per-node shape table from declared leaf shapes. Total on
    /// well-formed graphs and deterministic: re-running yields the same map.
    /// Leaves already declared via the Shape overloads may be omitted from
    /// the argument.
    std::map<NodeId, Shape> infer_shapes(const std::map<std::string, Shape>& leaf_shapes = {});

    bool shapes_inferred() const { return inferred_; }
    Shape shape(NodeId id) const;

    /// Insertion order; every node appears after all of its children.
    std::vector<NodeId> topo_order() const;

    /// One node per line: "<id>: <kind>(<children>) : <rows>x<cols>".
    std::string dump() const;

private:
    Shape infer_one(const ExprNode& n) const;

    bool dedup_ = false;
    bool inferred_ = false;
    std::vector<ExprNode> nodes_;
    std::vector<std::optional<Shape>> shapes_;
    std::map<std::string, NodeId> leaves_;
};

} // namespace sqlgrad
