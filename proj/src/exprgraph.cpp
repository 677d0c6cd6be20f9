#include "sqlgrad/exprgraph.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

namespace sqlgrad {

std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string format_double_csv(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ExprNode ExprNode::input(std::string name) {
    ExprNode n{OpKind::Input, std::move(name), {}, {}, 0.0, MapFn::Identity};
    return n;
}

ExprNode ExprNode::param(std::string name) {
    ExprNode n{OpKind::Param, std::move(name), {}, {}, 0.0, MapFn::Identity};
    return n;
}

const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::Input: return "Input";
        case OpKind::Param: return "Param";
        case OpKind::Add: return "Add";
        case OpKind::Sub: return "Sub";
        case OpKind::Hadamard: return "Hadamard";
        case OpKind::MatMul: return "MatMul";
        case OpKind::Transpose: return "Transpose";
        case OpKind::ScalarMul: return "ScalarMul";
        case OpKind::Map: return "Map";
    }
    return "?";
}

const char* map_fn_name(MapFn f) {
    switch (f) {
        case MapFn::Sigmoid: return "Sigmoid";
        case MapFn::Square: return "Square";
        case MapFn::OneMinus: return "OneMinus";
        case MapFn::Identity: return "Identity";
    }
    return "?";
}

namespace {

bool same_structure(const ExprNode& a, const ExprNode& b) {
    return a.kind == b.kind && a.name == b.name && a.lhs == b.lhs && a.rhs == b.rhs &&
           a.scalar == b.scalar && a.fn == b.fn;
}

} // namespace

NodeId ExprGraph::add_node(ExprNode node) {
    auto check_child = [&](NodeId c) {
        if (c.index >= nodes_.size())
            throw Error("exprgraph: dangling child reference " + std::to_string(c.index));
    };
    if (!node.is_leaf()) {
        check_child(node.lhs);
        if (node.is_binary()) check_child(node.rhs);
    } else {
        if (auto it = leaves_.find(node.name); it != leaves_.end()) {
            if (nodes_[it->second.index].kind != node.kind)
                throw Error("exprgraph: leaf '" + node.name + "' redeclared with a different kind");
            return it->second;
        }
    }
    if (dedup_) {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (same_structure(nodes_[i], node)) return NodeId{std::uint32_t(i)};
    }
    NodeId id{std::uint32_t(nodes_.size())};
    bool leaf = node.is_leaf();
    if (leaf) leaves_.emplace(node.name, id);
    nodes_.push_back(std::move(node));
    if (inferred_ && !leaf)
        shapes_.push_back(infer_one(nodes_.back()));
    else
        shapes_.emplace_back();  // leaves get their shape from the declaring overload
    return id;
}

NodeId ExprGraph::input(const std::string& name) { return add_node(ExprNode::input(name)); }

NodeId ExprGraph::input(const std::string& name, Shape shape) {
    NodeId id = input(name);
    shapes_[id.index] = shape;
    return id;
}

NodeId ExprGraph::param(const std::string& name) { return add_node(ExprNode::param(name)); }

NodeId ExprGraph::param(const std::string& name, Shape shape) {
    NodeId id = param(name);
    shapes_[id.index] = shape;
    return id;
}

const ExprNode& ExprGraph::node(NodeId id) const {
    if (id.index >= nodes_.size()) throw Error("exprgraph: bad node id");
    return nodes_[id.index];
}

Shape ExprGraph::infer_one(const ExprNode& n) const {
    auto child = [&](NodeId c) -> Shape {
        if (!shapes_[c.index])
            throw Error("exprgraph: child shape not inferred yet");
        return *shapes_[c.index];
    };
    switch (n.kind) {
        case OpKind::Input:
        case OpKind::Param:
            throw Error("exprgraph: leaf '" + n.name + "' has no declared shape");
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Hadamard: {
            Shape l = child(n.lhs), r = child(n.rhs);
            if (!(l == r))
                throw Error(std::string("exprgraph: ") + op_kind_name(n.kind) +
                            " shape mismatch: " + std::to_string(l.rows) + "x" +
                            std::to_string(l.cols) + " vs " + std::to_string(r.rows) + "x" +
                            std::to_string(r.cols));
            return l;
        }
        case OpKind::MatMul: {
            Shape l = child(n.lhs), r = child(n.rhs);
            if (l.cols != r.rows)
                throw Error("exprgraph: MatMul inner dimension mismatch: " +
                            std::to_string(l.rows) + "x" + std::to_string(l.cols) + " * " +
                            std::to_string(r.rows) + "x" + std::to_string(r.cols));
            return Shape{l.rows, r.cols};
        }
        case OpKind::Transpose: {
            Shape x = child(n.lhs);
            return Shape{x.cols, x.rows};
        }
        case OpKind::ScalarMul:
        case OpKind::Map:
            return child(n.lhs);
    }
    throw Error("exprgraph: unknown node kind");
}

std::map<NodeId, Shape> ExprGraph::infer_shapes(const std::map<std::string, Shape>& leaf_shapes) {
    for (const auto& [name, shape] : leaf_shapes) {
        auto it = leaves_.find(name);
        if (it == leaves_.end()) throw Error("exprgraph: shape declared for unknown leaf '" + name + "'");
        if (shape.rows < 1 || shape.cols < 1)
            throw Error("exprgraph: non-positive shape for leaf '" + name + "'");
        shapes_[it->second.index] = shape;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& n = nodes_[i];
        if (n.is_leaf()) {
            if (!shapes_[i]) throw Error("exprgraph: undeclared leaf shape for '" + n.name + "'");
            continue;
        }
        shapes_[i] = infer_one(n);
    }
    inferred_ = true;
    std::map<NodeId, Shape> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        out.emplace(NodeId{std::uint32_t(i)}, *shapes_[i]);
    return out;
}

Shape ExprGraph::shape(NodeId id) const {
    if (id.index >= shapes_.size() || !shapes_[id.index])
        throw Error("exprgraph: shape not inferred for node " + std::to_string(id.index));
    return *shapes_[id.index];
}

std::vector<NodeId> ExprGraph::topo_order() const {
    // Children always precede parents by construction.
    std::vector<NodeId> order;
    order.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) order.push_back(NodeId{std::uint32_t(i)});
    return order;
}

std::string ExprGraph::dump() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& n = nodes_[i];
        out << i << ": ";
        switch (n.kind) {
            case OpKind::Input:
            case OpKind::Param:
                out << op_kind_name(n.kind) << "(" << n.name << ")";
                break;
            case OpKind::ScalarMul:
                out << "ScalarMul(" << format_double(n.scalar) << ", " << n.lhs.index << ")";
                break;
            case OpKind::Map:
                out << "Map(" << map_fn_name(n.fn) << ", " << n.lhs.index << ")";
                break;
            case OpKind::Transpose:
                out << "Transpose(" << n.lhs.index << ")";
                break;
            default:
                out << op_kind_name(n.kind) << "(" << n.lhs.index << ", " << n.rhs.index << ")";
        }
        out << " : ";
        if (shapes_[i])
            out << shapes_[i]->rows << "x" << shapes_[i]->cols;
        else
            out << "?";
        out << "\n";
    }
    return out.str();
}

} // namespace sqlgrad
