#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sqlgrad/exprgraph.hpp"

namespace sqlgrad {

/// Reverse-mode derivative program for the one-hidden-layer MLP loss.
/// backward_vars are ordered so each expression only references inputs,
/// params, forward vars and earlier backward vars.
struct GradientProgram {
    NodeId loss{};
    std::map<std::string, NodeId> forward_vars;                  // a_xh, a_ho
    std::vector<std::pair<std::string, NodeId>> backward_vars;   // l_ho, d_ho, l_xh, d_xh
    std::map<std::string, NodeId> grads;                         // param name -> gradient expr
    std::vector<std::string> param_order;                        // weight-id order: w_xh, w_ho
    double learning_rate = 0.01;

    NodeId var(const std::string& name) const;
};

/// Reverse-mode differentiation by pattern matching on the expression kind.
/// `seed` is the accumulated parent partial derivative and must have the
/// shape of `root`. Returns one expression per Param leaf reachable from
/// the root; a param consumed twice accumulates both seeds with Add.
///
/// Rules: Add passes the seed to both children; Sub negates the right seed;
/// Hadamard(X,Y) sends seed*Y / seed*X; MatMul(X,Y) sends seed*Y^T to X and
/// X^T*seed to Y; Map(f,X) multiplies the seed elementwise with f' written
/// in terms of the forward value (sigmoid: a*(1-a)).
///
/// When `seed_trace` is given it records, per visited node, the seed
/// expression that arrived there (the first one, for multi-use nodes).
std::map<std::string, NodeId> derive(ExprGraph& graph, NodeId root, NodeId seed,
                                     std::map<NodeId, NodeId>* seed_trace = nullptr);

/// Builds loss = (sig(sig(x*w_xh)*w_ho) - y_ones)^2 with leaves
/// x: n x m, y_ones: n x l, w_xh: m x h, w_ho: h x l, and records the
/// forward vars a_xh, a_ho. Shapes are inferred before returning.
GradientProgram build_mlp_loss(ExprGraph& graph, int input_dim, int hidden_dim, int output_dim,
                               int num_rows);

/// Completes a build_mlp_loss program with the backward chain
///   l_ho = 2*(a_ho - y_ones)
///   d_ho = l_ho * a_ho * (1 - a_ho)
///   l_xh = d_ho * w_ho^T
///   d_xh = l_xh * a_xh * (1 - a_xh)
/// and gradients w_xh: x^T * d_xh, w_ho: a_xh^T * d_ho.
void gradients_mlp(ExprGraph& graph, GradientProgram& program);

/// Structural normal form: folds nested ScalarMul constants, removes
/// Map(Identity, X), rewrites Add(X, ScalarMul(-1, Y)) to Sub(X, Y) and
/// collapses Transpose(Transpose(X)). Deterministic fixpoint; may append
/// nodes but never mutates existing ones.
NodeId canonicalize(ExprGraph& graph, NodeId node);

/// Renders one named expression with earlier program variables substituted
/// by name, e.g. "Hadamard(Hadamard(l_ho, a_ho), Map(OneMinus, a_ho))".
std::string format_expr(const ExprGraph& graph, NodeId node,
                        const std::map<NodeId, std::string>& names);

/// Golden-testable rendering of the whole canonicalized program.
std::string format_program(ExprGraph& graph, const GradientProgram& program);

} // namespace sqlgrad
