#include "sqlgrad/dense_matrix.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace sqlgrad {

DenseMatrix::DenseMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), values_(std::size_t(rows) * cols, fill) {
    if (rows < 1 || cols < 1) throw Error("dense: dimensions must be >= 1");
}

DenseMatrix::DenseMatrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows < 1 || cols < 1) throw Error("dense: dimensions must be >= 1");
    if (values_.size() != std::size_t(rows) * cols)
        throw Error("dense: value count does not match dimensions");
}

DenseMatrix init_uniform(SplitMix64& prng, int rows, int cols) {
    DenseMatrix m(rows, cols);
    for (double& v : m.values()) v = 2.0 * prng.next_unit() - 1.0;
    return m;
}

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(std::string("dense: ") + op + " shape mismatch");
}

} // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw Error("dense: matmul inner dimension mismatch");
    DenseMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "hadamard");
    DenseMatrix out = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * b(i, j);
    return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "add");
    DenseMatrix out = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    return out;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "sub");
    DenseMatrix out = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    return out;
}

DenseMatrix scalar_mul(double c, const DenseMatrix& a) {
    DenseMatrix out = a;
    for (double& v : out.values()) v = c * v;
    return out;
}

DenseMatrix one_minus(const DenseMatrix& a) {
    DenseMatrix out = a;
    for (double& v : out.values()) v = 1.0 - v;
    return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix out(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

DenseMatrix map_fn(const DenseMatrix& a, MapFn fn) {
    DenseMatrix out = a;
    for (double& v : out.values()) {
        switch (fn) {
            case MapFn::Sigmoid: v = sigmoid(v); break;
            case MapFn::Square: v = v * v; break;
            case MapFn::OneMinus: v = 1.0 - v; break;
            case MapFn::Identity: break;
        }
    }
    return out;
}

DenseMatrix map_sigmoid(const DenseMatrix& a) { return map_fn(a, MapFn::Sigmoid); }

double mean_abs(const DenseMatrix& a) {
    double sum = 0.0;
    for (double v : a.values()) sum += std::fabs(v);
    return sum / double(a.values().size());
}

DenseMatrix row_slice(const DenseMatrix& a, int begin, int end) {
    if (begin < 0 || end > a.rows() || begin >= end) throw Error("dense: bad row slice");
    std::vector<double> vals(a.values().begin() + std::size_t(begin) * a.cols(),
                             a.values().begin() + std::size_t(end) * a.cols());
    return DenseMatrix(end - begin, a.cols(), std::move(vals));
}

std::vector<int> argmax_row(const DenseMatrix& a) {
    std::vector<int> out(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        int best = 0;
        for (int j = 1; j < a.cols(); ++j)
            if (a(i, j) > a(i, best)) best = j;
        out[i] = best + 1;  // 1-based, ties keep the lowest index
    }
    return out;
}

void write_dense_csv(const DenseMatrix& m, std::ostream& out) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double_csv(m(i, j));
        }
        out << '\n';
    }
}

DenseMatrix read_dense_csv(std::istream& in) {
    std::vector<double> vals;
    int rows = 0, cols = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        int c = 0;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument(cell);
                vals.push_back(v);
            } catch (const std::exception&) {
                throw DataError("dense csv: bad cell '" + cell + "' at row " +
                                std::to_string(rows + 1) + ", col " + std::to_string(c + 1));
            }
            ++c;
        }
        if (cols < 0) cols = c;
        if (c != cols) throw DataError("dense csv: ragged row " + std::to_string(rows + 1));
        ++rows;
    }
    if (rows == 0) throw DataError("dense csv: empty input");
    return DenseMatrix(rows, cols, std::move(vals));
}

std::uint64_t dense_footprint_bytes(const DenseMatrix& m) {
    return std::uint64_t(m.rows()) * m.cols() * 8;
}

} // namespace sqlgrad
