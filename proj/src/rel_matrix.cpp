#include "sqlgrad/rel_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace sqlgrad {

RelMatrix::RelMatrix(int rows, int cols, std::vector<RelEntry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows < 1 || cols < 1) throw Error("rel: dimensions must be >= 1");
    if (std::int64_t(entries_.size()) != entry_count())
        throw Error("rel: density violated: expected " + std::to_string(entry_count()) +
                    " entries, got " + std::to_string(entries_.size()));
    std::sort(entries_.begin(), entries_.end(), [](const RelEntry& a, const RelEntry& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (std::int64_t idx = 0; idx < entry_count(); ++idx) {
        std::int64_t want_i = idx / cols_ + 1, want_j = idx % cols_ + 1;
        if (entries_[idx].i != want_i || entries_[idx].j != want_j)
            throw Error("rel: density violated: missing or duplicate entry near (" +
                        std::to_string(want_i) + ", " + std::to_string(want_j) + ")");
    }
}

RelMatrix RelMatrix::zeros(int rows, int cols) {
    if (rows < 1 || cols < 1) throw Error("rel: dimensions must be >= 1");
    RelMatrix m(rows, cols);
    m.entries_.reserve(std::size_t(rows) * cols);
    for (std::int64_t i = 1; i <= rows; ++i)
        for (std::int64_t j = 1; j <= cols; ++j) m.entries_.push_back({i, j, 0.0});
    return m;
}

RelMatrix RelMatrix::from_dense(const DenseMatrix& d) {
    RelMatrix m(d.rows(), d.cols());
    m.entries_.reserve(std::size_t(d.rows()) * d.cols());
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j) m.entries_.push_back({i + 1, j + 1, d(i, j)});
    return m;
}

DenseMatrix RelMatrix::to_dense() const {
    if (std::int64_t(entries_.size()) != entry_count())
        throw Error("rel: to_dense on a non-dense entry set");
    DenseMatrix d(rows_, cols_);
    for (const RelEntry& e : entries_) d(int(e.i) - 1, int(e.j) - 1) = e.v;
    return d;
}

std::span<const RelEntry> RelMatrix::row(std::int64_t i) const {
    return {entries_.data() + (i - 1) * cols_, std::size_t(cols_)};
}

RelMatrix matmul(const RelMatrix& m, const RelMatrix& n, TupleStats& stats) {
    if (m.cols() != n.rows()) throw Error("rel: matmul inner dimension mismatch");
    std::uint64_t joined = matmul_join_cardinality(m.rows(), m.cols(), n.cols());
    std::uint64_t produced = std::uint64_t(m.rows()) * n.cols();
    stats.joined_tuples += joined;
    stats.output_tuples += produced;
    stats.note_live(std::uint64_t(m.entry_count()) + std::uint64_t(n.entry_count()) + joined +
                    produced);

    std::vector<RelEntry> out;
    out.reserve(produced);
    std::vector<double> acc(n.cols());
    for (std::int64_t i = 1; i <= m.rows(); ++i) {
        std::fill(acc.begin(), acc.end(), 0.0);
        // join m.j = n.i; summation order per (i, j) is ascending k because
        // m's row entries are sorted by the inner index
        for (const RelEntry& me : m.row(i))
            for (const RelEntry& ne : n.row(me.j)) acc[ne.j - 1] += me.v * ne.v;
        for (std::int64_t j = 1; j <= n.cols(); ++j) out.push_back({i, j, acc[j - 1]});
    }
    return RelMatrix(m.rows(), n.cols(), std::move(out));
}

namespace {

template <typename F>
RelMatrix join_both_indices(const RelMatrix& m, const RelMatrix& n, TupleStats& stats,
                            const char* op, F combine) {
    if (m.rows() != n.rows() || m.cols() != n.cols())
        throw Error(std::string("rel: ") + op + " shape mismatch");
    std::uint64_t produced = std::uint64_t(m.entry_count());
    stats.output_tuples += produced;
    stats.note_live(3 * produced);  // both operands plus the result
    std::vector<RelEntry> out;
    out.reserve(produced);
    auto me = m.entries(), ne = n.entries();
    for (std::size_t k = 0; k < me.size(); ++k)
        out.push_back({me[k].i, me[k].j, combine(me[k].v, ne[k].v)});
    return RelMatrix(m.rows(), m.cols(), std::move(out));
}

template <typename F>
RelMatrix map_entries(const RelMatrix& m, TupleStats& stats, F f) {
    std::uint64_t produced = std::uint64_t(m.entry_count());
    stats.output_tuples += produced;
    stats.note_live(2 * produced);
    std::vector<RelEntry> out;
    out.reserve(produced);
    for (const RelEntry& e : m.entries()) out.push_back({e.i, e.j, f(e.v)});
    return RelMatrix(m.rows(), m.cols(), std::move(out));
}

} // namespace

RelMatrix hadamard(const RelMatrix& m, const RelMatrix& n, TupleStats& stats) {
    return join_both_indices(m, n, stats, "hadamard", [](double a, double b) { return a * b; });
}

RelMatrix add(const RelMatrix& m, const RelMatrix& n, TupleStats& stats) {
    return join_both_indices(m, n, stats, "add", [](double a, double b) { return a + b; });
}

RelMatrix sub(const RelMatrix& m, const RelMatrix& n, TupleStats& stats) {
    return join_both_indices(m, n, stats, "sub", [](double a, double b) { return a - b; });
}

RelMatrix scalar_mul(double c, const RelMatrix& m, TupleStats& stats) {
    return map_entries(m, stats, [c](double v) { return c * v; });
}

RelMatrix one_minus(const RelMatrix& m, TupleStats& stats) {
    return map_entries(m, stats, [](double v) { return 1.0 - v; });
}

RelMatrix map_fn(const RelMatrix& m, MapFn fn, TupleStats& stats) {
    switch (fn) {
        case MapFn::Sigmoid: return map_entries(m, stats, [](double v) { return sigmoid(v); });
        case MapFn::Square: return map_entries(m, stats, [](double v) { return v * v; });
        case MapFn::OneMinus: return one_minus(m, stats);
        case MapFn::Identity: return map_entries(m, stats, [](double v) { return v; });
    }
    throw Error("rel: unknown map function");
}

RelMatrix map_sigmoid(const RelMatrix& m, TupleStats& stats) {
    return map_fn(m, MapFn::Sigmoid, stats);
}

RelMatrix transpose(const RelMatrix& m) {
    std::vector<RelEntry> out;
    out.reserve(std::size_t(m.entry_count()));
    for (const RelEntry& e : m.entries()) out.push_back({e.j, e.i, e.v});
    return RelMatrix(m.cols(), m.rows(), std::move(out));
}

RelMatrix one_hot(const std::vector<int>& labels, int num_rows, int num_classes) {
    if (int(labels.size()) != num_rows) throw Error("rel: one_hot row count mismatch");
    if (num_classes < 1) throw Error("rel: one_hot needs at least one class");
    std::vector<RelEntry> out;
    out.reserve(std::size_t(num_rows) * num_classes);
    for (std::int64_t i = 1; i <= num_rows; ++i) {
        int label = labels[i - 1];
        if (label < 0 || label >= num_classes)
            throw DataError("rel: label " + std::to_string(label) + " out of range at row " +
                            std::to_string(i));
        for (std::int64_t j = 1; j <= num_classes; ++j)
            out.push_back({i, j, j == label + 1 ? 1.0 : 0.0});
    }
    return RelMatrix(num_rows, num_classes, std::move(out));
}

double mean_abs(const RelMatrix& m) {
    double sum = 0.0;
    for (const RelEntry& e : m.entries()) sum += std::fabs(e.v);
    return sum / double(m.entry_count());
}

std::uint64_t footprint_bytes(const RelMatrix& m) {
    return relational_footprint_bytes(m.rows(), m.cols());
}

std::uint64_t relational_footprint_bytes(std::int64_t rows, std::int64_t cols) {
    return std::uint64_t(rows) * std::uint64_t(cols) * TupleStats::bytes_per_entry;
}

std::uint64_t dense_footprint_bytes(std::int64_t rows, std::int64_t cols) {
    return std::uint64_t(rows) * std::uint64_t(cols) * 8;
}

void write_rel_csv(const RelMatrix& m, std::ostream& out) {
    out << "i,j,v\n";
    for (const RelEntry& e : m.entries())
        out << e.i << ',' << e.j << ',' << format_double_csv(e.v) << '\n';
}

RelMatrix read_rel_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "i,j,v")
        throw DataError("rel csv: missing i,j,v header");
    std::vector<RelEntry> entries;
    std::int64_t max_i = 0, max_j = 0;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
            throw DataError("rel csv: malformed line " + std::to_string(row));
        try {
            RelEntry e{std::stoll(a), std::stoll(b), std::stod(c)};
            max_i = std::max(max_i, e.i);
            max_j = std::max(max_j, e.j);
            entries.push_back(e);
        } catch (const std::exception&) {
            throw DataError("rel csv: bad number on line " + std::to_string(row));
        }
    }
    if (entries.empty()) throw DataError("rel csv: no entries");
    return RelMatrix(int(max_i), int(max_j), std::move(entries));
}

} // namespace sqlgrad
