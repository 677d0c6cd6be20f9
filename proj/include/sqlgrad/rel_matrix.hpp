#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sqlgrad/dense_matrix.hpp"
#include "sqlgrad/types.hpp"

namespace sqlgrad {

/// One coordinate tuple of the relational representation: 8 bytes per
/// index, 8 bytes for the value. Indices are 1-based like the SQL side.
struct RelEntry {
    std::int64_t i;
    std::int64_t j;
    double v;

    friend bool operator==(const RelEntry&, const RelEntry&) = default;
};

/// Materialization accounting for the relational engine. joined_tuples
/// counts join-output tuples of matrix multiplications, output_tuples the
/// entries every operation emits, peak_entries the largest sum of live
/// operand + intermediate + result entries at any operation boundary.
struct TupleStats {
    std::uint64_t joined_tuples = 0;
    std::uint64_t output_tuples = 0;
    std::uint64_t peak_entries = 0;

    static constexpr std::uint64_t bytes_per_entry = 24;  // 8 B per index, 8 B value

    void note_live(std::uint64_t entries) {
        if (entries > peak_entries) peak_entries = entries;
    }
    std::uint64_t peak_bytes() const { return peak_entries * bytes_per_entry; }
};

/// Join cardinality of an (a x b) * (b x c) multiplication: one tuple per
/// (i, k, j) combination before aggregation.
constexpr std::uint64_t matmul_join_cardinality(std::int64_t a, std::int64_t b, std::int64_t c) {
    return std::uint64_t(a) * std::uint64_t(b) * std::uint64_t(c);
}

/// Dense matrix in coordinate-tuple form: every (i, j) with 1 <= i <= rows,
/// 1 <= j <= cols is present exactly once, zeros included. Entries are kept
/// sorted by (i, j); the density invariant is enforced at construction.
class RelMatrix {
public:
    /// Validates density (exactly rows*cols entries, each coordinate once,
    /// all in range) and sorts the entries row-major.
    RelMatrix(int rows, int cols, std::vector<RelEntry> entries);

    static RelMatrix zeros(int rows, int cols);
    static RelMatrix from_dense(const DenseMatrix& d);

    /// Inverse of from_dense; rereads entries ordered by (i, then j).
    DenseMatrix to_dense() const;

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Shape shape() const { return Shape{rows_, cols_}; }
    std::int64_t entry_count() const { return std::int64_t(rows_) * cols_; }

    std::span<const RelEntry> entries() const { return entries_; }
    std::span<const RelEntry> row(std::int64_t i) const;  // 1-based

    friend bool operator==(const RelMatrix&, const RelMatrix&) = default;

private:
    RelMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

    int rows_;
    int cols_;
    std::vector<RelEntry> entries_;  // row-major sorted
};

/// Join on the inner index followed by per-(i, j) summation in ascending
/// inner-index order. Accounts rows*inner*cols joined tuples.
RelMatrix matmul(const RelMatrix& m, const RelMatrix& n, TupleStats& stats);

// Equi-joins on both indices with the arithmetic in the projection.
RelMatrix hadamard(const RelMatrix& m, const RelMatrix& n, TupleStats& stats);
RelMatrix add(const RelMatrix& m, const RelMatrix& n, TupleStats& stats);
RelMatrix sub(const RelMatrix& m, const RelMatrix& n, TupleStats& stats);

RelMatrix scalar_mul(double c, const RelMatrix& m, TupleStats& stats);
RelMatrix one_minus(const RelMatrix& m, TupleStats& stats);
RelMatrix map_fn(const RelMatrix& m, MapFn fn, TupleStats& stats);
RelMatrix map_sigmoid(const RelMatrix& m, TupleStats& stats);

/// Pure index rename; no stats impact.
RelMatrix transpose(const RelMatrix& m);

/// Dense one-hot matrix: row i gets a 1 in column labels[i-1] + 1, zeros
/// elsewhere. Labels are 0-based category ids below num_classes.
RelMatrix one_hot(const std::vector<int>& labels, int num_rows, int num_classes);

double mean_abs(const RelMatrix& m);

std::uint64_t footprint_bytes(const RelMatrix& m);          // 24 bytes per entry
std::uint64_t relational_footprint_bytes(std::int64_t rows, std::int64_t cols);
std::uint64_t dense_footprint_bytes(std::int64_t rows, std::int64_t cols);

/// CSV with header "i,j,v", rows sorted by (i, j), floats rendered with 17
/// significant digits.
void write_rel_csv(const RelMatrix& m, std::ostream& out);

/// Reads the dump format back; dimensions are taken from the largest
/// indices and the density invariant is re-validated.
RelMatrix read_rel_csv(std::istream& in);

} // namespace sqlgrad
