#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sqlgrad/types.hpp"

namespace sqlgrad {

/// Row-major dense matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix(int rows, int cols, double fill = 0.0);
    DenseMatrix(int rows, int cols, std::vector<double> values);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Shape shape() const { return Shape{rows_, cols_}; }

    // 0-based accessors.
    double operator()(int i, int j) const { return values_[std::size_t(i) * cols_ + j]; }
    double& operator()(int i, int j) { return values_[std::size_t(i) * cols_ + j]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    int rows_;
    int cols_;
    std::vector<double> values_;
};

/// SplitMix64: state += 0x9E3779B97F4A7C15, then xor-shift-multiply with
/// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB and a final 31-bit xor-shift.
/// Identical seed gives an identical sequence on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1): top 53 bits scaled by 2^-53.
    double next_unit() { return double(next() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

/// Entries drawn row-major as 2u - 1 with u uniform in [0, 1); all values
/// lie in [-1, 1).
DenseMatrix init_uniform(SplitMix64& prng, int rows, int cols);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);  // sums ascending k
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scalar_mul(double c, const DenseMatrix& a);
DenseMatrix one_minus(const DenseMatrix& a);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix map_fn(const DenseMatrix& a, MapFn fn);
DenseMatrix map_sigmoid(const DenseMatrix& a);

double sigmoid(double x);

/// Mean of absolute values over all entries, accumulated in row-major order.
double mean_abs(const DenseMatrix& a);

/// Rows [begin, end) as a new matrix.
DenseMatrix row_slice(const DenseMatrix& a, int begin, int end);

/// Per row, the smallest 1-based column index attaining the row maximum.
std::vector<int> argmax_row(const DenseMatrix& a);

/// One matrix row per line, comma separated, 17-significant-digit floats.
void write_dense_csv(const DenseMatrix& m, std::ostream& out);
DenseMatrix read_dense_csv(std::istream& in);

std::uint64_t dense_footprint_bytes(const DenseMatrix& m);  // 8 bytes per entry

} // namespace sqlgrad
