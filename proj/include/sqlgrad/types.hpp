#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sqlgrad {

/// Base error for all library failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Error class for malformed input data (CSV cells, labels, files).
struct DataError : Error {
    using Error::Error;
};

/// Matrix dimensions. Both sides are at least 1.
struct Shape {
    int rows = 1;
    int cols = 1;

    friend bool operator==(const Shape&, const Shape&) = default;
    std::int64_t entry_count() const { return std::int64_t(rows) * cols; }
};

/// Opaque handle into an ExprGraph's node store.
struct NodeId {
    std::uint32_t index = 0;
    auto operator<=>(const NodeId&) const = default;
};

/// Renders a double with the fewest significant digits that still
/// round-trip, e.g. 0.01 -> "0.01", 2.0 -> "2".
std::string format_double(double v);

/// Fixed 17-significant-digit rendering used by all CSV dumps.
std::string format_double_csv(double v);

} // namespace sqlgrad
