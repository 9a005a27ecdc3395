#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rewriter {

enum class ColumnType { Int, Double, String };

std::string column_type_name(ColumnType t);
ColumnType column_type_from_name(const std::string& s);

// Runtime cell value. Numeric comparisons mix Int and Double; strings
// compare lexicographically and only against strings.
using Value = std::variant<std::int64_t, double, std::string>;

bool value_is_numeric(const Value& v);
double value_as_double(const Value& v);

// Total order used for sort keys, MIN/MAX and canonical bag comparison:
// numerics compare by numeric value (Int ties before Double), strings
// compare after numerics.
int value_compare(const Value& a, const Value& b);
bool value_equal(const Value& a, const Value& b);

// Deterministic text form (used in emitted SQL and error contexts).
std::string value_to_text(const Value& v);

using Row = std::vector<Value>;

int row_compare(const Row& a, const Row& b);

}  // namespace rewriter
