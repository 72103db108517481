#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flame {

enum class ScalarKind { Integer, Real };

inline std::string_view to_string(ScalarKind kind) {
  return kind == ScalarKind::Integer ? "int" : "double";
}

using Value = std::variant<std::int64_t, double>;

inline ScalarKind kind_of(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) ? ScalarKind::Integer : ScalarKind::Real;
}

inline double as_real(const Value& v) {
  if (auto p = std::get_if<double>(&v)) return *p;
  return static_cast<double>(std::get<std::int64_t>(v));
}

inline std::int64_t as_int(const Value& v) { return std::get<std::int64_t>(v); }

/// Same kind and same bits; distinguishes -0.0 from 0.0 and compares NaNs by payload.
inline bool bit_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (auto pa = std::get_if<double>(&a))
    return std::bit_cast<std::uint64_t>(*pa) == std::bit_cast<std::uint64_t>(std::get<double>(b));
  return std::get<std::int64_t>(a) == std::get<std::int64_t>(b);
}

struct FieldSpec {
  std::string name;
  ScalarKind kind = ScalarKind::Integer;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

using Layout = std::vector<FieldSpec>;

/// Values of a record, one per field of the owning layout, in layout order.
using Record = std::vector<Value>;

inline std::optional<std::size_t> find_field(const Layout& layout, std::string_view name) {
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i].name == name) return i;
  return std::nullopt;
}

inline bool bit_equal(const Record& a, const Record& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!bit_equal(a[i], b[i])) return false;
  return true;
}

inline bool matches_layout(const Record& record, const Layout& layout) {
  if (record.size() != layout.size()) return false;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (kind_of(record[i]) != layout[i].kind) return false;
  return true;
}

inline Value zero_of(ScalarKind kind) {
  return kind == ScalarKind::Integer ? Value{std::int64_t{0}} : Value{0.0};
}

}  // namespace flame
