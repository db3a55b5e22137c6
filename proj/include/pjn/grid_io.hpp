#pragma once

// Grid files.  A grid is stored as a JSON header `<stem>.json`
//
//   {"version": 1, "n": 2, "L": 3, "mode": "fixed", "denom": 64, "order": "time-fastest"}
//
// next to a payload `<stem>.bin` of little-endian 64-bit values: doubles in
// "f64" mode, integer numerators over `denom` in "fixed" mode.  For n = 1 a
// plain JSON array is also accepted, either flat (3 * 2^L values) or split
// into three time blocks of 2^L values.  Integers load in fixed mode with
// denominator 1, strings "a/b" in fixed mode over the common denominator,
// anything else in f64 mode.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "pjn/grid_function.hpp"
#include "pjn/scalar.hpp"

namespace pjn {

using AnyGrid = std::variant<GridFunction<double>, GridFunction<Rational>>;

// "f64" or "fixed:D".
struct Mode {
  bool fixed = false;
  std::int64_t denom = 0;

  static Mode parse(std::string_view text);
  std::string str() const;
};

// Denominator a fixed-mode grid is saved with: the declared one, or the
// lcm of the value denominators.
std::int64_t fixed_denominator(const GridFunction<Rational>& f);

GridShape shape_of(const AnyGrid& g);

// Loads from a header (.json), a payload (.bin, header alongside), or an
// n = 1 JSON array.  Throws FormatError naming the offending field.
AnyGrid load_grid(const std::filesystem::path& path);

// Writes <stem>.json and <stem>.bin; `path` may name either or the stem.
void save_grid(const AnyGrid& g, const std::filesystem::path& path);

AnyGrid grid_from_json(const nlohmann::json& doc);

// f64 -> fixed rounds every value to the nearest multiple of 1/D.
AnyGrid convert(const AnyGrid& g, const Mode& mode);

}  // namespace pjn
