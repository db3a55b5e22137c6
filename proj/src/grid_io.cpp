#include "pjn/grid_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>

#include "pjn/errors.hpp"

namespace pjn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::uint64_t read_le64(const unsigned char* p) {
  std::uint64_t u = 0;
  for (int i = 7; i >= 0; --i) u = (u << 8) | p[i];
  return u;
}

void write_le64(std::ostream& out, std::uint64_t u) {
  std::array<char, 8> bytes{};
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xffu);
  out.write(bytes.data(), 8);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json parse_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": not valid JSON (" + e.what() + ")");
  }
}

template <class T>
T header_field(const json& header, const char* name) {
  if (!header.contains(name)) throw FormatError("header field '" + std::string(name) + "' is missing");
  try {
    return header.at(name).get<T>();
  } catch (const json::exception&) {
    throw FormatError("header field '" + std::string(name) + "' has the wrong type");
  }
}

GridShape validated_shape(int n, int level) {
  GridShape shape{n, level};
  try {
    shape.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("header fields 'n'/'L': ") + e.what());
  }
  return shape;
}

fs::path with_extension(const fs::path& path, const char* ext) {
  fs::path out = path;
  if (out.extension() == ".json" || out.extension() == ".bin") out.replace_extension();
  out += ext;
  return out;
}

AnyGrid load_with_header(const json& header, const fs::path& payload_path) {
  if (!header.is_object()) throw FormatError("header is not a JSON object");
  if (header_field<int>(header, "version") != kFormatVersion) throw FormatError("header field 'version' must be 1");
  const GridShape shape = validated_shape(header_field<int>(header, "n"), header_field<int>(header, "L"));
  if (header.contains("order") && header_field<std::string>(header, "order") != "time-fastest") {
    throw FormatError("header field 'order' must be \"time-fastest\"");
  }
  const std::string mode = header_field<std::string>(header, "mode");
  if (mode != "f64" && mode != "fixed") throw FormatError("header field 'mode' must be \"f64\" or \"fixed\"");

  const std::string bytes = read_text(payload_path);
  const auto count = static_cast<std::size_t>(shape.cell_count());
  if (bytes.size() != count * 8) {
    throw FormatError("payload " + payload_path.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, expected " + std::to_string(count * 8));
  }
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  if (mode == "f64") {
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<double>(read_le64(data + 8 * i));
    return GridFunction<double>(shape, std::move(values));
  }
  const auto denom = header_field<std::int64_t>(header, "denom");
  if (denom <= 0) throw FormatError("header field 'denom' must be positive");
  std::vector<Rational> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto num = std::bit_cast<std::int64_t>(read_le64(data + 8 * i));
    values[i] = Rational(num, denom);
  }
  return GridFunction<Rational>(shape, std::move(values), denom);
}

}  // namespace

Mode Mode::parse(std::string_view text) {
  if (text == "f64") return Mode{};
  constexpr std::string_view prefix = "fixed:";
  if (text.starts_with(prefix)) {
    const std::string digits(text.substr(prefix.size()));
    std::size_t used = 0;
    long long d = 0;
    try {
      d = std::stoll(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == digits.size() && d > 0) return Mode{true, d};
  }
  throw InvalidSpec("mode must be f64 or fixed:D with D > 0, got '" + std::string(text) + "'");
}

std::string Mode::str() const { return fixed ? "fixed:" + std::to_string(denom) : "f64"; }

std::int64_t fixed_denominator(const GridFunction<Rational>& f) {
  if (f.denominator() > 0) return f.denominator();
  Integer l = 1;
  for (const Rational& v : f.values()) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(v));
  if (l > std::numeric_limits<std::int64_t>::max()) throw FormatError("common denominator exceeds 64 bits");
  return l.convert_to<std::int64_t>();
}

GridShape shape_of(const AnyGrid& g) {
  return std::visit([](const auto& f) { return f.shape(); }, g);
}

AnyGrid grid_from_json(const json& doc) {
  if (doc.is_object()) throw FormatError("JSON object given where a grid array was expected; pass the header file");
  if (!doc.is_array() || doc.empty()) throw FormatError("grid array is empty or not an array");
  std::vector<json> flat;
  if (doc.front().is_array()) {
    if (doc.size() != 3) throw FormatError("nested grid array must have three time blocks");
    for (const json& block : doc) {
      if (!block.is_array() || block.size() != doc.front().size()) {
        throw FormatError("time blocks of the grid array differ in length");
      }
      flat.insert(flat.end(), block.begin(), block.end());
    }
  } else {
    flat.assign(doc.begin(), doc.end());
  }
  if (flat.size() % 3 != 0) throw FormatError("grid array length is not a multiple of 3");
  const std::size_t side = flat.size() / 3;
  if (!std::has_single_bit(side)) throw FormatError("grid array time blocks are not a power of two long");
  const GridShape shape = validated_shape(1, std::countr_zero(side));

  bool any_float = false;
  for (const json& v : flat) {
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (x != std::floor(x) || !std::isfinite(x)) any_float = true;
    } else if (!v.is_number() && !v.is_string()) {
      throw FormatError("grid array entries must be numbers or \"a/b\" strings");
    }
  }
  auto as_rational = [](const json& v) -> Rational {
    if (v.is_string()) {
      try {
        return parse_rational(v.get<std::string>());
      } catch (const std::exception&) {
        throw FormatError("grid array entry '" + v.get<std::string>() + "' is not a rational");
      }
    }
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    return from_double<Rational>(v.get<double>());
  };
  if (any_float) {
    std::vector<double> values;
    values.reserve(flat.size());
    for (const json& v : flat) values.push_back(v.is_string() ? to_double(as_rational(v)) : v.get<double>());
    return GridFunction<double>(shape, std::move(values));
  }
  std::vector<Rational> values;
  values.reserve(flat.size());
  for (const json& v : flat) values.push_back(as_rational(v));
  GridFunction<Rational> tmp(shape, values);
  const std::int64_t denom = fixed_denominator(tmp);
  return GridFunction<Rational>(shape, std::move(values), denom);
}

AnyGrid load_grid(const fs::path& path) {
  if (path.extension() == ".bin") {
    const fs::path header_path = with_extension(path, ".json");
    return load_with_header(parse_json(header_path), path);
  }
  const json doc = parse_json(path);
  if (doc.is_array()) return grid_from_json(doc);
  return load_with_header(doc, with_extension(path, ".bin"));
}

void save_grid(const AnyGrid& g, const fs::path& path) {
  const fs::path header_path = with_extension(path, ".json");
  const fs::path payload_path = with_extension(path, ".bin");
  const GridShape shape = shape_of(g);
  json header = {{"version", kFormatVersion}, {"n", shape.n}, {"L", shape.level}};

  std::ofstream payload(payload_path, std::ios::binary);
  if (!payload) throw FormatError("cannot write " + payload_path.string());
  if (const auto* fd = std::get_if<GridFunction<double>>(&g)) {
    header["mode"] = "f64";
    for (double v : fd->values()) write_le64(payload, std::bit_cast<std::uint64_t>(v));
  } else {
    const auto& fr = std::get<GridFunction<Rational>>(g);
    const std::int64_t denom = fixed_denominator(fr);
    header["mode"] = "fixed";
    header["denom"] = denom;
    for (const Rational& v : fr.values()) {
      const Rational scaled = v * denom;
      const Integer num = boost::multiprecision::numerator(scaled);
      if (boost::multiprecision::denominator(scaled) != 1 || num > std::numeric_limits<std::int64_t>::max() ||
          num < std::numeric_limits<std::int64_t>::min()) {
        throw FormatError("value " + exact_string(v) + " has no 64-bit numerator over " + std::to_string(denom));
      }
      write_le64(payload, std::bit_cast<std::uint64_t>(num.convert_to<std::int64_t>()));
    }
  }
  header["order"] = "time-fastest";
  std::ofstream out(header_path);
  if (!out) throw FormatError("cannot write " + header_path.string());
  out << header.dump() << '\n';
}

AnyGrid convert(const AnyGrid& g, const Mode& mode) {
  const GridShape shape = shape_of(g);
  if (!mode.fixed) {
    if (const auto* fd = std::get_if<GridFunction<double>>(&g)) return *fd;
    const auto& fr = std::get<GridFunction<Rational>>(g);
    std::vector<double> values;
    values.reserve(fr.values().size());
    for (const Rational& v : fr.values()) values.push_back(to_double(v));
    return GridFunction<double>(shape, std::move(values));
  }
  std::vector<Rational> values;
  if (const auto* fd = std::get_if<GridFunction<double>>(&g)) {
    for (double v : fd->values()) {
      values.emplace_back(static_cast<std::int64_t>(std::llround(v * static_cast<double>(mode.denom))), mode.denom);
    }
  } else {
    for (const Rational& v : std::get<GridFunction<Rational>>(g).values()) {
      const Rational scaled = v * mode.denom;
      Integer num = boost::multiprecision::numerator(scaled);
      const Integer den = boost::multiprecision::denominator(scaled);
      if (den != 1) {
        // floor((2 num + den) / (2 den)): nearest, ties up.
        const Integer t = 2 * num + den;
        const Integer d2 = 2 * den;
        num = t / d2;
        if (t < 0 && t % d2 != 0) num -= 1;
      }
      values.emplace_back(Rational(num, Integer(mode.denom)));
    }
  }
  return GridFunction<Rational>(shape, std::move(values), mode.denom);
}

}  // namespace pjn
