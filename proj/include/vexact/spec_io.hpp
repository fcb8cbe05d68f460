#ifndef VEXACT_SPEC_IO_HPP
#define VEXACT_SPEC_IO_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vexact/genericity.hpp"
#include "vexact/pi01.hpp"

namespace vexact {

namespace detail {

using json = nlohmann::json;

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is the 1-based position of the offending character
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw SpecError("malformed JSON: " + std::string(e.what()), line, col);
  }
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw SpecError(where + " must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SpecError(where + " is missing \"" + key + "\"");
  return *it;
}

inline Rational rational_of(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(mpz_class(v.dump(), 10));
  if (!v.is_string()) throw SpecError(where + ": rationals must be strings or integers");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const InvalidInput& e) {
    throw SpecError(where + ": " + e.what());
  }
}

inline RationalInterval interval_of(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw SpecError(where + " must be a pair [lo, hi]");
  return {rational_of(v[0], where + "[0]"), rational_of(v[1], where + "[1]")};
}

inline std::vector<RationalInterval> intervals_of(const json& v, const std::string& where) {
  if (!v.is_array()) throw SpecError(where + " must be an array of pairs");
  std::vector<RationalInterval> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(interval_of(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::uint64_t positive_of(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) throw SpecError(where + " must be a positive integer");
  return v.get<std::uint64_t>();
}

inline BinaryString bits_of(const json& v, const std::string& where) {
  if (!v.is_string()) throw SpecError(where + " must be a bit string");
  try {
    return BinaryString::parse(v.get<std::string>());
  } catch (const InvalidInput& e) {
    throw SpecError(where + ": " + e.what());
  }
}

inline const json& params_of(const json& spec) {
  static const json empty = json::object();
  auto it = spec.find("params");
  return it == spec.end() ? empty : *it;
}

}  // namespace detail

inline std::shared_ptr<const CeStringSet> string_set_from_json(const nlohmann::json& spec) {
  using namespace detail;
  const std::string kind = field(spec, "kind", "string set").get<std::string>();
  if (kind == "explicit") {
    const json& stages = field(spec, "stages", "explicit string set");
    if (!stages.is_array()) throw SpecError("\"stages\" must be an array of arrays");
    std::vector<std::vector<BinaryString>> out;
    for (std::size_t i = 0; i < stages.size(); ++i) {
      if (!stages[i].is_array()) throw SpecError("stages[" + std::to_string(i) + "] must be an array");
      std::vector<BinaryString> group;
      for (std::size_t j = 0; j < stages[i].size(); ++j)
        group.push_back(bits_of(stages[i][j], "stages[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      out.push_back(std::move(group));
    }
    return std::make_shared<strings::Explicit>(std::move(out));
  }
  if (kind == "builtin") {
    const std::string name = field(spec, "name", "builtin string set").get<std::string>();
    if (name == "ends-in-1") return std::make_shared<strings::EndsInOne>();
    if (name == "has-prefix")
      return std::make_shared<strings::HasPrefix>(bits_of(field(params_of(spec), "prefix", "has-prefix params"), "prefix"));
    throw SpecError("unknown builtin string set \"" + name + "\"");
  }
  throw SpecError("unknown string set kind \"" + kind + "\"");
}

inline Pi01Class class_from_json(const nlohmann::json& spec) {
  using namespace detail;
  if (!spec.is_object()) throw SpecError("class spec must be an object");
  const json& kind_v = field(spec, "kind", "class spec");
  if (!kind_v.is_string()) throw SpecError("\"kind\" must be a string");
  const std::string kind = kind_v.get<std::string>();
  if (kind == "finite") {
    if (spec.contains("stages")) {
      const json& st = spec["stages"];
      if (!st.is_array()) throw SpecError("\"stages\" must be an array of interval lists");
      std::vector<std::vector<RationalInterval>> groups;
      for (std::size_t i = 0; i < st.size(); ++i) groups.push_back(intervals_of(st[i], "stages[" + std::to_string(i) + "]"));
      return Pi01Class(std::make_shared<generators::Finite>(std::move(groups)));
    }
    return finite_class(intervals_of(field(spec, "intervals", "finite class"), "intervals"));
  }
  if (kind == "generator") {
    const json& name_v = field(spec, "name", "generator class");
    if (!name_v.is_string()) throw SpecError("\"name\" must be a string");
    const std::string name = name_v.get<std::string>();
    const json& params = params_of(spec);
    if (name == "cantor-middle-thirds-complement")
      return Pi01Class(std::make_shared<generators::CantorComplement>());
    if (name == "accumulate-at") {
      bool shrink = true;
      if (params.contains("shrink")) {
        if (!params["shrink"].is_boolean()) throw SpecError("\"shrink\" must be a boolean");
        shrink = params["shrink"].get<bool>();
      }
      Rational point = rational_of(field(params, "point", "accumulate-at params"), "point");
      if (point < 0 || point > 1) throw SpecError("accumulation point must lie in [0,1]");
      return Pi01Class(std::make_shared<generators::AccumulateAt>(point, shrink));
    }
    if (name == "stalling")
      return Pi01Class(std::make_shared<generators::Stalling>(
          intervals_of(field(params, "intervals", "stalling params"), "intervals")));
    if (name == "delayed")
      return Pi01Class(std::make_shared<generators::Delayed>(
          interval_of(field(params, "interval", "delayed params"), "interval"),
          positive_of(field(params, "stage", "delayed params"), "stage")));
    if (name == "cantor-of-strings")
      return cantor_class(string_set_from_json(field(params, "set", "cantor-of-strings params")));
    throw SpecError("unknown generator \"" + name + "\"");
  }
  throw SpecError("unknown class kind \"" + kind + "\"");
}

namespace detail {

template <class Build>
auto as_spec_error(Build&& build) {
  try {
    return build();
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("ill-typed spec: ") + e.what());
  } catch (const InvalidInput& e) {
    throw SpecError(e.what());
  }
}

}  // namespace detail

inline Pi01Class parse_class_spec(const std::string& text) {
  auto doc = detail::parse_json(text);
  return detail::as_spec_error([&] { return class_from_json(doc); });
}

inline std::shared_ptr<const CeStringSet> parse_string_set_spec(const std::string& text) {
  auto doc = detail::parse_json(text);
  return detail::as_spec_error([&] { return string_set_from_json(doc); });
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open spec file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace vexact

#endif  // VEXACT_SPEC_IO_HPP
