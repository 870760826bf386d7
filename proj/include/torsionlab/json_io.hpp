#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "torsionlab/errors.hpp"
#include "torsionlab/geometry.hpp"
#include "torsionlab/polynomial.hpp"

namespace torsionlab {

using Json = nlohmann::ordered_json;

// Schema violation at a JSON pointer such as /ball/center/2.
struct SchemaError : ValidationError {
  SchemaError(const std::string& pointer, const std::string& what);
  std::string pointer;
};

// Parses text, reporting syntax errors as "<source>:<line>:<column>: ...".
Json parse_json_text(std::string_view text, const std::string& source);
Json read_json_file(const std::string& path);

// Rationals travel as strings ("-3/4", "12345678901234567890") so no
// precision is lost; integer JSON numbers are accepted on input.
Json to_json(const Rat& r);
Rat rat_from_json(const Json& j, const std::string& pointer);
std::vector<Rat> rats_from_json(const Json& j, const std::string& pointer);
Json to_json(const std::vector<Rat>& v);

// {"nvars", "expr", "terms": [{"exp", "num", "den"}]}.
Json to_json(const RatPoly& p, const std::vector<std::string>& names = {});
// Accepts an "expr" string, an object with "expr" or "terms", using the
// given variable names for expressions.
RatPoly poly_from_json(const Json& j, const std::vector<std::string>& names, const std::string& pointer);

Json to_json(const VectorField& x, const std::vector<std::string>& names = {});

// A word is a label string "121" or an array [1, 2, 1].
Word word_from_json(const Json& j, const std::string& pointer);
std::vector<Word> words_from_json(const Json& j, const std::string& pointer);

// Typed field access with pointer-qualified errors.
const Json& require(const Json& obj, const std::string& key, const std::string& pointer);
std::string child(const std::string& pointer, const std::string& key);
std::string child(const std::string& pointer, std::size_t index);
long long int_from_json(const Json& j, const std::string& pointer);
double double_from_json(const Json& j, const std::string& pointer);
std::string string_from_json(const Json& j, const std::string& pointer);

}  // namespace torsionlab
