#include "torsionlab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace torsionlab {

namespace {

std::string where(const std::string& pointer) { return pointer.empty() ? "/" : pointer; }

std::string type_name(const Json& j) { return j.type_name(); }

}  // namespace

SchemaError::SchemaError(const std::string& ptr, const std::string& what)
    : ValidationError("schema error at " + where(ptr) + ": " + what), pointer(ptr) {}

Json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // Byte offset to line and column, both 1-based.
    std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto cut = msg.find("] ");
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

Json to_json(const Rat& r) { return to_string(r); }

Rat rat_from_json(const Json& j, const std::string& pointer) {
  if (j.is_number_integer()) return Rat(static_cast<long>(j.get<long long>()));
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const ValidationError& e) {
      throw SchemaError(pointer, e.what());
    }
  }
  if (j.is_number_float())
    throw SchemaError(pointer, "non-integer numbers must be given as strings such as \"3/4\" or \"0.75\"");
  throw SchemaError(pointer, "expected a rational, got " + type_name(j));
}

std::vector<Rat> rats_from_json(const Json& j, const std::string& pointer) {
  if (!j.is_array()) throw SchemaError(pointer, "expected an array of rationals");
  std::vector<Rat> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rat_from_json(j[i], child(pointer, i)));
  return out;
}

Json to_json(const std::vector<Rat>& v) {
  Json a = Json::array();
  for (const auto& r : v) a.push_back(to_json(r));
  return a;
}

Json to_json(const RatPoly& p, const std::vector<std::string>& names) {
  Json o;
  o["nvars"] = p.nvars();
  o["expr"] = names.empty() ? p.to_string() : p.to_string(names);
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json t;
    t["exp"] = e;
    t["num"] = c.get_num().get_str();
    t["den"] = c.get_den().get_str();
    terms.push_back(t);
  }
  o["terms"] = terms;
  return o;
}

RatPoly poly_from_json(const Json& j, const std::vector<std::string>& names, const std::string& pointer) {
  auto parse_expr = [&](const std::string& s, const std::string& ptr) {
    try {
      return RatPoly::parse(s, names);
    } catch (const ValidationError& e) {
      throw SchemaError(ptr, e.what());
    }
  };
  if (j.is_string()) return parse_expr(j.get<std::string>(), pointer);
  if (j.is_number_integer()) return RatPoly::constant(names.size(), rat_from_json(j, pointer));
  if (!j.is_object()) throw SchemaError(pointer, "expected a polynomial string or object, got " + type_name(j));
  if (j.contains("nvars")) {
    auto nv = int_from_json(j["nvars"], child(pointer, "nvars"));
    if (nv != static_cast<long long>(names.size()))
      throw SchemaError(child(pointer, "nvars"),
                        "polynomial has " + std::to_string(nv) + " variables, expected " + std::to_string(names.size()));
  }
  if (j.contains("terms")) {
    const auto& terms = j["terms"];
    const auto tp = child(pointer, "terms");
    if (!terms.is_array()) throw SchemaError(tp, "expected an array of terms");
    RatPoly p(names.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto ip = child(tp, i);
      const auto& t = terms[i];
      if (!t.is_object()) throw SchemaError(ip, "expected a term object");
      const auto& e = require(t, "exp", ip);
      if (!e.is_array() || e.size() != names.size())
        throw SchemaError(child(ip, "exp"), "exponent must have " + std::to_string(names.size()) + " entries");
      Exponent ex;
      for (std::size_t k = 0; k < e.size(); ++k) {
        auto v = int_from_json(e[k], child(child(ip, "exp"), k));
        if (v < 0) throw SchemaError(child(child(ip, "exp"), k), "exponents must be nonnegative");
        ex.push_back(static_cast<unsigned>(v));
      }
      Rat num = rat_from_json(require(t, "num", ip), child(ip, "num"));
      Rat den = t.contains("den") ? rat_from_json(t["den"], child(ip, "den")) : Rat(1);
      if (den == 0) throw SchemaError(child(ip, "den"), "zero denominator");
      p.add_term(ex, Rat(num / den));
    }
    return p;
  }
  if (j.contains("expr")) return parse_expr(string_from_json(j["expr"], child(pointer, "expr")), child(pointer, "expr"));
  throw SchemaError(pointer, "polynomial object needs \"expr\" or \"terms\"");
}

Json to_json(const VectorField& x, const std::vector<std::string>& names) {
  Json a = Json::array();
  for (const auto& c : x.comps) a.push_back(names.empty() ? c.to_string() : c.to_string(names));
  return a;
}

Word word_from_json(const Json& j, const std::string& pointer) {
  try {
    if (j.is_string()) return parse_word(j.get<std::string>());
    if (j.is_number_integer()) return parse_word(std::to_string(j.get<long long>()));
    if (j.is_array()) {
      std::string s;
      for (std::size_t i = 0; i < j.size(); ++i) s += std::to_string(int_from_json(j[i], child(pointer, i)));
      return parse_word(s);
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const ValidationError& e) {
    throw SchemaError(pointer, e.what());
  }
  throw SchemaError(pointer, "expected a word such as \"12\" or [1, 2]");
}

std::vector<Word> words_from_json(const Json& j, const std::string& pointer) {
  if (!j.is_array()) throw SchemaError(pointer, "expected an array of words");
  std::vector<Word> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(word_from_json(j[i], child(pointer, i)));
  return out;
}

const Json& require(const Json& obj, const std::string& key, const std::string& pointer) {
  if (!obj.is_object()) throw SchemaError(pointer, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(pointer, "missing required key \"" + key + "\"");
  return *it;
}

std::string child(const std::string& pointer, const std::string& key) {
  std::string k;
  for (char c : key) {
    if (c == '~')
      k += "~0";
    else if (c == '/')
      k += "~1";
    else
      k += c;
  }
  return pointer + "/" + k;
}

std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

long long int_from_json(const Json& j, const std::string& pointer) {
  if (!j.is_number_integer()) throw SchemaError(pointer, "expected an integer, got " + type_name(j));
  return j.get<long long>();
}

double double_from_json(const Json& j, const std::string& pointer) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return rat_from_json(j, pointer).get_d();
  throw SchemaError(pointer, "expected a number, got " + type_name(j));
}

std::string string_from_json(const Json& j, const std::string& pointer) {
  if (!j.is_string()) throw SchemaError(pointer, "expected a string, got " + type_name(j));
  return j.get<std::string>();
}

}  // namespace torsionlab
