#ifndef HOPLP_MODEL_IO_HPP
#define HOPLP_MODEL_IO_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "model.hpp"

// JSON model format. One document per model:
//   { "n": 4,
//     "unary": [[t0, t1], ...],
//     "edges": [{"i": 0, "j": 1, "theta": [[t00, t01], [t10, t11]]}, ...],
//     "hop": {"type": "cardinality", "f": [...], "flip_mask": [...]}
//           | {"type": "pattern", "patterns": [[...], ...]}
//           | {"type": "table", "values": [...]} }
// Energies are plain decimals; positive infinity is the string "inf".

namespace hoplp {

namespace detail {

inline double energy_from_json(const nlohmann::json& j, const std::string& where)
{
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return infinity_sentinel;
    throw input_error(where + ": expected a number or \"inf\"");
  }
  if (!j.is_number()) throw input_error(where + ": expected a number or \"inf\"");
  const double v = j.get<double>();
  check_energy_value(v, where.c_str());
  return v;
}

inline nlohmann::json energy_to_json(double v)
{
  if (is_forbidden(v)) return "inf";
  return v;
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key, const std::string& where)
{
  auto it = j.find(key);
  if (it == j.end()) throw input_error(where + ": missing field '" + key + "'");
  return *it;
}

} // namespace detail

inline energy_model model_from_json(const nlohmann::json& doc)
{
  if (!doc.is_object()) throw input_error("model: expected a JSON object");
  energy_model m;

  const auto& jn = detail::require_field(doc, "n", "model");
  if (!jn.is_number_integer() || jn.get<long long>() <= 0)
    throw input_error("model.n: expected a positive integer");
  m.n = jn.get<int>();

  const auto& ju = detail::require_field(doc, "unary", "model");
  if (!ju.is_array() || (int)ju.size() != m.n)
    throw input_error("model.unary: expected an array of n pairs");
  m.unary.resize(m.n);
  for (int i = 0; i < m.n; ++i) {
    const auto& t = ju[i];
    if (!t.is_array() || t.size() != 2)
      throw input_error("model.unary[" + std::to_string(i) + "]: expected [t0, t1]");
    m.unary[i] = {detail::energy_from_json(t[0], "model.unary"), detail::energy_from_json(t[1], "model.unary")};
  }

  const auto& je = detail::require_field(doc, "edges", "model");
  if (!je.is_array()) throw input_error("model.edges: expected an array");
  for (std::size_t k = 0; k < je.size(); ++k) {
    const std::string where = "model.edges[" + std::to_string(k) + "]";
    const auto& jedge = je[k];
    if (!jedge.is_object()) throw input_error(where + ": expected an object");
    edge_potential e;
    const auto& ji = detail::require_field(jedge, "i", where);
    const auto& jj = detail::require_field(jedge, "j", where);
    if (!ji.is_number_integer() || !jj.is_number_integer())
      throw input_error(where + ": endpoints must be integers");
    e.i = ji.get<int>();
    e.j = jj.get<int>();
    if (e.i < 0 || e.j < 0 || e.i >= m.n || e.j >= m.n)
      throw input_error(where + ": endpoint index out of range");
    const auto& jt = detail::require_field(jedge, "theta", where);
    if (!jt.is_array() || jt.size() != 2 || !jt[0].is_array() || jt[0].size() != 2 || !jt[1].is_array() || jt[1].size() != 2)
      throw input_error(where + ".theta: expected a 2x2 table");
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        e.theta[a * 2 + b] = detail::energy_from_json(jt[a][b], where + ".theta");
    m.edges.push_back(e);
  }

  const auto& jh = detail::require_field(doc, "hop", "model");
  if (jh.is_array()) throw input_error("model.hop: exactly one hop is supported, got an array");
  if (!jh.is_object()) throw input_error("model.hop: expected an object");
  const auto& jt = detail::require_field(jh, "type", "model.hop");
  if (!jt.is_string()) throw input_error("model.hop.type: expected a string");
  const std::string type = jt.get<std::string>();
  if (type == "cardinality") {
    cardinality_hop c;
    const auto& jf = detail::require_field(jh, "f", "model.hop");
    if (!jf.is_array() || (int)jf.size() != m.n + 1)
      throw input_error("model.hop.f: expected n+1 entries");
    for (const auto& v : jf) c.f.push_back(detail::energy_from_json(v, "model.hop.f"));
    if (auto it = jh.find("flip_mask"); it != jh.end()) {
      if (!it->is_array() || (int)it->size() != m.n)
        throw input_error("model.hop.flip_mask: expected n bits");
      for (const auto& b : *it) {
        if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1))
          throw input_error("model.hop.flip_mask: entries must be 0 or 1");
        c.flip_mask.push_back((std::uint8_t)b.get<int>());
      }
    }
    m.hop = std::move(c);
  } else if (type == "pattern") {
    pattern_hop p;
    const auto& jp = detail::require_field(jh, "patterns", "model.hop");
    if (!jp.is_array() || jp.empty()) throw input_error("model.hop.patterns: expected a non-empty array");
    for (std::size_t k = 0; k < jp.size(); ++k) {
      if (!jp[k].is_array() || (int)jp[k].size() != m.n)
        throw input_error("model.hop.patterns[" + std::to_string(k) + "]: expected n weights");
      std::vector<double> w;
      for (const auto& v : jp[k]) {
        if (!v.is_number()) throw input_error("model.hop.patterns: weights must be finite numbers");
        w.push_back(v.get<double>());
      }
      p.patterns.push_back(std::move(w));
    }
    m.hop = std::move(p);
  } else if (type == "table") {
    table_hop t;
    if (m.n > (int)table_hop_max_vars) throw input_error("model.hop: table hop limited to n <= 20");
    const auto& jv = detail::require_field(jh, "values", "model.hop");
    if (!jv.is_array() || jv.size() != (std::size_t(1) << m.n))
      throw input_error("model.hop.values: expected 2^n entries");
    for (const auto& v : jv) t.values.push_back(detail::energy_from_json(v, "model.hop.values"));
    m.hop = std::move(t);
  } else {
    throw input_error("model.hop.type: unknown type '" + type + "'");
  }

  validate_model(m);
  return m;
}

inline nlohmann::json model_to_json(const energy_model& m)
{
  nlohmann::json doc;
  doc["n"] = m.n;
  auto& ju = doc["unary"] = nlohmann::json::array();
  for (const auto& u : m.unary)
    ju.push_back({detail::energy_to_json(u[0]), detail::energy_to_json(u[1])});
  auto& je = doc["edges"] = nlohmann::json::array();
  for (const auto& e : m.edges) {
    nlohmann::json jedge;
    jedge["i"] = e.i;
    jedge["j"] = e.j;
    jedge["theta"] = {{detail::energy_to_json(e.theta[0]), detail::energy_to_json(e.theta[1])},
                      {detail::energy_to_json(e.theta[2]), detail::energy_to_json(e.theta[3])}};
    je.push_back(std::move(jedge));
  }
  nlohmann::json jh;
  if (const auto* c = std::get_if<cardinality_hop>(&m.hop)) {
    jh["type"] = "cardinality";
    auto& jf = jh["f"] = nlohmann::json::array();
    for (double v : c->f) jf.push_back(detail::energy_to_json(v));
    if (!c->flip_mask.empty()) {
      auto& jm = jh["flip_mask"] = nlohmann::json::array();
      for (auto b : c->flip_mask) jm.push_back((int)b);
    }
  } else if (const auto* p = std::get_if<pattern_hop>(&m.hop)) {
    jh["type"] = "pattern";
    jh["patterns"] = p->patterns;
  } else {
    jh["type"] = "table";
    auto& jv = jh["values"] = nlohmann::json::array();
    for (double v : std::get<table_hop>(m.hop).values) jv.push_back(detail::energy_to_json(v));
  }
  doc["hop"] = std::move(jh);
  return doc;
}

inline energy_model read_model(const std::string& text)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw input_error(std::string("model: malformed JSON: ") + err.what());
  }
  return model_from_json(doc);
}

inline std::string write_model(const energy_model& m)
{
  return model_to_json(m).dump(2) + "\n";
}

inline energy_model read_model_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw input_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return read_model(ss.str());
}

inline void write_model_file(const energy_model& m, const std::string& path)
{
  std::ofstream out(path);
  if (!out) throw input_error("cannot open output file: " + path);
  out << write_model(m);
}

} // namespace hoplp

#endif
