#include "maxhom/json_io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <utility>

#include "maxhom/error.hpp"

namespace maxhom {

namespace {

const json& field(const json& j, const char* key, const char* where) {
  require_usage(j.is_object(), std::string(where) + " must be an object");
  const auto it = j.find(key);
  require_usage(it != j.end(),
                std::string(where) + " is missing \"" + key + "\"");
  return *it;
}

std::string str_field(const json& j, const char* key, const char* where) {
  const json& v = field(j, key, where);
  require_usage(v.is_string(), std::string(where) + "." + key +
                                   " must be a string");
  return v.get<std::string>();
}

long long int_field(const json& j, const char* key, const char* where) {
  const json& v = field(j, key, where);
  require_usage(v.is_number_integer(), std::string(where) + "." + key +
                                           " must be an integer");
  return v.get<long long>();
}

Rational rational_field(const json& j, const char* key, const char* where) {
  return parse_rational(str_field(j, key, where));
}

const json& array_field(const json& j, const char* key, const char* where) {
  const json& v = field(j, key, where);
  require_usage(v.is_array(), std::string(where) + "." + key +
                                  " must be an array");
  return v;
}

std::string name_at(const json& v, const char* where) {
  require_usage(v.is_string(), std::string(where) + " entries must be strings");
  return v.get<std::string>();
}

std::string param_name(GraphParam p) {
  switch (p) {
    case GraphParam::Size: return "size";
    case GraphParam::CC: return "cc";
    case GraphParam::TW: return "tw";
    case GraphParam::TD: return "td";
  }
  return "tw";
}

int elem_of(const ValuedStructure& A, const std::string& name) {
  const int i = A.elem(name);
  require_usage(i >= 0, "unknown element \"" + name + "\"");
  return i;
}

int vertex_of(const Graph& g, const std::string& name) {
  const int i = g.vertex(name);
  require_usage(i >= 0, "unknown vertex \"" + name + "\"");
  return i;
}

GraphParam param_of(const std::string& s) {
  if (s == "size") return GraphParam::Size;
  if (s == "cc") return GraphParam::CC;
  if (s == "tw") return GraphParam::TW;
  if (s == "td") return GraphParam::TD;
  fail_usage("unknown parameter \"" + s + "\"");
}

} // namespace

json structure_to_json(const ValuedStructure& A) {
  json sig = json::array();
  for (const auto& s : A.sig.symbols)
    sig.push_back({{"name", s.name}, {"arity", s.arity}});
  json values = json::object();
  for (std::size_t f = 0; f < A.sig.symbols.size(); ++f) {
    json rows = json::array();
    for (const auto& [t, v] : A.values[f]) {
      json names = json::array();
      for (const int i : t) names.push_back(A.domain[i]);
      rows.push_back({{"tuple", std::move(names)}, {"value", format_rational(v)}});
    }
    values[A.sig.symbols[f].name] = std::move(rows);
  }
  return {{"signature", std::move(sig)},
          {"domain", A.domain},
          {"values", std::move(values)}};
}

ValuedStructure structure_from_json(const json& j) {
  Signature sig;
  for (const json& s : array_field(j, "signature", "structure")) {
    Symbol sym;
    sym.name = str_field(s, "name", "symbol");
    sym.arity = static_cast<int>(int_field(s, "arity", "symbol"));
    sig.symbols.push_back(std::move(sym));
  }
  std::vector<std::string> domain;
  for (const json& d : array_field(j, "domain", "structure"))
    domain.push_back(name_at(d, "domain"));
  auto A = make_structure(std::move(sig), std::move(domain));

  const json& values = field(j, "values", "structure");
  require_usage(values.is_object(), "structure.values must be an object");
  for (const auto& [name, rows] : values.items()) {
    const int f = A.sig.index_of(name);
    require_usage(f >= 0, "values name an unknown symbol \"" + name + "\"");
    require_usage(rows.is_array(), "value tables must be arrays");
    for (const json& row : rows) {
      Tuple t;
      for (const json& e : array_field(row, "tuple", "value entry"))
        t.push_back(elem_of(A, name_at(e, "tuple")));
      const Rational v = rational_field(row, "value", "value entry");
      require_usage(v > 0, "stored values must be strictly positive");
      require_usage(A.values[f].count(t) == 0, "duplicate tuple in \"" +
                                                   name + "\"");
      A.set_value(f, t, v);
    }
  }
  A.validate();
  return A;
}

json graph_to_json(const Graph& g) {
  json edges = json::array();
  std::vector<std::pair<int, int>> order;
  for (const auto& [u, v] : g.edges) {
    edges.push_back(json::array({g.vertices[u], g.vertices[v]}));
    order.emplace_back(u, v);
  }
  json vw = json::object();
  for (const auto& [v, w] : g.vertex_weights) vw[g.vertices[v]] = format_rational(w);
  json ew = json::object();
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto it = g.edge_weights.find(order[i]);
    if (it != g.edge_weights.end()) ew[std::to_string(i)] = format_rational(it->second);
  }
  return {{"vertices", g.vertices},
          {"edges", std::move(edges)},
          {"vertex_weights", std::move(vw)},
          {"edge_weights", std::move(ew)}};
}

Graph graph_from_json(const json& j) {
  std::vector<std::string> names;
  for (const json& v : array_field(j, "vertices", "graph"))
    names.push_back(name_at(v, "vertices"));
  Graph g = make_graph(std::move(names));

  std::vector<std::pair<int, int>> listed;
  const json& edges = array_field(j, "edges", "graph");
  for (const json& e : edges) {
    require_usage(e.is_array() && e.size() == 2,
                  "edges must be [u, v] pairs");
    const int u = vertex_of(g, name_at(e[0], "edges"));
    const int v = vertex_of(g, name_at(e[1], "edges"));
    if (u == v) g.allow_loops = true;
    listed.emplace_back(u, v);
  }
  for (const auto& [u, v] : listed) g.add_edge(u, v);

  if (j.contains("vertex_weights")) {
    const json& vw = j["vertex_weights"];
    require_usage(vw.is_object(), "graph.vertex_weights must be an object");
    for (const auto& [name, w] : vw.items()) {
      require_usage(w.is_string(), "weights must be rational strings");
      g.vertex_weights[vertex_of(g, name)] = parse_rational(w.get<std::string>());
    }
  }
  if (j.contains("edge_weights")) {
    const json& ew = j["edge_weights"];
    require_usage(ew.is_object(), "graph.edge_weights must be an object");
    for (const auto& [key, w] : ew.items()) {
      std::size_t pos = 0;
      long long idx = -1;
      try {
        idx = std::stoll(key, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      require_usage(pos == key.size() && idx >= 0 &&
                        idx < static_cast<long long>(listed.size()),
                    "edge_weights keys index the edges array");
      require_usage(w.is_string(), "weights must be rational strings");
      const auto& [u, v] = listed[static_cast<std::size_t>(idx)];
      g.set_edge_weight(u, v, parse_rational(w.get<std::string>()));
    }
  }
  g.validate();
  return g;
}

json overcast_to_json(const Overcast& w, const ValuedStructure& A,
                      const ValuedStructure& B) {
  json out = json::array();
  for (const auto& [g, p] : w.support) {
    json map = json::object();
    for (std::size_t i = 0; i < g.size(); ++i)
      map[A.domain[i]] = B.domain[g[i]];
    out.push_back({{"map", std::move(map)}, {"prob", format_rational(p)}});
  }
  return out;
}

Overcast overcast_from_json(const json& j, const ValuedStructure& A,
                            const ValuedStructure& B) {
  require_usage(j.is_array(), "an overcast is an array of {map, prob}");
  std::map<Assignment, Rational> merged;
  for (const json& entry : j) {
    const json& map = field(entry, "map", "overcast entry");
    require_usage(map.is_object(), "overcast maps must be objects");
    require_usage(map.size() == static_cast<std::size_t>(A.n()),
                  "overcast maps must cover the whole domain");
    Assignment g(A.n(), -1);
    for (const auto& [from, to] : map.items()) {
      require_usage(to.is_string(), "overcast maps send names to names");
      g[elem_of(A, from)] = elem_of(B, to.get<std::string>());
    }
    const Rational p = rational_field(entry, "prob", "overcast entry");
    require_usage(p > 0, "overcast probabilities must be positive");
    merged[g] += p;
  }
  Overcast w;
  for (const auto& [g, p] : merged) w.support.emplace_back(g, p);
  return w;
}

json partition_to_json(const Partition& P, const ValuedStructure& G) {
  json parts = json::array();
  for (const auto& part : P.parts) {
    json names = json::array();
    for (const int v : part) names.push_back(G.domain[v]);
    parts.push_back(std::move(names));
  }
  return {{"parts", std::move(parts)}};
}

Partition partition_from_json(const json& j, const ValuedStructure& G) {
  Partition P;
  for (const json& part : array_field(j, "parts", "partition")) {
    require_usage(part.is_array(), "parts must be arrays of names");
    std::vector<int> ids;
    for (const json& e : part) ids.push_back(elem_of(G, name_at(e, "parts")));
    std::sort(ids.begin(), ids.end());
    P.parts.push_back(std::move(ids));
  }
  return P;
}

json modulator_to_json(const FractionalModulator& pi, const Graph& g) {
  json support = json::array();
  if (pi.kind == ModulatorKind::Vertex) {
    for (const auto& [set, prob] : pi.vertex_support) {
      json names = json::array();
      for (const int v : set) names.push_back(g.vertices[v]);
      support.push_back({{"set", std::move(names)}, {"prob", format_rational(prob)}});
    }
  } else {
    for (const auto& [set, prob] : pi.edge_support) {
      json pairs = json::array();
      for (const auto& [u, v] : set)
        pairs.push_back(json::array({g.vertices[u], g.vertices[v]}));
      support.push_back({{"set", std::move(pairs)}, {"prob", format_rational(prob)}});
    }
  }
  return {{"kind", pi.kind == ModulatorKind::Vertex ? "vertex" : "edge"},
          {"param", param_name(pi.param)},
          {"bound", pi.bound},
          {"thinness", format_rational(pi.thinness)},
          {"support", std::move(support)}};
}

FractionalModulator modulator_from_json(const json& j, const Graph& g) {
  FractionalModulator pi;
  const std::string kind = str_field(j, "kind", "modulator");
  require_usage(kind == "vertex" || kind == "edge",
                "modulator kind must be \"vertex\" or \"edge\"");
  pi.kind = kind == "vertex" ? ModulatorKind::Vertex : ModulatorKind::Edge;
  pi.param = param_of(str_field(j, "param", "modulator"));
  pi.bound = int_field(j, "bound", "modulator");
  pi.thinness = rational_field(j, "thinness", "modulator");
  for (const json& entry : array_field(j, "support", "modulator")) {
    const json& set = array_field(entry, "set", "support entry");
    const Rational prob = rational_field(entry, "prob", "support entry");
    if (pi.kind == ModulatorKind::Vertex) {
      std::vector<int> ids;
      for (const json& e : set) ids.push_back(vertex_of(g, name_at(e, "set")));
      std::sort(ids.begin(), ids.end());
      pi.vertex_support.emplace_back(std::move(ids), prob);
    } else {
      std::vector<std::pair<int, int>> ids;
      for (const json& e : set) {
        require_usage(e.is_array() && e.size() == 2,
                      "edge sets list [u, v] pairs");
        int u = vertex_of(g, name_at(e[0], "set"));
        int v = vertex_of(g, name_at(e[1], "set"));
        if (u > v) std::swap(u, v);
        ids.emplace_back(u, v);
      }
      std::sort(ids.begin(), ids.end());
      pi.edge_support.emplace_back(std::move(ids), prob);
    }
  }
  return pi;
}

json bundle_to_json(const PliableBundle& b, const ValuedStructure& A) {
  return {{"B", structure_to_json(b.B)},
          {"omega", overcast_to_json(b.omega, A, b.B)},
          {"omega_prime", overcast_to_json(b.omega_prime, b.B, A)},
          {"factor", format_rational(b.factor)},
          {"loss_bound", format_rational(b.loss_bound)}};
}

PliabilityWitness witness_from_json(const json& j, const ValuedStructure& A) {
  PliabilityWitness w;
  w.B = structure_from_json(field(j, "B", "witness"));
  w.out = overcast_from_json(field(j, "omega", "witness"), A, w.B);
  w.in = overcast_from_json(field(j, "omega_prime", "witness"), w.B, A);
  return w;
}

namespace {

json sparse_to_json(const std::vector<std::pair<int, Rational>>& entries) {
  json out = json::object();
  for (const auto& [i, c] : entries) out[std::to_string(i)] = format_rational(c);
  return out;
}

std::vector<std::pair<int, Rational>> sparse_from_json(const json& j,
                                                       int num_vars,
                                                       const char* where) {
  require_usage(j.is_object(), std::string(where) + " must be an object");
  std::map<int, Rational> sorted;
  for (const auto& [key, val] : j.items()) {
    std::size_t pos = 0;
    long long idx = -1;
    try {
      idx = std::stoll(key, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require_usage(pos == key.size() && idx >= 0 && idx < num_vars,
                  std::string(where) + " keys must be variable indices");
    require_usage(val.is_string(), std::string(where) +
                                       " coefficients are rational strings");
    sorted[static_cast<int>(idx)] = parse_rational(val.get<std::string>());
  }
  return {sorted.begin(), sorted.end()};
}

} // namespace

json lp_to_json(const LinearProgram& lp) {
  const char* sense = lp.obj_sense == ObjSense::Max   ? "max"
                      : lp.obj_sense == ObjSense::Min ? "min"
                                                      : "feasibility";
  json rows = json::array();
  for (const auto& r : lp.rows) {
    const char* rs = r.sense == RowSense::LE   ? "<="
                     : r.sense == RowSense::EQ ? "=="
                                               : ">=";
    rows.push_back({{"coeffs", sparse_to_json(r.coeffs)},
                    {"sense", rs},
                    {"rhs", format_rational(r.rhs)}});
  }
  json out = {{"num_vars", lp.num_vars},
              {"sense", sense},
              {"objective", sparse_to_json(lp.objective)},
              {"rows", std::move(rows)}};
  if (!lp.nonneg.empty()) out["nonneg"] = lp.nonneg;
  if (!lp.var_names.empty()) out["var_names"] = lp.var_names;
  return out;
}

LinearProgram lp_from_json(const json& j) {
  LinearProgram lp;
  lp.num_vars = static_cast<int>(int_field(j, "num_vars", "lp"));
  const std::string sense = str_field(j, "sense", "lp");
  if (sense == "max")
    lp.obj_sense = ObjSense::Max;
  else if (sense == "min")
    lp.obj_sense = ObjSense::Min;
  else if (sense == "feasibility")
    lp.obj_sense = ObjSense::Feasibility;
  else
    fail_usage("lp.sense must be max, min, or feasibility");
  lp.objective = sparse_from_json(field(j, "objective", "lp"), lp.num_vars,
                                  "lp.objective");
  for (const json& r : array_field(j, "rows", "lp")) {
    LPRow row;
    row.coeffs = sparse_from_json(field(r, "coeffs", "lp row"), lp.num_vars,
                                  "row.coeffs");
    const std::string rs = str_field(r, "sense", "lp row");
    if (rs == "<=")
      row.sense = RowSense::LE;
    else if (rs == "==")
      row.sense = RowSense::EQ;
    else if (rs == ">=")
      row.sense = RowSense::GE;
    else
      fail_usage("row sense must be <=, ==, or >=");
    row.rhs = rational_field(r, "rhs", "lp row");
    lp.rows.push_back(std::move(row));
  }
  if (j.contains("nonneg")) {
    const json& nn = j["nonneg"];
    require_usage(nn.is_array(), "lp.nonneg must be an array of booleans");
    for (const json& b : nn) {
      require_usage(b.is_boolean(), "lp.nonneg must be an array of booleans");
      lp.nonneg.push_back(b.get<bool>());
    }
  }
  if (j.contains("var_names"))
    for (const json& v : array_field(j, "var_names", "lp"))
      lp.var_names.push_back(name_at(v, "var_names"));
  lp.validate();
  return lp;
}

json lp_outcome_to_json(const LPOutcome& o) {
  const char* status = o.status == LPStatus::Optimal      ? "optimal"
                       : o.status == LPStatus::Infeasible ? "infeasible"
                                                          : "unbounded";
  const auto strings = [](const std::vector<Rational>& xs) {
    json out = json::array();
    for (const auto& x : xs) out.push_back(format_rational(x));
    return out;
  };
  json out = {{"status", status}};
  if (o.status == LPStatus::Optimal) {
    out["value"] = format_rational(o.value);
    out["primal"] = strings(o.primal);
    out["duals"] = strings(o.duals);
  } else if (o.status == LPStatus::Infeasible) {
    out["farkas"] = strings(o.farkas);
  } else {
    out["ray"] = strings(o.ray);
  }
  return out;
}

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_usage(static_cast<bool>(in), "cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, false);
  require_usage(!j.is_discarded(), "invalid JSON in file: " + path);
  return j;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require_usage(static_cast<bool>(out), "cannot write file: " + path);
  out << j.dump(2) << "\n";
  require_usage(static_cast<bool>(out), "failed writing file: " + path);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string file_fnv1a(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_usage(static_cast<bool>(in), "cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a_hex(buf.str());
}

} // namespace maxhom
