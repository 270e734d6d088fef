#include "maxhom/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "maxhom/dense.hpp"
#include "maxhom/error.hpp"
#include "maxhom/exact.hpp"
#include "maxhom/fragility.hpp"
#include "maxhom/generators.hpp"
#include "maxhom/graphs.hpp"
#include "maxhom/json_io.hpp"
#include "maxhom/lp.hpp"
#include "maxhom/overcast.hpp"
#include "maxhom/ptas.hpp"
#include "maxhom/reductions.hpp"
#include "maxhom/relax.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

namespace {

// ---------------------------------------------------------------------------
// report plumbing

struct Ctx {
  std::string command;
  json inputs = json::object();
  bool human = false;
  bool timings = false;
  std::string report_path;  // --out; empty = stdout
  std::chrono::steady_clock::time_point start;
};

json load_input(Ctx& ctx, const std::string& path, const std::string& role) {
  json j = load_json(path);
  ctx.inputs[role] = json{{"path", path}, {"fnv1a", file_fnv1a(path)}};
  return j;
}

// Writes `j` to `path` and returns the {"file","fnv1a"} stamp for the report.
json save_artifact(const json& j, const std::string& path) {
  save_json(j, path);
  return json{{"file", path}, {"fnv1a", file_fnv1a(path)}};
}

bool rational_like(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos || slash + 1 >= s.size()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i >= slash) return false;
  for (std::size_t p = i; p < slash; ++p)
    if (!std::isdigit(static_cast<unsigned char>(s[p]))) return false;
  for (std::size_t p = slash + 1; p < s.size(); ++p)
    if (!std::isdigit(static_cast<unsigned char>(s[p]))) return false;
  return true;
}

// --human: add a "<key>_approx" decimal next to every rational object field.
// Machine fields stay untouched, so the flag only ever widens the report.
json humanize(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : j.items()) {
      out[key] = humanize(value);
      if (value.is_string() && rational_like(value.get<std::string>())) {
        const Rational r = parse_rational(value.get<std::string>());
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", r.convert_to<double>());
        out[key + "_approx"] = std::string(buf);
      }
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(humanize(v));
    return out;
  }
  return j;
}

void emit(const Ctx& ctx, json outputs, std::ostream& out) {
  json report = json{{"command", ctx.command},
                     {"inputs", ctx.inputs},
                     {"outputs", std::move(outputs)}};
  if (ctx.timings) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - ctx.start)
                        .count();
    report["timings"] = json{{"total_ms", ms}};
  }
  if (ctx.human) report = humanize(report);
  if (!ctx.report_path.empty()) {
    save_json(report, ctx.report_path);
  } else {
    out << report.dump(2) << "\n";
  }
}

// ---------------------------------------------------------------------------
// small parsers shared by the handlers

Rational rational_arg(const std::string& s, const char* what) {
  try {
    return parse_rational(s);
  } catch (const Error&) {
    fail_usage(std::string(what) + ": expected a rational like 3/4, got '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

int int_arg(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) fail_usage("");
    return v;
  } catch (...) {
    fail_usage(std::string(what) + ": expected an integer, got '" + s + "'");
  }
}

std::vector<Rational> rational_list(const std::string& s, const char* what) {
  std::vector<Rational> out;
  for (const auto& part : split(s, ',')) out.push_back(rational_arg(part, what));
  return out;
}

std::vector<int> int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) out.push_back(int_arg(part, what));
  return out;
}

// "0-1,0-2" -> {{0,1},{0,2}}
std::vector<std::pair<int, int>> pair_list(const std::string& s, const char* what) {
  std::vector<std::pair<int, int>> out;
  for (const auto& part : split(s, ',')) {
    const auto seg = split(part, '-');
    if (seg.size() != 2) fail_usage(std::string(what) + ": expected i-j pairs, got '" + part + "'");
    out.emplace_back(int_arg(seg[0], what), int_arg(seg[1], what));
  }
  return out;
}

int vertex_arg(const Graph& g, const std::string& name) {
  const int v = g.vertex(name);
  if (v < 0) fail_usage("unknown vertex '" + name + "'");
  return v;
}

GraphParam param_arg(const std::string& s) {
  if (s == "size") return GraphParam::Size;
  if (s == "cc") return GraphParam::CC;
  if (s == "tw") return GraphParam::TW;
  if (s == "td") return GraphParam::TD;
  fail_usage("unknown graph parameter '" + s + "' (expected size, cc, tw, or td)");
}

json witness_json(const Assignment& h, const ValuedStructure& A,
                  const ValuedStructure& B) {
  json m = json::object();
  for (std::size_t i = 0; i < h.size(); ++i)
    m[A.domain[i]] = B.domain[static_cast<std::size_t>(h[i])];
  return m;
}

json instance_report(const ValuedStructure& A) {
  return json{{"n", static_cast<long long>(A.domain.size())},
              {"norm1", format_rational(A.norm1())}};
}

int max_arity(const Signature& sig) {
  int r = 1;
  for (const auto& sym : sig.symbols) r = std::max(r, sym.arity);
  return r;
}

json modulator_report_json(const ModulatorReport& rep) {
  json residuals = json::array();
  for (const auto& pr : rep.residuals)
    residuals.push_back(json{{"value", pr.value}, {"exact", pr.exact}});
  return json{{"ok", rep.ok},
              {"distribution_ok", rep.distribution_ok},
              {"residual_ok", rep.residual_ok},
              {"thinness_ok", rep.thinness_ok},
              {"thinness", format_rational(rep.thinness)},
              {"residuals", residuals}};
}

// ---------------------------------------------------------------------------
// --schema

json schemas() {
  json s = json::object();
  s["structure"] = json{
      {"shape", "{signature:[{name,arity}], domain:[names], values:{symbol:[{tuple:[names], value:'p/q'}]}}"},
      {"notes", "stored values are strictly positive rationals; absent tuples are zero"}};
  s["graph"] = json{
      {"shape", "{vertices:[names], edges:[[u,v]], vertex_weights:{name:'p/q'}, edge_weights:{index:'p/q'}}"},
      {"notes", "edge weights are keyed by the edge's index in the edges array"}};
  s["overcast"] = json{
      {"shape", "[{map:{a:x}, prob:'p/q'}]"},
      {"notes", "a distribution over maps from the source domain to the target domain"}};
  s["partition"] = json{{"shape", "{parts:[[names]]}"},
                        {"notes", "nonempty disjoint parts covering the domain"}};
  s["modulator"] = json{
      {"shape", "{kind:'vertex'|'edge', param:'size'|'cc'|'tw'|'td', bound, thinness:'p/q', support:[{set, prob:'p/q'}]}"},
      {"notes", "vertex sets are [names]; edge sets are [[u,v]] pairs"}};
  s["bundle"] = json{
      {"shape", "{B:structure, omega:overcast, omega_prime:overcast, factor:'p/q', loss_bound:'p/q'}"},
      {"notes", "ptas --mode value accepts this file as its witness"}};
  s["lp"] = json{
      {"shape", "{num_vars, sense:'max'|'min'|'feasibility', objective:{var:'p/q'}, rows:[{coeffs:{var:'p/q'}, sense:'<='|'=='|'>=', rhs:'p/q'}], nonneg:[bool], var_names:[names]}"},
      {"notes", "nonneg and var_names are optional; coefficients are sparse by variable index"}};
  s["report"] = json{
      {"shape", "{command, inputs:{role:{path,fnv1a}}, outputs:{...}, timings?:{total_ms}}"},
      {"notes", "timings appear only under --timings so that reports are byte-reproducible"}};
  return s;
}

// ---------------------------------------------------------------------------
// subcommand handlers (each returns the report's outputs object)

struct SolveOpts {
  std::string a_path, b_path;
  bool brute = false;
  bool treedec = false;
  bool exact = false;  // accepted for symmetry; exact is the only mode
  long long map_cap = 10000000;
  long long state_cap = 10000000;
};

json run_solve(Ctx& ctx, const SolveOpts& o) {
  const auto A = structure_from_json(load_input(ctx, o.a_path, "A"));
  const auto B = structure_from_json(load_input(ctx, o.b_path, "B"));
  OptResult r;
  if (o.brute) {
    r = opt_bruteforce(A, B, o.map_cap);
  } else if (o.treedec) {
    r = opt_treedec(A, B, tree_decomposition(gaifman(A), TDMethod::MinFill), o.state_cap);
  } else {
    r = opt_auto(A, B);
  }
  return json{{"value", format_rational(r.value)}, {"witness", witness_json(r.witness, A, B)}};
}

struct RelaxOpts {
  std::string a_path, b_path;
  int level = 0;
  bool with_exact = false;
  long long var_cap = 200000;
};

json run_relax(Ctx& ctx, const RelaxOpts& o) {
  const auto A = structure_from_json(load_input(ctx, o.a_path, "A"));
  const auto B = structure_from_json(load_input(ctx, o.b_path, "B"));
  const Rational sa = opt_sa(A, B, o.level, o.var_cap);
  json out{{"level", o.level}, {"sa_value", format_rational(sa)}};
  if (o.with_exact) {
    const Rational exact = opt_auto(A, B).value;
    out["exact_value"] = format_rational(exact);
    out["gap"] = format_rational(sa - exact);
  }
  return out;
}

struct OvercastOpts {
  std::string a_path, b_path;
  std::string eps = "0";
  long long map_cap = 100000;
};

json run_overcast(Ctx& ctx, const OvercastOpts& o) {
  const auto A = structure_from_json(load_input(ctx, o.a_path, "A"));
  const auto B = structure_from_json(load_input(ctx, o.b_path, "B"));
  const Rational eps = rational_arg(o.eps, "--eps");
  if (eps < 0) fail_usage("--eps must be nonnegative");
  const Rational factor = Rational(1) / (Rational(1) + eps);
  const ValuedStructure target = (eps == 0) ? B : rescale(B, factor);
  const auto found = overcast_find(A, target, o.map_cap);
  json out{{"epsilon", format_rational(eps)}, {"factor", format_rational(factor)}};
  if (std::holds_alternative<Overcast>(found)) {
    out["exists"] = true;
    out["overcast"] = overcast_to_json(std::get<Overcast>(found), A, target);
  } else {
    const auto& cert = std::get<OvercastCertificate>(found);
    out["exists"] = false;
    out["certificate"] = json{{"C", structure_to_json(cert.C)},
                              {"opt_A_C", format_rational(cert.opt_A_C)},
                              {"opt_B_C", format_rational(cert.opt_B_C)}};
  }
  return out;
}

struct DistanceOpts {
  std::string a_path, b_path;
  std::string eps_list = "0,1/8,1/4,1/2,1,2";
  bool edit = false;
  long long map_cap = 100000;
  int bijection_cap = 8;
};

json run_distance(Ctx& ctx, const DistanceOpts& o) {
  const auto A = structure_from_json(load_input(ctx, o.a_path, "A"));
  const auto B = structure_from_json(load_input(ctx, o.b_path, "B"));
  if (o.edit) {
    const auto r = edit_distance(A, B, std::nullopt, o.bijection_cap);
    json out{{"mode", "edit"}, {"infinite", r.infinite}};
    if (!r.infinite) {
      out["value"] = format_rational(r.value);
      out["phi"] = witness_json(r.phi, A, B);
    }
    return out;
  }
  const auto epsilons = rational_list(o.eps_list, "--eps-list");
  const auto found = opt_distance_bound(A, B, epsilons, o.map_cap);
  json out{{"mode", "opt"}};
  if (found) {
    out["bounded"] = true;
    out["epsilon"] = format_rational(found->epsilon);
    out["forward"] = overcast_to_json(found->forward, A, B);
    out["backward"] = overcast_to_json(found->backward, B, A);
  } else {
    out["bounded"] = false;
    json tried = json::array();
    for (const auto& e : epsilons) tried.push_back(format_rational(e));
    out["tried"] = tried;
  }
  return out;
}

struct ModulatorOpts {
  std::string family;
  std::string g_path;
  int layers = 0;
  std::string roots;  // baker: comma-separated vertex names
  std::string param = "tw";
  int d = 2, side = 0;
  std::string axes;  // grid: comma-separated axis indices
  std::string artifact_path;
  std::string graph_out;
};

json run_modulator(Ctx& ctx, const ModulatorOpts& o) {
  Graph g;
  FractionalModulator pi;
  if (o.family == "baker") {
    if (o.g_path.empty()) fail_usage("modulator --family baker needs a graph file");
    g = graph_from_json(load_input(ctx, o.g_path, "G"));
    std::vector<int> roots;
    if (!o.roots.empty()) {
      for (const auto& name : split(o.roots, ',')) roots.push_back(vertex_arg(g, name));
    } else {
      for (const auto& comp : components(g))
        roots.push_back(*std::min_element(comp.begin(), comp.end()));
    }
    pi = baker_modulator(g, o.layers, roots, param_arg(o.param));
  } else if (o.family == "grid") {
    if (o.side <= 0) fail_usage("modulator --family grid needs --side");
    g = grid_graph(o.d, o.side);
    std::vector<int> axes;
    if (!o.axes.empty()) axes = int_list(o.axes, "--axes");
    pi = grid_modulator(o.d, o.side, o.layers, axes, param_arg(o.param));
  } else {
    fail_usage("unknown modulator family '" + o.family + "' (expected baker or grid)");
  }
  const auto rep = modulator_verify(g, pi);
  json out{{"family", o.family},
           {"param", o.param},
           {"bound", pi.bound},
           {"thinness", format_rational(pi.thinness)},
           {"support_size", static_cast<long long>(pi.vertex_support.size() +
                                                   pi.edge_support.size())},
           {"report", modulator_report_json(rep)}};
  const json pj = modulator_to_json(pi, g);
  if (!o.artifact_path.empty()) {
    out["modulator"] = save_artifact(pj, o.artifact_path);
  } else {
    out["modulator"] = pj;
  }
  if (!o.graph_out.empty()) out["graph"] = save_artifact(graph_to_json(g), o.graph_out);
  return out;
}

struct PliableOpts {
  std::string a_path, pi_path;
  int r = 0;  // 0 = max arity of the signature
  std::string artifact_path;
};

json run_pliable(Ctx& ctx, const PliableOpts& o) {
  const auto A = structure_from_json(load_input(ctx, o.a_path, "A"));
  const Graph g = gaifman(A);
  const auto pi = modulator_from_json(load_input(ctx, o.pi_path, "pi"), g);
  const int r = (o.r > 0) ? o.r : max_arity(A.sig);
  const auto bundle = fragile_to_pliable(A, pi, r);
  json out{{"r", r},
           {"factor", format_rational(bundle.factor)},
           {"loss_bound", format_rational(bundle.loss_bound)},
           {"parts", static_cast<long long>(bundle.part_offset.size())},
           {"B_size", static_cast<long long>(bundle.B.domain.size())},
           {"back_ok", bundle.back_report.ok}};
  const json bj = bundle_to_json(bundle, A);
  if (!o.artifact_path.empty()) {
    out["bundle"] = save_artifact(bj, o.artifact_path);
  } else {
    out["bundle"] = bj;
  }
  return out;
}

struct ReduceOpts {
  std::string a_path;
  std::string target;
  std::string eps;
  int d = 0;  // size target: 0 = largest component of gaifman(A)
  int td_cap = 10;
  long long support_cap = 100000;
};

json run_reduce(Ctx& ctx, const ReduceOpts& o) {
  const auto A = structure_from_json(load_input(ctx, o.a_path, "A"));
  const Rational eps = rational_arg(o.eps, "--eps");
  if (o.target == "size") {
    int d = o.d;
    if (d <= 0) {
      for (const auto& comp : components(gaifman(A)))
        d = std::max(d, static_cast<int>(comp.size()));
      d = std::max(d, 1);
    }
    const auto r = cc_to_size(A, eps, d);
    return json{{"target", "size"},
                {"d", d},
                {"B", structure_to_json(r.B)},
                {"out", overcast_to_json(r.out, A, r.B)},
                {"in", overcast_to_json(r.in, r.B, A)},
                {"factor", format_rational(r.factor)},
                {"edit", format_rational(r.edit)},
                {"delta", format_rational(r.delta)},
                {"classes", r.classes},
                {"class_bound", r.class_bound.str()},
                {"rounds", r.rounds}};
  }
  if (o.target == "td") {
    const auto r = td_to_size(A, eps, o.td_cap, o.support_cap);
    return json{{"target", "td"},
                {"B", structure_to_json(r.B)},
                {"out", overcast_to_json(r.out, A, r.B)},
                {"in", overcast_to_json(r.in, r.B, A)},
                {"factor", format_rational(r.factor)},
                {"packs", r.packs}};
  }
  fail_usage("unknown reduce target '" + o.target + "' (expected size or td)");
}

struct DenseOpts {
  std::string g_path, p_path;
  std::string mode;  // quotient | homogeneity | counting | extension | approx
  int samples = 0;
  unsigned long long seed = 0;
  std::string pattern;  // "0-1,0-2"; empty = all part pairs
  std::string ab;
  std::string eps0;
  long long map_cap = 1000000;
  long long support_cap = 100000;
};

std::vector<std::pair<int, int>> dense_pattern(const DenseOpts& o, int k) {
  if (!o.pattern.empty()) return pair_list(o.pattern, "--pattern");
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) all.emplace_back(i, j);
  return all;
}

json run_dense(Ctx& ctx, const DenseOpts& o) {
  const auto G = structure_from_json(load_input(ctx, o.g_path, "G"));
  const auto P = partition_from_json(load_input(ctx, o.p_path, "P"), G);
  if (o.mode == "quotient") {
    const auto Q = quotient(G, P);
    return json{{"quotient", structure_to_json(Q)}, {"norm1", format_rational(Q.norm1())}};
  }
  if (o.mode == "homogeneity") {
    if (o.samples <= 0) {
      return json{{"defect", format_rational(partition_defect(G, P))}, {"exact", true}};
    }
    Rational worst = 0;
    long long pairs = 0;
    for (int i = 0; i < P.k(); ++i)
      for (int j = i + 1; j < P.k(); ++j) {
        const auto rep = homogeneity_defect(G, P.parts[static_cast<std::size_t>(i)],
                                            P.parts[static_cast<std::size_t>(j)],
                                            false, o.samples, o.seed);
        worst = std::max(worst, rep.defect);
        ++pairs;
      }
    return json{{"defect", format_rational(worst)}, {"exact", false}, {"pairs", pairs}};
  }
  if (o.mode == "counting") {
    const auto F = dense_pattern(o, P.k());
    const auto r = counting_check(G, P, F, o.map_cap);
    json pat = json::array();
    for (const auto& [i, j] : F) pat.push_back(json::array({i, j}));
    return json{{"pattern", pat},
                {"sum", format_rational(r.sum)},
                {"predicted", format_rational(r.predicted)},
                {"epsilon", format_rational(r.epsilon)},
                {"halfwidth", format_rational(r.halfwidth)},
                {"contained", r.contained},
                {"maps", r.maps}};
  }
  if (o.mode == "extension") {
    const auto F = dense_pattern(o, P.k());
    if (o.ab.empty()) fail_usage("dense extension needs --ab i-j");
    const auto ab = pair_list(o.ab, "--ab");
    if (ab.size() != 1) fail_usage("--ab takes exactly one pair");
    const auto r = extension_check(G, P, F, ab[0], o.map_cap);
    return json{{"ab", json::array({ab[0].first, ab[0].second})},
                {"epsilon", format_rational(r.epsilon)},
                {"sqrt_eps", format_rational(r.sqrt_eps)},
                {"exceptions", r.exceptions},
                {"pairs", r.pairs},
                {"allowed", format_rational(r.allowed)},
                {"ok", r.ok}};
  }
  if (o.mode == "approx") {
    if (o.eps0.empty()) fail_usage("dense approx needs --eps0 p/q");
    const Rational eps0 = rational_arg(o.eps0, "--eps0");
    const auto q = quotient_overcast(G, P, eps0, o.map_cap, o.support_cap);
    json kept = json::array();
    for (const auto& [i, j] : q.kept_pairs) kept.push_back(json::array({i, j}));
    json out{{"accepted", q.accepted},
             {"diagnosis", q.diagnosis},
             {"epsilon", format_rational(q.epsilon)},
             {"factor", format_rational(q.factor)},
             {"edit_finite", q.edit_finite},
             {"density", format_rational(q.density)},
             {"density_hypothesis", q.density_hypothesis},
             {"kept_pairs", kept},
             {"min_slack", format_rational(q.slack.min_slack)},
             {"quotient", structure_to_json(q.quotient_graph)},
             {"out", overcast_to_json(q.out, G, q.quotient_graph)}};
    if (q.edit_finite) out["edit"] = format_rational(q.edit);
    if (q.accepted) {
      out["gprime"] = structure_to_json(q.gprime);
      out["in"] = overcast_to_json(q.in, q.quotient_graph, q.gprime);
    }
    return out;
  }
  fail_usage("unknown dense mode '" + o.mode + "'");
}

struct PtasOpts {
  std::string a_path, c_path, witness_path;
  std::string eps;
  std::string mode;
  long long var_cap = 200000;
  int tw_cap = 12;
  long long state_cap = 10000000;
};

json run_ptas(Ctx& ctx, const PtasOpts& o) {
  const auto A = structure_from_json(load_input(ctx, o.a_path, "A"));
  const auto C = structure_from_json(load_input(ctx, o.c_path, "C"));
  const Rational eps = rational_arg(o.eps, "--eps");
  if (o.mode == "value") {
    const auto w = witness_from_json(load_input(ctx, o.witness_path, "witness"), A);
    const auto rep = ptas_value(A, C, eps, w, o.var_cap, o.tw_cap);
    return json{{"mode", "value"},
                {"epsilon", format_rational(eps)},
                {"lower", format_rational(rep.lower)},
                {"upper", format_rational(rep.upper)},
                {"ratio", format_rational(rep.ratio)},
                {"level", rep.level}};
  }
  if (o.mode == "construct") {
    const auto pi = modulator_from_json(load_input(ctx, o.witness_path, "pi"), gaifman(A));
    const auto rep = ptas_constructive(A, C, pi, min_fill_provider(), o.state_cap);
    json out{{"mode", "construct"},
             {"epsilon", format_rational(eps)},
             {"lower", format_rational(rep.lower)},
             {"upper", format_rational(rep.upper)},
             {"ratio", format_rational(rep.ratio)}};
    if (rep.witness) out["witness"] = witness_json(*rep.witness, A, C);
    return out;
  }
  fail_usage("unknown ptas mode '" + o.mode + "' (expected value or construct)");
}

struct GenOpts {
  std::string kind;
  int d = 2, side = 0, n = 0, a = 0, b = 0, k = 0;
  std::string p, density, eps;
  unsigned long long seed = 0;
  std::string base_path;  // triangle_glued base / hardness graph / probe instance
  std::string colors;
  long long map_cap = 1000000;
  std::string artifact_path;
};

json run_gen(Ctx& ctx, const GenOpts& o) {
  // Diagnostic kinds first: they consume an instance instead of parameters.
  if (o.kind == "hardness") {
    const Graph g = graph_from_json(load_input(ctx, o.base_path, "G"));
    if (o.colors.empty()) fail_usage("gen hardness needs --colors c0,c1,...");
    const auto pair = hardness_gadget(g, int_list(o.colors, "--colors"), o.seed);
    json out{{"kind", "hardness"},
             {"pattern_norm1", format_rational(pair.pattern.norm1())},
             {"target_norm1", format_rational(pair.target.norm1())}};
    const json combined =
        json{{"pattern", structure_to_json(pair.pattern)},
             {"target", structure_to_json(pair.target)}};
    if (!o.artifact_path.empty()) {
      out["gadget"] = save_artifact(combined, o.artifact_path);
    } else {
      out["gadget"] = combined;
    }
    return out;
  }
  if (o.kind == "probe") {
    const auto A = structure_from_json(load_input(ctx, o.base_path, "A"));
    if (o.eps.empty()) fail_usage("gen probe needs --eps p/q");
    if (o.k <= 0) fail_usage("gen probe needs --k >= 1");
    const auto rep =
        non_pliability_probe(A, rational_arg(o.eps, "--eps"), o.k, o.map_cap);
    return json{{"kind", "probe"},
                {"id_value", format_rational(rep.id_value)},
                {"best_value", format_rational(rep.best_value)},
                {"loss", format_rational(rep.loss)},
                {"separated", rep.separated},
                {"maps", rep.maps},
                {"best_map", witness_json(rep.best_map, A, A)}};
  }

  ValuedStructure inst;
  if (o.kind == "grid") {
    inst = gen_grid(o.d, o.side);
  } else if (o.kind == "clique") {
    inst = gen_clique(o.n);
  } else if (o.kind == "path") {
    inst = gen_path(o.n);
  } else if (o.kind == "gnp") {
    if (o.p.empty()) fail_usage("gen gnp needs --p p/q");
    inst = gen_gnp(o.n, rational_arg(o.p, "--p"), o.seed);
  } else if (o.kind == "bipartite") {
    if (o.density.empty()) fail_usage("gen bipartite needs --density p/q");
    inst = gen_bipartite(o.a, o.b, rational_arg(o.density, "--density"), o.seed);
  } else if (o.kind == "tournament") {
    inst = gen_tournament(o.n, o.seed);
  } else if (o.kind == "triangle_glued") {
    inst = gen_triangle_glued(structure_from_json(load_input(ctx, o.base_path, "base")));
  } else {
    fail_usage("unknown gen kind '" + o.kind + "'");
  }
  json out = instance_report(inst);
  out["kind"] = o.kind;
  const json ij = structure_to_json(inst);
  if (!o.artifact_path.empty()) {
    out["instance"] = save_artifact(ij, o.artifact_path);
  } else {
    out["instance"] = ij;
  }
  return out;
}

json run_lp(Ctx& ctx, const std::string& lp_path) {
  const auto lp = lp_from_json(load_input(ctx, lp_path, "lp"));
  return json{{"outcome", lp_outcome_to_json(solve_lp(lp))}};
}

} // namespace

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& argv, std::ostream& out,
             std::ostream& err) {
  for (const auto& a : argv) {
    if (a == "--schema") {
      out << schemas().dump(2) << "\n";
      return 0;
    }
  }

  Ctx ctx;
  ctx.start = std::chrono::steady_clock::now();

  CLI::App app{"maxhom: exact and approximate maximum homomorphisms over "
               "rational-valued structures"};
  app.require_subcommand(1);
  app.add_option("--out", ctx.report_path, "write the report to a file instead of stdout");
  app.add_flag("--human", ctx.human, "add decimal approximations next to rational fields");
  app.add_flag("--timings", ctx.timings, "add wall-clock timings (breaks byte-reproducibility)");

  const auto sub = [&app](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  SolveOpts so;
  CLI::App* solve = sub("solve", "exact optimum of a structure pair");
  solve->add_option("A", so.a_path, "source structure JSON")->required();
  solve->add_option("B", so.b_path, "target structure JSON")->required();
  solve->add_flag("--exact", so.exact, "exact mode (the default and only mode)");
  solve->add_flag("--brute", so.brute, "force brute-force enumeration");
  solve->add_flag("--treedec", so.treedec, "force the tree-decomposition DP");
  solve->add_option("--map-cap", so.map_cap, "assignment cap for --brute");
  solve->add_option("--state-cap", so.state_cap, "DP state cap for --treedec");

  RelaxOpts ro;
  CLI::App* relax = sub("relax", "Sherali-Adams relaxation value at a level");
  relax->add_option("A", ro.a_path, "source structure JSON")->required();
  relax->add_option("B", ro.b_path, "target structure JSON")->required();
  relax->add_option("--level", ro.level, "relaxation level k >= 1")->required();
  relax->add_flag("--with-exact", ro.with_exact, "also solve exactly and report the gap");
  relax->add_option("--var-cap", ro.var_cap, "LP variable cap");

  OvercastOpts oo;
  CLI::App* over = sub("overcast", "decide overcast existence, with witness or certificate");
  over->add_option("A", oo.a_path, "source structure JSON")->required();
  over->add_option("B", oo.b_path, "target structure JSON")->required();
  over->add_option("--eps", oo.eps, "target scaled by 1/(1+eps) before the search");
  over->add_option("--map-cap", oo.map_cap, "cap on enumerated maps");

  DistanceOpts dso;
  CLI::App* dist = sub("distance", "two-sided opt-distance bound or edit distance");
  dist->add_option("A", dso.a_path, "first structure JSON")->required();
  dist->add_option("B", dso.b_path, "second structure JSON")->required();
  dist->add_option("--eps-list", dso.eps_list, "candidate epsilons, ascending");
  dist->add_flag("--edit", dso.edit, "minimize the normalized L1 edit distance instead");
  dist->add_option("--map-cap", dso.map_cap, "cap on enumerated maps");
  dist->add_option("--bijection-cap", dso.bijection_cap, "domain cap for edit minimization");

  ModulatorOpts mo;
  CLI::App* mod = sub("modulator", "build and verify a fractional modulator");
  mod->add_option("G", mo.g_path, "graph JSON (baker family)");
  mod->add_option("--family", mo.family, "baker or grid")->required();
  mod->add_option("--layers", mo.layers, "number of layers / slab classes")->required();
  mod->add_option("--roots", mo.roots, "baker: comma-separated roots, one per component");
  mod->add_option("--param", mo.param, "residual parameter: size, cc, tw, or td");
  mod->add_option("--d", mo.d, "grid: dimension (1-3)");
  mod->add_option("--side", mo.side, "grid: vertices per axis");
  mod->add_option("--axes", mo.axes, "grid: participating axes, e.g. 0,1");
  mod->add_option("-o", mo.artifact_path, "write the bare modulator JSON here");
  mod->add_option("-g", mo.graph_out, "also write the graph JSON here");

  PliableOpts po;
  CLI::App* pli = sub("pliable-approx", "fragile-to-pliable bundle for a verified modulator");
  pli->add_option("A", po.a_path, "structure JSON")->required();
  pli->add_option("pi", po.pi_path, "vertex modulator JSON for gaifman(A)")->required();
  pli->add_option("--r", po.r, "arity budget (default: the signature's max arity)");
  pli->add_option("-o", po.artifact_path, "write the bare bundle JSON here");

  ReduceOpts reo;
  CLI::App* red = sub("reduce", "bounded-size replacement with two-sided certificates");
  red->add_option("A", reo.a_path, "structure JSON")->required();
  red->add_option("--target", reo.target, "size or td")->required();
  red->add_option("--eps", reo.eps, "opt-distance budget p/q")->required();
  red->add_option("--d", reo.d, "size: component bound (default: largest component)");
  red->add_option("--td-cap", reo.td_cap, "td: treedepth computation cap");
  red->add_option("--support-cap", reo.support_cap, "overcast support cap");

  DenseOpts deo;
  CLI::App* den = sub("dense", "quotient approximations on weighted graphs");
  den->require_subcommand(1);
  const auto dense_common = [&](CLI::App* s) {
    s->fallthrough();
    s->add_option("G", deo.g_path, "weighted graph structure JSON")->required();
    s->add_option("--partition", deo.p_path, "partition JSON")->required();
  };
  dense_common(den->add_subcommand("quotient", "fold the graph onto the parts"));
  CLI::App* dhom = den->add_subcommand("homogeneity", "max pairwise defect");
  dense_common(dhom);
  dhom->add_option("--samples", deo.samples, "sampled lower bound instead of exact");
  dhom->add_option("--seed", deo.seed, "sampling seed");
  CLI::App* dcnt = den->add_subcommand("counting", "pattern-count window check");
  dense_common(dcnt);
  dcnt->add_option("--pattern", deo.pattern, "part pairs i-j,i-j (default: all)");
  dcnt->add_option("--map-cap", deo.map_cap, "cap on enumerated maps");
  CLI::App* dext = den->add_subcommand("extension", "pinned-window exception check");
  dense_common(dext);
  dext->add_option("--pattern", deo.pattern, "part pairs i-j,i-j (default: all)");
  dext->add_option("--ab", deo.ab, "pinned pair i-j")->required();
  dext->add_option("--map-cap", deo.map_cap, "cap on enumerated maps");
  CLI::App* dapx = den->add_subcommand("approx", "quotient overcast pipeline");
  dense_common(dapx);
  dapx->add_option("--eps0", deo.eps0, "quality parameter in (0,1)")->required();
  dapx->add_option("--map-cap", deo.map_cap, "cap on enumerated maps");
  dapx->add_option("--support-cap", deo.support_cap, "overcast support cap");

  PtasOpts pto;
  CLI::App* pta = sub("ptas", "approximation guarantee from a pliability witness");
  pta->add_option("A", pto.a_path, "structure JSON")->required();
  pta->add_option("C", pto.c_path, "target structure JSON")->required();
  pta->add_option("witness", pto.witness_path,
                  "bundle JSON (value mode) or modulator JSON (construct mode)")
      ->required();
  pta->add_option("--eps", pto.eps, "quality parameter p/q")->required();
  pta->add_option("--mode", pto.mode, "value or construct")->required();
  pta->add_option("--var-cap", pto.var_cap, "LP variable cap (value mode)");
  pta->add_option("--tw-cap", pto.tw_cap, "exact treewidth cap (value mode)");
  pta->add_option("--state-cap", pto.state_cap, "DP state cap (construct mode)");

  GenOpts go;
  CLI::App* gen = sub("gen", "instance generators and diagnostics");
  gen->require_subcommand(1);
  const auto gen_kind = [&](const char* name, const char* desc) {
    CLI::App* s = gen->add_subcommand(name, desc);
    s->fallthrough();
    s->add_option("-o", go.artifact_path, "write the bare instance JSON here");
    s->callback([&go, name] { go.kind = name; });
    return s;
  };
  CLI::App* ggr = gen_kind("grid", "grid structure");
  ggr->add_option("--d", go.d, "dimension (1-3)");
  ggr->add_option("--side", go.side, "vertices per axis")->required();
  gen_kind("clique", "complete graph structure")
      ->add_option("--n", go.n, "vertices")->required();
  gen_kind("path", "path structure")->add_option("--n", go.n, "vertices")->required();
  CLI::App* ggn = gen_kind("gnp", "Erdos-Renyi structure");
  ggn->add_option("--n", go.n, "vertices")->required();
  ggn->add_option("--p", go.p, "edge probability p/q")->required();
  ggn->add_option("--seed", go.seed, "RNG seed");
  CLI::App* gbi = gen_kind("bipartite", "random bipartite structure");
  gbi->add_option("--a", go.a, "left side size")->required();
  gbi->add_option("--b", go.b, "right side size")->required();
  gbi->add_option("--density", go.density, "edge probability p/q")->required();
  gbi->add_option("--seed", go.seed, "RNG seed");
  CLI::App* gto = gen_kind("tournament", "random tournament structure");
  gto->add_option("--n", go.n, "vertices")->required();
  gto->add_option("--seed", go.seed, "RNG seed");
  gen_kind("triangle_glued", "apex-per-edge gluing of a base structure")
      ->add_option("base", go.base_path, "base structure JSON")->required();
  CLI::App* gha = gen_kind("hardness", "rainbow-clique gadget pair from a colored graph");
  gha->add_option("G", go.base_path, "graph JSON")->required();
  gha->add_option("--colors", go.colors, "per-vertex colors c0,c1,...")->required();
  gha->add_option("--seed", go.seed, "orientation seed");
  CLI::App* gpr = gen_kind("probe", "self-map non-pliability probe");
  gpr->add_option("A", go.base_path, "structure JSON")->required();
  gpr->add_option("--eps", go.eps, "separation threshold p/q")->required();
  gpr->add_option("--k", go.k, "component bound on the image")->required();
  gpr->add_option("--map-cap", go.map_cap, "cap on enumerated self-maps");

  std::string lp_path;
  CLI::App* lpc = sub("lp", "exact rational linear programming");
  lpc->require_subcommand(1);
  CLI::App* lps = lpc->add_subcommand("solve", "solve an LP file");
  lps->fallthrough();
  lps->add_option("lp", lp_path, "LP JSON")->required();

  try {
    // CLI11 consumes std::vector arguments back to front.
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    json outputs;
    if (app.got_subcommand(solve)) {
      ctx.command = "solve";
      outputs = run_solve(ctx, so);
    } else if (app.got_subcommand(relax)) {
      ctx.command = "relax";
      outputs = run_relax(ctx, ro);
    } else if (app.got_subcommand(over)) {
      ctx.command = "overcast";
      outputs = run_overcast(ctx, oo);
    } else if (app.got_subcommand(dist)) {
      ctx.command = "distance";
      outputs = run_distance(ctx, dso);
    } else if (app.got_subcommand(mod)) {
      ctx.command = "modulator";
      outputs = run_modulator(ctx, mo);
    } else if (app.got_subcommand(pli)) {
      ctx.command = "pliable-approx";
      outputs = run_pliable(ctx, po);
    } else if (app.got_subcommand(red)) {
      ctx.command = "reduce";
      outputs = run_reduce(ctx, reo);
    } else if (app.got_subcommand(den)) {
      deo.mode = den->get_subcommands().at(0)->get_name();
      ctx.command = "dense " + deo.mode;
      outputs = run_dense(ctx, deo);
    } else if (app.got_subcommand(pta)) {
      ctx.command = "ptas";
      outputs = run_ptas(ctx, pto);
    } else if (app.got_subcommand(gen)) {
      ctx.command = "gen " + go.kind;
      outputs = run_gen(ctx, go);
    } else if (app.got_subcommand(lpc)) {
      ctx.command = "lp solve";
      outputs = run_lp(ctx, lp_path);
    }
    emit(ctx, std::move(outputs), out);
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return static_cast<int>(e.kind);
  }
}

} // namespace maxhom
