#pragma once

#include <string>

#include <json.hpp>

#include "maxhom/dense.hpp"
#include "maxhom/fragility.hpp"
#include "maxhom/graphs.hpp"
#include "maxhom/lp.hpp"
#include "maxhom/overcast.hpp"
#include "maxhom/ptas.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

// Key order is part of the format: serializers build objects in a fixed
// order and parsers reject malformed shapes with usage errors, so a file
// written here reads back bit-exact.
using json = nlohmann::ordered_json;

// {"signature":[{"name":"e","arity":2}],"domain":["a","b"],
//  "values":{"e":[{"tuple":["a","b"],"value":"1/1"},...]}}
// Tuples name elements; every stored value must be strictly positive.
json structure_to_json(const ValuedStructure& A);
ValuedStructure structure_from_json(const json& j);

// {"vertices":[...],"edges":[["a","b"],...],"vertex_weights":{"a":"2/1"},
//  "edge_weights":{"0":"1/2"}}. Edge weights are keyed by the index of the
// edge in the edges array, since vertex names may contain any character.
json graph_to_json(const Graph& g);
Graph graph_from_json(const json& j);

// [{"map":{"a":"x",...},"prob":"1/2"},...]; every element of A must be
// mapped to an element of B.
json overcast_to_json(const Overcast& w, const ValuedStructure& A,
                      const ValuedStructure& B);
Overcast overcast_from_json(const json& j, const ValuedStructure& A,
                            const ValuedStructure& B);

// {"parts":[["a","b"],["c"]]}
json partition_to_json(const Partition& P, const ValuedStructure& G);
Partition partition_from_json(const json& j, const ValuedStructure& G);

// {"kind":"vertex","param":"tw","bound":2,"thinness":"1/3",
//  "support":[{"set":["a"],"prob":"1/2"},...]}; edge modulators list the
// sets as [["a","b"],...] pairs.
json modulator_to_json(const FractionalModulator& pi, const Graph& g);
FractionalModulator modulator_from_json(const json& j, const Graph& g);

// {"B":structure,"omega":overcast,"omega_prime":overcast,
//  "factor":"p/q","loss_bound":"p/q"}; omega maps A into B and omega_prime
// maps B back. witness_from_json reads the same shape (the extra keys are
// ignored), so a saved bundle feeds the approximation pipeline directly.
json bundle_to_json(const PliableBundle& b, const ValuedStructure& A);
PliabilityWitness witness_from_json(const json& j, const ValuedStructure& A);

// {"num_vars":2,"sense":"max","objective":{"0":"1/1"},
//  "rows":[{"coeffs":{"0":"1/1","1":"2/1"},"sense":"<=","rhs":"3/1"}],
//  "nonneg":[true,true],"var_names":["x","y"]} — the last two optional.
json lp_to_json(const LinearProgram& lp);
LinearProgram lp_from_json(const json& j);
json lp_outcome_to_json(const LPOutcome& o);

// File plumbing. Reading problems (missing file, bad JSON) are usage
// errors, matching exit code 2 at the CLI boundary.
json load_json(const std::string& path);
void save_json(const json& j, const std::string& path);

// 64-bit FNV-1a, lowercase hex; used to fingerprint CLI inputs.
std::string fnv1a_hex(const std::string& bytes);
std::string file_fnv1a(const std::string& path);

} // namespace maxhom
