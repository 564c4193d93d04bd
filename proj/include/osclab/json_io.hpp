#pragma once

// JSON descriptors for measures and functions, plus the experiment manifest.
//
// Measure descriptor forms:
//   {"dim":1,"atoms":[[[1],1.0],[[-1],1.0],[[0],-2.0]],"sphere":null}
//   {"name":"sym2","dim":1}          (sym1 | sym2 | sphere_minus_delta)
//   {"classical":3}
//   {"general":{"points":[[1],[−1]],"weights":[1,-1]}}
// Function descriptor:
//   {"kind":"weierstrass","b":2.0,"alpha":0.5,"eval_tol":1e-10}

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "osclab/funcspace.hpp"
#include "osclab/measure.hpp"
#include "osclab/version.hpp"

namespace osclab {

using nlohmann::json;

inline SignedMeasure measure_from_json(const json& j) {
  if (j.contains("classical")) return make_classical(j.at("classical").get<int>());
  if (j.contains("name")) {
    const std::string name = j.at("name").get<std::string>();
    const int dim = j.value("dim", 1);
    if (name == "sym1") return make_named(NamedMeasure::sym1, dim);
    if (name == "sym2") return make_named(NamedMeasure::sym2, dim);
    if (name == "sphere_minus_delta")
      return make_named(NamedMeasure::sphere_minus_delta, dim);
    throw std::runtime_error("measure descriptor: unknown name '" + name + "'");
  }
  if (j.contains("general")) {
    const auto& g = j.at("general");
    return make_general(g.at("points").get<std::vector<std::vector<double>>>(),
                        g.at("weights").get<std::vector<double>>());
  }
  const int dim = j.value("dim", 1);
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.is_array() || a.size() != 2)
      throw std::runtime_error("measure descriptor: atom must be [[coords], w]");
    atoms.push_back({a.at(0).get<std::vector<double>>(), a.at(1).get<double>()});
  }
  std::optional<SphereComponent> sphere;
  if (j.contains("sphere") && !j.at("sphere").is_null()) {
    sphere = SphereComponent{j.at("sphere").value("radius", 1.0),
                             j.at("sphere").value("weight", 1.0)};
  }
  int declared = -1;
  if (j.contains("declared_moment_order"))
    declared = j.at("declared_moment_order").get<int>();
  else {
    // infer by checking increasing orders
    SignedMeasure probe(dim, atoms, sphere, -1);
    for (int order = 0; order <= 8; ++order) {
      if (!check_vanishing(probe, order).pass) break;
      declared = order;
    }
  }
  return SignedMeasure(dim, std::move(atoms), sphere, declared);
}

inline FunctionSpec function_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.value("dim", 1);
  const double tol = j.value("eval_tol", 1e-10);
  if (kind == "weierstrass")
    return FunctionSpec::weierstrass(j.at("b").get<double>(),
                                     j.at("alpha").get<double>(), tol, dim);
  if (kind == "zygmund_weierstrass")
    return FunctionSpec::zygmund_weierstrass(j.at("b").get<double>(), tol, dim);
  if (kind == "smoothed_weierstrass")
    return FunctionSpec::smoothed_weierstrass(j.at("b").get<double>(),
                                              j.at("alpha").get<double>(),
                                              j.at("m").get<int>(), tol, dim);
  if (kind == "cusp") return FunctionSpec::cusp(j.at("alpha").get<double>(), dim);
  if (kind == "polynomial")
    return FunctionSpec::polynomial(j.at("coeffs").get<std::vector<double>>(), dim);
  if (kind == "bump")
    return FunctionSpec::bump(j.at("center").get<double>(),
                              j.at("width").get<double>(), dim);
  if (kind == "hat")
    return FunctionSpec::hat(j.at("center").get<double>(),
                             j.at("width").get<double>(), dim);
  if (kind == "sampled")
    return FunctionSpec::sampled(j.at("grid").get<std::vector<double>>(),
                                 j.at("values").get<std::vector<double>>(), dim);
  throw std::runtime_error("function descriptor: unknown kind '" + kind + "'");
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline SignedMeasure load_measure(const std::string& path) {
  return measure_from_json(load_json_file(path));
}

inline FunctionSpec load_function(const std::string& path) {
  return function_from_json(load_json_file(path));
}

// FNV-1a of the canonical config dump, for the manifest.
inline std::string config_hash(const json& config) {
  const std::string s = config.dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Every experiment writes <out>.manifest.json with the config echo, its
// hash, and the library version.
inline void write_manifest(const std::string& out_path, const json& config) {
  json m;
  m["config"] = config;
  m["config_hash"] = config_hash(config);
  m["version"] = kVersion;
  std::ofstream out(out_path + ".manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest for " + out_path);
  out << m.dump(2) << "\n";
}

}  // namespace osclab
