#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "json.hpp"
#include "ttade/braid_action.hpp"
#include "ttade/isomonodromy.hpp"
#include "ttade/rh_kernel.hpp"
#include "ttade/rh_solver.hpp"

namespace ttade::io {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path);
json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// {"u": [[re, im], ...]}; bare numbers are read as real entries.
Spectrum spectrum_from_json(const json& j);
json to_json(const Spectrum& s);

// Row-major rationals, nested rows or a flat n*n list; strings ("3/2") or numbers.
// An object with a "matrix" member is unwrapped.
RationalMatrix matrix_from_json(const json& j);
json to_json(const RationalMatrix& m);

// [{"sign": [1,-1,...]} | {"move": l} | {"move": l, "inverse": true}]
BraidWord word_from_json(const json& j);
json to_json(const BraidWord& w);

json to_json(const RayArrangement& a);
json to_json(cplx z);
json to_json(const CMat& m);

json to_json(const CertificateReport& r);
json to_json(const FMinResult& r);
json to_json(const ResidualReport& r);
json to_json(const NumericStokesReport& r);
json to_json(const IsoReport& r);

std::uint64_t fnv1a(const std::string& data);
std::string hex64(std::uint64_t h);

// Provenance block shared by every artifact.
struct Provenance {
  std::string command;
  std::map<std::string, std::string> inputs;  // name -> content hash
  std::map<std::string, double> tolerances;
  std::string kernel;
};
json to_json(const Provenance& p);

// Deterministic dump: fixed key order, shortest round-trip doubles.
std::string dump(const json& j, int indent);

// CSV: '#' provenance lines, a header row, then x, Re/Im of G row-major,
// Re/Im of G^{-1}G_x row-major and the per-x residuals.
void write_curve_csv(std::ostream& os, const MetricCurve& curve, const Provenance& prov);
MetricCurve read_curve_csv(std::istream& is, const Spectrum& spec, const RMat& S);

}  // namespace ttade::io
