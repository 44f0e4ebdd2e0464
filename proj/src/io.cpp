#include "ttade/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ttade::io {

namespace {

mpq_class rational_from_json(const json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.empty()) throw Error(ErrorKind::BadInput, "empty matrix entry");
    if (s.front() == '+') s.erase(0, 1);
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw Error(ErrorKind::BadInput, "bad rational '" + v.get<std::string>() + "'");
    if (q.get_den() == 0) throw Error(ErrorKind::BadInput, "zero denominator");
    q.canonicalize();
    return q;
  }
  if (v.is_number_integer()) return mpq_class(v.get<long>());
  if (v.is_number()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(ErrorKind::BadInput, "non-finite matrix entry");
    return mpq_class(d);
  }
  throw Error(ErrorKind::BadInput, "matrix entries must be numbers or rational strings");
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::BadInput, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadInput, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::BadInput, "cannot write " + path);
  f << text;
}

Spectrum spectrum_from_json(const json& j) {
  const json& u = j.is_object() ? j.at("u") : j;
  if (!u.is_array() || u.empty()) throw Error(ErrorKind::BadInput, "spectrum needs a non-empty array u");
  Spectrum s;
  for (const auto& e : u) {
    if (e.is_number()) {
      s.u.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      s.u.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      throw Error(ErrorKind::BadInput, "spectrum entries are [re, im] pairs");
    }
  }
  return s;
}

json to_json(const Spectrum& s) {
  json u = json::array();
  for (const auto& z : s.u) u.push_back({z.real(), z.imag()});
  return json{{"u", u}};
}

RationalMatrix matrix_from_json(const json& j) {
  const json& a = j.is_object() ? j.at("matrix") : j;
  if (!a.is_array() || a.empty()) throw Error(ErrorKind::BadInput, "matrix must be a non-empty array");
  std::vector<mpq_class> flat;
  std::size_t n = 0;
  if (a[0].is_array()) {
    n = a.size();
    for (const auto& row : a) {
      if (!row.is_array() || row.size() != n) throw Error(ErrorKind::BadInput, "matrix must be square");
      for (const auto& v : row) flat.push_back(rational_from_json(v));
    }
  } else {
    n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(a.size()))));
    if (n * n != a.size()) throw Error(ErrorKind::BadInput, "flat matrix length is not a square");
    for (const auto& v : a) flat.push_back(rational_from_json(v));
  }
  RationalMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) m(i, k) = flat[i * n + k];
  return m;
}

json to_json(const RationalMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.n(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < m.n(); ++k) r.push_back(m(i, k).get_str());
    rows.push_back(r);
  }
  return rows;
}

BraidWord word_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::BadInput, "braid word must be an array");
  BraidWord w;
  for (const auto& g : j) {
    if (g.contains("sign")) {
      SignVector e;
      for (const auto& v : g.at("sign")) {
        const int s = v.get<int>();
        if (s != 1 && s != -1) throw Error(ErrorKind::BadInput, "sign entries must be +-1");
        e.push_back(s);
      }
      w.push_back(Generator::sign(e));
    } else if (g.contains("move")) {
      w.push_back(Generator::move(g.at("move").get<int>(), g.value("inverse", false)));
    } else {
      throw Error(ErrorKind::BadInput, "unknown braid generator");
    }
  }
  return w;
}

json to_json(const BraidWord& w) {
  json a = json::array();
  for (const auto& g : w) {
    if (g.kind == Generator::Kind::Sign) {
      a.push_back(json{{"sign", g.eps}});
    } else if (g.inverse) {
      a.push_back(json{{"move", g.l}, {"inverse", true}});
    } else {
      a.push_back(json{{"move", g.l}});
    }
  }
  return a;
}

json to_json(const RayArrangement& a) {
  auto ray = [](const Ray& r) { return json{{"angle", r.angle}, {"pair", {r.j, r.l}}}; };
  json rays = json::array(), sep = json::array();
  for (const auto& r : a.rays) rays.push_back(ray(r));
  for (std::size_t k = 0; k < a.separating.size(); ++k) {
    json s = ray(a.separating[k]);
    s["theta"] = a.theta[k];
    sep.push_back(s);
  }
  return json{{"rays", rays}, {"separating", sep}, {"m", a.m}};
}

json to_json(cplx z) { return json{z.real(), z.imag()}; }

json to_json(const CMat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(to_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

json to_json(const CertificateReport& r) {
  json j{{"verdict", verdict_name(r.verdict)},
         {"route", r.route},
         {"detail", r.detail},
         {"delta", r.delta},
         {"samples", r.samples},
         {"kernel", r.kernel}};
  if (r.samples > 0) {
    j["worst_min_eig"] = r.worst_min_eig;
    j["worst_x"] = r.worst_x;
    j["worst_mu"] = to_json(r.worst_mu);
    j["worst_side"] = r.worst_side;
  }
  j["scope"] = "positivity verified on the sampled x grid or by an analytic bound; no claim beyond that";
  return j;
}

json to_json(const FMinResult& r) {
  return json{{"min", r.min},
              {"argmin", r.argmin},
              {"attained_on_boundary", r.attained_on_boundary},
              {"grid_min", r.grid_min},
              {"grid_argmin", r.grid_argmin},
              {"grid_points", r.grid_points},
              {"refine_sweeps", r.refine_sweeps},
              {"kernel", r.kernel}};
}

json to_json(const ResidualReport& r) {
  return json{{"jump", r.jump},           {"normalization", r.normalization}, {"sym_reflect", r.sym_reflect},
              {"sym_conj", r.sym_conj},   {"hermitian", r.hermitian},         {"orthogonal", r.orthogonal},
              {"det", r.det},             {"min_eig", r.min_eig},             {"cholesky_ok", r.cholesky_ok}};
}

json to_json(const NumericStokesReport& r) {
  json f = json::array();
  for (const auto& k : r.factors)
    f.push_back(json{{"index", k.index},
                     {"pair", {k.a, k.b}},
                     {"value", to_json(k.value)},
                     {"shifted_gap", k.shifted_gap}});
  json S = json::array();
  for (int i = 0; i < r.S_rec.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < r.S_rec.cols(); ++k) row.push_back(r.S_rec(i, k));
    S.push_back(row);
  }
  return json{{"x", r.x},
              {"r_start", r.r_start},
              {"margin", r.margin},
              {"series_error", r.factors.empty() ? 0.0 : r.factors.front().series_error},
              {"factors", f},
              {"S_rec", S},
              {"imag_max", r.imag_max},
              {"halfturn_gap", r.halfturn_gap}};
}

json to_json(const IsoReport& r) {
  json per = json::array();
  for (const auto& p : r.per_x) per.push_back(to_json(p));
  json j{{"deviation", r.deviation}, {"halfturn_ok", r.halfturn_ok}, {"pass", r.pass}};
  if (r.input_gap >= 0) j["input_gap"] = r.input_gap;
  j["per_factor"] = per;
  return j;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

json to_json(const Provenance& p) {
  json in = json::object(), tol = json::object();
  for (const auto& [k, v] : p.inputs) in[k] = v;
  for (const auto& [k, v] : p.tolerances) tol[k] = v;
  return json{{"tool", "ttade"}, {"version", "0.1.0"}, {"command", p.command}, {"inputs", in}, {"tolerances", tol},
              {"kernel", p.kernel}};
}

std::string dump(const json& j, int indent) { return j.dump(indent) + "\n"; }

void write_curve_csv(std::ostream& os, const MetricCurve& curve, const Provenance& prov) {
  os << "# " << to_json(prov).dump() << "\n";
  os << "# delta " << fmt(curve.delta) << "\n";
  const int n = static_cast<int>(curve.spec.n());
  os << "x";
  for (const char* tag : {"G", "L"})
    for (int i = 1; i <= n; ++i)
      for (int k = 1; k <= n; ++k) os << "," << tag << i << k << "_re," << tag << i << k << "_im";
  os << ",jump,normalization,sym_reflect,sym_conj,hermitian,orthogonal,det,min_eig,method,nodes\n";
  for (const auto& p : curve.pts) {
    os << fmt(p.x);
    for (const CMat* M : {&p.G, &p.GinvGx})
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) os << "," << fmt((*M)(i, k).real()) << "," << fmt((*M)(i, k).imag());
    const auto& r = p.res;
    for (double v : {r.jump, r.normalization, r.sym_reflect, r.sym_conj, r.hermitian, r.orthogonal, r.det, r.min_eig})
      os << "," << fmt(v);
    os << "," << p.method << "," << p.nodes << "\n";
  }
}

MetricCurve read_curve_csv(std::istream& is, const Spectrum& spec, const RMat& S) {
  MetricCurve c;
  c.spec = spec;
  c.S = S;
  const int n = static_cast<int>(spec.n());
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# delta ", 0) == 0) c.delta = std::stod(line.substr(8));
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const std::size_t need = 1 + 4 * n * n;
    if (cells.size() < need) throw Error(ErrorKind::BadInput, "curve row has too few columns for n = " + std::to_string(n));
    CurvePoint p;
    std::size_t k = 0;
    try {
      p.x = std::stod(cells[k++]);
      p.G.resize(n, n);
      p.GinvGx.resize(n, n);
      for (CMat* M : {&p.G, &p.GinvGx})
        for (int i = 0; i < n; ++i)
          for (int q = 0; q < n; ++q) {
            const double re = std::stod(cells[k++]);
            (*M)(i, q) = cplx(re, std::stod(cells[k++]));
          }
      double* r[] = {&p.res.jump, &p.res.normalization, &p.res.sym_reflect, &p.res.sym_conj,
                     &p.res.hermitian, &p.res.orthogonal, &p.res.det, &p.res.min_eig};
      for (double* v : r)
        if (k < cells.size()) *v = std::stod(cells[k++]);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::BadInput, "malformed number in curve row");
    }
    if (k < cells.size()) p.method = cells[k++];
    if (k < cells.size()) p.nodes = std::stoi(cells[k++]);
    c.pts.push_back(std::move(p));
  }
  if (!header) throw Error(ErrorKind::BadInput, "curve file has no header row");
  return c;
}

}  // namespace ttade::io
