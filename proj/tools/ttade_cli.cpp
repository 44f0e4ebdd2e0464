#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ttade/ade_catalog.hpp"
#include "ttade/io.hpp"
#include "ttade/isomonodromy.hpp"
#include "ttade/rh_kernel.hpp"
#include "ttade/rh_solver.hpp"
#include "ttade/simd.hpp"

using namespace ttade;
using io::json;

namespace {

enum Exit { kOk = 0, kBadInput = 1, kSolveFailure = 2, kCertRefused = 3, kVerifyFailed = 4 };

struct Config {
  double tol_angle = 1e-12;
  double tol_jump = 1e-10;
  double tol_iso = 1e-4;
  double tol_sym = 1e-8;
  std::uint64_t seed = 0;
  int indent = 2;

  std::string spectrum, matrix, target, curve, out, out_dir, family = "E8", method = "auto";
  bool strict = false, analytic_only = false, permuted = false, force = false, stokes = false;
  double jitter = 0.0;
  int bound = 8;
  double step = 0.05;
  double x_min = 0.5, x_max = 5.0;
  int x_count = 41;
  double h = 0.05;
  int verify_points = 2;
  int cert_x_count = 25;
  int stencil = 4;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::CertificationMissing:
      return kCertRefused;
    case ErrorKind::SolveFailure:
    case ErrorKind::StiffnessFailure:
    case ErrorKind::SingularMetric:
    case ErrorKind::NearContour:
      return kSolveFailure;
    case ErrorKind::StructureViolation:
      return kVerifyFailed;
    default:
      return kBadInput;
  }
}

io::Provenance provenance(const Config& c, const std::string& command) {
  io::Provenance p;
  p.command = command;
  for (const auto& [name, path] : {std::pair{"spectrum", c.spectrum}, {"matrix", c.matrix}, {"target", c.target},
                                   {"curve", c.curve}})
    if (!path.empty()) p.inputs[name] = io::hex64(io::fnv1a(io::read_file(path)));
  p.tolerances = {{"angle", c.tol_angle}, {"jump", c.tol_jump}, {"iso", c.tol_iso}, {"sym", c.tol_sym}};
  p.kernel = simd::isa_name(simd::active_isa());
  return p;
}

void emit(const Config& c, const json& j) {
  const std::string text = io::dump(j, c.indent);
  if (c.out.empty())
    std::cout << text;
  else
    io::write_text(c.out, text);
}

Spectrum load_spectrum(const Config& c) {
  if (c.spectrum.empty()) throw Error(ErrorKind::BadInput, "--spectrum is required");
  return io::spectrum_from_json(io::read_json(c.spectrum));
}

RationalMatrix load_matrix(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::BadInput, "matrix path is required");
  return io::matrix_from_json(io::read_json(path));
}

RMat load_unitriangular(const Config& c, std::size_t n) {
  const RationalMatrix S = load_matrix(c.matrix);
  if (!S.is_unitriangular()) throw Error(ErrorKind::NotUnitriangular, "Stokes matrix must be upper unitriangular");
  if (S.n() != n) throw Error(ErrorKind::BadInput, "matrix size does not match the spectrum");
  return to_real(S);
}

// Perturbs a spectrum until the rays are pairwise distinct; scale is relative to the spread.
Spectrum jittered(Spectrum s, double scale, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  double spread = 0;
  for (const auto& a : s.u)
    for (const auto& b : s.u) spread = std::max(spread, std::abs(a - b));
  std::normal_distribution<double> N(0.0, scale * std::max(spread, 1.0));
  for (int attempt = 0; attempt < 100 && !check_pd(s, tol); ++attempt)
    for (auto& z : s.u) z += cplx(N(rng), N(rng));
  return s;
}

SolverOptions solver_options(const Config& c) {
  SolverOptions o;
  o.h = c.h;
  o.tol_jump = c.tol_jump;
  o.force = c.force;
  if (c.method == "direct")
    o.method = SolverOptions::Method::Direct;
  else if (c.method == "neumann")
    o.method = SolverOptions::Method::Neumann;
  else if (c.method != "auto")
    throw Error(ErrorKind::BadInput, "--method is auto, direct or neumann");
  return o;
}

std::vector<int> spread_indices(int count, int k) {
  std::vector<int> idx;
  if (k <= 0 || k >= count) {
    for (int i = 0; i < count; ++i) idx.push_back(i);
    return idx;
  }
  for (int i = 0; i < k; ++i) {
    const int v = k == 1 ? 0 : static_cast<int>(std::lround(static_cast<double>(i) * (count - 1) / (k - 1)));
    if (idx.empty() || idx.back() != v) idx.push_back(v);
  }
  return idx;
}

int cmd_rays(const Config& c) {
  Spectrum s = load_spectrum(c);
  check_db(s);
  if (c.jitter > 0) s = jittered(s, c.jitter, c.seed, c.tol_angle);
  GeometryTolerances tol{c.tol_angle, 1e-12};
  const auto perm = admissible_order(s, std::nullopt, c.tol_angle);
  const Spectrum ordered = reorder(s, perm);
  json j{{"provenance", io::to_json(provenance(c, "rays"))}};
  j["spectrum"] = io::to_json(s);
  j["pd"] = check_pd(s, c.tol_angle);
  j["admissible_order"] = perm;
  j["ordered"] = io::to_json(ordered);
  j["delta"] = choose_delta(ordered);
  j["arrangement"] = io::to_json(stokes_rays(ordered, c.strict, tol));
  j["full_turn_word"] = io::to_json(full_turn_word(ordered, tol));
  emit(c, j);
  return kOk;
}

int cmd_orbit(const Config& c) {
  const RationalMatrix S = load_matrix(c.matrix);
  json j{{"provenance", io::to_json(provenance(c, "orbit"))}};
  if (c.stokes) {
    const Spectrum s = load_spectrum(c);
    const auto data = stokes_data(S, s, GeometryTolerances{c.tol_angle, 1e-12});
    json ms = json::array();
    for (const auto& m : data.matrices) ms.push_back(io::to_json(m));
    j["stokes_data"] = ms;
    j["distinct"] = data.matrices.size();
    j["raw_count"] = data.raw_count;
    emit(c, j);
    return kOk;
  }
  const RationalMatrix T = load_matrix(c.target);
  OrbitSearchStats st;
  const auto w = orbit_search(S, T, c.bound, &st);
  j["found"] = w.has_value();
  j["word"] = w ? io::to_json(*w) : json(nullptr);
  j["visited"] = st.visited;
  j["depth_reached"] = st.depth_reached;
  j["charge_mismatch"] = st.charge_mismatch;
  emit(c, j);
  return w ? kOk : kVerifyFailed;
}

int cmd_detect(const Config& c) {
  const RationalMatrix S = load_matrix(c.matrix);
  OrbitSearchStats st;
  const auto d = detect_ade(S, c.bound, c.permuted, &st);
  json j{{"provenance", io::to_json(provenance(c, "detect-ade"))}};
  j["type"] = d ? json(d->type.name()) : json(nullptr);
  j["witness_word"] = d ? io::to_json(d->witness) : json(nullptr);
  j["visited"] = st.visited;
  emit(c, j);
  return d ? kOk : kVerifyFailed;
}

int cmd_charges(const Config& c) {
  const RationalMatrix S = load_matrix(c.matrix);
  json j{{"provenance", io::to_json(provenance(c, "charges"))}};
  json ch = json::array(), poly = json::array();
  for (const auto& z : charges(S)) ch.push_back(io::to_json(z));
  for (const auto& q : charge_polynomial(S)) poly.push_back(q.get_str());
  j["charges"] = ch;
  j["charge_polynomial"] = poly;
  emit(c, j);
  return kOk;
}

int cmd_certify(const Config& c) {
  const Spectrum s = load_spectrum(c);
  const RMat S = load_unitriangular(c, s.n());
  CertifyOptions o;
  o.analytic_only = c.analytic_only;
  o.x_count = c.cert_x_count;
  const auto rep = positivity_certificate(s, S, o);
  json j{{"provenance", io::to_json(provenance(c, "certify"))}};
  j["report"] = io::to_json(rep);
  emit(c, j);
  return rep.verdict == Verdict::CertifiedAnalytic || rep.verdict == Verdict::CertifiedSampled ? kOk : kCertRefused;
}

int cmd_minimize(const Config& c) {
  const auto r = f_minimize(parse_efamily(c.family), c.step);
  json j{{"provenance", io::to_json(provenance(c, "minimize-f"))}};
  j["family"] = efamily_name(parse_efamily(c.family));
  j["variables"] = f_variable_names(parse_efamily(c.family));
  j["result"] = io::to_json(r);
  emit(c, j);
  std::cerr << efamily_name(parse_efamily(c.family)) << " min " << r.min << " (" << r.seconds << " s)\n";
  return kOk;
}

struct SolveOutcome {
  MetricCurve curve;
  json summary;
  bool pass = false;
};

SolveOutcome run_solve(const Config& c, const Spectrum& s, const RMat& S) {
  SolveOutcome o;
  o.curve = metric_curve(s, S, log_grid(c.x_min, c.x_max, c.x_count), solver_options(c));
  ResidualReport worst;
  worst.min_eig = INFINITY;
  bool chol = true;
  for (const auto& p : o.curve.pts) {
    const auto& r = p.res;
    worst.jump = std::max(worst.jump, r.jump);
    worst.normalization = std::max(worst.normalization, r.normalization);
    worst.sym_reflect = std::max(worst.sym_reflect, r.sym_reflect);
    worst.sym_conj = std::max(worst.sym_conj, r.sym_conj);
    worst.hermitian = std::max(worst.hermitian, r.hermitian);
    worst.orthogonal = std::max(worst.orthogonal, r.orthogonal);
    worst.det = std::max(worst.det, r.det);
    worst.min_eig = std::min(worst.min_eig, r.min_eig);
    chol = chol && r.cholesky_ok;
  }
  worst.cholesky_ok = chol;
  o.summary["points"] = o.curve.pts.size();
  o.summary["delta"] = o.curve.delta;
  o.summary["worst"] = io::to_json(worst);
  o.pass = worst.jump < c.tol_jump && worst.sym_reflect < c.tol_sym && worst.sym_conj < c.tol_sym &&
           worst.orthogonal < c.tol_sym && worst.det < c.tol_jump && chol;
  if (static_cast<int>(o.curve.pts.size()) >= std::max(5, c.stencil + 1)) {
    const auto tt = tt_residual(o.curve, c.stencil);
    o.summary["tt_residual"] = {{"residual", tt.residual},
                                {"residual_fd", tt.residual_fd},
                                {"gx_gap", tt.gx_gap},
                                {"order", tt.order},
                                {"interior", tt.interior}};
  }
  o.summary["pass"] = o.pass;
  return o;
}

int cmd_solve(const Config& c) {
  const Spectrum s = load_spectrum(c);
  const RMat S = load_unitriangular(c, s.n());
  auto o = run_solve(c, s, S);
  const auto prov = provenance(c, "solve");
  if (!c.out.empty()) {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::BadInput, "cannot write " + c.out);
    io::write_curve_csv(f, o.curve, prov);
  }
  json j{{"provenance", io::to_json(prov)}, {"summary", o.summary}};
  std::cout << io::dump(j, c.indent);
  return o.pass ? kOk : kVerifyFailed;
}

IsoOptions iso_options(const Config& c) {
  IsoOptions o;
  o.tol_iso = c.tol_iso;
  return o;
}

int cmd_verify(const Config& c) {
  const Spectrum s = load_spectrum(c);
  const RMat S = load_unitriangular(c, s.n());
  if (c.curve.empty()) throw Error(ErrorKind::BadInput, "--curve is required");
  std::ifstream f(c.curve);
  if (!f) throw Error(ErrorKind::BadInput, "cannot open " + c.curve);
  const MetricCurve curve = io::read_curve_csv(f, s, S);
  const auto rep = verify_isomonodromy(curve, spread_indices(static_cast<int>(curve.pts.size()), c.verify_points),
                                       iso_options(c));
  json j{{"provenance", io::to_json(provenance(c, "verify"))}};
  const json body = io::to_json(rep);
  for (const auto& [k, v] : body.items()) j[k] = v;
  emit(c, j);
  return rep.pass ? kOk : kVerifyFailed;
}

int cmd_pipeline(const Config& c) {
  const Spectrum s = load_spectrum(c);
  const RMat S = load_unitriangular(c, s.n());
  const std::filesystem::path dir = c.out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out_dir);
  std::filesystem::create_directories(dir);
  const auto prov = provenance(c, "pipeline");
  json report{{"provenance", io::to_json(prov)}};

  CertifyOptions co;
  co.analytic_only = c.analytic_only;
  co.x_count = c.cert_x_count;
  const auto cert = positivity_certificate(s, S, co);
  report["certificate"] = io::to_json(cert);
  auto finish = [&](int code, const std::string& stage) {
    report["stage"] = stage;
    report["exit_code"] = code;
    io::write_text((dir / "report.json").string(), io::dump(report, c.indent));
    std::cout << io::dump(report, c.indent);
    return code;
  };
  if ((cert.verdict == Verdict::Refuted || cert.verdict == Verdict::Inconclusive) && !c.force)
    return finish(kCertRefused, "certify");

  SolveOutcome o;
  try {
    o = run_solve(c, s, S);
  } catch (const Error& e) {
    report["error"] = e.what();
    return finish(exit_code(e.kind()), "solve");
  }
  {
    std::ofstream f(dir / "curve.csv", std::ios::binary);
    io::write_curve_csv(f, o.curve, prov);
  }
  report["solve"] = o.summary;
  if (!o.pass) return finish(kVerifyFailed, "solve");

  try {
    const auto iso = verify_isomonodromy(o.curve, spread_indices(static_cast<int>(o.curve.pts.size()), c.verify_points),
                                         iso_options(c));
    report["verify"] = io::to_json(iso);
    return finish(iso.pass ? kOk : kVerifyFailed, "verify");
  } catch (const Error& e) {
    report["error"] = e.what();
    return finish(exit_code(e.kind()), "verify");
  }
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"ttade: Stokes data, ADE detection, positivity certificates and tt* metrics"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol-angle", c.tol_angle, "angle tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-jump", c.tol_jump, "jump residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-iso", c.tol_iso, "isomonodromy tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-sym", c.tol_sym, "symmetry and metric tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "seed for randomized steps");
  app.add_option("--json-indent", c.indent, "JSON indent, -1 for compact");

  std::function<int()> run;
  auto sub = [&](const char* name, const char* help, std::function<int()> fn) {
    auto* s = app.add_subcommand(name, help);
    s->callback([&run, fn] { run = fn; });
    return s;
  };

  auto* rays = sub("rays", "Stokes rays, separating rays, delta and the full-turn word", [&] { return cmd_rays(c); });
  rays->add_option("--spectrum", c.spectrum)->required();
  rays->add_flag("--strict", c.strict, "reject non-generic rays");
  rays->add_option("--jitter", c.jitter, "perturb coincident rays by this relative scale");
  rays->add_option("--out", c.out);

  auto* orbit = sub("orbit", "bounded braid orbit search or Stokes data", [&] { return cmd_orbit(c); });
  orbit->add_option("--matrix", c.matrix)->required();
  orbit->add_option("--target", c.target);
  orbit->add_option("--bound", c.bound)->check(CLI::NonNegativeNumber);
  orbit->add_flag("--stokes-data", c.stokes, "list the Stokes data set instead (needs --spectrum)");
  orbit->add_option("--spectrum", c.spectrum);
  orbit->add_option("--out", c.out);

  auto* det = sub("detect-ade", "ADE type and witness word", [&] { return cmd_detect(c); });
  det->add_option("--matrix", c.matrix)->required();
  det->add_option("--bound", c.bound)->check(CLI::NonNegativeNumber);
  det->add_flag("--permuted", c.permuted, "match up to node relabelling");
  det->add_option("--out", c.out);

  auto* ch = sub("charges", "eigenvalues of S (S^-1)^t", [&] { return cmd_charges(c); });
  ch->add_option("--matrix", c.matrix)->required();
  ch->add_option("--out", c.out);

  auto* cert = sub("certify", "positivity certificate for the jump data", [&] { return cmd_certify(c); });
  cert->add_option("--spectrum", c.spectrum)->required();
  cert->add_option("--matrix", c.matrix)->required();
  cert->add_flag("--analytic-only", c.analytic_only);
  cert->add_option("--x-count", c.cert_x_count)->check(CLI::PositiveNumber);
  cert->add_option("--out", c.out);

  auto* mf = sub("minimize-f", "minimum of the E-family determinant function", [&] { return cmd_minimize(c); });
  mf->add_option("--family", c.family)->check(CLI::IsMember({"E6", "E7", "E8"}));
  mf->add_option("--step", c.step)->check(CLI::PositiveNumber);
  mf->add_option("--out", c.out);

  auto add_grid = [&](CLI::App* s) {
    s->add_option("--spectrum", c.spectrum)->required();
    s->add_option("--matrix", c.matrix)->required();
    s->add_option("--x-min", c.x_min)->check(CLI::PositiveNumber);
    s->add_option("--x-max", c.x_max)->check(CLI::PositiveNumber);
    s->add_option("--x-count", c.x_count)->check(CLI::PositiveNumber);
    s->add_option("--node-spacing", c.h, "node spacing in log |mu|")->check(CLI::PositiveNumber);
    s->add_option("--method", c.method)->check(CLI::IsMember({"auto", "direct", "neumann"}));
    s->add_option("--stencil", c.stencil, "finite difference order for the tt residual");
    s->add_flag("--force", c.force, "solve without a positivity certificate");
  };
  auto* solve = sub("solve", "metric curve G(x) on a log grid", [&] { return cmd_solve(c); });
  add_grid(solve);
  solve->add_option("--out", c.out, "curve CSV");

  auto* ver = sub("verify", "recover Stokes data from a metric curve", [&] { return cmd_verify(c); });
  ver->add_option("--curve", c.curve)->required();
  ver->add_option("--spectrum", c.spectrum)->required();
  ver->add_option("--matrix", c.matrix)->required();
  ver->add_option("--points", c.verify_points, "curve points used, spread evenly (0 = all)");
  ver->add_option("--out", c.out);

  auto* pipe = sub("pipeline", "certify, solve and verify", [&] { return cmd_pipeline(c); });
  add_grid(pipe);
  pipe->add_flag("--analytic-only", c.analytic_only);
  pipe->add_option("--points", c.verify_points, "curve points used for verification");
  pipe->add_option("--out-dir", c.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }
  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
}
