#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttade/ade_catalog.hpp"
#include "ttade/common.hpp"
#include "ttade/rational_matrix.hpp"
#include "ttade/simd.hpp"
#include "ttade/spectrum_geometry.hpp"

namespace ttade {

using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

// Gamma_- is the ray arg mu = -pi + delta/2, Gamma_+ is arg mu = delta/2.
struct JumpData {
  Spectrum spec;
  RMat S;
  double x = 1.0;
  double delta = kPi / 4;
  std::vector<double> beta;  // gauge parameters; empty means none
  int n() const { return static_cast<int>(spec.n()); }
};

// Validates sizes, unitriangularity, x > 0 and the decay condition.
JumpData make_jump_data(const Spectrum& spec, const RMat& S, double x, std::optional<double> delta = {});
RMat to_real(const RationalMatrix& S);

enum class ContourSide { Minus, Plus };
ContourSide contour_side(const JumpData& jd, cplx mu, double tol = 1e-10);
cplx contour_point(const JumpData& jd, ContourSide side, double r);

// E_jl = exp(phi_j - phi_l) times the gauge factor, phi_j = x(u_j/mu + mu conj(u_j)).
CMat exponent_matrix(const JumpData& jd, cplx mu);

struct JumpPair {
  CMat minus;  // G_-(mu)
  CMat plus;   // G_+(mu)
};
JumpPair jump_matrices(const JumpData& jd, cplx mu);  // throws ContourViolation off Gamma

// Jump used by the solver at mu = t e^{i delta/2}: G_- for t < 0, G_+^{-1} for t > 0.
CMat solver_jump(const JumpData& jd, double t);

JumpData gauge_transform(const JumpData& jd, const std::vector<double>& beta);

// -log of the entry modulus factor on either ray: x (r + 1/r) kappa_jl.
double decay_rate(const JumpData& jd, int j, int l);
// max over both rays of |G - I| at modulus r.
double jump_deviation(const JumpData& jd, double r);

struct HermitianWitness {
  cplx mu;
  ContourSide side = ContourSide::Minus;
  CMat H;
  double min_eigenvalue = 0.0;
  bool cholesky_ok = false;
  double hermitian_defect = 0.0;
};
HermitianWitness hermitian_witness(const JumpData& jd, cplx mu);

// det(A_1), ..., det(A_n) for the tridiagonal 2I + offdiag(a), a of length n-1.
std::vector<double> an_chain_determinants(const std::vector<cplx>& a, bool allow_boundary = false);

enum class EFamily { E6, E7, E8 };
EFamily parse_efamily(const std::string& s);
const char* efamily_name(EFamily f);
int efamily_rank(EFamily f);
// Edge labels in display order and their node pairs (1-based).
std::vector<std::string> f_variable_names(EFamily f);
std::vector<std::pair<int, int>> f_edges(EFamily f);

double f_eval(EFamily f, const std::vector<double>& e);
double f_eval_complex(EFamily f, const std::vector<cplx>& e);

struct FMinResult {
  double min = 0.0;
  std::vector<double> argmin;
  bool attained_on_boundary = false;
  double grid_min = 0.0;
  std::vector<double> grid_argmin;
  std::size_t grid_points = 0;
  int refine_sweeps = 0;
  double seconds = 0.0;
  std::string kernel;
};
// Dense grid over [-1,1]^k (reduced to [0,1]^k by the edge-sign symmetry)
// followed by exact coordinate refinement.
FMinResult f_minimize(EFamily f, double grid_step = 0.05, double refine_tol = 1e-12);

enum class Verdict { CertifiedAnalytic, CertifiedSampled, Refuted, Inconclusive };
const char* verdict_name(Verdict v);

struct CertifyOptions {
  int x_count = 25;
  double x_min = 1e-2;
  double x_max = 1e2;
  int r_count = 81;
  double endpoint_tol = 1e-12;
  double eig_tol = 1e-12;
  bool analytic_only = false;
  std::optional<double> delta;
};

struct CertificateReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string route;  // trivial, ade_forest, perron_frobenius, sampled
  std::string detail;
  double delta = 0.0;
  std::size_t samples = 0;
  double worst_min_eig = 0.0;
  double worst_x = 0.0;
  cplx worst_mu = 0.0;
  std::string worst_side;
  std::string kernel;
};

// Analytic routes: S = I; off-diagonal pattern a forest of A/D/E trees with
// |S_jl| <= 1; spectral radius of |S + S^t - 2I| below 2.
std::optional<std::string> analytic_certificate(const RMat& S);

CertificateReport positivity_certificate(const Spectrum& spec, const RMat& S, const CertifyOptions& opt = {});

// Positive-definiteness of both witnesses at the given (x, mu) samples via the
// batched LDL kernel; returns the smallest pivot seen.
double sampled_min_pivot(const JumpData& jd, const std::vector<double>& radii, cplx* worst_mu = nullptr,
                         ContourSide* worst_side = nullptr);

}  // namespace ttade
