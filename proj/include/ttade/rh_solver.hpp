#pragma once

#include <string>
#include <vector>

#include "ttade/rh_kernel.hpp"

namespace ttade {

struct SolverOptions {
  enum class Method { Auto, Direct, Neumann };
  double h = 0.05;            // node spacing in s = log|mu|
  double trunc_tol = 1e-14;   // jump deviation allowed at the truncation radius
  double tol_jump = 1e-10;
  Method method = Method::Auto;
  bool force = false;         // solve even without a positivity certificate
  int neumann_max_iter = 400;
  double neumann_tol = 1e-15;
  double min_rcond = 1e-13;
};

// Nodes mu_k = sigma_k e^{s_k} e^{i delta/2}; the negative ray comes first,
// both rays share the uniform s grid on [-s_max, s_max].
struct ContourDiscretization {
  double h = 0.0;
  double s_max = 0.0;
  double r_min = 1.0, r_max = 1.0;
  int per_ray = 0;
  std::vector<double> s;
  std::vector<int> sigma;
  std::vector<cplx> nodes;
  double endpoint_deviation = 0.0;
  bool trivial = false;  // S = I, Y = I
};

// r + 1/r >= L with L = max log(|S_jl| / tol) / (x kappa_jl) over the nonzero entries.
ContourDiscretization discretize(const JumpData& jd, const SolverOptions& opt = {});

struct ResidualReport {
  double jump = 0.0;
  double normalization = 0.0;
  double sym_reflect = 0.0;  // |Y(-mu)^{-t} - Y(mu)|
  double sym_conj = 0.0;     // |conj(Y(0))^{-1} conj(Y(1/conj mu)) - Y(mu)|
  double hermitian = 0.0;
  double orthogonal = 0.0;   // |G conj(G) - I|
  double det = 0.0;          // |det G - 1|
  double min_eig = 0.0;
  bool cholesky_ok = false;
};

struct RHSolution {
  JumpData jd;
  ContourDiscretization disc;
  std::vector<CMat> u;  // jump of Y across the contour at each node
  CMat G;               // Y(0)
  CMat dY0;             // Y'(0)
  std::string method;
  std::string certification;
  int iterations = 0;
  double rcond = 1.0;
  ResidualReport res;
};

RHSolution solve_rh(const JumpData& jd, const ContourDiscretization& disc, const SolverOptions& opt = {});
// Certifies positivity on the node set, discretizes and solves.
RHSolution solve_rh(const JumpData& jd, const SolverOptions& opt = {});

CMat eval_Y(const RHSolution& sol, cplx mu);
double jump_residual(const RHSolution& sol);
void symmetry_residuals(const RHSolution& sol, ResidualReport& rep);
void metric_checks(const CMat& G, ResidualReport& rep);

// psi_1 at the origin and G^{-1} G_x = 2 [A, psi_1].
CMat psi1_zero(const RHSolution& sol);
CMat log_derivative(const RHSolution& sol);

struct CurvePoint {
  double x = 0.0;
  CMat G;
  CMat GinvGx;
  ResidualReport res;
  std::string method;
  int nodes = 0;
};

struct MetricCurve {
  Spectrum spec;
  RMat S;
  double delta = 0.0;
  std::vector<CurvePoint> pts;
};

std::vector<double> log_grid(double x_min, double x_max, int count);
MetricCurve metric_curve(const Spectrum& spec, const RMat& S, const std::vector<double>& xs,
                         const SolverOptions& opt = {}, std::optional<double> delta = {});

// Weights of the m-th derivative at x0 from the nodes xs.
std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs, int m);

struct TtResidual {
  double residual = 0.0;     // with G_x from the expansion at the origin
  double residual_fd = 0.0;  // with G_x from finite differences of G
  double gx_gap = 0.0;       // max |G^{-1}G_x(psi) - G^{-1}G_x(fd)|
  int order = 4;
  int interior = 0;
};

// (1/x) d/dL (x G^{-1} G_x) - 4x [A, G^{-1} conj(A) G] with L = log x, sup over
// interior points of the centered stencil of the given order.
TtResidual tt_residual(const MetricCurve& curve, int order = 4);

}  // namespace ttade
