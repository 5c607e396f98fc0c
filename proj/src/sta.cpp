#include "mgsta/sta.hpp"

#include <cmath>
#include <string>

namespace mgsta {

namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw input_error(std::string("StaParams: ") + name +
                      " must be positive and finite");
  }
}

}  // namespace

void StaParams::validate_shape() const {
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  check_positive(b, "b");
  if (!(p > 0.0) || !(p <= 0.5)) {
    throw input_error("StaParams: p must lie in (0, 1/2]");
  }
}

void StaParams::validate() const {
  validate_shape();
  check_positive(k1, "k1");
  check_positive(k2, "k2");
}

Vec phi1(const Vec& x, const StaParams& sp) {
  const double r = norm(x);
  if (r < kOriginGuard) return Vec(x.size());
  const double scale = sp.alpha * std::pow(r, -sp.p) + sp.beta;
  return scale * x;
}

Vec phi2(const Vec& x, const StaParams& sp) {
  const double r = norm(x);
  if (r < kOriginGuard) return Vec(x.size());
  const double c = sp.alpha * (1.0 - sp.p) * std::pow(r, -sp.p) + sp.beta;
  return c * phi1(x, sp);
}

double c_scalar(const Vec& x, const StaParams& sp) {
  const double r = norm(x);
  if (r < kOriginGuard) {
    throw input_error("c_scalar: undefined at the origin");
  }
  return sp.alpha * (1.0 - sp.p) * std::pow(r, -sp.p) + sp.beta;
}

SymMat jacobian_phi1(const Vec& x, const StaParams& sp) {
  const double r = norm(x);
  if (r < kOriginGuard) {
    throw input_error("jacobian_phi1: undefined at the origin");
  }
  const double rp = std::pow(r, -sp.p);
  Mat j = (sp.alpha * rp + sp.beta) * Mat::identity(x.size());
  j -= (sp.alpha * sp.p * rp / (r * r)) * outer(x, x);
  return sym(j);
}

SymMat script_j(const Vec& x, const StaParams& sp) {
  const double c = c_scalar(x, sp);
  return sym((1.0 / c) * jacobian_phi1(x, sp).mat());
}

double script_j_offaxis_eigenvalue(double radius, const StaParams& sp) {
  if (!(radius > 0.0)) {
    throw input_error("script_j_offaxis_eigenvalue: radius must be positive");
  }
  const double rp = std::pow(radius, sp.p);
  return (sp.alpha + sp.beta * rp) / (sp.alpha * (1.0 - sp.p) + sp.beta * rp);
}

ControlOutput control_and_derivative(const Vec& x, const ControllerState& cs,
                                     const Mat& g0, const StaParams& sp) {
  if (x.size() != cs.v.size() || g0.dim() != x.size()) {
    throw input_error("control_and_derivative: dimension mismatch");
  }
  ControlOutput out;
  out.u = -sp.k1 * phi1(x, sp) + sp.b * (invert(g0) * cs.v);
  out.v_dot = -sp.k2 * phi2(x, sp);
  return out;
}

}  // namespace mgsta
