#include "gkdv/variational.hpp"

#include "gkdv/diagnostics.hpp"
#include "gkdv/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>

namespace gkdv {
namespace {

void require_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("exponent p must exceed 1");
}

// int_{-1}^{1} y^{2k} (1 - y^2)^g dy = B(k + 1/2, g + 1)
double beta_moment(int k, double g) {
  const double a = k + 0.5;
  const double b = g + 1.0;
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

bool is_even(const Eigen::ArrayXd& u, double rel) {
  const Index n = u.size();
  const double scale = u.abs().maxCoeff();
  for (Index j = 1; j < n / 2; ++j) {
    if (std::abs(u(j) - u(n - j)) > rel * scale) return false;
  }
  return true;
}

// Multiplies u by exp(-t x^2) with t chosen so that int x^2 v^2 = int v^2, then
// normalizes int v^2 = 1.
Eigen::ArrayXd retract(const Eigen::ArrayXd& u, const Eigen::ArrayXd& x, double dx) {
  const Eigen::ArrayXd x2 = x.square();
  const Eigen::ArrayXd u2 = u.square();
  auto excess = [&](double t) {
    const Eigen::ArrayXd w = u2 * (-2.0 * t * x2).exp();
    return integrate(x2 * w, dx) / integrate(w, dx) - 1.0;
  };
  double lo = -0.5, hi = 0.5;
  while (excess(lo) < 0.0 && lo > -16.0) lo *= 2.0;
  while (excess(hi) > 0.0 && hi < 1e6) hi *= 2.0;
  if (excess(lo) < 0.0 || excess(hi) > 0.0) throw NumericError("retraction bracket not found");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  Eigen::ArrayXd v = u * (-0.5 * (lo + hi) * x2).exp();
  return v / std::sqrt(integrate(v.square(), dx));
}

}  // namespace

double sharp_constant_cp(double p) {
  require_exponent(p);
  const double q = p - 1.0;
  const double g1 = std::lgamma((p + 1.0) / q);
  const double g2 = std::lgamma(2.0 * p / q);
  const double g3 = std::lgamma((5.0 * p - 1.0) / (2.0 * q));
  const double g4 = std::lgamma((3.0 * p + 1.0) / (2.0 * q));
  const double log_c = -std::log(2.0 * std::numbers::pi) + g1 - g2 + (p + 3.0) / q * (g2 - g3) +
                       (3.0 * p + 1.0) / q * (g4 - g1);
  if (!std::isfinite(log_c)) throw NumericError("sharp constant overflow at p = " + std::to_string(p));
  return std::exp(log_c);
}

SharpConstant sharp_constant(double p) { return {p, sharp_constant_cp(p)}; }

RealField extremizer_field(double p, const Grid& grid) {
  require_exponent(p);
  if (2.0 / grid.dx() < 64.0) throw PreconditionError("grid puts fewer than 64 cells inside [-1, 1]");
  if (grid.half_width() <= 1.0) throw PreconditionError("grid does not contain [-1, 1]");
  const double g = 1.0 / (p - 1.0);
  return RealField::sample(grid, [g](double x) { return x * x < 1.0 ? std::pow(1.0 - x * x, g) : 0.0; });
}

NormalizedExtremizer normalized_extremizer(double p) {
  require_exponent(p);
  const double g = 2.0 / (p - 1.0);
  const double B0 = beta_moment(0, g);
  const double B2 = beta_moment(1, g);
  const double b = std::sqrt(B2 / B0);
  return {std::sqrt(b / B0), b};
}

double prop2_ratio(const RealField& f, double p) {
  require_exponent(p);
  if (f.is_zero()) throw DegenerateInputError("prop2 ratio of a zero field");
  require_tail_guard(f);
  const double dx = f.grid().dx();
  const Eigen::ArrayXd x = f.grid().nodes();
  const Eigen::ArrayXd u2 = f.samples().square();
  const double M = integrate(u2, dx);
  const double xM = integrate(x * u2, dx) / M;
  const double X = integrate((x - xM).square() * u2, dx);
  const double P = integrate(f.samples().abs().pow(p + 1.0), dx);
  return X * std::pow(P, 4.0 / (p - 1.0)) / std::pow(M, (3.0 * p + 1.0) / (p - 1.0));
}

Grid minimizer_grid() { return Grid(4.0, 8192); }

MinimizerResult minimize_constrained(double p, const RealField& guess, const MinimizerOptions& options) {
  require_exponent(p);
  const Eigen::ArrayXd& u0 = guess.samples();
  if (guess.is_zero() || (u0 < 0.0).any()) throw PreconditionError("minimizer needs a positive guess");
  if (!is_even(u0, 1e-8)) throw PreconditionError("minimizer needs an even guess");
  if (options.budget < 1) throw ConfigurationError("minimizer budget must be positive");

  const Grid& g = guess.grid();
  const double dx = g.dx();
  const Eigen::ArrayXd x = g.nodes();
  const Eigen::ArrayXd x2 = x.square();
  auto objective = [&](const Eigen::ArrayXd& u) { return integrate(u.abs().pow(p + 1.0), dx); };

  Eigen::ArrayXd u = retract(u0, x, dx);
  MinimizerResult result{RealField(g, u), 0.0, 0.0, objective(u), {}};
  std::vector<double> history;

  for (int iter = 0; iter < options.budget; ++iter) {
    // Multipliers from the least-squares fit of u^p on {x^2 u, u}.
    const Eigen::ArrayXd up = u.pow(p);
    Eigen::MatrixXd A(u.size(), 2);
    A.col(0) = (x2 * u).matrix();
    A.col(1) = u.matrix();
    const Eigen::Vector2d lambda = (A.transpose() * A).ldlt().solve(A.transpose() * up.matrix());
    const Eigen::ArrayXd residual = up - lambda(0) * x2 * u - lambda(1) * u;
    const auto support = (u > 1e-3 * u.maxCoeff()).cast<double>();
    const double el = std::sqrt((residual.square() * support).sum() / (up.square() * support).sum());

    const double obj = objective(u);
    result.log.push_back({iter, obj, integrate(u.square(), dx) - 1.0, integrate(x2 * u.square(), dx) - 1.0, el});
    history.push_back(el);
    result.lambda1 = lambda(0);
    result.lambda2 = lambda(1);
    result.objective = obj;
    if (el < options.tolerance) {
      result.field = RealField(g, u);
      return result;
    }

    // Fixed point of the Euler-Lagrange equation for the current multipliers,
    // blended in with Armijo-style halving until the objective drops.
    const Eigen::ArrayXd target = (lambda(1) + lambda(0) * x2).max(0.0).pow(1.0 / (p - 1.0));
    double theta = 1.0;
    Eigen::ArrayXd next;
    for (;;) {
      Eigen::ArrayXd blend = (1.0 - theta) * u + theta * target;
      blend = symmetric_decreasing_rearrangement(RealField(g, blend)).samples();
      // The alternating placement leaves ties unordered; restore exact evenness.
      for (Index j = 1; j < g.size() / 2; ++j) blend(j) = blend(g.size() - j) = 0.5 * (blend(j) + blend(g.size() - j));
      next = retract(blend, x, dx);
      if (objective(next) <= obj * (1.0 + 1e-14) || theta < 1e-8) break;
      theta *= 0.5;
    }
    u = std::move(next);
  }
  throw ConvergenceError("constrained minimizer did not converge within " + std::to_string(options.budget) +
                             " iterations",
                         std::move(history));
}

RealField symmetric_decreasing_rearrangement(const RealField& f) {
  const Index n = f.size();
  std::vector<double> values(f.samples().data(), f.samples().data() + n);
  for (double& v : values) v = std::abs(v);
  std::sort(values.begin(), values.end(), std::greater<>());
  Eigen::ArrayXd out(n);
  const Index center = n / 2;
  Index k = 0;
  out(center) = values[k++];
  for (Index d = 1; d < n / 2; ++d) {
    out(center + d) = values[k++];
    out(center - d) = values[k++];
  }
  out(0) = values[k];
  return {f.grid(), std::move(out)};
}

SymmetricIdentity symmetric_identity_check(const RealField& f) {
  if (f.is_zero()) throw DegenerateInputError("symmetric identity of a zero field");
  if (!is_even(f.samples(), 1e-8)) throw PreconditionError("symmetric identity needs an even field");
  const double dx = f.grid().dx();
  const Eigen::ArrayXd x = f.grid().nodes();
  const Eigen::ArrayXd u2 = f.samples().square();
  return {interaction_functional(f), 2.0 * integrate(x.square() * u2, dx) * integrate(u2, dx)};
}

double prop1_beta(double alpha, double p) {
  require_exponent(p);
  const double upper = 4.0 * p / (p - 1.0);
  if (!(alpha >= 3.0 - 1e-12 && alpha <= upper + 1e-12))
    throw DomainError("alpha must lie in [3, 4p/(p-1)]");
  return ((4.0 - alpha) * p + 5.0 * alpha - 12.0) / (p + 3.0);
}

ExponentPair prop1_exponents(double alpha, double p) { return {alpha, prop1_beta(alpha, p)}; }

double prop1_constant(double alpha, double p) {
  prop1_beta(alpha, p);
  const double upper = 4.0 * p / (p - 1.0);
  const double c3 = 1.0 / 128.0;
  const double c4 = 2.0 * sharp_constant_cp(p) * std::pow(p + 1.0, -4.0 / (p - 1.0));
  const double theta = (upper - alpha) / (upper - 3.0);
  return std::pow(c3, theta) * std::pow(c4, 1.0 - theta);
}

Prop1Check prop1_evaluate(const RealField& f, double p, double alpha) {
  const ExponentPair ex = prop1_exponents(alpha, p);
  if (f.is_zero()) throw DegenerateInputError("weighted energy check of a zero field");
  const EquationParams defocusing{p, 1.0};
  const double M = mass(f);
  const double E = energy(f, defocusing);
  const double I = interaction_functional(f);
  const double lhs = std::pow(E, ex.beta) * I;
  const double rhs = prop1_constant(alpha, p) * std::pow(M, alpha);
  return {lhs, rhs, lhs >= rhs};
}

bool prop1_endpoint_check(const RealField& f, double p, double alpha) {
  return prop1_evaluate(f, p, alpha).holds;
}

namespace {
std::mutex g_gn_mutex;
std::map<double, double> g_gn_cache;

double soliton_gn_ratio(double p) {
  // u = sech^g(x), u_x = -g sech^g(x) tanh(x), g = 2/(p-1).
  const double g = 2.0 / (p - 1.0);
  const double L = 30.0 * std::max(1.0, g) + 10.0;
  const Index n = 1 << 17;
  const double dx = 2.0 * L / static_cast<double>(n);
  double m = 0.0, k = 0.0, P = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double x = -L + static_cast<double>(j) * dx;
    const double u = std::pow(1.0 / std::cosh(x), g);
    const double ux = -g * u * std::tanh(x);
    m += u * u;
    k += ux * ux;
    P += std::pow(u, p + 1.0);
  }
  m *= dx;
  k *= dx;
  P *= dx;
  return P / (std::pow(m, 0.25 * (p + 3.0)) * std::pow(k, 0.25 * (p - 1.0)));
}
}  // namespace

double gagliardo_nirenberg_ratio(const RealField& f, double p) {
  require_exponent(p);
  if (f.is_zero()) throw DegenerateInputError("Gagliardo-Nirenberg ratio of a zero field");
  const double dx = f.grid().dx();
  const double M = mass(f);
  const double K = integrate(spatial_derivative(f, 1).samples().square(), dx);
  const double P = integrate(f.samples().abs().pow(p + 1.0), dx);
  return P / (std::pow(M, 0.25 * (p + 3.0)) * std::pow(K, 0.25 * (p - 1.0)));
}

double gagliardo_nirenberg_constant(double p) {
  require_exponent(p);
  std::lock_guard lock(g_gn_mutex);
  auto it = g_gn_cache.find(p);
  if (it == g_gn_cache.end()) it = g_gn_cache.emplace(p, soliton_gn_ratio(p)).first;
  return it->second;
}

void observe_gagliardo_nirenberg_ratio(double p, double ratio) {
  const double current = gagliardo_nirenberg_constant(p);
  if (ratio > current) {
    std::lock_guard lock(g_gn_mutex);
    g_gn_cache[p] = std::max(g_gn_cache[p], ratio);
  }
}

UncertaintyChain uncertainty_chain(const RealField& f, double p) {
  require_exponent(p);
  if (f.is_zero()) throw DegenerateInputError("uncertainty chain of a zero field");
  require_tail_guard(f);
  const double dx = f.grid().dx();
  const Eigen::ArrayXd x = f.grid().nodes();
  const Eigen::ArrayXd& u = f.samples();
  const double norm_xu = std::sqrt(integrate((x * u).square(), dx));
  const double norm_ux = std::sqrt(integrate(spatial_derivative(f, 1).samples().square(), dx));
  const double M = mass(f);
  const double P = integrate(u.abs().pow(p + 1.0), dx);
  const double scale = std::pow(gagliardo_nirenberg_constant(p), -2.0 / (p - 1.0));
  const double middle = scale * norm_xu * std::pow(P, 2.0 / (p - 1.0)) / std::pow(M, 0.5 * (p + 3.0) / (p - 1.0));
  return {norm_xu * norm_ux, middle, std::sqrt(sharp_constant_cp(p)) * scale * M};
}

}  // namespace gkdv
