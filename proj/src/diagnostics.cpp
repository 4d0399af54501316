#include "gkdv/diagnostics.hpp"

#include "gkdv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gkdv {
namespace {

// u_x and u_xx from a single forward transform.
struct Derivatives {
  Eigen::ArrayXd ux;
  Eigen::ArrayXd uxx;
};

Derivatives derivatives(const RealField& f) {
  const Grid& g = f.grid();
  const Index n = g.size();
  const Eigen::ArrayXcd half = rfft(f.samples());
  const Eigen::ArrayXd k = g.half_wavenumbers();
  Eigen::ArrayXcd d1 = half * (Complex(0.0, 1.0) * k);
  d1(n / 2) = 0.0;
  const Eigen::ArrayXcd d2 = half * (-k.square());
  return {irfft(d1, n), irfft(d2, n)};
}

struct Moments {
  double M;      // int u^2
  double ux2;    // int u_x^2
  double P;      // int |u|^{p+1}
  double E;      // energy with mu
  double S1;     // int x u^2
  double XE;     // int x (u_x^2/2 + |u|^{p+1}/(p+1))
  double XP;     // int x |u|^{p+1}
};

Moments moments(const RealField& f, const Eigen::ArrayXd& ux, const EquationParams& params) {
  const double dx = f.grid().dx();
  const Eigen::ArrayXd x = f.grid().nodes();
  const Eigen::ArrayXd& u = f.samples();
  const Eigen::ArrayXd lp1 = u.abs().pow(params.p + 1.0);
  const Eigen::ArrayXd density = 0.5 * ux.square() + lp1 / (params.p + 1.0);
  Moments m{};
  m.M = integrate(u.square(), dx);
  m.ux2 = integrate(ux.square(), dx);
  m.P = integrate(lp1, dx);
  m.E = 0.5 * m.ux2 + params.mu / (params.p + 1.0) * m.P;
  m.S1 = integrate(x * u.square(), dx);
  m.XE = integrate(x * density, dx);
  m.XP = integrate(x * lp1, dx);
  return m;
}

void require_nonzero(const RealField& f, const char* what) {
  if (f.is_zero()) throw DegenerateInputError(std::string(what) + " of a zero field");
}

double dIdt_from(const Moments& m, double p) {
  const double xM = m.S1 / m.M;
  const double xE = m.XE / m.E;
  return 24.0 * m.E * m.M * (xM - xE) + (8.0 * p - 24.0) / (p + 1.0) * (xM * m.M * m.P - m.M * m.XP);
}

TaoQuantities tao_from(const RealField& f, const Derivatives& d, double M, double p) {
  const double dx = f.grid().dx();
  const Eigen::ArrayXd& u = f.samples();
  const Eigen::ArrayXd absu = u.abs();
  TaoQuantities tq{};
  tq.a = std::sqrt(integrate(d.uxx.square(), dx) / M);
  tq.b = std::sqrt(integrate(absu.pow(2.0 * p), dx) / M);
  tq.q = integrate(d.ux.square(), dx) / (tq.a * M);
  tq.r = integrate(absu.pow(p + 1.0), dx) / (tq.b * M);
  tq.s = p * integrate(absu.pow(p - 1.0) * d.ux.square(), dx) / (tq.a * tq.b * M);
  tq.gram = 1.0 - tq.q * tq.q - tq.r * tq.r - tq.s * tq.s + 2.0 * tq.q * tq.r * tq.s;
  return tq;
}

}  // namespace

double mass(const RealField& f) { return integrate(f.samples().square(), f.grid().dx()); }

double energy(const RealField& f, const EquationParams& params) {
  const Eigen::ArrayXd ux = spatial_derivative(f, 1).samples();
  const double dx = f.grid().dx();
  return integrate(0.5 * ux.square() + params.mu / (params.p + 1.0) * f.samples().abs().pow(params.p + 1.0),
                   dx);
}

double center_of_mass(const RealField& f) {
  require_nonzero(f, "center of mass");
  require_tail_guard(f);
  return weighted_moment(RealField(f.grid(), f.samples().square()), 1, 0.0) / mass(f);
}

double center_of_energy(const RealField& f, const EquationParams& params) {
  require_nonzero(f, "center of energy");
  require_tail_guard(f);
  const Derivatives d = derivatives(f);
  const Moments m = moments(f, d.ux, params);
  if (m.E == 0.0) throw DegenerateInputError("center of energy with zero energy");
  return m.XE / m.E;
}

double interaction_unguarded(const RealField& f) {
  const double dx = f.grid().dx();
  const Eigen::ArrayXd rho = f.samples().square();
  const Eigen::ArrayXd x = f.grid().nodes();
  const double M = integrate(rho, dx);
  const double xM = integrate(x * rho, dx) / M;
  return 2.0 * M * integrate((x - xM).square() * rho, dx);
}

double interaction_functional(const RealField& f) {
  if (f.is_zero()) return 0.0;
  require_tail_guard(f);
  return interaction_unguarded(f);
}

double interaction_functional_direct(const RealField& f) {
  const Index n = f.size();
  if (n > 8192) throw PreconditionError("direct double sum limited to n <= 8192");
  require_tail_guard(f);
  const double dx = f.grid().dx();
  const Eigen::ArrayXd rho = f.samples().square();
  const Eigen::ArrayXd x = f.grid().nodes();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (rho(i) == 0.0) continue;
    total += rho(i) * ((x(i) - x).square() * rho).sum();
  }
  return total * dx * dx;
}

double dIdt_algebraic(const RealField& f, const EquationParams& params) {
  require_nonzero(f, "dI/dt");
  require_tail_guard(f);
  const Derivatives d = derivatives(f);
  const Moments m = moments(f, d.ux, params);
  if (m.E == 0.0) throw DegenerateInputError("dI/dt with zero energy");
  return dIdt_from(m, params.p);
}

TaoQuantities tao_quantities(const RealField& f, const EquationParams& params) {
  require_nonzero(f, "Tao quantities");
  const Derivatives d = derivatives(f);
  return tao_from(f, d, mass(f), params.p);
}

double gap_quadratic_form(const TaoQuantities& tq, double p) {
  return 1.5 * (1.0 - tq.q * tq.q) * tq.a * tq.a +
         (2.0 * tq.s - (p + 3.0) / (p + 1.0) * tq.q * tq.r) * tq.a * tq.b +
         0.5 * (1.0 - 4.0 * p / ((p + 1.0) * (p + 1.0)) * tq.r * tq.r) * tq.b * tq.b;
}

double gap_quadratic_form(const RealField& f, const EquationParams& params) {
  return gap_quadratic_form(tao_quantities(f, params), params.p);
}

double gap_rate_scaled(const RealField& f, const EquationParams& params) {
  const double M = mass(f);
  return M * M * gap_quadratic_form(f, params);
}

double refined_prefactor(double p) { return 0.5 - 2.0 * p / ((p + 1.0) * (p + 1.0)); }

double refined_gap_lower_bound(const RealField& f, const EquationParams& params) {
  require_nonzero(f, "refined bound");
  const Derivatives d = derivatives(f);
  const Moments m = moments(f, d.ux, params);
  if (m.E == 0.0) throw DegenerateInputError("refined bound with zero energy");
  return refined_prefactor(params.p) * m.P * m.P / (m.E * m.M);
}

QuartileInterval quartile_unguarded(const RealField& f) {
  const Grid& g = f.grid();
  const double dx = g.dx();
  const Eigen::ArrayXd cell = f.samples().square() * dx;
  const double M = cell.sum();
  // Each sample's mass is spread uniformly over [x_j - dx/2, x_j + dx/2].
  auto quantile = [&](double target) {
    double cumulative = 0.0;
    for (Index j = 0; j < cell.size(); ++j) {
      if (cumulative + cell(j) >= target && cell(j) > 0.0) {
        const double frac = (target - cumulative) / cell(j);
        return g.node(j) - 0.5 * dx + frac * dx;
      }
      cumulative += cell(j);
    }
    return g.node(g.size() - 1) + 0.5 * dx;
  };
  const double lo = quantile(0.25 * M);
  const double hi = quantile(0.75 * M);
  return {lo, hi, hi - lo};
}

QuartileInterval quartile_interval(const RealField& f) {
  require_nonzero(f, "quartile interval");
  require_tail_guard(f);
  return quartile_unguarded(f);
}

double holder_chain_constant(double p) { return std::pow(2.0, -(p + 1.0)) * std::pow(4.0, -(p - 1.0)); }

double holder_lower_bound(const RealField& f, double p) {
  require_nonzero(f, "Hoelder bound");
  const double M = mass(f);
  const double I = interaction_functional(f);
  if (I <= 0.0) throw DegenerateInputError("Hoelder bound needs I > 0");
  return holder_chain_constant(p) * std::pow(M, 2.0 * p) * std::pow(I, 0.5 * (1.0 - p));
}

DiagnosticsRecord compute_record(double t, const RealField& f, const EquationParams& params,
                                 const RecordOptions& options) {
  DiagnosticsRecord rec;
  rec.t = t;
  if (f.is_zero()) return rec;

  const Derivatives d = derivatives(f);
  const Moments m = moments(f, d.ux, params);
  rec.mass = m.M;
  rec.energy = m.E;
  rec.lp1 = m.P;

  const TaoQuantities tq = tao_from(f, d, m.M, params.p);
  rec.a = tq.a;
  rec.b = tq.b;
  rec.q = tq.q;
  rec.r = tq.r;
  rec.s = tq.s;
  rec.gram = tq.gram;
  rec.gap_alg = m.M * m.M * gap_quadratic_form(tq, params.p);
  if (m.E != 0.0) rec.gap_refined_lb = refined_prefactor(params.p) * m.P * m.P / (m.E * m.M);

  auto flag = [&](const char* name) {
    if (!rec.violation_flags.empty()) rec.violation_flags += '|';
    rec.violation_flags += name;
  };
  if (!(tq.q > 0.0 && tq.q < 1.0 && tq.r > 0.0 && tq.r < 1.0 && tq.s > 0.0 && tq.s < 1.0)) flag("qrs");
  if (tq.gram < -1e-9) flag("gram");
  if (params.mu > 0.0 && !(m.E > 0.0)) flag("energy");

  rec.tail = tail_mass_fraction(f);
  if (!options.moments) return rec;

  if (options.enforce_tail_guard) require_tail_guard(f, t);
  rec.center_mass = m.S1 / m.M;
  rec.center_energy = m.E != 0.0 ? m.XE / m.E : 0.0;
  rec.interaction = interaction_unguarded(f);
  rec.dIdt_alg = m.E != 0.0 ? dIdt_from(m, params.p) : 0.0;
  const QuartileInterval J = quartile_unguarded(f);
  rec.J_len = J.length;
  if (J.length > 4.0 * std::sqrt(rec.interaction) / m.M + f.grid().dx()) flag("J");
  return rec;
}

void fill_finite_differences(std::span<DiagnosticsRecord> records) {
  const std::size_t n = records.size();
  for (std::size_t i = 0; i < n; ++i) {
    records[i].dIdt_fd = NAN;
    records[i].gap_fd = NAN;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto& prev = records[i - 1];
    const auto& next = records[i + 1];
    auto& cur = records[i];
    const double h = next.t - prev.t;
    cur.dIdt_fd = (next.interaction - prev.interaction) / h;
    const double gap_prev = prev.center_mass - prev.center_energy;
    const double gap_next = next.center_mass - next.center_energy;
    cur.gap_fd = cur.energy * cur.mass * (gap_next - gap_prev) / h;
  }
}

void flag_monotonicity(std::span<DiagnosticsRecord> records, const EquationParams& params) {
  if (!(params.mu > 0.0) || params.p < std::sqrt(3.0)) return;
  for (auto& rec : records) {
    if (std::isnan(rec.gap_fd) || rec.mass == 0.0) continue;
    const double slope = rec.gap_fd / (rec.energy * rec.mass);
    if (slope < rec.gap_refined_lb) {
      if (!rec.violation_flags.empty()) rec.violation_flags += '|';
      rec.violation_flags += "mono";
    }
  }
}

}  // namespace gkdv
