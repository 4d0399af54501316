#include "gkdv/ode_inequality.hpp"

#include "gkdv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gkdv {

void OdeParams::validate() const {
  if (!(alpha > 0.0)) throw ConfigurationError("ode alpha must be positive");
  if (!(beta > 0.0)) throw ConfigurationError("ode beta must be positive");
  if (!std::isfinite(gamma)) throw ConfigurationError("ode gamma must be finite");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("ode exponent p must exceed 1");
  if (!(delta > 0.0)) throw ConfigurationError("ode floor delta must be positive");
}

std::vector<double> OdeTrajectory::times() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.t);
  return out;
}

std::vector<double> OdeTrajectory::values() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.f);
  return out;
}

double ode_max_step(const OdeParams& params, double f0) {
  return 1e-3 * std::max(1.0, std::sqrt(f0) / params.beta);
}

OdeTrajectory simulate_equality_ode(const OdeParams& params, double f0, double T, double dt,
                                    const OdeRunOptions& options) {
  params.validate();
  if (!(f0 >= params.delta)) throw ConfigurationError("f0 must be at least delta");
  if (!(T > 0.0)) throw ConfigurationError("ode horizon must be positive");
  if (!(dt > 0.0) || dt > ode_max_step(params, f0) * (1.0 + 1e-12))
    throw ConfigurationError("ode step " + std::to_string(dt) + " exceeds " + std::to_string(ode_max_step(params, f0)));
  if (options.sample_every < 1) throw ConfigurationError("sample_every must be >= 1");

  const double a = params.alpha, b = params.beta, c = params.gamma;
  const double e = 0.5 * (1.0 - params.p);
  auto force = [&](double t, double f) { return options.forcing ? options.forcing(t, f) : 0.0; };
  auto df = [&](double t, double f, double F) { return a * F - b * std::sqrt(std::max(f, params.delta)) - c + force(t, f); };
  auto dF = [&](double f) { return std::pow(std::max(f, params.delta), e); };

  OdeTrajectory traj{params, {}, std::nullopt};
  double t = 0.0, f = f0, F = 0.0;
  traj.states.push_back({t, f, F, df(t, f, F)});

  // One RK4 step; fails when a stage would sample f below the floor, since the
  // memory term f^{(1-p)/2} is stiff there.
  auto rk4 = [&](double h, double& f_out, double& F_out) {
    const double k1f = df(t, f, F), k1F = dF(f);
    const double f2 = f + h / 2 * k1f;
    const double k2f = df(t + h / 2, f2, F + h / 2 * k1F), k2F = dF(f2);
    const double f3 = f + h / 2 * k2f;
    const double k3f = df(t + h / 2, f3, F + h / 2 * k2F), k3F = dF(f3);
    const double f4 = f + h * k3f;
    const double k4f = df(t + h, f4, F + h * k3F), k4F = dF(f4);
    f_out = f + h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    F_out = F + h / 6 * (k1F + 2 * k2F + 2 * k3F + k4F);
    if (!std::isfinite(f_out) || !std::isfinite(F_out))
      throw NumericError("ode state became non-finite at t = " + std::to_string(t));
    return std::min({f2, f3, f4, f_out}) >= params.delta;
  };

  const long long steps = static_cast<long long>(std::ceil(T / dt - 1e-9));
  const double h_min = 1e-12 * dt;
  for (long long i = 1; i <= steps; ++i) {
    const double t_next = i == steps ? T : static_cast<double>(i) * dt;
    // Halve the step near the floor; give up once it becomes negligible.
    double h = t_next - t;
    while (t < t_next) {
      h = std::min(h, t_next - t);
      double f_next, F_next;
      if (rk4(h, f_next, F_next)) {
        t = t + h >= t_next ? t_next : t + h;
        f = f_next;
        F = F_next;
        continue;
      }
      h *= 0.5;
      if (h < h_min) {
        const double slope = df(t, f, F);
        const double lead = slope < 0.0 ? std::min((f - params.delta) / -slope, 2.0 * h) : 0.0;
        traj.floor_crossing = t + lead;
        traj.states.push_back({*traj.floor_crossing, params.delta, F + lead * dF(f), df(t, params.delta, F)});
        return traj;
      }
    }
    if (i % options.sample_every == 0 || i == steps) traj.states.push_back({t, f, F, df(t, f, F)});
  }
  return traj;
}

double sublevel_measure(std::span<const double> t, std::span<const double> f, double z) {
  if (!(z > 0.0)) throw DomainError("sublevel height must be positive");
  if (t.size() != f.size() || t.size() < 2) throw PreconditionError("sublevel measure needs matching samples");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    const double f0 = f[i], f1 = f[i + 1];
    if (f0 <= z && f1 <= z) {
      total += h;
    } else if (f0 <= z || f1 <= z) {
      // f crosses z once inside the segment
      const double frac = (z - f0) / (f1 - f0);
      total += f0 <= z ? frac * h : (1.0 - frac) * h;
    }
  }
  return total;
}

double sublevel_measure(const OdeTrajectory& traj, double z) {
  const auto t = traj.times();
  const auto f = traj.values();
  return sublevel_measure(t, f, z);
}

SublevelFit fit_sublevel_exponent(std::span<const double> t, std::span<const double> f,
                                  std::span<const double> z_grid) {
  const double horizon = t.back() - t.front();
  std::vector<double> lx, ly;
  for (double z : z_grid) {
    const double m = sublevel_measure(t, f, z);
    if (m <= 0.0 || m >= horizon * (1.0 - 1e-12)) continue;
    lx.push_back(std::log(z));
    ly.push_back(std::log(m));
  }
  const int k = static_cast<int>(lx.size());
  if (k < 5) throw DegenerateInputError("sublevel fit needs at least 5 informative z values, got " + std::to_string(k));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < k; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = k * sxx - sx * sx;
  if (!(denom > 0.0)) throw DegenerateInputError("sublevel fit with a single distinct z");
  const double slope = (k * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / k;
  return {slope, std::exp(intercept), k};
}

SublevelFit fit_sublevel_exponent(const OdeTrajectory& traj, std::span<const double> z_grid) {
  const auto t = traj.times();
  const auto f = traj.values();
  return fit_sublevel_exponent(t, f, z_grid);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw DomainError("log grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out[i] = std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo)));
  }
  return out;
}

double lemma3_threshold(const OdeParams& params) {
  return std::pow(params.alpha / (params.beta * params.beta), 2.0 / (params.p - 1.0));
}

Lemma3Certificate lemma3_certificate(const OdeParams& params, double f0, double T) {
  params.validate();
  Lemma3Certificate cert{};
  cert.threshold = lemma3_threshold(params);
  cert.hypothesis_ok = f0 < cert.threshold && params.gamma <= 0.0;
  cert.f0 = f0;
  cert.T = T;
  const OdeTrajectory traj = simulate_equality_ode(params, f0, T, ode_max_step(params, f0));
  cert.inf_f = f0;
  for (const auto& s : traj.states) cert.inf_f = std::min(cert.inf_f, s.f);
  cert.floor_crossing = traj.floor_crossing;
  cert.trapped = !traj.floor_crossing && cert.inf_f >= 0.25 * f0;
  return cert;
}

double barrier_value(double x, double f0, double beta) {
  if (!(beta > 0.0)) throw DomainError("barrier needs beta > 0");
  const double r = 2.0 * std::sqrt(f0) - beta * x;
  return 0.25 * r * r;
}

}  // namespace gkdv
