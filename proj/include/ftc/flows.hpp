#pragma once

#include "ftc/types.hpp"

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ftc {

enum class FlowKind { double_gyre, rossby_wave, rigid_rotation, linear_saddle, custom_hamiltonian };

std::string_view to_string(FlowKind kind);
/// Accepts both `double_gyre` and `double-gyre` spellings.
FlowKind parse_flow_kind(std::string_view name);

/// H = A cos(pi f(x,t)) cos(pi y), f = eps sin(wt) x^2 + (1 - 2 eps sin(wt)) x.
struct DoubleGyreParams {
  double A = 0.1;
  double epsilon = 0.1;
  double omega = 2.0 * kPi / 10.0;
};

/// Zonal jet with three travelling waves, in kilometres and days.
///
/// H = c3 y - U0 L tanh(y/L) + U0 L sech^2(y/L) [A3 cos(k1 x) + A2 cos(k2 x - sigma2 t)
///                                                + A1 cos(k1 x - sigma1 t)]
///
/// Speeds (U0, c1, c2, c3) are given in m/s and converted to km/day internally;
/// sigma is in 1/day, k in 1/km and L in km.
struct RossbyParams {
  double U0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double A1 = 0.075;
  double A2 = 0.12;
  double A3 = 0.3;
  double L = 1770.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;

  static constexpr double kEarthRadiusKm = 6371.0;
  static constexpr double kMpsToKmPerDay = 86.4;

  /// Wavenumber 2n / (r_e cos 30deg) of zonal mode n.
  static double wavenumber(int n);

  /// Defaults built from U0 in m/s: c2 = 0.2055 U0, c3 = 0.462 U0, c1 = c3, and
  /// sigma_n = k_n (c_n - c3) when `comoving`, else sigma_n = k_n c_n.
  static RossbyParams defaults(double U0_mps = 44.31, bool comoving = true);

  /// Recomputes sigma1, sigma2 from the phase speeds and wavenumbers.
  void set_frequencies(bool comoving);
};

/// One factor of a separable Hamiltonian term, as a function of a single coordinate s.
struct HamiltonianFactor {
  enum class Kind { one, power, cos, sin, sech2, tanh };
  Kind kind = Kind::one;
  /// power: exponent. cos/sin: wavenumber k. sech2/tanh: length scale.
  double a = 0.0;
  /// cos/sin: frequency w in cos(k s - w t + phase). sech2/tanh: center.
  double b = 0.0;
  /// cos/sin: phase.
  double c = 0.0;

  /// Value and first two derivatives in s at time t.
  std::array<double, 3> eval(double s, double t) const;
};

/// amplitude * X(x, t) * Y(y, t)
struct HamiltonianTerm {
  double amplitude = 1.0;
  HamiltonianFactor x;
  HamiltonianFactor y;
};

/// Sum of separable terms. An empty term list is the identity (zero) flow.
struct CustomHamiltonian {
  std::vector<HamiltonianTerm> terms;
};

/// Time-dependent planar velocity field g(z, t) over a rectangular domain.
class FlowSystem {
 public:
  static FlowSystem double_gyre(const DoubleGyreParams& p = {});
  static FlowSystem rossby_wave(const RossbyParams& p = RossbyParams::defaults());
  static FlowSystem rigid_rotation(double omega = 1.0);
  static FlowSystem linear_saddle(double lambda = 1.0);
  static FlowSystem custom(CustomHamiltonian h);
  static FlowSystem identity() { return custom({}); }

  /// Builds a flow from named parameters; missing ones take documented defaults and
  /// unknown names throw ConfigError.
  static FlowSystem from_params(FlowKind kind, const std::map<std::string, double>& params,
                                std::vector<HamiltonianTerm> terms = {});

  FlowSystem& with_bounds(const Bounds& b);

  FlowKind kind() const { return kind_; }
  const Bounds& bounds() const { return bounds_; }
  /// Fully resolved parameters (defaults included), for provenance.
  const std::map<std::string, double>& params() const { return params_; }
  const std::vector<HamiltonianTerm>& terms() const;

  Vec2 velocity(const Point2& z, double t) const;
  /// g(c + d, t) - gc with gc = g(c, t) supplied by the caller. Linear flows return the exact
  /// image of d, so opposite offsets stay exactly opposite.
  Vec2 velocity_difference(const Point2& c, const Vec2& d, double t, const Vec2& gc) const;
  /// Analytic spatial gradient: entry (i, j) is d g_i / d z_j.
  Matrix2<double> velocity_gradient(const Point2& z, double t) const;

 private:
  using Model = std::variant<DoubleGyreParams, RossbyParams, double, CustomHamiltonian>;
  FlowSystem(FlowKind kind, Model model, Bounds bounds, std::map<std::string, double> params);

  FlowKind kind_;
  Model model_;
  Bounds bounds_;
  std::map<std::string, double> params_;
};

inline Vec2 velocity(const FlowSystem& flow, const Point2& z, double t) {
  return flow.velocity(z, t);
}

/// Parses `kind args...` for one factor, e.g. `cos 3.14 0 0` or `pow 2`.
/// Returns the number of tokens consumed.
std::size_t parse_factor(const std::vector<std::string>& tokens, std::size_t pos,
                         HamiltonianFactor& out);
/// Parses `amp <x factor> <y factor>`.
HamiltonianTerm parse_term(std::string_view text);
std::string format_term(const HamiltonianTerm& term);

}  // namespace ftc
