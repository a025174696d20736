#include "ftc/flows.hpp"

#include "ftc/errors.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace ftc {

namespace {

struct KindName {
  FlowKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {FlowKind::double_gyre, "double_gyre"},
    {FlowKind::rossby_wave, "rossby_wave"},
    {FlowKind::rigid_rotation, "rigid_rotation"},
    {FlowKind::linear_saddle, "linear_saddle"},
    {FlowKind::custom_hamiltonian, "custom_hamiltonian"},
};

double take(std::map<std::string, double>& rest, const std::string& key, double fallback) {
  auto it = rest.find(key);
  if (it == rest.end()) return fallback;
  double v = it->second;
  rest.erase(it);
  if (!std::isfinite(v)) throw ConfigError("parameter '" + key + "' must be finite");
  return v;
}

void reject_leftovers(const std::map<std::string, double>& rest, FlowKind kind) {
  if (rest.empty()) return;
  throw ConfigError("unknown parameter '" + rest.begin()->first + "' for flow kind " +
                    std::string(to_string(kind)));
}

double sech2(double u) {
  const double c = std::cosh(u);
  return 1.0 / (c * c);
}

std::string fmt_point(const Point2& z, double t) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "z=(%.17g, %.17g), t=%.17g", z.x(), z.y(), t);
  return buf;
}

}  // namespace

std::string_view to_string(FlowKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

FlowKind parse_flow_kind(std::string_view name) {
  std::string s(name);
  for (auto& ch : s)
    if (ch == '-') ch = '_';
  for (const auto& kn : kKindNames)
    if (kn.name == s) return kn.kind;
  throw ConfigError("unknown flow kind '" + std::string(name) + "'");
}

double RossbyParams::wavenumber(int n) {
  return 2.0 * n / (kEarthRadiusKm * std::cos(kPi / 6.0));
}

RossbyParams RossbyParams::defaults(double U0_mps, bool comoving) {
  RossbyParams p;
  p.U0 = U0_mps;
  p.c2 = 0.2055 * p.U0;
  p.c3 = 0.462 * p.U0;
  p.c1 = p.c3;
  p.k1 = wavenumber(1);
  p.k2 = wavenumber(2);
  p.set_frequencies(comoving);
  return p;
}

void RossbyParams::set_frequencies(bool comoving) {
  const double ref = comoving ? c3 : 0.0;
  sigma1 = k1 * (c1 - ref) * kMpsToKmPerDay;
  sigma2 = k2 * (c2 - ref) * kMpsToKmPerDay;
}

std::array<double, 3> HamiltonianFactor::eval(double s, double t) const {
  switch (kind) {
    case Kind::one:
      return {1.0, 0.0, 0.0};
    case Kind::power: {
      if (a == 0.0) return {1.0, 0.0, 0.0};
      const double f = std::pow(s, a);
      const double d1 = a == 1.0 ? 1.0 : a * std::pow(s, a - 1.0);
      const double d2 = (a == 1.0) ? 0.0 : (a == 2.0 ? 2.0 : a * (a - 1.0) * std::pow(s, a - 2.0));
      return {f, d1, d2};
    }
    case Kind::cos: {
      const double ph = a * s - b * t + c;
      const double cs = std::cos(ph), sn = std::sin(ph);
      return {cs, -a * sn, -a * a * cs};
    }
    case Kind::sin: {
      const double ph = a * s - b * t + c;
      const double cs = std::cos(ph), sn = std::sin(ph);
      return {sn, a * cs, -a * a * sn};
    }
    case Kind::sech2: {
      const double u = (s - b) / a;
      const double S = sech2(u), T = std::tanh(u);
      return {S, -2.0 * S * T / a, 2.0 * S * (2.0 * T * T - S) / (a * a)};
    }
    case Kind::tanh: {
      const double u = (s - b) / a;
      const double S = sech2(u), T = std::tanh(u);
      return {T, S / a, -2.0 * S * T / (a * a)};
    }
  }
  return {0.0, 0.0, 0.0};
}

FlowSystem::FlowSystem(FlowKind kind, Model model, Bounds bounds,
                       std::map<std::string, double> params)
    : kind_(kind), model_(std::move(model)), bounds_(bounds), params_(std::move(params)) {}

FlowSystem FlowSystem::double_gyre(const DoubleGyreParams& p) {
  if (!(p.A > 0.0)) throw ConfigError("double_gyre: A must be > 0");
  if (!(p.epsilon >= 0.0 && p.epsilon < 0.5))
    throw ConfigError("double_gyre: epsilon must lie in [0, 0.5)");
  if (!(p.omega > 0.0)) throw ConfigError("double_gyre: omega must be > 0");
  return FlowSystem(FlowKind::double_gyre, p, Bounds{0.0, 2.0, 0.0, 1.0},
                    {{"A", p.A}, {"epsilon", p.epsilon}, {"omega", p.omega}});
}

FlowSystem FlowSystem::rossby_wave(const RossbyParams& p) {
  if (!(p.U0 > 0.0 && p.L > 0.0 && p.k1 > 0.0 && p.k2 > 0.0))
    throw ConfigError("rossby_wave: U0, L, k1, k2 must be > 0");
  const double zonal_period = kPi * RossbyParams::kEarthRadiusKm * std::cos(kPi / 6.0);
  Bounds b{0.0, zonal_period, -2.5 * p.L, 2.5 * p.L};
  std::map<std::string, double> params{
      {"U0", p.U0}, {"c1", p.c1}, {"c2", p.c2}, {"c3", p.c3}, {"A1", p.A1},
      {"A2", p.A2}, {"A3", p.A3}, {"L", p.L},   {"k1", p.k1}, {"k2", p.k2},
      {"sigma1", p.sigma1}, {"sigma2", p.sigma2}};
  RossbyParams internal = p;
  for (double* speed : {&internal.U0, &internal.c1, &internal.c2, &internal.c3})
    *speed *= RossbyParams::kMpsToKmPerDay;
  return FlowSystem(FlowKind::rossby_wave, internal, b, std::move(params));
}

FlowSystem FlowSystem::rigid_rotation(double omega) {
  if (!std::isfinite(omega)) throw ConfigError("rigid_rotation: omega must be finite");
  return FlowSystem(FlowKind::rigid_rotation, omega, Bounds{-1.0, 1.0, -1.0, 1.0},
                    {{"omega", omega}});
}

FlowSystem FlowSystem::linear_saddle(double lambda) {
  if (!std::isfinite(lambda)) throw ConfigError("linear_saddle: lambda must be finite");
  return FlowSystem(FlowKind::linear_saddle, lambda, Bounds{-1.0, 1.0, -1.0, 1.0},
                    {{"lambda", lambda}});
}

FlowSystem FlowSystem::custom(CustomHamiltonian h) {
  for (const auto& term : h.terms) {
    for (const auto* f : {&term.x, &term.y}) {
      using K = HamiltonianFactor::Kind;
      if ((f->kind == K::sech2 || f->kind == K::tanh) && !(f->a > 0.0))
        throw ConfigError("custom_hamiltonian: sech2/tanh length scale must be > 0");
    }
  }
  return FlowSystem(FlowKind::custom_hamiltonian, std::move(h), Bounds{-1.0, 1.0, -1.0, 1.0},
                    {{"terms", 0.0}});
}

FlowSystem FlowSystem::from_params(FlowKind kind, const std::map<std::string, double>& params,
                                   std::vector<HamiltonianTerm> terms) {
  auto rest = params;
  switch (kind) {
    case FlowKind::double_gyre: {
      DoubleGyreParams p;
      p.A = take(rest, "A", p.A);
      p.epsilon = take(rest, "epsilon", p.epsilon);
      p.omega = take(rest, "omega", p.omega);
      reject_leftovers(rest, kind);
      return double_gyre(p);
    }
    case FlowKind::rossby_wave: {
      const double U0 = take(rest, "U0", 44.31);
      const bool comoving = take(rest, "sigma_comoving", 1.0) != 0.0;
      RossbyParams p = RossbyParams::defaults(U0, comoving);
      const bool rederive = rest.count("c1") || rest.count("c2") || rest.count("c3") ||
                            rest.count("k1") || rest.count("k2");
      p.c3 = take(rest, "c3", p.c3);
      p.c2 = take(rest, "c2", p.c2);
      p.c1 = take(rest, "c1", p.c3);
      p.A1 = take(rest, "A1", p.A1);
      p.A2 = take(rest, "A2", p.A2);
      p.A3 = take(rest, "A3", p.A3);
      p.L = take(rest, "L", p.L);
      p.k1 = take(rest, "k1", p.k1);
      p.k2 = take(rest, "k2", p.k2);
      if (rederive) p.set_frequencies(comoving);
      p.sigma1 = take(rest, "sigma1", p.sigma1);
      p.sigma2 = take(rest, "sigma2", p.sigma2);
      reject_leftovers(rest, kind);
      return rossby_wave(p);
    }
    case FlowKind::rigid_rotation: {
      const double omega = take(rest, "omega", 1.0);
      reject_leftovers(rest, kind);
      return rigid_rotation(omega);
    }
    case FlowKind::linear_saddle: {
      const double lambda = take(rest, "lambda", 1.0);
      reject_leftovers(rest, kind);
      return linear_saddle(lambda);
    }
    case FlowKind::custom_hamiltonian: {
      reject_leftovers(rest, kind);
      return custom(CustomHamiltonian{std::move(terms)});
    }
  }
  throw ConfigError("unknown flow kind");
}

FlowSystem& FlowSystem::with_bounds(const Bounds& b) {
  if (!b.valid()) throw ConfigError("flow bounds must satisfy x_min < x_max and y_min < y_max");
  bounds_ = b;
  return *this;
}

const std::vector<HamiltonianTerm>& FlowSystem::terms() const {
  static const std::vector<HamiltonianTerm> empty;
  if (const auto* h = std::get_if<CustomHamiltonian>(&model_)) return h->terms;
  return empty;
}

Vec2 FlowSystem::velocity(const Point2& z, double t) const {
  const double x = z.x(), y = z.y();
  Vec2 g;
  switch (kind_) {
    case FlowKind::double_gyre: {
      const auto& p = std::get<DoubleGyreParams>(model_);
      const double a = p.epsilon * std::sin(p.omega * t);
      const double b = 1.0 - 2.0 * a;
      const double f = (a * x + b) * x;
      const double fx = 2.0 * a * x + b;
      const double apf = p.A * kPi;
      g = {apf * std::cos(kPi * f) * std::sin(kPi * y),
           -apf * std::sin(kPi * f) * fx * std::cos(kPi * y)};
      break;
    }
    case FlowKind::rossby_wave: {
      const auto& p = std::get<RossbyParams>(model_);
      const double S = sech2(y / p.L);
      const double T = std::tanh(y / p.L);
      const double ph3 = p.k1 * x;
      const double ph2 = p.k2 * x - p.sigma2 * t;
      const double ph1 = p.k1 * x - p.sigma1 * t;
      const double wave_c = p.A3 * std::cos(ph3) + p.A2 * std::cos(ph2) + p.A1 * std::cos(ph1);
      const double wave_s = p.A3 * p.k1 * std::sin(ph3) + p.A2 * p.k2 * std::sin(ph2) +
                            p.A1 * p.k1 * std::sin(ph1);
      g = {-p.c3 + p.U0 * S + 2.0 * p.U0 * S * T * wave_c, -p.U0 * p.L * S * wave_s};
      break;
    }
    case FlowKind::rigid_rotation: {
      const double w = std::get<double>(model_);
      g = {-w * y, w * x};
      break;
    }
    case FlowKind::linear_saddle: {
      const double l = std::get<double>(model_);
      g = {l * x, -l * y};
      break;
    }
    case FlowKind::custom_hamiltonian: {
      g.setZero();
      for (const auto& term : std::get<CustomHamiltonian>(model_).terms) {
        const auto X = term.x.eval(x, t);
        const auto Y = term.y.eval(y, t);
        g.x() -= term.amplitude * X[0] * Y[1];
        g.y() += term.amplitude * X[1] * Y[0];
      }
      break;
    }
  }
  if (!g.allFinite()) throw NumericalError("non-finite velocity at " + fmt_point(z, t));
  return g;
}

Vec2 FlowSystem::velocity_difference(const Point2& c, const Vec2& d, double t, const Vec2& gc) const {
  switch (kind_) {
    case FlowKind::rigid_rotation: {
      const double w = std::get<double>(model_);
      return {-w * d.y(), w * d.x()};
    }
    case FlowKind::linear_saddle: {
      const double l = std::get<double>(model_);
      return {l * d.x(), -l * d.y()};
    }
    case FlowKind::custom_hamiltonian:
      if (std::get<CustomHamiltonian>(model_).terms.empty()) return Vec2::Zero();
      [[fallthrough]];
    default:
      return velocity(c + d, t) - gc;
  }
}

Matrix2<double> FlowSystem::velocity_gradient(const Point2& z, double t) const {
  const double x = z.x(), y = z.y();
  Matrix2<double> G;
  switch (kind_) {
    case FlowKind::double_gyre: {
      const auto& p = std::get<DoubleGyreParams>(model_);
      const double a = p.epsilon * std::sin(p.omega * t);
      const double b = 1.0 - 2.0 * a;
      const double f = (a * x + b) * x;
      const double fx = 2.0 * a * x + b;
      const double cf = std::cos(kPi * f), sf = std::sin(kPi * f);
      const double cy = std::cos(kPi * y), sy = std::sin(kPi * y);
      const double k = p.A * kPi * kPi;
      G << -k * sf * fx * sy, k * cf * cy,
          -p.A * kPi * (kPi * cf * fx * fx + 2.0 * a * sf) * cy, k * sf * fx * sy;
      break;
    }
    case FlowKind::rossby_wave: {
      const auto& p = std::get<RossbyParams>(model_);
      const double S = sech2(y / p.L);
      const double T = std::tanh(y / p.L);
      const double dS = -2.0 * S * T / p.L;
      const double dST = (S * S - 2.0 * S * T * T) / p.L;
      const double ph3 = p.k1 * x;
      const double ph2 = p.k2 * x - p.sigma2 * t;
      const double ph1 = p.k1 * x - p.sigma1 * t;
      const double wc = p.A3 * std::cos(ph3) + p.A2 * std::cos(ph2) + p.A1 * std::cos(ph1);
      const double wks = p.A3 * p.k1 * std::sin(ph3) + p.A2 * p.k2 * std::sin(ph2) +
                         p.A1 * p.k1 * std::sin(ph1);
      const double wkkc = p.A3 * p.k1 * p.k1 * std::cos(ph3) +
                          p.A2 * p.k2 * p.k2 * std::cos(ph2) + p.A1 * p.k1 * p.k1 * std::cos(ph1);
      G << -2.0 * p.U0 * S * T * wks, p.U0 * dS + 2.0 * p.U0 * dST * wc,
          -p.U0 * p.L * S * wkkc, -p.U0 * p.L * dS * wks;
      break;
    }
    case FlowKind::rigid_rotation: {
      const double w = std::get<double>(model_);
      G << 0.0, -w, w, 0.0;
      break;
    }
    case FlowKind::linear_saddle: {
      const double l = std::get<double>(model_);
      G << l, 0.0, 0.0, -l;
      break;
    }
    case FlowKind::custom_hamiltonian: {
      G.setZero();
      for (const auto& term : std::get<CustomHamiltonian>(model_).terms) {
        const auto X = term.x.eval(x, t);
        const auto Y = term.y.eval(y, t);
        const double A = term.amplitude;
        G(0, 0) -= A * X[1] * Y[1];
        G(0, 1) -= A * X[0] * Y[2];
        G(1, 0) += A * X[2] * Y[0];
        G(1, 1) += A * X[1] * Y[1];
      }
      break;
    }
  }
  if (!G.allFinite()) throw NumericalError("non-finite velocity gradient at " + fmt_point(z, t));
  return G;
}

namespace {

using FK = HamiltonianFactor::Kind;

struct FactorName {
  FK kind;
  std::string_view name;
  std::size_t arity;
};

constexpr FactorName kFactorNames[] = {
    {FK::one, "one", 0},   {FK::power, "pow", 1},   {FK::cos, "cos", 3},
    {FK::sin, "sin", 3},   {FK::sech2, "sech2", 2}, {FK::tanh, "tanh", 2},
};

double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

}  // namespace

std::size_t parse_factor(const std::vector<std::string>& tokens, std::size_t pos,
                         HamiltonianFactor& out) {
  if (pos >= tokens.size()) throw ConfigError("hamiltonian term: missing factor");
  for (const auto& fn : kFactorNames) {
    if (tokens[pos] != fn.name) continue;
    if (pos + fn.arity >= tokens.size())
      throw ConfigError("hamiltonian term: factor '" + tokens[pos] + "' needs " +
                        std::to_string(fn.arity) + " arguments");
    out = HamiltonianFactor{};
    out.kind = fn.kind;
    double* slots[3] = {&out.a, &out.b, &out.c};
    for (std::size_t k = 0; k < fn.arity; ++k) *slots[k] = to_double(tokens[pos + 1 + k]);
    return 1 + fn.arity;
  }
  throw ConfigError("hamiltonian term: unknown factor '" + tokens[pos] + "'");
}

HamiltonianTerm parse_term(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  if (tokens.empty()) throw ConfigError("hamiltonian term: empty");
  HamiltonianTerm term;
  term.amplitude = to_double(tokens[0]);
  std::size_t pos = 1;
  pos += parse_factor(tokens, pos, term.x);
  pos += parse_factor(tokens, pos, term.y);
  if (pos != tokens.size())
    throw ConfigError("hamiltonian term: trailing tokens in '" + std::string(text) + "'");
  return term;
}

std::string format_term(const HamiltonianTerm& term) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", term.amplitude);
  out += buf;
  for (const auto* f : {&term.x, &term.y}) {
    for (const auto& fn : kFactorNames) {
      if (fn.kind != f->kind) continue;
      out += ' ';
      out += fn.name;
      const double slots[3] = {f->a, f->b, f->c};
      for (std::size_t k = 0; k < fn.arity; ++k) {
        std::snprintf(buf, sizeof buf, " %.17g", slots[k]);
        out += buf;
      }
    }
  }
  return out;
}

}  // namespace ftc
