#include "ftc/spectral.hpp"

#include "ftc/errors.hpp"

#include <algorithm>

namespace ftc {

double ftle(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
            const KernelSettings& settings) {
  if (epoch.tau == 0.0) throw ConfigError("ftle needs a nonzero epoch length");
  const Jacobian2 J = flow_jacobian(flow, z, epoch, settings.integrator, settings.jacobian);
  const auto s = svd2(J);
  if (!(s.sigma1 > 0.0)) throw NumericalError("ftle: vanishing flow-map derivative");
  return std::log(s.sigma1) / std::abs(epoch.tau);
}

double signed_line_angle(const Vec2& a, const Vec2& b) {
  double psi = std::atan2(cross(a, b), a.dot(b));
  if (psi > kPi / 2) psi -= kPi;
  if (psi <= -kPi / 2) psi += kPi;
  return psi;
}

FoliationSample foliation_from_jacobians(const Jacobian2& forward, const Jacobian2& backward_leg) {
  const auto fwd = svd2(forward);
  const auto bwd = svd2(backward_leg);
  FoliationSample out;
  out.f_s = fwd.v2;
  out.f_u = bwd.u1;
  out.sigma_forward[0] = fwd.sigma1;
  out.sigma_forward[1] = fwd.sigma2;
  out.sigma_backward[0] = bwd.sigma1;
  out.sigma_backward[1] = bwd.sigma2;
  out.degenerate = fwd.isotropic || bwd.isotropic;
  out.signed_theta = signed_line_angle(out.f_s, out.f_u);
  out.theta = std::abs(out.signed_theta);
  return out;
}

FoliationSample foliation_pair(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
                               const KernelSettings& settings) {
  if (epoch.tau == 0.0) throw ConfigError("foliation needs a nonzero epoch length");
  const Jacobian2 forward =
      flow_jacobian(flow, z, epoch, settings.integrator, settings.jacobian);
  Jacobian2 backward;
  try {
    const Point2 origin = flow_map(flow, z, Epoch{epoch.t0, -epoch.tau}, settings.integrator);
    backward = flow_jacobian(flow, origin, epoch.preceding(), settings.integrator,
                             settings.jacobian);
  } catch (const EscapeError& e) {
    throw EscapeError(std::string("backward leg: ") + e.what());
  }
  return foliation_from_jacobians(forward, backward);
}

}  // namespace ftc
