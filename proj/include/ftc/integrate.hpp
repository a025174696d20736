#pragma once

#include "ftc/errors.hpp"
#include "ftc/flows.hpp"
#include "ftc/types.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace ftc {

/// Time interval [t0, t0 + tau]; tau < 0 integrates backward.
struct Epoch {
  double t0 = 0.0;
  double tau = 1.0;

  double t1() const { return t0 + tau; }
  /// The epoch that undoes this one: [t0 + tau, t0].
  Epoch inverse() const { return {t0 + tau, -tau}; }
  /// The backward leg ending at t0: [t0 - tau, t0].
  Epoch preceding() const { return {t0 - tau, tau}; }
};

enum class Integrator { rk4, rk45 };
enum class JacobianMethod { finite_difference, variational };

std::string_view to_string(Integrator m);
Integrator parse_integrator(std::string_view name);
std::string_view to_string(JacobianMethod m);
JacobianMethod parse_jacobian_method(std::string_view name);

struct IntegratorSettings {
  Integrator method = Integrator::rk4;
  /// Fixed RK4 step magnitude; 0 selects |tau| / default_steps.
  double step = 0.0;
  int default_steps = 500;
  /// Embedded 4(5) tolerances.
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  /// Trajectories leaving the domain scaled by this factor raise EscapeError; <= 0 disables.
  double guard_factor = 10.0;
};

struct JacobianSettings {
  JacobianMethod method = JacobianMethod::finite_difference;
  /// Stencil half-width; 0 selects 1e-4 of the domain width.
  double h = 0.0;
};

/// Escape of one member of an advected bundle. `member` is 0 for the reference point
/// and k for the k-th offset.
class BundleEscapeError : public EscapeError {
 public:
  BundleEscapeError(const std::string& what, std::size_t member)
      : EscapeError(what), member_(member) {}
  std::size_t member() const { return member_; }

 private:
  std::size_t member_;
};

/// Image of a reference point and of nearby points stored as offsets from it.
struct BundleImage {
  Point2 center;
  std::vector<Vec2> offsets;

  Point2 point(std::size_t k) const { return center + offsets[k]; }
};

Point2 flow_map(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
                const IntegratorSettings& settings = {});

/// Advects `center` and the points `center + offsets[k]` with one shared step sequence.
/// Offsets are integrated as differences from the reference trajectory, so their images
/// keep full relative precision even when they are tiny compared to |center|.
BundleImage advect_bundle(const FlowSystem& flow, const Point2& center,
                          std::span<const Vec2> offsets, const Epoch& epoch,
                          const IntegratorSettings& settings = {});

/// DPhi over the epoch. Finite differences use the four points z +- h e_k.
Jacobian2 flow_jacobian(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
                        const IntegratorSettings& settings = {},
                        const JacobianSettings& jac = {});

/// Point and its flow-map derivative from one call.
struct FlowMapDerivative {
  Point2 image;
  Jacobian2 jacobian;
};

FlowMapDerivative flow_map_with_jacobian(const FlowSystem& flow, const Point2& z,
                                         const Epoch& epoch,
                                         const IntegratorSettings& settings = {},
                                         const JacobianSettings& jac = {});

std::vector<Point2> advect_polyline(const FlowSystem& flow, std::span<const Point2> points,
                                    const Epoch& epoch, const IntegratorSettings& settings = {});

}  // namespace ftc
