#pragma once

#include "ftc/integrate.hpp"
#include "ftc/types.hpp"

#include <cmath>

namespace ftc {

/// Relative singular-value gap below which a 2x2 map is treated as isotropic.
inline constexpr double kIsotropicGap = 1e-10;

/// M = sigma1 u1 v1^T + sigma2 u2 v2^T with sigma1 >= sigma2 >= 0.
///
/// Signs: v1 has a nonnegative x component (nonnegative y on a tie), v2 = perp(v1),
/// and each u_k follows from M v_k = sigma_k u_k.
template <typename Scalar>
struct Svd2 {
  Vector2<Scalar> u1, u2, v1, v2;
  Scalar sigma1{}, sigma2{};
  bool isotropic = false;

  Matrix2<Scalar> U() const {
    Matrix2<Scalar> m;
    m << u1, u2;
    return m;
  }
  Matrix2<Scalar> V() const {
    Matrix2<Scalar> m;
    m << v1, v2;
    return m;
  }
  Matrix2<Scalar> reconstruct() const {
    return sigma1 * u1 * v1.transpose() + sigma2 * u2 * v2.transpose();
  }
};

/// Closed-form SVD of a 2x2 matrix.
///
/// Splits M into a scaled rotation and a scaled reflection,
///   M = [E+F, G-H; G+H, E-F],
/// so that M = R(phi) diag(Q+R, Q-R) R(theta) with Q = |(E,H)| and R = |(F,G)|.
template <typename Scalar>
Svd2<Scalar> svd2(const Matrix2<Scalar>& m) {
  using std::atan2;
  using std::cos;
  using std::fma;
  using std::hypot;
  using std::sin;

  const Scalar E = (m(0, 0) + m(1, 1)) / 2;
  const Scalar F = (m(0, 0) - m(1, 1)) / 2;
  const Scalar G = (m(1, 0) + m(0, 1)) / 2;
  const Scalar H = (m(1, 0) - m(0, 1)) / 2;
  const Scalar Q = hypot(E, H);
  const Scalar R = hypot(F, G);
  const Scalar a1 = atan2(G, F);
  const Scalar a2 = atan2(H, E);
  const Scalar theta = (a2 - a1) / 2;
  const Scalar phi = (a2 + a1) / 2;

  Svd2<Scalar> s;
  s.sigma1 = Q + R;
  // Q - R = det(M) / (Q + R); Kahan's fused difference of products keeps det exact
  // to a few ulps, so sigma2 stays accurate for ill-conditioned M.
  const Scalar w = m(0, 1) * m(1, 0);
  const Scalar det = fma(m(0, 0), m(1, 1), -w) + fma(-m(0, 1), m(1, 0), w);
  Scalar sy = s.sigma1 > 0 ? det / s.sigma1 : Scalar(0);
  s.u1 = {cos(phi), sin(phi)};
  s.u2 = {-sin(phi), cos(phi)};
  s.v1 = {cos(theta), -sin(theta)};
  s.v2 = {sin(theta), cos(theta)};
  if (sy < 0) {
    sy = -sy;
    s.u2 = -s.u2;
  }
  s.sigma2 = sy;

  if (s.v1.x() < 0 || (s.v1.x() == 0 && s.v1.y() < 0)) {
    s.v1 = -s.v1;
    s.u1 = -s.u1;
  }
  if (s.v2.dot(perp(s.v1)) < 0) {
    s.v2 = -s.v2;
    s.u2 = -s.u2;
  }
  s.isotropic = s.sigma1 == 0 || (s.sigma1 - s.sigma2) / s.sigma1 < Scalar(kIsotropicGap);
  return s;
}

/// Integration and differentiation settings shared by the per-point kernels.
struct KernelSettings {
  IntegratorSettings integrator;
  JacobianSettings jacobian;
};

/// (1/|tau|) log sigma1(DPhi).
double ftle(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
            const KernelSettings& settings = {});

struct FoliationSample {
  /// Second right singular vector of the forward Jacobian at z.
  Vec2 f_s = Vec2::Zero();
  /// First left singular vector of the forward Jacobian over the preceding epoch,
  /// evaluated at the backward image of z.
  Vec2 f_u = Vec2::Zero();
  /// Unsigned splitting angle in [0, pi/2].
  double theta = 0.0;
  /// Splitting angle with orientation, folded to (-pi/2, pi/2]; |signed_theta| == theta.
  double signed_theta = 0.0;
  double sigma_forward[2] = {0.0, 0.0};
  double sigma_backward[2] = {0.0, 0.0};
  bool degenerate = false;
};

/// Angle between two undirected lines, folded to (-pi/2, pi/2].
double signed_line_angle(const Vec2& a, const Vec2& b);

FoliationSample foliation_pair(const FlowSystem& flow, const Point2& z, const Epoch& epoch,
                               const KernelSettings& settings = {});

/// Foliation pair from explicit Jacobians: `forward` at z, `backward_leg` the forward
/// Jacobian over the preceding epoch at the backward image of z.
FoliationSample foliation_from_jacobians(const Jacobian2& forward, const Jacobian2& backward_leg);

}  // namespace ftc
