#include "fixtures.hpp"
#include "rendezvous/errors.hpp"
#include "rendezvous/kinematics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rendezvous;
using namespace rendezvous::testing;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("rotation_from_angle") {
  CHECK((rotation_from_angle(0.0) - Mat2::Identity()).norm() == 0.0);
  Mat2 quarter;
  quarter << 0, -1, 1, 0;
  CHECK((rotation_from_angle(pi / 2) - quarter).norm() < 1e-15);

  const Mat2 R = rotation_from_angle(2 * pi / 5);
  CHECK((R.col(0) - Vec2(std::cos(2 * pi / 5), std::sin(2 * pi / 5))).norm() < 1e-15);
  CHECK((R.col(1) - Vec2(-std::sin(2 * pi / 5), std::cos(2 * pi / 5))).norm() < 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-20, 20);
  for (int t = 0; t < 200; ++t) {
    const double th = ang(rng);
    const Mat2 Rt = rotation_from_angle(th);
    CHECK((Rt.transpose() * Rt - Mat2::Identity()).norm() < 1e-12);
    CHECK(std::abs(Rt.determinant() - 1.0) < 1e-12);
    CHECK((Rt.transpose() - rotation_from_angle(-th)).norm() < 1e-12);
    CHECK((Rt.transpose() - Rt.inverse()).norm() < 1e-12);
  }
}

TEST_CASE("skew") {
  Mat2 want;
  want << 0, -2.5, 2.5, 0;
  CHECK((skew(2.5) - want).norm() == 0.0);
}

TEST_CASE("body_frame") {
  CHECK((body_frame(Vec2(1, 0), 0.0) - Vec2(1, 0)).norm() < 1e-15);
  CHECK((body_frame(Vec2(1, 0), pi / 2) - Vec2(0, -1)).norm() < 1e-15);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 200; ++t) {
    const Vec2 v(nd(rng), nd(rng));
    const double th = 3 * nd(rng);
    CHECK(std::abs(body_frame(v, th).norm() - v.norm()) < 1e-12);
  }
}

TEST_CASE("unicycle_derivative") {
  auto d = unicycle_derivative({Vec2(3, 4), 1.0}, {0.0, 0.0});
  CHECK(d.xdot.norm() == 0.0);
  CHECK(d.theta_dot == 0.0);
  d = unicycle_derivative({Vec2::Zero(), 0.0}, {1.0, 0.0});
  CHECK((d.xdot - Vec2(1, 0)).norm() == 0.0);
  d = unicycle_derivative({Vec2::Zero(), pi / 2}, {2.0, 0.7});
  CHECK((d.xdot - Vec2(0, 2)).norm() < 1e-15);
  CHECK(d.theta_dot == 0.7);
}

TEST_CASE("relative_displacement") {
  const auto s = five_robot_start();
  CHECK((relative_displacement(s, 0, 1) - Vec2(-10, -20)).norm() == 0.0);
  CHECK(relative_displacement(s, 2, 2).norm() == 0.0);
  std::mt19937_64 rng(5);
  const auto r = random_state(6, rng);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK((relative_displacement(r, i, j) + relative_displacement(r, j, i)).norm() == 0.0);
  try {
    relative_displacement(s, 0, 5);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
}

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_angle(8 * pi / 5) == doctest::Approx(-2 * pi / 5));
  CHECK(wrap_angle(101.0) == doctest::Approx(std::remainder(101.0, 2 * pi)));
}

TEST_CASE("heading-angle integration matches matrix integration on SO(2)") {
  // theta_dot = omega(t) integrated as a scalar versus Rdot = R skew(omega)
  // integrated as a 2x2 matrix with RK4 and polar re-orthonormalization.
  auto omega = [](double t) { return std::sin(t) + 0.5 * std::cos(3 * t) + 0.2; };
  const double dt = 1e-3;
  double theta = 0.3;
  Mat2 R = rotation_from_angle(theta);
  const int steps = 10000;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const double w1 = omega(t), w2 = omega(t + dt / 2), w3 = omega(t + dt);
    theta += dt / 6 * (w1 + 4 * w2 + w3);

    const Mat2 k1 = R * skew(w1);
    const Mat2 k2 = (R + dt / 2 * k1) * skew(w2);
    const Mat2 k3 = (R + dt / 2 * k2) * skew(w2);
    const Mat2 k4 = (R + dt * k3) * skew(w3);
    R += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    Eigen::JacobiSVD<Mat2> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    R = svd.matrixU() * svd.matrixV().transpose();
  }
  CHECK((R - rotation_from_angle(theta)).norm() < 1e-6);
}
