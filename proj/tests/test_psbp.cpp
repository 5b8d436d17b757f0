#include <doctest.h>

#include <cmath>

#include "bnpnc/errors.hpp"
#include "bnpnc/psbp.hpp"
#include "bnpnc/rng.hpp"

using namespace bnpnc;
using psbp::KnotGrid;

TEST_CASE("make_knots places interior cutpoints at type-7 quantiles") {
  Eigen::VectorXd x(8);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  const KnotGrid knots = psbp::make_knots(x, 4);
  REQUIRE(knots.segments() == 4);
  CHECK(knots.cutpoints()[0] == 1.0);
  CHECK(knots.cutpoints()[1] == doctest::Approx(2.75).epsilon(1e-14));
  CHECK(knots.cutpoints()[2] == doctest::Approx(4.5).epsilon(1e-14));
  CHECK(knots.cutpoints()[3] == doctest::Approx(6.25).epsilon(1e-14));
  CHECK(knots.cutpoints()[4] == 8.0);
}

TEST_CASE("make_knots degenerate and failure cases") {
  Eigen::VectorXd x(8);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  const KnotGrid one = psbp::make_knots(x, 1);
  CHECK(one.segments() == 1);
  CHECK(one.cutpoints()[0] == 1.0);
  CHECK(one.cutpoints()[1] == 8.0);

  Eigen::VectorXd few(6);
  few << 1, 1, 2, 2, 3, 3;  // 3 distinct values
  CHECK_THROWS_AS(psbp::make_knots(few, 4), ValidationError);

  Eigen::VectorXd tied(12);
  tied << 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 3, 4;  // 5 distinct values, but quantiles collapse
  CHECK_THROWS_AS(psbp::make_knots(tied, 4), ValidationError);
}

TEST_CASE("segment lookup follows the half-open convention") {
  Eigen::VectorXd cuts(5);
  cuts << 0, 1, 2, 3, 4;
  const KnotGrid knots{cuts};
  CHECK(knots.segment_of(0.0) == 1);
  CHECK(knots.segment_of(0.999) == 1);
  CHECK(knots.segment_of(1.0) == 2);
  CHECK(knots.segment_of(2.5) == 3);
  CHECK(knots.segment_of(3.0) == 4);
  CHECK(knots.segment_of(4.0) == 4);   // right endpoint joins the last segment
  CHECK(knots.segment_of(-5.0) == 1);  // extrapolation uses boundary segments
  CHECK(knots.segment_of(9.0) == 4);
}

TEST_CASE("alpha_at evaluates the segment's slope with the shared intercept") {
  Eigen::VectorXd cuts(5);
  cuts << 0, 1, 2, 3, 4;
  const KnotGrid knots{cuts};
  Eigen::RowVectorXd eta(5);
  eta << 0.5, 1, 2, 3, 4;
  CHECK(psbp::alpha_at(2.5, eta, knots) == 8.0);  // segment 3: 0.5 + 3*2.5
  CHECK(psbp::alpha_at(4.0, eta, knots) == doctest::Approx(0.5 + 4.0 * 4.0));
  CHECK(psbp::alpha_at(-1.0, eta, knots) == doctest::Approx(0.5 - 1.0));
  Eigen::RowVectorXd flat(5);
  flat << 0.7, 0, 0, 0, 0;
  for (double x : {-3.0, 0.2, 1.7, 3.9, 8.0}) {
    CHECK(psbp::alpha_at(x, flat, knots) == 0.7);
  }
}

TEST_CASE("alpha_at is linear within a segment") {
  Eigen::VectorXd cuts(4);
  cuts << -1, 0, 1, 2;
  const KnotGrid knots{cuts};
  RngStream rng(4);
  Eigen::RowVectorXd eta(4);
  for (int trial = 0; trial < 200; ++trial) {
    for (int j = 0; j < 4; ++j) eta[j] = rng.normal();
    const double a = 0.05 + 0.8 * rng.uniform();  // inside segment 2 = [0,1)
    const double b = 0.05 + 0.8 * rng.uniform();
    const double mid = 0.5 * (a + b);
    const double lhs = psbp::alpha_at(mid, eta, knots);
    const double rhs = 0.5 * (psbp::alpha_at(a, eta, knots) + psbp::alpha_at(b, eta, knots));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("stick_break reference values") {
  Eigen::VectorXd zero2(2);
  zero2 << 0, 0;
  const Eigen::VectorXd symmetric = psbp::stick_break(zero2);
  CHECK(symmetric[0] == 0.5);
  CHECK(symmetric[1] == 0.25);
  CHECK(symmetric[2] == 0.25);

  Eigen::VectorXd saturated(1);
  saturated << 10.0;
  const Eigen::VectorXd sat = psbp::stick_break(saturated);
  CHECK(sat[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(sat[1] < 1e-12);

  Eigen::VectorXd mixed(2);
  mixed << 0.5, -0.5;
  const Eigen::VectorXd w = psbp::stick_break(mixed);
  CHECK(w[0] == doctest::Approx(0.69146246127401312).epsilon(1e-13));
  CHECK(w[1] == doctest::Approx(0.095195412803089866).epsilon(1e-13));
  CHECK(w[2] == doctest::Approx(0.21334212592289703).epsilon(1e-13));
}

TEST_CASE("stick_break outputs exact simplex points for random inputs") {
  RngStream rng(17);
  for (int trial = 0; trial < 20000; ++trial) {
    const int K = 1 + static_cast<int>(rng.uniform() * 8);
    Eigen::VectorXd alphas(K - 1);
    for (int k = 0; k + 1 < K; ++k) {
      alphas[k] = -40.0 + 80.0 * rng.uniform();
    }
    const Eigen::VectorXd w = psbp::stick_break(alphas);
    REQUIRE(w.size() == K);
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
      CHECK(w[k] >= 0.0);
      CHECK(w[k] <= 1.0);
      sum += w[k];
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("stick_break is monotone in each component's own alpha") {
  RngStream rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd alphas(3);
    for (int k = 0; k < 3; ++k) alphas[k] = rng.normal();
    const int k = static_cast<int>(rng.uniform() * 3);
    Eigen::VectorXd bumped = alphas;
    bumped[k] += 0.3;
    CHECK(psbp::stick_break(bumped)[k] > psbp::stick_break(alphas)[k]);
  }
}

TEST_CASE("log_stick_break agrees with stick_break") {
  RngStream rng(29);
  for (int trial = 0; trial < 2000; ++trial) {
    Eigen::VectorXd alphas(4);
    for (int k = 0; k < 4; ++k) alphas[k] = rng.normal(0, 2);
    const Eigen::VectorXd w = psbp::stick_break(alphas);
    const Eigen::VectorXd lw = psbp::log_stick_break(alphas);
    for (int k = 0; k < 5; ++k) {
      CHECK(std::exp(lw[k]) == doctest::Approx(w[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("weights_at composes alpha_at and stick_break") {
  Eigen::VectorXd x(8);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  const KnotGrid knots = psbp::make_knots(x, 4);

  Eigen::MatrixXd eta_one = Eigen::MatrixXd::Zero(1, 5);
  const Eigen::VectorXd w1 = psbp::weights_at(3.3, eta_one, knots);
  REQUIRE(w1.size() == 1);
  CHECK(w1[0] == 1.0);

  Eigen::MatrixXd eta_zero = Eigen::MatrixXd::Zero(3, 5);
  const Eigen::VectorXd at2 = psbp::weights_at(2.0, eta_zero, knots);
  const Eigen::VectorXd at7 = psbp::weights_at(7.0, eta_zero, knots);
  CHECK((at2 - at7).cwiseAbs().maxCoeff() == 0.0);
  CHECK(at2[0] == 0.5);

  // positive slope on every segment of component 1 -> its weight grows with x
  Eigen::MatrixXd eta(2, 5);
  eta << 0.0, 0.8, 0.8, 0.8, 0.8, 0.0, 0.0, 0.0, 0.0, 0.0;
  double prev = 0.0;
  for (double xx = 2.8; xx < 4.4; xx += 0.2) {  // inside segment 2
    const double wk = psbp::weights_at(xx, eta, knots)[0];
    CHECK(wk > prev);
    prev = wk;
  }
}
