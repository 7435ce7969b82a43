#include <doctest.h>

#include <cmath>
#include <limits>

#include "handpose/errors.hpp"
#include "handpose/estimators.hpp"
#include "handpose/linalg.hpp"
#include "handpose/rng.hpp"
#include "test_support.hpp"

using handpose::Error;
using handpose::ErrorCode;

namespace {

handpose::HandModel two_dof_model() {
  return handpose::HandModel({{"A", "", 0}, {"B", "", 1}});
}

// The worked 2-DoF example used throughout: P = [[2,1],[1,2]], mu = 0,
// measure the first DoF, y = 2.
handpose::PriorModel worked_prior() {
  Eigen::MatrixXd cov(2, 2);
  cov << 2, 1, 1, 2;
  return handpose::PriorModel{two_dof_model(), Eigen::VectorXd::Zero(2), cov, 10, 0.0};
}

Eigen::MatrixXd row_h() {
  Eigen::MatrixXd h(1, 2);
  h << 1, 0;
  return h;
}

}  // namespace

TEST_CASE("pinv estimate: identity, zero-padding and symmetric split") {
  const Eigen::VectorXd id_y = (Eigen::VectorXd(2) << 3, 4).finished();
  CHECK(handpose::estimate_pinv(Eigen::MatrixXd::Identity(2, 2), id_y).x_hat.isApprox(id_y));

  const auto padded = handpose::estimate_pinv(row_h(), Eigen::VectorXd::Constant(1, 5.0));
  CHECK(padded.x_hat(0) == doctest::Approx(5.0));
  CHECK(padded.x_hat(1) == doctest::Approx(0.0));
  CHECK_FALSE(padded.posterior_cov.has_value());
  CHECK(padded.method == handpose::EstimatorKind::Pinv);

  Eigen::MatrixXd ones(1, 2);
  ones << 1, 1;
  const auto split = handpose::estimate_pinv(ones, Eigen::VectorXd::Constant(1, 4.0));
  CHECK(split.x_hat(0) == doctest::Approx(2.0));
  CHECK(split.x_hat(1) == doctest::Approx(2.0));
}

TEST_CASE("pinv rejects rank-deficient matrices") {
  Eigen::MatrixXd h(2, 3);
  h << 1, 0, 0, 1, 0, 0;
  try {
    (void)handpose::estimate_pinv(h, Eigen::VectorXd::Zero(2));
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("general solution satisfies the measurements for every free vector") {
  const Eigen::VectorXd zero_xi = handpose::general_solution(
      row_h(), Eigen::VectorXd::Constant(1, 5.0), Eigen::VectorXd::Zero(1));
  CHECK(zero_xi.isApprox(handpose::estimate_pinv(row_h(), Eigen::VectorXd::Constant(1, 5.0)).x_hat));

  const Eigen::VectorXd moved = handpose::general_solution(
      row_h(), Eigen::VectorXd::Constant(1, 5.0), Eigen::VectorXd::Constant(1, 2.0));
  CHECK(moved(0) == doctest::Approx(5.0));
  CHECK(std::abs(moved(1)) == doctest::Approx(2.0));  // null direction up to sign

  // Residual oracle on random wide systems.
  auto stream = handpose::rng::Stream(555);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd h = test_support::random_gaussian(stream, 5, 15);
    const Eigen::VectorXd y = stream.normal_vector(5);
    const Eigen::VectorXd xi = stream.normal_vector(10);
    const Eigen::VectorXd x = handpose::general_solution(h, y, xi);
    CHECK((h * x - y).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("noiseless MAP estimate matches a brute-force grid minimizer") {
  const auto prior = worked_prior();
  const auto est = handpose::estimate_map_noiseless(prior, row_h(), Eigen::VectorXd::Constant(1, 2.0));

  // Grid oracle over the constraint line x0 = 2.
  double best_x1 = std::numeric_limits<double>::quiet_NaN();
  double best_cost = std::numeric_limits<double>::infinity();
  for (double x1 = -5.0; x1 <= 5.0; x1 += 1e-4) {
    const double cost =
        handpose::squared_mahalanobis(prior, (Eigen::VectorXd(2) << 2.0, x1).finished());
    if (cost < best_cost) {
      best_cost = cost;
      best_x1 = x1;
    }
  }
  CHECK(best_x1 == doctest::Approx(1.0).epsilon(1e-3));

  CHECK(est.x_hat(0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(est.x_hat(1) == doctest::Approx(1.0).epsilon(1e-10));
  REQUIRE(est.posterior_cov.has_value());
}

TEST_CASE("noiseless MAP returns the prior mean for agreeing measurements") {
  const auto model = handpose::default_hand_model();
  auto stream = handpose::rng::Stream(808);
  handpose::PriorModel prior{model, stream.normal_vector(15) * 10.0,
                             test_support::random_spd(stream, 15, 70.0), 50, 0.0};
  const Eigen::MatrixXd h = test_support::random_gaussian(stream, 5, 15);
  const auto est = handpose::estimate_map_noiseless(prior, h, h * prior.mu);
  CHECK((est.x_hat - prior.mu).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("identity prior collapses the MAP estimate to the minimum-norm correction") {
  const auto model = handpose::default_hand_model();
  auto stream = handpose::rng::Stream(909);
  handpose::PriorModel prior{model, stream.normal_vector(15) * 5.0,
                             Eigen::MatrixXd::Identity(15, 15), 50, 0.0};
  const Eigen::MatrixXd h = test_support::random_gaussian(stream, 5, 15);
  const Eigen::VectorXd y = stream.normal_vector(5) * 20.0;

  const auto est = handpose::estimate_map_noiseless(prior, h, y);
  const Eigen::VectorXd expected =
      prior.mu + handpose::linalg::pseudo_inverse(h) * (y - h * prior.mu);
  CHECK((est.x_hat - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("with a zero mean and identity prior the MAP estimate equals pinv") {
  const auto model = handpose::default_hand_model();
  auto stream = handpose::rng::Stream(910);
  handpose::PriorModel prior{model, Eigen::VectorXd::Zero(15),
                             Eigen::MatrixXd::Identity(15, 15), 50, 0.0};
  const Eigen::MatrixXd h = test_support::random_gaussian(stream, 5, 15);
  const Eigen::VectorXd y = stream.normal_vector(5) * 20.0;
  CHECK(test_support::relative_deviation(
            handpose::estimate_map_noiseless(prior, h, y).x_hat,
            handpose::estimate_pinv(h, y).x_hat) < 1e-10);
}

TEST_CASE("null-space route agrees with the innovation route") {
  const auto prior = worked_prior();
  const auto est =
      handpose::estimate_map_nullspace(prior, row_h(), Eigen::VectorXd::Constant(1, 2.0));
  CHECK(est.x_hat(0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(est.x_hat(1) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK((handpose::estimate_map_nullspace(prior, row_h(), Eigen::VectorXd::Zero(1)).x_hat -
         prior.mu)
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // Cross-form oracle on random instances.
  const auto model = handpose::default_hand_model();
  auto stream = handpose::rng::Stream(1234);
  for (int trial = 0; trial < 100; ++trial) {
    handpose::PriorModel random_prior{model, stream.normal_vector(15) * 15.0,
                                      test_support::random_spd(stream, 15, 60.0), 40, 0.0};
    const Eigen::MatrixXd h = test_support::random_gaussian(stream, 5, 15);
    const Eigen::VectorXd y = stream.normal_vector(5) * 25.0;
    const auto a = handpose::estimate_map_noiseless(random_prior, h, y);
    const auto b = handpose::estimate_map_nullspace(random_prior, h, y);
    CHECK(test_support::relative_deviation(a.x_hat, b.x_hat) < 1e-8);
    CHECK((*a.posterior_cov - *b.posterior_cov).norm() /
              std::max(1.0, a.posterior_cov->norm()) < 1e-8);
  }
}

TEST_CASE("null-space route requires an invertible prior") {
  handpose::PriorModel prior{two_dof_model(), Eigen::VectorXd::Zero(2),
                             Eigen::MatrixXd::Zero(2, 2), 5, 0.0};
  try {
    (void)handpose::estimate_map_nullspace(prior, row_h(), Eigen::VectorXd::Constant(1, 2.0));
    FAIL("expected SingularPrior");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularPrior);
  }
}

TEST_CASE("conditional Gaussian estimate pins measured DoFs and fills the rest") {
  const auto prior = worked_prior();
  const auto selection = handpose::make_selection_model(prior.model, {"A"});
  const auto est =
      handpose::estimate_conditional_gaussian(prior, selection, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(est.x_hat(0) == doctest::Approx(2.0));
  CHECK(est.x_hat(1) == doctest::Approx(1.0).epsilon(1e-10));

  // Measured components of the mean reproduce the mean.
  const auto at_mean = handpose::estimate_conditional_gaussian(
      prior, selection, selection.H * prior.mu);
  CHECK((at_mean.x_hat - prior.mu).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("conditional Gaussian with a diagonal prior keeps unmeasured means") {
  const auto model = handpose::default_hand_model();
  Eigen::VectorXd mu(15);
  for (int i = 0; i < 15; ++i) mu(i) = 2.0 * i + 1.0;
  handpose::PriorModel prior{model, mu, Eigen::MatrixXd::Identity(15, 15) * 9.0, 30, 0.0};
  const auto selection = handpose::make_selection_model(model, {"TM", "MM"});
  Eigen::VectorXd y(2);
  y << 77.0, -13.0;
  const auto est = handpose::estimate_conditional_gaussian(prior, selection, y);
  CHECK(est.x_hat(2) == doctest::Approx(77.0));
  CHECK(est.x_hat(7) == doctest::Approx(-13.0));
  for (int i = 0; i < 15; ++i) {
    if (i != 2 && i != 7) CHECK(est.x_hat(i) == doctest::Approx(mu(i)));
  }
}

TEST_CASE("conditional Gaussian rejects non-selection models") {
  const auto prior = worked_prior();
  Eigen::MatrixXd h(1, 2);
  h << 1, 1;
  const auto model = handpose::make_measurement_model(h, Eigen::MatrixXd::Zero(1, 1));
  try {
    (void)handpose::estimate_conditional_gaussian(prior, model, Eigen::VectorXd::Constant(1, 2.0));
    FAIL("expected NotSelectionMatrix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSelectionMatrix);
  }
}

TEST_CASE("three noiseless routes coincide on random selection instances") {
  const auto model = handpose::default_hand_model();
  auto stream = handpose::rng::Stream(31337);
  for (int trial = 0; trial < 50; ++trial) {
    handpose::PriorModel prior{model, stream.normal_vector(15) * 15.0,
                               test_support::random_spd(stream, 15, 60.0), 40, 0.0};
    const auto picks = test_support::random_index_subset(stream, 15, 5);
    std::vector<std::string> names;
    for (int p : picks) names.push_back(model.dof(p).name);
    const auto selection = handpose::make_selection_model(model, names);
    const Eigen::VectorXd y = stream.normal_vector(5) * 25.0;

    const auto via_innovation = handpose::estimate_map_noiseless(prior, selection.H, y);
    const auto via_nullspace = handpose::estimate_map_nullspace(prior, selection.H, y);
    const auto via_conditional = handpose::estimate_conditional_gaussian(prior, selection, y);

    CHECK(test_support::relative_deviation(via_innovation.x_hat, via_nullspace.x_hat) < 1e-8);
    CHECK(test_support::relative_deviation(via_innovation.x_hat, via_conditional.x_hat) < 1e-8);
    CHECK((selection.H * via_innovation.x_hat - y).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("MVE with R = 0 reduces to the noiseless estimate") {
  const auto prior = worked_prior();
  const auto model = handpose::make_measurement_model(row_h(), Eigen::MatrixXd::Zero(1, 1));
  const auto est = handpose::estimate_mve(prior, model, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(est.x_hat(0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(est.x_hat(1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(est.method == handpose::EstimatorKind::MveSmw);
}

TEST_CASE("MVE with unit noise matches the frozen posterior mean") {
  const auto prior = worked_prior();
  const auto model =
      handpose::make_measurement_model(row_h(), Eigen::MatrixXd::Identity(1, 1));
  const auto est = handpose::estimate_mve(prior, model, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(est.x_hat(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(est.x_hat(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Monte Carlo posterior-mean oracle: importance weights from the
  // measurement likelihood at y = 2.
  auto stream = handpose::rng::Stream(271828);
  const Eigen::MatrixXd chol = handpose::linalg::psd_sqrt_lower(prior.cov);
  Eigen::Vector2d weighted_sum = Eigen::Vector2d::Zero();
  double weight_total = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const Eigen::VectorXd x = prior.mu + chol * stream.normal_vector(2);
    const double innovation = 2.0 - x(0);
    const double w = std::exp(-0.5 * innovation * innovation);  // R = 1
    weighted_sum += w * x;
    weight_total += w;
  }
  const Eigen::Vector2d mc_mean = weighted_sum / weight_total;
  CHECK(mc_mean(0) == doctest::Approx(4.0 / 3.0).epsilon(0.02));
  CHECK(mc_mean(1) == doctest::Approx(2.0 / 3.0).epsilon(0.04));
}

TEST_CASE("MVE returns to the prior mean in the infinite-noise limit") {
  const auto prior = [&] {
    auto p = worked_prior();
    p.mu = (Eigen::VectorXd(2) << 3.0, 4.0).finished();
    return p;
  }();
  const auto noisy = handpose::make_measurement_model(
      row_h(), Eigen::MatrixXd::Identity(1, 1) * 1e6);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 10.0);
  const auto est = handpose::estimate_mve(prior, noisy, y);
  const Eigen::VectorXd pinv_x = handpose::estimate_pinv(row_h(), y).x_hat;
  CHECK((est.x_hat - prior.mu).norm() < 1e-3 * (prior.mu - pinv_x).norm());
}

TEST_CASE("information form agrees with the innovation form") {
  const auto prior = worked_prior();
  const auto model =
      handpose::make_measurement_model(row_h(), Eigen::MatrixXd::Identity(1, 1));
  const auto est =
      handpose::estimate_mve_information(prior, model, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(est.x_hat(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  CHECK(est.x_hat(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));

  // Equal-precision fusion when H = I and R = P.
  const auto hand = handpose::default_hand_model();
  auto stream = handpose::rng::Stream(161803);
  const Eigen::MatrixXd cov = test_support::random_spd(stream, 15, 50.0);
  handpose::PriorModel fused{hand, stream.normal_vector(15) * 10.0, cov, 30, 0.0};
  const auto identity_model =
      handpose::make_measurement_model(Eigen::MatrixXd::Identity(15, 15), cov);
  const Eigen::VectorXd y = stream.normal_vector(15) * 20.0;
  const auto half =
      handpose::estimate_mve_information(fused, identity_model, y);
  CHECK((half.x_hat - 0.5 * (fused.mu + y)).cwiseAbs().maxCoeff() < 1e-8);

  // Cross-form oracle on random well-conditioned instances.
  for (int trial = 0; trial < 50; ++trial) {
    handpose::PriorModel prior_t{hand, stream.normal_vector(15) * 15.0,
                                 test_support::random_spd(stream, 15, 60.0), 40, 0.0};
    const auto model_t = handpose::make_measurement_model(
        test_support::random_gaussian(stream, 5, 15), test_support::random_spd(stream, 5, 9.0));
    const Eigen::VectorXd y_t = stream.normal_vector(5) * 25.0;
    const auto smw = handpose::estimate_mve(prior_t, model_t, y_t);
    const auto info = handpose::estimate_mve_information(prior_t, model_t, y_t);
    CHECK(test_support::relative_deviation(smw.x_hat, info.x_hat) < 1e-6);
    CHECK((*smw.posterior_cov - *info.posterior_cov).norm() /
              std::max(1.0, smw.posterior_cov->norm()) < 1e-6);
  }
}

TEST_CASE("information form reports singular noise") {
  const auto prior = worked_prior();
  const auto model = handpose::make_measurement_model(row_h(), Eigen::MatrixXd::Zero(1, 1));
  try {
    (void)handpose::estimate_mve_information(prior, model, Eigen::VectorXd::Constant(1, 2.0));
    FAIL("expected SingularNoise");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularNoise);
  }
}

TEST_CASE("posterior covariance: no measurement, Schur fixture and contraction") {
  const auto prior = worked_prior();
  CHECK(handpose::posterior_covariance(prior, Eigen::MatrixXd(0, 2), Eigen::MatrixXd(0, 0))
            .isApprox(prior.cov));

  const Eigen::MatrixXd post =
      handpose::posterior_covariance(prior, row_h(), Eigen::MatrixXd::Zero(1, 1));
  CHECK(post(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(post(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(post(1, 1) == doctest::Approx(1.5).epsilon(1e-12));

  const auto model = handpose::default_hand_model();
  auto stream = handpose::rng::Stream(2718);
  for (int trial = 0; trial < 100; ++trial) {
    handpose::PriorModel prior_t{model, Eigen::VectorXd::Zero(15),
                                 test_support::random_spd(stream, 15, 60.0), 40, 0.0};
    const Eigen::MatrixXd h = test_support::random_gaussian(stream, 5, 15);
    const Eigen::MatrixXd r = test_support::random_spd(stream, 5, 4.0);
    const Eigen::MatrixXd post_t = handpose::posterior_covariance(prior_t, h, r);
    CHECK(post_t.trace() <= prior_t.cov.trace() + 1e-9);
    CHECK(handpose::linalg::is_positive_semidefinite(post_t));
    CHECK(handpose::linalg::is_positive_semidefinite(prior_t.cov - post_t));
  }
}

TEST_CASE("perturbations along null directions increase the Mahalanobis cost") {
  const auto model = handpose::default_hand_model();
  auto stream = handpose::rng::Stream(5150);
  handpose::PriorModel prior{model, stream.normal_vector(15) * 15.0,
                             test_support::random_spd(stream, 15, 60.0), 40, 0.0};
  const Eigen::MatrixXd h = test_support::random_gaussian(stream, 5, 15);
  const Eigen::VectorXd y = stream.normal_vector(5) * 25.0;
  const auto est = handpose::estimate_map_noiseless(prior, h, y);
  const double base_cost = handpose::squared_mahalanobis(prior, est.x_hat);

  const Eigen::MatrixXd null_basis = handpose::linalg::null_space_basis(h);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd direction = null_basis * stream.normal_vector(null_basis.cols());
    direction.normalize();
    const double cost =
        handpose::squared_mahalanobis(prior, est.x_hat + 1e-4 * direction);
    CHECK(cost > base_cost);
  }
}

TEST_CASE("measurement model factory validates structure") {
  CHECK(handpose::is_selection_matrix(
      handpose::selection_matrix(handpose::default_hand_model(), {"TM", "LP"})));
  Eigen::MatrixXd not_selection(1, 2);
  not_selection << 0.5, 0.5;
  CHECK_FALSE(handpose::is_selection_matrix(not_selection));
  Eigen::MatrixXd repeated(2, 2);
  repeated << 1, 0, 1, 0;
  CHECK_FALSE(handpose::is_selection_matrix(repeated));

  CHECK_THROWS_AS(
      (void)handpose::make_measurement_model(repeated, Eigen::MatrixXd::Zero(2, 2)), Error);
  Eigen::MatrixXd tall(3, 2);
  tall << 1, 0, 0, 1, 1, 1;
  CHECK_THROWS_AS((void)handpose::make_measurement_model(tall, Eigen::MatrixXd::Zero(3, 3)),
                  Error);
  Eigen::MatrixXd bad_r(1, 1);
  bad_r << -1.0;
  CHECK_THROWS_AS((void)handpose::make_measurement_model(row_h(), bad_r), Error);
}

TEST_CASE("ill-conditioned Gram matrices are refused") {
  Eigen::MatrixXd cov(2, 2);
  cov << 1, 0, 0, 0;  // no variance on the measured axis
  handpose::PriorModel prior{two_dof_model(), Eigen::VectorXd::Zero(2), cov, 10, 0.0};
  Eigen::MatrixXd h(1, 2);
  h << 0, 1;
  try {
    (void)handpose::estimate_map_noiseless(prior, h, Eigen::VectorXd::Constant(1, 1.0));
    FAIL("expected IllConditionedGram");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditionedGram);
  }
}

TEST_CASE("singular innovation and measured blocks are reported") {
  Eigen::MatrixXd cov(2, 2);
  cov << 1, 0, 0, 0;
  handpose::PriorModel prior{two_dof_model(), Eigen::VectorXd::Zero(2), cov, 10, 0.0};
  const auto selection = handpose::make_selection_model(prior.model, {"B"});

  try {
    (void)handpose::estimate_mve(prior, selection, Eigen::VectorXd::Constant(1, 1.0));
    FAIL("expected IllConditionedInnovation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditionedInnovation);
  }

  try {
    (void)handpose::estimate_conditional_gaussian(prior, selection,
                                                  Eigen::VectorXd::Constant(1, 1.0));
    FAIL("expected SingularMeasuredBlock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMeasuredBlock);
  }

  // A positive noise floor restores solvability.
  const auto with_noise = handpose::make_selection_model(prior.model, {"B"}, 1.0);
  const auto est = handpose::estimate_mve(prior, with_noise, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(est.x_hat(1) == doctest::Approx(0.0));  // prior pins the unseen variance to its mean
}
