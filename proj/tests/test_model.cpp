#include "maopt/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace maopt;

namespace {

SystemConfig paper_config() {
  SystemConfig config;
  config.n_antennas = 10;
  config.n_users = 5;
  config.span = 8.0;
  config.min_spacing = 0.5;
  config.wavelength = 1.0;
  config.power_ratio = RealVector::Constant(5, std::pow(10.0, 1.5));
  config.rician_k = RealVector::Constant(5, 10.0);
  config.path_loss = RealVector::Constant(5, 1.0);
  config.angle.resize(5);
  config.angle << 0.0542, 0.8186, 0.9386, 0.2841, 0.1805;
  return config;
}

AntennaPositions uniform_positions(int n, Real spacing) {
  RealVector x(n);
  for (int i = 0; i < n; ++i) x[i] = i * spacing;
  return AntennaPositions(std::move(x));
}

}  // namespace

TEST_CASE("steering vector basics") {
  AntennaPositions zeros(RealVector::Zero(4));
  const ComplexVector at_origin = steering_vector(zeros, 1.1, 1.0);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(at_origin[n] - Complex(1, 0)) < 1e-14);

  AntennaPositions spread(RealVector::LinSpaced(4, 0.0, 3.0));
  const ComplexVector broadside = steering_vector(spread, 0.0, 1.0);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(broadside[n] - Complex(1, 0)) < 1e-14);

  RealVector two(2);
  two << 0.0, 0.5;
  const ComplexVector flipped = steering_vector(AntennaPositions(two), kPi / 2, 1.0);
  CHECK(std::abs(flipped[0] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(flipped[1] - Complex(-1, 0)) < 1e-12);
}

TEST_CASE("steering entries have unit modulus") {
  const SystemConfig config = paper_config();
  const AntennaPositions x = uniform_positions(10, 0.5);
  const ComplexMatrix los = los_matrix(x, config);
  for (int m = 0; m < config.n_users; ++m) {
    for (int n = 0; n < config.n_antennas; ++n) {
      CHECK(std::abs(std::abs(los(n, m)) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("los matrix columns follow the per-user angles") {
  SystemConfig config = paper_config();
  config.n_antennas = 1;
  const ComplexMatrix single = los_matrix(AntennaPositions(RealVector::Zero(1)), config);
  for (int m = 0; m < config.n_users; ++m) CHECK(std::abs(single(0, m) - Complex(1, 0)) < 1e-14);

  SystemConfig twin = paper_config();
  twin.angle[1] = twin.angle[0];
  const ComplexMatrix los = los_matrix(uniform_positions(10, 0.5), twin);
  CHECK((los.col(0) - los.col(1)).cwiseAbs().maxCoeff() < 1e-14);

  const ComplexMatrix full = los_matrix(uniform_positions(10, 0.5), paper_config());
  const ComplexMatrix gram = full.adjoint() * full;
  for (int m = 0; m < 5; ++m) {
    CHECK(std::abs(gram(m, m) - Complex(10, 0)) < 1e-12);
  }

  SystemConfig bad = paper_config();
  bad.n_antennas = 7;
  CHECK_THROWS_AS(los_matrix(uniform_positions(10, 0.5), bad), DimensionError);
}

TEST_CASE("nlos sampling is deterministic per stream value") {
  const RandomStream stream(42, 7);
  const ComplexMatrix a = sample_nlos(stream, 6, 3);
  const ComplexMatrix b = sample_nlos(stream, 6, 3);
  CHECK((a.array() == b.array()).all());

  const ComplexMatrix other = sample_nlos(stream.substream(1), 6, 3);
  CHECK((a - other).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("nlos sample statistics match a unit-variance complex gaussian") {
  const int draws = 100000;
  const RandomStream stream(2024, 0);
  Eigen::Matrix2cd mean_acc = Eigen::Matrix2cd::Zero();
  Eigen::Matrix2d power_acc = Eigen::Matrix2d::Zero();
  for (int s = 0; s < draws; ++s) {
    const ComplexMatrix draw = sample_nlos(stream.substream(s), 2, 2);
    mean_acc += draw;
    power_acc += draw.cwiseAbs2();
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      CHECK(std::abs(mean_acc(r, c)) / draws < 0.02);
      CHECK(power_acc(r, c) / draws == doctest::Approx(1.0).epsilon(0.02));
    }
  }
}

TEST_CASE("channel assembly mixes the two parts with rician weights") {
  SystemConfig config = paper_config();
  const AntennaPositions x = uniform_positions(10, 0.5);
  ComplexMatrix nlos = sample_nlos(RandomStream(5), 10, 5);
  for (int m = 0; m < 5; ++m) nlos.col(m) /= nlos.col(m).norm();

  SUBCASE("strong line of sight") {
    config.rician_k = RealVector::Constant(5, 1e12);
    const ChannelRealization channel = assemble_channel(x, config, nlos);
    CHECK((channel.combined - channel.los).cwiseAbs().maxCoeff() < 1e-5);
  }
  SUBCASE("vanishing line of sight") {
    config.rician_k = RealVector::Constant(5, 1e-12);
    const ChannelRealization channel = assemble_channel(x, config, nlos);
    CHECK((channel.combined - channel.nlos).cwiseAbs().maxCoeff() < 1e-5);
  }
  SUBCASE("balanced mixture") {
    config.rician_k = RealVector::Constant(5, 1.0);
    const ChannelRealization channel = assemble_channel(x, config, nlos);
    const ComplexMatrix expected = std::sqrt(0.5) * (channel.los + channel.nlos);
    CHECK((channel.combined - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("channel assembly is linear in the scattered part") {
  const SystemConfig config = paper_config();
  const AntennaPositions x = uniform_positions(10, 0.5);
  const ComplexMatrix a = sample_nlos(RandomStream(1), 10, 5);
  const ComplexMatrix b = sample_nlos(RandomStream(2), 10, 5);
  const ComplexMatrix sum = assemble_channel(x, config, a).combined +
                            assemble_channel(x, config, b).combined -
                            assemble_channel(x, config, ComplexMatrix::Zero(10, 5)).combined;
  const ComplexMatrix direct = assemble_channel(x, config, a + b).combined;
  CHECK((sum - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("column power matches beta times antenna count") {
  SystemConfig config = paper_config();
  config.path_loss << 1.0, 0.5, 2.0, 1.5, 0.8;
  const AntennaPositions x = uniform_positions(10, 0.5);
  const int draws = 10000;
  const RandomStream stream(77, 0);
  RealMatrix power(draws, 5);
  for (int s = 0; s < draws; ++s) {
    const ChannelRealization channel =
        assemble_channel(x, config, sample_nlos(stream.substream(s), 10, 5));
    for (int m = 0; m < 5; ++m) power(s, m) = channel.combined.col(m).squaredNorm();
  }
  for (int m = 0; m < 5; ++m) {
    const Real mean = power.col(m).mean();
    const Real sd = std::sqrt((power.col(m).array() - mean).square().sum() / (draws - 1));
    const Real expected = config.path_loss[m] * config.n_antennas;
    CHECK(std::abs(mean - expected) < 3.0 * sd / std::sqrt(Real(draws)));
  }
}

TEST_CASE("translating the whole array only rotates column phases") {
  const SystemConfig config = paper_config();
  const AntennaPositions x = uniform_positions(10, 0.5);
  const Real shift = 1.7;
  AntennaPositions moved = x;
  moved.coords.array() += shift;

  const ComplexMatrix base = los_matrix(x, config);
  const ComplexMatrix translated = los_matrix(moved, config);
  for (int m = 0; m < config.n_users; ++m) {
    const Complex phase =
        std::polar(Real(1), 2.0 * kPi * shift * std::sin(config.angle[m]) / config.wavelength);
    CHECK((translated.col(m) - base.col(m) * phase).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("config validation rejects bad scenarios") {
  SystemConfig config = paper_config();
  CHECK_NOTHROW(config.validate());

  SystemConfig tight = paper_config();
  tight.span = 4.0;  // needs 4.5 for ten antennas at half-wavelength spacing
  CHECK_THROWS_AS(tight.validate(), InfeasibleGeometry);

  SystemConfig negative = paper_config();
  negative.power_ratio[2] = 0.0;
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);

  SystemConfig mismatched = paper_config();
  mismatched.angle = RealVector::Zero(3);
  CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);
}

TEST_CASE("feasibility validator") {
  CHECK(is_feasible(uniform_positions(10, 0.5), 8.0, 0.5));
  CHECK_FALSE(is_feasible(uniform_positions(10, 0.4), 8.0, 0.5));
  AntennaPositions outside = uniform_positions(10, 0.5);
  outside.coords.array() += 4.0;  // last antenna lands at 8.5
  CHECK_FALSE(is_feasible(outside, 8.0, 0.5));
}
