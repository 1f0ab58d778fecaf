#include "maopt/receivers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace maopt {

namespace {

constexpr Real kGramConditionLimit = 1e12;

Real log2_1p(Real x) { return std::log1p(x) / std::log(Real(2)); }

/// Inverse of the user-channel Gram, with a singularity guard.
ComplexMatrix inverse_gram(const ComplexMatrix& channels) {
  const ComplexMatrix gram = channels.adjoint() * channels;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const Real lo = eig.eigenvalues().minCoeff();
  const Real hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0) || hi / lo > kGramConditionLimit) {
    throw RankDeficient("channel Gram is numerically singular (colinear user channels)");
  }
  return gram.llt().solve(ComplexMatrix::Identity(gram.rows(), gram.cols()));
}

RealVector zf_sinr(const ChannelRealization& channel, const SystemConfig& config) {
  const ComplexMatrix gram_inv = inverse_gram(channel.combined);
  RealVector sinr(config.n_users);
  for (int m = 0; m < config.n_users; ++m) {
    sinr[m] = config.power_ratio[m] / checked_real(gram_inv(m, m));
  }
  return sinr;
}

/// Covariance of noise plus the listed interferers, identity-normalized.
ComplexMatrix interference_covariance(const ChannelRealization& channel,
                                      const SystemConfig& config,
                                      const std::vector<int>& interferers) {
  ComplexMatrix cov = ComplexMatrix::Identity(config.n_antennas, config.n_antennas);
  for (int i : interferers) {
    const ComplexVector& h = channel.combined.col(i);
    cov.noalias() += config.power_ratio[i] * (h * h.adjoint());
  }
  return cov;
}

std::vector<int> all_but(int m, int n_users) {
  std::vector<int> out;
  out.reserve(n_users - 1);
  for (int i = 0; i < n_users; ++i) {
    if (i != m) out.push_back(i);
  }
  return out;
}

void check_permutation(const std::vector<int>& order, int n_users) {
  std::vector<bool> seen(n_users, false);
  if (static_cast<int>(order.size()) != n_users) {
    throw std::invalid_argument("decode order must list every user exactly once");
  }
  for (int u : order) {
    if (u < 0 || u >= n_users || seen[u]) {
      throw std::invalid_argument("decode order is not a permutation of the users");
    }
    seen[u] = true;
  }
}

}  // namespace

const char* receiver_name(ReceiverKind kind) {
  switch (kind) {
    case ReceiverKind::Zf: return "zf";
    case ReceiverKind::Mmse: return "mmse";
    case ReceiverKind::MmseSic: return "mmse-sic";
  }
  return "?";
}

ReceiverKind receiver_from_name(const std::string& name) {
  if (name == "zf") return ReceiverKind::Zf;
  if (name == "mmse") return ReceiverKind::Mmse;
  if (name == "mmse-sic") return ReceiverKind::MmseSic;
  throw std::invalid_argument("unknown receiver '" + name + "' (expected zf, mmse or mmse-sic)");
}

RatePerUser rates_from_sinr(const RealVector& sinr) {
  RatePerUser out;
  out.sinr = sinr;
  out.rate = sinr.unaryExpr([](Real g) { return log2_1p(g); });
  return out;
}

Real sinr_of(const Beamformer& w, const ChannelRealization& channel,
             const SystemConfig& config, int user) {
  if (user < 0 || user >= config.n_users) throw std::out_of_range("user index out of range");
  Real desired = 0;
  Real interference = 0;
  for (int i = 0; i < config.n_users; ++i) {
    const Real gain = std::norm(w.weights.dot(channel.combined.col(i)));
    if (i == user) {
      desired = config.power_ratio[i] * gain;
    } else {
      interference += config.power_ratio[i] * gain;
    }
  }
  return desired / (interference + 1.0);
}

ReceiverOutput zf_receiver(const ChannelRealization& channel, const SystemConfig& config) {
  if (config.n_antennas < config.n_users) {
    throw DimensionError("zero-forcing needs at least as many antennas as users");
  }
  ReceiverOutput out;
  out.rates = rates_from_sinr(zf_sinr(channel, config));
  out.beamformers.reserve(config.n_users);
  for (int m = 0; m < config.n_users; ++m) {
    const ComplexVector& h = channel.combined.col(m);
    ComplexVector w = h;
    if (config.n_users > 1) {
      // Project out the interfering users' channel subspace.
      ComplexMatrix others(config.n_antennas, config.n_users - 1);
      int k = 0;
      for (int i : all_but(m, config.n_users)) others.col(k++) = channel.combined.col(i);
      const ComplexMatrix small_gram = others.adjoint() * others;
      w -= others * small_gram.llt().solve(others.adjoint() * h);
    }
    out.beamformers.push_back(Beamformer{w / w.norm()});
  }
  return out;
}

ReceiverOutput mmse_receiver(const ChannelRealization& channel, const SystemConfig& config) {
  ReceiverOutput out;
  RealVector sinr(config.n_users);
  out.beamformers.reserve(config.n_users);
  for (int m = 0; m < config.n_users; ++m) {
    const ComplexMatrix cov = interference_covariance(channel, config, all_but(m, config.n_users));
    const ComplexVector& h = channel.combined.col(m);
    const ComplexVector solved = cov.llt().solve(h);
    sinr[m] = config.power_ratio[m] * checked_real(h.dot(solved));
    out.beamformers.push_back(Beamformer{solved / solved.norm()});
  }
  out.rates = rates_from_sinr(sinr);
  return out;
}

ReceiverOutput sic_receiver(const ChannelRealization& channel, const SystemConfig& config,
                            const std::vector<int>& order) {
  std::vector<int> decode_order = order;
  if (decode_order.empty()) {
    decode_order.resize(config.n_users);
    std::iota(decode_order.begin(), decode_order.end(), 0);
  }
  check_permutation(decode_order, config.n_users);

  ReceiverOutput out;
  out.beamformers.resize(config.n_users);
  RealVector sinr(config.n_users);
  for (int stage = 0; stage < config.n_users; ++stage) {
    const int user = decode_order[stage];
    // Already-decoded users are cancelled; only later stages interfere.
    const std::vector<int> remaining(decode_order.begin() + stage + 1, decode_order.end());
    const ComplexMatrix cov = interference_covariance(channel, config, remaining);
    const ComplexVector& h = channel.combined.col(user);
    const ComplexVector solved = cov.llt().solve(h);
    sinr[user] = config.power_ratio[user] * checked_real(h.dot(solved));
    out.beamformers[user] = Beamformer{solved / solved.norm()};
  }
  out.rates = rates_from_sinr(sinr);
  return out;
}

Real sic_sum_rate(const ChannelRealization& channel, const SystemConfig& config) {
  ComplexMatrix cov = ComplexMatrix::Identity(config.n_antennas, config.n_antennas);
  for (int m = 0; m < config.n_users; ++m) {
    const ComplexVector& h = channel.combined.col(m);
    cov.noalias() += config.power_ratio[m] * (h * h.adjoint());
  }
  const auto llt = cov.llt();
  const RealVector diag = llt.matrixLLT().diagonal().real();
  return 2.0 * diag.array().log().sum() / std::log(Real(2));
}

Real instantaneous_sum_rate(const ChannelRealization& channel, const SystemConfig& config,
                            ReceiverKind kind) {
  switch (kind) {
    case ReceiverKind::Zf:
      return rates_from_sinr(zf_sinr(channel, config)).sum_rate();
    case ReceiverKind::Mmse: {
      Real total = 0;
      for (int m = 0; m < config.n_users; ++m) {
        const ComplexMatrix cov =
            interference_covariance(channel, config, all_but(m, config.n_users));
        const ComplexVector& h = channel.combined.col(m);
        total += log2_1p(config.power_ratio[m] * checked_real(h.dot(cov.llt().solve(h))));
      }
      return total;
    }
    case ReceiverKind::MmseSic:
      return sic_sum_rate(channel, config);
  }
  return 0;
}

}  // namespace maopt
