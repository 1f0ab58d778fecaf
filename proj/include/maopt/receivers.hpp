#pragma once

#include "maopt/model.hpp"

#include <string>
#include <vector>

namespace maopt {

enum class ReceiverKind { Zf, Mmse, MmseSic };

const char* receiver_name(ReceiverKind kind);
ReceiverKind receiver_from_name(const std::string& name);

/// Unit-norm receive combining weights for one user.
struct Beamformer {
  ComplexVector weights;
};

/// Post-combining SINR and the rate it supports, per user.
struct RatePerUser {
  RealVector sinr;
  RealVector rate;  // log2(1 + sinr), bits/s/Hz

  Real sum_rate() const { return rate.sum(); }
};

RatePerUser rates_from_sinr(const RealVector& sinr);

struct ReceiverOutput {
  std::vector<Beamformer> beamformers;  // one per user
  RatePerUser rates;
};

/// SINR of user `user` under combining vector `w`: desired power over
/// interference-plus-noise power at the combiner output.
Real sinr_of(const Beamformer& w, const ChannelRealization& channel,
             const SystemConfig& config, int user);

/// Zero-forcing receiver: each user's combiner is the normalized projection
/// of its channel onto the orthogonal complement of all other users'
/// channels; the resulting SNR comes from the diagonal of the inverse channel
/// Gram. Throws RankDeficient when the Gram is numerically singular.
ReceiverOutput zf_receiver(const ChannelRealization& channel, const SystemConfig& config);

/// Linear MMSE receiver: combiner proportional to the solve of the
/// interference-plus-noise covariance against the user's channel; maximizes
/// SINR over unit-norm combiners.
ReceiverOutput mmse_receiver(const ChannelRealization& channel, const SystemConfig& config);

/// MMSE receiver with successive cancellation: users are decoded in `order`
/// (user indices; empty means 0..M-1) and each decode stage only sees
/// not-yet-decoded users as interference. Outputs are indexed by user.
ReceiverOutput sic_receiver(const ChannelRealization& channel, const SystemConfig& config,
                            const std::vector<int>& order = {});

/// Sum rate achieved by MMSE-SIC, as the log-determinant of the
/// noise-normalized receive covariance. Equals the sum of per-user SIC rates
/// for any decode order.
Real sic_sum_rate(const ChannelRealization& channel, const SystemConfig& config);

/// Instantaneous sum rate of the chosen receiver on one channel draw.
Real instantaneous_sum_rate(const ChannelRealization& channel, const SystemConfig& config,
                            ReceiverKind kind);

}  // namespace maopt
