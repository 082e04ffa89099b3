/// @file estimation.hpp
/// @brief Point estimates of the CO probability from observed meetings.
///
/// @details Each meeting contributes xi = (left is CO) + (right is CO), i.e. two
///          Bernoulli(p) trials when drivers are independent. Over n meetings
///          that is m = 2n trials with sum_xi successes.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "gridtraffic/core.hpp"
#include "gridtraffic/statistics.hpp"

namespace gridtraffic {

class NoDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeetingObservation {
  int eta_a = 0;  ///< 1 when the driver on road a was CO
  int eta_b = 0;
  int xi() const { return eta_a + eta_b; }
};

struct ObservationBatch {
  std::int64_t n = 0;
  std::int64_t sigma_xi = 0;

  void add(const MeetingObservation& o) {
    ++n;
    sigma_xi += o.xi();
  }
};

/// Constants of the estimator (alpha + sum_xi) / (beta + 2n). When unset, the
/// squared-error minimax values for m = 2n trials are used: alpha = sqrt(m)/2, beta = sqrt(m).
struct MinimaxConstants {
  std::optional<double> alpha;
  std::optional<double> beta;
};

/// @throw NoDataError when batch.n == 0.
double minimax_estimate(const ObservationBatch& batch, const MinimaxConstants& constants = {});

/// Posterior mean under a Beta(prior_alpha, prior_beta) prior.
/// @throw ConfigError for non-positive prior parameters.
double bayes_estimate(const ObservationBatch& batch, double prior_alpha = 1.0,
                      double prior_beta = 1.0);

/// Batch built from a run's recorded meetings (true participant types).
/// @throw NoDataError when the run saw no meeting.
ObservationBatch harvest_observations(const RunSummary& run);
ObservationBatch harvest_observations(std::span<const MeetingRecord> log);

}  // namespace gridtraffic
