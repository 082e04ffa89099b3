#include "gridtraffic/estimation.hpp"

#include <cmath>

namespace gridtraffic {

double minimax_estimate(const ObservationBatch& batch, const MinimaxConstants& constants) {
  if (batch.n <= 0) throw NoDataError("minimax_estimate: no meetings observed");
  const double m = 2.0 * static_cast<double>(batch.n);
  const double alpha = constants.alpha.value_or(std::sqrt(m) / 2.0);
  const double beta = constants.beta.value_or(std::sqrt(m));
  return (alpha + static_cast<double>(batch.sigma_xi)) / (beta + m);
}

double bayes_estimate(const ObservationBatch& batch, double prior_alpha, double prior_beta) {
  if (!(prior_alpha > 0.0) || !(prior_beta > 0.0)) {
    throw ConfigError("bayes_estimate: prior parameters must be positive");
  }
  return (prior_alpha + static_cast<double>(batch.sigma_xi)) /
         (prior_alpha + prior_beta + 2.0 * static_cast<double>(batch.n));
}

ObservationBatch harvest_observations(const RunSummary& run) {
  if (run.total_meetings <= 0) throw NoDataError("harvest_observations: run has no meetings");
  return {run.total_meetings, run.co_participants};
}

ObservationBatch harvest_observations(std::span<const MeetingRecord> log) {
  if (log.empty()) throw NoDataError("harvest_observations: meeting log is empty");
  ObservationBatch batch;
  for (const MeetingRecord& r : log) {
    batch.add({r.left_type == DriverType::co ? 1 : 0, r.right_type == DriverType::co ? 1 : 0});
  }
  return batch;
}

}  // namespace gridtraffic
