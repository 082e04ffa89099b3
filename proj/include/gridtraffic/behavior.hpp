/// @file behavior.hpp
/// @brief Driver-type dynamics: fixed ratio, imitation with a core, Weibull impatience.

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "gridtraffic/driver.hpp"

namespace gridtraffic {

struct SimState;

enum class HazardMode { discrete_conditional, raw_clipped };

std::string_view to_string(HazardMode m);

/// Types drawn independently with P(CO) = p_co; redrawn every time a driver re-enters.
struct FixedRatio {
  double p_co = 0.75;
};

/// Every `tau` steps each non-core driver re-draws its type from what it saw.
struct Imitation {
  double initial_p_de = 0.5;
  double core_fraction = 0.0;
  int tau = 500;
};

struct WeibullParams {
  double a = 30.0;  ///< scale, in steps
  double b = 2.92;  ///< shape
};

/// Everyone starts CO; a waiting CO driver may turn DE, and reverts after crossing.
struct Impatience {
  WeibullParams weibull{};
  HazardMode hazard_mode = HazardMode::discrete_conditional;
};

using BehaviorModel = std::variant<FixedRatio, Imitation, Impatience>;

/// Throws ConfigError if a parameter is out of range.
void validate(const BehaviorModel& model);

// ---- fixed ratio ----------------------------------------------------------

inline DriverType assign_type_fixed(double p_co, double draw) {
  return draw < p_co ? DriverType::co : DriverType::de;
}

// ---- imitation ------------------------------------------------------------

/// What a driver could tell about its opponent after a meeting.
enum class Observed { saw_co, saw_de, ambiguous };

/// Interaction tallies for one imitation cycle. Values are multiples of 0.5.
struct ObservationCounts {
  double co = 0.0;
  double de = 0.0;
};

void record_interaction(ObservationCounts& counts, Observed what);

struct ImitationProbabilities {
  double p_co;
  double p_de;
};

/// Share of each observed behaviour; nullopt when nothing was observed.
std::optional<ImitationProbabilities> imitation_probability(double f_co, double f_de);

/// Redraws the type of every non-core driver (on the lattice and queued) and
/// clears all tallies. Drivers with no observations keep their type.
/// Returns the number of drivers whose type changed.
int imitation_update(SimState& state);

// ---- impatience -----------------------------------------------------------

/// Weibull CDF; 0 for x <= 0.
double weibull_cdf(double x, const WeibullParams& p);

/// 1 - weibull_cdf(x), computed directly so it keeps full precision in the tail.
double weibull_survival(double x, const WeibullParams& p);

/// Weibull hazard rate (b/a)(x/a)^(b-1).
/// @throw DomainError for x <= 0.
double hazard(double x, const WeibullParams& p);

/// Probability that a CO driver who has already waited `waiting_time` steps
/// turns DE during the next waiting step.
double change_probability(int waiting_time, const WeibullParams& p, HazardMode mode);

/// True when the mean of the recorded speeds is at most 0.2. An empty history
/// counts as not jammed.
bool jam_check(std::span<const int> speed_history);

/// Bernoulli type change for every CO vehicle that waited this step.
/// Returns the number of CO -> DE changes.
int impatience_step(SimState& state);

}  // namespace gridtraffic
