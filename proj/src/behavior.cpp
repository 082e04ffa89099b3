#include "gridtraffic/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridtraffic/core.hpp"

namespace gridtraffic {

std::string_view to_string(HazardMode m) {
  return m == HazardMode::discrete_conditional ? "discrete_conditional" : "raw_clipped";
}

void validate(const BehaviorModel& model) {
  const auto probability = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(what) + " must be in [0, 1]");
  };
  if (const auto* f = std::get_if<FixedRatio>(&model)) {
    probability(f->p_co, "p_co");
  } else if (const auto* i = std::get_if<Imitation>(&model)) {
    probability(i->initial_p_de, "initial_p_de");
    probability(i->core_fraction, "core_fraction");
    if (i->tau < 1) throw ConfigError("tau must be at least 1");
  } else if (const auto* m = std::get_if<Impatience>(&model)) {
    if (!(m->weibull.a > 0.0) || !(m->weibull.b > 0.0)) {
      throw ConfigError("Weibull scale and shape must be positive");
    }
  }
}

void record_interaction(ObservationCounts& counts, Observed what) {
  switch (what) {
    case Observed::saw_co: counts.co += 1.0; break;
    case Observed::saw_de: counts.de += 1.0; break;
    case Observed::ambiguous:
      counts.co += 0.5;
      counts.de += 0.5;
      break;
  }
}

std::optional<ImitationProbabilities> imitation_probability(double f_co, double f_de) {
  const double total = f_co + f_de;
  if (!(total > 0.0)) return std::nullopt;
  const double p_de = f_de / total;
  return ImitationProbabilities{1.0 - p_de, p_de};
}

int imitation_update(SimState& state) {
  int changes = 0;
  for (Vehicle& v : state.fleet) {
    const ObservationCounts seen = v.observations;
    v.observations = {};
    if (v.is_core) {
      v.driver_type = DriverType::co;
      continue;
    }
    const auto p = imitation_probability(seen.co, seen.de);
    if (!p) continue;
    const DriverType next = state.rng.uniform() < p->p_de ? DriverType::de : DriverType::co;
    if (next != v.driver_type) ++changes;
    v.driver_type = next;
  }
  return changes;
}

double weibull_cdf(double x, const WeibullParams& p) {
  if (!(x > 0.0)) return 0.0;
  return -std::expm1(-std::pow(x / p.a, p.b));
}

double weibull_survival(double x, const WeibullParams& p) {
  if (!(x > 0.0)) return 1.0;
  return std::exp(-std::pow(x / p.a, p.b));
}

double hazard(double x, const WeibullParams& p) {
  if (!(x > 0.0)) throw DomainError("hazard: waiting time must be positive");
  return (p.b / p.a) * std::pow(x / p.a, p.b - 1.0);
}

double change_probability(int waiting_time, const WeibullParams& p, HazardMode mode) {
  const double w = std::max(waiting_time, 0);
  if (mode == HazardMode::raw_clipped) {
    return std::min(1.0, hazard(std::max(w, 1.0), p));
  }
  // 1 - S(w+1)/S(w) with S(x) = exp(-(x/a)^b).
  const double before = std::pow(w / p.a, p.b);
  const double after = std::pow((w + 1.0) / p.a, p.b);
  return std::clamp(-std::expm1(before - after), 0.0, 1.0);
}

bool jam_check(std::span<const int> speed_history) {
  if (speed_history.empty()) return false;
  const int sum = std::accumulate(speed_history.begin(), speed_history.end(), 0);
  // mean <= 0.2  <=>  5 * sum <= n
  return 5 * sum <= static_cast<int>(speed_history.size());
}

int impatience_step(SimState& state) {
  const auto* model = std::get_if<Impatience>(&state.config.behavior);
  if (model == nullptr) return 0;
  int changes = 0;
  for (Vehicle& v : state.fleet) {
    if (!v.on_lattice() || !v.waited_this_step || v.driver_type != DriverType::co) continue;
    const double p = change_probability(v.waiting_time - 1, model->weibull, model->hazard_mode);
    if (state.rng.uniform() < p) {
      v.driver_type = DriverType::de;
      ++changes;
    }
  }
  return changes;
}

}  // namespace gridtraffic
