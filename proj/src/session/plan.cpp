#include "cisim/session/plan.hpp"

#include <numeric>
#include <random>
#include <set>

namespace cisim {

std::string to_string(const Condition& c) {
  return std::string(to_string(c.room)) + "/" + std::to_string(c.channels);
}

std::size_t SessionPlan::testing_total() const {
  std::size_t n = 0;
  for (const auto& list : testing_stimuli) n += list.size();
  return n;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded_draw(engine, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

SessionPlan build_plan(std::span<const Condition> conditions, std::span<const std::string> lists,
                       std::uint64_t seed) {
  if (conditions.empty()) throw ConfigError("a session needs at least one condition");
  if (std::set<Condition>(conditions.begin(), conditions.end()).size() != conditions.size()) {
    throw ConfigError("duplicate condition in session request");
  }
  if (std::set<std::string>(lists.begin(), lists.end()).size() != lists.size()) {
    throw ConfigError("duplicate sentence list");
  }
  if (lists.size() < conditions.size()) {
    throw ConfigError("too few sentence lists: " + std::to_string(lists.size()) + " for " +
                      std::to_string(conditions.size()) + " conditions");
  }
  std::mt19937_64 engine(seed);
  SessionPlan plan;
  plan.seed = seed;
  plan.conditions.assign(conditions.begin(), conditions.end());
  shuffle(plan.conditions, engine);
  std::vector<std::string> pool(lists.begin(), lists.end());
  shuffle(pool, engine);
  plan.condition_lists.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(conditions.size()));
  return plan;
}

}  // namespace cisim
