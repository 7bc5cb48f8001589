#pragma once

#include <optional>
#include <string_view>

#include "bandit_forge/context.hpp"
#include "bandit_forge/oracle.hpp"

namespace bforge {

/// How the two hypothetical-label gradient norms combine into one score.
enum class ActiveCriterion { Weighted, Min, Max };

std::string_view criterion_name(ActiveCriterion c) noexcept;
std::optional<ActiveCriterion> parse_criterion(std::string_view name) noexcept;

/// Expected-gradient-length score of observing x. Weighted is
/// (1 - p) * |g(x, 0)| + p * |g(x, 1)| with p from the raw oracle.
double active_score(const OracleModel& model, const Context& x, ActiveCriterion criterion);

}  // namespace bforge
