#include "bandit_forge/active.hpp"

#include <algorithm>

namespace bforge {

std::string_view criterion_name(ActiveCriterion c) noexcept {
  switch (c) {
    case ActiveCriterion::Weighted: return "weighted";
    case ActiveCriterion::Min: return "min";
    case ActiveCriterion::Max: return "max";
  }
  return "?";
}

std::optional<ActiveCriterion> parse_criterion(std::string_view name) noexcept {
  for (auto c : {ActiveCriterion::Weighted, ActiveCriterion::Min, ActiveCriterion::Max}) {
    if (criterion_name(c) == name) return c;
  }
  return std::nullopt;
}

double active_score(const OracleModel& model, const Context& x, ActiveCriterion criterion) {
  const double p = predict_proba(model, x);
  const double g0 = grad_norm(model, x, 0);
  const double g1 = grad_norm(model, x, 1);
  switch (criterion) {
    case ActiveCriterion::Min: return std::min(g0, g1);
    case ActiveCriterion::Max: return std::max(g0, g1);
    case ActiveCriterion::Weighted: break;
  }
  return (1.0 - p) * g0 + p * g1;
}

}  // namespace bforge
