#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bandit_forge/oracle.hpp"
#include "bandit_forge/parallel.hpp"
#include "bandit_forge/rng.hpp"

namespace bforge {

enum class WeightScheme { FullBootstrap, PoissonCounts, UniformWeights, Gamma11Weights, Gamma22Weights };

inline constexpr WeightScheme kAllSchemes[] = {
    WeightScheme::FullBootstrap, WeightScheme::PoissonCounts, WeightScheme::UniformWeights,
    WeightScheme::Gamma11Weights, WeightScheme::Gamma22Weights};

/// Short names used on the command line and in CSV output:
/// bootstrap, poisson, uniform, gamma11, gamma22.
std::string_view scheme_name(WeightScheme scheme) noexcept;
std::optional<WeightScheme> parse_scheme(std::string_view name) noexcept;

/// Redraw budget for resamples that come out single-class.
inline constexpr int kMaxResampleRedraws = 100;

/// n indices drawn uniformly from [0, n) with replacement. EmptyPool if n = 0.
std::vector<std::size_t> draw_resample_indices(std::size_t n, RngStream& rng);

/// One draw from an online weighting scheme. PoissonCounts returns an
/// integer count (possibly 0); UniformWeights draws on (0, 1]; the Gamma
/// schemes use (shape, rate) = (1, 1) and (2, 2). SchemeMismatch for
/// FullBootstrap.
double draw_weight(WeightScheme scheme, RngStream& rng);

/// Per-row multipliers describing one resample of n rows: occurrence counts
/// for FullBootstrap and PoissonCounts, random weights otherwise.
///
/// When `labels` is non-empty, a draw whose positive-multiplier rows hold a
/// single class is redrawn up to kMaxResampleRedraws times and then replaced
/// by all ones (the unresampled data).
std::vector<double> draw_row_multipliers(WeightScheme scheme, std::size_t n, RngStream& rng,
                                         std::span<const std::uint8_t> labels = {});

/// Fits m bootstrap-resample models to an arm's history.
///
/// Each resample s draws from its own stream derived from (rng, epoch, s),
/// where the epoch is one draw from `rng`; the fits may therefore run in
/// parallel without changing the result. `warm` (if given, length m) seeds
/// the optimizer per resample. OneClassData if the history is one-class.
std::vector<OracleModel> refit_resamples(const ArmHistory& history, std::size_t m, double l2_lambda,
                                         RngStream& rng, std::span<const OracleModel> warm = {},
                                         Exec exec = Exec::Serial);

}  // namespace bforge
