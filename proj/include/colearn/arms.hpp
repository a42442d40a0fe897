#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "colearn/rng.hpp"

namespace colearn {

// Arms are numbered 1..K; 0 is the null arm (no preference).
using ArmId = std::uint32_t;
inline constexpr ArmId kNullArm = 0;

// Bernoulli arm means in canonical order: arm 1 is the unique best arm and
// means are nonincreasing from arm 2 on.
class ArmModel {
 public:
  // Sorts descending. Throws ParameterError if K < 2, a mean lies outside
  // [0, 1], or the best mean is not unique.
  explicit ArmModel(std::vector<double> means);

  std::size_t arm_count() const noexcept { return means_.size(); }
  double mean(ArmId k) const { return means_[k - 1]; }
  std::span<const double> means() const noexcept { return means_; }

  // One draw from the stream; reward 1 with probability p_k.
  int pull(ArmId k, Stream& stream) const;

  bool operator==(const ArmModel&) const = default;

 private:
  std::vector<double> means_;
};

// Arms 3..K are filled below p2 either uniformly at random or with p2 itself.
enum class FillRule { kUniform, kConstant };

ArmModel sample_arm_means(std::size_t arm_count, double p1, double p2, FillRule fill, std::uint64_t seed);

// CSV with header "arm_id,mean_rating". Ratings are divided by normalizer.
ArmModel load_arm_means(std::istream& in, double normalizer = 5.0);
ArmModel load_arm_means(const std::filesystem::path& path, double normalizer = 5.0);

// Keeps the best arm and draws count-1 of the remaining arms.
ArmModel subsample_arms(const ArmModel& pool, std::size_t count, bool with_replacement, std::uint64_t seed);

}  // namespace colearn
