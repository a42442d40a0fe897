#include "colearn/arms.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <set>
#include <string>
#include <string_view>

#include "colearn/error.hpp"

namespace colearn {

ArmModel::ArmModel(std::vector<double> means) : means_(std::move(means)) {
  if (means_.size() < 2) throw ParameterError("need at least 2 arms, got " + std::to_string(means_.size()));
  for (double p : means_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("arm mean " + std::to_string(p) + " outside [0, 1]");
  }
  std::sort(means_.begin(), means_.end(), std::greater<>());
  if (!(means_[0] > means_[1])) throw ParameterError("best arm is not unique");
}

int ArmModel::pull(ArmId k, Stream& stream) const {
  if (k < 1 || k > means_.size()) {
    throw ParameterError("arm " + std::to_string(k) + " outside 1.." + std::to_string(means_.size()));
  }
  return stream.bernoulli(means_[k - 1]) ? 1 : 0;
}

ArmModel sample_arm_means(std::size_t arm_count, double p1, double p2, FillRule fill, std::uint64_t seed) {
  if (arm_count < 2) throw ParameterError("need at least 2 arms");
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) throw ParameterError("p1 and p2 must lie in [0, 1]");
  if (!(p2 < p1)) throw ParameterError("p2 must be strictly below p1");
  Stream stream(StreamKey{.seed = seed, .stage = Stage::kArms});
  std::vector<double> means{p1, p2};
  for (std::size_t k = 3; k <= arm_count; ++k) {
    means.push_back(fill == FillRule::kUniform ? stream.uniform01() * p2 : p2);
  }
  return ArmModel(std::move(means));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view text, T& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

ArmModel load_arm_means(std::istream& in, double normalizer) {
  if (!(normalizer > 0.0)) throw ParameterError("normalizer must be positive");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw IngestionError(1, "missing header");
  ++line_no;
  if (trim(line) != "arm_id,mean_rating") throw IngestionError(line_no, "expected header \"arm_id,mean_rating\"");

  std::set<long long> seen;
  std::vector<double> means;
  while (std::getline(in, line)) {
    ++line_no;
    auto row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw IngestionError(line_no, "expected two comma-separated fields");
    }
    long long id = 0;
    double rating = 0.0;
    if (!parse_number(trim(row.substr(0, comma)), id) || id < 1) {
      throw IngestionError(line_no, "arm_id must be a positive integer");
    }
    if (!parse_number(trim(row.substr(comma + 1)), rating)) {
      throw IngestionError(line_no, "mean_rating is not a number");
    }
    if (!(rating >= 0.0 && rating <= normalizer)) {
      throw IngestionError(line_no, "mean_rating outside [0, " + std::to_string(normalizer) + "]");
    }
    if (!seen.insert(id).second) throw IngestionError(line_no, "duplicate arm_id " + std::to_string(id));
    means.push_back(rating / normalizer);
  }
  if (means.size() < 2) throw IngestionError(0, "K must be >= 2, got " + std::to_string(means.size()));
  std::sort(means.begin(), means.end(), std::greater<>());
  if (!(means[0] > means[1])) throw IngestionError(0, "non-unique maximum mean rating");
  return ArmModel(std::move(means));
}

ArmModel load_arm_means(const std::filesystem::path& path, double normalizer) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open arm means file " + path.string());
  return load_arm_means(in, normalizer);
}

ArmModel subsample_arms(const ArmModel& pool, std::size_t count, bool with_replacement, std::uint64_t seed) {
  if (count < 2) throw ParameterError("subsample needs at least 2 arms");
  const std::size_t rest = pool.arm_count() - 1;
  if (!with_replacement && count - 1 > rest) {
    throw ParameterError("cannot draw " + std::to_string(count - 1) + " of " + std::to_string(rest) +
                         " arms without replacement");
  }
  Stream stream(StreamKey{.seed = seed, .stage = Stage::kArms, .agent = 1});
  std::vector<double> means{pool.mean(1)};
  if (with_replacement) {
    for (std::size_t n = 1; n < count; ++n) means.push_back(pool.mean(static_cast<ArmId>(2 + stream.below(rest))));
  } else {
    std::vector<ArmId> ids(rest);
    std::iota(ids.begin(), ids.end(), ArmId{2});
    for (std::size_t n = 0; n + 1 < count; ++n) {
      std::swap(ids[n], ids[n + stream.below(rest - n)]);
      means.push_back(pool.mean(ids[n]));
    }
  }
  return ArmModel(std::move(means));
}

}  // namespace colearn
