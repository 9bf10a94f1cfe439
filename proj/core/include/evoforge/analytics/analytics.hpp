#pragma once

// Measurements recomputed from an event log: evaluation timeline, average
// concept length per activation, and word frequencies for word clouds.

#include <chrono>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/store/event.hpp"

namespace evoforge::analytics {

struct TimelineBucket {
  Timestamp start{};
  std::size_t count = 0;
  friend bool operator==(const TimelineBucket&, const TimelineBucket&) = default;
};

/// Accepted votes per bucket. Buckets are aligned to the Unix epoch and dense
/// from the first to the last bucket holding a vote; empty without votes.
std::vector<TimelineBucket> eval_timeline(std::span<const store::Event> events,
                                          std::chrono::seconds bucket);

inline constexpr std::size_t kLengthWindow = 5;

struct LengthSeries {
  std::vector<double> raw;
  std::vector<double> smoothed;
};

/// smoothed[i] = mean(raw[max(0, i - window + 1) .. i]).
std::vector<double> trailing_mean(std::span<const double> raw,
                                  std::size_t window = kLengthWindow);

/// raw[i] is the mean body length (characters) of the population right after
/// activation i + 1.
LengthSeries length_series(std::span<const store::Event> events);

using WordCount = std::pair<std::string, std::size_t>;

/// Lowercased alphanumeric tokens (apostrophes kept inside words) minus
/// stopwords, by descending count then alphabetically.
std::vector<WordCount> word_frequencies(std::span<const std::string> bodies,
                                        const std::set<std::string>& stopwords);

/// One word per line; blank lines and lines starting with '#' are skipped.
std::set<std::string> parse_stopwords(std::string_view text);
std::set<std::string> load_stopwords(const std::filesystem::path& path);

enum class PopulationView { kInitial, kFinal };

/// Bodies of the initial population or of the current population.
std::vector<std::string> population_bodies(std::span<const store::Event> events,
                                           PopulationView view);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view value);
/// Header row plus rows, CRLF line endings.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

std::string timeline_csv(std::span<const TimelineBucket> buckets);
std::string lengths_csv(const LengthSeries& series);
std::string words_csv(std::span<const WordCount> words);

/// Fixed four-decimal rendering used in exports.
std::string format_number(double value);

}  // namespace evoforge::analytics
