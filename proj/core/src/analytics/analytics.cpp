#include "evoforge/analytics/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "evoforge/errors.hpp"
#include "evoforge/store/campaign_state.hpp"
#include "evoforge/text.hpp"

namespace evoforge::analytics {

std::vector<TimelineBucket> eval_timeline(std::span<const store::Event> events,
                                          std::chrono::seconds bucket) {
  if (bucket.count() <= 0) throw Error(ErrorCode::kInvalidArgument, "bucket must be positive");
  std::map<std::int64_t, std::size_t> counts;
  for (const store::Event& e : events) {
    if (e.kind != store::EventKind::kVoteRecorded) continue;
    if (e.payload.value("outcome", std::string()) != "accepted") continue;
    const std::int64_t t = e.at.time_since_epoch().count();
    std::int64_t index = t / bucket.count();
    if (t < 0 && t % bucket.count() != 0) --index;
    ++counts[index];
  }
  std::vector<TimelineBucket> out;
  if (counts.empty()) return out;
  for (std::int64_t i = counts.begin()->first; i <= counts.rbegin()->first; ++i) {
    const auto it = counts.find(i);
    out.push_back(TimelineBucket{Timestamp(std::chrono::seconds(i * bucket.count())),
                                 it == counts.end() ? 0 : it->second});
  }
  return out;
}

std::vector<double> trailing_mean(std::span<const double> raw, std::size_t window) {
  if (window == 0) throw Error(ErrorCode::kInvalidArgument, "window must be positive");
  std::vector<double> out;
  out.reserve(raw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    sum += raw[i];
    if (i >= window) sum -= raw[i - window];
    const std::size_t n = std::min(i + 1, window);
    out.push_back(sum / static_cast<double>(n));
  }
  return out;
}

LengthSeries length_series(std::span<const store::Event> events) {
  LengthSeries series;
  store::CampaignState state;
  for (const store::Event& e : events) {
    state.apply(e);
    if (e.kind != store::EventKind::kActivationCompleted) continue;
    const auto& members = state.population().members;
    double total = 0.0;
    for (const ConceptId& id : members) {
      total += static_cast<double>(text::utf8_length(state.find(id)->body));
    }
    series.raw.push_back(members.empty() ? 0.0 : total / static_cast<double>(members.size()));
  }
  series.smoothed = trailing_mean(series.raw);
  return series;
}

std::vector<WordCount> word_frequencies(std::span<const std::string> bodies,
                                        const std::set<std::string>& stopwords) {
  std::map<std::string, std::size_t> counts;
  auto flush = [&](std::string& word) {
    while (!word.empty() && word.back() == '\'') word.pop_back();
    while (!word.empty() && word.front() == '\'') word.erase(word.begin());
    if (!word.empty() && stopwords.count(word) == 0) ++counts[word];
    word.clear();
  };
  for (const std::string& body : bodies) {
    std::string word;
    for (unsigned char c : body) {
      if (c >= 'A' && c <= 'Z') {
        word.push_back(static_cast<char>(c - 'A' + 'a'));
      } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
        word.push_back(static_cast<char>(c));
      } else if (c == '\'' && !word.empty()) {
        word.push_back('\'');
      } else {
        flush(word);
      }
    }
    flush(word);
  }
  std::vector<WordCount> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const WordCount& a, const WordCount& b) {
    return a.second > b.second;
  });
  return out;
}

std::set<std::string> parse_stopwords(std::string_view text_in) {
  std::set<std::string> out;
  for (std::string_view line : text::split_lines(text_in)) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    out.insert(text::to_lower_ascii(line));
  }
  return out;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "stopword file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_stopwords(ss.str());
}

std::vector<std::string> population_bodies(std::span<const store::Event> events,
                                           PopulationView view) {
  store::CampaignState state;
  std::vector<std::string> bodies;
  for (const store::Event& e : events) {
    state.apply(e);
    if (view == PopulationView::kInitial && e.kind == store::EventKind::kCampaignStarted) {
      for (const ConceptId& id : state.population().members) {
        bodies.push_back(state.find(id)->body);
      }
      return bodies;
    }
  }
  if (view == PopulationView::kFinal) {
    for (const ConceptId& id : state.population().members) bodies.push_back(state.find(id)->body);
  }
  return bodies;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += csv_field(row[i]);
    }
    out += "\r\n";
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

std::string timeline_csv(std::span<const TimelineBucket> buckets) {
  std::vector<std::vector<std::string>> rows;
  for (const TimelineBucket& b : buckets) {
    rows.push_back({store::format_timestamp(b.start), std::to_string(b.count)});
  }
  return csv_table({"bucket_start", "count"}, rows);
}

std::string lengths_csv(const LengthSeries& series) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < series.raw.size(); ++i) {
    rows.push_back({std::to_string(i + 1), format_number(series.raw[i]),
                    format_number(series.smoothed[i])});
  }
  return csv_table({"activation", "raw_mean_length", "smoothed_mean_length"}, rows);
}

std::string words_csv(std::span<const WordCount> words) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [word, count] : words) rows.push_back({word, std::to_string(count)});
  return csv_table({"word", "count"}, rows);
}

}  // namespace evoforge::analytics
