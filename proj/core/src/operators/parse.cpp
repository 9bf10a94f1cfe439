#include "evoforge/operators/parse.hpp"

#include <optional>

#include "evoforge/errors.hpp"
#include "evoforge/text.hpp"

namespace evoforge::ops {

namespace {

constexpr std::size_t kMaxHeaderWords = 10;

std::vector<std::string> label_words(std::string_view label) {
  std::vector<std::string> words;
  std::string current;
  for (char raw : label) {
    const char c = (raw >= 'A' && raw <= 'Z') ? static_cast<char>(raw - 'A' + 'a') : raw;
    const bool word_char = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                           static_cast<unsigned char>(c) >= 0x80;
    if (word_char) {
      current.push_back(c);
    } else if (c == '\'') {
      // "player's" -> "players"
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  if (!words.empty() && words.front() == "the") words.erase(words.begin());
  return words;
}

bool is_word_prefix(const std::vector<std::string>& prefix,
                    const std::vector<std::string>& of) {
  if (prefix.empty() || prefix.size() > of.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] != of[i]) return false;
  }
  return true;
}

struct Header {
  std::size_t index;
  std::string_view rest;
};

std::string_view strip_decoration(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && s.front() == '#') s.remove_prefix(1);
  s = text::trim(s);
  if (s.size() >= 2 && (s[0] == '-' || s[0] == '*' || s[0] == '+') && s[1] == ' ') {
    s.remove_prefix(2);
  }
  return text::trim(s);
}

std::optional<int> take_number(std::string_view& s) {
  std::size_t i = 0;
  int n = 0;
  while (i < s.size() && i < 2 && s[i] >= '0' && s[i] <= '9') {
    n = n * 10 + (s[i] - '0');
    ++i;
  }
  if (i == 0 || i >= s.size()) return std::nullopt;
  if (s[i] != ')' && s[i] != '.' && s[i] != ':') return std::nullopt;
  if (i + 1 < s.size() && s[i + 1] != ' ' && s[i + 1] != '*' && s[i + 1] != '_') {
    return std::nullopt;
  }
  s = text::trim(s.substr(i + 1));
  return n;
}

std::string_view strip_separator(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && (s.front() == ':' || s.front() == '-')) s = text::trim(s.substr(1));
  return s;
}

class HeaderMatcher {
 public:
  explicit HeaderMatcher(std::span<const SectionSpec> schema) {
    for (const SectionSpec& spec : schema) labels_.push_back(label_words(spec.label));
  }

  std::optional<Header> match(std::string_view line, std::size_t expected_next) const {
    std::string_view s = strip_decoration(line);
    if (s.empty()) return std::nullopt;
    const std::optional<int> number = take_number(s);

    std::string_view candidate;
    std::string_view rest;
    bool bare = false;  // label with nothing after it and no separator
    if (s.starts_with("**") || s.starts_with("__")) {
      const std::string_view fence = s.substr(0, 2);
      const auto close = s.find(fence, 2);
      if (close != std::string_view::npos) {
        candidate = s.substr(2, close - 2);
        rest = strip_separator(s.substr(close + 2));
        const auto inner_colon = candidate.find(':');
        if (inner_colon != std::string_view::npos) {
          // "**Name of the game: Foo**"
          if (!text::trim(candidate.substr(inner_colon + 1)).empty() && rest.empty()) {
            rest = text::trim(candidate.substr(inner_colon + 1));
          }
          candidate = candidate.substr(0, inner_colon);
        }
      }
    }
    if (candidate.empty()) {
      // Whichever separator comes first: "Label: text" or "Label - text".
      std::size_t cut = s.find(':');
      std::size_t skip = 1;
      for (std::string_view dash : {" - ", " – ", " — "}) {
        const auto d = s.find(dash);
        if (d != std::string_view::npos && (cut == std::string_view::npos || d < cut)) {
          cut = d;
          skip = dash.size();
        }
      }
      if (cut != std::string_view::npos && cut <= 80) {
        candidate = s.substr(0, cut);
        rest = text::trim(s.substr(cut + skip));
      } else {
        candidate = s;
        bare = true;
      }
    }

    const auto words = label_words(candidate);
    if (!words.empty() && words.size() <= kMaxHeaderWords) {
      if (auto index = best_label(words, bare)) return Header{*index, rest};
    }
    if (number && *number >= 1 && static_cast<std::size_t>(*number) == expected_next + 1 &&
        expected_next < labels_.size()) {
      return Header{expected_next, s};
    }
    return std::nullopt;
  }

 private:
  std::optional<std::size_t> best_label(const std::vector<std::string>& words, bool bare) const {
    std::optional<std::size_t> best;
    std::size_t best_score = 0;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const auto& label = labels_[i];
      std::size_t score = 0;
      if (words == label) {
        score = 100 + label.size();
      } else if (bare) {
        continue;
      } else if (is_word_prefix(words, label) && (words.size() >= 2 || unique_prefix(words))) {
        score = words.size();
      } else if (is_word_prefix(label, words) && words.size() <= label.size() + 6) {
        score = label.size();
      }
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }

  bool unique_prefix(const std::vector<std::string>& words) const {
    std::size_t hits = 0;
    for (const auto& label : labels_) hits += is_word_prefix(words, label) ? 1 : 0;
    return hits == 1;
  }

  std::vector<std::vector<std::string>> labels_;
};

bool is_signoff(std::string_view paragraph) {
  const std::string p = text::normalize_body(paragraph);
  static constexpr std::string_view kOpeners[] = {
      "i hope", "hope you", "let me know", "feel free", "enjoy!", "enjoy designing",
      "have fun designing", "good luck with", "this game concept", "note:"};
  for (std::string_view opener : kOpeners) {
    if (p.starts_with(opener)) return true;
  }
  return false;
}

// Removes trailing sign-off paragraphs (separated by blank lines).
std::string drop_signoff(std::string text) {
  while (true) {
    const auto cut = text.rfind("\n\n");
    if (cut == std::string::npos) return text;
    if (!is_signoff(text.substr(cut + 2))) return text;
    text = std::string(text::trim(std::string_view(text).substr(0, cut)));
  }
}

std::string clean_block(const std::vector<std::string_view>& lines) {
  std::string out;
  bool pending_blank = false;
  for (std::string_view raw : lines) {
    const std::string_view line = text::trim(raw);
    if (line.empty()) {
      pending_blank = !out.empty();
      continue;
    }
    if (!out.empty()) out += pending_blank ? "\n\n" : "\n";
    pending_blank = false;
    out += line;
  }
  return out;
}

}  // namespace

ConceptDraft draft_of(const GameConcept& concept_) {
  return ConceptDraft{concept_.sections, concept_.body};
}

std::string format_concept(std::span<const Section> sections) {
  std::string out;
  for (const Section& s : sections) {
    if (text::trim(s.text).empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += s.label;
    out += ": ";
    out += s.text;
  }
  return out;
}

ConceptDraft make_draft(std::vector<Section> sections) {
  ConceptDraft draft{std::move(sections), {}};
  draft.body = format_concept(draft.sections);
  return draft;
}

std::size_t recognized_sections(const ConceptDraft& draft) {
  std::size_t n = 0;
  for (const Section& s : draft.sections) n += text::trim(s.text).empty() ? 0 : 1;
  return n;
}

ConceptDraft parse_concept(std::string_view raw, std::span<const SectionSpec> schema) {
  if (schema.empty()) throw Error(ErrorCode::kInvalidArgument, "section schema is empty");

  const HeaderMatcher matcher(schema);
  std::vector<std::vector<std::string_view>> blocks(schema.size());
  std::optional<std::size_t> current;
  std::size_t expected_next = 0;

  for (std::string_view line : text::split_lines(raw)) {
    if (auto header = matcher.match(line, expected_next)) {
      current = header->index;
      expected_next = header->index + 1;
      if (!blocks[header->index].empty()) blocks[header->index].push_back("");
      blocks[header->index].push_back(header->rest);
      continue;
    }
    if (current) blocks[*current].push_back(line);
  }

  std::vector<Section> sections;
  sections.reserve(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    sections.push_back(Section{schema[i].label, clean_block(blocks[i]), schema[i].char_limit});
  }
  // Sign-offs trail whichever section the response wrote last.
  if (current) sections[*current].text = drop_signoff(sections[*current].text);

  ConceptDraft draft = make_draft(std::move(sections));
  const std::size_t needed = (schema.size() + 1) / 2;
  const std::size_t found = recognized_sections(draft);
  if (found < needed) {
    throw Error(ErrorCode::kMalformedResponse,
                "recognized " + std::to_string(found) + " of " +
                    std::to_string(schema.size()) + " sections (need " +
                    std::to_string(needed) + ")");
  }
  return draft;
}

}  // namespace evoforge::ops
