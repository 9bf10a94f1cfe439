#include "evoforge/operators/template.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "evoforge/errors.hpp"
#include "evoforge/text.hpp"

namespace evoforge::ops {

namespace {

constexpr std::array<Marker, 5> kAllMarkers{Marker::kBrief, Marker::kIndividual,
                                            Marker::kIndividual2, Marker::kMutation,
                                            Marker::kInterpretation};

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kInit: return "init";
    case TemplateKind::kCrossover: return "crossover";
    case TemplateKind::kMutation: return "mutation";
  }
  return "init";
}

std::string_view marker_token(Marker marker) {
  switch (marker) {
    case Marker::kBrief: return "<BRIEF>";
    case Marker::kIndividual: return "<INDIVIDUAL>";
    case Marker::kIndividual2: return "<INDIVIDUAL_2>";
    case Marker::kMutation: return "<MUTATION>";
    case Marker::kInterpretation: return "<INTERPRETATION>";
  }
  return "";
}

std::set<Marker> scan_markers(std::string_view text) {
  std::set<Marker> found;
  for (Marker m : kAllMarkers) {
    if (text.find(marker_token(m)) != std::string_view::npos) found.insert(m);
  }
  return found;
}

std::vector<std::string> template_violations(const PromptTemplate& tmpl) {
  std::vector<std::string> out;
  const auto has = [&](Marker m) { return tmpl.markers.count(m) > 0; };
  std::set<Marker> required;
  std::set<Marker> allowed;
  switch (tmpl.kind) {
    case TemplateKind::kInit:
      required = {Marker::kBrief};
      allowed = {Marker::kBrief, Marker::kInterpretation};
      break;
    case TemplateKind::kCrossover:
      required = {Marker::kBrief, Marker::kIndividual, Marker::kIndividual2};
      allowed = required;
      break;
    case TemplateKind::kMutation:
      required = {Marker::kBrief, Marker::kIndividual, Marker::kMutation};
      allowed = required;
      break;
  }
  for (Marker m : required) {
    if (!has(m)) {
      out.push_back(std::string(to_string(tmpl.kind)) + " template lacks " +
                    std::string(marker_token(m)));
    }
  }
  for (Marker m : tmpl.markers) {
    if (!allowed.count(m)) {
      out.push_back(std::string(to_string(tmpl.kind)) + " template may not use " +
                    std::string(marker_token(m)));
    }
  }
  if (tmpl.markers != scan_markers(tmpl.text)) {
    out.push_back("declared markers differ from markers in text");
  }
  if (tmpl.section_schema.empty()) out.push_back("section schema is empty");
  return out;
}

PromptTemplate make_template(TemplateKind kind, std::string text,
                             std::vector<SectionSpec> schema) {
  PromptTemplate tmpl{kind, std::move(text), {}, std::move(schema)};
  tmpl.markers = scan_markers(tmpl.text);
  if (auto v = template_violations(tmpl); !v.empty()) {
    throw Error(ErrorCode::kInvalidTemplate, join(v, "; "));
  }
  return tmpl;
}

PromptTemplate parse_template(std::string_view document) {
  const auto lines = text::split_lines(document);
  if (lines.empty() || text::trim(lines.front()) != "---") {
    throw Error(ErrorCode::kInvalidTemplate, "template must start with a '---' metadata block");
  }
  std::optional<TemplateKind> kind;
  std::vector<SectionSpec> schema;
  std::size_t i = 1;
  bool closed = false;
  for (; i < lines.size(); ++i) {
    const std::string_view line = text::trim(lines[i]);
    if (line == "---") {
      closed = true;
      ++i;
      break;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidTemplate, "bad metadata line '" + std::string(line) + "'");
    }
    const std::string_view key = text::trim(line.substr(0, colon));
    const std::string_view value = text::trim(line.substr(colon + 1));
    if (key == "kind") {
      if (value == "init") kind = TemplateKind::kInit;
      else if (value == "crossover") kind = TemplateKind::kCrossover;
      else if (value == "mutation") kind = TemplateKind::kMutation;
      else throw Error(ErrorCode::kInvalidTemplate, "unknown kind '" + std::string(value) + "'");
    } else if (key == "section") {
      SectionSpec spec;
      const auto bar = value.find('|');
      spec.label = std::string(text::trim(value.substr(0, bar)));
      if (bar != std::string_view::npos) {
        const std::string_view limit = text::trim(value.substr(bar + 1));
        auto [ptr, ec] = std::from_chars(limit.data(), limit.data() + limit.size(),
                                         spec.char_limit);
        if (ec != std::errc{} || ptr != limit.data() + limit.size()) {
          throw Error(ErrorCode::kInvalidTemplate, "bad char limit '" + std::string(limit) + "'");
        }
      }
      schema.push_back(std::move(spec));
    } else {
      throw Error(ErrorCode::kInvalidTemplate, "unknown metadata key '" + std::string(key) + "'");
    }
  }
  if (!closed) throw Error(ErrorCode::kInvalidTemplate, "unterminated metadata block");
  if (!kind) throw Error(ErrorCode::kInvalidTemplate, "metadata block lacks 'kind'");

  std::string body;
  for (; i < lines.size(); ++i) {
    body += lines[i];
    body += '\n';
  }
  return make_template(*kind, std::string(text::trim(body)), std::move(schema));
}

PromptTemplate load_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidTemplate, "template file not found: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_template(buffer.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidTemplate, path.string() + ": " + e.what());
  }
}

OperatorTemplates load_templates(const std::filesystem::path& init,
                                 const std::filesystem::path& crossover,
                                 const std::filesystem::path& mutation) {
  OperatorTemplates out{load_template(init), load_template(crossover), load_template(mutation)};
  const auto expect = [](const PromptTemplate& t, TemplateKind k,
                         const std::filesystem::path& p) {
    if (t.kind != k) {
      throw Error(ErrorCode::kInvalidTemplate, p.string() + ": expected kind " +
                                                   std::string(to_string(k)));
    }
  };
  expect(out.init, TemplateKind::kInit, init);
  expect(out.crossover, TemplateKind::kCrossover, crossover);
  expect(out.mutation, TemplateKind::kMutation, mutation);
  return out;
}

}  // namespace evoforge::ops
