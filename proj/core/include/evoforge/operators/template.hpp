#pragma once

// Prompt templates: marker-bearing text plus a metadata block that declares
// the operator kind and the section schema expected in responses.
//
// File layout:
//
//   ---
//   kind: crossover
//   section: name of the game
//   section: game concept | 1000
//   ---
//   <BRIEF> Given these two examples ...
//
// Markers are written literally: <BRIEF>, <INDIVIDUAL>, <INDIVIDUAL_2>,
// <MUTATION>, <INTERPRETATION>.

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace evoforge::ops {

enum class TemplateKind { kInit, kCrossover, kMutation };
enum class Marker { kBrief, kIndividual, kIndividual2, kMutation, kInterpretation };

std::string_view to_string(TemplateKind kind);
std::string_view marker_token(Marker marker);

struct SectionSpec {
  std::string label;
  std::size_t char_limit = 0;

  friend bool operator==(const SectionSpec&, const SectionSpec&) = default;
};

struct PromptTemplate {
  TemplateKind kind = TemplateKind::kInit;
  std::string text;
  std::set<Marker> markers;
  std::vector<SectionSpec> section_schema;
};

/// Markers that occur in `text`.
std::set<Marker> scan_markers(std::string_view text);

/// Builds a template from its parts; markers are derived from `text`.
/// Throws Error(kInvalidTemplate) when the marker set does not fit the kind.
PromptTemplate make_template(TemplateKind kind, std::string text,
                             std::vector<SectionSpec> schema);

PromptTemplate parse_template(std::string_view document);
PromptTemplate load_template(const std::filesystem::path& path);

std::vector<std::string> template_violations(const PromptTemplate& tmpl);

struct OperatorTemplates {
  PromptTemplate init;
  PromptTemplate crossover;
  PromptTemplate mutation;
};

/// Loads all three templates; a missing file raises Error(kInvalidTemplate)
/// naming the path.
OperatorTemplates load_templates(const std::filesystem::path& init,
                                 const std::filesystem::path& crossover,
                                 const std::filesystem::path& mutation);

}  // namespace evoforge::ops
