#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoforge/operators/backend.hpp"

namespace evoforge::ops {

/// Deterministic stand-in for an LLM. Answers are a pure function of
/// (seed, request.call, request.variation_seed):
///
///  - init: schema-shaped text whose sections mention keywords from
///    keyword_pool();
///  - crossover: section-wise merge, even-indexed sections (the 1st, 3rd, ...)
///    from parent A, the others from parent B, name words of both joined;
///  - mutation: rewrites only the section the focus names, replacing its
///    "[twist: ...]" tag with a new focus-tagged keyword.
///
/// Offspring text is always parent text plus at most one new keyword, so the
/// keywords a voter model rewards are inherited.
class MockBackend final : public CompletionBackend {
 public:
  explicit MockBackend(std::uint64_t seed, RetryPolicy retry = {});

  static const std::vector<std::string>& keyword_pool();

  const BackendProfile& profile() const override { return profile_; }
  std::string attempt(const CompletionRequest& request) override;

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::string init_text(const CompletionRequest& request) const;
  std::string crossover_text(const CompletionRequest& request) const;
  std::string mutation_text(const CompletionRequest& request) const;

  std::uint64_t seed_;
  BackendProfile profile_;
  std::atomic<std::size_t> calls_{0};
};

/// Index of the section a mutation focus refers to: the section whose label
/// words all occur in the focus ("the level design" -> "level design"),
/// otherwise a stable hash-chosen non-name section.
std::size_t focus_section_index(std::string_view focus, std::span<const Section> sections);

}  // namespace evoforge::ops
