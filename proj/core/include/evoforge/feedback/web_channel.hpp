#pragma once

#include "evoforge/feedback/channel.hpp"

namespace evoforge::feedback {

/// Web publication: the API serves published concepts straight from the
/// campaign state, so publishing only assigns a stable message id.
class WebChannel final : public ChannelAdapter {
 public:
  std::string name() const override { return "web"; }
  ChannelCapabilities capabilities() const override { return {true, false, false}; }
  std::vector<std::string> publish_text(const GameConcept& concept_) override {
    return {"web:" + concept_.id.str()};
  }
};

}  // namespace evoforge::feedback
