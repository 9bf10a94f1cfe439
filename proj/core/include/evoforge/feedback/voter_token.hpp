#pragma once

#include <string_view>

#include "evoforge/domain.hpp"

namespace evoforge::feedback {

/// Salted pseudonym for a channel-level user reference. The raw reference is
/// never stored; the same (salt, channel, user) always maps to the same token.
VoterToken derive_voter_token(std::string_view salt, std::string_view channel,
                              std::string_view user_ref);

}  // namespace evoforge::feedback
