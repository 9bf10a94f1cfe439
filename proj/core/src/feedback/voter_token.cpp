#include "evoforge/feedback/voter_token.hpp"

#include <string>

#include "evoforge/text.hpp"

namespace evoforge::feedback {

VoterToken derive_voter_token(std::string_view salt, std::string_view channel,
                              std::string_view user_ref) {
  std::string material(salt);
  material.push_back('\0');
  material.append(channel);
  material.push_back('\0');
  material.append(user_ref);
  return VoterToken("v" + text::sha256_hex(material).substr(0, 32));
}

}  // namespace evoforge::feedback
