#include "decoh/backend.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "decoh/error.hpp"

namespace decoh {

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Dense: return "dense";
    case Backend::Mps: return "mps";
    case Backend::Auto: return "auto";
  }
  return "?";
}

Backend parse_backend(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "dense") return Backend::Dense;
  if (t == "mps") return Backend::Mps;
  if (t == "auto") return Backend::Auto;
  throw InvalidInput("unknown backend '" + std::string(text) + "' (dense, mps, auto)");
}

}  // namespace decoh
