#pragma once

#include <string_view>

namespace decoh {

/// Auto resolves to Dense when L fits the dense doubled limit, MPS otherwise.
enum class Backend { Dense, Mps, Auto };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view text);

}  // namespace decoh
