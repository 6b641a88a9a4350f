#pragma once

#include <string_view>

namespace kst {

/// Outcome of a two-sample test: accept (Same) or reject (Different) the
/// hypothesis that the test set comes from the training distribution.
enum class Decision { Same, Different };

[[nodiscard]] constexpr std::string_view to_string(Decision d) noexcept {
  return d == Decision::Same ? "Same" : "Different";
}

}  // namespace kst
