#pragma once

#include <string_view>

namespace hyperfit::io {

enum class Family { cauchy, conformal, matrix };

std::string_view to_string(Family f);
/// "cauchy", "conformal" or "matrix"; throws InvalidArgument otherwise.
Family parse_family(std::string_view s);

}  // namespace hyperfit::io
