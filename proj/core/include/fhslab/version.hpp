#pragma once

namespace fhslab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fhslab
