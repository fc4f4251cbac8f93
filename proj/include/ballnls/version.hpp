#pragma once

namespace ballnls {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace ballnls
