#pragma once

#define PSIDOLAB_VERSION "0.1.0"

namespace psidolab {
inline constexpr const char* version() { return PSIDOLAB_VERSION; }
}
