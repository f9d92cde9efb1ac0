#pragma once

#include <stdexcept>
#include <string>

namespace divolt {

// Exit-code contract for the CLI: 0 success, 2 configuration error, 3 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace divolt
