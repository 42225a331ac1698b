#pragma once

namespace chase {

// Full command-line surface; returns the process exit code.
// 0 = success, 2 = configuration error, 3 = data/schedule validation failure.
int cli_main(int argc, const char* const* argv);

} // namespace chase
