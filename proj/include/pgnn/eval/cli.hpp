#pragma once

#include <iosfwd>

namespace pgnn::eval {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the `pgnn` tool: train, eval, predict, gradcheck, synth.
/// Returns 0 on success, 1 for usage and validation errors, 2 for runtime
/// failures (including a failed gradient check).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pgnn::eval
