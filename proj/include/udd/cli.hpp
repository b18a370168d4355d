#pragma once

namespace udd {

// Entry point behind the `udd` binary, callable in-process for tests.
// Returns 0 on success, 1 on usage errors, 2 on data/runtime errors.
int cli_main(int argc, const char* const* argv);

}  // namespace udd
