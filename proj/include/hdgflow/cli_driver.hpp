// Command-line front end (run / converge / sweep / check), exposed as a
// library entry point so it can be driven in-process by tests.

#ifndef HDGFLOW_CLI_DRIVER_HPP
#define HDGFLOW_CLI_DRIVER_HPP

namespace hdgflow {

// Exit codes: 0 success, 1 usage error, 2 solver failure, 3 check failure.
int run_cli(int argc, const char* const* argv);

}  // namespace hdgflow

#endif
