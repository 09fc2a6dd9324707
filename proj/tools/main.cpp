#include "hdgflow/cli_driver.hpp"

int main(int argc, char** argv) { return hdgflow::run_cli(argc, argv); }
