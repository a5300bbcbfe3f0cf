#include "threadtrace/cli.hpp"

int main(int argc, char** argv) { return threadtrace::cli::cli_main(argc, argv); }
