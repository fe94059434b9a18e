#include "wps/cli.hpp"

int main(int argc, char** argv) { return wps::cli::run_command(argc, argv); }
