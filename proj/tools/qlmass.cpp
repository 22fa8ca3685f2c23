#include "cli.hpp"

int main(int argc, char** argv) { return qlmass::cli::run_cli(argc, argv); }
