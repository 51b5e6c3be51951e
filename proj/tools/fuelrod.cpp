#include "fuelrod/cli.hpp"

int main(int argc, char** argv) { return fuelrod::cli_run(argc, argv); }
