#include "bandgap/cli.hpp"

int main(int argc, char** argv) { return bandgap::run_cli(argc, argv); }
