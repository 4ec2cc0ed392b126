#include "nbdf_cli/commands.hpp"

int main(int argc, char** argv) { return nbdf::cli::run_cli(argc, argv); }
