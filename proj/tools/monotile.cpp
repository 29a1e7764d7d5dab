#include "monotile/cli.hpp"

int main(int argc, char** argv) { return monotile::cli::main_entry(argc, argv); }
